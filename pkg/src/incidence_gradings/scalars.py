"""Exact scalars: rationals, cyclotomic fields Q(zeta_N) and optional prime fields.

Rationals are plain :class:`fractions.Fraction` (or ``int``).  Elements of
Q(zeta_N) are :class:`CyclotomicScalar` values stored as residues modulo the
N-th cyclotomic polynomial in the power basis ``1, z, ..., z^(phi(N)-1)``.
Mixed-conductor arithmetic lifts both operands to the lcm of the conductors.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from .errors import ConductorOverflow, DivisionByZero, InsufficientRoots

_conductor_max = 10_000


def set_conductor_max(bound: int) -> None:
    global _conductor_max
    if bound < 1:
        raise ValueError("conductor bound must be positive")
    _conductor_max = int(bound)


def conductor_max() -> int:
    return _conductor_max


def _check_conductor(n: int) -> None:
    if n < 1:
        raise ValueError(f"conductor must be positive, got {n}")
    if n > _conductor_max:
        raise ConductorOverflow(f"conductor {n} exceeds bound {_conductor_max}")


# ---------------------------------------------------------------------------
# Dense polynomials (coefficient lists, lowest degree first)
# ---------------------------------------------------------------------------

def _trim(coeffs):
    coeffs = list(coeffs)
    while coeffs and not coeffs[-1]:
        coeffs.pop()
    return coeffs


def _padd(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] = out[i] + c
    return _trim(out)


def _pneg(a):
    return [-c for c in a]


def _pmul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if y:
                out[i + j] = out[i + j] + x * y
    return _trim(out)


def _pdivmod(a, b):
    b = _trim(b)
    if not b:
        raise DivisionByZero("polynomial division by zero")
    a = _trim(a)
    if len(a) < len(b):
        return [], a
    lead = b[-1]
    quot = [0] * (len(a) - len(b) + 1)
    rem = list(a)
    for k in range(len(quot) - 1, -1, -1):
        c = rem[k + len(b) - 1]
        if not c:
            continue
        if isinstance(c, int) and isinstance(lead, int):
            c = c // lead if c % lead == 0 else Fraction(c, lead)
        else:
            c = c / lead
        quot[k] = c
        for i, y in enumerate(b):
            rem[k + i] = rem[k + i] - c * y
    return _trim(quot), _trim(rem[: len(b) - 1])


def _pegcd(a, b):
    """Return (g, s, t) with s*a + t*b = g and g monic."""
    r0, r1 = _trim(a), _trim(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = _pdivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _padd(s0, _pneg(_pmul(q, s1)))
        t0, t1 = t1, _padd(t0, _pneg(_pmul(q, t1)))
    if not r0:
        return [], s0, t0
    lead = r0[-1]
    inv = Fraction(1) / lead if isinstance(lead, (int, Fraction)) else 1 / lead
    return [c * inv for c in r0], [c * inv for c in s0], [c * inv for c in t0]


class Polynomial:
    """Univariate polynomial with exact coefficients, lowest degree first."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = tuple(_trim(coeffs))

    @classmethod
    def x(cls) -> "Polynomial":
        return cls([0, 1])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (list, tuple)):
            return self.coeffs == tuple(_trim(other))
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        return Polynomial(_padd(list(self.coeffs), list(_as_poly(other).coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(_pneg(self.coeffs))

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        return Polynomial(_pmul(list(self.coeffs), list(_as_poly(other).coeffs)))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other):
        q, r = _pdivmod(list(self.coeffs), list(_as_poly(other).coeffs))
        return Polynomial(q), Polynomial(r)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __call__(self, x, one=None):
        """Evaluate by Horner's rule.

        ``one`` is the multiplicative identity used for the constant term; it
        may be omitted when the constant term is zero (as for the idempotent
        polynomials used on matrices).
        """
        if not self.coeffs:
            return 0 if one is None else one * 0
        if self.coeffs[0] and one is None:
            one = 1
        # p(x) - p(0) = x*c1 + x*(x*c2 + x*(...)), so no identity is needed
        acc = None
        for c in reversed(self.coeffs[1:]):
            acc = x * c if acc is None else acc * x + x * c
        if acc is None:
            acc = x * 0
        if self.coeffs[0]:
            acc = acc + one * self.coeffs[0]
        return acc

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            if k == 0:
                terms.append(str(c))
            elif c == 1:
                terms.append(mono)
            elif c == -1:
                terms.append("-" + mono)
            else:
                terms.append(f"{c}*{mono}")
        return " + ".join(terms).replace("+ -", "- ")


def _as_poly(value) -> Polynomial:
    if isinstance(value, Polynomial):
        return value
    return Polynomial([value])


# ---------------------------------------------------------------------------
# Cyclotomic polynomials and tables
# ---------------------------------------------------------------------------

def _divisors(n: int) -> list[int]:
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


@lru_cache(maxsize=None)
def _cyclotomic_coeffs(n: int) -> tuple[int, ...]:
    num = [-1] + [0] * (n - 1) + [1]
    for d in _divisors(n)[:-1]:
        q, r = _pdivmod(num, list(_cyclotomic_coeffs(d)))
        assert not r
        num = q
    return tuple(int(c) for c in num)


def cyclotomic_polynomial(n: int) -> Polynomial:
    """Phi_n, obtained by dividing x^n - 1 by Phi_d for the proper divisors d."""
    if n < 1:
        raise ValueError("cyclotomic_polynomial needs n >= 1")
    _check_conductor(n)
    return Polynomial(_cyclotomic_coeffs(n))


def euler_phi(n: int) -> int:
    return len(_cyclotomic_coeffs(n)) - 1


def _mobius(n: int) -> int:
    result, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            result = -result
        p += 1
    return -result if n > 1 else result


@lru_cache(maxsize=None)
def _tables(n: int):
    """Return (phi, Phi_n coefficients, x^k mod Phi_n table, normalized trace table)."""
    poly = _cyclotomic_coeffs(n)
    phi = len(poly) - 1
    top = max(n, 2 * phi - 1)
    powers = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(top):
        powers.append(tuple(cur))
        lead = cur[-1]
        cur = [0] + cur[:-1]
        if lead:
            for i in range(phi):
                cur[i] -= lead * poly[i]
    traces = []
    for k in range(phi):
        g = math.gcd(n, k)
        traces.append(sum(_mobius(n // d) * d for d in _divisors(g)))
    return phi, poly, powers, tuple(traces)


def _reduce(conv: list, n: int) -> tuple:
    phi, poly, _, _ = _tables(n)
    for k in range(len(conv) - 1, phi - 1, -1):
        c = conv[k]
        if c:
            base = k - phi
            for i in range(phi):
                if poly[i]:
                    conv[base + i] -= c * poly[i]
    out = conv[:phi]
    out.extend([0] * (phi - len(out)))
    return tuple(out)


def _lift(coeffs: tuple, n: int, target: int) -> tuple:
    if n == target:
        return coeffs
    step = target // n
    phi, _, powers, _ = _tables(target)
    out = [0] * phi
    for k, c in enumerate(coeffs):
        if c:
            row = powers[(k * step) % target]
            for i, v in enumerate(row):
                if v:
                    out[i] += c * v
    return tuple(out)


class CyclotomicScalar:
    """An exact element of Q(zeta_N).

    ``coeffs[k]`` is the rational coefficient of ``z^k``; the tuple always has
    length phi(N) and is reduced modulo Phi_N.
    """

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs):
        _check_conductor(conductor)
        phi = _tables(conductor)[0]
        coeffs = list(coeffs)
        if len(coeffs) != phi:
            coeffs = list(_reduce(coeffs + [0] * max(0, phi - len(coeffs)), conductor))
        self.conductor = conductor
        self.coeffs = tuple(coeffs)

    @classmethod
    def _raw(cls, conductor, coeffs):
        obj = object.__new__(cls)
        obj.conductor = conductor
        obj.coeffs = coeffs
        return obj

    @classmethod
    def rational(cls, value, conductor: int = 1) -> "CyclotomicScalar":
        phi = _tables(conductor)[0]
        return cls._raw(conductor, (value,) + (0,) * (phi - 1))

    # -- coercion ----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, CyclotomicScalar):
            if other.conductor == self.conductor:
                return self.conductor, self.coeffs, other.coeffs
            n = self.conductor * other.conductor // math.gcd(self.conductor, other.conductor)
            _check_conductor(n)
            return n, _lift(self.coeffs, self.conductor, n), _lift(other.coeffs, other.conductor, n)
        if isinstance(other, (int, Fraction)):
            phi = len(self.coeffs)
            return self.conductor, self.coeffs, (other,) + (0,) * (phi - 1)
        return None

    def lift(self, conductor: int) -> "CyclotomicScalar":
        if conductor % self.conductor:
            raise ValueError(f"cannot embed Q(zeta_{self.conductor}) into Q(zeta_{conductor})")
        _check_conductor(conductor)
        return CyclotomicScalar._raw(conductor, _lift(self.coeffs, self.conductor, conductor))

    # -- predicates --------------------------------------------------------
    def __bool__(self):
        return any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.coeffs[0])

    def normalized_trace(self) -> Fraction:
        phi, _, _, traces = _tables(self.conductor)
        return Fraction(sum(c * t for c, t in zip(self.coeffs, traces)), phi)

    def __eq__(self, other):
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        _, a, b = parts
        return a == b

    def __hash__(self):
        return hash(self.normalized_trace())

    # -- arithmetic --------------------------------------------------------
    def __neg__(self):
        return CyclotomicScalar._raw(self.conductor, tuple(-c for c in self.coeffs))

    def __add__(self, other):
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        n, a, b = parts
        return CyclotomicScalar._raw(n, tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __sub__(self, other):
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        n, a, b = parts
        return CyclotomicScalar._raw(n, tuple(x - y for x, y in zip(a, b)))

    def __rsub__(self, other):
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        n, a, b = parts
        return CyclotomicScalar._raw(n, tuple(y - x for x, y in zip(a, b)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicScalar._raw(self.conductor, tuple(c * other for c in self.coeffs))
        parts = self._coerce(other)
        if parts is None:
            return NotImplemented
        n, a, b = parts
        if len(a) == 1:
            return CyclotomicScalar._raw(n, (a[0] * b[0],))
        conv = [0] * (2 * len(a) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        conv[i + j] += x * y
        return CyclotomicScalar._raw(n, _reduce(conv, n))

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicScalar":
        if not self:
            raise DivisionByZero("division by zero in Q(zeta_N)")
        if len(self.coeffs) == 1:
            return CyclotomicScalar._raw(self.conductor, (Fraction(1) / self.coeffs[0],))
        g, s, _ = _pegcd(list(self.coeffs), list(_tables(self.conductor)[1]))
        assert len(g) == 1, "Phi_N is irreducible, so gcd must be 1"
        s = list(s) + [0] * (len(self.coeffs) - len(s))
        return CyclotomicScalar._raw(self.conductor, _reduce(s, self.conductor))

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise DivisionByZero("division by zero")
            inv = Fraction(1, other) if isinstance(other, int) else 1 / other
            return CyclotomicScalar._raw(self.conductor, tuple(c * inv for c in self.coeffs))
        if isinstance(other, CyclotomicScalar):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = CyclotomicScalar.rational(1, self.conductor)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self):
        return f"CyclotomicScalar({self.conductor}, {list(self.coeffs)!r})"

    def __str__(self):
        return format_cyclotomic(self.coeffs)


def format_cyclotomic(coeffs) -> str:
    terms = []
    for k, c in enumerate(coeffs):
        if not c:
            continue
        c = Fraction(c)
        mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
        if k == 0:
            terms.append(str(c))
        elif c == 1:
            terms.append(mono)
        elif c == -1:
            terms.append("-" + mono)
        else:
            terms.append(f"{c}*{mono}")
    if not terms:
        return "0"
    return " + ".join(terms).replace("+ -", "- ")


def root_of_unity(n: int, k: int = 1) -> CyclotomicScalar:
    """zeta_n^k as an element of Q(zeta_n)."""
    _check_conductor(n)
    powers = _tables(n)[2]
    return CyclotomicScalar._raw(n, powers[k % n])


def poly_crt_split(m: int) -> Polynomial:
    """The polynomial e of degree < 2m with e = 0 mod x^m and e = 1 mod (x-1)^m.

    Evaluated at a matrix whose eigenvalues all lie in {0, 1} and whose Jordan
    blocks have size at most m, it yields the spectral idempotent of the
    eigenvalue 1.  Its constant term is zero.
    """
    if m < 1:
        raise ValueError("poly_crt_split needs m >= 1")
    xm = [0] * m + [1]
    ym = list((Polynomial([-1, 1]) ** m).coeffs)
    g, s, _ = _pegcd(xm, ym)
    assert g == [1]
    e = _pmul(s, xm)
    _, e = _pdivmod(e, _pmul(xm, ym))
    return Polynomial([Fraction(c) for c in e])


def scalar_arith(a, b, op: str):
    """Apply ``op`` in {"add", "sub", "mul", "div"} to two exact scalars."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        if not b:
            raise DivisionByZero("division by zero")
        if isinstance(a, int) and isinstance(b, int):
            return Fraction(a, b)
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# Prime fields
# ---------------------------------------------------------------------------

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


class PrimeFieldScalar:
    __slots__ = ("modulus", "residue")

    def __init__(self, modulus: int, residue: int):
        self.modulus = modulus
        self.residue = residue % modulus

    def _other(self, other):
        if isinstance(other, PrimeFieldScalar):
            if other.modulus != self.modulus:
                raise ValueError("mixing different prime fields")
            return other.residue
        if isinstance(other, int):
            return other % self.modulus
        if isinstance(other, Fraction):
            if other.denominator % self.modulus == 0:
                raise DivisionByZero(f"{other} has no image in GF({self.modulus})")
            return other.numerator * pow(other.denominator, -1, self.modulus) % self.modulus
        return None

    def __bool__(self):
        return self.residue != 0

    def __eq__(self, other):
        r = self._other(other)
        if r is None:
            return NotImplemented
        return self.residue == r

    def __hash__(self):
        return hash((self.modulus, self.residue))

    def __neg__(self):
        return PrimeFieldScalar(self.modulus, -self.residue)

    def __add__(self, other):
        r = self._other(other)
        if r is None:
            return NotImplemented
        return PrimeFieldScalar(self.modulus, self.residue + r)

    __radd__ = __add__

    def __sub__(self, other):
        r = self._other(other)
        if r is None:
            return NotImplemented
        return PrimeFieldScalar(self.modulus, self.residue - r)

    def __rsub__(self, other):
        r = self._other(other)
        if r is None:
            return NotImplemented
        return PrimeFieldScalar(self.modulus, r - self.residue)

    def __mul__(self, other):
        r = self._other(other)
        if r is None:
            return NotImplemented
        return PrimeFieldScalar(self.modulus, self.residue * r)

    __rmul__ = __mul__

    def __truediv__(self, other):
        r = self._other(other)
        if r is None:
            return NotImplemented
        if r == 0:
            raise DivisionByZero(f"division by zero in GF({self.modulus})")
        return PrimeFieldScalar(self.modulus, self.residue * pow(r, -1, self.modulus))

    def __rtruediv__(self, other):
        r = self._other(other)
        if r is None:
            return NotImplemented
        if self.residue == 0:
            raise DivisionByZero(f"division by zero in GF({self.modulus})")
        return PrimeFieldScalar(self.modulus, r * pow(self.residue, -1, self.modulus))

    def __pow__(self, k: int):
        if k < 0:
            return 1 / self ** (-k)
        return PrimeFieldScalar(self.modulus, pow(self.residue, k, self.modulus))

    def __repr__(self):
        return f"PrimeFieldScalar({self.modulus}, {self.residue})"

    def __str__(self):
        return str(self.residue)


# ---------------------------------------------------------------------------
# Field backends
# ---------------------------------------------------------------------------


class CyclotomicField:
    """The working field Q(zeta_N) of a computation session.

    ``conductor`` is the N declared by the input; roots of unity of other
    orders are produced on demand at their own conductor and lifted by the
    scalar arithmetic.
    """

    kind = "cyclotomic"
    characteristic = 0

    def __init__(self, conductor: int = 1):
        _check_conductor(conductor)
        self.conductor = conductor

    def __repr__(self):
        return f"CyclotomicField({self.conductor})"

    def __eq__(self, other):
        return isinstance(other, CyclotomicField) and other.conductor == self.conductor

    def __hash__(self):
        return hash(("cyclotomic", self.conductor))

    def zeta(self, order: int, k: int = 1):
        """zeta_order^k, as a Fraction when the value is +-1."""
        k %= order
        if k == 0:
            return Fraction(1)
        if 2 * k == order:
            return Fraction(-1)
        g = math.gcd(order, k)
        return root_of_unity(order // g, k // g)

    def has_roots(self, order: int) -> bool:
        return True

    def check_dimension(self, dim: int) -> None:
        return None

    def element(self, value):
        return value

    def parse_scalar(self, text: str, line=None):
        from .fileformats import parse_scalar_expression

        return parse_scalar_expression(text, self, line)

    def format(self, value) -> str:
        if isinstance(value, CyclotomicScalar):
            if value.is_rational():
                return str(Fraction(value.coeffs[0]))
            if self.conductor % value.conductor == 0:
                return format_cyclotomic(value.lift(self.conductor).coeffs)
            return f"[{value} @ zeta_{value.conductor}]"
        return str(Fraction(value))


class PrimeField:
    """GF(p) with a fixed primitive ``root_order``-th root of unity ``z``."""

    kind = "prime"

    def __init__(self, modulus: int, root_order: int = 1):
        if not _is_prime(modulus):
            raise ValueError(f"{modulus} is not prime")
        if (modulus - 1) % root_order:
            raise InsufficientRoots(
                f"GF({modulus}) has no primitive {root_order}-th root of unity (need p = 1 mod {root_order})"
            )
        self.modulus = modulus
        self.conductor = root_order
        self.characteristic = modulus
        self._generator = self._primitive_root()

    def __repr__(self):
        return f"PrimeField({self.modulus}, {self.conductor})"

    def __eq__(self, other):
        return isinstance(other, PrimeField) and (other.modulus, other.conductor) == (self.modulus, self.conductor)

    def __hash__(self):
        return hash(("prime", self.modulus, self.conductor))

    def _primitive_root(self) -> int:
        p = self.modulus
        if p == 2:
            return 1
        factors = [q for q in _divisors(p - 1) if q > 1 and _is_prime(q)]
        for g in range(2, p):
            if all(pow(g, (p - 1) // q, p) != 1 for q in factors):
                return g
        raise AssertionError("no primitive root found")

    def zeta(self, order: int, k: int = 1):
        if (self.modulus - 1) % order:
            raise InsufficientRoots(f"GF({self.modulus}) lacks primitive {order}-th roots of unity")
        base = pow(self._generator, (self.modulus - 1) // order, self.modulus)
        return PrimeFieldScalar(self.modulus, pow(base, k % order, self.modulus))

    def has_roots(self, order: int) -> bool:
        return (self.modulus - 1) % order == 0

    def check_dimension(self, dim: int) -> None:
        if self.modulus <= dim:
            raise ValueError(f"prime field backend needs p > dim I(X) = {dim}, got p = {self.modulus}")

    def element(self, value):
        if isinstance(value, PrimeFieldScalar):
            return value
        return PrimeFieldScalar(self.modulus, 0) + value

    def parse_scalar(self, text: str, line=None):
        from .fileformats import parse_scalar_expression

        return self.element(parse_scalar_expression(text, self, line))

    def format(self, value) -> str:
        return str(self.element(value))
