"""Exact scalars: rationals, Bernoulli numbers, even zeta values, the ring Q[pi^2],
and polynomials / rational functions in a formal genus variable ``g``.

Rationals are :class:`fractions.Fraction` throughout (always in lowest terms,
division by zero raises).  Real-number questions about elements of Q[pi^2]
(signs, comparisons, decimal rendering) are answered with exact rational
interval arithmetic around an enclosure of pi, so every printed digit and
every inequality verdict is certified.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from mpmath.libmp import mpf_pi, round_floor

__all__ = [
    "bernoulli",
    "zeta_even",
    "sinh_coeff",
    "sinh_coeff_rational",
    "PiValue",
    "pi_bounds",
    "enclose",
    "sign",
    "compare",
    "pi_eval",
    "pi_eval_ratio",
    "round_half_up",
    "truncate_decimal",
    "GPoly",
    "GRationalFn",
    "InverseGSeries",
    "expand_inverse_g",
    "double_factorial",
    "gpoly_product",
]

RationalLike = Fraction | int

COMPARE_START_DIGITS = 100
COMPARE_MAX_DIGITS = 1000
DEFAULT_MAX_DIGITS = 200


def double_factorial(n: int) -> int:
    """n!! for n >= -1, with (-1)!! = 0!! = 1."""
    if n < -1:
        raise ValueError("double factorial needs n >= -1")
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


# --------------------------------------------------------------------------
# Bernoulli numbers and zeta values
# --------------------------------------------------------------------------

_BERNOULLI: list[Fraction] = [Fraction(1)]
_BERNOULLI_LOCK = threading.Lock()


def bernoulli(m: int) -> Fraction:
    """B_m with B_1 = -1/2, from sum_{j=0}^{m} C(m+1, j) B_j = 0."""
    if m < 0:
        raise ValueError("m must be >= 0")
    if m < len(_BERNOULLI):
        return _BERNOULLI[m]
    # the table is indexed by position, so extending it must be atomic
    with _BERNOULLI_LOCK:
        while len(_BERNOULLI) <= m:
            k = len(_BERNOULLI)
            s = sum(math.comb(k + 1, j) * _BERNOULLI[j] for j in range(k))
            _BERNOULLI.append(-s / (k + 1))
    return _BERNOULLI[m]


def zeta_even(L: int) -> "PiValue":
    """zeta(2L) = (-1)^(L+1) B_2L (2 pi)^2L / (2 (2L)!) as a single pi^2L term."""
    if L < 1:
        raise ValueError("zeta_even needs L >= 1")
    coef = (-1) ** (L + 1) * bernoulli(2 * L) * Fraction(2) ** (2 * L) / (2 * math.factorial(2 * L))
    return PiValue({L: coef})


@lru_cache(maxsize=None)
def sinh_coeff_rational(L: int) -> Fraction:
    """Rational part of a_L, i.e. a_L / pi^(2L)."""
    if L < 0:
        raise ValueError("L must be >= 0")
    if L == 0:
        return Fraction(1, 2)
    return zeta_even(L)[L] * (1 - Fraction(2, 4**L))


def sinh_coeff(L: int) -> "PiValue":
    """a_L = zeta(2L)(1 - 2^(1-2L)) for L >= 1, and a_0 = 1/2."""
    return PiValue({L: sinh_coeff_rational(L)})


# --------------------------------------------------------------------------
# Q[pi^2]
# --------------------------------------------------------------------------


class PiValue:
    """An element sum_e c_e pi^(2e) of Q[pi^2], immutable and canonical.

    Keys are the exponents ``e`` of pi^2; zero coefficients are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, RationalLike] | None = None):
        clean = {}
        for e, c in (terms or {}).items():
            if e < 0:
                raise ValueError("negative pi exponent")
            c = Fraction(c)
            if c:
                clean[int(e)] = c
        self._terms = tuple(sorted(clean.items()))
        self._hash = None

    @classmethod
    def _from_sorted(cls, items: tuple) -> "PiValue":
        obj = cls.__new__(cls)
        obj._terms = items
        obj._hash = None
        return obj

    @classmethod
    def monomial(cls, coef: RationalLike, exp: int) -> "PiValue":
        return cls({exp: coef})

    @classmethod
    def coerce(cls, x) -> "PiValue":
        if isinstance(x, PiValue):
            return x
        if isinstance(x, (int, Fraction)):
            return cls({0: x})
        raise TypeError(f"cannot convert {type(x).__name__} to PiValue")

    @property
    def terms(self) -> dict[int, Fraction]:
        return dict(self._terms)

    def __getitem__(self, e: int) -> Fraction:
        for k, c in self._terms:
            if k == e:
                return c
        return Fraction(0)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(e == 0 for e, _ in self._terms)

    def degree(self) -> int:
        """Largest exponent of pi^2 present (-1 for zero)."""
        return self._terms[-1][0] if self._terms else -1

    def _combine(self, other: "PiValue", sgn: int) -> "PiValue":
        out = dict(self._terms)
        for e, c in other._terms:
            v = out.get(e, 0) + sgn * c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return PiValue._from_sorted(tuple(sorted(out.items())))

    def __add__(self, other):
        try:
            other = PiValue.coerce(other)
        except TypeError:
            return NotImplemented
        return self._combine(other, 1)

    __radd__ = __add__

    def __sub__(self, other):
        try:
            other = PiValue.coerce(other)
        except TypeError:
            return NotImplemented
        return self._combine(other, -1)

    def __rsub__(self, other):
        try:
            other = PiValue.coerce(other)
        except TypeError:
            return NotImplemented
        return other._combine(self, -1)

    def __neg__(self):
        return PiValue._from_sorted(tuple((e, -c) for e, c in self._terms))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return PiValue()
            return PiValue._from_sorted(tuple((e, c * other) for e, c in self._terms))
        if not isinstance(other, PiValue):
            return NotImplemented
        out: dict[int, Fraction] = {}
        for e1, c1 in self._terms:
            for e2, c2 in other._terms:
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return PiValue(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        if isinstance(other, PiValue) and len(other._terms) == 1:
            (e, c), = other._terms
            if all(k >= e for k, _ in self._terms):
                return PiValue({k - e: v / c for k, v in self._terms})
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            return NotImplemented
        out = PiValue({0: 1})
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PiValue.coerce(other)
        if not isinstance(other, PiValue):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for e, c in reversed(self._terms):
            parts.append(str(c) if e == 0 else f"{c}*pi^{2 * e}")
        return " + ".join(parts)

    def __repr__(self):
        return f"PiValue({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "PiValue":
        """Inverse of ``str``: ``'29/192*pi^8 + 1/2'``."""
        text = text.strip()
        if text == "0":
            return cls()
        out: dict[int, Fraction] = {}
        for part in text.split(" + "):
            if "*pi^" in part:
                c, p = part.split("*pi^")
                p = int(p)
                if p % 2:
                    raise ValueError(f"odd power of pi in {part!r}")
                e = p // 2
            else:
                c, e = part, 0
            if e in out:
                raise ValueError(f"repeated exponent in {text!r}")
            out[e] = Fraction(c)
        value = cls(out)
        if str(value) != text:
            raise ValueError(f"non-canonical PiValue text {text!r}")
        return value


# --------------------------------------------------------------------------
# certified numerics
# --------------------------------------------------------------------------


_PI_LOCK = threading.Lock()


@lru_cache(maxsize=32)
def pi_bounds(digits: int) -> tuple[Fraction, Fraction]:
    """Rational lo < pi < hi with hi - lo = 2 * 10^-digits."""
    # mpmath memoizes pi in two attributes written one after the other, so a
    # concurrent reader can see a mismatched pair; keep it to one thread
    with _PI_LOCK:
        _, man, exp, _ = mpf_pi(int(digits * 3.33) + 32, round_floor)
    approx = Fraction(int(man)) * Fraction(2) ** exp
    eps = Fraction(1, 10**digits)
    return approx - eps, approx + eps


def enclose(v: PiValue, digits: int) -> tuple[Fraction, Fraction]:
    """Rational interval containing the real number v, pi known to ``digits``."""
    lo_pi, hi_pi = pi_bounds(digits)
    lo2, hi2 = lo_pi * lo_pi, hi_pi * hi_pi
    lo = hi = Fraction(0)
    for e, c in v.terms.items():
        a, b = lo2**e, hi2**e
        if c > 0:
            lo += c * a
            hi += c * b
        else:
            lo += c * b
            hi += c * a
    return lo, hi


def sign(v: PiValue, start: int = COMPARE_START_DIGITS, limit: int = COMPARE_MAX_DIGITS) -> int:
    """Certified sign of v as a real number.

    Exact zero is detected symbolically (pi is transcendental); otherwise the
    enclosure is refined by doubling digits until it excludes 0.
    """
    if v.is_zero():
        return 0
    if v.is_rational():
        return 1 if v[0] > 0 else -1
    digits = start
    while True:
        lo, hi = enclose(v, digits)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        if digits >= limit:
            raise ArithmeticError(f"could not certify sign of {v} with {limit} digits")
        digits = min(2 * digits, limit)


def compare(x, y) -> int:
    """-1, 0, 1 according to x < y, x == y, x > y as real numbers."""
    return sign(PiValue.coerce(x) - PiValue.coerce(y))


def round_half_up(x: Fraction, digits: int) -> str:
    """Decimal string of x rounded half-up (away from zero) to ``digits`` places."""
    scaled = abs(x) * 10**digits
    q = math.floor(scaled + Fraction(1, 2))
    neg = x < 0 and q != 0
    s = str(q).rjust(digits + 1, "0")
    body = s if digits == 0 else f"{s[:-digits]}.{s[-digits:]}"
    return ("-" if neg else "") + body


def truncate_decimal(x: Fraction, digits: int) -> str:
    """Decimal string of x cut (toward zero) after ``digits`` places."""
    q = math.floor(abs(x) * 10**digits)
    neg = x < 0 and q != 0
    s = str(q).rjust(digits + 1, "0")
    body = s if digits == 0 else f"{s[:-digits]}.{s[-digits:]}"
    return ("-" if neg else "") + body


def _certified_round(bounds, digits: int, guard_start: int, limit: int) -> str:
    guard = guard_start
    while True:
        lo, hi = bounds(guard)
        a, b = round_half_up(lo, digits), round_half_up(hi, digits)
        if a == b:
            return a
        if guard >= limit:
            raise ArithmeticError("rounding could not be certified")
        guard = min(2 * guard, limit)


def pi_eval(v, digits: int, max_digits: int = DEFAULT_MAX_DIGITS) -> str:
    """Decimal value of v, correctly rounded to ``digits`` fractional digits."""
    if digits < 0 or digits > max_digits:
        raise ValueError(f"digits must be in [0, {max_digits}]")
    v = PiValue.coerce(v)
    if v.is_rational():
        return round_half_up(v[0], digits)
    return _certified_round(lambda d: enclose(v, d), digits, digits + 20, 40 * (digits + 20))


def pi_eval_ratio(num, den, digits: int, max_digits: int = DEFAULT_MAX_DIGITS) -> str:
    """Decimal value of num/den for PiValues, certified like :func:`pi_eval`."""
    if digits < 0 or digits > max_digits:
        raise ValueError(f"digits must be in [0, {max_digits}]")
    num, den = PiValue.coerce(num), PiValue.coerce(den)
    if sign(den) == 0:
        raise ZeroDivisionError("denominator is zero")

    def bounds(d):
        a, b = enclose(num, d)
        c, e = enclose(den, d)
        if c <= 0 <= e:
            return Fraction(-1), Fraction(1)  # too coarse, forces refinement
        qs = [a / c, a / e, b / c, b / e]
        return min(qs), max(qs)

    return _certified_round(bounds, digits, digits + 20, 40 * (digits + 20))


# --------------------------------------------------------------------------
# polynomials in g
# --------------------------------------------------------------------------


class GPoly:
    """Exact polynomial in g; ``coefficients[j]`` is the coefficient of g^j."""

    __slots__ = ("coefficients",)

    def __init__(self, coefficients: Iterable[RationalLike] = ()):
        cs = [Fraction(c) for c in coefficients]
        while cs and not cs[-1]:
            cs.pop()
        self.coefficients: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def const(cls, c: RationalLike) -> "GPoly":
        return cls([c])

    @classmethod
    def g(cls) -> "GPoly":
        return cls([0, 1])

    @classmethod
    def linear(cls, a: RationalLike, b: RationalLike) -> "GPoly":
        """a*g + b"""
        return cls([b, a])

    @classmethod
    def coerce(cls, x) -> "GPoly":
        if isinstance(x, GPoly):
            return x
        if isinstance(x, (int, Fraction)):
            return cls([x])
        raise TypeError(f"cannot convert {type(x).__name__} to GPoly")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def lead(self) -> Fraction:
        return self.coefficients[-1] if self.coefficients else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coefficients

    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients)

    def __call__(self, x):
        acc = Fraction(0)
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        try:
            other = GPoly.coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self.coefficients, other.coefficients
        n = max(len(a), len(b))
        return GPoly((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return GPoly(-c for c in self.coefficients)

    def __sub__(self, other):
        try:
            other = GPoly.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return GPoly.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GPoly(c * other for c in self.coefficients)
        if not isinstance(other, GPoly):
            return NotImplemented
        a, b = self.coefficients, other.coefficients
        if not a or not b:
            return GPoly()
        out = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return GPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = GPoly.const(1)
        for _ in range(k):
            out = out * self
        return out

    def shift(self, s: RationalLike) -> "GPoly":
        """The polynomial g -> p(g - s)."""
        out = GPoly()
        lin = GPoly.linear(1, -Fraction(s))
        for c in reversed(self.coefficients):
            out = out * lin + c
        return out

    def divmod(self, other: "GPoly") -> tuple["GPoly", "GPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coefficients)
        dq = other.degree
        quot = [Fraction(0)] * max(len(rem) - dq, 0)
        lead = other.lead
        for i in range(len(rem) - 1, dq - 1, -1):
            c = rem[i] / lead
            if c:
                quot[i - dq] = c
                for j, oc in enumerate(other.coefficients):
                    rem[i - dq + j] -= c * oc
        return GPoly(quot), GPoly(rem[:dq])

    def monic(self) -> "GPoly":
        return self * (1 / self.lead) if self.coefficients else self

    def content(self) -> Fraction:
        """Positive rational c with self / c primitive in Z[g]."""
        if not self.coefficients:
            return Fraction(0)
        den = math.lcm(*(c.denominator for c in self.coefficients))
        num = math.gcd(*(c.numerator * (den // c.denominator) for c in self.coefficients))
        return Fraction(num, den)

    @staticmethod
    def gcd(a: "GPoly", b: "GPoly") -> "GPoly":
        """Monic gcd (zero if both are zero)."""
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = GPoly.coerce(other)
        if not isinstance(other, GPoly):
            return NotImplemented
        return self.coefficients == other.coefficients

    def __hash__(self):
        return hash(("GPoly", self.coefficients))

    def __str__(self):
        if not self.coefficients:
            return "0"
        out = []
        for j in range(self.degree, -1, -1):
            c = self.coefficients[j]
            if not c:
                continue
            sgn = "-" if c < 0 else "+"
            a = abs(c)
            mono = "" if j == 0 else ("g" if j == 1 else f"g^{j}")
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            elif a.denominator == 1:
                body = f"{a}{mono}"
            else:
                body = f"({a}){mono}"
            out.append((sgn, body))
        first_sign, first = out[0]
        text = ("-" if first_sign == "-" else "") + first
        for sgn, body in out[1:]:
            text += sgn + body
        return text

    def __repr__(self):
        return f"GPoly({str(self)!r})"


class GRationalFn:
    """numer/denom in lowest terms.

    Canonical scaling: both polynomials have integer coefficients with no
    common integer factor overall, and denom has positive leading coefficient.
    """

    __slots__ = ("numer", "denom")

    def __init__(self, numer, denom=1, *, _normalized: bool = False):
        numer, denom = GPoly.coerce(numer), GPoly.coerce(denom)
        if denom.is_zero():
            raise ZeroDivisionError("zero denominator")
        if not _normalized:
            numer, denom = self._normalize(numer, denom)
        self.numer: GPoly = numer
        self.denom: GPoly = denom

    @staticmethod
    def _normalize(numer: GPoly, denom: GPoly) -> tuple[GPoly, GPoly]:
        if numer.is_zero():
            return GPoly(), GPoly.const(1)
        h = GPoly.gcd(numer, denom)
        if h.degree > 0:
            numer, denom = numer.divmod(h)[0], denom.divmod(h)[0]
        cn, cd = numer.content(), denom.content()
        # integer scaling with joint content 1
        scale_n, scale_d = numer * (1 / cn), denom * (1 / cd)
        ratio = cn / cd
        numer, denom = scale_n * ratio.numerator, scale_d * ratio.denominator
        if denom.lead < 0:
            numer, denom = -numer, -denom
        return numer, denom

    @classmethod
    def coerce(cls, x) -> "GRationalFn":
        if isinstance(x, GRationalFn):
            return x
        return cls(GPoly.coerce(x))

    def __call__(self, x):
        d = self.denom(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at g={x}")
        return self.numer(x) / d

    def __add__(self, other):
        other = GRationalFn.coerce(other)
        return GRationalFn(self.numer * other.denom + other.numer * self.denom, self.denom * other.denom)

    __radd__ = __add__

    def __neg__(self):
        return GRationalFn(-self.numer, self.denom, _normalized=True)

    def __sub__(self, other):
        return self + (-GRationalFn.coerce(other))

    def __rsub__(self, other):
        return GRationalFn.coerce(other) - self

    def __mul__(self, other):
        other = GRationalFn.coerce(other)
        return GRationalFn(self.numer * other.numer, self.denom * other.denom)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = GRationalFn.coerce(other)
        if other.numer.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return GRationalFn(self.numer * other.denom, self.denom * other.numer)

    def __eq__(self, other):
        try:
            other = GRationalFn.coerce(other)
        except TypeError:
            return NotImplemented
        return self.numer == other.numer and self.denom == other.denom

    def __hash__(self):
        return hash(("GRationalFn", self.numer, self.denom))

    def __str__(self):
        return f"({self.numer})/({self.denom})"

    def __repr__(self):
        return f"GRationalFn({str(self)!r})"


@dataclass(frozen=True)
class InverseGSeries:
    """sum_j coefficients[j] * g^-j, truncated at g^-order."""

    order: int
    coefficients: tuple[Fraction, ...]

    def partial_sum(self, g) -> Fraction:
        g = Fraction(g)
        return sum((c / g**j for j, c in enumerate(self.coefficients)), Fraction(0))


def expand_inverse_g(f: GRationalFn, order: int) -> InverseGSeries:
    """Laurent expansion of f at g = infinity up to g^-order (needs deg numer <= deg denom)."""
    if order < 0:
        raise ValueError("order must be >= 0")
    m = f.denom.degree
    if f.numer.degree > m:
        raise ValueError("numerator degree exceeds denominator degree")
    # in x = 1/g: f = N~(x)/D~(x) with N~_i = numer[m-i], D~_i = denom[m-i]
    num = [f.numer.coefficients[m - i] if 0 <= m - i <= f.numer.degree else Fraction(0) for i in range(order + 1)]
    den = [f.denom.coefficients[m - i] if m - i >= 0 else Fraction(0) for i in range(order + 1)]
    out: list[Fraction] = []
    for i in range(order + 1):
        acc = num[i] - sum((den[j] * out[i - j] for j in range(1, i + 1)), Fraction(0))
        out.append(acc / den[0])
    return InverseGSeries(order, tuple(out))


def gpoly_product(factors: Sequence[GPoly]) -> GPoly:
    out = GPoly.const(1)
    for f in factors:
        out = out * f
    return out
