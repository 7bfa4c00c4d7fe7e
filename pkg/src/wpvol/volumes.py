"""Brackets [tau_d1 ... tau_dn]_{g,n} and Weil-Petersson volume polynomials.

Two independent routes compute every bracket:

* ``def``: the intersection-number definition,
  prod (2d_i+1)!! 4^|d| (2 pi^2)^d0 / d0! <prod tau_di kappa_1^d0>_g with
  d0 = 3g-3+n-|d|, expanded into pure psi correlators;
* ``rec``: Mirzakhani's recursion in its differential (coefficient) form.

A bracket is always a rational multiple of pi^(2 d0), so both memos store
only that rational; the public functions wrap it in a :class:`PiValue`.
"""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from gmpy2 import mpq

from .correlators import TauVector, canonical, is_stable, sub_multisets
from .exact import PiValue, double_factorial, pi_eval, sinh_coeff_rational
from .kappa import KappaMonomial, mixed_correlator

__all__ = [
    "BracketDomainError",
    "bracket_def",
    "bracket_rec",
    "bracket",
    "volume",
    "VolumePolynomial",
    "volume_polynomial",
    "evaluate_volume",
    "one_point_coeff",
    "one_point_coeff_formula",
    "identity_dilaton_check",
    "identity_string_check",
    "identity_kdv2_check",
    "dilaton_sides",
    "string_sides",
    "kdv2_sides",
    "admissible_vectors",
    "export_volume_polynomial",
    "parse_volume_polynomial",
]

VOLUME_FORMAT = 1
ROUTES = ("def", "rec")


class BracketDomainError(ValueError):
    pass


def _excess(g: int, d: TauVector) -> int:
    return 3 * g - 3 + len(d) - sum(d)


def _validate(g: int, n: int, d) -> TauVector:
    d = canonical(d)
    if len(d) != n:
        raise BracketDomainError(f"expected {n} tau indices, got {len(d)}")
    if not is_stable(g, n):
        raise BracketDomainError(f"(g, n) = ({g}, {n}) is unstable")
    if _excess(g, d) < 0:
        raise BracketDomainError(f"|d| = {sum(d)} exceeds 3g-3+n = {3 * g - 3 + n}")
    return d


class _Memo:
    def __init__(self):
        self.data: dict[tuple[int, TauVector], Fraction] = {}
        self.lock = threading.Lock()

    def put(self, key, value):
        with self.lock:
            self.data.setdefault(key, value)
        return value


_DEF = _Memo()
_REC = _Memo()


# --------------------------------------------------------------------------
# definition route
# --------------------------------------------------------------------------


def _def_coef(g: int, d: TauVector) -> Fraction:
    """Rational part of [d]_{g,n}; zero when unstable or out of range."""
    if g < 0 or not is_stable(g, len(d)):
        return Fraction(0)
    d0 = _excess(g, d)
    if d0 < 0 or (d and d[-1] < 0):
        return Fraction(0)
    key = (g, d)
    v = _DEF.data.get(key)
    if v is not None:
        return v
    w = 4 ** sum(d) * 2**d0
    for x in d:
        w *= double_factorial(2 * x + 1)
    v = Fraction(w, math.factorial(d0)) * mixed_correlator(g, d, KappaMonomial.kappa1(d0))
    return _DEF.put(key, v)


def bracket_def(g: int, n: int, d: Iterable[int]) -> PiValue:
    """[tau_d]_{g,n} from the psi-kappa_1 intersection number."""
    d = _validate(g, n, d)
    return PiValue({_excess(g, d): _def_coef(g, d)})


# --------------------------------------------------------------------------
# recursion route
# --------------------------------------------------------------------------


def _ins(d: TauVector, *extra: int) -> TauVector:
    return tuple(sorted(d + extra, reverse=True))


# the recursion runs on gmpy2 rationals; values leave through _frac
_ZERO = mpq(0)
_ONE = mpq(1)


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def _rec_coef(g: int, d: TauVector) -> Fraction:
    n = len(d)
    if g < 0 or not is_stable(g, n):
        return _ZERO
    d0 = _excess(g, d)
    if d0 < 0:
        return _ZERO
    if g == 0 and n == 3:
        return _ONE
    if g == 1 and n == 1:
        return mpq(_def_coef(g, d))
    key = (g, d)
    v = _REC.data.get(key)
    if v is not None:
        return v
    return _REC.put(key, _mirzakhani(g, d, d0))


def _mirzakhani(g: int, d: TauVector, d0: int) -> Fraction:
    # recursion on the smallest index; d is sorted descending
    alpha = [mpq(sinh_coeff_rational(L)) for L in range(d0 + 1)]
    d1, rest = d[-1], d[:-1]

    total_a = mpq(0)
    seen = set()
    for idx, x in enumerate(rest):
        if x in seen:
            continue
        seen.add(x)
        c = rest.count(x)
        others = rest[:idx] + rest[idx + 1:]
        acc = mpq(0)
        for L in range(d0 + 1):
            top = d1 + x + L - 1
            if top < 0:
                continue
            acc += alpha[L] * _rec_coef(g, _ins(others, top))
        total_a += c * (2 * x + 1) * acc

    total_b = mpq(0)
    if g >= 1:
        for L in range(d0 + 1):
            s = L + d1 - 2
            if s < 0:
                continue
            acc = mpq(0)
            for k1 in range(s + 1):
                acc += _rec_coef(g - 1, _ins(rest, k1, s - k1))
            total_b += alpha[L] * acc

    total_c = mpq(0)
    for left, right, mult in sub_multisets(rest):
        nl, nr = len(left) + 1, len(right) + 1
        sl, sr = sum(left), sum(right)
        for gp in range(g + 1):
            gq = g - gp
            if not (is_stable(gp, nl) and is_stable(gq, nr)):
                continue
            cap1 = 3 * gp - 3 + nl - sl
            cap2 = 3 * gq - 3 + nr - sr
            if cap1 < 0 or cap2 < 0:
                continue
            u = [_rec_coef(gp, _ins(left, k)) for k in range(cap1 + 1)]
            v = [_rec_coef(gq, _ins(right, k)) for k in range(cap2 + 1)]
            acc = mpq(0)
            for k1, a in enumerate(u):
                if not a:
                    continue
                for k2 in range(max(0, d1 - 2 - k1), cap2 + 1):
                    b = v[k2]
                    if b:
                        acc += alpha[k1 + k2 + 2 - d1] * a * b
            total_c += mult * acc

    return 8 * total_a + 16 * (total_b + total_c)


def bracket_rec(g: int, n: int, d: Iterable[int]) -> PiValue:
    """[tau_d]_{g,n} from Mirzakhani's recursion ((0,3) and (1,1) are base cases)."""
    if n < 1:
        raise BracketDomainError("the recursion needs at least one boundary")
    d = _validate(g, n, d)
    return PiValue({_excess(g, d): _frac(_rec_coef(g, d))})


def _coef(g: int, d: TauVector, route: str) -> Fraction:
    if route == "def":
        return _def_coef(g, d)
    if route == "rec":
        if not d:
            return _rec_volume0(g)
        return _frac(_rec_coef(g, d))
    raise ValueError(f"unknown route {route!r}")


def bracket(g: int, d: Iterable[int], route: str = "def") -> PiValue:
    """[tau_d]_{g,n} with n = len(d); zero for unstable or out-of-range input."""
    d = canonical(d)
    if g < 0 or not is_stable(g, len(d)) or _excess(g, d) < 0:
        return PiValue()
    return PiValue({_excess(g, d): _coef(g, d, route)})


def _dilaton_weight(L: int) -> Fraction:
    return Fraction((-1) ** L * (L + 1), 2 * math.factorial(2 * L + 3))


def _rec_volume0(g: int) -> Fraction:
    """Rational part of V_{g,0} from the one-boundary data via the dilaton relation."""
    if g < 2:
        return Fraction(0)
    top = 3 * g - 2
    acc = sum((_dilaton_weight(L) * _frac(_rec_coef(g, (L + 1,))) for L in range(top)), Fraction(0))
    return acc / (2 * g - 2)


def volume(g: int, n: int, route: str = "def") -> PiValue:
    """V_{g,n} = [tau_0 ... tau_0]_{g,n}."""
    if not is_stable(g, n):
        raise BracketDomainError(f"(g, n) = ({g}, {n}) is unstable")
    return bracket(g, (0,) * n, route)


# --------------------------------------------------------------------------
# volume polynomials
# --------------------------------------------------------------------------


def admissible_vectors(g: int, n: int) -> list[TauVector]:
    """Canonical (descending) d with |d| <= 3g-3+n, in lexicographic order."""
    top = 3 * g - 3 + n
    out = []

    def rec(prefix: tuple, left: int, cap: int):
        if len(prefix) == n:
            out.append(prefix)
            return
        for x in range(min(left, cap), -1, -1):
            rec(prefix + (x,), left - x, x)

    if top >= 0:
        rec((), top, top)
    return sorted(out)


@dataclass
class VolumePolynomial:
    """V_{g,n}(2L) = sum_d coefficients[d] prod L_i^(2 d_i), over ordered degree vectors d."""

    g: int
    n: int
    coefficients: dict[TauVector, PiValue] = field(default_factory=dict)

    def coefficient(self, d: Sequence[int]) -> PiValue:
        return self.coefficients.get(tuple(d), PiValue())


def volume_polynomial(g: int, n: int, route: str = "def") -> VolumePolynomial:
    if not is_stable(g, n):
        raise BracketDomainError(f"(g, n) = ({g}, {n}) is unstable")
    coeffs: dict[TauVector, PiValue] = {}
    for d in admissible_vectors(g, n):
        value = bracket(g, d, route)
        den = math.prod(math.factorial(2 * x + 1) for x in d)
        value = value / den
        if value.is_zero():
            continue
        for perm in set(itertools.permutations(d)):
            coeffs[perm] = value
    return VolumePolynomial(g, n, dict(sorted(coeffs.items())))


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    return Fraction(str(x)) if not isinstance(x, float) else Fraction(x)


def evaluate_volume(vp: VolumePolynomial, lengths: Sequence, digits: int = 6) -> str:
    """V_{g,n}(L_1, ..., L_n) as a decimal string (substitutes L_i / 2 into the 2L form)."""
    if len(lengths) != vp.n:
        raise ValueError(f"expected {vp.n} boundary lengths, got {len(lengths)}")
    half = [_to_fraction(x) / 2 for x in lengths]
    if any(h < 0 for h in half):
        raise ValueError("boundary lengths must be nonnegative")
    total = PiValue()
    for d, c in vp.coefficients.items():
        total = total + c * math.prod((h ** (2 * x) for h, x in zip(half, d)), start=Fraction(1))
    return pi_eval(total, digits)


def export_volume_polynomial(vp: VolumePolynomial) -> str:
    lines = [f"# wpvol-volume-polynomial format={VOLUME_FORMAT} g={vp.g} n={vp.n}"]
    for d in sorted(vp.coefficients):
        lines.append(f"{','.join(map(str, d))}: {vp.coefficients[d]}")
    return "\n".join(lines) + "\n"


def parse_volume_polynomial(text: str) -> VolumePolynomial:
    g = n = None
    coeffs: dict[TauVector, PiValue] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = dict(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
            if int(fields.get("format", VOLUME_FORMAT)) != VOLUME_FORMAT:
                raise ValueError(f"unsupported volume polynomial format {fields['format']}")
            g, n = int(fields["g"]), int(fields["n"])
            continue
        key, value = line.split(": ", 1)
        d = tuple(int(x) for x in key.split(",") if x != "")
        coeffs[d] = PiValue.parse(value)
    if g is None:
        raise ValueError("missing header line")
    return VolumePolynomial(g, n, coeffs)


# --------------------------------------------------------------------------
# one-point coefficients
# --------------------------------------------------------------------------


def one_point_coeff_formula(g: int, k: int) -> PiValue:
    """(2k+1)!! 2^(3g-2+k) pi^(6g-4-2k) / (3g-2-k)! <psi^k kappa_1^(3g-2-k)>_g"""
    d0 = 3 * g - 2 - k
    c = Fraction(double_factorial(2 * k + 1) * 2 ** (3 * g - 2 + k), math.factorial(d0))
    return PiValue({d0: c * mixed_correlator(g, (k,), KappaMonomial.kappa1(d0))})


def one_point_coeff(g: int, k: int) -> PiValue:
    """a_{g,k} = [tau_k]_{g,1}, cross-checked against the closed one-point expression."""
    if g < 1 or not 0 <= k <= 3 * g - 2:
        raise BracketDomainError(f"a_(g,k) needs g >= 1 and 0 <= k <= 3g-2, got ({g}, {k})")
    value = bracket_def(g, 1, (k,))
    if value != one_point_coeff_formula(g, k):
        raise ArithmeticError(f"one-point coefficient mismatch at g={g}, k={k}")
    return value


# --------------------------------------------------------------------------
# bracket identities
# --------------------------------------------------------------------------


def dilaton_sides(g: int, n: int, d: Iterable[int], route: str = "def") -> tuple[PiValue, PiValue]:
    """(2g-2+n)[d]_{g,n}  vs  1/2 sum_L (-1)^L (L+1) pi^2L/(2L+3)! [tau_(L+1) d]_{g,n+1}"""
    d = canonical(d)
    lhs = (2 * g - 2 + n) * bracket(g, d, route)
    rhs = PiValue()
    for L in range(max(_excess(g, d), 0) + 1):
        rhs = rhs + PiValue({L: _dilaton_weight(L)}) * bracket(g, d + (L + 1,), route)
    return lhs, rhs


def string_sides(g: int, n: int, d: Iterable[int], route: str = "def") -> tuple[PiValue, PiValue]:
    """sum_j (2d_j+1)[tau_(d_j-1) ...]_{g,n}  vs  sum_L (-pi^2)^L/(4(2L+1)!) [tau_L d]_{g,n+1}"""
    d = tuple(d)
    lhs = PiValue()
    for j, x in enumerate(d):
        if x > 0:
            lhs = lhs + (2 * x + 1) * bracket(g, d[:j] + (x - 1,) + d[j + 1:], route)
    rhs = PiValue()
    for L in range(max(_excess(g, canonical(d)), 0) + 2):
        w = Fraction((-1) ** L, 4 * math.factorial(2 * L + 1))
        rhs = rhs + PiValue({L: w}) * bracket(g, d + (L,), route)
    return lhs, rhs


def kdv2_sides(g: int, n: int, d: Iterable[int], route: str = "def") -> tuple[PiValue, PiValue]:
    """[tau_0 tau_1 d]_{g,n+2}  vs  [tau_0^4 d]_{g-1,n+4} + 6 sum [tau_0^2 d_I]_{g1} [tau_0^2 d_J]_{g2}"""
    d = tuple(d)
    lhs = bracket(g, (0, 1) + d, route)
    rhs = bracket(g - 1, (0, 0, 0, 0) + d, route) if g >= 1 else PiValue()
    split = PiValue()
    for mask in range(1 << len(d)):
        left = (0, 0) + tuple(x for i, x in enumerate(d) if mask >> i & 1)
        right = (0, 0) + tuple(x for i, x in enumerate(d) if not mask >> i & 1)
        for g1 in range(g + 1):
            a = bracket(g1, left, route)
            if not a.is_zero():
                split = split + a * bracket(g - g1, right, route)
    return lhs, rhs + 6 * split


def identity_dilaton_check(g: int, n: int, d: Iterable[int], route: str = "def") -> bool:
    lhs, rhs = dilaton_sides(g, n, d, route)
    return lhs == rhs


def identity_string_check(g: int, n: int, d: Iterable[int], route: str = "def") -> bool:
    lhs, rhs = string_sides(g, n, d, route)
    return lhs == rhs


def identity_kdv2_check(g: int, n: int, d: Iterable[int], route: str = "def") -> bool:
    lhs, rhs = kdv2_sides(g, n, d, route)
    return lhs == rhs
