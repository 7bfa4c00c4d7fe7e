"""Large-genus machinery for correlators with one dominant insertion.

For a small vector d and N = 3g - 2 + n - |d|, the normalized ratio

    P_d(g) = prod (2 d_i + 1)!! <tau_d tau_N>_g / <tau_{3g-2}>_g

is an integer polynomial in g of degree |d| with leading term (6g)^|d|, and
C(d; g) = P_d(g) / (6g)^|d|.  P is computed symbolically by running DVV on a
small index (the big index is never touched), and independently by Lagrange
interpolation of correlator values.  Everything downstream (the ratio
functions a_{g,3g-2-k} / (g^k a_{g,3g-2}), their 1/g expansions, the Q table,
and higher-kappa limits) is assembled from P polynomials.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from typing import Iterable, Sequence

from .correlators import canonical, correlator, normalized_correlator, one_point_closed, sub_multisets, TauVector
from .exact import (
    GPoly,
    GRationalFn,
    PiValue,
    double_factorial,
    expand_inverse_g,
    gpoly_product,
    round_half_up,
    truncate_decimal,
)
from .kappa import KappaMonomial, kmz_expand, mixed_correlator
from .volumes import one_point_coeff

__all__ = [
    "c_value",
    "p_poly",
    "p_poly_oracle",
    "oracle_base_point",
    "c_expansion",
    "c1_closed",
    "ratio_fn",
    "ratio_direct",
    "b_coeffs",
    "q_value",
    "q_render",
    "q_table",
    "q_table_tsv",
    "kappa_limit_value",
    "kappa_limit_direct",
    "kappa_limit_target",
]

Q_DIGITS = 6
ROUNDING_MODES = ("truncate", "half-up")


def _big_index(d: TauVector, g: int) -> int:
    return 3 * g - 2 + len(d) - sum(d)


def _dfw(d: Iterable[int]) -> int:
    return math.prod(double_factorial(2 * x + 1) for x in d)


def c_value(d: Iterable[int], g: int) -> Fraction:
    """C(d; g) computed from correlators."""
    d = canonical(d)
    if g < 1:
        raise ValueError("need g >= 1")
    N = _big_index(d, g)
    if N < 0:
        raise ValueError(f"3g-2+n-|d| = {N} < 0")
    num = _dfw(d) * correlator(g, d + (N,))
    return num / (Fraction(6 * g) ** sum(d) * one_point_closed(g))


# --- P polynomials by recursion ------------------------------------------

_P_MEMO: dict[TauVector, GPoly] = {}
_P_LOCK = threading.Lock()
_G = GPoly.g()


def _remove(d: TauVector, i: int) -> list[int]:
    return list(d[:i] + d[i + 1 :])


def p_poly(d: Iterable[int]) -> GPoly:
    """P_d(g) by the small-index recursion (string/dilaton first, then DVV)."""
    d = canonical(d)
    hit = _P_MEMO.get(d)
    if hit is not None:
        return hit
    value = _p_compute(d)
    with _P_LOCK:
        _P_MEMO.setdefault(d, value)
    return _P_MEMO[d]


def _p_compute(d: TauVector) -> GPoly:
    n = len(d)
    if not d or d[0] == 0:
        return GPoly.const(1)
    if d[-1] == 0:
        # string: P_{0,d'} = sum_j (2d_j+1) P_{d' - e_j} + P_{d'}
        rest = d[:-1]
        out = p_poly(rest)
        for j, x in enumerate(rest):
            if x > 0:
                out = out + (2 * x + 1) * p_poly(_remove(rest, j) + [x - 1])
        return out
    if d[-1] == 1:
        # dilaton: P_{1,d'} = 3(2g - 2 + n) P_{d'}
        return GPoly.linear(6, 3 * n - 6) * p_poly(d[:-1])

    d1, rest = d[0], d[1:]
    size = sum(d)
    out = GPoly()
    for j, x in enumerate(rest):
        out = out + (2 * x + 1) * p_poly(_remove(rest, j) + [x + d1 - 1])
    factors = [GPoly.linear(6, 2 * n - 2 * size + 2 * j - 5) for j in range(1, d1 + 1)]
    out = out + gpoly_product(factors) * p_poly(rest)
    genus_drop = GPoly()
    for r in range(d1 - 1):
        s = d1 - 2 - r
        genus_drop = genus_drop + p_poly(rest + (r, s)).shift(1)
    out = out + 12 * _G * genus_drop
    for r in range(d1 - 1):
        s = d1 - 2 - r
        for left, right, weight in sub_multisets(rest):
            # dimension of <tau_r tau_I>_{g'} fixes g': r + |d_I| = 3g' - 2 + |I|
            top = r + sum(left) - len(left) + 2
            if top % 3:
                continue
            gp = top // 3
            if gp < 0 or 2 * gp - 1 + len(left) <= 0:
                continue
            w = normalized_correlator(gp, (r,) + left)
            if not w:
                continue
            falling = gpoly_product([GPoly.linear(1, 1 - j) for j in range(1, gp + 1)])
            out = out + (weight * w * 24**gp) * falling * p_poly(right + (s,)).shift(gp)
    return out


def oracle_base_point(d: Iterable[int]) -> int:
    """Smallest g >= 1 with ceil((|d|+2-n)/3) <= g, so that every sample is defined."""
    d = canonical(d)
    g0 = max(1, -(-(sum(d) + 2 - len(d)) // 3))
    while _big_index(d, g0) < 0:
        g0 += 1
    return g0


def p_poly_oracle(d: Iterable[int]) -> GPoly:
    """P_d by Lagrange interpolation of (6g)^|d| C(d; g) at |d|+1 consecutive genera."""
    d = canonical(d)
    g0 = oracle_base_point(d)
    xs = list(range(g0, g0 + sum(d) + 1))
    ys = [Fraction(6 * g) ** sum(d) * c_value(d, g) for g in xs]
    return _lagrange(xs, ys)


def _lagrange(xs: Sequence[int], ys: Sequence[Fraction]) -> GPoly:
    out = GPoly()
    for i, (xi, yi) in enumerate(zip(xs, ys)):
        basis = GPoly.const(1)
        den = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * GPoly.linear(1, -xj)
                den *= xi - xj
        out = out + basis * (yi / den)
    return out


def c_expansion(d: Iterable[int]) -> list[Fraction]:
    """[C_0, C_1, ..., C_|d|] with C(d; g) = sum_j C_j g^-j."""
    d = canonical(d)
    p = p_poly(d)
    size = sum(d)
    scale = Fraction(6) ** size
    cs = list(p.coefficients) + [Fraction(0)] * (size + 1 - len(p.coefficients))
    return [cs[size - j] / scale for j in range(size + 1)]


def c1_closed(d: Iterable[int]) -> Fraction:
    """C_1(d) = -|d|^2/6 + (n-1)|d|/3 + n^2/12 - 5n/12, valid when every d_i >= 2."""
    d = canonical(d)
    if any(x < 2 for x in d):
        raise ValueError("closed form needs all d_i >= 2")
    s, n = sum(d), len(d)
    return Fraction(-s * s, 6) + Fraction((n - 1) * s, 3) + Fraction(n * n, 12) - Fraction(5 * n, 12)


# --- ratio functions and the Q table ------------------------------------

_RATIO_MEMO: dict[int, GRationalFn] = {}


def ratio_fn(k: int) -> GRationalFn:
    """fn_k(g) with a_{g,3g-2-k} / (g^k a_{g,3g-2}) = pi^{2k}/(5^k k!) * fn_k(g)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    hit = _RATIO_MEMO.get(k)
    if hit is not None:
        return hit
    if k == 0:
        fn = GRationalFn(1)
    else:
        total = GPoly()
        for term in kmz_expand(KappaMonomial.kappa1(k)):
            total = total + p_poly(term.extra_taus) * (term.coefficient / _dfw(term.extra_taus))
        denom = gpoly_product([GPoly.linear(6, -2 * j - 1) for j in range(1, k + 1)]) * _G**k
        fn = GRationalFn(total * Fraction(5**k, 2**k), denom)
    _RATIO_MEMO.setdefault(k, fn)
    return _RATIO_MEMO[k]


def ratio_direct(k: int, g: int) -> Fraction:
    """fn_k(g) straight from the one-point coefficients a_{g,j}."""
    top = one_point_coeff(g, 3 * g - 2)
    low = one_point_coeff(g, 3 * g - 2 - k)
    ratio = low / top * Fraction(5**k * math.factorial(k), g**k)
    value = ratio / PiValue.monomial(1, k)
    if not value.is_rational():
        raise ArithmeticError("pi powers failed to cancel")
    return value[0]


def b_coeffs(k: int, order: int) -> list[Fraction]:
    """[1, b_1k, ..., b_order,k] from the 1/g expansion of fn_k."""
    return list(expand_inverse_g(ratio_fn(k), order).coefficients)


def q_value(k: int, g: int) -> Fraction:
    """Q_{k,g} = fn_k(g) / (1 + b_1k/g)."""
    if 3 * g - 2 - k < 0:
        raise ValueError(f"a_(g,3g-2-k) undefined for k={k}, g={g}")
    if k == 0:
        return Fraction(1)
    b1 = b_coeffs(k, 1)[1]
    trunc = 1 + b1 / g
    if trunc == 0:
        raise ZeroDivisionError(f"1 + b_1/g vanishes at k={k}, g={g}")
    return ratio_fn(k)(g) / trunc


def q_render(k: int, g: int, digits: int = Q_DIGITS, rounding: str = "truncate") -> str:
    """Q_{k,g} to ``digits`` places.

    The published table cuts digits rather than rounding, so truncation is the
    default; ``rounding="half-up"`` gives the conventionally rounded value.
    """
    q = q_value(k, g)
    if rounding == "truncate":
        return truncate_decimal(q, digits)
    if rounding == "half-up":
        return round_half_up(q, digits)
    raise ValueError(f"rounding must be one of {ROUNDING_MODES}")


def q_table(k_max: int, g_list: Sequence[int], rounding: str = "truncate") -> list[tuple[int, int, str]]:
    return [(k, g, q_render(k, g, rounding=rounding)) for k in range(1, k_max + 1) for g in g_list]


def q_table_tsv(k_max: int, g_list: Sequence[int], rounding: str = "truncate") -> str:
    lines = ["k\tg\tQ"] + [f"{k}\t{g}\t{q}" for k, g, q in q_table(k_max, g_list, rounding)]
    return "\n".join(lines) + "\n"


# --- higher kappa limits -------------------------------------------------


def _limit_check(d: TauVector, m: KappaMonomial, g: int) -> int:
    N = 3 * g - 2 + len(d) - sum(d) - m.weight
    if g < 1 or N < 0:
        raise ValueError(f"3g-2+n-|d|-|m| = {N} < 0")
    return N


def kappa_limit_value(d: Iterable[int], m: KappaMonomial, g: int) -> Fraction:
    """<tau_d tau_N kappa(m)>_g / ((6g)^(|d|+|m|+||m||) <tau_{3g-2}>_g) via P polynomials."""
    d = canonical(d)
    _limit_check(d, m, g)
    total = Fraction(0)
    for term in kmz_expand(m):
        full = d + term.extra_taus
        total += term.coefficient * p_poly(full)(g) / _dfw(full)
    return total / Fraction(6 * g) ** (sum(d) + m.weight + m.length)


def kappa_limit_direct(d: Iterable[int], m: KappaMonomial, g: int) -> Fraction:
    """Same quantity from mixed correlators (no polynomial shortcut)."""
    d = canonical(d)
    N = _limit_check(d, m, g)
    num = mixed_correlator(g, d + (N,), m)
    return num / (Fraction(6 * g) ** (sum(d) + m.weight + m.length) * one_point_closed(g))


def kappa_limit_target(d: Iterable[int], m: KappaMonomial) -> Fraction:
    """m! / (||m||! prod (2d_i+1)!! prod_j ((2j+3)!!)^m(j))"""
    d = canonical(d)
    den = math.factorial(m.length) * _dfw(d)
    for j, mult in m.items:
        den *= double_factorial(2 * j + 3) ** mult
    return Fraction(m.factorial, den)
