"""Mixed psi-kappa intersection numbers via the Kaufmann-Manin-Zagier expansion.

A kappa monomial prod_i kappa_i^m(i) is a sparse multi-index ``m``.  Its
expansion trades every part m_j of a decomposition m = m_1 + ... + m_p for an
extra insertion tau_{|m_j|+1}, with sign (-1)^(||m|| - p) / p! and the
multinomial weight binom(m; m_1, ..., m_p).
"""
from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .correlators import MemoStore, TauVector, canonical, correlator

__all__ = ["KappaMonomial", "KmzTerm", "decompositions", "kmz_expand", "mixed_correlator"]


class KappaMonomial:
    """prod_i kappa_i^m(i), stored as sorted (i, m(i)) pairs with m(i) > 0."""

    __slots__ = ("items",)

    def __init__(self, multiplicities: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if isinstance(multiplicities, Mapping):
            multiplicities = multiplicities.items()
        clean: dict[int, int] = {}
        for i, m in multiplicities:
            if i < 1 or m < 0:
                raise ValueError(f"bad kappa factor kappa_{i}^{m}")
            if m:
                clean[int(i)] = clean.get(int(i), 0) + int(m)
        self.items: tuple[tuple[int, int], ...] = tuple(sorted(clean.items()))

    @classmethod
    def kappa1(cls, k: int) -> "KappaMonomial":
        return cls({1: k})

    @property
    def weight(self) -> int:
        """|m| = sum i m(i), the cohomological degree."""
        return sum(i * m for i, m in self.items)

    @property
    def length(self) -> int:
        """||m|| = sum m(i)"""
        return sum(m for _, m in self.items)

    @property
    def factorial(self) -> int:
        """m! = prod m(i)!"""
        return math.prod(math.factorial(m) for _, m in self.items)

    def is_empty(self) -> bool:
        return not self.items

    def __add__(self, other: "KappaMonomial") -> "KappaMonomial":
        return KappaMonomial(self.items + other.items)

    def __eq__(self, other):
        return isinstance(other, KappaMonomial) and self.items == other.items

    def __hash__(self):
        return hash(("KappaMonomial", self.items))

    def __repr__(self):
        if not self.items:
            return "KappaMonomial(1)"
        return "KappaMonomial(" + "*".join(f"k{i}^{m}" for i, m in self.items) + ")"


@dataclass(frozen=True)
class KmzTerm:
    coefficient: Fraction
    extra_taus: TauVector


def _multinomial(total: int, parts: Iterable[int]) -> int:
    out = math.factorial(total)
    for p in parts:
        out //= math.factorial(p)
    return out


def _binom_multi(m: KappaMonomial, parts: Iterable[tuple[int, ...]]) -> int:
    """binom(m; m_1..m_p) with parts given as count vectors aligned to m.items."""
    parts = list(parts)
    return math.prod(_multinomial(total, (p[k] for p in parts)) for k, (_, total) in enumerate(m.items))


def _vectors_below(bound: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Nonzero count vectors v <= bound, lexicographically ordered."""
    out = [v for v in itertools.product(*(range(b + 1) for b in bound)) if any(v)]
    return out


def decompositions(m: KappaMonomial, p: int) -> Iterator[tuple[tuple[KappaMonomial, ...], int]]:
    """Ordered p-tuples of nonzero multi-indices summing to m, with binom(m; m_1..m_p).

    Enumeration is lexicographic on the flattened count vectors.
    """
    keys = [i for i, _ in m.items]
    bound = tuple(c for _, c in m.items)

    def rec(remaining: tuple[int, ...], k: int) -> Iterator[list[tuple[int, ...]]]:
        if k == 0:
            if not any(remaining):
                yield []
            return
        for v in _vectors_below(remaining):
            rest = tuple(r - x for r, x in zip(remaining, v))
            for tail in rec(rest, k - 1):
                yield [v] + tail

    for parts in rec(bound, p):
        mons = tuple(KappaMonomial(zip(keys, v)) for v in parts)
        yield mons, _binom_multi(m, parts)


def _partitions(remaining: tuple[int, ...], cap: tuple[int, ...] | None) -> Iterator[list[tuple[int, ...]]]:
    """Unordered decompositions into nonzero parts, listed with non-increasing parts."""
    if not any(remaining):
        yield []
        return
    for v in reversed(_vectors_below(remaining)):
        if cap is not None and v > cap:
            continue
        rest = tuple(r - x for r, x in zip(remaining, v))
        for tail in _partitions(rest, v):
            yield [v] + tail


_KMZ_CACHE: dict[KappaMonomial, tuple[KmzTerm, ...]] = {}
_KMZ_LOCK = threading.Lock()


def kmz_expand(m: KappaMonomial) -> tuple[KmzTerm, ...]:
    """Pure-tau expansion of kappa(m), merged by extra-tau multiset.

    An unordered decomposition with part multiplicities mu_1, mu_2, ... is hit
    by p!/prod(mu_i!) ordered ones, so its coefficient is
    (-1)^(||m||-p) binom(m; parts) / prod(mu_i!).
    """
    cached = _KMZ_CACHE.get(m)
    if cached is not None:
        return cached
    if m.is_empty():
        result = (KmzTerm(Fraction(1), ()),)
    else:
        keys = [i for i, _ in m.items]
        acc: dict[TauVector, Fraction] = {}
        for parts in _partitions(tuple(c for _, c in m.items), None):
            p = len(parts)
            same = math.prod(math.factorial(c) for c in _run_lengths(parts))
            coef = Fraction((-1) ** (m.length - p) * _binom_multi(m, parts), same)
            taus = canonical(sum(i * c for i, c in zip(keys, v)) + 1 for v in parts)
            acc[taus] = acc.get(taus, 0) + coef
        result = tuple(KmzTerm(c, t) for t, c in sorted(acc.items(), reverse=True) if c)
    with _KMZ_LOCK:
        _KMZ_CACHE.setdefault(m, result)
    return _KMZ_CACHE[m]


def _run_lengths(parts: list[tuple[int, ...]]) -> list[int]:
    return [len(list(grp)) for _, grp in itertools.groupby(parts)]


def mixed_correlator(
    g: int, d: Iterable[int], m: KappaMonomial | None = None, store: MemoStore | None = None
) -> Fraction:
    """<prod tau_dj kappa(m)>_g"""
    d = canonical(d)
    m = KappaMonomial() if m is None else m
    if sum(d) + m.weight != 3 * g - 3 + len(d):
        return Fraction(0)
    total = Fraction(0)
    for term in kmz_expand(m):
        total += term.coefficient * correlator(g, d + term.extra_taus, store)
    return total
