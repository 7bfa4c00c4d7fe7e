"""Witten-Kontsevich correlators <tau_d1 ... tau_dn>_g.

Values come from the DVV (Virasoro) recursion applied to the largest index,
after the string and dilaton equations have stripped every tau_0 and tau_1;
genus 0 uses the closed multinomial form.  Everything is memoized in a
:class:`MemoStore`, which can be persisted as a line-oriented text file.

The one- and two-point closed forms are implemented separately and never
touch the memo, so they stay usable as independent oracles.
"""
from __future__ import annotations

import itertools
import math
import sys
import threading
from collections import Counter
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator

from ._version import __version__
from .exact import double_factorial

__all__ = [
    "canonical",
    "MemoStore",
    "CacheConflictError",
    "CacheFormatError",
    "correlator",
    "normalized_correlator",
    "one_point_closed",
    "two_point_oracle",
    "kdv_check",
    "kdv_sides",
    "cache_save",
    "cache_load",
    "default_store",
    "sub_multisets",
]

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

CACHE_FORMAT = 1

TauVector = tuple[int, ...]


def canonical(d: Iterable[int]) -> TauVector:
    """Sorted (descending) tuple of nonnegative tau indices."""
    out = tuple(sorted((int(x) for x in d), reverse=True))
    if out and out[-1] < 0:
        raise ValueError(f"tau indices must be nonnegative, got {out}")
    return out


def is_stable(g: int, n: int) -> bool:
    return g >= 0 and n >= 0 and 2 * g - 2 + n > 0


class CacheConflictError(ValueError):
    """A cached value disagrees with one already known."""


class CacheFormatError(ValueError):
    pass


class MemoStore:
    """Map (genus, canonical tau vector) -> Fraction with write-once entries.

    Lookups are plain dict reads; inserts take a lock and refuse to overwrite
    an existing key with a different value.
    """

    def __init__(self):
        self._data: dict[tuple[int, TauVector], Fraction] = {}
        self._lock = threading.Lock()
        self.format_version = CACHE_FORMAT
        self.engine_version = __version__

    def __len__(self):
        return len(self._data)

    def __contains__(self, key):
        return key in self._data

    def get(self, key):
        return self._data.get(key)

    def items(self):
        return list(self._data.items())

    def insert(self, key, value: Fraction) -> None:
        old = self._data.get(key)
        if old is not None:
            if old != value:
                raise CacheConflictError(f"conflicting values for {key}: {old} vs {value}")
            return
        with self._lock:
            old = self._data.get(key)
            if old is not None and old != value:
                raise CacheConflictError(f"conflicting values for {key}: {old} vs {value}")
            self._data[key] = value

    def merge(self, entries: dict) -> None:
        for key, value in entries.items():
            old = self._data.get(key)
            if old is not None and old != value:
                raise CacheConflictError(f"conflicting values for {key}: {old} vs {value}")
        with self._lock:
            for key, value in entries.items():
                self._data.setdefault(key, value)

    def clear(self) -> None:
        with self._lock:
            self._data.clear()


_DEFAULT_STORE = MemoStore()


def default_store() -> MemoStore:
    return _DEFAULT_STORE


def sub_multisets(d: TauVector) -> Iterator[tuple[TauVector, TauVector, int]]:
    """All labeled splits d = I + J, grouped by multiset, with their multiplicity."""
    counts = sorted(Counter(d).items(), reverse=True)
    ranges = [range(c + 1) for _, c in counts]
    for ks in itertools.product(*ranges):
        weight = 1
        left: list[int] = []
        right: list[int] = []
        for (value, c), k in zip(counts, ks):
            weight *= math.comb(c, k)
            left.extend([value] * k)
            right.extend([value] * (c - k))
        yield tuple(left), tuple(right), weight


def _genus0(d: TauVector) -> Fraction:
    n = len(d)
    num = math.factorial(n - 3)
    den = 1
    for x in d:
        den *= math.factorial(x)
    return Fraction(num, den)


def _lookup(g: int, d: TauVector, store: MemoStore) -> Fraction:
    """Correlator for a canonical vector, with dimension and stability gates."""
    n = len(d)
    if g < 0 or 2 * g - 2 + n <= 0:
        return Fraction(0)
    if sum(d) != 3 * g - 3 + n:
        return Fraction(0)
    if g == 0:
        return _genus0(d)
    key = (g, d)
    v = store.get(key)
    if v is not None:
        return v
    v = _compute(g, d, store)
    store.insert(key, v)
    return v


def _insert_sorted(d: TauVector, *extra: int) -> TauVector:
    return tuple(sorted(d + extra, reverse=True))


def _compute(g: int, d: TauVector, store: MemoStore) -> Fraction:
    n = len(d)
    if d[-1] == 0:
        # string equation
        rest = d[:-1]
        total = Fraction(0)
        for value, c in Counter(rest).items():
            if value == 0:
                continue
            i = rest.index(value)
            lowered = _insert_sorted(rest[:i] + rest[i + 1:], value - 1)
            total += c * _lookup(g, lowered, store)
        return total
    if d[-1] == 1 and not (g == 1 and n == 1):
        # dilaton equation
        return (2 * g - 3 + n) * _lookup(g, d[:-1], store)
    if g == 1 and n == 1:
        return Fraction(1, 24)
    return _dvv(g, d, store)


def _dvv(g: int, d: TauVector, store: MemoStore) -> Fraction:
    d1, rest = d[0], d[1:]
    total = Fraction(0)
    for value, c in Counter(rest).items():
        i = rest.index(value)
        merged = _insert_sorted(rest[:i] + rest[i + 1:], value + d1 - 1)
        coef = Fraction(double_factorial(2 * d1 + 2 * value - 1), double_factorial(2 * value - 1))
        total += c * coef * _lookup(g, merged, store)
    half = Fraction(0)
    splits = list(sub_multisets(rest))
    for r in range(d1 - 1):
        s = d1 - 2 - r
        w = double_factorial(2 * r + 1) * double_factorial(2 * s + 1)
        acc = _lookup(g - 1, _insert_sorted(rest, r, s), store)
        for left, right, mult in splits:
            top = r + sum(left) + 2 - len(left)
            if top % 3:
                continue
            gp = top // 3
            if gp < 0 or gp > g:
                continue
            a = _lookup(gp, _insert_sorted(left, r), store)
            if not a:
                continue
            acc += mult * a * _lookup(g - gp, _insert_sorted(right, s), store)
        half += w * acc
    total += half / 2
    return total / double_factorial(2 * d1 + 1)


def correlator(g: int, d: Iterable[int], store: MemoStore | None = None) -> Fraction:
    """<tau_d1 ... tau_dn>_g; zero off the dimension locus or when unstable."""
    d = canonical(d)
    if g < 0:
        return Fraction(0)
    return _lookup(int(g), d, _DEFAULT_STORE if store is None else store)


def normalized_correlator(g: int, d: Iterable[int], store: MemoStore | None = None) -> Fraction:
    """prod (2 d_i + 1)!! * <tau_d>_g"""
    d = canonical(d)
    w = 1
    for x in d:
        w *= double_factorial(2 * x + 1)
    return w * correlator(g, d, store)


def one_point_closed(g: int) -> Fraction:
    """<tau_{3g-2}>_g = 1 / (24^g g!)"""
    if g < 1:
        raise ValueError("one-point function needs g >= 1")
    return Fraction(1, 24**g * math.factorial(g))


def two_point_oracle(a: int, b: int) -> Fraction:
    """<tau_a tau_b>_g read off Dijkgraaf's closed two-point function.

    (x1 + x2) F(x1, x2) = exp((x1^3 + x2^3)/24) sum_k k!/(2k+1)! (x1 x2 (x1+x2)/2)^k
    is a power series; its homogeneous part of degree N = a + b + 1 is divided
    exactly by (x1 + x2) and the x1^a x2^b coefficient is returned.
    """
    if a < 0 or b < 0:
        return Fraction(0)
    N = a + b + 1
    if N % 3 or N < 3:
        return Fraction(0)

    def exp_part(m: int) -> list[Fraction]:
        # degree-m part of exp(x1^3/24) exp(x2^3/24), indexed by power of x1
        out = [Fraction(0)] * (m + 1)
        if m % 3:
            return out
        for i in range(0, m + 1, 3):
            j = m - i
            out[i] = Fraction(1, 24 ** (i // 3) * math.factorial(i // 3)) * Fraction(
                1, 24 ** (j // 3) * math.factorial(j // 3)
            )
        return out

    def sum_part(m: int) -> list[Fraction]:
        # degree-m part of sum_k k!/(2k+1)! (x1 x2 (x1 + x2) / 2)^k
        out = [Fraction(0)] * (m + 1)
        if m % 3:
            return out
        k = m // 3
        c = Fraction(math.factorial(k), math.factorial(2 * k + 1) * 2**k)
        for i in range(k + 1):
            # x1^k x2^k (x1 + x2)^k -> x1^(k+i) x2^(2k-i)
            out[k + i] += c * math.comb(k, i)
        return out

    E = [Fraction(0)] * (N + 1)
    for m in range(0, N + 1, 3):
        p, q = exp_part(m), sum_part(N - m)
        for i, x in enumerate(p):
            if x:
                for j, y in enumerate(q):
                    if y:
                        E[i + j] += x * y
    # E(x1, x2) = (x1 + x2) * F_N-1(x1, x2); f[i] is the x1^i coefficient of F
    f = []
    prev = Fraction(0)
    for i in range(N):
        prev = E[i] - prev
        f.append(prev)
    if E[N] != f[N - 1]:
        raise ArithmeticError("two-point series not divisible by x1 + x2")
    return f[a]


def kdv_sides(g: int, d: Iterable[int], store: MemoStore | None = None) -> tuple[Fraction, Fraction]:
    """Both sides of the integrated first KdV equation.

    (2g+n-1) <tau_0 prod tau_dj>_g
        = 1/12 <tau_0^4 prod tau_dj>_{g-1}
          + 1/2 sum_{I, J, g'} <tau_0^2 prod_I>_{g'} <tau_0^2 prod_J>_{g-g'}
    """
    d = tuple(d)
    n = len(d)
    lhs = (2 * g + n - 1) * correlator(g, (0,) + d, store)
    rhs = Fraction(0)
    if g >= 1:
        rhs += Fraction(1, 12) * correlator(g - 1, (0, 0, 0, 0) + d, store)
    split = Fraction(0)
    for mask in range(1 << n):
        left = (0, 0) + tuple(d[i] for i in range(n) if mask >> i & 1)
        right = (0, 0) + tuple(d[i] for i in range(n) if not mask >> i & 1)
        for gp in range(g + 1):
            a = correlator(gp, left, store)
            if a:
                split += a * correlator(g - gp, right, store)
    rhs += split / 2
    return lhs, rhs


def kdv_check(g: int, d: Iterable[int], store: MemoStore | None = None) -> bool:
    lhs, rhs = kdv_sides(g, d, store)
    return lhs == rhs


# --------------------------------------------------------------------------
# persistence
# --------------------------------------------------------------------------


def _header(store: MemoStore) -> str:
    return f"# wpvol-correlator-cache format={store.format_version} engine={store.engine_version}"


def cache_save(path, store: MemoStore | None = None) -> int:
    """Write the store as sorted ``g;d1,...,dn;p/q`` lines; returns the entry count."""
    store = _DEFAULT_STORE if store is None else store
    lines = [_header(store)]
    for (g, d), v in sorted(store.items()):
        lines.append(f"{g};{','.join(map(str, d))};{v}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return len(lines) - 1


def _parse_cache(text: str) -> dict:
    entries: dict[tuple[int, TauVector], Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = dict(tok.split("=", 1) for tok in line[1:].split() if "=" in tok)
            if "format" in fields and int(fields["format"]) != CACHE_FORMAT:
                raise CacheFormatError(f"unsupported cache format {fields['format']}")
            continue
        try:
            g_s, d_s, v_s = line.split(";")
            key = (int(g_s), canonical(int(x) for x in d_s.split(",") if x != ""))
            value = Fraction(v_s)
        except ValueError as exc:
            raise CacheFormatError(f"line {lineno}: {raw!r}") from exc
        if key in entries and entries[key] != value:
            raise CacheConflictError(f"line {lineno}: conflicting duplicate for {key}")
        entries[key] = value
    return entries


def cache_load(path, store: MemoStore | None = None) -> int:
    """Merge a cache file into the store; returns the number of entries read."""
    store = _DEFAULT_STORE if store is None else store
    entries = _parse_cache(Path(path).read_text(encoding="utf-8"))
    store.merge(entries)
    return len(entries)
