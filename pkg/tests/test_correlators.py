from __future__ import annotations

import math
import threading
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from wpvol.correlators import (
    CacheConflictError,
    CacheFormatError,
    MemoStore,
    cache_load,
    cache_save,
    canonical,
    correlator,
    kdv_check,
    normalized_correlator,
    one_point_closed,
    sub_multisets,
    two_point_oracle,
)


def test_known_values():
    assert correlator(0, (0, 0, 0)) == 1
    assert correlator(1, (1,)) == Fraction(1, 24)
    assert correlator(1, (0, 2)) == Fraction(1, 24)
    assert correlator(1, (0, 0, 3)) == Fraction(1, 24)
    assert correlator(2, (4,)) == Fraction(1, 1152)
    assert correlator(2, (2, 3)) == Fraction(29, 5760)
    assert correlator(3, (7,)) == Fraction(1, 82944)


def test_dimension_gate_and_instability():
    assert correlator(1, (0, 0, 2)) == 0  # sum d = 2 but 3g-3+n = 3
    assert correlator(1, (0, 0)) == 0
    assert correlator(0, (0, 0)) == 0
    assert correlator(0, ()) == 0
    assert correlator(-1, (0,)) == 0


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        correlator(1, (-1, 2))


def test_genus_zero_closed_form():
    for d in [(0, 0, 0, 1), (0, 0, 0, 1, 1), (0, 0, 0, 0, 2, 1), (0, 0, 0, 0, 0, 0, 4)]:
        assert sum(d) == len(d) - 3
        n = len(d)
        expected = Fraction(math.factorial(n - 3), math.prod(math.factorial(x) for x in d))
        assert correlator(0, d) == expected


def test_one_point_and_two_point_small():
    assert one_point_closed(2) == Fraction(1, 1152)
    assert two_point_oracle(2, 3) == Fraction(29, 5760)
    assert two_point_oracle(1, 0) == 0  # genus would be 0 with only two points


def test_normalized_correlator():
    assert normalized_correlator(1, (1,)) == Fraction(3, 24)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 3), st.lists(st.integers(0, 5), min_size=0, max_size=4))
def test_string_equation(g, d):
    """<tau_0 prod tau_di>_g = sum_j <... tau_(dj-1) ...>_g"""
    d = tuple(d)
    if sum(d) != 3 * g - 3 + len(d):
        return
    lhs = correlator(g, (0,) + d)
    rhs = sum((correlator(g, d[:j] + (x - 1,) + d[j + 1 :]) for j, x in enumerate(d) if x > 0), Fraction(0))
    if g == 0 and len(d) == 2:
        rhs += 1 if d == (0, 0) else 0
    assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.lists(st.integers(0, 5), min_size=0, max_size=4))
def test_dilaton_equation(g, d):
    d = tuple(d)
    n = len(d)
    if sum(d) != 3 * g - 3 + n or (g, n) == (1, 0):
        return
    assert correlator(g, (1,) + d) == (2 * g - 2 + n) * correlator(g, d)


@given(st.permutations([0, 2, 3, 1, 0]))
def test_symmetric(perm):
    assert correlator(2, perm) == correlator(2, (3, 2, 1, 0, 0))


@pytest.mark.parametrize("g", range(0, 4))
def test_kdv_exhaustive_small(g):
    for n in range(0, 5):
        for d in {canonical(x) for x in _vectors(n, 3 * g - 2 + n)}:
            assert kdv_check(g, d), (g, d)


def _vectors(n, total):
    if n == 0:
        yield ()
        return
    for x in range(total + 1):
        for rest in _vectors(n - 1, total - x):
            yield (x,) + rest


def test_sub_multisets_weights():
    d = (3, 2, 2, 0)
    total = sum(w for _, _, w in sub_multisets(d))
    assert total == 2 ** len(d)
    seen = {(l, r) for l, r, _ in sub_multisets(d)}
    assert len(seen) == len(list(sub_multisets(d)))


def test_private_store_and_cache_roundtrip(tmp_path):
    store = MemoStore()
    v = correlator(3, (2, 3, 4), store)
    assert len(store) > 0
    path = tmp_path / "c.txt"
    n = cache_save(path, store)
    assert n == len(store)
    text = path.read_text()
    assert text.startswith("# wpvol-correlator-cache format=1")
    fresh = MemoStore()
    assert cache_load(path, fresh) == n
    assert dict(fresh.items()) == dict(store.items())
    assert correlator(3, (2, 3, 4), fresh) == v
    # saving again is byte-identical
    path2 = tmp_path / "c2.txt"
    cache_save(path2, fresh)
    assert path2.read_text() == text


def test_empty_cache_file_is_fine(tmp_path):
    p = tmp_path / "empty.txt"
    p.write_text("")
    assert cache_load(p, MemoStore()) == 0


def test_cache_format_mismatch(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# wpvol-correlator-cache format=99 engine=0.1.0\n")
    with pytest.raises(CacheFormatError):
        cache_load(p, MemoStore())


def test_cache_conflict(tmp_path):
    store = MemoStore()
    correlator(1, (1,), store)
    p = tmp_path / "c.txt"
    p.write_text("1;1;1/25\n")
    with pytest.raises(CacheConflictError):
        cache_load(p, store)
    with pytest.raises(CacheConflictError):
        store.insert((1, (1,)), Fraction(1, 23))
    store.insert((1, (1,)), Fraction(1, 24))  # idempotent


def test_concurrent_fill_is_consistent():
    store = MemoStore()
    keys = [(g, (3 * g - 2,)) for g in range(1, 9)] + [(4, (5, 5)), (5, (6, 7))]
    results = {}

    def work(i):
        results[i] = [correlator(g, d, store) for g, d in keys]

    threads = [threading.Thread(target=work, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == results[0] for r in results.values())
    assert results[0][:8] == [one_point_closed(g) for g in range(1, 9)]
