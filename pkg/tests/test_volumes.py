from __future__ import annotations

import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from wpvol.exact import PiValue, pi_eval, sign
from wpvol.volumes import (
    BracketDomainError,
    admissible_vectors,
    bracket,
    bracket_def,
    bracket_rec,
    evaluate_volume,
    export_volume_polynomial,
    identity_dilaton_check,
    identity_kdv2_check,
    identity_string_check,
    one_point_coeff,
    one_point_coeff_formula,
    parse_volume_polynomial,
    volume,
    volume_polynomial,
)

PI2 = PiValue.monomial(1, 1)


def pi(c, e=0):
    return PiValue.monomial(Fraction(c), e)


def test_bracket_def_examples():
    assert bracket_def(1, 1, (0,)) == pi(Fraction(1, 12), 1)
    assert bracket_def(1, 1, (1,)) == pi(Fraction(1, 2))
    assert bracket_def(2, 1, (4,)) == pi(210)


def test_bracket_rec_examples():
    assert bracket_rec(0, 3, (0, 0, 0)) == pi(1)
    assert bracket_rec(1, 2, (0, 0)) == bracket_def(1, 2, (0, 0))
    assert bracket_rec(2, 1, (0,)) == pi(Fraction(29, 192), 4)


def test_domain_errors():
    with pytest.raises(BracketDomainError):
        bracket_def(0, 3, (1, 0, 0))
    with pytest.raises(ValueError):
        bracket_def(0, 2, (0, 0))
    with pytest.raises(ValueError):
        bracket_rec(2, 0, ())
    assert bracket(0, (1, 0, 0)).is_zero()


def test_volumes():
    assert volume(1, 1) == pi(Fraction(1, 12), 1)
    assert volume(0, 3) == pi(1)
    assert volume(2, 1) == pi(Fraction(29, 192), 4)
    # independently published values
    assert volume(0, 4) == pi(2, 1)
    assert volume(0, 5) == pi(10, 2)
    assert volume(1, 2) == pi(Fraction(1, 4), 2)
    assert volume(2, 0) == pi(Fraction(43, 2160), 3)
    assert volume(2, 0, "rec") == volume(2, 0)
    assert volume(1, 3) == pi(Fraction(14, 9), 3)
    with pytest.raises(ValueError):
        volume(1, 0)


def exact_eval(vp, lengths):
    """V(L) exactly: the stored polynomial is in the 2L convention."""
    total = PiValue()
    for d, c in vp.coefficients.items():
        mono = math.prod((Fraction(L, 2) ** (2 * x) for L, x in zip(lengths, d)), start=Fraction(1))
        total = total + c * mono
    return total


def published(g, n, L):
    s2 = sum(x * x for x in L)
    if (g, n) == (1, 1):
        return (PiValue.coerce(s2) + pi(4, 1)) * Fraction(1, 48)
    if (g, n) == (0, 4):
        return (pi(4, 1) + s2) * Fraction(1, 2)
    if (g, n) == (1, 2):
        return (pi(4, 1) + s2) * (pi(12, 1) + s2) * Fraction(1, 192)
    if (g, n) == (0, 5):
        s4 = sum(x**4 for x in L)
        cross = sum(a * a * b * b for a, b in itertools.combinations(L, 2))
        return PiValue.coerce(Fraction(s4, 8) + Fraction(cross, 2)) + pi(3 * s2, 1) + pi(10, 2)
    raise KeyError


@pytest.mark.parametrize("g,n", [(1, 1), (0, 4), (1, 2), (0, 5)])
@pytest.mark.parametrize("seed", range(3))
def test_volume_polynomial_matches_published(g, n, seed):
    L = [Fraction(seed * 3 + i + 1, i + 2) for i in range(n)]
    vp = volume_polynomial(g, n)
    assert exact_eval(vp, L) == published(g, n, L)


def test_volume_polynomial_examples():
    vp = volume_polynomial(1, 1)
    assert vp.coefficient((0,)) == pi(Fraction(1, 12), 1)
    assert vp.coefficient((1,)) == pi(Fraction(1, 12))
    assert volume_polynomial(0, 3).coefficients == {(0, 0, 0): pi(1)}
    v21 = volume_polynomial(2, 1)
    for k in range(5):
        assert v21.coefficient((k,)) == one_point_coeff(2, k) / math.factorial(2 * k + 1)


def test_volume_polynomial_symmetric_and_bounded():
    vp = volume_polynomial(1, 3)
    for d, c in vp.coefficients.items():
        assert sum(d) <= 3
        for perm in itertools.permutations(d):
            assert vp.coefficients[perm] == c


def test_export_parse_roundtrip():
    for g, n in [(1, 1), (1, 2), (0, 5), (2, 1)]:
        vp = volume_polynomial(g, n)
        text = export_volume_polynomial(vp)
        assert text.startswith(f"# wpvol-volume-polynomial format=1 g={g} n={n}")
        back = parse_volume_polynomial(text)
        assert (back.g, back.n, back.coefficients) == (vp.g, vp.n, vp.coefficients)


def test_evaluate_volume():
    v11 = volume_polynomial(1, 1)
    assert evaluate_volume(v11, [0], 6) == "0.822467"
    assert evaluate_volume(v11, [2], 6) == pi_eval(pi(Fraction(1, 12), 1) + Fraction(1, 12), 6)
    assert evaluate_volume(v11, [2], 6) == "0.905800"
    assert evaluate_volume(volume_polynomial(0, 3), [Fraction(7, 3), 1, 5], 6) == "1.000000"
    with pytest.raises(ValueError):
        evaluate_volume(v11, [1, 2], 6)


A_DATA = {
    (1, 0): pi(Fraction(1, 12), 1),
    (1, 1): pi(Fraction(1, 2)),
    (2, 0): pi(Fraction(29, 192), 4),
    (3, 7): pi(400400),
    (3, 0): pi(Fraction(9292841, 4082400), 7),
}


@pytest.mark.parametrize("key", sorted(A_DATA))
def test_one_point_coeff(key):
    g, k = key
    assert one_point_coeff(g, k) == A_DATA[key]
    assert one_point_coeff_formula(g, k) == A_DATA[key]


def test_one_point_coeff_range():
    with pytest.raises(ValueError):
        one_point_coeff(1, 2)


def test_identity_examples():
    assert identity_dilaton_check(1, 1, (0,))
    assert identity_string_check(1, 2, (0, 0))
    assert identity_kdv2_check(1, 0, ())


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(g, n) for g in range(3) for n in range(1, 6) if 2 * g - 2 + n in range(1, 5)]), st.data())
def test_cross_path_random(gn, data):
    g, n = gn
    d = data.draw(st.sampled_from(admissible_vectors(g, n)))
    perm = data.draw(st.permutations(d))
    assert bracket_rec(g, n, perm) == bracket_def(g, n, d)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([(g, n) for g in range(3) for n in range(1, 6) if 2 * g - 2 + n in range(1, 5)]), st.data())
def test_brackets_positive(gn, data):
    g, n = gn
    d = data.draw(st.sampled_from(admissible_vectors(g, n)))
    assert sign(bracket_def(g, n, d)) > 0
