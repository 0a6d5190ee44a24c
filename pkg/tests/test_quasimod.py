import random
from fractions import Fraction

import pytest

from pearlchain.quasimod import (
    InsufficientPrecisionError, NotQuasimodularError, QuasimodDecomposition,
    decompose, eisenstein, monomial_series, monomial_weight, monomials,
    weight_profile,
)


def test_eisenstein_heads():
    assert eisenstein(2, 3).coeffs == (1, -24, -72, -96)
    assert eisenstein(4, 2).coeffs == (1, 240, 2160)
    assert eisenstein(6, 2).coeffs == (1, -504, -16632)
    assert eisenstein(4, 0).coeffs == (1,)
    assert eisenstein(6, 0).coeffs == (1,)
    with pytest.raises(ValueError):
        eisenstein(8, 4)
    with pytest.raises(ValueError):
        eisenstein(2, -1)


def test_monomials():
    ms = monomials(8)
    assert len(ms) == 11
    assert ms[0] == (0, 0, 0)
    assert len(monomials(12)) == 23
    assert len(monomials(16)) == 41
    weights = [monomial_weight(m) for m in ms]
    assert weights == sorted(weights)
    assert all(w <= 8 for w in weights)


def test_decompose_round_trip_random():
    rng = random.Random(5)
    ms = monomials(10)
    for _ in range(6):
        picked = rng.sample(ms, 4)
        coeffs = {m: Fraction(rng.randint(-20, 20), rng.randint(1, 12))
                  for m in picked}
        coeffs = {m: c for m, c in coeffs.items() if c != 0}
        D = len(monomials(10)) + 6
        series = [Fraction(0)] * (D + 1)
        for m, c in coeffs.items():
            for i, x in enumerate(monomial_series(m, D)):
                series[i] += c * x
        dec = decompose(series, 10)
        assert dict(dec.terms) == coeffs


def test_not_quasimodular():
    D = len(monomials(4)) + 6
    series = list(monomial_series((1, 0, 0), D))
    series[-1] += 1
    with pytest.raises(NotQuasimodularError) as err:
        decompose(series, 4)
    assert f"q^{D}" in str(err.value)


def test_insufficient_precision():
    with pytest.raises(InsufficientPrecisionError):
        decompose([0] * 10, 8)


def test_zero_series():
    dec = decompose([0] * 20, 4)
    assert dec.terms == ()
    homogeneous, weight, split = weight_profile(dec)
    assert homogeneous
    assert weight == 0
    assert split == {}


def test_uniqueness_across_weight_bounds():
    D = len(monomials(12)) + 6
    series = [Fraction(0)] * (D + 1)
    for m, c in (((0, 2, 0), Fraction(1, 3)), ((1, 0, 1), Fraction(-2, 7))):
        for i, x in enumerate(monomial_series(m, D)):
            series[i] += c * x
    d8 = decompose(series, 8)
    d12 = decompose(series, 12)
    assert d8.terms == d12.terms
    assert d8.is_homogeneous and d8.weight == 8


def test_weight_profile_and_split():
    dec = QuasimodDecomposition(8, (((1, 0, 0), Fraction(2)),
                                    ((0, 1, 0), Fraction(3))))
    homogeneous, weight, split = weight_profile(dec)
    assert not homogeneous
    assert weight == 4
    assert set(split) == {2, 4}


def test_json_round_trip():
    dec = QuasimodDecomposition(8, (((0, 2, 0), Fraction(1, 288)),
                                    ((4, 0, 0), Fraction(-1, 864))))
    d = dec.to_json_dict()
    assert d["homogeneous"] is True
    assert d["weight"] == 8
    assert QuasimodDecomposition.from_json_dict(d) == dec


def test_evaluate_matches_input():
    D = len(monomials(6)) + 6
    series = list(monomial_series((1, 1, 0), D))
    dec = decompose(series, 6)
    assert dec.evaluate(D) == series
