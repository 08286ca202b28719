import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polqmem import photon_stats as ps
from polqmem.errors import CutoffTooSmallError, InvalidInputError, OutOfModelError
from polqmem.photon_stats import TmssSpec

means = st.floats(1e-4, 10, allow_nan=False)


def closed_cross(m):
    return 2 + 1 / m


def closed_heralded(m):
    return 2 * m * (3 * m + 2) / (2 * m + 1) ** 2


def test_default_cutoff():
    spec = TmssSpec(0.25)
    assert ps.tail_mass(0.25, spec.cutoff) < ps.TAIL_TOL
    assert TmssSpec(10).cutoff > 200
    with pytest.raises(CutoffTooSmallError):
        TmssSpec(0.25, cutoff=5)
    with pytest.raises(InvalidInputError):
        TmssSpec(0.0)
    with pytest.raises(InvalidInputError):
        TmssSpec(math.nan)


@given(means)
def test_distribution_normalized_with_correct_mean(m):
    p = ps.photon_number_dist(TmssSpec(m))
    n = np.arange(p.size)
    assert abs(p.sum() - 1) < 1e-12
    assert abs(n @ p - m) < 1e-9 * max(1, m)


def test_joint_distribution_diagonal():
    ns, ni, p = ps.joint_distribution(TmssSpec(0.3))
    assert np.array_equal(ns, ni)
    assert p.sum() == pytest.approx(1, abs=1e-14)


def test_cross_correlation_examples():
    assert ps.cross_correlation(TmssSpec(0.25)) == pytest.approx(6.0, abs=1e-9)
    assert ps.cross_correlation(TmssSpec(1.0)) == pytest.approx(3.0, abs=1e-9)


@given(means)
def test_cross_correlation_closed_form(m):
    g = ps.cross_correlation(TmssSpec(m))
    assert g >= 2
    assert g == pytest.approx(closed_cross(m), rel=1e-9)


def test_heralded_examples():
    assert ps.heralded_auto_correlation(TmssSpec(0.25)) == pytest.approx(0.6111111, abs=1e-6)
    # g2 = 1 crossing at m = 1/sqrt(2)
    assert ps.heralded_auto_correlation(TmssSpec(1 / math.sqrt(2))) == pytest.approx(1, abs=1e-9)
    assert ps.heralded_auto_correlation(TmssSpec(1e-4)) < 1e-3


@given(means)
def test_heralded_closed_form(m):
    g = ps.heralded_auto_correlation(TmssSpec(m))
    assert g == pytest.approx(closed_heralded(m), rel=1e-9, abs=1e-12)
    assert g < 2


def test_heralded_monotone_toward_limit():
    grid = np.geomspace(1e-4, 10, 400)
    g = np.array([ps.heralded_auto_correlation(TmssSpec(m)) for m in grid])
    assert np.all(np.diff(g) > 0)
    assert g[-1] < 1.5
    far = ps.heralded_auto_correlation(TmssSpec(1000.0))
    assert g[-1] < far < 1.5
    assert 1.5 - far < 1e-3


@settings(max_examples=30, deadline=None)
@given(st.floats(0.01, 10))
def test_truncation_stable(m):
    spec = TmssSpec(m)
    doubled = TmssSpec(m, cutoff=2 * spec.cutoff)
    assert abs(ps.cross_correlation(spec) - ps.cross_correlation(doubled)) < 1e-10
    assert abs(ps.heralded_auto_correlation(spec)
               - ps.heralded_auto_correlation(doubled)) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.floats(1e-3, 10))
def test_inversion_roundtrip(m):
    g = ps.cross_correlation(TmssSpec(m))
    assert abs(ps.mean_n_from_cross(g) - m) < 1e-8 * max(1, m)


def test_bound_from_cross_examples():
    assert ps.bound_from_cross(6.0) == pytest.approx(0.611, abs=1e-3)
    assert ps.bound_from_cross(2 + math.sqrt(2)) == pytest.approx(1.0, abs=1e-8)
    assert ps.bound_from_cross(9.4) < ps.bound_from_cross(6.0)


@pytest.mark.parametrize("g", [2.0, 1.5, 0.0, math.inf])
def test_bound_from_cross_out_of_model(g):
    with pytest.raises(OutOfModelError):
        ps.bound_from_cross(g)


@pytest.mark.parametrize("g, verdict", [(6.0, "nonclassical"), (2.0, "classical-compatible"),
                                        (1.0, "classical-compatible")])
def test_nonclassicality_check(g, verdict):
    assert ps.nonclassicality_check(g) == verdict
