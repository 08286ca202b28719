import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polqmem import jones, tomography as tomo
from polqmem.errors import DegenerateDataError, InvalidInputError
from polqmem.tomography import CountRecord

STATES = ("H", "V", "L", "+", "alpha")


def random_pure(rng):
    return jones.normalize(rng.normal(size=2) + 1j * rng.normal(size=2))


def assert_density_matrix(rho, tol=1e-10):
    assert np.allclose(rho, rho.conj().T, atol=tol)
    assert abs(np.trace(rho) - 1) < tol
    assert np.min(np.linalg.eigvalsh(rho)) >= -tol


def test_projectors_orthonormal_per_setting():
    p = tomo.PROJECTORS
    for i in range(3):
        a, b = p[2 * i], p[2 * i + 1]
        assert abs(np.vdot(a, b)) < 1e-15
        assert abs(np.vdot(a, a) - 1) < 1e-15


def test_validate_density_matrix():
    tomo.validate_density_matrix(np.eye(2) / 2)
    with pytest.raises(InvalidInputError):
        tomo.validate_density_matrix(np.diag([1.2, -0.2]))
    with pytest.raises(InvalidInputError):
        tomo.validate_density_matrix(np.eye(2))


def test_expected_counts_examples():
    h = tomo.density_matrix(jones.standard_state("H"))
    c = tomo.expected_counts(h, 1000)
    assert np.allclose(c, [[1000, 0], [500, 500], [500, 500]])
    c = tomo.expected_counts(h, 1000, detector_efficiency=[[1, 1], [0.5, 1], [1, 1]])
    assert c[1, 0] == pytest.approx(250)


def test_simulate_counts_poisson_means():
    rho = tomo.density_matrix(jones.standard_state("alpha"))
    n = 1000
    lam = tomo.expected_counts(rho, n)
    draws = np.array([tomo.simulate_counts(rho, n, seed=s).counts for s in range(10_000)])
    mean = draws.mean(axis=0)
    # standard error of the mean for Poisson(lam) over 1e4 draws
    assert np.all(np.abs(mean - lam) < 3 * np.sqrt(lam / 10_000) + 1e-12)


def test_simulate_counts_eigenstate():
    rho = tomo.density_matrix(jones.standard_state("H"))
    rec = tomo.simulate_counts(rho, 500, seed=3)
    assert rec.cell("Z", "V") == 0
    assert rec.n_per_setting == 500 and rec.seed == 3


def test_count_record_validation():
    with pytest.raises(InvalidInputError):
        CountRecord(np.zeros((2, 3)))
    with pytest.raises(InvalidInputError):
        CountRecord(np.array([[1, -1], [0, 0], [0, 0]]))
    with pytest.raises(InvalidInputError):
        CountRecord(np.array([[1.5, 0], [0, 0], [0, 0]]))


def test_count_record_text_roundtrip():
    rec = tomo.simulate_counts(tomo.density_matrix(jones.standard_state("L")), 1234, seed=9)
    back = CountRecord.from_text(rec.to_text())
    assert np.array_equal(back.counts, rec.counts)
    with pytest.raises(InvalidInputError):
        CountRecord.from_text("setting,detector,count\nZ,H,10\n")


def test_linear_inversion_noise_free():
    rng = np.random.default_rng(31)
    for _ in range(20):
        psi = random_pure(rng)
        rho = tomo.density_matrix(psi)
        est = tomo.linear_inversion(CountRecord(np.round(tomo.expected_counts(rho, 10**8))))
        assert np.allclose(est, rho, atol=1e-6)


def test_mle_noise_free_pure_state():
    rho = tomo.mle_reconstruct(tomo.noise_free_counts(
        tomo.density_matrix(jones.standard_state("H")), 10_000))
    assert tomo.fidelity(rho, jones.standard_state("H")) >= 0.9999
    assert_density_matrix(rho)


def test_mle_maximally_mixed():
    counts = CountRecord(np.full((3, 2), 5000))
    rho = tomo.mle_reconstruct(counts)
    assert np.allclose(rho, np.eye(2) / 2, atol=1e-3)


def test_mle_alpha_state_at_1e4():
    psi = jones.standard_state("alpha")
    rec = tomo.simulate_counts(tomo.density_matrix(psi), 10_000, seed=5)
    assert tomo.fidelity(tomo.mle_reconstruct(rec), psi) >= 0.99


@pytest.mark.parametrize("counts", [
    [[100, 0], [100, 0], [100, 0]],
    [[1, 0], [0, 1], [0, 1]],
    [[0, 7], [3, 0], [0, 1000]],
    [[10**7, 0], [1, 1], [1, 1]],
])
def test_mle_pathological_counts_stay_physical(counts):
    rho = tomo.mle_reconstruct(CountRecord(np.array(counts)))
    assert_density_matrix(rho)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 5000), min_size=6, max_size=6))
def test_mle_always_physical(values):
    counts = np.array(values).reshape(3, 2)
    if np.any(counts.sum(axis=1) == 0):
        with pytest.raises(DegenerateDataError):
            tomo.mle_reconstruct(CountRecord(counts))
        return
    assert_density_matrix(tomo.mle_reconstruct(CountRecord(counts)))


def test_objective_history_nonincreasing():
    rng = np.random.default_rng(32)
    for seed in range(50):
        rho = tomo.density_matrix(random_pure(rng))
        fit = tomo.mle_fit(tomo.simulate_counts(rho, 2000, seed=seed))
        h = np.array(fit.objective_history)
        assert len(h) >= 1
        assert np.all(np.diff(h) <= 1e-12 * np.maximum(1, np.abs(h[:-1])))


def test_degenerate_inputs():
    with pytest.raises(DegenerateDataError):
        tomo.mle_reconstruct(CountRecord(np.zeros((3, 2))))
    with pytest.raises(DegenerateDataError):
        tomo.mle_reconstruct(CountRecord(np.array([[10, 0], [0, 0], [5, 5]])))


def test_determinism():
    rho = tomo.density_matrix(jones.standard_state("alpha"))
    a = tomo.simulate_counts(rho, 10_000, seed=77)
    b = tomo.simulate_counts(rho, 10_000, seed=77)
    assert np.array_equal(a.counts, b.counts)
    assert np.array_equal(tomo.mle_reconstruct(a), tomo.mle_reconstruct(b))
    psi = jones.standard_state("alpha")
    assert (tomo.monte_carlo_uncertainty(a, psi, 20, seed=1)
            == tomo.monte_carlo_uncertainty(b, psi, 20, seed=1))


def test_fidelity_examples():
    h = jones.standard_state("H")
    assert tomo.fidelity(tomo.density_matrix(h), h) == pytest.approx(1)
    assert tomo.fidelity(np.eye(2) / 2, h) == pytest.approx(0.5)
    assert tomo.fidelity(tomo.density_matrix(jones.standard_state("V")), h) == 0
    with pytest.raises(InvalidInputError):
        tomo.fidelity(np.eye(2) / 2, np.array([1, 1]))


def test_fidelity_linear_and_phase_invariant():
    rng = np.random.default_rng(33)
    for _ in range(100):
        psi = random_pure(rng)
        r1 = tomo.density_matrix(random_pure(rng))
        r2 = tomo.density_matrix(random_pure(rng))
        w = rng.uniform()
        mixed = tomo.fidelity(w * r1 + (1 - w) * r2, psi)
        assert mixed == pytest.approx(w * tomo.fidelity(r1, psi) + (1 - w) * tomo.fidelity(r2, psi),
                                      abs=1e-12)
        phase = np.exp(1j * rng.uniform(0, 2 * math.pi))
        assert tomo.fidelity(r1, phase * psi) == pytest.approx(tomo.fidelity(r1, psi), abs=1e-12)


@pytest.mark.parametrize("f, exceeds", [(0.975, True), (2 / 3, False), (0.5, False)])
def test_classical_bound_check(f, exceeds):
    v = tomo.classical_bound_check(f)
    assert v.exceeds is exceeds
    assert v.label == ("exceeds" if exceeds else "not_exceeds")


def test_classical_bound_margin():
    v = tomo.classical_bound_check(0.975, sigma=0.004)
    assert v.margin_sigma == pytest.approx((0.975 - 2 / 3) / 0.004)
    with pytest.raises(InvalidInputError):
        tomo.classical_bound_check(1.2)


def test_monte_carlo_large_count_limit():
    psi = jones.standard_state("H")
    rec = tomo.noise_free_counts(tomo.density_matrix(psi), 10**6)
    mc = tomo.monte_carlo_uncertainty(rec, psi, trials=50, seed=4)
    assert mc.std < 0.01
    assert mc.failures == 0
    with pytest.raises(InvalidInputError):
        tomo.monte_carlo_uncertainty(rec, psi, trials=1, seed=4)


def test_monte_carlo_sigma_shrinks_with_counts():
    psi = jones.standard_state("D")
    rho = 0.96 * tomo.density_matrix(psi) + 0.02 * np.eye(2)
    sig = []
    for n in (1000, 16_000):
        rec = tomo.noise_free_counts(rho, n)
        sig.append(tomo.monte_carlo_uncertainty(rec, psi, trials=100, seed=8).std)
    # four-fold sigma reduction for 16x counts, within a factor 2
    assert 2 < sig[0] / sig[1] < 8


@pytest.mark.slow
def test_random_pure_state_roundtrip():
    rng = np.random.default_rng(34)
    hits = 0
    for seed in range(200):
        psi = random_pure(rng)
        rho = tomo.mle_reconstruct(tomo.simulate_counts(tomo.density_matrix(psi), 10**5, seed))
        assert_density_matrix(rho)
        hits += tomo.fidelity(rho, psi) >= 0.999
    print(f"random pure states: {hits}/200 runs with F >= 0.999")
    assert hits >= 190
