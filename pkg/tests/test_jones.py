import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polqmem import jones
from polqmem.errors import DecompositionError, InvalidInputError

angles = st.floats(-10, 10, allow_nan=False)
depths = st.floats(0, 20, allow_nan=False)
small = st.floats(-3, 3, allow_nan=False)


def test_rotation_examples():
    assert np.allclose(jones.rotation_matrix(0), np.eye(2))
    out = jones.rotation_matrix(math.pi / 2) @ jones.standard_state("H")
    assert np.allclose(np.abs(out), [0, 1], atol=1e-15)
    out = jones.rotation_matrix(math.pi / 4) @ jones.standard_state("H")
    assert np.allclose(out, [1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-15)


@given(angles)
def test_rotation_orthogonal(a):
    r = jones.rotation_matrix(a)
    assert np.allclose(r.T @ r, np.eye(2), atol=1e-12)
    assert abs(np.linalg.det(r) - 1) < 1e-12


@pytest.mark.parametrize("bad", [math.nan, math.inf])
def test_non_finite_angles_rejected(bad):
    with pytest.raises(InvalidInputError):
        jones.rotation_matrix(bad)
    with pytest.raises(InvalidInputError):
        jones.pmd_matrix(bad)


def test_pdl_matrix_examples():
    assert np.allclose(jones.pdl_matrix(0, 0), np.eye(2))
    # exp(-2.70/2), exp(-0.99/2)
    assert np.allclose(jones.pdl_matrix(2.70, 0.99), np.diag([0.2592402606, 0.6095709073]),
                       atol=1e-10)
    out = jones.pdl_matrix(2.70, 0.99) @ jones.standard_state("H")
    assert jones.intensity(out) == pytest.approx(math.exp(-2.70), abs=1e-15)
    with pytest.raises(InvalidInputError):
        jones.pdl_matrix(-0.1, 1)


@given(depths, depths)
def test_pdl_eigenvalues_in_unit_interval(d1, d2):
    t = jones.pdl_matrix(d1, d2)
    assert jones.is_pdl(t)
    eig = np.linalg.eigvalsh(t)
    assert np.all(eig > 0) and np.all(eig <= 1)


def test_pmd_matrix_examples():
    assert np.allclose(jones.pmd_matrix(0), np.eye(2))
    assert np.allclose(jones.pmd_matrix(math.pi), np.diag([1, -1]), atol=1e-15)


@given(angles)
def test_pmd_unitary(phi):
    u = jones.pmd_matrix(phi)
    assert jones.is_unitary(u)
    assert abs(abs(np.linalg.det(u)) - 1) < 1e-12


@given(depths, depths, angles)
def test_pdl_pmd_commute(d1, d2, phi):
    t, u = jones.pdl_matrix(d1, d2), jones.pmd_matrix(phi)
    assert np.linalg.norm(t @ u - u @ t) < 1e-14


def test_tu_decompose_recovers_factors():
    t0, u0 = jones.pdl_matrix(1, 2), jones.pmd_matrix(0.3)
    t, u = jones.tu_decompose(t0 @ u0)
    assert np.allclose(t, t0, atol=1e-12)
    assert np.allclose(u, u0, atol=1e-12)


def test_tu_decompose_trivial_cases():
    t, u = jones.tu_decompose(np.eye(2, dtype=complex))
    assert np.allclose(t, np.eye(2)) and np.allclose(u, np.eye(2))
    rot = jones.rotation_matrix(0.7) @ jones.pmd_matrix(1.1)
    t, u = jones.tu_decompose(rot)
    assert np.allclose(t, np.eye(2), atol=1e-12)


def test_tu_decompose_singular():
    with pytest.raises(DecompositionError):
        jones.tu_decompose(np.array([[1, 2], [2, 4]], dtype=complex))


def test_tu_decompose_roundtrip_random():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        t, u = jones.tu_decompose(m)
        assert np.allclose(t @ u, m, rtol=0, atol=1e-10)
        assert np.allclose(t, t.conj().T, atol=1e-12)
        assert np.all(np.linalg.eigvalsh(t) > 0)
        assert jones.is_unitary(u, tol=1e-10)


def test_apply_examples():
    rng = np.random.default_rng(1)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    assert np.array_equal(jones.apply(jones.IDENTITY, v), v)
    out = jones.apply(jones.pdl_matrix(1.2, 0.4), jones.standard_state("H"))
    assert np.allclose(out, [math.exp(-0.6), 0])
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.allclose(jones.apply(a, jones.apply(b, v)), jones.apply(a @ b, v))


@pytest.mark.parametrize("v, expected", [
    ((1, 0), (1, 1, 0, 0)),
    ((1 / math.sqrt(2), 1j / math.sqrt(2)), (1, 0, 0, 1)),
    ((1 / math.sqrt(2), 1 / math.sqrt(2)), (1, 0, 1, 0)),
])
def test_jones_to_stokes(v, expected):
    assert np.allclose(jones.jones_to_stokes(jones.jones_vector(*v)), expected, atol=1e-15)


@given(small, small, small, small)
def test_stokes_intensity_and_sphere(a, b, c, d):
    v = jones.jones_vector(a + 1j * b, c + 1j * d)
    s = jones.jones_to_stokes(v)
    assert s.s0 == abs(v[0]) ** 2 + abs(v[1]) ** 2
    assert s.s1**2 + s.s2**2 + s.s3**2 <= s.s0**2 + 1e-12 * max(1, s.s0**2)


def test_standard_states():
    assert np.array_equal(jones.standard_state("H"), [1, 0])
    assert np.allclose(jones.standard_state("+"), np.array([1, 1]) / math.sqrt(2))
    assert np.allclose(jones.standard_state("+"), jones.standard_state("D"))
    for name in ("H", "V", "D", "A", "L", "R", "alpha"):
        assert jones.intensity(jones.standard_state(name)) == pytest.approx(1, abs=1e-12)
    assert abs(jones.ALPHA_QWP) ** 2 + abs(jones.BETA_QWP) ** 2 == pytest.approx(1, abs=1e-15)
    # handedness convention: L sits at the north pole of the sphere
    assert jones.jones_to_stokes(jones.standard_state("L")).s3 == pytest.approx(1)
    with pytest.raises(InvalidInputError):
        jones.standard_state("Q")


def test_waveplate_at_45_swaps_axes():
    w = jones.waveplate(math.pi, math.pi / 4)
    c, _ = jones.scalar_part(w @ jones.SWAP)
    assert np.allclose(w, c * jones.SWAP, atol=1e-15)
    assert abs(abs(c) - 1) < 1e-15
