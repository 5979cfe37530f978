from math import pi, sqrt

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from spinclone.errors import InvalidDimensionError
from spinclone.spin_states import (
    CoherentPoint,
    angular_momentum_ops,
    coherent_amplitudes,
    rotation_matrix,
    sphere_grid,
)

points = st.builds(
    CoherentPoint,
    st.floats(0.0, pi),
    st.floats(0.0, 2 * pi, exclude_max=True),
)


def test_ground_state_independent_of_phi():
    for phi in (0.0, 1.0, 4.0):
        np.testing.assert_allclose(coherent_amplitudes(3, CoherentPoint(0.0, phi)), [1, 0, 0])


def test_equator_qubit():
    np.testing.assert_allclose(coherent_amplitudes(2, CoherentPoint(pi / 2, 0.0)), [1 / sqrt(2)] * 2)


def test_spin1_equator_at_phi_pi():
    # binom(2,n)^(1/2) (1/sqrt2)^2 e^{-i n pi} = (1/2, -1/sqrt2, 1/2)
    amp = coherent_amplitudes(3, CoherentPoint(pi / 2, pi))
    np.testing.assert_allclose(amp, [0.5, -1 / sqrt(2), 0.5], atol=1e-15)
    np.testing.assert_allclose(rotation_matrix(3, CoherentPoint(pi / 2, pi))[:, 0], amp, atol=1e-12)


@pytest.mark.parametrize("d", [0, 1, -3])
def test_invalid_dimension(d):
    with pytest.raises(InvalidDimensionError):
        coherent_amplitudes(d, CoherentPoint(0.1, 0.2))
    with pytest.raises(InvalidDimensionError):
        angular_momentum_ops(d)


def test_point_range_validation():
    with pytest.raises(ValueError):
        CoherentPoint(-0.1, 0.0)
    with pytest.raises(ValueError):
        CoherentPoint(1.0, 2 * pi)
    assert CoherentPoint.wrapped(1.0, -0.5).phi == pytest.approx(2 * pi - 0.5)


def test_jz_diagonals():
    np.testing.assert_allclose(np.diag(angular_momentum_ops(2).jz).real, [-0.5, 0.5])
    np.testing.assert_allclose(np.diag(angular_momentum_ops(3).jz).real, [-1, 0, 1])


@pytest.mark.parametrize("d", range(2, 9))
def test_angular_momentum_algebra(d):
    ops = angular_momentum_ops(d)
    jx, jy, jz = ops.jx, ops.jy, ops.jz
    j = (d - 1) / 2
    for a, b, c in ((jx, jy, jz), (jy, jz, jx), (jz, jx, jy)):
        assert np.abs(a @ b - b @ a - 1j * c).max() < 1e-12
    for op in (jx, jy, jz):
        assert np.abs(op - op.conj().T).max() < 1e-15
    casimir = jx @ jx + jy @ jy + jz @ jz
    assert np.abs(casimir - j * (j + 1) * np.eye(d)).max() < 1e-12


def test_condon_shortley_raising_positive():
    ops = angular_momentum_ops(4)
    jplus = ops.jx + 1j * ops.jy
    assert np.all(np.diag(jplus, -1).real > 0)


@pytest.mark.parametrize("d", [2, 3, 5])
def test_zero_rotation_is_identity(d):
    np.testing.assert_allclose(rotation_matrix(d, CoherentPoint(0.0, 1.3)), np.eye(d), atol=1e-15)


def test_qubit_spin_flip():
    col = rotation_matrix(2, CoherentPoint(pi, 0.0))[:, 0]
    assert abs(col[0]) < 1e-15
    assert abs(abs(col[1]) - 1) < 1e-15


def test_rotation_against_expm():
    d, point = 4, CoherentPoint(1.1, 2.3)
    ops = angular_momentum_ops(d)
    expected = scipy.linalg.expm(-1j * point.theta * (ops.jx * np.sin(point.phi) - ops.jy * np.cos(point.phi)))
    r = rotation_matrix(d, point)
    assert np.abs(r - expected).max() < 1e-12
    assert np.abs(r[:, 0] - coherent_amplitudes(d, point)).max() < 1e-10


@pytest.mark.parametrize("d", range(2, 9))
def test_grid_properties(d):
    grid = sphere_grid()
    assert len(grid) == 20
    for point in grid:
        amp = coherent_amplitudes(d, point)
        r = rotation_matrix(d, point)
        assert abs(np.vdot(amp, amp).real - 1) < 1e-12
        assert np.linalg.norm(r @ np.eye(d)[0] - amp) < 1e-10
        assert np.linalg.norm(r.conj().T @ r - np.eye(d)) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 10), points)
def test_coherent_state_is_rotated_ground_state(d, point):
    amp = coherent_amplitudes(d, point)
    assert abs(np.linalg.norm(amp) - 1) < 1e-12
    assert np.linalg.norm(rotation_matrix(d, point)[:, 0] - amp) < 1e-10
