from math import sqrt

import numpy as np
import pytest

from spinclone import optimizer
from spinclone.channels import choi_from_isometry
from spinclone.errors import ConstraintInfeasibleError, DegeneracyDeficitError, EigenSolverError
from spinclone.fidelity_tensor import build_fidelity_tensor
from spinclone.optimizer import (
    OptimalSolution,
    build_isometry,
    clone_state,
    coherent_fidelity,
    max_fidelity,
    sweep,
    universal_fidelity,
)
from spinclone.spin_states import coherent_amplitudes, random_points, sphere_grid
from spinclone.verification import coherent_cloner_d3, coherent_coefficients_d3, universal_cloner_d3


def test_exact_d3():
    sol = max_fidelity(3)
    assert abs(sol.fidelity - (11 + sqrt(21)) / 20) < 1e-10
    assert sol.fidelity == pytest.approx(3 * sol.lambda_max)
    assert sol.multiplicity == 3


def test_exact_d4():
    assert abs(max_fidelity(4).fidelity - (79 + sqrt(697)) / 140) < 1e-10


def test_qubit_equals_universal():
    assert abs(max_fidelity(2).fidelity - 5 / 6) < 1e-12


def test_d16_reported_value():
    assert abs(max_fidelity(16).fidelity - 0.699) <= 1e-3


def test_universal_fidelity():
    assert universal_fidelity(2) == pytest.approx(5 / 6)
    assert universal_fidelity(3) == 0.75
    assert universal_fidelity(6) == pytest.approx(9 / 14)
    assert universal_fidelity(5) == pytest.approx(2 / 3)
    assert universal_fidelity(6) < 2 / 3


@pytest.mark.parametrize("d", [2, 3])
def test_brute_force_rayleigh_quotients_below_lambda(d, rng):
    a = build_fidelity_tensor(d).matrix
    lam = max_fidelity(d).lambda_max
    v = rng.normal(size=(10_000, a.shape[0])) + 1j * rng.normal(size=(10_000, a.shape[0]))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    quotients = np.einsum("ri,ij,rj->r", v.conj(), a, v).real
    assert quotients.max() <= lam + 1e-12


@pytest.mark.parametrize("d", range(2, 9))
def test_isometry_postconditions(d):
    sol = max_fidelity(d)
    iso = build_isometry(sol)
    assert iso.ancilla_dim == d
    assert iso.isometry_residual() < 1e-9
    assert np.sum(np.abs(iso.coeffs) ** 2) == pytest.approx(d, abs=1e-10)
    assert abs(iso.fidelity(sol.fidelity_tensor) - sol.fidelity) < 1e-9


def test_d3_isometry_is_the_closed_form_cloner():
    iso = build_isometry(max_fidelity(3))
    np.testing.assert_allclose(iso.coeffs, coherent_cloner_d3().coeffs, atol=1e-12)
    c = coherent_coefficients_d3()
    assert c["alpha"] == pytest.approx(0.764, abs=5e-4)
    assert c["beta"] == pytest.approx(0.159, abs=5e-4)
    assert c["gamma"] == pytest.approx(0.604, abs=6e-4)
    assert c["delta"] == pytest.approx(0.315, abs=5e-4)


def test_d3_isometry_channel_equals_closed_form_channel():
    # ancilla-invariant comparison: equal Choi operators mean equal channels
    a = choi_from_isometry(build_isometry(max_fidelity(3))).matrix
    b = choi_from_isometry(coherent_cloner_d3()).matrix
    assert np.abs(a - b).max() < 1e-12


def test_closed_form_fixtures_are_isometries():
    assert universal_cloner_d3().isometry_residual() < 1e-14
    assert coherent_cloner_d3().isometry_residual() < 1e-14
    assert universal_cloner_d3().fidelity() == pytest.approx(0.75, abs=1e-14)


def test_d3_marginals():
    e0 = np.eye(3)[0]
    _, coh = clone_state(build_isometry(max_fidelity(3)), e0)
    _, uni = clone_state(universal_cloner_d3(), e0)
    np.testing.assert_allclose(np.diag(coh).real, [0.779, 0.171, 0.049], atol=1e-3)
    np.testing.assert_allclose(uni, np.diag([0.75, 0.125, 0.125]), atol=1e-10)
    # the |2><2| weight is delta^2/2, not delta^2
    delta = coherent_coefficients_d3()["delta"]
    assert coh[2, 2].real == pytest.approx(delta**2 / 2, abs=1e-12)


def test_qubit_cloner_marginal():
    _, one = clone_state(build_isometry(max_fidelity(2)), np.array([1.0, 0.0]))
    np.testing.assert_allclose(one, np.diag([5 / 6, 1 / 6]), atol=1e-12)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_outputs_valid_and_symmetric(d, rng):
    iso = build_isometry(max_fidelity(d))
    for point in random_points(5, rng):
        two, one = clone_state(iso, coherent_amplitudes(d, point))
        for rho in (two, one):
            assert abs(np.trace(rho) - 1) < 1e-10
            assert np.abs(rho - rho.conj().T).max() < 1e-12
            assert np.linalg.eigvalsh(rho).min() > -1e-10
        other = np.einsum("kikj->ij", two.reshape(d, d, d, d))
        assert np.abs(other - one).max() < 1e-10


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_coherent_fidelity_constant_on_grid(d):
    sol = max_fidelity(d)
    iso = build_isometry(sol)
    fids = np.array([coherent_fidelity(iso, p) for p in sphere_grid()])
    assert np.abs(fids - sol.fidelity).max() < 1e-8


def test_gauge_first_entry_real_positive():
    iso = build_isometry(max_fidelity(4))
    flat = iso.coeffs.reshape(-1, iso.ancilla_dim)
    for a in range(iso.ancilla_dim):
        first = flat[np.flatnonzero(np.abs(flat[:, a]) > 1e-12)[0], a]
        assert abs(first.imag) < 1e-15 and first.real > 0


def test_degeneracy_deficit():
    sol = max_fidelity(3)
    short = OptimalSolution(3, sol.fidelity, sol.lambda_max, 2, sol.eigenvectors[:, :2])
    with pytest.raises(DegeneracyDeficitError):
        build_isometry(short)


def test_infeasible_gram_system():
    d, size = 3, 6
    vecs = np.zeros((d * size, d))
    for i in range(d):
        vecs[i, i] = 1.0  # all weight on input index n = 0
    sol = OptimalSolution(d, 0.7, 0.7 / 3, d, vecs)
    with pytest.raises(ConstraintInfeasibleError) as info:
        build_isometry(sol)
    assert info.value.residual > 0.1


def test_eigensolver_failure(monkeypatch):
    def broken(_):
        raise np.linalg.LinAlgError("no convergence")

    monkeypatch.setattr(optimizer.np.linalg, "eigh", broken)
    with pytest.raises(EigenSolverError, match="d=3"):
        max_fidelity(3)


def test_clone_state_dimension_mismatch():
    with pytest.raises(ValueError):
        clone_state(build_isometry(max_fidelity(3)), np.ones(4))


def test_sweep_small():
    rows = sweep(2, 4)
    assert [r[0] for r in rows] == [2, 3, 4]
    np.testing.assert_allclose([r[1] for r in rows], [5 / 6, 0.7791287847, 0.7528625540], atol=1e-9)
    np.testing.assert_allclose([r[2] for r in rows], [5 / 6, 0.75, 0.7], atol=1e-15)


def test_sweep_parallel_matches_serial():
    assert sweep(2, 7, workers=2) == sweep(2, 7, workers=1)


def test_sweep_env_workers(monkeypatch):
    monkeypatch.setenv(optimizer.WORKERS_ENV, "3")
    assert optimizer.default_workers() == 3


def test_sweep_reports_failing_dimension(monkeypatch):
    real = optimizer.max_fidelity

    def flaky(d):
        if d == 3:
            raise EigenSolverError("boom")
        return real(d)

    monkeypatch.setattr(optimizer, "max_fidelity", flaky)
    with pytest.raises(RuntimeError, match="d=3"):
        sweep(2, 4)


def test_sweep_bad_range():
    with pytest.raises(ValueError):
        sweep(5, 3)


@pytest.mark.slow
def test_full_sweep_shape():
    rows = sweep(2, 16, workers=2)
    fc = np.array([r[1] for r in rows])
    fu = np.array([r[2] for r in rows])
    assert np.all(np.diff(fc) <= 0)
    assert np.all(fc >= 2 / 3)
    assert abs(fc[0] - fu[0]) < 1e-10
    assert np.all(fc[1:] > fu[1:])
