from math import sqrt

import numpy as np
import pytest

from spinclone.channels import (
    ChoiOperator,
    ChoiReport,
    choi_from_isometry,
    choi_from_kraus,
    choi_report,
    choi_spectrum,
    conjecture_verdict,
    covariance_residual,
    permutation_residual,
    swap_clones,
    trace_preservation_residual,
)
from spinclone.errors import DimensionOverflowError
from spinclone.optimizer import CloningIsometry, build_isometry, clone_state, max_fidelity
from spinclone.spin_states import random_points
from spinclone.verification import universal_cloner_d3


def optimal_choi(d):
    return choi_from_isometry(build_isometry(max_fidelity(d)))


def test_d3_size_and_trace():
    p = optimal_choi(3)
    assert p.matrix.shape == (27, 27)
    assert np.trace(p.matrix).real == pytest.approx(3)
    assert np.abs(p.matrix - p.matrix.conj().T).max() < 1e-12


@pytest.mark.parametrize("d", [2, 3, 4])
def test_trace_preserving(d):
    assert trace_preservation_residual(optimal_choi(d)) < 1e-9


def test_scaled_choi_residual_is_sqrt_d():
    p = optimal_choi(3)
    doubled = ChoiOperator(3, 2 * p.matrix)
    assert trace_preservation_residual(doubled) == pytest.approx(sqrt(3), abs=1e-9)


def test_random_psd_is_not_trace_preserving(rng):
    x = rng.normal(size=(27, 27)) + 1j * rng.normal(size=(27, 27))
    assert trace_preservation_residual(ChoiOperator(3, x @ x.conj().T / 27)) > 0.1


@pytest.mark.parametrize("d", [2, 3, 4])
def test_covariance(d, rng):
    assert covariance_residual(optimal_choi(d), random_points(10, rng)) < 1e-8


def test_universal_cloner_is_covariant(rng):
    p = choi_from_isometry(universal_cloner_d3())
    assert covariance_residual(p, random_points(10, rng)) < 1e-8


def test_perturbed_isometry_breaks_covariance(rng):
    iso = build_isometry(max_fidelity(3))
    coeffs = iso.coeffs.copy()
    coeffs[0, 0, 0] += 0.1
    p = choi_from_isometry(CloningIsometry(3, coeffs))
    assert covariance_residual(p, random_points(10, rng)) > 1e-3


@pytest.mark.parametrize("d", [2, 3, 4])
def test_permutation_symmetry(d):
    assert permutation_residual(optimal_choi(d)) < 1e-9


def test_permutation_residual_matches_commutator():
    d = 2
    rng = np.random.default_rng(7)
    x = rng.normal(size=(8, 8))
    p = ChoiOperator(d, x @ x.T)
    sw = swap_clones(d)
    assert permutation_residual(p) == pytest.approx(np.linalg.norm(p.matrix @ sw - sw @ p.matrix))


def test_nonsymmetric_controls():
    d = 2
    # clone 2 always |0>: K|n> = |n>|0>
    fixed = np.zeros((1, d * d, d))
    for n in range(d):
        fixed[0, n * d + 0, n] = 1
    p = choi_from_kraus(fixed, d)
    assert trace_preservation_residual(p) < 1e-12
    assert permutation_residual(p) > 1e-3

    # symmetric map |n> -> |n>|n>, then swap the factors of one product term only
    copy = np.zeros((1, d * d, d))
    copy[0, 0 * d + 1, 0] = 1 / sqrt(2)
    copy[0, 1 * d + 0, 0] = 1 / sqrt(2)
    copy[0, 1 * d + 1, 1] = 1
    assert permutation_residual(choi_from_kraus(copy, d)) < 1e-12
    broken = copy.copy()
    broken[0, 1 * d + 0, 0] = 0
    broken[0, 0 * d + 1, 0] = 1
    assert permutation_residual(choi_from_kraus(broken, d)) > 1e-3


def test_spectra():
    np.testing.assert_allclose(choi_spectrum(optimal_choi(2)), [1, 1] + [0] * 6, atol=1e-10)
    np.testing.assert_allclose(choi_spectrum(optimal_choi(3)), [1] * 3 + [0] * 24, atol=1e-10)


@pytest.mark.parametrize("d", [4, 5])
def test_conjecture_spectrum(d):
    spec = choi_spectrum(optimal_choi(d))
    assert conjecture_verdict(spec, d, tol=1e-8)


def test_conjecture_verdict_negative():
    assert not conjecture_verdict([1, 0.5, 0, 0], 2)
    assert not conjecture_verdict([1, 1, 1e-3], 2)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_choi_round_trip_against_isometry(d, rng):
    iso = build_isometry(max_fidelity(d))
    p = choi_from_isometry(iso)
    for _ in range(10):
        psi = rng.normal(size=d) + 1j * rng.normal(size=d)
        psi /= np.linalg.norm(psi)
        two, _ = clone_state(iso, psi)
        assert np.abs(p.apply(np.outer(psi, psi.conj())) - two).max() < 1e-9


def test_dense_ceiling():
    iso = CloningIsometry(13, np.zeros((13, 91, 1)))
    with pytest.raises(DimensionOverflowError, match="13"):
        choi_from_isometry(iso)


def test_report_json_round_trip(rng):
    report = choi_report(optimal_choi(2), random_points(3, rng))
    back = ChoiReport.from_dict(__import__("json").loads(report.to_json()))
    assert back == report
    assert set(report.to_dict()) == {
        "d",
        "eigenvalues",
        "trace_residual",
        "covariance_residual",
        "permutation_residual",
    }
