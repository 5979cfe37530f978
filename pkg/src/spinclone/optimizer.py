"""Optimal coherent-state cloner: eigenproblem, isometry reconstruction, clone outputs."""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from spinclone.errors import (
    ConstraintInfeasibleError,
    DegeneracyDeficitError,
    EigenSolverError,
)
from spinclone.fidelity_tensor import build_fidelity_tensor
from spinclone.spin_states import check_dim, coherent_amplitudes
from spinclone.symmetric_space import symmetric_basis

log = logging.getLogger(__name__)

DEGENERACY_RTOL = 1e-9
ISOMETRY_TOL = 1e-9
WORKERS_ENV = "SPINCLONE_WORKERS"


@dataclass(frozen=True)
class OptimalSolution:
    dim: int
    fidelity: float
    lambda_max: float
    multiplicity: int
    eigenvectors: np.ndarray = field(repr=False)  # (d*S, multiplicity), orthonormal columns
    fidelity_tensor: np.ndarray = field(repr=False, default=None)

    @property
    def sym_size(self):
        return self.dim * (self.dim + 1) // 2


@dataclass(frozen=True)
class CloningIsometry:
    """Cloning map ``|n>|0>|A0> -> sum_{s,a} coeffs[n, s, a] |s>|a>``.

    ``coeffs[n, s, a]`` is ``<a|R_ns>``; ``s`` indexes the symmetric basis.
    """

    dim: int
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        d = self.dim
        size = d * (d + 1) // 2
        if self.coeffs.ndim != 3 or self.coeffs.shape[:2] != (d, size):
            raise ValueError(
                f"coefficients must have shape ({d}, {size}, ancilla), got {self.coeffs.shape}"
            )

    @property
    def ancilla_dim(self):
        return self.coeffs.shape[2]

    def gram(self):
        """``G[n1, n] = sum_{s,a} conj(c[n1,s,a]) c[n,s,a]``; identity for an isometry."""
        flat = self.coeffs.reshape(self.dim, -1)
        return flat.conj() @ flat.T

    def isometry_residual(self):
        return float(np.linalg.norm(self.gram() - np.eye(self.dim)))

    def kraus_operators(self):
        """Kraus operators H -> H (x) H, one per ancilla state."""
        basis = symmetric_basis(self.dim)
        # K_a[(i1 i2), n] = sum_s <i1 i2|s> c[n, s, a]
        return np.einsum("sx,nsa->axn", basis.states, self.coeffs)

    def fidelity(self, tensor=None):
        """Average coherent-state fidelity ``sum_a w_a^dagger A w_a``."""
        if tensor is None:
            tensor = build_fidelity_tensor(self.dim).matrix
        w = self.coeffs.reshape(-1, self.ancilla_dim)
        return float(np.real(np.einsum("ia,ij,ja->", w.conj(), tensor, w)))


def universal_fidelity(d):
    """Optimal 1->2 universal cloning fidelity ``(d+3)/(2d+2)``."""
    d = check_dim(d)
    return (d + 3) / (2 * d + 2)


def max_fidelity(d):
    """Top eigenvalue of the fidelity tensor and its eigenspace; ``F = d * lambda``."""
    d = check_dim(d)
    tensor = build_fidelity_tensor(d).matrix
    try:
        w, v = np.linalg.eigh(tensor)
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(
            f"eigh failed for d={d} on a {tensor.shape[0]}x{tensor.shape[0]} matrix: {exc}"
        ) from exc
    lam = float(w[-1])
    if not np.isfinite(lam) or lam <= 0:
        raise EigenSolverError(f"d={d}: non-positive top eigenvalue {lam}")
    top = w >= lam - DEGENERACY_RTOL * lam
    vecs = _charge_basis(v[:, top], d)
    log.debug("d=%d lambda_max=%.15g multiplicity=%d", d, lam, vecs.shape[1])
    return OptimalSolution(d, d * lam, lam, int(top.sum()), vecs, tensor)


def charges(d):
    """Conserved ``i + j - n`` for every composite index ``n * S + s``.

    The fidelity tensor only couples entries of equal charge (the phase
    selection rule), so its eigenspaces split into charge sectors.
    """
    pair_sums = np.array([i + j for i, j in symmetric_basis(d).pairs])
    return (pair_sums[None, :] - np.arange(d)[:, None]).ravel()


def _charge_basis(vecs, d):
    """Rotate a degenerate eigenbasis so each vector has definite charge, ascending."""
    q = charges(d)
    proj = vecs.conj().T @ (q[:, None] * vecs)
    _, rot = np.linalg.eigh((proj + proj.conj().T) / 2)
    return vecs @ rot


def _solve_gram(vecs, d, size):
    """Hermitian ``M`` with ``sum_ij M_ij sum_s conj(v_i[n1,s]) v_j[n,s] = delta``."""
    m = vecs.shape[1]
    vr = vecs.reshape(d, size, m)
    lin = np.einsum("asi,nsj->anij", vr.conj(), vr).reshape(d * d, m * m)
    sol, *_ = np.linalg.lstsq(lin, np.eye(d).ravel().astype(complex), rcond=None)
    mix = sol.reshape(m, m)
    mix = (mix + mix.conj().T) / 2
    residual = float(np.linalg.norm(lin @ mix.ravel() - np.eye(d).ravel()))
    return mix, residual


def _fix_gauge(coeffs, tol=1e-12):
    """Rotate each ancilla column so its first non-negligible entry is real positive."""
    flat = coeffs.reshape(-1, coeffs.shape[-1])
    for a in range(flat.shape[1]):
        nz = np.flatnonzero(np.abs(flat[:, a]) > tol)
        if nz.size:
            z = flat[nz[0], a]
            flat[:, a] *= np.conj(z) / abs(z)
    return flat.reshape(coeffs.shape)


def build_isometry(solution):
    """Combine top eigenvectors into an isometric cloner of maximal fidelity.

    The ancilla components are ``w_a = sum_i C[a, i] v_i`` with ``C = M^(1/2)``
    and ``M`` solving the linear Gram system ``G(M) = I``.
    """
    d = solution.dim
    size = solution.sym_size
    if solution.multiplicity < d:
        raise DegeneracyDeficitError(d, solution.multiplicity)
    vecs = solution.eigenvectors
    mix, residual = _solve_gram(vecs, d, size)
    if residual > ISOMETRY_TOL:
        raise ConstraintInfeasibleError(f"d={d}: Gram system G(M)=I has no exact solution", residual)
    evals, evecs = np.linalg.eigh(mix)
    if evals[0] < -ISOMETRY_TOL:
        raise ConstraintInfeasibleError(
            f"d={d}: Gram solution is not positive semidefinite (min eigenvalue {evals[0]:.3e})",
            residual,
        )
    keep = evals > ISOMETRY_TOL
    # C = M^(1/2) restricted to its support; each retained row is one ancilla state
    rank = int(keep.sum())
    root = (evecs[:, keep] * np.sqrt(evals[keep])) @ evecs[:, keep].conj().T
    w = vecs @ root.T  # columns w_a
    if w.shape[1] > rank:
        # drop null directions so the ancilla dimension equals rank(M)
        u, sv, _ = np.linalg.svd(w, full_matrices=False)
        w = u[:, :rank] * sv[:rank]
    coeffs = _fix_gauge(w.reshape(d, size, -1).astype(complex))
    if np.abs(coeffs.imag).max() < 1e-14:
        coeffs = coeffs.real.astype(complex)
    iso = CloningIsometry(d, coeffs)
    res = iso.isometry_residual()
    if res > ISOMETRY_TOL:
        raise ConstraintInfeasibleError(f"d={d}: reconstructed map is not an isometry", res)
    return iso


def output_state(iso, psi):
    """Two-clone density matrix (on the symmetric subspace, S x S) for input ``psi``."""
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (iso.dim,):
        raise ValueError(f"input must have length {iso.dim}, got shape {psi.shape}")
    amp = np.einsum("n,nsa->sa", psi, iso.coeffs)
    return amp @ amp.conj().T


def clone_state(iso, psi):
    """Return ``(two_clone, single_clone)`` density matrices for a pure input.

    ``two_clone`` is embedded in H (x) H (d^2 x d^2); ``single_clone`` is the
    marginal of the first clone, equal to that of the second.
    """
    basis = symmetric_basis(iso.dim)
    rho_sym = output_state(iso, psi)
    two = basis.embed(rho_sym)
    d = iso.dim
    one = np.einsum("ikjk->ij", two.reshape(d, d, d, d))
    return two, one


def coherent_fidelity(iso, point):
    """``<theta phi| rho_out |theta phi>`` for one coherent input."""
    psi = coherent_amplitudes(iso.dim, point)
    _, one = clone_state(iso, psi)
    return float(np.real(psi.conj() @ one @ psi))


def _sweep_row(d):
    return d, max_fidelity(d).fidelity, universal_fidelity(d)


def default_workers():
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return 1


def sweep(d_min, d_max, workers=None):
    """``[(d, F_coherent, F_universal)]`` for ``d_min <= d <= d_max``.

    Dimensions are independent, so ``workers > 1`` fans them out over
    processes. ``workers`` defaults to ``$SPINCLONE_WORKERS`` or 1.
    """
    d_min, d_max = check_dim(d_min), check_dim(d_max)
    if d_min > d_max:
        raise ValueError(f"d_min={d_min} exceeds d_max={d_max}")
    dims = list(range(d_min, d_max + 1))
    workers = default_workers() if workers is None else workers
    rows = []
    if workers <= 1 or len(dims) == 1:
        for d in dims:
            try:
                rows.append(_sweep_row(d))
            except Exception as exc:
                raise RuntimeError(f"sweep failed at d={d}: {exc}") from exc
        return rows
    # largest first so the long eigensolves start early
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = {d: pool.submit(_sweep_row, d) for d in sorted(dims, reverse=True)}
        for d in dims:
            try:
                rows.append(futures[d].result())
            except Exception as exc:
                raise RuntimeError(f"sweep failed at d={d}: {exc}") from exc
    return rows
