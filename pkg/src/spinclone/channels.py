"""Choi (Jamiolkowski) operators of cloning channels H -> H (x) H.

``P = (E (x) id)(|I><I|)`` with the unnormalised ``|I> = sum_n |n>|n>``.
``P`` acts on clone1 (x) clone2 (x) input, flattened as ``(i1 * d + i2) * d + n``,
and a trace-preserving ``E`` has ``Tr_K P = I`` (so ``Tr P = d``).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from spinclone.errors import DimensionOverflowError
from spinclone.spin_states import rotation_matrix

DENSE_DIM_LIMIT = 12


def check_dense(d):
    if d > DENSE_DIM_LIMIT:
        raise DimensionOverflowError(d, DENSE_DIM_LIMIT)


@dataclass(frozen=True)
class ChoiOperator:
    dim_single: int
    matrix: np.ndarray = field(repr=False)

    def reduced_input(self):
        """``Tr_K P``: trace over both clones, leaving the input factor."""
        d = self.dim_single
        return np.einsum("kakb->ab", self.matrix.reshape(d * d, d, d * d, d))

    def apply(self, rho):
        """Channel action ``E(rho) = Tr_in[(1_K (x) rho^T) P]``."""
        d = self.dim_single
        p = self.matrix.reshape(d * d, d, d * d, d)
        return np.einsum("xayb,ab->xy", p, np.asarray(rho))


def choi_from_kraus(kraus, d):
    """Choi operator of ``rho -> sum_a K_a rho K_a^dagger``; ``kraus`` has shape (r, d*d, d)."""
    check_dense(d)
    kraus = np.asarray(kraus, dtype=complex)
    # |Phi_a> = sum_n K_a|n> (x) |n>, i.e. K_a flattened row-major
    vecs = kraus.reshape(kraus.shape[0], -1)
    return ChoiOperator(d, vecs.T @ vecs.conj())


def choi_from_isometry(iso):
    check_dense(iso.dim)
    return choi_from_kraus(iso.kraus_operators(), iso.dim)


def trace_preservation_residual(choi):
    """Frobenius norm of ``Tr_K P - I``."""
    return float(np.linalg.norm(choi.reduced_input() - np.eye(choi.dim_single)))


def symmetry_action(d, point):
    """``R (x) R (x) conj(R)`` for the rotation taking |0> to the coherent state at ``point``."""
    r = rotation_matrix(d, point)
    return np.kron(np.kron(r, r), r.conj())


def covariance_residual(choi, samples):
    """Largest Frobenius norm of ``[P, R (x) R (x) R*]`` over the sampled rotations."""
    worst = 0.0
    for point in samples:
        g = symmetry_action(choi.dim_single, point)
        worst = max(worst, float(np.linalg.norm(choi.matrix @ g - g @ choi.matrix)))
    return worst


def swap_clones(d):
    """Permutation ``SWAP_12 (x) 1`` on the d^3 space."""
    idx = np.arange(d**3).reshape(d, d, d).transpose(1, 0, 2).ravel()
    return np.eye(d**3)[idx]


def permutation_residual(choi):
    """Frobenius norm of ``[P, SWAP_12 (x) 1]``."""
    d = choi.dim_single
    p = choi.matrix.reshape(d, d, d, d, d, d)
    swapped = p.transpose(1, 0, 2, 4, 3, 5).reshape(d**3, d**3)
    # SWAP P SWAP - P has the same norm as the commutator
    return float(np.linalg.norm(swapped - choi.matrix))


def choi_spectrum(choi):
    """Eigenvalues of ``P`` in descending order."""
    return np.linalg.eigvalsh(choi.matrix)[::-1]


def conjecture_verdict(spectrum, d, tol=1e-8):
    """True when the top ``d`` eigenvalues are 1 and the rest vanish, within ``tol``."""
    spectrum = np.asarray(spectrum)
    return bool(np.all(np.abs(spectrum[:d] - 1) < tol) and np.all(np.abs(spectrum[d:]) < tol))


@dataclass
class ChoiReport:
    d: int
    eigenvalues: list
    trace_residual: float
    covariance_residual: float
    permutation_residual: float

    def to_dict(self):
        return {
            "d": self.d,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "trace_residual": self.trace_residual,
            "covariance_residual": self.covariance_residual,
            "permutation_residual": self.permutation_residual,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        return cls(
            int(data["d"]),
            [float(x) for x in data["eigenvalues"]],
            float(data["trace_residual"]),
            float(data["covariance_residual"]),
            float(data["permutation_residual"]),
        )


def choi_report(choi, samples):
    return ChoiReport(
        choi.dim_single,
        list(choi_spectrum(choi)),
        trace_preservation_residual(choi),
        covariance_residual(choi, samples),
        permutation_residual(choi),
    )
