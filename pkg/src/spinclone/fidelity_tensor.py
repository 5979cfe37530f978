"""The fidelity tensor A whose top eigenvalue gives the optimal fidelity.

Rows and columns are indexed by the composite ``n * S + s`` where ``n`` is the
input number state and ``s`` the symmetric two-clone state.  For ancilla
components ``w[n, s] = <a|R_ns>`` the average coherent-state fidelity is
``sum_a w_a^dagger A w_a``.
"""

import json
from dataclasses import dataclass, field
from math import comb, exp, factorial, lgamma, sqrt

import numpy as np

from spinclone.spin_states import check_dim
from spinclone.symmetric_space import symmetric_basis

# above this d the factorials overflow double precision ratios
_EXACT_FACTORIAL_MAX_D = 30


def _beta_int(a, b, d):
    """B(a, b) for positive integers a, b."""
    if d <= _EXACT_FACTORIAL_MAX_D:
        return factorial(a - 1) * factorial(b - 1) / factorial(a + b - 1)
    return exp(lgamma(a) + lgamma(b) - lgamma(a + b))


def angular_moment(d, n1, k1, k, n):
    """Sphere average of ``conj(O_n1) O_k1 conj(O_k) O_n`` over coherent states.

    The phi integral vanishes unless ``n + k1 == n1 + k``; on that support the
    theta integral is a Beta function with integer arguments.
    """
    d = check_dim(d)
    for idx in (n1, k1, k, n):
        if not 0 <= idx < d:
            raise IndexError(f"index {idx} out of range for d={d}")
    if n + k1 != n1 + k:
        return 0.0
    p = n + n1 + k + k1
    q = 4 * (d - 1) - p
    norm = sqrt(comb(d - 1, n1) * comb(d - 1, k1) * comb(d - 1, k) * comb(d - 1, n))
    return norm * _beta_int(p // 2 + 1, q // 2 + 1, d)


def moment_tensor(d):
    """All angular moments as a (d, d, d, d) array indexed [n1, k1, k, n]."""
    d = check_dim(d)
    out = np.zeros((d, d, d, d))
    for n1 in range(d):
        for k1 in range(d):
            for k in range(d):
                n = n1 + k - k1
                if 0 <= n < d:
                    out[n1, k1, k, n] = angular_moment(d, n1, k1, k, n)
    return out


@dataclass(frozen=True)
class FidelityTensor:
    dim_single: int
    sym_size: int
    matrix: np.ndarray = field(repr=False)

    def composite(self, n, s):
        return n * self.sym_size + s

    def to_dict(self):
        return {
            "d": self.dim_single,
            "S": self.sym_size,
            "matrix": self.matrix.tolist(),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data):
        return cls(int(data["d"]), int(data["S"]), np.asarray(data["matrix"], dtype=float))


def contract_moments(basis, moments):
    """``A[(n1, s1), (n, s)] = sum_{k, k1, l} <k l|s> <s1|k1 l> moments[n1, k1, k, n]``."""
    d, size = basis.dim_single, basis.size
    t = basis.overlap_tensor()
    # partial trace over the second clone of |s><s1|
    marg = np.einsum("kls,Kly->kKsy", t, t)
    a = np.tensordot(moments, marg, axes=([1, 2], [1, 0]))  # -> [n1, n, s, s1]
    return a.transpose(0, 3, 1, 2).reshape(d * size, d * size)


def build_fidelity_tensor(d, basis=None):
    d = check_dim(d)
    if basis is None:
        basis = symmetric_basis(d)
    a = contract_moments(basis, moment_tensor(d))
    a = (a + a.T) / 2
    return FidelityTensor(d, basis.size, a)
