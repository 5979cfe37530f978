"""Symmetric subspace of the two-clone space H (x) H.

The basis is ``|i,i> = |i>|i>`` and ``|i,j> = (|i>|j> + |j>|i>)/sqrt(2)`` for
``i < j``, ordered lexicographically over pairs ``i <= j``. There are
``S = d(d+1)/2`` states.
"""

from dataclasses import dataclass, field

import numpy as np

from spinclone.spin_states import check_dim


@dataclass(frozen=True)
class SymmetricBasis:
    dim_single: int
    pairs: tuple
    states: np.ndarray = field(repr=False)  # (S, d*d), rows are basis kets
    _index: dict = field(repr=False, compare=False)

    @property
    def size(self):
        return len(self.pairs)

    def index_of(self, i, j):
        if i > j:
            i, j = j, i
        return self._index[(i, j)]

    def overlap_tensor(self):
        """Array ``T[k, l, s] = <k (x) l | s>`` of shape (d, d, S)."""
        d = self.dim_single
        return self.states.T.reshape(d, d, self.size).copy()

    def embed(self, m):
        """Lift an S x S operator on the symmetric subspace to H (x) H."""
        m = np.asarray(m)
        if m.shape != (self.size, self.size):
            raise ValueError(f"expected {self.size}x{self.size} matrix, got {m.shape}")
        return self.states.T @ m @ self.states


def symmetric_basis(d):
    d = check_dim(d)
    pairs = tuple((i, j) for i in range(d) for j in range(i, d))
    states = np.zeros((len(pairs), d * d))
    for s, (i, j) in enumerate(pairs):
        if i == j:
            states[s, i * d + i] = 1.0
        else:
            states[s, i * d + j] = states[s, j * d + i] = 1 / np.sqrt(2)
    index = {p: s for s, p in enumerate(pairs)}
    return SymmetricBasis(d, pairs, states, index)


def overlap(basis, k, l, s):
    """``<k (x) l | s>``; one of 0, 1 or 1/sqrt(2)."""
    d = basis.dim_single
    if not (0 <= k < d and 0 <= l < d and 0 <= s < basis.size):
        raise IndexError(f"index out of range: k={k}, l={l}, s={s} (d={d}, S={basis.size})")
    return float(basis.states[s, k * d + l])


def partial_trace_second(basis, m):
    """Trace out the second clone of an operator given on the symmetric subspace."""
    d = basis.dim_single
    full = basis.embed(m).reshape(d, d, d, d)
    return np.einsum("ikjk->ij", full)
