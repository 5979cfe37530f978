"""Spin coherent states, angular momentum matrices and SU(2) rotations.

Basis convention: index ``n = 0..d-1`` labels the Jz eigenstate with
``m = n - j`` so that ``|0>`` is the lowest weight state ``|-j>``.
"""

from dataclasses import dataclass
from math import comb, pi

import numpy as np

from spinclone.errors import InvalidDimensionError


def check_dim(d):
    if isinstance(d, bool) or int(d) != d or d < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {d!r}")
    return int(d)


@dataclass(frozen=True)
class CoherentPoint:
    """Point on the sphere, theta in [0, pi] and phi in [0, 2 pi)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.theta <= pi:
            raise ValueError(f"theta must lie in [0, pi], got {self.theta}")
        if not 0.0 <= self.phi < 2 * pi:
            raise ValueError(f"phi must lie in [0, 2pi), got {self.phi}")

    @classmethod
    def wrapped(cls, theta, phi):
        """Build a point after folding ``phi`` into [0, 2 pi)."""
        return cls(float(theta), float(np.mod(phi, 2 * pi)) % (2 * pi))


@dataclass(frozen=True)
class AngularMomentumOps:
    jx: np.ndarray
    jy: np.ndarray
    jz: np.ndarray

    @property
    def dim(self):
        return self.jz.shape[0]


def coherent_amplitudes(d, point):
    """Number-state amplitudes ``<n|theta, phi>`` of a spin coherent state.

    ``O_n = binom(d-1, n)^(1/2) sin^n(theta/2) cos^(d-1-n)(theta/2) exp(-i n phi)``
    """
    d = check_dim(d)
    n = np.arange(d)
    binoms = np.array([comb(d - 1, k) for k in range(d)], dtype=float)
    s, c = np.sin(point.theta / 2), np.cos(point.theta / 2)
    return np.sqrt(binoms) * s**n * c ** (d - 1 - n) * np.exp(-1j * n * point.phi)


def angular_momentum_ops(d):
    """Spin-j matrices (j = (d-1)/2) with Condon-Shortley ladder phases."""
    d = check_dim(d)
    j = (d - 1) / 2
    m = np.arange(d) - j
    jplus = np.zeros((d, d))
    # J+ |m> = sqrt(j(j+1) - m(m+1)) |m+1>, with |m+1> one index up
    for n in range(d - 1):
        jplus[n + 1, n] = np.sqrt(j * (j + 1) - m[n] * (m[n] + 1))
    jx = (jplus + jplus.T) / 2
    jy = (jplus - jplus.T) / 2j
    return AngularMomentumOps(jx.astype(complex), jy, np.diag(m).astype(complex))


def rotation_matrix(d, point):
    """``R = exp(-i theta (Jx sin(phi) - Jy cos(phi)))``.

    The generator is Hermitian, so the exponential is taken through its
    eigendecomposition; the result is unitary to roundoff.
    """
    ops = angular_momentum_ops(d)
    gen = ops.jx * np.sin(point.phi) - ops.jy * np.cos(point.phi)
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(-1j * point.theta * w)) @ v.conj().T


def sphere_grid(n_theta=4, n_phi=5):
    """Deterministic grid of coherent points (default 20 points)."""
    thetas = np.linspace(0.0, pi, n_theta)
    phis = np.arange(n_phi) * 2 * pi / n_phi
    return [CoherentPoint(float(t), float(p)) for t in thetas for p in phis]


def random_points(count, rng):
    """Points drawn uniformly with respect to the sphere measure."""
    cos_t = rng.uniform(-1.0, 1.0, size=count)
    phis = rng.uniform(0.0, 2 * pi, size=count)
    return [CoherentPoint(float(np.arccos(c)), float(p)) for c, p in zip(cos_t, phis)]
