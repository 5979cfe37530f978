"""Rational fit ``F(d) ~ (alpha d + beta) / (d + gamma)`` to a fidelity curve."""

import logging
from dataclasses import dataclass

import numpy as np

from spinclone.errors import FitError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class FidelityCurve:
    dims: tuple
    values: tuple

    def __post_init__(self):
        if len(self.dims) != len(self.values):
            raise ValueError("dims and values differ in length")
        if any(b <= a for a, b in zip(self.dims, self.dims[1:])):
            raise ValueError("dimensions must be strictly increasing")
        if any(not 0.5 <= f <= 1.0 for f in self.values):
            raise ValueError("fidelities must lie in [0.5, 1]")

    @classmethod
    def from_points(cls, points):
        """Build from unordered ``(d, f)`` pairs."""
        points = sorted((int(d), float(f)) for d, f in points)
        return cls(tuple(d for d, _ in points), tuple(f for _, f in points))

    @classmethod
    def from_sweep(cls, rows, d_min=3):
        return cls.from_points((d, fc) for d, fc, _ in rows if d >= d_min)


@dataclass(frozen=True)
class RationalFit:
    alpha: float
    beta: float
    gamma: float
    rms_residual: float
    converged: bool = True
    iterations: int = 0

    @property
    def asymptote(self):
        return self.alpha

    def __call__(self, d):
        d = np.asarray(d, dtype=float)
        return (self.alpha * d + self.beta) / (d + self.gamma)


def _model(params, d):
    alpha, beta, gamma = params
    return (alpha * d + beta) / (d + gamma)


def _jacobian(params, d):
    alpha, beta, gamma = params
    den = d + gamma
    return np.column_stack([d / den, 1 / den, -(alpha * d + beta) / den**2])


def fit_rational(curve, max_steps=100, step_tol=1e-12):
    """Unweighted least-squares rational fit.

    Starts from the linearised problem ``f (d + gamma) = alpha d + beta`` and
    refines with damped Gauss-Newton (step halving until the residual sum of
    squares does not grow).  If the step never drops below ``step_tol`` the
    best iterate is returned with ``converged=False``.
    """
    d = np.asarray(curve.dims, dtype=float)
    f = np.asarray(curve.values, dtype=float)
    if d.size < 4:
        raise FitError(f"need at least 4 points for a 3-parameter fit, got {d.size}")

    lin = np.column_stack([d, np.ones_like(d), -f])
    params, _, rank, _ = np.linalg.lstsq(lin, f * d, rcond=None)
    if rank < 3:
        raise FitError("linearised rational system is singular")

    def sse(p):
        return float(np.sum((_model(p, d) - f) ** 2))

    best = sse(params)
    converged = False
    steps = 0
    for steps in range(1, max_steps + 1):
        if np.any(np.abs(d + params[2]) < 1e-12):
            raise FitError(f"pole d = -gamma hits a data point (gamma={params[2]})")
        resid = _model(params, d) - f
        step, *_ = np.linalg.lstsq(_jacobian(params, d), -resid, rcond=None)
        if np.linalg.norm(step) < step_tol:
            params = params + step
            best = sse(params)
            converged = True
            break
        scale = 1.0
        while scale > 1e-10:
            trial = params + scale * step
            val = sse(trial)
            if val <= best:
                params, best = trial, val
                break
            scale /= 2
        else:
            # no descent along the GN direction: at the minimum to roundoff
            converged = True
            break
    if not converged:
        log.warning("rational fit did not converge in %d steps", max_steps)
    return RationalFit(
        float(params[0]),
        float(params[1]),
        float(params[2]),
        float(np.sqrt(best / d.size)),
        converged,
        steps,
    )
