"""Optimal symmetric 1->2 cloning of spin coherent states."""

from spinclone.errors import (
    ConstraintInfeasibleError,
    DegeneracyDeficitError,
    DimensionOverflowError,
    EigenSolverError,
    FitError,
    InvalidDimensionError,
)
from spinclone.spin_states import (
    AngularMomentumOps,
    CoherentPoint,
    angular_momentum_ops,
    coherent_amplitudes,
    rotation_matrix,
)
from spinclone.symmetric_space import SymmetricBasis, overlap, partial_trace_second, symmetric_basis
from spinclone.fidelity_tensor import FidelityTensor, angular_moment, build_fidelity_tensor
from spinclone.optimizer import (
    CloningIsometry,
    OptimalSolution,
    build_isometry,
    clone_state,
    max_fidelity,
    sweep,
    universal_fidelity,
)
from spinclone.channels import (
    ChoiOperator,
    choi_from_isometry,
    choi_spectrum,
    covariance_residual,
    permutation_residual,
    trace_preservation_residual,
)
from spinclone.irreps import (
    IrrepDecomposition,
    block_structure,
    clebsch_gordan,
    conjugate_basis_map,
    decompose_triple,
)
from spinclone.fitting import FidelityCurve, RationalFit, fit_rational

__version__ = "0.1.0"
