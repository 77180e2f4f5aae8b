"""Dual-unitary circuits from biunitary building blocks.

Statevector simulation of brick-wall circuits, projected ensembles and their
moments, emergence of quantum state designs, and the space-direction transfer
matrices that explain the solvable measurement schemes.
"""

import os as _os

_threads = _os.environ.get("DUALUNI_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

from .circuit import CircuitSpec, apply_two_site_gate, brickwall_evolve
from .ensemble import (
    ComputationalScheme,
    MomentOperator,
    ProjectedEnsemble,
    UebScheme,
    delta_k,
    haar_moment,
    moment_k,
    project_ensemble,
    rho_nk,
    sym_coords,
    sym_dim,
)
from .errors import (
    BudgetExceededError,
    CapExceededError,
    DegenerateStateError,
    DualuniError,
    HermiticityError,
    InvalidDimensionError,
    ShapeMismatchError,
    SingularMatrixError,
    ValidationError,
)
from .gates import (
    Gate,
    UnitaryErrorBasis,
    app_c_gate,
    cat_map_gate,
    check_kim_property,
    dual,
    fourier_matrix,
    generalized_pauli_ueb,
    hadamard_gate,
    is_complex_hadamard,
    is_dual_unitary,
    is_ueb,
    kim_gate,
    project_dual_unitary,
    ueb_gate,
)
from .haar import (
    Permutation,
    WeingartenTable,
    cycle_count,
    haar_twirl_exact,
    haar_twirl_mc,
    permutation_operator,
    permutations_of,
    rising_factorial,
    stirling_first,
    weingarten,
)
from .linalg import closest_unitary, haar_unitary, hermitian_eig, trace_norm
from .states import (
    SolvableMPS,
    StateVector,
    bell_pair_mps,
    computational_product_state,
    is_solvable_mps,
    solvable_mps_state,
    ueb_pair_state,
)
from .transfer import (
    ComputationalTransferScheme,
    TransferSpec,
    UebTransferScheme,
    dense_folded_transfer,
    folded_transfer_apply,
    leading_eigs,
    permutation_eigenoperator,
    single_outcome_transfer,
    spectral_report,
    verify_eigen,
)
