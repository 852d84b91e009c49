"""Finite-size Lanczos coefficients, autocorrelation plateaus and their scaling.

The package computes Lanczos coefficients b_n for local observables of
spin chains (standard and fully reorthogonalised recursions over the Pauli
operator space), reconstructs autocorrelation functions and infinite-time
plateaus from the tridiagonal Liouvillian, cross-checks everything against
dense exact diagonalisation, and runs the rate/cumulative-product/fit/
collapse analysis that discriminates hydrodynamic decay, vanishing
plateaus, and (approximate) zero modes.
"""

from .analysis import (
    AsymptoticFamily,
    BiexpFit,
    CumulativeProduct,
    RateSequence,
    asymptotic_regime_check,
    biexp_fit,
    classify_convergence,
    collapse_curve,
    cumulative_product,
    detect_nstar,
    lgamma_estimate,
    rates,
    synthetic_bn,
)
from .config import RunConfig
from .ed import autocorrelation_ed, dense_spectrum, plateau_ed
from .krylov import (
    KrylovBasis,
    LanczosResult,
    build_sector,
    lanczos_fo,
    lanczos_sa,
    orthogonality_report,
)
from .models import (
    ObservableSpec,
    SpinChainModel,
    build_edge_mode_tfim,
    build_ising,
    build_zero_mode_chain,
    moment_overlap_order,
    observable,
)
from .pauli import (
    OperatorVector,
    PauliString,
    TerminationSignal,
    add,
    apply_liouvillian,
    commutator_term,
    inner_product,
    multiply,
    normalize,
    operator_product,
    prune,
    scale,
)
from .spectral import (
    PlateauEstimate,
    TridiagonalLiouvillian,
    ZeroMode,
    autocorrelation_from_b,
    plateau_from_b,
    spectral_density,
    zero_mode,
)

__version__ = "0.1.0"
