"""Exact-arithmetic tools for the (M,K)-reduced non-autonomous discrete
periodic KP lattice: evolution, monodromy matrices, spectral curves, the
band/companion dual form, floating-point local diagnostics and the
large-parameter degeneration harness."""

from .bipoly import BiPoly, bipoly_eval
from .degeneration import (
    ConvergenceTable,
    DegenerationPlan,
    hidden_invariant_check,
    lambda_set,
    limit_compare,
    seed_large_zeta,
    xi_set,
)
from .errors import (
    DegenerateEvolution,
    EmptyIndexSet,
    ExactDivisionError,
    GcdViolation,
    IllConditioned,
    InsufficientHistory,
    LeibnizGuard,
    MultipleEigenvalue,
    NonPolynomialResult,
    NotCaseB,
    RedkpError,
    SingularStep,
    SizeMismatch,
    WordGuard,
    WrongParams,
    ZeroValue,
)
from .lattice import (
    LatticeParams,
    LatticeState,
    Slice,
    classify_case,
    evolve_to,
    monodromy_closure,
    new_state,
    site_invariants,
    step,
    uniform_state,
)
from .lax import (
    SpecialPoints,
    SpectralCurve,
    apply_shift,
    build_factor,
    build_monodromy,
    shift_matrix,
    special_points,
    spectral_curve,
    verify_compatibility,
)
from .numeric import (
    ComplexPoint,
    NumericDiag,
    Tolerances,
    case_b_structure,
    eigenvector_at,
    fiber_x,
    infinity_asymptotics,
    psi_phi_ratios,
    special_point_kernels,
)
from .polymatrix import PolyMatrix, matdet
from .rational import Rational, format_rational, parse_rational, rat
from .yform import (
    BandCoefficients,
    band_coefficients,
    build_companions,
    build_shift_stars,
    shift_stars,
    spectral_duality,
    verify_word_append_rule,
)

__version__ = "0.1.0"
