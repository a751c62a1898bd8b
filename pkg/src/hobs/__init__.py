"""hobs: a finite-dimensional workbench for hidden observable functions.

For any Hermitian operator the package builds real functions on
(ray, parameter) pairs whose per-line moments reproduce the operator's
expectation values, and for any density matrix it builds ray mixtures
whose classical means reproduce operator traces:

    Trace[b(T) D] = mean of b(f) against the mixture

exactly as finite sums and statistically by seeded Monte Carlo.  The
contexts module packages commuting families as function algebras over
one generator and hunts second-moment witnesses for non-commuting
pairs.
"""

from .errors import (
    ArityError,
    DegeneracyResolutionFailure,
    DimensionMismatch,
    EigensolverFailure,
    EvaluationError,
    ExprSyntaxError,
    HermiticityViolation,
    HobsError,
    IndexOutOfRange,
    NaNInput,
    NonQuadraticFirstMoment,
    NonSquareError,
    NotAProjector,
    NotCommuting,
    NotOrthogonalFamily,
    ZeroInput,
)
from .expr import BorelExpr, compose, format_expr, identity, interval_bound, parse
from .intervals import Interval, IntervalUnion
from .spectral import (
    DensityMatrix,
    HermitianOperator,
    SpectralDecomposition,
    StateVector,
    apply_borel,
    commutator_norm,
    commutes,
    expectation,
    spectral_decompose,
    spectral_projector,
    trace_expectation,
    validate_hermitian,
)
from .kernel import (
    GammaModel,
    HiddenObservable,
    HiddenPoint,
    HiddenProposition,
    LineSteps,
    SharedParameterSum,
    build_hidden_observable,
    cdf,
    draw_u,
    evaluate,
    gamma_from_complex,
    line_integral_exact,
    line_mean,
    line_weights,
    merge_distribution,
    moments_check,
    orthodoxy_reconstruct,
    orthodoxy_second_moment_gap,
    proposition_from_projector,
    proposition_measure_on_line,
    pushforward_ks,
    quantile,
    random_ray,
    spectral_support_check,
    statistical_equivalence_check,
)
from .mixed import (
    Ensemble,
    HiddenMixedState,
    McEstimate,
    SampleStream,
    density_from_ensemble,
    dump_samples_csv,
    ensemble_from_density,
    exact_classical_mean,
    hidden_state_measure,
    mc_estimate,
    sample_hidden,
)
from .contexts import (
    SHARED_U_CAVEAT,
    Context,
    ContextMember,
    HomomorphismReport,
    NogoReport,
    PartitionContext,
    TransferredObservable,
    context_combine,
    context_observable,
    homomorphism_check,
    joint_diagonalize,
    make_partition_context,
    nogo_witness,
    partition_context,
)

__version__ = "0.1.0"
