"""Solution families of f(x^2 R) = k/(2xR) f(x) and their regularity at 1/R."""

from ._kernels import backend
from .analysis import (
    ContinuityKind,
    ContinuityVerdict,
    GluedSolution,
    MonotoneKind,
    MonotonicityVerdict,
    NotC1Reason,
    OdeResult,
    OdeSpec,
    PreconditionError,
    ProbeRow,
    Regime,
    SearchFailure,
    SmoothnessKind,
    SmoothnessVerdict,
    Witness,
    boundary_probe,
    boundary_slopes,
    classify_continuity,
    classify_regime,
    classify_smoothness,
    eval_glued,
    eval_glued_delta,
    find_nonmonotone_witness,
    glue,
    monotone_sufficient,
    ode_closed_form_defect,
    ode_flow,
    ode_flow_batch,
    origin_probe,
)
from .core import (
    S_MAX,
    S_MIN,
    Branch,
    BranchSolution,
    DomainError,
    EquationParams,
    PeriodicMap,
    WindowError,
    delta_to_s,
    derivative,
    derivative_delta,
    derivative_s,
    derive_c,
    eval_phi,
    evaluate,
    evaluate_delta,
    evaluate_s,
    reconstruct_p,
    residual,
    residual_delta,
    residual_pulled_back,
    residual_s,
    s_to_delta,
    s_to_x,
    x_to_s,
)
from .sweeps import VerificationReport, run_suite

__version__ = "0.1.0"
