"""
Regime classification and executable forms of the monotonicity, boundary
continuity and C1 results for the solution families in :mod:`funceq.core`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .core import (
    LOG2E,
    S_MIN,
    Branch,
    BranchSolution,
    DomainError,
    EquationParams,
    PeriodicMap,
    WindowError,
    derivative_delta,
    evaluate,
    evaluate_delta,
    s_to_x,
)

LN2 = math.log(2.0)

DEFAULT_LADDER = tuple(10.0 ** -m for m in range(3, 13))


class PreconditionError(ValueError):
    """Inputs are valid values but outside the regime an operation covers."""


class SearchFailure(RuntimeError):
    """The witness search ran out of s-window; indicates a numerical problem."""


class Regime(enum.Enum):
    SUBCRITICAL = "Subcritical"  # k < 2
    CRITICAL = "Critical"  # k = 2
    SUPERCRITICAL_RIGID = "SupercriticalRigid"  # 2 < k <= 4
    SUPERCRITICAL_FLEXIBLE = "SupercriticalFlexible"  # k > 4


def classify_regime(k: float) -> Regime:
    if not k > 0:
        raise DomainError(f"k must be positive, got {k!r}")
    if k < 2.0:
        return Regime.SUBCRITICAL
    if k == 2.0:
        return Regime.CRITICAL
    if k <= 4.0:
        return Regime.SUPERCRITICAL_RIGID
    return Regime.SUPERCRITICAL_FLEXIBLE


# ---------------------------------------------------------------------------
# monotonicity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """x_low < x_high with f(x_low) < f(x_high): f is not decreasing."""

    x_low: float
    x_high: float
    f_low: float
    f_high: float
    phase_low: float
    phase_high: float
    p_low: float
    p_high: float
    shift: int

    def verify(self, sol: BranchSolution) -> bool:
        return self.x_low < self.x_high and evaluate(sol, self.x_high) > evaluate(sol, self.x_low)

    def to_dict(self) -> dict:
        return asdict(self)


class MonotoneKind(enum.Enum):
    DECREASING_CERTIFIED = "MonotoneDecreasingCertified"
    INCREASING_CERTIFIED = "MonotoneIncreasingCertified"
    NOT_MONOTONE = "NotMonotone"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class MonotonicityVerdict:
    kind: MonotoneKind
    witness: Optional[Witness] = None


def monotone_sufficient(params: EquationParams, p: PeriodicMap) -> MonotonicityVerdict:
    """Certify monotonicity of the right-branch solution for k < 2.

    With c < 0 and ln(xR) > 0 the bracket of f' is bounded by
    c * inf p + log2(e) * sup|p'|, so ``sup|p'| < ln2 |c| inf p`` forces
    f' < 0.  The coefficient bounds of ``p`` are used for inf p and sup|p'|.
    """
    if not params.c < 0:
        raise PreconditionError("sufficient monotonicity bound needs k < 2")
    dbound = p.upper_deriv_bound()
    lo, hi = p.lower_bound(), p.upper_bound()
    if lo > 0 and dbound < LN2 * abs(params.c) * lo:
        return MonotonicityVerdict(MonotoneKind.DECREASING_CERTIFIED)
    if hi < 0 and dbound < LN2 * abs(params.c) * abs(hi):
        return MonotonicityVerdict(MonotoneKind.INCREASING_CERTIFIED)
    return MonotonicityVerdict(MonotoneKind.INCONCLUSIVE)


_PHASE_GRID = 1024
_REFINE_STEPS = 40


def _refine_extremum(p: PeriodicMap, s0: float, maximum: bool) -> float:
    h = 1.0 / _PHASE_GRID
    lo, hi = s0 - h, s0 + h
    sign = 1.0 if maximum else -1.0
    # an interior extremum has sign*p' >= 0 on the left and <= 0 on the right
    if not (sign * p.derivative(lo) >= 0.0 >= sign * p.derivative(hi)):
        return s0 % 1.0
    for _ in range(_REFINE_STEPS):
        mid = 0.5 * (lo + hi)
        if sign * p.derivative(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    best = max((lo, hi, s0), key=lambda t: sign * p(t))
    return best % 1.0


def extreme_phases(p: PeriodicMap):
    """Phases in [0, 1) where p attains its maximum and minimum."""
    grid = np.arange(_PHASE_GRID) / _PHASE_GRID
    vals = p(grid)
    s_max = _refine_extremum(p, float(grid[np.argmax(vals)]), True)
    s_min = _refine_extremum(p, float(grid[np.argmin(vals)]), False)
    return s_max, s_min


def find_nonmonotone_witness(params: EquationParams, p: PeriodicMap) -> Witness:
    """Exhibit x_low < x_high with f(x_low) < f(x_high) for k = 2, p non-constant.

    Phases s_M, s_m of the maximum M and minimum m of p are located on a grid
    and refined; the m-phase is taken in the period just below s_M.  Both are
    then pushed toward 1/R by integer shifts n, where f = p(s)/(xR) ~ p(s),
    until f(x_high) > f(x_low).
    """
    if params.k != 2.0:
        raise PreconditionError("witness construction needs k = 2")
    if p.is_constant:
        raise PreconditionError("witness construction needs a non-constant p")
    sol = BranchSolution(params, p, Branch.RIGHT)
    s_hi, s_lo = extreme_phases(p)
    p_hi, p_lo = p(s_hi), p(s_lo)
    if not p_hi > p_lo:
        raise SearchFailure("could not separate the extreme values of p")
    if s_lo >= s_hi:
        s_lo -= 1.0
    n = 0
    while s_lo - n >= S_MIN:
        x_high = s_to_x(params, Branch.RIGHT, s_hi - n)
        x_low = s_to_x(params, Branch.RIGHT, s_lo - n)
        if x_low < x_high:
            f_high = evaluate(sol, x_high)
            f_low = evaluate(sol, x_low)
            if f_high > f_low:
                return Witness(x_low, x_high, f_low, f_high, s_lo % 1.0, s_hi, p_lo, p_hi, n)
        n += 1
    raise SearchFailure("s-window exhausted before a witness was found")


# ---------------------------------------------------------------------------
# continuity at 1/R and gluing
# ---------------------------------------------------------------------------


class ContinuityKind(enum.Enum):
    EXTENSIBLE_WITH_ZERO = "ExtensibleWithZero"
    EXTENSIBLE_CONSTANT = "ExtensibleConstant"
    NOT_EXTENSIBLE = "NotExtensible"


@dataclass(frozen=True)
class ContinuityVerdict:
    kind: ContinuityKind
    boundary_value: Optional[float] = None


def classify_continuity(params: EquationParams, p: PeriodicMap) -> ContinuityVerdict:
    if params.k > 2.0:
        return ContinuityVerdict(ContinuityKind.EXTENSIBLE_WITH_ZERO, 0.0)
    if params.k == 2.0:
        if p.is_constant:
            return ContinuityVerdict(ContinuityKind.EXTENSIBLE_CONSTANT, p.a0)
        return ContinuityVerdict(ContinuityKind.NOT_EXTENSIBLE)
    if p.is_zero:
        return ContinuityVerdict(ContinuityKind.EXTENSIBLE_WITH_ZERO, 0.0)
    return ContinuityVerdict(ContinuityKind.NOT_EXTENSIBLE)


@dataclass(frozen=True)
class GluedSolution:
    params: EquationParams
    p_left: PeriodicMap
    p_right: PeriodicMap
    boundary_value: float

    @cached_property
    def left(self) -> BranchSolution:
        return BranchSolution(self.params, self.p_left, Branch.LEFT)

    @cached_property
    def right(self) -> BranchSolution:
        return BranchSolution(self.params, self.p_right, Branch.RIGHT)


def glue(params: EquationParams, p_left: PeriodicMap, p_right: PeriodicMap) -> GluedSolution:
    """Paste the left and right branch solutions into one continuous solution on (0, inf)."""
    if params.k > 2.0:
        return GluedSolution(params, p_left, p_right, 0.0)
    if params.k < 2.0:
        raise PreconditionError("no continuous gluing for k < 2")
    if not (p_left.is_constant and p_right.is_constant and p_left.a0 == p_right.a0):
        raise PreconditionError("k = 2 gluing needs p_left = p_right = constant")
    return GluedSolution(params, p_left, p_right, p_right.a0)


def _glued(g, d, right_fn, left_fn):
    arr = np.asarray(d, dtype=np.float64)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.full(arr.shape, g.boundary_value)
    pos, neg = arr > 0, arr < 0
    if pos.any():
        out[pos] = right_fn(g.right, arr[pos])
    if neg.any():
        out[neg] = left_fn(g.left, arr[neg])
    return float(out[0]) if scalar else out


def eval_glued_delta(g: GluedSolution, delta):
    """Glued solution at x = 1/R + delta."""
    return _glued(g, delta, evaluate_delta, evaluate_delta)


def eval_glued(g: GluedSolution, x):
    arr = np.asarray(x, dtype=np.float64)
    if np.any(arr <= 0):
        raise DomainError("x must be positive")
    R = g.params.R
    xR = np.atleast_1d(arr * R)
    out = np.full(xR.shape, g.boundary_value)
    xs = np.atleast_1d(arr)
    if (xR > 1).any():
        out[xR > 1] = evaluate(g.right, xs[xR > 1])
    if (xR < 1).any():
        out[xR < 1] = evaluate(g.left, xs[xR < 1])
    return float(out[0]) if arr.ndim == 0 else out


# ---------------------------------------------------------------------------
# continuous differentiability at 1/R
# ---------------------------------------------------------------------------


class SmoothnessKind(enum.Enum):
    C1 = "C1WithDerivative"
    NOT_C1 = "NotC1"


class NotC1Reason(enum.Enum):
    DIVERGENT = "DivergentDerivative"
    OSCILLATING = "OscillatingDerivative"
    MISMATCH = "LeftRightMismatch"


@dataclass(frozen=True)
class SmoothnessVerdict:
    kind: SmoothnessKind
    derivative: Optional[float] = None
    reason: Optional[NotC1Reason] = None
    L: Optional[float] = None  # limit of the right-branch bracket, when it exists

    def to_dict(self) -> dict:
        return {
            "verdict": self.kind.value,
            "derivative_at_boundary": self.derivative,
            "reason": None if self.reason is None else self.reason.value,
            "L": self.L,
        }


def classify_smoothness(params: EquationParams, p_right: PeriodicMap, p_left: PeriodicMap) -> SmoothnessVerdict:
    """C1 status at 1/R of the k > 2 solution glued from p_left and p_right.

    Near 1/R the right-branch slope is u**(c-1) R (c p + log2(e) p') up to
    vanishing terms, and the left one is -u**(c-1) R (c q + log2(e) q').
    """
    c = params.c
    if not params.k > 2.0:
        raise PreconditionError("smoothness classification needs k > 2")
    L = c * p_right.a0 if p_right.is_constant else None
    if c > 1.0:
        return SmoothnessVerdict(SmoothnessKind.C1, 0.0, L=L)
    if not (p_right.is_constant and p_left.is_constant):
        return SmoothnessVerdict(SmoothnessKind.NOT_C1, reason=NotC1Reason.OSCILLATING, L=L)
    lam, mu = p_right.a0, p_left.a0
    if c < 1.0:
        if lam == 0.0 and mu == 0.0:
            return SmoothnessVerdict(SmoothnessKind.C1, 0.0, L=0.0)
        return SmoothnessVerdict(SmoothnessKind.NOT_C1, reason=NotC1Reason.DIVERGENT, L=L)
    # c == 1: right slope -> R lam, left slope -> -R mu
    if mu == -lam:
        return SmoothnessVerdict(SmoothnessKind.C1, params.R * lam, L=L)
    return SmoothnessVerdict(SmoothnessKind.NOT_C1, reason=NotC1Reason.MISMATCH, L=L)


@dataclass(frozen=True)
class OdeSpec:
    """p' + c/log2(e) p = L/log2(e) started from p(0) = p0."""

    c: float
    L: float
    p0: float
    step: float = 1e-3


@dataclass(frozen=True)
class OdeResult:
    p_at_1: float
    periodicity_defect: float


def ode_closed_form_defect(c: float, L: float, p0: float) -> float:
    return (p0 - L / c) * (2.0 ** (-c) - 1.0)


def ode_flow(spec: OdeSpec) -> OdeResult:
    """Integrate the periodicity ODE over one period with classical RK4."""
    if not spec.step > 0:
        raise DomainError("step must be positive")
    if spec.c == 0:
        raise DomainError("c must be nonzero")
    p1 = float(_kernels.rk4_linear(np.array([spec.c]), np.array([spec.L]), np.array([spec.p0]), spec.step)[0])
    return OdeResult(p1, p1 - spec.p0)


def ode_flow_batch(c, L, p0, step: float = 1e-3) -> np.ndarray:
    """Periodicity defects p(1) - p(0) for arrays of (c, L, p0)."""
    if not step > 0:
        raise DomainError("step must be positive")
    c = np.asarray(c, dtype=np.float64)
    if np.any(c == 0):
        raise DomainError("c must be nonzero")
    return _kernels.rk4_linear(c, L, p0, step) - np.asarray(p0, dtype=np.float64)


# ---------------------------------------------------------------------------
# numerical probes near the boundary
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeRow:
    delta: float
    f: Optional[float]
    fd_slope: Optional[float]
    error: Optional[str] = None


def boundary_probe(g: GluedSolution, side: str, ladder: Sequence[float] = DEFAULT_LADDER) -> list:
    """Sample the glued solution at 1/R +- delta.

    ``fd_slope`` is the secant (f(1/R +- delta) - f(1/R)) / (+-delta), the
    one-sided difference quotient at the boundary.  Points outside the
    s-window are reported with ``error`` set instead of raising.
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    ladder = [float(d) for d in ladder]
    if any(d <= 0 for d in ladder) or any(b >= a for a, b in zip(ladder, ladder[1:])):
        raise ValueError("ladder must be positive and strictly decreasing")
    sgn = 1.0 if side == "right" else -1.0
    rows = []
    for d in ladder:
        try:
            f = eval_glued_delta(g, sgn * d)
        except (WindowError, DomainError) as exc:
            rows.append(ProbeRow(d, None, None, str(exc)))
            continue
        rows.append(ProbeRow(d, f, (f - g.boundary_value) / (sgn * d)))
    return rows


def boundary_slopes(g: GluedSolution, side: str, ladder: Sequence[float] = DEFAULT_LADDER) -> np.ndarray:
    """Closed-form f' at 1/R +- delta, for comparison with the probe secants."""
    sgn = 1.0 if side == "right" else -1.0
    sol = g.right if side == "right" else g.left
    return derivative_delta(sol, sgn * np.asarray(ladder, dtype=np.float64))


def origin_probe(g: GluedSolution, ladder: Sequence[float] = DEFAULT_LADDER) -> list:
    """Values of the glued solution at x = delta -> 0+ (data only, no claim)."""
    rows = []
    for d in ladder:
        if d >= g.params.boundary:
            rows.append(ProbeRow(d, None, None, "delta not inside (0, 1/R)"))
            continue
        try:
            rows.append(ProbeRow(d, eval_glued(g, d), None))
        except (WindowError, DomainError) as exc:
            rows.append(ProbeRow(d, None, None, str(exc)))
    return rows
