"""
Solution families of the functional equation

    f(x**2 * R) = k / (2 x R) * f(x)

on either side of the fixed point 1/R of x -> x**2 R.

Every solution on x > 1/R ("right" branch) has the form

    f(x) = u**c * p(s) / (x R),    u = ln(xR),  s = log2(u),  c = log2(k/2),

with p of period 1; on 0 < x < 1/R ("left" branch) the same holds with
u = -ln(xR).  The map x -> x**2 R becomes the shift s -> s + 1.

Evaluation always goes through the pair (s, u) plus the factor 1/(xR).
Three entry points produce that pair:

* ``*_x``      absolute abscissa x (``evaluate``, ``derivative``, ``residual``)
* ``*_delta``  deviation delta = x - 1/R, accurate next to the boundary
* ``*_s``      the conjugacy coordinate s itself, accurate everywhere

All functions accept scalars or numpy arrays and return the same kind.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _kernels

LOG2E = 1.0 / math.log(2.0)

#: representable window of the conjugacy coordinate s
S_MIN = -60.0
S_MAX = 9.2


class DomainError(ValueError):
    """Argument outside the domain of a branch or of the equation."""


class WindowError(OverflowError):
    """Conjugacy coordinate outside [S_MIN, S_MAX]; the value is not representable."""


def _out(value, scalar):
    if scalar:
        return float(np.asarray(value).reshape(-1)[0])
    return value


def _as_array(v):
    arr = np.asarray(v, dtype=np.float64)
    return arr, arr.ndim == 0


def derive_c(k: float) -> float:
    """Return c = log2(k/2)."""
    if not k > 0:
        raise DomainError(f"k must be positive, got {k!r}")
    if k == 2.0:
        return 0.0
    return math.log2(k / 2.0)


@dataclass(frozen=True)
class EquationParams:
    R: float
    k: float
    c: float = field(init=False)

    def __post_init__(self):
        if not (self.R > 0 and math.isfinite(self.R)):
            raise DomainError(f"R must be positive and finite, got {self.R!r}")
        if not (self.k > 0 and math.isfinite(self.k)):
            raise DomainError(f"k must be positive and finite, got {self.k!r}")
        object.__setattr__(self, "R", float(self.R))
        object.__setattr__(self, "k", float(self.k))
        object.__setattr__(self, "c", derive_c(self.k))

    @property
    def boundary(self) -> float:
        """The fixed point 1/R."""
        return 1.0 / self.R


class Branch(enum.Enum):
    RIGHT = "right"
    LEFT = "left"

    @property
    def sign(self) -> int:
        return 1 if self is Branch.RIGHT else -1


@dataclass(frozen=True)
class PeriodicMap:
    """Period-1 trigonometric polynomial

        p(s) = a0 + sum_j a_j cos(2 pi j s) + b_j sin(2 pi j s),  j = 1..d.
    """

    a0: float
    harmonics: tuple = ()

    def __post_init__(self):
        pairs = tuple((float(a), float(b)) for a, b in self.harmonics)
        vals = [self.a0] + [v for pair in pairs for v in pair]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("PeriodicMap coefficients must be finite")
        object.__setattr__(self, "a0", float(self.a0))
        object.__setattr__(self, "harmonics", pairs)

    @classmethod
    def constant(cls, value: float) -> "PeriodicMap":
        return cls(value)

    @classmethod
    def from_arrays(cls, a0: float, a: Iterable[float], b: Iterable[float]) -> "PeriodicMap":
        return cls(a0, tuple(zip(a, b)))

    @property
    def degree(self) -> int:
        return len(self.harmonics)

    @cached_property
    def _a(self) -> np.ndarray:
        return np.array([h[0] for h in self.harmonics], dtype=np.float64)

    @cached_property
    def _b(self) -> np.ndarray:
        return np.array([h[1] for h in self.harmonics], dtype=np.float64)

    @cached_property
    def _amplitudes(self) -> np.ndarray:
        return np.hypot(self._a, self._b)

    def values(self, s):
        """Return (p(s), p'(s))."""
        arr, scalar = _as_array(s)
        p, dp = _kernels.fourier_eval(arr, self.a0, self._a, self._b)
        return _out(p, scalar), _out(dp, scalar)

    def __call__(self, s):
        return self.values(s)[0]

    def derivative(self, s):
        return self.values(s)[1]

    @property
    def is_constant(self) -> bool:
        return not any(a or b for a, b in self.harmonics)

    @property
    def is_zero(self) -> bool:
        return self.is_constant and self.a0 == 0.0

    def lower_bound(self) -> float:
        """a0 - sum_j |(a_j, b_j)|, a guaranteed lower bound of p."""
        return self.a0 - float(self._amplitudes.sum())

    def upper_bound(self) -> float:
        return self.a0 + float(self._amplitudes.sum())

    def upper_deriv_bound(self) -> float:
        """2 pi sum_j j |(a_j, b_j)|, a guaranteed upper bound of |p'|."""
        j = np.arange(1, self.degree + 1)
        return float(2.0 * math.pi * (j * self._amplitudes).sum())

    def scaled(self, factor: float) -> "PeriodicMap":
        return PeriodicMap(factor * self.a0, tuple((factor * a, factor * b) for a, b in self.harmonics))

    def __neg__(self) -> "PeriodicMap":
        return self.scaled(-1.0)

    def __add__(self, other: "PeriodicMap") -> "PeriodicMap":
        if not isinstance(other, PeriodicMap):
            return NotImplemented
        d = max(self.degree, other.degree)
        pad = lambda h: list(h) + [(0.0, 0.0)] * (d - len(h))  # noqa: E731
        pairs = tuple((a1 + a2, b1 + b2) for (a1, b1), (a2, b2) in zip(pad(self.harmonics), pad(other.harmonics)))
        return PeriodicMap(self.a0 + other.a0, pairs)


ONE = PeriodicMap(1.0)


@dataclass(frozen=True)
class BranchSolution:
    params: EquationParams
    p: PeriodicMap = ONE
    branch: Branch = Branch.RIGHT


# ---------------------------------------------------------------------------
# coordinates
# ---------------------------------------------------------------------------


def _check_window(s):
    if np.any(np.isnan(s)):
        raise WindowError("conjugacy coordinate is NaN")
    if np.any(s > S_MAX) or np.any(s < S_MIN):
        raise WindowError(f"conjugacy coordinate outside [{S_MIN}, {S_MAX}]")


def _log_abs_xR(params, branch, x):
    """u = |ln(xR)| for x on the given branch, computed through log1p."""
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("x must be positive and finite")
    y = x * params.R
    with np.errstate(divide="ignore", invalid="ignore"):
        near = np.abs(y - 1.0) < 0.5
        u = np.where(near, np.log1p(y - 1.0), np.log(y))
    if branch is Branch.RIGHT:
        if np.any(y <= 1.0):
            raise DomainError("right branch needs x > 1/R")
        return u
    if np.any(y >= 1.0):
        raise DomainError("left branch needs 0 < x < 1/R")
    return -u


def _log_abs_delta(params, branch, delta):
    if np.any(~np.isfinite(delta)):
        raise DomainError("delta must be finite")
    d = delta * params.R
    if branch is Branch.RIGHT:
        if np.any(d <= 0):
            raise DomainError("right branch needs delta > 0")
        return np.log1p(d)
    if np.any(d >= 0) or np.any(d <= -1.0):
        raise DomainError("left branch needs -1/R < delta < 0")
    return -np.log1p(d)


def _s_of_u(u):
    with np.errstate(divide="ignore"):
        s = np.log2(u)
    _check_window(s)
    return s


def x_to_s(params: EquationParams, branch: Branch, x):
    """log2(+-ln(xR)) for x on the branch."""
    arr, scalar = _as_array(x)
    return _out(_s_of_u(_log_abs_xR(params, branch, arr)), scalar)


def delta_to_s(params: EquationParams, branch: Branch, delta):
    arr, scalar = _as_array(delta)
    return _out(_s_of_u(_log_abs_delta(params, branch, arr)), scalar)


def s_to_x(params: EquationParams, branch: Branch, s):
    """exp(+-2**s) / R."""
    arr, scalar = _as_array(s)
    _check_window(arr)
    return _out(np.exp(branch.sign * np.exp2(arr)) / params.R, scalar)


def s_to_delta(params: EquationParams, branch: Branch, s):
    """x - 1/R for the point with coordinate s.

    Accurate near the boundary; on the left branch far from it the result
    approaches -1/R and loses relative precision in x.
    """
    arr, scalar = _as_array(s)
    _check_window(arr)
    return _out(np.expm1(branch.sign * np.exp2(arr)) / params.R, scalar)


# ---------------------------------------------------------------------------
# evaluation kernels on (s, u, 1/(xR))
# ---------------------------------------------------------------------------


def _value(sol, s, u, inv_xR):
    p = sol.p(s)
    return np.power(u, sol.params.c) * p * inv_xR


def _slope(sol, s, u, inv_xR):
    c = sol.params.c
    p, dp = sol.p.values(s)
    sigma = sol.branch.sign
    bracket = (c - sigma * u) * p + LOG2E * dp
    with np.errstate(over="ignore", invalid="ignore"):
        out = sigma * np.power(u, c - 1.0) * sol.params.R * inv_xR * inv_xR * bracket
    if not np.all(np.isfinite(out)):
        raise WindowError("derivative not representable in binary64 at this point")
    return out


def _point_x(sol, x):
    u = _log_abs_xR(sol.params, sol.branch, x)
    return _s_of_u(u), u, 1.0 / (x * sol.params.R)


def _point_delta(sol, delta):
    u = _log_abs_delta(sol.params, sol.branch, delta)
    return _s_of_u(u), u, 1.0 / (1.0 + delta * sol.params.R)


def _point_s(sol, s):
    _check_window(s)
    u = np.exp2(s)
    return s, u, np.exp(-sol.branch.sign * u)


def evaluate(sol: BranchSolution, x):
    """f(x) for the branch solution."""
    arr, scalar = _as_array(x)
    return _out(_value(sol, *_point_x(sol, arr)), scalar)


def evaluate_delta(sol: BranchSolution, delta):
    """f(1/R + delta), with ln(xR) taken as log1p(delta R)."""
    arr, scalar = _as_array(delta)
    return _out(_value(sol, *_point_delta(sol, arr)), scalar)


def evaluate_s(sol: BranchSolution, s):
    """f at the point whose conjugacy coordinate is s."""
    arr, scalar = _as_array(s)
    return _out(_value(sol, *_point_s(sol, arr)), scalar)


def derivative(sol: BranchSolution, x):
    """Closed-form f'(x).

    Right branch::

        f' = u**(c-1) / (x**2 R) * ((c - u) p(s) + log2(e) p'(s))

    Left branch (u = -ln(xR))::

        f' = -u**(c-1) / (x**2 R) * ((c + u) p(s) + log2(e) p'(s))
    """
    arr, scalar = _as_array(x)
    return _out(_slope(sol, *_point_x(sol, arr)), scalar)


def derivative_delta(sol: BranchSolution, delta):
    arr, scalar = _as_array(delta)
    return _out(_slope(sol, *_point_delta(sol, arr)), scalar)


def derivative_s(sol: BranchSolution, s):
    arr, scalar = _as_array(s)
    return _out(_slope(sol, *_point_s(sol, arr)), scalar)


def eval_phi(params: EquationParams, x):
    """The special solution (ln(xR))**c / (xR) on x > 1/R."""
    return evaluate(BranchSolution(params, ONE, Branch.RIGHT), x)


def residual(sol: BranchSolution, x):
    """f(x**2 R) - k/(2xR) f(x)."""
    arr, scalar = _as_array(x)
    R, k = sol.params.R, sol.params.k
    lhs = _value(sol, *_point_x(sol, arr * arr * R))
    rhs = k / (2.0 * arr * R) * _value(sol, *_point_x(sol, arr))
    return _out(lhs - rhs, scalar)


def residual_pulled_back(sol: BranchSolution, x):
    """(2xR/k) f(x**2 R) - f(x): the residual carried back to the scale of f(x).

    Vanishes exactly when :func:`residual` does.  On the left branch
    f(x**2 R) exceeds f(x) by the factor k/(2xR), so this form is the one
    to compare against a tolerance relative to |f(x)|.
    """
    arr, scalar = _as_array(x)
    R, k = sol.params.R, sol.params.k
    lhs = _value(sol, *_point_x(sol, arr * arr * R))
    return _out(2.0 * arr * R / k * lhs - _value(sol, *_point_x(sol, arr)), scalar)


def residual_delta(sol: BranchSolution, delta):
    """Residual at x = 1/R + delta; x**2 R maps to delta * (2 + delta R)."""
    arr, scalar = _as_array(delta)
    R, k = sol.params.R, sol.params.k
    lhs = _value(sol, *_point_delta(sol, arr * (2.0 + arr * R)))
    rhs = k / (2.0 * (1.0 + arr * R)) * _value(sol, *_point_delta(sol, arr))
    return _out(lhs - rhs, scalar)


def residual_s(sol: BranchSolution, s):
    """Residual at the point with coordinate s; x**2 R has coordinate s + 1."""
    arr, scalar = _as_array(s)
    s0, u0, inv0 = _point_s(sol, arr)
    lhs = _value(sol, *_point_s(sol, arr + 1.0))
    rhs = 0.5 * sol.params.k * inv0 * _value(sol, s0, u0, inv0)
    return _out(lhs - rhs, scalar)


def reconstruct_p(f: Callable, params: EquationParams, s):
    """Recover the periodic modulation from a right-branch solution f:

        p(s) = (2/k)**s * exp(2**s) * f(exp(2**s) / R)
    """
    arr, scalar = _as_array(s)
    _check_window(arr)
    e = np.exp(np.exp2(arr))
    if not np.all(np.isfinite(e)):
        raise WindowError("exp(2**s) overflows")
    fx = np.asarray(f(_out(e / params.R, scalar)), dtype=np.float64)
    return _out(np.exp2(-params.c * arr) * e * fx, scalar)
