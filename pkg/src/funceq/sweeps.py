"""
Seeded randomized verification sweeps.

Every suite draws its cases from ``numpy.random.default_rng(seed)`` in a
fixed order, so one seed always reproduces the same report.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .analysis import find_nonmonotone_witness, ode_closed_form_defect, ode_flow_batch
from .core import (
    Branch,
    BranchSolution,
    EquationParams,
    PeriodicMap,
    derivative,
    derivative_delta,
    evaluate,
    evaluate_delta,
    evaluate_s,
    reconstruct_p,
    residual,
    s_to_delta,
    s_to_x,
)

SUITES = ("residual", "roundtrip", "derivative", "linearity", "witness", "ode")

R_RANGE = (0.1, 10.0)
K_RANGE = (0.5, 8.0)
MAX_DEGREE = 4
S_RANGE = (-10.0, 8.0)
DERIV_S_RANGE = (-5.0, 5.0)
FD_REL_STEP = 1e-5


@dataclass
class VerificationReport:
    suite: str
    trials: int
    seed: int
    tol: float
    worst_error: float
    worst_inputs: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.worst_error <= self.tol

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "trials": self.trials,
            "seed": self.seed,
            "tol": self.tol,
            "worst_error": self.worst_error,
            "worst_inputs": self.worst_inputs,
            "pass": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def random_periodic(rng, degree=None, nonconstant=False) -> PeriodicMap:
    if degree is None:
        degree = int(rng.integers(1 if nonconstant else 0, MAX_DEGREE + 1))
    a0 = rng.uniform(-1.0, 1.0)
    a = rng.uniform(-1.0, 1.0, degree)
    b = rng.uniform(-1.0, 1.0, degree)
    return PeriodicMap.from_arrays(a0, a, b)


def random_params(rng, k=None) -> EquationParams:
    R = rng.uniform(*R_RANGE)
    if k is None:
        k = rng.uniform(*K_RANGE)
    return EquationParams(R, k)


def random_branch(rng) -> Branch:
    return Branch.RIGHT if rng.random() < 0.5 else Branch.LEFT


def _case(sol: BranchSolution, **extra) -> dict:
    out = {
        "R": sol.params.R,
        "k": sol.params.k,
        "branch": sol.branch.value,
        "a0": sol.p.a0,
        "harmonics": [list(h) for h in sol.p.harmonics],
    }
    out.update(extra)
    return out


def central_difference(sol: BranchSolution, s: float, rel_step: float = FD_REL_STEP):
    """Central-difference estimate of f' at the point with coordinate s.

    Returns ``(fd, exact)``.  Near 1/R (|ln xR| < 1/2) the point is handled as
    delta = x - 1/R so the two stencil points keep full precision.  The step
    is ``rel_step * x * min(|ln xR|, 1)``, proportional to the length over
    which p(s) changes by O(1).
    """
    u = 2.0**s
    if u < 0.5:
        d = s_to_delta(sol.params, sol.branch, s)
        x = sol.params.boundary + d
        h = rel_step * x * min(u, 1.0)
        fd = (evaluate_delta(sol, d + h) - evaluate_delta(sol, d - h)) / (2.0 * h)
        return fd, derivative_delta(sol, d)
    x = s_to_x(sol.params, sol.branch, s)
    h = rel_step * x * min(u, 1.0)
    fd = (evaluate(sol, x + h) - evaluate(sol, x - h)) / (2.0 * h)
    return fd, derivative(sol, x)


def _residual_suite(rng, trials):
    for _ in range(trials):
        sol = BranchSolution(random_params(rng), random_periodic(rng), random_branch(rng))
        s = rng.uniform(*S_RANGE)
        x = s_to_x(sol.params, sol.branch, s)
        f0 = evaluate(sol, x)
        f1 = evaluate_s(sol, s + 1.0)
        # scale by the larger side: on the left branch f(x^2 R) >> f(x)
        err = abs(residual(sol, x)) / (1.0 + max(abs(f0), abs(f1)))
        yield err, _case(sol, s=s, x=x)


def _roundtrip_suite(rng, trials, points=32):
    for _ in range(trials):
        sol = BranchSolution(random_params(rng), random_periodic(rng), Branch.RIGHT)
        s = rng.uniform(*S_RANGE, points)
        got = reconstruct_p(lambda x: evaluate(sol, x), sol.params, s)
        errs = np.abs(got - sol.p(s))
        i = int(np.argmax(errs))
        yield float(errs[i]), _case(sol, s=float(s[i]))


def _derivative_suite(rng, trials):
    for _ in range(trials):
        sol = BranchSolution(random_params(rng), random_periodic(rng), random_branch(rng))
        s = rng.uniform(*DERIV_S_RANGE)
        fd, exact = central_difference(sol, s)
        err = abs(fd - exact) / max(abs(exact), 1e-300)
        yield err, _case(sol, s=s, fd=fd, exact=exact)


def _linearity_suite(rng, trials):
    for _ in range(trials):
        params = random_params(rng)
        branch = random_branch(rng)
        p1, p2 = random_periodic(rng), random_periodic(rng)
        alpha, beta = rng.uniform(-2.0, 2.0, 2)
        s = rng.uniform(*S_RANGE)
        x = s_to_x(params, branch, s)
        f1 = evaluate(BranchSolution(params, p1, branch), x)
        f2 = evaluate(BranchSolution(params, p2, branch), x)
        sol = BranchSolution(params, p1.scaled(alpha) + p2.scaled(beta), branch)
        combo = evaluate(sol, x)
        scale = abs(alpha * f1) + abs(beta * f2)
        err = abs(combo - (alpha * f1 + beta * f2)) / scale if scale > 0 else abs(combo)
        yield err, _case(sol, s=s, alpha=alpha, beta=beta)


def _witness_suite(rng, trials):
    for _ in range(trials):
        params = random_params(rng, k=2.0)
        p = random_periodic(rng, nonconstant=True)
        sol = BranchSolution(params, p, Branch.RIGHT)
        w = find_nonmonotone_witness(params, p)
        err = 0.0 if w.verify(sol) else 1.0
        yield err, _case(sol, x_low=w.x_low, x_high=w.x_high)


def _ode_suite(rng, trials, step=1e-3):
    c = rng.uniform(0.1, 2.0, trials)
    L = rng.uniform(-2.0, 2.0, trials)
    p0 = rng.uniform(-2.0, 2.0, trials)
    # every other case starts on the constant solution p0 = L/c
    p0[::2] = L[::2] / c[::2]
    got = ode_flow_batch(c, L, p0, step)
    for i in range(trials):
        expect = ode_closed_form_defect(c[i], L[i], p0[i])
        yield abs(got[i] - expect), {"c": c[i], "L": L[i], "p0": p0[i], "step": step}


_RUNNERS = {
    "residual": _residual_suite,
    "roundtrip": _roundtrip_suite,
    "derivative": _derivative_suite,
    "linearity": _linearity_suite,
    "witness": _witness_suite,
    "ode": _ode_suite,
}


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def run_suite(name: str, trials: int, seed: int, tol: float) -> VerificationReport:
    """Run one named invariant over ``trials`` seeded random cases."""
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if trials <= 0:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(seed)
    worst, worst_inputs = -math.inf, {}
    for i, (err, inputs) in enumerate(_RUNNERS[name](rng, trials)):
        if math.isnan(worst):
            break
        if math.isnan(err) or err > worst:
            worst, worst_inputs = err, {"trial": i, **inputs}
    worst_inputs = {k: _plain(v) for k, v in worst_inputs.items()}
    return VerificationReport(name, trials, seed, tol, float(worst), worst_inputs)
