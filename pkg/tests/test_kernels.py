import math
import os
import subprocess
import sys

import numpy as np
import pytest

from funceq import _kernels as K


def _coeffs(rng, d):
    return rng.uniform(-1, 1), rng.uniform(-1, 1, d), rng.uniform(-1, 1, d)


@pytest.mark.skipif(not K.NUMBA_AVAILABLE, reason="numba not installed")
@pytest.mark.parametrize("degree", [0, 1, 4, 9])
def test_fourier_numba_matches_numpy(degree):
    rng = np.random.default_rng(degree)
    a0, a, b = _coeffs(rng, degree)
    s = rng.uniform(-50, 50, 2000)
    p1, d1 = K.fourier_eval_numba(s, a0, a, b)
    p2, d2 = K.fourier_eval_numpy(s, a0, a, b)
    np.testing.assert_allclose(p1, p2, rtol=0, atol=1e-13)
    np.testing.assert_allclose(d1, d2, rtol=0, atol=1e-12)


def test_fourier_against_direct_sum():
    # direct textbook sum without argument reduction, at moderate s
    rng = np.random.default_rng(1)
    a0, a, b = _coeffs(rng, 3)
    s = rng.uniform(-2, 2, 50)
    p, dp = K.fourier_eval(s, a0, a, b)
    for i, si in enumerate(s):
        ref = a0 + sum(a[j - 1] * math.cos(2 * math.pi * j * si) + b[j - 1] * math.sin(2 * math.pi * j * si) for j in (1, 2, 3))
        dref = sum(2 * math.pi * j * (-a[j - 1] * math.sin(2 * math.pi * j * si) + b[j - 1] * math.cos(2 * math.pi * j * si)) for j in (1, 2, 3))
        assert p[i] == pytest.approx(ref, abs=1e-13)
        assert dp[i] == pytest.approx(dref, abs=1e-12)


@pytest.mark.parametrize("impl", [K.rk4_linear_numpy, K.rk4_linear_numba])
@pytest.mark.parametrize("step", [1e-3, 0.3, 1.0 / 7.0])
def test_rk4_matches_closed_form(impl, step):
    c = np.array([0.1, 0.585, 1.0, 2.0, -0.5])
    L = np.array([0.3, 0.585, 0.0, -1.0, 0.2])
    p0 = np.array([1.0, 2.0, 1.0, 0.5, -1.0])
    exact = L / c + (p0 - L / c) * 2.0 ** (-c)
    tol = 1e-12 if step == 1e-3 else 5e-4
    np.testing.assert_allclose(impl(c, L, p0, step), exact, atol=tol)


def test_step_schedule_lands_on_one():
    for step in (1e-3, 0.3, 0.25, 1.0 / 3.0, 2.0):
        n, last = K._schedule(step)
        assert (n - 1) * min(step, 1.0) + last == pytest.approx(1.0, abs=1e-12)
        assert 0 < last <= step + 1e-12


def _backend_in_subprocess(flag):
    env = dict(os.environ)
    env.pop("FUNCEQ_DISABLE_NUMBA", None)
    if flag is not None:
        env["FUNCEQ_DISABLE_NUMBA"] = flag
    out = subprocess.run(
        [sys.executable, "-c", "import funceq; print(funceq.backend())"],
        env=env, capture_output=True, text=True, check=True,
    )
    return out.stdout.strip()


def test_env_flag_selects_numpy():
    assert _backend_in_subprocess("1") == "numpy"
    assert _backend_in_subprocess("0") == ("numba" if K.NUMBA_AVAILABLE else "numpy")
