"""
Hot numeric kernels: trigonometric series evaluation and the RK4 loop for
the periodicity ODE.

Each kernel exists twice, a numba ``@njit`` version and a pure-numpy
version.  The public names (``fourier_eval``, ``rk4_linear``) are bound at
import time to the numba versions unless numba is missing or the
environment variable ``FUNCEQ_DISABLE_NUMBA`` is set to a truthy value.
Both versions stay importable so tests and benchmarks can compare them.
"""

import math
import os

import numpy as np

try:
    from numba import njit

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA_AVAILABLE = False

    def njit(*args, **kwargs):
        def decorator(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return decorator


_TRUTHY = {"1", "true", "yes", "on"}
NUMBA_DISABLED = os.environ.get("FUNCEQ_DISABLE_NUMBA", "").strip().lower() in _TRUTHY
USE_NUMBA = NUMBA_AVAILABLE and not NUMBA_DISABLED

TWO_PI = 2.0 * math.pi
LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# p(s) = a0 + sum_j a_j cos(2 pi j s) + b_j sin(2 pi j s), and p'(s)
# ---------------------------------------------------------------------------


@njit(cache=True)
def fourier_eval_numba(s, a0, a, b):
    n = s.shape[0]
    d = a.shape[0]
    p = np.empty(n)
    dp = np.empty(n)
    for i in range(n):
        # reduce to [0, 1) first so the phase carries no large-argument error
        r = s[i] - math.floor(s[i])
        c1 = math.cos(TWO_PI * r)
        s1 = math.sin(TWO_PI * r)
        cs = 1.0
        sn = 0.0
        acc = a0
        dacc = 0.0
        for j in range(1, d + 1):
            # angle addition: (cos, sin) of 2 pi j r from 2 pi (j - 1) r
            cs, sn = cs * c1 - sn * s1, sn * c1 + cs * s1
            acc += a[j - 1] * cs + b[j - 1] * sn
            dacc += TWO_PI * j * (b[j - 1] * cs - a[j - 1] * sn)
        p[i] = acc
        dp[i] = dacc
    return p, dp


def fourier_eval_numpy(s, a0, a, b):
    s = np.asarray(s, dtype=np.float64)
    r = s - np.floor(s)
    p = np.full(s.shape, float(a0))
    dp = np.zeros(s.shape)
    for j in range(1, a.shape[0] + 1):
        t = j * r
        t = t - np.floor(t)
        cs = np.cos(TWO_PI * t)
        sn = np.sin(TWO_PI * t)
        p += a[j - 1] * cs + b[j - 1] * sn
        dp += TWO_PI * j * (b[j - 1] * cs - a[j - 1] * sn)
    return p, dp


# ---------------------------------------------------------------------------
# RK4 for p' = ln2 * (L - c p) on [0, 1], batched over independent specs
# ---------------------------------------------------------------------------


def _schedule(step):
    # n - 1 steps of size ``step`` and a final step landing exactly on s = 1
    n = max(int(math.ceil(1.0 / step - 1e-9)), 1)
    return n, 1.0 - (n - 1) * step


@njit(cache=True)
def _rk4_linear_numba(c, L, p0, n, h, h_last):
    # step-outer, batch-inner: the inner loop is independent and vectorizes
    y = p0.copy()
    for k in range(n):
        hk = h_last if k == n - 1 else h
        for i in range(y.shape[0]):
            ci = c[i]
            li = L[i]
            yi = y[i]
            k1 = LN2 * (li - ci * yi)
            k2 = LN2 * (li - ci * (yi + 0.5 * hk * k1))
            k3 = LN2 * (li - ci * (yi + 0.5 * hk * k2))
            k4 = LN2 * (li - ci * (yi + hk * k3))
            y[i] = yi + hk / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def _rk4_linear_numpy(c, L, p0, n, h, h_last):
    y = np.array(p0, dtype=np.float64, copy=True)
    for k in range(n):
        hk = h_last if k == n - 1 else h
        k1 = LN2 * (L - c * y)
        k2 = LN2 * (L - c * (y + 0.5 * hk * k1))
        k3 = LN2 * (L - c * (y + 0.5 * hk * k2))
        k4 = LN2 * (L - c * (y + hk * k3))
        y = y + hk / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def rk4_linear_numba(c, L, p0, step):
    c, L, p0 = (np.ascontiguousarray(v, dtype=np.float64) for v in np.broadcast_arrays(c, L, p0))
    n, h_last = _schedule(step)
    out = _rk4_linear_numba(c.ravel(), L.ravel(), p0.ravel(), n, float(step), h_last)
    return out.reshape(c.shape)


def rk4_linear_numpy(c, L, p0, step):
    c, L, p0 = (np.asarray(v, dtype=np.float64) for v in np.broadcast_arrays(c, L, p0))
    n, h_last = _schedule(step)
    return _rk4_linear_numpy(c, L, p0, n, float(step), h_last)


def _fourier_eval_numba_any(s, a0, a, b):
    s = np.asarray(s, dtype=np.float64)
    flat = np.ascontiguousarray(s.ravel())
    p, dp = fourier_eval_numba(flat, float(a0), a, b)
    return p.reshape(s.shape), dp.reshape(s.shape)


if USE_NUMBA:
    fourier_eval = _fourier_eval_numba_any
    rk4_linear = rk4_linear_numba
else:
    fourier_eval = fourier_eval_numpy
    rk4_linear = rk4_linear_numpy


def backend():
    """Name of the active kernel backend."""
    return "numba" if USE_NUMBA else "numpy"


def warmup():
    """Trigger JIT compilation (a no-op on the numpy path)."""
    one = np.zeros(1)
    fourier_eval(one, 1.0, np.ones(1), np.ones(1))
    rk4_linear(np.ones(1), np.ones(1), np.ones(1), 0.5)
