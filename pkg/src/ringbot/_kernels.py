"""Hot inner loops: ring chemistry stepping.

Two interchangeable implementations of the same arithmetic:

* a numba ``@njit`` scalar loop (default), and
* a pure-numpy vectorized fallback.

Set ``RINGBOT_DISABLE_NUMBA=1`` in the environment to force the numpy path;
it is also selected automatically when numba is not importable.  Both paths
evaluate the per-cell update with an identical expression tree, so results
are bit-identical (see tests/test_backend_parity.py and
benchmarks/kernel_bench.py).

The update itself: first-order central difference for transport, the
three-point stencil for diffusion, explicit Euler in time.  ``denom_2s``
selects the stencil denominator: True divides the diffusion stencil by 2s,
False by s**2.
"""

import os

import numpy as np

DENOM_PAPER_2S = "paper_2s"
DENOM_CLASSIC_S2 = "classic_s_squared"


def _numpy_step_chunk(qa, qi, qp, v, g_act, g_inh, g_pas, alpha, beta, s, dt,
                      n_steps, denom_2s):
    """Advance the three rings n_steps in place. Returns first bad step or -1."""
    two_s = 2.0 * s
    dd = two_s if denom_2s else s * s
    for k in range(n_steps):
        ap = np.roll(qa, -1)
        am = np.roll(qa, 1)
        ip = np.roll(qi, -1)
        im = np.roll(qi, 1)
        pp = np.roll(qp, -1)
        pm = np.roll(qp, 1)
        da = (v * (ap - am) / two_s
              + g_act * ((am + ap) - 2.0 * qa) / dd
              + (qa - qa * qa * qa - qi + alpha))
        di = (v * (ip - im) / two_s
              + g_inh * ((im + ip) - 2.0 * qi) / dd
              + beta * (qa - qi))
        dp = (v * (pp - pm) / two_s
              + g_pas * ((pm + pp) - 2.0 * qp) / dd)
        qa += dt * da
        qi += dt * di
        qp += dt * dp
        if not (np.all(np.isfinite(qa)) and np.all(np.isfinite(qi))
                and np.all(np.isfinite(qp))):
            return k
    return -1


def _make_numba_step_chunk():
    from numba import njit

    @njit(cache=True)
    def _numba_step_chunk(qa, qi, qp, v, g_act, g_inh, g_pas, alpha, beta, s,
                          dt, n_steps, denom_2s):
        n = qa.shape[0]
        two_s = 2.0 * s
        dd = two_s if denom_2s else s * s
        da = np.empty(n)
        di = np.empty(n)
        dp = np.empty(n)
        for k in range(n_steps):
            for m in range(n):
                mp = m + 1 if m + 1 < n else 0
                mm = m - 1 if m - 1 >= 0 else n - 1
                da[m] = (v * (qa[mp] - qa[mm]) / two_s
                         + g_act * ((qa[mm] + qa[mp]) - 2.0 * qa[m]) / dd
                         + (qa[m] - qa[m] * qa[m] * qa[m] - qi[m] + alpha))
                di[m] = (v * (qi[mp] - qi[mm]) / two_s
                         + g_inh * ((qi[mm] + qi[mp]) - 2.0 * qi[m]) / dd
                         + beta * (qa[m] - qi[m]))
                dp[m] = (v * (qp[mp] - qp[mm]) / two_s
                         + g_pas * ((qp[mm] + qp[mp]) - 2.0 * qp[m]) / dd)
            ok = True
            for m in range(n):
                qa[m] += dt * da[m]
                qi[m] += dt * di[m]
                qp[m] += dt * dp[m]
                if not (np.isfinite(qa[m]) and np.isfinite(qi[m])
                        and np.isfinite(qp[m])):
                    ok = False
            if not ok:
                return k
        return -1

    return _numba_step_chunk


def _select_backend():
    if os.environ.get("RINGBOT_DISABLE_NUMBA", "").strip() in ("1", "true", "yes"):
        return _numpy_step_chunk, "numpy"
    try:
        return _make_numba_step_chunk(), "numba"
    except ImportError:
        return _numpy_step_chunk, "numpy"


step_chunk, BACKEND = _select_backend()
