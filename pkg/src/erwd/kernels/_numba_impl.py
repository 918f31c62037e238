"""Compiled walk kernels.  Mirrors ``_numpy_impl`` draw for draw."""
from __future__ import annotations

import numpy as np
from numba import njit, prange

from ..rng import GOLDEN, INV_2_32, _LO32, _M1, _M2, _S27, _S30, _S31, _S32


@njit(inline="always", cache=True)
def _mix(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(error_model="numpy", cache=True)
def _one_walk(i, key, regime, resample, init, p, q, n, checkpoints,
              sums, first_two, tau, s_tau, late, steps, record):
    pq = p + q
    half = 0.5 * pq
    ncp = checkpoints.shape[0]

    ctr = key + GOLDEN
    u2 = (_mix(ctr) & _LO32) * INV_2_32
    if init == 0:
        x1 = 1
    elif init == 1:
        x1 = -1
    elif init == 2:
        x1 = 0
    elif u2 < p:
        x1 = 1
    elif u2 < pq:
        x1 = -1
    else:
        x1 = 0
    first_two[i, 0] = x1
    first_two[i, 1] = 0
    if record:
        steps[i, 0] = x1

    c = 0
    if checkpoints[0] == 1:
        sums[i, 0] = x1
        c = 1
    if x1 == 0:
        # a walk that starts with a delay is the zero process
        tau[i] = 1
        s_tau[i] = 0
        late[i] = 0
        for j in range(c, ncp):
            sums[i, j] = 0
        return

    s = np.int64(x1)
    prev = np.int64(x1)
    x2 = np.int64(0)
    npos = np.int64(x1 == 1)
    nneg = np.int64(x1 == -1)
    t_abs = np.int64(0)
    st_abs = np.int64(0)
    nlate = np.int64(0)
    for k in range(1, n):
        ctr += GOLDEN
        z = _mix(ctr)
        u1 = (z >> _S32) * INV_2_32
        u2 = (z & _LO32) * INV_2_32
        if regime == 0:
            t = u1 * k
            a = np.int64(t < npos)
            b = np.int64(t < npos + nneg)
            x = 2 * a - b
        elif regime == 1:
            x = np.int64(x1)
        elif regime == 2:
            x = np.int64(x1) if (k == 1 or u1 < 0.5) else x2
        elif regime == 3:
            x = prev
        else:
            x = np.int64(x1) if (k == 1 or u1 < 0.5) else prev
        lo_p = np.int64(u2 < p)
        lo_pq = np.int64(u2 < pq)
        lo_h = np.int64(u2 < half)
        st = x * (2 * lo_p - lo_pq) + np.int64(x == 0) * resample * (2 * lo_h - lo_pq)
        s += st
        if k == 1:
            x2 = st
        prev = st
        npos += np.int64(st == 1)
        nneg += np.int64(st == -1)
        if st == 0:
            if t_abs == 0:
                t_abs = k + 1
                st_abs = s
        elif t_abs != 0:
            nlate += 1
        if record:
            steps[i, k] = st
        if c < ncp and checkpoints[c] == k + 1:
            sums[i, c] = s
            c += 1
    first_two[i, 1] = x2
    tau[i] = t_abs
    s_tau[i] = st_abs
    late[i] = nlate


@njit(parallel=True, error_model="numpy", cache=True)
def simulate_block(keys, regime, policy, init, p, q, n, checkpoints,
                   sums, first_two, tau, s_tau, late, steps, record):
    resample = np.int64(policy)
    for i in prange(keys.shape[0]):
        _one_walk(i, keys[i], regime, resample, init, p, q, n, checkpoints,
                  sums, first_two, tau, s_tau, late, steps, record)


@njit(inline="always", cache=True)
def _two_prod(a, b):
    p = a * b
    t = 134217729.0 * a
    ah = t - (t - a)
    al = a - ah
    t = 134217729.0 * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


@njit(error_model="numpy", cache=True)
def affine_recurrence(coef, forcing, x1):
    """Compensated x[k+1] = coef[k] * x[k] + forcing[k]; same arithmetic as the numpy path."""
    out = np.empty(coef.shape[0] + 1)
    out[0] = x1
    x = x1
    e = 0.0
    for k in range(coef.shape[0]):
        c = coef[k]
        f = forcing[k]
        p, pe = _two_prod(c, x)
        s = p + f
        bb = s - p
        se = (p - (s - bb)) + (f - bb)
        e = c * e + pe + se
        x = s + e
        e = e - (x - s)
        out[k + 1] = x
    return out
