"""Pure-numpy walk kernels, vectorized across replicas.

Consumes exactly the same draws as the compiled kernel, so results agree bit
for bit; only speed differs.
"""
from __future__ import annotations

import numpy as np

from ..rng import counter_words, split_uniforms


def simulate_block(keys, regime, policy, init, p, q, n, checkpoints,
                   sums, first_two, tau, s_tau, late, steps, record):
    keys = np.asarray(keys, dtype=np.uint64)
    pq = p + q
    half = 0.5 * pq
    _, u2 = split_uniforms(counter_words(keys, 1))
    m = keys.shape[0]
    if init == 0:
        x1 = np.ones(m, dtype=np.int64)
    elif init == 1:
        x1 = -np.ones(m, dtype=np.int64)
    elif init == 2:
        x1 = np.zeros(m, dtype=np.int64)
    else:
        x1 = np.where(u2 < p, 1, np.where(u2 < pq, -1, 0)).astype(np.int64)
    alive = x1 != 0
    s = x1.copy()
    prev = x1.copy()
    x2 = np.zeros(m, dtype=np.int64)
    npos = (x1 == 1).astype(np.int64)
    nneg = (x1 == -1).astype(np.int64)
    t_abs = np.where(alive, 0, 1).astype(np.int64)
    st_abs = np.zeros(m, dtype=np.int64)
    nlate = np.zeros(m, dtype=np.int64)
    if record:
        steps[:, 0] = x1
    c = 0
    if checkpoints[0] == 1:
        sums[:, 0] = s
        c = 1
    for k in range(1, n):
        u1, u2 = split_uniforms(counter_words(keys, k + 1))
        if regime == 0:
            t = u1 * k
            x = 2 * (t < npos).astype(np.int64) - (t < npos + nneg).astype(np.int64)
        elif regime == 1:
            x = x1
        elif regime == 2:
            x = x1 if k == 1 else np.where(u1 < 0.5, x1, x2)
        elif regime == 3:
            x = prev
        else:
            x = x1 if k == 1 else np.where(u1 < 0.5, x1, prev)
        lo_p = (u2 < p).astype(np.int64)
        lo_pq = (u2 < pq).astype(np.int64)
        lo_h = (u2 < half).astype(np.int64)
        st = x * (2 * lo_p - lo_pq) + (x == 0) * policy * (2 * lo_h - lo_pq)
        st = st * alive
        s += st
        if k == 1:
            x2 = st
        prev = st
        npos += st == 1
        nneg += st == -1
        nlate += (st != 0) & (t_abs != 0)
        hit = (st == 0) & (t_abs == 0)
        t_abs[hit] = k + 1
        st_abs[hit] = s[hit]
        if record:
            steps[:, k] = st
        if c < len(checkpoints) and checkpoints[c] == k + 1:
            sums[:, c] = s
            c += 1
    first_two[:, 0] = x1
    first_two[:, 1] = x2
    tau[:] = t_abs
    s_tau[:] = st_abs
    late[:] = nlate


_SPLIT = 134217729.0  # 2^27 + 1


def _two_prod(a, b):
    p = a * b
    t = _SPLIT * a
    ah = t - (t - a)
    al = a - ah
    t = _SPLIT * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def affine_recurrence(coef, forcing, x1):
    """x[0] = x1, x[k+1] = coef[k] * x[k] + forcing[k].

    The rounding error of every step is carried along (error-free product and
    sum), so a million steps lose no more than a few ulps.
    """
    out = np.empty(len(coef) + 1)
    out[0] = x1
    x, e = float(x1), 0.0
    for k in range(len(coef)):
        c, f = float(coef[k]), float(forcing[k])
        p, pe = _two_prod(c, x)
        s = p + f
        bb = s - p
        se = (p - (s - bb)) + (f - bb)
        e = c * e + pe + se
        x = s + e
        e = e - (x - s)
        out[k + 1] = x
    return out
