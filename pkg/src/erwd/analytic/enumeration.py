"""Brute-force path enumeration, used as an oracle for small n.

Walks every path of length n (at most 3^n of them) with the exact step law,
so it shares no algebra with the recursions in ``moments``.
"""
from __future__ import annotations

import math
from collections import defaultdict

import numpy as np

from ..model import DomainError, InitialLaw, MemoryRegime, ModelParams, resolve_policy
from ..walk import step_distribution

MAX_ENUMERATION_N = 14


def _path_laws(params: ModelParams, regime, policy, init, n: int):
    """Yield, for k = 1..n, a dict mapping path tuples to probabilities."""
    if not 1 <= n <= MAX_ENUMERATION_N:
        raise DomainError(f"enumeration supports 1 <= n <= {MAX_ENUMERATION_N}, got {n}")
    regime = MemoryRegime.parse(regime)
    policy = resolve_policy(regime, policy)
    init = InitialLaw.parse(init)
    paths = {(x,): w for x, w in init.distribution(params).items() if w > 0.0}
    yield paths
    for k in range(1, n):
        nxt: dict[tuple, float] = defaultdict(float)
        for path, w in paths.items():
            if path[0] == 0:
                # a walk whose first step is a delay never moves
                nxt[path + (0,)] += w
                continue
            view = [path[i - 1] for i in regime.memory_indices(k)]
            for x, pr in step_distribution(view, params, policy).items():
                if pr > 0.0:
                    nxt[path + (x,)] += w * pr
        paths = dict(nxt)
        yield paths


def enumerate_sum_law(params: ModelParams, regime, policy, init, n: int) -> dict[int, float]:
    """Exact law of S_n as {value: probability}."""
    for paths in _path_laws(params, regime, policy, init, n):
        pass
    law: dict[int, float] = defaultdict(float)
    for path, w in paths.items():
        law[sum(path)] += w
    return dict(sorted(law.items()))


def enumerate_moments(params: ModelParams, regime, policy, init, n: int) -> dict[str, np.ndarray]:
    """Mean, second moment and variance of S_k for k = 1..n."""
    mean, second, var = [], [], []
    for paths in _path_laws(params, regime, policy, init, n):
        sums = [(sum(path), w) for path, w in paths.items()]
        m = math.fsum(s * w for s, w in sums)
        m2 = math.fsum(s * s * w for s, w in sums)
        mean.append(m)
        second.append(m2)
        var.append(math.fsum((s - m) ** 2 * w for s, w in sums))
    return {"mean": np.array(mean), "second_moment": np.array(second), "variance": np.array(var)}
