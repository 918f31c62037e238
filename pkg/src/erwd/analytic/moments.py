"""Exact finite-n moments of the partial sums.

Every regime is first solved for the walk started at X1 = +1.  Kernels are odd
under a global sign flip and a walk started at 0 stays at 0, so

    E(S_n) = E(X1) E(T_n),   E(S_n^2) = E(X1^2) E(T_n^2)

covers every initial law.  Variances are carried by their own recursions;
forming E(T^2) - E(T)^2 at n ~ 1e6 would cancel most significant digits.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..kernels import affine_recurrence
from ..model import (
    DomainError,
    InitialLaw,
    MemoryRegime,
    ModelParams,
    UnsupportedModelError,
    ZeroRecallPolicy,
    resolve_policy,
)


@dataclass
class MomentSeries:
    """Per-n mean, second moment and variance of S_n for n = 1..n_max."""

    mean: np.ndarray
    second_moment: np.ndarray
    variance: np.ndarray
    params: ModelParams
    regime: MemoryRegime
    policy: ZeroRecallPolicy
    init: InitialLaw
    extras: dict[str, np.ndarray] = field(default_factory=dict)

    @property
    def n(self) -> np.ndarray:
        return np.arange(1, self.mean.size + 1)

    @property
    def n_max(self) -> int:
        return int(self.mean.size)

    def at(self, n: int) -> tuple[float, float, float]:
        i = n - 1
        return float(self.mean[i]), float(self.second_moment[i]), float(self.variance[i])

    def rows(self):
        for i in range(self.n_max):
            yield i + 1, float(self.mean[i]), float(self.second_moment[i]), float(self.variance[i])


@dataclass
class _TWalk:
    mean: np.ndarray
    variance: np.ndarray
    extras: dict[str, np.ndarray] = field(default_factory=dict)


def _index(n_max: int) -> np.ndarray:
    # k = 1..n_max-1 drives the step from n = k to n = k + 1
    return np.arange(1, n_max, dtype=np.float64)


def _full_symmetric(params: ModelParams, n_max: int) -> _TWalk:
    d, c = params.drift, params.activity
    k = _index(n_max)
    mean = affine_recurrence(1.0 + d / k, np.zeros_like(k), 1.0)
    var = affine_recurrence(1.0 + 2.0 * d / k, c - (d / k) ** 2 * mean[:-1] ** 2, 0.0)
    return _TWalk(mean, var)


def _full_propagate(params: ModelParams, n_max: int) -> _TWalk:
    d, c = params.drift, params.activity
    k = _index(n_max)
    mean = affine_recurrence(1.0 + d / k, np.zeros_like(k), 1.0)
    nonzero = affine_recurrence(1.0 + c / k, np.zeros_like(k), 1.0)
    var = affine_recurrence(1.0 + 2.0 * d / k,
                            c * nonzero[:-1] / k - (d / k) ** 2 * mean[:-1] ** 2, 0.0)
    return _TWalk(mean, var, {"nonzero_count": nonzero})


def _first_step(params: ModelParams, n_max: int) -> _TWalk:
    # every later step is an independent copy of the same three-point law
    d, c = params.drift, params.activity
    ones = np.ones(n_max - 1)
    mean = affine_recurrence(ones, np.full(n_max - 1, d), 1.0)
    var = affine_recurrence(ones, np.full(n_max - 1, c - d * d), 0.0)
    return _TWalk(mean, var)


def _first_two(params: ModelParams, policy: ZeroRecallPolicy, n_max: int) -> _TWalk:
    d, c = params.drift, params.activity
    n = np.arange(1, n_max + 1, dtype=np.float64)
    tail = np.maximum(n - 2.0, 0.0)
    branches = []
    for x2, w in ((1, params.p), (-1, params.q), (0, params.r)):
        mu = d * (1 + x2) / 2.0
        if policy is ZeroRecallPolicy.PROPAGATE:
            m2 = c * (1 + x2 * x2) / 2.0
        else:
            m2 = c
        branch_mean = 1.0 + x2 + tail * mu
        branch_var = tail * (m2 - mu * mu)
        branches.append((w, branch_mean, branch_var))
    mean = sum(w * bm for w, bm, _ in branches)
    var = sum(w * (bv + (bm - mean) ** 2) for w, bm, bv in branches)
    mean[0], var[0] = 1.0, 0.0
    return _TWalk(mean, var)


def last_step_transition(params: ModelParams, policy: ZeroRecallPolicy) -> np.ndarray:
    """Transition matrix of the last step, states ordered (-1, 0, +1)."""
    p, q, r = params.p, params.q, params.r
    if policy is ZeroRecallPolicy.PROPAGATE:
        from_zero = [0.0, 1.0, 0.0]
    else:
        from_zero = [0.5 * (p + q), r, 0.5 * (p + q)]
    return np.array([[p, r, q], from_zero, [q, r, p]])


STATES = np.array([-1.0, 0.0, 1.0])


def markov_step_moments(first_law: np.ndarray, transitions, n_max: int) -> _TWalk:
    """Moments of T_n when X_{k+1} depends on X_k only.

    ``transitions(k)`` returns the matrix used for the step k -> k + 1.
    Tracks, per state s, P(X_k = s), E(T_k; X_k = s) and E(T_k^2; X_k = s).
    The variance is formed by subtraction, which is accurate as long as E(T_n)
    stays bounded (true for the last-step chains: absorbed at 0 or symmetric).
    """
    prob = np.asarray(first_law, dtype=np.float64).copy()
    first = STATES * prob                    # E(T_k ; X_k = s)
    second = STATES ** 2 * prob              # E(T_k^2 ; X_k = s)
    mean = np.empty(n_max)
    var = np.empty(n_max)
    mean[0] = first.sum()
    var[0] = max(second.sum() - mean[0] ** 2, 0.0)
    for k in range(1, n_max):
        P = transitions(k)
        new_prob = prob @ P
        new_first = first @ P + STATES * new_prob
        new_second = second @ P + 2.0 * STATES * (first @ P) + STATES ** 2 * new_prob
        prob, first, second = new_prob, new_first, new_second
        mean[k] = first.sum()
        var[k] = second.sum() - mean[k] ** 2
    return _TWalk(mean, var)


def _last_step(params: ModelParams, policy: ZeroRecallPolicy, n_max: int) -> _TWalk:
    P = last_step_transition(params, policy)
    return markov_step_moments(np.array([0.0, 0.0, 1.0]), lambda k: P, n_max)


def first_and_last_chain(params: ModelParams, policy: ZeroRecallPolicy, n_max: int) -> dict[str, np.ndarray]:
    """Coupled recursions for the first-and-last walk started at X1 = +1.

    With a = (p - q)/2:
        E(X_{n+1})       = a (1 + E(X_n))
        E(T_n X_{n+1})   = a (E(T_n) + E(T_n X_n))
        E(T_{n+1} X_{n+1}) = E(T_n X_{n+1}) + E(X_{n+1}^2)
        E(T_{n+1}^2)     = E(T_n^2) + 2 E(T_n X_{n+1}) + E(X_{n+1}^2)
    E(X_{n+1}^2) is p + q under resampling and (p + q)(1 + E(X_n^2))/2 when
    zeros propagate.  The centred pair Var(T_n), Cov(T_n, X_n) is carried
    alongside.
    """
    a, c = params.drift / 2.0, params.activity
    step_mean = np.empty(n_max)
    step_sq = np.empty(n_max)
    mean = np.empty(n_max)
    cross = np.empty(n_max)
    second = np.empty(n_max)
    var = np.empty(n_max)
    step_mean[0] = step_sq[0] = mean[0] = cross[0] = second[0] = 1.0
    var[0] = 0.0
    cov = 0.0
    for k in range(1, n_max):
        e = a * (1.0 + step_mean[k - 1])
        if policy is ZeroRecallPolicy.PROPAGATE:
            w = c * (1.0 + step_sq[k - 1]) / 2.0
        else:
            w = c
        t_x = a * (mean[k - 1] + cross[k - 1])
        step_var = w - e * e
        var[k] = var[k - 1] + 2.0 * a * cov + step_var
        cov = a * cov + step_var
        step_mean[k], step_sq[k] = e, w
        cross[k] = t_x + w
        second[k] = second[k - 1] + 2.0 * t_x + w
        mean[k] = mean[k - 1] + e
    return {"step_mean": step_mean, "step_second_moment": step_sq, "mean": mean,
            "cross_moment": cross, "second_moment": second, "variance": var}


def _first_and_last(params: ModelParams, policy: ZeroRecallPolicy, n_max: int) -> _TWalk:
    ch = first_and_last_chain(params, policy, n_max)
    return _TWalk(ch["mean"], ch["variance"],
                  {"step_mean": ch["step_mean"], "cross_moment": ch["cross_moment"]})


def t_walk_moments(params: ModelParams, regime: MemoryRegime, policy: ZeroRecallPolicy, n_max: int) -> _TWalk:
    if regime is MemoryRegime.FULL:
        if policy is ZeroRecallPolicy.SYMMETRIC_RESAMPLE:
            return _full_symmetric(params, n_max)
        return _full_propagate(params, n_max)
    if regime is MemoryRegime.FIRST_STEP:
        return _first_step(params, n_max)
    if regime is MemoryRegime.FIRST_TWO:
        return _first_two(params, policy, n_max)
    if regime is MemoryRegime.LAST_STEP:
        return _last_step(params, policy, n_max)
    if regime is MemoryRegime.FIRST_AND_LAST:
        return _first_and_last(params, policy, n_max)
    raise UnsupportedModelError(f"no exact recursion for regime {regime!r} with policy {policy!r}")


def exact_moments(params: ModelParams, regime: MemoryRegime, policy: ZeroRecallPolicy | None,
                  init: InitialLaw, n_max: int) -> MomentSeries:
    """E(S_n), E(S_n^2), Var(S_n) for n = 1..n_max from exact recursions."""
    if n_max < 1:
        raise DomainError("n_max must be >= 1")
    regime = MemoryRegime.parse(regime)
    policy = resolve_policy(regime, policy)
    init = InitialLaw.parse(init)
    t = t_walk_moments(params, regime, policy, n_max)
    law = init.distribution(params)
    m1 = law.get(1, 0.0) - law.get(-1, 0.0)
    m2 = law.get(1, 0.0) + law.get(-1, 0.0)
    mean = m1 * t.mean
    second = m2 * (t.variance + t.mean ** 2)
    # Var = m2 Var(T) + (m2 - m1^2) E(T)^2, free of cancellation
    var = m2 * t.variance + (m2 - m1 * m1) * t.mean ** 2
    extras = {}
    for name, series in t.extras.items():
        extras[name] = (m2 if name in ("nonzero_count",) else m1) * series
    return MomentSeries(mean, second, var, params, regime, policy, init, extras)
