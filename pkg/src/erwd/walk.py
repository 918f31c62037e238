"""Step kernel and single-walk simulation."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .kernels import simulate_block
from .model import (
    InitialLaw,
    MemoryRegime,
    ModelParams,
    ParameterError,
    ZeroRecallPolicy,
    resolve_policy,
)
from .rng import RngStream, split_uniforms


@dataclass(frozen=True)
class Trajectory:
    steps: np.ndarray

    def __post_init__(self) -> None:
        steps = np.asarray(self.steps, dtype=np.int8)
        if steps.ndim != 1 or steps.size == 0:
            raise ParameterError("a trajectory needs at least one step")
        object.__setattr__(self, "steps", steps)

    @property
    def sums(self) -> np.ndarray:
        return np.cumsum(self.steps, dtype=np.int64)

    @property
    def n(self) -> int:
        return int(self.steps.size)

    def __len__(self) -> int:
        return self.n


def _check_memory(memory_view: Sequence[int]) -> np.ndarray:
    mem = np.asarray(memory_view, dtype=np.int64).ravel()
    if mem.size == 0:
        raise ParameterError("memory view must contain at least one remembered step")
    if not np.all(np.isin(mem, (-1, 0, 1))):
        raise ParameterError("remembered steps must lie in {-1, 0, +1}")
    return mem


def step_distribution(memory_view: Sequence[int], params: ModelParams,
                      policy: ZeroRecallPolicy) -> dict[int, float]:
    """Exact law of the next step given the remembered steps."""
    mem = _check_memory(memory_view)
    policy = ZeroRecallPolicy.parse(policy)
    w = 1.0 / mem.size
    law = {1: 0.0, -1: 0.0, 0: 0.0}
    for x in mem:
        if x != 0:
            law[int(x)] += w * params.p
            law[-int(x)] += w * params.q
            law[0] += w * params.r
        elif policy is ZeroRecallPolicy.SYMMETRIC_RESAMPLE:
            law[1] += w * 0.5 * params.activity
            law[-1] += w * 0.5 * params.activity
            law[0] += w * params.r
        else:
            law[0] += w
    return law


def _steps_from_words(words, mem, params, policy):
    u1, u2 = split_uniforms(words)
    recalled = mem[np.minimum((u1 * mem.size).astype(np.int64), mem.size - 1)]
    pq = params.activity
    branch = 2 * (u2 < params.p).astype(np.int64) - (u2 < pq)
    out = recalled * branch
    if policy is ZeroRecallPolicy.SYMMETRIC_RESAMPLE:
        resampled = 2 * (u2 < 0.5 * pq).astype(np.int64) - (u2 < pq)
        out = np.where(recalled == 0, resampled, out)
    return out


def next_step(memory_view: Sequence[int], params: ModelParams, policy: ZeroRecallPolicy,
              rng: RngStream) -> int:
    """Recall a uniformly chosen remembered step, then repeat / flip / delay it."""
    mem = _check_memory(memory_view)
    policy = ZeroRecallPolicy.parse(policy)
    return int(_steps_from_words(np.array([rng.next_word()]), mem, params, policy)[0])


def sample_next_steps(memory_view: Sequence[int], params: ModelParams, policy: ZeroRecallPolicy,
                      size: int, rng: RngStream) -> np.ndarray:
    """``size`` independent draws of :func:`next_step` for a fixed memory view."""
    mem = _check_memory(memory_view)
    policy = ZeroRecallPolicy.parse(policy)
    return _steps_from_words(rng.next_words(size), mem, params, policy)


def simulate(params: ModelParams, regime: MemoryRegime, policy: ZeroRecallPolicy | None,
             init: InitialLaw, n: int, rng: RngStream, backend: str | None = None) -> Trajectory:
    """One walk of ``n`` steps driven by the stream ``(rng.seed, rng.replica)``.

    The first step comes from ``init``; step k+1 recalls from the regime's
    memory of steps 1..k.  A walk whose first step is 0 stays at 0.
    """
    if n < 1:
        raise ParameterError("horizon n must be >= 1")
    regime = MemoryRegime.parse(regime)
    policy = resolve_policy(regime, policy)
    init = InitialLaw.parse(init)
    res = simulate_block(np.array([rng.key]), regime.code, policy.code, init.code,
                         params.p, params.q, n, [n], record=True, backend=backend)
    return Trajectory(res.steps[0])


def scaled_walk(base: Trajectory, y: float) -> np.ndarray:
    """Partial sums ``y * S~_n`` of a walk started from a fixed +1 step."""
    if base.steps[0] != 1:
        raise ParameterError("the scaled construction needs a base walk whose first step is +1")
    sums = base.sums
    if float(y).is_integer():
        return sums * int(y)
    return sums * float(y)
