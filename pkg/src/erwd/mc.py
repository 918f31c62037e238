"""Replicated ensembles, normalized functionals and mergeable statistics.

Replica ``i`` is always driven by the stream ``(seed, i)``; replicas are
processed in fixed blocks and merged in block order, so results do not depend
on the thread count.
"""
from __future__ import annotations

import enum
import math
from collections.abc import Iterator
from dataclasses import dataclass, field

import numpy as np

from .analytic.limits import finite_law
from .kernels import BlockResult, simulate_block
from .model import (
    DomainError,
    InitialLaw,
    MemoryRegime,
    ModelParams,
    ParameterError,
    ZeroRecallPolicy,
    _CliEnum,
    resolve_policy,
)
from .rng import replica_keys, scale_uniform

DEFAULT_BLOCK = 1 << 14


class Functional(_CliEnum):
    SN = "sn"
    SN_OVER_N = "sn-over-n"
    SN_OVER_SQRT_N = "sn-over-sqrt-n"
    SN_OVER_SQRT_N_LOG_N = "sn-over-sqrt-n-log-n"
    SN_OVER_N_POW = "sn-over-n-pow"
    CENTERED_FIRST_STEP = "centered-first-step"
    CENTERED_FIRST_TWO = "centered-first-two"
    CENTERED_FIRST_LAST = "centered-first-last"
    TAU = "tau"
    S_TAU = "s-tau"

    @property
    def is_absorption(self) -> bool:
        return self in (Functional.TAU, Functional.S_TAU)

    @property
    def is_scale_free(self) -> bool:
        """True when the value only depends on S_n (usable with a random scale Y)."""
        return self in (Functional.SN, Functional.SN_OVER_N, Functional.SN_OVER_SQRT_N,
                        Functional.SN_OVER_SQRT_N_LOG_N, Functional.SN_OVER_N_POW)


def evaluate(functional: Functional, sums, n: int, params: ModelParams, first_two=None) -> np.ndarray:
    """Apply a path functional to partial sums at horizon ``n``."""
    f = Functional.parse(functional)
    s = np.asarray(sums, dtype=np.float64)
    d, c = params.drift, params.activity
    if f is Functional.SN:
        return s
    if f is Functional.SN_OVER_N:
        return s / n
    if f is Functional.SN_OVER_SQRT_N:
        return s / math.sqrt(n)
    if f is Functional.SN_OVER_SQRT_N_LOG_N:
        if n < 2:
            raise ParameterError("sqrt(n log n) normalization needs n >= 2")
        return s / math.sqrt(n * math.log(n))
    if f is Functional.SN_OVER_N_POW:
        return s / float(n) ** d
    if f.is_absorption:
        raise ParameterError(f"{f.value} is read from the absorption time, not from S_n")
    if first_two is None:
        raise ParameterError(f"{f.value} needs the first steps of each walk")
    x = np.asarray(first_two, dtype=np.float64)
    if f is Functional.CENTERED_FIRST_STEP:
        return (s - n * d * x[:, 0]) / math.sqrt(n * (c - d * d))
    if f is Functional.CENTERED_FIRST_TWO:
        return (s - n * d * (x[:, 0] + x[:, 1]) / 2.0) / math.sqrt(n)
    return (s - n * d * x[:, 0] / (2.0 - d)) / math.sqrt(n)


def default_tau_cap(params: ModelParams) -> int:
    if params.r <= 0.0:
        raise DomainError("tau is undefined when r = 0")
    return int(math.ceil(100.0 / params.r))


@dataclass(frozen=True)
class McConfig:
    params: ModelParams
    regime: MemoryRegime
    policy: ZeroRecallPolicy | None
    init: InitialLaw
    n: int
    m: int
    seed: int
    functional: Functional = Functional.SN_OVER_SQRT_N
    f_y: tuple | None = None
    block: int = DEFAULT_BLOCK

    def __post_init__(self) -> None:
        regime = MemoryRegime.parse(self.regime)
        object.__setattr__(self, "regime", regime)
        object.__setattr__(self, "policy", resolve_policy(regime, self.policy))
        object.__setattr__(self, "init", InitialLaw.parse(self.init))
        object.__setattr__(self, "functional", Functional.parse(self.functional))
        if self.n < 1:
            raise ParameterError("horizon n must be >= 1")
        if self.m < 1:
            raise ParameterError("replica count m must be >= 1")
        if self.block < 1:
            raise ParameterError("block size must be >= 1")
        if self.f_y is not None:
            # stored as sorted (value, prob) pairs so the config stays hashable
            object.__setattr__(self, "f_y", tuple(sorted(finite_law(self.f_y).items())))
        if self.functional.is_absorption:
            if self.params.r <= 0.0:
                raise DomainError("tau is undefined when r = 0")
            if regime is not MemoryRegime.LAST_STEP:
                raise ParameterError("tau and S_tau are defined for the last-step regime only")


@dataclass
class EnsembleStats:
    """Streaming count / mean / central-moment sums, plus the kept sample.

    ``m2, m3, m4`` are sums of powers of deviations from the mean; two
    accumulators combine with the pairwise update formulas, so the merge is
    associative up to rounding.  ``censored`` counts replicas whose value was
    not observed (absorption beyond the cap); they are never in ``values``.
    """

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0
    censored: int = 0
    values: np.ndarray = field(default_factory=lambda: np.empty(0))

    @classmethod
    def from_values(cls, values, censored: int = 0) -> "EnsembleStats":
        x = np.asarray(values, dtype=np.float64).ravel()
        if x.size == 0:
            return cls(censored=censored)
        mu = float(x.mean())
        dev = x - mu
        d2 = dev * dev
        return cls(int(x.size), mu, float(d2.sum()), float((d2 * dev).sum()),
                   float((d2 * d2).sum()), censored, x.copy())

    def merge(self, other: "EnsembleStats") -> "EnsembleStats":
        na, nb = self.count, other.count
        n = na + nb
        if na == 0 or nb == 0:
            src = other if na == 0 else self
            return EnsembleStats(src.count, src.mean, src.m2, src.m3, src.m4,
                                 self.censored + other.censored,
                                 np.concatenate([self.values, other.values]))
        delta = other.mean - self.mean
        d2 = delta * delta
        mean = self.mean + delta * nb / n
        m2 = self.m2 + other.m2 + d2 * na * nb / n
        m3 = (self.m3 + other.m3 + delta * d2 * na * nb * (na - nb) / (n * n)
              + 3.0 * delta * (na * other.m2 - nb * self.m2) / n)
        m4 = (self.m4 + other.m4
              + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n ** 3)
              + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
              + 4.0 * delta * (na * other.m3 - nb * self.m3) / n)
        return EnsembleStats(n, mean, m2, m3, m4, self.censored + other.censored,
                             np.concatenate([self.values, other.values]))

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        return self.m2 / (self.count - 1) if self.count > 1 else float("nan")

    @property
    def se_mean(self) -> float:
        return math.sqrt(self.variance / self.count) if self.count > 1 else float("nan")

    @property
    def se_variance(self) -> float:
        """Large-sample standard error of the variance estimate."""
        if self.count < 2:
            return float("nan")
        c2, c4 = self.m2 / self.count, self.m4 / self.count
        return math.sqrt(max(c4 - c2 * c2, 0.0) / self.count)

    def raw_moment(self, k: int) -> float:
        """Empirical E(Z^k) for k = 1..4 from the central sums."""
        if self.count == 0:
            return float("nan")
        mu, n = self.mean, self.count
        c2, c3, c4 = self.m2 / n, self.m3 / n, self.m4 / n
        return {
            1: mu,
            2: mu * mu + c2,
            3: mu ** 3 + 3.0 * mu * c2 + c3,
            4: mu ** 4 + 6.0 * mu * mu * c2 + 4.0 * mu * c3 + c4,
        }[k]

    def raw_moment_se(self, k: int) -> float:
        """Standard error of the empirical E(Z^k), k = 1 or 2."""
        if k == 1:
            return self.se_mean
        if k == 2:
            var_sq = self.raw_moment(4) - self.raw_moment(2) ** 2
            return math.sqrt(max(var_sq, 0.0) / max(self.count - 1, 1))
        raise ParameterError("standard errors are available for orders 1 and 2")

    def support_counts(self, decimals: int = 12) -> dict[float, int]:
        vals, counts = np.unique(np.round(self.values, decimals), return_counts=True)
        return {float(v): int(c) for v, c in zip(vals, counts)}

    def summary(self) -> dict:
        return {"count": self.count, "censored": self.censored, "mean": self.mean,
                "variance": self.variance, "second_moment": self.raw_moment(2)}


@dataclass
class Ensemble:
    """Raw per-replica output at the configured horizon (one row per replica)."""

    config: McConfig
    sums: np.ndarray
    first_two: np.ndarray
    tau: np.ndarray
    s_tau: np.ndarray
    late: np.ndarray
    scale: np.ndarray | None = None

    def functional(self, functional=None) -> np.ndarray:
        """Functional values; absorption functionals drop censored replicas."""
        f = Functional.parse(functional or self.config.functional)
        if f.is_absorption:
            seen = self.tau > 0
            src = self.tau if f is Functional.TAU else self.s_tau
            return src[seen].astype(np.float64)
        sums = self.sums if self.scale is None else self.scale * self.sums
        return evaluate(f, sums, self.config.n, self.config.params, self.first_two)

    @property
    def censored(self) -> int:
        return int((self.tau == 0).sum())

    def stats(self, functional=None) -> EnsembleStats:
        f = Functional.parse(functional or self.config.functional)
        return EnsembleStats.from_values(self.functional(f), self.censored if f.is_absorption else 0)


# -- driving the kernels -------------------------------------------------------

def _blocks(m: int, block: int) -> Iterator[tuple[int, int]]:
    for start in range(0, m, block):
        yield start, min(start + block, m)


def simulate_ensemble(config: McConfig, checkpoints=None, backend: str | None = None,
                      init_override: InitialLaw | None = None) -> Iterator[tuple[np.ndarray, BlockResult]]:
    """Yield ``(replica_keys, BlockResult)`` block by block."""
    cps = [config.n] if checkpoints is None else list(checkpoints)
    init = init_override or config.init
    for start, stop in _blocks(config.m, config.block):
        keys = replica_keys(config.seed, np.arange(start, stop))
        res = simulate_block(keys, config.regime.code, config.policy.code, init.code,
                             config.params.p, config.params.q, config.n, cps, backend=backend)
        yield keys, res


def collect(config: McConfig, backend: str | None = None) -> Ensemble:
    """Run all replicas and keep the raw per-replica arrays."""
    parts = list(simulate_ensemble(config, backend=backend))
    cat = lambda name: np.concatenate([getattr(r, name) for _, r in parts])  # noqa: E731
    scale = None
    if config.f_y is not None:
        if config.init is not InitialLaw.PLUS_ONE:
            raise ParameterError("the scaled construction uses a base walk started at +1")
        scale = np.concatenate([sample_scale(config.f_y, k) for k, _ in parts])
    return Ensemble(config, cat("sums")[:, 0], cat("first_two"), cat("tau"),
                    cat("s_tau"), cat("late"), scale)


def _absorption_values(config: McConfig, res: BlockResult) -> tuple[np.ndarray, int]:
    seen = res.tau > 0
    src = res.tau if config.functional is Functional.TAU else res.s_tau
    return src[seen].astype(np.float64), int((~seen).sum())


def run(config: McConfig, backend: str | None = None) -> EnsembleStats:
    """Evaluate the configured functional at horizon n on m replicas."""
    if config.f_y is not None:
        return run_scaled(config, backend=backend)
    stats = EnsembleStats()
    for _, res in simulate_ensemble(config, backend=backend):
        if config.functional.is_absorption:
            vals, cens = _absorption_values(config, res)
            part = EnsembleStats.from_values(vals, cens)
        else:
            part = EnsembleStats.from_values(
                evaluate(config.functional, res.sums[:, 0], config.n, config.params, res.first_two))
        stats = stats.merge(part)
    return stats


def path_stabilization(config: McConfig, checkpoints, backend: str | None = None) -> np.ndarray:
    """Functional values at each checkpoint along the same trajectories, shape (m, K)."""
    cps = np.asarray(checkpoints, dtype=np.int64)
    if cps.size == 0 or np.any(np.diff(cps) <= 0):
        raise ParameterError("checkpoints must be strictly increasing")
    if config.functional.is_absorption:
        raise ParameterError("path stabilization needs a partial-sum functional")
    cfg = McConfig(config.params, config.regime, config.policy, config.init, int(cps[-1]),
                   config.m, config.seed, config.functional, None, config.block)
    out = np.empty((cfg.m, cps.size))
    for start, (_, res) in zip(range(0, cfg.m, cfg.block), simulate_ensemble(cfg, cps, backend)):
        for j, n in enumerate(cps):
            out[start:start + res.sums.shape[0], j] = evaluate(
                cfg.functional, res.sums[:, j], int(n), cfg.params, res.first_two)
    return out


def sample_scale(f_y, keys: np.ndarray) -> np.ndarray:
    """Draw Y once per replica from its reserved uniform (inverse CDF)."""
    law = finite_law(f_y)
    values = np.array(sorted(law))
    cum = np.cumsum([law[v] for v in values])
    idx = np.searchsorted(cum, scale_uniform(keys), side="right")
    return values[np.minimum(idx, values.size - 1)]


def run_scaled(config: McConfig, backend: str | None = None) -> EnsembleStats:
    """Walks S_n = Y * S~_n with S~ started at +1 and Y drawn once per replica."""
    if config.f_y is None:
        raise ParameterError("run_scaled needs the law of Y (f_y)")
    if config.init is not InitialLaw.PLUS_ONE:
        raise ParameterError("the scaled construction uses a base walk started at +1")
    if not config.functional.is_scale_free:
        raise ParameterError(f"{config.functional.value} is not defined for scaled walks")
    stats = EnsembleStats()
    for keys, res in simulate_ensemble(config, backend=backend):
        y = sample_scale(config.f_y, keys)
        sums = y * res.sums[:, 0]
        stats = stats.merge(EnsembleStats.from_values(
            evaluate(config.functional, sums, config.n, config.params)))
    return stats
