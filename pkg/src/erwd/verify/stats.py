"""Statistical comparisons between ensembles and exact targets."""
from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from ..analytic.mixture import MixtureLaw
from ..mc import EnsembleStats
from ..model import ParameterError

MIN_MOMENT_COUNT = 100
MIN_GEOMETRIC_COUNT = 10_000


@dataclass
class TestResult:
    """One check.  ``passed`` is always ``statistic <= threshold``."""

    __test__ = False  # keep pytest from collecting this class

    name: str
    statistic: float
    threshold: float
    sample_size: int
    provenance: str
    theorem: str | None = None
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.statistic <= self.threshold)

    def to_dict(self) -> dict:
        return {"name": self.name, "statistic": float(self.statistic),
                "threshold": float(self.threshold), "passed": self.passed,
                "sample_size": int(self.sample_size), "provenance": self.provenance,
                "theorem": self.theorem, "details": _plain(self.details)}


def _plain(obj):
    if isinstance(obj, Mapping):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def ks_mixed(sample, law: MixtureLaw) -> float:
    """Two-sided sup |F_m - F| for a law that may have atoms.

    Both the value and the left limit are compared at every sample point and
    every atom; between those points F_m is flat and F monotone, so this is
    the exact supremum.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64).ravel())
    if x.size == 0:
        raise ParameterError("ks_mixed needs a non-empty sample")
    m = x.size
    pts = np.unique(np.concatenate([x, [loc for loc, _ in law.atoms]]))
    emp_right = np.searchsorted(x, pts, side="right") / m
    emp_left = np.searchsorted(x, pts, side="left") / m
    d_right = np.abs(emp_right - law.cdf(pts))
    d_left = np.abs(emp_left - law.cdf_left(pts))
    return float(max(d_right.max(), d_left.max()))


def ks_check(name: str, sample, law: MixtureLaw, allowance: float, provenance: str,
             theorem: str | None = None) -> TestResult:
    d = ks_mixed(sample, law)
    return TestResult(name, d, allowance, int(np.size(sample)), provenance, theorem,
                      {"law": law.to_dict()})


def _threshold(se: float, k_sigma: float, allowance: float, rel: float, target: float, mode: str) -> float:
    parts = (k_sigma * se, allowance, rel * abs(target))
    if mode == "max":
        return max(parts)
    if mode == "add":
        return sum(parts)
    raise ParameterError(f"threshold mode must be 'add' or 'max', got {mode!r}")


def moment_check(stats: EnsembleStats, target: float, order: int = 1, k_sigma: float = 4.0,
                 allowance: float = 0.0, rel_allowance: float = 0.0, mode: str = "add",
                 name: str = "moment", provenance: str = "", theorem: str | None = None) -> TestResult:
    """|empirical E(Z^order) - target| against k_sigma * SE plus allowances.

    ``mode='add'`` sums the SE band and the allowances; ``'max'`` takes the
    largest of them (the "within max(4 SE, 2%)" style).
    """
    if order not in (1, 2):
        raise ParameterError("moment_check supports order 1 or 2")
    if stats.count < MIN_MOMENT_COUNT:
        raise ParameterError(f"moment_check needs at least {MIN_MOMENT_COUNT} values, got {stats.count}")
    emp = stats.raw_moment(order)
    se = stats.raw_moment_se(order)
    thr = _threshold(se, k_sigma, allowance, rel_allowance, target, mode)
    return TestResult(name, abs(emp - target), thr, stats.count, provenance, theorem,
                      {"empirical": emp, "target": target, "se": se, "order": order,
                       "k_sigma": k_sigma, "allowance": allowance, "rel_allowance": rel_allowance})


def variance_check(stats: EnsembleStats, target: float, k_sigma: float = 4.0,
                   allowance: float = 0.0, rel_allowance: float = 0.0, mode: str = "add",
                   name: str = "variance", provenance: str = "", theorem: str | None = None) -> TestResult:
    if stats.count < MIN_MOMENT_COUNT:
        raise ParameterError(f"variance_check needs at least {MIN_MOMENT_COUNT} values, got {stats.count}")
    emp = stats.variance
    se = stats.se_variance
    thr = _threshold(se, k_sigma, allowance, rel_allowance, target, mode)
    return TestResult(name, abs(emp - target), thr, stats.count, provenance, theorem,
                      {"empirical": emp, "target": target, "se": se, "k_sigma": k_sigma,
                       "allowance": allowance, "rel_allowance": rel_allowance})


def value_check(name: str, value: float, target: float, abs_tol: float = 0.0, rel_tol: float = 0.0,
                provenance: str = "", theorem: str | None = None, sample_size: int = 0,
                details: dict | None = None) -> TestResult:
    """Deterministic comparison: |value - target| <= abs_tol + rel_tol * |target|."""
    info = {"value": value, "target": target, "abs_tol": abs_tol, "rel_tol": rel_tol}
    info.update(details or {})
    return TestResult(name, abs(value - target), abs_tol + rel_tol * abs(target), sample_size,
                      provenance, theorem, info)


def discrete_cluster_check(sample, atoms: Sequence[tuple[float, float]], epsilon: float,
                           slack: float = 1e-3, k_sigma: float = 4.0, name: str = "clusters",
                           provenance: str = "", theorem: str | None = None) -> TestResult:
    """Assign points to the atom within ``epsilon`` and compare class frequencies.

    The statistic is the largest of |f_j - w_j| / (k_sigma sqrt(w_j (1-w_j)/m))
    over the atoms and (unclassified fraction) / slack; the check passes when
    it is at most 1.
    """
    x = np.asarray(sample, dtype=np.float64).ravel()
    m = x.size
    if m == 0:
        raise ParameterError("cluster check needs a non-empty sample")
    locs = np.array([a for a, _ in atoms], dtype=np.float64)
    weights = np.array([w for _, w in atoms], dtype=np.float64)
    order = np.argsort(locs)
    locs, weights = locs[order], weights[order]
    if np.any(np.diff(locs) <= 2.0 * epsilon):
        raise ParameterError(f"atoms closer than 2*epsilon = {2 * epsilon}; the epsilon-balls overlap")
    dist = np.abs(x[:, None] - locs[None, :])
    nearest = dist.argmin(axis=1)
    hit = dist[np.arange(m), nearest] <= epsilon
    freq = np.bincount(nearest[hit], minlength=locs.size) / m
    unclassified = 1.0 - hit.mean()
    ratios = []
    for f, w in zip(freq, weights):
        band = k_sigma * math.sqrt(w * (1.0 - w) / m)
        if band == 0.0:
            ratios.append(0.0 if f == w else math.inf)
        else:
            ratios.append(abs(f - w) / band)
    slack_ratio = unclassified / slack if slack > 0 else (0.0 if unclassified == 0 else math.inf)
    stat = max(max(ratios), slack_ratio)
    return TestResult(name, stat, 1.0, m, provenance, theorem,
                      {"atoms": [[float(a), float(w)] for a, w in zip(locs, weights)],
                       "frequencies": freq.tolist(), "band_ratios": ratios,
                       "unclassified": unclassified, "epsilon": epsilon, "slack": slack})


def tau_histogram(tau_values) -> dict[int, int]:
    vals, counts = np.unique(np.asarray(tau_values, dtype=np.int64), return_counts=True)
    return {int(v): int(c) for v, c in zip(vals, counts)}


def geometric_fit(tau_counts, r: float, censored: int = 0, alpha: float = 1e-3,
                  name: str = "geometric_fit", provenance: str = "",
                  theorem: str | None = None) -> TestResult:
    """Chi-square test of P(tau = n) = r (1 - r)^(n - 1).

    Buckets run n = 1, 2, ... while the expected count is at least 5; the rest
    of the support, censored replicas included, forms one tail bucket.
    """
    if isinstance(tau_counts, Mapping):
        counts = dict(tau_counts)
    else:
        counts = {i + 1: c for i, c in enumerate(tau_counts)}
    if any(k < 1 for k in counts):
        raise ParameterError("tau takes values n >= 1")
    total = float(sum(counts.values())) + censored
    if total < MIN_GEOMETRIC_COUNT:
        raise ParameterError(f"geometric_fit needs at least {MIN_GEOMETRIC_COUNT} observations")
    if not 0.0 < r < 1.0:
        raise ParameterError("geometric_fit needs 0 < r < 1")
    obs, exp = [], []
    k = 1
    while total * r * (1.0 - r) ** (k - 1) >= 5.0 and total * (1.0 - r) ** k >= 5.0:
        obs.append(float(counts.get(k, 0)))
        exp.append(total * r * (1.0 - r) ** (k - 1))
        k += 1
    obs.append(float(sum(c for j, c in counts.items() if j >= k) + censored))
    exp.append(total * (1.0 - r) ** (k - 1))
    obs_a, exp_a = np.array(obs), np.array(exp)
    chi2 = float(((obs_a - exp_a) ** 2 / exp_a).sum())
    df = len(obs) - 1
    crit = float(sps.chi2.ppf(1.0 - alpha, df)) if df > 0 else 0.0
    return TestResult(name, chi2, crit, int(total), provenance, theorem,
                      {"buckets": len(obs), "df": df, "alpha": alpha, "r": r, "censored": censored,
                       "p_value": float(sps.chi2.sf(chi2, df)) if df > 0 else 1.0})
