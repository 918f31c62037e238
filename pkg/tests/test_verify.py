import json

import numpy as np
import pytest
from scipy import stats as sps

from erwd import EnsembleStats, ParameterError
from erwd.analytic import Gaussian, MixtureLaw, PointMass, exact_moments
from erwd.mc import McConfig, run
from erwd.verify import (
    TestResult,
    assemble_report,
    discrete_cluster_check,
    geometric_fit,
    ks_mixed,
    moment_check,
    value_check,
    variance_check,
)
from erwd.verify.stats import tau_histogram


def gauss(mean=0.0, var=1.0):
    return MixtureLaw(((1.0, Gaussian(mean, var)),))


def test_ks_exact_quantiles():
    m = 1000
    law = MixtureLaw(((0.7, Gaussian(0.0, 2.0)), (0.3, PointMass(0.5))))
    sample = [law.quantile((i - 0.5) / m) for i in range(1, m + 1)]
    assert ks_mixed(sample, law) <= 1.0 / m + 1e-9


def test_ks_point_mass():
    assert ks_mixed(np.zeros(100), MixtureLaw.point(0.0)) == 0.0


def test_ks_shifted_gaussian():
    m = 10 ** 5
    sample = sps.norm.ppf((np.arange(1, m + 1) - 0.5) / m)
    expected = sps.norm.cdf(0.05) - sps.norm.cdf(-0.05)
    assert ks_mixed(sample, gauss(0.1)) == pytest.approx(expected, abs=1e-3)


def test_ks_detects_missing_atom():
    law = MixtureLaw(((0.5, Gaussian(0.0, 1.0)), (0.5, PointMass(0.0))))
    sample = sps.norm.ppf((np.arange(1, 2001) - 0.5) / 2000)
    assert ks_mixed(sample, law) == pytest.approx(0.25, abs=1e-3)


def test_ks_empty_sample():
    with pytest.raises(ParameterError):
        ks_mixed([], gauss())


def test_moment_check_self_consistency(base):
    n, m = 2000, 20000
    stats = run(McConfig(base, "full", None, "three-point", n, m, 3, "sn-over-sqrt-n"))
    target = exact_moments(base, "full", None, "three-point", n).second_moment[-1] / n
    res = moment_check(stats, target, order=2, k_sigma=4)
    assert res.passed and res.details["target"] == target


def test_moment_check_needs_sample():
    with pytest.raises(ParameterError):
        moment_check(EnsembleStats.from_values(np.ones(10)), 1.0)


def test_variance_check_modes():
    rng = np.random.default_rng(0)
    stats = EnsembleStats.from_values(rng.normal(0, np.sqrt(0.0304), 10 ** 5))
    assert variance_check(stats, 0.0304).passed
    assert not variance_check(stats, 0.04).passed
    # a 40% relative allowance swallows the same gap
    assert variance_check(stats, 0.04, rel_allowance=0.4, mode="max").passed
    with pytest.raises(ParameterError):
        variance_check(stats, 0.04, mode="other")


def test_value_check():
    assert value_check("v", 1.0, 1.0 + 1e-13, abs_tol=1e-12).passed
    assert not value_check("v", 1.0, 1.1, rel_tol=0.05).passed


def test_cluster_exact_sample():
    atoms = [(-0.2, 0.3), (0.0, 0.2), (0.2, 0.5)]
    sample = np.repeat([-0.2, 0.0, 0.2], [300, 200, 500])
    res = discrete_cluster_check(sample, atoms, epsilon=0.05)
    assert res.passed and res.details["unclassified"] == 0.0


def test_cluster_detects_wrong_weights():
    atoms = [(-0.2, 0.3), (0.0, 0.2), (0.2, 0.5)]
    sample = np.repeat([-0.2, 0.0, 0.2], [5000, 2000, 3000])
    assert not discrete_cluster_check(sample, atoms, epsilon=0.05).passed


def test_cluster_detects_stray_points():
    atoms = [(0.0, 0.5), (1.0, 0.5)]
    sample = np.concatenate([np.zeros(500), np.ones(490), np.full(10, 0.5)])
    assert not discrete_cluster_check(sample, atoms, epsilon=0.1).passed


def test_cluster_overlap_is_usage_error():
    with pytest.raises(ParameterError):
        discrete_cluster_check([0.0], [(0.0, 0.5), (0.1, 0.5)], epsilon=0.05)


def test_geometric_exact_counts():
    r, total = 0.2, 10 ** 6
    counts = {k: total * r * (1 - r) ** (k - 1) for k in range(1, 200)}
    res = geometric_fit(counts, r)
    assert res.statistic == pytest.approx(0.0, abs=1e-6)


def test_geometric_simulated_pass():
    draws = np.random.default_rng(8).geometric(0.2, 10 ** 6)
    assert geometric_fit(tau_histogram(draws), 0.2).passed


def test_geometric_power():
    draws = np.random.default_rng(8).geometric(0.25, 10 ** 6)
    assert not geometric_fit(tau_histogram(draws), 0.2).passed


def test_geometric_small_sample_rejected():
    with pytest.raises(ParameterError):
        geometric_fit({1: 10, 2: 5}, 0.2)


def _result(name, ok):
    return TestResult(name, 0.0 if ok else 2.0, 1.0, 10, "unit")


def test_report_empty():
    rep = assemble_report([])
    assert rep.passed and rep.failures == []
    assert json.loads(rep.to_json())["results"] == []
    assert rep.to_csv().strip() == "name,theorem,statistic,threshold,passed,sample_size,provenance"


def test_report_single_pass():
    rep = assemble_report([_result("a", True)], {"seed": 1}, seed=1)
    assert rep.passed
    assert rep.to_dict()["fingerprint"]["seed"] == 1


def test_report_mixed():
    rep = assemble_report([_result("a", True), _result("b", False), _result("c", False)])
    assert not rep.passed and rep.failures == ["b", "c"]
    rows = rep.to_csv().strip().splitlines()
    assert len(rows) == 4 and rows[2].startswith("b,")


def test_report_is_byte_stable():
    results = [_result("a", True), TestResult("b", np.float64(0.5), 1.0, 3, "x", details={"k": np.int64(2)})]
    assert assemble_report(results, seed=4).to_json() == assemble_report(results, seed=4).to_json()
