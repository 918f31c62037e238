import math

import numpy as np
import pytest
from scipy import stats as sps

from erwd import DomainError, ModelParams, UnsupportedModelError
from erwd.analytic import (
    Gaussian,
    LimitTheoremId,
    MixtureLaw,
    PointMass,
    exact_moments,
    last_step_formulas,
    limit_constants,
    limit_law,
)
from erwd.analytic.limits import finite_law, sigma_t2_chain, sigma_t2_closed

T = LimitTheoremId


def test_mixture_cdf_at_atom():
    law = MixtureLaw(((0.8, Gaussian(0.0, 4 / 3)), (0.2, PointMass(0.0))))
    assert law.cdf(0.0) == pytest.approx(0.6)
    assert law.cdf_left(0.0) == pytest.approx(0.4)
    assert law.moment(0) == pytest.approx(1.0)
    assert law.moment(2) == pytest.approx(0.8 * 4 / 3)


def test_mixture_quantile_plateau_left_end():
    law = MixtureLaw(((0.5, PointMass(0.0)), (0.5, PointMass(1.0))))
    assert law.quantile(0.5) == 0.0
    assert law.quantile(0.5000001) == 1.0
    with pytest.raises(DomainError):
        law.quantile(1.0)


def test_mixture_quantile_inverts_gaussian_part():
    law = MixtureLaw(((0.7, Gaussian(1.0, 2.0)), (0.3, PointMass(-1.0))))
    for u in (0.05, 0.2, 0.5, 0.9, 0.999):
        x = law.quantile(u)
        assert law.cdf_left(x) <= u + 1e-12 and law.cdf(x) >= u - 1e-12


def test_mixture_weights_must_sum_to_one():
    with pytest.raises(DomainError):
        MixtureLaw(((0.5, PointMass(0.0)),))
    with pytest.raises(DomainError):
        Gaussian(0.0, -1.0)


def test_mixture_moments_of_gaussian():
    law = MixtureLaw(((1.0, Gaussian(0.5, 2.0)),))
    assert law.moment(3) == pytest.approx(sps.norm(0.5, math.sqrt(2)).moment(3))
    assert law.moment(4) == pytest.approx(sps.norm(0.5, math.sqrt(2)).moment(4))


def test_t41a_shape(base):
    law = limit_law(base, T.T41a)
    assert law.cdf(-1e9) == 0.0 and law.cdf(1e9) == pytest.approx(1.0)
    assert math.fsum(w for w, _ in law.components) == pytest.approx(1.0, abs=1e-15)
    assert law.atoms == [(0.0, pytest.approx(0.2))]
    assert sum(w for w, _ in law.gaussians) == pytest.approx(0.8)
    assert all(g.mean == 0 and g.variance == pytest.approx(0.8 / 0.6) for _, g in law.gaussians)


def test_t41a_matches_exact_variance_growth(base):
    n = 10 ** 6
    s = exact_moments(base, "full", None, "three-point", n)
    assert s.second_moment[-1] / n == pytest.approx(limit_law(base, T.T41a).moment(2), rel=2e-3)


def test_t41c_constants(superdiffusive):
    c = limit_constants(superdiffusive, T.T41c)
    assert c["EL"] == pytest.approx(0.75 / math.gamma(1.75), rel=1e-12)
    assert c["EL"] == pytest.approx(0.81606, abs=2e-5)
    assert c["EL2_printed"] == pytest.approx(1.91823, abs=5e-5)


def test_t41c_second_moment_from_recursion(superdiffusive):
    # E(S_n^2) / n^(2d) along the exact recursion settles on the zero-start value
    d = superdiffusive.drift
    n = 10 ** 6
    s = exact_moments(superdiffusive, "full", None, "three-point", n)
    c = limit_constants(superdiffusive, T.T41c)
    assert s.second_moment[-1] / n ** (2 * d) == pytest.approx(c["EL2_zero_start"], rel=5e-3)


def test_constraint_violations(base, superdiffusive):
    with pytest.raises(DomainError):
        limit_constants(base, T.T41c)
    with pytest.raises(DomainError):
        limit_law(superdiffusive, T.T41a)
    with pytest.raises(DomainError):
        limit_law(base, T.T41b)
    with pytest.raises(UnsupportedModelError):
        limit_law(base, T.T41a, policy="propagate")
    with pytest.raises(DomainError):
        limit_constants(ModelParams(0.5, 0.5, 0.0, allow_boundary=True), T.T72)


def test_theorem_id_parse():
    assert LimitTheoremId.parse("t43critical") is T.T43critical
    assert T.T52.regime.value == "first-step"
    with pytest.raises(ValueError):
        LimitTheoremId.parse("T99")


def test_t72_and_t81_constants(base):
    assert limit_constants(base, T.T72)["mean_S_tau"] == pytest.approx(0.25)
    assert limit_constants(base, T.T72)["mean_tau"] == pytest.approx(5.0)
    assert limit_constants(base, T.T81)["mean"] == pytest.approx(0.04 / 1.8)


def test_t52_atoms(base):
    law = limit_law(base, T.T52)
    assert law.atoms == [(-0.2, pytest.approx(0.3)), (0.0, pytest.approx(0.2)), (0.2, pytest.approx(0.5))]
    assert law.mean == pytest.approx(0.04)
    assert law.variance == pytest.approx(0.0304)


@pytest.mark.parametrize("p,q", [(0.5, 0.3), (0.2, 0.6), (0.45, 0.45), (0.7, 0.1), (0.1, 0.1)])
def test_t61a_mixture_matches_closed_form(p, q):
    params = ModelParams(p, q, 1 - p - q)
    law = limit_law(params, T.T61a)
    d = p - q
    mean = d * d * (1 + d) / 2
    c = limit_constants(params, T.T61a)
    assert law.mean == pytest.approx(mean, abs=1e-12)
    assert law.mean == pytest.approx(c["mean"], abs=1e-12)
    assert law.variance == pytest.approx(c["variance"], abs=1e-12)


def test_t61a_five_atoms(base):
    p, q, r, d = 0.5, 0.3, 0.2, 0.2
    got = limit_law(base, T.T61a).atoms
    want = [(-d, p * q), (-d / 2, q * r), (0.0, p * q + q * q + r), (d / 2, p * r), (d, p * p)]
    assert [loc for loc, _ in got] == pytest.approx([loc for loc, _ in want])
    assert [w for _, w in got] == pytest.approx([w for _, w in want])


MIRROR_CASES = [(T.T41a, ModelParams(0.5, 0.3, 0.2)), (T.T41b, ModelParams(0.6, 0.1, 0.3)),
                (T.T52, ModelParams(0.5, 0.3, 0.2)), (T.T53a, ModelParams(0.5, 0.3, 0.2)),
                (T.T61a, ModelParams(0.5, 0.3, 0.2)), (T.T62a, ModelParams(0.5, 0.3, 0.2)),
                (T.T81, ModelParams(0.5, 0.3, 0.2))]


@pytest.mark.parametrize("tid,params", MIRROR_CASES)
def test_first_step_reflection(tid, params):
    # flipping X1 flips the whole walk, so the limit from -1 mirrors the one from +1
    plus = limit_law(params, tid, init="plus-one")
    minus = limit_law(params, tid, init="minus-one")
    x = np.linspace(-2, 2, 81) + 1e-7  # continuity points
    assert np.allclose(minus.cdf(x), 1.0 - plus.cdf_left(-x), atol=1e-12)


@pytest.mark.parametrize("tid,params", MIRROR_CASES)
def test_three_point_is_branch_mixture(tid, params):
    law = limit_law(params, tid)
    plus = limit_law(params, tid, init="plus-one")
    minus = limit_law(params, tid, init="minus-one")
    x = np.linspace(-2, 2, 81) + 1e-7
    mix = params.p * plus.cdf(x) + params.q * minus.cdf(x) + params.r * (x >= 0)
    assert np.allclose(law.cdf(x), mix, atol=1e-12)


def test_swapping_p_and_q_is_not_a_reflection():
    # the drift enters the branch law itself, not just its sign
    law = limit_law(ModelParams(0.5, 0.3, 0.2), T.T41a)
    swapped = limit_law(ModelParams(0.3, 0.5, 0.2), T.T41a)
    assert law.variance != pytest.approx(swapped.variance)


@pytest.mark.parametrize("tid", [T.T41a, T.T52, T.T61a, T.T72, T.T81, T.T82])
def test_reparametrization_invariance(tid):
    p, r = 0.45, 0.25
    a = limit_constants(ModelParams(p, 1 - p - r, r), tid)
    b = limit_constants(ModelParams.from_pr(p, r), tid)
    assert a.keys() == b.keys()
    for k in a:
        assert a[k] == pytest.approx(b[k], rel=1e-12, abs=1e-15)


def test_t43_law(base):
    y = {-2: 1 / 3, 0: 1 / 3, 1: 1 / 3}
    law = limit_law(base, T.T43, f_y=y)
    v = 0.8 / 0.6
    assert dict(law.atoms)[0.0] == pytest.approx(1 / 3)
    variances = sorted(g.variance for _, g in law.gaussians)
    assert variances == pytest.approx([v, 4 * v])
    with pytest.raises(Exception):
        limit_law(base, T.T43)


def test_sigma_t2_chain_matches_closed_form(base):
    assert sigma_t2_chain(base)["sigma_T2"] == pytest.approx(sigma_t2_closed(base), rel=1e-12)
    assert limit_constants(base, T.T82)["sigma_T2"] == pytest.approx(0.9626886, abs=1e-7)


def test_finite_law_validation():
    with pytest.raises(Exception):
        finite_law({1: 0.5})
    assert finite_law([(1, 0.25), (2, 0.75)]) == {1.0: 0.25, 2.0: 0.75}


def test_last_step_formulas(base):
    f = last_step_formulas(base, 1)
    assert f.p_tau_n == pytest.approx(0.2)
    assert f.mean_tau == pytest.approx(5.0)
    assert f.tilde_p == pytest.approx(0.625)
    for n in (1, 3, 40):
        assert last_step_formulas(base, n).mean_tilde_t == pytest.approx((1 - 0.25 ** n) / 0.75)
    assert last_step_formulas(ModelParams(0.35, 0.35, 0.3), 4).mean_s_tau == 0.0
    with pytest.raises(DomainError):
        last_step_formulas(ModelParams(0.6, 0.4, 0.0, allow_boundary=True), 3)
