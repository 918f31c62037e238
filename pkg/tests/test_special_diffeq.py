import math

import mpmath
import numpy as np
import pytest

from erwd import DomainError, ModelParams
from erwd.analytic import (
    DiffEqSpec,
    Diffusivity,
    classify,
    log_gamma_ratio,
    martingale_weight,
    nu_asymptote,
    nu_limit,
    nu_n,
    solve_first_order,
)
from erwd.analytic.diffeq import iterate_first_order


def test_martingale_weight_examples(critical):
    assert martingale_weight(critical, 1) == pytest.approx(1.0, rel=1e-14)
    assert martingale_weight(critical, 2) == pytest.approx(2 / 3, rel=1e-14)
    assert martingale_weight(critical, 3) == pytest.approx(8 / 15, rel=1e-14)


@pytest.mark.parametrize("x", [0.5, 3.0, 40.0, 1e3, 1e6, 1e9])
@pytest.mark.parametrize("a", [-0.7, 0.2, 0.75])
def test_log_gamma_ratio_against_mpmath(x, a):
    if x + a <= 0:
        with pytest.raises(DomainError):
            log_gamma_ratio(x, a)
        return
    mpmath.mp.dps = 40
    ref = float(mpmath.loggamma(mpmath.mpf(x) + a) - mpmath.loggamma(x))
    assert log_gamma_ratio(x, a) == pytest.approx(ref, rel=1e-13, abs=1e-15)


def test_martingale_weight_large_n_no_overflow():
    params = ModelParams(0.8, 0.05, 0.15)
    w = martingale_weight(params, np.array([1e9]))
    mpmath.mp.dps = 40
    ref = mpmath.gamma(1.75) * mpmath.exp(mpmath.loggamma(1e9) - mpmath.loggamma(1e9 + 0.75))
    assert float(w[0]) == pytest.approx(float(ref), rel=1e-12)


def test_martingale_weight_is_product_of_inverse_gammas(base):
    d = base.drift
    n = np.arange(1, 200)
    prod = np.concatenate([[1.0], np.cumprod(1.0 / (1.0 + d / n[:-1]))])
    assert np.allclose(martingale_weight(base, n), prod, rtol=1e-12)


def test_nu_n_first_term(base):
    assert nu_n(base, 1) == pytest.approx(1.0)


def test_nu_n_diffusive_asymptote(base):
    kind, value = nu_asymptote(base, 10 ** 6)
    assert kind is Diffusivity.DIFFUSIVE
    assert 0.99 <= nu_n(base, 10 ** 6) / value <= 1.01


def test_nu_n_superdiffusive_bounded():
    params = ModelParams(0.85, 0.1, 0.05)
    assert classify(params) is Diffusivity.SUPERDIFFUSIVE
    a, b = nu_n(params, 10 ** 5), nu_n(params, 2 * 10 ** 5)
    assert a < b
    # the increments shrink like n^(1 - 2d); the bound is finite
    limit = nu_limit(params)
    assert b < limit
    assert limit - nu_n(params, 10 ** 6) < 1e-3 * limit
    kind, value = nu_asymptote(params, 10)
    assert kind is Diffusivity.SUPERDIFFUSIVE and value == pytest.approx(limit)


def test_critical_classification(critical):
    kind, value = nu_asymptote(critical, 1000)
    assert kind is Diffusivity.CRITICAL
    assert value == pytest.approx(math.pi / 4 * math.log(1000))


def test_diffeq_constant_forcing():
    spec = DiffEqSpec(a=0.5, b=1.0)
    assert solve_first_order(spec, 2)[0] == pytest.approx(1.0)
    assert solve_first_order(spec, 3)[0] == pytest.approx(1.5)
    exact, asym = solve_first_order(spec, 60)
    assert asym == 2.0 and exact == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize("gamma", [0.0, 0.5, 1.0, 2.0])
def test_diffeq_memoryless(gamma):
    spec = DiffEqSpec(a=0.0, b=1.0, gamma=gamma, x1=3.0)
    for n in range(2, 12):
        assert solve_first_order(spec, n)[0] == pytest.approx((n - 1.0) ** gamma)


def test_diffeq_linear_forcing_asymptote():
    spec = DiffEqSpec(a=0.5, b=1.0, gamma=1.0)
    exact, asym = solve_first_order(spec, 10 ** 4)
    assert abs(exact - asym) / abs(exact) <= 1e-3


def test_diffeq_closed_sum_matches_iteration():
    spec = DiffEqSpec(a=-0.3, b=2.0, gamma=0.7, x1=1.5)
    for n in (1, 2, 5, 40):
        assert solve_first_order(spec, n)[0] == pytest.approx(iterate_first_order(spec, n), rel=1e-12)


def test_diffeq_asymptote_domain():
    exact, asym = solve_first_order(DiffEqSpec(a=1.0, b=1.0), 5)
    assert exact == pytest.approx(4.0) and asym is None
    from erwd.analytic import asymptotic_value

    with pytest.raises(DomainError):
        asymptotic_value(DiffEqSpec(a=-1.2, b=1.0), 5)
