"""Limit constants and limit laws for every regime.

Each law is assembled from the law B of the walk started at X1 = +1:
the kernels are odd and a walk started at 0 never moves, so the walk with a
three-point first step has limit p*B + q*reflect(B) + r*delta_0.
"""
from __future__ import annotations

import enum
import math
from collections.abc import Mapping
from dataclasses import dataclass

from scipy import special as sp

from ..model import (
    PROB_TOL,
    DomainError,
    InitialLaw,
    MemoryRegime,
    ModelParams,
    ParameterError,
    UnsupportedModelError,
    ZeroRecallPolicy,
    resolve_policy,
)
from .mixture import Gaussian, MixtureLaw, PointMass
from .moments import exact_moments, first_and_last_chain
from .special import CRITICAL_TOL


class LimitTheoremId(enum.Enum):
    T41a = "T41a"
    T41b = "T41b"
    T41c = "T41c"
    T43 = "T43"
    T43critical = "T43critical"
    T52 = "T52"
    T53a = "T53a"
    T61a = "T61a"
    T62a = "T62a"
    T72 = "T72"
    T81 = "T81"
    T82 = "T82"

    @classmethod
    def parse(cls, value) -> "LimitTheoremId":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        for member in cls:
            if member.value.lower() == key:
                return member
        raise ParameterError(f"unknown theorem id {value!r}; expected one of: "
                             + ", ".join(m.value for m in cls))

    @property
    def regime(self) -> MemoryRegime:
        return THEOREM_REGIME[self]


THEOREM_REGIME = {
    LimitTheoremId.T41a: MemoryRegime.FULL,
    LimitTheoremId.T41b: MemoryRegime.FULL,
    LimitTheoremId.T41c: MemoryRegime.FULL,
    LimitTheoremId.T43: MemoryRegime.FULL,
    LimitTheoremId.T43critical: MemoryRegime.FULL,
    LimitTheoremId.T52: MemoryRegime.FIRST_STEP,
    LimitTheoremId.T53a: MemoryRegime.FIRST_STEP,
    LimitTheoremId.T61a: MemoryRegime.FIRST_TWO,
    LimitTheoremId.T62a: MemoryRegime.FIRST_TWO,
    LimitTheoremId.T72: MemoryRegime.LAST_STEP,
    LimitTheoremId.T81: MemoryRegime.FIRST_AND_LAST,
    LimitTheoremId.T82: MemoryRegime.FIRST_AND_LAST,
}

# ids whose limit is a set of constants rather than a mixture law
CONSTANT_ONLY = (LimitTheoremId.T41c, LimitTheoremId.T72)


def finite_law(table) -> dict[float, float]:
    """Validate a finite discrete law given as {value: prob} or (value, prob) pairs."""
    items = table.items() if isinstance(table, Mapping) else table
    law: dict[float, float] = {}
    for value, prob in items:
        prob = float(prob)
        if prob < 0.0:
            raise ParameterError(f"P(Y={value}) = {prob} is negative")
        law[float(value)] = law.get(float(value), 0.0) + prob
    if not law:
        raise ParameterError("the law of Y needs at least one value")
    total = math.fsum(law.values())
    if abs(total - 1.0) > PROB_TOL:
        raise ParameterError(f"probabilities of Y sum to {total!r}, not 1")
    return law


# -- constraints -----------------------------------------------------------------

def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def _check(params: ModelParams, tid: LimitTheoremId) -> None:
    d = params.drift
    if tid in (LimitTheoremId.T41a, LimitTheoremId.T43):
        _require(d < 0.5 - CRITICAL_TOL, f"{tid.value} needs p - q < 1/2, got {d}")
    elif tid in (LimitTheoremId.T41b, LimitTheoremId.T43critical):
        _require(abs(d - 0.5) <= CRITICAL_TOL, f"{tid.value} needs p - q = 1/2, got {d}")
    elif tid is LimitTheoremId.T41c:
        _require(d > 0.5 + CRITICAL_TOL, f"{tid.value} needs p - q > 1/2, got {d}")
    elif tid is LimitTheoremId.T72:
        _require(params.r > 0.0, "T72 needs r > 0 (tau is undefined otherwise)")


def _full_policy_guard(tid: LimitTheoremId, policy: ZeroRecallPolicy) -> None:
    # with zeros propagating, E(Q_n) = o(n) and the sqrt(n) limits degenerate
    if policy is ZeroRecallPolicy.PROPAGATE:
        raise UnsupportedModelError(
            f"{tid.value} is stated for the symmetric-resample policy; under propagate "
            "the number of non-zero steps is o(n)")


# -- constants -------------------------------------------------------------------

def first_and_last_drift(params: ModelParams) -> float:
    """Limit of E(X_n) and of T_n/n in the first-and-last regime: (p-q)/(2+q-p)."""
    d = params.drift
    return d / (2.0 - d)


def sigma_t2_chain(params: ModelParams) -> dict[str, float]:
    """Var(T_n)/n for the first-and-last walk, assembled term by term.

    E(T_n) = n e + m0 + o(1) and E(T_n X_n) = n e^2 + k0 + o(1) give
    E(T_n^2) = n^2 e^2 + n (e^2 + 2 k0 - (p+q)) + o(n), so the slope of the
    variance is e^2 + 2 k0 - (p+q) - 2 e m0.  The constant k0 uses (2+q-p)^3
    in both places it appears.
    """
    d, c = params.drift, params.activity
    e = d / (2.0 - d)
    m0 = 4.0 * (1.0 - d) / (2.0 - d) ** 2
    k0 = 2.0 * d * (2.0 - 3.0 * d) / (2.0 - d) ** 3 + 2.0 * c / (2.0 - d)
    sigma2 = e * e + 2.0 * k0 - c - 2.0 * e * m0
    return {"mean_slope": e, "mean_offset": m0, "cross_slope": e * e,
            "cross_offset": k0, "sigma_T2": sigma2}


def sigma_t2_closed(params: ModelParams) -> float:
    """(1 + 2e)(p + q - e^2) with e = (p-q)/(2+q-p); symmetric resample only."""
    e = first_and_last_drift(params)
    return (1.0 + 2.0 * e) * (params.activity - e * e)


def sigma_t2_printed(params: ModelParams) -> float:
    """The final printed display, kept as documentation of the closed form."""
    d, c = params.drift, params.activity
    return c + d / (2.0 - d) ** 3 * (d * (-2.0 - d) + 2.0 * c * (2.0 - d) ** 2)


def sigma_t2_recursion(params: ModelParams, policy: ZeroRecallPolicy, n_max: int = 512) -> float:
    """Var(T_n) - Var(T_{n-1}) at large n from the exact recursion.

    The increment converges geometrically (rate at most 1/2), so 512 terms
    reach double precision for any interior parameters.
    """
    var = first_and_last_chain(params, policy, n_max)["variance"]
    return float(var[-1] - var[-2])


def diffusive_scale(params: ModelParams) -> float:
    """lim E(T_n^2)/n for the full-memory walk started at +1: (p+q)/(1-2(p-q))."""
    return params.activity / (1.0 - 2.0 * params.drift)


def t43_scale_from_recursion(params: ModelParams, n: int) -> float:
    """E(T_n^2)/n from the exact recursion for the walk with X1 = +1."""
    series = exact_moments(params, MemoryRegime.FULL, ZeroRecallPolicy.SYMMETRIC_RESAMPLE,
                           InitialLaw.PLUS_ONE, n)
    return float(series.second_moment[-1] / n)


def superdiffusive_moments(params: ModelParams) -> dict[str, float]:
    """First two moments of L = lim S_n / n^(p-q) for p - q > 1/2.

    ``EL2_zero_start`` is the value implied by the exact second-moment
    recursion when a first step 0 freezes the walk; ``EL2_printed`` is the
    stated closed form, which matches a walk where X1 = 0 is not absorbing.
    """
    d, c = params.drift, params.activity
    el = d / math.exp(sp.gammaln(1.0 + d))
    el_t = 1.0 / math.exp(sp.gammaln(1.0 + d))
    el2_printed = c / ((2.0 * d - 1.0) * math.exp(sp.gammaln(2.0 * d)))
    el2_t = (2.0 * d - 1.0 + c) / ((2.0 * d - 1.0) * math.exp(sp.gammaln(1.0 + 2.0 * d)))
    return {"EL": el, "EL2_printed": el2_printed, "EL2_zero_start": c * el2_t,
            "EL_plus_one": el_t, "EL2_plus_one": el2_t}


def limit_constants(params: ModelParams, theorem, policy=None) -> dict[str, float]:
    """Named limit constants of a theorem id."""
    tid = LimitTheoremId.parse(theorem)
    _check(params, tid)
    d, c, p, q, r = params.drift, params.activity, params.p, params.q, params.r
    if tid is LimitTheoremId.T41a:
        v = diffusive_scale(params)
        return {"branch_variance": v, "second_moment": c * v, "atom_weight": r}
    if tid is LimitTheoremId.T41b:
        return {"branch_variance": c, "second_moment": c * c, "atom_weight": r}
    if tid is LimitTheoremId.T41c:
        return superdiffusive_moments(params)
    if tid is LimitTheoremId.T43:
        return {"v_default": diffusive_scale(params), "v_printed_43": 1.0 / (1.0 - 2.0 * d),
                "v_41a": diffusive_scale(params)}
    if tid is LimitTheoremId.T43critical:
        return {"v_default": c, "v_printed": c}
    if tid is LimitTheoremId.T52:
        return {"mean": d * d, "variance": d * d * (c - d * d)}
    if tid is LimitTheoremId.T53a:
        return {"branch_variance": 1.0, "atom_weight": r, "scale": c - d * d}
    if tid is LimitTheoremId.T61a:
        mean = d * d * (1.0 + d) / 2.0
        var = d * d / 4.0 * (c * (1.0 + 3.0 * p - q) - d * d * (1.0 + d) ** 2)
        return {"mean": mean, "variance": var}
    if tid is LimitTheoremId.T62a:
        return {"var_same": c - d * d, "var_delayed": c / 2.0 - d * d / 4.0, "var_opposite": c}
    if tid is LimitTheoremId.T72:
        out = {"mean_tau": 1.0 / r, "mean_S_tau": d / (1.0 - d)}
        return out
    e = first_and_last_drift(params)
    if tid is LimitTheoremId.T81:
        return {"atom": e, "mean": d * e, "variance": e * e * (c - d * d)}
    pol = resolve_policy(MemoryRegime.FIRST_AND_LAST, policy)
    chain = sigma_t2_chain(params)
    return {"sigma_T2": chain["sigma_T2"], "sigma_T2_closed": sigma_t2_closed(params),
            "sigma_T2_printed": sigma_t2_printed(params),
            "sigma_T2_recursion": sigma_t2_recursion(params, pol), "centering_slope": e}


# -- laws ------------------------------------------------------------------------

def _gauss(v: float) -> MixtureLaw:
    return MixtureLaw(((1.0, Gaussian(0.0, v)),))


def _atoms(pairs) -> MixtureLaw:
    return MixtureLaw(tuple((w, PointMass(x)) for x, w in pairs))


def branch_law(params: ModelParams, theorem, policy=None) -> MixtureLaw:
    """Limit law of the normalized walk started at X1 = +1."""
    tid = LimitTheoremId.parse(theorem)
    _check(params, tid)
    pol = resolve_policy(tid.regime, policy)
    d, c, p, q, r = params.drift, params.activity, params.p, params.q, params.r
    if tid in CONSTANT_ONLY:
        raise UnsupportedModelError(f"{tid.value} has no closed-form limit law; see limit_constants")
    if tid in (LimitTheoremId.T43, LimitTheoremId.T43critical):
        raise UnsupportedModelError(f"{tid.value} is built from the law of Y; use limit_law")
    if tid is LimitTheoremId.T41a:
        _full_policy_guard(tid, pol)
        return _gauss(diffusive_scale(params))
    if tid is LimitTheoremId.T41b:
        _full_policy_guard(tid, pol)
        return _gauss(c)
    if tid is LimitTheoremId.T52:
        return MixtureLaw.point(d)
    if tid is LimitTheoremId.T53a:
        return _gauss(1.0)
    if tid is LimitTheoremId.T61a:
        # X2 = +1, -1, 0 with p, q, r
        return _atoms(((d, p), (0.0, q), (d / 2.0, r)))
    if tid is LimitTheoremId.T62a:
        if pol is ZeroRecallPolicy.PROPAGATE:
            v_delayed = c / 2.0 - d * d / 4.0
        else:
            v_delayed = c - d * d / 4.0
        return MixtureLaw(((p, Gaussian(0.0, c - d * d)), (q, Gaussian(0.0, c)),
                           (r, Gaussian(0.0, v_delayed))))
    if tid is LimitTheoremId.T81:
        return MixtureLaw.point(first_and_last_drift(params))
    if pol is ZeroRecallPolicy.SYMMETRIC_RESAMPLE:
        return _gauss(sigma_t2_chain(params)["sigma_T2"])
    return _gauss(sigma_t2_recursion(params, pol))


def compose_initial(branch: MixtureLaw, params: ModelParams, init=InitialLaw.THREE_POINT) -> MixtureLaw:
    """Law of the walk with the given first-step law, from its +1 branch."""
    init = InitialLaw.parse(init)
    parts = []
    for x, w in init.distribution(params).items():
        if x == 1:
            parts.append((w, branch))
        elif x == -1:
            parts.append((w, branch.reflect()))
        else:
            parts.append((w, MixtureLaw.point(0.0)))
    return MixtureLaw.combine(parts)


def limit_law(params: ModelParams, theorem, f_y=None, v: float | None = None,
              split_weights: bool = False, policy=None,
              init=InitialLaw.THREE_POINT) -> MixtureLaw:
    """Mixture limit law of a theorem id.

    For T43 / T43critical, ``f_y`` is the finite law of Y and ``v`` the
    Gaussian variance scale of the +1-started walk (default (p+q)/(1-2(p-q)),
    resp. p+q).  Since that walk never starts with a delay, its limit is
    sum_t P(Y=t) N(0, v t^2) plus an atom P(Y=0) at 0.  ``split_weights``
    switches to the weights (p+q)P(Y=t) and atom (p+q)P(Y=0) + r, which
    split off a delayed first step the scaled walk cannot have.
    """
    tid = LimitTheoremId.parse(theorem)
    _check(params, tid)
    if tid in (LimitTheoremId.T43, LimitTheoremId.T43critical):
        _full_policy_guard(tid, resolve_policy(MemoryRegime.FULL, policy))
        if f_y is None:
            raise ParameterError(f"{tid.value} needs the law of Y (f_y)")
        law_y = finite_law(f_y)
        if v is None:
            v = diffusive_scale(params) if tid is LimitTheoremId.T43 else params.activity
        scale = params.activity if split_weights else 1.0
        comps = []
        atom = params.r if split_weights else 0.0
        for t, w in sorted(law_y.items()):
            if t == 0.0:
                atom += scale * w
            elif w > 0.0:
                comps.append((scale * w, Gaussian(0.0, v * t * t)))
        if atom > 0.0:
            comps.append((atom, PointMass(0.0)))
        return MixtureLaw(tuple(comps))
    return compose_initial(branch_law(params, tid, policy), params, init)


# -- last-step regime --------------------------------------------------------------

@dataclass(frozen=True)
class LastStepFormulas:
    p_tau_n: float
    mean_tau: float
    mean_tilde_t: float
    mean_tilde_s_prev: float
    mean_s_tau: float
    tilde_p: float


def _tilde_t_mean(tp: float, n: int) -> float:
    if tp == 1.0:
        return float(n)
    return (1.0 - (2.0 * tp - 1.0) ** n) / (2.0 * (1.0 - tp))


def last_step_formulas(params: ModelParams, n: int) -> LastStepFormulas:
    """Absorption-time law and the conditioned (tilde) walk means at n."""
    if params.r <= 0.0:
        raise DomainError("tau is undefined when r = 0")
    if n < 1:
        raise DomainError("n must be >= 1")
    p, q, r, c, d = params.p, params.q, params.r, params.activity, params.drift
    tp = p / c
    # E(S~_{n-1}) = (p~ - q~) E(T~_{n-1}), with S~_0 = 0
    s_prev = (d / c) * _tilde_t_mean(tp, n - 1) if n > 1 else 0.0
    return LastStepFormulas(
        p_tau_n=r * (1.0 - r) ** (n - 1),
        mean_tau=1.0 / r,
        mean_tilde_t=_tilde_t_mean(tp, n),
        mean_tilde_s_prev=s_prev,
        mean_s_tau=d / (1.0 - d),
        tilde_p=tp,
    )


def last_step_mean_via_tau(params: ModelParams, n: int) -> float:
    """E(S_n) under last-step memory with zeros propagating, by conditioning on tau."""
    c = params.activity
    total = 0.0
    for k in range(1, n + 1):
        total += last_step_formulas(params, k).p_tau_n * last_step_formulas(params, k).mean_tilde_s_prev
    # no zero yet by time n: the conditioned walk has run n steps
    tp = params.p / c
    total += c ** n * (params.drift / c) * _tilde_t_mean(tp, n)
    return total
