"""Gamma-function ratios, the martingale weights a_n and their square sums."""
from __future__ import annotations

import enum
import math

import numpy as np
from scipy import integrate, special

from ..model import DomainError, ModelParams

# B_{2k} / (2k (2k-1)) for the Stirling series of log Gamma
_STIRLING = np.array([
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
])
_STIRLING_MIN = 10.0

CRITICAL_TOL = 1e-12


def log_gamma_ratio(x, a):
    """log(Gamma(x + a) / Gamma(x)) for x > 0, x + a > 0.

    Differencing two ``gammaln`` values loses about log10(x) digits for large x,
    so above a threshold the Stirling series is differenced term by term.
    """
    x = np.asarray(x, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    x, a = np.broadcast_arrays(x, a)
    if np.any(x <= 0) or np.any(x + a <= 0):
        raise DomainError("log_gamma_ratio needs x > 0 and x + a > 0")
    out = np.empty(x.shape)
    big = (x >= _STIRLING_MIN) & (x + a >= _STIRLING_MIN)
    small = ~big
    out[small] = special.gammaln(x[small] + a[small]) - special.gammaln(x[small])
    xb, ab = x[big], a[big]
    xa = xb + ab
    val = ab * np.log(xb) + (xa - 0.5) * np.log1p(ab / xb) - ab
    inv_x, inv_xa = 1.0 / xb, 1.0 / xa
    px, pxa = inv_x.copy(), inv_xa.copy()
    inv_x2, inv_xa2 = inv_x * inv_x, inv_xa * inv_xa
    for c in _STIRLING:
        val += c * (pxa - px)
        px *= inv_x2
        pxa *= inv_xa2
    out[big] = val
    return out if out.ndim else float(out)


def martingale_weight(params: ModelParams, n):
    """a_n = Gamma(1 + p - q) Gamma(n) / Gamma(n + p - q); a_n S_n is a martingale."""
    d = params.drift
    if d <= -1.0:
        raise DomainError(f"martingale weight needs p - q > -1, got {d}")
    n = np.asarray(n, dtype=np.float64)
    if np.any(n < 1):
        raise DomainError("martingale weight is defined for n >= 1")
    out = np.exp(special.gammaln(1.0 + d) - log_gamma_ratio(n, d))
    return out if np.ndim(out) else float(out)


def nu_n(params: ModelParams, n: int, chunk: int = 1 << 20) -> float:
    """Sum of a_k^2 over k = 1..n."""
    if n < 1:
        raise DomainError("nu_n is defined for n >= 1")
    total = 0.0
    for start in range(1, n + 1, chunk):
        k = np.arange(start, min(start + chunk, n + 1), dtype=np.float64)
        total += float(np.sum(martingale_weight(params, k) ** 2))
    return total


class Diffusivity(enum.Enum):
    DIFFUSIVE = "diffusive"
    CRITICAL = "critical"
    SUPERDIFFUSIVE = "superdiffusive"


def classify(params: ModelParams) -> Diffusivity:
    gap = params.drift - 0.5
    if abs(gap) <= CRITICAL_TOL:
        return Diffusivity.CRITICAL
    return Diffusivity.DIFFUSIVE if gap < 0 else Diffusivity.SUPERDIFFUSIVE


def nu_limit(params: ModelParams, head: int = 1 << 20) -> float:
    """lim nu_n for p - q > 1/2: exact head sum plus a midpoint-rule tail integral."""
    if classify(params) is not Diffusivity.SUPERDIFFUSIVE:
        raise DomainError("nu_n is unbounded unless p - q > 1/2")
    d = params.drift
    g = special.gammaln(1.0 + d)

    x0 = head + 0.5
    # x = x0 / y maps the tail onto (0, 1]; the y**(2d - 2) singularity goes to the weight
    def smooth(y):
        if y == 0.0:
            return math.exp(2.0 * g) * x0 ** (1.0 - 2.0 * d)
        x = x0 / y
        return math.exp(2.0 * (g - log_gamma_ratio(x, d)) + 2.0 * d * math.log(x)) * x0 ** (1.0 - 2.0 * d)

    tail, _ = integrate.quad(smooth, 0.0, 1.0, weight="alg", wvar=(2.0 * d - 2.0, 0.0))
    return nu_n(params, head) + tail


def nu_asymptote(params: ModelParams, n: int) -> tuple[Diffusivity, float]:
    kind = classify(params)
    d = params.drift
    if kind is Diffusivity.DIFFUSIVE:
        return kind, math.gamma(1.0 + d) ** 2 * n ** (1.0 - 2.0 * d) / (1.0 - 2.0 * d)
    if kind is Diffusivity.CRITICAL:
        return kind, math.pi / 4.0 * math.log(n)
    return kind, nu_limit(params)
