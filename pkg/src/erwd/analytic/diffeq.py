"""First-order linear difference equations x_{n+1} = a x_n + b_n."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model import DomainError


@dataclass(frozen=True)
class DiffEqSpec:
    """Coefficient ``a``, forcing ``b_n = b * n**gamma`` and start value ``x1``.

    ``gamma = 0`` is the constant forcing case.
    """

    a: float
    b: float
    gamma: float = 0.0
    x1: float = 0.0

    def __post_init__(self) -> None:
        if self.gamma <= -1.0:
            raise DomainError(f"forcing exponent must exceed -1, got {self.gamma}")

    def forcing(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.float64)
        return self.b * n ** self.gamma


def iterate_first_order(spec: DiffEqSpec, n: int) -> float:
    """x_n by plain forward iteration."""
    if n < 1:
        raise DomainError("n must be >= 1")
    x = spec.x1
    for k in range(1, n):
        x = spec.a * x + spec.b * float(k) ** spec.gamma
    return x


def exact_value(spec: DiffEqSpec, n: int) -> float:
    """x_n = a^(n-1) x1 + sum_{v=0}^{n-2} a^v b_{n-1-v}."""
    if n < 1:
        raise DomainError("n must be >= 1")
    v = np.arange(n - 1, dtype=np.float64)
    with np.errstate(under="ignore"):
        powers = spec.a ** v
    return float(spec.a ** (n - 1) * spec.x1 + np.sum(powers * spec.forcing(n - 1 - v)))


def asymptotic_value(spec: DiffEqSpec, n: int) -> float:
    """Large-n form; needs |a| < 1."""
    if abs(spec.a) >= 1.0:
        raise DomainError(f"asymptotic solution needs |a| < 1, got a={spec.a}")
    a = spec.a
    if spec.gamma == 0.0:
        return spec.b / (1.0 - a)
    b_prev = float(spec.forcing(n - 1))
    return b_prev / (1.0 - a) - spec.gamma * a * b_prev / (n * (1.0 - a) ** 2)


def solve_first_order(spec: DiffEqSpec, n: int) -> tuple[float, float | None]:
    """(exact, asymptotic) value of x_n; asymptotic is None when |a| >= 1."""
    exact = exact_value(spec, n)
    asym = asymptotic_value(spec, n) if abs(spec.a) < 1.0 else None
    return exact, asym
