"""Finite mixtures of Gaussian laws and point masses."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from ..model import DomainError

WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class Gaussian:
    mean: float
    variance: float

    def __post_init__(self) -> None:
        if not self.variance >= 0.0:
            raise DomainError(f"Gaussian variance must be >= 0, got {self.variance}")

    def raw_moment(self, k: int) -> float:
        mu, v = self.mean, self.variance
        return (1.0, mu, mu * mu + v, mu ** 3 + 3 * mu * v, mu ** 4 + 6 * mu * mu * v + 3 * v * v)[k]


@dataclass(frozen=True)
class PointMass:
    location: float

    def raw_moment(self, k: int) -> float:
        return self.location ** k


Component = Gaussian | PointMass


@dataclass(frozen=True)
class MixtureLaw:
    """``components`` is a tuple of (weight, Gaussian | PointMass).

    A Gaussian with zero variance is treated as the point mass at its mean.
    """

    components: tuple[tuple[float, Component], ...]

    def __post_init__(self) -> None:
        comps = []
        for w, kind in self.components:
            w = float(w)
            if w < 0.0:
                raise DomainError(f"mixture weight {w} is negative")
            if isinstance(kind, Gaussian) and kind.variance == 0.0:
                kind = PointMass(kind.mean)
            if not isinstance(kind, (Gaussian, PointMass)):
                raise DomainError(f"unknown mixture component {kind!r}")
            comps.append((w, kind))
        total = math.fsum(w for w, _ in comps)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise DomainError(f"mixture weights sum to {total!r}, not 1")
        object.__setattr__(self, "components", tuple(comps))

    @classmethod
    def point(cls, location: float) -> "MixtureLaw":
        return cls(((1.0, PointMass(location)),))

    @classmethod
    def combine(cls, parts) -> "MixtureLaw":
        """Mixture of mixtures: ``parts`` is an iterable of (weight, MixtureLaw)."""
        comps = []
        for w, law in parts:
            if w == 0.0:
                continue
            comps.extend((w * cw, kind) for cw, kind in law.components)
        return cls(tuple(comps))

    # -- shape -------------------------------------------------------------

    @property
    def atoms(self) -> list[tuple[float, float]]:
        """(location, total weight) of the point masses, merged and sorted."""
        merged: dict[float, float] = {}
        for w, kind in self.components:
            if isinstance(kind, PointMass) and w > 0.0:
                merged[kind.location] = merged.get(kind.location, 0.0) + w
        return sorted(merged.items())

    @property
    def gaussians(self) -> list[tuple[float, Gaussian]]:
        return [(w, k) for w, k in self.components if isinstance(k, Gaussian) and w > 0.0]

    def reflect(self) -> "MixtureLaw":
        out = []
        for w, kind in self.components:
            if isinstance(kind, Gaussian):
                out.append((w, Gaussian(-kind.mean, kind.variance)))
            else:
                out.append((w, PointMass(-kind.location)))
        return MixtureLaw(tuple(out))

    def scale(self, factor: float) -> "MixtureLaw":
        out = []
        for w, kind in self.components:
            if isinstance(kind, Gaussian):
                out.append((w, Gaussian(factor * kind.mean, factor * factor * kind.variance)))
            else:
                out.append((w, PointMass(factor * kind.location)))
        return MixtureLaw(tuple(out))

    # -- distribution function ---------------------------------------------

    def _cdf(self, x, left: bool):
        x = np.asarray(x, dtype=np.float64)
        out = np.zeros(x.shape)
        for w, kind in self.components:
            if isinstance(kind, Gaussian):
                out += w * special.ndtr((x - kind.mean) / math.sqrt(kind.variance))
            elif left:
                out += w * (x > kind.location)
            else:
                out += w * (x >= kind.location)
        out = np.clip(out, 0.0, 1.0)
        return out if out.ndim else float(out)

    def cdf(self, x):
        """F(x), right-continuous."""
        return self._cdf(x, left=False)

    def cdf_left(self, x):
        """F(x-), the left limit."""
        return self._cdf(x, left=True)

    def moment(self, k: int) -> float:
        """Raw moment of order 0..4."""
        if not 0 <= k <= 4:
            raise DomainError("mixture moments are available for orders 0..4")
        return math.fsum(w * kind.raw_moment(k) for w, kind in self.components)

    @property
    def mean(self) -> float:
        return self.moment(1)

    @property
    def variance(self) -> float:
        return self.moment(2) - self.mean ** 2

    def quantile(self, u: float) -> float:
        """inf{x : F(x) >= u}; at a plateau of F this is the plateau's left end."""
        if not 0.0 < u < 1.0:
            raise DomainError(f"quantile level must lie in (0, 1), got {u}")
        for loc, _ in self.atoms:
            if self.cdf_left(loc) < u <= self.cdf(loc):
                return float(loc)
        spread = [abs(k.mean) + 40.0 * math.sqrt(k.variance) for _, k in self.gaussians]
        spread += [abs(loc) for loc, _ in self.atoms]
        lo, hi = -max(spread) - 1.0, max(spread) + 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if self.cdf(mid) >= u:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-15 * max(1.0, abs(mid)):
                break
        return hi

    def to_dict(self) -> dict:
        comps = []
        for w, kind in self.components:
            if isinstance(kind, Gaussian):
                comps.append({"weight": w, "kind": "gaussian", "mean": kind.mean, "variance": kind.variance})
            else:
                comps.append({"weight": w, "kind": "point_mass", "location": kind.location})
        return {"components": comps}
