"""Model parameters, memory regimes and the recalled-zero policies."""
from __future__ import annotations

import enum
from dataclasses import dataclass

PROB_TOL = 1e-12


class ERWDError(Exception):
    """Base class for errors raised by this package."""


class ParameterError(ERWDError, ValueError):
    """A model parameter violates one of its invariants."""


class DomainError(ERWDError, ValueError):
    """A formula was requested outside the parameter range where it holds."""


class UnsupportedModelError(ERWDError, NotImplementedError):
    """The requested (regime, policy, init) combination has no exact recursion."""


@dataclass(frozen=True)
class ModelParams:
    """Probabilities of repeating (p), flipping (q) and delaying (r) a recalled step.

    The standing assumption is ``0 < p, q, r < 1``.  Boundary values are only
    accepted with ``allow_boundary=True``.
    """

    p: float
    q: float
    r: float
    allow_boundary: bool = False

    def __post_init__(self) -> None:
        for name in ("p", "q", "r"):
            v = float(getattr(self, name))
            object.__setattr__(self, name, v)
            if not 0.0 <= v <= 1.0:
                raise ParameterError(f"{name}={v} must lie in [0, 1]")
        total = self.p + self.q + self.r
        if abs(total - 1.0) > PROB_TOL:
            raise ParameterError(f"p + q + r = {total!r} must equal 1 (tolerance {PROB_TOL})")
        if not self.allow_boundary and not self.strict_interior:
            raise ParameterError(
                f"p={self.p}, q={self.q}, r={self.r}: each must lie strictly inside (0, 1); "
                "pass allow_boundary=True to opt in to boundary values"
            )

    @classmethod
    def from_pr(cls, p: float, r: float, allow_boundary: bool = False) -> "ModelParams":
        """Build from (p, r) with q = 1 - p - r."""
        return cls(p, 1.0 - p - r, r, allow_boundary=allow_boundary)

    @property
    def strict_interior(self) -> bool:
        return all(0.0 < v < 1.0 for v in (self.p, self.q, self.r))

    @property
    def drift(self) -> float:
        """p - q, the conditional mean factor."""
        return self.p - self.q

    @property
    def activity(self) -> float:
        """p + q, the probability of a non-delayed step."""
        return self.p + self.q

    def as_dict(self) -> dict:
        return {"p": self.p, "q": self.q, "r": self.r, "allow_boundary": self.allow_boundary}


class _CliEnum(enum.Enum):
    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for member in cls:
            if member.value == key or member.name.lower().replace("_", "-") == key:
                return member
        choices = ", ".join(m.value for m in cls)
        raise ParameterError(f"unknown {cls.__name__} {value!r}; expected one of: {choices}")


class InitialLaw(_CliEnum):
    """Law of the first step.  Fixed laws give the T-walk, THREE_POINT the S-walk."""

    PLUS_ONE = "plus-one"
    MINUS_ONE = "minus-one"
    ZERO = "zero"
    THREE_POINT = "three-point"

    @property
    def code(self) -> int:
        return _INIT_CODES[self]

    @property
    def is_fixed(self) -> bool:
        return self is not InitialLaw.THREE_POINT

    def distribution(self, params: ModelParams) -> dict[int, float]:
        if self is InitialLaw.PLUS_ONE:
            return {1: 1.0}
        if self is InitialLaw.MINUS_ONE:
            return {-1: 1.0}
        if self is InitialLaw.ZERO:
            return {0: 1.0}
        return {1: params.p, -1: params.q, 0: params.r}


class ZeroRecallPolicy(_CliEnum):
    """What a recalled step equal to 0 turns into.

    PROPAGATE: the new step is 0 whatever the branch.
    SYMMETRIC_RESAMPLE: the new step is +1 or -1 with probability (p+q)/2 each,
    and 0 with probability r.
    """

    PROPAGATE = "propagate"
    SYMMETRIC_RESAMPLE = "symmetric-resample"

    @property
    def code(self) -> int:
        return 0 if self is ZeroRecallPolicy.PROPAGATE else 1


class MemoryRegime(_CliEnum):
    FULL = "full"
    FIRST_STEP = "first-step"
    FIRST_TWO = "first-two"
    LAST_STEP = "last-step"
    FIRST_AND_LAST = "first-and-last"

    @property
    def code(self) -> int:
        return _REGIME_CODES[self]

    def memory_indices(self, n: int) -> tuple[int, ...]:
        """1-based indices the walker may recall after ``n`` steps."""
        if n < 1:
            raise ParameterError("memory is defined for n >= 1")
        if self is MemoryRegime.FULL:
            return tuple(range(1, n + 1))
        if self is MemoryRegime.FIRST_STEP:
            return (1,)
        if self is MemoryRegime.FIRST_TWO:
            return (1,) if n == 1 else (1, 2)
        if self is MemoryRegime.LAST_STEP:
            return (n,)
        return (1,) if n == 1 else (1, n)

    @property
    def default_policy(self) -> ZeroRecallPolicy:
        if self in (MemoryRegime.FULL, MemoryRegime.FIRST_AND_LAST):
            return ZeroRecallPolicy.SYMMETRIC_RESAMPLE
        return ZeroRecallPolicy.PROPAGATE


_INIT_CODES = {
    InitialLaw.PLUS_ONE: 0,
    InitialLaw.MINUS_ONE: 1,
    InitialLaw.ZERO: 2,
    InitialLaw.THREE_POINT: 3,
}
_REGIME_CODES = {
    MemoryRegime.FULL: 0,
    MemoryRegime.FIRST_STEP: 1,
    MemoryRegime.FIRST_TWO: 2,
    MemoryRegime.LAST_STEP: 3,
    MemoryRegime.FIRST_AND_LAST: 4,
}


def resolve_policy(regime: MemoryRegime, policy: ZeroRecallPolicy | str | None) -> ZeroRecallPolicy:
    if policy is None or policy == "default":
        return regime.default_policy
    return ZeroRecallPolicy.parse(policy)
