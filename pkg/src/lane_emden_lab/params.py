"""The configuration record every module consumes."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["ProblemParams"]


@dataclass(frozen=True)
class ProblemParams:
    """Parameters of ``(-Delta)^s u_i = |u|^(p-1) (alpha_i u_i^+ + beta_i u_i^-)``.

    ``coupling`` holds one ``(alpha_i, beta_i)`` pair per component; the
    default (all ones) gives the plain system ``|u|^(p-1) u_i``.
    """

    n: float
    s: float
    p: float
    m: int = 1
    coupling: tuple | None = field(default=None)

    def __post_init__(self):
        if not (math.isfinite(self.n) and self.n > 0):
            raise DomainError(f"dimension n must be a positive real, got {self.n!r}")
        if not 0 < self.s <= 2:
            raise DomainError(f"order s must lie in (0, 2], got {self.s!r}")
        if not (math.isfinite(self.p) and self.p > 1):
            raise DomainError(f"exponent p must be > 1, got {self.p!r}")
        if int(self.m) != self.m or self.m < 1:
            raise DomainError(f"component count m must be a positive integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        if self.coupling is not None:
            pairs = tuple((float(a), float(b)) for a, b in self.coupling)
            if len(pairs) != self.m:
                raise DomainError(
                    f"coupling needs {self.m} (alpha, beta) pairs, got {len(pairs)}"
                )
            if any(not (a > 0 and b > 0) for a, b in pairs):
                raise DomainError("coupling coefficients alpha_i, beta_i must be > 0")
            object.__setattr__(self, "coupling", pairs)

    @property
    def beta(self):
        """Homogeneity exponent 2s/(p-1) of the scaling u -> lam^beta u(lam x)."""
        return 2.0 * self.s / (self.p - 1.0)

    @property
    def alphas(self):
        if self.coupling is None:
            return np.ones(self.m)
        return np.array([a for a, _ in self.coupling])

    @property
    def betas(self):
        if self.coupling is None:
            return np.ones(self.m)
        return np.array([b for _, b in self.coupling])

    @property
    def symmetric_coupling(self):
        return self.coupling is None or all(a == b for a, b in self.coupling)

    def with_(self, **changes):
        d = dict(n=self.n, s=self.s, p=self.p, m=self.m, coupling=self.coupling)
        d.update(changes)
        return ProblemParams(**d)
