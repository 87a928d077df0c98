"""Large-scale fading profile (the per-user power gains beta_k)."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True)
class LargeScaleProfile:
    betas: tuple = field()

    def __post_init__(self):
        betas = tuple(float(b) for b in self.betas)
        if len(betas) < 1:
            raise ConfigurationError("profile needs at least one user")
        if any(b <= 0 for b in betas):
            raise ConfigurationError("all large-scale gains must be positive")
        object.__setattr__(self, "betas", betas)

    @classmethod
    def uniform(cls, K: int, beta: float = 1.0) -> "LargeScaleProfile":
        if K < 1:
            raise ConfigurationError("K must be >= 1")
        return cls(betas=(beta,) * K)

    @property
    def K(self) -> int:
        return len(self.betas)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.betas, dtype=float)

    def sum_all(self) -> float:
        return float(sum(self.betas))

    def sum_excluding(self, k: int) -> float:
        if not 0 <= k < self.K:
            raise IndexError(f"user index {k} out of range for K={self.K}")
        return float(sum(b for i, b in enumerate(self.betas) if i != k))
