"""Types shared by the step-1 solvers and the alternating driver."""

# standard libs
from dataclasses import dataclass, field

# 3rd party
import numpy as np

# local
from data_loader import DTYPE

# constants
DEFAULT_TAU = 0.5
MIN_C1_SQUARED = 1.5


@dataclass(frozen=True)
class MomentBound:
    """Right-hand side c1^2 * n * sigma^2 of the spectral constraint."""

    sigma: float
    n: int
    c1_squared: float = MIN_C1_SQUARED

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if self.c1_squared < MIN_C1_SQUARED:
            raise ValueError(f"c1_squared must be >= {MIN_C1_SQUARED}, got {self.c1_squared}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")

    def rho(self):
        return self.c1_squared * self.n * self.sigma ** 2


def threshold_support(h, tau):
    """{i : h_i > tau}; values exactly at tau count as inliers."""
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"tau must lie in [0, 1), got {tau}")
    return np.flatnonzero(np.asarray(h, dtype=DTYPE) > tau)


@dataclass(frozen=True)
class OutlierIndicator:
    h: np.ndarray
    tau: float = DEFAULT_TAU
    support: np.ndarray = field(init=False)

    def __post_init__(self):
        h = np.clip(np.asarray(self.h, dtype=DTYPE).reshape(-1), 0.0, 1.0)
        h.setflags(write=False)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "support", threshold_support(h, self.tau))

    @property
    def l0(self):
        return int(self.support.size)

    def inliers(self):
        mask = np.ones(self.h.shape[0], dtype=bool)
        mask[self.support] = False
        return np.flatnonzero(mask)

    def rethreshold(self, tau):
        return OutlierIndicator(self.h, tau)
