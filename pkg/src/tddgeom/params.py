"""Network, propagation, and result containers shared by all models.

Distances are kilometers and transmit powers are dBm throughout the
public surface; powers are converted to linear milliwatts internally.
The propagation loss at distance d km is ``a * d**two_b`` with ``a``
given in dB, so ``a`` acts as a link-budget offset on every transmit
power while thermal noise is left untouched.  Interference-to-signal
ratios are therefore independent of ``a``; only terms involving noise
feel it.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

SQRT3 = math.sqrt(3.0)

__all__ = [
    "SQRT3",
    "dbm_to_mw",
    "MacroNetwork",
    "PropagationParams",
    "TddMix",
    "MobilePolar",
    "CoverageCurve",
]


def dbm_to_mw(p_dbm):
    """Convert a power in dBm to linear milliwatts."""
    return 10.0 ** (p_dbm / 10.0)


@dataclass(frozen=True)
class PropagationParams:
    """Path loss, power control, and power levels.

    two_b : path-loss exponent 2b, must exceed 2 for the interference
        series to converge.
    a_db : propagation factor in dB at 1 km (includes antenna gains).
    k : fractional power-control compensation in [0, 1]; an uplink
        transmitter at distance d sends p_star * (a d**two_b)**k.
    p_dl_dbm, p_star_dbm : downlink transmit power and uplink target
        power, dBm.
    p_noise_dbm : thermal noise power at the receiver, dBm.
    """

    two_b: float = 3.5
    a_db: float = 130.0
    k: float = 0.4
    p_dl_dbm: float = 60.0
    p_star_dbm: float = 20.0
    p_noise_dbm: float = -93.0

    def __post_init__(self):
        if not self.two_b > 2:
            raise ValueError(f"two_b must exceed 2, got {self.two_b}")
        if not 0.0 <= self.k <= 1.0:
            raise ValueError(f"k must lie in [0, 1], got {self.k}")

    @property
    def b(self):
        return 0.5 * self.two_b

    @property
    def p_dl_mw(self):
        """Downlink power with the propagation factor folded in."""
        return dbm_to_mw(self.p_dl_dbm - self.a_db)

    @property
    def p_star_mw(self):
        """Uplink target power with the propagation factor folded in."""
        return dbm_to_mw(self.p_star_dbm - self.a_db)

    @property
    def p_noise_mw(self):
        return dbm_to_mw(self.p_noise_dbm)

    @property
    def p_star_over_p(self):
        return dbm_to_mw(self.p_star_dbm - self.p_dl_dbm)


@dataclass(frozen=True)
class MacroNetwork:
    """Hexagonal macro deployment.

    delta : inter-site distance in km.
    cell_radius : radius R of the user disk around each site, km;
        at most delta/sqrt(3) (the hexagon circumradius).
    rings : number of interfering lattice rings retained in truncated
        sums and simulations.
    load_eta : average activity factor of interfering cells, in (0, 1].
    """

    delta: float = 1.0
    cell_radius: float = None
    rings: int = 4
    load_eta: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.cell_radius is None:
            object.__setattr__(self, "cell_radius", self.delta / SQRT3)
        if not 0 < self.cell_radius <= self.delta / SQRT3 * (1 + 1e-12):
            raise ValueError(
                f"cell_radius must lie in (0, delta/sqrt(3)] = (0, {self.delta / SQRT3:.6f}], "
                f"got {self.cell_radius}"
            )
        if self.rings < 1:
            raise ValueError(f"rings must be at least 1, got {self.rings}")
        if not 0 < self.load_eta <= 1:
            raise ValueError(f"load_eta must lie in (0, 1], got {self.load_eta}")

    @property
    def x_edge(self):
        """Normalized cell-edge radius R/delta."""
        return self.cell_radius / self.delta


@dataclass(frozen=True)
class TddMix:
    """Per-cell transmission-direction mix.

    Each interfering cell independently transmits downlink with
    probability alpha_d and receives uplink otherwise.
    """

    alpha_d: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha_d <= 1.0:
            raise ValueError(f"alpha_d must lie in [0, 1], got {self.alpha_d}")

    @property
    def alpha_u(self):
        return 1.0 - self.alpha_d


@dataclass(frozen=True)
class MobilePolar:
    """User position in polar coordinates about its serving site.

    r is in km and must not exceed the cell radius; theta in radians.
    """

    r: float
    theta: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"r must be non-negative, got {self.r}")

    def position(self):
        return self.r * complex(math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True)
class CoverageCurve:
    """Coverage probability (SINR CCDF) sampled on a threshold grid.

    gamma_db : thresholds in dB.
    value : coverage probabilities in [0, 1].
    ci_halfwidth : 95% half-widths for Monte Carlo estimates; zeros for
        analytic curves.
    """

    gamma_db: np.ndarray
    value: np.ndarray
    ci_halfwidth: np.ndarray = field(default=None)

    def __post_init__(self):
        gamma = np.asarray(self.gamma_db, dtype=float)
        value = np.asarray(self.value, dtype=float)
        object.__setattr__(self, "gamma_db", gamma)
        object.__setattr__(self, "value", value)
        if self.ci_halfwidth is None:
            object.__setattr__(self, "ci_halfwidth", np.zeros_like(value))
        else:
            object.__setattr__(self, "ci_halfwidth", np.asarray(self.ci_halfwidth, dtype=float))
        if gamma.ndim != 1 or gamma.size == 0:
            raise ValueError("gamma_db must be a nonempty 1-d grid")
        if value.shape != gamma.shape or self.ci_halfwidth.shape != gamma.shape:
            raise ValueError("value and ci_halfwidth must match the grid shape")


def check_gamma_grid(gamma_grid_db):
    """Validate a threshold grid: nonempty, 1-d, strictly increasing."""
    grid = np.asarray(gamma_grid_db, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ConfigError("gamma grid must be a nonempty 1-d array")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ConfigError("gamma grid must be strictly increasing")
    return grid
