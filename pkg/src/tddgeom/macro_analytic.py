"""Series evaluation of the four macro-cell ISR components, the SINR
maps built from them, their inverses, and the resulting coverage
probability.

All positional quantities are normalized by the lattice spacing:
x = r / delta is the user radius, r_over_delta = R / delta the user-disk
radius.  The series give the interference averaged over the user's
angular coordinate; position-resolved values live in
:mod:`tddgeom.hexgrid` and the two routes are cross-checked in the test
suite.

A structural caution on the mobile-to-mobile term: the series behind
:func:`isr_ul_dl` has convergence radius x = 1 - R/delta.  At that
radius the typical user's circle touches the interfering users' disks,
arbitrarily close interferers become possible, and the mean
interference is genuinely infinite.  The component function reports
non-convergence honestly; the SINR map freezes that one term just
inside the radius (see :func:`downlink_inverse_sinr`) so that coverage,
a quantile-type quantity that stays finite, remains computable across
the whole cell.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import TruncationError
from .params import MacroNetwork, MobilePolar, PropagationParams, TddMix
from .specfun import SeriesControl, ShadowingSpec, omega, shadowing_mean_factor, sum_series

__all__ = [
    "IsrBreakdown",
    "SinrParams",
    "isr_dl_dl",
    "beta_h",
    "isr_ul_dl",
    "a1",
    "a2",
    "isr_total",
    "downlink_inverse_sinr",
    "uplink_inverse_sinr",
    "sinr_dl",
    "sinr_ul",
    "inv_u",
    "inv_d",
    "coverage_macro",
]

_DEFAULT_CTRL = SeriesControl()

# the mobile-to-mobile series diverges where the user circle reaches the
# interferer disks; the SINR map freezes it at this fraction of that radius
_CROSS_TERM_CLAMP = 0.9


def _ctrl_or_default(ctrl):
    return _DEFAULT_CTRL if ctrl is None else ctrl


def isr_dl_dl(x, b, ctrl=None):
    """Cell-to-cell interference-to-signal ratio at normalized radius x.

    Parameters
    ----------
    x : float
        User distance over lattice spacing, 0 <= x < 1/sqrt(3).
    b : float
        Half the path-loss exponent, b > 1.
    ctrl : SeriesControl, optional
        Truncation policy for the hypergeometric-type series.

    Returns
    -------
    float
        (6 x^{2b} / Gamma(b)^2) * sum_h [Gamma(b+h)^2 / Gamma(h+1)^2]
        * omega(b+h) * x^{2h}, the lattice interference sum averaged
        over the user's angular position.

    Raises
    ------
    TruncationError
        If the series has not converged within ``ctrl.max_terms``.
    """
    ctrl = _ctrl_or_default(ctrl)
    if x == 0:
        return 0.0
    if not 0 < x < 1:
        raise ValueError(f"normalized radius must be in [0, 1), got {x}")
    if b <= 1:
        raise ValueError(f"b must exceed 1, got {b}")

    def terms():
        t = omega(b)
        h = 0
        while True:
            yield t
            ratio = ((b + h) / (h + 1.0)) ** 2 * x * x
            t *= ratio * omega(b + h + 1) / omega(b + h)
            h += 1

    return 6.0 * x ** (2.0 * b) * sum_series(terms(), ctrl)


@lru_cache(maxsize=None)
def _beta_h_cached(h, b, k, r_over_delta, rel_tol, max_terms):
    bk = b * k
    xr2 = r_over_delta * r_over_delta
    # inner terms grow until the index overtakes roughly 2h
    # r_over_delta before the geometric decay sets in, so the term
    # budget has to scale with the order
    ctrl = SeriesControl(rel_tol=rel_tol, max_terms=max(max_terms, 6 * h + 120))
    total = 0.0
    for n in range(h + 1):

        def inner(n=n):
            t = (
                math.exp(
                    2.0 * math.lgamma(b + h + n)
                    - 2.0 * math.lgamma(b)
                    - 2.0 * math.lgamma(n + 1)
                    - math.lgamma(h - n + 1)
                    - math.lgamma(h + n + 1)
                )
                * xr2**n
                / (n + bk + 1.0)
                * omega(b + h + n)
            )
            i = 0
            while True:
                yield t
                s = b + h + n + i
                t *= (
                    s * s / ((i + 1.0) * (h + n + i + 1.0))
                    * xr2
                    * (n + i + bk + 1.0) / (n + i + bk + 2.0)
                    * omega(s + 1.0) / omega(s)
                )
                i += 1

        total += sum_series(inner(), ctrl)
    return total


def beta_h(h, b, k, r_over_delta, ctrl=None):
    """Coefficient of x^{2h} in the mobile-to-mobile interference series.

    Parameters
    ----------
    h : int
        Series index, h >= 0.
    b, k : float
        Half path-loss exponent (b > 1) and power-control fraction
        (0 <= k <= 1).
    r_over_delta : float
        User-disk radius over lattice spacing, in (0, 1/sqrt(3)].
    ctrl : SeriesControl, optional

    Notes
    -----
    Each coefficient is a finite sum over n <= h of inner series in the
    disk-radius ratio; results are cached, so sweeping x costs one
    evaluation per index.  The coefficients grow like
    (1 - r_over_delta)^{-2h}, which bounds the convergence region of the
    full series in x.
    """
    if h < 0:
        raise ValueError(f"series index must be non-negative, got {h}")
    if b <= 1:
        raise ValueError(f"b must exceed 1, got {b}")
    if not 0 <= k <= 1:
        raise ValueError(f"power-control fraction must lie in [0, 1], got {k}")
    if not 0 < r_over_delta <= 1 / math.sqrt(3.0) * (1 + 1e-12):
        raise ValueError(f"r_over_delta must lie in (0, 1/sqrt(3)], got {r_over_delta}")
    ctrl = _ctrl_or_default(ctrl)
    return _beta_h_cached(int(h), float(b), float(k), float(r_over_delta), ctrl.rel_tol, ctrl.max_terms)


def isr_ul_dl(x, b, k, r_over_delta, p_star_over_p, ctrl=None, delta=1.0):
    """Mobile-to-mobile interference-to-signal ratio at normalized radius x.

    Parameters
    ----------
    x : float
        User distance over lattice spacing.
    b, k, r_over_delta : float
        As in :func:`beta_h`.
    p_star_over_p : float
        Uplink-to-downlink power ratio P*/P.
    ctrl : SeriesControl, optional
    delta : float, optional
        Lattice spacing; enters only through the power-control factor
        R^{2bk} with R = r_over_delta * delta.

    Returns
    -------
    float
        6 (P*/P) x^{2b} R^{2bk} * sum_h beta_h x^{2h}, the
        interference from one power-controlled mobile per interfering
        cell, averaged over all user positions involved.

    Raises
    ------
    TruncationError
        If the series does not converge; this is guaranteed for
        x >= 1 - r_over_delta, where interfering mobiles can come
        arbitrarily close to the typical user and the mean diverges.
    """
    ctrl = _ctrl_or_default(ctrl)
    if x == 0:
        return 0.0
    if not 0 < x < 1:
        raise ValueError(f"normalized radius must be in [0, 1), got {x}")

    def terms():
        h = 0
        while True:
            yield beta_h(h, b, k, r_over_delta, ctrl) * x ** (2 * h)
            h += 1

    big_r = r_over_delta * delta
    prefactor = 6.0 * p_star_over_p * x ** (2.0 * b) * big_r ** (2.0 * b * k)
    return prefactor * sum_series(terms(), ctrl)


def a1(b, k, r_over_delta, ctrl=None):
    """Mobile-to-cell interference coefficient.

    The uplink ISR caused by interfering mobiles is a1 * x^{2b(1-k)}.
    Evaluated by its own single series (disk-averaged interferer
    positions, power-control average over the served user); the test
    suite checks it against 6 (R/delta)^{2bk} beta_0 computed
    independently.
    """
    ctrl = _ctrl_or_default(ctrl)
    if b <= 1:
        raise ValueError(f"b must exceed 1, got {b}")
    if not 0 <= k <= 1:
        raise ValueError(f"power-control fraction must lie in [0, 1], got {k}")
    if r_over_delta == 0:
        return 0.0
    bk = b * k
    xr2 = r_over_delta * r_over_delta

    def terms():
        t = omega(b) / (bk + 1.0)
        h = 0
        while True:
            yield t
            t *= (
                ((b + h) / (h + 1.0)) ** 2
                * xr2
                * (bk + h + 1.0) / (bk + h + 2.0)
                * omega(b + h + 1.0) / omega(b + h)
            )
            h += 1

    return 6.0 * r_over_delta ** (2.0 * bk) * sum_series(terms(), ctrl)


def a2(b, k, p_over_pstar, delta=1.0):
    """Cell-to-mobile interference coefficient.

    The uplink ISR caused by downlink cells is a2 * x^{2b(1-k)}: the
    full-lattice sum 6 omega(b) delta^{-2b} of cell powers P, divided by
    the power-controlled useful signal P* r^{-2b(1-k)}.
    """
    if b <= 1:
        raise ValueError(f"b must exceed 1, got {b}")
    return 6.0 * p_over_pstar * omega(b) * delta ** (-2.0 * b * k)


@dataclass(frozen=True)
class IsrBreakdown:
    """The four interference-to-signal components at one user radius and
    their duplexing-weighted totals."""

    dl_to_dl: float
    ul_to_dl: float
    ul_to_ul: float
    dl_to_ul: float
    total_dl: float
    total_ul: float

    def __post_init__(self):
        for name in ("dl_to_dl", "ul_to_dl", "ul_to_ul", "dl_to_ul"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")


def isr_total(m, net, prop, mix, shadowing=None, ctrl=None):
    """All four ISR components for a user at ``m``, with totals weighted
    by the duplexing mix: downlink total alpha_d * cell_term + alpha_u *
    mobile_term, uplink total alpha_u * mobile_term + alpha_d *
    cell_term.

    Lognormal shadowing, when given, multiplies every mean component by
    the common lognormal mean factor.
    """
    x = m.r / net.delta
    xr = net.cell_radius / net.delta
    b = prop.b
    factor = shadowing_mean_factor(shadowing) if shadowing is not None else 1.0
    dl_dl = factor * isr_dl_dl(x, b, ctrl)
    ul_dl = factor * isr_ul_dl(x, b, prop.k, xr, prop.p_star_over_p, ctrl, net.delta)
    exp_ul = 2.0 * b * (1.0 - prop.k)
    ul_ul = factor * a1(b, prop.k, xr, ctrl) * x**exp_ul
    dl_ul = factor * a2(b, prop.k, 1.0 / prop.p_star_over_p, net.delta) * x**exp_ul
    return IsrBreakdown(
        dl_to_dl=dl_dl,
        ul_to_dl=ul_dl,
        ul_to_ul=ul_ul,
        dl_to_ul=dl_ul,
        total_dl=mix.alpha_d * dl_dl + mix.alpha_u * ul_dl,
        total_ul=mix.alpha_u * ul_ul + mix.alpha_d * dl_ul,
    )


@dataclass(frozen=True)
class SinrParams:
    """Noise-and-load coefficients of the SINR maps, plus the two uplink
    interference coefficients so the closed-form uplink map needs no
    series evaluation.

    y0 is the downlink noise-to-power ratio P_N delta^{2b} / P; y0_prime
    the uplink one P_N delta^{2b(1-k)} / P*; eta the average activity of
    interfering cells.
    """

    y0: float
    y0_prime: float
    eta: float = 1.0
    a1_value: float = None
    a2_value: float = None

    def __post_init__(self):
        if self.y0 < 0 or self.y0_prime < 0:
            raise ValueError("noise ratios must be non-negative")
        if not 0 <= self.eta <= 1:
            raise ValueError(f"load must lie in [0, 1], got {self.eta}")

    @classmethod
    def from_model(cls, net, prop, ctrl=None):
        b = prop.b
        xr = net.cell_radius / net.delta
        return cls(
            y0=prop.p_noise_mw * net.delta ** (2.0 * b) / prop.p_dl_mw,
            y0_prime=prop.p_noise_mw * net.delta ** (2.0 * b * (1.0 - prop.k)) / prop.p_star_mw,
            eta=net.load_eta,
            a1_value=a1(b, prop.k, xr, ctrl),
            a2_value=a2(b, prop.k, 1.0 / prop.p_star_over_p, net.delta),
        )


def downlink_inverse_sinr(x, net, prop, mix, params=None, ctrl=None):
    """The downlink noise-plus-interference over signal map d(x).

    d(x) = eta (alpha_d * cell_term(x) + alpha_u * mobile_term(x))
    + y0 x^{2b}; the downlink SINR at radius x is 1 / d(x).  Strictly
    increasing in x, d(0) = 0.

    The mobile term is evaluated at min(x, 0.9 (1 - R/delta)): past
    that radius its mean diverges (overlapping interferer disks) while
    its magnitude is still negligible against the cell term for any
    realistic power ratio, so freezing it keeps the map finite, strictly
    increasing and invertible on the whole cell.
    """
    if params is None:
        params = SinrParams.from_model(net, prop, ctrl)
    b = prop.b
    xr = net.cell_radius / net.delta
    total = mix.alpha_d * isr_dl_dl(x, b, ctrl)
    if mix.alpha_u > 0:
        x_cross = min(x, _CROSS_TERM_CLAMP * (1.0 - xr))
        total += mix.alpha_u * isr_ul_dl(x_cross, b, prop.k, xr, prop.p_star_over_p, ctrl, net.delta)
    return params.eta * total + params.y0 * x ** (2.0 * b)


def uplink_inverse_sinr(x, net, prop, mix, params=None, ctrl=None):
    """The uplink noise-plus-interference over signal map u(x).

    u(x) = (eta (alpha_u a1 + alpha_d a2) + y0_prime) x^{2b(1-k)}; the
    uplink SINR at radius x is 1 / u(x).  For k = 1 the power control
    removes all x dependence and u is constant.
    """
    if params is None:
        params = SinrParams.from_model(net, prop, ctrl)
    coeff = params.eta * (mix.alpha_u * params.a1_value + mix.alpha_d * params.a2_value)
    return (coeff + params.y0_prime) * x ** (2.0 * prop.b * (1.0 - prop.k))


def sinr_dl(x, net, prop, mix, params=None, ctrl=None):
    """Downlink SINR at normalized radius x; inf when both interference
    and noise vanish there (x = 0, or eta = 0 with zero noise)."""
    d = downlink_inverse_sinr(x, net, prop, mix, params, ctrl)
    return math.inf if d == 0 else 1.0 / d


def sinr_ul(x, net, prop, mix, params=None, ctrl=None):
    """Uplink SINR at normalized radius x; inf when interference and
    noise both vanish."""
    u = uplink_inverse_sinr(x, net, prop, mix, params, ctrl)
    return math.inf if u == 0 else 1.0 / u


def inv_u(y, b, k, mix, params):
    """Radius x at which the uplink map takes the value y.

    Closed form: x = (y / (eta (alpha_u a1 + alpha_d a2) + y0_prime))
    ^ {1 / (2b(1-k))}.  ``params`` must carry a1_value and a2_value
    (see :meth:`SinrParams.from_model`).
    """
    if y <= 0:
        raise ValueError(f"map value must be positive, got {y}")
    if k == 1:
        raise ValueError("k = 1: power control removes the radius dependence, map not invertible")
    coeff = params.eta * (mix.alpha_u * params.a1_value + mix.alpha_d * params.a2_value)
    coeff += params.y0_prime
    if coeff == 0:
        raise ValueError("zero interference and noise: map is identically zero")
    return (y / coeff) ** (1.0 / (2.0 * b * (1.0 - k)))


def _series_coefficients(net, prop, mix, params, ctrl):
    """Leading and next-order coefficients f, c1 of
    d(x) = f x^{2b} (1 + c1 x^2 + ...)."""
    b = prop.b
    xr = net.cell_radius / net.delta
    r_fac = prop.p_star_over_p * (net.cell_radius) ** (2.0 * b * prop.k)
    f = 6.0 * params.eta * (
        mix.alpha_d * omega(b) + mix.alpha_u * r_fac * beta_h(0, b, prop.k, xr, ctrl)
    ) + params.y0
    c1f = 6.0 * params.eta * (
        mix.alpha_d * b * b * omega(b + 1.0)
        + mix.alpha_u * r_fac * beta_h(1, b, prop.k, xr, ctrl)
    )
    return f, c1f / f


def inv_d(y, net, prop, mix, params=None, ctrl=None, method="bisection"):
    """Radius x at which the downlink map takes the value y.

    method="bisection" solves d(x) = y on (0, x_edge] to machine
    precision in x and is the reference.  method="series" inverts the
    two-term truncation d ~ f x^{2b} (1 + c1 x^2): with
    V = (y/f)^{1/(2b)},

        x = V / sqrt(1/2 + sqrt(1/4 + (c1/b) V^2)),

    which is cheap, accurate at small radius, and degrades to a few
    percent toward mid-cell (quantified in the test suite).
    """
    if y <= 0:
        raise ValueError(f"map value must be positive, got {y}")
    if params is None:
        params = SinrParams.from_model(net, prop, ctrl)
    if method == "series":
        f, c1 = _series_coefficients(net, prop, mix, params, ctrl)
        if f == 0:
            raise ValueError("zero interference and noise: map is identically zero")
        v = (y / f) ** (1.0 / (2.0 * prop.b))
        return v / math.sqrt(0.5 + math.sqrt(0.25 + (c1 / prop.b) * v * v))
    if method != "bisection":
        raise ValueError(f"method must be 'bisection' or 'series', got {method!r}")
    x_hi = net.x_edge
    d_hi = downlink_inverse_sinr(x_hi, net, prop, mix, params, ctrl)
    if y > d_hi:
        raise ValueError(f"value {y} exceeds the map's maximum {d_hi} at the cell edge")
    if y == d_hi:
        return x_hi
    lo, hi = 0.0, x_hi
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if downlink_inverse_sinr(mid, net, prop, mix, params, ctrl) < y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * x_hi:
            break
    return 0.5 * (lo + hi)


def coverage_macro(gamma_db, direction, net, prop, mix, user_dist="uniform-disk",
                   params=None, ctrl=None):
    """Probability that the SINR of a uniformly placed user exceeds the
    threshold ``gamma_db``.

    With users uniform in the serving disk the coverage is
    (min(x_gamma, x_edge) / x_edge)^2 where x_gamma is the radius at
    which the SINR map crosses the threshold: the bisection inverse of
    the downlink map, or the closed-form uplink inverse.  For k = 1 the
    uplink SINR is radius-free and coverage is a step function.
    """
    if user_dist != "uniform-disk":
        raise ValueError(f"only 'uniform-disk' user placement is supported, got {user_dist!r}")
    direction = direction.lower()
    if direction not in ("dl", "ul"):
        raise ValueError(f"direction must be 'dl' or 'ul', got {direction!r}")
    if params is None:
        params = SinrParams.from_model(net, prop, ctrl)
    gamma = 10.0 ** (gamma_db / 10.0)
    y = 1.0 / gamma
    x_edge = net.x_edge

    if direction == "dl":
        if downlink_inverse_sinr(x_edge, net, prop, mix, params, ctrl) <= y:
            return 1.0
        x_gamma = inv_d(y, net, prop, mix, params, ctrl, method="bisection")
        return (x_gamma / x_edge) ** 2
    if prop.k == 1:
        return 1.0 if uplink_inverse_sinr(x_edge, net, prop, mix, params, ctrl) <= y else 0.0
    if uplink_inverse_sinr(x_edge, net, prop, mix, params, ctrl) <= y:
        return 1.0
    x_gamma = inv_u(y, prop.b, prop.k, mix, params)
    return (min(x_gamma, x_edge) / x_edge) ** 2
