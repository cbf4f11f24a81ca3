"""Antenna gain, bandwidth and transition-time models for detection satellites.

All sensing profit in this package derives from the gain of a circular
aperture antenna pointed off-axis by an angle theta, together with a
bandwidth tier chosen from the task's importance degree.  Times are
integer seconds and data volumes integer units so that storage and
transition arithmetic stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Mapping

if TYPE_CHECKING:
    from .model import Satellite

# Scaling constant between off-axis angle and the Bessel argument u.
U_SCALE = 2.07123

# Default bandwidth units per tier; powers of two keep storage arithmetic exact.
DEFAULT_BANDWIDTH_UNITS: dict[int, int] = {1: 8, 2: 4, 3: 2, 4: 1}

# Importance-degree breakpoints for the four bandwidth tiers.
_TIER_BOUNDS = ((75, 1), (50, 2), (25, 3), (0, 4))


@dataclass(frozen=True)
class GainParams:
    """Physical antenna parameters of one satellite.

    diameter is the aperture diameter in metres, efficiency the aperture
    efficiency (0, 1], wavelength the operating wavelength in metres.
    """

    diameter: float
    efficiency: float
    wavelength: float

    def __post_init__(self) -> None:
        if self.diameter <= 0:
            raise ValueError(f"antenna diameter must be positive, got {self.diameter}")
        if not 0 < self.efficiency <= 1:
            raise ValueError(f"antenna efficiency must be in (0, 1], got {self.efficiency}")
        if self.wavelength <= 0:
            raise ValueError(f"wavelength must be positive, got {self.wavelength}")


@dataclass(frozen=True)
class ParamSet:
    """Observation parameters of a task: frequency band, bandwidth tier,
    polarization mode and detection mode."""

    fre: int
    band: int
    pol: int
    mode: int


def _bessel_series(n: int, u: float, terms: int = 60) -> float:
    """Power series for J_n(u); accurate for moderate |u| (< 12 or so)."""
    half = u / 2.0
    term = half**n / math.factorial(n)
    total = term
    for k in range(1, terms):
        term *= -(half * half) / (k * (k + n))
        total += term
        if abs(term) <= 1e-18 * max(1.0, abs(total)):
            break
    return total


def _bessel_miller(n: int, x: float) -> float:
    """J_n(x) for x >= 12 via downward recurrence with normalization."""
    m = int(x + 16 + 10.0 * x ** (1.0 / 3.0))
    if m % 2:
        m += 1
    m = max(m, n + 20)
    jp = 0.0
    jc = 1e-30
    result = 0.0
    norm = 0.0
    for k in range(m, 0, -1):
        jm = (2.0 * k / x) * jc - jp
        jp = jc
        jc = jm
        if k - 1 == n:
            result = jc
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * jc
        if abs(jc) > 1e250:
            jc *= 1e-250
            jp *= 1e-250
            result *= 1e-250
            norm *= 1e-250
    norm += jc
    return result / norm

def bessel_j(n: int, u: float) -> float:
    """Bessel function of the first kind J_n(u) for small integer order.

    Uses the power series for moderate arguments and Miller's downward
    recurrence beyond, where the series would lose precision.
    """
    if n < 0:
        raise ValueError(f"order must be non-negative, got {n}")
    if u == 0.0:
        return 1.0 if n == 0 else 0.0
    x = abs(u)
    value = _bessel_series(n, x) if x < 12.0 else _bessel_miller(n, x)
    if u < 0.0 and n % 2:
        return -value
    return value


def peak_gain(params: GainParams) -> float:
    """Boresight gain G0 = eta * pi^2 * D^2 / lambda^2."""
    return params.efficiency * math.pi**2 * params.diameter**2 / params.wavelength**2


def theta_3db(params: GainParams) -> float:
    """Half-power beamwidth in degrees: 70 * lambda / D."""
    return 70.0 * params.wavelength / params.diameter


def antenna_gain(theta_deg: float, params: GainParams) -> float:
    """Gain of a circular aperture at off-axis angle theta (degrees).

    G(theta) = G0 * (J1(u)/(2u) + 36 * J3(u)/u^3)^2 with
    u = U_SCALE * sin(theta) / sin(theta_3db).  At theta = 0 the bracket
    tends to 1/4 + 36/48 = 1, so the boresight value is exactly G0.
    """
    g0 = peak_gain(params)
    t3 = math.radians(theta_3db(params))
    u = U_SCALE * math.sin(math.radians(theta_deg)) / math.sin(t3)
    if u == 0.0:
        return g0
    if abs(u) < 1e-4:
        # Series for the bracket near u = 0 avoids 0/0 noise:
        # J1(u)/(2u) ~ 1/4 - u^2/32, 36*J3(u)/u^3 ~ 3/4 - 3*u^2/64.
        bracket = 1.0 - u * u * (1.0 / 32.0 + 3.0 / 64.0)
    else:
        bracket = bessel_j(1, u) / (2.0 * u) + 36.0 * bessel_j(3, u) / u**3
    return g0 * bracket * bracket


def bandwidth_for_degree(degree: int) -> int:
    """Bandwidth tier (1 widest .. 4 narrowest) for an importance degree.

    Degrees above 75 take tier 1, above 50 tier 2, above 25 tier 3 and the
    rest tier 4.
    """
    if not 1 <= degree <= 100:
        raise ValueError(f"degree must be in [1, 100], got {degree}")
    for bound, tier in _TIER_BOUNDS:
        if degree > bound:
            return tier
    raise AssertionError("unreachable")


def data_volume(
    degree: int,
    dur: int,
    beta: int,
    units: Mapping[int, int] = DEFAULT_BANDWIDTH_UNITS,
) -> int:
    """Data produced by observing a task: beta * bandwidth units * duration."""
    if dur <= 0:
        raise ValueError(f"duration must be positive, got {dur}")
    return beta * units[bandwidth_for_degree(degree)] * dur


def transition_time(a: ParamSet, b: ParamSet, sat: "Satellite") -> int:
    """Setup seconds the satellite needs between observing a and then b.

    Each parameter that changes contributes its switching penalty; the
    result is the max of those penalties and the base settling time delta.
    """
    t = sat.delta
    if a.fre != b.fre:
        t = max(t, sat.gamma_fre)
    if a.band != b.band:
        t = max(t, sat.gamma_band)
    if a.pol != b.pol:
        t = max(t, sat.gamma_pol)
    if a.mode != b.mode:
        t = max(t, sat.gamma_mode)
    return t


def task_profit(degree: int, base_gain: float, omega: Mapping[int, float]) -> int:
    """Integer profit of a task: base gain times the tier weight, rounded.

    omega maps each bandwidth tier to its gain weight.
    """
    value = round(base_gain * omega[bandwidth_for_degree(degree)])
    if value < 0:
        raise ValueError(f"task profit must be non-negative, got {value}")
    return value
