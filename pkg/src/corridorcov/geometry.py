"""Corridor layout, elevation-angle math, coverage borderlines and the
six-regime classifier.

Geometry convention: base stations sit on the x axis at height 0 (the BS
antenna height is the origin of all heights). BS-1 is at x = 0, BS-2 at
x = d1, BS-3 at x = -d1, BS-4 at x = 2*d1. The corridor cross-section is the
rectangle [h1, h2] in height; by symmetry only the half region
x in [0, d1/2] is analyzed. All angles are radians internally.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .propagation import LinkBudget

# Tolerance (meters) for resolving equalities at regime boundaries.
CASE_TIE_TOL_M = 1e-9


class GeometryError(ValueError):
    """Base class for geometry-domain failures."""


class TauOutOfRange(GeometryError):
    """SINR threshold <= 1 (<= 0 dB): the borderline construction needs tau > 1."""


class GeometryInfeasible(GeometryError):
    """A borderline discriminant is negative (corridor too tall for the
    linear-borderline construction)."""


class DegenerateGeometry(GeometryError):
    """A corner-height denominator vanished."""


class CaseUndefined(GeometryError):
    """No uptilt regime's defining inequalities hold."""


def acot(x):
    """Inverse cotangent on the (0, pi) branch, so angles behind the BS
    (cot < 0) map above pi/2."""
    return math.atan2(1.0, x)


def cot(x):
    return 1.0 / math.tan(x)


@dataclass(frozen=True)
class CorridorScenario:
    """Corridor geometry plus radio parameters; the single source of truth
    for every evaluator.

    d1: BS spacing (m). h1/h2: corridor bottom/top above the BS antenna
    height (m). alpha: antenna uptilt (rad). beta: beamwidth (rad), the main
    lobe spanning [alpha, alpha+beta]. tau: linear SINR threshold.
    """

    d1: float
    h1: float
    h2: float
    alpha: float
    beta: float
    tau: float
    radio: LinkBudget = field(default_factory=LinkBudget)

    def __post_init__(self):
        if self.d1 <= 0:
            raise ValueError(f"d1 must be positive, got {self.d1}")
        if not (0 < self.h1 < self.h2):
            raise ValueError(f"need 0 < h1 < h2, got h1={self.h1}, h2={self.h2}")
        if self.tau <= 0:
            raise ValueError(f"tau must be positive (linear), got {self.tau}")
        if self.beta <= 0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @property
    def tau_db(self) -> float:
        return 10.0 * math.log10(self.tau)

    def require_analytic(self) -> None:
        """Preconditions of the borderline/closed-form machinery. The Monte
        Carlo and heatmap paths do not call this and accept alpha <= 0."""
        if not (self.alpha > 0 and self.alpha + self.beta < math.pi / 2):
            raise GeometryError(
                "analytic paths need 0 < alpha and alpha + beta < pi/2 "
                f"(alpha={math.degrees(self.alpha):.3f} deg, "
                f"beta={math.degrees(self.beta):.3f} deg)")
        if self.tau <= 1.0:
            raise TauOutOfRange(
                f"analytic paths need tau > 1 (> 0 dB), got {self.tau}")

    def replace(self, **kwargs) -> "CorridorScenario":
        from dataclasses import replace
        return replace(self, **kwargs)


@dataclass(frozen=True)
class CrossingHeights:
    """Beam-crossing heights between neighbor BSs: h3 at the midpoint
    (lower edges) and h4 at the side (one upper edge, one lower edge)."""

    h3: float
    h4: float


@dataclass(frozen=True)
class BorderlineGeometry:
    """Straight-line coverage borders of the two interference regions.

    The first border runs from (d2, 0) to (d3, h2) and separates BS-1 from
    BS-2 service at threshold; the second runs from (d4, 0) to (d5, h2) and
    separates BS-2 service from BS-3 interference. gamma1/gamma2 are the
    border inclinations.
    """

    d2: float
    d3: float
    d4: float
    d5: float
    gamma1: float
    gamma2: float


@dataclass(frozen=True)
class CornerHeights:
    """Heights of the labeled region corners used by the closed forms.

    h_c3: first border-region corner on BS-1's upper beam edge.
    h_c4: height of BS-2's lower beam edge above BS-1 (= d1 tan alpha).
    h_c5: second border meets BS-3's lower beam edge.
    h_c6: first border meets BS-2's lower beam edge.
    """

    h_c3: float
    h_c4: float
    h_c5: float
    h_c6: float


class CaseId(enum.IntEnum):
    """The six uptilt regimes, in increasing-uptilt order."""

    CASE_1 = 1
    CASE_2 = 2
    CASE_3 = 3
    CASE_4 = 4
    CASE_5 = 5
    CASE_6 = 6


def elevation_angles(d_x: float, h_x: float, d1: float) -> tuple[float, float, float]:
    """Elevation angles from BS-1, BS-2 and BS-3 to a UAV at (d_x, h_x),
    for d_x in the half region [0, d1/2]. theta1 = pi/2 directly overhead."""
    if h_x <= 0:
        raise ValueError(f"h_x must be positive, got {h_x}")
    if not (0 <= d_x <= d1 / 2):
        raise ValueError(f"d_x must lie in [0, d1/2], got {d_x}")
    theta1 = math.pi / 2 if d_x == 0 else math.atan(h_x / d_x)
    theta2 = math.atan(h_x / (d1 - d_x))
    theta3 = math.atan(h_x / (d1 + d_x))
    return theta1, theta2, theta3


def theta1_pdf(theta1: float, h_x: float, d1: float) -> float:
    """Conditional density of the BS-1 elevation angle for a UAV uniform in
    x over [0, d1/2] at fixed height h_x: (2 h_x / d1) csc^2(theta1) on
    [atan(2 h_x / d1), pi/2], zero outside."""
    if h_x <= 0:
        raise ValueError(f"h_x must be positive, got {h_x}")
    lo = math.atan(2.0 * h_x / d1)
    if theta1 < lo or theta1 > math.pi / 2:
        return 0.0
    return (2.0 * h_x / d1) / math.sin(theta1) ** 2


def _require_tilt(s: CorridorScenario) -> None:
    if not (s.alpha > 0 and s.alpha + s.beta < math.pi / 2):
        raise GeometryError(
            "beam geometry needs 0 < alpha and alpha + beta < pi/2 "
            f"(alpha={math.degrees(s.alpha):.3f} deg, "
            f"beta={math.degrees(s.beta):.3f} deg)")


def crossing_heights(s: CorridorScenario) -> CrossingHeights:
    """Beam-crossing heights h3 (center) and h4 (side)."""
    _require_tilt(s)
    h3 = (s.d1 / 2.0) * math.tan(s.alpha)
    h4 = s.d1 / (cot(s.alpha) + cot(s.alpha + s.beta))
    return CrossingHeights(h3=h3, h4=h4)


def borderline_geometry(s: CorridorScenario) -> BorderlineGeometry:
    """Border abscissae d2..d5 and inclinations gamma1/gamma2 from the
    simplified (squared-distance-ratio) threshold equations."""
    if s.tau <= 1.0:
        raise TauOutOfRange(f"borderlines need tau > 1 (> 0 dB), got {s.tau}")
    d1, h2, tau = s.d1, s.h2, s.tau
    sq = math.sqrt(tau)
    d2 = d1 / (sq + 1.0)
    d4 = (sq - 1.0) * d1 / (sq + 1.0)

    disc3 = d1 ** 2 - (1.0 - tau) ** 2 * h2 ** 2 - d1 ** 2 * (1.0 - tau)
    if disc3 < 0:
        raise GeometryInfeasible(
            "first-border discriminant negative: corridor too tall for the "
            f"linear borderline (disc={disc3:.6g})")
    d3 = (d1 - math.sqrt(disc3)) / (1.0 - tau)

    disc5 = (1.0 + tau) ** 2 * d1 ** 2 - (1.0 - tau) ** 2 * (h2 ** 2 + d1 ** 2)
    if disc5 < 0:
        raise GeometryInfeasible(
            "second-border discriminant negative: corridor too tall for the "
            f"linear borderline (disc={disc5:.6g})")
    d5 = (-(1.0 + tau) * d1 + math.sqrt(disc5)) / (1.0 - tau)

    gamma1 = math.atan(h2 / (d2 - d3))
    gamma2 = math.atan(h2 / (d5 - d4))
    return BorderlineGeometry(d2=d2, d3=d3, d4=d4, d5=d5,
                              gamma1=gamma1, gamma2=gamma2)


def corner_heights(s: CorridorScenario, b: BorderlineGeometry) -> CornerHeights:
    """Heights of the labeled corner points c3..c6."""
    _require_tilt(s)
    ct_a = cot(s.alpha)
    ct_ab = cot(s.alpha + s.beta)
    ct_g1 = cot(b.gamma1)
    ct_g2 = cot(b.gamma2)
    dens = {
        "h_c3": ct_ab - ct_g2,
        "h_c5": ct_g2 - ct_a,
        "h_c6": ct_g1 - ct_a,
    }
    for name, den in dens.items():
        if abs(den) < 1e-12:
            raise DegenerateGeometry(f"{name} denominator vanished ({den:.3g})")
    return CornerHeights(
        h_c3=b.d4 / dens["h_c3"],
        h_c4=s.d1 * math.tan(s.alpha),
        h_c5=(-b.d4 - s.d1) / dens["h_c5"],
        h_c6=(b.d2 - s.d1) / dens["h_c6"],
    )


def delta_angles(h_x: float, s: CorridorScenario,
                 b: BorderlineGeometry) -> tuple[float, float, float, float]:
    """Elevation angles at BS-1, at height h_x, to: the first border (delta1),
    the second border (delta2), BS-2's lower beam edge (delta3) and BS-3's
    lower beam edge (delta4). Values above pi/2 (point behind BS-1) are
    legal; the arccot branch is fixed to (0, pi)."""
    if h_x <= 0:
        raise ValueError(f"h_x must be positive, got {h_x}")
    ct_a = cot(s.alpha)
    delta1 = acot(b.d2 / h_x - cot(b.gamma1))
    delta2 = acot(b.d4 / h_x + cot(b.gamma2))
    delta3 = acot(s.d1 / h_x - ct_a)
    delta4 = acot(-s.d1 / h_x + ct_a)
    return delta1, delta2, delta3, delta4


def classify_case(s: CorridorScenario) -> CaseId:
    """Pick the uptilt regime from the inequalities among h1, h2, h3, h4 and
    h_c4. Conditions are evaluated in order 1..6; equalities within
    CASE_TIE_TOL_M resolve to the lower case id."""
    s.require_analytic()
    ch = crossing_heights(s)
    h1, h2, h3, h4 = s.h1, s.h2, ch.h3, ch.h4
    h_c4 = s.d1 * math.tan(s.alpha)
    tol = CASE_TIE_TOL_M

    def gt(a, b):  # a > b with ties counting as true
        return a > b - tol

    def lt(a, b):
        return a < b + tol

    if gt(h1, h3) and gt(h1, h4):
        return CaseId.CASE_1
    if gt(h1, h3) and lt(h1, h4):
        return CaseId.CASE_2
    if lt(h1, h3) and lt(h1, h4) and gt(h2, h_c4):
        return CaseId.CASE_3
    if lt(h1, h3) and lt(h1, h4) and lt(h4, h2) and lt(h2, h_c4):
        return CaseId.CASE_4
    if lt(h1, h3) and lt(h3, h2) and lt(h2, h4):
        return CaseId.CASE_5
    if lt(h2, h3) and lt(h2, h4):
        return CaseId.CASE_6
    raise CaseUndefined(
        f"no uptilt regime matches h1={h1}, h2={h2}, h3={h3:.6g}, "
        f"h4={h4:.6g}, h_c4={h_c4:.6g}")
