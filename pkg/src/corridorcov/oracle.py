"""Independent reference evaluator: SINR at arbitrary points and coverage by
deterministic 2D midpoint quadrature over the corridor cross-section.

This path works from the raw SINR definition (per-BS received powers,
association rule, interference mode, optional noise) with no borderline
approximation, so it cross-checks the closed forms. The same point evaluator
backs the Monte Carlo sampler and the heatmap.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import defaults
from .geometry import CorridorScenario
from .propagation import (
    AirToGroundPathLoss,
    BeamPattern,
    FreeSpacePathLoss,
    InterferenceMode,
    PathLossModel,
    RectangularBeam,
    db_to_linear,
)


class Association(enum.Enum):
    STRONGEST = "strongest"
    NEAREST = "nearest"


@dataclass(frozen=True)
class OracleAssumptions:
    """Everything the point evaluator needs beyond the scenario.

    bs_positions defaults to (-d1, 0, d1, 2*d1): the served BS pair plus one
    interferer on each side. beam=None builds a rectangular lobe from the
    scenario tilt with the default peak-gain rule, so uptilt sweeps do not
    have to rebuild assumptions.
    """

    association: Association = Association.STRONGEST
    interference: InterferenceMode = InterferenceMode.DOMINANT_ONLY
    beam: BeamPattern | None = None
    pathloss: PathLossModel = field(default_factory=FreeSpacePathLoss)
    include_noise: bool = True
    bs_positions: tuple[float, ...] | None = None

    def resolve_positions(self, s: CorridorScenario) -> tuple[float, ...]:
        pos = self.bs_positions
        if pos is None:
            pos = (-s.d1, 0.0, s.d1, 2.0 * s.d1)
        if len(pos) < 2:
            raise ValueError("need at least two base stations")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ValueError(f"BS positions must be strictly increasing: {pos}")
        return tuple(float(p) for p in pos)

    def resolve_beam(self, s: CorridorScenario) -> BeamPattern:
        if self.beam is not None:
            return self.beam
        peak = float(db_to_linear(defaults.peak_gain_db(s.beta)))
        return RectangularBeam(peak_gain=peak, alpha=s.alpha, beta=s.beta)


def received_powers(x, z, s: CorridorScenario, a: OracleAssumptions,
                    los_uniforms=None):
    """Per-BS received power in watts at points (x, z).

    Returns (powers, distances), both shaped (n_bs, n_points). With
    `los_uniforms` (n_bs, n_points) and an air-to-ground model, each link's
    LoS state is the Bernoulli draw u < P_LoS(theta) instead of the
    expectation mixture.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    z = np.atleast_1d(np.asarray(z, dtype=float))
    x, z = np.broadcast_arrays(x, z)
    positions = a.resolve_positions(s)
    beam = a.resolve_beam(s)
    lam = s.radio.wavelength_m
    p_tx = s.radio.p_tx_w

    n_bs = len(positions)
    powers = np.empty((n_bs, x.size), dtype=float)
    dists = np.empty((n_bs, x.size), dtype=float)
    xf = x.ravel()
    zf = z.ravel()
    for i, pos in enumerate(positions):
        horiz = np.abs(xf - pos)
        r = np.hypot(horiz, zf)
        theta = np.arctan2(zf, horiz)
        g = beam.gain(theta)
        if los_uniforms is not None and isinstance(a.pathloss, AirToGroundPathLoss):
            los = los_uniforms[i] < a.pathloss.p_los(theta)
            pl = a.pathloss.loss(r, theta, lam, los_state=los)
        else:
            pl = a.pathloss.loss(r, theta, lam)
        powers[i] = p_tx * g / pl
        dists[i] = r
    return powers, dists


def evaluate_sinr(x, z, s: CorridorScenario, a: OracleAssumptions,
                  los_uniforms=None):
    """Serving index and linear SINR at points (x, z).

    Serving is argmax received power (STRONGEST) or min distance (NEAREST);
    ties go to the lowest BS index. Interference is the strongest single
    non-serving power (DOMINANT_ONLY) or their sum (SUM_ALL). Where no BS
    delivers any power the serving index falls back to the nearest BS and
    the SINR is 0.
    """
    powers, dists = received_powers(x, z, s, a, los_uniforms=los_uniforms)
    n = powers.shape[1]
    cols = np.arange(n)
    nearest = np.argmin(dists, axis=0)
    if a.association is Association.STRONGEST:
        serving = np.argmax(powers, axis=0)
    else:
        serving = nearest

    p_serv = powers[serving, cols]
    if a.interference is InterferenceMode.DOMINANT_ONLY:
        masked = powers.copy()
        masked[serving, cols] = -np.inf
        interference = np.max(masked, axis=0)
    else:
        interference = powers.sum(axis=0) - p_serv
    noise = s.radio.noise_w if a.include_noise else 0.0
    denom = interference + noise

    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0.0, p_serv / denom,
                       np.where(p_serv > 0.0, np.inf, 0.0))

    dead = powers.max(axis=0) == 0.0
    if np.any(dead):
        serving = serving.copy()
        serving[dead] = nearest[dead]
        out[dead] = 0.0
    return serving, out


def point_sinr(d_x: float, h_x: float, s: CorridorScenario,
               a: OracleAssumptions) -> tuple[int, float]:
    """Scalar wrapper over evaluate_sinr for a single point."""
    serving, val = evaluate_sinr(
        np.array([d_x], dtype=float), np.array([h_x], dtype=float), s, a)
    return int(serving[0]), float(val[0])


def _corridor_axes(s: CorridorScenario, n_x: int, n_z: int):
    dx = (s.d1 / 2.0) / n_x
    dz = (s.h2 - s.h1) / n_z
    xs = (np.arange(n_x) + 0.5) * dx
    zs = s.h1 + (np.arange(n_z) + 0.5) * dz
    return xs, zs


def coverage_by_quadrature(s: CorridorScenario, a: OracleAssumptions,
                           n_x: int, n_z: int) -> float:
    """Coverage probability by midpoint rule over [0, d1/2] x [h1, h2]:
    the fraction of cell midpoints with SINR >= tau (uniform UAV density,
    equal cell weights). Rows are evaluated in blocks; the aggregate is an
    integer count, so results are identical for any work split."""
    if n_x < 64 or n_z < 64:
        raise ValueError(f"need n_x, n_z >= 64, got {n_x} x {n_z}")
    xs, zs = _corridor_axes(s, n_x, n_z)
    covered = 0
    rows_per_block = max(1, 2_000_000 // n_x)
    for k0 in range(0, n_z, rows_per_block):
        zblock = zs[k0:k0 + rows_per_block]
        xx = np.broadcast_to(xs, (zblock.size, n_x)).ravel()
        zz = np.repeat(zblock, n_x)
        _, val = evaluate_sinr(xx, zz, s, a)
        covered += int(np.count_nonzero(val >= s.tau))
    return covered / float(n_x * n_z)


def coverage_with_refinement(s: CorridorScenario, a: OracleAssumptions,
                             n_x: int, n_z: int) -> tuple[float, float, float]:
    """Coverage at (n_x, n_z) and at doubled resolution, with |delta|."""
    p = coverage_by_quadrature(s, a, n_x, n_z)
    p2 = coverage_by_quadrature(s, a, 2 * n_x, 2 * n_z)
    return p, p2, abs(p - p2)
