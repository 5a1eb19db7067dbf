"""Relative geometry of the two platforms and the LoS Doppler frequency."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .mobility import HapState


@dataclass
class LinkGeometry:
    """Horizontal/slant separation and the relative elevation angle."""

    d2d: float       # m
    d3d: float       # m
    rel_elev: float  # rad
    degenerate: bool = False  # coincident positions


@dataclass
class PhaseAngles:
    """Antenna phase angles (azimuth, elevation) of the Tx and Rx platform."""

    theta_tx: float
    phi_tx: float
    theta_rx: float
    phi_rx: float

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.theta_tx, self.phi_tx, self.theta_rx, self.phi_rx)


def link_geometry(pos1, pos2) -> LinkGeometry:
    """Separation of two ENU positions; rel_elev = atan(dh / d2d).

    rel_elev degrades gracefully: +-pi/2 for vertical alignment, 0 (flagged
    degenerate) for coincident positions.
    """
    pos1 = np.asarray(pos1, dtype=float)
    pos2 = np.asarray(pos2, dtype=float)
    if not (np.all(np.isfinite(pos1)) and np.all(np.isfinite(pos2))):
        raise ValueError("positions must be finite")
    diff = pos1 - pos2
    d2d = math.hypot(diff[0], diff[1])
    d3d = float(np.linalg.norm(diff))
    dh = diff[2]
    if d3d == 0.0:
        return LinkGeometry(d2d=0.0, d3d=0.0, rel_elev=0.0, degenerate=True)
    rel_elev = math.atan2(dh, d2d)  # == atan(dh/d2d) for d2d > 0, +-pi/2 at d2d = 0
    return LinkGeometry(d2d=d2d, d3d=d3d, rel_elev=rel_elev)


def doppler_frequency(s1: HapState, s2: HapState, phases: PhaseAngles,
                      lam: float) -> float:
    """LoS Doppler frequency from the speeds, move directions, and phase angles.

    f_d = (v1/lam) [cos(th1 - DA1) cos(ph1) cos(DE1) + sin(ph1) sin(DE1)]
        + (v2/lam) [cos(th2 - DA2) cos(ph2) cos(DE2) + sin(ph2) sin(DE2)]
    """
    if lam <= 0.0:
        raise ValueError(f"wavelength must be > 0, got {lam}")

    def radial(v, theta, phi, d_az, d_el):
        return (v / lam) * (math.cos(theta - d_az) * math.cos(phi) * math.cos(d_el)
                            + math.sin(phi) * math.sin(d_el))

    return (radial(s1.velocity, phases.theta_tx, phases.phi_tx, s1.dir_az, s1.dir_el)
            + radial(s2.velocity, phases.theta_rx, phases.phi_rx, s2.dir_az, s2.dir_el))


def los_phase_approximation(geom: LinkGeometry) -> PhaseAngles:
    """Phase angles under the LoS condition: th1 ~ 0, th2 ~ pi, ph1 ~ ph2 ~ rel_elev."""
    return PhaseAngles(theta_tx=0.0, phi_tx=geom.rel_elev,
                       theta_rx=math.pi, phi_rx=geom.rel_elev)
