"""URPA steering vectors, analog beamforming weights, and beam gain.

Element phases follow the planar-array convention: the x-axis phase grows
with sin(theta)cos(phi) and the y-axis phase with sin(theta)sin(phi);
vectors are laid out in Kronecker order (x axis outer, y axis inner). Beam
gain is available both as the literal element sum W^H a and as the
equivalent Dirichlet-kernel product; the two agree to machine precision,
removable singularities included.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import SPEED_OF_LIGHT as C


@dataclass
class ArrayGeometry:
    """Rectangular planar array: per-axis element counts and spacings (m)."""

    n_x: int
    n_y: int
    d_x: float
    d_y: float

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise ValueError("element counts must be >= 1")
        if self.d_x <= 0 or self.d_y <= 0:
            raise ValueError("element spacings must be > 0")

    @property
    def n_total(self) -> int:
        return self.n_x * self.n_y

    @classmethod
    def half_wavelength(cls, n_x: int, n_y: int, f_c: float) -> "ArrayGeometry":
        """Half-carrier-wavelength spacing on both axes."""
        d = C / f_c / 2.0
        return cls(n_x=n_x, n_y=n_y, d_x=d, d_y=d)

    @classmethod
    def from_total(cls, n_total: int, f_c: float) -> "ArrayGeometry":
        """Near-square factorization of a total element count (16 -> 4x4, 32 -> 8x4)."""
        n_x = int(np.sqrt(n_total))
        while n_total % n_x:
            n_x -= 1
        n_y = n_total // n_x
        return cls.half_wavelength(max(n_x, n_y), min(n_x, n_y), f_c)


# A steering vector is a unit-modulus complex ndarray of length n_total in
# Kronecker order; entry 0 is 1+0j by construction.
SteeringVector = np.ndarray


@dataclass
class BeamWeights:
    """Phase-only analog beamforming matrix and its focus direction.

    columns has shape (n_total, n_rf); every entry has modulus 1. focus is
    (theta_f, phi_f) in rad, the direction the phase shifters were set for
    at the carrier wavelength lambda_c.
    """

    columns: np.ndarray
    focus: tuple[float, float]
    lambda_c: float

    @property
    def n_rf(self) -> int:
        return self.columns.shape[1]

    def column(self, k: int = 0) -> np.ndarray:
        return self.columns[:, k]


def _axis_phases(n: int, d: float, f: float, projection) -> np.ndarray:
    """exp(-j (k) 2pi (f/c) d proj) for k = 0..n-1; broadcasts over projection."""
    k = np.arange(n)
    proj = np.asarray(projection)
    return np.exp(-2j * np.pi * (f / C) * d * k * proj[..., np.newaxis])


def steering_vector(geom: ArrayGeometry, theta: float, phi: float,
                    f: float) -> SteeringVector:
    """Plane-wave element response at (theta, phi) and frequency f, x (x) y order."""
    if f <= 0:
        raise ValueError(f"frequency must be > 0, got {f}")
    st = np.sin(theta)
    vx = _axis_phases(geom.n_x, geom.d_x, f, st * np.cos(phi))
    vy = _axis_phases(geom.n_y, geom.d_y, f, st * np.sin(phi))
    return np.kron(vx, vy)


def beam_weights(geom: ArrayGeometry, theta_f: float, phi_f: float,
                 lambda_c: float, n_rf: int = 1) -> BeamWeights:
    """Phase shifters focusing the main lobe at (theta_f, phi_f).

    beta_x(k) = (2pi/lambda_c) k d_x sin(theta_f) cos(phi_f), analogously in
    y; weight entries are exp(-j beta). Equals the steering vector of the
    focus direction at the carrier frequency, so W^H a peaks at n_total.
    """
    w = steering_vector(geom, theta_f, phi_f, C / lambda_c)
    return BeamWeights(columns=np.tile(w[:, np.newaxis], (1, n_rf)),
                       focus=(theta_f, phi_f), lambda_c=lambda_c)


def beam_gain_sum(weights: BeamWeights, geom: ArrayGeometry, theta: float,
                  phi: float, f: float, rf_chain: int = 0) -> complex:
    """Beam gain as the literal element sum w^H a_Rx(theta, phi, f)."""
    a = steering_vector(geom, theta, phi, f)
    return complex(np.vdot(weights.column(rf_chain), a))


def _dirichlet_axis(n: int, x) -> np.ndarray:
    """sum_{k=0}^{n-1} exp(-j 2pi k x) = [sin(n pi x)/sin(pi x)] e^{-j pi (n-1) x}.

    Evaluated stably for all real x: the ratio is computed about the nearest
    integer of x, where the singularity is removable (limit n * (-1)^{(n-1)r}).
    """
    x = np.asarray(x, dtype=float)
    r = np.round(x)
    u = x - r  # |u| <= 0.5, so sinc(u) is bounded away from 0
    ratio = n * np.sinc(n * u) / np.sinc(u)
    sign = np.where((((n - 1) * r.astype(np.int64)) % 2) == 0, 1.0, -1.0)
    return sign * ratio * np.exp(-1j * np.pi * (n - 1) * x)


def beam_gain_closed(weights: BeamWeights, geom: ArrayGeometry, theta, phi,
                     f_c: float, f_d: float) -> complex | np.ndarray:
    """Dirichlet-kernel product form of the beam gain under Doppler offset f_d.

    Per-axis frequency offsets (full direction projections, so that this
    closed form equals beam_gain_sum at f = f_c + f_d exactly):

        mu_x = (f_c + f_d) sin(theta) cos(phi) - f_c sin(theta_f) cos(phi_f)
        mu_y = (f_c + f_d) sin(theta) sin(phi) - f_c sin(theta_f) sin(phi_f)

    g = D_{n_x}((d_x/c) mu_x) * D_{n_y}((d_y/c) mu_y); the peak value is
    n_total at mu_x = mu_y = 0. Broadcasts over array-valued theta/phi.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    tf, pf = weights.focus
    f = f_c + f_d
    uf = np.sin(tf) * np.cos(pf)
    vf = np.sin(tf) * np.sin(pf)
    mu_x = f * np.sin(theta) * np.cos(phi) - f_c * uf
    mu_y = f * np.sin(theta) * np.sin(phi) - f_c * vf
    g = (_dirichlet_axis(geom.n_x, geom.d_x / C * mu_x)
         * _dirichlet_axis(geom.n_y, geom.d_y / C * mu_y))
    return complex(g) if g.ndim == 0 else g


def approx_beam_gain(geom: ArrayGeometry, theta, phi) -> np.ndarray:
    """Small-deviation main-lobe approximation of the normalized power gain.

    cos^2(pi n_x theta / 2) * cos^2(pi n_y phi / 2) inside the validity
    region |theta| <= 1/n_x, |phi| <= 1/n_y; 0 outside. theta/phi are the
    normalized deviations from the focus direction.
    """
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    inside = (np.abs(theta) <= 1.0 / geom.n_x) & (np.abs(phi) <= 1.0 / geom.n_y)
    g = (np.cos(np.pi * geom.n_x * theta / 2.0) ** 2
         * np.cos(np.pi * geom.n_y * phi / 2.0) ** 2)
    out = np.where(inside, g, 0.0)
    return float(out) if out.ndim == 0 else out


def effective_channel(weights: BeamWeights, steering: SteeringVector,
                      rf_chain: int = 0) -> complex:
    """h_eff = w^H a, the beamformed scalar channel."""
    w = weights.column(rf_chain)
    if w.shape != steering.shape:
        raise ValueError(
            f"dimension mismatch: weights {w.shape} vs steering {steering.shape}")
    return complex(np.vdot(w, steering))
