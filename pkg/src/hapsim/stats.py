"""Analytic distributions of the beamformed link: alignment mass factors,
directivity-gain constant, Nakagami/Gamma fading density, and the SNR, ICI,
and SINR densities.

The directivity-gain delta fixes the gain at kappa, so only the smooth
Gamma-family densities are evaluated numerically. The alignment masses
A_Rx/A_Tx scale total probability mass, not shape; they follow the
Q-function expression verbatim and can be negative for large deviations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special


@dataclass
class PdfParams:
    """Parameters of the analytic SNR/ICI/SINR densities."""

    m: float = 3.0            # Nakagami fading parameter
    kappa: float = 256.0      # directivity-gain constant kappa(n_x, n_y)
    a_rx: float = 1.0         # receiver alignment mass
    a_tx: float = 1.0         # transmitter alignment mass
    noise_scale: float = 1.0  # E_{x,w}|w|
    ici_energy_fraction: float = 1.0  # per-interferer leakage energy / kappa

    def validate(self) -> None:
        if self.m <= 0:
            raise ValueError(f"m must be > 0, got {self.m}")
        if self.kappa < 0:
            raise ValueError(f"kappa must be >= 0, got {self.kappa}")
        if self.noise_scale <= 0:
            raise ValueError(f"noise_scale must be > 0, got {self.noise_scale}")
        if not -1.0 <= self.a_rx <= 1.0 or not -1.0 <= self.a_tx <= 1.0:
            raise ValueError("alignment masses must lie in [-1, 1]")


def q_function(x) -> np.ndarray:
    """Gaussian tail Q(x) = P(N(0,1) > x)."""
    return 0.5 * special.erfc(np.asarray(x, dtype=float) / math.sqrt(2.0))


def rect(x) -> np.ndarray:
    """Indicator of |x| <= 1 (closed boundary)."""
    out = (np.abs(np.asarray(x, dtype=float)) <= 1.0).astype(float)
    return float(out) if out.ndim == 0 else out


def alignment_mass(n_per_axis: int, theta_prime: float, phi: float,
                   spread: float = 1.0) -> float:
    """Probability mass of the aligned gain atom.

    A = Q(N th' / (N ph)) - [Q((1 + N th') / (N ph)) + Q((1 - N th') / (N ph))]

    theta_prime is the deviation from the focus direction and phi the
    elevation deviation; both in the normalized angle convention of the
    gain approximation. spread scales the Q arguments (angular jitter
    level, default 1 = formula verbatim).
    """
    if phi == 0.0:
        raise ValueError("phi = 0 collapses the distribution (degenerate)")
    n = n_per_axis
    denom = n * phi * spread
    a = q_function(n * theta_prime / denom)
    a -= q_function((1.0 + n * theta_prime) / denom)
    a -= q_function((1.0 - n * theta_prime) / denom)
    return float(a)


def kappa_const(n_x: int, n_y: int) -> float:
    """kappa = (n_x n_y)^2 cos^4(pi n_x / 2) cos^4(pi n_y / 2).

    Odd per-axis counts zero the cosine and collapse the gain atom; that
    degenerate case is flagged with a warning.
    """
    n_total = n_x * n_y
    k = (n_total ** 2 * math.cos(math.pi * n_x / 2.0) ** 4
         * math.cos(math.pi * n_y / 2.0) ** 4)
    if abs(k) < 1e-12:
        warnings.warn(f"kappa({n_x}, {n_y}) is 0: odd axis count collapses "
                      "the directivity-gain atom", stacklevel=2)
        return 0.0
    return k


def gamma_pdf(zeta, m: float) -> np.ndarray:
    """Unit-mean squared-Nakagami density m^m z^{m-1} e^{-m z} / Gamma(m)."""
    if m <= 0:
        raise ValueError(f"m must be > 0, got {m}")
    zeta = np.asarray(zeta, dtype=float)
    z = np.atleast_1d(zeta)
    out = np.zeros_like(z)
    pos = z > 0
    out[pos] = np.exp(m * np.log(m) + (m - 1.0) * np.log(z[pos]) - m * z[pos]
                      - special.gammaln(m))
    return float(out[0]) if zeta.ndim == 0 else out


def snr_pdf(gamma_p, params: PdfParams) -> np.ndarray:
    """Density of the beamformed SNR.

    f(g) = (noise m)^m / Gamma(m) * A_Rx A_Tx / kappa^m
           * g^{m-1} exp(-m noise g / kappa)

    Total mass integrates to A_Rx * A_Tx (Gamma integral identity).
    """
    params.validate()
    if params.kappa == 0.0:
        raise ValueError("kappa = 0: degenerate odd-axis geometry")
    m, w, k = params.m, params.noise_scale, params.kappa
    gamma_p = np.asarray(gamma_p, dtype=float)
    g = np.atleast_1d(gamma_p)
    mass = params.a_rx * params.a_tx
    log_norm = m * np.log(w * m) - special.gammaln(m) - m * np.log(k)
    out = np.zeros_like(g)
    pos = g > 0
    out[pos] = mass * np.exp(log_norm + (m - 1.0) * np.log(g[pos])
                             - m * w * g[pos] / k)
    return float(out[0]) if gamma_p.ndim == 0 else out


def ici_pdf(gamma_q, params: PdfParams, n_c: int) -> np.ndarray:
    """Density of the per-interferer leakage variable, summed over the
    n_c - 1 interfering carriers (identically distributed terms)."""
    if n_c < 1:
        raise ValueError(f"n_c must be >= 1, got {n_c}")
    if n_c == 1:
        g = np.asarray(gamma_q, dtype=float)
        return 0.0 if g.ndim == 0 else np.zeros_like(g)
    return (n_c - 1) * snr_pdf(gamma_q, params)


def _interference_shape_scale(params: PdfParams, n_c: int) -> tuple[float, float]:
    """Total interference-to-noise ratio u ~ Gamma(shape, scale)."""
    shape = (n_c - 1) * params.m
    scale = params.ici_energy_fraction * params.kappa \
        / (params.m * params.noise_scale)
    return shape, scale


def sinr_pdf(gamma, params: PdfParams, n_c: int,
             quad_tol: float = 1e-8) -> np.ndarray:
    """Density of the SINR: the SNR form with ICI-augmented noise, with the
    total interference variable marginalized out.

        f(g) = int_0^inf f_snr(g; noise (1 + u)) f_u(u) du

    u is the interference-to-noise ratio, the sum of the n_c - 1 Gamma
    interferers: u ~ Gamma((n_c - 1) m, ici_energy_fraction kappa /
    (m noise)). With no interference (n_c = 1 or zero leakage fraction) the
    integral degenerates to snr_pdf exactly. Raises on non-convergent
    quadrature, reporting the residual estimate.
    """
    params.validate()
    if n_c < 1:
        raise ValueError(f"n_c must be >= 1, got {n_c}")
    gamma = np.asarray(gamma, dtype=float)
    scalar = gamma.ndim == 0
    grid = np.atleast_1d(gamma)

    if n_c == 1 or params.ici_energy_fraction == 0.0:
        out = snr_pdf(grid, params)
        return float(out[0]) if scalar else out

    shape, scale = _interference_shape_scale(params, n_c)
    # Upper limit where the Gamma tail of u drops below 1e-12
    u_max = float(special.gammainccinv(shape, 1e-12)) * scale
    m, w, k = params.m, params.noise_scale, params.kappa
    mass = params.a_rx * params.a_tx
    log_c = m * np.log(m) - special.gammaln(m) - m * np.log(k)
    log_u_norm = -special.gammaln(shape) - shape * np.log(scale)

    out = np.zeros_like(grid)
    for i, g in enumerate(grid):
        if g <= 0:
            continue

        def integrand(u, g=g):
            wn = w * (1.0 + u)
            log_f = (log_c + m * np.log(wn) + (m - 1.0) * np.log(g)
                     - m * wn * g / k)
            log_fu = log_u_norm + (shape - 1.0) * np.log(u) - u / scale
            return np.exp(log_f + log_fu)

        val, err = integrate.quad(integrand, 0.0, u_max, epsabs=quad_tol,
                                  epsrel=1e-8, limit=200)
        if err > max(10.0 * quad_tol, 1e-6 * abs(val)):
            raise RuntimeError(
                f"SINR quadrature did not converge at gamma={g!r}: "
                f"value {val:.3e}, residual estimate {err:.3e}")
        out[i] = mass * val
    return float(out[0]) if scalar else out


def snr_pdf_mass(params: PdfParams) -> float:
    """Closed-form total mass of snr_pdf: A_Rx * A_Tx."""
    return params.a_rx * params.a_tx


def pdf_to_db_domain(gamma_lin: np.ndarray, density_lin: np.ndarray
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Change of variable to x = 10 log10(gamma); returns (x_db, density_db)."""
    gamma_lin = np.asarray(gamma_lin, dtype=float)
    x = 10.0 * np.log10(gamma_lin)
    jac = gamma_lin * math.log(10.0) / 10.0
    return x, np.asarray(density_lin) * jac
