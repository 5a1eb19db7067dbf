"""Multicarrier received signal, ICI covariance, per-carrier SINR, capacity.

A cyclic prefix longer than the channel delay spread is assumed, so
inter-symbol interference is ideal-removed and the only impairment beyond
noise is the inter-carrier leakage caused by channel variation within a
symbol. The ICI covariance is available twice: as an ensemble estimate over
random symbols/channels, and as the analytic reduction that holds for
uncorrelated Gaussian channel entries (eigenvalue trace, tap phase factor,
and the double Fourier sum over tap time-correlations).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelRealization, TappedChannel, tap_powers


@dataclass
class LinkConfig:
    """Per-carrier energy allocation and the noise energy scale."""

    n_c: int = 4
    energy_per_carrier: float = 1.0   # E_{x,p}, equal split by default
    noise_energy: float = 1.0         # E_{x,w} |w|
    rho: float = 1.0                  # per-element transmit power

    def validate(self) -> None:
        if self.n_c < 1:
            raise ValueError(f"n_c must be >= 1, got {self.n_c}")
        if self.energy_per_carrier < 0 or self.noise_energy < 0 or self.rho < 0:
            raise ValueError("energies must be >= 0")
        if self.noise_energy == 0 and self.n_c == 1:
            raise ValueError("zero noise with a single carrier leaves the "
                             "SINR denominator empty")


@dataclass
class SignalCovariance:
    """Eigendecomposition of the per-carrier-pair signal covariance R_XX(p, q)."""

    rxx: np.ndarray          # (n_c, n_c, n_tx, n_tx)
    eigvecs: np.ndarray      # U(p, q)
    eigvals: np.ndarray      # diag entries of Lambda_X(p, q)

    @classmethod
    def from_rxx(cls, rxx: np.ndarray) -> "SignalCovariance":
        rxx = np.asarray(rxx, dtype=complex)
        n_c = rxx.shape[0]
        n_tx = rxx.shape[-1]
        vecs = np.zeros_like(rxx)
        vals = np.zeros(rxx.shape[:2] + (n_tx,))
        for p in range(n_c):
            for q in range(n_c):
                w, u = np.linalg.eigh(rxx[p, q])
                if w.min() < -1e-10 * max(1.0, abs(w).max()):
                    raise ValueError(f"R_XX({p},{q}) is not positive semidefinite")
                vals[p, q] = w
                vecs[p, q] = u
        return cls(rxx=rxx, eigvecs=vecs, eigvals=vals)

    @classmethod
    def identity(cls, n_c: int, n_tx: int) -> "SignalCovariance":
        """Independent unit-power streams: R_XX(p, q) = delta_pq I."""
        rxx = np.zeros((n_c, n_c, n_tx, n_tx), dtype=complex)
        for p in range(n_c):
            rxx[p, p] = np.eye(n_tx)
        return cls.from_rxx(rxx)

    def trace(self, p: int, q: int) -> float:
        return float(self.eigvals[p, q].sum())


@dataclass
class LinkMetrics:
    """Per-carrier SINR, aggregate capacity, and the per-carrier ICI energy."""

    gamma: np.ndarray
    capacity: float
    ici_power: np.ndarray


def received_signal(channels: ChannelRealization, symbols: np.ndarray,
                    cfg: LinkConfig, noise: np.ndarray) -> np.ndarray:
    """Y(p) = sum_q sqrt(E_q) H(p, q) X(q) + sqrt(noise_energy) w(p).

    symbols has shape (n_c, n_tx) with unit average symbol energy; noise is
    the CN(0, 1) draw of shape (n_c, n_rx), scaled internally.
    """
    cfg.validate()
    if channels.h is None:
        raise ValueError("realization carries no full matrices")
    n_c, _, n_rx, n_tx = channels.h.shape
    symbols = np.asarray(symbols)
    noise = np.asarray(noise)
    if symbols.shape != (n_c, n_tx):
        raise ValueError(f"symbols must have shape ({n_c}, {n_tx}), "
                         f"got {symbols.shape}")
    if noise.shape != (n_c, n_rx):
        raise ValueError(f"noise must have shape ({n_c}, {n_rx}), "
                         f"got {noise.shape}")
    y = np.einsum("pqrt,qt->pr", channels.h, symbols)
    return np.sqrt(cfg.energy_per_carrier) * y + np.sqrt(cfg.noise_energy) * noise


def ici_vector(channels: ChannelRealization, symbols: np.ndarray,
               target: int, cfg: LinkConfig) -> np.ndarray:
    """w_ICI(target) = sum_{q != target} sqrt(E_q) H(target, q) X(q)."""
    h = channels.h
    n_c = channels.n_c
    acc = np.zeros(h.shape[2], dtype=complex)
    for q in range(n_c):
        if q == target:
            continue
        acc += h[target, q] @ symbols[q]
    return np.sqrt(cfg.energy_per_carrier) * acc


def ici_covariance_mc(realizations, cfg: LinkConfig, target: int,
                      rng: np.random.Generator) -> np.ndarray:
    """Sample covariance of the ICI vector over channels and random symbols.

    One unit-power QPSK-like Gaussian symbol vector is drawn per
    realization; the estimator is E[w w^H] without mean subtraction (the
    ICI is zero-mean by construction).
    """
    realizations = list(realizations)
    if not realizations:
        raise ValueError("empty realization ensemble")
    n_rx = realizations[0].h.shape[2]
    n_tx = realizations[0].h.shape[3]
    acc = np.zeros((n_rx, n_rx), dtype=complex)
    for real in realizations:
        x = (rng.standard_normal((real.n_c, n_tx))
             + 1j * rng.standard_normal((real.n_c, n_tx))) / np.sqrt(2.0)
        w = ici_vector(real, x, target, cfg)
        acc += np.outer(w, w.conj())
    return acc / len(realizations)


def tap_time_correlation(pdp: np.ndarray, normalized_doppler: float,
                         n_c: int) -> np.ndarray:
    """E[h_l(r1) h_l(r2)^*] under the constant-rotation Doppler model.

    Tap l at intra-symbol sample r is h_l e^{j 2 pi nu r / n_c} with
    E|h_l|^2 = pdp[l] and nu the Doppler shift normalized to the carrier
    spacing, so R[l, r1, r2] = pdp[l] exp(j 2 pi nu (r1 - r2) / n_c).
    """
    pdp = np.asarray(pdp, dtype=float)
    r = np.arange(n_c)
    rot = np.exp(2j * np.pi * normalized_doppler * np.subtract.outer(r, r) / n_c)
    return pdp[:, np.newaxis, np.newaxis] * rot


def ici_covariance_analytic(tap_corr: np.ndarray, rxx: SignalCovariance,
                            cfg: LinkConfig, target: int,
                            n_rx: int = 1) -> np.ndarray:
    """Closed-form ICI covariance for i.i.d.-entry channels.

    tap_corr[l, r1, r2] is the tap time-correlation tensor (see
    tap_time_correlation, or build one from a TappedChannel's power-delay
    profile). Evaluates, for j = target,

        sum_{p != j} sum_{q != j} tr(Lambda_X(p, q)) / n_c^2
          * sum_l e^{-j 2 pi l (p - q) / n_c}
            sum_{r1, r2} tap_corr[l, r1, r2]
              e^{j 2 pi r1 (p - j) / n_c} e^{-j 2 pi r2 (q - j) / n_c}

    and returns that per-element variance times I_{n_rx} (entries are
    uncorrelated across receive elements by assumption).
    """
    cfg.validate()
    n_c = cfg.n_c
    v = tap_corr.shape[0]
    r = np.arange(n_c)
    var = 0.0 + 0.0j
    for p in range(n_c):
        if p == target:
            continue
        for q in range(n_c):
            if q == target:
                continue
            tr = rxx.trace(p, q)
            if tr == 0.0:
                continue
            term = 0.0 + 0.0j
            for l in range(v):
                e1 = np.exp(2j * np.pi * r * (p - target) / n_c)
                e2 = np.exp(-2j * np.pi * r * (q - target) / n_c)
                fourier = e1 @ tap_corr[l] @ e2
                term += np.exp(-2j * np.pi * l * (p - q) / n_c) * fourier
            var += tr / n_c ** 2 * term
    scaled = cfg.energy_per_carrier * var
    return scaled * np.eye(n_rx, dtype=complex)


def analytic_corr_from_tapped(tapped: TappedChannel, normalized_doppler: float,
                              n_c: int) -> np.ndarray:
    """Correlation tensor using a tapped channel's realized power profile."""
    pdp = np.mean(np.abs(tapped.taps) ** 2, axis=0)
    return tap_time_correlation(pdp, normalized_doppler, n_c)


def sinr_per_carrier(channels: ChannelRealization, cfg: LinkConfig) -> LinkMetrics:
    """gamma_p = E_p |s(p,p)|^2 / (sum_{q != p} E_q |s(p,q)|^2 + noise_energy).

    s(p, q) is the beamformed scalar channel w_rx^H H(p, q) w_tx carried by
    the realization (weights applied on both sides at synthesis time).
    """
    cfg.validate()
    if channels.h_eff is None:
        raise ValueError("realization carries no beamformed scalar channel; "
                         "synthesize it with tx/rx weights")
    power = np.abs(channels.h_eff) ** 2  # [p, q]
    n_c = channels.n_c
    sig = cfg.energy_per_carrier * np.diag(power)
    ici = cfg.energy_per_carrier * (power.sum(axis=1) - np.diag(power))
    denom = ici + cfg.noise_energy
    if np.any(denom == 0.0):
        raise ValueError("zero SINR denominator: no noise energy and no ICI")
    gamma = sig / denom
    return LinkMetrics(gamma=gamma, capacity=ergodic_capacity(gamma),
                       ici_power=ici)


def ergodic_capacity(gamma: np.ndarray) -> float:
    """C = sum_p log2(1 + gamma_p), bit/s/Hz over the carrier set."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0):
        raise ValueError("SINR values must be >= 0")
    return float(np.log2(1.0 + gamma).sum())


def sample_sinr_mc(m: float, kappa: float, noise_scale: float, n_c: int,
                   n_samples: int, rng: np.random.Generator,
                   ici_energy_fraction: float = 1.0) -> np.ndarray:
    """Monte-Carlo SINR draws from the fading-level link model.

    Signal power is kappa * z0 with z0 ~ Gamma(m, 1/m) (unit-mean squared
    Nakagami fading); each of the n_c - 1 interfering carriers leaks
    ici_energy_fraction * kappa * z_q with i.i.d. z_q of the same law; the
    noise floor is noise_scale. This is the generative model whose marginal
    density the analytic SINR distribution integrates (stats.sinr_pdf), and
    serves as its independent cross-check.
    """
    if m <= 0 or kappa <= 0 or noise_scale <= 0:
        raise ValueError("m, kappa, noise_scale must all be > 0")
    z0 = rng.gamma(shape=m, scale=1.0 / m, size=n_samples)
    if n_c > 1 and ici_energy_fraction > 0.0:
        zq = rng.gamma(shape=m, scale=1.0 / m, size=(n_samples, n_c - 1))
        interference = ici_energy_fraction * kappa * zq.sum(axis=1)
    else:
        interference = 0.0
    return kappa * z0 / (noise_scale + interference)
