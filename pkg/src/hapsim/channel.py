"""Cluster/path MIMO channel synthesis and the tapped-delay discrete model.

The instantaneous channel is a sum over K clusters x L paths of steering
outer products with complex-normal small-scale gains and a motion-induced
phase rotation exp(j 2 pi f_dmax t sin(theta_rd) cos(phi_rd)). Per-carrier
cross matrices H(p, q) come from sampling that rotation across one
multicarrier symbol and transforming to the frequency domain, which is the
construction that produces inter-carrier leakage once the channel varies
within a symbol.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .arrays import ArrayGeometry, BeamWeights, steering_vector
from . import SPEED_OF_LIGHT as C

ANGLE_KEYS = ("theta_tx", "phi_tx", "theta_rx", "phi_rx", "theta_rd", "phi_rd")


@dataclass
class ClusterPathSet:
    """K x L propagation paths: complex gains plus the six per-path angles.

    gains are i.i.d. standard complex normal (E|g|^2 = 1); angle arrays all
    have shape (K, L). theta_rd/phi_rd are the arrival angles relative to
    the receiver's direction of motion (they drive the Doppler rotation).
    """

    gains: np.ndarray
    theta_tx: np.ndarray
    phi_tx: np.ndarray
    theta_rx: np.ndarray
    phi_rx: np.ndarray
    theta_rd: np.ndarray
    phi_rd: np.ndarray

    @property
    def K(self) -> int:
        return self.gains.shape[0]

    @property
    def L(self) -> int:
        return self.gains.shape[1]


@dataclass
class TappedChannel:
    """Per-element v-tap FIR with unit energy per element.

    taps has shape (n_elements, v); sum_l |taps[e, l]|^2 == 1 for every e.
    """

    taps: np.ndarray

    @property
    def v(self) -> int:
        return self.taps.shape[1]

    def frequency_response(self, n_c: int) -> np.ndarray:
        """Per-carrier response F[e, p] = sum_l taps[e, l] exp(-j 2 pi l p / n_c)."""
        l = np.arange(self.v)
        p = np.arange(n_c)
        dft = np.exp(-2j * np.pi * np.outer(l, p) / n_c)
        return self.taps @ dft


@dataclass
class ChannelRealization:
    """Per-carrier-pair channel at one time instant.

    h has shape (n_c, n_c, n_rx, n_tx) with h[p, q] the matrix coupling the
    q-th transmitted carrier into the p-th received carrier; h_eff is the
    beamformed scalar counterpart (None unless weights were supplied).
    """

    h: np.ndarray | None
    h_eff: np.ndarray | None
    carrier_freqs: np.ndarray
    f_d_max: float
    t: float

    @property
    def n_c(self) -> int:
        return len(self.carrier_freqs)


def element_delays(geom: ArrayGeometry, theta_rx: float,
                   phi_rx: float) -> tuple[float, float, float]:
    """Adjacent-element delays and the worst-case aperture delay.

    tau_x = d_x sin(theta) cos(phi) / c, tau_y = d_y sin(theta) sin(phi) / c,
    tau_max = |(n_rx - 1) (d_x sin cos + d_y sin sin) / c| with n_rx the
    per-axis count (square-aperture bound).
    """
    st = np.sin(theta_rx)
    tau_x = geom.d_x * st * np.cos(phi_rx) / C
    tau_y = geom.d_y * st * np.sin(phi_rx) / C
    n = max(geom.n_x, geom.n_y)
    tau_max = abs((n - 1) * (tau_x + tau_y))
    return float(tau_x), float(tau_y), float(tau_max)


def sample_cluster_paths(K: int, L: int, rng: np.random.Generator,
                         angle_ranges: dict | None = None) -> ClusterPathSet:
    """Draw K x L paths: CN(0, 1) gains, angles uniform over configured ranges.

    angle_ranges maps any of theta_tx/phi_tx/theta_rx/phi_rx/theta_rd/phi_rd
    to an (low, high) interval (rad); unlisted angles default to [-pi, pi].
    A zero-width interval pins the angle (used for deterministic arrival
    scenarios).
    """
    if K < 1 or L < 1:
        raise ValueError(f"need K, L >= 1, got K={K}, L={L}")
    angle_ranges = angle_ranges or {}
    gains = (rng.standard_normal((K, L)) + 1j * rng.standard_normal((K, L)))
    gains /= np.sqrt(2.0)
    angles = {}
    for key in ANGLE_KEYS:
        lo, hi = angle_ranges.get(key, (-np.pi, np.pi))
        angles[key] = rng.uniform(lo, hi, size=(K, L)) if hi > lo \
            else np.full((K, L), float(lo))
    return ClusterPathSet(gains=gains, **angles)


def channel_matrix(paths: ClusterPathSet, tx: ArrayGeometry, rx: ArrayGeometry,
                   f: float, t: float, f_d_max: float) -> np.ndarray:
    """Instantaneous channel H(f, t), shape (n_rx_total, n_tx_total).

    H = (N_tx N_rx / sqrt(KL)) sum_{k,l} g_kl a_rx a_tx^H
        exp(j 2 pi f_dmax t sin(theta_rd) cos(phi_rd)),
    with unit element patterns on both sides.
    """
    if f <= 0:
        raise ValueError(f"frequency must be > 0, got {f}")
    scale = tx.n_total * rx.n_total / np.sqrt(paths.K * paths.L)
    h = np.zeros((rx.n_total, tx.n_total), dtype=complex)
    for k in range(paths.K):
        for l in range(paths.L):
            a_r = steering_vector(rx, paths.theta_rx[k, l], paths.phi_rx[k, l], f)
            a_t = steering_vector(tx, paths.theta_tx[k, l], paths.phi_tx[k, l], f)
            rot = np.exp(2j * np.pi * f_d_max * t
                         * np.sin(paths.theta_rd[k, l]) * np.cos(paths.phi_rd[k, l]))
            h += paths.gains[k, l] * rot * np.outer(a_r, a_t.conj())
    return scale * h


def tap_powers(v: int, profile: str = "uniform", decay: float = 1.0) -> np.ndarray:
    """Normalized power-delay profile over v taps (uniform or exponential)."""
    if v < 1:
        raise ValueError(f"need v >= 1, got {v}")
    if profile == "uniform":
        p = np.ones(v)
    elif profile == "exponential":
        p = np.exp(-np.arange(v) / decay)
    else:
        raise ValueError(f"unknown power-delay profile {profile!r}")
    return p / p.sum()


def tapped_channel(paths: ClusterPathSet, v: int, rng: np.random.Generator,
                   n_elements: int = 1, profile: str = "uniform",
                   decay: float = 1.0) -> TappedChannel:
    """Per-element v-tap FIR built from the cluster paths.

    Cluster k lands in tap k mod v; each element sees every path with an
    independent uniform arrival phase; taps are weighted by the configured
    power-delay profile and the tap vector of each element is normalized to
    unit energy.
    """
    powers = tap_powers(v, profile, decay)
    taps = np.zeros((n_elements, v), dtype=complex)
    for k in range(paths.K):
        tap = k % v
        phase = np.exp(2j * np.pi * rng.uniform(size=(n_elements, paths.L)))
        taps[:, tap] += (phase * paths.gains[k]).sum(axis=1)
    taps *= np.sqrt(powers)
    norms = np.linalg.norm(taps, axis=1, keepdims=True)
    if np.any(norms == 0):
        raise ValueError("degenerate tap draw: an element got zero energy")
    return TappedChannel(taps=taps / norms)


def carrier_frequencies(f_c: float, n_c: int, delta_f: float) -> np.ndarray:
    """n_c carriers uniformly spanning (n_c - 1) * delta_f around f_c."""
    return f_c + (np.arange(n_c) - (n_c - 1) / 2.0) * delta_f


def carrier_channel_matrices(paths: ClusterPathSet, tx: ArrayGeometry,
                             rx: ArrayGeometry, f_c: float, n_c: int,
                             delta_f: float, f_d_max: float, t: float = 0.0,
                             v: int = 1,
                             tx_weights: BeamWeights | None = None,
                             rx_weights: BeamWeights | None = None,
                             effective_only: bool = False,
                             rx_freq_offset: float = 0.0) -> ChannelRealization:
    """Cross-carrier matrices H(p, q) for one multicarrier symbol.

    The per-path Doppler rotation is sampled at the n_c time instants of the
    symbol (duration 1/delta_f) starting at t; cluster k contributes at tap
    k mod v. H(p, q) = (1/n_c) sum_s sum_paths coef(f_q)
    exp(-j 2 pi tap q / n_c) exp(j 2 pi (q - p) s / n_c) rot(t_s).
    A time-invariant channel (f_d_max = 0) is exactly carrier-diagonal.

    rx_freq_offset shifts the frequency at which the arrival response is
    evaluated (the Doppler-shifted carrier seen by the receive array, i.e.
    beam squint); the transmit side stays on the nominal carrier grid.

    With weights supplied, h_eff[p, q] = w_rx^H H(p, q) w_tx is produced by
    the same path sum without materializing the matrices (unless
    effective_only is False, in which case both are returned).
    """
    freqs = carrier_frequencies(f_c, n_c, delta_f)
    scale = tx.n_total * rx.n_total / np.sqrt(paths.K * paths.L)
    t_samp = t + np.arange(n_c) / (n_c * delta_f)
    q_idx = np.arange(n_c)

    want_eff = tx_weights is not None and rx_weights is not None
    h = None if (effective_only and want_eff) else np.zeros(
        (n_c, n_c, rx.n_total, tx.n_total), dtype=complex)
    h_eff = np.zeros((n_c, n_c), dtype=complex) if want_eff else None

    for k in range(paths.K):
        tap = k % v
        tap_phase = np.exp(-2j * np.pi * tap * q_idx / n_c)
        for l in range(paths.L):
            srd = np.sin(paths.theta_rd[k, l]) * np.cos(paths.phi_rd[k, l])
            rot = np.exp(2j * np.pi * f_d_max * t_samp * srd)
            # mix[p, q] = (1/n_c) sum_s rot[s] e^{j 2 pi (q - p) s / n_c}
            delta = q_idx[np.newaxis, :] - q_idx[:, np.newaxis]
            mix = np.einsum("s,pqs->pq", rot, np.exp(
                2j * np.pi * delta[..., np.newaxis] * q_idx / n_c)) / n_c
            coupling = mix * tap_phase[np.newaxis, :]
            for qi, fq in enumerate(freqs):
                a_r = steering_vector(rx, paths.theta_rx[k, l],
                                      paths.phi_rx[k, l], fq + rx_freq_offset)
                a_t = steering_vector(tx, paths.theta_tx[k, l],
                                      paths.phi_tx[k, l], fq)
                amp = scale * paths.gains[k, l]
                if h is not None:
                    outer = amp * np.outer(a_r, a_t.conj())
                    h[:, qi] += coupling[:, qi, np.newaxis, np.newaxis] * outer
                if h_eff is not None:
                    s_scalar = amp * np.vdot(rx_weights.column(), a_r) \
                        * np.vdot(a_t, tx_weights.column())
                    h_eff[:, qi] += coupling[:, qi] * s_scalar
    return ChannelRealization(h=h, h_eff=h_eff, carrier_freqs=freqs,
                              f_d_max=f_d_max, t=t)


def dump_realization(path: str, real: ChannelRealization) -> None:
    """Binary dump: 4 uint32 dims (little endian), then row-major complex64."""
    if real.h is None:
        raise ValueError("realization has no full matrices to dump")
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4I", *real.h.shape))
        fh.write(real.h.astype(np.complex64).tobytes())


def load_realization_matrices(path: str) -> np.ndarray:
    """Read back the matrices written by dump_realization."""
    with open(path, "rb") as fh:
        dims = struct.unpack("<4I", fh.read(16))
        data = np.frombuffer(fh.read(), dtype=np.complex64)
    return data.reshape(dims)
