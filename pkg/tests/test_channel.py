"""Cluster/path channel synthesis and tapped-delay model tests."""

import numpy as np
import pytest

from hapsim import SPEED_OF_LIGHT as C
from hapsim.arrays import ArrayGeometry, beam_weights
from hapsim.channel import (carrier_channel_matrices, channel_matrix,
                            dump_realization, element_delays,
                            load_realization_matrices, sample_cluster_paths,
                            tap_powers, tapped_channel)

F_C = 60e9
LAM = C / F_C


def geoms(n=4):
    g = ArrayGeometry.half_wavelength(n, n, F_C)
    return g, g


# --- element delays -----------------------------------------------------------

def test_broadside_delays_zero():
    tx, _ = geoms()
    assert element_delays(tx, 0.0, 0.3) == (0.0, 0.0, 0.0)


def test_endfire_delay_is_half_period():
    # d = lambda/2 at endfire: tau_x = d/c = 1/(2 f_c)
    tx, _ = geoms()
    tau_x, tau_y, _ = element_delays(tx, np.pi / 2, 0.0)
    assert tau_x == pytest.approx(1.0 / (2 * F_C), rel=1e-12)
    assert tau_x == pytest.approx(8.333333333333334e-12, rel=1e-12)
    assert tau_y == pytest.approx(0.0, abs=1e-25)


def test_max_delay_scales_with_aperture():
    t4 = element_delays(ArrayGeometry.half_wavelength(4, 4, F_C), 0.7, 0.4)[2]
    t8 = element_delays(ArrayGeometry.half_wavelength(8, 8, F_C), 0.7, 0.4)[2]
    assert t8 == pytest.approx(t4 * 7.0 / 3.0, rel=1e-12)


# --- path sampling --------------------------------------------------------------

def test_single_path_set():
    p = sample_cluster_paths(1, 1, np.random.default_rng(0))
    assert p.K == 1 and p.L == 1 and p.gains.shape == (1, 1)


def test_gain_power_normalization():
    p = sample_cluster_paths(100, 1000, np.random.default_rng(1))
    assert np.mean(np.abs(p.gains) ** 2) == pytest.approx(1.0, abs=0.02)


def test_sampling_reproducible_and_ranged():
    a = sample_cluster_paths(3, 4, np.random.default_rng(5),
                             {"theta_rx": (0.1, 0.2)})
    b = sample_cluster_paths(3, 4, np.random.default_rng(5),
                             {"theta_rx": (0.1, 0.2)})
    np.testing.assert_array_equal(a.gains, b.gains)
    np.testing.assert_array_equal(a.theta_rd, b.theta_rd)
    assert np.all((a.theta_rx >= 0.1) & (a.theta_rx <= 0.2))
    assert np.all(np.abs(a.phi_tx) <= np.pi)


def test_invalid_counts_rejected():
    with pytest.raises(ValueError):
        sample_cluster_paths(0, 1, np.random.default_rng(0))


# --- instantaneous channel matrix --------------------------------------------------

def test_single_path_is_rank_one_with_known_norm():
    tx, rx = geoms()
    p = sample_cluster_paths(1, 1, np.random.default_rng(2))
    p.gains[0, 0] = 1.0
    h = channel_matrix(p, tx, rx, F_C, 0.0, 0.0)
    s = np.linalg.svd(h, compute_uv=False)
    expected = tx.n_total * rx.n_total * np.sqrt(rx.n_total * tx.n_total)
    assert s[0] == pytest.approx(expected, rel=1e-12)
    assert s[1] <= 1e-10 * s[0]


def test_static_time_matches_zero_doppler():
    tx, rx = geoms(3)
    p = sample_cluster_paths(2, 3, np.random.default_rng(3))
    h_t0 = channel_matrix(p, tx, rx, F_C, 0.0, 5e4)
    h_nodop = channel_matrix(p, tx, rx, F_C, 123.0, 0.0)
    np.testing.assert_allclose(h_t0, h_nodop, atol=1e-10)


def test_frobenius_norm_invariant_to_doppler_rotation():
    tx, rx = geoms(3)
    p = sample_cluster_paths(1, 1, np.random.default_rng(4))
    n0 = np.linalg.norm(channel_matrix(p, tx, rx, F_C, 0.0, 0.0))
    n1 = np.linalg.norm(channel_matrix(p, tx, rx, F_C, 17.0, 4.2e4))
    assert n1 == pytest.approx(n0, rel=1e-12)


def test_expected_frobenius_energy():
    # E||H||_F^2 = scale^2 * K L * n_rx n_tx with unit-power gains.
    tx, rx = geoms()
    K, L = 2, 3
    rng = np.random.default_rng(6)
    acc = 0.0
    n_mc = 400
    for _ in range(n_mc):
        p = sample_cluster_paths(K, L, rng)
        acc += np.linalg.norm(channel_matrix(p, tx, rx, F_C, 0.0, 0.0)) ** 2
    expected = (tx.n_total * rx.n_total) ** 2 / (K * L) * K * L \
        * rx.n_total * tx.n_total
    assert acc / n_mc == pytest.approx(expected, rel=0.15)


def test_swapping_sides_conjugate_transposes_single_path():
    tx = ArrayGeometry.half_wavelength(3, 2, F_C)
    rx = ArrayGeometry.half_wavelength(3, 2, F_C)
    rng = np.random.default_rng(7)
    p = sample_cluster_paths(1, 1, rng)
    p.gains[0, 0] = abs(p.gains[0, 0])  # real gain so conjugation acts on geometry only
    h = channel_matrix(p, tx, rx, F_C, 0.0, 0.0)
    swapped = sample_cluster_paths(1, 1, np.random.default_rng(7))
    swapped.gains[0, 0] = p.gains[0, 0]
    swapped.theta_tx, swapped.theta_rx = p.theta_rx, p.theta_tx
    swapped.phi_tx, swapped.phi_rx = p.phi_rx, p.phi_tx
    h_swap = channel_matrix(swapped, rx, tx, F_C, 0.0, 0.0)
    np.testing.assert_allclose(h_swap, h.conj().T, atol=1e-9)


def test_large_ensemble_entries_near_gaussian():
    # normalized entries pooled over realizations: complex kurtosis
    # E|z|^4 / (E|z|^2)^2 -> 2 within 10%
    tx, rx = geoms()
    rng = np.random.default_rng(8)
    pool = []
    for _ in range(60):
        p = sample_cluster_paths(8, 8, rng)
        h = channel_matrix(p, tx, rx, F_C, 0.0, 0.0)
        pool.append((h / np.linalg.norm(h)).ravel())
    z = np.concatenate(pool)
    kurt = np.mean(np.abs(z) ** 4) / np.mean(np.abs(z) ** 2) ** 2
    assert kurt == pytest.approx(2.0, rel=0.10)


# --- tapped channel ------------------------------------------------------------------

def test_single_tap_flat_response():
    p = sample_cluster_paths(3, 2, np.random.default_rng(9))
    t = tapped_channel(p, 1, np.random.default_rng(10), n_elements=5)
    f = t.frequency_response(8)
    np.testing.assert_allclose(np.abs(f), 1.0, atol=1e-12)


def test_frequency_response_equals_direct_dft():
    p = sample_cluster_paths(4, 3, np.random.default_rng(11))
    t = tapped_channel(p, 4, np.random.default_rng(12), n_elements=3)
    f = t.frequency_response(4)
    # oracle: direct evaluation of the FIR transfer function
    for e in range(3):
        for carrier in range(4):
            direct = sum(t.taps[e, l] * np.exp(-2j * np.pi * l * carrier / 4)
                         for l in range(4))
            assert f[e, carrier] == pytest.approx(direct, rel=1e-12)


def test_tap_powers_normalized():
    p = sample_cluster_paths(4, 3, np.random.default_rng(13))
    t = tapped_channel(p, 4, np.random.default_rng(14), n_elements=6)
    np.testing.assert_allclose(np.sum(np.abs(t.taps) ** 2, axis=1), 1.0,
                               atol=1e-12)
    with pytest.raises(ValueError):
        tap_powers(0)
    pdp = tap_powers(4, "exponential", decay=2.0)
    assert pdp.sum() == pytest.approx(1.0)
    assert np.all(np.diff(pdp) < 0)


# --- carrier cross matrices -------------------------------------------------------------

def test_time_invariant_channel_is_carrier_diagonal():
    tx, rx = geoms(2)
    p = sample_cluster_paths(2, 2, np.random.default_rng(15))
    real = carrier_channel_matrices(p, tx, rx, F_C, 4, 120e3, f_d_max=0.0, v=1)
    for i in range(4):
        for j in range(4):
            if i != j:
                assert np.linalg.norm(real.h[i, j]) <= 1e-12
    # diagonal equals the instantaneous matrix at each carrier frequency
    for i, fq in enumerate(real.carrier_freqs):
        np.testing.assert_allclose(real.h[i, i],
                                   channel_matrix(p, tx, rx, fq, 0.0, 0.0),
                                   atol=1e-9)


def test_doppler_produces_cross_carrier_leakage():
    tx, rx = geoms(2)
    p = sample_cluster_paths(1, 1, np.random.default_rng(16))
    real = carrier_channel_matrices(p, tx, rx, F_C, 4, 120e3, f_d_max=40e3, v=1)
    off = sum(np.linalg.norm(real.h[i, j]) for i in range(4) for j in range(4)
              if i != j)
    assert off > 1e-3


def test_effective_scalar_matches_bilinear_form():
    tx, rx = geoms(3)
    p = sample_cluster_paths(3, 2, np.random.default_rng(17))
    w_tx = beam_weights(tx, 0.5, 0.2, LAM)
    w_rx = beam_weights(rx, 0.4, 0.1, LAM)
    real = carrier_channel_matrices(p, tx, rx, F_C, 4, 120e3, f_d_max=30e3,
                                    v=2, tx_weights=w_tx, rx_weights=w_rx)
    for i in range(4):
        for j in range(4):
            bilinear = np.vdot(w_rx.column(), real.h[i, j] @ w_tx.column())
            assert real.h_eff[i, j] == pytest.approx(bilinear, rel=1e-10,
                                                     abs=1e-10)


def test_realization_dump_round_trip(tmp_path):
    tx, rx = geoms(2)
    p = sample_cluster_paths(1, 1, np.random.default_rng(18))
    real = carrier_channel_matrices(p, tx, rx, F_C, 2, 120e3, f_d_max=1e4)
    path = str(tmp_path / "real.bin")
    dump_realization(path, real)
    back = load_realization_matrices(path)
    assert back.shape == real.h.shape
    np.testing.assert_allclose(back, real.h.astype(np.complex64), rtol=1e-6)
