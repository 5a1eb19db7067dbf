"""Seeded Monte-Carlo experiment runner: one figure, one CSV.

Each experiment wires mobility -> kinematics -> arrays -> channel -> link
-> stats into a deterministic data file. Per-trial random streams derive
from numpy SeedSequence spawning, so reruns with the same config hash are
byte-identical and trial batches can be distributed across workers without
changing the merged result.
"""

from __future__ import annotations

import os
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import SPEED_OF_LIGHT as C
from . import arrays, kinematics, stats
from .channel import carrier_channel_matrices, sample_cluster_paths
from .config import ScenarioConfig
from .mobility import HapState, Trajectory, generate_trajectory, \
    integrate_position, step_gauss_markov, TRACE_COLUMNS

EXPERIMENTS = ("mobility_trace", "beam_gain_grid", "sinr_sweep",
               "capacity_sweep", "doppler_shift_grid", "pdf_curves")


@dataclass
class ExperimentResult:
    """Tabular result of one experiment plus its reproducibility metadata."""

    experiment: str
    columns: tuple[str, ...]
    rows: list[tuple]
    metadata: dict

    def write_csv(self, path: str) -> None:
        """Atomic write (temp + rename): interrupted runs leave no partial file."""
        tmp = f"{path}.tmp.{os.getpid()}"
        with open(tmp, "w") as fh:
            fh.write(",".join(self.columns) + "\n")
            for row in self.rows:
                fh.write(",".join(_format_cell(v) for v in row) + "\n")
        os.replace(tmp, path)

    def write_metadata(self, path: str) -> None:
        import json
        tmp = f"{path}.tmp.{os.getpid()}"
        with open(tmp, "w") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)


def _format_cell(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, float):
        return format(v, ".12g")
    return str(v)


def worker_count() -> int:
    """Worker cap from HAPSIM_THREADS (default: cpu count)."""
    env = os.environ.get("HAPSIM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """Order-preserving map over a bounded thread pool."""
    workers = min(worker_count(), max(1, len(items)))
    if workers == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _git_describe() -> str:
    try:
        out = subprocess.run(["git", "describe", "--always", "--dirty"],
                             capture_output=True, text=True, timeout=5,
                             cwd=os.path.dirname(__file__))
        if out.returncode == 0:
            return out.stdout.strip()
    except OSError:
        pass
    return "unknown"


def _base_metadata(config: ScenarioConfig, experiment: str) -> dict:
    return {
        "experiment": experiment,
        "config_hash": config.config_hash(),
        "seed": config.seed,
        "trials": config.trials,
        "git_describe": _git_describe(),
    }


def _geometry(config: ScenarioConfig, side: str,
              n_total: int | None = None) -> arrays.ArrayGeometry:
    if n_total is not None:
        return arrays.ArrayGeometry.from_total(n_total, config.f_c_hz)
    n_x, n_y = config.axes(side)
    return arrays.ArrayGeometry.half_wavelength(n_x, n_y, config.f_c_hz)


def _focus_rad(config: ScenarioConfig) -> tuple[float, float]:
    return np.deg2rad(config.focus_theta_deg), np.deg2rad(config.focus_phi_deg)


# ---------------------------------------------------------------------------
# Mobility experiments
# ---------------------------------------------------------------------------

def generate_hap_pair(config: ScenarioConfig,
                      rng: np.random.Generator) -> tuple[Trajectory, Trajectory]:
    """Joint trajectories with the 3D-separation bound enforced on HAP-2.

    HAP-2 starts initial_separation_m to the side of HAP-1; whenever a step
    would push the slant distance beyond max_d3d_m, its Gauss-Markov noise
    is re-drawn (excursion rejection).
    """
    h1 = HapState(t=0.0, position=np.array([0.0, 0.0, config.altitude_1_m]),
                  velocity=config.mobility_1.mu_v, dir_az=0.0, dir_el=0.0)
    h2 = HapState(t=0.0,
                  position=np.array([0.0, config.initial_separation_m,
                                     config.altitude_2_m]),
                  velocity=config.mobility_2.mu_v, dir_az=0.0, dir_el=0.0)
    n_steps = int(round(config.duration_s / config.dt_s))
    states1, states2 = [h1], [h2]
    s1, s2 = h1, h2

    def advance(state, params):
        nxt = step_gauss_markov(state, params, rng.standard_normal(3))
        return replace(nxt, t=state.t + config.dt_s,
                       position=integrate_position(nxt, config.dt_s))

    for i in range(1, n_steps + 1):
        for joint_attempt in range(200):
            c1 = advance(s1, config.mobility_1)
            ok = False
            for attempt in range(200):
                c2 = advance(s2, config.mobility_2)
                if kinematics.link_geometry(
                        c1.position, c2.position).d3d <= config.max_d3d_m:
                    ok = True
                    break
            if ok:
                s1, s2 = c1, c2
                break
        else:
            raise RuntimeError(f"could not keep the platforms within "
                               f"{config.max_d3d_m} m at step {i}")
        states1.append(s1)
        states2.append(s2)
    return (Trajectory(states=states1, dt=config.dt_s),
            Trajectory(states=states2, dt=config.dt_s))


def _mobility_trace(config: ScenarioConfig) -> ExperimentResult:
    rng = np.random.default_rng(config.seed)
    tr1 = generate_trajectory(
        HapState(t=0.0, position=np.array([0.0, 0.0, config.altitude_1_m]),
                 velocity=config.mobility_1.mu_v, dir_az=0.0, dir_el=0.0),
        config.mobility_1, config.duration_s, config.dt_s, rng)
    tr2 = generate_trajectory(
        HapState(t=0.0, position=np.array([0.0, config.initial_separation_m,
                                           config.altitude_2_m]),
                 velocity=config.mobility_2.mu_v, dir_az=0.0, dir_el=0.0),
        config.mobility_2, config.duration_s, config.dt_s, rng)
    rows = []
    for hap, tr in ((1, tr1), (2, tr2)):
        for row in tr.to_csv_rows():
            rows.append((hap,) + row)
    return ExperimentResult(
        experiment="mobility_trace",
        columns=("hap",) + TRACE_COLUMNS,
        rows=rows,
        metadata=_base_metadata(config, "mobility_trace"))


# ---------------------------------------------------------------------------
# Beam gain grid
# ---------------------------------------------------------------------------

def _gain_grid(config: ScenarioConfig, f_d: float) -> tuple[np.ndarray, ...]:
    step = config.grid_resolution_deg
    theta = np.arange(0.0, 90.0 + step / 2, step)
    phi = np.arange(0.0, 90.0 + step / 2, step)
    geom = _geometry(config, "rx")
    tf, pf = _focus_rad(config)
    w = arrays.beam_weights(geom, tf, pf, C / config.f_c_hz)
    T, P = np.meshgrid(np.deg2rad(theta), np.deg2rad(phi), indexing="ij")
    g = np.abs(arrays.beam_gain_closed(w, geom, T, P, config.f_c_hz, f_d))
    return theta, phi, g


def _beam_gain_grid(config: ScenarioConfig, f_d: float = 0.0) -> ExperimentResult:
    theta, phi, g = _gain_grid(config, f_d)
    rows = [(theta[i], phi[j], g[i, j])
            for i in range(len(theta)) for j in range(len(phi))]
    meta = _base_metadata(config, "beam_gain_grid")
    meta["doppler_hz"] = f_d
    return ExperimentResult("beam_gain_grid",
                            ("theta_deg", "phi_deg", "gain_abs"), rows, meta)


# ---------------------------------------------------------------------------
# SINR / capacity sweeps (stationary, Figs. 6-7 layout)
# ---------------------------------------------------------------------------

def _effective_powers(config: ScenarioConfig, n_total: int, arrival_dev_deg: float,
                      n_trials: int, seed_key: int, f_d_squint: float = 0.0,
                      f_d_rotation: float = 0.0) -> np.ndarray:
    """|s(p, q)|^2 per trial for a single dominant path at a fixed arrival.

    The departure is beam-matched; the arrival is the focus direction
    shifted by arrival_dev_deg in both angles. Fading re-draws per trial
    come from a stream keyed only by (seed, trial index), so curves that
    differ in geometry or deviation share fading draws (common random
    numbers). Returns shape (n_trials, n_c, n_c).
    """
    tx = _geometry(config, "tx", n_total)
    rx = _geometry(config, "rx", n_total)
    tf, pf = _focus_rad(config)
    lam = C / config.f_c_hz
    w_tx = arrays.beam_weights(tx, tf, pf, lam)
    w_rx = arrays.beam_weights(rx, tf, pf, lam)
    dev = np.deg2rad(arrival_dev_deg)
    pins = {
        "theta_tx": (tf, tf), "phi_tx": (pf, pf),
        "theta_rx": (tf + dev, tf + dev), "phi_rx": (pf + dev, pf + dev),
        "theta_rd": (0.5, 0.5), "phi_rd": (0.2, 0.2),
    }
    streams = np.random.SeedSequence(entropy=(config.seed, seed_key)).spawn(n_trials)

    def one_trial(ss) -> np.ndarray:
        rng = np.random.default_rng(ss)
        paths = sample_cluster_paths(1, 1, rng, pins)
        real = carrier_channel_matrices(
            paths, tx, rx, config.f_c_hz, config.n_c, config.delta_f_hz,
            f_d_max=f_d_rotation, v=config.n_taps,
            tx_weights=w_tx, rx_weights=w_rx, effective_only=True,
            rx_freq_offset=f_d_squint)
        return np.abs(real.h_eff) ** 2

    return np.stack(parallel_map(one_trial, streams))


def _sweep_metrics(config: ScenarioConfig) -> list[tuple]:
    """(n_total, deviation_deg, snr_db, mean_sinr_linear, mean_capacity) rows."""
    rows = []
    snr_lin = 10.0 ** (np.asarray(config.snr_sweep_db) / 10.0)
    for n_total in config.sweep_n_elements:
        for dev in config.sweep_deviations_deg:
            powers = _effective_powers(config, n_total, dev, config.trials,
                                       seed_key=0)
            sig = np.einsum("tpp->tp", powers)                   # [trial, p]
            ici = powers.sum(axis=2) - sig
            for snr_db, e in zip(config.snr_sweep_db, snr_lin):
                gamma = e * sig / (e * ici + 1.0)                # noise = 1
                mean_sinr = float(gamma.mean())
                mean_cap = float(np.log2(1.0 + gamma).sum(axis=1).mean())
                rows.append((n_total, dev, snr_db, mean_sinr, mean_cap))
    return rows


def _sinr_sweep(config: ScenarioConfig) -> ExperimentResult:
    rows = [(n, d, s, 10.0 * np.log10(g))
            for n, d, s, g, _ in _sweep_metrics(config)]
    return ExperimentResult(
        "sinr_sweep", ("n_total", "deviation_deg", "snr_db", "sinr_db"),
        rows, _base_metadata(config, "sinr_sweep"))


def _capacity_sweep(config: ScenarioConfig) -> ExperimentResult:
    rows = [(n, d, s, c) for n, d, s, _, c in _sweep_metrics(config)]
    return ExperimentResult(
        "capacity_sweep",
        ("n_total", "deviation_deg", "snr_db", "capacity_bps_hz"),
        rows, _base_metadata(config, "capacity_sweep"))


# ---------------------------------------------------------------------------
# Mobile (Doppler) experiments, Figs. 8-9 layout
# ---------------------------------------------------------------------------

MOBILE_PRESET_DOPPLER_SCALE = 1.6e5


@dataclass
class MobilePreset:
    """Named moving-platform configuration for the Doppler experiments.

    doppler_hz is the physical LoS Doppler of the preset states;
    effective_doppler_hz = doppler_scale * doppler_hz is what shifts the
    angular response (the angular displacement of a physical mmWave Doppler
    is micro-degrees, far below any plotting grid, so the preset exposes
    the exaggeration explicitly). The time-selective ICI rotation keeps the
    physical value.
    """

    state_1: HapState
    state_2: HapState
    phases: kinematics.PhaseAngles
    doppler_hz: float
    doppler_scale: float

    @property
    def effective_doppler_hz(self) -> float:
        return self.doppler_hz * self.doppler_scale


def mobile_preset(config: ScenarioConfig) -> MobilePreset:
    """Two platforms closing head-on at mu_v with LoS phase angles."""
    s1 = HapState(t=0.0, position=np.array([0.0, 0.0, config.altitude_1_m]),
                  velocity=config.mobility_1.mu_v, dir_az=0.0, dir_el=0.0)
    s2 = HapState(t=0.0,
                  position=np.array([config.initial_separation_m, 0.0,
                                     config.altitude_2_m]),
                  velocity=config.mobility_2.mu_v, dir_az=np.pi, dir_el=0.0)
    geom = kinematics.link_geometry(s1.position, s2.position)
    phases = kinematics.los_phase_approximation(geom)
    f_d = kinematics.doppler_frequency(s1, s2, phases, C / config.f_c_hz)
    scale = config.doppler_scale if config.doppler_scale != 1.0 \
        else MOBILE_PRESET_DOPPLER_SCALE
    return MobilePreset(state_1=s1, state_2=s2, phases=phases,
                        doppler_hz=f_d, doppler_scale=scale)


def dense_gain_peak(config: ScenarioConfig, f_d: float,
                    resolution_deg: float = 0.05) -> tuple[float, float]:
    """Independent dense argmax search of |g_closed| under Doppler f_d."""
    geom = _geometry(config, "rx")
    tf, pf = _focus_rad(config)
    w = arrays.beam_weights(geom, tf, pf, C / config.f_c_hz)
    theta = np.arange(0.0, 90.0 + resolution_deg / 2, resolution_deg)
    phi = np.arange(0.0, 90.0 + resolution_deg / 2, resolution_deg)
    T, P = np.meshgrid(np.deg2rad(theta), np.deg2rad(phi), indexing="ij")
    g = np.abs(arrays.beam_gain_closed(w, geom, T, P, config.f_c_hz, f_d))
    i, j = np.unravel_index(int(np.argmax(g)), g.shape)
    return float(theta[i]), float(phi[j])


def _doppler_grid_metrics(config: ScenarioConfig) -> tuple:
    """Mean SINR / capacity over fading on the arrival-angle grid."""
    preset = mobile_preset(config)
    f_d_eff = preset.effective_doppler_hz
    rx = _geometry(config, "rx")
    tx = _geometry(config, "tx")
    tf, pf = _focus_rad(config)
    lam = C / config.f_c_hz
    w_rx = arrays.beam_weights(rx, tf, pf, lam)

    step = config.grid_resolution_deg
    theta = np.arange(30.0, 80.0 + step / 2, step)
    phi = np.arange(5.0, 50.0 + step / 2, step)
    T, P = np.meshgrid(np.deg2rad(theta), np.deg2rad(phi), indexing="ij")

    # Single-dominant-path factorization: the arrival angle enters only
    # through the Rx array response, s(p, q) = coupling(p, q) *
    # G_rx(theta, phi; f_q + f_d_eff). The coupling (Tx gain, tap phase,
    # intra-symbol Doppler mixing) comes from the carrier machinery probed
    # with a one-element receiver, whose own Rx response is identically 1.
    pins = {"theta_tx": (tf, tf), "phi_tx": (pf, pf),
            "theta_rx": (tf, tf), "phi_rx": (pf, pf),
            "theta_rd": (0.5, 0.5), "phi_rd": (0.2, 0.2)}
    probe_rng = np.random.default_rng(np.random.SeedSequence((config.seed, 101)))
    probe = sample_cluster_paths(1, 1, probe_rng, pins)
    probe.gains[0, 0] = 1.0  # unit probe gain; fading enters per trial below
    rx_probe = arrays.ArrayGeometry(1, 1, rx.d_x, rx.d_y)
    w_probe = arrays.beam_weights(rx_probe, tf, pf, lam)
    w_tx = arrays.beam_weights(tx, tf, pf, lam)
    real = carrier_channel_matrices(
        probe, tx, rx_probe, config.f_c_hz, config.n_c, config.delta_f_hz,
        f_d_max=preset.doppler_hz, v=config.n_taps,
        tx_weights=w_tx, rx_weights=w_probe, effective_only=True,
        rx_freq_offset=f_d_eff)
    coupling = real.h_eff * rx.n_total  # restore the full-aperture scale factor

    grid_gain = np.stack([
        arrays.beam_gain_closed(w_rx, rx, T, P, config.f_c_hz,
                                fq - config.f_c_hz + f_d_eff)
        for fq in real.carrier_freqs])                  # [q, theta, phi]
    power = np.abs(coupling[:, :, np.newaxis, np.newaxis]
                   * grid_gain[np.newaxis]) ** 2        # [p, q, theta, phi]
    sig = np.einsum("ppij->pij", power)
    ici = power.sum(axis=1) - sig

    rng = np.random.default_rng(np.random.SeedSequence((config.seed, 102)))
    n_fade = min(config.trials, 64)
    zeta = rng.exponential(size=n_fade)                 # |CN(0,1)|^2 fading
    e = 10.0 ** (config.grid_snr_db / 10.0)
    mean_gamma = np.zeros(T.shape)
    cap_acc = np.zeros(T.shape + (n_fade,))
    for p in range(config.n_c):
        g_p = (e * sig[p][..., np.newaxis] * zeta
               / (e * ici[p][..., np.newaxis] * zeta + 1.0))
        mean_gamma += g_p.mean(axis=2)
        cap_acc += np.log2(1.0 + g_p)
    mean_gamma /= config.n_c
    mean_cap = cap_acc.mean(axis=2)
    return theta, phi, mean_gamma, mean_cap, preset


def _doppler_shift_grid(config: ScenarioConfig,
                        value: str = "sinr") -> ExperimentResult:
    theta, phi, mean_gamma, mean_cap, preset = _doppler_grid_metrics(config)
    rows = []
    for i, th in enumerate(theta):
        for j, ph in enumerate(phi):
            if value == "sinr":
                rows.append((th, ph, 10.0 * np.log10(mean_gamma[i, j])))
            else:
                rows.append((th, ph, mean_cap[i, j]))
    meta = _base_metadata(config, "doppler_shift_grid")
    meta["doppler_hz"] = preset.doppler_hz
    meta["effective_doppler_hz"] = preset.effective_doppler_hz
    i, j = np.unravel_index(int(np.argmax(mean_gamma)), mean_gamma.shape)
    meta["sinr_peak_theta_deg"] = float(theta[i])
    meta["sinr_peak_phi_deg"] = float(phi[j])
    col = "sinr_db" if value == "sinr" else "capacity_bps_hz"
    return ExperimentResult("doppler_shift_grid",
                            ("theta_deg", "phi_deg", col), rows, meta)


# ---------------------------------------------------------------------------
# PDF curves, Figs. 10-11 layout
# ---------------------------------------------------------------------------

def _pdf_params(config: ScenarioConfig, theta_dev_deg: float,
                phi_dev_deg: float) -> stats.PdfParams:
    n_x, n_y = config.axes("rx")
    a = stats.alignment_mass(n_x, np.deg2rad(theta_dev_deg),
                             np.deg2rad(phi_dev_deg), config.pdf_spread)
    return stats.PdfParams(m=config.nakagami_m, kappa=stats.kappa_const(n_x, n_y),
                           a_rx=a, a_tx=a, noise_scale=config.noise_energy,
                           ici_energy_fraction=config.ici_energy_fraction)


def _pdf_curves(config: ScenarioConfig, mobile: bool = False) -> ExperimentResult:
    extra_dev = (0.0, 0.0)
    meta = _base_metadata(config, "pdf_curves")
    if mobile:
        preset = mobile_preset(config)
        peak = dense_gain_peak(config, preset.effective_doppler_hz)
        extra_dev = (abs(peak[0] - config.focus_theta_deg),
                     abs(peak[1] - config.focus_phi_deg))
        meta["doppler_shift_deg"] = list(extra_dev)
        meta["effective_doppler_hz"] = preset.effective_doppler_hz
    rows = []
    sinr_db_grid = np.linspace(config.pdf_db_range[0], config.pdf_db_range[1], 241)
    gamma_lin = 10.0 ** (sinr_db_grid / 10.0)
    for theta_dev, phi_dev in config.pdf_deviations_deg:
        params = _pdf_params(config, theta_dev + extra_dev[0],
                             phi_dev + extra_dev[1])
        dens_lin = stats.sinr_pdf(gamma_lin, params, config.n_c)
        _, dens_db = stats.pdf_to_db_domain(gamma_lin, dens_lin)
        for x, d in zip(sinr_db_grid, dens_db):
            rows.append((theta_dev, phi_dev, x, d))
    return ExperimentResult(
        "pdf_curves", ("theta_dev_deg", "phi_dev_deg", "sinr_db", "density"),
        rows, meta)


# ---------------------------------------------------------------------------
# Entry points
# ---------------------------------------------------------------------------

def run_experiment(config: ScenarioConfig, experiment: str,
                   **kwargs) -> ExperimentResult:
    """Run one named experiment; deterministic for a given config hash."""
    config.validate()
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}; "
                         f"choose one of {', '.join(EXPERIMENTS)}")
    t0 = time.perf_counter()
    runner = {
        "mobility_trace": _mobility_trace,
        "beam_gain_grid": _beam_gain_grid,
        "sinr_sweep": _sinr_sweep,
        "capacity_sweep": _capacity_sweep,
        "doppler_shift_grid": _doppler_shift_grid,
        "pdf_curves": _pdf_curves,
    }[experiment]
    result = runner(config, **kwargs)
    result.metadata["wall_time_s"] = round(time.perf_counter() - t0, 3)
    return result


def sweep(config: ScenarioConfig, parameter_path: str, values,
          experiment: str = "sinr_sweep") -> list[ExperimentResult]:
    """One experiment per value of a dotted config path.

    Each value gets a seed offset derived from the value itself (not its
    list position), so permuting the value list permutes the results.
    """
    import zlib
    results = []
    for value in values:
        modified = _set_path(config, parameter_path, value)
        offset = zlib.crc32(repr(value).encode()) % 65536
        modified = replace(modified, seed=config.seed + offset)
        results.append(run_experiment(modified, experiment))
    return results


def _set_path(config: ScenarioConfig, path: str, value) -> ScenarioConfig:
    parts = path.split(".")
    obj = config
    chain = [obj]
    for part in parts[:-1]:
        if not hasattr(obj, part):
            raise ValueError(f"config has no field path {path!r}")
        obj = getattr(obj, part)
        chain.append(obj)
    leaf = parts[-1]
    if not hasattr(chain[-1], leaf):
        raise ValueError(f"config has no field path {path!r}")
    updated = replace(chain[-1], **{leaf: value})
    for part, owner in zip(reversed(parts[:-1]), reversed(chain[:-1])):
        updated = replace(owner, **{part: updated})
    return updated
