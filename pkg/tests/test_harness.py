"""Experiment runner tests: configs, determinism, sweeps, presets."""

import json
import os
from dataclasses import replace

import numpy as np
import pytest

from hapsim.config import ConfigError, ScenarioConfig
from hapsim.harness import (EXPERIMENTS, dense_gain_peak, generate_hap_pair,
                            mobile_preset, run_experiment, sweep)
from hapsim.kinematics import link_geometry


def fast_config(**kw):
    base = dict(trials=40, pdf_trials=200, duration_s=30.0,
                grid_resolution_deg=1.0, snr_sweep_db=[0.0, 10.0],
                sweep_n_elements=[16], sweep_deviations_deg=[0.0, 2.0])
    base.update(kw)
    return ScenarioConfig(**base)


# --- config ---------------------------------------------------------------------

def test_default_config_is_valid():
    ScenarioConfig().validate()


def test_config_json_round_trip(tmp_path):
    cfg = fast_config(seed=77)
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    back = ScenarioConfig.from_json_file(str(path))
    assert back == cfg
    assert back.config_hash() == cfg.config_hash()


def test_unknown_field_rejected_with_path():
    with pytest.raises(ConfigError, match="bogus_field"):
        ScenarioConfig.from_dict({"bogus_field": 1})


def test_validation_lists_field_paths():
    cfg = replace(ScenarioConfig(), n_c=0, focus_theta_deg=500.0)
    with pytest.raises(ConfigError) as err:
        cfg.validate()
    text = str(err.value)
    assert "n_c" in text and "focus_theta_deg" in text


def test_mobility_validation_propagates():
    cfg = ScenarioConfig()
    cfg.mobility_1 = replace(cfg.mobility_1, alpha_v=2.0)
    with pytest.raises(ConfigError, match="mobility_1"):
        cfg.validate()


def test_axes_override_and_near_square():
    cfg = ScenarioConfig(n_elements_total=32)
    assert cfg.axes("tx") == (8, 4)
    cfg = ScenarioConfig(tx_n_x=16, tx_n_y=1)
    assert cfg.axes("tx") == (16, 1)


# --- experiment plumbing ------------------------------------------------------------

def test_unknown_experiment_rejected():
    with pytest.raises(ValueError, match="unknown experiment"):
        run_experiment(ScenarioConfig(), "nonsense")


def test_result_csv_written_atomically(tmp_path):
    r = run_experiment(fast_config(), "mobility_trace")
    out = tmp_path / "trace.csv"
    r.write_csv(str(out))
    assert out.exists()
    leftovers = [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]
    assert not leftovers
    header = out.read_text().splitlines()[0]
    assert header == "hap,t,x_m,y_m,z_m,speed_mps,dir_az_rad,dir_el_rad"


def test_metadata_sidecar_fields(tmp_path):
    r = run_experiment(fast_config(), "beam_gain_grid")
    out = tmp_path / "grid.meta.json"
    r.write_metadata(str(out))
    meta = json.loads(out.read_text())
    for key in ("config_hash", "seed", "git_describe", "experiment",
                "wall_time_s"):
        assert key in meta


def test_reruns_byte_identical(tmp_path):
    cfg = fast_config(seed=123)
    for name in ("mobility_trace", "sinr_sweep", "pdf_curves"):
        a = run_experiment(cfg, name)
        b = run_experiment(cfg, name)
        pa, pb = tmp_path / "a.csv", tmp_path / "b.csv"
        a.write_csv(str(pa))
        b.write_csv(str(pb))
        assert pa.read_bytes() == pb.read_bytes(), name


# --- sweeps -----------------------------------------------------------------------

def test_sweep_one_result_per_value():
    cfg = fast_config()
    results = sweep(cfg, "n_elements_total", [16, 32, 64], "beam_gain_grid")
    assert len(results) == 3


def test_sweep_empty_values():
    assert sweep(fast_config(), "n_elements_total", [], "beam_gain_grid") == []


def test_sweep_permutation_permutes_results(tmp_path):
    cfg = fast_config()
    fwd = sweep(cfg, "grid_snr_db", [0.0, 10.0], "sinr_sweep")
    rev = sweep(cfg, "grid_snr_db", [10.0, 0.0], "sinr_sweep")
    assert fwd[0].rows == rev[1].rows
    assert fwd[1].rows == rev[0].rows


def test_sweep_unresolvable_path():
    with pytest.raises(ValueError, match="no field path"):
        sweep(fast_config(), "no.such.path", [1], "beam_gain_grid")


def test_sweep_nested_path():
    results = sweep(fast_config(), "mobility_1.mu_v", [90.0, 110.0],
                    "mobility_trace")
    speeds = [np.mean([row[5] for row in r.rows if row[0] == 1])
              for r in results]
    assert speeds[0] < speeds[1]


# --- experiment content ---------------------------------------------------------------

def test_beam_gain_grid_peak_at_focus():
    r = run_experiment(fast_config(grid_resolution_deg=0.25), "beam_gain_grid")
    best = max(r.rows, key=lambda row: row[2])
    assert (best[0], best[1]) == (60.0, 30.0)
    assert best[2] == pytest.approx(16.0, abs=1e-9)


def test_sinr_sweep_matched_dominates_deviated():
    r = run_experiment(fast_config(), "sinr_sweep")
    by_curve = {}
    for n, dev, snr, sinr in r.rows:
        by_curve.setdefault(dev, {})[snr] = sinr
    for snr in by_curve[0.0]:
        assert by_curve[0.0][snr] > by_curve[2.0][snr]


def test_capacity_sweep_columns_and_ordering():
    r = run_experiment(fast_config(), "capacity_sweep")
    assert r.columns == ("n_total", "deviation_deg", "snr_db",
                         "capacity_bps_hz")
    by_curve = {}
    for n, dev, snr, cap in r.rows:
        by_curve.setdefault(dev, {})[snr] = cap
    for snr in by_curve[0.0]:
        assert by_curve[0.0][snr] > by_curve[2.0][snr]


def test_doppler_grid_peak_matches_dense_gain_search():
    cfg = fast_config(grid_resolution_deg=0.5)
    r = run_experiment(cfg, "doppler_shift_grid")
    preset = mobile_preset(cfg)
    dense = dense_gain_peak(cfg, preset.effective_doppler_hz,
                            resolution_deg=0.1)
    assert abs(r.metadata["sinr_peak_theta_deg"] - dense[0]) <= 0.5
    assert abs(r.metadata["sinr_peak_phi_deg"] - dense[1]) <= 0.5
    # and it moved away from the focus
    shift = np.hypot(r.metadata["sinr_peak_theta_deg"] - 60.0,
                     r.metadata["sinr_peak_phi_deg"] - 30.0)
    assert shift > 0.5


def test_pdf_curves_rows_and_positive_densities():
    r = run_experiment(fast_config(), "pdf_curves")
    assert r.columns == ("theta_dev_deg", "phi_dev_deg", "sinr_db", "density")
    labels = {(row[0], row[1]) for row in r.rows}
    assert len(labels) == 3
    assert all(np.isfinite(row[3]) for row in r.rows)


def test_mobile_pdf_folds_doppler_displacement():
    cfg = fast_config()
    r = run_experiment(cfg, "pdf_curves", mobile=True)
    assert "doppler_shift_deg" in r.metadata
    assert r.metadata["doppler_shift_deg"][0] > 0.5


# --- preset and pair generation ----------------------------------------------------------

def test_mobile_preset_doppler_magnitudes():
    preset = mobile_preset(ScenarioConfig())
    lam = 299792458.0 / 60e9
    assert abs(preset.doppler_hz) <= 200.0 / lam * (1 + 1e-12)
    assert preset.effective_doppler_hz == pytest.approx(
        preset.doppler_hz * preset.doppler_scale)


def test_hap_pair_respects_separation_bound():
    cfg = fast_config(duration_s=60.0)
    tr1, tr2 = generate_hap_pair(cfg, np.random.default_rng(cfg.seed))
    assert len(tr1) == len(tr2) == 61
    for s1, s2 in zip(tr1.states, tr2.states):
        assert link_geometry(s1.position, s2.position).d3d <= cfg.max_d3d_m


def test_experiment_names_registry():
    assert set(EXPERIMENTS) == {"mobility_trace", "beam_gain_grid",
                                "sinr_sweep", "capacity_sweep",
                                "doppler_shift_grid", "pdf_curves"}
