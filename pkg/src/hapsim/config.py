"""Scenario configuration: Table-I defaults, JSON round-trip, validation.

Config files speak degrees and human units; everything internal is radians
and SI. Conversion happens only at this boundary.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field, asdict

from .mobility import MobilityParams


class ConfigError(ValueError):
    """Validation failure; .problems lists 'field.path: message' strings."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.problems))


@dataclass
class ScenarioConfig:
    """Full experiment scenario; defaults mirror the Table-I operating point."""

    altitude_1_m: float = 20_000.0
    altitude_2_m: float = 20_000.0
    max_d3d_m: float = 500.0
    initial_separation_m: float = 300.0
    f_c_hz: float = 60e9
    n_c: int = 4
    n_taps: int = 4
    n_elements_total: int = 16          # per side; near-square factorization
    tx_n_x: int | None = None           # explicit per-axis override
    tx_n_y: int | None = None
    rx_n_x: int | None = None
    rx_n_y: int | None = None
    focus_theta_deg: float = 60.0
    focus_phi_deg: float = 30.0
    delta_f_hz: float = 120e3           # subcarrier spacing (knob: f_dmax / delta_f)
    doppler_scale: float = 1.0          # mobile-preset Doppler exaggeration
    noise_energy: float = 1.0
    energy_per_carrier: float = 1.0
    grid_snr_db: float = 10.0           # transmit SNR of the angle-grid experiments
    nakagami_m: float = 3.0
    pdf_spread: float = 1.0
    ici_energy_fraction: float = 1.0    # per-interferer leakage energy / kappa
    pdf_db_range: list[float] = field(default_factory=lambda: [-30.0, 30.0])
    pdf_deviations_deg: list[list[float]] = field(
        default_factory=lambda: [[0.0, 1.0], [1.0, 1.0], [1.5, 1.5]])
    snr_sweep_db: list[float] = field(
        default_factory=lambda: [-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0])
    sweep_deviations_deg: list[float] = field(
        default_factory=lambda: [0.0, 2.0, 5.0])
    sweep_n_elements: list[int] = field(default_factory=lambda: [16, 32, 64])
    grid_resolution_deg: float = 0.25
    mobility_1: MobilityParams = field(default_factory=lambda: MobilityParams(
        alpha_v=0.5919, alpha_da=0.5919, alpha_de=0.5919,
        mu_v=100.0, rotation_rate=0.03))
    mobility_2: MobilityParams = field(default_factory=lambda: MobilityParams(
        alpha_v=0.3718, alpha_da=0.3718, alpha_de=0.3718,
        mu_v=100.0, rotation_rate=0.03))
    trials: int = 1000
    pdf_trials: int = 10_000
    seed: int = 2024
    duration_s: float = 100.0
    dt_s: float = 1.0

    def validate(self) -> None:
        """Raise ConfigError listing every violated field by path."""
        problems: list[str] = []

        def positive(path, value, strict=True):
            if (value <= 0) if strict else (value < 0):
                op = ">" if strict else ">="
                problems.append(f"{path}: must be {op} 0, got {value}")

        positive("altitude_1_m", self.altitude_1_m, strict=False)
        positive("altitude_2_m", self.altitude_2_m, strict=False)
        positive("max_d3d_m", self.max_d3d_m)
        positive("f_c_hz", self.f_c_hz)
        positive("delta_f_hz", self.delta_f_hz)
        positive("noise_energy", self.noise_energy)
        positive("energy_per_carrier", self.energy_per_carrier, strict=False)
        positive("nakagami_m", self.nakagami_m)
        positive("trials", self.trials)
        positive("pdf_trials", self.pdf_trials)
        positive("dt_s", self.dt_s)
        if self.duration_s < self.dt_s:
            problems.append(f"duration_s: must be >= dt_s, got {self.duration_s}")
        if self.n_c < 1:
            problems.append(f"n_c: must be >= 1, got {self.n_c}")
        if self.n_taps < 1:
            problems.append(f"n_taps: must be >= 1, got {self.n_taps}")
        if self.n_elements_total < 1:
            problems.append(f"n_elements_total: must be >= 1, "
                            f"got {self.n_elements_total}")
        if self.initial_separation_m > self.max_d3d_m:
            problems.append("initial_separation_m: exceeds max_d3d_m")
        for name in ("focus_theta_deg", "focus_phi_deg"):
            v = getattr(self, name)
            if not -180.0 <= v <= 180.0:
                problems.append(f"{name}: must be within [-180, 180], got {v}")
        if not 0 < self.grid_resolution_deg <= 5.0:
            problems.append(f"grid_resolution_deg: must be in (0, 5], "
                            f"got {self.grid_resolution_deg}")
        if self.ici_energy_fraction < 0:
            problems.append(f"ici_energy_fraction: must be >= 0, "
                            f"got {self.ici_energy_fraction}")
        if len(self.pdf_db_range) != 2 or self.pdf_db_range[0] >= self.pdf_db_range[1]:
            problems.append(f"pdf_db_range: need [lo, hi] with lo < hi, "
                            f"got {self.pdf_db_range}")
        for idx, pair in enumerate(self.pdf_deviations_deg):
            if len(pair) != 2:
                problems.append(f"pdf_deviations_deg[{idx}]: need [theta, phi]")
            elif pair[1] == 0.0:
                problems.append(f"pdf_deviations_deg[{idx}]: phi deviation of 0 "
                                "collapses the distribution")
        for hap, params in (("mobility_1", self.mobility_1),
                            ("mobility_2", self.mobility_2)):
            try:
                params.validate()
            except ValueError as exc:
                problems.append(f"{hap}.{exc}")
        if problems:
            raise ConfigError(problems)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError([f"{k}: unknown field" for k in unknown])
        kwargs = dict(data)
        for key in ("mobility_1", "mobility_2"):
            if key in kwargs and isinstance(kwargs[key], dict):
                kwargs[key] = MobilityParams(**kwargs[key])
        return cls(**kwargs)

    @classmethod
    def from_json_file(cls, path: str) -> "ScenarioConfig":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]

    def axes(self, side: str) -> tuple[int, int]:
        """(n_x, n_y) for 'tx' or 'rx': explicit override or near-square split."""
        nx = getattr(self, f"{side}_n_x")
        ny = getattr(self, f"{side}_n_y")
        if nx is not None and ny is not None:
            return nx, ny
        n = self.n_elements_total
        n_x = int(n ** 0.5)
        while n % n_x:
            n_x -= 1
        return max(n_x, n // n_x), min(n_x, n // n_x)


DEFAULT_CONFIG = ScenarioConfig()
