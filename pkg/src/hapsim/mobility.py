"""Gauss-Markov mobility with superimposed random-walk rotations.

Speed and the two direction angles of each platform evolve as independent
first-order autoregressive (Gauss-Markov) processes; sudden maneuvers are
modeled by Poisson-timed rotations that redraw both direction angles
uniformly on [-pi, pi]. Positions are integrated with the standard
spherical-direction kinematic model (ENU frame, z = altitude).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np


def wrap_angle(a):
    """Wrap angle(s) to [-pi, pi]; values already in range pass unchanged."""
    a = np.asarray(a)
    wrapped = np.mod(a + np.pi, 2.0 * np.pi) - np.pi
    return np.where(np.abs(a) <= np.pi, a, wrapped)


@dataclass
class MobilityParams:
    """Tuning of the three Gauss-Markov processes of one platform.

    alpha_* in [0, 1] sets memory (1 = frozen, 0 = memoryless); mu_* are the
    asymptotic means; noise_std scales the unit-variance Gaussian drivers;
    rotation_rate is the expected number of sudden rotations per second.
    """

    alpha_v: float = 0.5919
    alpha_da: float = 0.5919
    alpha_de: float = 0.5919
    mu_v: float = 100.0
    mu_da: float = 0.0
    mu_de: float = 0.0
    noise_std: float = 1.0
    rotation_rate: float = 0.0

    def validate(self) -> None:
        for name in ("alpha_v", "alpha_da", "alpha_de"):
            a = getattr(self, name)
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {a}")
        if self.mu_v < 0.0:
            raise ValueError(f"mu_v must be >= 0, got {self.mu_v}")
        if self.rotation_rate < 0.0:
            raise ValueError(f"rotation_rate must be >= 0, got {self.rotation_rate}")


@dataclass
class HapState:
    """Kinematic state of one platform at one time instant."""

    t: float
    position: np.ndarray  # ENU [x, y, z] in m, z = altitude
    velocity: float       # speed scalar, m/s
    dir_az: float         # rad, in [-pi, pi]
    dir_el: float         # rad, in [-pi, pi]

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        if self.position.shape != (3,):
            raise ValueError("position must be a 3-vector")


@dataclass
class Trajectory:
    """Uniformly sampled sequence of states (dt apart, strictly increasing t)."""

    states: list[HapState]
    dt: float

    def __len__(self) -> int:
        return len(self.states)

    def speeds(self) -> np.ndarray:
        return np.array([s.velocity for s in self.states])

    def dir_az(self) -> np.ndarray:
        return np.array([s.dir_az for s in self.states])

    def dir_el(self) -> np.ndarray:
        return np.array([s.dir_el for s in self.states])

    def positions(self) -> np.ndarray:
        return np.stack([s.position for s in self.states])

    def times(self) -> np.ndarray:
        return np.array([s.t for s in self.states])

    def to_csv_rows(self):
        """Rows for the documented trace schema.

        Columns: t,x_m,y_m,z_m,speed_mps,dir_az_rad,dir_el_rad
        """
        for s in self.states:
            yield (s.t, s.position[0], s.position[1], s.position[2],
                   s.velocity, s.dir_az, s.dir_el)

    def to_csv(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(TRACE_COLUMNS) + "\n")
            for row in self.to_csv_rows():
                fh.write(",".join(format(v, ".12g") for v in row) + "\n")


TRACE_COLUMNS = ("t", "x_m", "y_m", "z_m", "speed_mps", "dir_az_rad", "dir_el_rad")


def _ar1_step(prev: float, alpha: float, mu: float, noise: float) -> float:
    return alpha * prev + (1.0 - alpha) * mu + math.sqrt(1.0 - alpha * alpha) * noise


def step_gauss_markov(state: HapState, params: MobilityParams,
                      noise: Sequence[float]) -> HapState:
    """One Gauss-Markov update of (speed, dir_az, dir_el).

    ``noise`` holds the three standard-normal drivers (speed, azimuth,
    elevation), scaled internally by params.noise_std. Speed is floored at 0
    and angles are wrapped to [-pi, pi]; position and time are untouched
    (see integrate_position / generate_trajectory).
    """
    params.validate()
    nx, ny, nz = (params.noise_std * float(n) for n in noise)
    v = max(0.0, _ar1_step(state.velocity, params.alpha_v, params.mu_v, nx))
    da = float(wrap_angle(_ar1_step(state.dir_az, params.alpha_da, params.mu_da, ny)))
    de = float(wrap_angle(_ar1_step(state.dir_el, params.alpha_de, params.mu_de, nz)))
    return replace(state, velocity=v, dir_az=da, dir_el=de)


def closed_form_state(initial: HapState, params: MobilityParams, i: int,
                      noise_history: np.ndarray) -> tuple[float, float, float]:
    """Closed form of the i-fold Gauss-Markov recursion on a shared noise stream.

    x(t_i) = a^i x(t_0) + (1 - a^i) mu + sqrt(1 - a^2) * sum_j a^{i-j-1} n_j.

    noise_history has shape (i, 3) with the same (speed, az, el) driver
    ordering as step_gauss_markov. Matches the stepped recursion exactly as
    long as the stepped trace never hits the velocity floor or the angle
    branch cut (the regime of all figure-facing configurations); output
    angles are wrapped once at the end.
    """
    params.validate()
    noise_history = np.asarray(noise_history, dtype=float)
    if noise_history.shape != (i, 3):
        raise ValueError(
            f"noise_history must have shape ({i}, 3), got {noise_history.shape}")

    def closed(x0: float, alpha: float, mu: float, draws: np.ndarray) -> float:
        if i == 0:
            return x0
        powers = alpha ** np.arange(i - 1, -1, -1)  # a^{i-j-1}, j = 0..i-1
        acc = math.sqrt(1.0 - alpha * alpha) * float(powers @ draws)
        return alpha ** i * x0 + (1.0 - alpha ** i) * mu + acc

    scaled = params.noise_std * noise_history
    v = closed(initial.velocity, params.alpha_v, params.mu_v, scaled[:, 0])
    da = closed(initial.dir_az, params.alpha_da, params.mu_da, scaled[:, 1])
    de = closed(initial.dir_el, params.alpha_de, params.mu_de, scaled[:, 2])
    return v, float(wrap_angle(da)), float(wrap_angle(de))


def apply_random_rotation(state: HapState, rng: np.random.Generator) -> HapState:
    """Redraw both direction angles uniformly on [-pi, pi]; speed unchanged."""
    da, de = rng.uniform(-np.pi, np.pi, size=2)
    return replace(state, dir_az=float(da), dir_el=float(de))


def integrate_position(state: HapState, dt: float) -> np.ndarray:
    """p' = p + v*dt*(cosE cosA, cosE sinA, sinE) using the state's own vectors."""
    if dt <= 0.0:
        raise ValueError(f"dt must be > 0, got {dt}")
    ca, sa = math.cos(state.dir_az), math.sin(state.dir_az)
    ce, se = math.cos(state.dir_el), math.sin(state.dir_el)
    step = state.velocity * dt * np.array([ce * ca, ce * sa, se])
    return state.position + step


def generate_trajectory(initial: HapState, params: MobilityParams,
                        duration: float, dt: float,
                        seed) -> Trajectory:
    """Simulate ``duration`` seconds at step ``dt``; deterministic per seed.

    Rotation instants are a Poisson process with params.rotation_rate; a step
    whose interval contains at least one arrival gets its directions redrawn
    after the Gauss-Markov update. ``seed`` may be an int or a Generator.
    """
    params.validate()
    if not duration >= dt > 0.0:
        raise ValueError(f"need duration >= dt > 0, got duration={duration}, dt={dt}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    n_steps = int(round(duration / dt))
    rotation_times = _poisson_arrivals(params.rotation_rate, duration, rng)

    states = [initial]
    state = initial
    k = 0  # next un-consumed rotation arrival
    for step_idx in range(1, n_steps + 1):
        t = initial.t + step_idx * dt
        # update-then-move: draw the step's vectors first, then cover dt
        # with them (the stepped state still carries the previous position)
        state = step_gauss_markov(state, params, rng.standard_normal(3))
        while k < len(rotation_times) and rotation_times[k] <= step_idx * dt:
            state = apply_random_rotation(state, rng)
            k += 1
        state = replace(state, t=t, position=integrate_position(state, dt))
        states.append(state)
    return Trajectory(states=states, dt=dt)


def _poisson_arrivals(rate: float, duration: float,
                      rng: np.random.Generator) -> np.ndarray:
    if rate <= 0.0:
        return np.empty(0)
    arrivals = []
    t = rng.exponential(1.0 / rate)
    while t < duration:
        arrivals.append(t)
        t += rng.exponential(1.0 / rate)
    return np.asarray(arrivals)
