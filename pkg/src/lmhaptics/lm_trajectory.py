"""Circular lateral-modulation trajectories, foci schedules and timing.

A stimulus is a circle of radius A traced in N discrete steps around a
centre, in the plane spanned by the orthonormal basis (r_a, r_b), with
optional per-sample offsets along r_c. Arc step width is 2*pi*A/N and
each sample dwells 1/(N*f_lm) seconds. Multi-foci stimuli drive several
trajectory indices at once, spaced by l = floor(d / step_width) samples.
Reflection off a display surface maps the trajectory to its mirror
image with a tilted in-plane basis.

Sample indices are 1-based everywhere visible (interfaces, files),
matching the stimulus formulation; storage is numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .array_model import TransducerArray
from .errors import ConfigError
from .focus_phase import COMPLEX, DriveFrame, drive_for_foci
from .geometry import as_vec3, is_unit, rotation_about_axis_deg

TWO_PI = 2.0 * math.pi

UPDATE_RATE_LIMIT_HZ = 1000.0  # device drive-frame update ceiling

MODE_SINGLE = "S"
MODE_MULTI = "M"

_XYZ = (np.array([1.0, 0, 0]), np.array([0, 1.0, 0]), np.array([0, 0, 1.0]))


def step_width(radius_mm: float, samples: int) -> float:
    """Arc length between consecutive focus samples, 2*pi*A/N."""
    if radius_mm <= 0:
        raise ConfigError("radius must be positive")
    if samples < 3:
        raise ConfigError("need at least 3 samples per cycle")
    return TWO_PI * radius_mm / samples


def samples_for_target_step(radius_mm: float, target_step_mm: float) -> int:
    """Smallest N >= 3 whose step width does not exceed the target."""
    if radius_mm <= 0 or target_step_mm <= 0:
        raise ConfigError("radius and target step must be positive")
    return max(3, math.ceil(TWO_PI * radius_mm / target_step_mm))


@dataclass(frozen=True)
class LmTiming:
    """Dwell time and drive update rate for one stimulus configuration."""

    dwell_s: float
    update_rate_hz: float
    exceeds_update_limit: bool
    update_limit_hz: float = UPDATE_RATE_LIMIT_HZ


def dwell_time(samples: int, lm_frequency_hz: float,
               update_limit_hz: float = UPDATE_RATE_LIMIT_HZ) -> LmTiming:
    """Per-sample dwell 1/(N*f_lm) plus the update rate N*f_lm.

    A rate above the device limit is flagged, not rejected, so research
    configurations stay expressible.
    """
    if samples <= 0 or lm_frequency_hz <= 0:
        raise ConfigError("samples and lm frequency must be positive")
    rate = samples * lm_frequency_hz
    return LmTiming(
        dwell_s=1.0 / rate,
        update_rate_hz=rate,
        exceeds_update_limit=rate > update_limit_hz,
        update_limit_hz=update_limit_hz,
    )


@dataclass(frozen=True)
class LmConfig:
    """Parameters of one circular LM stimulus.

    z_profile maps the 1-based sample index to an offset along r_c:
    None (flat), a length-N sequence, or a callable on index arrays.
    Multi-foci mode additionally needs foci_count and foci_spacing_mm.
    """

    center: np.ndarray
    radius_mm: float
    lm_frequency_hz: float
    samples: int
    basis: tuple[np.ndarray, np.ndarray, np.ndarray] = _XYZ
    z_profile: Sequence[float] | Callable | None = None
    mode: str = MODE_SINGLE
    foci_count: int = 1
    foci_spacing_mm: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "center", as_vec3(self.center))
        basis = tuple(as_vec3(v) for v in self.basis)
        object.__setattr__(self, "basis", basis)
        if self.radius_mm <= 0:
            raise ConfigError("radius must be positive")
        if self.samples < 3:
            raise ConfigError("need at least 3 samples per cycle")
        if self.lm_frequency_hz <= 0:
            raise ConfigError("lm frequency must be positive")
        if self.mode not in (MODE_SINGLE, MODE_MULTI):
            raise ConfigError("mode must be 'S' or 'M'")
        for v in basis:
            if not is_unit(v):
                raise ConfigError("basis vectors must be unit length")
        a, b, c = basis
        if max(abs(a @ b), abs(b @ c), abs(a @ c)) > 1e-9:
            raise ConfigError("basis vectors must be mutually orthogonal")
        if self.mode == MODE_MULTI:
            if self.foci_count < 1:
                raise ConfigError("foci_count must be >= 1")
            offset = foci_step_offset(self.radius_mm, self.samples, self.foci_spacing_mm)
            if self.foci_count * offset >= self.samples:
                raise ConfigError(
                    "foci do not fit on one cycle: "
                    f"foci_count * floor(d/d_step) = {self.foci_count * offset} >= N = {self.samples}"
                )
        if self.z_profile is not None and not callable(self.z_profile):
            z = np.asarray(self.z_profile, dtype=float)
            if z.shape != (self.samples,):
                raise ConfigError("z_profile must have one entry per sample")

    @property
    def step_width_mm(self) -> float:
        return step_width(self.radius_mm, self.samples)

    @property
    def timing(self) -> LmTiming:
        return dwell_time(self.samples, self.lm_frequency_hz)

    def z_offsets(self) -> np.ndarray:
        """Per-sample offsets along r_c for indices 1..N."""
        if self.z_profile is None:
            return np.zeros(self.samples)
        idx = np.arange(1, self.samples + 1)
        if callable(self.z_profile):
            return np.asarray(self.z_profile(idx), dtype=float)
        return np.asarray(self.z_profile, dtype=float)


@dataclass(frozen=True)
class Trajectory:
    """Time-ordered focus positions r_j (j = 1..N) with a common dwell."""

    positions: np.ndarray
    dwell_s: float

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        object.__setattr__(self, "positions", pos)
        pos.setflags(write=False)
        if self.dwell_s <= 0:
            raise ConfigError("dwell must be positive")

    def __len__(self) -> int:
        return self.positions.shape[0]

    def at(self, index: int) -> np.ndarray:
        """Position for a 1-based sample index."""
        return self.positions[index - 1]


@dataclass(frozen=True)
class FociSchedule:
    """Per time step, the 1-based trajectory indices each focus drives.

    indices has shape (N, foci_count); row j-1 lists the foci at step j.
    """

    indices: np.ndarray
    step_offset: int

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=int)
        object.__setattr__(self, "indices", idx)
        idx.setflags(write=False)

    def __len__(self) -> int:
        return self.indices.shape[0]

    @property
    def foci_count(self) -> int:
        return self.indices.shape[1]


def lm_s_trajectory(config: LmConfig) -> Trajectory:
    """Discretized circle r_j = c + A(cos t_j r_a + sin t_j r_b) + z_j r_c."""
    n = config.samples
    theta = TWO_PI * np.arange(n) / n  # theta_j for j = 1..N
    r_a, r_b, r_c = config.basis
    pos = (
        config.center
        + config.radius_mm * (np.cos(theta)[:, None] * r_a + np.sin(theta)[:, None] * r_b)
        + config.z_offsets()[:, None] * r_c
    )
    return Trajectory(positions=pos, dwell_s=config.timing.dwell_s)


def foci_step_offset(radius_mm: float, samples: int, foci_spacing_mm: float) -> int:
    """Index spacing between simultaneous foci, l = floor(d / step_width)."""
    widt = step_width(radius_mm, samples)
    offset = math.floor(foci_spacing_mm / widt)
    if offset < 1:
        raise ConfigError(
            f"foci spacing {foci_spacing_mm} mm below step width {widt:.4g} mm"
        )
    return offset


def lm_m_schedule(config: LmConfig) -> FociSchedule:
    """Which trajectory index each focus drives at each time step.

    Focus i at step j uses index ((j-1) + (i-1)*l) mod N + 1; the
    trajectory is cyclic, so indices wrap.
    """
    if config.mode != MODE_MULTI:
        raise ConfigError("schedule needs a multi-foci (mode 'M') config")
    n = config.samples
    offset = foci_step_offset(config.radius_mm, n, config.foci_spacing_mm)
    j = np.arange(n)[:, None]
    i = np.arange(config.foci_count)[None, :]
    indices = (j + i * offset) % n + 1
    return FociSchedule(indices=indices, step_offset=offset)


@dataclass(frozen=True)
class ReflectionPlane:
    """The reflecting display surface: a point on it and its unit normal."""

    point: np.ndarray
    normal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "point", as_vec3(self.point))
        normal = as_vec3(self.normal)
        if not is_unit(normal):
            raise ConfigError("plane normal must be unit length")
        object.__setattr__(self, "normal", normal)


def mirror_point(point, plane: ReflectionPlane) -> np.ndarray:
    """Mirror image p + 2((r_p - p) . n) n; works on (..., 3) stacks."""
    p = np.asarray(point, dtype=float)
    n = plane.normal
    along = (plane.point - p) @ n
    return p + 2.0 * np.multiply.outer(along, n)


def reflect_lm_config(config: LmConfig, plane: ReflectionPlane,
                      tilt_deg: float = -50.0) -> LmConfig:
    """Stimulus config after reflection off the display surface.

    The centre maps to its mirror image; r_a is parallel-shifted while
    r_b and r_c are tilted `tilt_deg` about r_a (right-hand rule).
    """
    if abs(tilt_deg) > 90.0:
        raise ConfigError("tilt must be within +-90 degrees")
    r_a, r_b, r_c = config.basis
    rot = rotation_about_axis_deg(r_a, tilt_deg)
    new_basis = (r_a, rot @ r_b, rot @ r_c)
    return LmConfig(
        center=mirror_point(config.center, plane),
        radius_mm=config.radius_mm,
        lm_frequency_hz=config.lm_frequency_hz,
        samples=config.samples,
        basis=new_basis,
        z_profile=config.z_profile,
        mode=config.mode,
        foci_count=config.foci_count,
        foci_spacing_mm=config.foci_spacing_mm,
    )


def reflected_trajectory(config: LmConfig, plane: ReflectionPlane,
                         tilt_deg: float = -50.0) -> Trajectory:
    """Trajectory traced by the reflected focus (mirrored centre, tilted basis)."""
    return lm_s_trajectory(reflect_lm_config(config, plane, tilt_deg))


def trajectory_to_drive_stream(
    trajectory: Trajectory,
    schedule: FociSchedule | None,
    array: TransducerArray,
    combiner: str = COMPLEX,
) -> list[DriveFrame]:
    """One drive frame per time step over a full cycle.

    Without a schedule each step drives the single sample r_j; with one,
    the scheduled foci are presented simultaneously.
    """
    frames = []
    n = len(trajectory)
    if schedule is not None and len(schedule) != n:
        raise ConfigError("schedule and trajectory lengths differ")
    for j in range(1, n + 1):
        if schedule is None:
            foci = [trajectory.at(j)]
        else:
            foci = [trajectory.at(int(idx)) for idx in schedule.indices[j - 1]]
        frames.append(drive_for_foci(array, foci, combiner=combiner,
                                     duration_s=trajectory.dwell_s))
    return frames


def write_trajectory(trajectory: Trajectory, path) -> None:
    """Text table: index j, x, y, z in mm, theta in rad, dwell in s."""
    n = len(trajectory)
    theta = TWO_PI * np.arange(n) / n
    with open(path, "w") as fh:
        fh.write("# j,x_mm,y_mm,z_mm,theta_rad,dwell_s\n")
        for j in range(n):
            x, y, z = trajectory.positions[j]
            fh.write(
                f"{j + 1},{x:.9g},{y:.9g},{z:.9g},{theta[j]:.9g},"
                f"{trajectory.dwell_s:.9g}\n"
            )


def write_schedule(schedule: FociSchedule, path) -> None:
    """Text table: step j followed by its 1-based foci indices."""
    with open(path, "w") as fh:
        fh.write(f"# step_offset_l={schedule.step_offset}\n")
        fh.write("# j,focus_indices...\n")
        for j, row in enumerate(schedule.indices, start=1):
            fh.write(",".join([str(j)] + [str(int(v)) for v in row]) + "\n")
