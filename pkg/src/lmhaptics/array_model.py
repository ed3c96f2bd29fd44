"""Transducer-array geometry and medium model.

Builds the emitter layout every phase and field computation consumes:
unit poses, per-unit transducer grids, operating frequency, sound speed
and the far-field directivity model. Arrays are immutable once built.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.special import j1

from .errors import ConfigError
from .geometry import as_vec3, is_rotation_matrix, rotation_about_axis_deg

TWO_PI = 2.0 * math.pi

# Paper-class device: 249 emitters per unit at 40 kHz.
DEFAULT_FREQUENCY_HZ = 40_000.0
DEFAULT_SOUND_SPEED_MM_S = 340_000.0  # dry air near 20 degC, in mm/s
DEFAULT_APERTURE_RADIUS_MM = 4.5  # effective piston radius of a 10 mm emitter


@dataclass(frozen=True)
class GridLayout:
    """Rectangular per-unit emitter grid with mounting holes removed.

    The device datasheet layout is not public; 18 x 14 at 10.16 mm pitch
    minus 3 holes gives the documented 249 emitters per unit. Hole
    positions are an assumption and fully overridable.
    """

    cols: int = 18
    rows: int = 14
    pitch_mm: float = 10.16
    holes: tuple[tuple[int, int], ...] = ((1, 6), (8, 6), (16, 6))

    def __post_init__(self):
        if self.cols < 1 or self.rows < 1 or self.pitch_mm <= 0:
            raise ConfigError("grid needs cols >= 1, rows >= 1, pitch > 0")
        for c, r in self.holes:
            if not (0 <= c < self.cols and 0 <= r < self.rows):
                raise ConfigError(f"hole ({c}, {r}) outside {self.cols}x{self.rows} grid")
        if len(set(self.holes)) != len(self.holes):
            raise ConfigError("duplicate hole positions")

    @property
    def emitter_count(self) -> int:
        return self.cols * self.rows - len(self.holes)

    def local_positions(self) -> np.ndarray:
        """Grid-centred local coordinates, shape (emitter_count, 3)."""
        holes = set(self.holes)
        pts = [
            ((c - (self.cols - 1) / 2.0) * self.pitch_mm,
             (r - (self.rows - 1) / 2.0) * self.pitch_mm,
             0.0)
            for r in range(self.rows)
            for c in range(self.cols)
            if (c, r) not in holes
        ]
        return np.array(pts, dtype=float)


@dataclass(frozen=True)
class UnitPose:
    """Rigid placement of one array unit: world = rotation @ local + origin."""

    origin: np.ndarray
    rotation: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "origin", as_vec3(self.origin))
        rot = np.asarray(self.rotation, dtype=float)
        if not is_rotation_matrix(rot):
            raise ConfigError("unit pose rotation must be orthonormal with det +1")
        object.__setattr__(self, "rotation", rot)

    @classmethod
    def from_axis_angle(cls, origin, axis, angle_deg: float) -> "UnitPose":
        return cls(origin=origin, rotation=rotation_about_axis_deg(axis, angle_deg))


@dataclass(frozen=True)
class ArrayLayoutConfig:
    units: tuple[UnitPose, ...]
    grid: GridLayout = field(default_factory=GridLayout)
    frequency_hz: float = DEFAULT_FREQUENCY_HZ
    sound_speed_mm_s: float = DEFAULT_SOUND_SPEED_MM_S
    aperture_radius_mm: float = DEFAULT_APERTURE_RADIUS_MM

    def __post_init__(self):
        if not self.units:
            raise ConfigError("layout needs at least one unit")
        if self.frequency_hz <= 0 or self.sound_speed_mm_s <= 0:
            raise ConfigError("frequency and sound speed must be positive")
        if self.aperture_radius_mm <= 0:
            raise ConfigError("aperture radius must be positive")


@dataclass(frozen=True)
class TransducerArray:
    """Immutable emitter set plus medium constants.

    positions and normals are (n, 3); normals are unit emission axes.
    """

    positions: np.ndarray
    normals: np.ndarray
    frequency_hz: float
    sound_speed_mm_s: float
    aperture_radius_mm: float
    unit_count: int
    per_unit_count: int
    # optional measured directivity: (angles_rad ascending, gains in [0, 1])
    directivity_table: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        nrm = np.asarray(self.normals, dtype=float)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "normals", nrm)
        pos.setflags(write=False)
        nrm.setflags(write=False)

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def wavenumber(self) -> float:
        """k in rad/mm, exactly 2*pi*f/c."""
        return TWO_PI * self.frequency_hz / self.sound_speed_mm_s

    @property
    def wavelength_mm(self) -> float:
        return self.sound_speed_mm_s / self.frequency_hz


def build_array(config: ArrayLayoutConfig) -> TransducerArray:
    """Place every transducer by unit pose o local grid position."""
    local = config.grid.local_positions()
    local_normal = np.array([0.0, 0.0, 1.0])
    positions = []
    normals = []
    for pose in config.units:
        positions.append(local @ pose.rotation.T + pose.origin)
        normals.append(np.tile(pose.rotation @ local_normal, (local.shape[0], 1)))
    pos = np.vstack(positions)
    nrm = np.vstack(normals)

    rounded = np.round(pos, 6)
    if np.unique(rounded, axis=0).shape[0] != pos.shape[0]:
        raise ConfigError("duplicate transducer positions; check unit poses")

    return TransducerArray(
        positions=pos,
        normals=nrm,
        frequency_hz=config.frequency_hz,
        sound_speed_mm_s=config.sound_speed_mm_s,
        aperture_radius_mm=config.aperture_radius_mm,
        unit_count=len(config.units),
        per_unit_count=local.shape[0],
    )


def wavelength(array: TransducerArray) -> float:
    """Wavelength in mm (sound_speed / frequency)."""
    if array.frequency_hz <= 0:
        raise ConfigError("frequency must be positive")
    return array.sound_speed_mm_s / array.frequency_hz


def _piston_gain(ka: float, angle_rad: np.ndarray) -> np.ndarray:
    """|2 J1(ka sin t) / (ka sin t)|, with the on-axis limit 1."""
    x = ka * np.sin(angle_rad)
    out = np.ones_like(x)
    nz = np.abs(x) > 1e-12
    out[nz] = np.abs(2.0 * j1(x[nz]) / x[nz])
    return out


def directivity(angle_from_normal, array: TransducerArray) -> np.ndarray | float:
    """Emitter gain at an angle off the emission axis, in [0, 1].

    Uses the far-field rigid-piston model with the configured effective
    aperture radius, or the array's tabulated directivity when present.
    Valid for angles in [0, pi/2].
    """
    angle = np.asarray(angle_from_normal, dtype=float)
    if np.any(angle < 0.0) or np.any(angle > math.pi / 2.0 + 1e-12):
        raise ValueError("angle_from_normal must lie in [0, pi/2]")
    if array.directivity_table is not None:
        angles, gains = array.directivity_table
        out = np.interp(angle, angles, gains)
    else:
        ka = array.wavenumber * array.aperture_radius_mm
        out = _piston_gain(ka, angle)
    return float(out) if np.isscalar(angle_from_normal) else out


def default_layout(
    frequency_hz: float = DEFAULT_FREQUENCY_HZ,
    sound_speed_mm_s: float = DEFAULT_SOUND_SPEED_MM_S,
    aperture_radius_mm: float = DEFAULT_APERTURE_RADIUS_MM,
    unit_tilt_deg: float = 20.0,
    unit_half_spacing_mm: tuple[float, float] = (100.0, 80.0),
) -> ArrayLayoutConfig:
    """Four-unit layout used throughout: 2x2 tiling in the z = 0 plane.

    Each unit faces +z and is rotated `unit_tilt_deg` about the z-axis.
    Inter-unit spacing is not published; the default tiles the boards
    with a small margin, all assumptions overridable via config file.
    """
    dx, dy = unit_half_spacing_mm
    units = tuple(
        UnitPose.from_axis_angle((sx * dx, sy * dy, 0.0), (0, 0, 1), unit_tilt_deg)
        for sx, sy in ((1, 1), (-1, 1), (-1, -1), (1, -1))
    )
    return ArrayLayoutConfig(
        units=units,
        frequency_hz=frequency_hz,
        sound_speed_mm_s=sound_speed_mm_s,
        aperture_radius_mm=aperture_radius_mm,
    )


def default_array() -> TransducerArray:
    """The default 4 x 249 emitter array."""
    return build_array(default_layout())


def layout_from_dict(data: dict) -> ArrayLayoutConfig:
    """Build a layout from parsed config data (see load_layout)."""
    try:
        arr = data.get("array", {})
        grid_data = data.get("grid", {})
        grid = GridLayout(
            cols=int(grid_data.get("cols", 18)),
            rows=int(grid_data.get("rows", 14)),
            pitch_mm=float(grid_data.get("pitch_mm", 10.16)),
            holes=tuple(tuple(h) for h in grid_data.get("holes", ((1, 6), (8, 6), (16, 6)))),
        )
        units = []
        for u in data.get("unit", []):
            units.append(
                UnitPose.from_axis_angle(
                    origin=u["origin_mm"],
                    axis=u.get("axis", (0.0, 0.0, 1.0)),
                    angle_deg=float(u.get("angle_deg", 0.0)),
                )
            )
        if not units:
            return default_layout(
                frequency_hz=float(arr.get("frequency_hz", DEFAULT_FREQUENCY_HZ)),
                sound_speed_mm_s=float(arr.get("sound_speed_mm_s", DEFAULT_SOUND_SPEED_MM_S)),
                aperture_radius_mm=float(arr.get("aperture_radius_mm", DEFAULT_APERTURE_RADIUS_MM)),
            )
        return ArrayLayoutConfig(
            units=tuple(units),
            grid=grid,
            frequency_hz=float(arr.get("frequency_hz", DEFAULT_FREQUENCY_HZ)),
            sound_speed_mm_s=float(arr.get("sound_speed_mm_s", DEFAULT_SOUND_SPEED_MM_S)),
            aperture_radius_mm=float(arr.get("aperture_radius_mm", DEFAULT_APERTURE_RADIUS_MM)),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad array layout config: {exc}") from exc


def load_layout(path) -> ArrayLayoutConfig:
    """Load an array layout from a TOML file.

    Recognized keys: [array] frequency_hz, sound_speed_mm_s,
    aperture_radius_mm; [grid] cols, rows, pitch_mm, holes; repeated
    [[unit]] tables with origin_mm, axis, angle_deg.
    """
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    try:
        with open(Path(path), "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return layout_from_dict(data)
