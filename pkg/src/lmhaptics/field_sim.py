"""Brute-force acoustic field evaluation on planar grids.

Each transducer is a point source with piston directivity and 1/r
spreading (r clamped below at R_MIN_MM); the complex pressure at a
point is the coherent sum over all emitters. Radiation pressure is
taken proportional to |p|^2 and every published map is normalized, so
values are arbitrary units and only ratios carry meaning.

Grid evaluation is chunked over fixed-size point blocks; optional
threads only change who computes a block, never how, so results are
bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.special import j1

from .array_model import TransducerArray
from .errors import SimulationError
from .focus_phase import DriveFrame
from .geometry import as_vec3, is_unit, normalize

R_MIN_MM = 1.0  # spherical-spreading singularity guard
CHUNK_POINTS = 2048  # fixed block size; independent of worker count

DFT_CONVENTION = "unnormalized forward DFT, power = |X_k|^2"


@dataclass(frozen=True)
class GridSpec:
    """Planar sampling lattice: origin plus two in-plane unit axes."""

    origin: np.ndarray
    axis_u: np.ndarray
    axis_v: np.ndarray
    spacing_mm: float
    nu: int
    nv: int

    def __post_init__(self):
        object.__setattr__(self, "origin", as_vec3(self.origin))
        object.__setattr__(self, "axis_u", normalize(self.axis_u))
        object.__setattr__(self, "axis_v", normalize(self.axis_v))
        if self.spacing_mm <= 0:
            raise ValueError("grid spacing must be positive")
        if self.nu < 1 or self.nv < 1:
            raise ValueError("grid needs at least one sample per axis")

    @classmethod
    def centered(cls, center, extent_mm: float, spacing_mm: float = 0.2,
                 axis_u=(1.0, 0.0, 0.0), axis_v=(0.0, 1.0, 0.0)) -> "GridSpec":
        """Square grid of the given extent centred on a point."""
        n = int(round(extent_mm / spacing_mm)) + 1
        center = as_vec3(center)
        u = normalize(axis_u)
        v = normalize(axis_v)
        half = (n - 1) / 2.0 * spacing_mm
        return cls(origin=center - half * u - half * v, axis_u=u, axis_v=v,
                   spacing_mm=spacing_mm, nu=n, nv=n)

    def points(self) -> np.ndarray:
        """All lattice points, shape (nu*nv, 3), index iu*nv + iv."""
        iu = np.arange(self.nu)[:, None, None]
        iv = np.arange(self.nv)[None, :, None]
        pts = (self.origin[None, None, :]
               + iu * self.spacing_mm * self.axis_u[None, None, :]
               + iv * self.spacing_mm * self.axis_v[None, None, :])
        return pts.reshape(-1, 3)

    def point(self, iu: int, iv: int) -> np.ndarray:
        return (self.origin + iu * self.spacing_mm * self.axis_u
                + iv * self.spacing_mm * self.axis_v)


@dataclass(frozen=True)
class FieldGrid:
    """Scalar field sampled on a GridSpec; values[iu, iv] >= 0."""

    grid: GridSpec
    values: np.ndarray
    kind: str = "instant"
    normalized: bool = True
    dft_note: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.grid.nu, self.grid.nv):
            raise ValueError("values shape must be (nu, nv)")
        if not np.all(np.isfinite(vals)):
            raise SimulationError("non-finite field values")
        object.__setattr__(self, "values", vals)
        vals.setflags(write=False)

    # convenience forwards so the geometry reads naturally
    @property
    def origin(self) -> np.ndarray:
        return self.grid.origin

    @property
    def axis_u(self) -> np.ndarray:
        return self.grid.axis_u

    @property
    def axis_v(self) -> np.ndarray:
        return self.grid.axis_v

    @property
    def spacing_mm(self) -> float:
        return self.grid.spacing_mm

    @property
    def nu(self) -> int:
        return self.grid.nu

    @property
    def nv(self) -> int:
        return self.grid.nv


def _frame_list(frames) -> list[DriveFrame]:
    if isinstance(frames, DriveFrame):
        return [frames]
    frames = list(frames)
    if not frames:
        raise ValueError("need at least one drive frame")
    return frames


def _gain_any_angle(array: TransducerArray, cos_angle: np.ndarray) -> np.ndarray:
    """Directivity for arbitrary angles; 0 behind the emitter plane."""
    cos_angle = np.clip(cos_angle, -1.0, 1.0)
    if array.directivity_table is not None:
        angles, gains = array.directivity_table
        gain = np.interp(np.arccos(cos_angle), angles, gains)
    else:
        # piston gain needs sin(angle) only; skip the arccos round trip
        x = array.wavenumber * array.aperture_radius_mm * np.sqrt(1.0 - cos_angle**2)
        gain = np.ones_like(x)
        nz = x > 1e-12
        gain[nz] = np.abs(2.0 * j1(x[nz]) / x[nz])
    return np.where(cos_angle < 0.0, 0.0, gain)


def _pressure_block(array: TransducerArray, phasors: np.ndarray,
                    points: np.ndarray) -> np.ndarray:
    """Complex pressure for one block of points, shape (m, n_frames)."""
    diff = points[:, None, :] - array.positions[None, :, :]
    r = np.sqrt(np.einsum("mnd,mnd->mn", diff, diff))
    cos_angle = np.einsum("mnd,nd->mn", diff, array.normals) / np.maximum(r, 1e-30)
    gain = _gain_any_angle(array, cos_angle)
    transfer = gain / np.maximum(r, R_MIN_MM) * np.exp(1j * array.wavenumber * r)
    return transfer @ phasors


def pressure_field(array: TransducerArray, frames, points,
                   workers: int = 1) -> np.ndarray:
    """Complex pressure of each frame at each point, shape (m, n_frames).

    Deterministic for any `workers`: blocks have a fixed size and each
    is computed identically wherever it runs.
    """
    frames = _frame_list(frames)
    points = np.atleast_2d(np.asarray(points, dtype=float))
    phasors = np.stack([f.phasors() for f in frames], axis=1)
    m = points.shape[0]
    out = np.empty((m, len(frames)), dtype=complex)
    blocks = [(s, min(s + CHUNK_POINTS, m)) for s in range(0, m, CHUNK_POINTS)]

    def run(block):
        s, e = block
        out[s:e] = _pressure_block(array, phasors, points[s:e])

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(run, blocks))
    else:
        for block in blocks:
            run(block)
    return out


def complex_pressure(array: TransducerArray, frame: DriveFrame, point) -> complex:
    """Single-point carrier phasor; errors inside the singularity guard."""
    point = as_vec3(point)
    dist = np.linalg.norm(array.positions - point, axis=1)
    if np.any(dist < R_MIN_MM):
        raise ValueError(f"point within {R_MIN_MM} mm of an emitter")
    return complex(pressure_field(array, frame, point[None, :])[0, 0])


def pressure_squared_series(array: TransducerArray, frames, points,
                            workers: int = 1) -> np.ndarray:
    """Radiation-pressure time series |p|^2 per point, shape (m, n_frames)."""
    p = pressure_field(array, frames, points, workers=workers)
    return p.real * p.real + p.imag * p.imag


def _normalize(values: np.ndarray, normalize: bool) -> np.ndarray:
    if not normalize:
        return values
    peak = values.max()
    return values / peak if peak > 0 else values


def radiation_pressure_map(array: TransducerArray, frame: DriveFrame,
                           grid_spec: GridSpec, normalize: bool = True,
                           workers: int = 1) -> FieldGrid:
    """|p|^2 of a single frozen drive frame over the grid."""
    series = pressure_squared_series(array, frame, grid_spec.points(), workers=workers)
    values = series @ np.ones(1)
    values = _normalize(values, normalize).reshape(grid_spec.nu, grid_spec.nv)
    return FieldGrid(grid=grid_spec, values=values, kind="instant",
                     normalized=normalize)


def time_averaged_map(array: TransducerArray, frames, grid_spec: GridSpec,
                      normalize: bool = True, workers: int = 1) -> FieldGrid:
    """Dwell-weighted mean radiation pressure over a frame stream."""
    frames = _frame_list(frames)
    series = pressure_squared_series(array, frames, grid_spec.points(), workers=workers)
    durations = np.array([f.duration_s for f in frames])
    values = series @ (durations / durations.sum())
    values = _normalize(values, normalize).reshape(grid_spec.nu, grid_spec.nv)
    return FieldGrid(grid=grid_spec, values=values, kind="time_avg",
                     normalized=normalize)


def temporal_spectrum_map(array: TransducerArray, frames, grid_spec: GridSpec,
                          target_freq_hz: float, normalize: bool = True,
                          workers: int = 1) -> FieldGrid:
    """Power of the |p|^2 time series at one frequency bin, per grid point.

    The frames must cover exactly one stimulus cycle at a uniform dwell;
    the series is Fourier transformed (unnormalized forward DFT) and the
    squared magnitude of the target_freq bin is returned. target_freq
    must be a harmonic of the cycle frequency and at most Nyquist.
    """
    frames = _frame_list(frames)
    n = len(frames)
    dwell = frames[0].duration_s
    if any(abs(f.duration_s - dwell) > 1e-12 * dwell for f in frames):
        raise ValueError("spectrum needs a uniform dwell across frames")
    f_cycle = 1.0 / (n * dwell)
    bin_f = target_freq_hz / f_cycle
    k = int(round(bin_f))
    if abs(bin_f - k) > 1e-9 or k < 0:
        raise ValueError(
            f"target frequency {target_freq_hz} Hz is not a harmonic of {f_cycle:.6g} Hz")
    if k > n // 2:
        raise ValueError(
            f"target frequency {target_freq_hz} Hz above Nyquist {n * f_cycle / 2:.6g} Hz")
    series = pressure_squared_series(array, frames, grid_spec.points(), workers=workers)
    spectrum = np.fft.fft(series, axis=1)
    values = np.abs(spectrum[:, k]) ** 2
    values = _normalize(values, normalize).reshape(grid_spec.nu, grid_spec.nv)
    return FieldGrid(grid=grid_spec, values=values, kind=f"spectrum@{target_freq_hz}Hz",
                     normalized=normalize, dft_note=DFT_CONVENTION)


@dataclass(frozen=True)
class DiskProbe:
    """Force-gauge disk: 1.5 cm acrylic disk by default, arbitrary tilt."""

    center: np.ndarray
    normal: np.ndarray
    radius_mm: float = 7.5
    sample_count: int = 1000

    def __post_init__(self):
        object.__setattr__(self, "center", as_vec3(self.center))
        object.__setattr__(self, "normal", normalize(self.normal))
        if self.radius_mm <= 0:
            raise ValueError("disk radius must be positive")
        if self.sample_count < 1:
            raise ValueError("need at least one sample")

    def samples(self) -> np.ndarray:
        """Deterministic, roughly uniform concentric-ring samples."""
        n = self.normal
        seed = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        u = normalize(np.cross(n, seed))
        v = np.cross(n, u)
        rings = max(1, round(math.sqrt(self.sample_count)))
        pts = []
        for ring in range(rings):
            count = max(1, round(self.sample_count * (2 * ring + 1) / rings**2))
            radius = self.radius_mm * (ring + 0.5) / rings
            # fixed per-ring start angle decorrelates ring orientations
            angles = 2.0 * math.pi * (np.arange(count) + 0.5 * (ring % 2)) / count
            pts.append(self.center
                       + radius * np.cos(angles)[:, None] * u
                       + radius * np.sin(angles)[:, None] * v)
        return np.vstack(pts)


def integrated_force(array: TransducerArray, frame: DriveFrame,
                     probe: DiskProbe, workers: int = 1) -> float:
    """Disk-integrated |p|^2: mean over samples times disk area.

    Arbitrary units; only ratios between drives are meaningful.
    """
    series = pressure_squared_series(array, frame, probe.samples(), workers=workers)
    area = math.pi * probe.radius_mm**2
    return float(series[:, 0].mean() * area)


def find_local_maxima(grid: FieldGrid, min_prominence: float) -> list[tuple[np.ndarray, float]]:
    """8-neighbour local maxima above a fraction of the global peak.

    Plateau maxima (equal-valued neighbours) merge into one entry.
    Returns (position, value) pairs sorted by value descending.
    """
    vals = grid.values
    peak = vals.max()
    if peak <= 0:
        return []
    threshold = min_prominence * peak
    footprint = np.ones((3, 3), dtype=bool)
    vmax = ndimage.maximum_filter(vals, footprint=footprint, mode="nearest")
    vmin = ndimage.minimum_filter(vals, footprint=footprint, mode="nearest")
    # strict interior of a plateau still counts; a constant grid does not
    cand = (vals >= vmax) & (vals > vmin) & (vals >= threshold)
    if not np.any(cand):
        return []
    labels, count = ndimage.label(cand, structure=footprint)
    out = []
    for lab in range(1, count + 1):
        ius, ivs = np.nonzero(labels == lab)
        best = np.argmax(vals[ius, ivs])
        iu, iv = int(ius[best]), int(ivs[best])
        out.append((grid.grid.point(iu, iv), float(vals[iu, iv])))
    out.sort(key=lambda pv: -pv[1])
    return out


# ---------------------------------------------------------------------------
# export / import

def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_field_csv(grid: FieldGrid, path) -> None:
    """Comma-separated text with a self-describing header; lossless."""
    g = grid.grid
    with open(path, "w", newline="\n") as fh:
        fh.write("# lmhaptics-field-grid v1\n")
        fh.write(f"# kind: {grid.kind}\n")
        fh.write(f"# origin_mm: {_fmt(g.origin[0])} {_fmt(g.origin[1])} {_fmt(g.origin[2])}\n")
        fh.write(f"# axis_u: {_fmt(g.axis_u[0])} {_fmt(g.axis_u[1])} {_fmt(g.axis_u[2])}\n")
        fh.write(f"# axis_v: {_fmt(g.axis_v[0])} {_fmt(g.axis_v[1])} {_fmt(g.axis_v[2])}\n")
        fh.write(f"# spacing_mm: {_fmt(g.spacing_mm)}\n")
        fh.write(f"# nu: {g.nu}\n")
        fh.write(f"# nv: {g.nv}\n")
        fh.write(f"# normalized: {str(grid.normalized).lower()}\n")
        fh.write(f"# dft: {grid.dft_note}\n")
        for iu in range(g.nu):
            fh.write(",".join(_fmt(v) for v in grid.values[iu]) + "\n")


def read_field_csv(path) -> FieldGrid:
    header: dict[str, str] = {}
    rows = []
    with open(path) as fh:
        first = fh.readline().strip()
        if first != "# lmhaptics-field-grid v1":
            raise ValueError(f"{path}: not a field-grid file")
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                key, _, value = line[1:].partition(":")
                header[key.strip()] = value.strip()
            elif line:
                rows.append([float(v) for v in line.split(",")])
    spec = GridSpec(
        origin=[float(v) for v in header["origin_mm"].split()],
        axis_u=[float(v) for v in header["axis_u"].split()],
        axis_v=[float(v) for v in header["axis_v"].split()],
        spacing_mm=float(header["spacing_mm"]),
        nu=int(header["nu"]),
        nv=int(header["nv"]),
    )
    return FieldGrid(grid=spec, values=np.array(rows), kind=header.get("kind", "instant"),
                     normalized=header.get("normalized", "true") == "true",
                     dft_note=header.get("dft", ""))


def write_field_pgm(grid: FieldGrid, path) -> None:
    """8-bit binary portable graymap scaled to the grid maximum."""
    vals = grid.values
    peak = vals.max()
    scaled = np.zeros_like(vals) if peak <= 0 else vals / peak
    img = np.round(scaled * 255.0).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{grid.nv} {grid.nu}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
