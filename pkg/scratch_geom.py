"""Scratch: geometry sweep for multi-foci structure + force ratio."""
import time
import numpy as np
import lmhaptics as lm
from lmhaptics.array_model import ArrayLayoutConfig, UnitPose, build_array
from lmhaptics.geometry import rotation_about_axis_deg, normalize

center = np.array([0.0, 0.0, 220.0])


def aimed_layout(ring_r, tilt_deg):
    """4 units on a ring, each tilted `tilt_deg` toward the central axis."""
    units = []
    for az_deg in (45.0, 135.0, 225.0, 315.0):
        az = np.deg2rad(az_deg)
        c = np.array([ring_r * np.cos(az), ring_r * np.sin(az), 0.0])
        # tilt axis: horizontal, perpendicular to the inward direction
        inward = normalize(np.array([-c[0], -c[1], 0.0]))
        axis = np.cross(np.array([0, 0, 1.0]), inward)
        rot = rotation_about_axis_deg(axis, -tilt_deg)
        units.append(UnitPose(origin=c, rotation=rot))
    return ArrayLayoutConfig(units=tuple(units))


def probe_40():
    return rotation_about_axis_deg((1, 0, 0), 40.0) @ np.array([0, 0, 1.0])


def evaluate(arr, label, spacing=0.4):
    lam = arr.wavelength_mm
    grid = lm.GridSpec.centered(center, extent_mm=40.0, spacing_mm=spacing)
    n6 = lm.samples_for_target_step(6.0, 0.23)
    cfg6 = lm.LmConfig(center=center, radius_mm=6.0, lm_frequency_hz=5.0, samples=n6,
                       mode="M", foci_count=4, foci_spacing_mm=3.0)
    traj6 = lm.lm_s_trajectory(cfg6)
    sched6 = lm.lm_m_schedule(cfg6)
    foci0 = [traj6.at(int(i)) for i in sched6.indices[0]]
    frame_m = lm.drive_for_foci(arr, foci0, combiner="complex")
    frame_s = lm.drive_for_foci(arr, [center])
    map_m = lm.radiation_pressure_map(arr, frame_m, grid)
    peaks = lm.find_local_maxima(map_m, 0.3)
    ok = len(peaks) == 4 and all(
        min(np.linalg.norm(p - f) for f in foci0) <= lam / 2 for p, v in peaks)
    # check one peak per focus
    match = [min(np.linalg.norm(p - f) for p, v in peaks) for f in foci0] if peaks else []
    probe = lm.DiskProbe(center=center, normal=probe_40())
    f_s = lm.integrated_force(arr, frame_s, probe)
    f_m = lm.integrated_force(arr, frame_m, probe)
    # stimulus+probe shifted together 6 mm
    sh = np.array([6.0, 0, 0])
    frame_s2 = lm.drive_for_foci(arr, [center + sh])
    probe2 = lm.DiskProbe(center=center + sh, normal=probe_40())
    f_s2 = lm.integrated_force(arr, frame_s2, probe2)
    # single focus peak check
    map_s = lm.radiation_pressure_map(arr, frame_s, grid)
    ps = lm.find_local_maxima(map_s, 0.5)
    print(f"{label}: M-peaks={len(peaks)} per-focus-dist={np.round(match,2) if match else '-'} "
          f"ratio={f_m/f_s:.3f} shift-change={abs(f_s2-f_s)/f_s:.3f} "
          f"s-peaks={len(ps)} s-peak-err={np.linalg.norm(ps[0][0]-center):.2f}")
    return len(peaks), f_m / f_s


t0 = time.time()
evaluate(lm.default_array(), "flat 2x2 spin20")
for ring, tilt in [(180, 30), (250, 40), (300, 45), (350, 55)]:
    arr = build_array(aimed_layout(ring, tilt))
    evaluate(arr, f"ring{ring} tilt{tilt}")
print(f"total {time.time()-t0:.0f}s")
