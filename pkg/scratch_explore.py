"""Scratch: probe acceptance-critical physics at the default geometry."""
import time
import numpy as np
import lmhaptics as lm

arr = lm.default_array()
lam = arr.wavelength_mm
center = np.array([0.0, 0.0, 220.0])
grid = lm.GridSpec.centered(center, extent_mm=40.0, spacing_mm=0.2)

t0 = time.time()

# --- LM-M A=6 frozen at t=0 -------------------------------------------------
n6 = lm.samples_for_target_step(6.0, 0.23)
cfg6 = lm.LmConfig(center=center, radius_mm=6.0, lm_frequency_hz=5.0, samples=n6,
                   mode="M", foci_count=4, foci_spacing_mm=3.0)
traj6 = lm.lm_s_trajectory(cfg6)
sched6 = lm.lm_m_schedule(cfg6)
print("N(A=6):", n6, "l:", sched6.step_offset, "step1 idx:", sched6.indices[0])
foci0 = [traj6.at(int(i)) for i in sched6.indices[0]]
frame_m = lm.drive_for_foci(arr, foci0, combiner="complex")
map_m = lm.radiation_pressure_map(arr, frame_m, grid)
peaks = lm.find_local_maxima(map_m, 0.3)
print(f"LM-M frozen peaks (prom 0.3): {len(peaks)}  [{time.time()-t0:.0f}s]")
for p, v in peaks:
    d = [np.linalg.norm(p - f) for f in foci0]
    print("   ", np.round(p, 2), round(v, 3), "nearest focus dist:", round(min(d), 2))

# --- force ratio -------------------------------------------------------------
frame_s = lm.drive_for_foci(arr, [center])
probe = lm.DiskProbe(center=center, normal=lm.geometry.rotation_about_axis_deg((1, 0, 0), 40.0) @ np.array([0, 0, 1.0]))
f_s = lm.integrated_force(arr, frame_s, probe)
f_m = lm.integrated_force(arr, frame_m, probe)
print("force single:", f_s, "LM-M:", f_m, "ratio M/S:", round(f_m / f_s, 4))
for shift in [(6, 0, 0), (0, 6, 0), (-6, 0, 0)]:
    pr = lm.DiskProbe(center=center + np.array(shift, float), normal=probe.normal)
    print("  shifted", shift, "single:", round(lm.integrated_force(arr, frame_s, pr) / f_s, 4),
          "multi:", round(lm.integrated_force(arr, frame_m, pr) / f_m, 4))

print(f"[{time.time()-t0:.0f}s]")
