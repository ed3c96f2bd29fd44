"""Circular lateral-modulation ultrasound stimuli and field simulation."""

from .array_model import (
    ArrayLayoutConfig,
    GridLayout,
    TransducerArray,
    UnitPose,
    build_array,
    default_array,
    default_layout,
    directivity,
    load_layout,
    wavelength,
)
from .errors import ConfigError, SimulationError
from .field_sim import (
    DiskProbe,
    FieldGrid,
    GridSpec,
    complex_pressure,
    find_local_maxima,
    integrated_force,
    pressure_field,
    pressure_squared_series,
    radiation_pressure_map,
    read_field_csv,
    temporal_spectrum_map,
    time_averaged_map,
    write_field_csv,
    write_field_pgm,
)
from .focus_phase import (
    COMBINERS,
    DriveFrame,
    combine_phases_complex,
    combine_phases_literal,
    drive_for_foci,
    single_focus_phases,
)
from .lm_trajectory import (
    FociSchedule,
    LmConfig,
    LmTiming,
    ReflectionPlane,
    Trajectory,
    dwell_time,
    foci_step_offset,
    lm_m_schedule,
    lm_s_trajectory,
    mirror_point,
    reflect_lm_config,
    reflected_trajectory,
    samples_for_target_step,
    step_width,
    trajectory_to_drive_stream,
)

__version__ = "0.1.0"
