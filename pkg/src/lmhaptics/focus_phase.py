"""Per-transducer phase synthesis for single and multiple foci.

Wave convention: emitted field ~ exp(j(k r - w t + phi)), so focusing at
a point needs phi = (-k * distance) mod 2pi per transducer; all arrivals
are then in phase at the focus. Multi-foci drives combine per-focus
phase vectors either literally (elementwise sum mod 2pi) or as the
argument of the complex phasor sum. Amplitude stays at maximum for all
stimuli in scope.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .array_model import TransducerArray

TWO_PI = 2.0 * math.pi

LITERAL = "literal"
COMPLEX = "complex"
COMBINERS = (LITERAL, COMPLEX)


@dataclass(frozen=True)
class DriveFrame:
    """One dwell interval of the stimulus: a phase per transducer.

    Amplitude is fixed at maximum (1.0) for every stimulus in scope.
    """

    phases: np.ndarray
    duration_s: float
    amplitude: float = 1.0

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float)
        object.__setattr__(self, "phases", phases)
        phases.setflags(write=False)
        if self.duration_s <= 0:
            raise ValueError("frame duration must be positive")

    def phasors(self) -> np.ndarray:
        """Complex per-transducer drive, amplitude * exp(j phase)."""
        return self.amplitude * np.exp(1j * self.phases)


def single_focus_phases(array: TransducerArray, focus) -> np.ndarray:
    """Phases that focus all emitters on a point, each in [0, 2pi)."""
    focus = np.asarray(focus, dtype=float)
    dist = np.linalg.norm(array.positions - focus, axis=1)
    if np.any(dist < 1e-9):
        raise ValueError("focus coincides with a transducer position")
    return np.mod(-array.wavenumber * dist, TWO_PI)


def _check_stack(per_focus: Iterable[np.ndarray]) -> np.ndarray:
    vecs = [np.asarray(v, dtype=float) for v in per_focus]
    if not vecs:
        raise ValueError("need at least one phase vector")
    n = vecs[0].shape
    if any(v.shape != n for v in vecs):
        raise ValueError("phase vectors must all have the same length")
    return np.stack(vecs)


def combine_phases_literal(per_focus: Sequence[np.ndarray]) -> np.ndarray:
    """Elementwise sum of phase vectors, reduced mod 2pi."""
    return np.mod(_check_stack(per_focus).sum(axis=0), TWO_PI)


def combine_phases_complex(per_focus: Sequence[np.ndarray]) -> np.ndarray:
    """Per transducer, the argument of the summed unit phasors in [0, 2pi).

    Entries whose phasor sum nearly cancels (magnitude < 1e-12) have no
    well-defined argument; they resolve to 0 and trigger a warning.
    """
    stacked = _check_stack(per_focus)
    z = np.exp(1j * stacked).sum(axis=0)
    degenerate = np.abs(z) < 1e-12
    phases = np.mod(np.angle(z), TWO_PI)
    if np.any(degenerate):
        warnings.warn(
            f"{int(degenerate.sum())} transducer(s) had a cancelling phasor sum; "
            "their phase was set to 0",
            RuntimeWarning,
            stacklevel=2,
        )
        phases[degenerate] = 0.0
    return phases


def drive_for_foci(
    array: TransducerArray,
    foci: Sequence,
    combiner: str = COMPLEX,
    duration_s: float = 1.0,
) -> DriveFrame:
    """Drive frame presenting all foci at once.

    With a single focus both combiners reduce to single_focus_phases.
    """
    if combiner not in COMBINERS:
        raise ValueError(f"combiner must be one of {COMBINERS}")
    foci = list(foci)
    if not foci:
        raise ValueError("need at least one focus")
    per_focus = [single_focus_phases(array, f) for f in foci]
    if len(per_focus) == 1:
        phases = per_focus[0]
    elif combiner == LITERAL:
        phases = combine_phases_literal(per_focus)
    else:
        phases = combine_phases_complex(per_focus)
    return DriveFrame(phases=phases, duration_s=duration_s)
