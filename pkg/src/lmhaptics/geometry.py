"""Small 3D helpers shared across the toolkit.

All lengths are millimetres, all angles radians unless a name says
otherwise. Vectors are numpy arrays of shape (3,), right-handed system.
"""

from __future__ import annotations

import numpy as np

ORTHO_TOL = 1e-9


def vec3(x, y, z) -> np.ndarray:
    return np.array([x, y, z], dtype=float)


def as_vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector components must be finite")
    return a


def normalize(v) -> np.ndarray:
    a = as_vec3(v)
    n = np.linalg.norm(a)
    if n == 0.0:
        raise ValueError("cannot normalize a zero vector")
    return a / n


def is_unit(v, tol: float = ORTHO_TOL) -> bool:
    return abs(np.linalg.norm(np.asarray(v, dtype=float)) - 1.0) <= tol


def is_rotation_matrix(m, tol: float = ORTHO_TOL) -> bool:
    """True if m is orthonormal with determinant +1 (a proper rotation)."""
    a = np.asarray(m, dtype=float)
    if a.shape != (3, 3):
        return False
    if not np.allclose(a.T @ a, np.eye(3), atol=tol):
        return False
    return abs(np.linalg.det(a) - 1.0) <= 1e-6


def rotation_about_axis(axis, angle_rad: float) -> np.ndarray:
    """Rotation matrix for a right-handed rotation about `axis` (Rodrigues)."""
    u = normalize(axis)
    c, s = np.cos(angle_rad), np.sin(angle_rad)
    ux, uy, uz = u
    cross = np.array([[0.0, -uz, uy], [uz, 0.0, -ux], [-uy, ux, 0.0]])
    return c * np.eye(3) + s * cross + (1.0 - c) * np.outer(u, u)


def rotation_about_axis_deg(axis, angle_deg: float) -> np.ndarray:
    return rotation_about_axis(axis, np.deg2rad(angle_deg))
