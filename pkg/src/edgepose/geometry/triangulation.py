"""Linear (DLT) multi-view triangulation."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateGeometryError, InsufficientViewsError
from .camera import CameraProjection

W_EPS = 1e-12
RANK_EPS = 1e-12


@dataclass(frozen=True)
class Observation2D:
    u: float
    v: float
    camera_index: int
    confidence: float = 1.0

    def __post_init__(self) -> None:
        if not (np.isfinite(self.u) and np.isfinite(self.v)):
            raise ValueError("observation coordinates must be finite")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must lie in [0, 1]")


def build_dlt_matrix(
    observations: Sequence[Observation2D], cameras: Sequence[CameraProjection]
) -> np.ndarray:
    """Rows u p3 - p1 and v p3 - p2 for every observation."""
    if len(observations) < 2:
        raise InsufficientViewsError(f"need at least 2 views, got {len(observations)}")
    indices = [obs.camera_index for obs in observations]
    if len(set(indices)) != len(indices):
        raise ValueError("observations must come from distinct cameras")
    rows = []
    for obs in observations:
        if not 0 <= obs.camera_index < len(cameras):
            raise ValueError(f"camera index {obs.camera_index} out of range")
        p = cameras[obs.camera_index].p
        rows.append(obs.u * p[2] - p[0])
        rows.append(obs.v * p[2] - p[1])
    return np.vstack(rows)


def solve_dlt(a: np.ndarray) -> np.ndarray:
    """Null vector of ``a`` (smallest right singular vector), dehomogenised."""
    _, s, vt = np.linalg.svd(a)
    scale = s[0] if s.size else 0.0
    if s.size >= 3 and s[2] <= RANK_EPS * max(scale, 1.0):
        raise DegenerateGeometryError("DLT system has a null space larger than one dimension")
    h = vt[-1]
    if abs(h[3]) < W_EPS:
        raise DegenerateGeometryError("triangulated point is at infinity")
    return h[:3] / h[3]


def triangulate(
    observations: Sequence[Observation2D], cameras: Sequence[CameraProjection]
) -> np.ndarray:
    return solve_dlt(build_dlt_matrix(observations, cameras))


def triangulate_views(
    uv: np.ndarray, admitted: np.ndarray, matrices: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Batch DLT over joints.

    ``uv`` is (views, joints, 2), ``admitted`` a (views,) mask and ``matrices``
    (views, 3, 4). Returns (joints, 3) points and a (joints,) validity mask;
    joints that fail to triangulate are nan and invalid.
    """
    views = np.flatnonzero(admitted)
    n_joints = uv.shape[1]
    points = np.full((n_joints, 3), np.nan)
    valid = np.zeros(n_joints, dtype=bool)
    if views.size < 2:
        return points, valid
    p = matrices[views]
    obs = uv[views]
    rows_u = obs[:, :, 0, None] * p[:, None, 2, :] - p[:, None, 0, :]
    rows_v = obs[:, :, 1, None] * p[:, None, 2, :] - p[:, None, 1, :]
    a = np.concatenate([rows_u, rows_v], axis=0).transpose(1, 0, 2)
    finite = np.all(np.isfinite(a), axis=(1, 2))
    if not np.any(finite):
        return points, valid
    _, s, vt = np.linalg.svd(a[finite])
    h = vt[:, -1, :]
    ok = (np.abs(h[:, 3]) >= W_EPS) & (s[:, 2] > RANK_EPS * np.maximum(s[:, 0], 1.0))
    sub = np.full((h.shape[0], 3), np.nan)
    sub[ok] = h[ok, :3] / h[ok, 3:4]
    points[finite] = sub
    valid[np.flatnonzero(finite)[ok]] = True
    return points, valid
