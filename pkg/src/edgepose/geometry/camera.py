"""Pinhole projection matrices and camera-rig files."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from ..errors import DegenerateGeometryError

RIG_COLUMNS = ["camera", "row", "c0", "c1", "c2", "c3"]
W_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class CameraProjection:
    """3x4 matrix mapping homogeneous world points (meters) to pixels."""

    p: np.ndarray

    def __post_init__(self) -> None:
        mat = np.array(self.p, dtype=float)
        if mat.shape != (3, 4):
            raise ValueError(f"projection matrix must be 3x4, got {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ValueError("projection matrix has non-finite entries")
        if np.linalg.matrix_rank(mat) != 3:
            raise DegenerateGeometryError("projection matrix must have rank 3")
        mat.setflags(write=False)
        object.__setattr__(self, "p", mat)

    @classmethod
    def look_at(
        cls,
        position: Sequence[float],
        target: Sequence[float],
        focal_px: float,
        principal_point: tuple[float, float],
        up: Sequence[float] = (0.0, 0.0, 1.0),
    ) -> CameraProjection:
        """K [R | -R c] for a camera at ``position`` whose optical axis passes through ``target``."""
        c = np.asarray(position, dtype=float)
        forward = np.asarray(target, dtype=float) - c
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, np.asarray(up, dtype=float))
        if np.linalg.norm(right) < 1e-9:
            raise DegenerateGeometryError("look-at direction is parallel to the up vector")
        right /= np.linalg.norm(right)
        down = np.cross(forward, right)
        rot = np.vstack([right, down, forward])
        k = np.array(
            [[focal_px, 0.0, principal_point[0]], [0.0, focal_px, principal_point[1]], [0.0, 0.0, 1.0]]
        )
        return cls(k @ np.hstack([rot, (-rot @ c)[:, None]]))

    def center(self) -> np.ndarray:
        """Camera centre: the right null vector of P, dehomogenised."""
        _, _, vt = np.linalg.svd(self.p)
        h = vt[-1]
        return h[:3] / h[3]

    def depth(self, point: Sequence[float]) -> float:
        return float(self.p[2] @ np.append(np.asarray(point, dtype=float), 1.0))


def project(camera: CameraProjection, point: Sequence[float] | np.ndarray) -> tuple[float, float]:
    x = np.append(np.asarray(point, dtype=float), 1.0)
    u, v, w = camera.p @ x
    if abs(w) < W_EPS:
        raise DegenerateGeometryError("point lies on the camera's principal plane")
    return float(u / w), float(v / w)


def project_many(camera: CameraProjection, points: np.ndarray) -> np.ndarray:
    """Project an (..., 3) array to (..., 2) pixels; degenerate points become nan."""
    pts = np.asarray(points, dtype=float)
    homo = np.concatenate([pts, np.ones(pts.shape[:-1] + (1,))], axis=-1)
    img = homo @ camera.p.T
    w = img[..., 2:3]
    with np.errstate(divide="ignore", invalid="ignore"):
        uv = img[..., :2] / w
    uv[np.abs(w[..., 0]) < W_EPS] = np.nan
    return uv


def save_rig(path: str | Path, cameras: Sequence[CameraProjection]) -> Path:
    rows = [
        {"camera": ci, "row": ri, **{f"c{k}": float(cam.p[ri, k]) for k in range(4)}}
        for ci, cam in enumerate(cameras)
        for ri in range(3)
    ]
    target = Path(path)
    pd.DataFrame(rows, columns=RIG_COLUMNS).to_csv(target, index=False, float_format="%.17g")
    return target


def load_rig(path: str | Path) -> list[CameraProjection]:
    frame = pd.read_csv(path)
    if list(frame.columns) != RIG_COLUMNS:
        raise ValueError(f"rig file header must be {','.join(RIG_COLUMNS)}")
    cameras = []
    for cam_id, group in frame.sort_values(["camera", "row"]).groupby("camera", sort=True):
        if list(group["row"]) != [0, 1, 2]:
            raise ValueError(f"camera {cam_id} needs rows 0, 1 and 2")
        cameras.append(CameraProjection(group[["c0", "c1", "c2", "c3"]].to_numpy(dtype=float)))
    return cameras
