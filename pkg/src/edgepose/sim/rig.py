"""Synthetic camera rigs: cameras on the ceiling line aimed at the room centre."""

from __future__ import annotations

import numpy as np

from ..geometry import CameraProjection

IMAGE_SIZE_PX = (1920, 1080)
# 90 degree horizontal field of view at full HD
FOCAL_PX = IMAGE_SIZE_PX[0] / 2.0


def rig_positions(n_devices: int, room: tuple[float, float, float]) -> np.ndarray:
    """(n, 3) camera centres at wall height.

    Up to four cameras take corners, opposite corners first; up to eight add
    the edge midpoints; larger rigs are spaced evenly along the perimeter.
    """
    if n_devices < 2:
        raise ValueError("a rig needs at least 2 cameras")
    x, y, z = room
    slots = [
        (0.0, 0.0),
        (x, y),
        (x, 0.0),
        (0.0, y),
        (x / 2, 0.0),
        (x / 2, y),
        (0.0, y / 2),
        (x, y / 2),
    ]
    if n_devices <= len(slots):
        xy = np.array(slots[:n_devices])
    else:
        perimeter = 2 * (x + y)
        s = np.arange(n_devices) * perimeter / n_devices
        xy = np.array([_perimeter_point(v, x, y) for v in s])
    return np.column_stack([xy, np.full(n_devices, z)])


def _perimeter_point(s: float, x: float, y: float) -> tuple[float, float]:
    if s < x:
        return s, 0.0
    s -= x
    if s < y:
        return x, s
    s -= y
    if s < x:
        return x - s, y
    return 0.0, y - (s - x)


def generate_rig(n_devices: int, room: tuple[float, float, float]) -> list[CameraProjection]:
    target = np.array(room, dtype=float) / 2.0
    principal = (IMAGE_SIZE_PX[0] / 2.0, IMAGE_SIZE_PX[1] / 2.0)
    return [
        CameraProjection.look_at(pos, target, FOCAL_PX, principal)
        for pos in rig_positions(n_devices, room)
    ]
