"""Ground-truth skeleton frames and per-camera visibility labels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# COCO-17 order; (lateral, forward, height) offsets in meters from the floor root
SKELETON_TEMPLATE = np.array(
    [
        (0.00, 0.08, 1.62),  # nose
        (0.03, 0.06, 1.66),
        (-0.03, 0.06, 1.66),
        (0.07, 0.00, 1.63),
        (-0.07, 0.00, 1.63),
        (0.18, 0.00, 1.42),  # shoulders
        (-0.18, 0.00, 1.42),
        (0.22, 0.02, 1.12),
        (-0.22, 0.02, 1.12),
        (0.24, 0.05, 0.85),  # wrists
        (-0.24, 0.05, 0.85),
        (0.10, 0.00, 0.95),  # hips
        (-0.10, 0.00, 0.95),
        (0.10, 0.02, 0.52),
        (-0.10, 0.02, 0.52),
        (0.10, 0.00, 0.08),  # ankles
        (-0.10, 0.00, 0.08),
    ]
)
JITTER = 0.2
WALL_MARGIN_M = 0.5


@dataclass(frozen=True, eq=False)
class FrameBatch:
    poses: np.ndarray
    positive: np.ndarray

    @property
    def n_frames(self) -> int:
        return int(self.poses.shape[0])


def skeleton_template(joints: int) -> np.ndarray:
    if joints <= SKELETON_TEMPLATE.shape[0]:
        return SKELETON_TEMPLATE[:joints]
    base = SKELETON_TEMPLATE.shape[0]
    extra = [
        (SKELETON_TEMPLATE[k % base] + SKELETON_TEMPLATE[(k + 1) % base]) / 2.0
        for k in range(joints - base)
    ]
    return np.vstack([SKELETON_TEMPLATE, extra])


def random_poses(
    rng: np.random.Generator, n: int, joints: int, room: tuple[float, float, float]
) -> np.ndarray:
    """(n, joints, 3) skeletons at uniform positions with random yaw and articulation jitter."""
    x, y, z = room
    template = skeleton_template(joints)
    top = template[:, 2].max() * (1.0 + JITTER)
    scale = min(1.0, 0.9 * z / top)
    margin_x = min(WALL_MARGIN_M, x / 4)
    margin_y = min(WALL_MARGIN_M, y / 4)
    roots = np.column_stack(
        [
            rng.uniform(margin_x, x - margin_x, n),
            rng.uniform(margin_y, y - margin_y, n),
            np.zeros(n),
        ]
    )
    yaw = rng.uniform(0.0, 2 * np.pi, n)
    jitter = rng.uniform(1.0 - JITTER, 1.0 + JITTER, (n, joints, 3))
    local = template[None, :, :] * jitter * scale
    cos, sin = np.cos(yaw)[:, None], np.sin(yaw)[:, None]
    rotated = np.stack(
        [
            cos * local[..., 0] - sin * local[..., 1],
            sin * local[..., 0] + cos * local[..., 1],
            local[..., 2],
        ],
        axis=-1,
    )
    return roots[:, None, :] + rotated


def generate_frames(
    rng: np.random.Generator,
    n_frames: int,
    joints: int,
    room: tuple[float, float, float],
    n_devices: int,
    occlusion_prob: float = 0.2,
) -> FrameBatch:
    """Poses plus a (frames, devices) label: True when the person is visible to that camera."""
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    if not 0.0 <= occlusion_prob <= 1.0:
        raise ValueError("occlusion_prob must lie in [0, 1]")
    poses = random_poses(rng, n_frames, joints, room)
    positive = rng.random((n_frames, n_devices)) >= occlusion_prob
    return FrameBatch(poses=poses, positive=positive)
