"""3D poses and the mean per-joint position error."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Pose3D:
    joints: np.ndarray
    valid_mask: np.ndarray | None = None

    def __post_init__(self) -> None:
        joints = np.array(self.joints, dtype=float)
        if joints.ndim != 2 or joints.shape[1] != 3:
            raise ValueError(f"joints must be (J, 3), got {joints.shape}")
        mask = (
            np.isfinite(joints).all(axis=1)
            if self.valid_mask is None
            else np.array(self.valid_mask, dtype=bool)
        )
        if mask.shape != (joints.shape[0],):
            raise ValueError("valid_mask needs one flag per joint")
        joints.setflags(write=False)
        mask.setflags(write=False)
        object.__setattr__(self, "joints", joints)
        object.__setattr__(self, "valid_mask", mask)

    @property
    def n_joints(self) -> int:
        return int(self.joints.shape[0])

    @property
    def any_valid(self) -> bool:
        return bool(self.valid_mask.any())


def joint_errors(estimated: Pose3D, truth: Pose3D) -> np.ndarray:
    """Per-joint Euclidean distance over jointly valid joints."""
    if estimated.n_joints != truth.n_joints:
        raise ValueError(f"joint counts differ: {estimated.n_joints} vs {truth.n_joints}")
    both = estimated.valid_mask & truth.valid_mask
    return np.linalg.norm(estimated.joints[both] - truth.joints[both], axis=1)


def mpjpe(estimated: Pose3D, truth: Pose3D) -> float:
    """Mean per-joint position error in meters; nan when no joint is valid in both poses."""
    errors = joint_errors(estimated, truth)
    if errors.size == 0:
        return float("nan")
    return float(errors.mean())
