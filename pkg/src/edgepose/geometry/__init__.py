"""Camera projection, DLT triangulation and MPJPE."""

from .camera import CameraProjection, load_rig, project, project_many, save_rig
from .pose import Pose3D, joint_errors, mpjpe
from .triangulation import Observation2D, build_dlt_matrix, solve_dlt, triangulate, triangulate_views

__all__ = [
    "CameraProjection",
    "Observation2D",
    "Pose3D",
    "build_dlt_matrix",
    "joint_errors",
    "load_rig",
    "mpjpe",
    "project",
    "project_many",
    "save_rig",
    "solve_dlt",
    "triangulate",
    "triangulate_views",
]
