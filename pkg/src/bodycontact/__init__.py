"""Posture generation with contact points searched over convex body surfaces.

Contacts carry a per-iteration tangent-plane step, joint and contact updates
come from one sequential QP, and surface normals are smoothed across facet
edges so the search can cross them.
"""
from .geometry import ConvexBody, project_point, smoothed_normal
from .kinematics import KinematicModel, forward_kinematics
from .optimizer import Options, run, sqp_step
from .runlog import RunLog, emit_log, read_log
from .scene import build_problem, load_problem, load_scene, parse_scene, serialize

__version__ = "0.1.0"

__all__ = ["ConvexBody", "KinematicModel", "Options", "RunLog", "build_problem",
           "emit_log", "forward_kinematics", "load_problem", "load_scene", "parse_scene",
           "project_point", "read_log", "run", "serialize", "smoothed_normal", "sqp_step"]
