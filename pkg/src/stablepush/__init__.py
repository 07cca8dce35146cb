"""Planar in-hand regrasp planning with stable prehensile pushes.

A parallel-jaw gripper holds an object; external pushers nudge it to a new
grasp pose.  The package decides which candidate motions keep the pusher
sticking to the object (polyhedral wrench-cone feasibility) and chains
feasible unit pushes into a regrasp strategy with a transition-based RRT*
planner that minimizes pusher switch-overs.
"""

from ._kernels import BACKEND, NUMBA_ENABLED
from .cones import (
    WrenchCone,
    WrenchPolytope,
    cone_contains,
    conical_sum,
    face_normals,
    minkowski_sum_point_polytope,
    polytope_cone_intersects,
)
from .dynamics import (
    ALL_SLIDE,
    STICK_SLIDE,
    FeasibilityCertificate,
    SceneDynamics,
    check_stable_push,
)
from .errors import (
    DegenerateConeError,
    IterationBudgetExhausted,
    SceneParseError,
    SceneValidationError,
    StablePushError,
    UnknownPusherError,
)
from .planner import GraspPose, PushPlan, plan
from .scene import Scene, discretize_patch, load_scene, save_scene

__version__ = "0.1.0"

__all__ = [
    "ALL_SLIDE",
    "BACKEND",
    "DegenerateConeError",
    "FeasibilityCertificate",
    "GraspPose",
    "IterationBudgetExhausted",
    "NUMBA_ENABLED",
    "PushPlan",
    "STICK_SLIDE",
    "Scene",
    "SceneDynamics",
    "SceneParseError",
    "SceneValidationError",
    "StablePushError",
    "UnknownPusherError",
    "WrenchCone",
    "WrenchPolytope",
    "check_stable_push",
    "cone_contains",
    "conical_sum",
    "discretize_patch",
    "face_normals",
    "load_scene",
    "minkowski_sum_point_polytope",
    "plan",
    "polytope_cone_intersects",
    "save_scene",
    "__version__",
]
