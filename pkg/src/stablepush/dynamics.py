"""Stable-push feasibility: contact modes, motion wrench, per-pusher verdicts.

Frames and conventions
----------------------
The grasp plane is XZ with rotation angle theta about the perpendicular axis,
positive counter-clockwise (rotation matrix [[c, -s], [s, c]], planar cross
product ``r x f = r_x f_z - r_z f_x``).  A pose ``(x, z, theta)`` places the
object frame in the fixed gripper frame; the scene is authored at the
reference pose ``(0, 0, 0)`` where both frames coincide.

A candidate motion is a twist ``(vx, vz, omega)`` in the gripper frame whose
linear part is the velocity of the object-frame origin.  Quasi-dynamics: each
step starts from rest and lasts one step duration, so all force quantities
are impulses over ``dt`` and the momentum term is ``(m v_com, I omega)``.

Finger contact points are fixed in the gripper frame and respond passively.
Pusher contacts are fixed on the object, so their generalized friction cones
are constant in the object frame and are computed once per scene; every
feasibility query rotates the required motion wrench into the object frame
instead of rotating the cones.

Torques are premultiplied by ``1 / bounding_radius`` inside all cone
computations so force and torque components are numerically comparable;
certificates report physical (unscaled) wrenches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .cones import (
    WrenchCone,
    WrenchPolytope,
    conical_sum,
    containment_margin,
    minkowski_sum_point_polytope,
    minkowski_sum_polytopes,
    polytope_cone_intersects,
)
from .errors import SceneValidationError, UnknownPusherError
from .scene import Scene, discretize_patch, normal_impulse_share

ALL_SLIDE = "all_slide"
STICK_SLIDE = "stick_slide"

_REFERENCE_POSE = np.zeros(3)


def rotation(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def perp(v: np.ndarray) -> np.ndarray:
    """90-degree CCW rotation: velocity direction of a point under +omega."""
    return np.array([-v[1], v[0]])


def cross2(r, f) -> float:
    return float(r[0] * f[1] - r[1] * f[0])


def sliding_friction_impulse(pn: float, mu: float, slide_dir: np.ndarray) -> np.ndarray:
    """Maximum-dissipation friction impulse of a sliding contact.

    Magnitude exactly ``mu * pn``, direction opposing the slip.
    """
    return -mu * pn * np.asarray(slide_dir, dtype=float)


@dataclass
class ContactModes:
    """Per finger point: sticking flag and, when sliding, the unit slip direction."""

    sticking: np.ndarray  # (k,) bool
    slip_dirs: np.ndarray  # (k, 2); rows of sticking points are zero

    @property
    def n_sticking(self) -> int:
        return int(self.sticking.sum())


@dataclass
class FeasibilityCertificate:
    """Auditable outcome of one stable-push feasibility query.

    Wrenches are object-frame impulses (N s, N m s) about the object COM.
    When feasible, ``pusher_wrench + sticking_wrench == motion_wrench`` up to
    the stated residual, which restates the Newton-Euler balance.
    ``residual``/``margin`` are in normalized (unit-scaled) wrench coordinates.
    """

    feasible: bool
    case: str  # ALL_SLIDE | STICK_SLIDE
    pusher_id: str
    motion_wrench: np.ndarray
    pusher_wrench: np.ndarray | None = None
    sticking_wrench: np.ndarray | None = None
    residual: float = 0.0
    margin: float = 0.0
    n_sticking: int = 0

    def to_dict(self) -> dict:
        return {
            "feasible": bool(self.feasible),
            "case": self.case,
            "pusher": self.pusher_id,
            "motion_wrench": [float(v) for v in self.motion_wrench],
            "pusher_wrench": (None if self.pusher_wrench is None
                              else [float(v) for v in self.pusher_wrench]),
            "sticking_wrench": (None if self.sticking_wrench is None
                                else [float(v) for v in self.sticking_wrench]),
            "residual": float(self.residual),
            "margin": float(self.margin),
            "n_sticking": int(self.n_sticking),
        }


class SceneDynamics:
    """Feasibility engine bound to one immutable Scene.

    Pure with respect to the scene; all caches are built eagerly in the
    constructor, so concurrent queries from multiple planner instances are
    safe.
    """

    def __init__(self, scene: Scene):
        self.scene = scene
        dyn = scene.dynamics
        self.dt = dyn.dt
        self.tol = dyn.feas_tol
        self.torque_scale = scene.object.bounding_radius
        self.com = scene.object.com.copy()
        self.mass = scene.object.mass
        self.inertia = scene.object.inertia
        self.gravity = scene.gravity.copy()
        self.silhouette = scene.object.silhouette.copy()

        # Merged finger pair: gripper-frame points, doubled per-point impulse.
        self.finger_points = discretize_patch(scene.fingers.patch, scene.fingers.points)
        share = normal_impulse_share(scene.fingers.grip_force, dyn.dt, scene.fingers.points)
        self.finger_pn = np.full(len(self.finger_points), 2.0 * share)
        self.mu_finger = scene.fingers.mu

        self._pusher_order = [p.id for p in scene.pushers]
        self._cones = {p.id: self._build_pusher_cone(p) for p in scene.pushers}

    # -- construction ------------------------------------------------------

    def _pusher_points(self, pusher) -> np.ndarray:
        if pusher.kind == "point":
            return pusher.geometry[None, :]
        a, b = pusher.geometry
        if pusher.points == 1:
            return (0.5 * (a + b))[None, :]
        ts = np.linspace(0.0, 1.0, pusher.points)
        return a[None, :] + ts[:, None] * (b - a)[None, :]

    def _build_pusher_cone(self, pusher) -> WrenchCone:
        """Generalized friction cone of one pusher, object frame, torque-scaled.

        Vector sum over constituent point contacts of the planar friction
        cones spanned by the edge rays ``n +- mu t``; constant over the whole
        manipulation because pushers do not move in the object frame.
        """
        n = pusher.normal
        t = perp(n)
        gens = []
        for pt in self._pusher_points(pusher):
            r = pt - self.com
            edges = [n] if pusher.mu == 0.0 else [n + pusher.mu * t, n - pusher.mu * t]
            for d in edges:
                gens.append([d[0], d[1], cross2(r, d) / self.torque_scale])
        return conical_sum([WrenchCone(np.array(gens))])

    def pusher_cone(self, pusher_id: str) -> WrenchCone:
        try:
            return self._cones[pusher_id]
        except KeyError:
            raise UnknownPusherError(f"unknown pusher '{pusher_id}'; "
                                     f"scene has {self._pusher_order}") from None

    # -- kinematics --------------------------------------------------------

    def _eps_v(self, twist: np.ndarray) -> float:
        char = max(abs(twist[0]), abs(twist[1]), abs(twist[2]) * self.torque_scale)
        return self.scene.dynamics.stick_tol * char

    def classify_modes(self, twist, pose=None) -> ContactModes:
        """Sticking/sliding classification of the finger points for a twist.

        A point sticks iff the object material point currently under it moves
        slower than the sticking tolerance; otherwise it slides along the
        material point's velocity direction (fingers are passive and fixed).
        """
        twist = np.asarray(twist, dtype=float)
        pose = _REFERENCE_POSE if pose is None else np.asarray(pose, dtype=float)
        if not np.any(twist):
            raise ValueError("twist must be nonzero")
        origin = pose[:2]
        eps = self._eps_v(twist)
        k = len(self.finger_points)
        sticking = np.zeros(k, dtype=bool)
        dirs = np.zeros((k, 2))
        for i, p in enumerate(self.finger_points):
            slip = twist[:2] + twist[2] * perp(p - origin)
            speed = float(np.linalg.norm(slip))
            if speed < eps:
                sticking[i] = True
            else:
                dirs[i] = slip / speed
        return ContactModes(sticking=sticking, slip_dirs=dirs)

    def motion_wrench(self, twist, pose=None, sticking=None) -> np.ndarray:
        """Wrench the pusher side must supply, object frame, unscaled.

        ``momentum - gravity impulse - sliding finger friction``; sticking
        finger points contribute nothing here (their force set enters the
        stick-slide feasibility check separately).
        """
        twist = np.asarray(twist, dtype=float)
        pose = _REFERENCE_POSE if pose is None else np.asarray(pose, dtype=float)
        w_world, _ = self._world_balance(twist, pose, sticking)
        return self._to_object_frame(w_world, pose[2], scaled=False)

    def _world_balance(self, twist, pose, sticking_override=None):
        """Gripper-frame required wrench about the COM, plus the sticking mask."""
        origin = pose[:2]
        R = rotation(pose[2])
        com_w = origin + R @ self.com
        eps = self._eps_v(twist)
        if sticking_override is None:
            slide_wrench, sticking = _kernels.slide_wrench_and_modes(
                self.finger_points, self.finger_pn, self.mu_finger,
                com_w, origin, twist[0], twist[1], twist[2], eps)
        else:
            # Forced modes (e.g. the all-slide-only evaluation): excluded
            # points contribute nothing, others follow max dissipation.
            sticking = np.asarray(sticking_override, dtype=bool)
            slide_wrench = np.zeros(3)
            for i, p in enumerate(self.finger_points):
                if sticking[i]:
                    continue
                slip = twist[:2] + twist[2] * perp(p - origin)
                speed = float(np.linalg.norm(slip))
                if speed == 0.0:
                    continue
                f = sliding_friction_impulse(self.finger_pn[i], self.mu_finger, slip / speed)
                slide_wrench += np.array([f[0], f[1], cross2(p - com_w, f)])
        v_com = twist[:2] + twist[2] * perp(com_w - origin)
        momentum = np.array([self.mass * v_com[0], self.mass * v_com[1],
                             self.inertia * twist[2]])
        p_mg = np.array([self.mass * self.gravity[0] * self.dt,
                         self.mass * self.gravity[1] * self.dt, 0.0])
        return momentum - p_mg - slide_wrench, sticking

    def _to_object_frame(self, w_world, theta, scaled=True):
        R = rotation(theta)
        f = R.T @ w_world[:2]
        tau = w_world[2] / self.torque_scale if scaled else w_world[2]
        return np.array([f[0], f[1], tau])

    # -- feasibility -------------------------------------------------------

    def sticking_polytope(self, sticking_idx, pose=None) -> WrenchPolytope:
        """Wrench set the sticking finger points can apply (object frame, scaled).

        Per point: the friction disk of radius ``mu * pn`` (fixed normal
        impulse makes the set bounded) approximated by an inscribed polygon
        with the configured facet count, mapped through the point's moment
        arm; multiple points combine by Minkowski sum.
        """
        pose = _REFERENCE_POSE if pose is None else np.asarray(pose, dtype=float)
        R = rotation(pose[2])
        facets = self.scene.dynamics.facets
        angles = 2.0 * np.pi * np.arange(facets) / facets
        polytope = None
        for i in sticking_idx:
            p_obj = R.T @ (self.finger_points[i] - pose[:2])
            r = p_obj - self.com
            radius = self.mu_finger * self.finger_pn[i]
            if radius == 0.0:
                verts = np.zeros((1, 3))
            else:
                fx = radius * np.cos(angles)
                fz = radius * np.sin(angles)
                tau = (r[0] * fz - r[1] * fx) / self.torque_scale
                verts = np.column_stack([fx, fz, tau])
            piece = WrenchPolytope(verts)
            polytope = piece if polytope is None else minkowski_sum_polytopes(polytope, piece)
        if polytope is None:
            raise ValueError("sticking_polytope needs at least one sticking point")
        return polytope

    def check_stable_push(self, twist, pusher_id: str, pose=None,
                          mode: str | None = None) -> FeasibilityCertificate:
        """Decide whether a twist is a stable prehensile push for one pusher.

        All finger contacts sliding: the required motion wrench must lie
        strictly inside the pusher's generalized friction cone.  With sticking
        finger contacts: the motion wrench offset by the sticking-contact
        wrench set must intersect the cone.  ``mode=ALL_SLIDE`` forces the
        first evaluation regardless of the classification (sticking points
        then contribute nothing at all).
        """
        twist = np.asarray(twist, dtype=float)
        pose = _REFERENCE_POSE if pose is None else np.asarray(pose, dtype=float)
        if not np.any(twist):
            raise ValueError("twist must be nonzero")
        cone = self.pusher_cone(pusher_id)

        w_world, sticking = self._world_balance(twist, pose)
        n_stick = 0 if mode == ALL_SLIDE else int(sticking.sum())
        w_obj = self._to_object_frame(w_world, pose[2], scaled=False)
        w_scaled = w_obj * np.array([1.0, 1.0, 1.0 / self.torque_scale])

        if n_stick == 0:
            margin = containment_margin(cone, w_scaled, self.tol)
            if cone.is_full_dimensional:
                feasible = margin <= -self.tol
                residual = 0.0 if feasible else max(margin, 0.0)
            else:
                feasible = margin <= self.tol
                residual = margin
            return FeasibilityCertificate(
                feasible=bool(feasible), case=ALL_SLIDE, pusher_id=pusher_id,
                motion_wrench=w_obj,
                pusher_wrench=w_obj.copy() if feasible else None,
                sticking_wrench=np.zeros(3) if feasible else None,
                residual=float(residual), margin=float(margin), n_sticking=n_stick)

        sticking_idx = np.flatnonzero(sticking)
        disk = self.sticking_polytope(sticking_idx, pose)
        shifted = minkowski_sum_point_polytope(w_scaled, WrenchPolytope(-disk.vertices))
        feasible, witness, residual = polytope_cone_intersects(shifted, cone, self.tol)
        if feasible:
            pusher_w = witness * np.array([1.0, 1.0, self.torque_scale])
            stick_w = w_obj - pusher_w
        else:
            pusher_w = None
            stick_w = None
        margin = containment_margin(cone, w_scaled, self.tol)
        return FeasibilityCertificate(
            feasible=bool(feasible), case=STICK_SLIDE, pusher_id=pusher_id,
            motion_wrench=w_obj, pusher_wrench=pusher_w, sticking_wrench=stick_w,
            residual=residual, margin=float(margin), n_sticking=n_stick)

    def check_step(self, pose_from, pose_to, pusher_id: str) -> FeasibilityCertificate:
        """Feasibility of one unit step between poses (twist = delta / dt)."""
        return self.check_stable_push(self.step_twist(pose_from, pose_to),
                                      pusher_id, pose=pose_from)

    def step_twist(self, pose_from, pose_to) -> np.ndarray:
        pose_from = np.asarray(pose_from, dtype=float)
        pose_to = np.asarray(pose_to, dtype=float)
        d = pose_to - pose_from
        d[2] = (d[2] + np.pi) % (2.0 * np.pi) - np.pi
        return d / self.dt

    def first_feasible_pusher(self, twist, pose, preferred: str | None = None):
        """First pusher (preferred first, then scene order) with a feasible push."""
        order = list(self._pusher_order)
        if preferred is not None and preferred in order:
            order.remove(preferred)
            order.insert(0, preferred)
        for pid in order:
            cert = self.check_stable_push(twist, pid, pose=pose)
            if cert.feasible:
                return pid, cert
        return None

    # -- grasp predicate ----------------------------------------------------

    def grasp_maintained(self, pose) -> bool:
        """All finger discretization points remain inside the silhouette."""
        pose = np.asarray(pose, dtype=float)
        R = rotation(pose[2])
        pts_obj = (self.finger_points - pose[None, :2]) @ R
        return bool(_kernels.points_in_polygon(pts_obj, self.silhouette, 1e-9))


# ---------------------------------------------------------------------------
# module-level conveniences mirroring the operation map


def classify_modes(scene: Scene, twist, pose=None) -> ContactModes:
    return SceneDynamics(scene).classify_modes(twist, pose)


def motion_wrench(scene: Scene, twist, pose=None) -> np.ndarray:
    return SceneDynamics(scene).motion_wrench(twist, pose)


def pusher_generalized_cone(scene: Scene, pusher_id: str) -> WrenchCone:
    return SceneDynamics(scene).pusher_cone(pusher_id)


def check_stable_push(scene: Scene, twist, pusher_id: str, pose=None,
                      mode: str | None = None) -> FeasibilityCertificate:
    return SceneDynamics(scene).check_stable_push(twist, pusher_id, pose, mode)
