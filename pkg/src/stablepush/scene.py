"""Scene model: object, grasp, pushers and parameters, plus file ingestion.

Scene files are JSON with paper-facing units (lengths mm, masses g, forces N,
angles deg, gravity m/s^2); everything is converted to SI (m, kg, N, s, rad)
at the ingestion boundary and all computation downstream is SI.  Unknown keys
anywhere in the document are an error so misspelled parameters cannot be
silently ignored.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import SceneParseError, SceneValidationError

MM = 1e-3
BOUNDARY_TOL = 1e-6  # m; how close pusher geometry must sit to the silhouette


# ---------------------------------------------------------------------------
# domain types


@dataclass
class PatchGeometry:
    """Finger or pusher contact patch: circle, line segment or point."""

    kind: str  # "circle" | "line" | "point"
    center: np.ndarray | None = None  # (2,) m, circle/point
    radius: float = 0.0  # m, circle
    endpoints: np.ndarray | None = None  # (2, 2) m, line


@dataclass
class ObjectModel:
    silhouette: np.ndarray  # (n, 2) m, CCW simple polygon in the grasp plane
    mass: float  # kg
    com: np.ndarray  # (2,) m
    inertia: float  # kg m^2, about Y through the COM
    bounding_radius: float = field(init=False)

    def __post_init__(self):
        self.bounding_radius = float(
            np.max(np.linalg.norm(self.silhouette - self.com[None, :], axis=1))
        )


@dataclass
class FingerPair:
    """Coaxial parallel-jaw finger pair, represented by one shared patch.

    Both fingers squeeze along the out-of-plane axis with the same in-plane
    location, so their in-plane friction geometry is identical and the pair is
    merged into a single contact set with doubled normal impulse per point.
    """

    patch: PatchGeometry
    grip_force: float  # N, total normal force per finger
    mu: float
    points: int


@dataclass
class Pusher:
    id: str
    kind: str  # "point" | "line"
    geometry: np.ndarray  # (2,) point or (2, 2) line endpoints, object frame m
    mu: float
    points: int
    normal: np.ndarray | None = None  # (2,) inward contact normal, object frame


@dataclass
class PlannerParams:
    step_xz: float = 1.0 * MM
    step_theta: float = math.radians(2.0)
    rot_weight: float | None = None  # m/rad; default: half the bounding radius
    goal_tol_xz: float = 1.0 * MM
    goal_tol_theta: float = math.radians(2.0)
    dist_weight: float = 1.0
    switchover_weight: float | None = None  # m per switchover; default: diameter
    switchover_threshold: int = 4
    t_init: float = 1.0 * MM
    t_rate: float = 2.0
    n_fail_max: int = 20
    rewire_radius_steps: float = 5.0
    max_iters: int = 20000
    seed: int = 0
    goal_bias: float = 0.05
    sample_margin_xz: float = 10.0 * MM
    sample_margin_theta: float = math.radians(20.0)
    sample_box: np.ndarray | None = None  # (3, 2) [[xmin,xmax],[zmin,zmax],[tmin,tmax]]


@dataclass
class DynamicsParams:
    dt: float = 0.01  # s, quasi-dynamic step duration
    stick_tol: float = 1e-6  # fraction of the step's characteristic speed
    facets: int = 16  # polygon count for sticking-contact friction disks
    line_points: int = 3
    circle_points: int = 9
    feas_tol: float = 1e-9  # relative feasibility residual / margin tolerance


@dataclass
class Scene:
    object: ObjectModel
    fingers: FingerPair
    pushers: list[Pusher]
    gravity: np.ndarray  # (2,) m/s^2, in-plane component
    planner: PlannerParams
    dynamics: DynamicsParams
    name: str = ""
    notes: str = ""
    source_hash: str = ""  # sha256 of the scene file bytes, if loaded

    def pusher_ids(self) -> list[str]:
        return [p.id for p in self.pushers]


# ---------------------------------------------------------------------------
# polygon helpers


def polygon_signed_area(poly: np.ndarray) -> float:
    x, z = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(z, -1) - np.roll(x, -1) * z))


def polygon_centroid(poly: np.ndarray) -> np.ndarray:
    x, z = poly[:, 0], poly[:, 1]
    xn, zn = np.roll(x, -1), np.roll(z, -1)
    cross = x * zn - xn * z
    area = 0.5 * float(np.sum(cross))
    cx = float(np.sum((x + xn) * cross)) / (6.0 * area)
    cz = float(np.sum((z + zn) * cross)) / (6.0 * area)
    return np.array([cx, cz])


def polygon_inertia_per_mass(poly: np.ndarray) -> float:
    """Second polar moment per unit mass about the centroid (m^2)."""
    x, z = poly[:, 0], poly[:, 1]
    xn, zn = np.roll(x, -1), np.roll(z, -1)
    cross = x * zn - xn * z
    area = 0.5 * float(np.sum(cross))
    ix = float(np.sum(cross * (z * z + z * zn + zn * zn))) / 12.0
    iz = float(np.sum(cross * (x * x + x * xn + xn * xn))) / 12.0
    c = polygon_centroid(poly)
    return (ix + iz) / area - float(c @ c)


def polygon_is_simple(poly: np.ndarray) -> bool:
    """Non-adjacent edge pairs must not intersect."""
    n = len(poly)

    def seg(i):
        return poly[i], poly[(i + 1) % n]

    def intersects(p1, p2, p3, p4):
        d1 = np.cross(p4 - p3, p1 - p3)
        d2 = np.cross(p4 - p3, p2 - p3)
        d3 = np.cross(p2 - p1, p3 - p1)
        d4 = np.cross(p2 - p1, p4 - p1)
        return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))

    for i in range(n):
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or (i + 1) % n == j:
                continue
            if intersects(*seg(i), *seg(j)):
                return False
    return True


def point_to_segment_distance(p, a, b) -> float:
    ab = b - a
    denom = float(ab @ ab)
    t = 0.0 if denom == 0.0 else float(np.clip((p - a) @ ab / denom, 0.0, 1.0))
    return float(np.linalg.norm(a + t * ab - p))


# ---------------------------------------------------------------------------
# patch discretization


def discretize_patch(patch: PatchGeometry, count: int) -> np.ndarray:
    """Point-contact positions (k, 2) approximating a contact patch.

    * point: the single location.
    * line: ``count`` evenly spaced points, endpoints included for count >= 2.
    * circle: one mandatory center point plus ``count - 1`` points on a ring
      of radius 0.75 r.  The ring radius reproduces the spin friction torque
      of a uniform-pressure disk exactly: (8/9) * 0.75 r = (2/3) r.

    The center point matters: pivoting about the patch center must exhibit an
    exactly sticking contact, which only a point at the rotation center does.
    """
    if count < 1:
        raise SceneValidationError("patch discretization count must be >= 1")
    if patch.kind == "point":
        return patch.center[None, :].copy()
    if patch.kind == "line":
        a, b = patch.endpoints
        if count == 1:
            return (0.5 * (a + b))[None, :]
        ts = np.linspace(0.0, 1.0, count)
        return a[None, :] + ts[:, None] * (b - a)[None, :]
    if patch.kind == "circle":
        pts = [patch.center]
        ring = count - 1
        if ring:
            angles = 2.0 * np.pi * np.arange(ring) / ring
            r = 0.75 * patch.radius
            pts.extend(patch.center + r * np.array([np.cos(a), np.sin(a)]) for a in angles)
        return np.array(pts)
    raise SceneValidationError(f"unknown patch kind '{patch.kind}'")


def normal_impulse_share(grip_force: float, dt: float, count: int) -> float:
    """Uniform-pressure per-point normal impulse: grip_force * dt / count."""
    return grip_force * dt / count


# ---------------------------------------------------------------------------
# strict JSON schema

_TOP_KEYS = {"format_version", "name", "notes", "object", "fingers", "pushers",
             "gravity", "planner", "dynamics"}
_OBJECT_KEYS = {"silhouette_mm", "mass_g", "com_mm", "inertia_gmm2"}
_FINGER_KEYS = {"patch", "grip_force_n", "mu", "points"}
_PATCH_KEYS = {"shape", "center_mm", "radius_mm", "endpoints_mm"}
_PUSHER_KEYS = {"id", "shape", "location_mm", "endpoints_mm", "mu", "points"}
_PLANNER_KEYS = {"step_mm", "step_deg", "rot_weight_mm_per_rad", "goal_tol_mm",
                 "goal_tol_deg", "dist_weight", "switchover_weight_mm",
                 "switchover_threshold", "t_init_mm", "t_rate", "n_fail_max",
                 "rewire_radius_steps", "max_iters", "seed", "goal_bias",
                 "sample_margin_mm", "sample_margin_deg", "sample_box"}
_DYNAMICS_KEYS = {"dt_s", "stick_tol", "facets", "line_points", "circle_points",
                  "feas_tol"}


def _check_keys(mapping: dict, allowed: set, where: str):
    unknown = set(mapping) - allowed
    if unknown:
        raise SceneValidationError(
            f"unknown key(s) {sorted(unknown)} in {where}; allowed: {sorted(allowed)}"
        )


def _vec2(value, where: str) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if arr.shape != (2,):
        raise SceneValidationError(f"{where} must be a 2-vector")
    return arr


def _parse_patch(raw: dict, where: str) -> PatchGeometry:
    _check_keys(raw, _PATCH_KEYS, where)
    shape = raw.get("shape")
    if shape == "circle":
        if "radius_mm" not in raw or "center_mm" not in raw:
            raise SceneValidationError(f"{where}: circle patch needs center_mm and radius_mm")
        r = float(raw["radius_mm"]) * MM
        if r <= 0:
            raise SceneValidationError(f"{where}: circle radius must be positive")
        return PatchGeometry("circle", center=_vec2(raw["center_mm"], where) * MM, radius=r)
    if shape == "point":
        if "center_mm" not in raw:
            raise SceneValidationError(f"{where}: point patch needs center_mm")
        return PatchGeometry("point", center=_vec2(raw["center_mm"], where) * MM)
    if shape == "line":
        if "endpoints_mm" not in raw:
            raise SceneValidationError(f"{where}: line patch needs endpoints_mm")
        eps = np.asarray(raw["endpoints_mm"], dtype=float)
        if eps.shape != (2, 2):
            raise SceneValidationError(f"{where}: endpoints_mm must be a 2x2 array")
        return PatchGeometry("line", endpoints=eps * MM)
    raise SceneValidationError(f"{where}: patch shape must be circle, line or point")


def scene_from_dict(doc: dict, source_hash: str = "") -> Scene:
    """Build and validate a Scene from a parsed scene document."""
    if not isinstance(doc, dict):
        raise SceneParseError("scene document must be a JSON object")
    _check_keys(doc, _TOP_KEYS, "scene")
    for key in ("object", "fingers", "pushers"):
        if key not in doc:
            raise SceneValidationError(f"scene is missing required key '{key}'")

    raw_obj = doc["object"]
    _check_keys(raw_obj, _OBJECT_KEYS, "object")
    if "silhouette_mm" not in raw_obj or "mass_g" not in raw_obj:
        raise SceneValidationError("object needs silhouette_mm and mass_g")
    poly = np.asarray(raw_obj["silhouette_mm"], dtype=float)
    if poly.ndim != 2 or poly.shape[1] != 2 or poly.shape[0] < 3:
        raise SceneValidationError("silhouette_mm must be an (n>=3, 2) polygon")
    poly = poly * MM
    area = polygon_signed_area(poly)
    if area < 0:
        poly = poly[::-1].copy()
        area = -area
    if area <= 0:
        raise SceneValidationError("object polygon must have positive area")
    if not polygon_is_simple(poly):
        raise SceneValidationError("object polygon must be simple (non-self-intersecting)")
    mass = float(raw_obj["mass_g"]) * 1e-3
    if mass <= 0:
        raise SceneValidationError("object mass must be positive")
    com = (_vec2(raw_obj["com_mm"], "object.com_mm") * MM
           if "com_mm" in raw_obj else polygon_centroid(poly))
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    if not ((lo <= com).all() and (com <= hi).all()):
        raise SceneValidationError("object com must lie inside the silhouette bounding box")
    if "inertia_gmm2" in raw_obj and raw_obj["inertia_gmm2"] is not None:
        inertia = float(raw_obj["inertia_gmm2"]) * 1e-3 * MM * MM
    else:
        inertia = mass * polygon_inertia_per_mass(poly)
    if inertia <= 0:
        raise SceneValidationError("object inertia must be positive")
    obj = ObjectModel(silhouette=poly, mass=mass, com=com, inertia=inertia)

    raw_f = doc["fingers"]
    _check_keys(raw_f, _FINGER_KEYS, "fingers")
    for key in ("patch", "grip_force_n", "mu"):
        if key not in raw_f:
            raise SceneValidationError(f"fingers is missing required key '{key}'")
    patch = _parse_patch(raw_f["patch"], "fingers.patch")
    grip = float(raw_f["grip_force_n"])
    if grip <= 0:
        raise SceneValidationError("grip_force must be positive")
    mu_f = float(raw_f["mu"])
    if mu_f < 0:
        raise SceneValidationError("finger friction coefficient must be >= 0")

    dyn = _parse_dynamics(doc.get("dynamics", {}))
    default_points = {"circle": dyn.circle_points, "line": dyn.line_points, "point": 1}
    fpoints = int(raw_f.get("points", default_points[patch.kind]))
    if fpoints < 1:
        raise SceneValidationError("finger point count must be >= 1")
    fingers = FingerPair(patch=patch, grip_force=grip, mu=mu_f, points=fpoints)

    raw_pushers = doc["pushers"]
    if not isinstance(raw_pushers, list) or len(raw_pushers) == 0:
        raise SceneValidationError("scene needs at least one pusher")
    pushers = []
    seen_ids = set()
    for idx, raw_p in enumerate(raw_pushers):
        _check_keys(raw_p, _PUSHER_KEYS, f"pushers[{idx}]")
        pid = raw_p.get("id")
        if not pid or not isinstance(pid, str):
            raise SceneValidationError(f"pushers[{idx}] needs a string id")
        if pid in seen_ids:
            raise SceneValidationError(f"duplicate pusher id '{pid}'")
        seen_ids.add(pid)
        mu_p = float(raw_p.get("mu", -1.0))
        if mu_p < 0:
            raise SceneValidationError(f"pusher '{pid}' friction coefficient must be >= 0")
        shape = raw_p.get("shape")
        if shape == "point":
            if "location_mm" not in raw_p:
                raise SceneValidationError(f"pusher '{pid}': point pusher needs location_mm")
            geom = _vec2(raw_p["location_mm"], f"pusher '{pid}' location") * MM
            count = int(raw_p.get("points", 1))
        elif shape == "line":
            if "endpoints_mm" not in raw_p:
                raise SceneValidationError(f"pusher '{pid}': line pusher needs endpoints_mm")
            geom = np.asarray(raw_p["endpoints_mm"], dtype=float)
            if geom.shape != (2, 2):
                raise SceneValidationError(f"pusher '{pid}': endpoints_mm must be 2x2")
            geom = geom * MM
            count = int(raw_p.get("points", dyn.line_points))
        else:
            raise SceneValidationError(f"pusher '{pid}': shape must be point or line")
        if count < 1:
            raise SceneValidationError(f"pusher '{pid}': point count must be >= 1")
        normal = _pusher_normal(obj.silhouette, pid, shape, geom)
        pushers.append(Pusher(id=pid, kind=shape, geometry=geom, mu=mu_p,
                              points=count, normal=normal))

    gravity = (_vec2(doc["gravity"], "gravity") if "gravity" in doc
               else np.array([0.0, -9.81]))
    planner = _parse_planner(doc.get("planner", {}), obj)

    scene = Scene(object=obj, fingers=fingers, pushers=pushers, gravity=gravity,
                  planner=planner, dynamics=dyn,
                  name=str(doc.get("name", "")), notes=str(doc.get("notes", "")),
                  source_hash=source_hash)
    _validate_fingers_inside(scene)
    return scene


def _parse_dynamics(raw: dict) -> DynamicsParams:
    _check_keys(raw, _DYNAMICS_KEYS, "dynamics")
    p = DynamicsParams(
        dt=float(raw.get("dt_s", 0.01)),
        stick_tol=float(raw.get("stick_tol", 1e-6)),
        facets=int(raw.get("facets", 16)),
        line_points=int(raw.get("line_points", 3)),
        circle_points=int(raw.get("circle_points", 9)),
        feas_tol=float(raw.get("feas_tol", 1e-9)),
    )
    if p.dt <= 0:
        raise SceneValidationError("dynamics dt_s must be positive")
    if p.facets < 3:
        raise SceneValidationError("dynamics facets must be >= 3")
    if p.line_points < 1 or p.circle_points < 1:
        raise SceneValidationError("dynamics point counts must be >= 1")
    if p.stick_tol <= 0 or p.feas_tol <= 0:
        raise SceneValidationError("dynamics tolerances must be positive")
    return p


def _parse_planner(raw: dict, obj: ObjectModel) -> PlannerParams:
    _check_keys(raw, _PLANNER_KEYS, "planner")
    p = PlannerParams(
        step_xz=float(raw.get("step_mm", 1.0)) * MM,
        step_theta=math.radians(float(raw.get("step_deg", 2.0))),
        goal_tol_xz=float(raw.get("goal_tol_mm", 1.0)) * MM,
        goal_tol_theta=math.radians(float(raw.get("goal_tol_deg", 2.0))),
        dist_weight=float(raw.get("dist_weight", 1.0)),
        switchover_threshold=int(raw.get("switchover_threshold", 4)),
        t_init=float(raw.get("t_init_mm", 1.0)) * MM,
        t_rate=float(raw.get("t_rate", 2.0)),
        n_fail_max=int(raw.get("n_fail_max", 20)),
        rewire_radius_steps=float(raw.get("rewire_radius_steps", 5.0)),
        max_iters=int(raw.get("max_iters", 20000)),
        seed=int(raw.get("seed", 0)),
        goal_bias=float(raw.get("goal_bias", 0.05)),
        sample_margin_xz=float(raw.get("sample_margin_mm", 10.0)) * MM,
        sample_margin_theta=math.radians(float(raw.get("sample_margin_deg", 20.0))),
    )
    p.rot_weight = (float(raw["rot_weight_mm_per_rad"]) * MM
                    if "rot_weight_mm_per_rad" in raw else 0.5 * obj.bounding_radius)
    p.switchover_weight = (float(raw["switchover_weight_mm"]) * MM
                           if "switchover_weight_mm" in raw else 2.0 * obj.bounding_radius)
    if "sample_box" in raw:
        box = np.asarray(raw["sample_box"], dtype=float)
        if box.shape != (3, 2):
            raise SceneValidationError("planner.sample_box must be 3x2 "
                                       "[[xmin,xmax],[zmin,zmax],[deg_min,deg_max]] (mm/deg)")
        p.sample_box = np.array([box[0] * MM, box[1] * MM, np.radians(box[2])])
    positives = {
        "step_mm": p.step_xz, "step_deg": p.step_theta, "goal_tol_mm": p.goal_tol_xz,
        "goal_tol_deg": p.goal_tol_theta, "t_init_mm": p.t_init,
        "rot_weight": p.rot_weight, "switchover_weight": p.switchover_weight,
        "rewire_radius_steps": p.rewire_radius_steps, "dist_weight": p.dist_weight,
    }
    for name, value in positives.items():
        if value <= 0:
            raise SceneValidationError(f"planner {name} must be positive")
    if p.t_rate <= 1.0:
        raise SceneValidationError("planner t_rate must be > 1")
    if p.n_fail_max < 1 or p.max_iters < 1:
        raise SceneValidationError("planner n_fail_max and max_iters must be >= 1")
    if not (0.0 <= p.goal_bias < 1.0):
        raise SceneValidationError("planner goal_bias must be in [0, 1)")
    if p.switchover_threshold < 0:
        raise SceneValidationError("planner switchover_threshold must be >= 0")
    # A goal tolerance looser than one unit step makes freshly inserted
    # neighbors of the goal count as immediate hits; reject such configs.
    if p.goal_tol_xz > p.step_xz + 1e-12 or p.goal_tol_theta > p.step_theta + 1e-12:
        raise SceneValidationError("planner goal tolerance must not exceed the step size")
    return p


def _pusher_normal(poly: np.ndarray, pid: str, shape: str, geom: np.ndarray) -> np.ndarray:
    """Inward normal of the silhouette edge the pusher rests on."""
    pts = geom[None, :] if shape == "point" else geom
    n = len(poly)
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        if all(point_to_segment_distance(p, a, b) <= BOUNDARY_TOL for p in pts):
            edge = b - a
            length = np.linalg.norm(edge)
            if length == 0:
                continue
            # CCW polygon: outward normal is (dz, -dx); the pusher pushes inward.
            return np.array([-edge[1], edge[0]]) / length
    raise SceneValidationError(
        f"pusher '{pid}' does not lie on a single silhouette edge "
        f"(within {BOUNDARY_TOL * 1e3:g} mm)"
    )


def _validate_fingers_inside(scene: Scene):
    from . import _kernels

    pts = discretize_patch(scene.fingers.patch, scene.fingers.points)
    if not _kernels.points_in_polygon(pts, scene.object.silhouette, BOUNDARY_TOL):
        raise SceneValidationError(
            "finger patch discretization points must start inside the object silhouette"
        )


# ---------------------------------------------------------------------------
# load / save


def load_scene(path) -> Scene:
    """Load, validate and convert a scene file.

    Raises SceneParseError for malformed JSON, SceneValidationError naming the
    violated invariant otherwise.
    """
    path = Path(path)
    data = path.read_bytes()
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"{path}: not valid JSON: {exc}") from exc
    digest = hashlib.sha256(data).hexdigest()
    try:
        return scene_from_dict(doc, source_hash=digest)
    except SceneValidationError as exc:
        raise SceneValidationError(f"{path}: {exc}") from exc


def scene_to_dict(scene: Scene) -> dict:
    """Serialize back to the file format (paper-facing units)."""
    obj = {
        "silhouette_mm": (scene.object.silhouette / MM).tolist(),
        "mass_g": scene.object.mass * 1e3,
        "com_mm": (scene.object.com / MM).tolist(),
        "inertia_gmm2": scene.object.inertia / (1e-3 * MM * MM),
    }
    patch = scene.fingers.patch
    if patch.kind == "circle":
        raw_patch = {"shape": "circle", "center_mm": (patch.center / MM).tolist(),
                     "radius_mm": patch.radius / MM}
    elif patch.kind == "point":
        raw_patch = {"shape": "point", "center_mm": (patch.center / MM).tolist()}
    else:
        raw_patch = {"shape": "line", "endpoints_mm": (patch.endpoints / MM).tolist()}
    fingers = {"patch": raw_patch, "grip_force_n": scene.fingers.grip_force,
               "mu": scene.fingers.mu, "points": scene.fingers.points}
    pushers = []
    for p in scene.pushers:
        raw = {"id": p.id, "shape": p.kind, "mu": p.mu, "points": p.points}
        if p.kind == "point":
            raw["location_mm"] = (p.geometry / MM).tolist()
        else:
            raw["endpoints_mm"] = (p.geometry / MM).tolist()
        pushers.append(raw)
    pl, dy = scene.planner, scene.dynamics
    planner = {
        "step_mm": pl.step_xz / MM, "step_deg": math.degrees(pl.step_theta),
        "rot_weight_mm_per_rad": pl.rot_weight / MM,
        "goal_tol_mm": pl.goal_tol_xz / MM,
        "goal_tol_deg": math.degrees(pl.goal_tol_theta),
        "dist_weight": pl.dist_weight,
        "switchover_weight_mm": pl.switchover_weight / MM,
        "switchover_threshold": pl.switchover_threshold,
        "t_init_mm": pl.t_init / MM, "t_rate": pl.t_rate,
        "n_fail_max": pl.n_fail_max,
        "rewire_radius_steps": pl.rewire_radius_steps,
        "max_iters": pl.max_iters, "seed": pl.seed, "goal_bias": pl.goal_bias,
        "sample_margin_mm": pl.sample_margin_xz / MM,
        "sample_margin_deg": math.degrees(pl.sample_margin_theta),
    }
    if pl.sample_box is not None:
        planner["sample_box"] = [
            (pl.sample_box[0] / MM).tolist(),
            (pl.sample_box[1] / MM).tolist(),
            np.degrees(pl.sample_box[2]).tolist(),
        ]
    dynamics = {"dt_s": dy.dt, "stick_tol": dy.stick_tol, "facets": dy.facets,
                "line_points": dy.line_points, "circle_points": dy.circle_points,
                "feas_tol": dy.feas_tol}
    doc = {"format_version": 1, "object": obj, "fingers": fingers,
           "pushers": pushers, "gravity": scene.gravity.tolist(),
           "planner": planner, "dynamics": dynamics}
    if scene.name:
        doc["name"] = scene.name
    if scene.notes:
        doc["notes"] = scene.notes
    return doc


def save_scene(scene: Scene, path):
    Path(path).write_text(json.dumps(scene_to_dict(scene), indent=2, sort_keys=True) + "\n")
