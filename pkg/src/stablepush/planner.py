"""Long-horizon regrasp planner: T-RRT* over grasp poses with switch-over cost.

The configuration is the object pose ``(x, z, theta)`` in the fixed gripper
frame.  A tree of poses reachable by stable prehensile pushes grows by unit
steps toward random samples; a temperature-controlled transition test keeps
exploration loosely goal-directed, and RRT*-style edge optimization plus
rewiring drive the number of pusher switch-overs down.

Node cost is ``w_d * distance(pose, goal) + w_s * switchovers``; since the
distance term is fixed per pose, choosing parents and rewiring effectively
minimize switch-overs along root paths.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .dynamics import FeasibilityCertificate, SceneDynamics
from .errors import IterationBudgetExhausted
from .scene import MM, Scene

TWO_PI = 2.0 * math.pi


def wrap_angle(theta: float) -> float:
    return (theta + math.pi) % TWO_PI - math.pi


@dataclass(frozen=True)
class GraspPose:
    """Object pose in the gripper frame (SI: m, m, rad; theta wrapped)."""

    x: float
    z: float
    theta: float

    def __post_init__(self):
        object.__setattr__(self, "theta", wrap_angle(self.theta))

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.z, self.theta])

    @staticmethod
    def from_array(arr) -> "GraspPose":
        return GraspPose(float(arr[0]), float(arr[1]), float(arr[2]))

    @staticmethod
    def from_mm_deg(x_mm: float, z_mm: float, theta_deg: float) -> "GraspPose":
        return GraspPose(x_mm * MM, z_mm * MM, math.radians(theta_deg))

    def to_mm_deg(self) -> list[float]:
        return [self.x / MM, self.z / MM, math.degrees(self.theta)]


def distance(a, b, rot_weight: float) -> float:
    """Weighted SE(2) metric: sqrt(dx^2 + dz^2 + (L_rot * dtheta)^2)."""
    a = a.as_array() if isinstance(a, GraspPose) else np.asarray(a, dtype=float)
    b = b.as_array() if isinstance(b, GraspPose) else np.asarray(b, dtype=float)
    dt = wrap_angle(b[2] - a[2]) * rot_weight
    return math.sqrt((b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2 + dt * dt)


@dataclass
class PlanStep:
    pose_from: np.ndarray
    pose_to: np.ndarray
    pusher_id: str
    certificate: FeasibilityCertificate


@dataclass
class PushPlan:
    """Ordered stable-push segments from the initial to the goal grasp."""

    q_init: GraspPose
    q_goal: GraspPose
    steps: list[PlanStep]
    switchovers: int
    final_error: np.ndarray  # (dx m, dz m, dtheta rad) at the last waypoint
    meets_threshold: bool
    iterations: int
    tree_size: int
    seed: int
    improvement_trace: list[tuple[int, int]] = field(default_factory=list)
    scene_hash: str = ""
    scene_name: str = ""

    @property
    def segments(self) -> list[tuple[str, list[np.ndarray]]]:
        """Consecutive same-pusher runs as (pusher id, waypoint poses)."""
        segs: list[tuple[str, list[np.ndarray]]] = []
        for step in self.steps:
            if segs and segs[-1][0] == step.pusher_id:
                segs[-1][1].append(step.pose_to)
            else:
                segs.append((step.pusher_id, [step.pose_from, step.pose_to]))
        return segs

    @property
    def waypoints(self) -> list[np.ndarray]:
        pts = [self.q_init.as_array()]
        pts.extend(step.pose_to for step in self.steps)
        return pts

    def to_dict(self) -> dict:
        def pose_mm_deg(p):
            return [float(p[0] / MM), float(p[1] / MM), float(math.degrees(p[2]))]

        return {
            "format_version": 1,
            "scene_hash": self.scene_hash,
            "scene_name": self.scene_name,
            "seed": int(self.seed),
            "q_init": self.q_init.to_mm_deg(),
            "q_goal": self.q_goal.to_mm_deg(),
            "steps": [
                {
                    "to": pose_mm_deg(s.pose_to),
                    "pusher": s.pusher_id,
                    "certificate": s.certificate.to_dict(),
                }
                for s in self.steps
            ],
            "switchovers": int(self.switchovers),
            "final_error_mm_deg": [
                float(self.final_error[0] / MM),
                float(self.final_error[1] / MM),
                float(math.degrees(self.final_error[2])),
            ],
            "meets_threshold": bool(self.meets_threshold),
            "iterations": int(self.iterations),
            "tree_size": int(self.tree_size),
            "improvement_trace": [[int(i), int(s)] for i, s in self.improvement_trace],
        }


class _Tree:
    """Flat-array RRT tree with parent/child bookkeeping."""

    def __init__(self, root_pose: np.ndarray, capacity: int = 1024):
        self.poses = np.zeros((capacity, 3))
        self.parent = np.full(capacity, -1, dtype=np.int64)
        self.switchovers = np.zeros(capacity, dtype=np.int64)
        self.incoming: list[str | None] = [None] * capacity
        self.certs: list[FeasibilityCertificate | None] = [None] * capacity
        self.children: list[list[int]] = [[] for _ in range(capacity)]
        self.size = 1
        self.poses[0] = root_pose

    def _grow(self):
        cap = len(self.parent)
        new_cap = cap * 2
        self.poses = np.vstack([self.poses, np.zeros((cap, 3))])
        self.parent = np.concatenate([self.parent, np.full(cap, -1, dtype=np.int64)])
        self.switchovers = np.concatenate([self.switchovers, np.zeros(cap, dtype=np.int64)])
        self.incoming.extend([None] * cap)
        self.certs.extend([None] * cap)
        self.children.extend([[] for _ in range(cap)])

    def insert(self, pose, parent: int, pusher: str, cert) -> int:
        if self.size == len(self.parent):
            self._grow()
        idx = self.size
        self.size += 1
        self.poses[idx] = pose
        self.parent[idx] = parent
        self.incoming[idx] = pusher
        self.certs[idx] = cert
        self.children[parent].append(idx)
        self.switchovers[idx] = self.switchovers[parent] + self._edge_switch(parent, pusher)
        return idx

    def _edge_switch(self, parent: int, pusher: str) -> int:
        prev = self.incoming[parent]
        return int(prev is not None and prev != pusher)

    def reparent(self, idx: int, new_parent: int, pusher: str, cert):
        old = self.parent[idx]
        self.children[old].remove(idx)
        self.parent[idx] = new_parent
        self.incoming[idx] = pusher
        self.certs[idx] = cert
        self.children[new_parent].append(idx)
        # Recompute switch-over counts down the affected subtree.
        stack = [idx]
        while stack:
            n = stack.pop()
            p = self.parent[n]
            self.switchovers[n] = self.switchovers[p] + self._edge_switch(p, self.incoming[n])
            stack.extend(self.children[n])

    def is_ancestor(self, candidate: int, node: int) -> bool:
        while node != -1:
            if node == candidate:
                return True
            node = self.parent[node]
        return False

    def root_path(self, idx: int) -> list[int]:
        path = []
        while idx != -1:
            path.append(idx)
            idx = self.parent[idx]
        return path[::-1]


class _TransitionState:
    """Temperature machinery of the transition test."""

    def __init__(self, t_init: float, rate: float, n_fail_max: int):
        self.temperature = t_init
        self.rate = rate
        self.n_fail_max = n_fail_max
        self.n_fail = 0


def transition_test(c_parent: float, c_new: float, state: _TransitionState,
                    rng: np.random.Generator) -> bool:
    """Accept cost-decreasing moves always, uphill moves stochastically.

    Uphill moves pass with probability ``exp(-dc / T)``; the temperature
    cools after an uphill acceptance and heats after ``n_fail_max``
    consecutive rejections, which keeps exploration moving when the planner
    is boxed in.
    """
    dc = c_new - c_parent
    if dc <= 0.0:
        return True
    if rng.random() < math.exp(-dc / state.temperature):
        state.temperature /= state.rate
        state.n_fail = 0
        return True
    state.n_fail += 1
    if state.n_fail >= state.n_fail_max:
        state.temperature *= state.rate
        state.n_fail = 0
    return False


class Planner:
    """One single-threaded planning instance over a shared immutable scene."""

    def __init__(self, scene: Scene, engine: SceneDynamics | None = None):
        self.scene = scene
        self.engine = engine or SceneDynamics(scene)
        self.params = scene.planner

    # -- small helpers -------------------------------------------------------

    def _step_toward(self, frm: np.ndarray, to: np.ndarray) -> np.ndarray:
        """One per-axis-clamped unit step from ``frm`` toward ``to``.

        Axes within one step adopt the target coordinate bit-exactly; clamped
        axes are re-anchored to the lattice of the initial pose so that every
        reachable cell has a single canonical float representation (pose
        deduplication relies on this).
        """
        p = self.params
        steps = (p.step_xz, p.step_xz, p.step_theta)
        out = np.empty(3)
        for a in range(3):
            d = to[a] - frm[a]
            if a == 2:
                d = wrap_angle(d)
            if abs(d) <= steps[a] + 1e-15:
                out[a] = to[a]
            else:
                sign = 1.0 if d > 0 else -1.0
                k = round((frm[a] - self._anchor[a]) / steps[a])
                cand = self._anchor[a] + (k + sign) * steps[a]
                if abs(cand - frm[a]) <= steps[a] + 1e-15:
                    out[a] = cand
                else:
                    # frm sits off-lattice (goal coordinate); take a plain step.
                    out[a] = frm[a] + sign * steps[a]
        out[2] = wrap_angle(out[2])
        return out

    def _within_one_step(self, frm, to) -> bool:
        p = self.params
        eps = 1e-12
        return (abs(to[0] - frm[0]) <= p.step_xz + eps
                and abs(to[1] - frm[1]) <= p.step_xz + eps
                and abs(wrap_angle(to[2] - frm[2])) <= p.step_theta + eps)

    def _in_goal_region(self, pose, goal) -> bool:
        p = self.params
        return (abs(pose[0] - goal[0]) <= p.goal_tol_xz
                and abs(pose[1] - goal[1]) <= p.goal_tol_xz
                and abs(wrap_angle(pose[2] - goal[2])) <= p.goal_tol_theta)

    def _node_cost(self, tree: _Tree, idx: int, goal) -> float:
        p = self.params
        return (p.dist_weight * distance(tree.poses[idx], goal, p.rot_weight)
                + p.switchover_weight * tree.switchovers[idx])

    def _sample_box(self, q_init, q_goal) -> np.ndarray:
        p = self.params
        if p.sample_box is not None:
            return p.sample_box
        lo = np.minimum(q_init, q_goal)
        hi = np.maximum(q_init, q_goal)
        margins = np.array([p.sample_margin_xz, p.sample_margin_xz, p.sample_margin_theta])
        return np.column_stack([lo - margins, hi + margins])

    def _neighbors(self, tree: _Tree, pose, radius: float) -> np.ndarray:
        d2 = _kernels.metric_sq(tree.poses[: tree.size], pose[0], pose[1], pose[2],
                                self.params.rot_weight)
        return np.flatnonzero(d2 <= radius * radius)

    def _edge_pusher(self, tree: _Tree, parent_idx: int, q_new) -> tuple[str, object] | None:
        """First feasible pusher for parent -> q_new, preferring no switch."""
        twist = self.engine.step_twist(tree.poses[parent_idx], q_new)
        return self.engine.first_feasible_pusher(twist, tree.poses[parent_idx],
                                                 preferred=tree.incoming[parent_idx])

    def _steer_chain(self, frm: np.ndarray, to: np.ndarray) -> list[np.ndarray] | None:
        """Unit-step pose chain from ``frm`` to exactly ``to`` (``frm`` excluded).

        None when ``to`` is farther than the rewire reach.
        """
        poses: list[np.ndarray] = []
        cur = frm.copy()
        for _ in range(self._max_chain):
            nxt = self._step_toward(cur.copy(), to)
            if np.allclose(nxt, cur, atol=1e-15):
                break
            poses.append(nxt.copy())
            cur = nxt
        if not poses or not np.allclose(cur, to, atol=1e-12):
            return None
        return poses

    def _check_cached(self, pose_from: np.ndarray, pose_to: np.ndarray, pusher: str):
        """Memoized step feasibility; checks are pure in (poses, pusher)."""
        key = (pose_from.tobytes(), pose_to.tobytes(), pusher)
        cert = self._cert_cache.get(key)
        if cert is None:
            cert = self.engine.check_step(pose_from, pose_to, pusher)
            self._cert_cache[key] = cert
        return cert

    def _connect(self, tree: _Tree, parent_idx: int, target: np.ndarray):
        """Single-pusher unit-step connection parent -> target.

        Returns ``(pusher, poses, certs)`` for the cheapest pusher (the
        parent's incoming pusher first, then scene order) whose chain is
        grasp-maintained and stable-push feasible throughout, else None.
        """
        poses = self._steer_chain(tree.poses[parent_idx], target)
        if poses is None:
            return None
        for pose in poses:
            if not self.engine.grasp_maintained(pose):
                return None
        order = list(self.engine._pusher_order)
        preferred = tree.incoming[parent_idx]
        if preferred is not None and preferred in order:
            order.remove(preferred)
            order.insert(0, preferred)
        for pusher in order:
            certs = []
            prev = tree.poses[parent_idx]
            ok = True
            for pose in poses:
                cert = self._check_cached(prev, pose, pusher)
                if not cert.feasible:
                    ok = False
                    break
                certs.append(cert)
                prev = pose
            if ok:
                return pusher, poses, certs
        return None

    def _insert_chain(self, tree: _Tree, parent_idx: int, pusher: str,
                      poses, certs, goal, goal_nodes: list[int]) -> int:
        idx = parent_idx
        for pose, cert in zip(poses, certs):
            idx = tree.insert(pose, idx, pusher, cert)
            if self._in_goal_region(pose, goal):
                goal_nodes.append(idx)
        return idx

    # -- Algorithm 1 ---------------------------------------------------------

    def plan(self, q_init: GraspPose, q_goal: GraspPose, seed: int | None = None,
             max_time_s: float | None = None) -> PushPlan:
        """Grow the tree until a goal-region node meets the switch-over
        threshold, the iteration budget runs out, or the optional wall-clock
        budget expires.

        Deterministic for a fixed seed (modulo an expiring time budget).
        Raises IterationBudgetExhausted when no goal-region node exists at
        all; otherwise the best plan found is returned, flagged with
        ``meets_threshold``.
        """
        p = self.params
        engine = self.engine
        seed = p.seed if seed is None else int(seed)
        rng = np.random.default_rng(seed)
        init = q_init.as_array()
        goal = q_goal.as_array()
        if not engine.grasp_maintained(init):
            raise ValueError("q_init violates the grasp-maintained predicate")

        if self._in_goal_region(init, goal):
            return PushPlan(q_init=q_init, q_goal=q_goal, steps=[], switchovers=0,
                            final_error=self._pose_error(init, goal),
                            meets_threshold=True, iterations=0, tree_size=1,
                            seed=seed, improvement_trace=[(0, 0)],
                            scene_hash=self.scene.source_hash,
                            scene_name=self.scene.name)

        tree = _Tree(init)
        trans = _TransitionState(p.t_init, p.t_rate, p.n_fail_max)
        box = self._sample_box(init, goal)
        step_metric = math.sqrt(2.0 * p.step_xz ** 2 + (p.rot_weight * p.step_theta) ** 2)
        radius = p.rewire_radius_steps * step_metric
        self._max_chain = int(math.ceil(p.rewire_radius_steps)) + 2
        self._cert_cache: dict = {}
        goal_nodes: list[int] = []
        trace: list[tuple[int, int]] = []
        best_sw: int | None = None
        t_start = time.perf_counter()

        it = 0
        for it in range(1, p.max_iters + 1):
            if max_time_s is not None and it % 256 == 0:
                if time.perf_counter() - t_start > max_time_s:
                    break
            if rng.random() < p.goal_bias:
                q_rand = goal.copy()
            else:
                q_rand = box[:, 0] + rng.random(3) * (box[:, 1] - box[:, 0])
                # Snap to the unit-step lattice anchored at the initial pose:
                # per-axis stepping only ever lands on this lattice (plus the
                # goal), and exact-axis samples are what keep sticking-mode
                # rotations reachable.
                steps = np.array([p.step_xz, p.step_xz, p.step_theta])
                q_rand = init + np.round((q_rand - init) / steps) * steps
                q_rand[2] = wrap_angle(q_rand[2])
            d2 = _kernels.metric_sq(tree.poses[: tree.size], q_rand[0], q_rand[1],
                                    q_rand[2], p.rot_weight)
            parent = int(np.argmin(d2))

            while True:
                q_new = self._step_toward(tree.poses[parent].copy(), q_rand)
                if np.allclose(q_new, tree.poses[parent], atol=1e-15):
                    break
                c_parent = distance(tree.poses[parent], goal, p.rot_weight)
                c_new = distance(q_new, goal, p.rot_weight)
                if not transition_test(c_parent, c_new, trans, rng):
                    break
                if not engine.grasp_maintained(q_new):
                    break
                found = self._edge_pusher(tree, parent, q_new)
                if found is None:
                    break
                pusher, cert = found
                idx = self._optim_edge(tree, q_new, parent, pusher, cert, goal,
                                       radius, goal_nodes)
                self._rewire(tree, idx, goal, radius, goal_nodes)
                parent = idx
                if np.allclose(q_new, q_rand, atol=1e-15):
                    break

            if goal_nodes:
                current = min(int(tree.switchovers[i]) for i in goal_nodes)
                if best_sw is None or current < best_sw:
                    best_sw = current
                    trace.append((it, best_sw))
                if best_sw <= p.switchover_threshold:
                    break

        if not goal_nodes:
            d2 = _kernels.metric_sq(tree.poses[: tree.size], goal[0], goal[1],
                                    goal[2], p.rot_weight)
            raise IterationBudgetExhausted(
                f"no plan within {it} iterations (tree size {tree.size})",
                diagnostics={
                    "iterations": it,
                    "tree_size": int(tree.size),
                    "closest_distance_mm": float(math.sqrt(d2.min()) / MM),
                })

        best = min(goal_nodes,
                   key=lambda i: (int(tree.switchovers[i]),
                                  distance(tree.poses[i], goal, p.rot_weight), i))
        steps = self._extract(tree, best)
        final_pose = tree.poses[best]
        sw = int(tree.switchovers[best])
        return PushPlan(
            q_init=q_init, q_goal=q_goal, steps=steps, switchovers=sw,
            final_error=self._pose_error(final_pose, goal),
            meets_threshold=sw <= p.switchover_threshold,
            iterations=it, tree_size=int(tree.size), seed=seed,
            improvement_trace=trace, scene_hash=self.scene.source_hash,
            scene_name=self.scene.name)

    def _pose_error(self, pose, goal) -> np.ndarray:
        return np.array([goal[0] - pose[0], goal[1] - pose[1],
                         wrap_angle(goal[2] - pose[2])])

    def _optim_edge(self, tree: _Tree, q_new, parent: int, pusher: str, cert,
                    goal, radius: float, goal_nodes: list[int]) -> int:
        """Insert q_new with the in-radius parent minimizing its node cost.

        The distance term of the node cost is the same for every candidate
        parent, so the comparison reduces to switch-over counts; ties break
        by insertion order.  Farther parents connect through a straight
        single-pusher chain of unit steps.  Returns the new node's index.
        """
        best_key = (int(tree.switchovers[parent]) + tree._edge_switch(parent, pusher),
                    parent)
        best = None  # None = direct extension edge
        for n in self._neighbors(tree, q_new, radius):
            n = int(n)
            if n == parent:
                continue
            # Only strict cost improvements justify a connection attempt; a
            # tie keeps the direct extension edge.
            if int(tree.switchovers[n]) >= best_key[0]:
                continue
            if np.allclose(tree.poses[n], q_new, atol=1e-15):
                continue
            conn = self._connect(tree, n, q_new)
            if conn is None:
                continue
            cand_pusher, poses, certs = conn
            key = (int(tree.switchovers[n]) + tree._edge_switch(n, cand_pusher), n)
            if key < best_key:
                best = (n, cand_pusher, poses, certs)
                best_key = key
        if best is None:
            idx = tree.insert(q_new, parent, pusher, cert)
            if self._in_goal_region(q_new, goal):
                goal_nodes.append(idx)
            return idx
        n, cand_pusher, poses, certs = best
        return self._insert_chain(tree, n, cand_pusher, poses, certs, goal, goal_nodes)

    def _rewire(self, tree: _Tree, new_idx: int, goal, radius: float,
                goal_nodes: list[int]):
        """Re-route in-radius nodes through the new node when that strictly
        lowers their cost; switch-over counts propagate to descendants."""
        q_new = tree.poses[new_idx]
        for n in self._neighbors(tree, q_new, radius):
            n = int(n)
            if n == new_idx or n == 0:
                continue
            if tree.is_ancestor(n, new_idx):
                continue
            if np.allclose(tree.poses[n], q_new, atol=1e-15):
                continue
            # Strict improvement is impossible even with a switch-free chain.
            base = int(tree.switchovers[new_idx])
            if base >= tree.switchovers[n]:
                continue
            conn = self._connect(tree, new_idx, tree.poses[n].copy())
            if conn is None:
                continue
            pusher, poses, certs = conn
            new_sw = base + tree._edge_switch(new_idx, pusher)
            if new_sw >= tree.switchovers[n]:
                continue
            parent = self._insert_chain(tree, new_idx, pusher, poses[:-1], certs[:-1],
                                        goal, goal_nodes)
            tree.reparent(n, parent, pusher, certs[-1])

    def _extract(self, tree: _Tree, idx: int) -> list[PlanStep]:
        """Root-to-goal steps; every stored certificate is re-verified."""
        path = tree.root_path(idx)
        steps = []
        for a, b in zip(path[:-1], path[1:]):
            pusher = tree.incoming[b]
            recheck = self.engine.check_step(tree.poses[a], tree.poses[b], pusher)
            stored = tree.certs[b]
            if not recheck.feasible or recheck.feasible != stored.feasible:
                raise RuntimeError(
                    f"stored certificate failed re-verification on edge {a}->{b}")
            steps.append(PlanStep(pose_from=tree.poses[a].copy(),
                                  pose_to=tree.poses[b].copy(),
                                  pusher_id=pusher, certificate=stored))
        return steps


def plan(scene: Scene, q_init: GraspPose, q_goal: GraspPose,
         seed: int | None = None, max_time_s: float | None = None) -> PushPlan:
    """Convenience wrapper: one-shot planning over a scene."""
    return Planner(scene).plan(q_init, q_goal, seed=seed, max_time_s=max_time_s)
