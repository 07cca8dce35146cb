"""Polyhedral convex geometry in 3-D planar wrench space.

Wrenches are plain float64 arrays ``(fx, fz, tau)``.  Callers are expected to
pre-scale torques by a characteristic length so the three components are
numerically comparable; every tolerance here is relative to unit-normalized
wrenches.

Cones are generator-first: the conical hull of a finite set of rays.  Facet
normals are a cached accelerator for full-dimensional cones; degenerate cones
(generator span of rank < 3) always go through the LP feasibility path, never
through any epsilon-fattened surrogate.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateConeError

DEFAULT_TOL = 1e-9


def _as_wrench(w) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.shape != (3,):
        raise ValueError(f"wrench must be a 3-vector, got shape {w.shape}")
    return w


@dataclass
class WrenchCone:
    """Conical hull of a finite set of generator rays in wrench space."""

    generators: np.ndarray
    _face_normals: np.ndarray | None = field(default=None, repr=False)
    _rank: int | None = field(default=None, repr=False)

    def __post_init__(self):
        g = np.asarray(self.generators, dtype=float)
        if g.size == 0:
            g = np.zeros((0, 3))
        if g.ndim != 2 or g.shape[1] != 3:
            raise ValueError("generators must have shape (k, 3)")
        self.generators = g

    @property
    def rank(self) -> int:
        if self._rank is None:
            self._rank = generator_rank(self.generators)
        return self._rank

    @property
    def is_full_dimensional(self) -> bool:
        return self.rank == 3

    def face_normals(self, tol: float = DEFAULT_TOL) -> np.ndarray:
        """Outward unit facet normals; raises DegenerateConeError if rank < 3."""
        if self._face_normals is None:
            self._face_normals = face_normals(self.generators, tol)
        return self._face_normals


@dataclass
class WrenchPolytope:
    """Bounded convex set given by its vertices (k, 3)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3 or v.shape[0] == 0:
            raise ValueError("vertices must have shape (k, 3) with k >= 1")
        self.vertices = v


def generator_rank(generators: np.ndarray, rel_tol: float = 1e-12) -> int:
    """Numerical rank of the generator span."""
    g = np.asarray(generators, dtype=float)
    if g.shape[0] == 0:
        return 0
    norms = np.linalg.norm(g, axis=1)
    keep = norms > 0
    if not keep.any():
        return 0
    s = np.linalg.svd(g[keep] / norms[keep, None], compute_uv=False)
    return int(np.sum(s > rel_tol * s[0] * max(g.shape)))


def conical_sum(cones) -> WrenchCone:
    """Minkowski sum of cones: the conical hull of all generators pooled.

    The cone with no generators is the identity element.
    """
    cones = list(cones)
    if not cones:
        raise ValueError("conical_sum requires at least one cone")
    gens = [c.generators for c in cones if c.generators.shape[0] > 0]
    if not gens:
        return WrenchCone(np.zeros((0, 3)))
    return WrenchCone(np.vstack(gens))


def face_normals(generators: np.ndarray, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Outward unit facet normals of a full-dimensional conical hull.

    Candidate normals come from cross products of generator pairs; a candidate
    is a facet normal when every generator lies on its non-positive side.
    Every facet of a full-dimensional finitely generated cone contains two
    linearly independent generators, so the pairwise sweep is exhaustive.
    """
    g = np.asarray(generators, dtype=float)
    if generator_rank(g) < 3:
        raise DegenerateConeError(
            f"cone generators span rank {generator_rank(g)} < 3; "
            "use LP membership instead"
        )
    norms = np.linalg.norm(g, axis=1)
    u = g[norms > 0] / norms[norms > 0, None]
    k = u.shape[0]
    found: list[np.ndarray] = []
    for i in range(k):
        for j in range(i + 1, k):
            n = np.cross(u[i], u[j])
            nn = np.linalg.norm(n)
            if nn < 1e-12:
                continue
            n = n / nn
            proj = u @ n
            if proj.max() <= tol:
                pass
            elif proj.min() >= -tol:
                n = -n
                proj = -proj
            else:
                continue
            if any(abs(float(n @ m)) > 1.0 - 1e-9 for m in found):
                continue
            found.append(n)
    if not found:
        # Full-dimensional cone with no supporting facet: the whole space.
        return np.zeros((0, 3))
    return np.array(found)


def _normalize_columns(A: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(A, axis=0)
    norms[norms == 0] = 1.0
    return A / norms


def membership_residual(generators: np.ndarray, w: np.ndarray) -> tuple[float, np.ndarray]:
    """LP path: residual of ``min ||G x - w||_1`` over ``x >= 0`` (phase 1).

    The system is normalized so the residual is relative to ``|w|``; the
    returned coefficients are in the original generator scale.
    """
    w = _as_wrench(w)
    wn = np.linalg.norm(w)
    if wn == 0.0:
        return 0.0, np.zeros(generators.shape[0])
    if generators.shape[0] == 0:
        return 1.0, np.zeros(0)
    norms = np.linalg.norm(generators, axis=1)
    norms[norms == 0] = 1.0
    A = (generators / norms[:, None]).T
    residual, x = _kernels.phase1_feasible(A, w / wn)
    return float(residual), x * wn / norms


def cone_contains(cone: WrenchCone, w, tol: float = DEFAULT_TOL) -> bool:
    """Membership test, scale invariant in ``w``.

    Full-dimensional cones use the cached facet normals (all projections of
    the unit wrench must be <= tol); degenerate cones fall back to LP
    feasibility with the same relative tolerance.
    """
    w = _as_wrench(w)
    if np.linalg.norm(w) == 0.0:
        return True
    if cone.is_full_dimensional:
        normals = cone.face_normals(tol)
        if normals.shape[0] == 0:
            return True
        return _kernels.facet_margin(normals, w) <= tol
    residual, _ = membership_residual(cone.generators, w)
    return residual <= tol


def containment_margin(cone: WrenchCone, w, tol: float = DEFAULT_TOL) -> float:
    """Signed margin for full-dimensional cones (negative = strictly inside).

    For degenerate cones returns the LP residual (>= 0), so a strict-interior
    query degrades to membership-within-tolerance, which is the only sensible
    notion on a lower-dimensional set.
    """
    w = _as_wrench(w)
    if np.linalg.norm(w) == 0.0:
        return -1.0
    if cone.is_full_dimensional:
        normals = cone.face_normals(tol)
        if normals.shape[0] == 0:
            return -1.0
        return float(_kernels.facet_margin(normals, w))
    residual, _ = membership_residual(cone.generators, w)
    return residual


def polytope_cone_intersects(
    polytope: WrenchPolytope, cone: WrenchCone, tol: float = DEFAULT_TOL
) -> tuple[bool, np.ndarray | None, float]:
    """Nonemptiness of ``polytope ∩ cone`` via LP feasibility.

    Solves ``V^T mu = G^T lam, sum(mu) = 1, mu >= 0, lam >= 0`` with a phase-1
    simplex; handles degenerate cones and flat polytopes uniformly.  Returns
    the verdict, a witness point of the intersection when nonempty, and the
    LP residual.
    """
    V = polytope.vertices
    G = cone.generators
    m = V.shape[0]
    k = G.shape[0]
    scale = max(np.abs(V).max(), 1e-30)
    Vn = V / scale
    cols = [Vn.T]
    if k:
        gn = np.linalg.norm(G, axis=1)
        gn[gn == 0] = 1.0
        cols.append(-(G / gn[:, None]).T)
    A = np.hstack(cols)
    A = np.vstack([A, np.concatenate([np.ones(m), np.zeros(k)])[None, :]])
    b = np.array([0.0, 0.0, 0.0, 1.0])
    residual, x = _kernels.phase1_feasible(A, b)
    if residual > tol:
        return False, None, float(residual)
    witness = (x[:m] @ Vn) * scale
    return True, witness, float(residual)


def minkowski_sum_point_polytope(w, polytope: WrenchPolytope) -> WrenchPolytope:
    """Translate a polytope by a wrench."""
    return WrenchPolytope(polytope.vertices + _as_wrench(w)[None, :])


def minkowski_sum_polytopes(a: WrenchPolytope, b: WrenchPolytope) -> WrenchPolytope:
    """Minkowski sum via pairwise vertex sums.

    The result keeps redundant interior points (hull pruning is an
    optimization the feasibility LP does not need, and flat sets would make
    hull construction fragile).
    """
    pts = (a.vertices[:, None, :] + b.vertices[None, :, :]).reshape(-1, 3)
    return WrenchPolytope(pts)
