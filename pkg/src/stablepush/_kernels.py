"""Hot numeric kernels with a numba fast path and a pure-Python/numpy fallback.

The feasibility check behind every planner step funnels through three small
kernels: slip classification + sliding-friction wrench assembly, facet-margin
membership, and a phase-1 simplex for low-dimensional LP feasibility.  All are
written as plain loop code over float64 arrays so the exact same source runs
either interpreted or compiled with ``@numba.njit``.

Backend selection happens once at import time:

* ``STABLEPUSH_NUMBA=0`` (or ``false``/``off``) forces the numpy fallback.
* If numba is not importable the fallback is used automatically.

``BACKEND`` reports which path is active.  The undecorated functions stay
available with a ``_py`` suffix so benchmarks and tests can compare both.
"""

from __future__ import annotations

import os

import numpy as np

_env = os.environ.get("STABLEPUSH_NUMBA", "1").strip().lower()
_want_numba = _env not in ("0", "false", "off", "no")

if _want_numba:
    try:
        import numba

        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - exercised via env flag test
        NUMBA_ENABLED = False
else:
    NUMBA_ENABLED = False

BACKEND = "numba" if NUMBA_ENABLED else "numpy"

# Relative pivot tolerance for the simplex; inputs are normalized by callers.
_PIVOT_EPS = 1e-12


def slide_wrench_and_modes_py(points, pn, mu, com, origin, vx, vz, omega, eps_v):
    """Classify finger contact points and sum the sliding-friction wrench.

    ``points`` are world-frame contact positions (k, 2), ``pn`` their normal
    impulses.  The object twist is (vx, vz) at ``origin`` plus ``omega`` about
    it.  Points whose material slip speed is below ``eps_v`` stick and
    contribute nothing here.  Returns the summed wrench (fx, fz, tau about
    ``com``) of the sliding points and the sticking mask.
    """
    k = points.shape[0]
    wrench = np.zeros(3)
    sticking = np.zeros(k, dtype=np.bool_)
    for i in range(k):
        px = points[i, 0]
        pz = points[i, 1]
        sx = vx - omega * (pz - origin[1])
        sz = vz + omega * (px - origin[0])
        speed = np.sqrt(sx * sx + sz * sz)
        if speed < eps_v:
            sticking[i] = True
        else:
            scale = -mu * pn[i] / speed
            fx = scale * sx
            fz = scale * sz
            wrench[0] += fx
            wrench[1] += fz
            wrench[2] += (px - com[0]) * fz - (pz - com[1]) * fx
    return wrench, sticking


def facet_margin_py(normals, w):
    """Largest projection of the unit-normalized wrench onto facet normals.

    Negative means strictly inside the cone, positive outside.  The zero
    wrench is the apex and reports deep containment.
    """
    norm = np.sqrt(w[0] * w[0] + w[1] * w[1] + w[2] * w[2])
    if norm == 0.0:
        return -1.0
    margin = -np.inf
    for i in range(normals.shape[0]):
        proj = (normals[i, 0] * w[0] + normals[i, 1] * w[1] + normals[i, 2] * w[2]) / norm
        if proj > margin:
            margin = proj
    return margin


def phase1_feasible_py(A, b):
    """Phase-1 simplex for ``A x = b, x >= 0`` with Bland's rule.

    Returns ``(residual, x)`` where ``residual`` is the optimal sum of
    artificial variables (0 within tolerance iff the system is feasible) and
    ``x`` the primal point found.  Callers normalize ``A``/``b`` so the
    residual is comparable against a dimensionless tolerance.
    """
    m, n = A.shape
    total = n + m
    tab = np.zeros((m, total + 1))
    basis = np.empty(m, dtype=np.int64)
    for i in range(m):
        sign = 1.0 if b[i] >= 0.0 else -1.0
        for j in range(n):
            tab[i, j] = sign * A[i, j]
        tab[i, n + i] = 1.0
        tab[i, total] = sign * b[i]
        basis[i] = n + i

    # Reduced-cost row for minimizing the artificial sum.
    obj = np.zeros(total + 1)
    for j in range(n):
        s = 0.0
        for i in range(m):
            s += tab[i, j]
        obj[j] = -s
    for i in range(m):
        obj[total] -= tab[i, total]

    max_iter = 50 * (total + 1)
    for _ in range(max_iter):
        enter = -1
        for j in range(total):
            if obj[j] < -_PIVOT_EPS:
                enter = j
                break
        if enter < 0:
            break
        leave = -1
        best_ratio = np.inf
        for i in range(m):
            a = tab[i, enter]
            if a > _PIVOT_EPS:
                ratio = tab[i, total] / a
                if ratio < best_ratio - _PIVOT_EPS or (
                    ratio < best_ratio + _PIVOT_EPS
                    and (leave < 0 or basis[i] < basis[leave])
                ):
                    best_ratio = ratio
                    leave = i
        if leave < 0:
            # Unbounded descent cannot happen for phase 1; bail out safely.
            break
        piv = tab[leave, enter]
        for j in range(total + 1):
            tab[leave, j] /= piv
        for i in range(m):
            if i != leave:
                f = tab[i, enter]
                if f != 0.0:
                    for j in range(total + 1):
                        tab[i, j] -= f * tab[leave, j]
        f = obj[enter]
        if f != 0.0:
            for j in range(total + 1):
                obj[j] -= f * tab[leave, j]
        basis[leave] = enter

    residual = -obj[total]
    if residual < 0.0:
        residual = 0.0
    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = tab[i, total]
    return residual, x


def points_in_polygon_py(points, poly, tol):
    """True iff every point lies inside the polygon (boundary within tol ok)."""
    k = points.shape[0]
    n = poly.shape[0]
    for p in range(k):
        x = points[p, 0]
        z = points[p, 1]
        inside = False
        on_edge = False
        for i in range(n):
            x1 = poly[i, 0]
            z1 = poly[i, 1]
            j = i + 1
            if j == n:
                j = 0
            x2 = poly[j, 0]
            z2 = poly[j, 1]
            # Distance from point to segment for the boundary tolerance.
            dx = x2 - x1
            dz = z2 - z1
            seg2 = dx * dx + dz * dz
            if seg2 > 0.0:
                t = ((x - x1) * dx + (z - z1) * dz) / seg2
                if t < 0.0:
                    t = 0.0
                elif t > 1.0:
                    t = 1.0
            else:
                t = 0.0
            cx = x1 + t * dx - x
            cz = z1 + t * dz - z
            if cx * cx + cz * cz <= tol * tol:
                on_edge = True
                break
            if (z1 > z) != (z2 > z):
                x_cross = x1 + (z - z1) / (z2 - z1) * (x2 - x1)
                if x < x_cross:
                    inside = not inside
        if not (inside or on_edge):
            return False
    return True


def metric_sq_py(poses, qx, qz, qt, rot_weight):
    """Squared weighted SE(2) distances from every tree pose to (qx, qz, qt)."""
    n = poses.shape[0]
    out = np.empty(n)
    two_pi = 2.0 * np.pi
    for i in range(n):
        dx = poses[i, 0] - qx
        dz = poses[i, 1] - qz
        dt = poses[i, 2] - qt
        dt = (dt + np.pi) % two_pi - np.pi
        w = rot_weight * dt
        out[i] = dx * dx + dz * dz + w * w
    return out


if NUMBA_ENABLED:
    _jit = numba.njit(cache=True, fastmath=False)
    slide_wrench_and_modes = _jit(slide_wrench_and_modes_py)
    facet_margin = _jit(facet_margin_py)
    phase1_feasible = _jit(phase1_feasible_py)
    points_in_polygon = _jit(points_in_polygon_py)
    metric_sq = _jit(metric_sq_py)
else:
    slide_wrench_and_modes = slide_wrench_and_modes_py
    facet_margin = facet_margin_py
    phase1_feasible = phase1_feasible_py
    points_in_polygon = points_in_polygon_py
    metric_sq = metric_sq_py


def warmup():
    """Trigger JIT compilation of all kernels (no-op on the numpy backend)."""
    pts = np.zeros((1, 2))
    slide_wrench_and_modes(pts, np.ones(1), 0.5, np.zeros(2), np.zeros(2), 1.0, 0.0, 0.1, 1e-9)
    facet_margin(np.array([[0.0, 0.0, 1.0]]), np.array([0.0, 0.0, -1.0]))
    phase1_feasible(np.array([[1.0, -1.0]]), np.array([0.5]))
    points_in_polygon(pts, np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]]), 1e-9)
    metric_sq(np.zeros((1, 3)), 0.0, 0.0, 0.0, 1.0)
