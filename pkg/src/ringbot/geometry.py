"""Closed-chain planar geometry: polylines, loop closure, polar profiles.

Angle convention: theta[m] is the exterior turning angle at joint m, taken
positive for clockwise turning.  Headings accumulate -theta, so a vector
summing to +2*pi closes into a simple polygon whose vertex index increases
clockwise.  With transport moving the morphogen pattern toward decreasing
cell index, this orientation makes the pattern sweep counterclockwise
(positive) in the plane, matching the sign of the analytic pattern rate
v*2*pi/(N*s).
"""

from dataclasses import dataclass

import numpy as np

from .errors import (ConfigError, DegenerateShapeError, InfeasibleClosureError,
                     NoConvergenceError)

TWO_PI = 2.0 * np.pi


@dataclass
class ChainShape:
    """Closed polygon realized by a joint-angle vector.

    positions: (N, 2) vertex coordinates, consecutive vertices exactly s
    apart (including the wrap pair).  closure_residual: endpoint gap plus
    heading mismatch of the generating polyline.
    """

    positions: np.ndarray
    angles: np.ndarray
    closure_residual: float

    @property
    def n_cells(self):
        return len(self.angles)


def _headings(angles):
    return -np.cumsum(angles)


def angles_to_polyline(angles, s):
    """Forward kinematics from joint angles.

    Starts at the origin; the turn at joint m precedes segment m.  Returns
    (positions, closure_residual) where positions holds the N vertices and
    the residual is ||p_N - p_0|| + s*|sum(theta) - 2*pi|.
    """
    angles = np.asarray(angles, dtype=float)
    if not np.all(np.isfinite(angles)):
        raise ConfigError("angles must be finite")
    if s <= 0:
        raise ConfigError("link length must be positive")
    h = _headings(angles)
    steps = s * np.stack([np.cos(h), np.sin(h)], axis=1)
    pts = np.empty((len(angles) + 1, 2))
    pts[0] = 0.0
    np.cumsum(steps, axis=0, out=pts[1:])
    gap = float(np.hypot(*pts[-1]))
    heading_mismatch = abs(float(np.sum(angles)) - TWO_PI)
    return pts[:-1].copy(), gap + s * heading_mismatch


def measure_turning_angles(positions):
    """Recover joint angles from vertex positions (inverse of the polyline).

    theta[m] is the clockwise heading change applied at vertex m, i.e.
    between the incoming segment (m-1 -> m) and the outgoing one (m -> m+1);
    theta[0] is the wrap turn.
    """
    p = np.asarray(positions, dtype=float)
    seg = np.roll(p, -1, axis=0) - p
    h = np.arctan2(seg[:, 1], seg[:, 0])
    dh = h - np.roll(h, 1)
    return -((dh + np.pi) % TWO_PI - np.pi)


def _closure_system(angles, s):
    """Constraint values and Jacobian for (sum - 2pi, end_x, end_y)."""
    n = len(angles)
    h = _headings(angles)
    ch = np.cos(h)
    sh = np.sin(h)
    end = s * np.array([ch.sum(), sh.sum()])
    c = np.array([angles.sum() - TWO_PI, end[0], end[1]])
    # d h_m / d theta_j = -1 for m >= j
    jx = np.cumsum((s * sh)[::-1])[::-1]
    jy = np.cumsum((-s * ch)[::-1])[::-1]
    jac = np.vstack([np.ones(n), jx, jy])
    return c, jac


def closure_error(angles, s):
    c, _ = _closure_system(np.asarray(angles, dtype=float), s)
    return abs(c[0]) * s + float(np.hypot(c[1], c[2]))


def project_to_closure(goal_angles, s=1.0, tolerance=1e-9, max_iterations=50,
                       start=None, frozen=None):
    """Nearest closed configuration to the goal angles.

    Minimizes sum((theta - goal)^2) subject to sum(theta) = 2*pi and the
    endpoint returning to the origin, by Gauss-Newton steps that solve the
    linearized equality-constrained least-change problem exactly.  ``start``
    warm-starts the iteration (defaults to the goal).  ``frozen`` maps joint
    index -> held angle; those joints become hard equality constraints and
    the correction is absorbed by the remaining joints.

    Raises NoConvergenceError (carrying the best iterate) when iterations
    run out, or InfeasibleClosureError when fewer than four joints are free.
    """
    goal = np.asarray(goal_angles, dtype=float).copy()
    n = len(goal)
    if n < 4:
        raise ConfigError("need at least 4 joints")
    th = goal.copy() if start is None else np.asarray(start, dtype=float).copy()
    free = np.ones(n, dtype=bool)
    if frozen:
        for idx, val in frozen.items():
            if not 0 <= idx < n:
                raise ConfigError(f"frozen index {idx} out of range")
            th[idx] = val
            goal[idx] = val
            free[idx] = False
    nfree = int(free.sum())
    if nfree == 0:
        c, _ = _closure_system(th, s)
        resid = abs(c[0]) * s + float(np.hypot(c[1], c[2]))
        if resid < tolerance:
            return th
        raise InfeasibleClosureError(th, resid, 0)
    if nfree < 4:
        c, _ = _closure_system(th, s)
        raise InfeasibleClosureError(
            th, abs(c[0]) * s + float(np.hypot(c[1], c[2])), 0)

    gf = goal[free]
    best = th.copy()
    best_resid = np.inf
    for it in range(1, max_iterations + 1):
        c, jac = _closure_system(th, s)
        jf = jac[:, free]
        # linearized constraints: c + J (x - th) = 0, minimize ||x - goal||
        rhs = jf @ th[free] - c
        gram = jf @ jf.T
        try:
            lam = np.linalg.solve(gram, jf @ gf - rhs)
        except np.linalg.LinAlgError:
            raise InfeasibleClosureError(best, best_resid, it)
        new = gf - jf.T @ lam
        step = float(np.abs(new - th[free]).max())
        th[free] = new
        c2, _ = _closure_system(th, s)
        resid = abs(c2[0]) * s + float(np.hypot(c2[1], c2[2]))
        if resid < best_resid:
            best, best_resid = th.copy(), resid
        if resid < tolerance and step < max(tolerance, 1e-12):
            return th
    raise NoConvergenceError(best, best_resid, max_iterations)


def make_shape(angles, s):
    """Build a ChainShape from (already projected) angles."""
    pts, resid = angles_to_polyline(angles, s)
    return ChainShape(pts, np.asarray(angles, dtype=float).copy(), resid)


def centroid(shape_or_positions):
    pts = getattr(shape_or_positions, "positions", shape_or_positions)
    return np.asarray(pts, dtype=float).mean(axis=0)


def polar_profile(shape_or_positions, s=1.0):
    """Per-cell (radius, azimuth) about the centroid.

    Azimuths are unwrapped to be monotonic around the ring (following the
    chain's own winding).  Raises DegenerateShapeError if any vertex sits
    on the centroid.
    """
    pts = getattr(shape_or_positions, "positions", shape_or_positions)
    pts = np.asarray(pts, dtype=float)
    c = pts.mean(axis=0)
    rel = pts - c
    r = np.hypot(rel[:, 0], rel[:, 1])
    if np.any(r < 1e-9 * s):
        raise DegenerateShapeError("vertex at centroid; polar profile undefined")
    az = np.arctan2(rel[:, 1], rel[:, 0])
    d = np.diff(az)
    d = (d + np.pi) % TWO_PI - np.pi
    unwrapped = np.concatenate([[az[0]], az[0] + np.cumsum(d)])
    return r, unwrapped
