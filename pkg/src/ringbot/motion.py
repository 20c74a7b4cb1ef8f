"""Rigid placement of successive shapes and the three angular velocities.

The quasi-static motion surrogate: each new shape is placed by the planar
rigid transform minimizing the total squared displacement of the cells from
their previous world positions (isotropic-contact, zero-net-slip
assumption), with the centroid pinned so the body rotates in place.  The
cell-frame orientation accumulated from these placements is the pose; its
drift is the cells' rotation in the environment.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateConfigurationError

TWO_PI = 2.0 * np.pi


@dataclass
class WorldPose:
    """Placement of the cell frame in the environment: accumulated rotation
    (unwrapped, continuous) and translation of the centroid."""

    rotation: float = 0.0
    translation: np.ndarray = None

    def __post_init__(self):
        if self.translation is None:
            self.translation = np.zeros(2)


@dataclass
class OmegaTriple:
    """The three angular velocities at one recorded instant (rad/time)."""

    omega_mc: float
    omega_me: float
    omega_ce: float


def rigid_register(reference, candidate):
    """Least-squares planar rigid alignment of two labeled point sets.

    Returns (rotation, translation) describing how the candidate is rotated
    and translated relative to the reference: registering a copy of the
    reference rotated by +a about its centroid returns rotation a exactly.
    """
    ref = np.asarray(reference, dtype=float)
    cand = np.asarray(candidate, dtype=float)
    if ref.shape != cand.shape or ref.ndim != 2 or ref.shape[0] < 3:
        raise ConfigError("point sets must share shape (N>=3, 2)")
    cr = ref.mean(axis=0)
    cc = cand.mean(axis=0)
    a = ref - cr
    b = cand - cc
    dot = float((a * b).sum())
    cross = float((a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]).sum())
    if dot == 0.0 and cross == 0.0:
        raise DegenerateConfigurationError("all centered points are zero")
    return float(np.arctan2(cross, dot)), cc - cr


def _rot(ang):
    c, s = np.cos(ang), np.sin(ang)
    return np.array([[c, -s], [s, c]])


def advance_pose(prev_pose, prev_world_positions, new_shape):
    """Place the next shape with minimum squared cell displacement.

    Registers the shape (in its local build frame) against the previous
    world positions, applies the aligning rotation, and pins the centroid
    so it stays fixed in the environment.  The pose rotation accumulates
    the placement orientation, unwrapped for continuity.

    Returns (new_pose, new_world_positions).
    """
    prev_world = np.asarray(prev_world_positions, dtype=float)
    local = np.asarray(new_shape.positions, dtype=float)
    if local.shape != prev_world.shape:
        raise ConfigError("inconsistent cell counts")
    ang, _ = rigid_register(prev_world, local)
    placed = (local - local.mean(axis=0)) @ _rot(-ang).T + prev_world.mean(axis=0)
    # orientation of the shape's local frame as placed in E, kept continuous
    raw = -ang
    k = np.round((prev_pose.rotation - raw) / TWO_PI)
    new_rot = raw + k * TWO_PI
    pose = WorldPose(float(new_rot), prev_world.mean(axis=0).copy())
    return pose, placed


def omega_mc_analytic(v, n_cells, s):
    """Pattern rotation rate relative to the cells for wave speed v."""
    if n_cells < 1 or s <= 0:
        raise ConfigError("need n_cells >= 1 and s > 0")
    return v * TWO_PI / (n_cells * s)


def circular_shift(prev, cur):
    """Sub-cell circular shift k maximizing correlation of cur against prev.

    Positive k means cur[m] looks like prev[m + k]; quadratic interpolation
    around the integer peak gives sub-cell resolution.
    """
    a = np.asarray(prev, dtype=float)
    b = np.asarray(cur, dtype=float)
    n = len(a)
    a = a - a.mean()
    b = b - b.mean()
    corr = np.array([float(np.dot(np.roll(a, -k), b)) for k in range(n)])
    k0 = int(np.argmax(corr))
    cm = corr[(k0 - 1) % n]
    c0 = corr[k0]
    cp = corr[(k0 + 1) % n]
    denom = 2.0 * (2.0 * c0 - cm - cp)
    frac = 0.0 if denom == 0.0 else (cp - cm) / denom
    k = k0 + frac
    if k > n / 2:
        k -= n
    return k


def omega_mc_empirical(activator_history, dt, uniform_eps=1e-5):
    """Pattern shift rate from circular cross-correlation of the activator.

    activator_history: (frames, N) array of recorded q_act snapshots taken
    dt apart.  Returns (omega_series, uniform_flags); frames whose pattern
    is spatially uniform (std below uniform_eps) report zero with the flag
    set -- a uniform field has no gradient to transport.
    """
    hist = np.asarray(activator_history, dtype=float)
    if hist.ndim != 2 or hist.shape[0] < 2:
        raise ConfigError("need at least two recorded states")
    if dt <= 0:
        raise ConfigError("dt must be positive")
    n = hist.shape[1]
    frames = hist.shape[0] - 1
    omega = np.zeros(frames)
    uniform = np.zeros(frames, dtype=bool)
    for t in range(frames):
        a, b = hist[t], hist[t + 1]
        if a.std() < uniform_eps or b.std() < uniform_eps:
            uniform[t] = True
            continue
        omega[t] = circular_shift(a, b) * TWO_PI / (n * dt)
    return omega, uniform


def compose_frames(omega_mc, omega_ce):
    """Morphology-in-environment rate as the sum of the two relative rates."""
    if not (np.isfinite(omega_mc) and np.isfinite(omega_ce)):
        raise ConfigError("inputs must be finite")
    return omega_mc + omega_ce
