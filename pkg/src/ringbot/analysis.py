"""Measurement pipelines: smoothed angular velocities, lobe metrics,
morphology orientation tracking, turning distance, speed profiles, fits."""

from dataclasses import dataclass, field

import numpy as np

from .errors import (ConfigError, DegeneratePolygonError, DegenerateXError,
                     TooShortError)

TWO_PI = 2.0 * np.pi


@dataclass
class TimeSeriesF:
    """Uniformly sampled scalar series."""

    values: np.ndarray
    dt: float
    label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if not np.all(np.isfinite(self.values)):
            raise ConfigError("series values must be finite")


@dataclass
class LobeMetrics:
    """Lobe count, relative radial amplitude and peak azimuths of one shape."""

    count: int
    amplitude: float
    peak_azimuths: list = field(default_factory=list)


def estimate_angular_velocity(angles: TimeSeriesF, window_fraction=0.05):
    """Differentiate an unwrapped angle series and smooth the result.

    Central differences in the interior, one-sided at the ends, then a
    centered rectangular (moving-average) kernel covering window_fraction
    of the series, forced to odd width so no phase lag is introduced.
    """
    x = angles.values
    n = len(x)
    if n < 3:
        raise TooShortError("need at least 3 samples")
    if not 0 < window_fraction <= 0.5:
        raise ConfigError("window_fraction must be in (0, 0.5]")
    dt = angles.dt
    d = np.empty(n)
    d[1:-1] = (x[2:] - x[:-2]) / (2 * dt)
    d[0] = (x[1] - x[0]) / dt
    d[-1] = (x[-1] - x[-2]) / dt
    w = max(1, int(round(window_fraction * n)))
    if w % 2 == 0:
        w += 1
    if w > 1:
        kern = np.full(w, 1.0 / w)
        d = np.convolve(d, kern, mode="same")
    return TimeSeriesF(d, dt, label=f"d/dt {angles.label}".strip())


def count_lobes(radii, azimuths=None, prominence_ratio=0.25,
                circle_threshold=0.02):
    """Circular local-maxima detection on a radius profile.

    A peak must rise above the higher of its two flanking minima ("cols")
    by prominence_ratio*(r_max - r_min).  Profiles whose relative spread
    (r_max - r_min)/r_mean falls below circle_threshold count as circles
    (zero lobes).
    """
    r = np.asarray(radii, dtype=float)
    n = len(r)
    if n < 8:
        raise ConfigError("need at least 8 samples around the ring")
    az = np.asarray(azimuths, dtype=float) if azimuths is not None else \
        np.arange(n) * TWO_PI / n
    span = float(r.max() - r.min())
    amplitude = span / float(r.mean())
    if amplitude < circle_threshold:
        return LobeMetrics(0, amplitude, [])
    thresh = prominence_ratio * span
    # candidate maxima (strict on one side to break plateau ties)
    cand = [m for m in range(n)
            if r[m] > r[(m - 1) % n] and r[m] >= r[(m + 1) % n]]
    peaks = []
    for m in cand:
        # walk both ways to the nearest strictly higher sample; the col is
        # the lowest point passed on each side
        col = -np.inf
        for step in (1, -1):
            low = r[m]
            k = m
            for _ in range(n):
                k = (k + step) % n
                if r[k] > r[m]:
                    break
                low = min(low, r[k])
            else:
                low = float(r.min())
            col = max(col, low)
        if r[m] - col >= thresh:
            peaks.append(m)
    return LobeMetrics(len(peaks), amplitude, [float(az[m]) for m in peaks])


def _wrap(a):
    return (a + np.pi) % TWO_PI - np.pi


def morphology_azimuth(metrics_history, dt):
    """Unwrapped morphology orientation from lobe-peak tracking.

    Peaks in consecutive frames are matched by nearest circular angle; the
    orientation advances by the mean matched increment.  A change in lobe
    count ends the current segment (the series is split there).  Returns a
    list of (start_frame_index, TimeSeriesF) segments.
    """
    segments = []
    cur_start = None
    cur_vals = []
    prev = None
    for i, lm in enumerate(metrics_history):
        pk = np.sort(np.asarray(lm.peak_azimuths, dtype=float))
        if prev is not None and len(pk) == len(prev) and len(pk) > 0:
            inc = np.mean([_wrap(p - prev[np.argmin(np.abs(_wrap(prev - p)))])
                           for p in pk])
            if cur_start is None:
                cur_start = i - 1
                cur_vals = [0.0]
            cur_vals.append(cur_vals[-1] + float(inc))
        else:
            if cur_start is not None and len(cur_vals) >= 2:
                segments.append((cur_start, TimeSeriesF(np.array(cur_vals), dt,
                                                        "morphology azimuth")))
            cur_start, cur_vals = None, []
        prev = pk if len(pk) else None
    if cur_start is not None and len(cur_vals) >= 2:
        segments.append((cur_start, TimeSeriesF(np.array(cur_vals), dt,
                                                "morphology azimuth")))
    return segments


def _turning_function(polygon):
    """Arc-length-normalized cumulative turning function of a closed polygon.

    Returns (breaks, values): the function equals values[i] on
    [breaks[i], breaks[i+1]); breaks[0] = 0, breaks[-1] = 1.
    """
    p = np.asarray(polygon, dtype=float)
    if p.ndim != 2 or p.shape[0] < 3:
        raise ConfigError("polygon needs at least 3 vertices")
    seg = np.roll(p, -1, axis=0) - p
    lengths = np.hypot(seg[:, 0], seg[:, 1])
    per = float(lengths.sum())
    if per <= 0 or np.any(lengths <= 0):
        raise DegeneratePolygonError("polygon has a zero-length edge")
    h = np.arctan2(seg[:, 1], seg[:, 0])
    turn = _wrap(np.diff(h, append=h[:1]))  # turn applied at the END of each edge
    # cumulative heading along arc length, starting at the first edge
    vals = np.concatenate([[0.0], np.cumsum(turn[:-1])])
    breaks = np.concatenate([[0.0], np.cumsum(lengths) / per])
    return breaks, vals


def _integrate_offset(bA, vA, bB, vB, total_b, tau):
    """Squared L2 gap of two turning step functions at comparison shift tau.

    B's arc origin is moved by tau; crossing the origin lifts the heading
    by B's total turning.  The free rotation constant is eliminated in
    closed form (the width-weighted mean difference).
    """
    grid = np.unique(np.concatenate([bA, (bB + tau) % 1.0, [0.0, 1.0]]))
    widths = np.diff(grid)
    mids = (grid[:-1] + grid[1:]) / 2
    keep = widths > 1e-15
    mids, widths = mids[keep], widths[keep]
    fa = vA[np.searchsorted(bA, mids, side="right") - 1]
    x = mids - tau
    wraps = np.floor(x)
    xb = x - wraps
    fb = vB[np.searchsorted(bB, xb, side="right") - 1] + total_b * wraps
    diff = fa - fb
    c = float((diff * widths).sum())
    return float((((diff - c) ** 2) * widths).sum())


def turning_distance(poly_a, poly_b):
    """Shape dissimilarity from cumulative turning functions.

    L2 distance between the arc-length-normalized turning functions,
    minimized exactly over the circular shift of the comparison origin and
    (in closed form) over the free rotation offset.  Candidate shifts are
    all alignments of a breakpoint of one polygon with a breakpoint of the
    other; between such events the objective is concave in the shift, so
    scanning the alignment events is exact.  Invariant to rotation,
    translation, uniform scale and cyclic reindexing; symmetric for
    polygons of equal winding.
    """
    bA, vA = _turning_function(poly_a)
    bB, vB = _turning_function(poly_b)
    total_b = _total_turning(poly_b)
    taus = np.unique((bA[:, None] - bB[None, :]).ravel() % 1.0)
    best = np.inf
    for tau in taus:
        d2 = _integrate_offset(bA, vA, bB, vB, total_b, float(tau))
        if d2 < best:
            best = d2
    return float(np.sqrt(max(best, 0.0)))


def _total_turning(polygon):
    p = np.asarray(polygon, dtype=float)
    seg = np.roll(p, -1, axis=0) - p
    h = np.arctan2(seg[:, 1], seg[:, 0])
    return float(_wrap(np.diff(h, append=h[:1])).sum())


@dataclass
class SpeedProfile:
    """Tangential-speed summary: per-cell means plus radius-quartile buckets."""

    per_cell: np.ndarray
    valley_mean: float
    peak_mean: float


def tangential_speed_profile(world_history, dt):
    """Mean |tangential speed| per cell, bucketed by instantaneous radius.

    The tangential component is the velocity projection perpendicular to
    the centroid ray.  Buckets collect samples whose radius falls in the
    bottom (valley) or top (peak) quartile of that frame.
    """
    W = np.asarray(world_history, dtype=float)
    if W.ndim != 3 or W.shape[0] < 2:
        raise ConfigError("need at least two placed frames")
    if dt <= 0:
        raise ConfigError("dt must be positive")
    nfr = W.shape[0] - 1
    n = W.shape[1]
    per_cell = np.zeros(n)
    valley, peak = [], []
    for t in range(nfr):
        c = W[t].mean(axis=0)
        rel = W[t] - c
        r = np.hypot(rel[:, 0], rel[:, 1])
        tang = np.stack([-rel[:, 1], rel[:, 0]], axis=1) / np.maximum(r, 1e-300)[:, None]
        vel = (W[t + 1] - W[t]) / dt
        vt = np.abs((vel * tang).sum(axis=1))
        per_cell += vt
        q1, q3 = np.quantile(r, [0.25, 0.75])
        valley.extend(vt[r <= q1])
        peak.extend(vt[r >= q3])
    per_cell /= nfr
    vm = float(np.mean(valley)) if valley else 0.0
    pm = float(np.mean(peak)) if peak else 0.0
    return SpeedProfile(per_cell, vm, pm)


def linear_fit(x, y):
    """Ordinary least squares; returns (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ConfigError("need matching x/y with at least 2 points")
    if np.ptp(x) == 0:
        raise DegenerateXError("all x identical")
    xm, ym = x.mean(), y.mean()
    sxx = float(((x - xm) ** 2).sum())
    sxy = float(((x - xm) * (y - ym)).sum())
    slope = sxy / sxx
    intercept = ym - slope * xm
    resid = y - (slope * x + intercept)
    syy = float(((y - ym) ** 2).sum())
    r2 = 1.0 if syy == 0 else 1.0 - float((resid ** 2).sum()) / syy
    return slope, intercept, r2
