"""Diagnostics on trajectories and stroboscopic sections.

Power spectra distinguish quasiperiodic from chaotic runs, the section
clustering detector identifies frequency-locked attractors of the damped
system, and the two-trajectory Lyapunov estimate quantifies sensitivity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .integrate import SectionPoints, StepControl, advance, default_control
from .model import PhaseState, TrapParams

__all__ = [
    "Spectrum",
    "AttractorReport",
    "power_spectrum",
    "dominant_bin",
    "time_average_z",
    "detect_frequency_locking",
    "lyapunov_estimate",
]

_WINDOWS = ("rect", "hann")


@dataclass(frozen=True)
class Spectrum:
    """One-sided power spectrum of a mean-removed, evenly sampled series.

    freqs is in cycles per time unit; power is normalized so that with
    the rectangular window the total equals the variance of the series
    (Parseval).  A drive at angular frequency w shows up at w / 2 pi.
    """

    freqs: np.ndarray
    power: np.ndarray
    window: str
    dt: float
    n_samples: int

    @property
    def resolution(self) -> float:
        """Bin spacing in cycles per time unit."""
        return 1.0 / (self.n_samples * self.dt)


def power_spectrum(t: np.ndarray, x: np.ndarray, window: str = "hann") -> Spectrum:
    """Spectrum of x(t) on a uniform grid; mean removed before windowing."""
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if t.ndim != 1 or t.shape != x.shape:
        raise ValueError("t and x must be one-dimensional and equally long")
    if len(t) < 16:
        raise ValueError("need at least 16 samples")
    if window not in _WINDOWS:
        raise ValueError(f"window must be one of {_WINDOWS}, got {window!r}")
    steps = np.diff(t)
    dt = float(steps[0])
    if dt <= 0.0 or np.max(np.abs(steps - dt)) > 1e-9 * dt:
        raise ValueError("samples are not evenly spaced")

    n = len(x)
    y = x - x.mean()
    if window == "hann":
        y = y * np.hanning(n)
    spec = np.fft.rfft(y)
    power = np.abs(spec) ** 2 / (n * n)
    # one-sided: interior bins carry their mirror's share
    power[1:] *= 2.0
    if n % 2 == 0:
        power[-1] *= 0.5
    return Spectrum(
        freqs=np.fft.rfftfreq(n, d=dt),
        power=power,
        window=window,
        dt=dt,
        n_samples=n,
    )


def dominant_bin(spec: Spectrum) -> tuple[float, float]:
    """(frequency, fraction of non-DC power) of the strongest non-DC bin."""
    power = spec.power[1:]
    total = float(power.sum())
    if total <= 0.0:
        return 0.0, 0.0
    i = int(np.argmax(power))
    return float(spec.freqs[1 + i]), float(power[i] / total)


_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def time_average_z(t: np.ndarray, z: np.ndarray, t_discard: float = 0.0) -> float:
    """Trapezoid mean of z(t) over samples with t >= t_discard."""
    t = np.asarray(t, dtype=float)
    z = np.asarray(z, dtype=float)
    keep = t >= t_discard
    t_sel = t[keep]
    z_sel = z[keep]
    if len(t_sel) < 2:
        raise ValueError("need at least 2 samples past t_discard")
    span = t_sel[-1] - t_sel[0]
    if span <= 0.0:
        raise ValueError("samples must span a positive interval")
    return float(_trapezoid(z_sel, t_sel) / span)


@dataclass(frozen=True)
class AttractorReport:
    """Outcome of section clustering.

    kind is "FixedCycle" (with order p and the p cluster centers),
    "Chaotic" (spread beyond chaos_spread_min with no admissible cycle) or
    "Undecided".  transient_periods is the first section index from which
    every later point stays within cluster_tol of its cluster center; it
    is 0 for non-locked kinds.  mean_z averages the retained points.
    """

    kind: str
    order: int | None
    mean_z: float
    transient_periods: int
    spread: float
    cluster_centers: tuple[tuple[float, float], ...] | None


def _diameter(pts: np.ndarray) -> float:
    """Exact max pairwise distance (convex hull + brute force on the hull)."""
    if len(pts) < 2:
        return 0.0
    try:
        from scipy.spatial import ConvexHull

        hull_pts = pts[ConvexHull(pts).vertices]
    except Exception:  # collinear/degenerate clouds
        hull_pts = pts
        if len(hull_pts) > 2000:
            keep = np.unique(
                np.concatenate(
                    [pts[:, 0].argsort()[[0, -1]], pts[:, 1].argsort()[[0, -1]]]
                )
            )
            hull_pts = pts[keep]
    d2 = 0.0
    for i in range(len(hull_pts) - 1):
        diff = hull_pts[i + 1 :] - hull_pts[i]
        m = float(np.max(np.einsum("ij,ij->i", diff, diff)))
        if m > d2:
            d2 = m
    return math.sqrt(d2)


def detect_frequency_locking(
    section: SectionPoints,
    cluster_tol: float = 1e-3,
    max_order: int = 12,
    discard_periods: int = 2000,
    chaos_spread_min: float = 0.2,
) -> AttractorReport:
    """Classify the asymptotic behaviour of a stroboscopic section.

    After dropping the first discard_periods points, the retained points
    are grouped by section index mod p for p = 1..max_order; the smallest
    p whose residue classes all sit within cluster_tol of their centroids
    is reported as a locked cycle of that order.  Failing that, a point
    cloud whose diameter exceeds chaos_spread_min is chaotic; anything
    else (quasiperiodic loops, undamped islands) is undecided.
    """
    if cluster_tol <= 0.0:
        raise ValueError("cluster_tol must be > 0")
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    if discard_periods < 0:
        raise ValueError("discard_periods must be >= 0")
    pts = np.column_stack([section.z, section.dz_dt])
    if len(pts) <= discard_periods + 10 * max_order:
        raise ValueError(
            f"need more than discard_periods + 10*max_order = "
            f"{discard_periods + 10 * max_order} section points, got {len(pts)}"
        )
    kept = pts[discard_periods:]
    mean_z = float(kept[:, 0].mean())
    spread = _diameter(kept)

    for p in range(1, max_order + 1):
        centers = np.empty((p, 2))
        ok = True
        for r in range(p):
            cls = kept[r::p]
            c = cls.mean(axis=0)
            centers[r] = c
            if np.max(np.hypot(cls[:, 0] - c[0], cls[:, 1] - c[1])) > cluster_tol:
                ok = False
                break
        if not ok:
            continue
        # residue r of the retained slice corresponds to absolute section
        # index (discard_periods + r) mod p; align centers to absolute
        # indices before scanning the full history for the transient end.
        by_abs = np.empty_like(centers)
        for r in range(p):
            by_abs[(discard_periods + r) % p] = centers[r]
        dist = np.hypot(
            pts[:, 0] - by_abs[np.arange(len(pts)) % p, 0],
            pts[:, 1] - by_abs[np.arange(len(pts)) % p, 1],
        )
        outside = np.nonzero(dist > cluster_tol)[0]
        transient = int(outside[-1]) + 1 if len(outside) else 0
        return AttractorReport(
            kind="FixedCycle",
            order=p,
            mean_z=mean_z,
            transient_periods=transient,
            spread=spread,
            cluster_centers=tuple((float(a), float(b)) for a, b in by_abs),
        )

    kind = "Chaotic" if spread > chaos_spread_min else "Undecided"
    return AttractorReport(
        kind=kind,
        order=None,
        mean_z=mean_z,
        transient_periods=0,
        spread=spread,
        cluster_centers=None,
    )


def lyapunov_estimate(
    p: TrapParams,
    z0: float,
    phi0: float,
    ctl: StepControl | None = None,
    horizon: float = 1000.0,
    renorm_interval: float = 0.5,
    d0: float = 1e-8,
) -> float:
    """Largest Lyapunov exponent by the two-trajectory renormalized method.

    A clone displaced by d0 in z is integrated alongside the reference;
    after every renorm_interval the log separation growth is accumulated
    and the clone is pulled back to distance d0 along the current
    separation direction.  Regular orbits give ~ log(T)/T, decaying toward
    zero with the horizon; chaotic ones converge to a positive rate.
    """
    if d0 <= 0.0:
        raise ValueError("d0 must be > 0")
    if renorm_interval <= 0.0 or horizon < renorm_interval:
        raise ValueError("need 0 < renorm_interval <= horizon")
    if ctl is None:
        ctl = default_control(p)
    n_int = int(round(horizon / renorm_interval))
    ref = PhaseState(t=0.0, z=z0, phi=phi0)
    clone = PhaseState(t=0.0, z=z0 + d0, phi=phi0)
    total = 0.0
    for k in range(n_int):
        t_next = (k + 1) * renorm_interval
        ref = advance(p, ref, t_next, ctl)
        clone = advance(p, clone, t_next, ctl)
        dz = clone.z - ref.z
        dphi = clone.phi - ref.phi
        d = math.hypot(dz, dphi)
        if d <= 0.0:  # exact collapse: restart the offset in z
            clone = PhaseState(t=ref.t, z=ref.z + d0, phi=ref.phi)
            continue
        total += math.log(d / d0)
        scale = d0 / d
        clone = PhaseState(
            t=ref.t, z=ref.z + dz * scale, phi=ref.phi + dphi * scale
        )
    return total / (n_int * renorm_interval)
