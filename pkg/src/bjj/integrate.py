"""Adaptive fourth-order Runge-Kutta integration with exact sample landing.

The driver advances classical RK4 steps and controls the local error by
step doubling: each step is taken once at h and twice at h/2, the
per-component difference (scaled by 1/15) is the error estimate, and the
accepted state is the Richardson-extrapolated fine solution.  Requested
output times are hit exactly by clamping the step, never by interpolation,
which is what makes stroboscopic sections of driven runs trustworthy.

The generic kernel works on tuples of floats so the same loop integrates
the reduced (z, phi) system and the four-component two-mode oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import SingularityError, StepUnderflowError
from .model import PhaseState, TrapParams, make_rate

__all__ = [
    "StepControl",
    "Trajectory",
    "SectionPoints",
    "default_control",
    "rk4_step",
    "advance",
    "integrate_adaptive",
    "sample_stroboscopic",
    "section_from_trajectory",
]

RateFn = Callable[[float, tuple[float, ...]], tuple[float, ...]]

_MAX_GROW = 5.0
_MIN_SHRINK = 0.1


@dataclass(frozen=True)
class StepControl:
    """Adaptive step-size policy.

    A step is accepted when the estimated per-component error does not
    exceed abs_tol + rel_tol*|y|; the next step is proposed as
    safety * h * (tolerance/error)^(1/5), clamped to [h_min, h_max].
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    h_init: float = 1e-3
    h_min: float = 1e-12
    h_max: float = 0.05
    safety: float = 0.9

    def __post_init__(self) -> None:
        if self.abs_tol < 0.0 or self.rel_tol < 0.0:
            raise ValueError("tolerances must be >= 0")
        if self.abs_tol == 0.0 and self.rel_tol == 0.0:
            raise ValueError("abs_tol and rel_tol cannot both be zero")
        if not (0.0 < self.h_min <= self.h_max):
            raise ValueError("need 0 < h_min <= h_max")
        if self.h_init <= 0.0:
            raise ValueError("h_init must be > 0")
        if not (0.0 < self.safety < 1.0):
            raise ValueError("safety must lie in (0, 1)")


def default_control(p: TrapParams) -> StepControl:
    """Default policy for a given drive: h_max resolves fifty steps per
    drive period when the trap is modulated, 0.05 otherwise."""
    if p.de1 != 0.0:
        return StepControl(h_max=min(0.05, p.period / 50.0))
    return StepControl()


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the reduced equations.

    dz_dt holds the actual flow derivative (damping included), evaluated
    analytically from the rate function at each sample.
    """

    params: TrapParams
    control: StepControl
    t: np.ndarray
    z: np.ndarray
    phi: np.ndarray
    dz_dt: np.ndarray

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class SectionPoints:
    """Stroboscopic section: one (z, dz/dt) point per drive period."""

    params: TrapParams
    control: StepControl
    period: float
    n: np.ndarray
    t: np.ndarray
    z: np.ndarray
    dz_dt: np.ndarray

    def __len__(self) -> int:
        return len(self.n)


def rk4_step(
    f: RateFn, t: float, y: tuple[float, ...], h: float
) -> tuple[float, ...]:
    """One classical Runge-Kutta step of size h."""
    return _rk4_from_k1(f, t, y, h, f(t, y))


def _rk4_from_k1(
    f: RateFn, t: float, y: tuple[float, ...], h: float, k1: tuple[float, ...]
) -> tuple[float, ...]:
    half = 0.5 * h
    y2 = tuple(yi + half * ki for yi, ki in zip(y, k1))
    k2 = f(t + half, y2)
    y3 = tuple(yi + half * ki for yi, ki in zip(y, k2))
    k3 = f(t + half, y3)
    y4 = tuple(yi + h * ki for yi, ki in zip(y, k3))
    k4 = f(t + h, y4)
    sixth = h / 6.0
    return tuple(
        yi + sixth * (a + 2.0 * (b + c) + d)
        for yi, a, b, c, d in zip(y, k1, k2, k3, k4)
    )


def _drive(
    f: RateFn,
    t: float,
    y: tuple[float, ...],
    targets: Sequence[float],
    ctl: StepControl,
    on_target: Callable[[float, tuple[float, ...]], None] | None = None,
    on_step: Callable[[float, tuple[float, ...]], None] | None = None,
) -> tuple[float, tuple[float, ...]]:
    """Advance through an increasing list of target times, landing exactly.

    on_target fires at every target (after exact landing); on_step fires
    at every other accepted step.  Raises StepUnderflowError when the
    tolerance cannot be met above h_min, and propagates SingularityError
    when the current state itself sits inside the guard band.
    """
    abs_tol = ctl.abs_tol
    rel_tol = ctl.rel_tol
    h_min = ctl.h_min
    h_max = ctl.h_max
    safety = ctl.safety
    h = min(max(ctl.h_init, h_min), h_max)
    underflow_edge = h_min * (1.0 + 1e-9)

    for target in targets:
        while t < target:
            gap = target - t
            if h >= gap:
                h_try = gap
                landing = True
            else:
                h_try = h
                landing = False

            # Stage 1 is shared by the full step and the first half step.
            # A singular current state raises here independent of h, so the
            # exception propagates; singular *trial* states further along
            # the step are treated as a rejection instead.
            k1 = f(t, y)
            try:
                y_big = _rk4_from_k1(f, t, y, h_try, k1)
                half = 0.5 * h_try
                y_mid = _rk4_from_k1(f, t, y, half, k1)
                y_fine = rk4_step(f, t + half, y_mid, half)
            except SingularityError:
                if h_try <= underflow_edge:
                    raise
                h = max(h_min, 0.5 * h_try)
                continue

            ratio = 0.0
            for y0, yb, yf in zip(y, y_big, y_fine):
                scale = abs_tol + rel_tol * max(abs(y0), abs(yf))
                err = abs(yf - yb) / (15.0 * scale)
                if err > ratio:
                    ratio = err

            if ratio <= 1.0:
                y = tuple(
                    yf + (yf - yb) / 15.0 for yf, yb in zip(y_fine, y_big)
                )
                if landing:
                    t = target  # exact by assignment, no accumulation drift
                else:
                    t += h_try
                    if ratio > 1e-30:
                        fac = safety * ratio**-0.2
                        if fac > _MAX_GROW:
                            fac = _MAX_GROW
                    else:
                        fac = _MAX_GROW
                    h = min(max(h_try * fac, h_min), h_max)
                    if on_step is not None:
                        on_step(t, y)
            else:
                if h_try <= underflow_edge:
                    raise StepUnderflowError(t, h_try)
                fac = safety * ratio**-0.2
                if fac < _MIN_SHRINK:
                    fac = _MIN_SHRINK
                h = max(h_try * fac, h_min)
        if on_target is not None:
            on_target(t, y)
    return t, y


def _sample_targets(t_end: float, sample_dt: float) -> list[float]:
    """Multiples of sample_dt covering (0, t_end], end collapsed onto t_end."""
    if sample_dt <= 0.0:
        raise ValueError("sample_dt must be > 0")
    count = int(math.floor(t_end / sample_dt + 1e-9))
    targets = [k * sample_dt for k in range(1, count + 1)]
    if targets and targets[-1] > t_end:
        targets[-1] = t_end
    elif not targets or t_end - targets[-1] > 1e-9 * sample_dt:
        targets.append(t_end)
    return targets


def advance(
    p: TrapParams, s0: PhaseState, t_end: float, ctl: StepControl | None = None
) -> PhaseState:
    """Final state at t_end, recording nothing along the way."""
    if ctl is None:
        ctl = default_control(p)
    if t_end < s0.t:
        raise ValueError(f"t_end={t_end} precedes initial time {s0.t}")
    if t_end == s0.t:
        return s0
    rate = make_rate(p)
    t, y = _drive(rate, s0.t, (s0.z, s0.phi), [t_end], ctl)
    return PhaseState(t=t, z=y[0], phi=y[1])


def integrate_adaptive(
    p: TrapParams,
    s0: PhaseState,
    t_end: float,
    ctl: StepControl | None = None,
    sample_dt: float | None = None,
) -> Trajectory:
    """Integrate the reduced equations from s0.t to t_end.

    With sample_dt set, output rows sit exactly on multiples of sample_dt
    (plus the initial state and t_end); otherwise every accepted step is
    recorded.  Landing is by step clamping, so no interpolation error
    enters the samples.
    """
    if ctl is None:
        ctl = default_control(p)
    if t_end < s0.t:
        raise ValueError(f"t_end={t_end} precedes initial time {s0.t}")
    rate = make_rate(p)

    ts: list[float] = []
    zs: list[float] = []
    phis: list[float] = []
    dzs: list[float] = []

    def record(t: float, y: tuple[float, ...]) -> None:
        dz, _ = rate(t, y)
        ts.append(t)
        zs.append(y[0])
        phis.append(y[1])
        dzs.append(dz)

    record(s0.t, (s0.z, s0.phi))
    if t_end > s0.t:
        if sample_dt is None:
            _drive(rate, s0.t, (s0.z, s0.phi), [t_end], ctl,
                   on_target=record, on_step=record)
        else:
            if s0.t != 0.0:
                raise ValueError("sample grids are anchored at t=0")
            targets = _sample_targets(t_end, sample_dt)
            _drive(rate, s0.t, (s0.z, s0.phi), targets, ctl, on_target=record)

    return Trajectory(
        params=p,
        control=ctl,
        t=np.asarray(ts),
        z=np.asarray(zs),
        phi=np.asarray(phis),
        dz_dt=np.asarray(dzs),
    )


def sample_stroboscopic(
    p: TrapParams,
    s0: PhaseState,
    n_periods: int,
    ctl: StepControl | None = None,
) -> SectionPoints:
    """Stroboscopic phase-space section sampled at t = n * (2*pi/omega).

    Emits n_periods + 1 points (the initial state is point n=0).  The
    landing times are exact multiples of the period by construction.
    """
    if p.de1 == 0.0:
        raise ValueError("stroboscopic sections need a modulated trap (de1 != 0)")
    if n_periods < 1:
        raise ValueError(f"n_periods must be >= 1, got {n_periods}")
    if s0.t != 0.0:
        raise ValueError("stroboscopic sampling starts at t=0")
    if ctl is None:
        ctl = default_control(p)
    rate = make_rate(p)
    period = p.period

    ts: list[float] = []
    zs: list[float] = []
    dzs: list[float] = []

    def record(t: float, y: tuple[float, ...]) -> None:
        dz, _ = rate(t, y)
        ts.append(t)
        zs.append(y[0])
        dzs.append(dz)

    record(0.0, (s0.z, s0.phi))
    targets = [n * period for n in range(1, n_periods + 1)]
    _drive(rate, 0.0, (s0.z, s0.phi), targets, ctl, on_target=record)

    return SectionPoints(
        params=p,
        control=ctl,
        period=period,
        n=np.arange(n_periods + 1),
        t=np.asarray(ts),
        z=np.asarray(zs),
        dz_dt=np.asarray(dzs),
    )


def section_from_trajectory(traj: Trajectory, period: float) -> SectionPoints:
    """Extract the stroboscopic section from an evenly sampled trajectory.

    The trajectory's sample step must divide the period; sample times are
    checked against n*period to within 1e-9*period.  Useful when one run
    feeds both a section and time-series diagnostics.
    """
    if len(traj) < 2:
        raise ValueError("trajectory too short for a section")
    dt = traj.t[1] - traj.t[0]
    stride = int(round(period / dt))
    if stride < 1 or abs(stride * dt - period) > 1e-9 * period:
        raise ValueError(
            f"sample step {dt!r} does not divide the period {period!r}"
        )
    idx = np.arange(0, len(traj), stride)
    t_sec = traj.t[idx]
    n = np.arange(len(idx))
    if np.max(np.abs(t_sec - n * period)) > 1e-9 * period:
        raise ValueError("trajectory samples do not land on period multiples")
    return SectionPoints(
        params=traj.params,
        control=traj.control,
        period=period,
        n=n,
        t=t_sec,
        z=traj.z[idx],
        dz_dt=traj.dz_dt[idx],
    )
