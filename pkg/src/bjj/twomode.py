"""Full two-mode amplitude equations, kept as an independent cross-check.

The reduced (z, phi) system is a change of variables applied to the
coupled mode amplitudes a1, a2:

    i da1/dt = (de(t)/2 + lam*|a1|^2) a1 - a2/2
    i da2/dt = (-de(t)/2 + lam*|a2|^2) a2 - a1/2

with |a1|^2 + |a2|^2 = 1 and time in the same tunneling units.  Projecting
z = |a1|^2 - |a2|^2 and phi = arg(a2) - arg(a1) reproduces the reduced
equations exactly, so integrating both routes and comparing z exposes sign
and coefficient mistakes in either one.  No damping variant exists here;
the oracle is conservative only.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .integrate import StepControl, _drive, _sample_targets, default_control
from .model import TrapParams

__all__ = [
    "TwoModeState",
    "TwoModeTrajectory",
    "CrosscheckReport",
    "amplitudes_from_phase",
    "project",
    "project_trajectory",
    "norm",
    "integrate_twomode",
    "crosscheck_max_dz",
]

#: Mode populations below this are treated as phase-indeterminate.
PHASE_FLOOR = 1e-12


@dataclass(frozen=True)
class TwoModeState:
    """Complex mode amplitudes at time t (norm |a1|^2+|a2|^2 = 1)."""

    t: float
    a1: complex
    a2: complex


@dataclass(frozen=True)
class TwoModeTrajectory:
    params: TrapParams
    control: StepControl
    t: np.ndarray
    a1: np.ndarray
    a2: np.ndarray

    def __len__(self) -> int:
        return len(self.t)


@dataclass(frozen=True)
class CrosscheckReport:
    """Worst-case imbalance disagreement between the two integration routes."""

    max_abs_dz: float
    t_at_max: float
    n_compared: int


def amplitudes_from_phase(z0: float, phi0: float) -> tuple[complex, complex]:
    """Unit-norm amplitudes with imbalance z0 and relative phase phi0."""
    if not -1.0 <= z0 <= 1.0:
        raise ValueError(f"|z0| must be <= 1, got {z0}")
    a1 = complex(math.sqrt(0.5 * (1.0 + z0)), 0.0)
    a2 = cmath.rect(math.sqrt(0.5 * (1.0 - z0)), phi0)
    return a1, a2


def norm(s: TwoModeState) -> float:
    return abs(s.a1) ** 2 + abs(s.a2) ** 2


def project(s: TwoModeState) -> tuple[float, float]:
    """Map amplitudes to (z, phi); phi is nan when a mode is empty.

    z is normalized by the instantaneous total so that slow norm drift in
    a numerical trajectory does not leak into the imbalance.  The nan flag
    (rather than a silent 0) marks the genuinely undefined relative phase
    at full polarization.
    """
    n1 = abs(s.a1) ** 2
    n2 = abs(s.a2) ** 2
    total = n1 + n2
    z = (n1 - n2) / total
    if n1 < PHASE_FLOOR * total or n2 < PHASE_FLOOR * total:
        return z, math.nan
    phi = cmath.phase(s.a2) - cmath.phase(s.a1)
    return z, phi


def _make_rate(p: TrapParams):
    """Real 4-vector (re1, im1, re2, im2) rate function for the generic driver."""
    lam = p.lam
    de0 = p.de0
    de1 = p.de1
    omega = p.omega
    sin = math.sin

    def rate(t, y):
        x1, y1, x2, y2 = y
        half_de = 0.5 * (de0 + de1 * sin(omega * t)) if de1 != 0.0 else 0.5 * de0
        c1 = half_de + lam * (x1 * x1 + y1 * y1)
        c2 = -half_de + lam * (x2 * x2 + y2 * y2)
        # i da/dt = c a - other/2   =>   da/dt = -i c a + i other/2
        return (
            c1 * y1 - 0.5 * y2,
            -c1 * x1 + 0.5 * x2,
            c2 * y2 - 0.5 * y1,
            -c2 * x2 + 0.5 * x1,
        )

    return rate


def integrate_twomode(
    p: TrapParams,
    s0: TwoModeState,
    t_end: float,
    ctl: StepControl | None = None,
    sample_dt: float | None = None,
) -> TwoModeTrajectory:
    """Integrate the amplitude equations with the shared adaptive driver.

    Only the conservative system is defined at this level, so p.eta must
    be zero.  Sampling semantics match integrate_adaptive.
    """
    if p.eta != 0.0:
        raise ValueError("two-mode oracle is conservative; requires eta = 0")
    if ctl is None:
        ctl = default_control(p)
    if t_end < s0.t:
        raise ValueError(f"t_end={t_end} precedes initial time {s0.t}")
    rate = _make_rate(p)
    y0 = (s0.a1.real, s0.a1.imag, s0.a2.real, s0.a2.imag)

    ts: list[float] = []
    a1s: list[complex] = []
    a2s: list[complex] = []

    def record(t, y):
        ts.append(t)
        a1s.append(complex(y[0], y[1]))
        a2s.append(complex(y[2], y[3]))

    record(s0.t, y0)
    if t_end > s0.t:
        if sample_dt is None:
            _drive(rate, s0.t, y0, [t_end], ctl, on_target=record, on_step=record)
        else:
            if s0.t != 0.0:
                raise ValueError("sample grids are anchored at t=0")
            targets = _sample_targets(t_end, sample_dt)
            _drive(rate, s0.t, y0, targets, ctl, on_target=record)

    return TwoModeTrajectory(
        params=p,
        control=ctl,
        t=np.asarray(ts),
        a1=np.asarray(a1s),
        a2=np.asarray(a2s),
    )


def project_trajectory(traj: TwoModeTrajectory) -> tuple[np.ndarray, np.ndarray]:
    """(z, phi) arrays with phi unwrapped to a continuous branch."""
    n1 = np.abs(traj.a1) ** 2
    n2 = np.abs(traj.a2) ** 2
    total = n1 + n2
    z = (n1 - n2) / total
    phi = np.angle(traj.a2) - np.angle(traj.a1)
    empty = (n1 < PHASE_FLOOR * total) | (n2 < PHASE_FLOOR * total)
    phi = np.where(empty, np.nan, phi)
    if not empty.any():
        phi = np.unwrap(phi)
    return z, phi


def crosscheck_max_dz(
    p: TrapParams,
    z0: float,
    phi0: float,
    t_end: float = 50.0,
    sample_dt: float = 0.05,
    ctl: StepControl | None = None,
) -> CrosscheckReport:
    """Integrate both routes from the same state and compare z on a grid."""
    from .integrate import integrate_adaptive  # local to avoid cycle at import
    from .model import PhaseState

    if p.eta != 0.0:
        raise ValueError("crosscheck requires eta = 0 (oracle is conservative)")
    reduced = integrate_adaptive(
        p, PhaseState(t=0.0, z=z0, phi=phi0), t_end, ctl=ctl, sample_dt=sample_dt
    )
    a1, a2 = amplitudes_from_phase(z0, phi0)
    full = integrate_twomode(
        p, TwoModeState(t=0.0, a1=a1, a2=a2), t_end, ctl=ctl, sample_dt=sample_dt
    )
    if len(reduced) != len(full) or np.max(np.abs(reduced.t - full.t)) > 1e-9:
        raise RuntimeError("integration routes produced mismatched sample grids")
    z_full, _ = project_trajectory(full)
    diff = np.abs(reduced.z - z_full)
    i = int(np.argmax(diff))
    return CrosscheckReport(
        max_abs_dz=float(diff[i]),
        t_at_max=float(reduced.t[i]),
        n_compared=len(diff),
    )
