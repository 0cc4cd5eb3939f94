"""Two-mode mean-field model of a bosonic Josephson junction.

Two condensate modes coupled by tunneling are reduced to a pair of
conjugate variables: the fractional population imbalance ``z`` and the
relative phase ``phi``.  In time units of the inverse tunneling rate the
equations of motion are

    dz/dt   = -sqrt(1 - z^2) sin(phi)                     (- eta*z when damped)
    dphi/dt = de(t) + lam*z + z cos(phi)/sqrt(1 - z^2)

with ``lam`` the ratio of on-site interaction to tunneling energy and
``de(t) = de0 + de1*sin(omega*t)`` the (possibly modulated) tilt between
the two wells.  The undriven system conserves

    H = lam*z^2/2 + de*z - sqrt(1 - z^2) cos(phi)

and the imbalance alone behaves as a fictitious particle with energy
``(1 - H^2)/2`` in a quartic potential; that picture drives the regime
classification implemented here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import SingularityError

__all__ = [
    "Z_GUARD",
    "TOL_SEP",
    "DampingKind",
    "PhysicalParams",
    "TrapParams",
    "PhaseState",
    "EffectiveState",
    "PotentialShape",
    "MotionClass",
    "Regime",
    "SeparatrixAmplitude",
    "derive_dimensionless",
    "trap_asymmetry",
    "make_rate",
    "rhs",
    "hamiltonian",
    "effective_energy",
    "effective_potential",
    "effective_state",
    "classify_regime",
    "separatrix_amplitude",
]

#: Exclusion band around |z| = 1 where dphi/dt diverges.
Z_GUARD = 1e-12

#: Half-width of the effective-energy band classified as separatrix motion.
TOL_SEP = 1e-9


class DampingKind(enum.Enum):
    """Where phenomenological dissipation enters the reduced equations.

    POPULATION subtracts ``eta*z`` from dz/dt (direct relaxation of the
    imbalance); VELOCITY feeds ``-eta * dz/dt`` into dphi/dt, which is the
    placement that produces a plain velocity-damping term in the
    second-order (Duffing) form of the imbalance equation.
    """

    NONE = "none"
    POPULATION = "population"
    VELOCITY = "velocity"


@dataclass(frozen=True)
class PhysicalParams:
    """Raw two-well parameters before rescaling.

    e1, e2: zero-point energies of the wells; u1, u2: on-site interaction
    energies per atom pair; k: tunneling matrix element (> 0); n_total:
    total atom number.
    """

    e1: float
    e2: float
    u1: float
    u2: float
    k: float
    n_total: float


@dataclass(frozen=True)
class TrapParams:
    """Dimensionless parameters of the reduced junction equations.

    lam:    interaction-to-tunneling ratio (U * n_total / 2k).
    de0:    static tilt between the wells.
    de1:    amplitude of the sinusoidal tilt modulation.
    omega:  modulation angular frequency (time measured in tunneling units).
    eta:    damping coefficient (>= 0).
    damping: placement of the damping term, see DampingKind.
    """

    lam: float
    de0: float = 0.0
    de1: float = 0.0
    omega: float = 2.0 * math.pi
    eta: float = 0.0
    damping: DampingKind = DampingKind.POPULATION

    def __post_init__(self) -> None:
        for name in ("lam", "de0", "de1", "omega", "eta"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"TrapParams.{name} must be finite")
        if self.eta < 0.0:
            raise ValueError(f"TrapParams.eta must be >= 0, got {self.eta}")
        if self.de1 != 0.0 and self.omega <= 0.0:
            raise ValueError("TrapParams.omega must be > 0 when de1 != 0")

    @property
    def period(self) -> float:
        """Drive period 2*pi/omega."""
        return 2.0 * math.pi / self.omega

    @property
    def damped(self) -> bool:
        return self.eta > 0.0 and self.damping is not DampingKind.NONE


@dataclass(frozen=True)
class PhaseState:
    """Point of the reduced phase space at time t."""

    t: float
    z: float
    phi: float


@dataclass(frozen=True)
class EffectiveState:
    """Fictitious-particle view of a junction state.

    h is the junction energy, h_eff = (1 - h^2)/2 the energy of the
    equivalent particle whose coordinate is z, and p_z its momentum dz/dt.
    """

    h: float
    h_eff: float
    p_z: float


class PotentialShape(enum.Enum):
    DOUBLE_WELL = "DoubleWell"
    PARABOLIC = "Parabolic"


class MotionClass(enum.Enum):
    RABI = "RabiOscillation"
    SELF_TRAPPED = "SelfTrapped"
    SEPARATRIX = "Separatrix"


@dataclass(frozen=True)
class Regime:
    """Shape of the effective potential plus the class of motion in it."""

    potential_shape: PotentialShape
    motion: MotionClass
    h: float
    h_eff: float


def derive_dimensionless(phys: PhysicalParams) -> tuple[float, float]:
    """Reduce raw two-well parameters to (lam, de0).

    lam = mean interaction * n_total / (2k); de0 absorbs both the
    zero-point energy difference and the interaction asymmetry.
    """
    if phys.k <= 0.0:
        raise ValueError(f"tunneling k must be > 0, got {phys.k}")
    if phys.n_total <= 0.0:
        raise ValueError(f"n_total must be > 0, got {phys.n_total}")
    u_mean = 0.5 * (phys.u1 + phys.u2)
    lam = u_mean * phys.n_total / (2.0 * phys.k)
    de0 = (phys.e1 - phys.e2) / (2.0 * phys.k) + (
        (phys.u1 - phys.u2) * phys.n_total / (4.0 * phys.k)
    )
    return lam, de0


def trap_asymmetry(p: TrapParams, t: float) -> float:
    """Instantaneous tilt de(t) = de0 + de1*sin(omega*t)."""
    if p.de1 == 0.0:
        return p.de0
    return p.de0 + p.de1 * math.sin(p.omega * t)


RateFn = Callable[[float, tuple[float, float]], tuple[float, float]]


def make_rate(p: TrapParams) -> RateFn:
    """Bind parameters into a fast rate function ``f(t, (z, phi))``.

    This closure is the single source of the equations of motion; the
    integrators call it directly and :func:`rhs` wraps it for scalar use.
    Raises SingularityError when |z| enters the Z_GUARD band around 1.
    """
    lam = p.lam
    de0 = p.de0
    de1 = p.de1
    omega = p.omega
    eta = p.eta
    sin = math.sin
    cos = math.cos
    sqrt = math.sqrt
    guard = 1.0 - Z_GUARD

    damp_z = eta if (eta > 0.0 and p.damping is DampingKind.POPULATION) else 0.0
    damp_v = eta if (eta > 0.0 and p.damping is DampingKind.VELOCITY) else 0.0

    if de1 == 0.0:

        def rate(t: float, y: tuple[float, float]) -> tuple[float, float]:
            z, phi = y
            if z > guard or z < -guard:
                raise SingularityError(t, z)
            root = sqrt(1.0 - z * z)
            dz = -root * sin(phi)
            dphi = de0 + lam * z + (z / root) * cos(phi)
            if damp_v:
                dphi -= damp_v * dz
            if damp_z:
                dz -= damp_z * z
            return dz, dphi

    else:

        def rate(t: float, y: tuple[float, float]) -> tuple[float, float]:
            z, phi = y
            if z > guard or z < -guard:
                raise SingularityError(t, z)
            root = sqrt(1.0 - z * z)
            dz = -root * sin(phi)
            dphi = de0 + de1 * sin(omega * t) + lam * z + (z / root) * cos(phi)
            if damp_v:
                dphi -= damp_v * dz
            if damp_z:
                dz -= damp_z * z
            return dz, dphi

    return rate


def rhs(p: TrapParams, s: PhaseState) -> tuple[float, float]:
    """Time derivatives (dz/dt, dphi/dt) at a single state."""
    return make_rate(p)(s.t, (s.z, s.phi))


def hamiltonian(p: TrapParams, z: float, phi: float, t: float = 0.0) -> float:
    """Junction energy H = lam*z^2/2 + de(t)*z - sqrt(1-z^2) cos(phi).

    Conserved along trajectories when the tilt is constant and eta = 0.
    """
    if np.any(np.abs(z) > 1.0):
        raise ValueError(f"|z| must be <= 1, got {z}")
    de = trap_asymmetry(p, t)
    return 0.5 * p.lam * z * z + de * z - np.sqrt(1.0 - z * z) * np.cos(phi)


def effective_energy(h: float) -> float:
    """Energy (1 - h^2)/2 of the fictitious particle at junction energy h."""
    return 0.5 * (1.0 - h * h)


def effective_potential(
    p: TrapParams, h: float, z: float, de: float | None = None
) -> float:
    """Quartic potential governing the imbalance as a fictitious particle.

    V(z) = z^2 (1 - lam*h + lam^2 z^2 / 4) / 2
           + de*lam*z^3/2 + de^2 z^2/2 - de*h*z

    ``de`` is the instantaneous tilt; defaults to the static part p.de0.
    The identity (dz/dt)^2/2 + V(z) = (1 - h^2)/2 holds on trajectories of
    the undamped system with constant tilt.
    """
    if de is None:
        de = p.de0
    lam = p.lam
    z2 = z * z
    symmetric = 0.5 * z2 * (1.0 - lam * h + 0.25 * lam * lam * z2)
    tilt = 0.5 * de * lam * z2 * z + 0.5 * de * de * z2 - de * h * z
    return symmetric + tilt


def effective_state(
    p: TrapParams, z: float, phi: float, t: float = 0.0
) -> EffectiveState:
    """Map a junction state to the fictitious-particle variables."""
    h = hamiltonian(p, z, phi, t)
    p_z, _ = rhs(p, PhaseState(t=t, z=z, phi=phi))
    return EffectiveState(h=h, h_eff=effective_energy(h), p_z=p_z)


def classify_regime(p: TrapParams, z0: float, phi0: float) -> Regime:
    """Classify the undriven, undamped motion started from (z0, phi0).

    Uses the tilt at t=0 for the energy; the shape test 1 - lam*h < 0
    (double well vs. single parabolic-bottom well) and the sign of the
    fictitious-particle energy split the plane into Rabi-like oscillation
    (h_eff > 0, symmetric sweep), self-trapped motion (h_eff < 0, the
    particle is confined to one well) and the separatrix band between.
    """
    h = hamiltonian(p, z0, phi0, t=0.0)
    h_eff = effective_energy(h)
    shape = (
        PotentialShape.DOUBLE_WELL
        if 1.0 - p.lam * h < 0.0
        else PotentialShape.PARABOLIC
    )
    if h_eff > TOL_SEP:
        motion = MotionClass.RABI
    elif abs(h_eff) <= TOL_SEP:
        motion = MotionClass.SEPARATRIX
    elif shape is PotentialShape.DOUBLE_WELL:
        motion = MotionClass.SELF_TRAPPED
    else:
        # h_eff < 0 in a single-well potential is only reachable with a
        # strong static tilt; trapping there is by the tilt, not by the
        # interaction, and is outside this classification.
        raise ValueError(
            "state has negative fictitious-particle energy in a single-well "
            "potential (strong static tilt); classification not defined"
        )
    return Regime(potential_shape=shape, motion=motion, h=h, h_eff=h_eff)


@dataclass(frozen=True)
class SeparatrixAmplitude:
    """Peak imbalance of the separatrix orbit and its validity flags.

    amplitude:    2*sqrt((lam*h - 1)/lam^2), the top of the homoclinic loop.
    well_minimum: imbalance at the bottom of the well, amplitude/sqrt(2);
                  the full two-regime phase portrait requires it <= 1, with
                  equality meaning complete localization.
    mqst_only:    amplitude > 1 — the separatrix would exceed the physical
                  band, so only self-trapped motion exists at this energy.
    """

    amplitude: float
    well_minimum: float
    mqst_only: bool

    @property
    def full_portrait(self) -> bool:
        return self.well_minimum <= 1.0


def separatrix_amplitude(lam: float, h: float) -> SeparatrixAmplitude:
    """Amplitude of the separatrix orbit at junction energy h (lam*h > 1)."""
    excess = lam * h - 1.0
    if excess <= 0.0:
        raise ValueError(
            f"separatrix requires lam*h > 1, got lam*h = {lam * h!r}"
        )
    amplitude = 2.0 * math.sqrt(excess / (lam * lam))
    return SeparatrixAmplitude(
        amplitude=amplitude,
        well_minimum=amplitude / math.sqrt(2.0),
        mqst_only=amplitude > 1.0,
    )
