"""End-to-end physics acceptance checks.

One test per headline claim, each printing a single pass/fail line under
``pytest -v``.  The expensive strongly-driven trajectory is integrated once
in a module-scoped fixture and shared between the chaos and spectrum tests.
All random grids use fixed seeds, and the integrator is deterministic, so
every asserted number here is reproducible bit for bit.
"""

import math

import numpy as np
import pytest
from scipy.spatial import ConvexHull, cKDTree

from bjj.analysis import (
    detect_frequency_locking,
    dominant_bin,
    lyapunov_estimate,
    power_spectrum,
    time_average_z,
)
from bjj.integrate import (
    StepControl,
    integrate_adaptive,
    sample_stroboscopic,
    section_from_trajectory,
)
from bjj.model import MotionClass, PhaseState, TrapParams, classify_regime, hamiltonian
from bjj.separatrix import (
    SeparatrixFrame,
    duffing_residual,
    melnikov_closed,
    melnikov_numeric,
    separatrix_accel,
    separatrix_orbit,
    separatrix_velocity,
    stability_curve,
)
from bjj.twomode import crosscheck_max_dz

LAM = 10.0
START = PhaseState(0.0, 0.5, 0.0)
TIGHT = StepControl(abs_tol=1e-12, rel_tol=1e-12)


@pytest.fixture(scope="module")
def strong_drive_run():
    """16000 drive periods of the strongly driven junction (de1=7.5, w=4pi).

    Long enough for the orbit to equidistribute over the chaotic sea; shared
    by the sign-balance, mean and spectrum checks.
    """
    p = TrapParams(lam=LAM, de1=7.5, omega=4.0 * math.pi)
    traj = integrate_adaptive(p, START, 8000.0, sample_dt=0.0625)
    section = section_from_trajectory(traj, p.period)
    return p, traj, section


def _island_band_diameter(p_driven, n_periods=3000):
    """Diameter of the band the driven section occupies around the island.

    The reference island is the invariant curve of the undriven system
    through the same initial state.  Each stroboscopic point is reduced to
    its offset from the nearest reference point; the diameter of that offset
    set measures how far the driven orbit strays from the island.  A regular
    orbit hugs the curve (small band); once the island structure breaks up
    the offsets span the whole sea.
    """
    ref = integrate_adaptive(TrapParams(lam=LAM), START, 3.0, sample_dt=0.001)
    ref_pts = np.column_stack([ref.z, ref.dz_dt])
    tree = cKDTree(ref_pts)

    sec = sample_stroboscopic(p_driven, START, n_periods)
    pts = np.column_stack([sec.z, sec.dz_dt])
    _, idx = tree.query(pts)
    offsets = pts - ref_pts[idx]
    hull = offsets[ConvexHull(offsets).vertices]
    return float(np.sqrt(((hull[:, None, :] - hull[None, :, :]) ** 2).sum(-1)).max())


def test_c01_undriven_energy_conservation():
    p = TrapParams(lam=LAM)
    traj = integrate_adaptive(p, START, 100.0, ctl=TIGHT, sample_dt=0.05)
    h = hamiltonian(p, traj.z, traj.phi)
    assert np.ptp(h) < 1e-8


def test_c02_reduced_system_matches_two_mode_oracle():
    rng = np.random.default_rng(20260814)
    for _ in range(5):
        p = TrapParams(
            lam=rng.uniform(0.5, 6.0),
            de0=rng.uniform(-0.5, 0.5),
            de1=rng.uniform(0.0, 0.5),
            omega=rng.uniform(1.0, 6.0),
        )
        z0 = rng.uniform(-0.6, 0.6)
        phi0 = rng.uniform(-math.pi, math.pi)
        rep = crosscheck_max_dz(p, z0, phi0, t_end=50.0, sample_dt=0.05, ctl=TIGHT)
        assert rep.max_abs_dz < 1e-6


def test_c03_separatrix_solves_unperturbed_duffing():
    rng = np.random.default_rng(3)
    for _ in range(10):
        lam = rng.uniform(1.0, 8.0) * rng.choice([-1.0, 1.0])
        h = (1.0 + rng.uniform(0.1, 9.0)) / lam
        frame = SeparatrixFrame(lam=lam, h=h, c0=rng.uniform(-3.0, 3.0))
        t = (np.linspace(-10.0, 10.0, 1000) - frame.c0) / frame.kappa
        res = duffing_residual(
            TrapParams(lam=lam),
            h,
            separatrix_orbit(frame, t),
            separatrix_velocity(frame, t),
            separatrix_accel(frame, t),
        )
        assert np.abs(res).max() < 1e-8


def test_c04_melnikov_closed_form_matches_quadrature():
    rng = np.random.default_rng(4)
    for _ in range(100):
        lam = rng.uniform(1.0, 6.0) * rng.choice([-1.0, 1.0])
        h = (1.0 + rng.uniform(0.2, 6.0)) / lam
        frame = SeparatrixFrame(lam=lam, h=h, c0=rng.uniform(-2.0, 2.0))
        p = TrapParams(
            lam=lam,
            de0=rng.uniform(-1.0, 1.0),
            de1=rng.uniform(0.0, 2.0),
            omega=rng.uniform(0.3, 6.0),
            eta=rng.uniform(0.0, 0.4),
        )
        closed = melnikov_closed(frame, p)
        numeric, _ = melnikov_numeric(frame, p)
        assert abs(closed - numeric) <= 1e-6 * max(1.0, abs(numeric))
        # the static tilt drops out of the stability integral entirely
        p_flat = TrapParams(lam=lam, de1=p.de1, omega=p.omega, eta=p.eta)
        assert melnikov_closed(frame, p_flat) == closed
        numeric_flat, _ = melnikov_numeric(frame, p_flat)
        assert abs(numeric_flat - numeric) <= 1e-9 * max(1.0, abs(numeric))


def test_c05_regime_classification_and_time_averages():
    p = TrapParams(lam=LAM)
    assert classify_regime(p, 0.5, 0.0).motion is MotionClass.RABI
    assert classify_regime(p, 0.75, 0.0).motion is MotionClass.SELF_TRAPPED

    trapped = integrate_adaptive(p, PhaseState(0.0, 0.75, 0.0), 1000.0, sample_dt=0.05)
    assert np.all(trapped.z > 0.0)

    rabi = integrate_adaptive(p, START, 2000.0, sample_dt=0.05)
    assert abs(time_average_z(rabi.t, rabi.z)) < 1e-3


def test_c06_chaos_onset_under_strong_drive(strong_drive_run):
    # moderate drive: the section stays confined to the initial island
    p_mod = TrapParams(lam=LAM, de1=3.0, omega=4.0 * math.pi)
    assert _island_band_diameter(p_mod) < 0.5
    assert lyapunov_estimate(p_mod, 0.5, 0.0, horizon=1500.0) <= 0.01

    # strong drive: chaotic sea, symmetric about z=0
    p, traj, section = strong_drive_run
    assert abs(np.mean(section.z > 0.0) - 0.5) < 0.1
    assert lyapunov_estimate(p, 0.5, 0.0, horizon=400.0) > 0.05
    assert abs(time_average_z(traj.t, traj.z)) < 0.05


def test_c07_drive_destroys_localization():
    p_weak = TrapParams(lam=LAM, de1=1.0, omega=2.0 * math.pi)
    weak = integrate_adaptive(p_weak, PhaseState(0.0, 0.75, 0.0), 3000.0, sample_dt=0.125)
    assert time_average_z(weak.t, weak.z) > 0.1

    p_strong = TrapParams(lam=LAM, de1=1.7, omega=2.0 * math.pi)
    strong = integrate_adaptive(
        p_strong, PhaseState(0.0, 0.75, 0.0), 16000.0, sample_dt=0.125
    )
    assert abs(time_average_z(strong.t, strong.z)) < 0.05


def test_c08_spectrum_discrete_when_regular_continuous_when_chaotic(strong_drive_run):
    # measure the free oscillation period from upward zero crossings, then
    # resample on a grid commensurate with it so the line lands on one bin
    p = TrapParams(lam=LAM)
    fine = integrate_adaptive(p, START, 50.0, sample_dt=0.001)
    up = np.where((fine.z[:-1] < 0.0) & (fine.z[1:] >= 0.0))[0]
    tc = fine.t[up] - fine.z[up] * 0.001 / (fine.z[up + 1] - fine.z[up])
    period = (tc[-1] - tc[0]) / (len(tc) - 1)

    reg = integrate_adaptive(p, START, 128.0 * period, sample_dt=period / 64.0)
    spec = power_spectrum(reg.t[:8192], reg.z[:8192], window="rect")
    _, frac = dominant_bin(spec)
    assert frac > 0.5

    _, traj, _ = strong_drive_run
    chaotic = power_spectrum(traj.t, traj.z, window="hann")
    _, frac_chaotic = dominant_bin(chaotic)
    assert frac_chaotic < 0.2


def test_c09_weak_damping_locks_to_drive_cycles():
    p1 = TrapParams(lam=LAM, de1=3.0, omega=4.0 * math.pi, eta=0.01)
    rep1 = detect_frequency_locking(
        sample_stroboscopic(p1, START, 10000), discard_periods=4000
    )
    assert (rep1.kind, rep1.order) == ("FixedCycle", 1)
    assert rep1.transient_periods > 0

    p5 = TrapParams(lam=LAM, de1=7.5, omega=4.0 * math.pi, eta=0.01)
    rep5 = detect_frequency_locking(
        sample_stroboscopic(p5, START, 10000), discard_periods=4000
    )
    assert (rep5.kind, rep5.order) == ("FixedCycle", 5)
    assert rep5.transient_periods > 0

    p6 = TrapParams(lam=LAM, de1=1.7, omega=2.0 * math.pi, eta=0.001)
    rep6 = detect_frequency_locking(
        sample_stroboscopic(p6, PhaseState(0.0, 0.75, 0.0), 30000),
        discard_periods=16000,
    )
    assert (rep6.kind, rep6.order) == ("FixedCycle", 6)
    assert rep6.mean_z > 0.05
    assert rep6.transient_periods > 0


def test_c10_stability_curve_consistency():
    frame = SeparatrixFrame(lam=4.0, h=0.5, c0=0.0)
    curves = {
        eta: stability_curve(frame, eta, omega_min=0.5, omega_max=10.0, n_points=200)
        for eta in (0.1, 0.3, 0.5)
    }

    for eta, curve in curves.items():
        assert np.all(np.isfinite(curve.de1_critical))
        for w, de1 in zip(curve.omega, curve.de1_critical):
            p = TrapParams(lam=4.0, de1=float(de1), omega=float(w), eta=eta)
            assert abs(melnikov_closed(frame, p)) < 1e-9

    # stronger damping pushes the threshold strictly outwards everywhere
    assert np.all(
        np.abs(curves[0.3].de1_critical) > np.abs(curves[0.1].de1_critical)
    )
    assert np.all(
        np.abs(curves[0.5].de1_critical) > np.abs(curves[0.3].de1_critical)
    )

    # a single special frequency splits the domain into two threshold branches
    for curve in curves.values():
        assert curve.asymptotes == (1.0,)
        below = curve.omega < 1.0
        assert np.all(curve.de1_critical[below] < 0.0)
        assert np.all(curve.de1_critical[~below] > 0.0)
