import math

import numpy as np
import pytest

from bjj.analysis import (
    detect_frequency_locking,
    dominant_bin,
    lyapunov_estimate,
    power_spectrum,
    time_average_z,
)
from bjj.integrate import SectionPoints, default_control
from bjj.model import TrapParams


def make_section(z, dz):
    z = np.asarray(z, dtype=float)
    dz = np.asarray(dz, dtype=float)
    p = TrapParams(lam=10.0, de1=1.0, omega=2.0 * math.pi)
    n = np.arange(len(z))
    return SectionPoints(
        params=p,
        control=default_control(p),
        period=p.period,
        n=n,
        t=n * p.period,
        z=z,
        dz_dt=dz,
    )


# --- spectra ---------------------------------------------------------------


def test_pure_tone_on_bin_dominates():
    n, dt = 1024, 0.01
    t = np.arange(n) * dt
    f0 = 32 / (n * dt)
    x = 0.7 * np.sin(2 * math.pi * f0 * t)
    spec = power_spectrum(t, x, window="rect")
    freq, frac = dominant_bin(spec)
    assert freq == pytest.approx(f0, rel=1e-12)
    assert frac > 0.999
    others = np.delete(spec.power[1:], np.argmax(spec.power[1:]))
    assert spec.power[1:].max() > 1e3 * others.max()


def test_rectangular_window_satisfies_parseval():
    rng = np.random.default_rng(7)
    x = rng.normal(size=2048)
    t = np.arange(2048) * 0.05
    spec = power_spectrum(t, x, window="rect")
    y = x - x.mean()
    assert spec.power.sum() == pytest.approx(np.mean(y**2), rel=1e-10)


def test_constant_series_has_no_power():
    t = np.arange(64) * 0.1
    spec = power_spectrum(t, np.full(64, 3.7), window="rect")
    assert spec.power.sum() < 1e-25


def test_spectrum_validation():
    t = np.arange(32) * 0.1
    with pytest.raises(ValueError):
        power_spectrum(t[:8], np.zeros(8))  # too short
    with pytest.raises(ValueError):
        power_spectrum(t, np.zeros(32), window="hamming")
    tt = t.copy()
    tt[5] += 0.01
    with pytest.raises(ValueError):
        power_spectrum(tt, np.zeros(32))


def test_spectrum_shape_and_resolution():
    t = np.arange(100) * 0.25
    spec = power_spectrum(t, np.sin(t))
    assert len(spec.freqs) == 51
    assert spec.resolution == pytest.approx(1.0 / (100 * 0.25))
    assert np.all(np.diff(spec.freqs) > 0)


# --- time averages ---------------------------------------------------------


def test_time_average_over_whole_periods_vanishes():
    t = np.linspace(0.0, 8.0, 1601)  # 8 unit periods
    z = np.sin(2 * math.pi * t)
    assert abs(time_average_z(t, z)) < 1e-12


def test_time_average_discard_window():
    t = np.linspace(0.0, 10.0, 1001)
    z = np.where(t < 5.0, -1.0, 2.0)
    assert time_average_z(t, z, t_discard=5.0) == pytest.approx(2.0)
    with pytest.raises(ValueError):
        time_average_z(t, z, t_discard=10.0)


# --- frequency locking -----------------------------------------------------


def test_locks_onto_decaying_three_cycle():
    centers = np.array([[0.4, 0.0], [-0.1, 0.3], [-0.3, -0.2]])
    k = np.arange(600)
    angle = 2.4 * k
    radius = 0.5 * 0.97**k
    pts = centers[k % 3] + radius[:, None] * np.column_stack(
        [np.cos(angle), np.sin(angle)]
    )
    rep = detect_frequency_locking(
        make_section(pts[:, 0], pts[:, 1]),
        cluster_tol=1e-3,
        max_order=8,
        discard_periods=400,
    )
    assert rep.kind == "FixedCycle"
    assert rep.order == 3
    assert rep.transient_periods > 0
    assert len(rep.cluster_centers) == 3
    for got, want in zip(rep.cluster_centers, centers):
        assert np.hypot(got[0] - want[0], got[1] - want[1]) < 1e-3
    # all points past the reported transient really do stay captured
    d = np.hypot(*(pts[rep.transient_periods :] - centers[k[rep.transient_periods :] % 3]).T)
    assert np.all(d <= 1e-3 + radius[rep.transient_periods])


def test_fixed_point_locks_at_order_one_with_no_transient():
    z = np.full(200, 0.25)
    rep = detect_frequency_locking(
        make_section(z, -z), cluster_tol=1e-3, max_order=4, discard_periods=50
    )
    assert (rep.kind, rep.order, rep.transient_periods) == ("FixedCycle", 1, 0)
    assert rep.mean_z == pytest.approx(0.25)


def test_spread_cloud_is_chaotic_and_ring_is_undecided():
    rng = np.random.default_rng(3)
    big = rng.uniform(-0.8, 0.8, size=(500, 2))
    rep = detect_frequency_locking(
        make_section(big[:, 0], big[:, 1]), discard_periods=100, max_order=6
    )
    assert rep.kind == "Chaotic"
    assert rep.spread > 0.2
    theta = rng.uniform(0, 2 * math.pi, 400)
    ring = 0.05 * np.column_stack([np.cos(theta), np.sin(theta)])
    rep = detect_frequency_locking(
        make_section(ring[:, 0], ring[:, 1]), discard_periods=100, max_order=6
    )
    assert rep.kind == "Undecided"
    assert rep.transient_periods == 0


def test_order_search_is_capped():
    k = np.arange(400)
    z = 0.3 * np.cos(2 * math.pi * k * 5 / 13)
    dz = 0.3 * np.sin(2 * math.pi * k * 5 / 13)
    rep = detect_frequency_locking(
        make_section(z, dz), cluster_tol=1e-6, max_order=12, discard_periods=100
    )
    assert rep.kind != "FixedCycle"
    rep = detect_frequency_locking(
        make_section(z, dz), cluster_tol=1e-6, max_order=13, discard_periods=100
    )
    assert (rep.kind, rep.order) == ("FixedCycle", 13)


def test_locking_self_consistent_on_second_half():
    centers = np.array([[0.3, 0.1], [-0.2, -0.4]])
    k = np.arange(800)
    pts = centers[k % 2] + (0.4 * 0.98**k)[:, None]
    first = detect_frequency_locking(
        make_section(pts[:, 0], pts[:, 1]), discard_periods=500, max_order=6
    )
    second = detect_frequency_locking(
        make_section(pts[400:, 0], pts[400:, 1]), discard_periods=200, max_order=6
    )
    assert first.kind == second.kind == "FixedCycle"
    assert first.order == second.order == 2
    for a, b in zip(first.cluster_centers, second.cluster_centers):
        assert np.hypot(a[0] - b[0], a[1] - b[1]) < 1e-3


def test_insufficient_points_raise():
    z = np.zeros(50)
    with pytest.raises(ValueError):
        detect_frequency_locking(make_section(z, z), discard_periods=10, max_order=12)


# --- lyapunov --------------------------------------------------------------


def test_damped_fixed_point_has_negative_exponent():
    p = TrapParams(lam=10.0, eta=0.1)
    lam = lyapunov_estimate(p, 0.0, 0.0, horizon=100.0)
    assert lam < -0.01


def test_lyapunov_validation():
    p = TrapParams(lam=10.0)
    with pytest.raises(ValueError):
        lyapunov_estimate(p, 0.5, 0.0, d0=0.0)
    with pytest.raises(ValueError):
        lyapunov_estimate(p, 0.5, 0.0, horizon=0.1, renorm_interval=0.5)
