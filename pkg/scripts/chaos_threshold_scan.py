"""Sweep the drive amplitude and track the route to chaos.

For each drive amplitude de1 the script integrates the driven junction,
collects the stroboscopic section, and reports three diagnostics per row:

    de1, lyapunov, section_spread, sign_balance

A regular orbit shows lyapunov ~ 0 and a tight section; once the islands
break up the exponent turns positive and the section fills both signs of z.
Compare the empirical threshold against the analytic curve from
`bjj stability-curve` for the same (lambda, energy, eta).
"""

import argparse
import sys

import numpy as np

from bjj.analysis import lyapunov_estimate
from bjj.integrate import sample_stroboscopic
from bjj.model import PhaseState, TrapParams


def scan_row(lam, de1, omega, z0, n_periods, horizon):
    p = TrapParams(lam=lam, de1=de1, omega=omega)
    sec = sample_stroboscopic(p, PhaseState(0.0, z0, 0.0), n_periods)
    spread = float(np.hypot(np.ptp(sec.z), np.ptp(sec.dz_dt)))
    balance = float(np.mean(sec.z > 0.0))
    lyap = lyapunov_estimate(p, z0, 0.0, horizon=horizon)
    return lyap, spread, balance


def cli() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lam", type=float, default=10.0)
    ap.add_argument("--omega-pi", type=float, default=4.0,
                    help="drive frequency in units of pi")
    ap.add_argument("--z0", type=float, default=0.5)
    ap.add_argument("--de1-min", type=float, default=0.5)
    ap.add_argument("--de1-max", type=float, default=8.0)
    ap.add_argument("--n-de1", type=int, default=16)
    ap.add_argument("--n-periods", type=int, default=1000)
    ap.add_argument("--horizon", type=float, default=300.0)
    ap.add_argument("--out", default="-")
    ns = ap.parse_args()

    omega = ns.omega_pi * np.pi
    lines = ["de1,lyapunov,section_spread,sign_balance"]
    for de1 in np.linspace(ns.de1_min, ns.de1_max, ns.n_de1):
        lyap, spread, balance = scan_row(
            ns.lam, float(de1), omega, ns.z0, ns.n_periods, ns.horizon
        )
        lines.append(f"{de1:.17g},{lyap:.17g},{spread:.17g},{balance:.17g}")
        print(lines[-1], file=sys.stderr)

    text = "\n".join(lines) + "\n"
    if ns.out == "-":
        sys.stdout.write(text)
    else:
        with open(ns.out, "w") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(cli())
