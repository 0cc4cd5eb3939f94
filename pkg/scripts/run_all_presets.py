"""Run every bundled preset through its natural subcommand.

Writes one output file per preset into --out-dir.  With --quick the heavy
section/attractor presets run at reduced horizons, which is enough to check
that every preset is wired correctly; full-length runs reproduce the bundled
figure data and take a few minutes in total.
"""

import argparse
import pathlib
import sys

from bjj.cli import main as bjj_main

SUBCOMMAND = {
    "fig1": "potential",
    "fig3": "stability-curve",
    "fig4": "simulate",
    "fig5": "poincare",
    "fig6": "poincare",
    "fig7": "spectrum",
    "fig8": "attractor",
    "fig9": "attractor",
}

QUICK_FLAGS = {
    "poincare": ["--n-periods", "200"],
    "spectrum": ["--n-periods", "100"],
    "attractor": ["--n-periods", "400", "--discard", "100"],
}

EXT = {"attractor": "json"}


def run(preset: pathlib.Path, out_dir: pathlib.Path, quick: bool) -> int:
    stem = preset.stem
    sub = next(v for k, v in SUBCOMMAND.items() if stem.startswith(k))
    out = out_dir / f"{stem}.{EXT.get(sub, 'csv')}"
    args = [sub, "--preset", str(preset), "--out", str(out)]
    if quick:
        args += QUICK_FLAGS.get(sub, [])
    print(f"{stem:>16s}  ->  {sub:<15s} {out}")
    return bjj_main(args)


def cli() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--presets", default="presets", type=pathlib.Path)
    ap.add_argument("--out-dir", default="preset_outputs", type=pathlib.Path)
    ap.add_argument("--quick", action="store_true", help="reduced horizons")
    ns = ap.parse_args()

    ns.out_dir.mkdir(parents=True, exist_ok=True)
    failures = 0
    for preset in sorted(ns.presets.glob("*.cfg")):
        code = run(preset, ns.out_dir, ns.quick)
        if code != 0:
            print(f"  FAILED (exit {code})", file=sys.stderr)
            failures += 1
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(cli())
