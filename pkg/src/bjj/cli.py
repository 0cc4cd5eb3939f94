"""Command-line front end.

Subcommands produce plain-data output (CSV with ``# key=value`` metadata
lines, or JSON embedding the same resolved configuration) so any plotting
tool can consume them.  Exit codes: 0 success, 1 configuration/input error,
2 runtime failure (singular state, step underflow, quadrature failure).

Output is deterministic: same inputs give byte-identical output, and the
metadata echo of a run is itself a valid config file reproducing the run.
"""

from __future__ import annotations

import argparse
import bisect
import math
import sys
from pathlib import Path

import numpy as np

from . import analysis, separatrix, twomode
from .config import RunConfig, fmt, merge_sources, parse_config, parse_kv_text
from .errors import BjjError, ConfigError, QuadratureError, SingularityError, StepUnderflowError
from .integrate import integrate_adaptive, sample_stroboscopic
from .model import classify_regime, effective_potential, hamiltonian

__all__ = ["main", "console_main"]


# --------------------------------------------------------------------------
# serialization helpers


def _csv_text(cfg: RunConfig, header: str, rows: list[tuple]) -> str:
    lines = cfg.metadata_lines()
    lines.append(header)
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _json_value(value: object, indent: int) -> str:
    pad = "  " * indent
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return fmt(x) if math.isfinite(x) else f'"{fmt(x)}"'
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        inner = ",\n".join("  " * (indent + 1) + _json_value(v, indent + 1) for v in value)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(value, dict):
        if not value:
            return "{}"
        inner = ",\n".join(
            f'{"  " * (indent + 1)}"{k}": {_json_value(v, indent + 1)}'
            for k, v in value.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _json_text(payload: dict, cfg: RunConfig) -> str:
    payload = dict(payload)
    payload["config"] = dict(cfg.metadata_values())
    return _json_value(payload, 0) + "\n"


# --------------------------------------------------------------------------
# configuration assembly


def _find_preset(name: str) -> Path:
    tried: list[Path] = []
    candidates = [Path(name)]
    if not name.endswith(".cfg"):
        candidates.append(Path(name + ".cfg"))
    for base in (Path.cwd() / "presets", Path(__file__).resolve().parents[2] / "presets"):
        stem = name if name.endswith(".cfg") else name + ".cfg"
        candidates.append(base / stem)
    for cand in candidates:
        if cand.is_file():
            return cand
        tried.append(cand)
    raise ConfigError(
        f"preset '{name}' not found; tried: " + ", ".join(str(p) for p in tried)
    )


# (flag, config key, argparse kwargs)
_OVERRIDES: list[tuple[str, str, dict]] = [
    ("--lambda", "lambda", dict(type=float)),
    ("--de0", "de0", dict(type=float)),
    ("--de1", "de1", dict(type=float)),
    ("--omega", "omega", dict(type=float)),
    ("--omega-pi", "omega_pi", dict(type=float)),
    ("--eta", "eta", dict(type=float)),
    ("--damping", "damping", dict(choices=["population", "velocity", "none"])),
    ("--z0", "z0", dict(type=float)),
    ("--phi0", "phi0", dict(type=float)),
    ("--t-end", "t_end", dict(type=float)),
    ("--n-periods", "n_periods", dict(type=int)),
    ("--sample-dt", "sample_dt", dict(type=float)),
    ("--discard", "discard", dict(type=int)),
    ("--abs-tol", "abs_tol", dict(type=float)),
    ("--rel-tol", "rel_tol", dict(type=float)),
    ("--h-init", "h_init", dict(type=float)),
    ("--h-min", "h_min", dict(type=float)),
    ("--h-max", "h_max", dict(type=float)),
    ("--safety", "safety", dict(type=float)),
    ("--window", "window", dict(choices=["rect", "hann"])),
    ("--cluster-tol", "cluster_tol", dict(type=float)),
    ("--max-order", "max_order", dict(type=int)),
    ("--chaos-spread-min", "chaos_spread_min", dict(type=float)),
    ("--d0", "d0", dict(type=float)),
    ("--renorm-interval", "renorm_interval", dict(type=float)),
    ("--horizon", "horizon", dict(type=float)),
    ("--energy", "energy", dict(type=float)),
    ("--c0", "c0", dict(type=float)),
    ("--xi-max", "xi_max", dict(type=float)),
    ("--omega-min", "omega_min", dict(type=float)),
    ("--omega-max", "omega_max", dict(type=float)),
    ("--n-points", "n_points", dict(type=int)),
    ("--z-min", "z_min", dict(type=float)),
    ("--z-max", "z_max", dict(type=float)),
    ("--n-z", "n_z", dict(type=int)),
]


def _flag_overrides(args: argparse.Namespace) -> dict[str, object]:
    out: dict[str, object] = {}
    for _, key, _kw in _OVERRIDES:
        value = getattr(args, f"ov_{key}")
        if value is not None:
            if key == "omega_pi" and "omega" in out:
                raise ConfigError("set exactly one of --omega / --omega-pi")
            if key == "omega" and "omega_pi" in out:
                raise ConfigError("set exactly one of --omega / --omega-pi")
            out[key] = value
    return out


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    sources: list[dict[str, object]] = []
    if args.preset is not None:
        sources.append(parse_config(_find_preset(args.preset)))
    if args.config is not None:
        sources.append(parse_config(args.config))
    sources.append(_flag_overrides(args))
    merged = merge_sources(*sources)
    cfg = RunConfig.from_values(merged)
    _apply_profile(cfg, args.command, explicit=set(merged))
    cfg.validate()
    return cfg


def _apply_profile(cfg: RunConfig, command: str, explicit: set[str]) -> None:
    """Fill subcommand-specific defaults; reject keys a subcommand cannot honor."""
    period_commands = {"poincare", "attractor"}
    if command in period_commands:
        if cfg.t_end is not None:
            raise ConfigError(f"'{command}' counts its horizon in drive periods; use n_periods")
        if cfg.de1 == 0.0:
            raise ConfigError(f"'{command}' needs a modulated tilt (de1 != 0)")
    if command == "simulate" and cfg.t_end is None and cfg.n_periods is None:
        cfg.t_end = 100.0
    elif command == "poincare" and cfg.n_periods is None:
        cfg.n_periods = 5000
    elif command == "attractor":
        if cfg.n_periods is None:
            cfg.n_periods = 10000 if cfg.eta > 0.0 else 5000
        if "discard" not in explicit:
            cfg.discard = 2000
    elif command == "spectrum":
        if cfg.t_end is None and cfg.n_periods is None:
            if cfg.de1 != 0.0:
                cfg.n_periods = 1000
            else:
                cfg.t_end = 100.0
        if cfg.sample_dt is None:
            cfg.sample_dt = cfg.period / 16.0 if cfg.de1 != 0.0 else 0.1
        if cfg.de1 == 0.0 and cfg.discard > 0:
            raise ConfigError("'discard' counts drive periods; it needs de1 != 0")
    elif command == "crosscheck":
        if cfg.eta != 0.0:
            raise ConfigError("crosscheck requires eta=0 (the mode-pair form is undamped)")
        if cfg.t_end is None and cfg.n_periods is None:
            cfg.t_end = 50.0
        if cfg.sample_dt is None:
            cfg.sample_dt = 0.05
    elif command in {"melnikov", "stability-curve", "potential"}:
        if cfg.energy is None:
            raise ConfigError(f"'{command}' requires 'energy' (junction energy h)")
    elif command == "lyapunov" and cfg.t_end is None and cfg.n_periods is None:
        cfg.t_end = cfg.horizon


# --------------------------------------------------------------------------
# subcommand handlers


def _cmd_simulate(cfg: RunConfig) -> str:
    traj = integrate_adaptive(
        cfg.trap, cfg.state0, cfg.resolved_t_end(), ctl=cfg.control(), sample_dt=cfg.sample_dt
    )
    rows = list(zip(traj.t, traj.z, traj.phi, traj.dz_dt))
    return _csv_text(cfg, "t,z,phi,dzdt", rows)


def _cmd_poincare(cfg: RunConfig) -> str:
    sec = sample_stroboscopic(cfg.trap, cfg.state0, cfg.n_periods, ctl=cfg.control())
    rows = list(zip(sec.n, sec.z, sec.dz_dt))
    return _csv_text(cfg, "n,z,dzdt", rows)


def _cmd_spectrum(cfg: RunConfig) -> str:
    traj = integrate_adaptive(
        cfg.trap, cfg.state0, cfg.resolved_t_end(), ctl=cfg.control(), sample_dt=cfg.sample_dt
    )
    t_start = cfg.discard * cfg.period
    keep = traj.t >= t_start - 1e-9 * cfg.sample_dt
    if int(np.count_nonzero(keep)) < 4:
        raise ConfigError("discard leaves fewer than 4 samples for the spectrum")
    spec = analysis.power_spectrum(traj.t[keep], traj.z[keep], window=cfg.window)
    rows = list(zip(spec.freqs, spec.power))
    return _csv_text(cfg, "freq,power", rows)


def _cmd_attractor(cfg: RunConfig) -> str:
    sec = sample_stroboscopic(cfg.trap, cfg.state0, cfg.n_periods, ctl=cfg.control())
    rep = analysis.detect_frequency_locking(
        sec,
        cluster_tol=cfg.cluster_tol,
        max_order=cfg.max_order,
        discard_periods=cfg.discard,
        chaos_spread_min=cfg.chaos_spread_min,
    )
    centers = None
    if rep.cluster_centers is not None:
        centers = [[float(z), float(dz)] for z, dz in rep.cluster_centers]
    payload = {
        "kind": rep.kind,
        "order": rep.order,
        "mean_z": rep.mean_z,
        "transient_periods": rep.transient_periods,
        "spread": rep.spread,
        "n_sections": len(sec.n),
        "centers": centers,
    }
    return _json_text(payload, cfg)


def _cmd_melnikov(cfg: RunConfig) -> str:
    frame = separatrix.SeparatrixFrame(lam=cfg.lam, h=cfg.energy, c0=cfg.c0)
    closed = separatrix.melnikov_closed(frame, cfg.trap)
    numeric, abserr = separatrix.melnikov_numeric(frame, cfg.trap, xi_max=cfg.xi_max)
    payload = {
        "kappa": frame.kappa,
        "amplitude": frame.amplitude,
        "asymptote_omega": separatrix.asymptote_frequency(frame),
        "drive_coefficient": separatrix.drive_coefficient(frame, cfg.omega),
        "melnikov_closed": closed,
        "melnikov_numeric": numeric,
        "numeric_abserr": abserr,
    }
    return _json_text(payload, cfg)


def _cmd_stability_curve(cfg: RunConfig) -> str:
    frame = separatrix.SeparatrixFrame(lam=cfg.lam, h=cfg.energy, c0=cfg.c0)
    curve = separatrix.stability_curve(
        frame,
        cfg.eta,
        omega_min=cfg.omega_min,
        omega_max=cfg.omega_max,
        n_points=cfg.n_points,
    )
    # Grid points that land exactly on a pole evaluate to inf; drop them in
    # favour of the dedicated asymptote rows appended below.
    rows = [
        (float(w), float(d), int(b))
        for w, d, b in zip(curve.omega, curve.de1_critical, curve.branch)
        if math.isfinite(d)
    ]
    for a in curve.asymptotes:
        rows.append((float(a), math.inf, bisect.bisect_left(list(curve.asymptotes), a)))
    rows.sort(key=lambda r: (r[0], 0 if math.isinf(r[1]) else 1))
    return _csv_text(cfg, "omega,de1_critical,branch", rows)


def _cmd_potential(cfg: RunConfig) -> str:
    z = np.linspace(cfg.z_min, cfg.z_max, cfg.n_z)
    v = effective_potential(cfg.trap, cfg.energy, z)
    rows = list(zip(z, v))
    return _csv_text(cfg, "z,V", rows)


def _cmd_crosscheck(cfg: RunConfig) -> str:
    rep = twomode.crosscheck_max_dz(
        cfg.trap,
        cfg.z0,
        cfg.phi0,
        t_end=cfg.resolved_t_end(),
        sample_dt=cfg.sample_dt,
        ctl=cfg.control(),
    )
    payload = {
        "max_abs_dz": rep.max_abs_dz,
        "t_at_max": rep.t_at_max,
        "n_compared": rep.n_compared,
    }
    return _json_text(payload, cfg)


def _cmd_classify(cfg: RunConfig) -> str:
    regime = classify_regime(cfg.trap, cfg.z0, cfg.phi0)
    payload = {
        "kind": regime.motion.value,
        "potential_shape": regime.potential_shape.value,
        "h": regime.h,
        "h_eff": regime.h_eff,
    }
    return _json_text(payload, cfg)


def _cmd_lyapunov(cfg: RunConfig) -> str:
    exponent = analysis.lyapunov_estimate(
        cfg.trap,
        cfg.z0,
        cfg.phi0,
        ctl=cfg.control(),
        horizon=cfg.horizon,
        renorm_interval=cfg.renorm_interval,
        d0=cfg.d0,
    )
    payload = {
        "exponent": exponent,
        "h_initial": hamiltonian(cfg.trap, cfg.z0, cfg.phi0, t=0.0),
    }
    return _json_text(payload, cfg)


_HANDLERS = {
    "simulate": _cmd_simulate,
    "poincare": _cmd_poincare,
    "spectrum": _cmd_spectrum,
    "attractor": _cmd_attractor,
    "melnikov": _cmd_melnikov,
    "stability-curve": _cmd_stability_curve,
    "potential": _cmd_potential,
    "crosscheck": _cmd_crosscheck,
    "classify": _cmd_classify,
    "lyapunov": _cmd_lyapunov,
}

_HELP = {
    "simulate": "integrate the junction equations and emit t,z,phi,dzdt",
    "poincare": "stroboscopic section at the drive period (n,z,dzdt)",
    "spectrum": "one-sided power spectrum of z(t) (freq,power)",
    "attractor": "classify the long-time stroboscopic set (JSON)",
    "melnikov": "separatrix stability integral, closed form and quadrature (JSON)",
    "stability-curve": "critical modulation amplitude vs frequency (CSV)",
    "potential": "effective potential scan V(z) at fixed junction energy (CSV)",
    "crosscheck": "compare the reduced equations against the mode-pair form (JSON)",
    "classify": "regime of an initial condition (JSON)",
    "lyapunov": "largest Lyapunov exponent estimate (JSON)",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="bjj", description="coupled-condensate junction toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in _HANDLERS.items():
        p = sub.add_parser(name, help=_HELP[name])
        p.set_defaults(handler=handler)
        src = p.add_mutually_exclusive_group()
        src.add_argument("--config", metavar="PATH", help="key=value config file")
        src.add_argument("--preset", metavar="NAME", help="named preset (presets/NAME.cfg)")
        p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
        for flag, key, kwargs in _OVERRIDES:
            p.add_argument(flag, dest=f"ov_{key}", default=None, **kwargs)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        cfg = _resolve_config(args)
        text = args.handler(cfg)
        if args.out is not None:
            try:
                Path(args.out).write_text(text)
            except OSError as exc:
                raise ConfigError(f"cannot write {args.out}: {exc}") from None
        else:
            sys.stdout.write(text)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SingularityError, StepUnderflowError, QuadratureError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    except BjjError as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return 2
    return 0


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
