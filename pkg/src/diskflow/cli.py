"""Command-line entry point: tables, simulations, sweeps, verification.

Every command writes a manifest.json echoing the fully resolved
configuration next to its outputs, and all CSV/JSON output is
deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .basis import StokesBasis, stokes_basis
from .bessel import zero_table
from .diagnostics import (CONDITION_KINDS, LEMMA_IDS, ScheduleSpec,
                          condition_functional, verify_lemma, vv_gap)
from .field import SpectralCoeffs
from .solver import SimConfig, simulate

SWEEP_KINDS = CONDITION_KINDS + ("gap",)


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return str(x)


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(header)
        for row in rows:
            wr.writerow([_fmt(v) for v in row])


def _write_manifest(outdir: Path, command: str, config: dict) -> None:
    doc = {"command": command, "config": config, "version": __version__}
    (outdir / "manifest.json").write_text(
        json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _load_config(args) -> dict:
    if not args.config:
        return {}
    p = Path(args.config)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc


def _expect(cfg: dict, key: str, types, default=None, required=False):
    if key not in cfg:
        if required:
            raise ConfigError(f"config key {key!r} is required")
        return default
    val = cfg[key]
    if not isinstance(val, types):
        raise ConfigError(f"config key {key!r} has wrong type: {type(val).__name__}")
    return val


def _resolve_init(spec, outbase: Path | None = None):
    if isinstance(spec, str):
        return spec
    if isinstance(spec, dict) and "file" in spec:
        p = Path(spec["file"])
        if outbase is not None and not p.is_absolute():
            p = outbase / p
        return SpectralCoeffs.from_dict(json.loads(p.read_text()))
    raise ConfigError("init must be a preset name or {'file': path}")


def _sim_config(cfg: dict, seed_override=None, base: Path | None = None) -> SimConfig:
    init = _resolve_init(_expect(cfg, "init", (str, dict), "radial-1"), base)
    dt = _expect(cfg, "dt", (int, float), None)
    return SimConfig(
        nu=float(_expect(cfg, "nu", (int, float), required=True)),
        t_end=float(_expect(cfg, "t_end", (int, float), required=True)),
        n_theta=int(_expect(cfg, "n_theta", int, required=True)),
        n_r=int(_expect(cfg, "n_r", int, required=True)),
        dt=float(dt) if dt is not None else None,
        init=init,
        linear=bool(_expect(cfg, "linear", bool, False)),
        seed=int(seed_override if seed_override is not None
                 else _expect(cfg, "seed", int, 0)),
        amplitude=float(_expect(cfg, "amplitude", (int, float), 0.1)),
        sample_stride=int(_expect(cfg, "sample_stride", int, 1)),
    )


def cmd_zeros(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    n_max, k_max = args.n_max, args.k_max
    if n_max < 0 or k_max < 0:
        print("zeros: bounds must be nonnegative", file=sys.stderr)
        return 2
    rows = []
    if k_max >= 1:
        tab = zero_table(n_max, k_max)
        for n in range(n_max + 1):
            for k in range(1, k_max + 1):
                rows.append((n, k, tab.zero(n, k)))
    _write_csv(outdir / "zeros.csv", ("n", "k", "zero"), rows)
    _write_manifest(outdir, "zeros", {"n_max": n_max, "k_max": k_max})
    print(f"wrote {outdir / 'zeros.csv'} ({len(rows)} rows)")
    return 0


def cmd_basis(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    bas = StokesBasis(args.n_max, args.k_max)
    rows = []
    for n in range(args.n_max + 1):
        for k in range(1, args.k_max + 1):
            p = bas.pair(n, k)
            rows.append((n, k, p.lam, p.alpha, p.beta, p.c_norm, p.d_const))
    _write_csv(outdir / "basis.csv",
               ("n", "k", "lambda", "alpha", "beta", "c_norm", "d_const"), rows)
    _write_manifest(outdir, "basis", {"n_max": args.n_max, "k_max": args.k_max})
    print(f"wrote {outdir / 'basis.csv'} ({len(rows)} rows)")
    return 0


def cmd_simulate(args) -> int:
    cfg = _load_config(args)
    if not cfg:
        raise ConfigError("simulate requires --config")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    sim = _sim_config(cfg, args.seed, Path(args.config).parent)
    snap_stride = int(_expect(cfg, "snapshot_stride", int, 0))
    trace = simulate(sim)
    rows = [
        (trace.times[i], trace.u_norm_sq[i], trace.w_norm_sq[i],
         trace.visc_cum[i], trace.energy_in[i], trace.flux[i])
        for i in range(trace.n_samples)
    ]
    _write_csv(outdir / "trace.csv",
               ("time", "u_norm_sq", "w_norm_sq", "visc_cum", "energy_in", "flux"),
               rows)
    snaps = []
    if snap_stride > 0:
        for i in range(0, trace.n_samples, snap_stride):
            snaps.append(trace.coeffs_at(i).to_dict())
        if (trace.n_samples - 1) % snap_stride:
            snaps.append(trace.coeffs_at(trace.n_samples - 1).to_dict())
    (outdir / "snapshots.json").write_text(
        json.dumps({"snapshots": snaps}, sort_keys=True) + "\n")
    manifest_cfg = dict(cfg)
    manifest_cfg["seed"] = sim.seed
    _write_manifest(outdir, "simulate", manifest_cfg)
    status = "FAILED: " + trace.message if trace.failed else "ok"
    print(f"wrote {outdir / 'trace.csv'} ({trace.n_samples} samples) [{status}]")
    return 1 if trace.failed else 0


def _sweep_point(payload: dict) -> dict:
    """Evaluate one viscosity of a sweep; runs in a worker process."""
    sim_cfg = dict(payload["sim"])
    sim_cfg["nu"] = payload["nu"]
    sim = _sim_config(sim_cfg, payload["seed"], None)
    schedule = ScheduleSpec(**payload["schedule"])
    basis = stokes_basis(sim.n_theta, sim.n_r)
    out = {"nu": payload["nu"], "values": {}, "error": ""}
    try:
        trace = simulate(sim, basis)
        if trace.failed:
            raise RuntimeError(trace.message)
        for kind in payload["kinds"]:
            if kind == "gap":
                if isinstance(sim.init, SpectralCoeffs):
                    ref = sim.init
                else:
                    from .solver import make_initial
                    ref = make_initial(sim.init, sim.n_theta, sim.n_r,
                                       seed=sim.seed, amplitude=sim.amplitude)
                out["values"][kind] = vv_gap(trace, ref, basis)
            else:
                out["values"][kind] = condition_functional(
                    trace, kind, schedule, basis)
    except Exception as exc:  # per-point failures recorded, sweep continues
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    if not cfg:
        raise ConfigError("sweep requires --config")
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    nu_list = _expect(cfg, "nu_list", list, required=True)
    if not nu_list or any(not isinstance(v, (int, float)) or v <= 0 for v in nu_list):
        raise ConfigError("nu_list must be a nonempty list of positive numbers")
    if any(b >= a for a, b in zip(nu_list, nu_list[1:])):
        raise ConfigError("nu_list must be strictly decreasing")
    kinds = _expect(cfg, "kinds", list, required=True)
    for kind in kinds:
        if kind not in SWEEP_KINDS:
            raise ConfigError(f"unknown condition kind {kind!r}; "
                              f"valid: {', '.join(SWEEP_KINDS)}")
    sched_cfg = _expect(cfg, "schedule", dict, {})
    schedule = ScheduleSpec(**{k: float(v) for k, v in sched_cfg.items()})
    if len(nu_list) >= 2 and set(kinds) - {"gap", "K1"}:
        schedule.validate_sweep(nu_list)
    sim_cfg = _expect(cfg, "sim", dict, required=True)
    seed = args.seed if args.seed is not None else int(sim_cfg.get("seed", 0))

    payloads = [{"nu": float(nu), "kinds": kinds, "sim": sim_cfg,
                 "schedule": schedule.__dict__, "seed": seed}
                for nu in nu_list]
    if args.threads > 1:
        with ProcessPoolExecutor(max_workers=args.threads) as pool:
            results = list(pool.map(_sweep_point, payloads))
    else:
        results = [_sweep_point(p) for p in payloads]

    rows = []
    failures = {}
    for res in results:
        nu = res["nu"]
        L, M, delta = schedule.L(nu), schedule.M(nu), schedule.delta(nu)
        if res["error"]:
            failures[repr(nu)] = res["error"]
        for kind in kinds:
            val = res["values"].get(kind, float("nan"))
            rows.append((nu, kind, val, L, M, delta, schedule.c))
    _write_csv(outdir / "diagnostics.csv",
               ("nu", "kind", "value", "L", "M", "delta", "c"), rows)
    manifest_cfg = dict(cfg)
    manifest_cfg["seed"] = seed
    manifest_cfg["schedule"] = schedule.__dict__
    manifest_cfg["failures"] = failures
    _write_manifest(outdir, "sweep", manifest_cfg)
    n_ok = len(results) - len(failures)
    print(f"wrote {outdir / 'diagnostics.csv'} ({n_ok}/{len(results)} points ok)")
    return 0 if n_ok else 2


def cmd_verify(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    ids = LEMMA_IDS if args.lemmas == "all" else tuple(args.lemmas.split(","))
    bad = [i for i in ids if i not in LEMMA_IDS]
    if bad:
        print(f"verify: unknown lemma ids {bad}; valid: {', '.join(LEMMA_IDS)}",
              file=sys.stderr)
        return 2
    rows = []
    summary = {}
    all_pass = True
    for lid in ids:
        rep = verify_lemma(lid, args.n_max, args.k_max)
        for row in rep.csv_rows():
            rows.append((row["lemma"], row["n"], row["k"], row["param"],
                         row["observed"], row["bound"], row["margin"]))
        summary[lid] = {
            "passed": rep.passed,
            "worst_margin": rep.worst_margin,
            "constant": rep.constant,
            **{k: v for k, v in rep.extra.items()},
        }
        if rep.passed is False:
            all_pass = False
        verdict = {True: "pass", False: "FAIL", None: "report"}[rep.passed]
        cinfo = f" C={rep.constant:.4g}" if rep.constant is not None else ""
        print(f"{lid:28s} {verdict:7s} worst margin {rep.worst_margin:+.3e}{cinfo}")
    _write_csv(outdir / "lemmas.csv",
               ("lemma", "n", "k", "param", "observed", "bound", "margin"), rows)
    (outdir / "summary.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")
    _write_manifest(outdir, "verify",
                    {"lemmas": list(ids), "n_max": args.n_max, "k_max": args.k_max})
    return 0 if all_pass else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="diskflow",
        description="Spectral flow solver and boundary-layer diagnostics "
                    "on the unit disk")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--threads", type=int, default=1, help="worker count")

    p = sub.add_parser("zeros", help="tabulate positive zeros of J_n")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_zeros)

    p = sub.add_parser("basis", help="tabulate eigenvalues and mode constants")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--k-max", type=int, required=True)
    common(p)
    p.set_defaults(fn=cmd_basis)

    p = sub.add_parser("simulate", help="run one simulation from a config")
    common(p)
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("sweep", help="run a viscosity sweep from a config")
    common(p)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("verify", help="run the inequality verification suite")
    p.add_argument("--lemmas", default="all",
                   help="comma-separated lemma ids or 'all'")
    p.add_argument("--n-max", type=int, default=50)
    p.add_argument("--k-max", type=int, default=50)
    common(p)
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError) as exc:
        print(f"diskflow {args.command}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
