"""Command-line front end: list, verify, trace, sweep.

Every run that writes files also writes a manifest.json describing the
resolved inputs and outputs, so a run can be reproduced exactly. Exit
codes for verify: 0 verdict pass, 1 verdict fail, 2 construction or
parameter error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__, catalog
from .catalog import FamilyParams
from .errors import FlowmapsError
from .invariants import GridSpec, Tolerances, verify_candidate
from .kinematics import isopycnal_curve, particle_path, write_path_csv

__all__ = ["main"]


def _preset_path(name: str):
    base = resources.files("flowmaps") / "presets"
    for cand in (base / f"{name}.toml", base / "families" / f"{name}.toml"):
        if cand.is_file():
            return cand
    raise FileNotFoundError(f"no preset named {name!r}")


def _load_input(args) -> dict:
    """Resolve the parameter dict from --preset, --family, or a file."""
    sources = [bool(args.params_file), bool(args.preset), bool(args.family)]
    if sum(sources) != 1:
        raise ValueError("give exactly one of PARAMS file, --preset, or --family")
    if args.params_file:
        data = catalog.load_params_file(args.params_file)
    elif args.preset:
        with resources.as_file(_preset_path(args.preset)) as p:
            data = catalog.load_params_file(p)
    else:
        data = {"family_id": args.family}
    for assignment in args.set or []:
        key, _, raw = assignment.partition("=")
        if not _:
            raise ValueError(f"bad --set {assignment!r}; use path=value")
        catalog.set_by_path(data, key.strip(), json.loads(raw))
    return data


def _dump_json(obj, path: Path) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _write_manifest(out_dir: Path, command: str, args, resolved: dict, outputs: list, exit_status: int, extra=None) -> None:
    manifest = {
        "tool": "flowmaps",
        "version": __version__,
        "command": command,
        "argv": list(sys.argv[1:]) if sys.argv else [],
        "seed": args.seed,
        "resolved_params": resolved,
        "outputs": sorted(outputs),
        "exit_status": exit_status,
    }
    if extra:
        manifest.update(extra)
    _dump_json(manifest, out_dir / "manifest.json")


def _add_input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("params_file", nargs="?", help="TOML or JSON parameter file")
    p.add_argument("--preset", help="named preset (fig1..fig4 or a family default)")
    p.add_argument("--family", help="family id with default parameters")
    p.add_argument("--set", action="append", metavar="PATH=VALUE",
                   help="override a parameter, e.g. --set constants.c0=-2.0 (value is JSON)")
    p.add_argument("--out", default=None, help="output directory (default: no files)")
    p.add_argument("--seed", type=int, default=0, help="seed recorded in the manifest")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowmaps",
        description="Exact separated flow maps for stratified incompressible flow: "
                    "build catalog families, verify their invariants, export trajectories.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_list = sub.add_parser("list", help="list catalog families")
    p_list.add_argument("--section", help="filter by catalog section, e.g. 5.3")
    p_list.add_argument("--json", action="store_true", help="print machine-readable schemas")

    p_verify = sub.add_parser("verify", help="run the invariant checks on a candidate")
    _add_input_args(p_verify)
    p_verify.add_argument("--grid", default=None, help="spatial x time counts, e.g. 5x5x7 or 5x5x5x7")
    p_verify.add_argument("--tol-det", type=float, default=1e-8, help="det time-derivative tolerance")
    p_verify.add_argument("--tol-h", type=float, default=1e-6, help="h time-difference tolerance")
    p_verify.add_argument("--tol-degenerate", type=float, default=1e-6, help="min |det| threshold")
    p_verify.add_argument("--json", action="store_true", help="print the full report as JSON")

    p_trace = sub.add_parser("trace", help="export particle paths (and isopycnals) as CSV")
    _add_input_args(p_trace)
    p_trace.add_argument("--seeds", help="TOML/JSON file with seeds = [[...], ...]")
    p_trace.add_argument("--t0", type=float, default=None)
    p_trace.add_argument("--t1", type=float, default=None)
    p_trace.add_argument("--samples", type=int, default=None)

    p_sweep = sub.add_parser("sweep", help="classify trajectories over one varied initial datum")
    _add_input_args(p_sweep)
    p_sweep.add_argument("--vary", help="dotted parameter path, e.g. initial_conditions.s_delta")
    p_sweep.add_argument("--values", help="comma-separated values")
    p_sweep.add_argument("--t1", type=float, default=None, help="override the window end")

    return parser


def cmd_list(args) -> int:
    fams = catalog.list_families(args.section)
    if args.json:
        print(json.dumps([catalog.param_schema(f.family_id) for f in fams], indent=2, sort_keys=True))
        return 0
    header = f"{'family_id':24s} {'section':7s} {'n':>2s} {'m':>2s}  description"
    print(header)
    print("-" * len(header))
    for f in fams:
        print(f"{f.family_id:24s} {f.section:7s} {f.n:2d} {f.m:2d}  {f.description}")
    print(f"{len(fams)} families")
    return 0


def cmd_verify(args) -> int:
    try:
        resolved = _load_input(args)
        candidate = catalog.build_from_dict(resolved)
        grid = GridSpec.parse(args.grid) if args.grid else GridSpec()
        tol = Tolerances(det=args.tol_det, h=args.tol_h, nondegeneracy=args.tol_degenerate)
        report = verify_candidate(candidate, grid=grid, tol=tol)
    except (FlowmapsError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    status = 0 if report.verdict else 1
    if args.json:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        print(report.summary())
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        _dump_json(report.to_json(), out_dir / "report.json")
        _write_manifest(
            out_dir, "verify", args, resolved, ["report.json"], status,
            extra={"grid": args.grid or "default", "tolerances": tol.to_json()},
        )
    return status


def _trace_plan(resolved: dict, args):
    plan = dict(resolved.get("trace", {}))
    if args.seeds:
        seeds_data = catalog.load_params_file(args.seeds)
        plan["seeds"] = seeds_data["seeds"]
    if args.t0 is not None:
        plan["t0"] = args.t0
    if args.t1 is not None:
        plan["t1"] = args.t1
    if args.samples is not None:
        plan["samples"] = args.samples
    if "seeds" not in plan:
        raise ValueError("no seeds: give --seeds FILE or a [trace] section with seeds")
    return plan


def cmd_trace(args) -> int:
    try:
        resolved = _load_input(args)
        plan = _trace_plan(resolved, args)
        params_dict = {k: v for k, v in resolved.items() if k not in ("trace", "sweep")}
        candidate = catalog.build_from_dict(params_dict)
    except (FlowmapsError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out_dir = Path(args.out or "trace_out")
    out_dir.mkdir(parents=True, exist_ok=True)

    t0 = float(plan.get("t0", candidate.t_window[0]))
    t1 = float(plan.get("t1", candidate.t_window[1]))
    samples = int(plan.get("samples", 400))
    outputs = []
    path_meta = []
    warned = False
    for idx, seed in enumerate(plan["seeds"]):
        path = particle_path(candidate, np.asarray(seed, dtype=float), (t0, t1), samples)
        name = f"path_{idx:02d}.csv"
        with open(out_dir / name, "w", encoding="utf-8") as fh:
            write_path_csv(path, fh)
        outputs.append(name)
        path_meta.append(
            {"seed": list(map(float, seed)), "file": name,
             "period": path.period, "truncated": path.truncated}
        )
        if path.truncated and not warned:
            print("warning: window truncated to the candidate's validity range", file=sys.stderr)
            warned = True

    iso_spec = plan.get("isopycnal")
    if iso_spec:
        curve = isopycnal_curve(
            candidate,
            level=float(iso_spec["level"]),
            t=float(iso_spec.get("t", t0)),
            seed_start=iso_spec["seed_start"],
            seed_end=iso_spec["seed_end"],
            n_points=int(iso_spec.get("n_points", 64)),
        )
        name = "isopycnal_00.csv"
        with open(out_dir / name, "w", encoding="utf-8") as fh:
            n = curve.points.shape[1]
            fh.write(",".join(["level"] + [f"x{k + 1}" for k in range(n)]) + "\n")
            for row in curve.points:
                fh.write(",".join([f"{curve.level:.17g}"] + [f"{v:.17g}" for v in row]) + "\n")
        outputs.append(name)

    _write_manifest(
        out_dir, "trace", args, resolved, outputs, 0,
        extra={"trace_plan": {"t0": t0, "t1": t1, "samples": samples}, "paths": path_meta},
    )
    print(f"wrote {len(outputs)} files to {out_dir}")
    return 0


def _classify_case1(params: FamilyParams, t_end: float):
    """(outcome, detail) for one case-1 trajectory on [t0, t_end]."""
    window = (params.t_window[0], t_end)
    params = FamilyParams.from_dict({**params.to_dict(), "t_window": list(window)})
    sol = catalog.case1_trajectory(params, rtol=1e-9, atol=1e-12)
    blow = [ev for ev in sol.events if ev[0] <= t_end + 1e-9]
    if sol.truncated or blow:
        t_blow = blow[0][0] if blow else sol.t_end
        return "blowup", float(t_blow)
    ts = np.linspace(sol.t0, min(sol.t_end, t_end), 2000)
    states = sol(ts)
    y0 = np.asarray(sol(sol.t0), dtype=float)
    ratio = float(np.max(np.abs(states[:5])) / np.max(np.abs(y0[:5])))
    return ("bounded", ratio) if ratio < 10.0 else ("growth", ratio)


def cmd_sweep(args) -> int:
    try:
        resolved = _load_input(args)
        plan = dict(resolved.get("sweep", {}))
        if args.vary:
            plan["vary"] = args.vary
        if args.values:
            plan["values"] = [float(v) for v in args.values.split(",")]
        if "vary" not in plan or "values" not in plan:
            raise ValueError("need --vary and --values (or a [sweep] section)")
        params_dict = {k: v for k, v in resolved.items() if k not in ("trace", "sweep")}
        base = catalog.build_params_dict(params_dict)
        if base.family_id != "M4Case1General":
            raise ValueError("sweep classifies the ODE-backed wave family (M4Case1General)")
        t_end = float(args.t1 if args.t1 is not None else base.t_window[1])
    except (FlowmapsError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    rows = []
    for value in plan["values"]:
        data = base.to_dict()
        catalog.set_by_path(data, plan["vary"], value)
        trial = FamilyParams.from_dict(data)
        outcome, detail = _classify_case1(trial, t_end)
        rows.append({"value": float(value), "outcome": outcome, "detail": float(detail)})
        label = f"blow-up at t={detail:.4f}" if outcome == "blowup" else f"max-ratio {detail:.3f}"
        print(f"{plan['vary']} = {value:+.4g}: {outcome} ({label})")

    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "sweep.csv", "w", encoding="utf-8") as fh:
            fh.write("value,outcome,detail\n")
            for row in rows:
                fh.write(f"{row['value']:.17g},{row['outcome']},{row['detail']:.17g}\n")
        _write_manifest(
            out_dir, "sweep", args, resolved, ["sweep.csv"], 0,
            extra={"sweep_plan": {"vary": plan["vary"], "values": plan["values"], "t1": t_end},
                   "results": rows},
        )
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "list": cmd_list,
        "verify": cmd_verify,
        "trace": cmd_trace,
        "sweep": cmd_sweep,
    }
    return handlers[args.command](args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
