"""Command-line interface: ``tvsampling <command> [options]``.

Every option can also come from a JSON file given with ``--config``.  The
file is an object whose keys are option names (``n_samples`` or
``n-samples``); keys may be grouped under a command name, e.g.
``{"seed": 3, "experiment": {"trials": 10}}``.  Command-line flags win
over the file, the file wins over built-in defaults.

Exit status: 0 when the command succeeded and all its checks passed, 1
when a check failed, 2 on invalid input or a processing error.
"""

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import io
from .division import SpaceKind, classify_space
from .errors import SamplingError
from .experiment import ExperimentConfig, run_experiment, synthesize, synthesize_general
from .graph import Grid, TimeVertexSignal, build_covariance_graph, eigendecompose
from .oracle import nrmse
from .planner import format_budget, make_plan
from .reconstruction import (
    Layer,
    LayerDecomposition,
    decompose_general,
    extract_samples,
    layer_rows,
    reconstruct_equal,
    reconstruct_general,
    stage_residual_norms,
)
from .spectral import EDGE_COSINE, EDGE_FREE, bandwidth_profile
from .verify import SUITES, format_report, run_checks


def _floats(text):
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x.strip()]


def _add_grid(p):
    p.add_argument("--n-samples", type=int, default=1024)
    p.add_argument("--grid-rate", type=float, default=1024.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="tvsampling", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic correlated signal")
    _add_grid(p)
    p.add_argument("--n-vertices", type=int, default=4)
    p.add_argument("--bandwidth", type=float, default=100.0, help="B_V in Hz")
    p.add_argument("--template", type=_floats, default=[1.0, 0.6, 0.2, 0.0],
                   help="graph-frequency bandwidths as fractions of B_V")
    p.add_argument("--vertex-bw", type=_floats, default=None,
                   help="per-vertex bandwidths in Hz; produces a general (mixed) signal")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="signal.csv")
    p.add_argument("--basis-out", help="also write the generator basis")

    p = sub.add_parser("plan", help="measure a signal's profile and plan its sampling")
    p.add_argument("--signal", required=True)
    p.add_argument("--basis", help="basis file (default: covariance of the signal)")
    p.add_argument("--graph", help="graph file (default: covariance of the signal)")
    p.add_argument("--threshold", type=float, default=1e-8, help="relative spectral threshold")
    p.add_argument("--edge", choices=[EDGE_COSINE, EDGE_FREE], default=EDGE_COSINE)
    p.add_argument("-o", "--output", default="plan.json")
    p.add_argument("--quiet", action="store_true", help="do not print the rate budget")

    p = sub.add_parser("sample", help="sample a signal according to a plan")
    p.add_argument("--signal", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("-o", "--output", default="samples.csv")

    p = sub.add_parser("reconstruct", help="rebuild a signal from samples and a plan")
    p.add_argument("--samples", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("-o", "--output", default="reconstruction.csv")
    p.add_argument("--summary", default=None, help="JSON summary path")
    p.add_argument("--truth", help="reference signal CSV for NRMSE")
    p.add_argument("--tol", type=float, default=1e-8, help="NRMSE tolerance when --truth is given")

    p = sub.add_parser("verify", help="run the randomized property and oracle suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--suite", action="append", choices=[s[0] for s in SUITES])
    p.add_argument("-o", "--output", default=None, help="report path (also printed)")

    p = sub.add_parser("experiment", help="run the bandwidth sweep")
    _add_grid(p)
    p.add_argument("--n-vertices", type=int, default=4)
    p.add_argument("--sweep", type=_floats, default=[])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--template", type=_floats, default=[1.0, 0.6, 0.2, 0.0])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", default="experiment_out")
    p.add_argument("--input-csv", default=None)
    p.add_argument("--basis-source", choices=["covariance", "generator"], default="covariance")
    p.add_argument("--rel-threshold", type=float, default=1e-8)
    p.add_argument("--nrmse-tol", type=float, default=1e-8)
    return parser, sub


def _config_defaults(path, command, subparser):
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict):
        raise SamplingError("config must be a JSON object")
    flat = {k: v for k, v in doc.items() if not isinstance(v, dict)}
    flat.update(doc.get(command, {}))
    dests = {a.dest: a for a in subparser._actions}
    out = {}
    for key, value in flat.items():
        dest = key.replace("-", "_")
        if dest not in dests:
            continue  # options for other commands
        action = dests[dest]
        if action.type is not None and isinstance(value, str):
            value = action.type(value)
        elif action.type is _floats:
            value = _floats(value)
        out[dest] = value
    return out


def parse_args(argv=None):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        subparser = sub.choices[args.command]
        subparser.set_defaults(**_config_defaults(args.config, args.command, subparser))
        args = parser.parse_args(argv)
    return args


# -- commands -------------------------------------------------------------


def cmd_synth(args):
    grid = Grid(1.0 / args.grid_rate, args.n_samples)
    rng = np.random.default_rng(args.seed)
    if args.vertex_bw:
        signal = synthesize_general(args.vertex_bw, grid, rng)
        basis = None
    else:
        if len(args.template) != args.n_vertices:
            raise SamplingError("template needs one entry per vertex")
        cfg = ExperimentConfig(n_vertices=args.n_vertices, n_samples=args.n_samples,
                               grid_rate=args.grid_rate, template=args.template, sweep=[args.bandwidth])
        signal, basis = synthesize(cfg.freq_bw(cfg.sweep_values()[0]), grid, rng)
    io.write_signal_csv(args.output, signal)
    if args.basis_out:
        if basis is None:
            raise SamplingError("--basis-out needs an equal-bandwidth signal")
        io.write_basis(args.basis_out, basis)
    print(f"wrote {args.output} ({signal.n_vertices} vertices x {signal.n_samples} samples)")
    return 0


def cmd_plan(args):
    signal = io.ingest_csv(args.signal)
    graph = io.read_graph(args.graph) if args.graph else build_covariance_graph(signal)
    basis = io.read_basis(args.basis) if args.basis else eigendecompose(graph)
    profile = bandwidth_profile(signal, basis, args.threshold, args.edge)
    kind = classify_space(profile)
    if kind is SpaceKind.GENERAL:
        dec = decompose_general(signal, profile, graph, args.threshold)
        plans = [make_plan(l.basis, l.profile) for l in dec.layers]
        Path(args.output).write_text(io.general_plan_to_json(dec, plans), encoding="utf-8")
        budget = "\n".join(
            f"layer {j} ({l.band_low:g}, {l.band_high:g}] Hz on vertices {list(l.vertices)}\n"
            + format_budget(p.schedule, l.vertices)
            for j, (l, p) in enumerate(zip(dec.layers, plans))
        )
        total = sum(p.schedule.total_rate for p in plans)
        budget += f"\noverall {total:.6g} Hz over {len(plans)} layers"
    else:
        plan = make_plan(basis, profile)
        io.write_plan(args.output, plan)
        budget = format_budget(plan.schedule)
    if not args.quiet:
        print(f"space: {kind.value}")
        print(budget)
    return 0


def _layers(plan_obj):
    if isinstance(plan_obj, dict):
        return plan_obj["grid"], plan_obj["n_vertices"], plan_obj["layers"]
    return plan_obj.schedule.grid, plan_obj.basis.n, [(tuple(range(plan_obj.basis.n)), 0.0, None, plan_obj)]


def cmd_sample(args):
    signal = io.ingest_csv(args.signal)
    grid, n, layers = _layers(io.read_plan(args.plan))
    if signal.n_vertices != n or signal.n_samples != grid.n_samples:
        raise SamplingError(
            f"signal is {signal.n_vertices} x {signal.n_samples}, plan expects {n} x {grid.n_samples}"
        )
    sets = []
    for verts, lo, hi, plan in layers:
        part = signal if hi is None else TimeVertexSignal(
            layer_rows(signal, verts, lo, hi), signal.sample_period, signal.t0)
        sets.append(extract_samples(part, plan.schedule))
    io.write_samples_csv(args.output, sets)
    print(f"wrote {args.output} ({sum(s.n_values for s in sets)} samples)")
    return 0


def cmd_reconstruct(args):
    plan_obj = io.read_plan(args.plan)
    grid, n, layers = _layers(plan_obj)
    grid = Grid(grid.sample_period, grid.n_samples, grid.t0)
    sets = io.read_samples_csv(args.samples, [l[3].schedule for l in layers], grid)
    recs, stage_norms = [], []
    for ss, (_, _, _, plan) in zip(sets, layers):
        inter = []
        recs.append(reconstruct_equal(ss, plan, inter))
        stage_norms.append(stage_residual_norms(ss, plan, inter))
    if isinstance(plan_obj, dict):
        dec = LayerDecomposition(
            tuple(Layer(v, lo, hi, None, p.basis, p.profile) for v, lo, hi, p in layers), n, grid)
        rec = reconstruct_general(recs, dec)
    else:
        rec = recs[0]
    io.write_reconstruction_csv(args.output, rec)
    summary = {
        "kind": "general" if isinstance(plan_obj, dict) else "equal",
        "total_rate": float(sum(l[3].schedule.total_rate for l in layers)),
        "min_rate": float(sum(l[3].min_rate for l in layers)),
        "stage_residual_norms": stage_norms,
    }
    status = 0
    if args.truth:
        err = nrmse(io.ingest_csv(args.truth), rec)
        summary["nrmse"] = err
        summary["nrmse_tol"] = args.tol
        summary["passed"] = bool(err <= args.tol)
        status = 0 if err <= args.tol else 1
        print(f"NRMSE {err:.3e} ({'within' if status == 0 else 'ABOVE'} tolerance {args.tol:g})")
    if args.summary:
        io.write_json(args.summary, summary)
    print(f"wrote {args.output}")
    return status


def cmd_verify(args):
    results = run_checks(args.seed, args.instances, args.suite)
    report = format_report(results)
    sys.stdout.write(report)
    if args.output:
        Path(args.output).write_text(report, encoding="utf-8")
    return 0 if all(r.passed for r in results) else 1


def cmd_experiment(args):
    names = {f.name for f in fields(ExperimentConfig)}
    cfg = ExperimentConfig(**{k: v for k, v in vars(args).items() if k in names})
    report = run_experiment(cfg)
    for row in report.rows:
        print(
            f"B_V={row['bandwidth']:g} Hz  NRMSE proposed {row['proposed_nrmse_max']:.2e} "
            f"baseline {row['baseline_nrmse_max']:.2e}  rate {row['proposed_rate']:.6g} vs "
            f"{row['baseline_rate']:.6g} Hz"
        )
    for name, ok in sorted(report.checks.items()):
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    print(f"outputs in {cfg.output_dir}")
    return 0 if report.passed else 1


COMMANDS = {
    "synth": cmd_synth,
    "plan": cmd_plan,
    "sample": cmd_sample,
    "reconstruct": cmd_reconstruct,
    "verify": cmd_verify,
    "experiment": cmd_experiment,
}


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except (SamplingError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
