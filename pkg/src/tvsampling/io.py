"""File formats.

Signal CSV
    UTF-8, comma separated.  Header ``t,v1,...,vN``; the first column is
    time in seconds on a uniform grid, the others are vertex values.
    Numbers are written as ``%.17e``.

Matrix file (graph adjacency or GFT basis)
    First line ``n=<N>``.  A graph file then holds N CSV rows of the
    adjacency.  A basis file holds one CSV row of eigenvalues followed by
    the N rows of the eigenvector matrix U (column i pairs with
    eigenvalue i).

Plan file (JSON)
    ``{"format": "tvsampling-plan", "version": 1, "kind": "equal" | "general", ...}``.
    An equal plan stores ``grid``, ``basis``, ``profile``, ``chain``,
    ``sequence`` and ``schedule``.  A general plan stores ``grid``,
    ``n_vertices`` and ``layers``; each layer has ``vertices``,
    ``band_low``, ``band_high`` and a nested equal ``plan``.  Indices are
    0-based.  Keys are sorted, so identical plans serialize identically.

Sample CSV
    Header ``layer,stage,vertex,t,value``; ``layer`` is 0 for equal plans.

Reconstruction CSV
    Header ``vertex,t,value`` (long format).
"""

import csv
import json
import math
from collections import OrderedDict
from pathlib import Path

import numpy as np

from .division import AdmissibleSequence, DivisionChain, Stage
from .errors import DataError, ParseError
from .graph import GftBasis, GraphSpec, Grid, TimeVertexSignal
from .planner import Plan, SamplingSchedule, ScheduleEntry
from .reconstruction import SampleSet, SampleStream
from .spectral import BandwidthProfile

PLAN_FORMAT = "tvsampling-plan"
PLAN_VERSION = 1
_FMT = "%.17e"
_UNIFORM_RTOL = 1e-9


def _num(x) -> str:
    return _FMT % x


# -- signal CSV -----------------------------------------------------------


def write_signal_csv(path, signal: TimeVertexSignal) -> None:
    labels = signal.labels or tuple(f"v{i + 1}" for i in range(signal.n_vertices))
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(("t",) + tuple(labels)) + "\n")
        for j, t in enumerate(signal.times):
            fh.write(",".join([_num(t)] + [_num(v) for v in signal.values[:, j]]) + "\n")


def _parse_float(text, line, column):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"column {column!r}: cannot parse {text!r} as a number", line) from None
    if not math.isfinite(value):
        raise DataError(f"line {line}: column {column!r} holds non-finite value {text!r}")
    return value


def ingest_csv(path) -> TimeVertexSignal:
    """Read a signal CSV, rejecting schema violations and non-uniform time."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty file", 1)
    header = [h.strip() for h in rows[0]]
    if not header or header[0] != "t":
        raise ParseError(f"first header column must be 't', got {header[:1]}", 1)
    if len(header) < 2:
        raise ParseError("header names no vertex columns", 1)
    expected = [f"v{i}" for i in range(1, len(header))]
    if header[1:] != expected:
        missing = [e for e in expected if e not in header[1:]]
        raise ParseError(
            f"header {','.join(header)} does not match t,{','.join(expected)}"
            + (f" (missing {','.join(missing)})" if missing else ""),
            1,
        )
    times, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        times.append(_parse_float(row[0], lineno, "t"))
        values.append([_parse_float(c, lineno, h) for c, h in zip(row[1:], header[1:])])
    if len(times) < 2:
        raise ParseError("a signal needs at least two time rows", len(rows))
    t = np.array(times)
    dt = t[1] - t[0]
    if not dt > 0:
        raise ParseError("time column must increase", 3)
    ideal = t[0] + dt * np.arange(t.size)
    bad = np.flatnonzero(np.abs(t - ideal) > _UNIFORM_RTOL * max(np.abs(t).max(), dt) + 1e-6 * dt)
    if bad.size:
        raise ParseError(f"time grid is not uniform (t = {t[bad[0]]!r})", int(bad[0]) + 2)
    return TimeVertexSignal(np.array(values).T, dt, t[0], tuple(header[1:]))


# -- matrix files ---------------------------------------------------------


def _write_matrix_file(path, n, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"n={n}\n")
        for r in rows:
            fh.write(",".join(_num(v) for v in r) + "\n")


def _read_matrix_file(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or not lines[0].startswith("n="):
        raise ParseError("first line must be 'n=<N>'", 1)
    try:
        n = int(lines[0][2:])
    except ValueError:
        raise ParseError(f"bad header {lines[0]!r}", 1) from None
    rows = []
    for lineno, ln in enumerate(lines[1:], start=2):
        cells = ln.split(",")
        if len(cells) != n:
            raise ParseError(f"expected {n} values, got {len(cells)}", lineno)
        rows.append([_parse_float(c, lineno, f"col{j + 1}") for j, c in enumerate(cells)])
    return n, np.array(rows)


def write_graph(path, graph: GraphSpec) -> None:
    _write_matrix_file(path, graph.n_vertices, graph.adjacency)


def read_graph(path) -> GraphSpec:
    n, rows = _read_matrix_file(path)
    if rows.shape != (n, n):
        raise ParseError(f"graph file needs {n} matrix rows, found {rows.shape[0]}")
    return GraphSpec(rows)


def write_basis(path, basis: GftBasis) -> None:
    _write_matrix_file(path, basis.n, [basis.eigenvalues, *basis.vectors])


def read_basis(path) -> GftBasis:
    n, rows = _read_matrix_file(path)
    if rows.shape != (n + 1, n):
        raise ParseError(f"basis file needs 1 + {n} rows, found {rows.shape[0]}")
    return GftBasis(rows[0], rows[1:])


# -- plan files -----------------------------------------------------------


def _grid_dict(grid: Grid):
    return {"sample_period": grid.sample_period, "n_samples": grid.n_samples, "t0": grid.t0}


def _plan_dict(plan: Plan):
    p, c, s = plan.profile, plan.chain, plan.sequence
    return {
        "basis": {"eigenvalues": plan.basis.eigenvalues.tolist(), "vectors": plan.basis.vectors.tolist()},
        "profile": {
            "vertex_bw": p.vertex_bw.tolist(),
            "freq_bw": p.freq_bw.tolist(),
            "sample_period": p.sample_period,
            "n_samples": p.n_samples,
            "edge": p.edge,
        },
        "chain": {
            "n": c.n,
            "vertex_bw": c.vertex_bw,
            "stages": [{"lambda_star": st.lambda_star, "bandwidth": st.bandwidth} for st in c.stages],
            "lambda0_sets": [list(x) for x in c.lambda0_sets],
        },
        "sequence": {"base_set": list(s.base_set), "added_vertices": list(s.added_vertices)},
        "schedule": {
            "grid": _grid_dict(plan.schedule.grid),
            "edge": plan.schedule.edge,
            "total_rate": plan.schedule.total_rate,
            "min_rate": plan.min_rate,
            "entries": [
                {
                    "stage": e.stage,
                    "vertex": e.vertex,
                    "rate": e.rate,
                    "stride": e.stride,
                    "required_rate": e.required_rate,
                    "bandwidth": e.bandwidth,
                    "phase": e.phase,
                }
                for e in plan.schedule.entries
            ],
        },
    }


def _plan_from_dict(d) -> Plan:
    try:
        basis = GftBasis(d["basis"]["eigenvalues"], d["basis"]["vectors"])
        pr = d["profile"]
        profile = BandwidthProfile(
            pr["vertex_bw"], pr["freq_bw"], pr["sample_period"], pr["n_samples"], pr["edge"]
        )
        ch = d["chain"]
        chain = DivisionChain(
            ch["n"],
            ch["vertex_bw"],
            tuple(Stage(int(s["lambda_star"]), float(s["bandwidth"])) for s in ch["stages"]),
            tuple(tuple(x) for x in ch["lambda0_sets"]),
        )
        sq = d["sequence"]
        seq = AdmissibleSequence(tuple(sq["base_set"]), tuple(sq["added_vertices"]))
        sc = d["schedule"]
        g = sc["grid"]
        schedule = SamplingSchedule(
            tuple(
                ScheduleEntry(
                    int(e["stage"]), int(e["vertex"]), float(e["rate"]), int(e["stride"]),
                    float(e["required_rate"]), float(e["bandwidth"]), float(e.get("phase", 0.0)),
                )
                for e in sc["entries"]
            ),
            Grid(g["sample_period"], g["n_samples"], g.get("t0", 0.0)),
            sc["edge"],
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed plan: {exc!r}") from exc
    return Plan(basis, profile, chain, seq, schedule)


def plan_to_json(plan: Plan) -> str:
    doc = {"format": PLAN_FORMAT, "version": PLAN_VERSION, "kind": "equal",
           "grid": _grid_dict(plan.schedule.grid)}
    doc.update(_plan_dict(plan))
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def general_plan_to_json(decomposition, plans) -> str:
    layers = [
        {"vertices": list(l.vertices), "band_low": l.band_low, "band_high": l.band_high,
         "plan": _plan_dict(p)}
        for l, p in zip(decomposition.layers, plans)
    ]
    doc = {
        "format": PLAN_FORMAT,
        "version": PLAN_VERSION,
        "kind": "general",
        "grid": _grid_dict(decomposition.grid),
        "n_vertices": decomposition.n_vertices,
        "layers": layers,
        "total_rate": float(sum(p.schedule.total_rate for p in plans)),
        "min_rate": float(sum(p.min_rate for p in plans)),
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_plan(path, plan: Plan) -> None:
    Path(path).write_text(plan_to_json(plan), encoding="utf-8")


def read_plan(path):
    """Load a plan file.

    Returns a :class:`Plan` for equal plans, or a dict with keys ``grid``,
    ``n_vertices`` and ``layers`` (each ``(vertices, band_low, band_high,
    Plan)``) for general plans.
    """
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"plan is not valid JSON: {exc.msg}", exc.lineno) from exc
    if doc.get("format") != PLAN_FORMAT:
        raise ParseError(f"not a {PLAN_FORMAT} file")
    if doc.get("kind", "equal") == "equal":
        return _plan_from_dict(doc)
    g = doc["grid"]
    return {
        "grid": Grid(g["sample_period"], g["n_samples"], g.get("t0", 0.0)),
        "n_vertices": int(doc["n_vertices"]),
        "layers": [
            (tuple(l["vertices"]), float(l["band_low"]), float(l["band_high"]), _plan_from_dict(l["plan"]))
            for l in doc["layers"]
        ],
    }


# -- sample and reconstruction CSV ----------------------------------------


def write_samples_csv(path, sample_sets) -> None:
    """Write one or more sample sets (one per layer) in long format."""
    if isinstance(sample_sets, SampleSet):
        sample_sets = [sample_sets]
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("layer,stage,vertex,t,value\n")
        for layer, ss in enumerate(sample_sets):
            for s in ss.streams:
                for t, v in zip(s.times, s.values):
                    fh.write(f"{layer},{s.stage},{s.vertex},{_num(t)},{_num(v)}\n")


def read_samples_csv(path, schedules, grid: Grid) -> list:
    """Read samples back into one :class:`SampleSet` per schedule (layer)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != ["layer", "stage", "vertex", "t", "value"]:
        raise ParseError("header must be layer,stage,vertex,t,value", 1)
    groups = OrderedDict()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 5:
            raise ParseError(f"expected 5 fields, got {len(row)}", lineno)
        try:
            key = (int(row[0]), int(row[1]), int(row[2]))
        except ValueError:
            raise ParseError("layer, stage and vertex must be integers", lineno) from None
        t = _parse_float(row[3], lineno, "t")
        v = _parse_float(row[4], lineno, "value")
        groups.setdefault(key, ([], []))
        groups[key][0].append(t)
        groups[key][1].append(v)
    out = []
    for layer, schedule in enumerate(schedules):
        streams = []
        for e in schedule.entries:
            times, values = groups.get((layer, e.stage, e.vertex), ([], []))
            times = np.array(times)
            if e.stride:
                expected = grid.t0 + grid.sample_period * np.arange(0, grid.n_samples, e.stride)
                if times.shape != expected.shape or not np.allclose(times, expected, rtol=0,
                                                                     atol=1e-9 * grid.duration):
                    raise ParseError(
                        f"layer {layer} stage {e.stage} vertex {e.vertex}: sample instants do not "
                        f"match stride {e.stride}"
                    )
            streams.append(SampleStream(e.stage, e.vertex, e.stride, times, np.array(values)))
        out.append(SampleSet(tuple(streams), grid, schedule))
    return out


def write_reconstruction_csv(path, signal: TimeVertexSignal) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("vertex,t,value\n")
        times = signal.times
        for v in range(signal.n_vertices):
            for t, x in zip(times, signal.values[v]):
                fh.write(f"{v},{_num(t)},{_num(x)}\n")


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n", encoding="utf-8")
