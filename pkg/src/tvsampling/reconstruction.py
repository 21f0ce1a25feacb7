"""Sample extraction and stage-wise reconstruction.

Equal-bandwidth signals are rebuilt bottom-up: the base stage recovers the
component in the simple-bandwidth space from ``V_0`` and extends it to all
vertices; every later stage samples one extra vertex, subtracts what the
previous stages already explain at those instants, interpolates the
residual at the stage bandwidth and spreads it over the graph.

General signals are split by a filter bank into equal-bandwidth layers,
each of which is handled as above and then shifted back and summed.
"""

from dataclasses import dataclass, field

import numpy as np

from .division import MIN_E_ENTRY, e_vector, extension_matrix
from .errors import (
    DegenerateStageError,
    IncompleteSamplesError,
    InvalidArgumentError,
    SamplingError,
    StageError,
)
from .graph import GftBasis, GraphSpec, Grid, TimeVertexSignal, eigendecompose
from .planner import Plan, SamplingSchedule, make_plan, min_rate_general
from .spectral import (
    EDGE_FREE,
    BandwidthProfile,
    Series,
    bandwidth_profile,
    ideal_filter,
    shannon_interpolate,
    unshift,
)


@dataclass(frozen=True)
class SampleStream:
    stage: int
    vertex: int
    stride: int
    times: np.ndarray
    values: np.ndarray

    @property
    def rate(self) -> float:
        if self.stride == 0 or self.times.size < 2:
            return 0.0
        return 1.0 / (self.times[1] - self.times[0])


@dataclass(frozen=True)
class SampleSet:
    """Samples taken according to a schedule on a given grid."""

    streams: tuple
    grid: Grid
    schedule: SamplingSchedule = field(default=None, compare=False)

    def find(self, stage: int, vertex: int) -> SampleStream:
        for s in self.streams:
            if s.stage == stage and s.vertex == vertex:
                return s
        raise IncompleteSamplesError(f"no stream for stage {stage}, vertex {vertex}")

    @property
    def n_values(self) -> int:
        return int(sum(s.values.size for s in self.streams))

    def as_series(self, stream: SampleStream) -> Series:
        g = self.grid
        return Series(stream.values, g.sample_period * stream.stride, g.t0)


def extract_samples(signal: TimeVertexSignal, schedule: SamplingSchedule) -> SampleSet:
    """Decimate the scheduled vertex rows at their scheduled strides."""
    grid = signal.grid
    if not (
        schedule.grid.n_samples == grid.n_samples
        and np.isclose(schedule.grid.sample_period, grid.sample_period, rtol=1e-12)
    ):
        raise InvalidArgumentError("schedule is bound to a different grid")
    streams = []
    for e in schedule.entries:
        if not 0 <= e.vertex < signal.n_vertices:
            raise InvalidArgumentError(f"schedule names vertex {e.vertex} outside the signal")
        if e.stride == 0:
            idx = np.zeros(0, dtype=int)
        else:
            idx = np.arange(0, grid.n_samples, e.stride)
        streams.append(
            SampleStream(e.stage, e.vertex, e.stride, grid.times[idx], signal.values[e.vertex, idx])
        )
    return SampleSet(tuple(streams), grid, schedule)


def _interpolate(samples: SampleSet, stream: SampleStream, bandwidth: float, edge: str):
    if stream.stride == 0 or bandwidth == 0:
        return np.zeros(samples.grid.n_samples)
    return shannon_interpolate(samples.as_series(stream), samples.grid, bandwidth, edge).values


def reconstruct_simple(
    samples: SampleSet, basis: GftBasis, lambda0, v0, profile: BandwidthProfile
) -> TimeVertexSignal:
    """Interpolate every ``v0`` stream at ``B_V`` and extend to all vertices."""
    grid = samples.grid
    b_v = float(profile.vertex_bw[0])
    v0 = tuple(sorted(v0))
    rows = np.empty((len(v0), grid.n_samples))
    for j, v in enumerate(v0):
        rows[j] = _interpolate(samples, samples.find(0, v), b_v, profile.edge)
    m = extension_matrix(basis, lambda0, v0)
    return TimeVertexSignal(m @ rows, grid.sample_period, grid.t0)


def reconstruct_stage(
    prev: TimeVertexSignal,
    stream: SampleStream,
    basis: GftBasis,
    lambda0_i,
    v0_i,
    lambda_star: int,
    stage_bw: float,
    edge: str = "cosine",
    grid: Grid = None,
) -> TimeVertexSignal:
    """Lift ``prev`` from level ``i - 1`` to level ``i`` with the ``v*_i`` stream.

    The previous reconstruction is subtracted at the sample instants (the
    two subspaces are not orthogonal), the residual is interpolated at
    ``stage_bw`` and extended with zeros on ``V_i \\ {v*}``.
    """
    grid = grid or prev.grid
    v_star = stream.vertex
    vi = tuple(sorted(v0_i))
    if v_star not in vi:
        raise InvalidArgumentError(f"v* = {v_star} is not in V_i")
    col = vi.index(v_star)
    e = e_vector(basis, lambda0_i, vi, lambda_star)
    if abs(e[col]) < MIN_E_ENTRY:
        raise DegenerateStageError(f"|E(v*)| = {abs(e[col]):.3e} below {MIN_E_ENTRY:g}")
    if stream.stride == 0:
        return prev
    idx = np.arange(0, grid.n_samples, stream.stride)
    resid = stream.values - prev.values[v_star, idx]
    series = Series(resid, grid.sample_period * stream.stride, grid.t0)
    resid_full = shannon_interpolate(series, grid, stage_bw, edge).values
    spread = extension_matrix(basis, lambda0_i, vi)[:, col]
    return prev.with_values(prev.values + np.outer(spread, resid_full))


def reconstruct_equal(samples: SampleSet, plan: Plan, intermediates: list = None) -> TimeVertexSignal:
    """Base stage then every chain stage in order.

    If ``intermediates`` is a list, the reconstruction after each level is
    appended to it.  Failures are re-raised as :class:`StageError` naming
    the stage.
    """
    chain, seq, profile, basis = plan.chain, plan.sequence, plan.profile, plan.basis
    try:
        x = reconstruct_simple(samples, basis, chain.lambda0(0), seq.base_set, profile)
    except SamplingError as exc:
        raise StageError(str(exc), 0) from exc
    if intermediates is not None:
        intermediates.append(x)
    for i in range(1, chain.k + 1):
        st = chain.stages[i - 1]
        try:
            stream = samples.find(i, seq.added_vertices[i - 1])
            x = reconstruct_stage(
                x, stream, basis, chain.lambda0(i), seq.vertex_set(i),
                st.lambda_star, st.bandwidth, profile.edge, samples.grid,
            )
        except SamplingError as exc:
            raise StageError(str(exc), i) from exc
        if intermediates is not None:
            intermediates.append(x)
    return x


@dataclass(frozen=True)
class Layer:
    """One equal-bandwidth slice of a general signal.

    ``signal`` holds the band ``(band_low, band_high]`` of the rows in
    ``vertices``, demodulated by ``band_low``.
    """

    vertices: tuple
    band_low: float
    band_high: float
    signal: TimeVertexSignal
    basis: GftBasis
    profile: BandwidthProfile

    @property
    def width(self) -> float:
        return self.band_high - self.band_low


@dataclass(frozen=True)
class LayerDecomposition:
    layers: tuple
    n_vertices: int
    grid: Grid
    skipped: tuple = ()


def layer_rows(signal: TimeVertexSignal, vertices, band_low: float, band_high: float) -> np.ndarray:
    """Band ``(band_low, band_high]`` of the given rows, moved to baseband."""
    g = signal.grid
    return np.array([
        ideal_filter(Series(signal.values[v], g.sample_period, g.t0), band_low, band_high, True).values
        for v in vertices
    ])


def stage_residual_norms(samples: SampleSet, plan: Plan, intermediates) -> list:
    """Norm of what each stage's stream adds beyond the previous levels.

    Entry 0 is the norm of the base-stage samples; entry ``i`` is the norm
    of the ``v*_i`` samples minus level ``i - 1`` at the same instants.
    """
    seq, grid = plan.sequence, samples.grid
    out = [float(np.sqrt(sum(np.sum(samples.find(0, v).values ** 2) for v in seq.base_set)))]
    for i in range(1, plan.chain.k + 1):
        s = samples.find(i, seq.added_vertices[i - 1])
        if s.stride == 0:
            out.append(0.0)
            continue
        idx = np.arange(0, grid.n_samples, s.stride)
        out.append(float(np.linalg.norm(s.values - intermediates[i - 1].values[s.vertex, idx])))
    return out


def decompose_general(
    signal: TimeVertexSignal,
    profile: BandwidthProfile,
    adjacency: GraphSpec,
    rel_threshold: float = 1e-8,
) -> LayerDecomposition:
    """Filter-bank split into equal-bandwidth layers.

    Layer ``j`` covers ``(b_{j-1}, b_j]`` (the first layer includes DC) on
    the vertices whose bandwidth reaches ``b_j``; its basis comes from the
    adjacency restricted to those vertices.  Layers whose content is
    identically zero are skipped and listed in ``skipped``.
    """
    if adjacency.n_vertices != signal.n_vertices or profile.n != signal.n_vertices:
        raise InvalidArgumentError("signal, profile and adjacency disagree in size")
    grid = signal.grid
    edges = np.unique(profile.vertex_bw[profile.vertex_bw > 0])
    several = edges.size > 1
    layers, skipped = [], []
    lo = 0.0
    for hi in edges:
        hi = float(hi)
        verts = tuple(int(v) for v in np.flatnonzero(profile.vertex_bw >= hi - 1e-9 * hi))
        rows = layer_rows(signal, verts, lo, hi)
        width = hi - lo
        if not np.any(np.abs(rows) > 0):
            skipped.append((lo, hi))
            lo = hi
            continue
        sub = TimeVertexSignal(rows, grid.sample_period, grid.t0)
        basis = eigendecompose(adjacency.subgraph(verts))
        edge = EDGE_FREE if several else profile.edge
        measured = bandwidth_profile(sub, basis, rel_threshold, edge)
        layer_profile = BandwidthProfile(
            np.full(len(verts), width),
            np.minimum(measured.freq_bw, width),
            grid.sample_period,
            grid.n_samples,
            edge,
        )
        layers.append(Layer(verts, lo, hi, sub, basis, layer_profile))
        lo = hi
    return LayerDecomposition(tuple(layers), signal.n_vertices, grid, tuple(skipped))


def reconstruct_general(layer_reconstructions, decomposition: LayerDecomposition) -> TimeVertexSignal:
    """Shift every layer back to its band and add the layers up."""
    layers = decomposition.layers
    if len(layer_reconstructions) != len(layers):
        raise IncompleteSamplesError(
            f"{len(layer_reconstructions)} layer reconstructions for {len(layers)} layers"
        )
    grid = decomposition.grid
    out = np.zeros((decomposition.n_vertices, grid.n_samples))
    for rec, layer in zip(layer_reconstructions, layers):
        for j, v in enumerate(layer.vertices):
            s = Series(rec.values[j], grid.sample_period, grid.t0, layer.band_low)
            out[v] += unshift(s).values
    return TimeVertexSignal(out, grid.sample_period, grid.t0)


@dataclass(frozen=True)
class GeneralResult:
    decomposition: LayerDecomposition
    plans: tuple
    reconstruction: TimeVertexSignal

    @property
    def min_rate(self) -> float:
        return min_rate_general(p.min_rate for p in self.plans)

    @property
    def total_rate(self) -> float:
        return min_rate_general(p.schedule.total_rate for p in self.plans)


def sample_and_reconstruct_general(
    signal: TimeVertexSignal,
    profile: BandwidthProfile,
    adjacency: GraphSpec,
    rel_threshold: float = 1e-8,
) -> GeneralResult:
    """Decompose, plan every layer, sample it, and reassemble the signal."""
    dec = decompose_general(signal, profile, adjacency, rel_threshold)
    plans, recs = [], []
    for layer in dec.layers:
        plan = make_plan(layer.basis, layer.profile)
        samples = extract_samples(layer.signal, plan.schedule)
        recs.append(reconstruct_equal(samples, plan))
        plans.append(plan)
    return GeneralResult(dec, tuple(plans), reconstruct_general(recs, dec))
