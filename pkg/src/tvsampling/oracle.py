"""Independent checks: error metric, least-squares reconstruction, rank probes.

The least-squares oracle does not reuse any of the stage-wise machinery.
It writes the unknown signal as ``X = U F`` where every graph-frequency
row of ``F`` is a real trigonometric polynomial limited to that row's
bandwidth, expresses every sample as a linear functional of the
polynomial coefficients, and solves the stacked system.  The smallest
singular value of that system certifies (or refutes) that the samples
determine the signal.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, MetricError
from .graph import GftBasis, Grid, TimeVertexSignal
from .planner import SamplingSchedule, ScheduleEntry, grid_rate_for
from .reconstruction import SampleSet, extract_samples
from .spectral import EDGE_COSINE, BandwidthProfile, shannon_interpolate

RECOVERABILITY_RTOL = 1e-9
LEMMA4_RTOL = 1e-8


def nrmse(a: TimeVertexSignal, b: TimeVertexSignal) -> float:
    """``||a - b||_2 / ||a||_2`` over all entries (``a`` is the reference)."""
    va = np.asarray(getattr(a, "values", a), dtype=float)
    vb = np.asarray(getattr(b, "values", b), dtype=float)
    if va.shape != vb.shape:
        raise InvalidArgumentError(f"shape mismatch {va.shape} vs {vb.shape}")
    ref = np.linalg.norm(va)
    if ref == 0:
        raise MetricError("NRMSE is undefined for a zero reference")
    return float(np.linalg.norm(va - vb) / ref)


@dataclass(frozen=True)
class Lemma4Result:
    passed: bool
    factor: float
    residual: float


def lemma4_check(p) -> Lemma4Result:
    """Block-determinant identity for ``P = [[P', alpha], [beta^T, a]]``.

    Checks ``det P = det P' * (a - beta^T P'^{-1} alpha)`` to a relative
    tolerance and that the Schur factor is non-zero.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1] or p.shape[0] < 2:
        raise InvalidArgumentError("P must be square with side >= 2")
    lead = p[:-1, :-1]
    alpha, beta, a = p[:-1, -1], p[-1, :-1], p[-1, -1]
    if np.linalg.cond(lead) > 1.0 / np.finfo(float).eps:
        raise InvalidArgumentError("leading block P' is singular")
    factor = float(a - beta @ np.linalg.solve(lead, alpha))
    det_p = np.linalg.det(p)
    rhs = np.linalg.det(lead) * factor
    residual = abs(det_p - rhs) / abs(det_p) if det_p != 0 else float("inf")
    return Lemma4Result(bool(residual <= LEMMA4_RTOL and factor != 0.0), factor, float(residual))


def _row_basis(n_bins, n_samples, edge, index):
    # real Fourier columns of one band, evaluated at grid indices
    cols = [np.ones(index.size)]
    for k in range(1, n_bins + 1):
        w = 2.0 * np.pi * k * index / n_samples
        cols.append(np.cos(w))
        at_edge = k == n_bins and (edge == EDGE_COSINE or 2 * k >= n_samples)
        if not at_edge:
            cols.append(np.sin(w))
    return np.column_stack(cols)


def _row_bins(profile: BandwidthProfile):
    grid = profile.grid
    cap = profile.vertex_bw.max()
    out = []
    for b in profile.freq_bw:
        out.append(min(grid.bins(min(b, cap)), grid.n_samples // 2) if b > 0 else -1)
    return out


def _operator(streams, basis: GftBasis, profile: BandwidthProfile):
    """Stacked sampling operator on the band coefficients.

    ``streams`` is a sequence of ``(vertex, stride)``; returns the matrix and
    the per-row coefficient slices.
    """
    n = profile.n_samples
    bins = _row_bins(profile)
    slices, start = [], 0
    for k in bins:
        width = 0 if k < 0 else _row_basis(k, n, profile.edge, np.zeros(1)).shape[1]
        slices.append(slice(start, start + width))
        start += width
    blocks = []
    for vertex, stride in streams:
        if stride == 0:
            continue
        idx = np.arange(0, n, stride)
        block = np.zeros((idx.size, start))
        for lam, k in enumerate(bins):
            if k >= 0:
                block[:, slices[lam]] = basis.vectors[vertex, lam] * _row_basis(k, n, profile.edge, idx)
        blocks.append(block)
    a = np.vstack(blocks) if blocks else np.zeros((0, start))
    return a, slices, bins


def _smallest_singular(a):
    if a.shape[1] == 0:
        return np.inf, np.inf
    if a.shape[0] < a.shape[1]:
        s = np.linalg.svd(a, compute_uv=False)
        return 0.0, (s[0] if s.size else 0.0)
    s = np.linalg.svd(a, compute_uv=False)
    return float(s[-1]), float(s[0])


@dataclass(frozen=True)
class OracleResult:
    signal: TimeVertexSignal
    certificate: float
    relative_certificate: float

    @property
    def determined(self) -> bool:
        return self.relative_certificate > RECOVERABILITY_RTOL


def least_squares_oracle(
    samples: SampleSet, basis: GftBasis, profile: BandwidthProfile, grid: Grid = None
) -> OracleResult:
    """Least-squares fit of all samples over the bandlimited coefficient space.

    An under-determined system is reported through the certificate rather
    than raised.
    """
    grid = grid or samples.grid
    streams = [(s.vertex, s.stride) for s in samples.streams]
    a, slices, bins = _operator(streams, basis, profile)
    y = np.concatenate([s.values for s in samples.streams if s.stride]) if a.shape[0] else np.zeros(0)
    smin, smax = _smallest_singular(a)
    coef = np.linalg.lstsq(a, y, rcond=None)[0] if a.size else np.zeros(a.shape[1])
    n = grid.n_samples
    full_idx = np.arange(n)
    spectral = np.zeros((basis.n, n))
    for lam, k in enumerate(bins):
        if k >= 0:
            spectral[lam] = _row_basis(k, n, profile.edge, full_idx) @ coef[slices[lam]]
    rel = smin / smax if np.isfinite(smin) and smax > 0 else (np.inf if a.shape[1] == 0 else 0.0)
    return OracleResult(
        TimeVertexSignal(basis.vectors @ spectral, grid.sample_period, grid.t0),
        float(smin),
        float(rel),
    )


@dataclass(frozen=True)
class Recoverability:
    recoverable: bool
    smallest_singular_value: float
    relative: float
    n_coefficients: int
    n_samples: int


def recoverability_test(
    schedule: SamplingSchedule, basis: GftBasis, profile: BandwidthProfile, grid: Grid = None
) -> Recoverability:
    """Is the sampling operator injective on the bandlimited space?

    Intended for desk-scale problems (a few thousand coefficients).
    """
    streams = [(e.vertex, e.stride) for e in schedule.entries]
    a, _, _ = _operator(streams, basis, profile)
    smin, smax = _smallest_singular(a)
    if a.shape[1] == 0:
        return Recoverability(True, np.inf, np.inf, 0, a.shape[0])
    rel = smin / smax if smax > 0 else 0.0
    return Recoverability(bool(rel > RECOVERABILITY_RTOL), smin, float(rel), a.shape[1], a.shape[0])


@dataclass(frozen=True)
class BaselineResult:
    samples: SampleSet
    reconstruction: TimeVertexSignal
    rate: float
    realized_rate: float


def separate_baseline(signal: TimeVertexSignal, profile: BandwidthProfile) -> BaselineResult:
    """Sample every vertex on its own at ``2 B_V(v)`` and interpolate it back."""
    grid = signal.grid
    entries = []
    for v, b in enumerate(profile.vertex_bw):
        rate, stride = grid_rate_for(2 * b, b, grid, profile.edge)
        entries.append(ScheduleEntry(0, v, rate, stride, 2 * b, b))
    schedule = SamplingSchedule(tuple(entries), grid, profile.edge)
    samples = extract_samples(signal, schedule)
    rows = np.zeros((signal.n_vertices, grid.n_samples))
    for s, e in zip(samples.streams, entries):
        if s.stride:
            rows[e.vertex] = shannon_interpolate(samples.as_series(s), grid, e.bandwidth, profile.edge).values
    recon = TimeVertexSignal(rows, grid.sample_period, grid.t0)
    return BaselineResult(samples, recon, float(2 * profile.vertex_bw.sum()), schedule.total_rate)
