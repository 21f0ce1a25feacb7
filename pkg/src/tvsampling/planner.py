"""Sampling-rate arithmetic and concrete sampling schedules.

Every stream in a schedule is a uniform sub-grid of the signal grid: it
takes every ``stride``-th grid instant, so its rate ``grid_rate / stride``
divides the grid rate.  Theoretical Nyquist rates that are not of that
form are rounded up to the next one, and the rounding is reported.
"""

from dataclasses import dataclass

import numpy as np

from .division import (
    AdmissibleSequence,
    DivisionChain,
    build_admissible_sequence,
    build_division_chain,
    is_equal_bandwidth,
)
from .errors import InvalidArgumentError
from .graph import GftBasis, Grid
from .spectral import EDGE_COSINE, BandwidthProfile, band_dimension

_RATE_RTOL = 1e-9


@dataclass(frozen=True)
class ScheduleEntry:
    stage: int
    vertex: int
    rate: float
    stride: int
    required_rate: float
    bandwidth: float
    phase: float = 0.0

    @property
    def rounded(self) -> bool:
        return not np.isclose(self.rate, self.required_rate, rtol=_RATE_RTOL, atol=0)


@dataclass(frozen=True)
class SamplingSchedule:
    entries: tuple
    grid: Grid
    edge: str = EDGE_COSINE

    @property
    def total_rate(self) -> float:
        return sampling_rate_of(self)

    @property
    def required_rate(self) -> float:
        return float(sum(e.required_rate for e in self.entries))

    @property
    def rounded(self) -> bool:
        return any(e.rounded for e in self.entries)

    def stage(self, i: int) -> tuple:
        return tuple(e for e in self.entries if e.stage == i)

    def without(self, index: int) -> "SamplingSchedule":
        """Copy with entry ``index`` removed (for necessity probes)."""
        kept = self.entries[:index] + self.entries[index + 1 :]
        return SamplingSchedule(kept, self.grid, self.edge)


def sampling_rate_of(schedule: SamplingSchedule) -> float:
    """Density of the sampling set: the sum of the per-stream rates."""
    return float(sum(e.rate for e in schedule.entries))


def grid_rate_for(required: float, bandwidth: float, grid: Grid, edge: str = EDGE_COSINE):
    """Smallest grid-divisor rate that is at least ``required``.

    Returns ``(rate, stride)``; a zero requirement gives ``(0.0, 0)``.  The
    stream must also collect enough samples per record to fix the band
    (relevant for ``edge="free"``).
    """
    if required <= 0:
        return 0.0, 0
    if required > grid.rate * (1 + _RATE_RTOL):
        raise InvalidArgumentError(
            f"required rate {required:g} Hz exceeds the grid rate {grid.rate:g} Hz"
        )
    n = grid.n_samples
    dim = band_dimension(min(grid.bins(bandwidth), n // 2), edge, n)
    stride = int(np.floor(grid.rate / required * (1 + _RATE_RTOL)))
    stride = max(min(stride, n), 1)
    while stride > 1 and -(-n // stride) < dim:
        stride -= 1
    return grid.rate / stride, stride


def min_rate_simple(profile: BandwidthProfile, lambda0) -> float:
    """``2 (N - |lambda0|) B_V`` for a simple-bandwidth space."""
    if not is_equal_bandwidth(profile):
        raise InvalidArgumentError("vertex bandwidths are not constant")
    return 2.0 * (profile.n - len(set(lambda0))) * float(profile.vertex_bw[0])


def min_rate_equal(profile: BandwidthProfile, chain: DivisionChain) -> float:
    """Simple-space rate on the fully divided space plus ``2 B`` per stage."""
    r0 = min_rate_simple(profile, chain.lambda0(0))
    return r0 + 2.0 * sum(s.bandwidth for s in chain.stages)


def min_rate_general(layer_rates) -> float:
    """Sum of the equal-bandwidth layer rates."""
    return float(sum(layer_rates))


def build_schedule(
    chain: DivisionChain, sequence: AdmissibleSequence, profile: BandwidthProfile
) -> SamplingSchedule:
    """Per-stream plan: ``V_0`` at ``2 B_V``, then ``v*_i`` at ``2 B(lambda*_i)``."""
    if sequence.k != chain.k or profile.n != chain.n:
        raise InvalidArgumentError("chain, sequence and profile disagree in size")
    grid = profile.grid
    edge = profile.edge
    b_v = chain.vertex_bw
    entries = []
    rate, stride = grid_rate_for(2 * b_v, b_v, grid, edge)
    for v in sequence.base_set:
        entries.append(ScheduleEntry(0, v, rate, stride, 2 * b_v, b_v))
    for i, (st, v) in enumerate(zip(chain.stages, sequence.added_vertices), start=1):
        rate, stride = grid_rate_for(2 * st.bandwidth, st.bandwidth, grid, edge)
        entries.append(ScheduleEntry(i, v, rate, stride, 2 * st.bandwidth, st.bandwidth))
    return SamplingSchedule(tuple(entries), grid, edge)


def format_budget(schedule: SamplingSchedule, vertex_names=None) -> str:
    """Human-readable rate budget, one line per stream.

    ``vertex_names`` maps schedule vertex indices to printed labels.
    """
    lines = [f"{'stage':>5} {'vertex':>6} {'bandwidth':>11} {'nyquist':>11} {'rate':>11}  note"]
    for e in schedule.entries:
        basis = "2*B_V" if e.stage == 0 else f"2*B(lambda*_{e.stage})"
        note = basis + (" (rounded up to an integer grid stride)" if e.rounded else "")
        name = e.vertex if vertex_names is None else vertex_names[e.vertex]
        lines.append(
            f"{e.stage:>5} {name:>6} {e.bandwidth:>11.6g} {e.required_rate:>11.6g} "
            f"{e.rate:>11.6g}  {note}"
        )
    lines.append(
        f"total {schedule.total_rate:.6g} Hz (theoretical minimum {schedule.required_rate:.6g} Hz)"
    )
    return "\n".join(lines)


@dataclass(frozen=True)
class Plan:
    """Everything needed to sample and reconstruct one equal-bandwidth space."""

    basis: GftBasis
    profile: BandwidthProfile
    chain: DivisionChain
    sequence: AdmissibleSequence
    schedule: SamplingSchedule

    @property
    def min_rate(self) -> float:
        return min_rate_equal(self.profile, self.chain)


def make_plan(basis: GftBasis, profile: BandwidthProfile) -> Plan:
    """Chain, admissible sequence and schedule for ``profile`` under ``basis``."""
    chain = build_division_chain(profile)
    sequence = build_admissible_sequence(basis, chain)
    return Plan(basis, profile, chain, sequence, build_schedule(chain, sequence, profile))
