"""Temporal Fourier machinery on the dense grid.

Bandwidths are cyclic frequencies in Hz; a Nyquist rate is ``2 * B``
samples per second.  All operations use DFT semantics: the grid is one
period of a periodic signal, so bandwidths are whole multiples of the
frequency resolution ``1 / (T * dt)``.

Band-edge convention
--------------------
On a periodic record of duration ``P`` a real series whose highest bin
sits at ``B = K / P`` has ``2K + 1`` real degrees of freedom, one more
than the ``2 B P`` samples a stream at rate ``2 B`` collects.  The grid
surrogate of the space of ``B``-bandlimited signals is therefore taken to
be the series whose component at exactly ``B`` is in cosine phase with
respect to the grid origin (``edge="cosine"``, dimension ``2K``).  This
makes every Nyquist-rate count literal.  Series with an arbitrary phase at
the band edge (``edge="free"``, dimension ``2K + 1``) are also supported;
streams for them must collect at least ``2K + 1`` samples per record.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import AliasingError, InvalidArgumentError
from .graph import GftBasis, Grid, TimeVertexSignal, gft

EDGE_COSINE = "cosine"
EDGE_FREE = "free"
_EDGES = (EDGE_COSINE, EDGE_FREE)
_RATE_RTOL = 1e-9


@dataclass(frozen=True)
class Series:
    """One channel on a uniform grid.

    ``band_shift`` records how far (in Hz) the content was demodulated
    towards baseband by :func:`ideal_filter`; :func:`unshift` undoes it.
    """

    values: np.ndarray
    sample_period: float = 1.0
    t0: float = 0.0
    band_shift: float = 0.0

    def __post_init__(self):
        x = np.array(self.values, dtype=float).reshape(-1)
        if not np.all(np.isfinite(x)):
            raise InvalidArgumentError("series contains non-finite values")
        if not self.sample_period > 0:
            raise InvalidArgumentError("sample_period must be positive")
        x.setflags(write=False)
        object.__setattr__(self, "values", x)

    @property
    def grid(self) -> Grid:
        return Grid(self.sample_period, self.values.size, self.t0)

    @property
    def rate(self) -> float:
        return 1.0 / self.sample_period


def _check_edge(edge):
    if edge not in _EDGES:
        raise InvalidArgumentError(f"edge must be one of {_EDGES}, got {edge!r}")


def band_dimension(n_bins: int, edge: str = EDGE_COSINE, n_samples: int = None) -> int:
    """Real dimension of the grid space with highest bin ``n_bins``."""
    _check_edge(edge)
    if n_bins <= 0:
        return 1
    if n_samples is not None and 2 * n_bins >= n_samples:
        return n_samples
    return 2 * n_bins if edge == EDGE_COSINE else 2 * n_bins + 1


def estimate_bandwidth(x: Series, rel_threshold: float = 1e-8, reference: float = None) -> float:
    """Highest frequency whose DFT magnitude exceeds ``rel_threshold * max``.

    ``reference``, when given, replaces the series' own peak magnitude if it
    is larger.  Multichannel callers pass the peak over all channels so that
    round-off residue in an identically-zero channel does not register as
    full-band content.
    """
    if not 0 < rel_threshold < 1:
        raise InvalidArgumentError("rel_threshold must lie in (0, 1)")
    mag = np.abs(np.fft.rfft(x.values))
    peak = mag.max() if mag.size else 0.0
    if reference is not None:
        peak = max(peak, float(reference))
    if peak == 0.0:
        return 0.0
    above = np.flatnonzero(mag > rel_threshold * peak)
    if above.size == 0:
        return 0.0
    return float(above[-1]) * x.grid.resolution


def _move_bins(spec, src_lo, src_hi, offset, n):
    """Move rfft bins ``src_lo..src_hi`` by ``offset`` bins (real-signal aware)."""
    out = np.zeros_like(spec)
    half = n // 2 if n % 2 == 0 else None
    for k in range(src_lo, src_hi + 1):
        c = spec[k]
        dest = k + offset
        # the even-length Nyquist bin appears once in the two-sided spectrum
        if half is not None and k == half and dest != half:
            c = 0.5 * c
        if half is not None and dest == half and k != half:
            c = 2.0 * c.real
        out[dest] = c
    return out


def ideal_filter(
    x: Series, pass_low: float, pass_high: float, shift_to_baseband: bool = False
) -> Series:
    """Brick-wall band selection in the DFT domain.

    With ``pass_low == 0`` the pass band is ``[0, pass_high]``; otherwise it
    is ``(pass_low, pass_high]`` so adjacent bands tile the spectrum without
    overlap.  When ``shift_to_baseband`` is set the band is demodulated by
    ``pass_low`` and occupies ``(0, pass_high - pass_low]``; the shift is
    recorded in ``band_shift``.
    """
    grid = x.grid
    if pass_low < 0 or pass_high <= pass_low:
        raise InvalidArgumentError(f"invalid band edges [{pass_low}, {pass_high}]")
    if pass_high > grid.nyquist * (1 + _RATE_RTOL):
        raise InvalidArgumentError(f"pass_high {pass_high} exceeds grid Nyquist {grid.nyquist}")
    n = grid.n_samples
    spec = np.fft.rfft(x.values)
    k_hi = min(grid.bins(pass_high), n // 2)
    k_lo = grid.bins(pass_low)
    first = 0 if pass_low == 0 else k_lo + 1
    out = np.zeros_like(spec)
    out[first : k_hi + 1] = spec[first : k_hi + 1]
    shift = 0.0
    if shift_to_baseband and k_lo > 0:
        if abs(pass_low / grid.resolution - k_lo) > 1e-6:
            raise InvalidArgumentError("a band shift must be a whole number of frequency bins")
        out = _move_bins(out, first, k_hi, -k_lo, n)
        shift = k_lo * grid.resolution
    values = np.fft.irfft(out, n=n)
    return Series(values, x.sample_period, x.t0, x.band_shift + shift)


def unshift(x: Series) -> Series:
    """Move demodulated content back to its original band."""
    if x.band_shift == 0:
        return x
    grid = x.grid
    n = grid.n_samples
    offset = int(round(x.band_shift / grid.resolution))
    if offset >= n // 2:
        raise InvalidArgumentError("band shift exceeds the grid Nyquist")
    spec = np.fft.rfft(x.values)
    # shifted content lives in (0, nyquist - shift]; DC is empty by construction
    out = _move_bins(spec, 1, n // 2 - offset, offset, n)
    return Series(np.fft.irfft(out, n=n), x.sample_period, x.t0, 0.0)


def decimate(x: Series, stride: int, phase: int = 0) -> Series:
    """Every ``stride``-th value starting at grid index ``phase``."""
    if stride < 1 or not 0 <= phase < max(stride, 1):
        raise InvalidArgumentError(f"invalid stride {stride} / phase {phase}")
    return Series(
        x.values[phase::stride],
        x.sample_period * stride,
        x.t0 + phase * x.sample_period,
        x.band_shift,
    )


def _trig_columns(n_index, n_samples, n_bins, edge):
    """Real Fourier basis of the band evaluated at grid indices ``n_index``."""
    theta = 2.0 * np.pi * np.outer(n_index, np.arange(1, n_bins + 1)) / n_samples
    cols = [np.ones((len(n_index), 1))]
    if n_bins:
        cos = np.cos(theta)
        sin = np.sin(theta)
        if edge == EDGE_COSINE or 2 * n_bins >= n_samples:
            sin = sin[:, :-1]
        cols += [cos, sin]
    return np.hstack(cols)


@lru_cache(maxsize=32)
def _interpolation_operator(n_samples, stride, phase, n_bins, edge):
    idx = phase + stride * np.arange(-(-(n_samples - phase) // stride))
    sub = _trig_columns(idx, n_samples, n_bins, edge)
    u, s, vt = np.linalg.svd(sub, full_matrices=False)
    well_posed = s.size > 0 and s[-1] > 1e-10 * s[0] and sub.shape[0] >= sub.shape[1]
    pinv = (vt.T / s) @ u.T
    full = _trig_columns(np.arange(n_samples), n_samples, n_bins, edge)
    op = full @ pinv
    op.setflags(write=False)
    return op, well_posed


def _fft_interpolate(values, n_samples, n_bins):
    n_dec = values.size
    ratio = n_samples / n_dec
    dec = np.fft.rfft(values)
    out = np.zeros(n_samples // 2 + 1, dtype=complex)
    top = min(n_bins, n_dec // 2)
    out[: top + 1] = dec[: top + 1] * ratio
    if n_dec % 2 == 0 and top == n_dec // 2 and n_dec < n_samples:
        # decimated Nyquist bin holds both halves of the band-edge pair
        out[top] *= 0.5
    return np.fft.irfft(out, n=n_samples)


def shannon_interpolate(
    samples: Series, target_grid: Grid, bandwidth: float, edge: str = EDGE_COSINE
) -> Series:
    """Unique ``bandwidth``-limited series on ``target_grid`` through ``samples``.

    The sample instants must be a uniform sub-grid of ``target_grid``
    (``stride`` grid steps apart, starting ``phase`` steps after its
    origin).  When the stride divides the grid length and the phase is 0
    this is exact DFT-domain zero padding; otherwise the band's real
    Fourier coefficients are fitted to the samples.

    Raises:
        AliasingError: the stream rate is below ``2 * bandwidth`` or
            collects too few samples per record for ``edge``.
        InvalidArgumentError: instants are not on the target grid.
    """
    _check_edge(edge)
    dt = target_grid.sample_period
    n = target_grid.n_samples
    stride_f = samples.sample_period / dt
    phase_f = (samples.t0 - target_grid.t0) / dt
    stride = int(round(stride_f))
    phase = int(round(phase_f))
    if stride < 1 or abs(stride_f - stride) > 1e-6 or abs(phase_f - phase) > 1e-6:
        raise InvalidArgumentError("sample instants are not a sub-grid of the target grid")
    if not 0 <= phase < stride:
        raise InvalidArgumentError(f"phase {phase} must lie in [0, {stride})")
    expected = -(-(n - phase) // stride)
    if samples.values.size != expected:
        raise InvalidArgumentError(
            f"expected {expected} samples for stride {stride}, got {samples.values.size}"
        )
    if bandwidth < 0 or bandwidth > target_grid.nyquist * (1 + _RATE_RTOL):
        raise InvalidArgumentError(f"bandwidth {bandwidth} outside [0, Nyquist]")
    if samples.rate < 2 * bandwidth * (1 - _RATE_RTOL):
        raise AliasingError(
            f"stream rate {samples.rate:g} Hz is below the Nyquist rate "
            f"{2 * bandwidth:g} Hz"
        )
    n_bins = min(target_grid.bins(bandwidth), n // 2)
    if samples.values.size < band_dimension(n_bins, edge, n):
        raise AliasingError(
            f"{samples.values.size} samples cannot determine a band of dimension "
            f"{band_dimension(n_bins, edge, n)} (edge={edge})"
        )
    if phase == 0 and n % stride == 0:
        values = _fft_interpolate(samples.values, n, n_bins)
    else:
        op, well_posed = _interpolation_operator(n, stride, phase, n_bins, edge)
        if not well_posed:
            raise AliasingError("sample instants do not determine the band (rank deficient)")
        values = op @ samples.values
    return Series(values, dt, target_grid.t0, samples.band_shift)


@dataclass(frozen=True)
class BandwidthProfile:
    """Per-vertex and per-graph-frequency bandwidths (Hz) on one grid.

    ``edge`` states the band-edge convention the signals obey (see the
    module docstring); it decides how many samples a critical stream needs.
    """

    vertex_bw: np.ndarray
    freq_bw: np.ndarray
    sample_period: float
    n_samples: int
    edge: str = EDGE_COSINE

    def __post_init__(self):
        vb = np.array(self.vertex_bw, dtype=float).reshape(-1)
        fb = np.array(self.freq_bw, dtype=float).reshape(-1)
        grid = Grid(self.sample_period, self.n_samples)
        _check_edge(self.edge)
        for name, arr in (("vertex_bw", vb), ("freq_bw", fb)):
            if np.any(arr < 0) or np.any(arr > grid.nyquist * (1 + _RATE_RTOL)):
                raise InvalidArgumentError(f"{name} entries must lie in [0, {grid.nyquist}]")
        vb.setflags(write=False)
        fb.setflags(write=False)
        object.__setattr__(self, "vertex_bw", vb)
        object.__setattr__(self, "freq_bw", fb)
        object.__setattr__(self, "sample_period", grid.sample_period)
        object.__setattr__(self, "n_samples", grid.n_samples)

    @property
    def n(self) -> int:
        return self.vertex_bw.size

    @property
    def grid(self) -> Grid:
        return Grid(self.sample_period, self.n_samples)

    @property
    def grid_nyquist(self) -> float:
        return self.grid.nyquist


def bandwidth_profile(
    signal: TimeVertexSignal, basis: GftBasis, rel_threshold: float = 1e-8, edge: str = EDGE_COSINE
) -> BandwidthProfile:
    """Measure the vertex and graph-frequency bandwidths of ``signal``."""
    spectral = gft(basis, signal)

    def measure(rows):
        ref = np.abs(np.fft.rfft(rows, axis=1)).max()
        return [
            estimate_bandwidth(Series(r, signal.sample_period, signal.t0), rel_threshold, ref)
            for r in rows
        ]

    return BandwidthProfile(
        measure(signal.values),
        measure(spectral.values),
        signal.sample_period,
        signal.n_samples,
        edge,
    )


def lowpass(signal: TimeVertexSignal, bandwidth: float) -> TimeVertexSignal:
    """Row-wise ideal lowpass of a multichannel signal."""
    grid = signal.grid
    k = min(grid.bins(bandwidth), grid.n_samples // 2)
    spec = np.fft.rfft(signal.values, axis=1)
    spec[:, k + 1 :] = 0
    return signal.with_values(np.fft.irfft(spec, n=grid.n_samples, axis=1))
