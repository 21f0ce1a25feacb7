import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from tvsampling import (
    AliasingError,
    BandwidthProfile,
    GftBasis,
    InvalidArgumentError,
    TimeVertexSignal,
    bandwidth_profile,
    estimate_bandwidth,
    gft,
    ideal_filter,
    lowpass,
    shannon_interpolate,
)
from tvsampling.graph import Grid
from tvsampling.spectral import EDGE_FREE, Series, band_dimension, decimate, unshift

from conftest import tone

G256 = Grid(1 / 256, 256)


def series(values, grid=G256):
    return Series(values, grid.sample_period, grid.t0)


def random_band(rng, grid, k, edge="cosine"):
    """Random real series whose highest DFT bin is ``k``."""
    spec = np.zeros(grid.n_samples // 2 + 1, dtype=complex)
    spec[: k + 1] = rng.standard_normal(k + 1) + 1j * rng.standard_normal(k + 1)
    spec[0] = spec[0].real
    if edge == "cosine" or 2 * k == grid.n_samples:
        spec[k] = 1.0 + abs(spec[k].real)
    return np.fft.irfft(spec, n=grid.n_samples)


class TestEstimateBandwidth:
    def test_zero(self):
        assert estimate_bandwidth(series(np.zeros(256))) == 0.0

    def test_single_tone(self):
        assert estimate_bandwidth(series(tone(G256, 37))) == 37.0

    def test_two_tones_against_scan(self):
        x = tone(G256, 10) + tone(G256, 30)
        # oracle: explicit magnitude scan with a naive DFT
        t = np.arange(256)
        mags = [abs(np.sum(x * np.exp(-2j * np.pi * f * t / 256))) for f in range(129)]
        top = max(f for f in range(129) if mags[f] > 1e-8 * max(mags))
        assert estimate_bandwidth(series(x)) == float(top) == 30.0

    def test_resolution_multiple(self, rng):
        g = Grid(0.01, 50)
        b = estimate_bandwidth(series(rng.standard_normal(50), g))
        assert b / g.resolution == pytest.approx(round(b / g.resolution))

    def test_threshold_validated(self):
        with pytest.raises(InvalidArgumentError):
            estimate_bandwidth(series(np.ones(256)), 1.5)

    def test_reference_suppresses_roundoff(self):
        x = series(1e-17 * np.cos(2 * np.pi * 100 * G256.times))
        assert estimate_bandwidth(x) == 100.0
        assert estimate_bandwidth(x, reference=1.0) == 0.0


class TestIdealFilter:
    def test_idempotent(self, rng):
        x = series(rng.standard_normal(256))
        once = ideal_filter(x, 0, 40)
        twice = ideal_filter(once, 0, 40)
        np.testing.assert_allclose(twice.values, once.values, atol=1e-15)

    def test_nyquist_is_identity(self, rng):
        x = series(rng.standard_normal(256))
        np.testing.assert_allclose(ideal_filter(x, 0, 128).values, x.values, atol=1e-13)

    def test_two_tone_lowpass(self):
        x = series(tone(G256, 10) + tone(G256, 30, 0.3))
        np.testing.assert_allclose(ideal_filter(x, 0, 20).values, tone(G256, 10), atol=1e-9)

    def test_inverted_edges(self):
        with pytest.raises(InvalidArgumentError):
            ideal_filter(series(np.ones(256)), 30, 20)
        with pytest.raises(InvalidArgumentError):
            ideal_filter(series(np.ones(256)), 0, 200)

    def test_bands_tile_spectrum(self, rng):
        x = series(rng.standard_normal(256))
        parts = [ideal_filter(x, lo, hi).values for lo, hi in [(0, 20), (20, 50), (50, 128)]]
        np.testing.assert_allclose(sum(parts), x.values, atol=1e-12)

    def test_shift_round_trip(self, rng):
        x = series(rng.standard_normal(256))
        band = ideal_filter(x, 20, 50)
        shifted = ideal_filter(x, 20, 50, shift_to_baseband=True)
        assert shifted.band_shift == 20.0
        assert estimate_bandwidth(shifted) <= 30.0
        np.testing.assert_allclose(unshift(shifted).values, band.values, atol=1e-12)

    def test_shift_to_nyquist_band(self, rng):
        x = series(rng.standard_normal(256))
        shifted = ideal_filter(x, 100, 128, shift_to_baseband=True)
        np.testing.assert_allclose(unshift(shifted).values, ideal_filter(x, 100, 128).values, atol=1e-12)

    @given(st.integers(0, 2**32 - 1), st.integers(1, 128))
    def test_output_bandwidth_bounded(self, seed, b):
        x = series(np.random.default_rng(seed).standard_normal(256))
        assert estimate_bandwidth(ideal_filter(x, 0, b)) <= b


class TestShannonInterpolate:
    def test_constant(self):
        out = shannon_interpolate(Series(np.full(8, 2.5), 1 / 8, 0.0), G256, 0.0)
        np.testing.assert_allclose(out.values, 2.5, atol=1e-14)

    def test_nyquist_round_trip(self, rng):
        x = random_band(rng, G256, 20)
        # largest grid-divisor stride with rate >= 2B = 40 Hz is 4 (64 Hz)
        d = decimate(series(x), 4)
        out = shannon_interpolate(d, G256, 20.0)
        assert np.linalg.norm(out.values - x) <= 1e-9 * np.linalg.norm(x)

    def test_analytic_tone(self):
        x = series(tone(G256, 10, 0.7))
        out = shannon_interpolate(decimate(x, 8), G256, 10.0, EDGE_FREE)
        np.testing.assert_allclose(out.values, tone(G256, 10, 0.7), atol=1e-9)

    def test_critical_rate_cosine_edge(self, rng):
        x = random_band(rng, G256, 16)
        out = shannon_interpolate(decimate(series(x), 8), G256, 16.0)
        np.testing.assert_allclose(out.values, x, atol=1e-10)

    def test_non_divisor_stride(self, rng):
        x = random_band(rng, G256, 20, EDGE_FREE)
        out = shannon_interpolate(decimate(series(x), 5), G256, 20.0, EDGE_FREE)
        np.testing.assert_allclose(out.values, x, atol=1e-9)

    def test_aliasing(self):
        with pytest.raises(AliasingError):
            shannon_interpolate(decimate(series(np.zeros(256)), 8), G256, 20.0)

    def test_too_few_samples_for_free_edge(self):
        # 32 Hz stream holds 32 samples; a free-edge 16-bin band needs 33
        with pytest.raises(AliasingError):
            shannon_interpolate(decimate(series(np.zeros(256)), 8), G256, 16.0, EDGE_FREE)

    def test_misaligned(self):
        with pytest.raises(InvalidArgumentError):
            shannon_interpolate(Series(np.zeros(32), 1 / 32, 0.001), G256, 5.0)
        with pytest.raises(InvalidArgumentError):
            shannon_interpolate(Series(np.zeros(31), 1 / 32, 0.0), G256, 5.0)

    def test_phase_offset(self, rng):
        x = random_band(rng, G256, 10, EDGE_FREE)
        d = decimate(series(x), 8, phase=3)
        np.testing.assert_allclose(shannon_interpolate(d, G256, 10.0, EDGE_FREE).values, x, atol=1e-9)

    def test_round_trip_hundred_series(self, rng):
        for _ in range(100):
            k = int(rng.integers(1, 32))
            x = random_band(rng, G256, k)
            stride = 128 // 32  # 64 Hz > 2 * 31
            out = shannon_interpolate(decimate(series(x), stride), G256, float(k))
            assert np.linalg.norm(out.values - x) <= 1e-9 * np.linalg.norm(x)


class TestBandDimension:
    def test_values(self):
        assert band_dimension(0) == 1
        assert band_dimension(5) == 10
        assert band_dimension(5, EDGE_FREE) == 11
        assert band_dimension(128, EDGE_FREE, 256) == 256


class TestBandwidthProfile:
    def test_zero_signal(self):
        p = bandwidth_profile(TimeVertexSignal(np.zeros((3, 64))), GftBasis(np.ones(3), np.eye(3)))
        assert np.all(p.vertex_bw == 0) and np.all(p.freq_bw == 0)

    def test_identity_basis(self):
        g = Grid(1 / 64, 64)
        x = TimeVertexSignal(np.vstack([tone(g, 3), tone(g, 9), tone(g, 1)]), g.sample_period)
        p = bandwidth_profile(x, GftBasis(np.ones(3), np.eye(3)))
        np.testing.assert_array_equal(p.freq_bw, p.vertex_bw)
        np.testing.assert_array_equal(p.vertex_bw, [3, 9, 1])

    def test_two_vertex_hand_case(self, hadamard2):
        a = tone(G256, 10)
        p = bandwidth_profile(TimeVertexSignal(np.vstack([a, a]), G256.sample_period), hadamard2)
        np.testing.assert_array_equal(p.vertex_bw, [10, 10])
        np.testing.assert_array_equal(p.freq_bw, [10, 0])

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            BandwidthProfile([10, 200], [10, 0], 1 / 256, 256)
        with pytest.raises(InvalidArgumentError):
            BandwidthProfile([10, -1], [10, 0], 1 / 256, 256)


def test_gft_commutes_with_lowpass(rng):
    from scipy.stats import ortho_group

    b = GftBasis.from_vectors(ortho_group.rvs(4, random_state=rng))
    x = TimeVertexSignal(rng.standard_normal((4, 256)), G256.sample_period)
    lhs = gft(b, lowpass(x, 30)).values
    rhs = lowpass(gft(b, x), 30).values
    np.testing.assert_allclose(lhs, rhs, atol=1e-10)
