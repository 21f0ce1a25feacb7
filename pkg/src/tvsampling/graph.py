"""Graphs, graph Fourier bases and time-vertex signals.

A time-vertex signal holds one time series per graph vertex on a shared,
uniform time grid.  The grid stands in for continuous time: every
"continuous" operation in this package is exact on the grid's periodic
extension.

The graph Fourier transform (GFT) projects the vertex vector at every
instant onto the orthonormal eigenvectors of the adjacency matrix.  Bases
are real; eigenvalues are sorted in descending order and each eigenvector
is signed so that its largest-magnitude entry is positive.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, InvalidArgumentError, NumericError

_SYMMETRY_RTOL = 1e-12
_TIE_RTOL = 1e-12


def _as_index_array(indices):
    return np.asarray(sorted(int(i) for i in indices), dtype=int)


@dataclass(frozen=True)
class Grid:
    """Uniform time grid ``t0 + n * sample_period`` for ``n < n_samples``.

    The grid is treated as one period of a periodic extension, so its
    frequency resolution is ``1 / (n_samples * sample_period)``.
    """

    sample_period: float
    n_samples: int
    t0: float = 0.0

    def __post_init__(self):
        if not self.sample_period > 0:
            raise InvalidArgumentError("sample_period must be positive")
        if int(self.n_samples) != self.n_samples or self.n_samples < 2:
            raise InvalidArgumentError("a grid needs at least 2 instants")
        object.__setattr__(self, "sample_period", float(self.sample_period))
        object.__setattr__(self, "n_samples", int(self.n_samples))
        object.__setattr__(self, "t0", float(self.t0))

    @property
    def rate(self) -> float:
        return 1.0 / self.sample_period

    @property
    def nyquist(self) -> float:
        return 0.5 / self.sample_period

    @property
    def duration(self) -> float:
        return self.n_samples * self.sample_period

    @property
    def resolution(self) -> float:
        return 1.0 / self.duration

    def bins(self, frequency: float) -> int:
        """Number of whole frequency bins in ``[0, frequency]`` above DC."""
        return int(np.floor(frequency / self.resolution + 1e-9))

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.sample_period * np.arange(self.n_samples)


@dataclass(frozen=True)
class GraphSpec:
    """Undirected weighted graph given by a symmetric adjacency matrix."""

    adjacency: np.ndarray

    def __post_init__(self):
        a = np.array(self.adjacency, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise InvalidArgumentError(f"adjacency must be square, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise DataError("adjacency contains non-finite entries")
        scale = max(np.abs(a).max(), np.finfo(float).tiny)
        if np.abs(a - a.T).max() > _SYMMETRY_RTOL * scale:
            raise InvalidArgumentError("adjacency is not symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "adjacency", a)

    @property
    def n_vertices(self) -> int:
        return self.adjacency.shape[0]

    def subgraph(self, vertices) -> "GraphSpec":
        """Principal submatrix of the adjacency on ``vertices`` (sorted)."""
        idx = _as_index_array(vertices)
        return GraphSpec(self.adjacency[np.ix_(idx, idx)])


@dataclass(frozen=True)
class GftBasis:
    """Orthonormal eigenvector basis of an adjacency matrix.

    Column ``i`` of ``vectors`` is the eigenvector paired with
    ``eigenvalues[i]``.  Use :func:`eigendecompose` or
    :meth:`from_vectors` to obtain a basis in canonical form.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        lam = np.array(self.eigenvalues, dtype=float).reshape(-1)
        u = np.array(self.vectors, dtype=float)
        if u.ndim != 2 or u.shape != (lam.size, lam.size):
            raise InvalidArgumentError(
                f"vectors shape {u.shape} does not match {lam.size} eigenvalues"
            )
        lam.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "vectors", u)

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    @classmethod
    def from_vectors(cls, vectors, eigenvalues=None) -> "GftBasis":
        """Canonicalize an orthonormal matrix into a basis.

        Columns are reordered by descending eigenvalue (stable for ties)
        and sign-fixed.  Without eigenvalues, ``n, n-1, ..., 1`` is used so
        the given column order is kept.
        """
        u = np.array(vectors, dtype=float)
        n = u.shape[1]
        if eigenvalues is None:
            eigenvalues = np.arange(n, 0, -1, dtype=float)
        lam = np.asarray(eigenvalues, dtype=float)
        order = np.argsort(-lam, kind="stable")
        return cls(lam[order], _fix_signs(u[:, order]))

    def submatrix(self, rows, cols) -> np.ndarray:
        """Rows ``rows`` (vertices) and columns ``cols`` (graph frequencies) of U.

        Both index sets are used in ascending order.
        """
        r = _as_index_array(rows)
        c = _as_index_array(cols)
        return self.vectors[np.ix_(r, c)]

    def adjacency(self) -> np.ndarray:
        return (self.vectors * self.eigenvalues) @ self.vectors.T


@dataclass(frozen=True)
class TimeVertexSignal:
    """``N`` vertex channels on a uniform grid ``t0 + n * sample_period``."""

    values: np.ndarray
    sample_period: float = 1.0
    t0: float = 0.0
    labels: tuple = field(default=None, compare=False)

    def __post_init__(self):
        x = np.array(self.values, dtype=float)
        if x.ndim == 1:
            x = x[np.newaxis, :]
        if x.ndim != 2:
            raise InvalidArgumentError(f"values must be 2-D, got {x.ndim}-D")
        if x.shape[1] < 2:
            raise InvalidArgumentError("a signal needs at least 2 grid instants")
        if not self.sample_period > 0:
            raise InvalidArgumentError("sample_period must be positive")
        if not np.all(np.isfinite(x)):
            raise DataError("signal contains non-finite values")
        x.setflags(write=False)
        object.__setattr__(self, "values", x)
        object.__setattr__(self, "sample_period", float(self.sample_period))
        object.__setattr__(self, "t0", float(self.t0))

    @property
    def n_vertices(self) -> int:
        return self.values.shape[0]

    @property
    def n_samples(self) -> int:
        return self.values.shape[1]

    @property
    def grid(self) -> Grid:
        return Grid(self.sample_period, self.n_samples, self.t0)

    @property
    def grid_rate(self) -> float:
        return 1.0 / self.sample_period

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.sample_period * np.arange(self.n_samples)

    def with_values(self, values) -> "TimeVertexSignal":
        return TimeVertexSignal(values, self.sample_period, self.t0, self.labels)

    def rows(self, vertices) -> "TimeVertexSignal":
        idx = _as_index_array(vertices)
        return self.with_values(self.values[idx])


def _fix_signs(u):
    u = u.copy()
    for j in range(u.shape[1]):
        mag = np.abs(u[:, j])
        # lowest index among entries tied for the largest magnitude
        k = int(np.flatnonzero(mag >= mag.max() * (1 - _TIE_RTOL))[0])
        if u[k, j] < 0:
            u[:, j] = -u[:, j]
    return u


def build_covariance_graph(signal: TimeVertexSignal) -> GraphSpec:
    """Sample covariance of the de-meaned channels, used as adjacency.

    ``C[i, j] = sum_t (x_i(t) - mean_i)(x_j(t) - mean_j) / (T - 1)``.
    """
    x = np.asarray(signal.values, dtype=float)
    if x.shape[1] < 2:
        raise InvalidArgumentError("covariance needs T >= 2")
    if not np.all(np.isfinite(x)):
        raise DataError("signal contains non-finite values")
    xc = x - x.mean(axis=1, keepdims=True)
    c = xc @ xc.T / (x.shape[1] - 1)
    return GraphSpec(0.5 * (c + c.T))


def eigendecompose(graph: GraphSpec) -> GftBasis:
    """Eigendecomposition of the adjacency in canonical (sorted, signed) form."""
    a = graph.adjacency
    try:
        lam, u = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(a)
        raise NumericError(
            f"eigensolver failed on {a.shape[0]}x{a.shape[0]} adjacency "
            f"(condition number {cond:.3e}, norm {np.linalg.norm(a):.3e})"
        ) from exc
    return GftBasis.from_vectors(u, lam)


def _check_dims(basis, signal):
    if signal.n_vertices != basis.n:
        raise InvalidArgumentError(
            f"signal has {signal.n_vertices} rows but basis has dimension {basis.n}"
        )


def gft(basis: GftBasis, signal: TimeVertexSignal) -> TimeVertexSignal:
    """Row ``i`` of the result is ``u_i^T X(t)`` at every grid instant."""
    _check_dims(basis, signal)
    return signal.with_values(basis.vectors.T @ signal.values)


def igft(basis: GftBasis, spectrum_signal: TimeVertexSignal) -> TimeVertexSignal:
    """Inverse of :func:`gft`: ``X(t) = U F(t)``."""
    _check_dims(basis, spectrum_signal)
    return spectrum_signal.with_values(basis.vectors @ spectrum_signal.values)
