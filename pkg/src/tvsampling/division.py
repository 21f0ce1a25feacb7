"""Space division: frequency-zeroing chains, uniqueness sets, admissible sequences.

An equal-bandwidth space is peeled down to a simple-bandwidth space by
zeroing, one at a time, the graph frequency with the smallest bandwidth
strictly between 0 and the vertex bandwidth.  Reconstruction then climbs
back up the chain.  Stages are numbered in reconstruction order: stage
``k`` is the first frequency zeroed (smallest bandwidth) and stage 1 the
last, so stage bandwidths are non-increasing in ``i``.  At every level
``i`` the stage frequency is the smallest positive bandwidth still
active, which is what keeps each intermediate component inside its
bandlimited subspace.

Index sets are 0-based and stored as sorted tuples.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConditioningError,
    DegenerateStageError,
    InvalidArgumentError,
    RankDeficientError,
)
from .graph import GftBasis
from .spectral import BandwidthProfile

PIVOT_TOL = 1e-12
MAX_CONDITION = 1e8
MIN_E_ENTRY = 1e-10
_BW_RTOL = 1e-9


class SpaceKind(str, enum.Enum):
    SIMPLE = "simple"
    EQUAL = "equal"
    GENERAL = "general"


def _same(a, b):
    return np.isclose(a, b, rtol=_BW_RTOL, atol=1e-12)


def is_equal_bandwidth(profile: BandwidthProfile) -> bool:
    vb = profile.vertex_bw
    return bool(np.all(_same(vb, vb[0])))


def is_simple_bandwidth(profile: BandwidthProfile) -> bool:
    bmax = profile.vertex_bw.max()
    fb = profile.freq_bw
    return bool(np.all(_same(fb, 0) | (fb >= bmax) | _same(fb, bmax)))


def classify_space(profile: BandwidthProfile) -> SpaceKind:
    """``simple`` implies ``equal``; see :func:`is_equal_bandwidth`."""
    if not is_equal_bandwidth(profile):
        return SpaceKind.GENERAL
    if is_simple_bandwidth(profile):
        return SpaceKind.SIMPLE
    return SpaceKind.EQUAL


def _tuple(indices):
    return tuple(sorted(int(i) for i in indices))


@dataclass(frozen=True)
class Stage:
    lambda_star: int
    bandwidth: float


@dataclass(frozen=True)
class DivisionChain:
    """Zeroing chain of an equal-bandwidth space.

    ``stages[i - 1]`` is stage ``i``; ``lambda0_sets[i]`` is the set of
    graph frequencies with zero bandwidth at level ``i``.
    """

    n: int
    vertex_bw: float
    stages: tuple
    lambda0_sets: tuple

    @property
    def k(self) -> int:
        return len(self.stages)

    @property
    def zero_order(self) -> tuple:
        """Graph frequencies in the order they were zeroed."""
        return tuple(s.lambda_star for s in reversed(self.stages))

    def lambda0(self, i: int) -> tuple:
        return self.lambda0_sets[i]


def build_division_chain(profile: BandwidthProfile) -> DivisionChain:
    """Zero the smallest in-between bandwidth until the space is simple.

    Ties are broken by the lower graph-frequency index.  Frequencies whose
    bandwidth equals the vertex bandwidth are never zeroed.
    """
    if not is_equal_bandwidth(profile):
        raise InvalidArgumentError("a division chain needs an equal-bandwidth profile")
    b_v = float(profile.vertex_bw[0])
    bw = profile.freq_bw.copy()
    zero = _same(bw, 0)
    between = ~zero & (bw < b_v) & ~_same(bw, b_v)
    candidates = sorted(np.flatnonzero(between), key=lambda j: (bw[j], j))
    zeroed = [Stage(int(j), float(bw[j])) for j in candidates]
    stages = tuple(reversed(zeroed))
    sets = [_tuple(np.flatnonzero(zero))]
    for st in zeroed:
        sets.append(_tuple(sets[-1] + (st.lambda_star,)))
    # sets was built from level k downwards
    return DivisionChain(profile.n, b_v, stages, tuple(reversed(sets)))


def _complement(n, vertices):
    s = set(vertices)
    return tuple(v for v in range(n) if v not in s)


def _select_rows(a, count):
    """Greedy volume selection of ``count`` rows of ``a``.

    At each step the row with the largest component orthogonal to the rows
    already chosen is taken (row-pivoted Gram-Schmidt).
    """
    chosen = []
    resid = np.array(a, dtype=float)
    for _ in range(count):
        norms = np.linalg.norm(resid, axis=1)
        norms[chosen] = -1.0
        r = int(np.argmax(norms))
        if norms[r] < PIVOT_TOL:
            raise RankDeficientError(
                f"no pivot above {PIVOT_TOL:g} after {len(chosen)} rows (best {norms[r]:.3e})"
            )
        q = resid[r] / norms[r]
        resid = resid - np.outer(resid @ q, q)
        chosen.append(r)
    return chosen


def find_uniqueness_set(basis: GftBasis, lambda0) -> tuple:
    """Vertices ``V'`` with ``|V'| + |lambda0| = N`` and ``U[V'^c, lambda0]`` invertible.

    The complement rows are chosen greedily by pivot magnitude, which both
    certifies invertibility and favours a well-conditioned submatrix.
    """
    lam = _tuple(lambda0)
    n = basis.n
    if len(lam) > n:
        raise InvalidArgumentError(f"|lambda0| = {len(lam)} exceeds N = {n}")
    if not lam:
        return tuple(range(n))
    comp = _select_rows(basis.vectors[:, lam], len(lam))
    v_set = _complement(n, comp)
    cond = np.linalg.cond(basis.submatrix(comp, lam))
    if cond > MAX_CONDITION:
        raise ConditioningError(f"uniqueness-set submatrix condition {cond:.3e} > {MAX_CONDITION:g}")
    return v_set


@dataclass(frozen=True)
class AdmissibleSequence:
    """Nested uniqueness sets ``V_0 < V_1 < ... < V_k`` (one vertex per step)."""

    base_set: tuple
    added_vertices: tuple

    @property
    def k(self) -> int:
        return len(self.added_vertices)

    def vertex_set(self, i: int) -> tuple:
        return _tuple(self.base_set + self.added_vertices[:i])


def _smallest_sv(m):
    if m.size == 0:
        return np.inf
    return np.linalg.svd(m, compute_uv=False)[-1]


def build_admissible_sequence(basis: GftBasis, chain: DivisionChain) -> AdmissibleSequence:
    """Grow ``V_0`` one vertex per stage, keeping every stage invertible.

    At stage ``i`` the vertex whose removal from the complement of
    ``V_{i-1}`` leaves the largest smallest singular value on the level-``i``
    zero set is added.
    """
    if basis.n != chain.n:
        raise InvalidArgumentError(f"basis dimension {basis.n} != chain dimension {chain.n}")
    v0 = find_uniqueness_set(basis, chain.lambda0(0))
    current = list(v0)
    added = []
    for i in range(1, chain.k + 1):
        lam = chain.lambda0(i)
        comp = _complement(basis.n, current)
        scores = []
        for r in comp:
            rest = [c for c in comp if c != r]
            scores.append(_smallest_sv(basis.submatrix(rest, lam)))
        best = int(np.argmax(scores))
        if scores[best] < PIVOT_TOL:
            raise RankDeficientError(f"stage {i}: no vertex leaves an invertible submatrix")
        v_star = comp[best]
        rest = [c for c in comp if c != v_star]
        if lam:
            cond = np.linalg.cond(basis.submatrix(rest, lam))
            if cond > MAX_CONDITION:
                raise ConditioningError(f"stage {i}: condition {cond:.3e} > {MAX_CONDITION:g}")
        current.append(v_star)
        added.append(v_star)
        e = e_vector(basis, lam, current, chain.stages[i - 1].lambda_star)
        e_star = e[_tuple(current).index(v_star)]
        if abs(e_star) < MIN_E_ENTRY:
            raise DegenerateStageError(f"stage {i}: |E(v*)| = {abs(e_star):.3e}", stage=i)
    return AdmissibleSequence(_tuple(v0), tuple(added))


def extension_matrix(basis: GftBasis, lambda0, v0) -> np.ndarray:
    """Matrix ``M`` (N x |v0|) with ``X = M X[v0]`` on the zero set ``lambda0``.

    Rows for ``v0`` form the identity; the complement rows are
    ``-(U[c, lambda0]^T)^{-1} U[v0, lambda0]^T``.  Columns follow ``v0``
    in ascending order.
    """
    lam = _tuple(lambda0)
    vs = _tuple(v0)
    n = basis.n
    if len(lam) + len(vs) != n:
        raise InvalidArgumentError(f"|v0| + |lambda0| = {len(vs) + len(lam)} != N = {n}")
    m = np.zeros((n, len(vs)))
    m[list(vs), np.arange(len(vs))] = 1.0
    if lam:
        comp = _complement(n, vs)
        u_c = basis.submatrix(comp, lam)
        if np.linalg.cond(u_c) > 1.0 / np.finfo(float).eps:
            raise InvalidArgumentError("v0 is not a uniqueness set for lambda0")
        m[list(comp), :] = -np.linalg.solve(u_c.T, basis.submatrix(vs, lam).T)
    return m


def e_vector(basis: GftBasis, lambda0, v0, lambda_star: int) -> np.ndarray:
    """Row vector ``E`` with ``u_{lambda*}^T X = E X[v0]`` on the zero set."""
    if lambda_star in set(lambda0):
        raise InvalidArgumentError("lambda_star must not belong to lambda0")
    return basis.vectors[:, lambda_star] @ extension_matrix(basis, lambda0, v0)


@dataclass(frozen=True)
class StageCheck:
    stage: int
    condition: float
    e_star: float


def sequence_diagnostics(basis: GftBasis, chain: DivisionChain, seq: AdmissibleSequence) -> list:
    """Condition number and ``E(v*)`` for every level of a sequence.

    Stage 0 reports ``e_star = nan``.  Raises ``InvalidArgumentError`` if a
    structural invariant (cardinality, nesting) fails.
    """
    out = []
    for i in range(chain.k + 1):
        vi = seq.vertex_set(i)
        lam = chain.lambda0(i)
        if len(vi) + len(lam) != basis.n:
            raise InvalidArgumentError(f"level {i}: |V_i| + |Lambda_0^i| != N")
        comp = _complement(basis.n, vi)
        cond = float(np.linalg.cond(basis.submatrix(comp, lam))) if lam else 1.0
        e_star = float("nan")
        if i > 0:
            v_star = seq.added_vertices[i - 1]
            if v_star in seq.vertex_set(i - 1):
                raise InvalidArgumentError(f"level {i}: added vertex already present")
            e = e_vector(basis, lam, vi, chain.stages[i - 1].lambda_star)
            e_star = float(e[vi.index(v_star)])
        out.append(StageCheck(i, cond, e_star))
    return out
