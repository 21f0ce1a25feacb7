"""Randomized verification suites behind the ``verify`` command.

Each suite draws its instances from a generator seeded with
``(seed, suite index)``, so suites are reproducible independently of one
another.
"""

from dataclasses import dataclass

import numpy as np
from scipy.stats import ortho_group

from .division import (
    MAX_CONDITION,
    MIN_E_ENTRY,
    build_admissible_sequence,
    build_division_chain,
    sequence_diagnostics,
)
from .experiment import random_equal_instance, synthesize, synthesize_general
from .errors import InvalidArgumentError
from .graph import GftBasis, Grid, build_covariance_graph, eigendecompose
from .oracle import least_squares_oracle, lemma4_check, nrmse, recoverability_test
from .planner import make_plan, min_rate_simple, sampling_rate_of
from .reconstruction import extract_samples, reconstruct_equal, sample_and_reconstruct_general
from .spectral import EDGE_FREE, BandwidthProfile, bandwidth_profile


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    instances: int
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} ({self.instances} instances): {self.detail}"


def random_basis(rng, n: int) -> GftBasis:
    u = ortho_group.rvs(n, random_state=rng) if n > 1 else np.ones((1, 1))
    return GftBasis.from_vectors(u, np.sort(rng.standard_normal(n))[::-1])


def random_profile(rng, n: int, grid: Grid) -> BandwidthProfile:
    """Equal-bandwidth profile with random graph-frequency bandwidths."""
    k_v = int(rng.integers(1, grid.n_samples // 4 + 1))
    ks = rng.integers(0, k_v + 1, size=n)
    ks[rng.integers(n)] = k_v
    res = grid.resolution
    return BandwidthProfile(np.full(n, k_v * res), ks * res, grid.sample_period, grid.n_samples)


def check_lemma4(rng, count: int) -> CheckResult:
    worst, bad = 0.0, 0
    for _ in range(count):
        n = int(rng.integers(2, 9))
        r = lemma4_check(rng.standard_normal((n, n)))
        worst = max(worst, r.residual)
        bad += not r.passed
    return CheckResult("block-determinant identity", bad == 0, count,
                       f"worst relative residual {worst:.2e}, {bad} failures")


def check_sequences(rng, count: int) -> CheckResult:
    grid = Grid(1 / 64, 64)
    worst_cond, min_e, bad = 1.0, np.inf, 0
    for _ in range(count):
        n = int(rng.integers(2, 9))
        basis = random_basis(rng, n)
        profile = random_profile(rng, n, grid)
        try:
            chain = build_division_chain(profile)
            diags = sequence_diagnostics(basis, chain, build_admissible_sequence(basis, chain))
        except Exception:  # noqa: BLE001 - any failure counts against the suite
            bad += 1
            continue
        worst_cond = max(worst_cond, max(d.condition for d in diags))
        es = [abs(d.e_star) for d in diags[1:]]
        if es:
            min_e = min(min_e, min(es))
    ok = bad == 0 and worst_cond <= MAX_CONDITION and min_e >= MIN_E_ENTRY
    return CheckResult("admissible sequences", ok, count,
                       f"max condition {worst_cond:.2e}, min |E(v*)| {min_e:.2e}, {bad} construction failures")


def check_rates_and_necessity(rng, count: int) -> CheckResult:
    grid = Grid(1 / 64, 64)
    mismatched, unrecoverable, removable, exact = 0, 0, 0, 0
    for _ in range(count):
        _, basis, profile = random_equal_instance(rng, grid, 6)
        plan = make_plan(basis, profile)
        sched = plan.schedule
        if not sched.rounded:
            exact += 1
            mismatched += sampling_rate_of(sched) != plan.min_rate
        if not recoverability_test(sched, basis, profile).recoverable:
            unrecoverable += 1
        for i, e in enumerate(sched.entries):
            if e.stride and recoverability_test(sched.without(i), basis, profile).recoverable:
                removable += 1
    ok = mismatched == unrecoverable == removable == 0
    return CheckResult("rate formula and necessity", ok, count,
                       f"{mismatched} rate mismatches in {exact} unrounded, {unrecoverable} unrecoverable schedules, "
                       f"{removable} removable streams")


def check_oracle(rng, count: int) -> CheckResult:
    grid = Grid(1 / 64, 64)
    worst = 0.0
    for _ in range(count):
        signal, basis, profile = random_equal_instance(rng, grid, 6)
        plan = make_plan(basis, profile)
        samples = extract_samples(signal, plan.schedule)
        rec = reconstruct_equal(samples, plan)
        worst = max(worst, nrmse(rec, least_squares_oracle(samples, basis, profile).signal),
                    nrmse(signal, rec))
    return CheckResult("oracle agreement", worst <= 1e-6, count, f"worst NRMSE {worst:.2e}")


def check_simple(rng, count: int) -> CheckResult:
    grid = Grid(1 / 128, 128)
    worst, mismatched = 0.0, 0
    for _ in range(count):
        n = int(rng.integers(1, 7))
        b = int(rng.integers(1, 33)) * grid.resolution
        on = rng.random(n) < 0.5
        on[rng.integers(n)] = True
        try:
            signal, basis = synthesize(np.where(on, b, 0.0), grid, rng)
        except InvalidArgumentError:
            continue
        profile = bandwidth_profile(signal, basis)
        plan = make_plan(basis, profile)
        expected = min_rate_simple(profile, plan.chain.lambda0(0))
        exact = not plan.schedule.rounded
        mismatched += plan.chain.k != 0 or (exact and sampling_rate_of(plan.schedule) != expected)
        rec = reconstruct_equal(extract_samples(signal, plan.schedule), plan)
        worst = max(worst, nrmse(signal, rec))
    return CheckResult("simple spaces", worst <= 1e-8 and mismatched == 0, count,
                       f"worst NRMSE {worst:.2e}, {mismatched} rate mismatches")


def check_general(rng, count: int) -> CheckResult:
    grid = Grid(1 / 256, 256)
    worst, over = 0.0, 0
    for _ in range(count):
        signal = synthesize_general([50, 20, 50, 50], grid, rng)
        graph = build_covariance_graph(signal)
        profile = bandwidth_profile(signal, eigendecompose(graph), edge=EDGE_FREE)
        res = sample_and_reconstruct_general(signal, profile, graph)
        worst = max(worst, nrmse(signal, res.reconstruction))
        over += res.min_rate > 2 * profile.vertex_bw.sum() + 1e-9
    return CheckResult("general pipeline", worst <= 1e-7 and over == 0, count,
                       f"worst NRMSE {worst:.2e}, {over} instances above the separate baseline")


SUITES = (
    ("lemma4", check_lemma4, 10),
    ("sequences", check_sequences, 1),
    ("rates", check_rates_and_necessity, 0.2),
    ("oracle", check_oracle, 0.5),
    ("simple", check_simple, 0.5),
    ("general", check_general, 0.1),
)


def run_checks(seed: int = 0, instances: int = 100, suites=None) -> list:
    """Run the named suites (default all); ``instances`` scales every suite."""
    out = []
    for idx, (name, fn, scale) in enumerate(SUITES):
        if suites and name not in suites:
            continue
        rng = np.random.default_rng([seed, idx])
        out.append(fn(rng, max(1, int(round(instances * scale)))))
    return out


def format_report(results) -> str:
    lines = [r.line() for r in results]
    lines.append(f"overall: {'PASS' if all(r.passed for r in results) else 'FAIL'}")
    return "\n".join(lines) + "\n"
