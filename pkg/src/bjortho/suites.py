"""Seeded verification suites behind ``bjortho verify``.

Each suite is a list of checks. A check draws its own generator from
``default_rng([seed, crc32(check id)])``, so checks are independent of
each other and of the order in which they run. Reports carry no timing,
so two runs with the same seed print identical text.
"""

from __future__ import annotations

import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from . import tolerances as tol
from .bj import State, bj_orthogonal_criterion
from .cstar import AlgebraElement, AlgebraShape, bj_orthogonal_alg
from .errors import AmbiguousFit, BJError, ConstructionError, GaugeViolation
from .geometry import (
    OutgoingSpaceSpec,
    bpm_pairing_closed_form,
    construct_Bpm,
    lastrow_svd_check,
    left_symmetric_falsify,
    locally_dependent_equiv,
    random_lastrow_matrix,
    reduced_frame_matrix,
)
from .linalg import complex_gaussian, svd
from .maps import (
    best_scalar_fit,
    build_theorem_map,
    counterexample_abelian_map,
    counterexample_gauge_map,
    random_gauge,
    random_isometry_spec,
    strong_preservation_test,
)


@dataclass
class CheckResult:
    suite: str
    check: str
    trials: int
    violations: int
    borderline: int
    seed: int
    seconds: float = field(default=0.0, compare=False)
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def line(self, timing: bool = False) -> str:
        s = (
            f"{'PASS' if self.passed else 'FAIL'} {self.suite}/{self.check} trials={self.trials} "
            f"violations={self.violations} borderline={self.borderline} seed={self.seed}"
        )
        if self.note:
            s += f" {self.note}"
        if timing:
            s += f" time={self.seconds:.2f}s"
        return s


@dataclass
class SuiteReport:
    seed: int
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def seconds(self) -> float:
        return sum(c.seconds for c in self.checks)

    def render(self, timing: bool = False) -> str:
        lines = [c.line(timing) for c in self.checks]
        failed = sum(not c.passed for c in self.checks)
        lines.append(
            f"overall: {'PASS' if self.passed else 'FAIL'} checks={len(self.checks)} failed={failed} seed={self.seed}"
        )
        if timing:
            lines[-1] += f" time={self.seconds:.2f}s"
        return "\n".join(lines) + "\n"


def check_rng(seed: int, check_id: str) -> np.random.Generator:
    return np.random.default_rng([int(seed), zlib.crc32(check_id.encode())])


# ---------------------------------------------------------------------------
# individual suites; each yields (check name, trials, violations, borderline, note)


def _lastrow(rng_for, trials):
    for n in (2, 3, 4, 5):
        rng = rng_for(f"lastrow-n{n}")
        bad = 0
        for _ in range(trials):
            B = random_lastrow_matrix(n, rng)
            sig = svd(B).singular_values
            if not lastrow_svd_check(B) or not sig[0] - sig[1] > tol.DELTA_MARGIN * sig[0]:
                bad += 1
        yield f"lastrow-n{n}", trials, bad, 0, ""


def _unit_pair(rng):
    z = complex_gaussian(2, rng)
    z /= np.linalg.norm(z)
    return complex(z[0]), complex(z[1])


def _bpm(rng_for, trials):
    rng = rng_for("bpm-random")
    bad = border = 0
    for _ in range(trials):
        n = int(rng.integers(3, 6))
        c, s = _unit_pair(rng)
        cy, sy = _unit_pair(rng)
        sigma2 = float(rng.uniform(0.05, 0.95))
        A = reduced_frame_matrix(c, s, cy, sy, sigma2, n)
        for sign in (1, -1):
            try:
                con = construct_Bpm(c, s, n, sign)
            except ConstructionError:
                bad += 1
                continue
            B, b = con.matrix, con.b
            closed = bpm_pairing_closed_form(c, s, sy, sigma2, sign)
            direct = np.vdot(A @ b, B @ b)
            if abs(direct - closed) > 1e-10:
                bad += 1
            fwd = bj_orthogonal_criterion(A, B)
            back = bj_orthogonal_criterion(B, A)
            if State.BORDERLINE in (fwd.state, back.state):
                border += 1
                continue
            scale = np.linalg.norm(A, 2) * np.linalg.norm(B, 2)
            expect_back = State.ORTHOGONAL if abs(closed) <= tol.DELTA_MARGIN * scale else State.NOT_ORTHOGONAL
            if fwd.state is not State.ORTHOGONAL or back.state is not expect_back:
                bad += 1
    yield "bpm-random", trials, bad, border, ""
    # parameters where exactly one of the two signs fails to be orthogonal to A
    r = 1 / np.sqrt(2)
    A = reduced_frame_matrix(r, r, r, -r, 0.5, 3)
    states = [bj_orthogonal_criterion(construct_Bpm(r, r, 3, sign).matrix, A).state for sign in (1, -1)]
    bad = int(states != [State.ORTHOGONAL, State.NOT_ORTHOGONAL])
    yield "bpm-exactly-one", 1, bad, 0, f"plus={states[0].value} minus={states[1].value}"


def _left_symmetry(rng_for, trials):
    for n in (3, 4):
        rng = rng_for(f"generic-falsified-n{n}")
        bad = 0
        count = 0
        for p in range(3, n + 1):
            V = OutgoingSpaceSpec.first_row_zeros(n, p - 1)
            for _ in range(trials):
                A = V.project(complex_gaussian((n, n), rng))
                count += 1
                if not left_symmetric_falsify(A, V, trials=2000, seed=rng).falsified:
                    bad += 1
        yield f"generic-falsified-n{n}", count, bad, 0, ""
    for n in (3, 4):
        rng = rng_for(f"e11-not-falsified-n{n}")
        V = OutgoingSpaceSpec.first_row_zeros(n, 1)
        A = np.zeros((n, n), dtype=complex)
        A[0, 0] = complex_gaussian((), rng) * 2
        rep = left_symmetric_falsify(A, V, trials=2000, seed=rng)
        yield f"e11-not-falsified-n{n}", rep.trials, int(rep.falsified), 0, ""
    # two-by-two case, checked empirically only
    rng = rng_for("n2-empirical")
    V = OutgoingSpaceSpec.first_row_zeros(2, 1)
    bad = 0
    for i, j in ((0, 0), (1, 0), (1, 1)):
        A = np.zeros((2, 2), dtype=complex)
        A[i, j] = complex_gaussian((), rng) * 2
        bad += int(left_symmetric_falsify(A, V, trials=500, seed=rng).falsified)
    for _ in range(trials):
        A = V.project(complex_gaussian((2, 2), rng))
        bad += int(not left_symmetric_falsify(A, V, trials=500, seed=rng).falsified)
    yield "n2-empirical", 3 + trials, bad, 0, ""


def _local_dependence(rng_for, trials):
    rng = rng_for("scalar-multiples")
    bad = 0
    for t in range(trials):
        n = int(rng.integers(2, 5))
        A = complex_gaussian((n, n), rng)
        if t % 3 == 1:
            A = A[:, :1] @ complex_gaussian((1, n), rng)
        mu = complex_gaussian((), rng) * 3
        cases = [
            (A, mu * A, True),
            (A, complex_gaussian((n, n), rng), False),
            (A, A + 1e-3 * np.linalg.norm(A, 2) * np.outer(complex_gaussian(n, rng), complex_gaussian(n, rng).conj()), False),
            (A, np.zeros_like(A), False),
        ]
        for X, Y, expect in cases:
            try:
                got = locally_dependent_equiv(X, Y, seed=rng)
            except AmbiguousFit:
                got = None
            bad += int(got is not expect)
    yield "scalar-multiples", 4 * trials, bad, 0, ""
    # rank-one neighbourhoods agree for scalar multiples
    rng = rng_for("rank-one-neighbourhoods")
    bad = border = 0
    for _ in range(trials):
        n = int(rng.integers(2, 5))
        A = complex_gaussian((n, n), rng)
        B = complex_gaussian((), rng) * A
        y = complex_gaussian(n, rng)
        x = complex_gaussian(n, rng)
        Ay = A @ y
        x = x - Ay * (np.vdot(Ay, x) / np.vdot(Ay, Ay))
        R = np.outer(x, y.conj())
        va, vb = bj_orthogonal_criterion(R, A), bj_orthogonal_criterion(R, B)
        if State.BORDERLINE in (va.state, vb.state):
            border += 1
        elif va.state is not State.ORTHOGONAL or vb.state is not State.ORTHOGONAL:
            bad += 1
    yield "rank-one-neighbourhoods", trials, bad, border, ""


def _unimodular_sweep(rng_for, trials):
    k_pi = trials // 2 if trials % 2 == 0 else None
    for shape in ((2, 2), (2, 3), (3, 1)):
        name = "sweep-" + "x".join(map(str, shape))
        rng = rng_for(name)
        shape = AlgebraShape(shape)
        i, j = 0, 1
        xi = complex_gaussian(shape[i], rng)
        xj = complex_gaussian(shape[j], rng)
        xi /= np.linalg.norm(xi)
        xj /= np.linalg.norm(xj)
        I = AlgebraElement.identity(shape)
        bad = border = 0
        hits = []
        for k in range(trials):
            mu = np.exp(2j * np.pi * k / trials)
            blocks = [np.zeros((n, n), dtype=complex) for n in shape]
            blocks[i] = np.outer(xi, xi.conj())
            blocks[j] = mu * np.outer(xj, xj.conj())
            v = bj_orthogonal_alg(AlgebraElement(shape, blocks), I)
            if v.state is State.BORDERLINE:
                border += 1
            elif v.state is State.ORTHOGONAL:
                hits.append(k)
                bad += int(k != k_pi)
            elif k == k_pi:
                bad += 1
        yield name, trials, bad, border, "orthogonal_at=" + (",".join(map(str, hits)) or "none")


def _theorem_maps(rng_for, trials, maps_per_shape=2):
    for shape in ((2, 2), (2, 3), (3, 3)):
        name = "preservation-" + "x".join(map(str, shape))
        rng = rng_for(name)
        bad = border = pairs = 0
        for _ in range(maps_per_shape):
            phi = build_theorem_map(random_isometry_spec(shape, rng), random_gauge(shape, rng))
            try:
                rep = strong_preservation_test(phi, n_pairs=trials, seed=rng)
            except GaugeViolation:
                bad += 1
                continue
            bad += rep.violations
            border += rep.borderline
            pairs += rep.pairs
        yield name, pairs, bad, border, ""


def _gauge_example(rng_for, trials):
    gauge = counterexample_gauge_map()
    rep = strong_preservation_test(gauge, n_pairs=trials, seed=rng_for("gauge-preservation"))
    yield "gauge-preservation", rep.pairs, rep.violations, rep.borderline, ""
    worst = 0.0
    rs = np.linspace(0.1, 0.9, 9)
    for r in rs:
        X = AlgebraElement((2, 2), [np.eye(2), r * np.eye(2)])
        worst = max(worst, best_scalar_fit(X, gauge(X))[1] / X.norm())
    yield "gauge-not-scalar-multiple", len(rs), int(not worst > 1e-6), 0, f"max_residual={worst:.6f}"


def _abelian_example(rng_for, trials):
    abelian = counterexample_abelian_map()
    rep = strong_preservation_test(abelian, n_pairs=trials, seed=rng_for("abelian-preservation"))
    yield "abelian-preservation", rep.pairs, rep.violations, rep.borderline, ""
    X = AlgebraElement((1, 1), [[[1.0]], [[1j]]])
    res = best_scalar_fit(X, abelian(X))[1] / X.norm()
    yield "abelian-not-scalar-multiple", 1, int(not res > 1e-6), 0, f"residual={res:.6f}"


def _examples(rng_for, trials):
    yield from _gauge_example(rng_for, trials)
    yield from _abelian_example(rng_for, trials)


SUITES = {
    "lemma3.1": (_lastrow, 200),
    "lemma3.2": (_bpm, 200),
    "lemma3.5": (_left_symmetry, 10),
    "lemma3.7": (_local_dependence, 100),
    "lemma6.1": (_unimodular_sweep, 360),
    "thm1.1": (_theorem_maps, 500),
    "examples7": (_examples, 2000),
}
SUITE_NAMES = ("all",) + tuple(SUITES)


def _run(report: SuiteReport, suite: str, fn, trials: int, seed: int, progress) -> None:
    def rng_for(check):
        return check_rng(seed, f"{suite}/{check}")

    gen = fn(rng_for, trials)
    while True:
        t0 = time.perf_counter()
        try:
            check, count, bad, border, note = next(gen)
        except StopIteration:
            break
        res = CheckResult(suite, check, count, bad, border, int(seed), time.perf_counter() - t0, note)
        report.checks.append(res)
        if progress is not None:
            progress(res)


def run_suite(name: str, trials: int | None = None, seed: int = 0, progress=None) -> SuiteReport:
    """Run one suite (or ``all``); ``trials`` overrides each suite's main count."""
    if name != "all" and name not in SUITES:
        raise BJError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    names = list(SUITES) if name == "all" else [name]
    report = SuiteReport(int(seed))
    for suite in names:
        fn, default = SUITES[suite]
        _run(report, suite, fn, default if trials is None else int(trials), seed, progress)
    return report


def run_counterexample(which: str, pairs: int | None = None, seed: int = 0) -> SuiteReport:
    """The gauge or abelian half of ``examples7``, with the same per-check seeds."""
    fns = {"gauge": _gauge_example, "abelian": _abelian_example}
    if which not in fns:
        raise BJError(f"unknown counterexample {which!r}")
    report = SuiteReport(int(seed))
    _run(report, "examples7", fns[which], SUITES["examples7"][1] if pairs is None else int(pairs), seed, None)
    return report
