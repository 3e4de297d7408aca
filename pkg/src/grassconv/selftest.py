"""Desk-scale verification suite backing the `selftest` subcommand.

Each check is a pure function returning a CheckResult, parameterized by
shapes, sample sizes, and tolerances so the acceptance tests can run the
same code at their pinned settings.  The oracle-equivalence check prints a
table of every configuration pair with the predicate against the numerical
outcome.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .cartan import (Configuration, cartan_from_configuration, configuration_of,
                     exp_cartan, is_eligible, project_batch)
from .density import (SAMPLE_TOL, Status, decide, find_certificate,
                      necessity_report, support_sample, v_span_rank)
from .linalg import (DEFAULT_TOLERANCE, Field, Tolerance, haar_compact_pair,
                     matrix_exp, rng_from)
from .powers import min_power, sample_power
from .structure import (CartanElement, GrassmannShape, a_component,
                        build_roots, build_S, cartan_basis, expected_diagonal,
                        one_param_k, positive_symmetrized, symmetrize, theta,
                        weyl_project)

DESK_SHAPES = (GrassmannShape(2, 3), GrassmannShape(2, 4),
               GrassmannShape(3, 4), GrassmannShape(3, 5))
PAIR_SHAPES = (GrassmannShape(2, 3), GrassmannShape(3, 4))
ALL_FIELDS = (Field.REAL, Field.COMPLEX, Field.QUATERNION)


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str
    elapsed: float = 0.0
    table: list[str] = field(default_factory=list)


def _partitions(k: int, cap: int | None = None):
    if k == 0:
        yield ()
        return
    top = min(k, cap) if cap else k
    for first in range(top, 0, -1):
        for rest in _partitions(k - first, first):
            yield (first,) + rest


def all_configurations(p: int, include_zero: bool = True) -> list[Configuration]:
    """Every configuration of rank p, blocks as non-increasing partitions."""
    out = []
    for zeros in range(p + 1):
        if zeros == p and not include_zero:
            continue
        for blocks in _partitions(p - zeros):
            out.append(Configuration(blocks, zeros))
    return out


def explicit_witnesses_23() -> tuple[np.ndarray, np.ndarray]:
    """The two closed-form compact witnesses for the (2,3) singular pairs:
    simultaneous plane rotations by 45 degrees in both factors."""
    r = np.sqrt(2.0) / 2.0
    k1 = np.array([
        [r, -r, 0, 0, 0],
        [r, r, 0, 0, 0],
        [0, 0, 1, 0, 0],
        [0, 0, 0, r, -r],
        [0, 0, 0, r, r]])
    k2 = np.array([
        [r, -r, 0, 0, 0],
        [r, r, 0, 0, 0],
        [0, 0, r, 0, -r],
        [0, 0, 0, 1, 0],
        [0, 0, r, 0, r]])
    return k1, k2


# ---------------------------------------------------------------------------
# Individual checks

def check_root_fidelity(shapes=DESK_SHAPES, trials: int = 100,
                        bound: float = 1e-10, seed: int = 0) -> CheckResult:
    """Eigen-relation [H, X] = value(H) X for every root vector."""
    t0 = time.time()
    rng = rng_from(seed, 10)
    worst = 0.0
    count = 0
    for shape in shapes:
        roots = build_roots(shape)
        count += len(roots)
        for _ in range(trials):
            h = rng.standard_normal(shape.p)
            H = CartanElement(shape, tuple(h)).embed()
            for r in roots:
                defect = np.max(np.abs(H @ r.vector - r.vector @ H - r.value(h) * r.vector))
                worst = max(worst, defect)
    return CheckResult("root-fidelity", worst <= bound,
                       f"worst bracket defect {worst:.2e} over {count} vectors x {trials} draws"
                       f" (bound {bound:g})", time.time() - t0)


def check_diagonalizer(shapes=DESK_SHAPES, trials: int = 100, bound_alg: float = 1e-12,
                       bound_grp: float = 1e-10, seed: int = 0) -> CheckResult:
    """S^T H S and S^T e^H S against their closed diagonal forms."""
    t0 = time.time()
    rng = rng_from(seed, 11)
    worst_alg = worst_grp = worst_orth = 0.0
    det_ok = True
    for shape in shapes:
        s = build_S(shape)
        worst_orth = max(worst_orth, float(np.max(np.abs(s.T @ s - np.eye(shape.n)))))
        det_ok = det_ok and np.linalg.det(s) > 0
        for _ in range(trials):
            h = rng.standard_normal(shape.p)
            H = CartanElement(shape, tuple(h)).embed()
            worst_alg = max(worst_alg, float(np.max(np.abs(
                s.T @ H @ s - expected_diagonal(h, shape)))))
            worst_grp = max(worst_grp, float(np.max(np.abs(
                s.T @ matrix_exp(H) @ s - expected_diagonal(h, shape, group=True)))))
    ok = worst_alg <= bound_alg and worst_grp <= bound_grp and det_ok
    return CheckResult("diagonalizer-identities", ok,
                       f"algebra defect {worst_alg:.2e} (bound {bound_alg:g}), "
                       f"group defect {worst_grp:.2e} (bound {bound_grp:g}), "
                       f"orthogonality {worst_orth:.2e}, det +1 {det_ok}",
                       time.time() - t0)


def check_projection_roundtrip(shapes=DESK_SHAPES, fields=ALL_FIELDS, trials: int = 100,
                               bound: float = 1e-8, seed: int = 0,
                               tol: Tolerance = DEFAULT_TOLERANCE,
                               threads: int = 1) -> CheckResult:
    """Projection of k1 e^H k2 recovers the chamber representative of H."""
    t0 = time.time()
    worst = 0.0
    for si, shape in enumerate(shapes):
        for fi, fld in enumerate(fields):
            rng = rng_from(seed, 12, si, fi)
            hs = np.sort(np.abs(rng.standard_normal((trials, shape.p))), axis=1)[:, ::-1]
            k1 = haar_compact_pair(shape.p, shape.q, fld,
                                   [rng_from(seed, 13, si, fi, i) for i in range(trials)])
            k2 = haar_compact_pair(shape.p, shape.q, fld,
                                   [rng_from(seed, 14, si, fi, i) for i in range(trials)])
            gs = np.stack([exp_cartan(CartanElement(shape, tuple(h)), fld) for h in hs])
            got = project_batch(k1 @ gs @ k2, shape, fld, tol, threads=threads)
            worst = max(worst, float(np.max(np.abs(got - hs))))
    return CheckResult("projection-roundtrip", worst <= bound,
                       f"worst roundtrip defect {worst:.2e} over "
                       f"{len(shapes)}x{len(fields)}x{trials} (bound {bound:g})",
                       time.time() - t0)


def check_oracle_equivalence(shapes=PAIR_SHAPES, trials: int = 20, seed: int = 0,
                             tol: Tolerance = DEFAULT_TOLERANCE,
                             configurations: dict | None = None) -> CheckResult:
    """Eligibility predicate against witness search over configuration pairs."""
    t0 = time.time()
    rows = []
    mismatches = 0
    total = 0
    for shape in shapes:
        confs = configurations.get(shape.p) if configurations else None
        if confs is None:
            confs = [c for c in all_configurations(shape.p) if not c.is_zero]
        for cx in confs:
            X = cartan_from_configuration(shape, cx)
            for cy in confs:
                Y = cartan_from_configuration(shape, cy)
                verdict = is_eligible(cx, cy, shape.p)
                cert = find_certificate(X, Y, trials=trials, seed=seed, tol=tol)
                found = cert is not None
                agree = verdict.eligible == found
                total += 1
                mismatches += 0 if agree else 1
                mark = "ok" if agree else "MISMATCH"
                rows.append(f"  ({shape.p},{shape.q}) X[{cx}] Y[{cy}]: "
                            f"predicate={'eligible' if verdict.eligible else 'ineligible'} "
                            f"({verdict.lhs}<={verdict.rhs}) "
                            f"witness={'found' if found else 'none'} {mark}")
    return CheckResult("oracle-equivalence", mismatches == 0,
                       f"{total} ordered pairs, {mismatches} mismatches",
                       time.time() - t0, rows)


def check_explicit_witnesses(tol: Tolerance = DEFAULT_TOLERANCE) -> CheckResult:
    """The closed-form (2,3) witnesses reach full rank in their three cases."""
    t0 = time.time()
    shape = GrassmannShape(2, 3)
    k1, k2 = explicit_witnesses_23()
    x20 = cartan_from_configuration(shape, Configuration((2,), 0))
    x11 = cartan_from_configuration(shape, Configuration((1,), 1))
    ranks = (v_span_rank(x20, x20, k1, tol),
             v_span_rank(x11, x11, k1, tol),
             v_span_rank(x20, x11, k2, tol))
    ok = ranks == (6, 6, 6)
    return CheckResult("explicit-witnesses", ok,
                       f"ranks {ranks} vs target (6, 6, 6)", time.time() - t0)


def check_necessity_patterns(shapes=PAIR_SHAPES, fields=ALL_FIELDS, samples: int = 1000,
                             sample_tol: float = SAMPLE_TOL, seed: int = 0,
                             tol: Tolerance = DEFAULT_TOLERANCE,
                             threads: int = 1) -> CheckResult:
    """Every ineligible pair satisfies its forced repetition clauses on all
    sampled support points, over every base field."""
    t0 = time.time()
    pairs = 0
    violations = 0
    silent = 0
    for shape in shapes:
        confs = all_configurations(shape.p)
        for cx in confs:
            X = cartan_from_configuration(shape, cx)
            for cy in confs:
                if is_eligible(cx, cy, shape.p).eligible:
                    continue
                Y = cartan_from_configuration(shape, cy)
                for fld in fields:
                    sample = support_sample(X, Y, fld, samples, seed, tol, threads)
                    report = necessity_report(X, Y, sample, sample_tol)
                    pairs += 1
                    if not report.triggered:
                        silent += 1
                    violations += sum(c.violated for c in report.clauses)
    ok = violations == 0 and silent == 0
    return CheckResult("necessity-patterns", ok,
                       f"{pairs} ineligible pair/field combinations x {samples} samples, "
                       f"{violations} violations, {silent} without active clause",
                       time.time() - t0)


def check_conjugation_formulas(shape: GrassmannShape = GrassmannShape(3, 5),
                               ts=(0.1, 0.3, 0.7), bound: float = 1e-10) -> CheckResult:
    """Closed form of the compact one-parameter conjugation on symmetrized
    vectors: cosine decay plus a sine leak into the Cartan directions, at
    twice the speed for short roots and four times for the long ones; all
    other symmetrized vectors stay clear of the Cartan subspace."""
    t0 = time.time()
    basis = cartan_basis(shape)
    plus = [r for r in build_roots(shape) if r.sign > 0]
    worst_i = worst_ii = 0.0
    for root in plus:
        w = root.vector - theta(root.vector)
        if root.kind == "short":
            freq, direction = 2.0, basis[root.i]
        elif root.kind == "difference":
            freq, direction = 4.0, basis[root.i] - basis[root.j]
        else:
            freq, direction = 4.0, basis[root.i] + basis[root.j]
        for t in ts:
            k = one_param_k(root, t)
            got = k @ w @ k.T
            want = np.cos(freq * t) * w + 2.0 * np.sin(freq * t) * direction
            worst_i = max(worst_i, float(np.max(np.abs(got - want))))
            for other in plus:
                if other is root:
                    continue
                moved = k @ symmetrize(other).matrix @ k.T
                worst_ii = max(worst_ii, float(np.max(np.abs(a_component(moved, shape)))))
    ok = worst_i <= bound and worst_ii <= bound
    return CheckResult("conjugation-formulas", ok,
                       f"formula defect {worst_i:.2e}, stray Cartan component "
                       f"{worst_ii:.2e} (bound {bound:g})", time.time() - t0)


def check_power_theorem(shape: GrassmannShape = GrassmannShape(3, 4), samples: int = 500,
                        trials: int = 20, seed: int = 0,
                        tol: Tolerance = DEFAULT_TOLERANCE,
                        sample_tol: float = SAMPLE_TOL, threads: int = 1) -> CheckResult:
    """Single-nonzero-coordinate element: power p-1 stays degenerate on every
    sample, power p reaches full dimension with a bootstrap certificate."""
    t0 = time.time()
    p = shape.p
    X = cartan_from_configuration(shape, Configuration((1,), p - 1))
    analysis = min_power(X, Field.REAL, trials, samples, seed, tol, sample_tol, threads)
    below = analysis.reports[p - 2]
    top = analysis.reports[p - 1]
    worst_min = below.min_abs_entry.max
    ok = (worst_min <= sample_tol and top.affine_dim == p
          and analysis.min_power == p and analysis.certificate is not None)
    return CheckResult("power-theorem", ok,
                       f"level {p - 1} max of per-point min|entry| {worst_min:.2e} "
                       f"(tol {sample_tol:g}), level {p} affine dim {top.affine_dim}/{p}, "
                       f"min power {analysis.min_power} (certificate "
                       f"{'found' if analysis.certificate else 'missing'})",
                       time.time() - t0)


def check_squares(shape: GrassmannShape = GrassmannShape(3, 4), trials: int = 20,
                  seed: int = 0, tol: Tolerance = DEFAULT_TOLERANCE) -> CheckResult:
    """Pairs whose self-convolutions are absolutely continuous convolve to an
    absolutely continuous measure."""
    t0 = time.time()
    confs = [c for c in all_configurations(shape.p, include_zero=False)
             if is_eligible(c, c, shape.p).eligible]
    failures = 0
    total = 0
    for cx in confs:
        X = cartan_from_configuration(shape, cx)
        for cy in confs:
            Y = cartan_from_configuration(shape, cy)
            verdict = decide(X, Y, Field.REAL, trials=trials, samples=2, seed=seed, tol=tol)
            total += 1
            if verdict.status is not Status.AC_CERTIFIED:
                failures += 1
    return CheckResult("squares-composition", failures == 0,
                       f"{total} pairs of square-integrable configurations, "
                       f"{failures} not certified", time.time() - t0)


def check_determinism(shape: GrassmannShape = GrassmannShape(3, 4), seed: int = 0,
                      tol: Tolerance = DEFAULT_TOLERANCE, threads: int = 1) -> CheckResult:
    """Same seed twice gives identical verdicts; thread count does not change
    sampled support points."""
    t0 = time.time()
    X = cartan_from_configuration(shape, Configuration((2,), shape.p - 2))
    Y = cartan_from_configuration(shape, Configuration((1,), shape.p - 1))
    v1 = decide(X, Y, Field.REAL, trials=10, samples=50, seed=seed, tol=tol)
    v2 = decide(X, Y, Field.REAL, trials=10, samples=50, seed=seed, tol=tol)
    same_verdict = v1 == v2
    s1 = support_sample(X, Y, Field.COMPLEX, 64, seed, tol, threads=1)
    s8 = support_sample(X, Y, Field.COMPLEX, 64, seed, tol, threads=max(8, threads))
    same_points = bool(np.array_equal(s1.points, s8.points))
    ok = same_verdict and same_points
    return CheckResult("determinism", ok,
                       f"repeat verdict identical {same_verdict}, "
                       f"threads 1 vs 8 points identical {same_points}",
                       time.time() - t0)


# ---------------------------------------------------------------------------
# Driver

def run_selftest(shape: GrassmannShape | None = None, seed: int = 0, trials: int = 20,
                 samples: int = 1000, tol: Tolerance = DEFAULT_TOLERANCE,
                 sample_tol: float = SAMPLE_TOL, threads: int = 1) -> tuple[bool, list[str]]:
    """Run the desk-scale suite, optionally restricted to a single shape.

    Returns overall success and the printable report lines.
    """
    if shape is None:
        shapes = DESK_SHAPES
        pair_shapes = PAIR_SHAPES
        calculs_shape = GrassmannShape(3, 5)
        power_shape = GrassmannShape(3, 4)
    else:
        shapes = (shape,)
        pair_shapes = (shape,)
        calculs_shape = shape
        power_shape = shape

    power_samples = min(samples, 500)
    results = [
        check_root_fidelity(shapes, seed=seed),
        check_diagonalizer(shapes, seed=seed),
        check_projection_roundtrip(shapes, trials=min(100, max(10, samples // 10)),
                                   seed=seed, tol=tol, threads=threads),
        check_oracle_equivalence(pair_shapes, trials=trials, seed=seed, tol=tol),
        check_necessity_patterns(pair_shapes, samples=samples, sample_tol=sample_tol,
                                 seed=seed, tol=tol, threads=threads),
        check_conjugation_formulas(calculs_shape),
        check_power_theorem(power_shape, samples=power_samples, trials=trials,
                            seed=seed, tol=tol, sample_tol=sample_tol, threads=threads),
        check_squares(power_shape, trials=trials, seed=seed, tol=tol),
        check_determinism(power_shape, seed=seed, tol=tol, threads=threads),
    ]
    if shape is None or (shape.p, shape.q) == (2, 3):
        results.insert(4, check_explicit_witnesses(tol))

    lines = []
    ok = True
    for res in results:
        ok = ok and res.ok
        tag = "PASS" if res.ok else "FAIL"
        lines.append(f"[{tag}] {res.name} ({res.elapsed:.2f} s): {res.detail}")
        lines.extend(res.table)
    lines.append(f"selftest: {'all checks passed' if ok else 'FAILURES detected'}")
    return ok, lines
