"""Decide absolute continuity of the convolution of two orbital measures.

Sufficiency is certified by a tangent-space rank argument: the convolution
has a density as soon as some compact element k makes the symmetrized root
vectors of X together with the k-conjugated ones of Y span the whole B-block
space (the V criterion, rank pq), or, more generally, makes the three
families k-algebra, Ad(e^{-X}) k-algebra, Ad(k e^Y) k-algebra span the whole
Lie algebra (the U criterion).  Witnesses form a dense open set, so a few
Haar draws find one whenever the pair is eligible.

Necessity is the deterministic repetition argument: an ineligible pair
forces zeros or repeated values in every point of the projected support,
which kills the interior.  Support sampling corroborates the forced
patterns.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

from .cartan import (Configuration, EligibilityVerdict, chamber_blocks,
                     configuration_of, exp_cartan, is_eligible, project_batch)
from .linalg import (DEFAULT_TOLERANCE, Field, Tolerance, haar_compact_pair,
                     rng_from, span_rank)
from .structure import (CartanElement, GrassmannShape, SymmetrizedVector,
                        build_roots, check_in_compact, kappa_basis,
                        positive_symmetrized)

#: default absolute tolerance for zero/repetition detection on sampled
#: chamber coordinates, looser than entry_abs because projection noise is
#: amplified near the chamber walls
SAMPLE_TOL = 1e-6

_CERT_STREAM = 0
_SUPPORT_STREAM = 1


class Status(str, Enum):
    AC_CERTIFIED = "AC_CERTIFIED"
    SINGULAR_PROVEN = "SINGULAR_PROVEN"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class TangentReport:
    """Rank certificate found during the witness search."""

    criterion: str          # "V" or "U"
    achieved_rank: int
    target_rank: int
    witness_seed: int | None
    trials: int

    def __post_init__(self) -> None:
        if self.achieved_rank > self.target_rank:
            raise ValueError("achieved rank exceeds target")

    @property
    def full(self) -> bool:
        return self.achieved_rank == self.target_rank


@dataclass(frozen=True, eq=False)
class SupportSample:
    """Projected support points of the convolution, one chamber row each."""

    shape: GrassmannShape
    field: Field
    seed: int
    points: np.ndarray

    @property
    def count(self) -> int:
        return int(self.points.shape[0])


@dataclass(frozen=True)
class NecessityClause:
    """One forced-pattern clause with its per-sample verification tally."""

    name: str
    required: int
    value: float | None
    satisfied: int
    violated: int


@dataclass(frozen=True)
class RepetitionReport:
    clauses: tuple[NecessityClause, ...]
    samples: int

    @property
    def triggered(self) -> bool:
        return bool(self.clauses)

    @property
    def consistent(self) -> bool:
        return all(c.violated == 0 for c in self.clauses)


@dataclass(frozen=True)
class DensityVerdict:
    status: Status
    eligibility: EligibilityVerdict
    x_configuration: Configuration
    y_configuration: Configuration
    tangent: TangentReport | None
    necessity: RepetitionReport | None
    note: str | None = None


def v_span(Z: CartanElement, tol: Tolerance = DEFAULT_TOLERANCE) -> list[SymmetrizedVector]:
    """Symmetrized root vectors whose root does not annihilate Z."""
    h = Z.coords()
    out = []
    for vec in positive_symmetrized(build_roots(Z.shape)):
        if abs(vec.origin.value(h)) > tol.entry_abs:
            out.append(vec)
    return out


def v_span_rank(X: CartanElement, Y: CartanElement, k: np.ndarray,
                tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Rank of V_X + Ad(k) V_Y inside the B-block space; pq certifies density."""
    check_in_compact(k, X.shape, tol)
    mats = [v.matrix for v in v_span(X, tol)]
    mats += [k @ v.matrix @ k.T for v in v_span(Y, tol)]
    if not mats:
        return 0
    return span_rank(mats, tol)


def u_span_rank(X: CartanElement, Y: CartanElement, k: np.ndarray,
                tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Rank of the derivative image of the three-factor product map.

    Spans the compact algebra, its Ad(e^{-X}) image, and its Ad(k e^Y) image
    inside the full Lie algebra; (p+q)(p+q-1)/2 certifies surjectivity and
    hence absolute continuity.
    """
    check_in_compact(k, X.shape, tol)
    kb = kappa_basis(X.shape)
    ex = exp_cartan(X)
    ey = exp_cartan(Y)
    ex_inv = exp_cartan(CartanElement(X.shape, tuple(-c for c in X.h)))
    ey_inv = exp_cartan(CartanElement(Y.shape, tuple(-c for c in Y.h)))
    mats = list(kb)
    mats += [ex_inv @ b @ ex for b in kb]
    mats += [k @ (ey @ b @ ey_inv) @ k.T for b in kb]
    return span_rank(mats, tol)


def _haar_k(shape: GrassmannShape, field: Field, seed: int, stream: int, count: int,
            extra: tuple[int, ...] = ()) -> np.ndarray:
    rngs = [rng_from(seed, stream, *extra, i) for i in range(count)]
    return haar_compact_pair(shape.p, shape.q, field, rngs)


def _certificate_search(X: CartanElement, Y: CartanElement, trials: int, seed: int,
                        tol: Tolerance) -> tuple[TangentReport | None, int, int]:
    """Witness search; returns (report or None, best V rank, best U rank)."""
    shape = X.shape
    target_v = shape.dim_p
    target_u = shape.dim_g
    ks = _haar_k(shape, Field.REAL, seed, _CERT_STREAM, trials)
    best_v = 0
    for i in range(trials):
        r = v_span_rank(X, Y, ks[i], tol)
        best_v = max(best_v, r)
        if r == target_v:
            return TangentReport("V", r, target_v, i, i + 1), r, 0
    best_u = 0
    for i in range(trials):
        r = u_span_rank(X, Y, ks[i], tol)
        best_u = max(best_u, r)
        if r == target_u:
            return TangentReport("U", r, target_u, i, trials + i + 1), best_v, r
    return None, best_v, best_u


def find_certificate(X: CartanElement, Y: CartanElement, trials: int = 20,
                     seed: int = 0, tol: Tolerance = DEFAULT_TOLERANCE) -> TangentReport | None:
    """Search Haar draws for a tangent witness of absolute continuity.

    The V criterion is tried first on every draw (smaller ambient space); the
    U criterion is retried on the same draws as an independent fallback.  The
    witness matrix is reproducible as the draw with stream index
    (seed, 0, witness_seed).  An absent result means no witness was found,
    which is not a proof of singularity.
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    report, _, _ = _certificate_search(X, Y, trials, seed, tol)
    return report


def support_sample(X: CartanElement, Y: CartanElement, field: Field = Field.REAL,
                   n: int = 500, seed: int = 0, tol: Tolerance = DEFAULT_TOLERANCE,
                   threads: int = 1) -> SupportSample:
    """Sample the projected support: projections of e^X k e^Y for Haar k."""
    if n < 1:
        raise ValueError("need at least one sample")
    shape = X.shape
    ks = _haar_k(shape, field, seed, _SUPPORT_STREAM, n)
    gx = exp_cartan(X, field)
    gy = exp_cartan(Y, field)
    gs = gx @ ks @ gy
    pts = project_batch(gs, shape, field, tol, threads=threads)
    return SupportSample(shape, field, seed, pts)


def necessity_report(X: CartanElement, Y: CartanElement, sample: SupportSample,
                     sample_tol: float = SAMPLE_TOL) -> RepetitionReport:
    """Verify the forced repetition patterns of an ineligible pair.

    Three clauses, each active only when its inequality is violated:
    (a) u + v > p forces at least u+v-p zero coordinates per point;
    (b) 2u + max t > 2p forces each longest-block value of Y to repeat at
        least 2u + max t - 2p times per point;
    (c) the mirror of (b) with the roles of X and Y exchanged.
    """
    p = X.shape.p
    atol = DEFAULT_TOLERANCE.entry_abs
    bx, u = chamber_blocks(X.coords(), atol)
    by, v = chamber_blocks(Y.coords(), atol)
    max_s = max((size for _, size in bx), default=0)
    max_t = max((size for _, size in by), default=0)
    pts = sample.points
    clauses: list[NecessityClause] = []

    def tally(ok: np.ndarray) -> tuple[int, int]:
        return int(np.sum(ok)), int(np.sum(~ok))

    if u + v > p:
        need = u + v - p
        ok = np.sum(pts <= sample_tol, axis=1) >= need
        clauses.append(NecessityClause("zero-entries", need, None, *tally(ok)))
    if 2 * u + max_t > 2 * p:
        need = 2 * u + max_t - 2 * p
        for value, size in by:
            if size == max_t:
                ok = np.sum(np.abs(pts - value) <= sample_tol, axis=1) >= need
                clauses.append(NecessityClause("y-block-repetition", need, value, *tally(ok)))
    if 2 * v + max_s > 2 * p:
        need = 2 * v + max_s - 2 * p
        for value, size in bx:
            if size == max_s:
                ok = np.sum(np.abs(pts - value) <= sample_tol, axis=1) >= need
                clauses.append(NecessityClause("x-block-repetition", need, value, *tally(ok)))
    return RepetitionReport(tuple(clauses), sample.count)


def affine_dimension(points: np.ndarray | SupportSample,
                     tol: Tolerance = DEFAULT_TOLERANCE) -> int:
    """Rank of the centered point cloud under the relative cutoff."""
    pts = points.points if isinstance(points, SupportSample) else np.asarray(points)
    if pts.ndim != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two points")
    centered = pts - pts.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    # identical points leave only centering roundoff; treat that as dimension 0
    floor = tol.entry_abs * max(1.0, float(np.max(np.abs(pts))))
    if s[0] <= floor:
        return 0
    return int(np.sum(s > tol.rank_rel * s[0]))


def is_total(m: np.ndarray, tol: Tolerance = DEFAULT_TOLERANCE) -> bool:
    """Whether every square submatrix left by deleting r rows and r columns
    (all 1 <= r < n) is nonsingular.

    Total matrices are generic in the orthogonal group; they make the
    strongest witnesses.  Exhaustive over all index subsets, so n <= 8.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("totality is defined for square matrices")
    n = m.shape[0]
    if n > 8:
        raise ValueError(f"totality check supports n <= 8, got {n}")
    for keep in range(n - 1, 0, -1):
        for rows in combinations(range(n), keep):
            sub = m[rows, :]
            for cols in combinations(range(n), keep):
                if abs(np.linalg.det(sub[:, cols])) <= tol.entry_abs:
                    return False
    return True


def decide(X: CartanElement, Y: CartanElement, field: Field = Field.REAL,
           trials: int = 20, samples: int = 500, seed: int = 0,
           tol: Tolerance = DEFAULT_TOLERANCE, sample_tol: float = SAMPLE_TOL,
           threads: int = 1) -> DensityVerdict:
    """Full decision for the convolution of the two orbital measures.

    Eligible pairs get a tangent witness search (a real witness certifies all
    three fields, since the real projected support is contained in the
    complex and quaternionic ones); ineligible pairs are singular by the
    repetition argument, and the sampled support is checked against the
    forced patterns as corroborating evidence.  UNDECIDED only occurs for an
    eligible pair with no witness found, which is a numerical anomaly.
    """
    if X.shape != Y.shape:
        raise ValueError("operands live on different shapes")
    cx = configuration_of(X, tol)
    cy = configuration_of(Y, tol)
    verdict = is_eligible(cx, cy, X.shape.p)
    if verdict.eligible:
        if trials < 1:
            return DensityVerdict(Status.UNDECIDED, verdict, cx, cy, None, None,
                                  note="certificate search skipped (trials=0)")
        report, best_v, best_u = _certificate_search(X, Y, trials, seed, tol)
        if report is not None:
            return DensityVerdict(Status.AC_CERTIFIED, verdict, cx, cy, report, None)
        return DensityVerdict(
            Status.UNDECIDED, verdict, cx, cy, None, None,
            note=(f"eligible pair but no witness in {trials} trials "
                  f"(best V rank {best_v}/{X.shape.dim_p}, "
                  f"best U rank {best_u}/{X.shape.dim_g}); numerical anomaly"))
    sample = support_sample(X, Y, field, samples, seed, tol, threads)
    report = necessity_report(X, Y, sample, sample_tol)
    note = None
    if not report.consistent:
        note = "sampled support violates a forced pattern; inspect tolerances"
    return DensityVerdict(Status.SINGULAR_PROVEN, verdict, cx, cy, None, report, note)


def weyl_images(H: CartanElement, rng: np.random.Generator) -> CartanElement:
    """Random signed permutation of the coordinates (same chamber projection)."""
    coords = H.coords()
    perm = rng.permutation(len(coords))
    signs = rng.integers(0, 2, len(coords)) * 2 - 1
    return CartanElement(H.shape, tuple(coords[perm] * signs))


__all__ = [
    "Status", "TangentReport", "SupportSample", "NecessityClause",
    "RepetitionReport", "DensityVerdict", "v_span", "v_span_rank",
    "u_span_rank", "find_certificate", "support_sample", "necessity_report",
    "affine_dimension", "is_total", "decide", "weyl_images", "SAMPLE_TOL",
]
