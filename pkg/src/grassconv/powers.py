"""Convolution powers of a single orbital measure: iterated support
sampling, forced-degeneracy bounds, and the minimal absolutely continuous
power.

The l-th power projects onto chamber points of products with l exponential
factors interleaved with independent compact draws.  The square is decided
exactly by the eligibility of the self-pair; higher powers are bootstrapped:
a point H sampled from the (l-1)-st support pulls the whole projected set
a(e^X K e^H) into the l-th one, so an eligible (X, H) with a tangent witness
certifies level l.  Every nonzero element reaches absolute continuity by
level p, and configurations with a single nonzero coordinate need exactly p.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .cartan import (Configuration, configuration_of, exp_cartan, is_eligible,
                     project_batch)
from .density import (SAMPLE_TOL, Status, TangentReport, _certificate_search,
                      affine_dimension, decide)
from .linalg import (DEFAULT_TOLERANCE, Field, Tolerance, haar_compact_pair,
                     rng_from)
from .structure import CartanElement

_POWER_STREAM = 2

#: how many eligible bootstrap candidates to try for a certificate per level
BOOTSTRAP_ATTEMPTS = 20


class PowerStatus(str, Enum):
    AC_EVIDENCED = "AC_EVIDENCED"
    SINGULAR_PROVEN = "SINGULAR_PROVEN"
    UNDECIDED = "UNDECIDED"


@dataclass(frozen=True)
class MinEntryStats:
    """Summary of the per-point minimum absolute coordinate."""

    min: float
    mean: float
    max: float

    @classmethod
    def of(cls, points: np.ndarray) -> "MinEntryStats":
        m = np.min(np.abs(points), axis=1)
        return cls(float(m.min()), float(m.mean()), float(m.max()))


@dataclass(frozen=True, eq=False)
class PowerReport:
    """Diagnostics for one convolution power."""

    level: int
    points: np.ndarray
    forced_zeros: int
    affine_dim: int
    min_abs_entry: MinEntryStats
    verdict: PowerStatus
    note: str | None = None


@dataclass(frozen=True)
class PowerAnalysis:
    """Trail of reports for levels 1..p plus the first certified level."""

    min_power: int | None
    certificate: TangentReport | None
    certificate_level: int | None
    bootstrap_point: CartanElement | None
    reports: tuple[PowerReport, ...]
    note: str | None = None


def sample_power(X: CartanElement, level: int, field: Field = Field.REAL,
                 n: int = 500, seed: int = 0, tol: Tolerance = DEFAULT_TOLERANCE,
                 threads: int = 1) -> np.ndarray:
    """Sample the projected support of the level-th convolution power.

    Each of the n points is the projection of e^X k_1 e^X ... k_{level-1} e^X
    with independent Haar draws k_i; the per-point randomness comes from the
    stream (seed, 2, level, point index).
    """
    if level < 1:
        raise ValueError(f"level must be >= 1, got {level}")
    if n < 1:
        raise ValueError("need at least one sample")
    shape = X.shape
    gx = exp_cartan(X, field)
    gs = np.broadcast_to(gx, (n,) + gx.shape).copy()
    if level > 1:
        rngs = [rng_from(seed, _POWER_STREAM, level, i) for i in range(n)]
        for _ in range(level - 1):
            ks = haar_compact_pair(shape.p, shape.q, field, rngs)
            gs = gs @ ks @ gx
    return project_batch(gs, shape, field, tol, threads=threads)


def forced_zero_count(conf: Configuration, level: int, p: int) -> int:
    """Zeros forced in every point of the level-th power support.

    Iterates the zero-entries clause of the repetition argument: the
    guaranteed zero count shrinks by p - u per extra factor, floored at 0.
    For a single nonzero coordinate this is p - level, which exhibits the
    singularity of all powers below p.
    """
    if level < 1:
        raise ValueError("level must be >= 1")
    if conf.p != p:
        raise ValueError(f"configuration {conf} does not sum to p={p}")
    forced = conf.zeros
    for _ in range(level - 1):
        forced = max(forced - (p - conf.zeros), 0)
    return forced


def min_power(X: CartanElement, field: Field = Field.REAL, trials: int = 20,
              samples: int = 500, seed: int = 0, tol: Tolerance = DEFAULT_TOLERANCE,
              sample_tol: float = SAMPLE_TOL, threads: int = 1) -> PowerAnalysis:
    """Smallest convolution power with certified absolute continuity.

    Level 2 is decided by the self-pair; level l >= 3 by rejection sampling
    over the (l-1)-st support for a bootstrap point eligible with X that
    admits a tangent witness.  The search caps at level p, where absolute
    continuity is guaranteed; failure to certify by then is reported as
    undecided with diagnostics rather than retried.
    """
    shape = X.shape
    p = shape.p
    conf = configuration_of(X, tol)
    if conf.is_zero:
        raise ValueError("powers of the zero element never gain a density")

    reports: list[PowerReport] = []
    found: int | None = None
    certificate: TangentReport | None = None
    bootstrap: CartanElement | None = None
    note: str | None = None

    for level in range(1, p + 1):
        pts = sample_power(X, level, field, samples, seed, tol, threads)
        forced = forced_zero_count(conf, level, p)
        dim = affine_dimension(pts, tol) if samples >= 2 else 0
        stats = MinEntryStats.of(pts)
        level_note = None
        if level == 1:
            verdict = PowerStatus.SINGULAR_PROVEN
            level_note = "support is a single chamber point"
        elif forced > 0:
            verdict = PowerStatus.SINGULAR_PROVEN
            level_note = f"every point carries at least {forced} zero coordinates"
        elif dim == p:
            verdict = PowerStatus.AC_EVIDENCED
        else:
            verdict = PowerStatus.UNDECIDED
        reports.append(PowerReport(level, pts, forced, dim, stats, verdict, level_note))

        if found is not None or level < 2:
            continue
        if level == 2:
            if is_eligible(conf, conf, p).eligible:
                self_verdict = decide(X, X, field, trials, samples, seed, tol,
                                      sample_tol, threads)
                if self_verdict.status is Status.AC_CERTIFIED:
                    found, certificate = 2, self_verdict.tangent
        else:
            candidates = reports[level - 2].points
            attempts = 0
            for row in candidates:
                H = CartanElement(shape, tuple(row))
                conf_h = configuration_of(H, Tolerance(tol.rank_rel, sample_tol))
                if conf_h.is_zero or not is_eligible(conf, conf_h, p).eligible:
                    continue
                attempts += 1
                report, _, _ = _certificate_search(X, H, trials, seed, tol)
                if report is not None:
                    found, certificate, bootstrap = level, report, H
                    break
                if attempts >= BOOTSTRAP_ATTEMPTS:
                    break

    if found is None:
        note = (f"no certified level up to p={p} in {samples} bootstrap samples; "
                "numerical anomaly (level p is guaranteed)")
    return PowerAnalysis(found, certificate, found if certificate else None,
                         bootstrap, tuple(reports), note)
