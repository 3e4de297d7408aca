"""Cartan projection via singular values, closed-form exponentials of Cartan
elements, configuration extraction, and the eligibility predicate.

The projection of a group element g is read off its singular values: they
always contain q-p ones, and the remaining 2p values come in reciprocal
pairs (a_i, 1/a_i); the logs of the top p, sorted, are the chamber
coordinates.  For the quaternionic field the embedded matrix doubles every
singular value, so pairs are merged first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (DEFAULT_TOLERANCE, Field, Tolerance, parallel_map,
                     quaternion_embed_real)
from .structure import CartanElement, GrassmannShape, build_S, indefinite_form


class NotInGroupError(Exception):
    """The matrix does not satisfy the defining relation of the group."""


class NumericalInconsistencyError(Exception):
    """The singular-value pattern required of a group element failed."""


@dataclass(frozen=True)
class Configuration:
    """Multiset signature [s_1,...,s_r; u] of a chamber element: block sizes
    of equal nonzero coordinates, then the count of zero coordinates."""

    blocks: tuple[int, ...]
    zeros: int

    def __post_init__(self) -> None:
        blocks = tuple(int(b) for b in self.blocks)
        if any(b < 1 for b in blocks):
            raise ValueError(f"block sizes must be positive, got {blocks}")
        if self.zeros < 0:
            raise ValueError("zero count must be nonnegative")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "zeros", int(self.zeros))

    @property
    def p(self) -> int:
        return sum(self.blocks) + self.zeros

    @property
    def max_block(self) -> int:
        return max(self.blocks, default=0)

    @property
    def is_zero(self) -> bool:
        return not self.blocks

    @classmethod
    def parse(cls, text: str) -> "Configuration":
        """Parse the command-line syntax 's1,s2,...;u', e.g. '2,1;0' or '0;3'."""
        try:
            left, right = text.split(";")
            zeros = int(right)
            parts = [int(x) for x in left.split(",")] if left.strip() else []
        except ValueError as exc:
            raise ValueError(f"malformed configuration {text!r}; expected 's1,s2,...;u'") from exc
        if parts == [0]:
            parts = []
        return cls(tuple(parts), zeros)

    def __str__(self) -> str:
        left = ",".join(str(b) for b in self.blocks) if self.blocks else "0"
        return f"{left};{self.zeros}"


@dataclass(frozen=True)
class EligibilityVerdict:
    """Outcome of the sharp convolution-density criterion.

    The pair is eligible exactly when
    max(max s, 2u) + max(max t, 2v) <= 2p.
    """

    eligible: bool
    lhs: int
    rhs: int


def is_eligible(cx: Configuration, cy: Configuration, p: int) -> EligibilityVerdict:
    """Evaluate the eligibility criterion for two configurations at rank p."""
    if cx.p != p or cy.p != p:
        raise ValueError(f"configurations {cx} and {cy} must sum to p={p}")
    lhs = max(cx.max_block, 2 * cx.zeros) + max(cy.max_block, 2 * cy.zeros)
    rhs = 2 * p
    return EligibilityVerdict(lhs <= rhs, lhs, rhs)


def exp_cartan(H: CartanElement, field: Field = Field.REAL) -> np.ndarray:
    """Group exponential of a Cartan element in closed form.

    Conjugating the explicit diagonalizer S around diag(e^{h_i}, 1, e^{-h_i})
    avoids the series entirely; the result is cast into the requested field's
    matrix representation.
    """
    shape = H.shape
    s = build_S(shape)
    h = H.coords()
    mid = np.ones(shape.q - shape.p)
    diag = np.concatenate([np.exp(h), mid, np.exp(-h[::-1])])
    real = (s * diag) @ s.T
    if field is Field.REAL:
        return real
    if field is Field.COMPLEX:
        return real.astype(complex)
    if field is Field.QUATERNION:
        return quaternion_embed_real(real)
    raise ValueError(f"unknown field {field!r}")


def group_form(shape: GrassmannShape, field: Field) -> np.ndarray:
    """The invariant form in the matrix representation of the given field."""
    form = indefinite_form(shape)
    if field is Field.QUATERNION:
        return quaternion_embed_real(form)
    if field is Field.COMPLEX:
        return form.astype(complex)
    return form


def _check_membership(gs: np.ndarray, form: np.ndarray, entry_abs: float) -> None:
    gh = np.conj(np.swapaxes(gs, -2, -1))
    defect = np.max(np.abs(gh @ form @ gs - form), axis=(-2, -1))
    worst = int(np.argmax(defect))
    if defect[worst] > 100 * entry_abs:
        raise NotInGroupError(
            f"matrix {worst} violates the invariant form by {defect[worst]:.3e}")


def validate_singular_pattern(sigma: np.ndarray, shape: GrassmannShape,
                              tol: Tolerance) -> np.ndarray:
    """Check one descending singular spectrum of length p+q and return the
    chamber coordinates.

    The q-p middle values must be 1 up to 100*entry_abs*cond, and the outer
    values must pair into reciprocals up to 100*entry_abs.
    """
    p, q = shape.p, shape.q
    cond = sigma[0] / sigma[-1]
    mid = sigma[p:q]
    mid_defect = float(np.max(np.abs(mid - 1.0))) if mid.size else 0.0
    if mid_defect > 100 * tol.entry_abs * cond:
        raise NumericalInconsistencyError(
            f"middle singular values deviate from 1 by {mid_defect:.3e} "
            f"(allowed {100 * tol.entry_abs * cond:.3e})")
    pair_defect = float(np.max(np.abs(sigma[:p] * sigma[::-1][:p] - 1.0)))
    if pair_defect > 100 * tol.entry_abs:
        raise NumericalInconsistencyError(
            f"singular values fail reciprocal pairing by {pair_defect:.3e}")
    h = np.log(sigma[:p])
    # clamp roundoff below the chamber wall so the result is Weyl-fixed
    return np.abs(np.maximum(h, 0.0))


def project_batch(gs: np.ndarray, shape: GrassmannShape, field: Field = Field.REAL,
                  tol: Tolerance = DEFAULT_TOLERANCE, threads: int = 1) -> np.ndarray:
    """Cartan projections of a batch of group elements, one row per element."""
    gs = np.asarray(gs)
    if gs.ndim == 2:
        gs = gs[None]
    _check_membership(gs, group_form(shape, field), tol.entry_abs)

    def _one(g: np.ndarray) -> np.ndarray:
        sigma = np.linalg.svd(g, compute_uv=False)
        if field is Field.QUATERNION:
            sigma = 0.5 * (sigma[0::2] + sigma[1::2])
        return validate_singular_pattern(sigma, shape, tol)

    return np.stack(parallel_map(_one, gs, threads=threads))


def cartan_projection(g: np.ndarray, shape: GrassmannShape, field: Field = Field.REAL,
                      tol: Tolerance = DEFAULT_TOLERANCE) -> CartanElement:
    """Chamber representative of the two-sided compact decomposition of g."""
    h = project_batch(g, shape, field, tol)[0]
    return CartanElement(shape, tuple(h))


def chamber_blocks(coords: np.ndarray, atol: float) -> tuple[list[tuple[float, int]], int]:
    """Group descending chamber coordinates into equal-value blocks.

    Entries at most atol count as zeros; consecutive entries within atol of
    each other merge into one block (tolerance chaining).  Returns the
    (value, size) blocks, value taken as the block mean, and the zero count.
    """
    coords = np.sort(np.abs(np.asarray(coords, dtype=float)))[::-1]
    zeros = int(np.sum(coords <= atol))
    nonzero = coords[: len(coords) - zeros]
    blocks: list[tuple[float, int]] = []
    start = 0
    for idx in range(1, len(nonzero) + 1):
        if idx == len(nonzero) or nonzero[idx - 1] - nonzero[idx] > atol:
            chunk = nonzero[start:idx]
            blocks.append((float(np.mean(chunk)), len(chunk)))
            start = idx
    return blocks, zeros


def configuration_of(H: CartanElement, tol: Tolerance = DEFAULT_TOLERANCE) -> Configuration:
    """Configuration of an arbitrary Cartan element (of its chamber projection)."""
    blocks, zeros = chamber_blocks(H.coords(), tol.entry_abs)
    return Configuration(tuple(size for _, size in blocks), zeros)


def cartan_from_configuration(shape: GrassmannShape, conf: Configuration,
                              values: list[float] | None = None) -> CartanElement:
    """Chamber element realizing a configuration.

    Block values default to r, r-1, ..., 1 so distinct blocks stay separated
    at unit scale.
    """
    if conf.p != shape.p:
        raise ValueError(f"configuration {conf} does not sum to p={shape.p}")
    r = len(conf.blocks)
    if values is None:
        values = [float(r - k) for k in range(r)]
    if len(values) != r or any(v <= 0 for v in values):
        raise ValueError("need one positive value per block")
    if any(values[k] <= values[k + 1] for k in range(r - 1)):
        raise ValueError("block values must be strictly decreasing")
    coords: list[float] = []
    for size, val in zip(conf.blocks, values):
        coords.extend([float(val)] * size)
    coords.extend([0.0] * conf.zeros)
    return CartanElement(shape, tuple(coords))
