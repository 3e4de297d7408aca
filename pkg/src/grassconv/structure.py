"""Concrete realization of so(p,q): split Cartan subspace, restricted root
vectors, Cartan involution, adjoint actions, the explicit diagonalizer, and
the signed-permutation (Weyl) action on chamber coordinates.

Conventions.  Matrices are (p+q) x (p+q) with the block pattern
[[A, B], [B^T, D]] where A is p x p and D is q x q skew-symmetric; the
maximal compact subgroup K consists of the block-diagonal special orthogonal
pairs.  A Cartan element is carried by p real coordinates (h_1, ..., h_p)
sitting in the first p columns of the B block as a diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import DEFAULT_TOLERANCE, Tolerance, matrix_exp

SHORT = "short"
DIFFERENCE = "difference"
SUM = "sum"


@dataclass(frozen=True)
class GrassmannShape:
    """Shape (p, q) of the space SO_0(p,q)/SO(p)xSO(q), q > p >= 2."""

    p: int
    q: int

    def __post_init__(self) -> None:
        if not (self.q > self.p >= 2):
            raise ValueError(f"need q > p >= 2, got p={self.p}, q={self.q}")

    @property
    def n(self) -> int:
        return self.p + self.q

    @property
    def dim_p(self) -> int:
        """Dimension of the -1 eigenspace of the involution (the B block)."""
        return self.p * self.q

    @property
    def dim_k(self) -> int:
        return self.p * (self.p - 1) // 2 + self.q * (self.q - 1) // 2

    @property
    def dim_g(self) -> int:
        return self.n * (self.n - 1) // 2


@dataclass(frozen=True)
class CartanElement:
    """A point of the Cartan subspace, stored as its p diagonal coordinates."""

    shape: GrassmannShape
    h: tuple[float, ...]

    def __post_init__(self) -> None:
        coords = tuple(float(x) for x in self.h)
        if len(coords) != self.shape.p:
            raise ValueError(f"expected {self.shape.p} coordinates, got {len(coords)}")
        if not all(np.isfinite(coords)):
            raise ValueError("non-finite Cartan coordinates")
        object.__setattr__(self, "h", coords)

    def embed(self) -> np.ndarray:
        """The (p+q) x (p+q) matrix with the coordinates mirrored across the B block."""
        p, n = self.shape.p, self.shape.n
        m = np.zeros((n, n))
        for i, hi in enumerate(self.h):
            m[i, p + i] = hi
            m[p + i, i] = hi
        return m

    def coords(self) -> np.ndarray:
        return np.array(self.h, dtype=float)


def _unit(n: int, i: int, j: int) -> np.ndarray:
    m = np.zeros((n, n))
    m[i, j] = 1.0
    return m


@dataclass(frozen=True, eq=False)
class RootDatum:
    """A restricted root together with one explicit root vector.

    kind/sign identify the functional: 'short' is sign*h_i (multiplicity slot
    j in 0..q-p-1), 'difference' is sign*(h_i - h_j) and 'sum' is
    sign*(h_i + h_j) with i < j.  The vector satisfies
    [H, vector] = value(h) * vector for every Cartan element, exactly.
    """

    kind: str
    sign: int
    i: int
    j: int
    vector: np.ndarray
    multiplicity: int

    def value(self, h) -> float:
        h = np.asarray(h, dtype=float)
        if self.kind == SHORT:
            return self.sign * h[self.i]
        if self.kind == DIFFERENCE:
            return self.sign * (h[self.i] - h[self.j])
        return self.sign * (h[self.i] + h[self.j])

    @property
    def label(self) -> str:
        s = "+" if self.sign > 0 else "-"
        if self.kind == SHORT:
            return f"{s}H{self.i + 1}[{self.j + 1}]"
        op = "-" if self.kind == DIFFERENCE else "+"
        return f"{s}(H{self.i + 1}{op}H{self.j + 1})"


@dataclass(frozen=True, eq=False)
class SymmetrizedVector:
    """Half the difference of a root vector and its involution image.

    The matrix is symmetric with zero diagonal blocks; together with the
    Cartan basis these vectors span the whole B-block space.
    """

    origin: RootDatum
    matrix: np.ndarray


def build_roots(shape: GrassmannShape) -> list[RootDatum]:
    """All restricted root vectors of so(p,q), 2p(q-p) short and 2p(p-1) long."""
    p, q, n = shape.p, shape.q, shape.n
    roots: list[RootDatum] = []
    for i in range(p):
        for r in range(q - p):
            base = _unit(n, i, 2 * p + r) + _unit(n, 2 * p + r, i)
            skew = _unit(n, p + i, 2 * p + r) - _unit(n, 2 * p + r, p + i)
            for sign in (+1, -1):
                roots.append(RootDatum(SHORT, sign, i, r, base + sign * skew, q - p))
    for i in range(p):
        for j in range(i + 1, p):
            sym_d = (_unit(n, i, p + j) + _unit(n, p + j, i)
                     + _unit(n, j, p + i) + _unit(n, p + i, j))
            skew_d = (_unit(n, i, j) - _unit(n, j, i)
                      + _unit(n, p + i, p + j) - _unit(n, p + j, p + i))
            sym_s = (-_unit(n, i, p + j) - _unit(n, p + j, i)
                     + _unit(n, j, p + i) + _unit(n, p + i, j))
            skew_s = (_unit(n, i, j) - _unit(n, j, i)
                      - _unit(n, p + i, p + j) + _unit(n, p + j, p + i))
            for sign in (+1, -1):
                roots.append(RootDatum(DIFFERENCE, sign, i, j, sym_d + sign * skew_d, 1))
                roots.append(RootDatum(SUM, sign, i, j, sym_s + sign * skew_s, 1))
    return roots


def theta(m: np.ndarray) -> np.ndarray:
    """Cartan involution: minus the (conjugate) transpose."""
    m = np.asarray(m)
    return -np.conj(m).T


def symmetrize(root: RootDatum) -> SymmetrizedVector:
    return SymmetrizedVector(root, 0.5 * (root.vector - theta(root.vector)))


def positive_symmetrized(roots: list[RootDatum]) -> list[SymmetrizedVector]:
    """Symmetrized vectors of the positive roots.

    Opposite roots symmetrize to the same matrix, so only the sign +1 half is
    kept; the count is pq - p.
    """
    return [symmetrize(r) for r in roots if r.sign > 0]


def adjoint(g: np.ndarray, m: np.ndarray) -> np.ndarray:
    """Adjoint action g m g^{-1}; the conjugate transpose serves as the
    inverse whenever g is unitary to working precision."""
    g = np.asarray(g)
    m = np.asarray(m)
    gh = np.conj(g).T
    if np.max(np.abs(gh @ g - np.eye(g.shape[0]))) <= 1e-9:
        return g @ m @ gh
    try:
        return np.linalg.solve(g.T, (g @ m).T).T
    except np.linalg.LinAlgError as exc:
        raise ValueError("adjoint needs an invertible matrix") from exc


def build_S(shape: GrassmannShape) -> np.ndarray:
    """The explicit orthogonal matrix diagonalizing every Cartan element.

    S^T H S = diag(h_1, ..., h_p, 0, ..., 0, -h_p, ..., -h_1) for every
    Cartan element, with q-p middle zeros.  The raw block pattern has
    determinant -1 for some shapes; a middle-block column flip (which leaves
    the diagonalization identities untouched) pins det S = +1.
    """
    p, q, n = shape.p, shape.q, shape.n
    a = np.sqrt(2.0) / 2.0
    j = np.fliplr(np.eye(p))
    s = np.zeros((n, n))
    s[:p, :p] = a * np.eye(p)
    s[p:2 * p, :p] = a * np.eye(p)
    s[2 * p:, p:q] = np.eye(q - p)
    s[:p, q:] = a * j
    s[p:2 * p, q:] = -a * j
    if np.linalg.det(s) < 0:
        s[:, p] *= -1.0
    return s


def expected_diagonal(h, shape: GrassmannShape, group: bool = False) -> np.ndarray:
    """Diagonal matrix S^T H S (or S^T e^H S when group=True) in closed form."""
    h = np.asarray(h, dtype=float)
    mid = np.zeros(shape.q - shape.p)
    entries = np.concatenate([h, mid, -h[::-1]])
    if group:
        entries = np.exp(entries)
    return np.diag(entries)


def weyl_project(H: CartanElement) -> CartanElement:
    """Representative in the closed positive chamber: |h| sorted descending."""
    proj = np.sort(np.abs(H.coords()))[::-1]
    return CartanElement(H.shape, tuple(proj))


def one_param_k(root: RootDatum, t: float) -> np.ndarray:
    """One-parameter compact subgroup generated by the root vector: the
    exponential of t (X + theta X), a block-diagonal orthogonal matrix."""
    gen = root.vector + theta(root.vector)
    return matrix_exp(float(t) * gen)


def cartan_basis(shape: GrassmannShape) -> list[np.ndarray]:
    """The p mirrored diagonal units spanning the Cartan subspace."""
    p, n = shape.p, shape.n
    return [_unit(n, i, p + i) + _unit(n, p + i, i) for i in range(p)]


def a_component(m: np.ndarray, shape: GrassmannShape) -> np.ndarray:
    """Coordinates of the Cartan-subspace component of a symmetric matrix.

    Frobenius projection onto the orthogonal Cartan basis, whose elements
    have squared norm 2.
    """
    m = np.asarray(m)
    p = shape.p
    return np.array([(m[i, p + i] + m[p + i, i]).real / 2.0 for i in range(p)])


def kappa_basis(shape: GrassmannShape) -> list[np.ndarray]:
    """Basis of the compact factor: skew pairs inside each diagonal block."""
    p, n = shape.p, shape.n
    out = []
    for a in range(p):
        for b in range(a + 1, p):
            out.append(_unit(n, a, b) - _unit(n, b, a))
    for a in range(p, n):
        for b in range(a + 1, n):
            out.append(_unit(n, a, b) - _unit(n, b, a))
    return out


def bracket(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def indefinite_form(shape: GrassmannShape) -> np.ndarray:
    """diag(-1 x p, +1 x q): the bilinear form the group preserves."""
    return np.diag(np.concatenate([-np.ones(shape.p), np.ones(shape.q)]))


def check_in_compact(k: np.ndarray, shape: GrassmannShape,
                     tol: Tolerance = DEFAULT_TOLERANCE) -> None:
    """Raise if k is not a block-diagonal orthogonal matrix within tolerance."""
    k = np.asarray(k)
    p, n = shape.p, shape.n
    if k.shape != (n, n):
        raise ValueError(f"expected shape {(n, n)}, got {k.shape}")
    defect = np.max(np.abs(np.conj(k).T @ k - np.eye(n)))
    off = max(np.max(np.abs(k[:p, p:])), np.max(np.abs(k[p:, :p])))
    if defect > 100 * tol.entry_abs or off > 100 * tol.entry_abs:
        raise ValueError("matrix is not in the compact subgroup "
                         f"(orthogonality defect {defect:.2e}, off-block {off:.2e})")
