"""Dense linear-algebra kernels in the Killing metric.

Subspaces are stored as rows of coordinate vectors that are orthonormal for
the inner product (X, Y) -> -<X, Y>. Everything here is real: skew operators
are decomposed through the symmetric operator S^2.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg

from .algebra import Element, LieAlgebra, LinearOperator, ad_matrix
from .exceptions import NotSkewAdjoint, PairingFailure
from ..utils.logger import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Metric-orthonormal basis of a subspace, one coordinate row per vector."""
    algebra: LieAlgebra
    basis: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float).reshape(-1, self.algebra.dim)
        basis.setflags(write=False)
        object.__setattr__(self, 'basis', basis)

    @classmethod
    def full(cls, algebra: LieAlgebra) -> "Subspace":
        """Orthonormal basis of the whole algebra."""
        L = linalg.cholesky(algebra.metric, lower=True)
        return cls(algebra, linalg.solve_triangular(L, np.eye(algebra.dim), lower=True))

    @classmethod
    def empty(cls, algebra: LieAlgebra) -> "Subspace":
        return cls(algebra, np.zeros((0, algebra.dim)))

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __len__(self) -> int:
        return self.dim

    def vectors(self) -> List[Element]:
        return [Element(self.algebra, row) for row in self.basis]

    def coefficients(self, coords: np.ndarray) -> np.ndarray:
        """Inner products of a coordinate vector with the basis."""
        return self.basis @ (self.algebra.metric @ coords)

    def project(self, X: Element) -> Element:
        self.algebra._check(X)
        return Element(self.algebra, self.basis.T @ self.coefficients(X.coords))

    def gram(self) -> np.ndarray:
        return self.basis @ self.algebra.metric @ self.basis.T

    def gram_residual(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.gram() - np.eye(self.dim))))

    def complement(self) -> "Subspace":
        """Orthonormal basis of the metric-orthogonal complement."""
        if self.dim == 0:
            return Subspace.full(self.algebra)
        constraints = self.basis @ self.algebra.metric
        return _metric_orthonormal(self.algebra, linalg.null_space(constraints))


def _metric_orthonormal(algebra: LieAlgebra, columns: np.ndarray) -> Subspace:
    """Orthonormalize independent columns in the metric without changing their span."""
    if columns.shape[1] == 0:
        return Subspace.empty(algebra)
    gram = columns.T @ algebra.metric @ columns
    L = linalg.cholesky(0.5 * (gram + gram.T), lower=True)
    basis = linalg.solve_triangular(L, columns.T, lower=True)
    return Subspace(algebra, basis)


def nullspace(M: LinearOperator, tol: float = 1e-8) -> Subspace:
    """Orthonormal basis of the directions with singular value <= tol * max singular value."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    kernel = linalg.null_space(np.asarray(M.matrix), rcond=tol)
    return _metric_orthonormal(M.algebra, kernel)


def orthonormalize(vectors: Sequence[Element], algebra: Optional[LieAlgebra] = None,
                   drop_tol: float = 1e-12) -> Subspace:
    """Modified Gram-Schmidt in the metric, dropping dependent vectors."""
    if algebra is None:
        if not vectors:
            raise ValueError("algebra is required for an empty vector list")
        algebra = vectors[0].algebra
    G = algebra.metric
    for X in vectors:
        algebra._check(X)

    norms = [np.sqrt(max(0.0, X.coords @ G @ X.coords)) for X in vectors]
    scale = max(norms, default=0.0)
    kept: List[np.ndarray] = []
    for X in vectors:
        v = np.array(X.coords, dtype=float)
        # two passes keep the basis orthonormal to working precision
        for _ in range(2):
            for q in kept:
                v = v - (q @ G @ v) * q
        residual = np.sqrt(max(0.0, v @ G @ v))
        if residual <= drop_tol * scale or residual == 0.0:
            continue
        kept.append(v / residual)
    if not kept:
        return Subspace.empty(algebra)
    return Subspace(algebra, np.array(kept))


@dataclass(frozen=True, eq=False)
class Plane:
    """Invariant 2-plane of a skew operator: S e = omega f, S f = -omega e."""
    omega: float
    e: np.ndarray
    f: np.ndarray


@dataclass(frozen=True, eq=False)
class SkewPairing:
    zero_space: Subspace
    planes: Tuple[Plane, ...]

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([p.omega for p in self.planes])

    def reconstruct(self) -> np.ndarray:
        """Rebuild the operator matrix from the planes."""
        G = self.zero_space.algebra.metric
        d = self.zero_space.algebra.dim
        S = np.zeros((d, d))
        for p in self.planes:
            # x -> omega * (f (e,x) - e (f,x))
            S += p.omega * (np.outer(p.f, G @ p.e) - np.outer(p.e, G @ p.f))
        return S


def skew_pairing(S: LinearOperator, metric_orthonormal_basis: Subspace,
                 tol: float = 1e-8) -> SkewPairing:
    """Split a metric-skew operator into its kernel and rotation planes.

    Frequencies are read off the symmetric operator S^2 on the orthogonal
    complement of ker(S); each eigenspace is split into S-invariant planes
    by taking a unit e and f = S e / |S e|. Planes come in increasing
    frequency order.
    """
    algebra = metric_orthonormal_basis.algebra
    B = metric_orthonormal_basis.basis
    G = algebra.metric
    k = B.shape[0]
    if k == 0:
        return SkewPairing(Subspace.empty(algebra), ())

    # matrix of S in the orthonormal basis
    S_r = B @ G @ np.asarray(S.matrix) @ B.T
    scale = max(1.0, float(np.max(np.abs(S_r))))
    skew_residual = float(np.max(np.abs(S_r + S_r.T)))
    if skew_residual > tol * scale:
        raise NotSkewAdjoint(f"Operator is not skew-adjoint (residual {skew_residual:.3e})")
    S_r = 0.5 * (S_r - S_r.T)

    kernel = linalg.null_space(S_r, rcond=tol)
    zero_rows = kernel.T @ B
    zero_space = Subspace(algebra, zero_rows)
    if kernel.shape[1] == k:
        return SkewPairing(zero_space, ())

    C = linalg.null_space(kernel.T) if kernel.shape[1] else np.eye(k)
    S_c = C.T @ S_r @ C
    eigenvalues, eigenvectors = linalg.eigh(S_c @ S_c)
    omegas = np.sqrt(np.clip(-eigenvalues, 0.0, None))
    order = np.argsort(omegas, kind='stable')
    omegas, eigenvectors = omegas[order], eigenvectors[:, order]
    omega_max = float(omegas[-1])

    clusters: List[List[int]] = [[0]]
    for i in range(1, len(omegas)):
        if omegas[i] - omegas[clusters[-1][0]] <= tol * omega_max:
            clusters[-1].append(i)
        else:
            clusters.append([i])

    planes: List[Plane] = []
    for cluster in clusters:
        if len(cluster) % 2:
            raise PairingFailure(
                f"Odd-dimensional eigenspace ({len(cluster)}) at frequency "
                f"{omegas[cluster[0]]:.6e}; tolerance {tol:g} is too small"
            )
        space = eigenvectors[:, cluster]
        while space.shape[1]:
            e = space[:, 0] / np.linalg.norm(space[:, 0])
            Se = S_c @ e
            omega = float(np.linalg.norm(Se))
            f = Se / omega
            pair = np.column_stack([e, f])
            rest = space[:, 1:] - pair @ (pair.T @ space[:, 1:])
            if rest.shape[1]:
                u, s, _ = linalg.svd(rest, full_matrices=False)
                # columns were orthonormal: what survives has singular value near 1
                space = u[:, s > 0.5]
            else:
                space = rest
            planes.append(Plane(
                omega=omega,
                e=(C @ e) @ B,
                f=(C @ f) @ B,
            ))

    planes.sort(key=lambda p: p.omega)
    logger.debug(f"Skew pairing: kernel dim {zero_space.dim}, {len(planes)} planes")
    return SkewPairing(zero_space, tuple(planes))


def expm_apply(M, v: np.ndarray) -> np.ndarray:
    """Return e^M v using scipy's scaling-and-squaring Pade exponential (order <= 13)."""
    matrix = np.asarray(M.matrix if isinstance(M, LinearOperator) else M, dtype=float)
    if not np.any(matrix):
        return np.array(v, dtype=float)
    return linalg.expm(matrix) @ np.asarray(v, dtype=float)


def exp_ad_apply(Z: Element, X: Element) -> Element:
    """Apply exp(ad(Z)) to X."""
    Z.algebra._check(X)
    return Element(X.algebra, expm_apply(ad_matrix(Z), X.coords))
