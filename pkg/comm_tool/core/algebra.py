"""Compact semisimple Lie algebras in a fixed matrix basis.

An algebra is held as a structure-constant tensor ``c[i, j, k]`` with
``[e_i, e_j] = sum_k c[i, j, k] e_k`` together with its Killing Gram matrix
``K[i, j] = trace(ad(e_i) ad(e_j))``. Elements are coordinate vectors in that
basis. The inner product used everywhere else is the negated Killing form.
"""

import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from .config import Tolerances
from .exceptions import AlgebraMismatch, InvalidSpec
from .records import ValidationReport
from .types import AlgebraKind
from ..utils.logger import get_logger

logger = get_logger(__name__)

_SPEC_PATTERN = re.compile(r"(su|so):(\d+)")


@dataclass(frozen=True)
class AlgebraSpec:
    """Which compact algebra to build: su(n), so(n) or a flat direct sum."""
    kind: AlgebraKind
    n: int = 0
    summands: Tuple["AlgebraSpec", ...] = ()

    def __post_init__(self):
        if self.kind == AlgebraKind.SPECIAL_UNITARY and self.n < 2:
            raise InvalidSpec(f"su(n) requires n >= 2, got n={self.n}")
        if self.kind == AlgebraKind.SPECIAL_ORTHOGONAL and self.n < 3:
            raise InvalidSpec(f"so(n) requires n >= 3, got n={self.n}")
        if self.kind == AlgebraKind.DIRECT_SUM:
            if not self.summands:
                raise InvalidSpec("direct sum needs at least one summand")
            if any(s.kind == AlgebraKind.DIRECT_SUM for s in self.summands):
                raise InvalidSpec("direct sum summands must be flattened")

    @classmethod
    def special_unitary(cls, n: int) -> "AlgebraSpec":
        return cls(AlgebraKind.SPECIAL_UNITARY, n)

    @classmethod
    def special_orthogonal(cls, n: int) -> "AlgebraSpec":
        return cls(AlgebraKind.SPECIAL_ORTHOGONAL, n)

    @classmethod
    def direct_sum(cls, parts: Sequence["AlgebraSpec"]) -> "AlgebraSpec":
        """Build a direct sum, flattening nested sums."""
        flat = []
        for part in parts:
            if part.kind == AlgebraKind.DIRECT_SUM:
                flat.extend(part.summands)
            else:
                flat.append(part)
        return cls(AlgebraKind.DIRECT_SUM, summands=tuple(flat))

    @classmethod
    def parse(cls, text: str) -> "AlgebraSpec":
        """Parse ``su:N``, ``so:N`` or ``sum:<spec>+<spec>+...``."""
        text = text.strip().lower()
        if text.startswith("sum:"):
            parts = [p for p in text[len("sum:"):].split("+")]
            if not parts or any(not p for p in parts):
                raise InvalidSpec(f"Malformed direct sum: {text!r}")
            return cls.direct_sum([cls.parse(p) for p in parts])
        match = _SPEC_PATTERN.fullmatch(text)
        if not match:
            raise InvalidSpec(f"Unrecognized algebra spec: {text!r}")
        family, n = match.group(1), int(match.group(2))
        if family == "su":
            return cls.special_unitary(n)
        return cls.special_orthogonal(n)

    @property
    def label(self) -> str:
        if self.kind == AlgebraKind.DIRECT_SUM:
            return "sum:" + "+".join(s.label for s in self.summands)
        return f"{self.kind.value}:{self.n}"

    @property
    def dim(self) -> int:
        if self.kind == AlgebraKind.SPECIAL_UNITARY:
            return self.n * self.n - 1
        if self.kind == AlgebraKind.SPECIAL_ORTHOGONAL:
            return self.n * (self.n - 1) // 2
        return sum(s.dim for s in self.summands)

    @property
    def rank(self) -> int:
        if self.kind == AlgebraKind.SPECIAL_UNITARY:
            return self.n - 1
        if self.kind == AlgebraKind.SPECIAL_ORTHOGONAL:
            return self.n // 2
        return sum(s.rank for s in self.summands)

    @property
    def matrix_size(self) -> int:
        if self.kind == AlgebraKind.DIRECT_SUM:
            return sum(s.matrix_size for s in self.summands)
        return self.n

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """Structure constants, Killing Gram matrix and defining matrices of a basis."""
    spec: AlgebraSpec
    basis_labels: Tuple[str, ...]
    structure: np.ndarray
    killing_gram: np.ndarray
    basis_matrices: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.basis_labels)

    @property
    def rank(self) -> int:
        return self.spec.rank

    @property
    def token(self) -> str:
        """Identity token shared by all elements of this algebra."""
        return self.spec.label

    @cached_property
    def metric(self) -> np.ndarray:
        """Gram matrix of the positive definite inner product -<x, y>."""
        return -self.killing_gram

    @cached_property
    def _coordinate_map(self) -> np.ndarray:
        real = self.basis_matrices.reshape(self.dim, -1)
        return np.linalg.pinv(np.concatenate([real.real, real.imag], axis=1).T)

    def element(self, coords) -> "Element":
        return Element(self, coords)

    def zero(self) -> "Element":
        return Element(self, np.zeros(self.dim))

    def basis_element(self, index: int) -> "Element":
        coords = np.zeros(self.dim)
        coords[index] = 1.0
        return Element(self, coords)

    def random_element(self, rng: Union[np.random.Generator, int, None] = None) -> "Element":
        rng = np.random.default_rng(rng)
        return Element(self, rng.standard_normal(self.dim))

    def to_matrix(self, X: "Element") -> np.ndarray:
        """Defining-representation matrix of an element."""
        self._check(X)
        return np.einsum('i,iab->ab', X.coords, self.basis_matrices)

    def from_matrix(self, matrix: np.ndarray) -> "Element":
        """Coordinates of a defining-representation matrix in this basis."""
        flat = np.asarray(matrix, dtype=complex).ravel()
        coords = self._coordinate_map @ np.concatenate([flat.real, flat.imag])
        return Element(self, coords)

    def _check(self, *elements: "Element") -> None:
        for X in elements:
            if X.algebra.token != self.token:
                raise AlgebraMismatch(
                    f"Element of {X.algebra.token} used with algebra {self.token}"
                )

    def __repr__(self) -> str:
        return f"LieAlgebra({self.spec.label}, dim={self.dim})"


@dataclass(frozen=True, eq=False)
class Element:
    """Coordinate vector of a Lie algebra member."""
    algebra: LieAlgebra
    coords: np.ndarray

    def __post_init__(self):
        coords = np.array(self.coords, dtype=float).reshape(-1)
        if coords.shape != (self.algebra.dim,):
            raise AlgebraMismatch(
                f"Expected {self.algebra.dim} coordinates for {self.algebra.token}, "
                f"got {coords.size}"
            )
        coords.setflags(write=False)
        object.__setattr__(self, 'coords', coords)

    def _same(self, other: "Element") -> None:
        if not isinstance(other, Element):
            raise TypeError(f"Expected Element, got {type(other).__name__}")
        self.algebra._check(other)

    def __add__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.algebra, self.coords + other.coords)

    def __sub__(self, other: "Element") -> "Element":
        self._same(other)
        return Element(self.algebra, self.coords - other.coords)

    def __neg__(self) -> "Element":
        return Element(self.algebra, -self.coords)

    def __mul__(self, scalar: float) -> "Element":
        return Element(self.algebra, float(scalar) * self.coords)

    __rmul__ = __mul__

    def __truediv__(self, scalar: float) -> "Element":
        return Element(self.algebra, self.coords / float(scalar))

    def __repr__(self) -> str:
        return f"Element({self.algebra.token}, {np.array2string(self.coords, precision=4)})"


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """A d x d real matrix acting on coordinate vectors of an algebra."""
    algebra: LieAlgebra
    matrix: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        d = self.algebra.dim
        if matrix.shape != (d, d):
            raise AlgebraMismatch(f"Operator shape {matrix.shape} does not match dim {d}")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)

    def __call__(self, X: Element) -> Element:
        self.algebra._check(X)
        return Element(self.algebra, self.matrix @ X.coords)


def _special_orthogonal_basis(n: int):
    matrices, labels = [], []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n), dtype=complex)
            m[i, j], m[j, i] = 1.0, -1.0
            matrices.append(m)
            labels.append(f"E{i + 1}{j + 1}-E{j + 1}{i + 1}")
    return matrices, labels


def _special_unitary_basis(n: int):
    matrices, labels = [], []
    for k in range(n - 1):
        m = np.zeros((n, n), dtype=complex)
        m[k, k], m[k + 1, k + 1] = 1j, -1j
        matrices.append(m)
        labels.append(f"i(E{k + 1}{k + 1}-E{k + 2}{k + 2})")
    for i in range(n):
        for j in range(i + 1, n):
            a = np.zeros((n, n), dtype=complex)
            a[i, j], a[j, i] = 1.0, -1.0
            s = np.zeros((n, n), dtype=complex)
            s[i, j], s[j, i] = 1j, 1j
            matrices.extend([a, s])
            labels.extend([f"E{i + 1}{j + 1}-E{j + 1}{i + 1}", f"i(E{i + 1}{j + 1}+E{j + 1}{i + 1})"])
    return matrices, labels


def _defining_basis(spec: AlgebraSpec):
    if spec.kind == AlgebraKind.SPECIAL_UNITARY:
        return _special_unitary_basis(spec.n)
    if spec.kind == AlgebraKind.SPECIAL_ORTHOGONAL:
        return _special_orthogonal_basis(spec.n)

    size = spec.matrix_size
    matrices, labels = [], []
    offset = 0
    for index, part in enumerate(spec.summands):
        block_matrices, block_labels = _defining_basis(part)
        m = part.matrix_size
        for block, label in zip(block_matrices, block_labels):
            embedded = np.zeros((size, size), dtype=complex)
            embedded[offset:offset + m, offset:offset + m] = block
            matrices.append(embedded)
            labels.append(f"{part.label}[{index}]:{label}")
        offset += m
    return matrices, labels


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


@lru_cache(maxsize=None)
def build_algebra(spec: AlgebraSpec) -> LieAlgebra:
    """Build the algebra of ``spec`` in its documented basis.

    so(n) uses {E_ij - E_ji : i < j}; su(n) uses the n-1 elements
    i(E_kk - E_k+1,k+1) followed, for each i < j, by E_ij - E_ji and
    i(E_ij + E_ji); direct sums concatenate the summand bases block-diagonally.
    """
    if not isinstance(spec, AlgebraSpec):
        raise InvalidSpec(f"Expected AlgebraSpec, got {type(spec).__name__}")

    matrices, labels = _defining_basis(spec)
    mats = np.array(matrices)
    d = len(mats)

    flat = mats.reshape(d, -1)
    coordinate_map = np.linalg.pinv(np.concatenate([flat.real, flat.imag], axis=1).T)

    commutators = np.einsum('iab,jbc->ijac', mats, mats) - np.einsum('jab,ibc->ijac', mats, mats)
    commutators = commutators.reshape(d, d, -1)
    structure = np.concatenate([commutators.real, commutators.imag], axis=2) @ coordinate_map.T

    # the documented bases have integral structure constants
    rounded = np.round(structure)
    structure = np.where(np.abs(structure - rounded) < 1e-12, rounded, structure)

    killing = np.einsum('ilk,jkl->ij', structure, structure)
    killing = 0.5 * (killing + killing.T)

    logger.debug(f"Built {spec.label}: dim={d}, rank={spec.rank}")
    return LieAlgebra(
        spec=spec,
        basis_labels=tuple(labels),
        structure=_frozen(structure),
        killing_gram=_frozen(killing),
        basis_matrices=_frozen(mats),
    )


def bracket(X: Element, Y: Element) -> Element:
    """Lie bracket [X, Y]."""
    X.algebra._check(Y)
    g = X.algebra
    return Element(g, np.einsum('i,j,ijk->k', X.coords, Y.coords, g.structure))


def ad_matrix(X: Element) -> LinearOperator:
    """Matrix of ad(X); column j holds the coordinates of [X, e_j]."""
    g = X.algebra
    return LinearOperator(g, np.einsum('i,ijk->kj', X.coords, g.structure))


def killing_form(X: Element, Y: Element) -> float:
    """Killing form <X, Y> = x^T K y."""
    X.algebra._check(Y)
    return float(X.coords @ X.algebra.killing_gram @ Y.coords)


def inner(X: Element, Y: Element) -> float:
    """Positive definite inner product -<X, Y>."""
    return -killing_form(X, Y)


def norm(X: Element) -> float:
    """|X| = sqrt(-<X, X>)."""
    return float(np.sqrt(max(0.0, -killing_form(X, X))))


def killing_constant(g: LieAlgebra) -> float:
    """Least-squares c with <X, Y> = c * Re trace(xy) in the defining representation."""
    traces = np.einsum('iab,jba->ij', g.basis_matrices, g.basis_matrices).real
    return float(np.sum(g.killing_gram * traces) / np.sum(traces * traces))


def validate_algebra(g: LieAlgebra, tolerances: Optional[Tolerances] = None) -> ValidationReport:
    """Check antisymmetry, the Jacobi identity, invariance and definiteness."""
    tolerances = tolerances or Tolerances()
    c = np.asarray(g.structure)
    K = np.asarray(g.killing_gram)

    antisymmetry = float(np.max(np.abs(c + c.transpose(1, 0, 2)))) if c.size else 0.0

    # [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]
    jacobi = (
        np.einsum('jkm,imn->ijkn', c, c)
        + np.einsum('kim,jmn->ijkn', c, c)
        + np.einsum('ijm,kmn->ijkn', c, c)
    )
    jacobi_residual = float(np.max(np.abs(jacobi))) if jacobi.size else 0.0

    # <[e_i,e_j],e_k> + <e_j,[e_i,e_k]>
    invariance = np.einsum('ijm,mk->ijk', c, K) + np.einsum('ikm,jm->ijk', c, K)
    invariance_residual = float(np.max(np.abs(invariance))) if invariance.size else 0.0

    symmetry_residual = float(np.max(np.abs(K - K.T)))
    max_eigenvalue = float(np.max(linalg.eigvalsh(0.5 * (K + K.T))))

    report = ValidationReport(
        algebra_spec=g.spec.label,
        dim=g.dim,
        antisymmetry_residual=antisymmetry,
        jacobi_residual=jacobi_residual,
        invariance_residual=invariance_residual,
        symmetry_residual=symmetry_residual,
        max_killing_eigenvalue=max_eigenvalue,
        tolerance=tolerances.structural,
    )
    if not report.passed:
        logger.warning(f"Algebra {g.spec.label} failed validation: {report.failures()}")
    return report
