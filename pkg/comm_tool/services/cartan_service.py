"""Cartan subalgebras, root-space decomposition and regularity."""

from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import linalg
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from ..core.algebra import Element, LieAlgebra, ad_matrix, bracket, norm
from ..core.exceptions import (
    CartanError,
    CsaNotFound,
    DegenerateReference,
    NotACsa,
    NotInCsa,
)
from ..core.numerics import Subspace, nullspace, skew_pairing
from ..core.records import FrameRecord, RootRecord
from ..utils.logger import get_logger

logger = get_logger(__name__)

TWO_PI = 2.0 * np.pi

RngLike = Union[np.random.Generator, int, None]


class _NonGenericSample(CartanError):
    """A random sample landed on a degenerate element; draw another."""
    pass


def _log_retry(what: str):
    def after(retry_state):
        error = retry_state.outcome.exception() if retry_state.outcome else None
        logger.warning(f"{what}: attempt {retry_state.attempt_number} rejected ({error})")
    return after


@dataclass(frozen=True, eq=False)
class Root:
    """Positive root: its values on the CSA basis and its oriented plane L_alpha.

    ``alpha[j]`` is alpha(h_j), in units where h_j rotates the plane with
    angular frequency 2*pi*alpha(h_j): [h_j, e] = 2 pi alpha_j f and
    [h_j, f] = -2 pi alpha_j e. ``f`` is the complex structure applied to ``e``.
    """
    index: int
    alpha: np.ndarray
    e: Element
    f: Element

    def __call__(self, h_coefficients: np.ndarray) -> float:
        return float(self.alpha @ h_coefficients)

    def rotate_quarter(self, X: Element) -> Element:
        """Apply the complex structure i to the plane part of X."""
        G = X.algebra.metric
        a = self.e.coords @ G @ X.coords
        b = self.f.coords @ G @ X.coords
        return Element(X.algebra, a * self.f.coords - b * self.e.coords)


@dataclass(frozen=True, eq=False)
class CartanFrame:
    """Orthonormal CSA basis, positive roots and the reference element fixing positivity."""
    algebra: LieAlgebra
    h: Subspace
    roots: Tuple[Root, ...]
    H_ref: Element

    @property
    def rank(self) -> int:
        return self.h.dim

    @cached_property
    def alpha_matrix(self) -> np.ndarray:
        """r x |roots| matrix whose columns are the alpha vectors."""
        if not self.roots:
            return np.zeros((self.rank, 0))
        return np.column_stack([root.alpha for root in self.roots])

    @cached_property
    def plane_rows(self) -> Tuple[np.ndarray, np.ndarray]:
        E = np.array([root.e.coords for root in self.roots]).reshape(-1, self.algebra.dim)
        F = np.array([root.f.coords for root in self.roots]).reshape(-1, self.algebra.dim)
        return E, F

    @cached_property
    def stall_constant(self) -> float:
        """Smallest singular value of the normalized alpha matrix over sqrt(|roots|)."""
        if not self.roots:
            return 0.0
        A = self.alpha_matrix / np.linalg.norm(self.alpha_matrix, axis=0)
        return float(linalg.svdvals(A)[-1] / np.sqrt(len(self.roots)))

    def csa_coefficients(self, X: Element) -> np.ndarray:
        self.algebra._check(X)
        return self.h.coefficients(X.coords)

    def root_values(self, H: Element) -> np.ndarray:
        """alpha(H) for every positive root (uses only the CSA part of H)."""
        return self.alpha_matrix.T @ self.csa_coefficients(H)

    def dimension_identity(self) -> bool:
        return self.algebra.dim == self.rank + 2 * len(self.roots)

    def to_record(self, seed: Optional[int] = None) -> FrameRecord:
        return FrameRecord(
            algebra_spec=self.algebra.spec.label,
            seed=seed,
            dim=self.algebra.dim,
            rank=self.rank,
            positive_roots=len(self.roots),
            dimension_check=self.dimension_identity(),
            csa_basis=self.h.basis.tolist(),
            h_ref=self.H_ref.coords.tolist(),
            roots=[
                RootRecord(alpha=root.alpha.tolist(), e=root.e.coords.tolist(), f=root.f.coords.tolist())
                for root in self.roots
            ],
        )


@dataclass(frozen=True, eq=False)
class Components:
    """Orthogonal split of an element into its CSA part and root-plane parts."""
    frame: CartanFrame
    h_part: Element
    root_parts: np.ndarray  # (|roots|, 2) coordinates on (e_alpha, f_alpha)

    def root_element(self, index: int) -> Element:
        root = self.frame.roots[index]
        t_e, t_f = self.root_parts[index]
        return root.e * t_e + root.f * t_f

    def reassemble(self) -> Element:
        E, F = self.frame.plane_rows
        coords = self.h_part.coords + self.root_parts[:, 0] @ E + self.root_parts[:, 1] @ F
        return Element(self.frame.algebra, coords)


def centralizer(g: LieAlgebra, A: Element, tol: float = 1e-8) -> Subspace:
    """Cen_g(A) = ker ad(A)."""
    g._check(A)
    return nullspace(ad_matrix(A), tol)


def is_abelian(subspace: Subspace, tol: float = 1e-9) -> bool:
    vectors = subspace.vectors()
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            if norm(bracket(vectors[i], vectors[j])) > tol:
                return False
    return True


def find_csa(g: LieAlgebra, rng_seed: RngLike = None, max_tries: int = 20,
             tol: float = 1e-8) -> Subspace:
    """Centralizer of a random element, resampled until it is abelian.

    An abelian centralizer is maximal abelian, so the first one accepted
    already has the minimal dimension (the rank).
    """
    rng = np.random.default_rng(rng_seed)

    def sample() -> Subspace:
        H = g.random_element(rng)
        candidate = centralizer(g, H, tol)
        if candidate.dim == 0 or not is_abelian(candidate):
            raise _NonGenericSample(f"centralizer of dim {candidate.dim} is not abelian")
        return candidate

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(max_tries),
            retry=retry_if_exception_type(_NonGenericSample),
            after=_log_retry("CSA sample"),
            reraise=True,
        ):
            with attempt:
                csa = sample()
    except _NonGenericSample as e:
        raise CsaNotFound(f"No abelian centralizer in {max_tries} samples for {g.spec.label}") from e

    logger.debug(f"Found CSA of dimension {csa.dim} in {g.spec.label}")
    return csa


def root_decomposition(g: LieAlgebra, h: Subspace, rng: RngLike = None,
                       max_tries: int = 20, tol: float = 1e-8,
                       genericity: float = 1e-4, action_tol: float = 1e-8) -> CartanFrame:
    """Split g into h and the root planes of a generic reference element of h."""
    if h.dim == 0 or not is_abelian(h):
        raise NotACsa(f"Subspace of dimension {h.dim} is not an abelian subalgebra")
    rng = np.random.default_rng(rng)
    G = g.metric
    r = h.dim
    full = Subspace.full(g)
    ad_h = np.array([ad_matrix(v).matrix for v in h.vectors()])
    oversized: List[int] = []

    def attempt_frame() -> CartanFrame:
        H0 = Element(g, rng.standard_normal(r) @ h.basis)
        pairing = skew_pairing(ad_matrix(H0), full, tol)
        zero_dim = pairing.zero_space.dim
        if zero_dim < r:
            raise NotACsa(f"ker ad(H) has dimension {zero_dim} < {r}")
        if zero_dim > r:
            oversized.append(zero_dim)
            raise _NonGenericSample(f"kernel dimension {zero_dim} exceeds {r}")

        omegas = pairing.frequencies
        if omegas.size:
            gap = genericity * omegas[-1]
            if omegas[0] <= gap or (omegas.size > 1 and np.min(np.diff(omegas)) <= gap):
                raise _NonGenericSample("root frequencies are not separated")

        roots = []
        for index, plane in enumerate(pairing.planes):
            image_e = ad_h @ plane.e  # (r, d): [h_j, e]
            image_f = ad_h @ plane.f
            alpha = (image_e @ G @ plane.f) / TWO_PI
            residual_e = image_e - TWO_PI * np.outer(alpha, plane.f)
            residual_f = image_f + TWO_PI * np.outer(alpha, plane.e)
            action = max(
                np.sqrt(np.max(np.einsum('ij,jk,ik->i', residual_e, G, residual_e))),
                np.sqrt(np.max(np.einsum('ij,jk,ik->i', residual_f, G, residual_f))),
            )
            if action > action_tol:
                raise _NonGenericSample(f"plane {index} is not h-invariant (residual {action:.2e})")
            roots.append(Root(index, alpha, Element(g, plane.e), Element(g, plane.f)))

        frame = CartanFrame(g, h, tuple(roots), H0)
        if roots and np.linalg.matrix_rank(frame.alpha_matrix, tol=1e-10) != r:
            raise NotACsa("Roots do not separate the points of h")
        return frame

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(max_tries),
            retry=retry_if_exception_type(_NonGenericSample),
            after=_log_retry("Reference element"),
            reraise=True,
        ):
            with attempt:
                frame = attempt_frame()
    except _NonGenericSample as e:
        if len(oversized) == max_tries:
            raise NotACsa(f"Centralizers of h are strictly larger than h (dims {oversized})") from e
        raise DegenerateReference(f"No generic reference element in {max_tries} tries") from e

    logger.debug(
        f"Root decomposition of {g.spec.label}: rank {frame.rank}, {len(frame.roots)} positive roots"
    )
    return frame


def build_frame(g: LieAlgebra, rng: RngLike = None, max_tries: int = 20) -> CartanFrame:
    """find_csa followed by root_decomposition, drawing from one generator."""
    rng = np.random.default_rng(rng)
    h = find_csa(g, rng, max_tries)
    return root_decomposition(g, h, rng, max_tries)


def project(frame: CartanFrame, X: Element) -> Components:
    """Metric-orthogonal projection onto h and every root plane."""
    frame.algebra._check(X)
    G = frame.algebra.metric
    E, F = frame.plane_rows
    weighted = G @ X.coords
    parts = np.column_stack([E @ weighted, F @ weighted]) if len(frame.roots) else np.zeros((0, 2))
    return Components(frame, frame.h.project(X), parts)


def coroot_direction(frame: CartanFrame, gamma: Root) -> Element:
    """Unit metric dual of gamma in h; it spans the orthogonal complement of ker(gamma)."""
    v = gamma.alpha @ frame.h.basis
    return Element(frame.algebra, v / np.linalg.norm(gamma.alpha))


def root_kernel(frame: CartanFrame, gamma: Root) -> Subspace:
    """Orthonormal basis of ker(gamma) inside h."""
    coefficients = linalg.null_space(gamma.alpha[None, :])
    return Subspace(frame.algebra, coefficients.T @ frame.h.basis)


def csa_residual(frame: CartanFrame, H: Element) -> float:
    """Distance of H from h."""
    return norm(H - frame.h.project(H))


def regularity_margin(frame: CartanFrame, H: Element) -> float:
    """min |alpha(H)| / max |alpha(H)| over the positive roots."""
    values = np.abs(frame.root_values(H))
    if not values.size or values.max() <= 0:
        return 0.0
    return float(values.min() / values.max())


def is_regular(frame: CartanFrame, H: Element, delta: float = 1e-6) -> bool:
    """True iff min |alpha(H)| >= delta * max |alpha(H)| > 0."""
    if csa_residual(frame, H) > 1e-9 * max(1.0, norm(H)):
        raise NotInCsa(f"Element is not in the CSA (residual {csa_residual(frame, H):.2e})")
    values = np.abs(frame.root_values(H))
    if not values.size:
        return norm(H) > 0
    if values.max() <= 0:
        return False
    return bool(values.min() >= delta * values.max())
