"""Regular elements, inversion of ad(X) on root planes and commutator certificates."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt

from ..core.algebra import Element, LieAlgebra, ad_matrix, bracket, norm, validate_algebra
from ..core.config import SolveConfig
from ..core.exceptions import (
    CertificateInvalid,
    InversionFailed,
    NotInImage,
    NotRegular,
    NumericsError,
    RegularNotFound,
    SolverError,
)
from ..core.numerics import Subspace, skew_pairing
from ..core.records import CertificateRecord, CheckResult, FrameRecord, VerificationReport
from ..utils.logger import get_logger
from .cartan_service import (
    TWO_PI,
    CartanFrame,
    RngLike,
    build_frame,
    centralizer,
    coroot_direction,
    is_abelian,
    is_regular,
    project,
    regularity_margin,
)
from .rotation_service import BiorthogonalResult, apply_generators, biorthogonal_csa

logger = get_logger(__name__)


class _IrregularSample(SolverError):
    pass


@dataclass(frozen=True, eq=False)
class CommutatorCertificate:
    """A regular X with [X, Y_A] = A and [X, Y_B] = B."""
    X: Element
    Y_A: Element
    Y_B: Element
    Q_generators: Tuple[Element, ...]
    frame_snapshot: Optional[FrameRecord]
    residual_A: float
    residual_B: float
    regularity_margin: float
    seed: Optional[int] = None
    descent: Optional[BiorthogonalResult] = None

    @property
    def algebra(self) -> LieAlgebra:
        return self.X.algebra

    def to_record(self, include_frame: bool = True) -> CertificateRecord:
        return CertificateRecord(
            algebra_spec=self.algebra.spec.label,
            seed=self.seed,
            X=self.X.coords.tolist(),
            Y_A=self.Y_A.coords.tolist(),
            Y_B=self.Y_B.coords.tolist(),
            residual_A=self.residual_A,
            residual_B=self.residual_B,
            regularity_margin=self.regularity_margin,
            generators=[Z.coords.tolist() for Z in self.Q_generators],
            frame=self.frame_snapshot if include_frame else None,
        )

    @classmethod
    def from_record(cls, g: LieAlgebra, record: CertificateRecord) -> "CommutatorCertificate":
        return cls(
            X=Element(g, record.X),
            Y_A=Element(g, record.Y_A),
            Y_B=Element(g, record.Y_B),
            Q_generators=tuple(Element(g, Z) for Z in record.generators),
            frame_snapshot=record.frame,
            residual_A=record.residual_A,
            residual_B=record.residual_B,
            regularity_margin=record.regularity_margin,
            seed=record.seed,
        )


def pick_regular(frame: CartanFrame, delta: float = 1e-6, rng: RngLike = None,
                 max_tries: int = 20) -> Element:
    """Normalized sum of the coroot directions, perturbed inside h until regular."""
    rng = np.random.default_rng(rng)
    g = frame.algebra
    base = np.sum([coroot_direction(frame, root).coords for root in frame.roots], axis=0)
    base = Element(g, base)
    if norm(base) == 0:
        raise RegularNotFound("Coroot directions sum to zero")
    base = base / norm(base)

    def candidate(attempt_number: int) -> Element:
        if attempt_number == 1:
            X = base
        else:
            noise = Element(g, rng.standard_normal(frame.rank) @ frame.h.basis)
            X = base + noise * (0.1 / norm(noise))
            X = X / norm(X)
        if not is_regular(frame, X, delta):
            raise _IrregularSample(f"margin {regularity_margin(frame, X):.2e} below {delta:g}")
        return X

    def log_retry(retry_state):
        logger.warning(
            f"Regular element: attempt {retry_state.attempt_number} rejected "
            f"({retry_state.outcome.exception()}); perturbing"
        )

    try:
        for attempt in Retrying(
            stop=stop_after_attempt(max_tries),
            retry=retry_if_exception_type(_IrregularSample),
            after=log_retry,
            reraise=True,
        ):
            with attempt:
                X = candidate(attempt.retry_state.attempt_number)
    except _IrregularSample as e:
        raise RegularNotFound(f"No element with margin >= {delta:g} in {max_tries} tries") from e
    return X


def invert_ad(frame: CartanFrame, X: Element, T: Element, delta: float = 1e-6,
              image_tol: float = 1e-8, check_tol: float = 1e-9) -> Element:
    """Minimum-norm Y with [X, Y] = T for regular X in h and T orthogonal to h.

    On each root plane X acts as 2 pi alpha(X) times the quarter turn, so
    (t_e, t_f) is pulled back to (t_f, -t_e) / (2 pi alpha(X)).
    """
    g = frame.algebra
    g._check(X, T)
    if not is_regular(frame, X, delta):
        raise NotRegular(f"X has regularity margin {regularity_margin(frame, X):.2e} < {delta:g}")
    parts = project(frame, T)
    scale = max(1.0, norm(T))
    if norm(parts.h_part) > image_tol * scale:
        raise NotInImage(f"Target has CSA component {norm(parts.h_part):.3e}")

    s = TWO_PI * frame.root_values(X)
    E, F = frame.plane_rows
    y_e = parts.root_parts[:, 1] / s
    y_f = -parts.root_parts[:, 0] / s
    Y = Element(g, y_e @ E + y_f @ F)

    residual = norm(bracket(X, Y) - (T - parts.h_part))
    if residual > check_tol * scale:
        raise InversionFailed(f"[X, Y] misses the target by {residual:.3e}")
    return Y


def solve_commutator(g: LieAlgebra, A: Element, B: Element,
                     cfg: Optional[SolveConfig] = None,
                     frame: Optional[CartanFrame] = None) -> CommutatorCertificate:
    """One regular X and preimages Y_A, Y_B with [X, Y_A] = A and [X, Y_B] = B."""
    cfg = cfg or SolveConfig()
    g._check(A, B)
    report = validate_algebra(g)
    if not report.passed:
        raise SolverError(f"Algebra {g.spec.label} failed validation: {report.failures()}")

    rng = np.random.default_rng(cfg.rng_seed)
    if frame is None:
        frame = build_frame(g, rng, cfg.max_csa_tries)

    descent = biorthogonal_csa(g, A, B, cfg.sweep(), frame)
    X_frame = pick_regular(frame, cfg.regular_delta, rng, cfg.max_regular_tries)
    image_tol = max(cfg.tol_A, cfg.tol_B)
    Y_A_frame = invert_ad(frame, X_frame, descent.A_out, cfg.regular_delta, image_tol)
    Y_B_frame = invert_ad(frame, X_frame, descent.B_out, cfg.regular_delta, image_tol)

    generators = descent.generators
    X = apply_generators(generators, X_frame)
    Y_A = apply_generators(generators, Y_A_frame)
    Y_B = apply_generators(generators, Y_B_frame)

    certificate = CommutatorCertificate(
        X=X,
        Y_A=Y_A,
        Y_B=Y_B,
        Q_generators=generators,
        frame_snapshot=frame.to_record(cfg.rng_seed),
        residual_A=norm(bracket(X, Y_A) - A),
        residual_B=norm(bracket(X, Y_B) - B),
        regularity_margin=regularity_margin(frame, X_frame),
        seed=cfg.rng_seed,
        descent=descent,
    )

    limit_A = cfg.verify_tol * max(1.0, norm(A))
    limit_B = cfg.verify_tol * max(1.0, norm(B))
    if certificate.residual_A > limit_A or certificate.residual_B > limit_B \
            or certificate.regularity_margin < cfg.regular_delta:
        logger.error(
            f"Certificate rejected: residuals {certificate.residual_A:.3e}, "
            f"{certificate.residual_B:.3e}, margin {certificate.regularity_margin:.3e}"
        )
        raise CertificateInvalid("Certificate failed its residual checks", certificate)

    logger.info(
        f"Solved {g.spec.label}: {len(descent.stage1.trace)} + {len(descent.stage2.trace)} steps, "
        f"residuals {certificate.residual_A:.2e} / {certificate.residual_B:.2e}"
    )
    return certificate


def frequency_margin(X: Element, tol: float = 1e-8) -> float:
    """min / max frequency of ad(X) over the root planes, computed without a Cartan frame."""
    try:
        pairing = skew_pairing(ad_matrix(X), Subspace.full(X.algebra), tol)
    except NumericsError as e:
        logger.warning(f"Frequency margin unavailable: {e}")
        return 0.0
    # a kernel larger than the rank means some root vanishes on X
    if pairing.zero_space.dim > X.algebra.rank:
        return 0.0
    omegas = pairing.frequencies
    if not omegas.size or omegas[-1] <= 0:
        return 0.0
    return float(omegas[0] / omegas[-1])


def verify_certificate(g: LieAlgebra, A: Element, B: Element,
                       cert: CommutatorCertificate, tol: float = 1e-8,
                       margin_floor: float = 1e-6) -> VerificationReport:
    """Check a certificate from (g, A, B, X, Y_A, Y_B) alone."""
    g._check(A, B, cert.X, cert.Y_A, cert.Y_B)
    X = cert.X
    checks = []

    for name, Y, target in (('residual_A', cert.Y_A, A), ('residual_B', cert.Y_B, B)):
        residual = norm(bracket(X, Y) - target)
        limit = tol * max(1.0, norm(target))
        checks.append(CheckResult(name=name, passed=residual <= limit, value=residual, threshold=limit))

    cen = centralizer(g, X)
    vectors = cen.vectors()
    commutator_size = max(
        (norm(bracket(vectors[i], vectors[j])) for i in range(len(vectors)) for j in range(i + 1, len(vectors))),
        default=0.0,
    )
    checks.append(CheckResult(
        name='centralizer_abelian', passed=is_abelian(cen), value=commutator_size, threshold=1e-9,
    ))
    checks.append(CheckResult(
        name='centralizer_dimension', passed=cen.dim == g.rank, value=float(cen.dim), threshold=float(g.rank),
    ))
    margin = frequency_margin(X)
    checks.append(CheckResult(
        name='regularity_margin', passed=margin >= margin_floor, value=margin, threshold=margin_floor,
    ))

    report = VerificationReport(algebra_spec=g.spec.label, checks=checks)
    if not report.passed:
        failed = [c.name for c in checks if not c.passed]
        logger.warning(f"Certificate verification failed: {failed}")
    return report
