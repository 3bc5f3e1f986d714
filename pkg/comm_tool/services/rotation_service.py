"""so(3) subalgebras of root planes and the Jacobi descent on CSA projections.

The descent keeps the CSA h fixed and moves the elements instead: a step
that would rotate h by g = exp(ad Z) is carried out by applying g^-1 to the
working copies of A and B. The recorded generators compose to
Q = exp(ad Z_1) o ... o exp(ad Z_k), and the working copies are Q^-1 A, Q^-1 B.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.algebra import Element, LieAlgebra, bracket, inner, norm
from ..core.numerics import exp_ad_apply
from ..core.config import SweepConfig
from ..core.exceptions import (
    DegenerateRoot,
    MaxIterationsExceeded,
    OrthogonalityDrift,
    PreconditionViolated,
    RotationError,
    ZeroH,
)
from ..core.records import TraceLine
from ..core.types import Policy
from ..utils.logger import get_logger
from .cartan_service import (
    TWO_PI,
    CartanFrame,
    Root,
    build_frame,
    coroot_direction,
    project,
)

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class So3Frame:
    """U, V, W spanning m_gamma with [U,V]=W, [V,W]=U, [W,U]=V.

    The three vectors are mutually orthogonal and all have norm ``rho``.
    """
    gamma: Root
    U: Element
    V: Element
    W: Element
    rho: float

    @property
    def axes(self) -> Tuple[Element, Element, Element]:
        """Orthonormal U/rho, V/rho, W/rho."""
        return self.U / self.rho, self.V / self.rho, self.W / self.rho

    def coordinates(self, X: Element) -> np.ndarray:
        """Coordinates of the m_gamma part of X on the orthonormal axes."""
        return np.array([inner(axis, X) for axis in self.axes])

    def generator(self, vector: np.ndarray) -> Element:
        """The element z_1 U + z_2 V + z_3 W; exp(ad) of it rotates axes by |z| about z."""
        return self.U * vector[0] + self.V * vector[1] + self.W * vector[2]

    def bracket_residuals(self) -> Tuple[float, float, float]:
        return (
            norm(bracket(self.U, self.V) - self.W),
            norm(bracket(self.V, self.W) - self.U),
            norm(bracket(self.W, self.U) - self.V),
        )


@dataclass(frozen=True, eq=False)
class JacobiStep:
    root_index: int
    b0_before: float
    b0_after: float
    decrease: float  # |H_gamma|^2
    Z: Element

    def identity_residual(self) -> float:
        """b0_after^2 + decrease - b0_before^2."""
        return self.b0_after ** 2 + self.decrease - self.b0_before ** 2

    def to_line(self, iteration: int, stage: int = 1, seed: Optional[int] = None) -> TraceLine:
        return TraceLine(
            stage=stage,
            iter=iteration,
            root=self.root_index,
            b0_before=self.b0_before,
            b0_after=self.b0_after,
            decrease=self.decrease,
            seed=seed,
        )


@dataclass(frozen=True, eq=False)
class JacobiResult:
    Q_generators: Tuple[Element, ...]
    A_out: Element
    B_out: Element
    trace: Tuple[JacobiStep, ...]
    converged: bool


def apply_generators(generators: Sequence[Element], X: Element) -> Element:
    """Q(X) for Q = exp(ad Z_1) o ... o exp(ad Z_k)."""
    for Z in reversed(generators):
        X = exp_ad_apply(Z, X)
    return X


def invert_generators(generators: Sequence[Element], X: Element) -> Element:
    """Q^-1(X)."""
    for Z in generators:
        X = exp_ad_apply(-Z, X)
    return X


def so3_frame(frame: CartanFrame, gamma: Root, X_dir: Element, tol: float = 1e-9) -> So3Frame:
    """Normalized so(3) frame of m_gamma = R H_gamma + L_gamma built on X_dir."""
    G = frame.algebra.metric
    plane = np.array([gamma.e.coords @ G @ X_dir.coords, gamma.f.coords @ G @ X_dir.coords])
    if abs(norm(X_dir) - 1.0) > tol:
        raise RotationError(f"X_dir must have norm 1, got {norm(X_dir):.12f}")
    if abs(np.linalg.norm(plane) - 1.0) > tol:
        raise RotationError("X_dir does not lie in the root plane")

    iX = gamma.rotate_quarter(X_dir)
    Y = bracket(X_dir, iX)
    gamma_Y = gamma(frame.csa_coefficients(Y))
    if gamma_Y <= 1e-12:
        raise DegenerateRoot(f"gamma(Y) = {gamma_Y:.3e} for root {gamma.index}")

    # <Y, Y> = -2 pi gamma(Y)
    killing_gap = abs(-norm(Y) ** 2 + TWO_PI * gamma_Y)
    if killing_gap > 1e-8 * max(1.0, norm(Y) ** 2):
        raise DegenerateRoot(f"<Y,Y> differs from -2 pi gamma(Y) by {killing_gap:.3e}")

    rho = 1.0 / np.sqrt(TWO_PI * gamma_Y)
    return So3Frame(gamma=gamma, U=X_dir * rho, V=iX * rho, W=Y * rho ** 2, rho=float(rho))


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def plan_rotation(s: So3Frame, H_comp: Element, A_comp: Element,
                  B_comp: Optional[Element] = None, tol: float = 1e-12) -> Element:
    """Generator Z in m_gamma whose exp(ad) turns the line of H_comp onto a line v.

    v is orthogonal to A_comp and to H_comp + B_comp (B_comp defaults to 0,
    giving the right-angle rotation). With B_comp the L_gamma part of B, the
    projection of B onto the rotated CSA loses exactly the H_comp component.
    """
    h = s.coordinates(H_comp)
    h_norm = np.linalg.norm(h)
    if h_norm <= tol * max(1.0, norm(H_comp)) or h_norm == 0.0:
        raise ZeroH("CSA component of the rotated element is zero")
    h_hat = h / h_norm
    target = h + (s.coordinates(B_comp) if B_comp is not None else 0.0)
    t_hat = _unit(target)
    a = s.coordinates(A_comp)
    # below this A_comp is roundoff and places no constraint on v
    a_active = np.linalg.norm(a) > tol * max(1.0, h_norm)

    v = None
    if a_active:
        cross = np.cross(t_hat, _unit(a))
        if np.linalg.norm(cross) > 1e-9:
            v = _unit(cross)
    if v is None:
        # deterministic fallback: U axis, else V axis, orthogonalized against the target
        for axis in np.eye(3)[:2]:
            candidate = axis - (axis @ t_hat) * t_hat
            if np.linalg.norm(candidate) > 1e-6:
                v = _unit(candidate)
                break
    if v @ h_hat < 0:
        v = -v

    axis = np.cross(h_hat, v)
    axis_norm = np.linalg.norm(axis)
    if axis_norm <= 1e-15:
        return s.generator(np.zeros(3))
    angle = float(np.arctan2(axis_norm, h_hat @ v))
    Z = s.generator(angle * axis / axis_norm)

    target_element = H_comp if B_comp is None else H_comp + B_comp
    rotated = exp_ad_apply(Z, H_comp)
    scale = norm(H_comp)
    off_target = abs(inner(rotated, target_element))
    off_a = abs(inner(rotated, A_comp)) if a_active else 0.0
    if off_target > 1e-8 * scale * norm(target_element) or off_a > 1e-8 * scale * norm(A_comp):
        raise RotationError(
            f"Planned rotation misses its target line ({off_target:.2e}, {off_a:.2e})"
        )
    return Z


def apply_rotation(g: LieAlgebra, Z: Element, X: Element) -> Element:
    """exp(ad Z) X."""
    g._check(Z, X)
    return exp_ad_apply(Z, X)


def _select_root(weights: np.ndarray, policy: Policy,
                 rng: np.random.Generator, floor: float) -> int:
    candidates = np.flatnonzero(weights > floor)
    if not candidates.size:
        return -1
    if policy == Policy.FIRST:
        return int(candidates[0])
    if policy == Policy.RANDOM:
        return int(rng.choice(candidates))
    return int(np.argmax(weights))


def jacobi_sweep(A: Element, B: Element, frame: CartanFrame,
                 cfg: Optional[SweepConfig] = None, stage: int = 1) -> JacobiResult:
    """Rotate A and B until the CSA projection of B vanishes, keeping A orthogonal to h."""
    cfg = cfg or SweepConfig()
    g = frame.algebra
    g._check(A, B)
    rng = np.random.default_rng(cfg.rng_seed)

    a_scale = max(1.0, norm(A))
    b_scale = max(1.0, norm(B))
    a_limit = cfg.tol_A * a_scale
    b_limit = cfg.tol_B * b_scale

    drift = norm(project(frame, A).h_part)
    if drift > a_limit:
        raise PreconditionViolated(f"A is not orthogonal to the CSA (projection {drift:.3e})")

    coroots = [coroot_direction(frame, root) for root in frame.roots]
    coroot_rows = np.array([u.coords for u in coroots]).reshape(-1, g.dim)
    stall = frame.stall_constant
    logger.debug(f"Stage {stage}: stall constant {stall:.4e} for {len(frame.roots)} roots")

    A_cur, B_cur = A, B
    generators: List[Element] = []
    trace: List[JacobiStep] = []

    parts = project(frame, B_cur)
    b0 = norm(parts.h_part)
    while b0 > b_limit:
        if len(trace) >= cfg.max_iter:
            logger.error(f"Stage {stage}: no convergence after {cfg.max_iter} steps (|B0| = {b0:.3e})")
            raise MaxIterationsExceeded(
                f"Jacobi sweep did not converge in {cfg.max_iter} iterations (|B0| = {b0:.3e})",
                trace=trace,
                stage=stage,
            )

        B0 = parts.h_part
        weights = np.abs(coroot_rows @ g.metric @ B0.coords)
        index = _select_root(weights, cfg.policy, rng, floor=1e-14 * b_scale)
        if index < 0:
            raise RotationError(f"No root detects the CSA projection |B0| = {b0:.3e}")
        if cfg.policy == Policy.MAX_DECREASE and weights[index] < stall * b0 * (1.0 - 1e-9):
            raise RotationError(
                f"Selected |H_gamma| = {weights[index]:.3e} is below the stall bound {stall * b0:.3e}"
            )

        gamma = frame.roots[index]
        u = coroots[index]
        H_gamma = u * inner(B0, u)

        a_parts = project(frame, A_cur)
        A_gamma = a_parts.root_element(index)
        B_gamma = parts.root_element(index)
        if norm(A_gamma) > 1e-12 * a_scale:
            X_dir = A_gamma / norm(A_gamma)
        else:
            X_dir = gamma.e
            A_gamma = A_gamma * 0.0
        s = so3_frame(frame, gamma, X_dir)
        Z = plan_rotation(s, H_gamma, A_gamma, B_gamma)

        A_cur = exp_ad_apply(-Z, A_cur)
        B_cur = exp_ad_apply(-Z, B_cur)
        generators.append(Z)

        parts = project(frame, B_cur)
        b0_after = norm(parts.h_part)
        step = JacobiStep(
            root_index=index,
            b0_before=b0,
            b0_after=b0_after,
            decrease=weights[index] ** 2,
            Z=Z,
        )
        trace.append(step)
        allowance = 1e-8 * b0 ** 2 + 1e-12 * b0 * b_scale
        if abs(step.identity_residual()) > allowance:
            logger.warning(
                f"Stage {stage} step {len(trace)}: decrease identity off by "
                f"{step.identity_residual():.3e} (allowance {allowance:.3e})"
            )
        logger.debug(
            f"Stage {stage} step {len(trace)}: root {index}, |B0| {b0:.6e} -> {b0_after:.6e}"
        )

        drift = norm(project(frame, A_cur).h_part)
        if drift > a_limit:
            raise OrthogonalityDrift(
                f"A drifted off the CSA complement ({drift:.3e} > {a_limit:.3e}) at step {len(trace)}"
            )
        b0 = b0_after

    logger.info(f"Stage {stage} converged in {len(trace)} steps (|B0| = {b0:.3e})")
    return JacobiResult(
        Q_generators=tuple(generators),
        A_out=A_cur,
        B_out=B_cur,
        trace=tuple(trace),
        converged=True,
    )


@dataclass(frozen=True, eq=False)
class BiorthogonalResult:
    stage1: JacobiResult
    stage2: JacobiResult
    frame: CartanFrame
    A_out: Element
    B_out: Element

    @property
    def generators(self) -> Tuple[Element, ...]:
        return self.stage1.Q_generators + self.stage2.Q_generators

    def __iter__(self):
        return iter((self.stage1, self.stage2, self.frame))


def biorthogonal_csa(g: LieAlgebra, A: Element, B: Element,
                     cfg: Optional[SweepConfig] = None,
                     frame: Optional[CartanFrame] = None) -> BiorthogonalResult:
    """Two sweeps giving a rotation Q with Q(h) orthogonal to both A and B."""
    cfg = cfg or SweepConfig()
    g._check(A, B)
    if frame is None:
        frame = build_frame(g, cfg.rng_seed)

    stage1 = jacobi_sweep(g.zero(), A, frame, cfg, stage=1)
    A1 = stage1.B_out
    B1 = invert_generators(stage1.Q_generators, B)
    stage2 = jacobi_sweep(A1, B1, frame, cfg, stage=2)

    return BiorthogonalResult(
        stage1=stage1,
        stage2=stage2,
        frame=frame,
        A_out=stage2.A_out,
        B_out=stage2.B_out,
    )
