"""Coordinator between the CLI and the services."""

from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from ..services.cartan_service import CartanFrame, build_frame
from ..services.rotation_service import BiorthogonalResult, biorthogonal_csa
from ..services.solver_service import CommutatorCertificate, solve_commutator, verify_certificate
from ..utils.logger import get_logger
from ..utils.serialization import read_coordinates, read_json
from .algebra import AlgebraSpec, Element, LieAlgebra, build_algebra
from .config import Config, RunConfig
from .exceptions import AlgebraMismatch
from .records import AlgebraMetadata, CertificateRecord, FrameRecord, TraceLine, VerificationReport

logger = get_logger(__name__)

SpecLike = Union[str, AlgebraSpec]


def trace_lines(descent: BiorthogonalResult, seed: Optional[int] = None) -> List[TraceLine]:
    """Both stages of a descent as trace records, numbered per stage and tagged with the seed."""
    lines = []
    for stage, result in ((1, descent.stage1), (2, descent.stage2)):
        lines.extend(step.to_line(i, stage, seed) for i, step in enumerate(result.trace, start=1))
    return lines


class CommutatorManager:
    """Builds algebras and frames and runs the solver for the CLI."""

    def __init__(self, config: Optional[Config] = None):
        self.config = config or Config.from_env()
        self._frames: Dict[Tuple[str, int], CartanFrame] = {}

    def algebra(self, spec: SpecLike) -> LieAlgebra:
        if isinstance(spec, str):
            spec = AlgebraSpec.parse(spec)
        return build_algebra(spec)

    def frame(self, spec: SpecLike, seed: int) -> CartanFrame:
        """Seeded Cartan frame; the solver draws its frame from the same generator state."""
        g = self.algebra(spec)
        key = (g.token, seed)
        if key not in self._frames:
            rng = np.random.default_rng(seed)
            self._frames[key] = build_frame(g, rng, self.config.solve.max_csa_tries)
        return self._frames[key]

    def read_element(self, g: LieAlgebra, path: Union[str, Path]) -> Element:
        coords = read_coordinates(path)
        if len(coords) != g.dim:
            raise AlgebraMismatch(
                f"{path} has {len(coords)} coordinates, {g.spec.label} has dimension {g.dim}"
            )
        return g.element(coords)

    def generate(self, spec: SpecLike, seed: int = 0) -> Tuple[AlgebraMetadata, Element, Element]:
        """Algebra metadata and two seeded random elements A, B."""
        g = self.algebra(spec)
        rng = np.random.default_rng(seed)
        A = g.random_element(rng)
        B = g.random_element(rng)
        metadata = AlgebraMetadata(
            algebra_spec=g.spec.label,
            seed=seed,
            dim=g.dim,
            rank=g.rank,
            positive_roots=(g.dim - g.rank) // 2,
        )
        logger.info(f"Generated {g.spec.label} elements with seed {seed}")
        return metadata, A, B

    def decompose(self, spec: SpecLike, seed: int = 0) -> FrameRecord:
        frame = self.frame(spec, seed)
        return frame.to_record(seed)

    def _solve_config(self, run: RunConfig):
        return run.solve_config(self.config.solve)

    def trace(self, run: RunConfig, A: Element, B: Element) -> BiorthogonalResult:
        """The two-stage descent without building a certificate."""
        g = self.algebra(run.algebra_spec)
        g._check(A, B)
        cfg = self._solve_config(run)
        return biorthogonal_csa(g, A, B, cfg.sweep(), self.frame(g.spec, run.seed))

    def solve(self, run: RunConfig, A: Element, B: Element) -> CommutatorCertificate:
        g = self.algebra(run.algebra_spec)
        g._check(A, B)
        return solve_commutator(g, A, B, self._solve_config(run))

    def load_certificate(self, path: Union[str, Path]) -> Tuple[LieAlgebra, CommutatorCertificate]:
        record = CertificateRecord.model_validate(read_json(path))
        g = self.algebra(record.algebra_spec)
        for name in ('X', 'Y_A', 'Y_B'):
            if len(getattr(record, name)) != g.dim:
                raise AlgebraMismatch(f"Certificate field {name} does not match dimension {g.dim}")
        return g, CommutatorCertificate.from_record(g, record)

    def verify(self, g: LieAlgebra, A: Element, B: Element,
               certificate: CommutatorCertificate, tol: Optional[float] = None) -> VerificationReport:
        tol = self.config.solve.verify_tol if tol is None else tol
        return verify_certificate(g, A, B, certificate, tol, self.config.solve.regular_delta)
