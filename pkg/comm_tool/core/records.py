"""Report and wire records written by the CLI."""

from typing import List, Optional

from pydantic import BaseModel, Field


class ValidationReport(BaseModel):
    """Outcome of the structural checks on an algebra."""
    algebra_spec: str
    dim: int
    antisymmetry_residual: float
    jacobi_residual: float
    invariance_residual: float
    symmetry_residual: float
    max_killing_eigenvalue: float
    tolerance: float

    def failures(self) -> List[str]:
        failed = []
        for name in ('antisymmetry_residual', 'jacobi_residual',
                     'invariance_residual', 'symmetry_residual'):
            if getattr(self, name) > self.tolerance:
                failed.append(name)
        if not self.max_killing_eigenvalue < 0:
            failed.append('max_killing_eigenvalue')
        return failed

    @property
    def passed(self) -> bool:
        return not self.failures()


class AlgebraMetadata(BaseModel):
    """Header written by ``comm generate``."""
    algebra_spec: str
    seed: int
    dim: int
    rank: int
    positive_roots: int


class RootRecord(BaseModel):
    alpha: List[float]
    e: List[float]
    f: List[float]


class FrameRecord(BaseModel):
    """Serialized CartanFrame."""
    algebra_spec: str
    seed: Optional[int] = None
    dim: int
    rank: int
    positive_roots: int
    dimension_check: bool
    csa_basis: List[List[float]]
    h_ref: List[float]
    roots: List[RootRecord]


class TraceLine(BaseModel):
    """One Jacobi step as written to trace files."""
    stage: int
    iter: int
    root: int
    b0_before: float
    b0_after: float
    decrease: float
    seed: Optional[int] = None


class CertificateRecord(BaseModel):
    """Serialized CommutatorCertificate."""
    algebra_spec: str
    seed: Optional[int] = None
    X: List[float]
    Y_A: List[float]
    Y_B: List[float]
    residual_A: float
    residual_B: float
    regularity_margin: float
    generators: List[List[float]] = Field(default_factory=list)
    frame: Optional[FrameRecord] = None


class CheckResult(BaseModel):
    name: str
    passed: bool
    value: float
    threshold: float


class VerificationReport(BaseModel):
    """Frame-free verification of a certificate."""
    algebra_spec: str
    checks: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def check(self, name: str) -> CheckResult:
        for item in self.checks:
            if item.name == name:
                return item
        raise KeyError(name)
