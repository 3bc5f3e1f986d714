"""Configuration management."""

import os
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .exceptions import ConfigError
from .types import OutputFormat, Policy

load_dotenv()


class Tolerances(BaseModel):
    """Tolerance of the structural algebra checks."""
    model_config = ConfigDict(frozen=True)

    structural: float = Field(1e-10, gt=0)  # Jacobi, antisymmetry, invariance


class SweepConfig(BaseModel):
    """Jacobi sweep configuration."""
    model_config = ConfigDict(frozen=True)

    tol_A: float = Field(1e-7, gt=0)
    tol_B: float = Field(1e-8, gt=0)
    max_iter: int = Field(500, ge=1)
    policy: Policy = Policy.MAX_DECREASE
    rng_seed: int = 0


class SolveConfig(SweepConfig):
    """End-to-end solver configuration."""

    regular_delta: float = Field(1e-6, gt=0, lt=1)
    verify_tol: float = Field(1e-8, gt=0)
    max_csa_tries: int = Field(20, ge=1)
    max_regular_tries: int = Field(20, ge=1)

    def sweep(self) -> SweepConfig:
        """Return the sweep part of this configuration."""
        return SweepConfig(
            tol_A=self.tol_A,
            tol_B=self.tol_B,
            max_iter=self.max_iter,
            policy=self.policy,
            rng_seed=self.rng_seed,
        )


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = "INFO"
    log_dir: Optional[Path] = None


class RunConfig(BaseModel):
    """Configuration of a single CLI run."""
    algebra_spec: str
    seed: int = 0
    tol_a: float = Field(1e-7, gt=0)
    tol_b: float = Field(1e-8, gt=0)
    max_iter: int = Field(500, ge=1)
    policy: Policy = Policy.MAX_DECREASE
    output_path: Optional[Path] = None
    format: OutputFormat = OutputFormat.JSONL

    def solve_config(self, base: Optional[SolveConfig] = None) -> SolveConfig:
        """Merge the run flags into a solver configuration."""
        base = base or SolveConfig()
        return base.model_copy(update={
            'tol_A': self.tol_a,
            'tol_B': self.tol_b,
            'max_iter': self.max_iter,
            'policy': self.policy,
            'rng_seed': self.seed,
        })


class Config(BaseModel):
    """Application configuration."""
    solve: SolveConfig = SolveConfig()
    logging: LoggingConfig = LoggingConfig()

    @classmethod
    def from_env(cls) -> "Config":
        """Create configuration from environment variables."""
        try:
            log_dir = os.getenv("COMM_LOG_DIR")
            return cls(
                solve=SolveConfig(
                    tol_A=float(os.getenv("COMM_TOL_A", "1e-7")),
                    tol_B=float(os.getenv("COMM_TOL_B", "1e-8")),
                    max_iter=int(os.getenv("COMM_MAX_ITER", "500")),
                    policy=Policy(os.getenv("COMM_POLICY", Policy.MAX_DECREASE.value)),
                    rng_seed=int(os.getenv("COMM_SEED", "0")),
                    regular_delta=float(os.getenv("COMM_REGULAR_DELTA", "1e-6")),
                    verify_tol=float(os.getenv("COMM_VERIFY_TOL", "1e-8")),
                ),
                logging=LoggingConfig(
                    level=os.getenv("COMM_LOG_LEVEL", "INFO"),
                    log_dir=Path(log_dir) if log_dir else None,
                ),
            )
        except (ValidationError, ValueError) as e:
            raise ConfigError(f"Invalid environment configuration: {e}") from e
