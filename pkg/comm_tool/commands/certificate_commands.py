"""
CLI commands for solving, tracing and verifying commutator certificates.
"""
from pathlib import Path
from typing import List, Optional

import click
from rich.console import Console
from rich.table import Table

from ..core.config import RunConfig
from ..core.exceptions import (
    AlgebraMismatch,
    CertificateInvalid,
    CommutatorError,
    InvalidSpec,
    MaxIterationsExceeded,
)
from ..core.manager import trace_lines
from ..core.records import TraceLine, VerificationReport
from ..utils.logger import get_logger
from ..utils.serialization import render_trace, write_json, write_trace
from .params import ALGEBRA_SPEC, descent_options

console = Console()
logger = get_logger(__name__)

EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_DIMENSION = 3
EXIT_MAX_ITER = 4
EXIT_INVALID_CERTIFICATE = 5


def _run_config(manager, spec, seed, tol_a, tol_b, max_iter, policy, output_path, output_format) -> RunConfig:
    """CLI flags over the environment configuration."""
    base = manager.config.solve
    return RunConfig(
        algebra_spec=spec.label,
        seed=base.rng_seed if seed is None else seed,
        tol_a=base.tol_A if tol_a is None else tol_a,
        tol_b=base.tol_B if tol_b is None else tol_b,
        max_iter=base.max_iter if max_iter is None else max_iter,
        policy=base.policy if policy is None else policy,
        output_path=output_path,
        format=output_format,
    )


def _read_pair(ctx, manager, g, a_file, b_file, mismatch_code: int):
    try:
        return manager.read_element(g, a_file), manager.read_element(g, b_file)
    except AlgebraMismatch as e:
        console.print(f"[red]Dimension mismatch: {e}[/red]")
        ctx.exit(mismatch_code)
    except (OSError, ValueError) as e:
        console.print(f"[red]Could not read element file: {e}[/red]")
        ctx.exit(EXIT_USAGE)


def _partial_lines(error: MaxIterationsExceeded, seed: Optional[int]) -> List[TraceLine]:
    return [step.to_line(i, error.stage, seed) for i, step in enumerate(error.trace or [], start=1)]


def _emit_trace(lines: List[TraceLine], path: Optional[Path], output_format: str) -> None:
    if path is None:
        click.echo(render_trace(lines, output_format), nl=False)
    else:
        write_trace(path, lines, output_format)


def _print_report(report: VerificationReport) -> None:
    table = Table(title=f"Certificate checks ({report.algebra_spec})")
    table.add_column("Check", style="cyan")
    table.add_column("Value", justify="right")
    table.add_column("Threshold", justify="right")
    table.add_column("Result")
    for check in report.checks:
        result = "[green]PASS[/green]" if check.passed else "[red]FAIL[/red]"
        table.add_row(check.name, f"{check.value:.3e}", f"{check.threshold:.3e}", result)
    console.print(table)


def register_certificate_commands(cli):
    """Register solve, trace and verify commands with the CLI."""

    @cli.command()
    @click.argument('spec', type=ALGEBRA_SPEC)
    @click.argument('a_file', type=click.Path(dir_okay=False, path_type=Path))
    @click.argument('b_file', type=click.Path(dir_okay=False, path_type=Path))
    @descent_options
    @click.option('--out', 'out_file', type=click.Path(dir_okay=False, path_type=Path),
                  default=Path('certificate.json'), help='Certificate JSON file')
    @click.option('--trace-out', type=click.Path(dir_okay=False, path_type=Path), default=None,
                  help='Trace file (default: next to the certificate)')
    @click.pass_context
    def solve(ctx, spec, a_file, b_file, seed, tol_a, tol_b, max_iter, policy,
              output_format, out_file, trace_out):
        """Find a regular X with [X, Y_A] = A and [X, Y_B] = B.

        Example:
            comm solve su:3 A.json B.json --seed 7 --out cert.json
        """
        manager = ctx.obj['manager']
        run = _run_config(manager, spec, seed, tol_a, tol_b, max_iter, policy, out_file, output_format)
        trace_out = trace_out or out_file.with_name(f"{out_file.stem}.trace.{run.format.value}")
        g = manager.algebra(spec)
        A, B = _read_pair(ctx, manager, g, a_file, b_file, EXIT_DIMENSION)

        try:
            with console.status(f"[bold blue]Solving in {spec.label}..."):
                certificate = manager.solve(run, A, B)
        except MaxIterationsExceeded as e:
            write_trace(trace_out, _partial_lines(e, run.seed), run.format)
            console.print(f"[red]{e}[/red] (partial trace in {trace_out})")
            logger.error(f"solve failed: {e}")
            ctx.exit(EXIT_MAX_ITER)
        except CertificateInvalid as e:
            if e.certificate is not None:
                write_json(out_file, e.certificate.to_record())
                if e.certificate.descent is not None:
                    write_trace(trace_out, trace_lines(e.certificate.descent, run.seed), run.format)
            console.print(f"[red]{e}[/red]")
            logger.error(f"solve failed: {e}")
            ctx.exit(EXIT_INVALID_CERTIFICATE)
        except CommutatorError as e:
            console.print(f"[red]Error: {e}[/red]")
            logger.error(f"solve failed: {e}")
            ctx.exit(1)

        write_json(out_file, certificate.to_record())
        write_trace(trace_out, trace_lines(certificate.descent, run.seed), run.format)

        report = manager.verify(g, A, B, certificate)
        _print_report(report)
        if not report.passed:
            console.print("[red]Certificate failed verification[/red]")
            ctx.exit(EXIT_INVALID_CERTIFICATE)
        console.print(f"[green]Certificate written to {out_file}, trace to {trace_out}[/green]")

    @cli.command()
    @click.argument('spec', type=ALGEBRA_SPEC)
    @click.argument('a_file', type=click.Path(dir_okay=False, path_type=Path))
    @click.argument('b_file', type=click.Path(dir_okay=False, path_type=Path))
    @descent_options
    @click.option('--out', 'out_file', type=click.Path(dir_okay=False, path_type=Path), default=None,
                  help='Trace file (default: stdout)')
    @click.pass_context
    def trace(ctx, spec, a_file, b_file, seed, tol_a, tol_b, max_iter, policy,
              output_format, out_file):
        """Run the two-stage descent and emit its trace only.

        Example:
            comm trace so:5 A.json B.json --format csv --out trace.csv
        """
        manager = ctx.obj['manager']
        run = _run_config(manager, spec, seed, tol_a, tol_b, max_iter, policy, out_file, output_format)
        g = manager.algebra(spec)
        A, B = _read_pair(ctx, manager, g, a_file, b_file, EXIT_DIMENSION)

        try:
            descent = manager.trace(run, A, B)
        except MaxIterationsExceeded as e:
            _emit_trace(_partial_lines(e, run.seed), out_file, run.format)
            logger.error(f"trace failed: {e}")
            ctx.exit(EXIT_MAX_ITER)
        except CommutatorError as e:
            console.print(f"[red]Error: {e}[/red]")
            logger.error(f"trace failed: {e}")
            ctx.exit(1)

        _emit_trace(trace_lines(descent, run.seed), out_file, run.format)
        logger.info(
            f"Descent: {len(descent.stage1.trace)} + {len(descent.stage2.trace)} steps in {spec.label}"
        )

    @cli.command()
    @click.argument('cert_file', type=click.Path(dir_okay=False, path_type=Path))
    @click.argument('a_file', type=click.Path(dir_okay=False, path_type=Path))
    @click.argument('b_file', type=click.Path(dir_okay=False, path_type=Path))
    @click.option('--tol', type=click.FloatRange(min=0, min_open=True), default=None,
                  help='Relative residual tolerance (default: COMM_VERIFY_TOL)')
    @click.pass_context
    def verify(ctx, cert_file, a_file, b_file, tol):
        """Check a certificate without any Cartan frame.

        Example:
            comm verify cert.json A.json B.json --tol 1e-8
        """
        manager = ctx.obj['manager']
        try:
            g, certificate = manager.load_certificate(cert_file)
        except (InvalidSpec, AlgebraMismatch, OSError, ValueError) as e:
            console.print(f"[red]Could not read certificate: {e}[/red]")
            ctx.exit(EXIT_USAGE)
        A, B = _read_pair(ctx, manager, g, a_file, b_file, EXIT_USAGE)

        report = manager.verify(g, A, B, certificate, tol)
        _print_report(report)
        if not report.passed:
            failed = ", ".join(c.name for c in report.checks if not c.passed)
            console.print(f"[red]Verification failed: {failed}[/red]")
            ctx.exit(EXIT_VERIFY_FAILED)
        console.print("[green]Certificate verified[/green]")
