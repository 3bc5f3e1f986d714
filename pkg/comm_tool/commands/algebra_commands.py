"""
CLI commands for algebras and their root decompositions.
"""
from pathlib import Path

import click
from rich.console import Console
from rich.table import Table

from ..core.exceptions import CommutatorError
from ..utils.logger import get_logger
from ..utils.serialization import dumps, write_json
from .params import ALGEBRA_SPEC

console = Console()
logger = get_logger(__name__)


def register_algebra_commands(cli):
    """Register algebra-related commands with the CLI."""

    @cli.command()
    @click.argument('spec', type=ALGEBRA_SPEC)
    @click.option('--seed', type=int, default=0, help='Seed for the random elements')
    @click.option('--out', 'out_dir', type=click.Path(file_okay=False, path_type=Path), default=Path('.'),
                  help='Directory for algebra.json, A.json and B.json')
    @click.pass_context
    def generate(ctx, spec, seed: int, out_dir: Path):
        """Write algebra metadata and two random elements.

        Example:
            comm generate su:3 --seed 7 --out run/
        """
        manager = ctx.obj['manager']
        try:
            metadata, A, B = manager.generate(spec, seed)
        except CommutatorError as e:
            console.print(f"[red]Error: {e}[/red]")
            logger.error(f"generate failed: {e}")
            ctx.exit(1)

        write_json(out_dir / 'algebra.json', metadata)
        write_json(out_dir / 'A.json', A.coords.tolist())
        write_json(out_dir / 'B.json', B.coords.tolist())

        table = Table(title=f"Algebra {metadata.algebra_spec}")
        table.add_column("Property", style="cyan")
        table.add_column("Value", style="green")
        table.add_row("Dimension", str(metadata.dim))
        table.add_row("Rank", str(metadata.rank))
        table.add_row("Positive roots", str(metadata.positive_roots))
        table.add_row("Output", str(out_dir))
        console.print(table)

    @cli.command()
    @click.argument('spec', type=ALGEBRA_SPEC)
    @click.option('--seed', type=int, default=0, help='Seed for the CSA and reference element')
    @click.option('--out', 'out_file', type=click.Path(dir_okay=False, path_type=Path), default=None,
                  help='Frame JSON file (default: stdout)')
    @click.pass_context
    def decompose(ctx, spec, seed: int, out_file: Path):
        """Write the Cartan frame: CSA basis, roots and root planes.

        Example:
            comm decompose so:6 --seed 1 --out frame.json
        """
        manager = ctx.obj['manager']
        try:
            record = manager.decompose(spec, seed)
        except CommutatorError as e:
            console.print(f"[red]Error: {e}[/red]")
            logger.error(f"decompose failed: {e}")
            ctx.exit(1)

        if out_file is None:
            click.echo(dumps(record), nl=False)
            return

        write_json(out_file, record)
        table = Table(title=f"Root decomposition of {record.algebra_spec}")
        table.add_column("Property", style="cyan")
        table.add_column("Value", style="green")
        table.add_row("Dimension", str(record.dim))
        table.add_row("Rank", str(record.rank))
        table.add_row("Positive roots", str(record.positive_roots))
        identity = f"{record.dim} = {record.rank} + 2*{record.positive_roots}"
        style = "green" if record.dimension_check else "red"
        table.add_row("Dimension check", f"[{style}]{identity}[/{style}]")
        console.print(table)
