"""
CLI module for comm-tool.
"""
import click
from rich.console import Console

from . import __version__
from .commands.algebra_commands import register_algebra_commands
from .commands.certificate_commands import register_certificate_commands
from .core.config import Config
from .core.exceptions import ConfigError
from .core.manager import CommutatorManager
from .utils.logger import setup_logger

console = Console()


def create_cli():
    """Create the CLI application."""

    @click.group()
    @click.version_option(__version__, prog_name='comm')
    @click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR']),
                  default=None, help='Override COMM_LOG_LEVEL')
    @click.pass_context
    def cli(ctx, log_level):
        """Commutator certificates in compact semisimple Lie algebras."""
        ctx.ensure_object(dict)

        try:
            config = Config.from_env()
        except ConfigError as e:
            console.print(f"[red]Configuration error: {e}[/red]")
            ctx.exit(2)

        setup_logger(log_level or config.logging.level, config.logging.log_dir)
        ctx.obj['manager'] = CommutatorManager(config)

    register_algebra_commands(cli)
    register_certificate_commands(cli)

    return cli


cli = create_cli()

if __name__ == "__main__":
    cli()
