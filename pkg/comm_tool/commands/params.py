"""Shared click parameter types and options."""

import click

from ..core.algebra import AlgebraSpec
from ..core.exceptions import InvalidSpec
from ..core.types import OutputFormat, Policy


class AlgebraSpecType(click.ParamType):
    """``su:N``, ``so:N`` or ``sum:<spec>+<spec>``."""
    name = 'spec'

    def convert(self, value, param, ctx):
        if isinstance(value, AlgebraSpec):
            return value
        try:
            return AlgebraSpec.parse(value)
        except InvalidSpec as e:
            self.fail(str(e), param, ctx)


ALGEBRA_SPEC = AlgebraSpecType()


def descent_options(func):
    """Options shared by the commands that run the descent."""
    options = [
        click.option('--seed', type=int, default=None, help='Random seed (default: COMM_SEED or 0)'),
        click.option('--tol-a', type=click.FloatRange(min=0, min_open=True), default=None,
                     help='Orthogonality tolerance for A'),
        click.option('--tol-b', type=click.FloatRange(min=0, min_open=True), default=None,
                     help='Stopping tolerance for the CSA projection of B'),
        click.option('--max-iter', type=click.IntRange(min=1), default=None,
                     help='Maximum Jacobi steps per stage'),
        click.option('--policy', type=click.Choice([p.value for p in Policy]), default=None,
                     help='Root selection policy'),
        click.option('--format', 'output_format', type=click.Choice([f.value for f in OutputFormat]),
                     default=OutputFormat.JSONL.value, help='Trace format'),
    ]
    for option in reversed(options):
        func = option(func)
    return func
