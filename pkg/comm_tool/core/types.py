"""
Type definitions for comm-tool.
"""
from enum import Enum


class AlgebraKind(str, Enum):
    """Families of compact semisimple algebras that can be built."""
    SPECIAL_UNITARY = 'su'
    SPECIAL_ORTHOGONAL = 'so'
    DIRECT_SUM = 'sum'


class Policy(str, Enum):
    """Root selection policy of the Jacobi sweep."""
    MAX_DECREASE = 'max-decrease'
    FIRST = 'first'
    RANDOM = 'random'


class OutputFormat(str, Enum):
    """Trace output format."""
    JSON = 'json'
    JSONL = 'jsonl'
    CSV = 'csv'
