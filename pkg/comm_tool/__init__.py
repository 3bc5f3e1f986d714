"""Commutator certificates for compact semisimple Lie algebras."""

__version__ = "0.1.0"

from loguru import logger

# Library code stays quiet until the CLI (or the caller) enables it.
logger.disable("comm_tool")
