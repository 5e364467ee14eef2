"""Subcommand implementations, one module per command."""

from rinzelkit.commands import certify, first_integral, kernel, picard, replicate, scan, simulate
from rinzelkit.commands.engine import CommandFn, Engine, RunContext

COMMANDS: dict[str, CommandFn] = {
    "simulate": simulate.run,
    "certify": certify.run,
    "scan": scan.run,
    "first-integral": first_integral.run,
    "replicate": replicate.run,
    "kernel": kernel.run,
    "picard": picard.run,
}

__all__ = ["COMMANDS", "Engine", "RunContext"]
