"""Top-level engine that runs one subcommand against a validated configuration."""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from rinzelkit.config import Config
from rinzelkit.errors import ConfigError

logger = logging.getLogger(__name__)


@dataclass
class RunContext:
    """Everything a subcommand needs: configuration, output directory and CLI switches."""

    config: Config
    out_dir: Path
    jobs: Optional[int] = None
    options: Dict[str, Any] = field(default_factory=dict)

    def output(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name


CommandFn = Callable[[RunContext], Dict[str, Any]]


class Engine:
    """Dispatches subcommands; every command returns a summary dict."""

    def __init__(self, config: Config, out_dir: Path, jobs: Optional[int] = None):
        self.config = config
        self.out_dir = Path(out_dir)
        self.jobs = jobs

    def run(self, command: str, **options: Any) -> Dict[str, Any]:
        """Execute ``command``.

        Args:
            command: Subcommand name as given on the command line.
            **options: Command switches (``optimize_eps1``, ``crosscheck``).

        Returns:
            The summary written by the command.
        """
        from rinzelkit.commands import COMMANDS

        handler = COMMANDS.get(command)
        if handler is None:
            raise ConfigError(f"Unknown command {command!r} (expected one of: {', '.join(COMMANDS)})")
        ctx = RunContext(config=self.config, out_dir=self.out_dir, jobs=self.jobs, options=options)
        logger.info("Starting %s (output in %s)", command, self.out_dir)
        started = time.perf_counter()
        summary = handler(ctx)
        logger.info("Finished %s in %.2f s", command, time.perf_counter() - started)
        return summary
