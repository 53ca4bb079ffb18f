"""
Run configuration for the command-line tool.
"""
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Optional

from .estimators import Mode, PatternKind
from .exceptions import ConfigError
from .utils import (
    VALID_LOG_LEVELS,
    get_default_list_limit,
    get_default_mode,
    get_default_output,
    get_default_samples,
    get_default_threads,
    get_log_level,
)

logger = logging.getLogger(__name__)


class Command(str, Enum):
    COUNT = "count"
    EXACT = "exact"
    LIST = "list"
    STATS = "stats"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"


@dataclass
class RunConfig:
    """Configuration for one CLI run; unset fields fall back to SHADOWCOUNT_* variables."""
    input_path: Path
    command: Command
    pattern: PatternKind
    k: int
    samples: Optional[int] = None
    seed: Optional[int] = None
    mode: Optional[Mode] = None
    output: Optional[OutputFormat] = None
    threads: Optional[int] = None
    list_limit: Optional[int] = None
    log_level: Optional[str] = None
    tracing: bool = False
    with_exact: bool = False

    def __post_init__(self) -> None:
        try:
            self.input_path = Path(self.input_path)
            self.command = Command(self.command)
            self.pattern = PatternKind(self.pattern)
            self.mode = Mode(self.mode if self.mode is not None else get_default_mode())
            self.output = OutputFormat(self.output if self.output is not None else get_default_output())
            if self.samples is None:
                self.samples = get_default_samples()
            if self.threads is None:
                self.threads = get_default_threads()
            if self.list_limit is None:
                self.list_limit = get_default_list_limit()
        except ValueError as e:
            raise ConfigError(f"Invalid run configuration: {e}") from e

        self.log_level = (self.log_level or get_log_level()).upper()
        if self.log_level not in VALID_LOG_LEVELS:
            raise ConfigError(f"Log level must be one of {', '.join(VALID_LOG_LEVELS)}, got {self.log_level}")
        if self.k < self.pattern.min_k:
            raise ConfigError(f"Pattern {self.pattern.value} needs k >= {self.pattern.min_k}, got k={self.k}")
        if self.samples < 1:
            raise ConfigError(f"samples must be >= 1, got {self.samples}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.list_limit < 1:
            raise ConfigError(f"list limit must be >= 1, got {self.list_limit}")
        if self.seed is not None and self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if self.command is Command.LIST and self.pattern is PatternKind.KCLIQUE:
            raise ConfigError("The list command needs a near-clique pattern (k1, k2t1 or k2t2)")
