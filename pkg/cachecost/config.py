"""
Configuration management for cachecost.

Loads settings from environment variables or .env file.
"""

import os
from pathlib import Path

from cachecost.errors import ConfigError


def _load_env_file():
    """Load .env file if it exists."""
    env_path = Path(__file__).parent.parent / ".env"
    if env_path.exists():
        with open(env_path, 'r') as f:
            for line in f:
                line = line.strip()
                if line and not line.startswith('#') and '=' in line:
                    key, value = line.split('=', 1)
                    key = key.strip()
                    value = value.strip().strip('"').strip("'")
                    if key not in os.environ:  # Don't override existing env vars
                        os.environ[key] = value


# Load .env file on module import
_load_env_file()


class Config:
    """Configuration settings for cachecost."""

    # Numerical tolerances
    TOLERANCE: float = float(os.getenv("CACHECOST_TOLERANCE", "1e-9"))
    SUM_TOLERANCE: float = float(os.getenv("CACHECOST_SUM_TOLERANCE", "1e-12"))

    # Exact combinatorics ceiling
    MAX_BINOM_N: int = int(os.getenv("CACHECOST_MAX_BINOM_N", "64"))

    # Simulation defaults
    FILE_LENGTH_PER_USER: int = int(os.getenv("CACHECOST_FILE_LENGTH_PER_USER", "2520"))
    DEFAULT_SEED: int = int(os.getenv("CACHECOST_SEED", "0"))

    # Output settings
    OUTPUT_DIR: str = os.getenv("CACHECOST_OUTPUT_DIR", "results")
    CSV_DIGITS: int = int(os.getenv("CACHECOST_CSV_DIGITS", "12"))

    LOG_LEVEL: str = os.getenv("CACHECOST_LOG_LEVEL", "INFO")

    @classmethod
    def default_file_length(cls, users: int) -> int:
        """Default simulated file length F (highly divisible multiple of K)."""
        return cls.FILE_LENGTH_PER_USER * users

    @classmethod
    def output_path(cls, name: str) -> Path:
        """Resolve a file name inside the output directory; names that escape it are rejected."""
        root = Path(cls.OUTPUT_DIR).resolve()
        path = (root / name).resolve()
        if not path.is_relative_to(root):
            raise ConfigError(f"output {name!r} is outside the output directory {cls.OUTPUT_DIR}")
        return path


# Singleton instance
config = Config()
