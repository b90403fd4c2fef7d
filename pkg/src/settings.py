"""
src/settings.py

Process-level settings. Values come from the environment, with a .env file
in the project root taking part the same way it does for every other entry
point of this project.
"""

import os
from dataclasses import dataclass
from pathlib import Path
from loguru import logger
from dotenv import load_dotenv

CODE_VERSION = "0.1.0"

# Explicitly find the .env file in the project root (1 level up from this file)
current_dir = Path(__file__).resolve().parent
project_root = current_dir.parent
env_path = project_root / ".env"

if env_path.exists():
    load_dotenv(dotenv_path=env_path)
else:
    # Fallback: try loading from current working directory
    load_dotenv()


@dataclass(frozen=True)
class Settings:
    log_level: str
    output_dir: Path
    workers: int


def _read_workers(raw: str) -> int:
    try:
        workers = int(raw)
    except ValueError:
        logger.warning(f"MAGSQ_WORKERS={raw!r} is not an integer, using 1")
        return 1
    return max(1, workers)


def get_settings() -> Settings:
    output_dir = Path(os.getenv("MAGSQ_OUTPUT_DIR", "data/results"))
    if not output_dir.is_absolute():
        output_dir = project_root / output_dir
    return Settings(
        log_level=os.getenv("MAGSQ_LOG_LEVEL", "INFO").upper(),
        output_dir=output_dir,
        workers=_read_workers(os.getenv("MAGSQ_WORKERS", "1")),
    )
