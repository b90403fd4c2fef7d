"""
src/writers/dataset_writer.py

CSV / JSON artifacts. Every CSV opens with '#' provenance lines; every
number goes through format(x, '.{precision}g'), which never depends on the
locale.
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np
from loguru import logger

from src.settings import CODE_VERSION


def format_number(value: Any, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return ""
        return format(float(value), f".{precision}g")
    return str(value)


def round_for_json(value: Any, precision: int) -> Any:
    """Apply the output precision to every float inside a JSON-able structure."""
    if isinstance(value, Mapping):
        return {k: round_for_json(v, precision) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_for_json(v, precision) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, complex):
        return [round_for_json(value.real, precision), round_for_json(value.imag, precision)]
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            return None
        return float(format(float(value), f".{precision}g"))
    return value


class DatasetWriter:
    def __init__(self, precision: int = 12):
        self.precision = precision

    def provenance_lines(self, command: str, provenance: Mapping[str, Any]) -> List[str]:
        lines = [f"# code_version: {CODE_VERSION}", f"# command: {command}"]
        for key, value in provenance.items():
            lines.append(f"# {key}: {format_number(value, self.precision)}")
        return lines

    def write_csv(self, path: Path, command: str, provenance: Mapping[str, Any],
                  header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            for line in self.provenance_lines(command, provenance):
                f.write(line + "\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            count = 0
            for row in rows:
                writer.writerow([format_number(v, self.precision) for v in row])
                count += 1
        logger.info(f"Wrote {count} rows to {path}")
        return path

    def write_json(self, path: Path, command: str, config: Optional[Dict[str, Any]], result: Any) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "version": CODE_VERSION,
            "command": command,
            "config": config,
            "result": round_for_json(result, self.precision),
        }
        with open(path, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=2)
        logger.info(f"Wrote {command} report to {path}")
        return path
