# Global imports
import csv
import hashlib
import json
import logging
import math
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from phonon_diffusion import __version__

MANIFEST_NAME = "manifest.json"


class DegenerateFitError(RuntimeError):
    """A log-log fit was requested on fewer than three usable points."""


def set_logger(log_file: str, log_level: int) -> None:

    root_log = logging.getLogger()
    root_log.setLevel(log_level)

    if log_file:
        file_handler = logging.FileHandler(
            filename=log_file, mode="w", encoding="utf-8"
        )
        file_handler.setLevel(log_level)
        file_handler.setFormatter(
            logging.Formatter(
                fmt="[{asctime}][{levelname}][{funcName}] {message}", style="{"
            )
        )
        root_log.addHandler(file_handler)

    stream_handler = logging.StreamHandler()
    stream_handler.setLevel(log_level)
    stream_handler.setFormatter(
        logging.Formatter(fmt="[{levelname}] {message}", style="{")
    )
    root_log.addHandler(stream_handler)


def fit_loglog(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float]:
    """Least-squares slope of log|y| against log x, and the rms residual."""
    pairs = [(x, abs(y)) for x, y in zip(xs, ys) if x > 0.0 and abs(y) > 0.0]
    if len(pairs) < 3:
        raise DegenerateFitError(
            f"need at least 3 positive points for a log-log fit, got {len(pairs)}"
        )
    logs = np.log(np.array(pairs))
    coeffs, residuals, *_ = np.polyfit(logs[:, 0], logs[:, 1], 1, full=True)
    rms = math.sqrt(float(residuals[0]) / len(pairs)) if len(residuals) else 0.0
    return float(coeffs[0]), rms


# ---------------- OUTPUT FILES ----------------
def format_float(value: float) -> str:
    return f"{value:.17g}"


def _cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    return str(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """UTF-8 CSV with LF line endings and 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, mode="w", encoding="utf-8", newline="") as csv_file:
        writer = csv.writer(csv_file, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    logging.info(f"Wrote {path}")
    return path


def sha256_of(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, mode="rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    out_dir: Path, outputs: List[Path], inputs: Dict[str, object]
) -> Path:
    """manifest.json beside the outputs; the only file carrying a timestamp."""
    out_dir = Path(out_dir)
    manifest_path = out_dir / MANIFEST_NAME
    entries = {}
    if manifest_path.is_file():
        with open(manifest_path, encoding="utf-8") as handle:
            entries = json.load(handle).get("files", {})
    for path in outputs:
        entries[os.path.relpath(path, out_dir)] = {"sha256": sha256_of(path)}
    manifest = {
        "version": __version__,
        "created_at": datetime.now(timezone.utc).isoformat(),
        "inputs": inputs,
        "files": dict(sorted(entries.items())),
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(manifest_path, mode="w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True, default=str)
        handle.write("\n")
    return manifest_path
