"""Sample-file ingestion and fitting of confidence models."""

from __future__ import annotations

import logging
import re
from collections.abc import Sequence
from pathlib import Path

import numpy as np

from ..errors import InvalidModelError, SampleFileError
from .models import BetaConfidence, ConfidenceModel, EmpiricalConfidence

logger = logging.getLogger(__name__)

HEADER = "confidence"
_BETA_RE = re.compile(r"^beta\(\s*([^,\s]+)\s*,\s*([^)\s]+)\s*\)$")
_FILE_RE = re.compile(r"^file\(\s*(.+?)\s*\)$")


def load_samples(path: str | Path) -> list[float]:
    """Read one score per line; an optional first line ``confidence`` is skipped."""
    file_path = Path(path)
    try:
        text = file_path.read_bytes().decode("utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise SampleFileError(f"cannot read sample file {file_path}: {exc}") from exc
    values: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if lineno == 1 and line.lower() == HEADER:
            continue
        try:
            value = float(line)
        except ValueError:
            raise SampleFileError(
                f"{file_path}: line {lineno}: cannot parse {line!r} as a number", line=lineno
            ) from None
        if not 0.0 <= value <= 1.0:
            raise SampleFileError(
                f"{file_path}: line {lineno}: value {value} is outside [0, 1]", line=lineno
            )
        values.append(value)
    logger.debug("Loaded %d samples from %s", len(values), file_path)
    return values


def fit_empirical(samples: Sequence[float] | np.ndarray) -> EmpiricalConfidence:
    arr = np.asarray(samples, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidModelError("cannot fit an empirical model to an empty sample list")
    bad = np.flatnonzero(~np.isfinite(arr) | (arr < 0.0) | (arr > 1.0))
    if bad.size:
        idx = int(bad[0])
        raise InvalidModelError(f"sample {arr[idx]!r} at index {idx} is outside [0, 1]", index=idx)
    return EmpiricalConfidence(np.sort(arr))


def fit_beta_moments(samples: Sequence[float] | np.ndarray) -> BetaConfidence:
    """Method-of-moments beta fit: common = m(1-m)/v - 1, alpha = m*common, beta = (1-m)*common."""
    arr = fit_empirical(samples).samples
    m = float(arr.mean())
    v = float(arr.var())
    if not 0.0 < v < m * (1.0 - m):
        raise InvalidModelError(
            f"moments (mean={m:.6g}, var={v:.6g}) admit no beta distribution; need 0 < var < mean(1-mean)"
        )
    common = m * (1.0 - m) / v - 1.0
    return BetaConfidence(m * common, (1.0 - m) * common)


def model_from_spec(spec: str, base_dir: str | Path | None = None) -> ConfidenceModel:
    """Parse ``beta(a,b)`` or ``file(path)``; relative paths resolve against ``base_dir``."""
    text = spec.strip()
    match = _BETA_RE.match(text)
    if match:
        try:
            alpha, beta = float(match.group(1)), float(match.group(2))
        except ValueError:
            raise InvalidModelError(f"beta parameters in {spec!r} are not numbers") from None
        return BetaConfidence(alpha, beta)
    match = _FILE_RE.match(text)
    if match:
        path = Path(match.group(1))
        if not path.is_absolute() and base_dir is not None:
            path = Path(base_dir) / path
        return fit_empirical(load_samples(path))
    raise InvalidModelError(f"unrecognised distribution {spec!r}; expected beta(a,b) or file(path)")


def describe_samples(samples: Sequence[float] | np.ndarray) -> dict[str, float | int | list[float]]:
    arr = fit_empirical(samples).samples
    return {
        "n": int(arr.size),
        "min": float(arr[0]),
        "max": float(arr[-1]),
        "mean": float(arr.mean()),
        "deciles": [float(q) for q in np.quantile(arr, np.linspace(0.1, 0.9, 9))],
    }
