"""Confidence-score distributions for device and server pose models."""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import overload

import numpy as np
from scipy import special

from ..errors import InvalidModelError


class ConfidenceModel(ABC):
    """Distribution of an averaged per-joint confidence score on [0, 1].

    ``cdf`` is right-continuous: ``cdf(x) = P(C <= x)``.
    """

    @overload
    def cdf(self, x: float) -> float: ...

    @overload
    def cdf(self, x: np.ndarray) -> np.ndarray: ...

    def cdf(self, x):
        values = np.asarray(x, dtype=float)
        if np.any(values < 0.0) or np.any(values > 1.0):
            raise ValueError("cdf is defined on [0, 1]")
        out = self._cdf(values)
        return float(out) if out.ndim == 0 else out

    @abstractmethod
    def _cdf(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` scores using ``rng``; reproducible for a seeded generator."""

    @abstractmethod
    def mean(self) -> float: ...

    @abstractmethod
    def spec(self) -> str:
        """Scenario-file notation for this model."""


@dataclass(frozen=True)
class BetaConfidence(ConfidenceModel):
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        for name, value in (("alpha", self.alpha), ("beta", self.beta)):
            if not np.isfinite(value) or value <= 0:
                raise InvalidModelError(f"beta parameter {name} must be positive, got {value}")

    def _cdf(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(special.betainc(self.alpha, self.beta, x), dtype=float)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be >= 1")
        return rng.beta(self.alpha, self.beta, size=n)

    def mean(self) -> float:
        return self.alpha / (self.alpha + self.beta)

    def spec(self) -> str:
        return f"beta({self.alpha:g},{self.beta:g})"


@dataclass(frozen=True, eq=False)
class EmpiricalConfidence(ConfidenceModel):
    samples: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.samples, dtype=float)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidModelError("empirical model needs a non-empty 1-D sample list")
        bad = np.flatnonzero(~np.isfinite(arr) | (arr < 0.0) | (arr > 1.0))
        if bad.size:
            raise InvalidModelError(
                f"sample {arr[bad[0]]!r} at index {bad[0]} is outside [0, 1]", index=int(bad[0])
            )
        unsorted = np.flatnonzero(np.diff(arr) < 0)
        if unsorted.size:
            raise InvalidModelError(
                f"samples must be sorted ascending (index {unsorted[0] + 1})",
                index=int(unsorted[0] + 1),
            )
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def _cdf(self, x: np.ndarray) -> np.ndarray:
        counts = np.searchsorted(self.samples, x, side="right")
        return np.asarray(counts / self.samples.size, dtype=float)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be >= 1")
        return self.samples[rng.integers(0, self.samples.size, size=n)]

    def mean(self) -> float:
        return float(self.samples.mean())

    def spec(self) -> str:
        return f"empirical(n={self.samples.size})"

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class ConfidenceQuad:
    """Device/server x positive/negative score distributions for one device."""

    dev_pos: ConfidenceModel
    dev_neg: ConfidenceModel
    srv_pos: ConfidenceModel
    srv_neg: ConfidenceModel

    def __post_init__(self) -> None:
        for name in ("dev_pos", "dev_neg", "srv_pos", "srv_neg"):
            if not isinstance(getattr(self, name), ConfidenceModel):
                raise InvalidModelError(f"{name} is not a confidence model")

    @classmethod
    def default(cls) -> ConfidenceQuad:
        """Illustrative defaults: server scores spread further toward 0 and 1 than device scores."""
        return cls(
            dev_pos=BetaConfidence(6.0, 2.0),
            dev_neg=BetaConfidence(2.0, 6.0),
            srv_pos=BetaConfidence(12.0, 2.0),
            srv_neg=BetaConfidence(2.0, 12.0),
        )

    def members(self) -> dict[str, ConfidenceModel]:
        return {
            "dev_pos": self.dev_pos,
            "dev_neg": self.dev_neg,
            "srv_pos": self.srv_pos,
            "srv_neg": self.srv_neg,
        }
