"""Confusion-matrix probabilities and inference accuracy under the two-threshold rule.

Device rule: score > theta_h is positive, theta_l < score <= theta_h is uncertain
(offloaded), score <= theta_l is discarded. The server admits scores > theta_s.
Accuracy assumes a balanced positive/negative prior, hence the division by 2.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, fields
from typing import NamedTuple

import numpy as np

from ..confidence import ConfidenceQuad
from ..errors import ThresholdOrderError

_MASS_TOL = 1e-9


def _check_unit(name: str, value: float) -> None:
    if not (0.0 <= value <= 1.0):
        raise ThresholdOrderError(f"{name}={value} is outside [0, 1]")


def _clip_unit(value: float) -> float:
    return min(1.0, max(0.0, float(value)))


@dataclass(frozen=True)
class DeviceOutcome:
    tp: float
    fn: float
    fp: float
    tn: float
    up: float
    un: float

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not (-_MASS_TOL <= value <= 1.0 + _MASS_TOL):
                raise ValueError(f"{f.name}={value} is not a probability")
        if abs(self.tp + self.fn + self.up - 1.0) > _MASS_TOL:
            raise ValueError("positive-class mass tp + fn + up must equal 1")
        if abs(self.fp + self.tn + self.un - 1.0) > _MASS_TOL:
            raise ValueError("negative-class mass fp + tn + un must equal 1")


@dataclass(frozen=True)
class ServerOutcome:
    tp: float
    fn: float
    fp: float
    tn: float

    def __post_init__(self) -> None:
        for f in fields(self):
            value = getattr(self, f.name)
            if not (-_MASS_TOL <= value <= 1.0 + _MASS_TOL):
                raise ValueError(f"{f.name}={value} is not a probability")
        if abs(self.tp + self.fn - 1.0) > _MASS_TOL or abs(self.fp + self.tn - 1.0) > _MASS_TOL:
            raise ValueError("server outcome masses must sum to 1 per class")

    @classmethod
    def perfect(cls) -> ServerOutcome:
        return cls(tp=1.0, fn=0.0, fp=0.0, tn=1.0)


@dataclass(frozen=True, eq=False)
class ThresholdSet:
    """Per-device thresholds; arrays are copied and frozen on construction."""

    theta_l: np.ndarray
    theta_h: np.ndarray
    theta_s: np.ndarray

    def __post_init__(self) -> None:
        arrays = []
        for name in ("theta_l", "theta_h", "theta_s"):
            arr = np.array(getattr(self, name), dtype=float).ravel()
            if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
                raise ThresholdOrderError(f"{name} must lie in [0, 1], got {arr.tolist()}")
            arr.setflags(write=False)
            arrays.append(arr)
            object.__setattr__(self, name, arr)
        if len({a.size for a in arrays}) != 1 or arrays[0].size == 0:
            raise ThresholdOrderError("theta_l, theta_h and theta_s need one entry per device")
        bad = np.flatnonzero(arrays[0] > arrays[1])
        if bad.size:
            i = int(bad[0])
            raise ThresholdOrderError(
                f"device {i}: theta_l={arrays[0][i]} exceeds theta_h={arrays[1][i]}"
            )

    @classmethod
    def uniform(cls, n_devices: int, theta_l: float, theta_h: float, theta_s: float) -> ThresholdSet:
        return cls(
            np.full(n_devices, theta_l), np.full(n_devices, theta_h), np.full(n_devices, theta_s)
        )

    @property
    def n_devices(self) -> int:
        return int(self.theta_l.size)

    def device(self, i: int) -> tuple[float, float, float]:
        return float(self.theta_l[i]), float(self.theta_h[i]), float(self.theta_s[i])

    def with_device(
        self, i: int, theta_l: float, theta_h: float, theta_s: float | None = None
    ) -> ThresholdSet:
        lo, hi, srv = self.theta_l.copy(), self.theta_h.copy(), self.theta_s.copy()
        lo[i], hi[i] = theta_l, theta_h
        if theta_s is not None:
            srv[i] = theta_s
        return ThresholdSet(lo, hi, srv)

    def with_server(self, theta_s: np.ndarray) -> ThresholdSet:
        return ThresholdSet(self.theta_l, self.theta_h, theta_s)

    def as_rows(self) -> list[dict[str, float]]:
        return [
            {"device": i, "theta_l": lo, "theta_h": hi, "theta_s": srv}
            for i, (lo, hi, srv) in enumerate(
                zip(self.theta_l.tolist(), self.theta_h.tolist(), self.theta_s.tolist())
            )
        ]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ThresholdSet):
            return NotImplemented
        return (
            np.array_equal(self.theta_l, other.theta_l)
            and np.array_equal(self.theta_h, other.theta_h)
            and np.array_equal(self.theta_s, other.theta_s)
        )

    __hash__ = None  # type: ignore[assignment]


def device_outcomes(quad: ConfidenceQuad, theta_l: float, theta_h: float) -> DeviceOutcome:
    _check_unit("theta_l", theta_l)
    _check_unit("theta_h", theta_h)
    if theta_l > theta_h:
        raise ThresholdOrderError(f"theta_l={theta_l} exceeds theta_h={theta_h}")
    pos_l, pos_h = quad.dev_pos.cdf(theta_l), quad.dev_pos.cdf(theta_h)
    neg_l, neg_h = quad.dev_neg.cdf(theta_l), quad.dev_neg.cdf(theta_h)
    return DeviceOutcome(
        tp=1.0 - pos_h,
        fn=pos_l,
        fp=1.0 - neg_h,
        tn=neg_l,
        up=_clip_unit(pos_h - pos_l),
        un=_clip_unit(neg_h - neg_l),
    )


def server_outcomes(quad: ConfidenceQuad, theta_s: float) -> ServerOutcome:
    _check_unit("theta_s", theta_s)
    pos, neg = quad.srv_pos.cdf(theta_s), quad.srv_neg.cdf(theta_s)
    return ServerOutcome(tp=1.0 - pos, fn=pos, fp=1.0 - neg, tn=neg)


def accuracy_cooperative(dev: DeviceOutcome, srv: ServerOutcome) -> float:
    return (dev.tp + dev.tn + dev.up * srv.tp + dev.un * srv.tn) / 2.0


def accuracy_device_centric(dev: DeviceOutcome) -> float:
    if dev.up != 0.0 or dev.un != 0.0:
        raise ThresholdOrderError("device-centric accuracy needs theta_l == theta_h (no uncertain band)")
    return (dev.tp + dev.tn) / 2.0


def accuracy_server_centric(srv: ServerOutcome) -> float:
    return (srv.tp + srv.tn) / 2.0


def accuracy_cascade(quad: ConfidenceQuad, theta_h: float, theta_s: float) -> float:
    """Single-threshold cascade: everything at or below theta_h is offloaded (theta_l = 0)."""
    return accuracy_cooperative(device_outcomes(quad, 0.0, theta_h), server_outcomes(quad, theta_s))


def uncertain_prob(dev: DeviceOutcome) -> float:
    return (dev.up + dev.un) / 2.0


def positive_prob(dev: DeviceOutcome) -> float:
    return (dev.tp + dev.fp) / 2.0


class OutcomeTable(NamedTuple):
    """Vectorised device outcomes for arrays of (theta_l, theta_h) candidates."""

    tp: np.ndarray
    fn: np.ndarray
    fp: np.ndarray
    tn: np.ndarray
    up: np.ndarray
    un: np.ndarray

    @property
    def alpha(self) -> np.ndarray:
        return (self.up + self.un) / 2.0

    @property
    def beta(self) -> np.ndarray:
        return (self.tp + self.fp) / 2.0

    def accuracy(self, srv_tp: np.ndarray | float, srv_tn: np.ndarray | float) -> np.ndarray:
        return (self.tp + self.tn + self.up * srv_tp + self.un * srv_tn) / 2.0

    @classmethod
    def from_cdfs(
        cls, pos_l: np.ndarray, pos_h: np.ndarray, neg_l: np.ndarray, neg_h: np.ndarray
    ) -> OutcomeTable:
        """Build from device CDFs evaluated at theta_l and theta_h."""
        pos_l, pos_h = np.asarray(pos_l, dtype=float), np.asarray(pos_h, dtype=float)
        neg_l, neg_h = np.asarray(neg_l, dtype=float), np.asarray(neg_h, dtype=float)
        return cls(
            tp=1.0 - pos_h,
            fn=pos_l,
            fp=1.0 - neg_h,
            tn=neg_l,
            up=np.clip(pos_h - pos_l, 0.0, 1.0),
            un=np.clip(neg_h - neg_l, 0.0, 1.0),
        )


def outcome_table(quad: ConfidenceQuad, theta_l: np.ndarray, theta_h: np.ndarray) -> OutcomeTable:
    lo = np.asarray(theta_l, dtype=float)
    hi = np.asarray(theta_h, dtype=float)
    if np.any(lo > hi):
        raise ThresholdOrderError("every candidate needs theta_l <= theta_h")
    return OutcomeTable.from_cdfs(
        quad.dev_pos.cdf(lo), quad.dev_pos.cdf(hi), quad.dev_neg.cdf(lo), quad.dev_neg.cdf(hi)
    )


def server_table(quad: ConfidenceQuad, theta_s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(tp_s, tn_s) for an array of server thresholds."""
    values = np.asarray(theta_s, dtype=float)
    return 1.0 - quad.srv_pos.cdf(values), np.asarray(quad.srv_neg.cdf(values), dtype=float)


def per_device_accuracy(quads: Sequence[ConfidenceQuad], thresholds: ThresholdSet) -> np.ndarray:
    """Cooperative accuracy A_i for every device."""
    out = np.empty(thresholds.n_devices)
    for i, quad in enumerate(quads):
        lo, hi, srv = thresholds.device(i)
        out[i] = accuracy_cooperative(device_outcomes(quad, lo, hi), server_outcomes(quad, srv))
    return out


def offload_profile(
    quads: Sequence[ConfidenceQuad], thresholds: ThresholdSet
) -> tuple[np.ndarray, np.ndarray]:
    """Per-device (alpha, beta): probabilities of offloading an image and sending a message."""
    alpha = np.empty(thresholds.n_devices)
    beta = np.empty(thresholds.n_devices)
    for i, quad in enumerate(quads):
        lo, hi, _ = thresholds.device(i)
        dev = device_outcomes(quad, lo, hi)
        alpha[i] = uncertain_prob(dev)
        beta[i] = positive_prob(dev)
    return alpha, beta
