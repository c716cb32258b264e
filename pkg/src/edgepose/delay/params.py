"""Parameter bundles for the end-to-end delay model.

Times are seconds and sizes are bits everywhere. Radio quantities are stored
in dB/dBm as configured and linearised only in ``RadioParams.snr``.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass, field, fields
from typing import Literal

import numpy as np

from ..errors import AllocationError


def db_to_linear(value_db: float | np.ndarray) -> float | np.ndarray:
    return np.power(10.0, np.asarray(value_db, dtype=float) / 10.0)


def dbm_to_watts(value_dbm: float) -> float:
    return float(db_to_linear(value_dbm - 30.0))


def inference_time(flops: float, cycles_per_flop: float, frequency_hz: float) -> float:
    """Compute time of one inference: FLOPs x cycles-per-FLOP / clock frequency."""
    if flops < 0 or cycles_per_flop <= 0 or frequency_hz <= 0:
        raise ValueError("flops must be >= 0; cycles_per_flop and frequency_hz must be positive")
    return flops * cycles_per_flop / frequency_hz


@dataclass(frozen=True)
class RadioParams:
    bandwidth_hz: float
    noise_psd_dbm_hz: float
    tx_power_dbm: float
    channel_gains_db: tuple[float, ...]

    def __post_init__(self) -> None:
        gains = tuple(float(g) for g in self.channel_gains_db)
        object.__setattr__(self, "channel_gains_db", gains)
        if not self.bandwidth_hz > 0:
            raise ValueError("bandwidth_hz must be positive")
        if not gains:
            raise ValueError("channel_gains_db needs one entry per device")
        if not all(math.isfinite(g) for g in gains):
            raise ValueError("channel gains must be finite dB values")
        if not (math.isfinite(self.noise_psd_dbm_hz) and math.isfinite(self.tx_power_dbm)):
            raise ValueError("noise PSD and transmit power must be finite")

    @classmethod
    def from_linear(
        cls,
        bandwidth_hz: float,
        noise_psd_w_hz: float,
        tx_power_w: float,
        channel_gains: Sequence[float],
    ) -> RadioParams:
        if noise_psd_w_hz <= 0 or tx_power_w <= 0 or any(g <= 0 for g in channel_gains):
            raise ValueError("linear noise PSD, power and gains must be positive")
        return cls(
            bandwidth_hz=bandwidth_hz,
            noise_psd_dbm_hz=10.0 * math.log10(noise_psd_w_hz) + 30.0,
            tx_power_dbm=10.0 * math.log10(tx_power_w) + 30.0,
            channel_gains_db=tuple(10.0 * math.log10(g) for g in channel_gains),
        )

    @property
    def n_devices(self) -> int:
        return len(self.channel_gains_db)

    def snr(self) -> np.ndarray:
        """Per-device P g_i / (N0 W), linear."""
        gains = np.asarray(db_to_linear(np.array(self.channel_gains_db)), dtype=float)
        noise_w = dbm_to_watts(self.noise_psd_dbm_hz) * self.bandwidth_hz
        return dbm_to_watts(self.tx_power_dbm) * gains / noise_w

    def spectral_rates(self) -> np.ndarray:
        """Full-frame Shannon rate W log2(1 + SNR_i) in bit/s, before TDMA sharing."""
        return self.bandwidth_hz * np.log2(1.0 + self.snr())

    def with_gains(self, gains_db: Sequence[float]) -> RadioParams:
        return RadioParams(self.bandwidth_hz, self.noise_psd_dbm_hz, self.tx_power_dbm, tuple(gains_db))


@dataclass(frozen=True)
class Backhaul:
    """BS-to-server hop: a constant per-frame time, or traffic over a link rate."""

    mode: Literal["fixed", "rate"] = "fixed"
    fixed_time_s: float = 0.0005
    rate_bps: float | None = None

    def __post_init__(self) -> None:
        if self.mode == "fixed":
            if self.fixed_time_s < 0:
                raise ValueError("fixed backhaul time must be >= 0")
        elif self.mode == "rate":
            if self.rate_bps is None or not self.rate_bps > 0:
                raise ValueError("rate backhaul mode needs a positive rate_bps")
        else:
            raise ValueError(f"unknown backhaul mode {self.mode!r}")


@dataclass(frozen=True)
class ComputeParams:
    """Processing, inference and server-to-client times.

    ``t_sc_tx_s`` is the result size over the server-to-client rate, collapsed
    to a constant since neither appears separately.
    """

    t_pr_device_s: float = 0.010
    t_inf_device_s: float = 0.100
    t_inf_server_s: float = 0.020
    t_pr_server_s: float = 0.005
    t_sc_tx_s: float = 0.020
    backhaul: Backhaul = field(default_factory=Backhaul)

    def __post_init__(self) -> None:
        for f in fields(self):
            if f.name == "backhaul":
                continue
            value = getattr(self, f.name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{f.name} must be a non-negative time, got {value}")

    @classmethod
    def from_flops(
        cls,
        device_flops: float,
        device_cycles_per_flop: float,
        device_frequency_hz: float,
        server_flops: float,
        server_cycles_per_flop: float,
        server_frequency_hz: float,
        **times: float | Backhaul,
    ) -> ComputeParams:
        return cls(
            t_inf_device_s=inference_time(device_flops, device_cycles_per_flop, device_frequency_hz),
            t_inf_server_s=inference_time(server_flops, server_cycles_per_flop, server_frequency_hz),
            **times,  # type: ignore[arg-type]
        )


@dataclass(frozen=True)
class TrafficParams:
    fps: float = 2.0
    image_bits: int = 32 * 1024 * 8
    message_bits: int = 68 * 8

    def __post_init__(self) -> None:
        if not self.fps > 0 or self.image_bits <= 0 or self.message_bits <= 0:
            raise ValueError("fps, image_bits and message_bits must be positive")


@dataclass(frozen=True, eq=False)
class TimeAllocation:
    """TDMA shares of the uplink frame, one per device."""

    tau: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.tau, dtype=float).ravel()
        if arr.size == 0:
            raise AllocationError("time allocation needs at least one device")
        if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
            raise AllocationError(f"every tau_i must lie in [0, 1], got {arr.tolist()}")
        if math.fsum(arr.tolist()) > 1.0 + 1e-9:
            raise AllocationError(f"sum(tau) = {arr.sum():.12g} exceeds 1")
        arr.setflags(write=False)
        object.__setattr__(self, "tau", arr)

    @classmethod
    def uniform(cls, n_devices: int) -> TimeAllocation:
        return cls(np.full(n_devices, 1.0 / n_devices))

    @property
    def n_devices(self) -> int:
        return int(self.tau.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TimeAllocation):
            return NotImplemented
        return np.array_equal(self.tau, other.tau)

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class DelayBreakdown:
    t_device_proc: float
    t_device_inf: float
    t_db_tx: float
    t_bs_tx: float
    t_server_inf: float
    t_server_proc: float
    t_sc_tx: float
    total: float = field(init=False)

    def __post_init__(self) -> None:
        parts = self.components()
        if any(p < 0 or math.isnan(p) for p in parts.values()):
            raise ValueError(f"delay components must be non-negative: {parts}")
        total = math.inf if any(math.isinf(p) for p in parts.values()) else math.fsum(parts.values())
        object.__setattr__(self, "total", total)

    def components(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "total"}

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.total)

    def as_dict(self) -> dict[str, float]:
        return {**self.components(), "total": self.total}
