"""Experiment parameterisation with the reference deployment as defaults."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any

import numpy as np

from ..confidence import ConfidenceQuad
from ..delay import ComputeParams, RadioParams, TrafficParams
from ..errors import ScenarioError

DEFAULT_N_DEVICES = 4
DEFAULT_D_REQ_S = 0.5
DEFAULT_JOINTS = 17
DEFAULT_ROOM_M = (10.0, 10.0, 3.0)
DEFAULT_BANDWIDTH_HZ = 1e6
DEFAULT_NOISE_DBM_HZ = -165.0
DEFAULT_TX_POWER_DBM = 30.0
DEFAULT_GAIN_MEAN_DB = -100.0


def draw_gains(mean_db: float, std_db: float, n_devices: int, seed: int) -> tuple[float, ...]:
    """Per-device channel gains ~ N(mean, std) in dB; a zero spread gives identical gains."""
    if std_db < 0:
        raise ScenarioError("gain_std_db must be >= 0")
    if std_db == 0:
        return (float(mean_db),) * n_devices
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0x6A1,)))
    return tuple(float(g) for g in rng.normal(mean_db, std_db, size=n_devices))


@dataclass(frozen=True)
class Scenario:
    n_devices: int
    quads: tuple[ConfidenceQuad, ...]
    traffic: TrafficParams
    compute: ComputeParams
    radio: RadioParams
    d_req_s: float = DEFAULT_D_REQ_S
    joints: int = DEFAULT_JOINTS
    room: tuple[float, float, float] = DEFAULT_ROOM_M
    seed: int = 0
    gain_mean_db: float = DEFAULT_GAIN_MEAN_DB
    gain_std_db: float = 0.0
    occlusion_prob: float = 0.2
    noise_sigma0_px: float = 8.0
    noise_sigmamin_px: float = 0.5

    def __post_init__(self) -> None:
        if self.n_devices < 2:
            raise ScenarioError(f"n_devices must be >= 2 for triangulation, got {self.n_devices}")
        quads = tuple(self.quads)
        if len(quads) == 1:
            quads = quads * self.n_devices
        if len(quads) != self.n_devices:
            raise ScenarioError(f"expected 1 or {self.n_devices} confidence quads, got {len(quads)}")
        object.__setattr__(self, "quads", quads)
        object.__setattr__(self, "room", tuple(float(x) for x in self.room))
        if self.radio.n_devices != self.n_devices:
            raise ScenarioError(
                f"{self.radio.n_devices} channel gains given for {self.n_devices} devices"
            )
        if len(self.room) != 3 or any(not x > 0 for x in self.room):
            raise ScenarioError(f"room extents must be three positive lengths, got {self.room}")
        if not (self.d_req_s > 0):
            raise ScenarioError("d_req_s must be positive")
        if self.joints < 1:
            raise ScenarioError("joints must be >= 1")
        if not 0.0 <= self.occlusion_prob <= 1.0:
            raise ScenarioError("occlusion_prob must lie in [0, 1]")
        if self.noise_sigma0_px < 0 or self.noise_sigmamin_px < 0:
            raise ScenarioError("noise parameters must be >= 0")
        if not 0 <= self.seed < 2**64:
            raise ScenarioError("seed must be a 64-bit unsigned integer")

    @classmethod
    def default(cls, n_devices: int = DEFAULT_N_DEVICES, **overrides: Any) -> Scenario:
        gain_mean = overrides.pop("gain_mean_db", DEFAULT_GAIN_MEAN_DB)
        gain_std = overrides.pop("gain_std_db", 0.0)
        seed = overrides.get("seed", 0)
        radio = overrides.pop(
            "radio",
            RadioParams(
                bandwidth_hz=DEFAULT_BANDWIDTH_HZ,
                noise_psd_dbm_hz=DEFAULT_NOISE_DBM_HZ,
                tx_power_dbm=DEFAULT_TX_POWER_DBM,
                channel_gains_db=draw_gains(gain_mean, gain_std, n_devices, seed),
            ),
        )
        params: dict[str, Any] = {
            "n_devices": n_devices,
            "quads": (ConfidenceQuad.default(),),
            "traffic": TrafficParams(),
            "compute": ComputeParams(),
            "radio": radio,
            "gain_mean_db": gain_mean,
            "gain_std_db": gain_std,
        }
        params.update(overrides)
        return cls(**params)

    def quad(self, i: int) -> ConfidenceQuad:
        return self.quads[i]

    def with_devices(self, n_devices: int) -> Scenario:
        gains = draw_gains(self.gain_mean_db, self.gain_std_db, n_devices, self.seed)
        return replace(
            self,
            n_devices=n_devices,
            quads=self.quads[:1],
            radio=self.radio.with_gains(gains),
        )

    def with_gain_mean(self, gain_mean_db: float) -> Scenario:
        gains = draw_gains(gain_mean_db, self.gain_std_db, self.n_devices, self.seed)
        return replace(self, gain_mean_db=gain_mean_db, radio=self.radio.with_gains(gains))

    def with_d_req(self, d_req_s: float) -> Scenario:
        return replace(self, d_req_s=d_req_s)

    def with_image_bytes(self, image_bytes: float) -> Scenario:
        return replace(self, traffic=replace(self.traffic, image_bits=int(round(image_bytes * 8))))

    def with_t_inf_device(self, seconds: float) -> Scenario:
        return replace(self, compute=replace(self.compute, t_inf_device_s=seconds))

    def room_center(self) -> np.ndarray:
        return np.array(self.room) / 2.0

    def describe(self) -> dict[str, Any]:
        return {
            "n_devices": self.n_devices,
            "d_req_s": self.d_req_s,
            "fps": self.traffic.fps,
            "image_bits": self.traffic.image_bits,
            "message_bits": self.traffic.message_bits,
            "gains_db": list(self.radio.channel_gains_db),
            "rates_bps": [float(r) for r in self.radio.spectral_rates()],
            "seed": self.seed,
        }
