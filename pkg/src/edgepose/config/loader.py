"""Load scenario documents (flat ``key = value`` text or YAML) into typed models."""

from __future__ import annotations

import hashlib
import logging
from pathlib import Path
from typing import Any, Literal, Optional

import yaml
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    PrivateAttr,
    ValidationError,
    field_validator,
    model_validator,
)

from ..confidence import ConfidenceQuad, model_from_spec
from ..delay import Backhaul, ComputeParams, RadioParams, TrafficParams
from ..errors import ScenarioError
from ..optimizer import OptimizerConfig
from ..sim.scenario import Scenario, draw_gains

logger = logging.getLogger(__name__)

CONFIG_DIR = Path("configs")
DEFAULT_SCENARIO_PATH = CONFIG_DIR / "scenario" / "default.yml"
YAML_SUFFIXES = {".yml", ".yaml"}


class ScenarioFile(BaseModel):
    """Every tunable of one experiment, in the units named by each key."""

    model_config = ConfigDict(extra="forbid")

    n_devices: int = Field(4, ge=2)
    fps: float = Field(2.0, gt=0)
    image_bytes: int = Field(32 * 1024, gt=0)
    message_bytes: int = Field(68, gt=0)
    t_inf_device_ms: float = Field(100.0, ge=0)
    t_inf_server_ms: float = Field(20.0, ge=0)
    t_pr_device_ms: float = Field(10.0, ge=0)
    t_pr_server_ms: float = Field(5.0, ge=0)
    t_bs_mode: Literal["fixed", "rate"] = "fixed"
    t_bs_tx_ms: float = Field(0.5, ge=0)
    backhaul_rate_bps: Optional[float] = Field(None, gt=0)
    t_sc_tx_ms: float = Field(20.0, ge=0)
    d_req_ms: float = Field(500.0, gt=0)
    bandwidth_hz: float = Field(1e6, gt=0)
    noise_dbm_hz: float = -165.0
    tx_power_dbm: float = 30.0
    gain_mean_db: float = -100.0
    gain_std_db: float = Field(0.0, ge=0)
    gains_db: Optional[list[float]] = None
    joints: int = Field(17, ge=1)
    room_x_m: float = Field(10.0, gt=0)
    room_y_m: float = Field(10.0, gt=0)
    room_z_m: float = Field(3.0, gt=0)
    occlusion_prob: float = Field(0.2, ge=0, le=1)
    noise_sigma0_px: float = Field(8.0, ge=0)
    noise_sigmamin_px: float = Field(0.5, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)
    grid_points: int = Field(101, ge=2)
    kappa1: float = Field(0.1, gt=0)
    kappa2: float = Field(0.1, gt=0)
    kappa_decay: float = Field(0.99, gt=0, le=1)
    epsilon: float = Field(1e-6, gt=0)
    max_inner_iters: int = Field(10_000, gt=0)
    max_outer_iters: int = Field(50, gt=0)
    dev_pos: str = "beta(6,2)"
    dev_neg: str = "beta(2,6)"
    srv_pos: str = "beta(12,2)"
    srv_neg: str = "beta(2,12)"

    _base_dir: Path | None = PrivateAttr(default=None)

    @field_validator("gains_db", mode="before")
    @classmethod
    def _split_gains(cls, value: Any) -> Any:
        if isinstance(value, str):
            parts = [p.strip() for p in value.split(",")]
            return [p for p in parts if p] or None
        return value

    @model_validator(mode="after")
    def _check_consistency(self) -> ScenarioFile:
        if self.gains_db is not None and len(self.gains_db) != self.n_devices:
            raise ValueError(f"gains_db lists {len(self.gains_db)} values for {self.n_devices} devices")
        if self.t_bs_mode == "rate" and self.backhaul_rate_bps is None:
            raise ValueError("t_bs_mode = rate needs backhaul_rate_bps")
        return self

    def with_base_dir(self, base_dir: Path | None) -> ScenarioFile:
        self._base_dir = base_dir
        return self

    def to_scenario(self) -> Scenario:
        quad = ConfidenceQuad(
            dev_pos=model_from_spec(self.dev_pos, self._base_dir),
            dev_neg=model_from_spec(self.dev_neg, self._base_dir),
            srv_pos=model_from_spec(self.srv_pos, self._base_dir),
            srv_neg=model_from_spec(self.srv_neg, self._base_dir),
        )
        gains = self.gains_db or draw_gains(self.gain_mean_db, self.gain_std_db, self.n_devices, self.seed)
        backhaul = Backhaul(
            mode=self.t_bs_mode,
            fixed_time_s=self.t_bs_tx_ms / 1000.0,
            rate_bps=self.backhaul_rate_bps,
        )
        return Scenario(
            n_devices=self.n_devices,
            quads=(quad,),
            traffic=TrafficParams(
                fps=self.fps,
                image_bits=self.image_bytes * 8,
                message_bits=self.message_bytes * 8,
            ),
            compute=ComputeParams(
                t_pr_device_s=self.t_pr_device_ms / 1000.0,
                t_inf_device_s=self.t_inf_device_ms / 1000.0,
                t_inf_server_s=self.t_inf_server_ms / 1000.0,
                t_pr_server_s=self.t_pr_server_ms / 1000.0,
                t_sc_tx_s=self.t_sc_tx_ms / 1000.0,
                backhaul=backhaul,
            ),
            radio=RadioParams(
                bandwidth_hz=self.bandwidth_hz,
                noise_psd_dbm_hz=self.noise_dbm_hz,
                tx_power_dbm=self.tx_power_dbm,
                channel_gains_db=tuple(gains),
            ),
            d_req_s=self.d_req_ms / 1000.0,
            joints=self.joints,
            room=(self.room_x_m, self.room_y_m, self.room_z_m),
            seed=self.seed,
            gain_mean_db=self.gain_mean_db,
            gain_std_db=self.gain_std_db,
            occlusion_prob=self.occlusion_prob,
            noise_sigma0_px=self.noise_sigma0_px,
            noise_sigmamin_px=self.noise_sigmamin_px,
        )

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            kappa1=self.kappa1,
            kappa2=self.kappa2,
            kappa_decay=self.kappa_decay,
            epsilon=self.epsilon,
            grid_points_m=self.grid_points,
            max_inner_iters=self.max_inner_iters,
            max_outer_iters=self.max_outer_iters,
        )

    def provenance(self) -> list[str]:
        """``key = value`` for every key, defaults included, in declaration order."""
        lines = []
        for key, value in self.model_dump().items():
            if value is None:
                text = ""
            elif isinstance(value, list):
                text = ",".join(repr(float(v)) for v in value)
            else:
                text = str(value)
            lines.append(f"{key} = {text}".rstrip())
        return lines

    def digest(self) -> str:
        return hashlib.sha256("\n".join(self.provenance()).encode("utf-8")).hexdigest()


def parse_flat(text: str, source: str = "<scenario>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ScenarioError(f"{source}: line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key in values:
            raise ScenarioError(f"{source}: line {lineno}: duplicate key {key!r}")
        value = value.strip()
        if value:
            values[key] = value
    return values


def _read_document(path: Path) -> dict[str, Any]:
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in YAML_SUFFIXES:
        data = yaml.safe_load(text) or {}
        if not isinstance(data, dict):
            raise ScenarioError(f"{path}: expected a mapping of scenario keys")
        return data
    return parse_flat(text, str(path))


def build_scenario_file(values: dict[str, Any], source: str = "<scenario>") -> ScenarioFile:
    try:
        return ScenarioFile(**values)
    except ValidationError as exc:
        for err in exc.errors():
            key = ".".join(str(p) for p in err["loc"])
            if err["type"] == "extra_forbidden":
                raise ScenarioError(f"{source}: unknown scenario key {key!r}") from None
        first = exc.errors()[0]
        key = ".".join(str(p) for p in first["loc"]) or "scenario"
        raise ScenarioError(f"{source}: {key}: {first['msg']}") from None


def load_scenario_file(path: str | Path | None = None) -> ScenarioFile:
    file_path = Path(path) if path is not None else DEFAULT_SCENARIO_PATH
    values = _read_document(file_path)
    scenario_file = build_scenario_file(values, str(file_path)).with_base_dir(file_path.parent)
    logger.info("Resolved scenario %s (%s)", file_path, scenario_file.digest()[:12])
    return scenario_file
