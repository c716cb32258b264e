"""End-to-end delay model: uplink TDMA, backhaul, server re-inference."""

from .model import (
    constant_delay_s,
    delay_cascade,
    delay_cooperative,
    delay_device_centric,
    delay_server_centric,
    device_terms,
    offered_load,
    shannon_rate,
    transfer_time,
    uplink_rates,
)
from .params import (
    Backhaul,
    ComputeParams,
    DelayBreakdown,
    RadioParams,
    TimeAllocation,
    TrafficParams,
    db_to_linear,
    dbm_to_watts,
    inference_time,
)

__all__ = [
    "Backhaul",
    "ComputeParams",
    "DelayBreakdown",
    "RadioParams",
    "TimeAllocation",
    "TrafficParams",
    "constant_delay_s",
    "db_to_linear",
    "dbm_to_watts",
    "delay_cascade",
    "delay_cooperative",
    "delay_device_centric",
    "delay_server_centric",
    "device_terms",
    "inference_time",
    "offered_load",
    "shannon_rate",
    "transfer_time",
    "uplink_rates",
]
