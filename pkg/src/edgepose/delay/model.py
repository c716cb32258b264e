"""Average end-to-end delay of cooperative inference and its special cases."""

from __future__ import annotations

import math

import numpy as np

from .params import ComputeParams, DelayBreakdown, RadioParams, TimeAllocation, TrafficParams


def shannon_rate(tau_i: float, radio: RadioParams, device_index: int) -> float:
    """tau_i W log2(1 + P g_i / (N0 W)); zero share gives zero rate."""
    if not 0.0 <= tau_i <= 1.0:
        raise ValueError(f"tau_i={tau_i} is outside [0, 1]")
    return float(tau_i * radio.spectral_rates()[device_index])


def uplink_rates(radio: RadioParams, tau: TimeAllocation) -> np.ndarray:
    _check_devices(radio.n_devices, tau.n_devices)
    return tau.tau * radio.spectral_rates()


def offered_load(traffic: TrafficParams, alpha: np.ndarray, beta: np.ndarray) -> np.ndarray:
    """f (alpha S_g + beta S_m): bits each device pushes per second."""
    return traffic.fps * (np.asarray(alpha) * traffic.image_bits + np.asarray(beta) * traffic.message_bits)


def transfer_time(load: np.ndarray, rate: np.ndarray | float) -> np.ndarray:
    """load / rate with 0/0 = 0 and positive load over a zero rate = inf."""
    load, rate = np.broadcast_arrays(np.asarray(load, dtype=float), np.asarray(rate, dtype=float))
    out = np.zeros(load.shape)
    busy = load > 0
    starved = busy & (rate <= 0)
    ok = busy & ~starved
    out[ok] = load[ok] / rate[ok]
    out[starved] = math.inf
    return out


def device_terms(
    traffic: TrafficParams,
    compute: ComputeParams,
    uplink_rate: np.ndarray | float,
    alpha: np.ndarray,
    beta: np.ndarray,
) -> np.ndarray:
    """Delay contributed by one device's traffic: uplink, rate-mode backhaul and server inference.

    Broadcasts over candidate (alpha, beta) arrays; the fixed backhaul constant is not included.
    """
    load = offered_load(traffic, alpha, beta)
    out = transfer_time(load, uplink_rate) + np.asarray(alpha) * compute.t_inf_server_s
    if compute.backhaul.mode == "rate":
        out = out + load / compute.backhaul.rate_bps
    return out


def delay_cooperative(
    traffic: TrafficParams,
    compute: ComputeParams,
    radio: RadioParams,
    alpha: np.ndarray,
    beta: np.ndarray,
    tau: TimeAllocation,
    *,
    include_device_inference: bool = True,
) -> DelayBreakdown:
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    _check_devices(radio.n_devices, alpha.size, beta.size, tau.n_devices)
    if np.any((alpha < 0) | (alpha > 1)) or np.any((beta < 0) | (beta > 1)):
        raise ValueError("alpha and beta must be probabilities")
    load = offered_load(traffic, alpha, beta)
    uplink = transfer_time(load, uplink_rates(radio, tau))
    if compute.backhaul.mode == "rate":
        backhaul = math.fsum((load / compute.backhaul.rate_bps).tolist())
    else:
        backhaul = compute.backhaul.fixed_time_s
    return DelayBreakdown(
        t_device_proc=compute.t_pr_device_s,
        t_device_inf=compute.t_inf_device_s if include_device_inference else 0.0,
        t_db_tx=_fsum(uplink),
        t_bs_tx=backhaul,
        t_server_inf=math.fsum((alpha * compute.t_inf_server_s).tolist()),
        t_server_proc=compute.t_pr_server_s,
        t_sc_tx=compute.t_sc_tx_s,
    )


def delay_device_centric(
    traffic: TrafficParams,
    compute: ComputeParams,
    radio: RadioParams,
    beta: np.ndarray,
    tau: TimeAllocation,
) -> DelayBreakdown:
    beta = np.asarray(beta, dtype=float)
    return delay_cooperative(traffic, compute, radio, np.zeros_like(beta), beta, tau)


def delay_server_centric(
    traffic: TrafficParams,
    compute: ComputeParams,
    radio: RadioParams,
    tau: TimeAllocation,
) -> DelayBreakdown:
    n = radio.n_devices
    return delay_cooperative(
        traffic, compute, radio, np.ones(n), np.zeros(n), tau, include_device_inference=False
    )


def delay_cascade(
    traffic: TrafficParams,
    compute: ComputeParams,
    radio: RadioParams,
    alpha: np.ndarray,
    tau: TimeAllocation,
) -> DelayBreakdown:
    alpha = np.asarray(alpha, dtype=float)
    return delay_cooperative(traffic, compute, radio, alpha, 1.0 - alpha, tau)


def _fsum(values: np.ndarray) -> float:
    if np.any(np.isinf(values)):
        return math.inf
    return math.fsum(values.tolist())


def _check_devices(*counts: int) -> None:
    if len(set(counts)) != 1:
        raise ValueError(f"per-device inputs disagree on the device count: {counts}")


def constant_delay_s(compute: ComputeParams, *, include_device_inference: bool = True) -> float:
    """Delay terms that do not depend on offloading: processing, inference, fixed backhaul, client hop."""
    fixed_backhaul = compute.backhaul.fixed_time_s if compute.backhaul.mode == "fixed" else 0.0
    device_inf = compute.t_inf_device_s if include_device_inference else 0.0
    return math.fsum(
        [compute.t_pr_device_s, device_inf, fixed_backhaul, compute.t_pr_server_s, compute.t_sc_tx_s]
    )
