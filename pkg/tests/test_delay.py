import math

import numpy as np
import pytest

from edgepose.delay import (
    Backhaul,
    ComputeParams,
    DelayBreakdown,
    RadioParams,
    TimeAllocation,
    TrafficParams,
    constant_delay_s,
    delay_cascade,
    delay_cooperative,
    delay_device_centric,
    delay_server_centric,
    device_terms,
    shannon_rate,
    transfer_time,
)
from edgepose.errors import AllocationError


def default_radio(n=4, gain_db=-100.0):
    return RadioParams(1e6, -165.0, 30.0, (gain_db,) * n)


def test_full_frame_rate_at_reference_link():
    radio = default_radio()
    assert shannon_rate(1.0, radio, 0) == pytest.approx(1.1627e7, rel=1e-3)
    assert shannon_rate(0.0, radio, 0) == 0.0
    assert shannon_rate(0.25, radio, 2) == pytest.approx(shannon_rate(1.0, radio, 2) / 4)


def test_linear_constructor_matches_db_form():
    radio = RadioParams.from_linear(1e6, 10 ** (-19.5), 1.0, [1e-10, 1e-10])
    assert np.allclose(radio.spectral_rates(), default_radio(2).spectral_rates())


def test_server_centric_misses_default_budget():
    radio = default_radio()
    breakdown = delay_server_centric(TrafficParams(), ComputeParams(), radio, TimeAllocation.uniform(4))
    assert breakdown.total == pytest.approx(0.837, abs=1e-3)
    assert breakdown.total > 0.5
    assert breakdown.t_device_inf == 0.0
    assert breakdown.t_server_inf == pytest.approx(0.08)


def test_breakdown_total_is_sum_of_components():
    alpha = np.array([0.1, 0.2, 0.3, 0.4])
    beta = np.array([0.4, 0.3, 0.2, 0.1])
    breakdown = delay_cooperative(
        TrafficParams(), ComputeParams(), default_radio(), alpha, beta, TimeAllocation.uniform(4)
    )
    assert breakdown.total == pytest.approx(sum(breakdown.components().values()))
    assert set(breakdown.as_dict()) == set(breakdown.components()) | {"total"}
    assert breakdown.is_finite


def test_constant_delay_terms():
    assert constant_delay_s(ComputeParams()) == pytest.approx(0.1355)
    assert constant_delay_s(ComputeParams(), include_device_inference=False) == pytest.approx(0.0355)
    rate_mode = ComputeParams(backhaul=Backhaul(mode="rate", rate_bps=1e8))
    assert constant_delay_s(rate_mode) == pytest.approx(0.135)


def test_transfer_time_edge_cases():
    out = transfer_time(np.array([0.0, 10.0, 10.0]), np.array([0.0, 0.0, 5.0]))
    assert out[0] == 0.0
    assert math.isinf(out[1])
    assert out[2] == 2.0


def test_starved_device_gives_infinite_delay():
    tau = TimeAllocation(np.array([1.0, 0.0]))
    breakdown = delay_cooperative(
        TrafficParams(), ComputeParams(), default_radio(2), np.array([0.2, 0.2]), np.zeros(2), tau
    )
    assert math.isinf(breakdown.total)
    assert not breakdown.is_finite


def test_special_case_reductions():
    traffic, compute, radio = TrafficParams(), ComputeParams(), default_radio()
    tau = TimeAllocation.uniform(4)
    beta = np.full(4, 0.5)
    device = delay_device_centric(traffic, compute, radio, beta, tau)
    assert device == delay_cooperative(traffic, compute, radio, np.zeros(4), beta, tau)
    assert device.t_server_inf == 0.0
    alpha = np.full(4, 0.3)
    cascade = delay_cascade(traffic, compute, radio, alpha, tau)
    assert cascade == delay_cooperative(traffic, compute, radio, alpha, 1.0 - alpha, tau)


def test_rate_mode_backhaul_scales_with_load():
    traffic, radio = TrafficParams(), default_radio()
    compute = ComputeParams(backhaul=Backhaul(mode="rate", rate_bps=1e7))
    alpha = np.full(4, 0.5)
    beta = np.zeros(4)
    breakdown = delay_cooperative(traffic, compute, radio, alpha, beta, TimeAllocation.uniform(4))
    load = traffic.fps * 0.5 * traffic.image_bits
    assert breakdown.t_bs_tx == pytest.approx(4 * load / 1e7)
    rates = radio.spectral_rates() / 4
    terms = device_terms(traffic, compute, rates, alpha, beta)
    assert terms.sum() == pytest.approx(breakdown.t_db_tx + breakdown.t_bs_tx + breakdown.t_server_inf)


def test_backhaul_validation():
    with pytest.raises(ValueError):
        Backhaul(mode="rate")
    with pytest.raises(ValueError):
        Backhaul(mode="satellite")  # type: ignore[arg-type]
    with pytest.raises(ValueError):
        Backhaul(fixed_time_s=-1.0)


def test_inference_time_from_flops():
    compute = ComputeParams.from_flops(1e9, 1.0, 1e10, 4e9, 0.5, 1e11)
    assert compute.t_inf_device_s == pytest.approx(0.1)
    assert compute.t_inf_server_s == pytest.approx(0.02)
    with pytest.raises(ValueError):
        ComputeParams.from_flops(1e9, 0.0, 1e10, 1e9, 1.0, 1e10)


def test_allocation_validation():
    with pytest.raises(AllocationError):
        TimeAllocation(np.array([0.6, 0.6]))
    with pytest.raises(AllocationError):
        TimeAllocation(np.array([-0.1, 0.5]))
    with pytest.raises(AllocationError):
        TimeAllocation(np.array([]))
    with pytest.raises(AllocationError):
        TimeAllocation(np.array([np.nan, 0.5]))
    assert TimeAllocation.uniform(3) == TimeAllocation(np.full(3, 1 / 3))


def test_negative_component_rejected():
    with pytest.raises(ValueError):
        DelayBreakdown(0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0)


def test_device_count_mismatch():
    with pytest.raises(ValueError):
        delay_cooperative(
            TrafficParams(), ComputeParams(), default_radio(3), np.zeros(4), np.zeros(4),
            TimeAllocation.uniform(4),
        )


def test_delay_grows_with_image_size():
    compute, radio = ComputeParams(), default_radio()
    tau = TimeAllocation.uniform(4)
    alpha, beta = np.full(4, 0.4), np.full(4, 0.3)
    totals = [
        delay_cooperative(TrafficParams(image_bits=bits), compute, radio, alpha, beta, tau).total
        for bits in (8_000, 64_000, 262_144, 1_000_000)
    ]
    assert np.all(np.diff(totals) > 0)


def test_delay_shrinks_as_the_link_improves():
    traffic, compute = TrafficParams(), ComputeParams()
    tau = TimeAllocation.uniform(4)
    alpha, beta = np.full(4, 0.4), np.full(4, 0.3)
    totals = [
        delay_cooperative(traffic, compute, default_radio(gain_db=g), alpha, beta, tau).total
        for g in (-120.0, -110.0, -100.0, -90.0)
    ]
    assert np.all(np.diff(totals) < 0)
    wide = RadioParams(4e6, -165.0, 30.0, (-100.0,) * 4)
    assert delay_cooperative(traffic, compute, wide, alpha, beta, tau).total < totals[2]
