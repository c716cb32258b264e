import math
import time

import numpy as np
import pytest
from pydantic import ValidationError

from edgepose.confidence import BetaConfidence, ConfidenceQuad, EmpiricalConfidence
from edgepose.delay import RadioParams, TimeAllocation, constant_delay_s, offered_load
from edgepose.errors import InfeasibleError, InstanceTooLargeError
from edgepose.metrics import ThresholdSet, offload_profile
from edgepose.optimizer import (
    DIAGNOSTIC_COLUMNS,
    OptimizerConfig,
    Strategy,
    diagnostics_frame,
    exhaustive_search,
    kkt_allocation,
    optimize,
    solve_tau,
    solve_thresholds,
)
from edgepose.optimizer.greedy import pick_best
from edgepose.sim import Scenario


def uplink_time(scenario, alpha, beta, tau):
    load = scenario.traffic.fps * (alpha * scenario.traffic.image_bits + beta * scenario.traffic.message_bits)
    return float(np.sum(load / (tau * scenario.radio.spectral_rates())))


def uneven_pair():
    radio = RadioParams(1e6, -165.0, 30.0, (-95.0, -105.0))
    return Scenario.default(n_devices=2, radio=radio)


def test_symmetric_devices_share_airtime_equally(scenario):
    tau = kkt_allocation(scenario, np.full(4, 0.3), np.full(4, 0.2))
    assert np.allclose(tau.tau, 0.25)


def test_weaker_channel_gets_more_airtime():
    tau = kkt_allocation(uneven_pair(), np.full(2, 0.3), np.full(2, 0.2))
    assert tau.tau[1] > tau.tau[0]
    assert tau.tau.sum() == pytest.approx(1.0)


def test_kkt_allocation_beats_simplex_grid():
    scenario = uneven_pair()
    alpha, beta = np.full(2, 0.6), np.full(2, 0.2)
    tau = kkt_allocation(scenario, alpha, beta)
    best_value, best_share = np.inf, None
    for t in np.arange(1, 1000) / 1000:
        value = uplink_time(scenario, alpha, beta, np.array([t, 1 - t]))
        if value < best_value:
            best_value, best_share = value, t
    assert uplink_time(scenario, alpha, beta, tau.tau) <= best_value * (1 + 1e-9)
    assert tau.tau[0] == pytest.approx(best_share, abs=1e-3)


def test_zero_traffic_keeps_uniform_airtime(scenario):
    result = solve_tau(scenario, ThresholdSet.uniform(4, 1.0, 1.0, 0.5))
    assert result.iterations == 0
    assert result.converged
    assert result.tau == TimeAllocation.uniform(4)


def test_dual_iterations_report_delay(scenario):
    result = solve_tau(scenario, ThresholdSet.uniform(4, 0.3, 0.7, 0.5))
    assert result.mu >= 1e-12
    assert result.lambda_ >= 0.0
    assert result.delay_s < scenario.d_req_s
    assert result.feasible


def test_converged_dual_iterate_fills_the_frame():
    scenario = uneven_pair()
    thresholds = ThresholdSet.uniform(2, 0.3, 0.7, 0.5)
    result = solve_tau(scenario, thresholds)
    assert result.converged
    assert result.iterations > 1
    expected = kkt_allocation(scenario, *offload_profile(scenario.quads, thresholds))
    assert result.tau.tau.sum() == pytest.approx(1.0)
    assert np.allclose(result.tau.tau, expected.tau, atol=1e-9)


def test_unconverged_dual_returns_last_iterate():
    scenario = uneven_pair()
    thresholds = ThresholdSet.uniform(2, 0.3, 0.7, 0.5)
    result = solve_tau(scenario, thresholds, OptimizerConfig(max_inner_iters=1))
    assert not result.converged
    assert result.iterations == 1
    alpha, beta = offload_profile(scenario.quads, thresholds)
    # first step from lambda = 0, mu = 1
    load = offered_load(scenario.traffic, alpha, beta)
    raw = np.minimum(np.sqrt(load / scenario.radio.spectral_rates()), 1.0)
    expected = raw / raw.sum() if raw.sum() > 1.0 else raw
    assert np.allclose(result.tau.tau, expected)
    assert not np.allclose(result.tau.tau, 0.5)


def test_dual_step_size_changes_the_iterate():
    scenario = uneven_pair()
    thresholds = ThresholdSet.uniform(2, 0.3, 0.7, 0.5)
    short = OptimizerConfig(max_inner_iters=3)
    gentle = solve_tau(scenario, thresholds, short)
    harsh = solve_tau(scenario, thresholds, short.model_copy(update={"kappa2": 1e6}))
    assert not np.allclose(gentle.tau.tau, harsh.tau.tau)


def test_unreachable_budget_skips_the_dual_loop(scenario):
    thresholds = ThresholdSet.uniform(4, 0.0, 1.0, 0.5)
    result = solve_tau(scenario, thresholds)
    assert not result.feasible
    assert result.iterations == 0
    assert result.delay_s == pytest.approx(0.937, abs=1e-3)
    assert np.allclose(result.tau.tau, 0.25)


def test_default_optimisation_is_feasible_and_monotone(scenario):
    solution = optimize(scenario)
    assert solution.feasible
    assert solution.mean_delay_s <= scenario.d_req_s + 1e-9
    trace = np.array(solution.objective_trace)
    assert trace.size == solution.diagnostics.threshold_passes
    assert np.all(np.diff(trace) >= -1e-9)
    assert solution.sum_accuracy == pytest.approx(trace[-1])
    assert solution.tau.tau.sum() <= 1.0 + 1e-9


def test_strategy_ordering_at_defaults(scenario):
    proposed = optimize(scenario, strategy=Strategy.PROPOSED)
    cascade = optimize(scenario, strategy=Strategy.CASCADE)
    device = optimize(scenario, strategy=Strategy.DEVICE)
    server = optimize(scenario, strategy=Strategy.SERVER)
    assert proposed.sum_accuracy >= cascade.sum_accuracy - 1e-9
    assert cascade.sum_accuracy >= device.sum_accuracy - 1e-9
    assert np.all(cascade.thresholds.theta_h > 0.0)
    assert proposed.sum_accuracy >= device.sum_accuracy - 1e-9
    assert not server.feasible
    assert server.diagnostics.min_delay_s == pytest.approx(0.837, abs=1e-3)
    assert np.all(server.thresholds.theta_l == 0.0)
    assert np.all(server.thresholds.theta_h == 1.0)


def test_cascade_beats_device_with_loose_budget(scenario):
    loose = scenario.with_d_req(1.0)
    cascade = optimize(loose, strategy="cascade")
    device = optimize(loose, strategy="device")
    assert cascade.feasible
    assert np.all(cascade.thresholds.theta_l == 0.0)
    assert cascade.sum_accuracy >= device.sum_accuracy


def test_device_strategy_picks_equal_density_point(scenario):
    solution = optimize(scenario, strategy=Strategy.DEVICE)
    assert np.allclose(solution.thresholds.theta_l, 0.5)
    assert np.allclose(solution.thresholds.theta_h, 0.5)
    assert solution.sum_accuracy == pytest.approx(3.75)
    assert solution.breakdown.t_server_inf == 0.0


def test_perfect_server_receives_everything():
    quad = ConfidenceQuad(
        BetaConfidence(6, 2),
        BetaConfidence(2, 6),
        EmpiricalConfidence(np.array([1.0])),
        EmpiricalConfidence(np.array([0.0])),
    )
    scenario = Scenario.default(n_devices=2, quads=(quad,), d_req_s=100.0)
    solution = optimize(scenario)
    assert solution.feasible
    assert solution.sum_accuracy == pytest.approx(2.0, abs=1e-6)
    assert np.all(solution.thresholds.theta_l <= 0.02)
    assert np.all(solution.thresholds.theta_h >= 0.98)


def test_uninformative_server_gets_no_images():
    coin = BetaConfidence(2, 2)
    quad = ConfidenceQuad(BetaConfidence(6, 2), BetaConfidence(2, 6), coin, coin)
    scenario = Scenario.default(n_devices=2, quads=(quad,), d_req_s=100.0)
    solution = optimize(scenario)
    assert np.array_equal(solution.thresholds.theta_l, solution.thresholds.theta_h)


@pytest.mark.slow
def test_alternating_search_is_near_exhaustive_and_far_cheaper(pair_scenario):
    config = OptimizerConfig(grid_points_m=21)
    started = time.perf_counter()
    exact = exhaustive_search(pair_scenario, 21, config)
    exhaustive_s = time.perf_counter() - started
    alternating_s = math.inf
    for _ in range(3):
        started = time.perf_counter()
        approx = optimize(pair_scenario, config)
        alternating_s = min(alternating_s, time.perf_counter() - started)
    assert exact.feasible and approx.feasible
    assert abs(exact.sum_accuracy - approx.sum_accuracy) <= 0.01 * exact.sum_accuracy
    assert exact.mean_delay_s <= pair_scenario.d_req_s + 1e-9
    assert exhaustive_s >= 100 * alternating_s


@pytest.mark.slow
def test_cascade_on_coarse_grid_matches_exhaustive(scenario):
    config = OptimizerConfig(grid_points_m=11)
    exact = exhaustive_search(scenario, 11, config, strategy="cascade")
    approx = optimize(scenario, config, strategy="cascade")
    assert approx.feasible
    assert np.all(approx.thresholds.theta_h > 0.0)
    assert approx.sum_accuracy >= 0.99 * exact.sum_accuracy


def test_exhaustive_search_keeps_uniform_shares_for_fixed_airtime(pair_scenario):
    solution = exhaustive_search(pair_scenario, 6, strategy=Strategy.PROPOSED_FIXED_TAU)
    assert solution.feasible
    assert solution.tau == TimeAllocation.uniform(2)
    assert solution.mean_delay_s <= pair_scenario.d_req_s + 1e-9


def test_exhaustive_search_solves_airtime_per_combination():
    scenario = uneven_pair()
    solution = exhaustive_search(scenario, 6)
    assert solution.feasible
    expected = kkt_allocation(scenario, *offload_profile(scenario.quads, solution.thresholds))
    assert np.allclose(solution.tau.tau, expected.tau, atol=1e-9)


def test_exhaustive_search_refuses_large_instances(scenario):
    with pytest.raises(InstanceTooLargeError):
        exhaustive_search(scenario, 21)


def test_exhaustive_search_two_point_grid(scenario):
    solution = exhaustive_search(scenario, 2)
    assert solution.feasible
    assert solution.sum_accuracy == pytest.approx(2.0)
    grid_values = np.concatenate(
        [solution.thresholds.theta_l, solution.thresholds.theta_h, solution.thresholds.theta_s]
    )
    assert set(grid_values.tolist()) <= {0.0, 1.0}
    assert np.array_equal(solution.thresholds.theta_l, solution.thresholds.theta_h)


def test_exhaustive_search_treats_identical_devices_alike(pair_scenario):
    solution = exhaustive_search(pair_scenario.with_d_req(100.0), 11)
    th = solution.thresholds
    assert th.device(0) == th.device(1)


def test_tight_budget_is_reported_infeasible(scenario):
    solution = optimize(scenario, OptimizerConfig(d_req_s=0.05))
    assert not solution.feasible
    assert solution.d_req_s == 0.05
    assert solution.diagnostics.min_delay_s == pytest.approx(0.1355, abs=1e-3)


def test_threshold_search_raises_when_budget_unreachable(scenario):
    with pytest.raises(InfeasibleError) as excinfo:
        solve_thresholds(
            scenario,
            TimeAllocation.uniform(4),
            ThresholdSet.uniform(4, 0.5, 0.5, 0.5),
            OptimizerConfig(d_req_s=0.05),
        )
    assert excinfo.value.min_delay_s == pytest.approx(0.1355)


def test_fixed_airtime_variant_keeps_uniform_shares(scenario):
    solution = optimize(scenario, strategy=Strategy.PROPOSED_FIXED_TAU)
    assert solution.tau == TimeAllocation.uniform(4)
    assert solution.feasible


def test_diagnostics_frame_has_one_row_per_pass(scenario):
    solution = optimize(scenario)
    frame = diagnostics_frame(solution)
    assert list(frame.columns) == DIAGNOSTIC_COLUMNS
    assert len(frame) == solution.diagnostics.threshold_passes
    assert frame["iter"].tolist() == list(range(1, len(frame) + 1))


def test_config_rejects_unknown_fields():
    with pytest.raises(ValidationError):
        OptimizerConfig(kappa3=0.1)
    with pytest.raises(ValidationError):
        OptimizerConfig(grid_points_m=1)
    assert OptimizerConfig(grid_points_m=5).grid().tolist() == [0.0, 0.25, 0.5, 0.75, 1.0]


def test_pick_best_tie_breaks():
    feasible = np.ones(3, dtype=bool)
    zero = np.zeros(3)
    assert pick_best(np.array([0.5, 0.5, 0.4]), np.array([0.2, 0.1, 0.0]), zero, feasible) == 1
    assert pick_best(np.array([0.5, 0.5, 0.4]), zero, np.array([0.3, 0.1, 0.0]), feasible) == 1
    assert pick_best(np.array([0.5, 0.5, 0.5]), zero, zero, feasible) == 0
    assert pick_best(np.array([0.9, 0.5, 0.5]), zero, zero, np.array([False, True, True])) == 1
    assert pick_best(np.ones(3), zero, zero, np.zeros(3, dtype=bool)) is None


def random_pair(rng):
    gains = tuple(rng.uniform(-110.0, -95.0, 2))
    return Scenario.default(n_devices=2, radio=RadioParams(1e6, -165.0, 30.0, gains))


def random_thresholds(rng, n):
    bounds = np.sort(rng.uniform(0.05, 0.95, (n, 2)), axis=1)
    return ThresholdSet(bounds[:, 0], bounds[:, 1], np.full(n, 0.5))


def test_dual_airtime_matches_simplex_grid_on_random_pairs():
    rng = np.random.default_rng(20)
    shares = np.linspace(0.0, 1.0, 200_001)[1:-1]
    for _ in range(20):
        scenario = random_pair(rng)
        thresholds = random_thresholds(rng, 2)
        result = solve_tau(scenario, thresholds)
        alpha, beta = offload_profile(scenario.quads, thresholds)
        load = offered_load(scenario.traffic, alpha, beta)
        rates = scenario.radio.spectral_rates()
        uplink = load[0] / (shares * rates[0]) + load[1] / ((1 - shares) * rates[1])
        fixed = constant_delay_s(scenario.compute) + alpha.sum() * scenario.compute.t_inf_server_s
        grid_min = fixed + uplink.min()
        assert result.delay_s <= grid_min * (1 + 1e-9)
        assert result.delay_s >= grid_min * (1 - 1e-3)


@pytest.mark.slow
def test_accuracy_trace_never_decreases_on_random_scenarios():
    rng = np.random.default_rng(21)
    config = OptimizerConfig(grid_points_m=21)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        gains = tuple(rng.uniform(-108.0, -95.0, n))
        scenario = Scenario.default(
            n_devices=n,
            radio=RadioParams(1e6, -165.0, 30.0, gains),
            d_req_s=float(rng.uniform(0.2, 1.0)),
        )
        solution = optimize(scenario, config)
        trace = np.array(solution.objective_trace)
        assert np.all(np.diff(trace) >= -1e-12)
        assert solution.outer_iterations <= config.max_outer_iters
        if solution.feasible:
            assert solution.mean_delay_s <= scenario.d_req_s + 1e-9
