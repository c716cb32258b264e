import numpy as np
import pytest

from edgepose.delay import TimeAllocation
from edgepose.metrics import ThresholdSet, device_outcomes, server_outcomes
from edgepose.sim import (
    LEMMA_COLUMNS,
    Scenario,
    analytic_drop_rate,
    default_lemma_sweep,
    generate_frames,
    rank_correlation,
    simulate,
    validate_lemma1,
)

ROOM = (10.0, 10.0, 3.0)


def test_frame_labels_follow_occlusion_probability():
    rng = np.random.default_rng(3)
    assert generate_frames(rng, 50, 17, ROOM, 4, occlusion_prob=0.0).positive.all()
    assert not generate_frames(rng, 50, 17, ROOM, 4, occlusion_prob=1.0).positive.any()
    batch = generate_frames(rng, 20_000, 5, ROOM, 4, occlusion_prob=0.2)
    assert abs(batch.positive.mean() - 0.8) < 3 * np.sqrt(0.16 / batch.positive.size)
    with pytest.raises(ValueError):
        generate_frames(rng, 0, 17, ROOM, 4)


def test_generated_poses_stay_inside_the_room():
    batch = generate_frames(np.random.default_rng(4), 500, 17, ROOM, 4)
    assert batch.poses.shape == (500, 17, 3)
    assert batch.n_frames == 500
    lower = batch.poses.min(axis=(0, 1))
    upper = batch.poses.max(axis=(0, 1))
    assert np.all(lower >= 0.0)
    assert np.all(upper <= np.array(ROOM))


def test_noise_free_full_admission_is_exact():
    scenario = Scenario.default(occlusion_prob=0.0, noise_sigma0_px=0.0, noise_sigmamin_px=0.0)
    thresholds = ThresholdSet.uniform(4, 0.0, 0.0, 0.5)
    result = simulate(scenario, thresholds, TimeAllocation.uniform(4), 200)
    assert result.empirical_mpjpe_m < 1e-6
    assert result.drop_rate == 0.0
    assert np.allclose(result.per_device_accuracy, 1.0)


def test_results_do_not_depend_on_thread_count(scenario):
    thresholds = ThresholdSet.uniform(4, 0.3, 0.7, 0.5)
    tau = TimeAllocation.uniform(4)
    single = simulate(scenario, thresholds, tau, 2500, 11, threads=1)
    pooled = simulate(scenario, thresholds, tau, 2500, 11, threads=3)
    assert single.summary() == pooled.summary()
    assert np.array_equal(single.alpha_hat, pooled.alpha_hat)
    other = simulate(scenario, thresholds, tau, 2500, 12, threads=1)
    assert other.summary() != single.summary()


def balanced_sd(p_pos, p_neg, frames, occlusion):
    """Standard error of the mean of two per-class binomial rates."""
    n_pos, n_neg = (1.0 - occlusion) * frames, occlusion * frames
    return 0.5 * np.sqrt(p_pos * (1 - p_pos) / n_pos + p_neg * (1 - p_neg) / n_neg)


@pytest.mark.slow
def test_empirical_rates_match_analytic_model(scenario):
    frames = 10_000
    thresholds = ThresholdSet.uniform(4, 0.3, 0.7, 0.4)
    result = simulate(scenario, thresholds, TimeAllocation.uniform(4), frames)
    occ = scenario.occlusion_prob
    for i, quad in enumerate(scenario.quads):
        lo, hi, srv = thresholds.device(i)
        dev = device_outcomes(quad, lo, hi)
        server = server_outcomes(quad, srv)
        rates = {
            "accuracy": (dev.tp + dev.up * server.tp, dev.tn + dev.un * server.tn),
            "alpha": (dev.up, dev.un),
            "beta": (dev.tp, dev.fp),
        }
        observed = {
            "accuracy": result.per_device_accuracy[i],
            "alpha": result.alpha_hat[i],
            "beta": result.beta_hat[i],
        }
        for name, (p_pos, p_neg) in rates.items():
            expected = (p_pos + p_neg) / 2
            bound = 3 * balanced_sd(p_pos, p_neg, frames, occ)
            assert abs(observed[name] - expected) <= bound, (i, name)


def test_mean_delay_matches_analytic_with_balanced_labels():
    scenario = Scenario.default(occlusion_prob=0.5)
    thresholds = ThresholdSet.uniform(4, 0.3, 0.7, 0.5)
    result = simulate(scenario, thresholds, TimeAllocation.uniform(4), 10_000)
    assert result.mean_delay_s == pytest.approx(result.analytic_delay_s, abs=0.01)


def test_drop_rate_matches_admission_model(scenario):
    thresholds = ThresholdSet.uniform(4, 0.8, 0.8, 0.5)
    frames = 10_000
    result = simulate(scenario, thresholds, TimeAllocation.uniform(4), frames)
    expected = analytic_drop_rate(scenario, thresholds)
    assert abs(result.drop_rate - expected) <= 3 * np.sqrt(expected * (1 - expected) / frames)


def test_simulation_input_checks(scenario):
    thresholds = ThresholdSet.uniform(4, 0.3, 0.7, 0.5)
    with pytest.raises(ValueError):
        simulate(scenario, thresholds, TimeAllocation.uniform(4), 0)
    with pytest.raises(ValueError):
        simulate(scenario, ThresholdSet.uniform(2, 0.3, 0.7, 0.5), TimeAllocation.uniform(4), 10)


def test_rank_correlation_cases():
    assert rank_correlation(np.array([1.0, 2.0, 3.0]), np.array([10.0, 20.0, 30.0])) == pytest.approx(1.0)
    assert rank_correlation(np.array([1.0, 2.0, 3.0]), np.array([3.0, 2.0, 1.0])) == pytest.approx(-1.0)
    assert rank_correlation(np.array([1.0]), np.array([2.0])) is None
    assert rank_correlation(np.array([1.0, 1.0]), np.array([2.0, 3.0])) is None
    assert rank_correlation(np.array([1.0, 2.0]), np.array([np.nan, 3.0])) is None


def test_lemma_validation_with_degenerate_sweeps(pair_scenario):
    single = [ThresholdSet.uniform(2, 0.5, 0.5, 0.5)]
    table, rho = validate_lemma1(pair_scenario, single, 200)
    assert list(table.columns) == LEMMA_COLUMNS
    assert len(table) == 1
    assert rho is None
    repeated = single * 3
    _, rho = validate_lemma1(pair_scenario, repeated, 200)
    assert rho is None


def test_default_lemma_sweep_raises_accuracy():
    sweep = default_lemma_sweep(4, points=9)
    assert len(sweep) == 9
    assert sweep[0].device(0)[0] == pytest.approx(0.05)
    lo, hi, srv = sweep[-1].device(0)
    assert (lo, hi, srv) == (0.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        default_lemma_sweep(4, points=1)


@pytest.mark.slow
def test_accuracy_sum_ranks_with_pose_error(scenario):
    table, rho = validate_lemma1(
        scenario, default_lemma_sweep(4), 5000, metric="triangulated"
    )
    assert len(table) == 25
    assert rho is not None and rho >= 0.9
    _, effective = validate_lemma1(scenario, default_lemma_sweep(4, points=5), 1000)
    assert effective is not None
