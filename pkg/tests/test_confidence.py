import numpy as np
import pytest
from scipy import stats

from edgepose.confidence import (
    BetaConfidence,
    ConfidenceQuad,
    EmpiricalConfidence,
    describe_samples,
    fit_beta_moments,
    fit_empirical,
    load_samples,
    model_from_spec,
)
from edgepose.errors import InvalidModelError, SampleFileError


def test_beta_cdf_matches_scipy_and_endpoints():
    model = BetaConfidence(6.0, 2.0)
    xs = np.linspace(0.0, 1.0, 11)
    assert np.allclose(model.cdf(xs), stats.beta.cdf(xs, 6.0, 2.0))
    assert model.cdf(0.0) == 0.0
    assert model.cdf(1.0) == 1.0
    assert model.cdf(0.5) == pytest.approx(0.0625)


def test_cdf_rejects_values_outside_unit_interval():
    with pytest.raises(ValueError):
        BetaConfidence(2.0, 2.0).cdf(1.5)


def test_beta_parameters_must_be_positive():
    with pytest.raises(InvalidModelError):
        BetaConfidence(0.0, 1.0)


def test_empirical_cdf_is_right_continuous():
    model = EmpiricalConfidence(np.array([0.2, 0.4, 0.4, 0.9]))
    assert model.cdf(0.1) == 0.0
    assert model.cdf(0.4) == 0.75
    assert model.cdf(0.5) == 0.75
    assert model.cdf(1.0) == 1.0
    assert len(model) == 4


def test_empirical_rejects_unsorted_and_out_of_range_samples():
    with pytest.raises(InvalidModelError) as unsorted:
        EmpiricalConfidence(np.array([0.1, 0.5, 0.3]))
    assert unsorted.value.index == 2
    with pytest.raises(InvalidModelError) as outside:
        fit_empirical([0.3, 1.2])
    assert outside.value.index == 1
    with pytest.raises(InvalidModelError):
        fit_empirical([])


def test_sampling_is_reproducible_and_within_support():
    model = EmpiricalConfidence(np.array([0.1, 0.3, 0.8]))
    a = model.sample(np.random.default_rng(7), 50)
    b = model.sample(np.random.default_rng(7), 50)
    assert np.array_equal(a, b)
    assert set(a.tolist()) <= {0.1, 0.3, 0.8}
    draws = BetaConfidence(2.0, 5.0).sample(np.random.default_rng(1), 1000)
    assert draws.min() >= 0.0 and draws.max() <= 1.0


def test_load_samples_skips_header_and_blank_lines(tmp_path):
    path = tmp_path / "scores.txt"
    path.write_text("confidence\n0.25\n\n0.75\n", encoding="utf-8")
    assert load_samples(path) == [0.25, 0.75]


def test_load_samples_reports_offending_line(tmp_path):
    path = tmp_path / "scores.txt"
    path.write_text("0.1\nabc\n", encoding="utf-8")
    with pytest.raises(SampleFileError) as err:
        load_samples(path)
    assert err.value.line == 2
    path.write_text("0.1\n0.2\n1.5\n", encoding="utf-8")
    with pytest.raises(SampleFileError) as err:
        load_samples(path)
    assert err.value.line == 3


def test_load_samples_takes_one_score_per_line(tmp_path):
    path = tmp_path / "scores.txt"
    path.write_text("  0.5  \n0.25\n", encoding="utf-8")
    assert load_samples(path) == [0.5, 0.25]
    path.write_text("0.1\n0.2, 0.3\n", encoding="utf-8")
    with pytest.raises(SampleFileError) as err:
        load_samples(path)
    assert err.value.line == 2


def test_moment_fit_recovers_beta_parameters():
    draws = np.random.default_rng(42).beta(6.0, 2.0, size=200_000)
    model = fit_beta_moments(draws)
    assert model.alpha == pytest.approx(6.0, rel=0.05)
    assert model.beta == pytest.approx(2.0, rel=0.05)


def test_moment_fit_rejects_degenerate_samples():
    with pytest.raises(InvalidModelError):
        fit_beta_moments([0.5, 0.5, 0.5])


def test_model_from_spec(tmp_path):
    assert model_from_spec("beta(2, 5)") == BetaConfidence(2.0, 5.0)
    (tmp_path / "dev.txt").write_text("0.9\n0.1\n0.5\n", encoding="utf-8")
    model = model_from_spec("file(dev.txt)", tmp_path)
    assert isinstance(model, EmpiricalConfidence)
    assert model.samples.tolist() == [0.1, 0.5, 0.9]
    with pytest.raises(InvalidModelError):
        model_from_spec("gauss(0, 1)")


def test_describe_samples():
    summary = describe_samples([0.9, 0.1, 0.5])
    assert summary["n"] == 3
    assert summary["min"] == 0.1
    assert summary["max"] == 0.9
    assert len(summary["deciles"]) == 9


def test_default_quad_members():
    quad = ConfidenceQuad.default()
    assert set(quad.members()) == {"dev_pos", "dev_neg", "srv_pos", "srv_neg"}
    assert quad.srv_pos.mean() > quad.dev_pos.mean()
    with pytest.raises(InvalidModelError):
        ConfidenceQuad(quad.dev_pos, quad.dev_neg, quad.srv_pos, "beta(1,1)")


def test_beta_draws_follow_the_model_cdf():
    model = BetaConfidence(2.0, 5.0)
    draws = model.sample(np.random.default_rng(30), 100_000)
    assert stats.kstest(draws, model.cdf).statistic < 0.01


def test_beta_draws_have_the_model_mean():
    model = BetaConfidence(2.0, 5.0)
    n = 10_000
    draws = model.sample(np.random.default_rng(31), n)
    sd = np.sqrt(2.0 * 5.0 / (7.0**2 * 8.0))
    assert abs(draws.mean() - model.mean()) <= 3 * sd / np.sqrt(n)
    assert model.mean() == pytest.approx(2 / 7)


def test_resampling_an_empirical_model_round_trips():
    rng = np.random.default_rng(32)
    base = fit_empirical(BetaConfidence(2.0, 5.0).sample(rng, 5000))
    n = 10_000
    refit = fit_empirical(base.sample(rng, n))
    # both step functions only jump at the base support
    points = np.concatenate([[0.0], base.samples])
    gap = np.abs(refit.cdf(points) - base.cdf(points)).max()
    assert gap <= 2 / np.sqrt(n)


@pytest.mark.parametrize(
    "model",
    [
        BetaConfidence(0.5, 0.5),
        BetaConfidence(8.0, 2.0),
        EmpiricalConfidence(np.array([0.0, 0.2, 0.2, 0.7, 1.0])),
    ],
)
def test_cdf_is_monotone_on_the_unit_interval(model):
    xs = np.linspace(0.0, 1.0, 1001)
    values = model.cdf(xs)
    assert np.all(np.diff(values) >= 0.0)
    assert values[-1] == 1.0
    assert np.all((values >= 0.0) & (values <= 1.0))


def test_empirical_fit_stays_within_dkw_band():
    truth = BetaConfidence(8.0, 2.0)
    n = 5000
    fitted = fit_empirical(truth.sample(np.random.default_rng(33), n))
    points = np.concatenate([np.linspace(0.0, 1.0, 2001), fitted.samples])
    gap = np.abs(fitted.cdf(points) - truth.cdf(points)).max()
    # two-sided band at confidence 0.999
    assert gap <= np.sqrt(np.log(2 / 0.001) / (2 * n))
