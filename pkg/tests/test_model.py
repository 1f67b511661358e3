import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hidden_failure import (
    DegenerateEvidenceError,
    Evidence,
    FailureModel,
    ModelError,
    log_binomial_pmf,
    posterior,
    posterior_curve,
    pot_model,
)

from conftest import evidence_pairs, failure_models, open_probs


def direct_binomial(n, k, p):
    """Binomial pmf by explicit repeated multiplication; fine for small n."""
    value = float(math.comb(n, k))
    for _ in range(k):
        value *= p
    for _ in range(n - k):
        value *= 1 - p
    return value


def direct_posterior(model, n, k):
    """Non-log Bayes over cells, the textbook way."""
    H, S = model.shape
    joint = np.array(
        [
            [direct_binomial(n, k, model.positive_prob[i, f]) * model.joint_prior[i, f] for f in range(S)]
            for i in range(H)
        ]
    )
    return joint / joint.sum()


class TestLogBinomialPmf:
    def test_empty_product(self):
        assert log_binomial_pmf(0, 0, 0.3) == 0.0

    def test_single_trial(self):
        assert log_binomial_pmf(1, 1, 0.3) == pytest.approx(math.log(0.3), rel=1e-15)
        assert log_binomial_pmf(1, 1, 0.3) == pytest.approx(-1.20397, abs=1e-5)

    def test_all_successes(self):
        expected = math.log(direct_binomial(5, 5, 0.7))
        assert log_binomial_pmf(5, 5, 0.7) == pytest.approx(expected, rel=1e-13)
        assert log_binomial_pmf(5, 5, 0.7) == pytest.approx(-1.78337, abs=1e-5)

    @pytest.mark.parametrize(
        "n,k,p,expected",
        [
            (4, 0, 0.0, 0.0),
            (4, 1, 0.0, -math.inf),
            (4, 4, 1.0, 0.0),
            (4, 3, 1.0, -math.inf),
            (0, 0, 1.0, 0.0),
        ],
    )
    def test_degenerate_probabilities_exact(self, n, k, p, expected):
        assert log_binomial_pmf(n, k, p) == expected

    @given(evidence_pairs(max_n=40), open_probs)
    def test_matches_direct_product(self, nk, p):
        n, k = nk
        direct = direct_binomial(n, k, p)
        if direct > 1e-290:
            assert math.exp(log_binomial_pmf(n, k, p)) == pytest.approx(direct, rel=1e-10)

    def test_large_n_does_not_underflow(self):
        value = log_binomial_pmf(10**6, 10**6, 0.9)
        assert value == pytest.approx(10**6 * math.log(0.9), rel=1e-12)

    @pytest.mark.parametrize("n,k,p", [(3, 4, 0.5), (3, -1, 0.5), (3, 1, 1.5), (3, 1, -0.1)])
    def test_domain_errors(self, n, k, p):
        with pytest.raises(ModelError):
            log_binomial_pmf(n, k, p)


class TestFailureModel:
    def test_rejects_unnormalised_prior(self):
        with pytest.raises(ModelError):
            FailureModel(["a", "b"], ["x"], [[0.5], [0.6]], [[0.5], [0.5]])

    def test_rejects_negative_prior(self):
        with pytest.raises(ModelError):
            FailureModel(["a", "b"], ["x"], [[1.5], [-0.5]], [[0.5], [0.5]])

    def test_rejects_theta_outside_unit(self):
        with pytest.raises(ModelError):
            FailureModel(["a", "b"], ["x"], [[0.5], [0.5]], [[1.2], [0.5]])

    def test_rejects_shape_mismatch(self):
        with pytest.raises(ModelError):
            FailureModel(["a", "b"], ["x", "y"], [[0.5], [0.5]], [[0.5], [0.5]])

    def test_needs_two_hypotheses(self):
        with pytest.raises(ModelError):
            FailureModel(["a"], ["x"], [[1.0]], [[0.5]])

    def test_prior_tolerance(self):
        FailureModel(["a", "b"], ["x"], [[0.5 + 5e-13], [0.5]], [[0.5], [0.5]])

    def test_immutable(self):
        m = pot_model()
        with pytest.raises(ValueError):
            m.joint_prior[0, 0] = 1.0


class TestEvidence:
    def test_bounds(self):
        with pytest.raises(ModelError):
            Evidence(3, 4)
        with pytest.raises(ModelError):
            Evidence(-1, 0)

    def test_rejects_non_integers(self):
        with pytest.raises(ModelError):
            Evidence(3.0, 1)


class TestPosterior:
    def test_no_contamination_single_positive(self):
        res = posterior(pot_model(p_c=0.0), Evidence(1, 1))
        assert res.hypothesis_marginal[0] == pytest.approx(0.7, abs=1e-15)

    def test_no_data_returns_prior(self):
        m = pot_model()
        res = posterior(m, Evidence(0, 0))
        np.testing.assert_allclose(res.joint, m.joint_prior, atol=1e-12)
        np.testing.assert_allclose(res.hypothesis_marginal, m.hypothesis_prior, atol=1e-12)

    def test_unanimous_curve_peaks_at_five(self):
        curve = posterior_curve(pot_model(p_c=1e-2), 40)
        assert int(np.argmax(curve.values)) == 5

    def test_unanimous_limit_is_half(self):
        res = posterior(pot_model(p_c=1e-2), Evidence.unanimous(2000))
        assert res.hypothesis_marginal[0] == pytest.approx(0.5, abs=1e-12)

    def test_zero_prior_cell_stays_zero(self):
        m = FailureModel(["a", "b"], ["ok", "bad"], [[0.5, 0.0], [0.5, 0.0]], [[0.6, 1.0], [0.4, 1.0]])
        res = posterior(m, Evidence(20, 20))
        assert res.joint[0, 1] == 0.0 and res.joint[1, 1] == 0.0

    def test_impossible_observation(self):
        m = FailureModel(["a", "b"], ["x"], [[0.5], [0.5]], [[0.0], [0.0]])
        with pytest.raises(DegenerateEvidenceError):
            posterior(m, Evidence(3, 1))

    def test_theta_one_cells(self):
        m = FailureModel(["a", "b"], ["x"], [[0.5], [0.5]], [[1.0], [0.5]])
        res = posterior(m, Evidence(3, 2))
        assert res.hypothesis_marginal.tolist() == [0.0, 1.0]

    def test_million_trials(self):
        res = posterior(pot_model(p_c=1e-2), Evidence(10**6, 10**6))
        assert np.isfinite(res.joint).all()
        assert res.hypothesis_marginal[0] == pytest.approx(0.5, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(failure_models(), evidence_pairs())
def test_normalisation_and_marginals(model, nk):
    res = posterior(model, Evidence(*nk))
    assert abs(res.joint.sum() - 1) <= 1e-10
    assert np.all((res.joint >= 0) & (res.joint <= 1))
    np.testing.assert_allclose(res.hypothesis_marginal, res.joint.sum(axis=1), atol=1e-12)
    np.testing.assert_allclose(res.state_marginal, res.joint.sum(axis=0), atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(failure_models())
def test_prior_recovery(model):
    res = posterior(model, Evidence(0, 0))
    np.testing.assert_allclose(res.joint, model.joint_prior, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(failure_models(), evidence_pairs(), st.randoms(use_true_random=False))
def test_label_swap_symmetry(model, nk, rnd):
    H = model.shape[0]
    perm = list(range(H))
    rnd.shuffle(perm)
    swapped = FailureModel(
        [model.hypothesis_labels[i] for i in perm],
        model.state_labels,
        model.joint_prior[perm],
        model.positive_prob[perm],
    )
    a = posterior(model, Evidence(*nk)).hypothesis_marginal
    b = posterior(swapped, Evidence(*nk)).hypothesis_marginal
    np.testing.assert_allclose(b, a[perm], atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(failure_models(), evidence_pairs())
def test_complement_symmetry(model, nk):
    n, k = nk
    flipped = FailureModel(
        model.hypothesis_labels, model.state_labels, model.joint_prior, 1 - model.positive_prob
    )
    a = posterior(model, Evidence(n, k))
    b = posterior(flipped, Evidence(n, n - k))
    np.testing.assert_allclose(b.joint, a.joint, rtol=1e-9, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    st.floats(0.01, 0.99),
    st.floats(0.01, 0.99),
    st.floats(0.02, 0.98),
)
def test_single_state_unanimous_monotone(p_target, gap, t_hi):
    t_lo = t_hi * gap
    m = FailureModel(["t", "o"], ["only"], [[p_target], [1 - p_target]], [[t_hi], [t_lo]])
    values = posterior_curve(m, 200).values
    assert np.all(np.diff(values) >= 0)


@settings(max_examples=100, deadline=None)
@given(failure_models(), evidence_pairs(max_n=20))
def test_log_space_matches_direct(model, nk):
    n, k = nk
    direct = direct_posterior(model, n, k)
    res = posterior(model, Evidence(n, k))
    mask = direct > 1e-200
    np.testing.assert_allclose(res.joint[mask], direct[mask], rtol=1e-9)


class TestPosteriorCurve:
    def test_first_value_is_prior(self):
        m = pot_model()
        curve = posterior_curve(m, 10)
        assert curve.values[0] == pytest.approx(0.5, abs=1e-15)
        assert len(curve.values) == 11 and curve.mode == "unanimous"

    def test_no_contamination_increasing(self):
        values = posterior_curve(pot_model(p_c=0.0), 50).values
        assert np.all(np.diff(values) >= 0)
        assert values[-1] > 0.999999
        # strictness checked on the complement, which stays representable
        italy = posterior_curve(pot_model(p_c=0.0), 50, target="Italy").values
        assert np.all(np.diff(italy) < 0)

    def test_fixed_fraction_matches_pointwise(self):
        m = pot_model()
        curve = posterior_curve(m, 25, fraction=0.7)
        for n in (0, 1, 7, 10, 25):
            k = math.floor(0.7 * n + 0.5)
            assert curve.ks[n] == k
            assert curve.values[n] == pytest.approx(
                posterior(m, Evidence(n, k)).hypothesis_marginal[0], rel=1e-12
            )

    def test_target_by_label(self):
        m = pot_model()
        a = posterior_curve(m, 10, target="Italy").values
        b = posterior_curve(m, 10, target="Britain").values
        np.testing.assert_allclose(a + b, 1.0, atol=1e-12)

    def test_negative_n_max(self):
        with pytest.raises(ModelError):
            posterior_curve(pot_model(), -1)
