import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacebell.coincidence import (
    _count_range,
    CountsTable,
    NoDataError,
    estimate_bell,
    joint_probabilities,
    rational_estimator,
    rational_standard_error,
    setting_stream,
    simulate_counts,
    simulate_setting_counts,
    unnormalized_estimator,
    unnormalized_standard_error,
)
from spacebell.spin import (
    TSIRELSON,
    ChshSettings,
    TwoQubitState,
    UnitVector3,
    correlation_spin,
    singlet_state,
    spin_observable,
)

Z = UnitVector3(0, 0, 1)
X = UnitVector3(1, 0, 0)


def eigenbasis_oracle(state, a, b):
    """|<u_s1 (x) v_s2 | psi>|^2 from eigenvectors, no projector algebra."""
    wa, va = np.linalg.eigh(spin_observable(a))
    wb, vb = np.linalg.eigh(spin_observable(b))
    out = []
    for s1 in (1, -1):
        u = va[:, np.argmin(np.abs(wa - s1))]
        for s2 in (1, -1):
            v = vb[:, np.argmin(np.abs(wb - s2))]
            out.append(abs(np.vdot(np.kron(u, v), state.amplitudes)) ** 2)
    return np.array(out)


def random_unit(rng):
    return UnitVector3.normalized(rng.normal(size=3))


class TestJointProbabilities:
    def test_singlet_parallel(self):
        np.testing.assert_allclose(joint_probabilities(singlet_state(), Z, Z), [0, 0.5, 0.5, 0], atol=1e-15)

    def test_singlet_perpendicular(self):
        np.testing.assert_allclose(joint_probabilities(singlet_state(), Z, X), [0.25] * 4, atol=1e-15)

    def test_singlet_formula(self):
        rng = np.random.default_rng(0)
        worst = 0.0
        for _ in range(10_000):
            a, b = random_unit(rng), random_unit(rng)
            d = a.dot(b)
            expected = np.array([1 - d, 1 + d, 1 + d, 1 - d]) / 4
            worst = max(worst, np.max(np.abs(joint_probabilities(singlet_state(), a, b) - expected)))
        assert worst < 1e-12

    def test_matches_eigenbasis_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(500):
            psi = TwoQubitState.random(rng)
            a, b = random_unit(rng), random_unit(rng)
            p = joint_probabilities(psi, a, b)
            np.testing.assert_allclose(p, eigenbasis_oracle(psi, a, b), atol=1e-12)
            assert p.sum() == pytest.approx(1.0, abs=1e-12)
            signed = p @ np.array([1, -1, -1, 1])
            assert signed == pytest.approx(correlation_spin(psi, a, b), abs=1e-12)


class TestCountsTable:
    def test_detected_and_sum(self):
        c = CountsTable(1, 2, 3, 4, 20) + CountsTable(0, 1, 0, 1, 5)
        assert c == CountsTable(1, 3, 3, 5, 25)
        assert c.detected == 12

    @pytest.mark.parametrize("args", [(-1, 0, 0, 0, 1), (1, 1, 1, 1, 3), (0, 0, 0, 0, 0)])
    def test_invalid(self, args):
        with pytest.raises(ValueError):
            CountsTable(*args)


class TestSimulateCounts:
    P = np.array([0.1, 0.4, 0.3, 0.2])

    def test_g_zero(self):
        c = simulate_counts(self.P, 1000, 0.0, seed=1)
        assert c.detected == 0 and c.n_emitted == 1000

    def test_g_one_detects_all(self):
        assert simulate_counts(self.P, 1000, 1.0, seed=1).detected == 1000

    def test_binomial_concentration(self):
        n, g = 200_000, 0.3
        c = simulate_counts(self.P, n, g, seed=7)
        p_eff = g * self.P
        obs = np.array([c.n_pp, c.n_pm, c.n_mp, c.n_mm])
        sd = np.sqrt(n * p_eff * (1 - p_eff))
        assert np.all(np.abs(obs - n * p_eff) < 3 * sd)
        assert abs(c.detected - n * g) < 3 * math.sqrt(n * g * (1 - g))

    def test_singlet_perpendicular_counts(self):
        n = 1_000_000
        c = simulate_counts(joint_probabilities(singlet_state(), Z, X), n, 1.0, seed=5)
        bound = 3 * math.sqrt(n * 0.25 * 0.75)
        assert all(abs(k - n / 4) < bound for k in (c.n_pp, c.n_pm, c.n_mp, c.n_mm))

    def test_deterministic(self):
        assert simulate_counts(self.P, 5000, 0.5, seed=3) == simulate_counts(self.P, 5000, 0.5, seed=3)
        assert simulate_counts(self.P, 5000, 0.5, seed=3) != simulate_counts(self.P, 5000, 0.5, seed=4)
        assert simulate_counts(self.P, 5000, 0.5, seed=3, stream=1) != simulate_counts(self.P, 5000, 0.5, seed=3)

    def test_high_seeds_are_distinct_keys(self):
        top = [simulate_counts(self.P, 5000, 0.5, seed=s) for s in (0, 2**63, 2**64 - 2, 2**64 - 1)]
        assert len(set(top)) == 4

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 20_000), st.integers(1, 17), st.integers(1, 4), st.integers(0, 2**64 - 1), st.floats(0, 1))
    def test_shard_and_worker_invariance(self, n, shards, workers, seed, g):
        base = simulate_counts(self.P, n, g, seed)
        assert simulate_counts(self.P, n, g, seed, shards=shards, workers=workers) == base

    def test_prefix_consistency(self):
        # the first k pairs do not depend on how many pairs follow
        whole = simulate_counts(self.P, 1000, 0.5, seed=9)
        head = simulate_counts(self.P, 500, 0.5, seed=9)
        tail = CountsTable(*(int(v) for v in _count_range(self.P, 0.5, 9, 0, 500, 1000)), n_emitted=500)
        assert head + tail == whole

    @pytest.mark.parametrize("probs", [[0.5, 0.5, 0.5, 0.0], [-0.1, 0.5, 0.3, 0.3], [1.0, 0.0, 0.0]])
    def test_invalid_probs(self, probs):
        with pytest.raises(ValueError):
            simulate_counts(probs, 10, 0.5, seed=0)

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            simulate_counts(self.P, 10, 1.5, seed=0)
        with pytest.raises(ValueError):
            simulate_counts(self.P, 0, 0.5, seed=0)
        with pytest.raises(ValueError):
            simulate_counts(self.P, 10, 0.5, seed=-1)
        with pytest.raises(ValueError):
            simulate_counts(self.P, 10, 0.5, seed=2**64)


class TestEstimators:
    def test_examples(self):
        c = CountsTable(40, 10, 10, 40, 200)
        assert rational_estimator(c) == pytest.approx(0.6)
        assert unnormalized_estimator(c) == pytest.approx(0.3)
        assert rational_standard_error(c) == pytest.approx(math.sqrt(0.64 / 100))
        # per-pair values: 80 at +1, 20 at -1, 100 at 0
        x = np.r_[np.ones(80), -np.ones(20), np.zeros(100)]
        assert unnormalized_standard_error(c) == pytest.approx(x.std() / math.sqrt(200))

    def test_rational_extremes(self):
        assert rational_estimator(CountsTable(0, 7, 7, 0, 20)) == -1.0
        assert rational_estimator(CountsTable(3, 3, 3, 3, 20)) == 0.0

    def test_unnormalized_full_detection_identity(self):
        c = simulate_counts(joint_probabilities(singlet_state(), Z, UnitVector3.in_plane(1.0)), 10_000, 1.0, seed=2)
        assert unnormalized_estimator(c) == pytest.approx(rational_estimator(c) * c.detected / c.n_emitted)

    def test_unnormalized_thinned_singlet(self):
        n, g = 1_000_000, 0.1
        probs = joint_probabilities(singlet_state(), Z, UnitVector3.in_plane(math.pi / 4))
        c = simulate_counts(probs, n, g, seed=21)
        assert abs(unnormalized_estimator(c) - g * (-math.sqrt(2) / 2)) < 3 * unnormalized_standard_error(c)

    def test_no_data(self):
        c = CountsTable(0, 0, 0, 0, 10)
        with pytest.raises(NoDataError):
            rational_estimator(c)
        assert unnormalized_estimator(c) == 0.0

    def test_scaling_invariance(self):
        c, c3 = CountsTable(5, 1, 2, 7, 50), CountsTable(15, 3, 6, 21, 150)
        assert rational_estimator(c3) == pytest.approx(rational_estimator(c))
        assert unnormalized_estimator(c3) == pytest.approx(unnormalized_estimator(c))

    def test_rational_mean_invariant_under_thinning(self):
        probs = joint_probabilities(singlet_state(), Z, UnitVector3.in_plane(math.pi / 3))
        true_e = probs @ np.array([1, -1, -1, 1])
        n = 20_000
        runs = {}
        for g in (1.0, 0.3, 0.1, 0.05):
            est = np.array([rational_estimator(simulate_counts(probs, n, g, seed=s)) for s in range(100)])
            se = math.sqrt((1 - true_e**2) / (n * g)) / math.sqrt(100)
            assert abs(est.mean() - true_e) < 4 * se
            runs[g] = est
        pooled = math.sqrt(runs[0.1].var(ddof=1) / 100 + runs[1.0].var(ddof=1) / 100)
        assert abs(runs[0.1].mean() - runs[1.0].mean()) < 3 * pooled

    def test_unnormalized_scales_with_g(self):
        probs = joint_probabilities(singlet_state(), Z, Z)
        gs = np.linspace(0.1, 1.0, 10)
        e = [unnormalized_estimator(simulate_counts(probs, 200_000, g, seed=11)) for g in gs]
        slope = np.polyfit(gs, e, 1)[0]
        assert slope == pytest.approx(-1.0, rel=0.02)


class TestEstimateBell:
    def test_streams_distinct(self):
        ids = {setting_stream(k, p) for k in range(4) for p in range(100)}
        assert len(ids) == 400

    def test_singlet_full_detection(self):
        est = estimate_bell(singlet_state(), ChshSettings.optimal_singlet(), 100_000, 1.0, seed=1)
        assert abs(est.rational - TSIRELSON) < 3 * est.rational_se
        assert est.rational == pytest.approx(est.unnormalized)

    def test_singlet_low_detection(self):
        g = 0.1
        est = estimate_bell(singlet_state(), ChshSettings.optimal_singlet(), 200_000, g, seed=2)
        assert abs(est.rational - TSIRELSON) < 4 * est.rational_se
        assert abs(est.unnormalized - g * TSIRELSON) < 4 * est.unnormalized_se
        assert est.unnormalized < 2

    def test_product_state_local(self):
        up = TwoQubitState.up_up()
        est = estimate_bell(up, ChshSettings.optimal_singlet(), 100_000, 1.0, seed=3)
        assert est.rational <= 2 + 3 * est.rational_se

    def test_no_data_raises(self):
        with pytest.raises(NoDataError):
            estimate_bell(singlet_state(), ChshSettings.optimal_singlet(), 100, 0.0, seed=0)

    def test_sharded_identical(self):
        s = ChshSettings.optimal_singlet()
        a = simulate_setting_counts(singlet_state(), s, 30_000, 0.4, seed=5, point_index=3)
        b = simulate_setting_counts(singlet_state(), s, 30_000, 0.4, seed=5, point_index=3, shards=7, workers=3)
        assert a == b

    def test_unnormalized_correlators(self):
        est = estimate_bell(singlet_state(), ChshSettings.optimal_singlet(), 50_000, 1.0, seed=4)
        e = est.unnormalized_correlators()
        assert abs(float(np.array([1, -1, 1, 1]) @ e)) == pytest.approx(est.unnormalized)
