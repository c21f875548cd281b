"""Policy protocol behavior, frozen schedule values, and per-trial audits
that recompute every elimination/stop decision from the recorded log with
independent batch formulas.
"""

import math

import numpy as np
import pytest

from dvbandit import (CostConfig, Instance, NonTerminationError, PolicyConfig,
                      PolicyKind, RngStream, SampleSet, Stop, baseline_radius,
                      confidence_radius, make_policy, run_trial,
                      sample_reward, sampling_period, weight, wtcs_schedule)
from dvbandit.policies import (LucbPolicy, PswsePolicy, SePolicy, WtcsPolicy)

CFG = CostConfig(c=1.0, delta=0.1)


class TestPolicyConfig:
    def test_wtcs_requires_gap(self):
        with pytest.raises(ValueError, match="known_gap"):
            PolicyConfig(kind=PolicyKind.WTCS)
        with pytest.raises(ValueError):
            PolicyConfig(kind=PolicyKind.WTCS, known_gap=-1.0)

    def test_others_reject_gap(self):
        for kind in (PolicyKind.PSWSE, PolicyKind.SE, PolicyKind.LUCB):
            with pytest.raises(ValueError, match="known_gap"):
                PolicyConfig(kind=kind, known_gap=0.5)

    def test_string_kind_is_coerced(self):
        assert PolicyConfig(kind="se").kind is PolicyKind.SE


class TestSingleArm:
    @pytest.mark.parametrize("kind", ["wtcs", "pswse", "se", "lucb"])
    def test_immediate_stop(self, kind):
        gap = 1.0 if kind == "wtcs" else None
        cfg = PolicyConfig(kind=kind, known_gap=gap)
        pol = make_policy(cfg, 1, 10.0, CFG)
        decision = pol.decide(0, ())
        assert decision == Stop(1)
        assert pol.declared_arm() == 1

    @pytest.mark.parametrize("kind", ["wtcs", "pswse", "se", "lucb"])
    def test_zero_cost_trial(self, kind):
        gap = 1.0 if kind == "wtcs" else None
        cfg = PolicyConfig(kind=kind, known_gap=gap)
        result = run_trial(Instance(means=(3.0,), sigma=5.0), cfg, CFG, 11, 0)
        assert (result.tau, result.eta, result.cost) == (0, 0, 0.0)
        assert result.correct


class TestWtcs:
    def test_benchmark_schedule(self):
        wait_end, window = wtcs_schedule(0.5, 10.0, 5, CFG)
        assert (wait_end, window) == (177, 36)

    def test_waits_then_samples_everything_then_stops(self, base_instance):
        cfg = PolicyConfig(kind="wtcs", known_gap=0.5)
        pol = make_policy(cfg, 5, 10.0, CFG)
        stream = RngStream(3, 0)
        decision = pol.decide(0, ())
        t = 0
        sampled_rounds = []
        while isinstance(decision, SampleSet):
            t += 1
            rewards = tuple(sample_reward(base_instance, a, t, stream)
                            for a in decision.arms)
            if decision.arms:
                sampled_rounds.append(t)
                assert decision.arms == (1, 2, 3, 4, 5)
            decision = pol.decide(t, rewards)
        assert t == 213
        assert sampled_rounds == list(range(178, 214))
        assert decision.arm == pol.declared_arm()

    def test_declared_is_window_mean_argmax(self):
        pol = WtcsPolicy(2, 10.0, CFG, known_gap=2.1)
        pol.wait_end, pol.window, pol.t_end = 0, 1, 1  # one-round window
        decision = pol.decide(0, ())
        assert decision == SampleSet((1, 2))
        assert pol.decide(1, (2.1, 1.9)) == Stop(1)
        assert pol.window_means() == [2.1, 1.9]

    def test_tie_breaks_to_lowest_index(self):
        pol = WtcsPolicy(3, 10.0, CFG, known_gap=1.0)
        pol.wait_end, pol.window, pol.t_end = 0, 1, 1
        pol.decide(0, ())
        assert pol.decide(1, (1.5, 2.5, 2.5)) == Stop(2)

    def test_decide_after_stop_is_a_contract_error(self):
        pol = WtcsPolicy(2, 10.0, CFG, known_gap=2.0)
        pol.wait_end, pol.window, pol.t_end = 0, 1, 1
        pol.decide(0, ())
        pol.decide(1, (1.0, 0.0))
        with pytest.raises(RuntimeError, match="contract"):
            pol.decide(2, ())

    def test_declared_arm_before_stop_is_an_error(self):
        pol = WtcsPolicy(2, 10.0, CFG, known_gap=2.0)
        with pytest.raises(RuntimeError):
            pol.declared_arm()


class TestPswse:
    def test_first_sampling_round_at_lambda(self):
        pol = PswsePolicy(5, 10.0, CFG)
        assert pol.lam == 5
        decision = pol.decide(0, ())
        assert decision == SampleSet(())
        for t in range(1, 4):
            decision = pol.decide(t, ())
            assert decision == SampleSet(())
        assert pol.decide(4, ()) == SampleSet((1, 2, 3, 4, 5))

    def test_samples_only_at_multiples_of_lambda(self, base_instance, base_cost):
        cfg = PolicyConfig(kind="pswse")
        result = run_trial(base_instance, cfg, base_cost, 5, 3, record_log=True)
        lam = sampling_period(5, base_cost)
        assert all(rec.t % lam == 0 for rec in result.log)
        assert result.eta == sum(len(rec.arms) for rec in result.log)
        assert result.tau % lam == 0

    def test_incremental_estimate_matches_direct_weighted_sum(self):
        rng = np.random.default_rng(7)
        samples = rng.normal(size=60)
        pol = PswsePolicy(2, 10.0, CFG)
        lam = pol.lam  # 2
        # drive arm-1 rewards from `samples`, arm 2 mirrors negated samples
        t = 0
        decision = pol.decide(0, ())
        r = 0
        while r < 30 and not isinstance(decision, Stop):
            t += 1
            if isinstance(decision, SampleSet) and decision.arms:
                r += 1
                rewards = []
                for arm in decision.arms:
                    rewards.append(samples[r - 1] if arm == 1 else -samples[r - 1])
                decision = pol.decide(t, tuple(rewards))
                if pol.is_terminal:
                    break
                batch = sum(weight(tau, r) * samples[tau - 1]
                            for tau in range(1, r + 1))
                assert pol.estimates[0] == pytest.approx(batch, abs=1e-10)
            else:
                decision = pol.decide(t, ())

    def test_two_point_estimate_example(self):
        # samples 1.0 then 2.0 give (1/3)*1 + (2/3)*2 = 5/3
        pol = PswsePolicy(2, 10.0, CostConfig(c=1.0, delta=0.1))
        assert pol.lam == 2
        pol.decide(0, ())
        pol.decide(1, ())
        pol.decide(2, (1.0, 0.9))    # r=1; both arms stay active
        assert not pol.is_terminal
        pol.decide(3, ())
        pol.decide(4, (2.0, 1.8))    # r=2
        assert pol.estimates[0] == pytest.approx(5.0 / 3.0, abs=1e-12)

    def test_immediate_stop_when_first_draw_clears_threshold(self):
        # K=2: stop at t=lambda iff X_2 < X_1 - 2*U_lambda; hand-check both sides
        inst = Instance(means=(10.0, 0.0), sigma=1.0)
        cfg = PolicyConfig(kind="pswse")
        lam = sampling_period(2, CFG)
        threshold = 2.0 * confidence_radius(lam, lam, inst.sigma, 2, CFG)
        stream = RngStream(99, 0)
        x1 = sample_reward(inst, 1, lam, stream)
        x2 = sample_reward(inst, 2, lam, stream)
        assert x2 < x1 - threshold  # the means are 10 apart, sigma=1
        result = run_trial(inst, cfg, CFG, 99, 0, record_log=True)
        assert result.tau == lam
        assert result.declared == 1
        assert result.eta == 2

    def test_leader_is_never_eliminated(self, base_instance, base_cost):
        cfg = PolicyConfig(kind="pswse")
        for trial in range(20):
            result = run_trial(base_instance, cfg, base_cost, 17, trial,
                               record_log=True)
            actives = [rec.arms for rec in result.log]
            for prev, cur in zip(actives, actives[1:]):
                assert set(cur) <= set(prev)
                assert len(cur) >= 1
            assert (result.declared,) == tuple(actives[-1]) or \
                result.declared in actives[-1]


def _se_log_audit(inst, cost_cfg, result):
    """Recompute SE statistics from the log and re-derive every elimination."""
    k = inst.num_arms
    active = set(range(1, k + 1))
    sums = np.zeros(k)
    inv_t = 0.0
    for rec in result.log:
        assert tuple(sorted(active)) == rec.arms
        inv_t += 1.0 / rec.t
        for arm, x in zip(rec.arms, rec.rewards):
            sums[arm - 1] += x
        n = rec.t
        radius = math.sqrt(2.0 * (inst.sigma**2 / n**2 * inv_t)
                           * math.log(4 * k * n**2 / cost_cfg.delta))
        means = {j: sums[j - 1] / n for j in active}
        leader_mean = max(means.values())
        eliminated = {j for j in active if leader_mean - means[j] > 2 * radius}
        active -= eliminated
        if len(active) == 1:
            break
    assert active == {result.declared}
    assert result.tau == result.log[-1].t


class TestSe:
    def test_samples_all_active_arms_every_round(self, base_instance, base_cost):
        cfg = PolicyConfig(kind="se")
        result = run_trial(base_instance, cfg, base_cost, 23, 0, record_log=True)
        assert [rec.t for rec in result.log] == list(range(1, result.tau + 1))
        sizes = [len(rec.arms) for rec in result.log]
        assert sizes[0] == 5
        assert all(a >= b for a, b in zip(sizes, sizes[1:]))
        assert result.eta == sum(sizes)

    @pytest.mark.parametrize("trial", range(8))
    def test_eliminations_match_independent_recomputation(
            self, base_instance, base_cost, trial):
        cfg = PolicyConfig(kind="se")
        result = run_trial(base_instance, cfg, base_cost, 31, trial,
                           record_log=True)
        _se_log_audit(base_instance, base_cost, result)


def _lucb_log_audit(inst, cost_cfg, result):
    """Recompute LUCB statistics from the log; check sampling and the stop."""
    k = inst.num_arms
    n = np.zeros(k, dtype=int)
    sums = np.zeros(k)
    inv_t = np.zeros(k)
    assert result.log[0].arms == tuple(range(1, k + 1))

    def bounds_now():
        means = sums / n
        radii = np.array([
            math.sqrt(2.0 * (inst.sigma**2 / n[j]**2 * inv_t[j])
                      * math.log(4 * k * n[j]**2 / cost_cfg.delta))
            for j in range(k)])
        return means, radii

    for idx, rec in enumerate(result.log):
        for arm, x in zip(rec.arms, rec.rewards):
            n[arm - 1] += 1
            sums[arm - 1] += x
            inv_t[arm - 1] += 1.0 / rec.t
        means, radii = bounds_now()
        leader = int(np.argmax(means))
        others = [j for j in range(k) if j != leader]
        challenger = others[int(np.argmax([means[j] + radii[j] for j in others]))]
        stopped = means[leader] - radii[leader] >= means[challenger] + radii[challenger]
        if idx + 1 < len(result.log):
            assert not stopped
            assert result.log[idx + 1].arms == tuple(
                sorted((leader + 1, challenger + 1)))
        else:
            assert stopped
            assert result.declared == leader + 1


class TestLucb:
    def test_round_one_samples_every_arm_then_pairs(self, base_instance,
                                                    base_cost):
        cfg = PolicyConfig(kind="lucb")
        result = run_trial(base_instance, cfg, base_cost, 77, 0, record_log=True)
        assert result.log[0].arms == (1, 2, 3, 4, 5)
        assert all(len(rec.arms) == 2 for rec in result.log[1:])
        assert result.eta == 5 + 2 * (result.tau - 1)

    @pytest.mark.parametrize("trial", range(5))
    def test_decisions_match_independent_recomputation(
            self, base_instance, base_cost, trial):
        cfg = PolicyConfig(kind="lucb")
        result = run_trial(base_instance, cfg, base_cost, 41, trial,
                           record_log=True)
        _lucb_log_audit(base_instance, base_cost, result)


class TestBaselineRadius:
    def test_matches_exact_variance_formula(self):
        sigma, k, delta = 10.0, 5, 0.1
        n = 7
        inv_t = sum(1.0 / t for t in range(1, n + 1))
        expected = math.sqrt(2 * (sigma**2 * inv_t / n**2)
                             * math.log(4 * k * n**2 / delta))
        assert baseline_radius(sigma, n, inv_t, k, delta) == pytest.approx(
            expected, rel=1e-15)

    def test_radius_shrinks_with_rounds(self):
        inv_t = 0.0
        prev = math.inf
        for n in range(1, 2000):
            inv_t += 1.0 / n
            r = baseline_radius(10.0, n, inv_t, 5, 0.1)
            if n > 2:
                assert r < prev
            prev = r


class TestMaxRounds:
    def test_pswse_hits_cap(self, base_instance, base_cost):
        cfg = PolicyConfig(kind="pswse", max_rounds=8)
        with pytest.raises(NonTerminationError):
            run_trial(base_instance, cfg, base_cost, 1, 0)

    def test_cap_error_carries_partial_log(self, base_instance, base_cost):
        cfg = PolicyConfig(kind="se", max_rounds=5)
        with pytest.raises(NonTerminationError) as excinfo:
            run_trial(base_instance, cfg, base_cost, 1, 0, record_log=True)
        assert excinfo.value.round_log
        assert excinfo.value.round_log[-1].t == 5
