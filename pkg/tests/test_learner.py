import math

import numpy as np
import pytest

import multidist as md
from multidist.learner import _mixture


def test_draw_point_mass_always_hits():
    dist = md.LabeledDistribution([0, 0, 0, 1.0], [0.5, 0.5, 0.5, 1.0])
    rng = np.random.default_rng(0)
    for _ in range(50):
        x, y = md.draw_sample(dist, rng)
        assert (x, y) == (3, 1)


def test_draw_label_zero_prob_gives_minus():
    dist = md.LabeledDistribution([0.5, 0.5], [0.0, 0.0])
    xs, ys = md.draw_batch(dist, 200, np.random.default_rng(1))
    assert np.all(ys == -1)


def test_draw_uniform_frequencies():
    dist = md.LabeledDistribution([0.25] * 4, [0.5] * 4)
    xs, _ = md.draw_batch(dist, 100_000, np.random.default_rng(2))
    freqs = np.bincount(xs, minlength=4) / 100_000
    assert np.all(np.abs(freqs - 0.25) < 0.01)  # ~7 sigma at this sample size


def test_draw_label_frequency_matches_eta():
    dist = md.LabeledDistribution([1.0], [0.7])
    _, ys = md.draw_batch(dist, 100_000, np.random.default_rng(3))
    sigma = math.sqrt(0.7 * 0.3 / 100_000)
    assert abs(np.mean(ys == 1) - 0.7) < 3 * sigma + 1e-9


def test_erm_picks_zero_error_hypothesis():
    mixture = md.LabeledDistribution([0.5, 0.5], [1.0, 1.0])
    cls = md.HypothesisClass((md.Hypothesis([-1, 1]), md.Hypothesis([1, 1])))
    assert md.erm(cls, mixture) == 1


def test_erm_gap_example_tie_breaks_low():
    fam, cls, _ = md.gen_gap_example(4)
    w = np.full(4, 0.25)
    mixture = _mixture(fam, w)
    # every h_i has mixture error 1/k; lowest index wins
    assert md.erm(cls, mixture) == 0


def test_erm_matches_enumeration_oracle():
    rng = np.random.default_rng(11)
    for _ in range(20):
        n = 7
        mass = rng.random(n)
        mass /= mass.sum()
        eta = rng.random(n)
        mixture = md.LabeledDistribution(mass, eta)
        cls = md.HypothesisClass(tuple(
            md.Hypothesis(np.where(rng.random(n) < 0.5, 1, -1).astype(np.int8))
            for _ in range(8)
        ))
        errors = [md.error_on_distribution(h, mixture) for h in cls.hypotheses]
        assert md.erm(cls, mixture) == int(np.argmin(errors))


def test_erm_empirical_sample_equals_empirical_distribution():
    rng = np.random.default_rng(4)
    xs = rng.integers(0, 5, size=100)
    ys = np.where(rng.random(100) < 0.5, 1, -1).astype(np.int8)
    sample = md.EmpiricalSample(xs, ys, 5)
    cls = md.HypothesisClass(tuple(
        md.Hypothesis(np.where(rng.random(5) < 0.5, 1, -1).astype(np.int8)) for _ in range(6)
    ))
    assert md.erm(cls, sample) == md.erm(cls, sample.to_distribution())


def test_erm_rejects_empty_sample():
    sample = md.EmpiricalSample(np.array([], dtype=int), np.array([], dtype=np.int8), 3)
    cls = md.HypothesisClass((md.Hypothesis([1, 1, 1]),))
    with pytest.raises(ValueError):
        md.erm(cls, sample)


def test_mixture_error_is_weighted_member_error():
    rng = np.random.default_rng(7)
    masses = rng.random((3, 6))
    masses /= masses.sum(axis=1, keepdims=True)
    fam = md.family_from_arrays(masses, rng.random((3, 6)))
    w = rng.random(3)
    w /= w.sum()
    mixture = _mixture(fam, w)
    labels = md.Hypothesis(np.where(rng.random(6) < 0.5, 1, -1).astype(np.int8))
    direct = sum(wi * md.error_on_distribution(labels, m) for wi, m in zip(w, fam.members))
    assert md.error_on_distribution(labels, mixture) == pytest.approx(direct, abs=1e-13)


def test_hedge_config_defaults():
    cfg = md.HedgeConfig()
    rounds, eta = cfg.resolve(6, 0.15)
    assert rounds == math.ceil(8 * math.log(6) / 0.15**2)
    assert eta == pytest.approx(math.sqrt(8 * math.log(6) / rounds))
    with pytest.raises(ValueError):
        md.HedgeConfig(rounds=0).resolve(6, 0.15)
    with pytest.raises(ValueError):
        md.HedgeConfig(eta=-1.0).resolve(6, 0.15)


def test_hedge_realizable_instance():
    # constant +1 is perfect; the mixture must be eps-good
    rng = np.random.default_rng(7)
    masses = rng.random((3, 10))
    masses /= masses.sum(axis=1, keepdims=True)
    fam = md.family_from_arrays(masses, np.ones(10))
    cls = md.HypothesisClass((
        md.Hypothesis(np.where(rng.random(10) < 0.5, 1, -1).astype(np.int8)),
        md.Hypothesis(np.ones(10, dtype=np.int8)),
    ))
    F = md.hedge_learn(md.SampleOracle.exact_mode(fam), cls, 0.1, 0.1)
    assert md.randomized_worst_case_error(F, fam) <= 0.1


def test_hedge_gap_example_near_uniform():
    fam, cls, _ = md.gen_gap_example(4)
    F = md.hedge_learn(md.SampleOracle.exact_mode(fam), cls, 0.2, 0.1)
    err = md.randomized_worst_case_error(F, fam)
    opt, _ = md.opt_bruteforce(cls, fam)
    assert opt == 1.0
    assert err <= opt + 0.2
    assert err <= 0.5  # far better than any single hypothesis


def test_hedge_contract_on_random_instances():
    # 20 seeded instances at |X|=40, k=6, |H|=16, eps=0.15, exact mode
    eps = 0.15
    for seed in range(20):
        fam, cls = md.gen_random_label_consistent(
            md.GenSpec(domain_size=40, k=6, hypothesis_count=16, seed=seed))
        F = md.hedge_learn(md.SampleOracle.exact_mode(fam), cls, eps, 0.1)
        opt, _ = md.opt_bruteforce(cls, fam)
        assert md.randomized_worst_case_error(F, fam) <= opt + eps


def test_hedge_weights_stay_on_simplex():
    fam, cls = md.gen_random_label_consistent(md.GenSpec(domain_size=20, k=5, seed=3))
    trace = []
    md.hedge_learn(md.SampleOracle.exact_mode(fam), cls, 0.3, 0.1, trace=trace)
    assert len(trace) >= 1
    for row in trace:
        w = np.array(row.weights)
        assert abs(w.sum() - 1.0) <= 1e-12
        assert np.all(w >= 0)


def test_hedge_no_regret_sanity():
    fam, cls = md.gen_random_label_consistent(md.GenSpec(domain_size=30, k=6, seed=9))
    trace = []
    F = md.hedge_learn(md.SampleOracle.exact_mode(fam), cls, 0.2, 0.1, trace=trace)
    opt, _ = md.opt_bruteforce(cls, fam)
    rounds = len(trace)
    avg_play = np.mean([
        np.dot(row.weights, row.per_distribution_errors) for row in trace
    ])
    assert avg_play <= opt + 3.0 * math.sqrt(math.log(fam.k) / rounds)


def test_hedge_monotone_under_class_superset():
    eps = 0.2
    fam, cls = md.gen_random_label_consistent(md.GenSpec(domain_size=25, k=4,
                                                         hypothesis_count=8, seed=14))
    rng = np.random.default_rng(100)
    extra = tuple(md.Hypothesis(np.where(rng.random(25) < 0.5, 1, -1).astype(np.int8))
                  for _ in range(4))
    bigger = md.HypothesisClass(cls.hypotheses + extra)
    opt_small, _ = md.opt_bruteforce(cls, fam)
    opt_big, _ = md.opt_bruteforce(bigger, fam)
    assert opt_big <= opt_small
    F = md.hedge_learn(md.SampleOracle.exact_mode(fam), bigger, eps, 0.1)
    assert md.randomized_worst_case_error(F, fam) <= opt_big + eps


def test_hedge_returns_merged_uniform_average():
    fam, cls = md.gen_random_label_consistent(md.GenSpec(domain_size=15, k=3, seed=5))
    cfg = md.HedgeConfig(rounds=40)
    trace = []
    F = md.hedge_learn(md.SampleOracle.exact_mode(fam), cls, 0.3, 0.1, cfg, trace=trace)
    counts = {}
    for row in trace:
        counts[row.hypothesis_index] = counts.get(row.hypothesis_index, 0) + 1
    assert set(F.support) == set(counts)
    for idx, w in zip(F.support, F.weights):
        assert w == pytest.approx(counts[idx] / 40)
    assert abs(F.weights.sum() - 1.0) <= 1e-12


def test_hedge_exact_mode_deterministic():
    fam, cls = md.gen_random_label_consistent(md.GenSpec(seed=8))
    oracle = md.SampleOracle.exact_mode(fam)
    F1 = md.hedge_learn(oracle, cls, 0.2, 0.1)
    F2 = md.hedge_learn(oracle, cls, 0.2, 0.1)
    assert F1.support == F2.support
    assert np.array_equal(F1.weights, F2.weights)


def test_hedge_sampling_mode_deterministic_given_seed():
    fam, cls = md.gen_random_label_consistent(md.GenSpec(domain_size=12, k=3, seed=6))
    cfg = md.HedgeConfig(rounds=30, erm_sample_size=50)
    runs = []
    for _ in range(2):
        oracle = md.SampleOracle.sampling_mode(fam, np.random.default_rng(77))
        runs.append(md.hedge_learn(oracle, cls, 0.3, 0.1, cfg))
    assert runs[0].support == runs[1].support
    assert np.array_equal(runs[0].weights, runs[1].weights)


def test_hedge_sampling_mode_learns_realizable():
    rng = np.random.default_rng(15)
    masses = rng.random((3, 8))
    masses /= masses.sum(axis=1, keepdims=True)
    fam = md.family_from_arrays(masses, np.ones(8))
    cls = md.HypothesisClass((
        md.Hypothesis(np.where(rng.random(8) < 0.5, 1, -1).astype(np.int8)),
        md.Hypothesis(np.ones(8, dtype=np.int8)),
    ))
    oracle = md.SampleOracle.sampling_mode(fam, np.random.default_rng(16))
    F = md.hedge_learn(oracle, cls, 0.2, 0.1, md.HedgeConfig(erm_sample_size=100))
    assert md.randomized_worst_case_error(F, fam) <= 0.2


def test_sampling_oracle_hides_masses():
    fam, _, _ = md.gen_gap_example(3)
    oracle = md.SampleOracle.sampling_mode(fam, np.random.default_rng(0))
    with pytest.raises(ValueError):
        oracle.exact_family()
    xs, ys = oracle.draw(0, 10)
    assert np.all(xs == 0) and np.all(ys == 1)


def test_exact_oracle_requires_caller_rng():
    fam, _, _ = md.gen_gap_example(3)
    oracle = md.SampleOracle.exact_mode(fam)
    with pytest.raises(ValueError):
        oracle.draw(0, 5)


def test_hedge_rejects_bad_precision():
    fam, cls, _ = md.gen_gap_example(3)
    with pytest.raises(ValueError):
        md.hedge_learn(md.SampleOracle.exact_mode(fam), cls, 0.0, 0.1)
    with pytest.raises(ValueError):
        md.hedge_learn(md.SampleOracle.exact_mode(fam), cls, 0.1, 1.5)
