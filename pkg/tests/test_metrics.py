import math

import numpy as np
import pytest

import multidist as md


def oracle_error(labels, dist):
    """Independent oracle: enumerate every (x, y) outcome directly."""
    total = 0.0
    for x in range(dist.domain_size):
        for y, p_y in ((1, dist.label_one_prob[x]), (-1, 1.0 - dist.label_one_prob[x])):
            if labels[x] != y:
                total += dist.mass[x] * p_y
    return total


def random_family(rng, n=9, k=3, shared=True):
    masses = rng.random((k, n))
    masses /= masses.sum(axis=1, keepdims=True)
    if shared:
        eta = rng.random(n)
        return md.family_from_arrays(masses, eta)
    return md.family_from_arrays(masses, rng.random((k, n)))


def test_error_point_mass_examples():
    fam, cls, _ = md.gen_gap_example(4)
    # h_i on its own point-mass distribution errs surely; on others never
    assert md.error_on_distribution(cls.hypotheses[0], fam.members[0]) == 1.0
    assert md.error_on_distribution(cls.hypotheses[1], fam.members[0]) == 0.0


def test_error_half_labels_give_half():
    fam = md.family_from_arrays([[0.2, 0.3, 0.5]], [[0.5, 0.5, 0.5]])
    for labels in ([1, 1, 1], [-1, -1, -1], [1, -1, 1]):
        assert md.error_on_distribution(md.Hypothesis(labels), fam.members[0]) == pytest.approx(0.5, abs=1e-15)


def test_error_matches_independent_oracle():
    rng = np.random.default_rng(21)
    for _ in range(25):
        fam = random_family(rng, shared=False)
        labels = np.where(rng.random(9) < 0.5, 1, -1).astype(np.int8)
        h = md.Hypothesis(labels)
        for member in fam.members:
            assert md.error_on_distribution(h, member) == pytest.approx(
                oracle_error(labels, member), abs=1e-14)


def test_error_domain_mismatch():
    fam = md.family_from_arrays([[1.0]], [[1.0]])
    with pytest.raises(ValueError):
        md.error_on_distribution(md.Hypothesis([1, 1]), fam.members[0])


def test_worst_case_gap_example():
    fam, cls, _ = md.gen_gap_example(5)
    for h in cls.hypotheses:
        assert md.worst_case_error(h, fam).worst_case == 1.0


def test_worst_case_realizable_zero():
    fam = md.family_from_arrays([[0.5, 0.5], [0.1, 0.9]], [1.0, 1.0])
    assert md.worst_case_error(md.Hypothesis([1, 1]), fam).worst_case == 0.0


def test_worst_case_matches_oracle_on_random_instance():
    rng = np.random.default_rng(33)
    fam = random_family(rng, n=7, k=3, shared=False)
    labels = np.where(rng.random(7) < 0.5, 1, -1).astype(np.int8)
    report = md.worst_case_error(md.Hypothesis(labels), fam)
    direct = [oracle_error(labels, m) for m in fam.members]
    assert list(report.per_distribution) == pytest.approx(direct, abs=1e-14)
    assert report.worst_case == max(report.per_distribution)
    assert report.argmax_index == int(np.argmax(direct))


def test_error_report_tie_breaks_to_lowest_index():
    r = md.ErrorReport.from_errors([0.3, 0.7, 0.7])
    assert r.argmax_index == 1 and r.worst_case == 0.7


def test_randomized_error_gap_example():
    fam, cls, F = md.gen_gap_example(6)
    assert md.randomized_worst_case_error(F, fam) == pytest.approx(1.0 / 6.0, abs=1e-15)
    assert md.support_worst_case(F, fam) == 1.0


def test_randomized_error_singleton_equals_plain():
    rng = np.random.default_rng(4)
    fam = random_family(rng)
    labels = np.where(rng.random(9) < 0.5, 1, -1).astype(np.int8)
    cls = md.HypothesisClass((md.Hypothesis(labels),))
    F = md.RandomizedClassifier(cls, (0,), np.array([1.0]))
    assert md.randomized_worst_case_error(F, fam) == pytest.approx(
        md.worst_case_error(cls.hypotheses[0], fam).worst_case, abs=1e-15)


def test_randomized_error_two_point_brute_force():
    fam = md.family_from_arrays([[0.4, 0.6]], [[0.8, 0.1]])
    cls = md.HypothesisClass((md.Hypothesis([1, -1]), md.Hypothesis([-1, 1])))
    F = md.RandomizedClassifier(cls, (0, 1), np.array([0.3, 0.7]))
    # brute force over support x domain x labels
    expected = 0.0
    for w, h in zip((0.3, 0.7), cls.hypotheses):
        expected += w * oracle_error(h.labels, fam.members[0])
    assert md.randomized_worst_case_error(F, fam) == pytest.approx(expected, abs=1e-15)


def test_randomized_error_rejects_bad_weights():
    cls = md.HypothesisClass((md.Hypothesis([1]),))
    F = md.RandomizedClassifier(cls, (0,), np.array([0.5]))
    fam = md.family_from_arrays([[1.0]], [[1.0]])
    with pytest.raises(ValueError):
        md.randomized_worst_case_error(F, fam)


def test_randomized_error_linear_in_weights():
    rng = np.random.default_rng(17)
    fam = random_family(rng, n=8, k=4)
    cls = md.HypothesisClass(tuple(
        md.Hypothesis(np.where(rng.random(8) < 0.5, 1, -1).astype(np.int8)) for _ in range(5)
    ))
    err_matrix = np.array([[md.error_on_distribution(h, m) for m in fam.members]
                           for h in cls.hypotheses])
    w = rng.random(5)
    w /= w.sum()
    F = md.RandomizedClassifier(cls, tuple(range(5)), w)
    assert md.randomized_per_distribution(F, fam) == pytest.approx(w @ err_matrix, abs=1e-13)


def test_support_dominates_mixture_property():
    rng = np.random.default_rng(9)
    for _ in range(10):
        fam = random_family(rng, n=6, k=3)
        cls = md.HypothesisClass(tuple(
            md.Hypothesis(np.where(rng.random(6) < 0.5, 1, -1).astype(np.int8)) for _ in range(4)
        ))
        w = rng.random(4)
        w /= w.sum()
        F = md.RandomizedClassifier(cls, tuple(range(4)), w)
        assert md.randomized_worst_case_error(F, fam) <= md.support_worst_case(F, fam) + 1e-12


def test_exceedance_probability_gap():
    fam, cls, F = md.gen_gap_example(8)
    for member in fam.members:
        assert md.exceedance_probability(F, member, 1.0) == pytest.approx(0.125, abs=1e-15)


def test_opt_gap_example_is_one():
    fam, cls, _ = md.gen_gap_example(4)
    opt, idx = md.opt_bruteforce(cls, fam)
    assert opt == 1.0 and idx == 0


def test_opt_bayes_in_class_attains_bayes():
    spec = md.GenSpec(kind="bayes_in_class", domain_size=10, k=1, hypothesis_count=5, seed=2)
    fam, cls = md.gen_random_label_consistent(spec)
    eta = fam.members[0].label_one_prob
    bayes_err = float((fam.members[0].mass * np.minimum(eta, 1.0 - eta)).sum())
    opt, _ = md.opt_bruteforce(cls, fam)
    assert opt == pytest.approx(bayes_err, abs=1e-12)


def test_opt_matches_independent_enumeration():
    rng = np.random.default_rng(51)
    fam = random_family(rng, n=8, k=3, shared=False)
    cls = md.HypothesisClass(tuple(
        md.Hypothesis(np.where(rng.random(8) < 0.5, 1, -1).astype(np.int8)) for _ in range(16)
    ))
    opt, idx = md.opt_bruteforce(cls, fam)
    reports = [max(oracle_error(h.labels, m) for m in fam.members) for h in cls.hypotheses]
    assert opt == pytest.approx(min(reports), abs=1e-14)
    assert idx == int(np.argmin(reports))
    for h in cls.hypotheses:
        assert opt <= md.worst_case_error(h, fam).worst_case + 1e-15


def test_bias_values():
    fam = md.family_from_arrays([[0.25, 0.25, 0.5]], [[1.0, 0.5, 0.8]])
    assert md.bias(0, fam) == 0.5
    assert md.bias(1, fam) == 0.0
    assert md.bias(2, fam) == pytest.approx(0.3, abs=1e-12)


def test_bias_rejects_inconsistent_family():
    A = md.BinaryMatrix(np.array([[1, 1], [1, 0]]))
    rf = md.matrix_to_family(A)
    with pytest.raises(md.LabelConsistencyError):
        md.bias(0, rf.family)


def test_heavy_bias_zero_bias_never_heavy():
    fam = md.family_from_arrays([[1.0]], [[0.5]])
    assert not md.is_heavily_biased(0, fam, 0.1, 0.1)


def test_heavy_bias_derived_example():
    # beta = 1/2, D_1(x) = 1, k = 1: 0.25 > 0.01 / (8 ln 40)
    fam = md.family_from_arrays([[1.0]], [[1.0]])
    rhs = 0.1**2 / (8.0 * math.log(4 * 1 / 0.1))
    assert 0.25 > rhs
    assert md.is_heavily_biased(0, fam, 0.1, 0.1)


def test_heavy_bias_boundary_is_strict():
    # mass chosen so beta^2 * mass equals the threshold bit-exactly
    thresh = md.heavy_bias_threshold(0.1, 0.1, 1)
    mass = thresh * 4.0  # beta = 1/2 -> beta^2 = 0.25, exact in floats
    fam = md.family_from_arrays([[mass, 1.0 - mass]], [[1.0, 0.5]])
    assert (0.5**2) * fam.members[0].mass[0] == thresh
    assert not md.is_heavily_biased(0, fam, 0.1, 0.1)


def test_heavy_bias_hash_variant_threshold():
    explicit = md.heavy_bias_threshold(0.1, 0.1, 4, "explicit")
    hashed = md.heavy_bias_threshold(0.1, 0.1, 4, "hash", c_prime=4.0)
    log_term = math.log(160.0)
    assert explicit == pytest.approx(0.01 / (8 * log_term), rel=1e-15)
    assert hashed == pytest.approx(0.01 / (4.0 * log_term**2), rel=1e-15)


def test_bayes_labeling_is_optimal_for_single_distribution():
    rng = np.random.default_rng(8)
    n = 9
    mass = rng.random(n)
    mass /= mass.sum()
    eta = rng.random(n)
    fam = md.family_from_arrays([mass], eta)
    bayes = md.bayes_labels(fam)
    bayes_err = md.error_on_distribution(md.Hypothesis(bayes), fam.members[0])
    # enumerate all 2^n labelings
    best = min(
        oracle_error(np.array([1 if (code >> j) & 1 else -1 for j in range(n)]), fam.members[0])
        for code in range(2**n)
    )
    assert bayes_err == pytest.approx(best, abs=1e-12)


def test_bayes_labeling_attains_pointwise_floor_per_member():
    rng = np.random.default_rng(13)
    fam = random_family(rng, n=10, k=4)
    bayes = md.Hypothesis(md.bayes_labels(fam))
    eta = fam.shared_label_one_prob
    for m in fam.members:
        floor = float((m.mass * np.minimum(eta, 1.0 - eta)).sum())
        assert md.error_on_distribution(bayes, m) == pytest.approx(floor, abs=1e-12)


def test_shattering_full_class():
    cls = md.full_labeling_class(3)
    assert md.shattering_check(cls, [0, 1, 2])
    assert md.vc_dim_bruteforce(cls) == 3


def test_constant_class_vc_zero():
    cls = md.HypothesisClass((md.Hypothesis([1, 1, 1]),))
    assert md.vc_dim_bruteforce(cls) == 0
    assert not md.shattering_check(cls, [0])


def test_gap_class_shatters_no_pair():
    _, cls, _ = md.gen_gap_example(5)
    # no hypothesis assigns -1 to two points, so (-1, -1) is never realized
    for i in range(5):
        for j in range(i + 1, 5):
            assert not md.shattering_check(cls, [i, j])
    assert md.vc_dim_bruteforce(cls) == 1


def test_shattering_size_limits():
    cls = md.full_labeling_class(2)
    with pytest.raises(ValueError):
        md.shattering_check(cls, list(range(21)))
