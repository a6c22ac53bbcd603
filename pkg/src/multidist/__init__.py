"""multidist: min-max learning over families of discrete distributions.

Exact worst-case error metrics, a Hedge-based randomized learner, a
bias-table derandomizer with explicit or hash-compact rounding, and
binary-matrix hard-instance machinery with exact rational accounting.
"""

from .model import (
    Domain,
    LabeledDistribution,
    DistributionFamily,
    Hypothesis,
    HypothesisClass,
    RandomizedClassifier,
    ExplicitClassifier,
    LabelConsistencyError,
    validate_family,
    validate_hypothesis_class,
    is_label_consistent,
    family_from_arrays,
    full_labeling_class,
)
from .metrics import (
    ErrorReport,
    error_on_distribution,
    worst_case_error,
    randomized_worst_case_error,
    randomized_per_distribution,
    support_worst_case,
    exceedance_probability,
    opt_bruteforce,
    bayes_labels,
    bias,
    heavy_bias_threshold,
    is_heavily_biased,
    heavy_mask,
    shattering_check,
    vc_dim_bruteforce,
)
from .learner import (
    SampleOracle,
    EmpiricalSample,
    HedgeConfig,
    draw_sample,
    draw_batch,
    erm,
    hedge_learn,
    make_hedge_learner,
)
from .derand import (
    DerandConfig,
    BiasTable,
    BiasEntry,
    DerandResult,
    empirical_rho,
    threshold_test,
    build_bias_table,
    round_outside_t,
    derandomize,
    derandomize_with_details,
)
from .hashing import (
    PolyHash,
    CompactClassifier,
    is_prime,
    next_prime,
    sample_hash,
    eval_hash,
    marginal_one_probability,
    plus_probability,
    choose_hash_params,
    TailCheckConfig,
    TailCheckReport,
    empirical_tail_bound_check,
)
from .discrepancy import (
    BinaryMatrix,
    Coloring,
    ReductionFamily,
    Verdict,
    matrix_to_family,
    row_identity_errors,
    coloring_error,
    bruteforce_min_discrepancy,
    min_deterministic_error,
    planted_zero_matrix,
    planted_high_discrepancy_matrix,
    distinguisher,
    dummy_point_variant,
    dummy_member_errors,
    dummy_min_deterministic_error,
)
from .instances import (
    GenSpec,
    gen_random_label_consistent,
    gen_gap_example,
    gen_heavy_point_probe,
    generate,
)
from .harness import (
    TrialReport,
    CampaignConfig,
    CampaignSummary,
    run_trial,
    run_campaign,
    trial_seed,
    wilson_interval,
)

__version__ = "0.1.0"
