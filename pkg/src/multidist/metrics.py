"""Exact error functionals over distribution families, plus VC utilities.

Everything here is a closed-form expectation over known masses; nothing
samples. er_D(f) = Pr_{(x,y)~D}[f(x) != y] = sum_x D(x) * (eta(x) if f(x) = -1
else 1 - eta(x)) with eta(x) = Pr[y = +1 | x].
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .model import (
    DistributionFamily,
    ExplicitClassifier,
    Hypothesis,
    HypothesisClass,
    LabeledDistribution,
    RandomizedClassifier,
    WEIGHT_TOL,
    require_label_consistent,
)

VC_BRUTEFORCE_LIMIT = 20


def label_vector_of(f, domain_size: int | None = None) -> np.ndarray:
    """Coerce a classifier-like object to its +-1 label vector.

    Accepts Hypothesis, ExplicitClassifier, anything with label_vector()
    (e.g. the compact hash classifier), or a raw array.
    """
    if isinstance(f, (Hypothesis, ExplicitClassifier)):
        return f.labels
    if hasattr(f, "label_vector"):
        return f.label_vector()
    arr = np.asarray(f)
    if arr.ndim != 1:
        raise ValueError("classifier label vector must be one-dimensional")
    return arr.astype(np.int8)


def error_contributions(f, dist: LabeledDistribution) -> np.ndarray:
    """Per-point error mass: D(x) * Pr_y[f(x) != y]."""
    labels = label_vector_of(f)
    if labels.shape[0] != dist.domain_size:
        raise ValueError(
            f"domain size mismatch: classifier {labels.shape[0]}, distribution {dist.domain_size}"
        )
    eta = dist.label_one_prob
    per_point = np.where(labels == -1, eta, 1.0 - eta)
    return dist.mass * per_point


def error_on_distribution(f, dist: LabeledDistribution) -> float:
    return float(error_contributions(f, dist).sum())


@dataclass(frozen=True)
class ErrorReport:
    """Per-member errors plus their maximum (lowest index on ties)."""

    per_distribution: tuple[float, ...]
    worst_case: float
    argmax_index: int

    @classmethod
    def from_errors(cls, errors) -> "ErrorReport":
        errors = tuple(float(e) for e in errors)
        idx = int(np.argmax(errors))
        return cls(errors, errors[idx], idx)

    def csv_row(self, instance_id: str, classifier_id: str) -> list[str]:
        return (
            [instance_id, classifier_id]
            + [repr(e) for e in self.per_distribution]
            + [repr(self.worst_case), str(self.argmax_index)]
        )

    @staticmethod
    def csv_header(k: int) -> list[str]:
        return (
            ["instance_id", "classifier_id"]
            + [f"error_{i}" for i in range(k)]
            + ["worst_case", "argmax_index"]
        )


def worst_case_error(f, fam: DistributionFamily) -> ErrorReport:
    return ErrorReport.from_errors(error_on_distribution(f, m) for m in fam.members)


def _check_weights(f_rand: RandomizedClassifier) -> None:
    if not f_rand.weight_sum_ok(WEIGHT_TOL):
        raise ValueError(
            f"randomized classifier weights sum to {float(f_rand.weights.sum())!r}, expected 1"
        )


def randomized_per_distribution(f_rand: RandomizedClassifier, fam: DistributionFamily) -> np.ndarray:
    """E_{f~F}[er_{D_i}(f)] for every member i, by linearity of expectation."""
    _check_weights(f_rand)
    errs = np.array(
        [
            [error_on_distribution(Hypothesis(labels), m) for m in fam.members]
            for labels in f_rand.support_label_matrix
        ]
    )
    return f_rand.weights @ errs


def randomized_worst_case_error(f_rand: RandomizedClassifier, fam: DistributionFamily) -> float:
    return float(randomized_per_distribution(f_rand, fam).max())


def support_worst_case(f_rand: RandomizedClassifier, fam: DistributionFamily) -> float:
    """max over f in the support of worst_case_error(f) — what a single
    unlucky draw from the mixture can cost."""
    return max(
        worst_case_error(Hypothesis(labels), fam).worst_case
        for labels in f_rand.support_label_matrix
    )


def exceedance_probability(f_rand: RandomizedClassifier, dist: LabeledDistribution, level: float) -> float:
    """Pr over a single draw f~F that er_D(f) >= level."""
    _check_weights(f_rand)
    total = 0.0
    for w, labels in zip(f_rand.weights, f_rand.support_label_matrix):
        if error_on_distribution(Hypothesis(labels), dist) >= level:
            total += float(w)
    return total


def opt_bruteforce(cls: HypothesisClass, fam: DistributionFamily) -> tuple[float, int]:
    """Exhaustive min over the class of the worst-case error; lowest index on ties."""
    best_val = math.inf
    best_idx = 0
    for i, h in enumerate(cls.hypotheses):
        v = worst_case_error(h, fam).worst_case
        if v < best_val:
            best_val, best_idx = v, i
    return best_val, best_idx


def bayes_labels(fam: DistributionFamily) -> np.ndarray:
    """Pointwise majority labeling sign(2*eta - 1) under the shared conditional,
    ties to +1."""
    eta = fam.shared_label_one_prob
    return np.where(2.0 * eta - 1.0 >= 0.0, 1, -1).astype(np.int8)


def bias(x: int, fam: DistributionFamily) -> float:
    """Label bias of point x: Pr[y = +1 | x] - 1/2 under the shared conditional.

    Requires a label-consistent family; the conditional is read from the first
    member supporting x (member 0 if none does).
    """
    require_label_consistent(fam)
    return float(fam.shared_label_one_prob[x]) - 0.5


def heavy_bias_threshold(eps: float, delta: float, k: int, variant: str = "explicit",
                         c_prime: float = 4.0) -> float:
    """The per-point heaviness threshold on beta_x^2 * D_i(x).

    variant "explicit": eps^2 / (8 ln(4k/delta)); variant "hash" (compact
    rounding): eps^2 / (c_prime * ln^2(4k/delta)).
    """
    if not (0.0 < eps < 1.0 and 0.0 < delta < 1.0):
        raise ValueError("eps and delta must lie in (0, 1)")
    log_term = math.log(4.0 * k / delta)
    if variant == "explicit":
        return eps**2 / (8.0 * log_term)
    if variant == "hash":
        return eps**2 / (c_prime * log_term**2)
    raise ValueError(f"unknown variant {variant!r}")


def heavy_mask(fam: DistributionFamily, eps: float, delta: float, variant: str = "explicit",
               c_prime: float = 4.0) -> np.ndarray:
    """Boolean mask over the domain: beta_x^2 * D_i(x) strictly above the
    threshold for at least one member i."""
    require_label_consistent(fam)
    thresh = heavy_bias_threshold(eps, delta, fam.k, variant, c_prime)
    beta = fam.shared_label_one_prob - 0.5
    stat = (beta**2)[None, :] * fam.mass_matrix
    return np.any(stat > thresh, axis=0)


def is_heavily_biased(x: int, fam: DistributionFamily, eps: float, delta: float,
                      variant: str = "explicit", c_prime: float = 4.0) -> bool:
    return bool(heavy_mask(fam, eps, delta, variant, c_prime)[x])


def shattering_check(cls: HypothesisClass, points) -> bool:
    """True iff every +-1 labeling of the given points is realized by some
    hypothesis. Exhaustive over 2^|points| labelings; |points| <= 20."""
    points = list(points)
    if len(points) > VC_BRUTEFORCE_LIMIT:
        raise ValueError(f"shattering check limited to {VC_BRUTEFORCE_LIMIT} points")
    if len(points) == 0:
        return True
    realized = {tuple(row) for row in cls.label_matrix[:, points]}
    return len(realized) == 2 ** len(points)


def vc_dim_bruteforce(cls: HypothesisClass) -> int:
    """Largest shattered subset size, by exhaustive search (|X| <= 20)."""
    n = cls.domain_size
    if n > VC_BRUTEFORCE_LIMIT:
        raise ValueError(f"vc_dim_bruteforce limited to domains of size {VC_BRUTEFORCE_LIMIT}")
    best = 0
    for size in range(1, n + 1):
        if len(cls) < 2**size:
            break  # not enough distinct labelings to shatter this many points
        found = False
        for subset in itertools.combinations(range(n), size):
            if shattering_check(cls, subset):
                found = True
                break
        if found:
            best = size
        else:
            break
    return best
