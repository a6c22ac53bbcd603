"""Core value types: domains, labeled distributions, hypothesis classes and classifiers.

All types are immutable after construction (arrays are frozen read-only) and
safe to share across threads. Constructors enforce structural sanity (shapes,
value domains that would make an object meaningless); numeric invariants such
as mass normalization are checked by :func:`validate_family`, which reports
violations instead of raising so that deliberately broken inputs can be
inspected.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

MASS_TOL = 1e-12
WEIGHT_TOL = 1e-12
LABEL_CONSISTENCY_TOL = 1e-9


class LabelConsistencyError(ValueError):
    """Raised when an operation requiring a shared conditional label law is
    applied to a family whose members disagree on some supported point."""


def _frozen_float_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def _frozen_label_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.int8)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if not np.all((arr == 1) | (arr == -1)):
        raise ValueError(f"{name} entries must be exactly -1 or +1")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Domain:
    """A finite input domain; points are the dense indices 0..size-1."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"domain size must be >= 1, got {self.size}")

    def points(self) -> np.ndarray:
        return np.arange(self.size)


@dataclass(frozen=True)
class LabeledDistribution:
    """A distribution over (point, label) pairs on a finite domain.

    mass[x] is the probability of drawing x; label_one_prob[x] is the
    conditional probability that the label is +1 given x.
    """

    mass: np.ndarray
    label_one_prob: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mass", _frozen_float_array(self.mass, "mass"))
        object.__setattr__(
            self, "label_one_prob", _frozen_float_array(self.label_one_prob, "label_one_prob")
        )
        if self.mass.shape != self.label_one_prob.shape:
            raise ValueError(
                f"mass and label_one_prob lengths differ: "
                f"{self.mass.shape[0]} vs {self.label_one_prob.shape[0]}"
            )

    @property
    def domain_size(self) -> int:
        return self.mass.shape[0]


@dataclass(frozen=True)
class DistributionFamily:
    """k labeled distributions over one shared domain."""

    domain: Domain
    members: tuple[LabeledDistribution, ...]

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if len(self.members) < 1:
            raise ValueError("a distribution family needs at least one member")
        for i, m in enumerate(self.members):
            if m.domain_size != self.domain.size:
                raise ValueError(
                    f"member {i} has domain size {m.domain_size}, expected {self.domain.size}"
                )

    @property
    def k(self) -> int:
        return len(self.members)

    @cached_property
    def mass_matrix(self) -> np.ndarray:
        """(k, |X|) matrix of point masses."""
        out = np.stack([m.mass for m in self.members])
        out.flags.writeable = False
        return out

    @cached_property
    def label_prob_matrix(self) -> np.ndarray:
        """(k, |X|) matrix of conditional +1 probabilities."""
        out = np.stack([m.label_one_prob for m in self.members])
        out.flags.writeable = False
        return out

    @cached_property
    def shared_label_one_prob(self) -> np.ndarray:
        """Per-point conditional +1 probability taken from the first member
        that supports the point (member 0 where no member does).

        Meaningful for label-consistent families; see is_label_consistent.
        """
        masses = self.mass_matrix
        probs = self.label_prob_matrix
        supported = masses > 0.0
        first = np.argmax(supported, axis=0)  # 0 when nothing supports x
        out = probs[first, np.arange(self.domain.size)]
        out = out.copy()
        out.flags.writeable = False
        return out


def family_from_arrays(mass_matrix, label_prob_matrix) -> DistributionFamily:
    mass_matrix = np.asarray(mass_matrix, dtype=np.float64)
    label_prob_matrix = np.asarray(label_prob_matrix, dtype=np.float64)
    if label_prob_matrix.ndim == 1:
        label_prob_matrix = np.broadcast_to(label_prob_matrix, mass_matrix.shape)
    members = tuple(
        LabeledDistribution(mass_matrix[i], label_prob_matrix[i])
        for i in range(mass_matrix.shape[0])
    )
    return DistributionFamily(Domain(mass_matrix.shape[1]), members)


@dataclass(frozen=True)
class Hypothesis:
    """A total labeling of the domain with values in {-1, +1}."""

    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", _frozen_label_array(self.labels, "labels"))

    @property
    def domain_size(self) -> int:
        return self.labels.shape[0]

    def label(self, x: int) -> int:
        return int(self.labels[x])


@dataclass(frozen=True)
class HypothesisClass:
    """A finite, explicitly enumerated set of hypotheses.

    vc_dim is optional metadata; it is only populated by brute force on small
    instances and never trusted by algorithms.
    """

    hypotheses: tuple[Hypothesis, ...]
    vc_dim: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "hypotheses", tuple(self.hypotheses))
        if len(self.hypotheses) < 1:
            raise ValueError("hypothesis class must be nonempty")
        n = self.hypotheses[0].domain_size
        for i, h in enumerate(self.hypotheses):
            if h.domain_size != n:
                raise ValueError(f"hypothesis {i} has domain size {h.domain_size}, expected {n}")
        if self.vc_dim is not None and self.vc_dim < 0:
            raise ValueError("vc_dim must be nonnegative")

    def __len__(self) -> int:
        return len(self.hypotheses)

    @property
    def domain_size(self) -> int:
        return self.hypotheses[0].domain_size

    @cached_property
    def label_matrix(self) -> np.ndarray:
        """(|H|, |X|) matrix of labels."""
        out = np.stack([h.labels for h in self.hypotheses])
        out.flags.writeable = False
        return out

    def duplicate_groups(self) -> list[tuple[int, ...]]:
        """Groups of indices with structurally identical labelings (size >= 2)."""
        seen: dict[bytes, list[int]] = {}
        for i, h in enumerate(self.hypotheses):
            seen.setdefault(h.labels.tobytes(), []).append(i)
        return [tuple(g) for g in seen.values() if len(g) > 1]


def full_labeling_class(n: int) -> HypothesisClass:
    """All 2^n labelings of an n-point domain (n <= 16)."""
    if n > 16:
        raise ValueError(f"full labeling class limited to n <= 16, got {n}")
    codes = np.arange(2**n, dtype=np.int64)
    bits = (codes[:, None] >> np.arange(n - 1, -1, -1)) & 1
    labels = np.where(bits == 1, 1, -1).astype(np.int8)
    return HypothesisClass(tuple(Hypothesis(row) for row in labels), vc_dim=n)


@dataclass(frozen=True)
class RandomizedClassifier:
    """A finitely supported mixture over a hypothesis class.

    support holds indices into hypothesis_class; weights are nonnegative and
    are expected to sum to 1 (checked by consumers that rely on it).
    """

    hypothesis_class: HypothesisClass
    support: tuple[int, ...]
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "support", tuple(int(i) for i in self.support))
        object.__setattr__(self, "weights", _frozen_float_array(self.weights, "weights"))
        if len(self.support) == 0:
            raise ValueError("randomized classifier must have nonempty support")
        if len(self.support) != self.weights.shape[0]:
            raise ValueError("support and weights lengths differ")
        if np.any(self.weights < 0):
            raise ValueError("weights must be nonnegative")
        for i in self.support:
            if not 0 <= i < len(self.hypothesis_class):
                raise IndexError(f"support index {i} outside hypothesis class")

    @property
    def domain_size(self) -> int:
        return self.hypothesis_class.domain_size

    def weight_sum_ok(self, tol: float = WEIGHT_TOL) -> bool:
        return abs(float(self.weights.sum()) - 1.0) <= tol

    @cached_property
    def support_label_matrix(self) -> np.ndarray:
        """(|support|, |X|) labels of the supported hypotheses."""
        out = self.hypothesis_class.label_matrix[list(self.support)]
        out = out.copy()
        out.flags.writeable = False
        return out

    @cached_property
    def marginals(self) -> np.ndarray:
        """Per-point probability of label +1 under a draw from the mixture."""
        plus = (self.support_label_matrix == 1).astype(np.float64)
        out = self.weights @ plus
        out.flags.writeable = False
        return out


@dataclass(frozen=True)
class ExplicitClassifier:
    """A deterministic classifier stored as a full label table."""

    labels: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "labels", _frozen_label_array(self.labels, "labels"))

    @property
    def domain_size(self) -> int:
        return self.labels.shape[0]

    def label(self, x: int) -> int:
        return int(self.labels[x])

    def label_vector(self) -> np.ndarray:
        return self.labels


@dataclass(frozen=True)
class ValidationIssue:
    severity: str  # "violation" | "warning"
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...] = ()

    @property
    def violations(self) -> tuple[ValidationIssue, ...]:
        return tuple(i for i in self.issues if i.severity == "violation")

    @property
    def warnings(self) -> tuple[ValidationIssue, ...]:
        return tuple(i for i in self.issues if i.severity == "warning")

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_family(fam: DistributionFamily, tol: float = MASS_TOL) -> ValidationReport:
    """Check mass normalization and probability ranges for every member.

    Returns a report listing all violations with their member/point indices;
    the report is empty iff the family satisfies the numeric invariants.
    """
    issues: list[ValidationIssue] = []
    for i, m in enumerate(fam.members):
        if np.any(~np.isfinite(m.mass)):
            issues.append(ValidationIssue("violation", f"member {i}", "non-finite mass entries"))
            continue
        neg = np.nonzero(m.mass < 0)[0]
        for x in neg:
            issues.append(
                ValidationIssue("violation", f"member {i}, point {x}", f"negative mass {m.mass[x]}")
            )
        total = float(m.mass.sum())
        if abs(total - 1.0) > tol:
            issues.append(
                ValidationIssue("violation", f"member {i}", f"mass sum {total!r} != 1")
            )
        if np.any(~np.isfinite(m.label_one_prob)):
            issues.append(
                ValidationIssue("violation", f"member {i}", "non-finite label_one_prob entries")
            )
            continue
        bad = np.nonzero((m.label_one_prob < 0.0) | (m.label_one_prob > 1.0))[0]
        for x in bad:
            issues.append(
                ValidationIssue(
                    "violation",
                    f"member {i}, point {x}",
                    f"label_one_prob {m.label_one_prob[x]} outside [0, 1]",
                )
            )
    return ValidationReport(tuple(issues))


def validate_hypothesis_class(cls: HypothesisClass) -> ValidationReport:
    """Flag duplicate hypotheses (permitted, but worth knowing about)."""
    issues = [
        ValidationIssue("warning", f"hypotheses {group}", "structurally identical labelings")
        for group in cls.duplicate_groups()
    ]
    return ValidationReport(tuple(issues))


def is_label_consistent(fam: DistributionFamily, tol: float = LABEL_CONSISTENCY_TOL) -> bool:
    """True iff all members that support a point agree on its conditional label law.

    A member's conditional at a point it gives zero mass is ignored: only
    points supported by at least two members can witness a disagreement.
    """
    masses = fam.mass_matrix
    probs = fam.label_prob_matrix
    supported = masses > 0.0
    multi = supported.sum(axis=0) >= 2
    if not np.any(multi):
        return True
    sub = probs[:, multi]
    sup = supported[:, multi]
    hi = np.where(sup, sub, -np.inf).max(axis=0)
    lo = np.where(sup, sub, np.inf).min(axis=0)
    return bool(np.all(hi - lo <= tol))


def require_label_consistent(fam: DistributionFamily, tol: float = LABEL_CONSISTENCY_TOL) -> None:
    if not is_label_consistent(fam, tol):
        raise LabelConsistencyError(
            "operation requires a label-consistent family "
            "(all members must share the conditional label law on shared support)"
        )
