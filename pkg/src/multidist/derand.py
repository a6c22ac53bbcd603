"""Turning a hypothesis mixture into a single deterministic classifier.

The procedure: run the black-box randomized learner at precision eps/2 and
confidence delta/2 to get a mixture F; then, sampling each distribution in
turn, collect every point whose empirical label skew clears a
sqrt(ln(gamma)/count) threshold into a table T and pin its majority label;
finally label every remaining point by an independent draw from F (or, in
compact mode, by the hash rounding rule, which needs no per-point storage).

Points with strong bias under some distribution land in T with the correct
sign with high probability; the rest have so little bias that the independent
rounding concentrates within eps/2 of F's error simultaneously for all
members.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import (
    ExplicitClassifier,
    RandomizedClassifier,
    HypothesisClass,
    require_label_consistent,
)
from .learner import SampleOracle
from .hashing import CompactClassifier, choose_hash_params, sample_hash


@dataclass(frozen=True)
class DerandConfig:
    """Derandomization knobs.

    Theory mode derives gamma = c_const * k / (eps * delta) and a per-member
    sample count m = ceil(c_const * ln^2(gamma) / eps^2) (times an extra
    c_prime * ln(gamma) factor for hash rounding). Calibrated mode overrides m
    directly and scales the table threshold, because the "large enough"
    constants make theory-mode m impractical for tight eps at desk scale.
    """

    eps: float
    delta: float
    c_const: float = 4.0
    c_prime: float = 4.0
    mode: str = "theory"  # "theory" | "calibrated"
    m_override: int | None = None
    threshold_scale: float = 1.0
    rounding: str = "explicit"  # "explicit" | "hash"
    seed: int = 0

    def __post_init__(self):
        if not (0.0 < self.eps < 1.0 and 0.0 < self.delta < 1.0):
            raise ValueError("eps and delta must lie in (0, 1)")
        if self.c_const <= 0 or self.c_prime <= 0:
            raise ValueError("constants must be positive")
        if self.mode not in ("theory", "calibrated"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.rounding not in ("explicit", "hash"):
            raise ValueError(f"unknown rounding {self.rounding!r}")
        if self.mode == "calibrated":
            if self.m_override is None or self.m_override < 1:
                raise ValueError("calibrated mode needs a positive m_override")
            if self.threshold_scale <= 0:
                raise ValueError("threshold_scale must be positive")

    def gamma(self, k: int) -> float:
        return self.c_const * k / (self.eps * self.delta)

    def sample_size(self, k: int) -> int:
        if self.mode == "calibrated":
            return int(self.m_override)
        ln_gamma = math.log(self.gamma(k))
        m = self.c_const * ln_gamma**2 / self.eps**2
        if self.rounding == "hash":
            m *= self.c_prime * ln_gamma
        return math.ceil(m)

    def scale(self) -> float:
        return self.threshold_scale if self.mode == "calibrated" else 1.0

    def variant(self) -> str:
        return "hash" if self.rounding == "hash" else "explicit"


@dataclass(frozen=True)
class BiasEntry:
    label: int
    member: int  # distribution whose samples triggered the insertion
    rho: float
    count: int


@dataclass(frozen=True)
class BiasTable:
    """Points with empirically certain label bias, and the label fixed for each."""

    entries: dict[int, BiasEntry] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "entries", dict(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, x: int) -> bool:
        return x in self.entries

    def points(self) -> np.ndarray:
        return np.array(sorted(self.entries), dtype=np.int64)

    def labels(self) -> dict[int, int]:
        return {x: e.label for x, e in self.entries.items()}

    def label_of(self, x: int) -> int:
        return self.entries[x].label


def empirical_rho(ys: np.ndarray) -> tuple[float, int]:
    """Signed label skew of a batch of labels at one point:
    (#positive - #negative) / count."""
    ys = np.asarray(ys)
    count = ys.shape[0]
    if count == 0:
        raise ValueError("empirical_rho needs at least one sample")
    pos = int(np.count_nonzero(ys == 1))
    return (2 * pos - count) / count, count


def threshold_test(rho: float, count: int, gamma: float, scale: float = 1.0) -> bool:
    """True iff |rho| strictly exceeds sqrt(ln(gamma)/count) (times scale)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if gamma <= 1.0:
        raise ValueError("gamma must exceed 1")
    return abs(rho) > scale * math.sqrt(math.log(gamma) / count)


def _sign(v: float) -> int:
    return 1 if v >= 0 else -1


def build_bias_table(oracle: SampleOracle, cfg: DerandConfig,
                     rng: np.random.Generator | None = None) -> BiasTable:
    """Sample each member in order and collect points whose label skew clears
    the threshold.

    Points already in the table are skipped in later member iterations. Even
    with an exact-mode oracle this procedure samples — the table's guarantees
    are statements about its sampling randomness, so reading the masses would
    test nothing.
    """
    fam = oracle.family
    if oracle.exact:
        require_label_consistent(fam)
        if rng is None:
            rng = np.random.default_rng(cfg.seed)
    n = fam.domain.size
    gamma = cfg.gamma(fam.k)
    m = cfg.sample_size(fam.k)
    scale = cfg.scale()
    ln_gamma = math.log(gamma)

    entries: dict[int, BiasEntry] = {}
    for i in range(fam.k):
        xs, ys = oracle.draw(i, m, rng=rng)
        counts = np.bincount(xs, minlength=n)
        pos = np.bincount(xs[ys == 1], minlength=n)
        with np.errstate(invalid="ignore"):
            rho = np.where(counts > 0, (2.0 * pos - counts) / np.maximum(counts, 1), 0.0)
        passing = np.zeros(n, dtype=bool)
        seen = counts > 0
        passing[seen] = np.abs(rho[seen]) > scale * np.sqrt(ln_gamma / counts[seen])
        for x in np.nonzero(passing)[0]:
            if int(x) in entries:  # added by an earlier member; skipped per the x in X\T guard
                continue
            entries[int(x)] = BiasEntry(_sign(rho[x]), i, float(rho[x]), int(counts[x]))
    return BiasTable(entries)


def round_outside_t(f_rand: RandomizedClassifier, table: BiasTable, domain_size: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Full label vector: table labels where fixed, and one independent draw
    from the mixture per remaining point (a fresh draw per point, never one
    shared hypothesis)."""
    if not f_rand.weight_sum_ok():
        raise ValueError("mixture weights must sum to 1")
    labels = np.empty(domain_size, dtype=np.int8)
    outside = np.ones(domain_size, dtype=bool)
    for x, entry in table.entries.items():
        labels[x] = entry.label
        outside[x] = False
    idx_outside = np.nonzero(outside)[0]
    if idx_outside.size:
        cum = np.cumsum(f_rand.weights)
        picks = np.searchsorted(cum, rng.random(idx_outside.size), side="right")
        np.clip(picks, 0, len(f_rand.support) - 1, out=picks)
        labels[idx_outside] = f_rand.support_label_matrix[picks, idx_outside]
    return labels


@dataclass(frozen=True)
class DerandResult:
    """The produced classifier together with the mixture and table behind it,
    for reporting and diagnostics."""

    classifier: object  # ExplicitClassifier | CompactClassifier
    f_rand: RandomizedClassifier
    table: BiasTable


def derandomize_with_details(oracle: SampleOracle, cls: HypothesisClass, learner,
                             cfg: DerandConfig,
                             rng: np.random.Generator | None = None,
                             f_rand: RandomizedClassifier | None = None) -> DerandResult:
    """Run the full pipeline and return the classifier plus its ingredients.

    learner is any callable (oracle, cls, eps, delta) -> RandomizedClassifier
    meeting the mixture contract; it is invoked at precision eps/2 and failure
    probability delta/2 before any table samples are drawn, so the mixture
    never sees them. Pass f_rand to reuse an already learned mixture (the
    remaining randomness is still table sampling + rounding).
    """
    fam = oracle.family
    if oracle.exact:
        require_label_consistent(fam)
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    table_rng, round_rng = rng.spawn(2)

    if f_rand is None:
        f_rand = learner(oracle, cls, cfg.eps / 2.0, cfg.delta / 2.0)
    table = build_bias_table(oracle, cfg, table_rng)

    if cfg.rounding == "explicit":
        labels = round_outside_t(f_rand, table, fam.domain.size, round_rng)
        return DerandResult(ExplicitClassifier(labels), f_rand, table)

    r, p = choose_hash_params(fam.k, cfg.eps, cfg.delta, fam.domain.size, cfg.c_prime)
    q = sample_hash(p, r, round_rng)
    return DerandResult(CompactClassifier(q, table.labels(), f_rand, fam.domain.size, p),
                        f_rand, table)


def derandomize(oracle: SampleOracle, cls: HypothesisClass, learner, cfg: DerandConfig,
                rng: np.random.Generator | None = None,
                f_rand: RandomizedClassifier | None = None):
    """As derandomize_with_details, returning only the deterministic classifier
    (ExplicitClassifier or CompactClassifier per cfg.rounding)."""
    return derandomize_with_details(oracle, cls, learner, cfg, rng, f_rand).classifier
