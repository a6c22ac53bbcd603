"""Reproducible instance generators: random label-consistent families, the
k-point worst-case mixture example, and engineered heavy/light bias probes.

Every generator is a pure function of its spec (seed included): the same spec
yields a bit-identical instance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    DistributionFamily,
    Domain,
    Hypothesis,
    HypothesisClass,
    LabeledDistribution,
    RandomizedClassifier,
)
from .metrics import bayes_labels, heavy_bias_threshold


@dataclass(frozen=True)
class GenSpec:
    """Parameters for an instance generator, serializable into instance files.

    kind selects the generator: "random_label_consistent" (or "bayes_in_class"
    to also append the pointwise-majority labeling to the class),
    "gap_example", or "heavy_point_probe". The bias profile splits the domain
    into near-deterministic points (|bias| drawn from det_beta range),
    near-fair points (|bias| <= fair_beta_max), and a remainder with moderate
    label noise.
    """

    kind: str = "random_label_consistent"
    domain_size: int = 40
    k: int = 6
    hypothesis_count: int = 16
    det_fraction: float = 0.3
    det_beta_lo: float = 0.3
    det_beta_hi: float = 0.5
    fair_fraction: float = 0.4
    fair_beta_max: float = 0.05
    # heavy_point_probe only:
    heavy_count: int = 0
    heavy_beta: float = 0.4
    heavy_mass: float = 0.25
    light_beta_max: float = 0.05
    eps: float = 0.2
    delta: float = 0.2
    variant: str = "explicit"
    c_prime: float = 4.0
    seed: int = 0

    def __post_init__(self):
        if self.domain_size < 1 or self.k < 1 or self.hypothesis_count < 1:
            raise ValueError("counts must be positive")
        for name in ("det_fraction", "fair_fraction"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.det_fraction + self.fair_fraction > 1.0 + 1e-12:
            raise ValueError("det_fraction + fair_fraction must not exceed 1")
        if not 0.0 <= self.det_beta_lo <= self.det_beta_hi <= 0.5:
            raise ValueError("det beta range must satisfy 0 <= lo <= hi <= 1/2")
        if not 0.0 <= self.fair_beta_max <= 0.5:
            raise ValueError("fair_beta_max must lie in [0, 1/2]")


def _random_mass(n: int, rng: np.random.Generator) -> np.ndarray:
    # exponential draws normalized = symmetric Dirichlet(1)
    raw = rng.exponential(1.0, size=n)
    return raw / raw.sum()


def _bias_profile_eta(spec: GenSpec, rng: np.random.Generator) -> np.ndarray:
    n = spec.domain_size
    n_det = round(spec.det_fraction * n)
    n_fair = round(spec.fair_fraction * n)
    n_det = min(n_det, n)
    n_fair = min(n_fair, n - n_det)
    kinds = np.array(["mid"] * n, dtype=object)
    order = rng.permutation(n)
    kinds[order[:n_det]] = "det"
    kinds[order[n_det : n_det + n_fair]] = "fair"

    eta = np.empty(n)
    for x in range(n):
        if kinds[x] == "det":
            beta = rng.uniform(spec.det_beta_lo, spec.det_beta_hi)
            eta[x] = 0.5 + beta * (1 if rng.random() < 0.5 else -1)
        elif kinds[x] == "fair":
            eta[x] = 0.5 + rng.uniform(-spec.fair_beta_max, spec.fair_beta_max)
        else:
            eta[x] = rng.uniform(0.2, 0.8)
    return np.clip(eta, 0.0, 1.0)


def _random_hypotheses(n: int, count: int, rng: np.random.Generator) -> list[Hypothesis]:
    labels = np.where(rng.random((count, n)) < 0.5, 1, -1).astype(np.int8)
    return [Hypothesis(row) for row in labels]


def gen_random_label_consistent(spec: GenSpec) -> tuple[DistributionFamily, HypothesisClass]:
    """k independent random mass vectors sharing one conditional label vector
    drawn from the bias profile, plus a class of random labelings (and, for
    kind "bayes_in_class", the pointwise-majority labeling as the last one)."""
    rng = np.random.default_rng(spec.seed)
    eta = _bias_profile_eta(spec, rng)
    members = tuple(
        LabeledDistribution(_random_mass(spec.domain_size, rng), eta) for _ in range(spec.k)
    )
    fam = DistributionFamily(Domain(spec.domain_size), members)
    hyps = _random_hypotheses(spec.domain_size, spec.hypothesis_count, rng)
    if spec.kind == "bayes_in_class":
        hyps.append(Hypothesis(bayes_labels(fam)))
    return fam, HypothesisClass(tuple(hyps))


def gen_gap_example(k: int) -> tuple[DistributionFamily, HypothesisClass, RandomizedClassifier]:
    """The k-point construction where a uniform mixture has worst-case error
    1/k but every single hypothesis in its support has worst-case error 1:
    member i is a point mass on (x_i, +1) and hypothesis i labels x_i with -1
    and everything else +1."""
    if k < 2:
        raise ValueError("the gap example needs k >= 2")
    members = []
    hyps = []
    for i in range(k):
        mass = np.zeros(k)
        mass[i] = 1.0
        members.append(LabeledDistribution(mass, np.ones(k)))
        labels = np.ones(k, dtype=np.int8)
        labels[i] = -1
        hyps.append(Hypothesis(labels))
    fam = DistributionFamily(Domain(k), tuple(members))
    cls = HypothesisClass(tuple(hyps))
    f_rand = RandomizedClassifier(cls, tuple(range(k)), np.full(k, 1.0 / k))
    return fam, cls, f_rand


def gen_heavy_point_probe(spec: GenSpec) -> DistributionFamily:
    """A family whose designated points sit strictly above the heavy-bias
    threshold at (eps, delta, k) while every other point sits strictly below
    it under every member. heavy_count = 0 gives an all-light instance.

    Member 0 concentrates heavy_mass on each heavy point; other members avoid
    the heavy points entirely so lightness only needs to hold against spread
    mass. A spec that lands any point exactly on the threshold is rejected.
    """
    rng = np.random.default_rng(spec.seed)
    n, k, h = spec.domain_size, spec.k, spec.heavy_count
    if h > n:
        raise ValueError("more heavy points than domain points")
    if h > 0 and spec.heavy_mass * h > 1.0:
        raise ValueError("heavy masses exceed total probability")
    if h > 0 and not 0.0 < spec.heavy_beta <= 0.5:
        raise ValueError("heavy_beta must lie in (0, 1/2]")
    if h >= n:
        raise ValueError("need at least one light point")

    heavy_points = np.arange(h)
    light_points = np.arange(h, n)

    eta = np.empty(n)
    signs = np.where(np.arange(h) % 2 == 0, 1.0, -1.0)
    eta[:h] = 0.5 + spec.heavy_beta * signs
    eta[h:] = 0.5 + rng.uniform(-spec.light_beta_max, spec.light_beta_max, size=n - h)

    members = []
    mass0 = np.zeros(n)
    mass0[heavy_points] = spec.heavy_mass
    rest = 1.0 - spec.heavy_mass * h
    spread = _random_mass(light_points.size, rng) * rest
    mass0[light_points] = spread
    members.append(LabeledDistribution(mass0, eta))
    for _ in range(1, k):
        mass = np.zeros(n)
        mass[light_points] = _random_mass(light_points.size, rng)
        members.append(LabeledDistribution(mass, eta))
    fam = DistributionFamily(Domain(n), tuple(members))

    thresh = heavy_bias_threshold(spec.eps, spec.delta, k, spec.variant, spec.c_prime)
    beta = eta - 0.5
    stat = (beta**2)[None, :] * fam.mass_matrix
    best = stat.max(axis=0)
    if np.any(best == thresh):
        raise ValueError("a point sits exactly on the heavy-bias threshold; adjust the spec")
    is_heavy = best > thresh
    expected = np.zeros(n, dtype=bool)
    expected[heavy_points] = True
    if not np.array_equal(is_heavy, expected):
        raise ValueError(
            "spec does not separate heavy and light points at the requested (eps, delta)"
        )
    return fam


def generate(spec: GenSpec):
    """Dispatch on spec.kind. Returns (family, hypothesis_class, mixture|None);
    heavy_point_probe instances come with a trivial one-hypothesis class."""
    if spec.kind in ("random_label_consistent", "bayes_in_class"):
        fam, cls = gen_random_label_consistent(spec)
        return fam, cls, None
    if spec.kind == "gap_example":
        return gen_gap_example(spec.k)
    if spec.kind == "heavy_point_probe":
        fam = gen_heavy_point_probe(spec)
        cls = HypothesisClass((Hypothesis(np.ones(spec.domain_size, dtype=np.int8)),))
        return fam, cls, None
    raise ValueError(f"unknown generator kind {spec.kind!r}")
