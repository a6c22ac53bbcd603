"""Limited-independence hashing over a prime field and the compact classifier
built on it.

A random degree-(r-1) polynomial q(x) = sum_i alpha_i x^i mod p with i.i.d.
uniform coefficients maps any r distinct keys to jointly uniform values in
[0, p): an r-wise independent hash. The compact classifier stores only the
polynomial, a small table of fixed labels, and a hypothesis mixture F; at a
point x outside the table it outputs +1 iff q(x) <= Pr_{f~F}[f(x)=1] * p - 1,
which makes Pr over the hash choice of a +1 equal to floor(marginal * p) / p.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .model import RandomizedClassifier

PRIME_LIMIT = 1 << 62
# Witnesses making Miller-Rabin deterministic for all n < 3.3e24 (covers 64-bit).
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact over the 64-bit range."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def next_prime(n: int) -> int:
    """Smallest prime >= n."""
    if n < 1:
        raise ValueError("next_prime needs n >= 1")
    if n > PRIME_LIMIT:
        raise OverflowError(f"prime search capped at 2^62, got {n}")
    c = max(n, 2)
    while not is_prime(c):
        c += 1
        if c > PRIME_LIMIT:
            raise OverflowError("prime search exceeded 2^62")
    return c


@dataclass(frozen=True)
class PolyHash:
    """q(x) = sum_{i=0}^{r-1} coefficients[i] * x^i mod prime.

    Degree r = len(coefficients) gives r-wise independence for r >= 2 with
    uniform coefficients. r = 1 (a constant) is structurally allowed for unit
    tests only; sample_hash refuses to produce it without the testing flag.
    """

    prime: int
    coefficients: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))
        if not is_prime(self.prime):
            raise ValueError(f"{self.prime} is not prime")
        if len(self.coefficients) < 1:
            raise ValueError("need at least one coefficient")
        for c in self.coefficients:
            if not 0 <= c < self.prime:
                raise ValueError(f"coefficient {c} outside [0, {self.prime})")

    @property
    def degree_r(self) -> int:
        return len(self.coefficients)


def sample_hash(p: int, r: int, rng: np.random.Generator, *,
                allow_degenerate: bool = False) -> PolyHash:
    """r i.i.d. uniform coefficients in [0, p). r must be even and >= 2 unless
    the degenerate testing flag is set."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if not allow_degenerate and (r < 2 or r % 2 != 0):
        raise ValueError(f"degree r must be an even integer >= 2, got {r}")
    if allow_degenerate and r < 1:
        raise ValueError("degree r must be >= 1")
    coeffs = tuple(int(c) for c in rng.integers(0, p, size=r))
    return PolyHash(p, coeffs)


def eval_hash(q: PolyHash, x: int) -> int:
    """Horner evaluation with reduction at every step; Python integers, so no
    intermediate overflow."""
    if not 0 <= x < q.prime:
        raise ValueError(f"key {x} outside [0, {q.prime})")
    acc = 0
    for c in reversed(q.coefficients):
        acc = (acc * x + c) % q.prime
    return acc


def eval_hash_vector(q: PolyHash, xs: np.ndarray) -> np.ndarray:
    """Vectorized Horner over int64 (safe: products stay below 2^62 for
    p < 2^31, which choose_hash_params keeps to at desk scale)."""
    p = q.prime
    if p >= 1 << 31:
        return np.array([eval_hash(q, int(x)) for x in xs], dtype=np.int64)
    xs = np.asarray(xs, dtype=np.int64)
    if np.any((xs < 0) | (xs >= p)):
        raise ValueError(f"keys outside [0, {p})")
    acc = np.zeros_like(xs)
    for c in reversed(q.coefficients):
        acc = (acc * xs + c) % p
    return acc


def coefficient_matrix_eval(coeffs: np.ndarray, xs: np.ndarray, p: int) -> np.ndarray:
    """Evaluate many polynomials (rows of coeffs, constant term first) at many
    keys: returns (n_polys, n_keys). Used by the Monte-Carlo harnesses."""
    coeffs = np.asarray(coeffs, dtype=np.int64)
    xs = np.asarray(xs, dtype=np.int64)
    acc = np.zeros((coeffs.shape[0], xs.shape[0]), dtype=np.int64)
    for j in range(coeffs.shape[1] - 1, -1, -1):
        acc = (acc * xs[None, :] + coeffs[:, j : j + 1]) % p
    return acc


def marginal_one_probability(f_rand: RandomizedClassifier, x: int) -> float:
    """Pr over a draw from the mixture that the label at x is +1."""
    return float(f_rand.marginals[x])


def plus_probability(marginal: float, p: int) -> Fraction:
    """Exact law of the hash rounding: floor(marginal * p) / p.

    The float marginal is taken at face value (every float is a rational), so
    the law is bit-exact for the marginals the mixture actually produces.
    """
    scaled = Fraction(marginal) * p
    return Fraction(math.floor(scaled), p)


def _plus_decision(q_value: int, marginal: float, p: int) -> bool:
    # +1 iff q(x) <= marginal * p - 1, i.e. q(x) + 1 <= marginal * p exactly.
    return Fraction(q_value + 1) <= Fraction(marginal) * p


def _plus_decision_vector(q_values: np.ndarray, marginals: np.ndarray, p: int) -> np.ndarray:
    """Vectorized rounding decision with an exact check near the boundary.

    The float product marginal*p is within p * 2^-53 < 1e-6 of the exact
    rational value, so only comparisons inside that window can be decided
    wrongly by floats; those are re-done in exact arithmetic.
    """
    lhs = q_values.astype(np.float64) + 1.0
    rhs = marginals * float(p)
    out = lhs <= rhs
    near = np.abs(lhs - rhs) < 1e-6
    for idx in np.nonzero(near)[0]:
        out[idx] = _plus_decision(int(q_values[idx]), float(marginals[idx]), p)
    return out


@dataclass(frozen=True)
class CompactClassifier:
    """Deterministic classifier stored as (hash, override table, mixture).

    Points in t_table carry fixed labels; any other point is labeled +1 iff
    q(x) + 1 <= Pr_{f~F}[f(x)=1] * range_size, evaluated exactly.
    """

    hash: PolyHash
    t_table: dict[int, int]
    f_rand: RandomizedClassifier
    domain_size: int
    range_size: int

    def __post_init__(self):
        object.__setattr__(self, "t_table", dict(self.t_table))
        if self.range_size != self.hash.prime:
            raise ValueError("range_size must equal the hash prime")
        if self.hash.prime <= self.domain_size:
            raise ValueError("hash prime must exceed the domain size")
        for x, label in self.t_table.items():
            if not 0 <= x < self.domain_size:
                raise ValueError(f"table key {x} outside the domain")
            if label not in (-1, 1):
                raise ValueError(f"table label at {x} must be -1 or +1")

    def label(self, x: int) -> int:
        if x in self.t_table:
            return self.t_table[x]
        marginal = marginal_one_probability(self.f_rand, x)
        return 1 if _plus_decision(eval_hash(self.hash, x), marginal, self.range_size) else -1

    @cached_property
    def _label_vector(self) -> np.ndarray:
        xs = np.arange(self.domain_size)
        q_vals = eval_hash_vector(self.hash, xs)
        plus = _plus_decision_vector(q_vals, self.f_rand.marginals[: self.domain_size], self.range_size)
        labels = np.where(plus, 1, -1).astype(np.int8)
        for x, lab in self.t_table.items():
            labels[x] = lab
        labels.flags.writeable = False
        return labels

    def label_vector(self) -> np.ndarray:
        return self._label_vector


def choose_hash_params(k: int, eps: float, delta: float, domain_size: int,
                       c_prime: float = 4.0) -> tuple[int, int]:
    """Degree and prime for compact rounding at the given precision.

    r is the smallest even integer >= 2 ln(4k/delta). The prime takes the max
    of three lower bounds — it must exceed the domain, the eps^-3 ln(4k/delta)
    range-size prescription, and the 4 alpha^2 / eps floor with
    alpha = 2 eps / (ln(4k/delta) sqrt(c_prime)) — because the stated bounds
    disagree in magnitude and the max is safe.
    """
    if not (0.0 < eps < 1.0 and 0.0 < delta < 1.0):
        raise ValueError("eps and delta must lie in (0, 1)")
    log_term = math.log(4.0 * k / delta)
    r = max(2, 2 * math.ceil(log_term))  # smallest even integer >= 2*log_term
    alpha = 2.0 * eps / (log_term * math.sqrt(c_prime))
    lower = max(
        domain_size + 1,
        math.ceil(eps**-3 * log_term),
        math.ceil(4.0 * alpha**2 / eps) + 1,
    )
    return r, next_prime(lower)


def standard_hoeffding_bound(t: float, n: int) -> float:
    """Two-sided Hoeffding tail for n independent [0,1] variables."""
    return 2.0 * math.exp(-2.0 * t * t / n)


def limited_independence_tail_bound(t: float, r: int, q_cap: float) -> float:
    """(r * Q / (e^(2/3) * T^2))^(r/2) for even r and Q >= max(r, variance)."""
    if r < 2 or r % 2 != 0:
        raise ValueError("the tail bound holds for even r >= 2")
    if t <= 0:
        return math.inf
    return (r * q_cap / (math.exp(2.0 / 3.0) * t * t)) ** (r / 2)


@dataclass(frozen=True)
class TailCheckConfig:
    """Monte-Carlo setup for checking the limited-independence tail bound on
    hash-derived indicators Z_x = 1{q(x) < threshold}."""

    n: int = 64
    r: int = 4
    draws: int = 100_000
    t_values: tuple[float, ...] = ()
    prime: int | None = None
    threshold: int | None = None
    independent: bool = False  # fresh randomness per point instead of one hash
    seed: int = 0

    def resolved(self) -> "TailCheckConfig":
        p = self.prime if self.prime is not None else next_prime(self.n + 1)
        thr = self.threshold if self.threshold is not None else p // 2
        ts = self.t_values or tuple(c * math.sqrt(self.n) for c in (0.5, 1.0, 2.0))
        return TailCheckConfig(self.n, self.r, self.draws, ts, p, thr, self.independent, self.seed)


@dataclass(frozen=True)
class TailCheckRow:
    t: float
    observed: float
    bound: float
    slack_3sigma: float
    ok: bool


@dataclass(frozen=True)
class TailCheckReport:
    config: TailCheckConfig
    mean: float
    variance: float
    rows: tuple[TailCheckRow, ...]

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.rows)


def empirical_tail_bound_check(cfg: TailCheckConfig) -> TailCheckReport:
    """Measure Pr[|Z - mu| >= T] for Z = sum of n hash-derived indicators and
    compare against the limited-independence tail bound (or plain Hoeffding in
    independent mode, as a harness cross-check).

    Each indicator has exactly known mean threshold/p, so mu and sigma^2 are
    exact. A row fails only if the observed frequency exceeds the bound by
    more than 3 binomial standard errors.
    """
    cfg = cfg.resolved()
    p, thr = cfg.prime, cfg.threshold
    if p <= cfg.n:
        raise ValueError("prime must exceed the number of keys")
    rng = np.random.default_rng(cfg.seed)
    mu_one = thr / p
    mean = cfg.n * mu_one
    variance = cfg.n * mu_one * (1.0 - mu_one)

    if cfg.independent:
        values = rng.integers(0, p, size=(cfg.draws, cfg.n))
    else:
        coeffs = rng.integers(0, p, size=(cfg.draws, cfg.r))
        values = coefficient_matrix_eval(coeffs, np.arange(cfg.n), p)
    z = (values < thr).sum(axis=1)

    rows = []
    for t in cfg.t_values:
        observed = float(np.mean(np.abs(z - mean) >= t))
        if cfg.independent:
            bound = standard_hoeffding_bound(t, cfg.n)
        else:
            bound = limited_independence_tail_bound(t, cfg.r, max(cfg.r, variance))
        capped = min(bound, 1.0)
        slack = 3.0 * math.sqrt(capped * (1.0 - capped) / cfg.draws)
        rows.append(TailCheckRow(t, observed, bound, slack, observed <= capped + slack))
    return TailCheckReport(cfg, mean, variance, tuple(rows))
