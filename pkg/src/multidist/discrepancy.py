"""Binary-matrix hard instances: the matrix-to-family reduction, exact row
error identities, a brute-force discrepancy oracle, and the distinguisher.

Every row i of a 0/1 matrix A (no zero rows, m_i ones) yields two
distributions on the points {x_j : a_ij = 1}, each with mass 1/m_i: one labels
everything +1, the other everything -1. For any labeling v of the points, with
sigma = sign(v . a_i) (+1 at zero), the member errors obey exactly

    er on the -sigma member = 1/2 + |v . a_i| / (2 m_i)
    er on the  sigma member = 1/2 - |v . a_i| / (2 m_i)

so worst-case error 1/2 is attainable iff some coloring z has Az = 0. All
arithmetic in this module is exact (integers and fractions); nothing is
rounded.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .model import DistributionFamily, Domain, LabeledDistribution

BRUTEFORCE_LIMIT = 20


@dataclass(frozen=True)
class BinaryMatrix:
    """A square 0/1 matrix with no all-zero rows."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.int8)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"matrix must be square, got shape {arr.shape}")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValueError("entries must be 0 or 1")
        row_ones = arr.sum(axis=1)
        zero_rows = np.nonzero(row_ones == 0)[0]
        if zero_rows.size:
            raise ValueError(f"rows {zero_rows.tolist()} are all zero")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def row_ones(self) -> np.ndarray:
        out = self.entries.sum(axis=1, dtype=np.int64)
        out.flags.writeable = False
        return out


@dataclass(frozen=True)
class Coloring:
    """A vector in {-1, +1}^n."""

    z: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.z, dtype=np.int8)
        if arr.ndim != 1:
            raise ValueError("coloring must be one-dimensional")
        if not np.all((arr == 1) | (arr == -1)):
            raise ValueError("coloring entries must be -1 or +1")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "z", arr)

    @property
    def n(self) -> int:
        return self.z.shape[0]


def _as_label_array(labels, n: int) -> np.ndarray:
    if isinstance(labels, Coloring):
        arr = labels.z
    elif hasattr(labels, "labels"):
        arr = labels.labels
    elif hasattr(labels, "label_vector"):
        arr = labels.label_vector()
    else:
        arr = np.asarray(labels, dtype=np.int8)
    if arr.shape[0] < n:
        raise ValueError(f"labeling covers {arr.shape[0]} points, need {n}")
    return arr[:n].astype(np.int64)


@dataclass(frozen=True)
class ReductionFamily:
    """The 2n-member family derived from a matrix; member order is
    (row 0 +, row 0 -, row 1 +, row 1 -, ...) and point x_j is index j."""

    matrix: BinaryMatrix

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def k(self) -> int:
        return 2 * self.n

    @property
    def points(self) -> tuple[int, ...]:
        return tuple(range(self.n))

    @cached_property
    def family(self) -> DistributionFamily:
        """Float-mass view for interop with the learner and metrics modules."""
        members = []
        a = self.matrix.entries
        for i in range(self.n):
            mass = a[i].astype(np.float64) / float(self.matrix.row_ones[i])
            members.append(LabeledDistribution(mass, np.ones(self.n)))
            members.append(LabeledDistribution(mass, np.zeros(self.n)))
        return DistributionFamily(Domain(self.n), tuple(members))

    def member_errors(self, labels) -> list[Fraction]:
        """Exact per-member errors of a labeling, by direct summation: the +
        member errs where the labeling says -1, the - member where it says +1."""
        v = _as_label_array(labels, self.n)
        a = self.matrix.entries
        out: list[Fraction] = []
        for i in range(self.n):
            m_i = int(self.matrix.row_ones[i])
            support = a[i] == 1
            plus_hits = int(np.count_nonzero(support & (v == -1)))
            minus_hits = int(np.count_nonzero(support & (v == 1)))
            out.append(Fraction(plus_hits, m_i))
            out.append(Fraction(minus_hits, m_i))
        return out


def matrix_to_family(matrix: BinaryMatrix) -> ReductionFamily:
    return ReductionFamily(matrix)


def row_identity_errors(rf: ReductionFamily, labels, i: int) -> tuple[Fraction, Fraction, int]:
    """(error on the -sigma member, error on the sigma member, sigma) for row i,
    via the exact identity 1/2 +- |v . a_i| / (2 m_i)."""
    v = _as_label_array(labels, rf.n)
    dot = int(v @ rf.matrix.entries[i].astype(np.int64))
    sigma = 1 if dot >= 0 else -1
    m_i = int(rf.matrix.row_ones[i])
    shift = Fraction(abs(dot), 2 * m_i)
    return Fraction(1, 2) + shift, Fraction(1, 2) - shift, sigma


def coloring_error(labels, rf: ReductionFamily) -> Fraction:
    """Worst-case error of a labeling over all 2n members, exactly.

    Computed via the row identity and cross-checked against direct summation;
    the two must agree identically.
    """
    v = _as_label_array(labels, rf.n)
    dots = rf.matrix.entries.astype(np.int64) @ v
    per_row = [
        Fraction(1, 2) + Fraction(abs(int(d)), 2 * int(m))
        for d, m in zip(dots, rf.matrix.row_ones)
    ]
    via_identity = max(per_row)
    via_summation = max(rf.member_errors(v))
    if via_identity != via_summation:
        raise AssertionError(
            f"row identity {via_identity} disagrees with direct summation {via_summation}"
        )
    return via_identity


def _colorings_block(n: int, start: int, stop: int) -> np.ndarray:
    """Colorings with z[0] = -1, indexed lexicographically (-1 before +1):
    returns an (n, stop-start) sign matrix."""
    codes = np.arange(start, stop, dtype=np.int64)
    bits = (codes[None, :] >> np.arange(n - 2, -1, -1)[:, None]) & 1
    z = np.empty((n, stop - start), dtype=np.int64)
    z[0] = -1
    z[1:] = np.where(bits == 1, 1, -1)
    return z


def bruteforce_min_discrepancy(matrix: BinaryMatrix,
                               block: int = 1 << 14) -> tuple[Coloring, int, float]:
    """Exhaustive coloring minimizing the max row imbalance |Az|_inf.

    Negating a coloring never changes the norms, so only the 2^(n-1) colorings
    with z[0] = -1 are enumerated; scanning them in lexicographic order makes
    the first minimizer found the lexicographically smallest one overall.
    Ties beyond that would fall to the 2-norm, which the lex rule already
    pins down. Returns (coloring, inf_norm, two_norm).
    """
    n = matrix.n
    if n > BRUTEFORCE_LIMIT:
        raise ValueError(f"brute force limited to n <= {BRUTEFORCE_LIMIT}, got {n}")
    a = matrix.entries.astype(np.int64)
    total = 1 << (n - 1) if n > 1 else 1
    best_inf = None
    best_z = None
    for start in range(0, total, block):
        stop = min(start + block, total)
        z_block = _colorings_block(n, start, stop)
        az = a @ z_block
        inf_norms = np.abs(az).max(axis=0)
        idx = int(np.argmin(inf_norms))
        if best_inf is None or int(inf_norms[idx]) < best_inf:
            best_inf = int(inf_norms[idx])
            best_z = z_block[:, idx].copy()
            if best_inf == 0:
                break
    az_best = a @ best_z
    two_norm = math.sqrt(float(az_best @ az_best))
    return Coloring(best_z.astype(np.int8)), best_inf, two_norm


def min_deterministic_error(rf: ReductionFamily, block: int = 1 << 14) -> Fraction:
    """Exact min over all 2^n labelings of the worst-case error; equals
    1/2 + min_z max_i |a_i . z| / (2 m_i).

    Per-row weights 1/(2 m_i) are put over the common denominator
    2 * lcm(m_i) so the inner max/min runs in integer arithmetic.
    """
    n = rf.n
    if n > BRUTEFORCE_LIMIT:
        raise ValueError(f"brute force limited to n <= {BRUTEFORCE_LIMIT}, got {n}")
    a = rf.matrix.entries.astype(np.int64)
    m = [int(v) for v in rf.matrix.row_ones]
    l = 2 * math.lcm(*m)
    row_scale = np.array([l // (2 * mi) for mi in m], dtype=np.int64)
    total = 1 << (n - 1) if n > 1 else 1
    best = None
    for start in range(0, total, block):
        stop = min(start + block, total)
        z_block = _colorings_block(n, start, stop)
        scaled = np.abs(a @ z_block) * row_scale[:, None]
        val = int(scaled.max(axis=0).min())
        if best is None or val < best:
            best = val
            if best == 0:
                break
    return Fraction(1, 2) + Fraction(best, l)


def planted_zero_matrix(n: int, density: float, rng: np.random.Generator
                        ) -> tuple[BinaryMatrix, Coloring]:
    """A matrix guaranteed to have a zero-discrepancy coloring.

    Draws z uniformly (redrawn in the 2^(1-n) chance it is single-signed,
    since a balanced row then cannot exist), then gives every row an equal
    count of +1-positions and -1-positions of z, so a_i . z = 0 by
    construction. density steers the expected row support size.
    """
    if n % 2 != 0:
        raise ValueError("planted instances need even n")
    if not 0.0 < density <= 1.0:
        raise ValueError("density must lie in (0, 1]")
    while True:
        z = np.where(rng.random(n) < 0.5, 1, -1).astype(np.int8)
        if np.any(z == 1) and np.any(z == -1):
            break
    plus = np.nonzero(z == 1)[0]
    minus = np.nonzero(z == -1)[0]
    half_target = max(1, round(density * n / 2.0))
    rows = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        s = min(half_target, plus.size, minus.size)
        rows[i, rng.choice(plus, size=s, replace=False)] = 1
        rows[i, rng.choice(minus, size=s, replace=False)] = 1
    return BinaryMatrix(rows), Coloring(z)


def planted_high_discrepancy_matrix(n: int, rng: np.random.Generator,
                                    density: float = 0.5) -> BinaryMatrix:
    """A matrix on which every labeling has worst-case error 1 over the
    derived family.

    Three points get all three of their pair rows {a,b}, {b,c}, {a,c}; any
    +-1 assignment makes some pair equal, so that row has |a_i . z| = 2 with
    m_i = 2, forcing error 1/2 + 1/2 on one of its members. Remaining rows are
    random nonempty fill. The brute-force oracle certifies |Az|_inf >= 2 on
    every output.
    """
    if n < 3:
        raise ValueError("need n >= 3 for the pair-row gadget")
    tri = rng.choice(n, size=3, replace=False)
    rows = np.zeros((n, n), dtype=np.int8)
    pairs = [(tri[0], tri[1]), (tri[1], tri[2]), (tri[0], tri[2])]
    order = rng.permutation(n)
    for row_idx, (a, b) in zip(order[:3], pairs):
        rows[row_idx, a] = 1
        rows[row_idx, b] = 1
    for row_idx in order[3:]:
        picks = np.nonzero(rng.random(n) < density)[0]
        if picks.size == 0:
            picks = rng.choice(n, size=1)
        rows[row_idx, picks] = 1
    return BinaryMatrix(rows)


class Verdict(enum.Enum):
    ZERO_DISCREPANCY_LIKELY = "zero_discrepancy_likely"
    HIGH_DISCREPANCY = "high_discrepancy"


def distinguisher(matrix: BinaryMatrix, labels, eps) -> Verdict:
    """Evaluate a classifier on the matrix's points and threshold its exact
    worst-case error at 1/2 + eps: below means a zero-discrepancy coloring
    plausibly exists, at-or-above means high discrepancy."""
    rf = ReductionFamily(matrix)
    err = coloring_error(labels, rf)
    if err < Fraction(1, 2) + Fraction(eps):
        return Verdict.ZERO_DISCREPANCY_LIKELY
    return Verdict.HIGH_DISCREPANCY


def dummy_point_variant(rf: ReductionFamily, opt_prime) -> DistributionFamily:
    """Extend the family with a sure-label point so that the best achievable
    error drops to about opt_prime.

    The new point (appended as the last domain index) gets mass
    1 - 2*opt_prime with label +1 in every member; original masses are
    rescaled to 2*opt_prime/m_i. opt_prime must lie in (0, 1/2]; at 1/2 the
    original family reappears with a zero-mass extra point.
    """
    q = Fraction(opt_prime)
    if not Fraction(0) < q <= Fraction(1, 2):
        raise ValueError("opt_prime must lie in (0, 1/2]")
    n = rf.n
    a = rf.matrix.entries
    dummy_mass = float(1 - 2 * q)
    members = []
    for i in range(n):
        scale = float(2 * q / int(rf.matrix.row_ones[i]))
        mass = np.append(a[i].astype(np.float64) * scale, dummy_mass)
        eta_plus = np.append(np.ones(n), 1.0)
        eta_minus = np.append(np.zeros(n), 1.0)
        members.append(LabeledDistribution(mass, eta_plus))
        members.append(LabeledDistribution(mass, eta_minus))
    return DistributionFamily(Domain(n + 1), tuple(members))


def dummy_member_errors(rf: ReductionFamily, opt_prime, labels) -> list[Fraction]:
    """Exact per-member errors on the dummy-point family for a labeling of all
    n+1 points (dummy last)."""
    q = Fraction(opt_prime)
    if not Fraction(0) < q <= Fraction(1, 2):
        raise ValueError("opt_prime must lie in (0, 1/2]")
    v = _as_label_array(labels, rf.n + 1)
    dummy_err = (1 - 2 * q) if v[rf.n] == -1 else Fraction(0)
    base = rf.member_errors(v[: rf.n])
    return [dummy_err + 2 * q * e for e in base]


def dummy_min_deterministic_error(rf: ReductionFamily, opt_prime) -> Fraction:
    """Exact min over all 2^(n+1) labelings of the dummy-point family's
    worst-case error. Labeling the dummy -1 costs 1 - 2*opt_prime everywhere,
    so the minimum is min(that + ..., 2*opt_prime * base minimum)."""
    q = Fraction(opt_prime)
    base = min_deterministic_error(rf)
    with_plus = 2 * q * base
    # dummy labeled -1: every member pays 1 - 2q, plus the rescaled base error
    with_minus = (1 - 2 * q) + with_plus
    return min(with_plus, with_minus)
