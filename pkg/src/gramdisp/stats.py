"""
Statistics kernel: midranks, Spearman's rho with its t-test, Fisher's z,
Steiger's Z for dependent correlations, Average Precision, and the t and
normal distribution functions they need.

All functions are pure.
"""
import math
from dataclasses import dataclass
from itertools import groupby
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy.special import betainc, erfc
from scipy.stats import rankdata

from gramdisp.errors import DegenerateSample, DomainError, NoPositives


@dataclass(frozen=True)
class PairedSample:
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.shape != y.shape or x.ndim != 1:
            raise DomainError(f"Paired sample needs two equal-length vectors, got {x.shape} and {y.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return int(self.x.shape[0])


@dataclass(frozen=True)
class CorrelationComparison:
    r1: float
    r2: float
    r12: float
    n: int
    z_stat: float
    p_two_tailed: float


def midranks(values: Sequence[float]) -> np.ndarray:
    """Ranks 1..n; tied values share the mean of their rank range."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        raise DomainError("Cannot rank an empty sequence")
    if np.isnan(arr).any():
        raise DomainError("Cannot rank NaN values")
    return rankdata(arr, method="average")


def spearman_rho(sample: PairedSample) -> float:
    """
    Pearson correlation of the midranks of x and y.

    Raises:
        DomainError: Fewer than 3 pairs.
        DegenerateSample: One side is constant.
    """
    if sample.n < 3:
        raise DomainError(f"Spearman's rho needs n >= 3, got {sample.n}")
    rx, ry = midranks(sample.x), midranks(sample.y)
    dx, dy = rx - rx.mean(), ry - ry.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateSample("Spearman's rho is undefined for a constant side")
    rho = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, rho))


def student_t_cdf(t: float, df: float) -> float:
    """P(T <= t) for Student's t with `df` degrees of freedom, via the regularized incomplete beta."""
    if df <= 0:
        raise DomainError(f"Degrees of freedom must be positive, got {df}")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return 1.0 - tail if t > 0 else tail


def normal_cdf(z: float) -> float:
    """Standard normal CDF via the complementary error function."""
    return 0.5 * float(erfc(-z / math.sqrt(2.0)))


def rho_t_test_p(rho: float, n: int) -> float:
    """
    Two-tailed p-value of H0: rho = 0 under the t approximation with n - 2 df.

    No tie correction is applied. |rho| = 1 gives p = 0 by convention.
    """
    if n < 3:
        raise DomainError(f"The t-test needs n >= 3, got {n}")
    if not -1.0 <= rho <= 1.0:
        raise DomainError(f"Correlation out of range: {rho}")
    if abs(rho) == 1.0:
        return 0.0
    df = n - 2
    t = rho * math.sqrt(df / (1.0 - rho * rho))
    # 2 * (1 - cdf(|t|)) without the cancellation
    p = float(betainc(df / 2.0, 0.5, df / (df + t * t)))
    return min(1.0, max(0.0, p))


def fisher_z(r: float) -> float:
    if not -1.0 < r < 1.0:
        raise DomainError(f"Fisher's z needs |r| < 1, got {r}")
    return math.atanh(r)


def steiger_z(r1: float, r2: float, r12: float, n: int) -> CorrelationComparison:
    """
    Steiger's Z for two dependent correlations sharing one variable, pooled-r form.

    `r1` and `r2` are the correlations of two measures with the gold variable,
    `r12` the correlation between the two measures.

    Raises:
        DomainError: A correlation with |r| >= 1, or n < 4.
    """
    if n < 4:
        raise DomainError(f"Steiger's Z needs n >= 4, got {n}")
    for r in (r1, r2, r12):
        if not -1.0 < r < 1.0:
            raise DomainError(f"Steiger's Z needs correlations in (-1, 1), got {r}")
    z1, z2 = fisher_z(r1), fisher_z(r2)
    rbar = (r1 + r2) / 2.0
    rbar2 = rbar * rbar
    psi = r12 * (1.0 - 2.0 * rbar2) - 0.5 * rbar2 * (1.0 - 2.0 * rbar2 - r12 * r12)
    s = psi / (1.0 - rbar2) ** 2
    if 2.0 - 2.0 * s <= 0.0:
        raise DomainError("Steiger's Z is undefined for this correlation triple")
    z = (z1 - z2) * math.sqrt((n - 3) / (2.0 - 2.0 * s))
    p = 2.0 * (1.0 - normal_cdf(abs(z)))
    return CorrelationComparison(r1, r2, r12, n, z, min(1.0, max(0.0, p)))


def average_precision(ranked_labels: Sequence[bool]) -> float:
    """
    Mean precision at the rank of each positive, for labels already in rank order.

    Raises:
        NoPositives: No item is positive.
    """
    labels = np.asarray(ranked_labels, dtype=bool)
    if not labels.any():
        raise NoPositives("Average precision needs at least one positive")
    hits = np.cumsum(labels)
    ranks = np.arange(1, labels.size + 1)
    return float(np.mean(hits[labels] / ranks[labels]))


def rank_by_score(items: Iterable[Tuple[str, float, bool]]) -> List[bool]:
    """Labels ordered by descending score; ties broken by ascending item id."""
    ordered = sorted(items, key=lambda item: (-item[1], item[0]))
    return [label for _, _, label in ordered]


def expected_average_precision(items: Iterable[Tuple[str, float, bool]]) -> float:
    """
    Expected AP when items with equal scores are ordered uniformly at random.

    Within a tie group of size g holding p positives, starting after `before`
    items of which `hits_before` are positive, a positive lands on each of the
    g slots with probability 1/g, and given slot j the other positives ahead
    of it number (j - 1)(p - 1)/(g - 1) in expectation.
    """
    ordered = sorted(items, key=lambda item: -item[1])
    total_pos = sum(1 for _, _, label in ordered if label)
    if total_pos == 0:
        raise NoPositives("Average precision needs at least one positive")

    acc = 0.0
    before = hits_before = 0
    for _, group in groupby(ordered, key=lambda item: item[1]):
        labels = [label for _, _, label in group]
        g, p = len(labels), sum(labels)
        if p:
            share = (p - 1) / (g - 1) if g > 1 else 0.0
            mean_precision = sum(
                (hits_before + 1 + (j - 1) * share) / (before + j) for j in range(1, g + 1)
            ) / g
            acc += p * mean_precision
        before += g
        hits_before += p
    return acc / total_pos
