"""Frequency estimation for repeated runs and its statistical machinery.

A probability claimed by the protocol is only observable through outcome
frequencies over N repetitions.  In the large-N limit the frequency f of an
outcome with probability p is distributed as

    P(f) = sqrt(N / (2 pi p)) * exp(-N (f - p)^2 / (2 p)),

a normal law of variance p/N (the Poisson limit of the binomial; the exact
binomial variance p(1-p)/N is available as an alternative).  Hypothesis
tests below decide whether observed tallies are consistent with claimed
probabilities, and ``required_sample_size`` gives the repetition count
needed to resolve a 2**-m deviation from an even split, which grows as
2**(2m) and makes the classical channel's hidden precision unobservable at
any realistic sample size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np
from scipy.stats import binomtest, chisquare, multinomial, norm

from .errors import ValidationError

_VARIANCE_MODES = ("poisson", "binomial")

ESTIMATE_CSV_COLUMNS = ("category", "count", "frequency", "sigma")

# exact multinomial enumeration cost cap; beyond it chi-square is used anyway
_EXACT_ENUM_LIMIT = 200_000


@dataclass(frozen=True)
class FrequencyEstimate:
    """Outcome tallies with frequencies and their standard errors."""

    counts: tuple[int, ...]
    n: int
    f: tuple[float, ...]
    sigma: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.counts)

    def to_json(self) -> dict:
        return {
            "counts": list(self.counts),
            "n": self.n,
            "f": list(self.f),
            "sigma": list(self.sigma),
        }

    def csv_rows(self) -> list[tuple]:
        return [
            (j, self.counts[j], self.f[j], self.sigma[j]) for j in range(self.k)
        ]


def estimate(outcomes, k: int) -> FrequencyEstimate:
    """Tally integer outcomes in range(k) into a FrequencyEstimate."""
    if not isinstance(k, int) or k < 2:
        raise ValidationError(f"need at least 2 outcome categories, got {k!r}")
    arr = np.asarray(outcomes)
    if arr.size == 0:
        raise ValidationError("cannot estimate frequencies from zero outcomes")
    if not np.issubdtype(arr.dtype, np.integer):
        raise ValidationError(f"outcomes must be integers, got dtype {arr.dtype}")
    if arr.min() < 0 or arr.max() >= k:
        raise ValidationError(f"outcomes must lie in range({k})")
    counts = np.bincount(arr, minlength=k)
    n = int(arr.size)
    f = counts / n
    sigma = np.sqrt(f * (1.0 - f) / n)
    return FrequencyEstimate(
        counts=tuple(int(c) for c in counts),
        n=n,
        f=tuple(float(x) for x in f),
        sigma=tuple(float(s) for s in sigma),
    )


def _check_density_args(p: float, n_samples: int, variance: str) -> float:
    if not 0.0 < p < 1.0:
        raise ValidationError(f"probability must lie strictly in (0, 1), got {p!r}")
    if not isinstance(n_samples, int) or n_samples < 1:
        raise ValidationError(f"sample count must be a positive integer, got {n_samples!r}")
    if variance not in _VARIANCE_MODES:
        raise ValidationError(f"variance mode must be one of {_VARIANCE_MODES}, got {variance!r}")
    return p / n_samples if variance == "poisson" else p * (1.0 - p) / n_samples


def frequency_density(f: float, p: float, n_samples: int, variance: str = "poisson") -> float:
    """Large-N density of the observed frequency f of a p-probable outcome."""
    var = _check_density_args(p, n_samples, variance)
    return math.exp(-((f - p) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)


def frequency_cdf(f: float, p: float, n_samples: int, variance: str = "poisson") -> float:
    """CDF matching frequency_density; the reference law for KS tests."""
    var = _check_density_args(p, n_samples, variance)
    return 0.5 * (1.0 + math.erf((f - p) / math.sqrt(2.0 * var)))


def _check_claimed(counts: tuple[int, ...], claimed) -> np.ndarray:
    probs = np.asarray(claimed, dtype=float)
    if probs.shape != (len(counts),):
        raise ValidationError(
            f"claimed distribution has {probs.size} categories, tallies have {len(counts)}"
        )
    if np.any(probs < 0.0) or abs(probs.sum() - 1.0) > 1e-9:
        raise ValidationError("claimed probabilities must be nonnegative and sum to 1")
    return probs


def _exact_multinomial_pvalue(counts: np.ndarray, probs: np.ndarray, n: int) -> float:
    # sum pmf over all tables no more likely than the observed one
    k = len(probs)
    dist = multinomial(n, probs)
    observed = dist.pmf(counts)
    total = 0.0
    # compositions of n into k parts via stars and bars
    for bars in combinations(range(n + k - 1), k - 1):
        prev, table = -1, []
        for b in bars:
            table.append(b - prev - 1)
            prev = b
        table.append(n + k - 2 - prev)
        pmf = dist.pmf(table)
        if pmf <= observed * (1.0 + 1e-12):
            total += pmf
    return min(1.0, total)


def consistency_test(
    est: FrequencyEstimate, claimed, significance: float = 1e-3
) -> bool:
    """Goodness-of-fit decision: are the tallies consistent with ``claimed``?

    Uses Pearson chi-square when every expected count is at least 5,
    otherwise an exact test (binomial for two categories, full multinomial
    enumeration when small enough).  Returns True when the data are
    consistent at the given significance.
    """
    if not 0.0 < significance < 1.0:
        raise ValidationError(f"significance must lie in (0, 1), got {significance!r}")
    probs = _check_claimed(est.counts, claimed)
    counts = np.asarray(est.counts)

    # zero-probability categories are impossible: any observation refutes them
    impossible = probs == 0.0
    if np.any(impossible):
        if np.any(counts[impossible] > 0):
            return False
        counts = counts[~impossible]
        probs = probs[~impossible]
        if len(probs) == 1:
            return True

    expected = est.n * probs
    if np.all(expected >= 5.0):
        pvalue = float(chisquare(counts, expected).pvalue)
        return pvalue >= significance

    if len(probs) == 2:
        pvalue = binomtest(int(counts[0]), est.n, float(probs[0])).pvalue
        return float(pvalue) >= significance

    n, k = est.n, len(probs)
    if math.comb(n + k - 1, k - 1) <= _EXACT_ENUM_LIMIT:
        return _exact_multinomial_pvalue(counts, probs, n) >= significance
    pvalue = float(chisquare(counts, expected).pvalue)
    return pvalue >= significance


def required_sample_size(m: int, significance: float, power: float = 0.9) -> int:
    """Repetitions needed to resolve a 2**-m shift from an even binary split.

    Two-proportion normal approximation at p = 1/2 +- 2**-(m+1): the count
    scales as 2**(2m), passing ~10**9 near m = 16.  A vacuous test
    (significance -> 1) needs only the minimal single sample.
    """
    if not isinstance(m, int) or m < 1:
        raise ValidationError(f"precision m must be a positive integer, got {m!r}")
    if not 0.0 < significance <= 1.0:
        raise ValidationError(f"significance must lie in (0, 1], got {significance!r}")
    if not 0.0 < power < 1.0:
        raise ValidationError(f"power must lie in (0, 1), got {power!r}")
    delta = 2.0 ** (-m)
    p1 = 0.5 + delta / 2.0
    p2 = 0.5 - delta / 2.0
    z = norm.ppf(1.0 - significance) + norm.ppf(power)
    if not z > 0.0:
        return 1
    needed = (z ** 2) * (p1 * (1.0 - p1) + p2 * (1.0 - p2)) / delta ** 2
    return max(1, math.ceil(needed))
