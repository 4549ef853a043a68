"""Mergeable Monte Carlo estimates.

An Estimate keeps the raw sums (sum, sum of squares, count) next to the
reported mean and standard error.  Samples produced by the estimators are
integers (heights, descendant counts, indicators, cycle lengths), so the
sums are exact Python integers and merging is associative and
order-independent; the float mean/stderr are derived views.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class Estimate:
    """Pooled mean and standard error of one sampled statistic."""

    mean: float
    stderr: float
    count: int
    seed: int
    sum: object = None      # exact running sum (int or Fraction) when available
    sumsq: object = None

    @staticmethod
    def from_sums(total, total_sq, count, seed, scale=1) -> "Estimate":
        """Build from exact sums of raw samples, optionally scaled.

        ``scale`` multiplies the sample values (so the mean scales by it and
        the variance by its square); used e.g. to turn an indicator mean
        into 2d * P(hit).
        """
        if count <= 0:
            raise ValueError("need at least one sample")
        s = total * scale
        ssq = total_sq * scale * scale
        mean = s / count
        if count > 1:
            var = (ssq - Fraction(s) * s / count) / (count - 1)
            stderr = math.sqrt(max(float(var), 0.0) / count)
        else:
            stderr = float("inf")
        return Estimate(mean=float(mean), stderr=stderr, count=count,
                        seed=seed, sum=s, sumsq=ssq)

    @staticmethod
    def from_histogram(hist, seed, scale=1) -> "Estimate":
        """Build from integer value -> count pairs (dict or array)."""
        if hasattr(hist, "items"):
            items = hist.items()
        else:
            items = ((v, int(c)) for v, c in enumerate(hist))
        total = 0
        total_sq = 0
        count = 0
        for v, c in items:
            c = int(c)
            if c == 0:
                continue
            v = int(v)
            total += v * c
            total_sq += v * v * c
            count += c
        return Estimate.from_sums(total, total_sq, count, seed, scale=scale)

    def merge(self, other: "Estimate") -> "Estimate":
        """Pool two estimates of the same statistic (exact in the sums)."""
        if self.sum is None or other.sum is None:
            raise ValueError("cannot merge estimates without raw sums")
        return Estimate.from_sums(self.sum + other.sum,
                                  self.sumsq + other.sumsq,
                                  self.count + other.count,
                                  seed=self.seed)


def merge_all(estimates) -> Estimate:
    estimates = list(estimates)
    out = estimates[0]
    for e in estimates[1:]:
        out = out.merge(e)
    return out


def pooled_stderr(*estimates) -> float:
    """Standard error of a difference of independent estimates."""
    return math.sqrt(sum(e.stderr**2 for e in estimates))
