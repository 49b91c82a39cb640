"""PELT changepoint detection on annual metric series.

Segment cost is the Gaussian negative log-likelihood with segment-fitted
mean and variance (variance floored at 1e-8) so both mean and variance
changes register; the default penalty is 2*ln(n) per changepoint. Splitting
a segment never increases total cost, so pruning is exact with K = 0.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import TooShort

VAR_FLOOR = 1e-8
MIN_SEGMENT = 2


@dataclass(frozen=True)
class MetricSeries:
    years: tuple
    values: tuple

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise ValueError("years must be strictly increasing")
        if not all(math.isfinite(v) for v in self.values):
            raise ValueError("values must be finite")
        if len(self.years) != len(self.values):
            raise ValueError("years and values must align")

    @classmethod
    def from_points(cls, points):
        pts = sorted(points)
        return cls(tuple(int(y) for y, _ in pts), tuple(float(v) for _, v in pts))

    def __len__(self):
        return len(self.years)

    def drop_years(self, excluded):
        keep = [(y, v) for y, v in zip(self.years, self.values) if y not in set(excluded)]
        return MetricSeries.from_points(keep)


@dataclass(frozen=True)
class ChangepointResult:
    breakpoints: tuple  # years at which a new segment starts
    penalty: float
    segment_params: tuple  # per-segment (mean, variance)


def default_penalty(n: int) -> float:
    return 2.0 * math.log(n)


class _SegmentCost:
    """O(1) Gaussian NLL via prefix sums."""

    def __init__(self, values, var_floor=VAR_FLOOR):
        x = np.asarray(values, dtype=np.float64)
        self.s1 = np.concatenate([[0.0], np.cumsum(x)])
        self.s2 = np.concatenate([[0.0], np.cumsum(x * x)])
        self.var_floor = var_floor

    def stats(self, a, b):
        m = b - a
        total = self.s1[b] - self.s1[a]
        mean = total / m
        rss = max(self.s2[b] - self.s2[a] - m * mean * mean, 0.0)
        return mean, rss

    def cost(self, a, b):
        m = b - a
        mean, rss = self.stats(a, b)
        var = max(rss / m, self.var_floor)
        return 0.5 * m * math.log(2.0 * math.pi * var) + rss / (2.0 * var)


def pelt_breakpoint_indices(values, penalty, min_segment=MIN_SEGMENT,
                            var_floor=VAR_FLOOR):
    """Indices (first point of each new segment) of the optimal penalized
    segmentation."""
    n = len(values)
    if n < 2 * min_segment:
        raise TooShort(f"need at least {2 * min_segment} points, got {n}")
    seg = _SegmentCost(values, var_floor)
    F = np.full(n + 1, math.inf)
    F[0] = -penalty
    back = np.zeros(n + 1, dtype=np.int64)
    candidates = [0]
    flagged = {}
    for t in range(min_segment, n + 1):
        # a candidate flagged as dominated at time t_f is only safe to drop
        # once the dominating point itself becomes usable, i.e. from
        # t_f + min_segment onward
        candidates = [
            s for s in candidates if s not in flagged or flagged[s] + min_segment > t
        ]
        best_cost = math.inf
        best_s = 0
        trial = {}
        for s in candidates:
            if t - s < min_segment:
                continue
            c = F[s] + seg.cost(s, t) + penalty
            trial[s] = c
            if c < best_cost:
                best_cost = c
                best_s = s
        F[t] = best_cost
        back[t] = best_s
        # splitting a segment never increases its Gaussian NLL, so a
        # candidate with F[s] + C(s, t) > F[t] stays dominated forever
        for s, c in trial.items():
            if s not in flagged and c - penalty > F[t]:
                flagged[s] = t
        candidates.append(t)
    bounds = []
    t = n
    while t > 0:
        s = int(back[t])
        if s > 0:
            bounds.append(s)
        t = s
    return sorted(bounds)


def pelt_detect(series: MetricSeries, penalty=None, min_segment=MIN_SEGMENT,
                var_floor=VAR_FLOOR) -> ChangepointResult:
    """Exact penalized-cost segmentation of a metric series."""
    n = len(series)
    if n < max(4, 2 * min_segment):
        raise TooShort(f"need at least {max(4, 2 * min_segment)} points, got {n}")
    if penalty is None:
        penalty = default_penalty(n)
    values = list(series.values)
    bounds = pelt_breakpoint_indices(values, penalty, min_segment, var_floor)
    seg = _SegmentCost(values, var_floor)
    edges = [0, *bounds, n]
    params = []
    for a, b in zip(edges, edges[1:]):
        mean, rss = seg.stats(a, b)
        params.append((mean, rss / (b - a)))
    years = tuple(series.years[i] for i in bounds)
    return ChangepointResult(years, float(penalty), tuple(params))


def penalty_sweep(series: MetricSeries, multipliers=(0.25, 0.5, 0.75, 1.0, 1.25,
                                                     1.5, 2.0, 3.0, 4.0, 6.0),
                  min_segment=MIN_SEGMENT):
    """Detection results across a grid of penalties scaled off the default."""
    base = default_penalty(len(series))
    out = []
    for mult in multipliers:
        res = pelt_detect(series, penalty=base * mult, min_segment=min_segment)
        out.append((base * mult, res))
    return out
