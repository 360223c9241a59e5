"""Reiss-Thomas choice of the number of upper order statistics."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeInvalid
from .tail_estimation import LossSample, gamma_path

DEFAULT_THETA = 0.3
# Criterion rows are evaluated in dense blocks of this many candidate k.
_BLOCK = 1024
# Criterion values closer than this (relative to the estimator scale) count as ties.
_TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class ThresholdSelection:
    k_star: int
    theta: float
    k_values: np.ndarray
    criterion_values: np.ndarray
    method: str

    def criterion(self, k: int) -> float:
        return float(self.criterion_values[k - int(self.k_values[0])])


def default_k_range(n: int) -> tuple[int, int]:
    """Scan range ``[max(2, ceil(sqrt(n))), n-1]``, upper end capped at ``n // 2`` above n = 5000.

    The lower bound keeps the scan away from the first handful of k, where
    two or three nearly equal estimates make the criterion vanish by chance.
    """
    if n < 3:
        raise RangeInvalid(f"need n >= 3 to scan k >= 2, got n={n}")
    return max(2, math.ceil(math.sqrt(n))), (n - 1 if n <= 5000 else n // 2)


def prefix_medians(values: np.ndarray) -> np.ndarray:
    """``out[k-1] = median(values[:k])``; even counts average the middle pair."""
    lower: list[float] = []  # max-heap via negation
    upper: list[float] = []
    out = np.empty(len(values))
    for idx, v in enumerate(values.tolist()):
        if lower and v > -lower[0]:
            heapq.heappush(upper, v)
        else:
            heapq.heappush(lower, -v)
        if len(lower) > len(upper) + 1:
            heapq.heappush(upper, -heapq.heappop(lower))
        elif len(upper) > len(lower):
            heapq.heappush(lower, -heapq.heappop(upper))
        if len(lower) > len(upper):
            out[idx] = -lower[0]
        else:
            out[idx] = 0.5 * (-lower[0] + upper[0])
    return out


def reiss_thomas_criterion(path: np.ndarray, theta: float, k_min: int, k_max: int) -> np.ndarray:
    """Criterion for ``k = k_min..k_max`` given the estimator path ``path[i-1] = gamma(i)``.

    ``crit(k) = (1/k) * sum_{i<=k} i**theta * |gamma(i) - median(gamma(1..k))|``.
    Each block of candidate k sums the terms with ``i`` inside the block
    directly; terms with ``i`` before the block come from weighted prefix sums
    over the sorted earlier estimates.
    """
    g = np.asarray(path[:k_max], dtype=float)
    w = np.arange(1, k_max + 1, dtype=float) ** theta
    med = prefix_medians(g)
    out = np.empty(k_max - k_min + 1)
    for start in range(k_min, k_max + 1, _BLOCK):
        stop = min(start + _BLOCK - 1, k_max)
        ks = np.arange(start, stop + 1)
        m = med[ks - 1]
        p = start - 1  # earlier terms are i = 1..p
        if p:
            # centre before the prefix sums to limit cancellation
            c = float(np.median(m))
            order = np.argsort(g[:p], kind="stable")
            gs = g[:p][order] - c
            ws = w[:p][order]
            cw = np.concatenate(([0.0], np.cumsum(ws)))
            cwg = np.concatenate(([0.0], np.cumsum(ws * gs)))
            mc = m - c
            j = np.searchsorted(gs, mc, side="right")
            head = (mc * cw[j] - cwg[j]) + ((cwg[-1] - cwg[j]) - mc * (cw[-1] - cw[j]))
        else:
            head = np.zeros(len(ks))
        gb = g[p:stop]
        wb = w[p:stop]
        dense = np.tril(np.abs(gb[None, :] - m[:, None]) * wb[None, :])
        out[start - k_min : stop - k_min + 1] = (head + dense.sum(axis=1)) / ks
    return out


def reiss_thomas_select(
    sample: LossSample,
    method: str,
    theta: float = DEFAULT_THETA,
    k_min: int | None = None,
    k_max: int | None = None,
) -> ThresholdSelection:
    """Pick ``k*`` minimising the Reiss-Thomas criterion; ties go to the smallest k."""
    d_min, d_max = default_k_range(sample.n)
    k_min = (d_min if k_max is None else min(d_min, k_max)) if k_min is None else k_min
    k_max = d_max if k_max is None else k_max
    if not (2 <= k_min <= k_max <= sample.n - 1):
        raise RangeInvalid(f"need 2 <= k_min={k_min} <= k_max={k_max} <= n-1={sample.n - 1}")
    if not (0 <= theta < 1):
        raise RangeInvalid(f"theta={theta} outside [0, 1)")
    path = gamma_path(sample, k_max, method)
    crit = reiss_thomas_criterion(path, theta, k_min, k_max)
    tol = _TIE_RTOL * max(1.0, float(np.max(path))) * k_max**theta
    best = int(np.flatnonzero(crit <= crit.min() + tol)[0])
    return ThresholdSelection(
        k_star=k_min + best,
        theta=theta,
        k_values=np.arange(k_min, k_max + 1),
        criterion_values=crit,
        method=method,
    )
