"""Order statistics and tail-index estimation (Hill, t-Hill) with Weissman extrapolation.

All estimators index into a :class:`LossSample`, which is sorted once at
construction. ``k`` always counts the upper extremes *above* the threshold
order statistic ``X_{n-k:n}``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal

import numpy as np

from .errors import (
    EmptyOrTooSmall,
    KOutOfRange,
    NegativeOrNonFinite,
    NonPositiveGamma,
    NonPositiveTailValue,
    SOutOfRange,
)

Method = Literal["hill", "t_hill"]
METHODS: tuple[str, ...] = ("hill", "t_hill")


@dataclass(frozen=True, eq=False)
class LossSample:
    """Ascending, validated, immutable loss observations.

    Build instances with :func:`sort_sample`; the constructor trusts its input.
    """

    values: np.ndarray

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def order_stat(self, j: int) -> float:
        """``X_{j:n}`` with 1-based ``j`` counted from the smallest value."""
        return float(self.values[j - 1])

    def threshold(self, k: int) -> float:
        """``X_{n-k:n}``, the order statistic just below the ``k`` upper extremes."""
        return float(self.values[self.n - k - 1])

    def descending(self) -> np.ndarray:
        """Values largest-first: element ``i-1`` is ``X_{n-i+1:n}``."""
        return self.values[::-1]

    def scaled(self, c: float) -> "LossSample":
        if not c > 0:
            raise ValueError("scale factor must be positive")
        return sort_sample(self.values * c)

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, LossSample):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self) -> str:
        return f"LossSample(n={self.n}, min={self.values[0]:.6g}, max={self.values[-1]:.6g})"


@dataclass(frozen=True)
class TailIndexEstimate:
    gamma_hat: float
    k: int
    method: str


def sort_sample(raw: Iterable[float]) -> LossSample:
    """Validate raw losses and return them as an ascending :class:`LossSample`."""
    arr = np.array(raw, dtype=float).ravel()
    if arr.shape[0] < 2:
        raise EmptyOrTooSmall(f"need at least 2 observations, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise NegativeOrNonFinite("sample contains NaN or infinite values")
    if np.any(arr < 0):
        raise NegativeOrNonFinite("sample contains negative values")
    return LossSample(np.sort(arr, kind="stable"))


def _check_k(sample: LossSample, k: int) -> None:
    if not (1 <= k < sample.n):
        raise KOutOfRange(f"k={k} outside [1, {sample.n - 1}]")


def _upper(sample: LossSample, k: int) -> tuple[np.ndarray, float]:
    _check_k(sample, k)
    thr = sample.threshold(k)
    if not thr > 0:
        raise NonPositiveTailValue(f"threshold X_(n-k:n) = {thr} must be positive for k={k}")
    return sample.descending()[:k], thr


def hill_estimator(sample: LossSample, k: int) -> TailIndexEstimate:
    """Hill estimator: mean log-excess of the top ``k`` values over ``X_{n-k:n}``."""
    top, thr = _upper(sample, k)
    gamma = float(np.mean(np.log(top) - np.log(thr)))
    return TailIndexEstimate(gamma, k, "hill")


def t_hill_estimator(sample: LossSample, k: int) -> TailIndexEstimate:
    """t-Hill (harmonic-mean) estimator.

    ``S_k`` is the mean of the ratios ``X_{n-k:n} / X_{n-j+1:n}``, each in
    ``(0, 1]``, and the estimate is ``1/S_k - 1``. A single huge observation
    can move ``S_k`` by at most ``1/k``, which is what bounds its influence.
    """
    top, thr = _upper(sample, k)
    s_k = float(np.mean(thr / top))
    return TailIndexEstimate(1.0 / s_k - 1.0, k, "t_hill")


def estimate_gamma(sample: LossSample, k: int, method: str) -> TailIndexEstimate:
    if method == "hill":
        return hill_estimator(sample, k)
    if method == "t_hill":
        return t_hill_estimator(sample, k)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def gamma_path(sample: LossSample, k_max: int, method: str) -> np.ndarray:
    """Estimates for every ``k = 1..k_max`` at once; element ``k-1`` holds k.

    Uses running sums, so values agree with the single-``k`` estimators up to
    rounding. Rounding can push a mathematically nonnegative estimate a few
    ulps below zero; those are clipped to 0.
    """
    _check_k(sample, k_max)
    desc = sample.descending()
    if not desc[k_max] > 0:
        raise NonPositiveTailValue(
            f"threshold X_(n-k:n) = {desc[k_max]} must be positive for k={k_max}"
        )
    ks = np.arange(1, k_max + 1)
    thr = desc[1 : k_max + 1]
    top = desc[:k_max]
    if method == "hill":
        path = np.cumsum(np.log(top)) / ks - np.log(thr)
    elif method == "t_hill":
        # ratios taken relative to the maximum keep tied values exact
        path = 1.0 / ((thr / top[0]) * (np.cumsum(top[0] / top) / ks)) - 1.0
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    return np.maximum(path, 0.0)


def weissman_quantile(sample: LossSample, k: int, gamma_hat: float, s: float) -> float:
    """Extrapolated upper quantile ``F^{-1}(1 - s)`` for ``0 < s <= k/n``."""
    _check_k(sample, k)
    ratio = k / sample.n
    if not (0 < s <= ratio):
        raise SOutOfRange(f"s={s} outside (0, k/n={ratio}]")
    if not np.isfinite(gamma_hat):
        raise ValueError("gamma_hat must be finite")
    return float((ratio / s) ** gamma_hat * sample.threshold(k))


def t_hill_asymptotic_variance(gamma: float) -> float:
    """Limiting variance of ``sqrt(k) * (t-Hill - gamma)``: ``g^2 (1+g)^2 / (1+2g)``."""
    if not gamma > 0:
        raise NonPositiveGamma(f"gamma must be positive, got {gamma}")
    return gamma**2 * (1 + gamma) ** 2 / (1 + 2 * gamma)
