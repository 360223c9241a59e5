"""Distortion premiums: empirical L-statistic, tail-extrapolated estimators, asymptotics.

The extrapolated estimators split the premium at the sample fraction ``k/n``:
the ``n - k`` smaller order statistics enter as an L-statistic and the upper
``k/n`` of the distribution is replaced by the Weissman quantile curve
fitted with a tail-index estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, special

from .errors import (
    DivergentTailIntegral,
    HeavinessConditionViolated,
    ParameterDomainViolated,
    RhoInvalid,
    TOutOfRange,
)
from .tail_estimation import LossSample, _check_k, estimate_gamma

# absolute tolerance for the tail integral when no closed form is available
QUAD_EPSABS = 1e-10


@dataclass(frozen=True)
class DistortionFunction:
    """Base distortion ``psi: [0, 1] -> [0, 1]``.

    ``tail_exponent`` is the power ``nu`` with ``psi(s) ~ C s**nu`` as s -> 0.
    The tail integral ``int_0 s**(-g-1) psi(s) ds`` converges iff ``g < nu``.
    """

    family = "base"

    @property
    def tail_exponent(self) -> float:
        raise NotImplementedError

    def __call__(self, t):
        raise NotImplementedError


@dataclass(frozen=True)
class ProportionalHazards(DistortionFunction):
    rho: float
    family = "proportional_hazards"

    def __post_init__(self):
        if not self.rho >= 1:
            raise RhoInvalid(f"proportional hazards needs rho >= 1, got {self.rho}")

    @property
    def tail_exponent(self) -> float:
        return 1.0 / self.rho

    def __call__(self, t):
        return np.power(t, 1.0 / self.rho)


@dataclass(frozen=True)
class Identity(DistortionFunction):
    family = "identity"

    @property
    def tail_exponent(self) -> float:
        return 1.0

    def __call__(self, t):
        return np.asarray(t, dtype=float) * 1.0


@dataclass(frozen=True)
class DualPower(DistortionFunction):
    """``psi(t) = 1 - (1 - t)**kappa``."""

    kappa: float
    family = "dual_power"

    def __post_init__(self):
        if not self.kappa >= 1:
            raise ValueError(f"dual power needs kappa >= 1, got {self.kappa}")

    @property
    def tail_exponent(self) -> float:
        return 1.0

    def __call__(self, t):
        return 1.0 - np.power(1.0 - np.asarray(t, dtype=float), self.kappa)


@dataclass(frozen=True)
class PremiumEstimate:
    value: float
    estimator: str
    k: int | None
    gamma_hat: float | None
    rho: float | None = None
    std_error: float | None = None
    ci: tuple[float, float] | None = None
    alpha: float | None = None


def distortion_eval(psi: DistortionFunction, t: float) -> float:
    if not (0.0 <= t <= 1.0):
        raise TOutOfRange(f"t={t} outside [0, 1]")
    return float(psi(t))


def l_coefficients(psi: DistortionFunction, n: int) -> np.ndarray:
    """Weights ``psi(i/n) - psi((i-1)/n)``, i = 1..n (weight 1 goes to the maximum)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return np.diff(psi(np.arange(n + 1) / n))


def empirical_premium(sample: LossSample, psi: DistortionFunction) -> PremiumEstimate:
    c = l_coefficients(psi, sample.n)
    value = float(np.dot(c, sample.descending()))
    return PremiumEstimate(value, "empirical", None, None, rho=getattr(psi, "rho", None))


def _body(sample: LossSample, k: int, psi: DistortionFunction) -> float:
    """L-statistic over the order statistics below the threshold part (i = k+1..n)."""
    c = l_coefficients(psi, sample.n)
    return float(np.dot(c[k:], sample.descending()[k:]))


def _premium_ph(sample: LossSample, k: int, rho: float, method: str, label: str) -> PremiumEstimate:
    _check_k(sample, k)
    psi = ProportionalHazards(rho)
    gamma = estimate_gamma(sample, k, method).gamma_hat
    if gamma * rho >= 1:
        raise HeavinessConditionViolated(gamma, rho)
    head = (k / sample.n) ** (1.0 / rho) * sample.threshold(k) / (1.0 - gamma * rho)
    return PremiumEstimate(head + _body(sample, k, psi), label, k, gamma, rho=rho)


def premium_ph_thill(sample: LossSample, k: int, rho: float) -> PremiumEstimate:
    """Proportional-hazards premium with the t-Hill tail; the robust estimator."""
    return _premium_ph(sample, k, rho, "t_hill", "thill_extrapolated")


def premium_ph_hill(sample: LossSample, k: int, rho: float) -> PremiumEstimate:
    """Proportional-hazards premium with the Hill tail (the classical comparison)."""
    return _premium_ph(sample, k, rho, "hill", "hill_extrapolated")


def tail_integral(psi: DistortionFunction, gamma: float, upper: float) -> float:
    """``gamma * upper**gamma * int_0^upper s**(-gamma-1) psi(s) ds``.

    Closed form for proportional hazards. Otherwise the ``s**(nu-gamma-1)``
    endpoint factor goes into QUADPACK's algebraic weight (QAWS) and only
    the bounded remainder ``psi(s) / s**nu`` is sampled.
    """
    nu = psi.tail_exponent
    if gamma >= nu:
        raise DivergentTailIntegral(
            f"int_0 s^(-gamma-1) psi(s) ds diverges for gamma={gamma:.6g} >= {nu:.6g}"
        )
    if gamma == 0:
        return 0.0
    if isinstance(psi, ProportionalHazards):
        return upper ** (1.0 / psi.rho) * gamma * psi.rho / (1.0 - gamma * psi.rho)

    def smooth(s):
        return psi(s) / s**nu if s > 0 else _psi_limit(psi)

    integral, _ = integrate.quad(
        smooth, 0.0, upper, weight="alg", wvar=(nu - gamma - 1.0, 0.0),
        epsabs=QUAD_EPSABS, epsrel=1e-12, limit=200,
    )
    return gamma * upper**gamma * integral


def _psi_limit(psi: DistortionFunction) -> float:
    # lim_{s->0} psi(s) / s**nu for the built-in families
    if isinstance(psi, DualPower):
        return psi.kappa
    return 1.0


def premium_general(
    sample: LossSample,
    k: int,
    psi: DistortionFunction,
    method: str = "t_hill",
    gamma_hat: float | None = None,
) -> PremiumEstimate:
    """Extrapolated premium for an arbitrary distortion.

    ``gamma_hat`` overrides the tail index estimated with ``method``.
    """
    _check_k(sample, k)
    gamma = estimate_gamma(sample, k, method).gamma_hat if gamma_hat is None else gamma_hat
    ratio = k / sample.n
    head = sample.threshold(k) * (float(psi(ratio)) + tail_integral(psi, gamma, ratio))
    return PremiumEstimate(
        head + _body(sample, k, psi),
        "general_extrapolated",
        k,
        gamma,
        rho=getattr(psi, "rho", None),
    )


def sigma_squared(gamma: float, rho: float) -> float:
    """Asymptotic variance of the normalised t-Hill PH premium, for 1/2 < gamma < 1/rho."""
    if not (gamma > 0.5 and rho >= 1 and gamma * rho < 1):
        raise ParameterDomainViolated(
            f"need gamma > 1/2, rho >= 1, gamma*rho < 1; got gamma={gamma}, rho={rho}"
        )
    g, r = gamma, rho
    return (
        g**2
        + g**2 * r * (r - 2 * r * g**2 + 2 * g) / (g * r - 1) ** 2
        + 2 * g**2 / ((r + g * r - 1) * (r + 2 * g * r - 2))
        + 2 * g / (2 * g - 1)
        - 2 * g * r * (r * g**2 - r * g + 1) / ((g * r - 1) * (r + g * r - 1))
    )


def normal_quantile(p: float) -> float:
    return float(special.ndtri(p))


def confidence_interval(estimate: PremiumEstimate, sample: LossSample, alpha: float = 0.05) -> PremiumEstimate:
    """Attach a plug-in normal interval to a t-Hill proportional-hazards estimate.

    The unknown ``F^{-1}(1 - k/n)`` in the normalisation is replaced by
    ``X_{n-k:n}``, and ``gamma`` by the t-Hill estimate.
    """
    if estimate.estimator != "thill_extrapolated":
        raise ValueError("confidence intervals are defined for premium_ph_thill estimates only")
    if not (0 < alpha <= 1):
        raise ValueError(f"alpha={alpha} outside (0, 1]")
    k, n, rho = estimate.k, sample.n, estimate.rho
    sigma = math.sqrt(sigma_squared(estimate.gamma_hat, rho))
    se = sigma * (k / n) ** (1.0 / rho - 0.5) * sample.threshold(k) / math.sqrt(n)
    z = normal_quantile(1.0 - alpha / 2.0)
    half = z * se
    return replace(estimate, std_error=se, ci=(estimate.value - half, estimate.value + half), alpha=alpha)
