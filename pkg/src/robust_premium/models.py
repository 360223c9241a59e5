"""Pareto-type loss models used by the simulation studies.

Every model is described through ``y = 1 / g(x)`` where ``g(x) = x`` on the
strict Pareto support ``[1, inf)`` and ``g(x) = 1 + x`` on the Lomax support
``[0, inf)``. In that variable the survival function is a mixture of powers
``sum_j w_j * y**(1/gamma_j)``, which keeps the cdf, quantile and premium
code shared between the families.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import (
    DivergentPremium,
    OutOfSupport,
    RhoInvalid,
    RootNotBracketed,
    UOutOfRange,
)
from .tail_estimation import LossSample, sort_sample

SUPPORTS = ("lomax", "pareto")
_BISECT_RTOL = 1e-12
_BISECT_MAXITER = 200


@dataclass(frozen=True)
class LossModel:
    """Base class; see :class:`StrictPareto`, :class:`Lomax`, :class:`ParetoMixture`."""

    @property
    def support(self) -> str:
        raise NotImplementedError

    @property
    def components(self) -> tuple[tuple[float, float], ...]:
        """``(weight, gamma)`` pairs with positive weight."""
        raise NotImplementedError

    @property
    def tail_gamma(self) -> float:
        return max(g for _, g in self.components)

    @property
    def left_endpoint(self) -> float:
        return 1.0 if self.support == "pareto" else 0.0

    def _to_y(self, x):
        return 1.0 / x if self.support == "pareto" else 1.0 / (1.0 + x)

    def _from_y(self, y):
        return 1.0 / y if self.support == "pareto" else (1.0 - y) / y

    def survival_y(self, y):
        return sum(w * np.power(y, 1.0 / g) for w, g in self.components)

    def survival(self, x):
        """``1 - F(x)``, computed directly so far-tail values keep full precision."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.left_endpoint) or np.any(np.isnan(x)):
            raise OutOfSupport(f"x must be >= {self.left_endpoint} for {self!r}")
        return self.survival_y(self._to_y(x))

    def cdf(self, x):
        return 1.0 - self.survival(x)

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(~((u >= 0) & (u < 1))):
            raise UOutOfRange("u must lie in [0, 1)")
        return self._from_y(self._quantile_y(u))

    def _quantile_y(self, u):
        raise NotImplementedError


@dataclass(frozen=True)
class _SinglePareto(LossModel):
    gamma: float

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")

    @property
    def components(self):
        return ((1.0, self.gamma),)

    def survival_y(self, y):
        return np.power(y, 1.0 / self.gamma)

    def _quantile_y(self, u):
        return np.power(1.0 - u, self.gamma)


@dataclass(frozen=True)
class StrictPareto(_SinglePareto):
    """``1 - F(x) = x**(-1/gamma)`` on ``x >= 1``."""

    @property
    def support(self):
        return "pareto"

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(~((u >= 0) & (u < 1))):
            raise UOutOfRange("u must lie in [0, 1)")
        return np.power(1.0 - u, -self.gamma)


@dataclass(frozen=True)
class Lomax(_SinglePareto):
    """``1 - F(x) = (1 + x)**(-1/gamma)`` on ``x >= 0``."""

    @property
    def support(self):
        return "lomax"

    def quantile(self, u):
        u = np.asarray(u, dtype=float)
        if np.any(~((u >= 0) & (u < 1))):
            raise UOutOfRange("u must lie in [0, 1)")
        return np.expm1(-self.gamma * np.log1p(-u))


@dataclass(frozen=True)
class ParetoMixture(LossModel):
    """``1 - F = (1 - eps) g(x)**(-1/gamma1) + eps g(x)**(-1/gamma2)``.

    A core Pareto tail contaminated, with probability ``eps``, by a second one.
    """

    gamma1: float
    gamma2: float
    eps: float
    variant: str = "lomax"

    def __post_init__(self):
        if not (self.gamma1 > 0 and self.gamma2 > 0):
            raise ValueError("gamma1 and gamma2 must be positive")
        if not (0 <= self.eps < 0.5):
            raise ValueError(f"eps={self.eps} outside [0, 0.5)")
        if self.variant not in SUPPORTS:
            raise ValueError(f"variant must be one of {SUPPORTS}")

    @property
    def support(self):
        return self.variant

    @property
    def components(self):
        if self.eps == 0:
            return ((1.0, self.gamma1),)
        return ((1.0 - self.eps, self.gamma1), (self.eps, self.gamma2))

    def core(self) -> LossModel:
        """The uncontaminated first component."""
        return Lomax(self.gamma1) if self.variant == "lomax" else StrictPareto(self.gamma1)

    def survival_y(self, y):
        return (1.0 - self.eps) * np.power(y, 1.0 / self.gamma1) + self.eps * np.power(
            y, 1.0 / self.gamma2
        )

    def quantile(self, u):
        if self.eps == 0:
            return self.core().quantile(u)
        return super().quantile(u)

    def _quantile_y(self, u):
        # Solve survival_y(y) = 1 - u by bisection. Each power term bounds the
        # mixture, so [(1-u)**g_max, min_j ((1-u)/w_j)**g_j] brackets the root.
        target = 1.0 - u
        comps = self.components
        g_max = max(g for _, g in comps)
        lo = np.power(target, g_max)
        hi = np.minimum.reduce([np.minimum(np.power(target / w, g), 1.0) for w, g in comps])
        slack = 1e-12 * target
        if np.any(self.survival_y(lo) > target + slack) or np.any(self.survival_y(hi) < target - slack):
            raise RootNotBracketed("mixture quantile bracket does not contain the root")
        for _ in range(_BISECT_MAXITER):
            mid = 0.5 * (lo + hi)
            above = self.survival_y(mid) > target
            hi = np.where(above, mid, hi)
            lo = np.where(above, lo, mid)
            if np.all(hi - lo <= _BISECT_RTOL * hi):
                break
        return 0.5 * (lo + hi)


def make_model(family: str, gamma: float = 0.6, gamma2: float = 2.0, eps: float = 0.0,
               variant: str = "lomax") -> LossModel:
    if family == "lomax":
        return Lomax(gamma)
    if family == "pareto":
        return StrictPareto(gamma)
    if family == "mixture":
        return ParetoMixture(gamma, gamma2, eps, variant)
    raise ValueError(f"unknown model family {family!r}")


def model_cdf(model: LossModel, x: float) -> float:
    return float(model.cdf(x))


def model_quantile(model: LossModel, u: float) -> float:
    return float(model.quantile(u))


def random_stream(seed: int, *key: int) -> np.random.Generator:
    """Counter-based (Philox) stream for ``(seed, *key)``.

    Streams for distinct keys are independent, so a replication draws the
    same numbers whatever order or process it runs in.
    """
    seq = np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))


def sample_model(model: LossModel, n: int, rng_stream: np.random.Generator) -> LossSample:
    """Inverse-transform sample of size ``n``, returned sorted."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return sort_sample(model.quantile(rng_stream.random(n)))


def true_premium(model: LossModel, rho: float, method: str = "auto") -> float:
    """Proportional-hazards premium ``int_0^inf (1 - F(x))**(1/rho) dx``.

    ``method="quad"`` forces numerical integration for any model. In the
    ``y`` variable the integral becomes ``int_0^1 S(y)**(1/rho) y**-2 dy``
    (plus 1 for the strict-Pareto support); the ``y**(1/(g_max rho) - 2)``
    endpoint behaviour is handled by QUADPACK's algebraic weight.
    """
    if not rho >= 1:
        raise RhoInvalid(f"rho must be >= 1, got {rho}")
    g_max = model.tail_gamma
    if g_max * rho >= 1:
        raise DivergentPremium(
            f"tail index {g_max} times rho {rho} >= 1: the premium is infinite"
        )
    offset = 1.0 if model.support == "pareto" else 0.0
    if method == "auto" and len(model.components) == 1:
        gr = g_max * rho
        return offset + gr / (1.0 - gr)
    if method not in ("auto", "quad"):
        raise ValueError(f"unknown method {method!r}")

    lead = 1.0 / g_max

    def smooth(y):
        # S(y) / y**(1/g_max) is bounded on [0, 1]
        return sum(w * y ** (1.0 / g - lead) for w, g in model.components) ** (1.0 / rho)

    value, _ = integrate.quad(
        smooth, 0.0, 1.0, weight="alg", wvar=(lead / rho - 2.0, 0.0),
        epsabs=1e-11, epsrel=1e-12, limit=200,
    )
    return offset + value
