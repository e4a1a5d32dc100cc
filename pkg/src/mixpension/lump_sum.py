"""One-year lump-sum repayment: payback-first and payback-above-barrier.

At time ``j`` the contributor invests ``alpha * (C_j - C_0)``; one year later
the state is repaid from the fund.  Only the one-year Brownian increment
matters, so every quantity is a Black-Scholes style closed form in ``Phi``.

Currency results are computed per unit of deficit and scaled by
``step.deficit`` on return.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .fund_model import FundParams
from .numerics import DomainError, std_normal_cdf as Phi, std_normal_ppf


@dataclass(frozen=True)
class DeficitStep:
    """Baseline contribution ``c0`` and required contribution ``cj > c0``."""

    c0: float
    cj: float

    def __post_init__(self) -> None:
        if not (self.c0 > 0 and self.cj > self.c0):
            raise DomainError(f"need cj > c0 > 0, got c0={self.c0!r}, cj={self.cj!r}")

    @property
    def deficit(self) -> float:
        return self.cj - self.c0

    @classmethod
    def from_deficit(cls, deficit: float, c0: float = 1.0) -> "DeficitStep":
        return cls(c0, c0 + deficit)


@dataclass(frozen=True)
class BarrierPolicy:
    """Investment multiplier ``alpha`` and guaranteed return barrier ``b >= -1``."""

    alpha: float
    b: float

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if not self.b >= -1:
            raise DomainError(f"barrier b must be >= -1, got {self.b!r}")


def _log_alpha(alpha: float) -> float:
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    return math.log(alpha)


def full_payback_prob(params: FundParams, alpha: float) -> float:
    """``P[alpha exp(mu + sigma Z) >= 1] = Phi((mu + ln alpha) / sigma)``."""
    return Phi((params.mu + _log_alpha(alpha)) / params.sigma)


def _unit_loss(params: FundParams, alpha: float) -> float:
    mu, s = params.mu, params.sigma
    la = _log_alpha(alpha)
    loss = Phi(-(mu + la) / s) - alpha * math.exp(mu + s * s / 2) * Phi(-(mu + s * s + la) / s)
    return max(loss, 0.0)


def _unit_gain(params: FundParams, alpha: float) -> float:
    mu, s = params.mu, params.sigma
    la = _log_alpha(alpha)
    gain = alpha * math.exp(mu + s * s / 2) * Phi((mu + s * s + la) / s) - Phi((mu + la) / s)
    return max(gain, 0.0)


def expected_state_loss(params: FundParams, alpha: float, step: DeficitStep) -> float:
    """Expected shortfall ``E[(C_j - C_0)(1 - alpha e^{mu + sigma Z})^+]`` borne by the state."""
    return step.deficit * _unit_loss(params, alpha)


def expected_pc_gain(params: FundParams, alpha: float, step: DeficitStep) -> float:
    """Expected fund left to the contributor after repaying the deficit."""
    return step.deficit * _unit_gain(params, alpha)


def expected_fund_after_forced_payback(params: FundParams, alpha: float, step: DeficitStep) -> float:
    """``E[(C_j - C_0)(alpha e^{mu + sigma Z} - 1)]``, repayment forced even at a loss."""
    _log_alpha(alpha)
    return step.deficit * (alpha * math.exp(params.growth_rate) - 1.0)


def expected_net_gain_vs_extra_investment(params: FundParams, alpha: float, step: DeficitStep) -> float:
    """Expected gain minus the extra outlay ``(alpha - 1)(C_j - C_0)``."""
    return expected_pc_gain(params, alpha, step) - (alpha - 1.0) * step.deficit


def alpha_for_payback_prob(params: FundParams, p: float) -> float:
    """Multiplier whose one-year full payback probability equals ``p``."""
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    return math.exp(params.sigma * std_normal_ppf(p) - params.mu)


def barrier_payback_prob(params: FundParams, policy: BarrierPolicy) -> float:
    """``P[D_1 >= C_1 - C_0] = Phi((mu - ln(1 + b + 1/alpha)) / sigma)``."""
    arg = 1.0 + policy.b + 1.0 / policy.alpha
    if not arg > 0:
        raise DomainError("1 + b + 1/alpha must be positive")
    return Phi((params.mu - math.log(arg)) / params.sigma)


def _log_barrier(policy: BarrierPolicy) -> float:
    if not policy.b > -1:
        raise DomainError(f"b must exceed -1 here, got {policy.b!r}")
    return math.log1p(policy.b)


def barrier_expected_debt(params: FundParams, policy: BarrierPolicy, step: DeficitStep) -> float:
    """Expected payment ``E[alpha (C_1 - C_0)(e^{mu + sigma Z} - (1 + b))^+]`` to the state."""
    mu, s = params.mu, params.sigma
    lb = _log_barrier(policy)
    unit = math.exp(mu + s * s / 2) * Phi((mu + s * s - lb) / s) - Phi((mu - lb) / s) * (1.0 + policy.b)
    return policy.alpha * step.deficit * max(unit, 0.0)


def barrier_expected_retained(params: FundParams, policy: BarrierPolicy, step: DeficitStep) -> float:
    """Expected fund kept by the contributor, the complement of the expected debt."""
    total = policy.alpha * step.deficit * math.exp(params.growth_rate)
    return total - barrier_expected_debt(params, policy, step)
