"""Lump-sum repayment versus continuous withdrawal versus paying directly.

Losses are per unit deficit relative to paying the contribution increase
straight into the pay-as-you-go system.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

from .continuous_withdrawal import CredibilityConstraint, expected_retained, optimal_barrier
from .fund_model import FundParams, growth_factor_moment
from .numerics import BracketError, DomainError, find_root, std_normal_cdf


class Strategy(str, enum.Enum):
    PAYG = "PAYG"
    CONTINUOUS = "C"
    LUMP_SUM = "LS"


@dataclass(frozen=True)
class StrategyDecision:
    label: Strategy
    l_d: float
    l_c: Optional[float]
    lambda_gap: Optional[float]
    b_star: Optional[float]
    t: float
    alpha: float
    note: str = ""


def _check_alpha(alpha: float) -> None:
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")


def lump_sum_loss(t: float, alpha: float, params: FundParams) -> float:
    """``L_d(t) = alpha - alpha E[exp(mu t + sigma W_t)] + 1``."""
    _check_alpha(alpha)
    return alpha - alpha * growth_factor_moment(params, t) + 1.0


def continuous_loss(t: float, b: float, alpha: float, params: FundParams) -> float:
    """``L_c(t, b) = alpha - alpha V_t(b) - 1``."""
    _check_alpha(alpha)
    return alpha - alpha * expected_retained(b, params, t) - 1.0


def lambda_gap(t: float, b: float, alpha: float, params: FundParams) -> float:
    """``Lambda(t, b) = L_c(t, b) - L_d(t)``; positive favours the lump sum."""
    _check_alpha(alpha)
    return alpha * (growth_factor_moment(params, t) - expected_retained(b, params, t)) - 2.0


def beta_curve(
    t: float,
    alpha: float,
    params: FundParams,
    upper: Optional[float] = None,
) -> Optional[float]:
    """Barrier ``beta(t)`` at which both strategies lose the same; None if no crossing.

    ``Lambda(t, .)`` decreases in ``b`` towards -2, and below ``-2/alpha`` it
    stays positive, so the search starts just above ``max(-2/alpha, -1)``.
    """
    _check_alpha(alpha)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    lo = max(-2.0 / alpha, -1.0) + 1e-6

    def gap(b: float) -> float:
        return lambda_gap(t, b, alpha, params)

    if gap(lo) <= 0:
        return None
    hi = 1.0 if upper is None else float(upper)
    while gap(hi) > 0:
        if upper is not None or hi > 1e6:
            return None
        hi = 2.0 * hi + 1.0
    try:
        return find_root(gap, (lo, hi), tol=1e-12)
    except BracketError:
        return None


def recommend_strategy(t: float, alpha: float, p: float, params: FundParams) -> StrategyDecision:
    """Pick PAYG, continuous withdrawal or lump sum at horizon ``t``.

    ``alpha`` doubles as the liquidity cap for the optimal barrier.  PAYG wins
    when neither funded route has a negative loss; otherwise the sign of
    ``Lambda(t, b*)`` decides, ties going to continuous withdrawal.
    """
    l_d = lump_sum_loss(t, alpha, params)
    sol = optimal_barrier(CredibilityConstraint(p, alpha, t), params)
    if not sol.feasible:
        note = f"no credible barrier: alpha {alpha:g} below minimum {sol.min_alpha:.6f}"
        return StrategyDecision(Strategy.PAYG, l_d, None, None, None, t, alpha, note)
    b_star = sol.b_star
    l_c = continuous_loss(t, b_star, alpha, params)
    gap = l_c - l_d
    if l_d >= 0 and l_c >= 0:
        label = Strategy.PAYG
    elif gap > 0:
        label = Strategy.LUMP_SUM
    else:
        label = Strategy.CONTINUOUS
    return StrategyDecision(label, l_d, l_c, gap, b_star, t, alpha)


def lump_sum_default_prob(t: float, alpha: float, params: FundParams) -> float:
    """``P[alpha exp(mu t + sigma W_t) < 1 + alpha]``: state not repaid after the refund of the stake."""
    _check_alpha(alpha)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t!r}")
    z = (math.log1p(1.0 / alpha) - params.mu * t) / (params.sigma * math.sqrt(t))
    return std_normal_cdf(z)
