"""Continuous profit skimming above a return barrier.

Gains pushing the growth factor above ``1 + b`` are moved to a debt account
as they accrue, so the contributor's position is the fund reflected
downward at ``1 + b``.  With ``M_t`` the running maximum of the log return:

    retained  R_t(b) = exp(X_t - (M_t - ln(1 + b))^+)
    debt      D_t(b) = (1 + b) (M_t - ln(1 + b))^+

Expectations of both are one-dimensional integrals against the running
maximum density; ``E[R_t]`` is evaluated after tilting the measure by
``exp(sigma W_t - sigma^2 t / 2)``, which shifts the drift to
``mu + sigma^2``.  All quantities are in growth-factor units per unit
invested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .fund_model import (
    FundParams,
    PathSample,
    running_max_density,
    running_max_tail_bound,
    running_max_tail_prob,
)
from .numerics import (
    DomainError,
    QuadratureSpec,
    find_root,
    integrate_finite,
    integrate_semi_infinite,
)

QUAD = QuadratureSpec()


@dataclass(frozen=True)
class CredibilityConstraint:
    """Required repayment probability ``p``, liquidity cap and horizon."""

    p: float
    alpha_cap: float
    horizon: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.p < 1:
            raise DomainError(f"p must lie in (0, 1), got {self.p!r}")
        if not self.alpha_cap > 0:
            raise DomainError(f"alpha_cap must be positive, got {self.alpha_cap!r}")
        if not self.horizon > 0:
            raise DomainError(f"horizon must be positive, got {self.horizon!r}")


@dataclass(frozen=True)
class BarrierSolution:
    """Optimal barrier for a credibility constraint.

    ``b_star`` is None when the cap is below ``min_alpha`` and no barrier is
    credible.  ``b_limit`` is the barrier that would need an unbounded
    investment.
    """

    p_tilde: float
    b_star: Optional[float]
    feasible: bool
    min_alpha: float
    b_limit: float


@dataclass(frozen=True)
class WithdrawalOutcome:
    retained: float
    debt_account: float


def _log_barrier(b: float) -> float:
    b = float(b)
    if not b > -1:
        raise DomainError(f"barrier b must exceed -1, got {b!r}")
    return math.log1p(b)


def _check_horizon(t: float) -> float:
    t = float(t)
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"horizon must be nonnegative, got {t!r}")
    return t


def withdrawal_outcome(path: PathSample, b: float) -> WithdrawalOutcome:
    """Retained fund and debt account of one path under barrier ``b``."""
    lb = _log_barrier(b)
    excess = max(path.running_max - lb, 0.0)
    return WithdrawalOutcome(math.exp(path.terminal_log - excess), (1.0 + b) * excess)


# ---------------------------------------------------------------------------
# Credibility
# ---------------------------------------------------------------------------


def credibility_prob(params: FundParams, b: float, alpha: float, t: float = 1.0) -> float:
    """``P[D_t(b) >= 1/alpha]``: the debt account covers the deficit."""
    lb = _log_barrier(b)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")
    return running_max_tail_prob(lb + 1.0 / (alpha * (1.0 + b)), t, params.mu, params)


def solve_p_tilde(params: FundParams, p: float, t: float = 1.0) -> float:
    """Level whose running-maximum tail probability equals ``p``."""
    if not 0 < p < 1:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    hi = 1.0
    while running_max_tail_prob(hi, t, params.mu, params) >= p:
        hi *= 2.0
    return find_root(lambda x: running_max_tail_prob(x, t, params.mu, params) - p, (0.0, hi), tol=1e-13)


def minimal_alpha(b: float, p_tilde: float) -> float:
    """Smallest multiplier making barrier ``b`` credible at quantile level ``p_tilde``."""
    lb = _log_barrier(b)
    gap = p_tilde - lb
    if gap <= 0:
        return math.inf
    return 1.0 / ((1.0 + b) * gap)


def optimal_barrier(constraint: CredibilityConstraint, params: FundParams) -> BarrierSolution:
    """Largest credible barrier under the liquidity cap.

    Writing ``u = ln(1 + b)`` the credibility boundary reads
    ``exp(u) (p_tilde - u) = 1/alpha``; the left side decreases on
    ``[p_tilde - 1, p_tilde]`` from ``exp(p_tilde - 1)`` to 0, which brackets
    the root whenever the cap reaches ``exp(1 - p_tilde)``.
    """
    pt = solve_p_tilde(params, constraint.p, constraint.horizon)
    min_alpha = math.exp(1.0 - pt)
    b_limit = math.expm1(pt)
    if constraint.alpha_cap < min_alpha:
        return BarrierSolution(pt, None, False, min_alpha, b_limit)
    target = 1.0 / constraint.alpha_cap
    u = find_root(lambda u: math.exp(u) * (pt - u) - target, (pt - 1.0, pt), tol=1e-14)
    return BarrierSolution(pt, math.expm1(u), True, min_alpha, b_limit)


# ---------------------------------------------------------------------------
# Expected retained value and debt account
# ---------------------------------------------------------------------------


def _tilted_integrals(lb: float, t: float, drift: float, params: FundParams, power: int) -> tuple[float, float]:
    """``int_0^lb g`` and ``int_lb^inf exp(-power y) g`` under ``drift``."""

    def dens(y: float) -> float:
        return running_max_density(y, t, drift, params)

    low = max(lb, 0.0)
    body = integrate_finite(dens, 0.0, lb, QUAD) if lb > 0 else 0.0
    spec = QUAD.with_tail_bound(lambda x: running_max_tail_bound(x, t, drift, params))
    tail = integrate_semi_infinite(lambda y: math.exp(-power * y) * dens(y), low, spec)
    return body, tail


def expected_retained(b: float, params: FundParams, t: float = 1.0) -> float:
    """``V_t(b) = E[R_t(b)]``, the expected growth factor kept by the contributor."""
    lb = _log_barrier(b)
    t = _check_horizon(t)
    if t == 0:
        return min(1.0, 1.0 + b)
    body, tail = _tilted_integrals(lb, t, params.mu + params.sigma**2, params, 1)
    return math.exp(params.growth_rate * t) * (body + (1.0 + b) * tail)


def expected_retained_slope(b: float, params: FundParams, t: float = 1.0) -> float:
    """Derivative of :func:`expected_retained` in ``b``."""
    lb = _log_barrier(b)
    t = _check_horizon(t)
    if t == 0:
        return 0.0 if b >= 0 else 1.0
    _, tail = _tilted_integrals(lb, t, params.mu + params.sigma**2, params, 1)
    return math.exp(params.growth_rate * t) * tail


def expected_debt(b: float, params: FundParams, t: float = 1.0) -> float:
    """``U_t(b) = E[D_t(b)] = (1 + b) E[(M_t - ln(1 + b))^+]``."""
    lb = _log_barrier(b)
    t = _check_horizon(t)
    if t == 0:
        return (1.0 + b) * max(-lb, 0.0)
    v = params.sigma**2 * t
    shift = max(params.mu, 0.0) * t
    pad = max(-lb, 0.0) + math.sqrt(math.pi * v / 2.0)

    def bound(x: float) -> float:
        if x <= shift:
            return math.inf
        return (x + pad) * math.exp(-((x - shift) ** 2) / (2.0 * v))

    spec = QUAD.with_tail_bound(bound)
    integral = integrate_semi_infinite(
        lambda y: (y - lb) * running_max_density(y, t, params.mu, params), max(lb, 0.0), spec
    )
    return (1.0 + b) * integral


def normalized_loss(b: float, alpha: float, params: FundParams, t: float = 1.0) -> float:
    """``L = alpha - alpha V_t(b) - 1``: loss per unit deficit versus paying directly."""
    if alpha < 0:
        raise DomainError(f"alpha must be nonnegative, got {alpha!r}")
    if alpha == 0:
        return -1.0
    return alpha - alpha * expected_retained(b, params, t) - 1.0


def entire_loss(b: float, alpha: float, params: FundParams, t: float = 1.0) -> float:
    """``L_e = alpha - alpha V_t(b) - alpha U_t(b)``, crediting any surplus on the debt account."""
    if alpha < 0:
        raise DomainError(f"alpha must be nonnegative, got {alpha!r}")
    return alpha * (1.0 - expected_retained(b, params, t) - expected_debt(b, params, t))


def profitability_check(b: float, alpha: float, params: FundParams, t: float = 1.0) -> bool:
    """True when the expected funded outlay ``alpha (1 - V)`` is below the direct payment 1."""
    if alpha < 0:
        raise DomainError(f"alpha must be nonnegative, got {alpha!r}")
    return alpha * (1.0 - expected_retained(b, params, t)) < 1.0


# ---------------------------------------------------------------------------
# Mean-variance variant
# ---------------------------------------------------------------------------


def retained_second_moment(b: float, params: FundParams, t: float = 1.0) -> float:
    """``E[R_t(b)^2]``, tilted by ``exp(2 sigma W_t - 2 sigma^2 t)`` (drift ``mu + 2 sigma^2``)."""
    lb = _log_barrier(b)
    t = _check_horizon(t)
    if t == 0:
        return min(1.0, 1.0 + b) ** 2
    mu, s = params.mu, params.sigma
    body, tail = _tilted_integrals(lb, t, mu + 2 * s * s, params, 2)
    return math.exp((2 * mu + 2 * s * s) * t) * (body + (1.0 + b) ** 2 * tail)


def mean_variance_objective(b: float, lam: float, params: FundParams, t: float = 1.0) -> float:
    """``E[R_t(b)] - lam E[R_t(b)^2]``."""
    if lam < 0:
        raise DomainError(f"lambda must be nonnegative, got {lam!r}")
    return expected_retained(b, params, t) - lam * retained_second_moment(b, params, t)


def mean_variance_derivative(b: float, lam: float, params: FundParams, t: float = 1.0) -> float:
    """Derivative of :func:`mean_variance_objective` in ``b``."""
    if lam < 0:
        raise DomainError(f"lambda must be nonnegative, got {lam!r}")
    lb = _log_barrier(b)
    t = _check_horizon(t)
    if t == 0:
        raise DomainError("derivative needs a positive horizon")
    mu, s = params.mu, params.sigma
    _, tail1 = _tilted_integrals(lb, t, mu + s * s, params, 1)
    _, tail2 = _tilted_integrals(lb, t, mu + 2 * s * s, params, 2)
    first = math.exp(params.growth_rate * t) * tail1
    second = 2.0 * lam * (1.0 + b) * math.exp((2 * mu + 2 * s * s) * t) * tail2
    return first - second
