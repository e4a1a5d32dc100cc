"""Multi-year zero-interest credit repaid in one sum at the horizon.

The state covers ``C_j - C_0`` for ``j = 1..T``.  At time ``j - 1`` the
contributor invests ``alpha (C_j - C_0)``, which grows for ``T - j + 1``
years.  The whole credit ``C_total`` is due at ``T`` out of the fund ``F_T``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fund_model import FundParams
from .lump_sum import DeficitStep, alpha_for_payback_prob, expected_state_loss, full_payback_prob
from .numerics import BracketError, DomainError, RngStream, find_root

DEFAULT_SAMPLES = 10_000
BLOCK = 10_000  # realizations per random stream


@dataclass(frozen=True)
class CreditSchedule:
    """Baseline ``c0`` and the required contributions ``C_1..C_T``."""

    c0: float
    required: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "required", tuple(float(c) for c in self.required))
        if not self.required:
            raise DomainError("credit schedule needs at least one year")
        if not all(c > self.c0 for c in self.required):
            raise DomainError("every required contribution must exceed c0")

    @classmethod
    def constant(cls, deficit: float, horizon: int, c0: float = 1.0) -> "CreditSchedule":
        if int(horizon) < 1:
            raise DomainError("horizon must be at least one year")
        return cls(c0, (c0 + deficit,) * int(horizon))

    @property
    def horizon(self) -> int:
        return len(self.required)

    @property
    def deficits(self) -> np.ndarray:
        return np.asarray(self.required) - self.c0

    @property
    def total(self) -> float:
        """``C_total``, the credit due at the horizon."""
        return float(self.deficits.sum())


@dataclass(frozen=True)
class VariantBResult:
    p_shortfall: float
    e_shortfall: float
    e_final_net_fund: float
    mean_fund: float
    alpha: float
    samples: int
    seed: int

    @property
    def shortfall_std_error(self) -> float:
        return math.sqrt(self.p_shortfall * (1 - self.p_shortfall) / self.samples)


def _check_alpha(alpha: float) -> None:
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha!r}")


def expected_fund_value(schedule: CreditSchedule, alpha: float, j: int, params: FundParams) -> float:
    """``E[F_j] = alpha * sum_k (C_{j-k+1} - C_0) e^{(mu + sigma^2/2) k}``."""
    _check_alpha(alpha)
    if not 1 <= j <= schedule.horizon:
        raise DomainError(f"year j must lie in 1..{schedule.horizon}, got {j!r}")
    d = schedule.deficits[:j]
    years = np.arange(j, 0, -1)  # contribution i grows j - i + 1 years
    return float(alpha * np.sum(d * np.exp(params.growth_rate * years)))


def alpha_star_expected_full_payback(schedule: CreditSchedule, params: FundParams) -> float:
    """Multiplier at which ``E[F_T]`` equals ``C_total``."""
    d = schedule.deficits
    T = schedule.horizon
    years = T + 1 - np.arange(1, T + 1)
    return float(d.sum() / np.sum(d * np.exp(params.growth_rate * years)))


def simulate_unit_fund(
    schedule: CreditSchedule,
    params: FundParams,
    samples: int,
    seed: int,
) -> np.ndarray:
    """Terminal fund ``F_T`` at ``alpha = 1`` for each realization.

    ``F_T`` is linear in ``alpha``, so scaling this array gives common random
    numbers for every multiplier.  Block ``k`` of realizations draws from
    stream ``(seed, k)``.
    """
    if int(samples) < 1:
        raise DomainError("samples must be at least 1")
    samples = int(samples)
    d = schedule.deficits
    T = schedule.horizon
    out = np.empty(samples)
    for k, start in enumerate(range(0, samples, BLOCK)):
        m = min(BLOCK, samples - start)
        z = RngStream(seed, k).generator.standard_normal((m, T))
        log_inc = params.mu + params.sigma * z  # year i increment, column i - 1
        # log growth from time j - 1 to T is the sum of columns j - 1 .. T - 1
        grow = np.cumsum(log_inc[:, ::-1], axis=1)[:, ::-1]
        out[start : start + m] = np.exp(grow) @ d
    return out


def summarize_fund(fund: np.ndarray, credit: float, alpha: float, seed: int) -> VariantBResult:
    gap = fund - credit
    return VariantBResult(
        p_shortfall=float(np.mean(fund <= credit)),
        e_shortfall=float(np.mean(np.maximum(-gap, 0.0))),
        e_final_net_fund=float(np.mean(np.maximum(gap, 0.0))),
        mean_fund=float(np.mean(fund)),
        alpha=float(alpha),
        samples=int(fund.size),
        seed=int(seed),
    )


def simulate_variant_b(
    schedule: CreditSchedule,
    alpha: float,
    params: FundParams,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> VariantBResult:
    """Monte Carlo shortfall statistics of ``F_T`` against ``C_total``."""
    _check_alpha(alpha)
    unit = simulate_unit_fund(schedule, params, samples, seed)
    return summarize_fund(alpha * unit, schedule.total, alpha, seed)


def break_even_alpha(
    schedule: CreditSchedule,
    params: FundParams,
    target_expected_loss: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    bracket: tuple[float, float] = (1e-3, 100.0),
) -> float:
    """Multiplier whose expected shortfall equals ``target_expected_loss``.

    With common random numbers the sample expected shortfall is a continuous
    nonincreasing function of ``alpha``, so the search is deterministic.
    """
    if not target_expected_loss > 0:
        raise DomainError("target expected loss must be positive")
    unit = simulate_unit_fund(schedule, params, samples, seed)
    credit = schedule.total

    def excess(alpha: float) -> float:
        return float(np.mean(np.maximum(credit - alpha * unit, 0.0))) - target_expected_loss

    try:
        return find_root(excess, bracket, tol=1e-12)
    except BracketError as exc:
        raise BracketError(f"target loss {target_expected_loss!r} not attainable on {bracket}") from exc


@dataclass(frozen=True)
class AnnualBenchmark:
    """Year-by-year payback-first scheme at a fixed security level, over T years."""

    alpha: float
    yearly_payback_prob: float
    total_expected_loss: float
    prob_any_loss: float


def annual_payback_benchmark(schedule: CreditSchedule, params: FundParams, p: float) -> AnnualBenchmark:
    """Repeat the one-year scheme every year with the ``alpha`` giving payback prob ``p``.

    Years are independent, so the chance of at least one loss is
    ``1 - P^T``.
    """
    alpha = alpha_for_payback_prob(params, p)
    loss = sum(expected_state_loss(params, alpha, DeficitStep(schedule.c0, c)) for c in schedule.required)
    prob = full_payback_prob(params, alpha)
    return AnnualBenchmark(alpha, prob, float(loss), 1.0 - prob**schedule.horizon)

