import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import DIVERSIFIED, STANDARD
from mixpension.fund_model import FundParams
from mixpension.lump_sum import (
    BarrierPolicy,
    DeficitStep,
    alpha_for_payback_prob,
    barrier_expected_debt,
    barrier_expected_retained,
    barrier_payback_prob,
    expected_fund_after_forced_payback,
    expected_net_gain_vs_extra_investment,
    expected_pc_gain,
    expected_state_loss,
    full_payback_prob,
)
from mixpension.numerics import DomainError
from oracles import one_period_draws

TENTH = DeficitStep(1.0, 1.1)
TABLE1_ALPHAS = [1, 1.05, 1.1, 1.15, 1.25, 2, 3]
TABLE3_ALPHAS = [0.8, 0.9, 1, 1.25, 2, 10]
TABLE3_BARRIERS = [0.02, 0, -0.5, -0.75, -0.9, -0.95, -1]

alphas = st.floats(0.3, 20.0)
funds = st.builds(FundParams, st.floats(-0.1, 0.15), st.floats(0.03, 0.6))


def test_deficit_step_validation():
    with pytest.raises(DomainError):
        DeficitStep(1.0, 1.0)
    assert DeficitStep.from_deficit(0.1).deficit == pytest.approx(0.1)


def test_payback_examples():
    assert full_payback_prob(STANDARD, 1.0) == pytest.approx(0.5793, abs=5e-5)
    assert full_payback_prob(STANDARD, 1.25) == pytest.approx(0.906, abs=5e-4)
    assert full_payback_prob(DIVERSIFIED, 1.0) == pytest.approx(0.655, abs=5e-4)
    with pytest.raises(DomainError):
        full_payback_prob(STANDARD, 0.0)


def test_loss_and_gain_examples():
    assert expected_state_loss(STANDARD, 1.0, TENTH) == pytest.approx(0.005, abs=5e-4)
    assert expected_pc_gain(STANDARD, 1.0, TENTH) == pytest.approx(0.0117, abs=5e-5)
    assert expected_pc_gain(STANDARD, 3.0, TENTH) == pytest.approx(0.219, abs=5e-4)
    assert expected_net_gain_vs_extra_investment(STANDARD, 1.25, TENTH) == pytest.approx(0.0085, abs=5e-5)
    assert expected_fund_after_forced_payback(STANDARD, 1.0, TENTH) == pytest.approx(0.1 * (math.exp(0.06) - 1), abs=1e-15)


def test_alpha_for_payback_prob():
    got = [alpha_for_payback_prob(STANDARD, p) for p in (0.9, 0.95, 0.99)]
    assert got == pytest.approx([1.24, 1.34, 1.53], abs=0.005)
    assert alpha_for_payback_prob(DIVERSIFIED, 0.9) == pytest.approx(1.0925, abs=5e-4)
    assert alpha_for_payback_prob(STANDARD, 0.5) == pytest.approx(math.exp(-0.04), abs=1e-15)
    with pytest.raises(DomainError):
        alpha_for_payback_prob(STANDARD, 1.0)


@given(funds, st.floats(0.01, 0.99))
def test_alpha_round_trip(fp, p):
    assert full_payback_prob(fp, alpha_for_payback_prob(fp, p)) == pytest.approx(p, abs=1e-9)


def test_barrier_examples():
    assert barrier_payback_prob(STANDARD, BarrierPolicy(2, -0.5)) == pytest.approx(0.5793, abs=5e-5)
    assert barrier_payback_prob(STANDARD, BarrierPolicy(1, -1)) == pytest.approx(0.579, abs=5e-4)
    assert barrier_payback_prob(STANDARD, BarrierPolicy(1, -0.75)) == pytest.approx(0.18, abs=5e-3)
    pol = BarrierPolicy(10, 0.03)
    assert barrier_expected_debt(STANDARD, pol, TENTH) == pytest.approx(0.1, abs=5e-3)
    assert barrier_expected_retained(STANDARD, pol, TENTH) == pytest.approx(0.962, abs=5e-3)
    pol = BarrierPolicy(20, 0.009)
    assert barrier_expected_debt(STANDARD, pol, TENTH) == pytest.approx(0.224, abs=5e-3)
    assert barrier_expected_retained(STANDARD, pol, TENTH) == pytest.approx(1.9, abs=5e-3)


def test_barrier_far_away():
    pol = BarrierPolicy(3, 1e6)
    assert barrier_expected_debt(STANDARD, pol, TENTH) == pytest.approx(0.0, abs=1e-15)
    assert barrier_expected_retained(STANDARD, pol, TENTH) == pytest.approx(0.3 * math.exp(0.06), rel=1e-14)


def test_barrier_domain():
    with pytest.raises(DomainError):
        BarrierPolicy(1, -1.1)
    with pytest.raises(DomainError):
        barrier_expected_debt(STANDARD, BarrierPolicy(1, -1), TENTH)


@given(funds, alphas)
def test_gain_minus_loss_is_forced_payback(fp, a):
    g = expected_pc_gain(fp, a, TENTH)
    loss = expected_state_loss(fp, a, TENTH)
    assert g - loss == pytest.approx(expected_fund_after_forced_payback(fp, a, TENTH), abs=1e-12)


@given(funds, alphas, st.floats(-0.99, 2.0))
def test_debt_plus_retained(fp, a, b):
    pol = BarrierPolicy(a, b)
    total = a * TENTH.deficit * math.exp(fp.growth_rate)
    s = barrier_expected_debt(fp, pol, TENTH) + barrier_expected_retained(fp, pol, TENTH)
    assert s == pytest.approx(total, abs=1e-12)
    assert barrier_expected_debt(fp, pol, TENTH) >= 0


def test_monotone_in_alpha():
    grid = np.linspace(0.5, 4.0, 60)
    p = [full_payback_prob(STANDARD, a) for a in grid]
    loss = [expected_state_loss(STANDARD, a, TENTH) for a in grid[:30]]
    assert np.all(np.diff(p) > 0)
    assert np.all(np.diff(loss) < 0)


@given(funds, st.floats(0.3, 10.0), st.floats(-1.0, 1.0), st.floats(0.0, 0.5))
def test_barrier_prob_monotone(fp, a, b, h):
    base = barrier_payback_prob(fp, BarrierPolicy(a, b))
    assert barrier_payback_prob(fp, BarrierPolicy(a, b + h)) <= base + 1e-15
    assert barrier_payback_prob(fp, BarrierPolicy(a * (1 + h), b)) >= base - 1e-15


@given(funds, alphas, st.floats(0.01, 500.0))
def test_scale_equivariance(fp, a, d):
    big = DeficitStep.from_deficit(d)
    unit = DeficitStep.from_deficit(1.0)
    for fn in (expected_state_loss, expected_pc_gain, expected_fund_after_forced_payback):
        assert fn(fp, a, big) == pytest.approx(d * fn(fp, a, unit), rel=1e-12, abs=1e-300)
    pol = BarrierPolicy(a, 0.05)
    assert barrier_expected_debt(fp, pol, big) == pytest.approx(d * barrier_expected_debt(fp, pol, unit), rel=1e-12, abs=1e-300)


@pytest.fixture(scope="module")
def growth():
    z = one_period_draws(1_000_000, 99)
    return np.exp(STANDARD.mu + STANDARD.sigma * z)


def _within(sample, exact, k=3.0):
    # 1/n covers events too rare to show up at all in the sample
    se = sample.std() / math.sqrt(sample.size)
    assert abs(sample.mean() - exact) <= k * se + 1.0 / sample.size


@pytest.mark.parametrize("a", TABLE1_ALPHAS)
def test_variant_a_against_simulation(growth, a):
    d = TENTH.deficit
    _within(d * np.maximum(1 - a * growth, 0.0), expected_state_loss(STANDARD, a, TENTH))
    _within(d * np.maximum(a * growth - 1, 0.0), expected_pc_gain(STANDARD, a, TENTH))
    _within((a * growth >= 1).astype(float), full_payback_prob(STANDARD, a))


@pytest.mark.parametrize("a", TABLE3_ALPHAS)
@pytest.mark.parametrize("b", TABLE3_BARRIERS)
def test_barrier_against_simulation(growth, a, b):
    d = TENTH.deficit
    pol = BarrierPolicy(a, b)
    debt = a * d * np.maximum(growth - (1 + b), 0.0)
    _within((debt >= d).astype(float), barrier_payback_prob(STANDARD, pol))
    if b > -1:
        _within(debt, barrier_expected_debt(STANDARD, pol, TENTH))
        _within(a * d * growth - debt, barrier_expected_retained(STANDARD, pol, TENTH))
