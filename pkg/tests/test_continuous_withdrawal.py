import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import STANDARD
from mixpension.continuous_withdrawal import (
    CredibilityConstraint,
    credibility_prob,
    entire_loss,
    expected_debt,
    expected_retained,
    expected_retained_slope,
    mean_variance_derivative,
    mean_variance_objective,
    minimal_alpha,
    normalized_loss,
    optimal_barrier,
    profitability_check,
    retained_second_moment,
    solve_p_tilde,
    withdrawal_outcome,
)
from mixpension.fund_model import PathSample, running_max_tail_prob
from mixpension.numerics import DomainError
from oracles import debt_by_joint_density, epsilon_skimming, grid_paths, retained_by_joint_density

B_STAR = 0.06574024


def test_withdrawal_outcome():
    out = withdrawal_outcome(PathSample(0.05, 0.2, 1.0), 0.1)
    excess = 0.2 - math.log(1.1)
    assert out.debt_account == pytest.approx(1.1 * excess)
    assert out.retained == pytest.approx(math.exp(0.05 - excess))
    quiet = withdrawal_outcome(PathSample(-0.1, 0.05, 1.0), 0.1)
    assert quiet.debt_account == 0.0 and quiet.retained == pytest.approx(math.exp(-0.1))


def test_p_tilde_and_optimizer_examples():
    assert solve_p_tilde(STANDARD, 0.5) == pytest.approx(0.15750112, abs=1e-7)
    assert solve_p_tilde(STANDARD, 0.7) == pytest.approx(0.093078333, abs=1e-7)
    sol = optimal_barrier(CredibilityConstraint(0.5, 10), STANDARD)
    assert sol.feasible
    assert sol.b_star == pytest.approx(0.06574, abs=5e-5)
    assert sol.min_alpha == pytest.approx(2.3221625, abs=1e-6)
    assert sol.b_limit == pytest.approx(math.expm1(sol.p_tilde))
    assert credibility_prob(STANDARD, sol.b_star, 10) == pytest.approx(0.5, abs=1e-9)


def test_infeasible_cap():
    sol = optimal_barrier(CredibilityConstraint(0.5, 2.0), STANDARD)
    assert not sol.feasible and sol.b_star is None


def test_constraint_validation():
    for args in [(0.0, 10), (1.0, 10), (0.5, 0.0), (0.5, 10, 0.0)]:
        with pytest.raises(DomainError):
            CredibilityConstraint(*args)


def test_credibility_examples():
    assert credibility_prob(STANDARD, 0.0, 3) == pytest.approx(0.13156264, abs=1e-6)
    assert credibility_prob(STANDARD, 0.0, 3, t=10) == pytest.approx(0.7817909, abs=1e-6)
    with pytest.raises(DomainError):
        credibility_prob(STANDARD, -1.0, 3)


@given(st.floats(-0.9, 1.0), st.floats(0.1, 20), st.floats(0.0, 0.5))
def test_credibility_monotone(b, a, h):
    base = credibility_prob(STANDARD, b, a)
    assert credibility_prob(STANDARD, b, a * (1 + h)) >= base - 1e-15


def test_loss_examples():
    assert normalized_loss(B_STAR, 10, STANDARD) == pytest.approx(-0.2603, abs=5e-4)
    assert expected_debt(B_STAR, STANDARD) == pytest.approx(0.1315, abs=5e-4)
    assert normalized_loss(0.1, 0.0, STANDARD) == -1.0
    assert expected_retained(0.2030, STANDARD) == pytest.approx(1.0, abs=2e-4)


def test_zero_horizon():
    assert expected_retained(-0.3, STANDARD, 0.0) == pytest.approx(0.7)
    assert expected_retained(0.3, STANDARD, 0.0) == 1.0
    assert expected_debt(0.2, STANDARD, 0.0) == 0.0


@pytest.mark.parametrize("b,t", [(B_STAR, 1.0), (0.0, 1.0), (-0.3, 3.0), (0.5, 10.0), (0.87, 10.0)])
def test_retained_and_debt_against_joint_density(b, t):
    mu, s = STANDARD.mu, STANDARD.sigma
    assert expected_retained(b, STANDARD, t) == pytest.approx(retained_by_joint_density(b, t, mu, s), abs=1e-8)
    assert expected_debt(b, STANDARD, t) == pytest.approx(debt_by_joint_density(b, t, mu, s), abs=1e-8)


def test_retained_limits():
    # barrier far above: nothing is skimmed
    assert expected_retained(1e3, STANDARD) == pytest.approx(math.exp(0.06), abs=1e-9)
    assert expected_debt(1e3, STANDARD) == pytest.approx(0.0, abs=1e-12)


def test_retained_monotone_concave():
    bs = np.linspace(-0.6, 1.0, 33)
    v = np.array([expected_retained(b, STANDARD) for b in bs])
    assert np.all(np.diff(v) > 0)
    # linear in b while the barrier sits below the start, strictly concave above
    d2 = np.diff(v, 2)
    assert np.all(d2 <= 1e-12)
    assert np.all(d2[bs[1:-1] > 0] < 0)


def test_retained_slope_continuous_at_zero():
    left = expected_retained_slope(-1e-10, STANDARD)
    right = expected_retained_slope(1e-10, STANDARD)
    assert left == pytest.approx(right, abs=1e-8)


@pytest.mark.parametrize("b", [-0.5, 0.02, B_STAR, 0.4])
def test_retained_slope_matches_finite_difference(b):
    h = 1e-5
    fd = (expected_retained(b + h, STANDARD) - expected_retained(b - h, STANDARD)) / (2 * h)
    assert expected_retained_slope(b, STANDARD) == pytest.approx(fd, abs=1e-6)


def test_entire_loss_decreasing():
    bs = np.linspace(-0.5, 1.0, 31)
    le = [entire_loss(b, 10, STANDARD) for b in bs]
    assert np.all(np.diff(le) < 0)


def test_minimal_alpha_minimum():
    pt = solve_p_tilde(STANDARD, 0.5)
    b_min = math.exp(pt - 1) - 1
    assert minimal_alpha(b_min, pt) == pytest.approx(math.exp(1 - pt), abs=1e-8)
    grid = np.linspace(-0.9, math.expm1(pt) - 1e-4, 4001)
    vals = np.array([minimal_alpha(b, pt) for b in grid])
    assert vals.min() >= math.exp(1 - pt) - 1e-12
    assert grid[vals.argmin()] == pytest.approx(b_min, abs=1e-3)
    assert minimal_alpha(math.expm1(pt), pt) == math.inf


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(2.6, 50.0))
def test_optimal_barrier_is_credible_boundary(p, cap):
    sol = optimal_barrier(CredibilityConstraint(p, cap), STANDARD)
    if sol.feasible:
        assert minimal_alpha(sol.b_star, sol.p_tilde) == pytest.approx(cap, rel=1e-9)
        assert credibility_prob(STANDARD, sol.b_star, cap) == pytest.approx(p, abs=1e-8)
        assert sol.b_star >= math.exp(sol.p_tilde - 1) - 1 - 1e-12


def test_profitability():
    assert profitability_check(B_STAR, 10, STANDARD)
    assert not profitability_check(-0.5, 10, STANDARD)


def test_mean_variance_shape():
    bs = np.linspace(-0.9, 0.6, 61)
    vals = np.array([mean_variance_objective(b, 0.85, STANDARD) for b in bs])
    k = int(vals.argmax())
    assert 0 < k < len(bs) - 1
    assert bs[k] == pytest.approx(-0.35, abs=0.05)
    assert np.all(np.diff(vals[: k + 1]) > 0) and np.all(np.diff(vals[k:]) < 0)


@pytest.mark.parametrize("b", [-0.6, -0.35, 0.1])
def test_mean_variance_derivative(b):
    h = 1e-5
    fd = (mean_variance_objective(b + h, 0.85, STANDARD) - mean_variance_objective(b - h, 0.85, STANDARD)) / (2 * h)
    assert mean_variance_derivative(b, 0.85, STANDARD) == pytest.approx(fd, abs=1e-6)


def test_second_moment_far_barrier():
    fp = STANDARD
    assert retained_second_moment(1e3, fp) == pytest.approx(math.exp(2 * fp.mu + 2 * fp.sigma**2), rel=1e-9)
    with pytest.raises(DomainError):
        mean_variance_objective(0.0, -1.0, fp)


# --- simulation oracles ---------------------------------------------------


@pytest.mark.parametrize("b", [0.0, B_STAR])
def test_epsilon_skimming_matches_debt_formula(b):
    eps = 1e-4
    paths = grid_paths(STANDARD.mu, STANDARD.sigma, 1.0, 10_000, 100, seed=11)
    debt, retained = epsilon_skimming(paths, b, eps)
    for row, d in zip(paths, debt):
        closed = withdrawal_outcome(PathSample(row[-1], max(row.max(), 0.0), 1.0), b).debt_account
        assert abs(d - closed) <= 2 * eps * (1 + b)
    assert retained.max() <= (1 + b) * math.exp(eps)


def _shifted(b, shift):
    return (1 + b) * math.exp(shift) - 1


@pytest.mark.slow
@pytest.mark.parametrize("b", [-0.2, 0.0, B_STAR, 0.5])
def test_retained_and_debt_against_paths(mc_paths, b):
    lb = math.log1p(b)
    excess = np.maximum(mc_paths.running - lb, 0.0)
    b2 = _shifted(b, mc_paths.shift)

    r = np.exp(mc_paths.terminal - excess)
    exact = expected_retained(b, STANDARD)
    allowance = abs(expected_retained(b2, STANDARD) - exact)
    assert abs(r.mean() - exact) <= 3 * r.std() / math.sqrt(r.size) + allowance

    d = (1 + b) * excess
    exact = expected_debt(b, STANDARD)
    allowance = abs((1 + b) / (1 + b2) * expected_debt(b2, STANDARD) - exact)
    assert abs(d.mean() - exact) <= 3 * d.std() / math.sqrt(d.size) + allowance


@pytest.mark.slow
@pytest.mark.parametrize("b,alpha", [(-0.2, 3), (0.0, 3), (B_STAR, 10), (0.5, 5)])
def test_credibility_against_paths(mc_paths, b, alpha):
    hit = ((1 + b) * np.maximum(mc_paths.running - math.log1p(b), 0.0) >= 1 / alpha).astype(float)
    exact = credibility_prob(STANDARD, b, alpha)
    # the event is M >= level, and the grid maximum behaves like M - shift
    level = math.log1p(b) + 1 / (alpha * (1 + b))
    allowance = abs(running_max_tail_prob(level + mc_paths.shift, 1.0, STANDARD.mu, STANDARD) - exact)
    assert abs(hit.mean() - exact) <= 3 * hit.std() / math.sqrt(hit.size) + allowance + 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("b", [0.0, B_STAR])
def test_pathwise_cap(mc_paths, b):
    checked = 0
    for x, m in zip(mc_paths.terminal, mc_paths.running):
        out = withdrawal_outcome(PathSample(float(x), float(m), 1.0), b)
        if out.debt_account > 0:
            checked += 1
            assert out.retained <= 1 + b + 1e-12
    assert checked > 0.3 * mc_paths.n
