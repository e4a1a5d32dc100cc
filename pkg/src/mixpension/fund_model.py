"""Geometric Brownian motion fund and the law of its running maximum.

The fund price is ``F_t = F_0 exp(mu t + sigma W_t)``.  Most closed forms
downstream only need the law of the running maximum of the log return,
``M_t = max_{0<=s<=t} (mu s + sigma W_s)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .numerics import DomainError, RngStream

# E[max of a Gaussian random walk] undershoots the continuous maximum by
# about BGK_BETA * sigma * sqrt(dt) (Broadie, Glasserman and Kou).
BGK_BETA = -special.zeta(0.5) / math.sqrt(2.0 * math.pi)

DEFAULT_STEPS_PER_YEAR = 1000


@dataclass(frozen=True)
class FundParams:
    """Annual log drift ``mu`` and log volatility ``sigma`` of the fund."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu):
            raise DomainError(f"mu must be finite, got {self.mu!r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise DomainError(f"sigma must be positive, got {self.sigma!r}")

    @property
    def growth_rate(self) -> float:
        """``mu + sigma^2 / 2``, the exponent of the mean growth factor."""
        return self.mu + 0.5 * self.sigma**2


@dataclass(frozen=True)
class PathSample:
    """Terminal log return and running maximum of one simulated path."""

    terminal_log: float
    running_max: float
    horizon: float


def _check_time(t: float, strict: bool = True) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0 or (strict and t == 0):
        raise DomainError(f"time horizon must be {'positive' if strict else 'nonnegative'}, got {t!r}")
    return t


def growth_factor_moment(params: FundParams, t: float) -> float:
    """``E[exp(mu t + sigma W_t)] = exp((mu + sigma^2/2) t)``."""
    t = _check_time(t, strict=False)
    return math.exp(params.growth_rate * t)


def running_max_density(y, t: float, drift: float, params: FundParams):
    """Density of ``max_{s<=t} (drift s + sigma W_s)`` at ``y >= 0``.

    ``drift`` is separate from ``params.mu`` because the change-of-measure
    representations evaluate the density under shifted drifts.  The
    ``exp(2 drift y / sigma^2) * erfc(z)`` product is evaluated as
    ``exp(-(y - drift t)^2 / (2 sigma^2 t)) * erfcx(z)`` to avoid overflow.
    """
    t = _check_time(t)
    y_arr = np.asarray(y, dtype=float)
    if np.any(y_arr < 0) or not np.all(np.isfinite(y_arr)):
        raise DomainError("running maximum density is supported on y >= 0")
    s = params.sigma
    var = s * s * t
    gauss = np.exp(-((y_arr - drift * t) ** 2) / (2.0 * var))
    z = (y_arr + drift * t) / math.sqrt(2.0 * var)
    head = 2.0 / math.sqrt(2.0 * math.pi * var)
    # erfcx grows like exp(z^2) for z < 0; there the direct form is safe.
    with np.errstate(over="ignore", invalid="ignore"):
        second = np.where(
            z >= 0,
            gauss * special.erfcx(np.maximum(z, 0.0)),
            np.exp(2.0 * drift * y_arr / (s * s)) * special.erfc(np.minimum(z, 0.0)),
        )
    out = head * gauss - drift / (s * s) * second
    out = np.maximum(out, 0.0)
    return float(out) if out.ndim == 0 else out


def _normal_sf_times_exp(log_factor: float, x: float) -> float:
    """``exp(log_factor) * P[N(0,1) > x]`` without overflow."""
    if x > 0:
        z = x / math.sqrt(2.0)
        return 0.5 * math.exp(log_factor - z * z) * special.erfcx(z)
    return 0.5 * math.exp(log_factor) * special.erfc(x / math.sqrt(2.0))


def running_max_tail_prob(level: float, t: float, drift: float, params: FundParams) -> float:
    """``P[max_{s<=t} (drift s + sigma W_s) >= level]`` in closed form."""
    t = _check_time(t)
    level = float(level)
    if math.isnan(level):
        raise DomainError("level must not be NaN")
    if level <= 0:
        return 1.0
    if math.isinf(level):
        return 0.0
    sd = params.sigma * math.sqrt(t)
    first = _normal_sf_times_exp(0.0, (level - drift * t) / sd)
    second = _normal_sf_times_exp(2.0 * drift * level / params.sigma**2, (level + drift * t) / sd)
    return min(1.0, first + second)


def running_max_tail_bound(x: float, t: float, drift: float, params: FundParams) -> float:
    """Gaussian bound on ``P[M_t >= x]`` via ``M_t <= drift^+ t + sigma sup W``."""
    shift = max(drift, 0.0) * t
    if x <= shift:
        return 1.0
    return math.exp(-((x - shift) ** 2) / (2.0 * params.sigma**2 * t))


def max_discretization_shift(params: FundParams, t: float, steps: int) -> float:
    """First-order undershoot of the grid maximum relative to the true maximum."""
    return BGK_BETA * params.sigma * math.sqrt(t / steps)


def simulate_paths_with_max(
    params: FundParams,
    t: float,
    steps: int,
    n_paths: int,
    stream: RngStream,
    chunk: int = 10_000,
) -> tuple[np.ndarray, np.ndarray]:
    """Euler paths of ``mu s + sigma W_s``; returns (terminal_log, running_max).

    The running maximum is taken over the grid including ``s = 0``, so it is
    nonnegative and biased low by roughly :func:`max_discretization_shift`.
    """
    t = _check_time(t)
    if int(steps) < 1:
        raise DomainError("steps must be at least 1")
    if int(n_paths) < 1:
        raise DomainError("n_paths must be at least 1")
    steps, n_paths = int(steps), int(n_paths)
    dt = t / steps
    scale, drift = params.sigma * math.sqrt(dt), params.mu * dt
    gen = stream.generator
    terminal = np.empty(n_paths)
    running = np.empty(n_paths)
    for start in range(0, n_paths, chunk):
        m = min(chunk, n_paths - start)
        x = gen.standard_normal((m, steps))
        x *= scale
        x += drift
        np.cumsum(x, axis=1, out=x)
        terminal[start : start + m] = x[:, -1]
        running[start : start + m] = np.maximum(x.max(axis=1), 0.0)
    return terminal, running


def simulate_path_with_max(
    params: FundParams,
    t: float,
    steps: int,
    stream: RngStream,
) -> PathSample:
    """One Euler path; the grid maximum carries an O(sqrt(t/steps)) bias."""
    terminal, running = simulate_paths_with_max(params, t, steps, 1, stream)
    return PathSample(float(terminal[0]), float(running[0]), float(t))
