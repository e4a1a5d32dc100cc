"""Special functions, quadrature, root finding and seeded random streams.

Everything here is a thin, validated layer over numpy/scipy so the model
modules can state their numerical contracts in one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize, special

__all__ = [
    "DomainError",
    "QuadratureError",
    "BracketError",
    "QuadratureSpec",
    "RngStream",
    "std_normal_cdf",
    "std_normal_ppf",
    "erfc",
    "erfcx",
    "integrate_semi_infinite",
    "integrate_finite",
    "find_root",
    "sample_standard_normal",
]


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested accuracy."""

    def __init__(self, message: str, estimate: float, error: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class BracketError(ArithmeticError):
    """The root-finding bracket does not enclose a sign change."""


def _check_finite(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------


def erfc(x: float) -> float:
    """Complementary error function, 2/sqrt(pi) * int_x^inf exp(-z^2) dz."""
    return float(special.erfc(_check_finite(x)))


def erfcx(x: float) -> float:
    """Scaled complementary error function exp(x^2) * erfc(x)."""
    return float(special.erfcx(_check_finite(x)))


def std_normal_cdf(x: float) -> float:
    """Standard normal distribution function Phi(x)."""
    x = _check_finite(x)
    return 0.5 * float(special.erfc(-x / math.sqrt(2.0)))


def std_normal_ppf(q: float) -> float:
    """Inverse of :func:`std_normal_cdf` on the open interval (0, 1)."""
    q = float(q)
    if not 0.0 < q < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {q!r}")
    return float(special.ndtri(q))


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

TailBound = Callable[[float], float]


@dataclass(frozen=True)
class QuadratureSpec:
    """Accuracy targets and tail truncation rule for semi-infinite integrals.

    ``tail_bound(x)`` must return an upper bound on ``int_x^inf |f|``.  The
    integral is truncated at the first point where that bound drops below
    ``abs_tol / 10``.  Without a bound, panels of doubling width are added
    until two consecutive panels contribute less than ``abs_tol / 10``.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-9
    tail_bound: Optional[TailBound] = field(default=None, compare=False)
    max_upper: float = 1e4
    subdivisions: int = 200

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be strictly positive")
        if not math.isfinite(self.max_upper):
            raise DomainError("max_upper must be finite")

    def with_tail_bound(self, bound: TailBound) -> "QuadratureSpec":
        return QuadratureSpec(self.abs_tol, self.rel_tol, bound, self.max_upper, self.subdivisions)


def integrate_finite(
    f: Callable[[float], float],
    lower: float,
    upper: float,
    spec: QuadratureSpec = QuadratureSpec(),
    points: Optional[list[float]] = None,
) -> float:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[lower, upper]``."""
    lower = _check_finite(lower, "lower")
    upper = _check_finite(upper, "upper")
    if upper <= lower:
        return 0.0
    pts = None
    if points:
        pts = [p for p in points if lower < p < upper] or None
    value, err, info, *rest = integrate.quad(
        f,
        lower,
        upper,
        epsabs=spec.abs_tol / 10,
        epsrel=spec.rel_tol / 10,
        limit=spec.subdivisions,
        points=pts,
        full_output=1,
    )
    if err > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise QuadratureError("adaptive quadrature did not converge", value, err)
    return float(value)


def _truncation_point(lower: float, spec: QuadratureSpec) -> float:
    bound = spec.tail_bound
    assert bound is not None
    target = spec.abs_tol / 10
    if bound(lower) <= target:
        return lower
    step = 1.0
    hi = lower + step
    while bound(hi) > target:
        step *= 2.0
        hi = lower + step
        if hi - lower > spec.max_upper:
            raise QuadratureError("tail bound never fell below tolerance", float("nan"), float("inf"))
    # shrink towards the smallest admissible cut, 1e-3 resolution is plenty
    lo = lower + step / 2 if step > 1.0 else lower
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if bound(mid) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def integrate_semi_infinite(
    f: Callable[[float], float],
    lower: float,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Integral of ``f`` over ``[lower, inf)``.

    Raises :class:`QuadratureError` carrying the achieved estimate when the
    tolerance ``max(abs_tol, rel_tol * |result|)`` cannot be certified.
    """
    lower = _check_finite(lower, "lower")
    if spec.tail_bound is not None:
        upper = _truncation_point(lower, spec)
        return integrate_finite(f, lower, upper, spec)

    cutoff = spec.abs_tol / 10
    total = 0.0
    a, width, quiet = lower, 1.0, 0
    while quiet < 2:
        piece = integrate_finite(f, a, a + width, spec)
        total += piece
        quiet = quiet + 1 if abs(piece) < cutoff else 0
        a += width
        width *= 2.0
        if a - lower > spec.max_upper:
            raise QuadratureError("integrand does not decay on [lower, max_upper]", total, abs(piece))
    return total


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------


def find_root(
    f: Callable[[float], float],
    bracket: tuple[float, float],
    tol: float = 1e-10,
) -> float:
    """Root of ``f`` inside ``bracket`` by Brent's method.

    Brent keeps a bisection fallback, so convergence is guaranteed once the
    endpoints have opposite signs.
    """
    lo, hi = (_check_finite(v, "bracket") for v in bracket)
    if lo > hi:
        lo, hi = hi, lo
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (math.isfinite(flo) and math.isfinite(fhi)) or flo * fhi > 0:
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f={flo!r}, {fhi!r}")
    return float(optimize.brentq(f, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500))


# ---------------------------------------------------------------------------
# Random streams
# ---------------------------------------------------------------------------


class RngStream:
    """Counter-based (Philox) random stream addressed by ``(seed, index)``.

    The Philox key is derived from ``SeedSequence(seed, spawn_key=(index,))``
    so distinct indices give independent streams by construction and the
    same pair always replays the same sequence.
    """

    __slots__ = ("seed", "index", "_gen")

    def __init__(self, seed: int, index: int = 0):
        if not (0 <= int(seed) < 2**64):
            raise DomainError("seed must be a 64-bit unsigned integer")
        if int(index) < 0:
            raise DomainError("stream index must be nonnegative")
        self.seed = int(seed)
        self.index = int(index)
        self._gen: Optional[np.random.Generator] = None

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=(self.index,))
            self._gen = np.random.Generator(np.random.Philox(ss))
        return self._gen

    def split(self, index: int) -> "RngStream":
        """Independent sibling stream under the same master seed."""
        return RngStream(self.seed, index)

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, index={self.index})"


def sample_standard_normal(stream: RngStream, size=None):
    """Draw i.i.d. N(0, 1) variates from ``stream`` (a float when size is None)."""
    out = stream.generator.standard_normal(size)
    return float(out) if size is None else out
