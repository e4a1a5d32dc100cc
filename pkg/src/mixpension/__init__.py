"""Debt-repayment strategies for a mixed pay-as-you-go and funded pension scheme."""

__version__ = "0.1.0"

from .fund_model import FundParams, PathSample  # noqa: E402
from .numerics import BracketError, DomainError, QuadratureError, RngStream  # noqa: E402

__all__ = [
    "__version__",
    "FundParams",
    "PathSample",
    "RngStream",
    "DomainError",
    "QuadratureError",
    "BracketError",
]
