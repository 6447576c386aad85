"""Entangled-state strategies for the Kolkata restaurant and stadium games.

Classical baselines (analytic and Monte Carlo), the filling-factor-one
quantum Hall state used as a shared coordination resource, and the
two-diner quantum Nash analysis.
"""

from .errors import CapacityError, DomainError, IntegrityError, KolkataError

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "DomainError",
    "IntegrityError",
    "KolkataError",
    "__version__",
]
