"""Elementary-product budget guard for brute-force evaluations.

Every brute-force engine estimates its term count (index-space size times
factors per term) before touching memory and refuses to start if the estimate
exceeds the budget.  The default budget is 1e8 and can be overridden per call
or through the GOWERS_BUDGET environment variable.
"""

from __future__ import annotations

import os

from .errors import BudgetExceeded

DEFAULT_BUDGET = 1e8
ENV_VAR = "GOWERS_BUDGET"


def resolve_budget(budget: float | None = None) -> float:
    """Explicit argument wins, then the environment variable, then the default."""
    if budget is not None:
        return float(budget)
    raw = os.environ.get(ENV_VAR)
    if raw is not None:
        try:
            return float(raw)
        except ValueError as exc:
            raise ValueError(f"{ENV_VAR} must be a number, got {raw!r}") from exc
    return DEFAULT_BUDGET


def check_budget(estimated: float, budget: float | None = None, what: str = "") -> float:
    """Raise BudgetExceeded when ``estimated`` products exceed the budget.

    Returns the resolved budget so callers can thread it to sub-steps.
    """
    limit = resolve_budget(budget)
    if estimated > limit:
        raise BudgetExceeded(estimated, limit, what)
    return limit
