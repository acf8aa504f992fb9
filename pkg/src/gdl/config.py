"""Enumeration budgets, overridable through the GDL_ENUM_BUDGET variable."""

import os

# Default item counts before an exhaustive routine refuses to run.
ORBIT_ITEMS = 12**4  # generator-pair enumeration: modulus <= 12
MODEL_ITEMS = 10**8  # affine-group enumeration in model_density
CENSUS_MODULUS = 4  # extension census: prime power <= 4 ...
CENSUS_RANK = 2  # ... and at most this many generators


def enum_budget(default):
    """Item budget for an exhaustive enumeration.

    GDL_ENUM_BUDGET, when set to a positive integer, overrides every
    per-operation default at once.
    """
    raw = os.environ.get("GDL_ENUM_BUDGET")
    if raw is None:
        return default
    value = int(raw)
    if value <= 0:
        raise ValueError("GDL_ENUM_BUDGET must be a positive integer")
    return value
