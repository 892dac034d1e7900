"""Capacity caps and numerical tolerances.

Dense operators on (C^d)^(x n) are only built while d**n stays under a hard
cap; enumerations of type classes are bounded separately.  Both caps can be
raised per call or globally through environment variables.
"""

import os

from .errors import CapacityError

DEFAULT_DIM_CAP = 4096
DEFAULT_ENUM_CAP = 1_000_000

DIM_CAP_ENV = "CQCODE_DIM_CAP"
ENUM_CAP_ENV = "CQCODE_ENUM_CAP"

# Absolute tolerance for eigenvalue sign decisions and PSD/POVM checks.
DEFAULT_ATOL = 1e-9
# Hermiticity residue allowed after symmetrization.
HERMITIAN_ATOL = 1e-10
# Eigenvalues below this are treated as exact zeros in pseudo-powers.
SUPPORT_CUT = 1e-12


def dim_cap(override=None):
    """Effective tensor-dimension cap (override > env > default)."""
    if override is not None:
        return int(override)
    env = os.environ.get(DIM_CAP_ENV)
    return int(env) if env else DEFAULT_DIM_CAP


def enum_cap(override=None):
    """Effective enumeration cap (override > env > default)."""
    if override is not None:
        return int(override)
    env = os.environ.get(ENUM_CAP_ENV)
    return int(env) if env else DEFAULT_ENUM_CAP


def check_dim(dim, cap=None):
    """Raise CapacityError if ``dim`` exceeds the effective cap."""
    limit = dim_cap(cap)
    if dim > limit:
        raise CapacityError(f"operator dimension {dim} exceeds cap {limit}")
    return dim
