"""Enumeration cap handling.

Several operations enumerate combinatorial families (orbits, permutation
groups, monomial bases, label tuples).  Each checks the predicted size of
the enumeration against a cap before starting.  The default is 10**7
elements; the CLI can override it via --cap or the SOSLAB_CAP environment
variable.
"""

from __future__ import annotations

import os

from .errors import ResourceCapError

DEFAULT_CAP = 10**7


def default_cap() -> int:
    env = os.environ.get("SOSLAB_CAP")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ResourceCapError(f"SOSLAB_CAP is not an integer: {env!r}") from exc
    return DEFAULT_CAP


def check_cap(size, cap: int | None, what: str) -> None:
    """Raise if a planned enumeration of `size` elements exceeds the cap."""
    if cap is None:
        cap = default_cap()
    if size > cap:
        raise ResourceCapError(f"{what}: {size} elements exceeds cap {cap}")
