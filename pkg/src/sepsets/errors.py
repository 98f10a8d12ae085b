"""Exception types shared across the package.

Everything derives from ValueError so callers who only care about
"bad input" can catch one thing, while the CLI and tests can still
tell the failure modes apart.
"""

from __future__ import annotations


class SepsetsError(ValueError):
    """Base class for all input and precondition failures."""


class TableError(SepsetsError):
    """A value table (or its serialized form) violates an invariant."""


class CapExceededError(SepsetsError):
    """The requested feature count exceeds the applicable cap."""


class PartitionError(SepsetsError):
    """A partition is structurally invalid: overlap, gap, or empty block."""


class NotSeparableError(SepsetsError):
    """A precondition required a separable set and the input was not one."""


class DegenerateInputError(SepsetsError):
    """Input is mathematically unusable, e.g. a zero-norm target."""
