"""Dense subset-indexed value tables and their transforms.

A value function on n features assigns a real to every feature subset.
Subsets are encoded as bitmasks: bit i set means feature i is in the
subset, and the table stores the value of mask ``m`` at index ``m``.
All 2^n entries are held in one float64 array, which keeps every
downstream computation a vectorized gather instead of a dict walk.

The Moebius transform rewrites a table into interaction dividends:
``dividend(W) = sum over V subset of W of (-1)^|W minus V| * value(V)``.
The zeta transform is its inverse (plain subset sums). Both run in
O(n * 2^n) by the standard one-bit-at-a-time in-place pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import CapExceededError, TableError

# Soft default cap; factories accept an override up to the hard ceiling.
MAX_FEATURES = 20
# Dense 2^n storage stops being sane past this point. Never raised.
HARD_FEATURE_CEILING = 24


@dataclass(frozen=True)
class Tolerance:
    """Absolute comparison threshold threaded through the whole API.

    A single number so that reports, checkers, and the CLI all agree on
    what "equal" means for a given run.
    """

    absolute: float = 1e-9

    def __post_init__(self) -> None:
        if not (self.absolute > 0.0 and np.isfinite(self.absolute)):
            raise TableError(f"tolerance must be positive and finite, got {self.absolute!r}")

    def within(self, residual: float) -> bool:
        """True when an absolute residual counts as zero."""
        return abs(residual) <= self.absolute

    def scaled(self, factor: float) -> "Tolerance":
        return Tolerance(self.absolute * factor)


DEFAULT_TOL = Tolerance()


def _as_table_array(values: Iterable[float] | np.ndarray, n: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != (1 << n):
        raise TableError(f"expected {1 << n} values for n={n}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise TableError("value tables must be finite (no NaN or infinity)")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


def _check_n(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TableError(f"feature count must be an integer, got {n!r}")
    if n < 1:
        raise TableError(f"feature count must be at least 1, got {n}")
    if n > HARD_FEATURE_CEILING:
        raise CapExceededError(
            f"n={n} exceeds the hard ceiling of {HARD_FEATURE_CEILING} features"
        )


@dataclass(frozen=True, eq=False)
class ValueTable:
    """Immutable value function over all subsets of n features."""

    n: int
    values: np.ndarray

    def __post_init__(self) -> None:
        _check_n(self.n)
        object.__setattr__(self, "values", _as_table_array(self.values, self.n))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def value(self, mask: int) -> float:
        if not 0 <= mask <= self.full_mask:
            raise TableError(f"mask {mask} out of range for n={self.n}")
        return float(self.values[mask])


@dataclass(frozen=True, eq=False)
class MobiusTable:
    """Interaction dividends of a value table, indexed like the table itself."""

    n: int
    dividends: np.ndarray

    def __post_init__(self) -> None:
        _check_n(self.n)
        object.__setattr__(self, "dividends", _as_table_array(self.dividends, self.n))


def new_value_table(
    n: int,
    values: Iterable[float] | np.ndarray,
    *,
    max_features: int = MAX_FEATURES,
) -> ValueTable:
    """Validating constructor for :class:`ValueTable`.

    ``max_features`` loosens the default cap (dense tables grow as 2^n);
    it can never exceed the hard ceiling of 24.
    """
    _check_n(n)
    if max_features > HARD_FEATURE_CEILING:
        raise CapExceededError(
            f"max_features={max_features} exceeds the hard ceiling of {HARD_FEATURE_CEILING}"
        )
    if n > max_features:
        raise CapExceededError(f"n={n} exceeds the configured cap of {max_features} features")
    return ValueTable(n, values)


def full_mask(n: int) -> int:
    return (1 << n) - 1


def mask_of(indices: Iterable[int], n: int) -> int:
    """Bitmask for a collection of feature indices, validated against n."""
    mask = 0
    for i in indices:
        if not 0 <= i < n:
            raise TableError(f"feature index {i} out of range for n={n}")
        mask |= 1 << i
    return mask


def indices_of(mask: int) -> tuple[int, ...]:
    """Feature indices of a bitmask, ascending."""
    out = []
    i = 0
    m = mask
    while m:
        if m & 1:
            out.append(i)
        m >>= 1
        i += 1
    return tuple(out)


def popcount_table(n: int) -> np.ndarray:
    """Bit counts of every mask below 2^n as an int64 array."""
    return np.bitwise_count(np.arange(1 << n, dtype=np.int64)).astype(np.int64)


def _subset_transform(values: np.ndarray, n: int, *, invert: bool) -> np.ndarray:
    # One in-place pass per bit over a (2,)*n view; bit order is immaterial.
    out = values.astype(np.float64, copy=True).reshape((2,) * n)
    for axis in range(n):
        # The trailing Ellipsis keeps the result an array view even when
        # no axes remain (n=1), where a bare integer index would copy.
        lo = out[(slice(None),) * axis + (0, Ellipsis)]
        hi = out[(slice(None),) * axis + (1, Ellipsis)]
        if invert:
            hi -= lo
        else:
            hi += lo
    return out.reshape(-1)


def mobius_transform(table: ValueTable) -> MobiusTable:
    """Interaction dividends of ``table``.

    Round-tripping through :func:`zeta_transform` reproduces the input
    to within ``1e-12 * max(1, max abs value)``.
    """
    return MobiusTable(table.n, _subset_transform(table.values, table.n, invert=True))


def zeta_transform(dividends: MobiusTable) -> ValueTable:
    """Rebuild a value table from dividends by subset summation."""
    return ValueTable(dividends.n, _subset_transform(dividends.dividends, dividends.n, invert=False))


def eliminate(table: ValueTable, drop: int) -> tuple[ValueTable, tuple[int, ...]]:
    """Restrict a table to the features outside ``drop``.

    Returns the restricted table together with the index remapping:
    element ``j`` of the remapping is the original index of the
    restricted table's feature ``j``. Values are copied verbatim, so
    equality with the source entries is exact. Dropping every feature
    is an error; dropping none returns an identical table.
    """
    if not 0 <= drop <= table.full_mask:
        raise TableError(f"drop mask {drop} out of range for n={table.n}")
    if drop == table.full_mask:
        raise TableError("cannot eliminate every feature; at least one must survive")
    kept = tuple(i for i in range(table.n) if not (drop >> i) & 1)
    sub = np.arange(1 << len(kept), dtype=np.int64)
    orig = np.zeros_like(sub)
    for new_bit, old_bit in enumerate(kept):
        orig |= ((sub >> new_bit) & 1) << old_bit
    return ValueTable(len(kept), table.values[orig]), kept


def mix(first: ValueTable, second: ValueTable, alpha: float) -> ValueTable:
    """Convex combination ``alpha * first + (1 - alpha) * second``."""
    if first.n != second.n:
        raise TableError(f"cannot mix tables over {first.n} and {second.n} features")
    if not (0.0 <= alpha <= 1.0):
        raise TableError(f"mixture weight must lie in [0, 1], got {alpha!r}")
    return ValueTable(first.n, alpha * first.values + (1.0 - alpha) * second.values)


def tables_close(first: ValueTable, second: ValueTable, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Entrywise comparison at an absolute tolerance."""
    if first.n != second.n:
        return False
    return bool(np.max(np.abs(first.values - second.values), initial=0.0) <= tol.absolute)


def table_to_dict(table: ValueTable) -> dict:
    """JSON-ready form: ``{"n": ..., "values": [...]}`` in mask order."""
    return {"n": table.n, "values": [float(v) for v in table.values]}


def table_from_dict(payload: dict, *, max_features: int = MAX_FEATURES) -> ValueTable:
    """Parse the dict form produced by :func:`table_to_dict`."""
    if not isinstance(payload, dict) or "n" not in payload or "values" not in payload:
        raise TableError('a value table needs keys "n" and "values"')
    n = payload["n"]
    _check_n(n)
    values = payload["values"]
    if not isinstance(values, (list, tuple)):
        raise TableError('"values" must be a list of reals in mask order')
    return new_value_table(n, values, max_features=max_features)
