"""Separable subsets of a value table and the maximal partition.

A feature subset S is separable when the table splits additively
across it: ``value(T) = value(T & S) + value(T - S)`` for every T.
Separable sets are exactly the sets no nonzero interaction dividend
straddles (given a zero empty-set value), which yields a fast route
to the coarsest-grained fully separable partition: connect two
features whenever some dividend above tolerance covers both, and
take connected components.

A literal oracle (intersect all separable supersets of each feature,
found by exhaustive enumeration) is kept alongside the fast algorithm
and must agree with it; tests hold both routes to that contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CapExceededError,
    DegenerateInputError,
    NotSeparableError,
    PartitionError,
    TableError,
)
from .subset_algebra import (
    DEFAULT_TOL,
    MAX_FEATURES,
    Tolerance,
    ValueTable,
    indices_of,
    mask_of,
    mobius_transform,
    popcount_table,
)

# Exhaustive enumeration is 4^n work; past this it stops being a sane oracle.
ORACLE_MAX_FEATURES = 12


@dataclass(frozen=True)
class SeparabilityReport:
    """Worst-case additivity residual of one subset.

    ``worst_T`` is the context attaining the largest residual
    ``|value(T) - value(T & S) - value(T - S)|`` (lowest mask on ties).
    """

    subset: int
    separable: bool
    worst_T: int
    worst_residual: float


@dataclass(frozen=True)
class Partition:
    """Disjoint, covering, nonempty feature blocks, stored as bitmasks.

    Blocks are kept in canonical order: ascending lowest member. The
    constructor rejects overlaps, gaps, and empty blocks.
    """

    n: int
    blocks: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise PartitionError(f"partition needs at least one feature, got n={self.n}")
        full = (1 << self.n) - 1
        blocks = tuple(int(b) for b in self.blocks)
        seen = 0
        for b in blocks:
            if b == 0:
                raise PartitionError("empty blocks are not allowed")
            if b & ~full:
                raise PartitionError(f"block mask {b} exceeds the feature range for n={self.n}")
            if b & seen:
                raise PartitionError(f"block mask {b} overlaps an earlier block")
            seen |= b
        if seen != full:
            missing = indices_of(full ^ seen)
            raise PartitionError(f"partition does not cover features {missing}")
        # Lowest set bits are distinct across disjoint blocks, so this order is total.
        object.__setattr__(self, "blocks", tuple(sorted(blocks, key=lambda b: b & -b)))

    @classmethod
    def from_indices(cls, n: int, blocks: list[list[int]] | tuple) -> "Partition":
        return cls(n, tuple(mask_of(block, n) for block in blocks))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(n, tuple(1 << i for i in range(n)))

    def block_indices(self) -> tuple[tuple[int, ...], ...]:
        return tuple(indices_of(b) for b in self.blocks)

    def block_of(self, feature: int) -> int:
        for b in self.blocks:
            if (b >> feature) & 1:
                return b
        raise PartitionError(f"feature {feature} out of range for n={self.n}")


def is_separable(
    table: ValueTable, subset: int, tol: Tolerance = DEFAULT_TOL
) -> SeparabilityReport:
    """Test the additive split of ``table`` across ``subset``."""
    if not 0 <= subset <= table.full_mask:
        raise TableError(f"subset mask {subset} out of range for n={table.n}")
    masks = np.arange(1 << table.n, dtype=np.int64)
    comp = table.full_mask ^ subset
    v = table.values
    residuals = np.abs(v - v[masks & subset] - v[masks & comp])
    worst = int(np.argmax(residuals))
    worst_residual = float(residuals[worst])
    return SeparabilityReport(
        subset=subset,
        separable=tol.within(worst_residual),
        worst_T=worst,
        worst_residual=worst_residual,
    )


def validate_partition(
    table: ValueTable, partition: Partition, tol: Tolerance = DEFAULT_TOL
) -> tuple[SeparabilityReport, ...]:
    """Per-block separability reports, aligned with ``partition.blocks``."""
    if partition.n != table.n:
        raise PartitionError(
            f"partition over {partition.n} features does not match table over {table.n}"
        )
    return tuple(is_separable(table, block, tol) for block in partition.blocks)


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def maximal_partition(table: ValueTable, tol: Tolerance = DEFAULT_TOL) -> Partition:
    """Coarsest-grained partition into separable blocks.

    Two features land in the same block iff some interaction dividend
    with magnitude above ``tol`` covers both; blocks are the connected
    components of that relation. The result is re-validated as a safety
    net at a tolerance scaled by the summation depth (2^n, offset by any
    residual empty-set value), which the dividend bound guarantees.

    Note that when ``value({}) `` itself exceeds ``tol`` no subset is
    separable in the strict sense; the validator reports that honestly,
    while this routine still returns the interaction structure.
    """
    n = table.n
    if n == 1:
        return Partition.singletons(1)
    dividends = mobius_transform(table).dividends
    above = np.abs(dividends) > tol.absolute
    pop = popcount_table(n)
    interacting = above & (pop >= 2)
    uf = _UnionFind(n)
    hits = np.flatnonzero(interacting)
    if hits.size:
        if hits.size <= 65536:
            for m in hits:
                bits = indices_of(int(m))
                for b in bits[1:]:
                    uf.union(bits[0], b)
        else:
            # Dense dividend sets: a pairwise vectorized sweep beats a
            # Python loop over up to 2^n masks.
            masks = np.arange(1 << n, dtype=np.int64)
            for i in range(n):
                for j in range(i + 1, n):
                    if uf.find(i) == uf.find(j):
                        continue
                    pair = (1 << i) | (1 << j)
                    if np.any(interacting & ((masks & pair) == pair)):
                        uf.union(i, j)
    groups: dict[int, int] = {}
    for f in range(n):
        root = uf.find(f)
        groups[root] = groups.get(root, 0) | (1 << f)
    result = Partition(n, tuple(groups.values()))
    guard = Tolerance((1 << n) * tol.absolute + abs(float(table.values[0])) + tol.absolute)
    for report in validate_partition(table, result, guard):
        if not report.separable:  # pragma: no cover - violates the dividend bound
            raise RuntimeError(
                f"internal inconsistency: block {report.subset} failed re-validation "
                f"with residual {report.worst_residual}"
            )
    return result


def enumerate_separable_sets(
    table: ValueTable, tol: Tolerance = DEFAULT_TOL
) -> tuple[int, ...]:
    """Every separable subset mask, by exhaustive testing. 4^n work."""
    if table.n > ORACLE_MAX_FEATURES:
        raise CapExceededError(
            f"exhaustive enumeration is capped at {ORACLE_MAX_FEATURES} features, got n={table.n}"
        )
    return tuple(
        s for s in range(1 << table.n) if is_separable(table, s, tol).separable
    )


def maximal_partition_oracle(table: ValueTable, tol: Tolerance = DEFAULT_TOL) -> Partition:
    """Reference construction of the maximal partition.

    Enumerates every separable set, then sends each feature to the
    intersection of all separable sets containing it. Slow by design;
    exists to hold :func:`maximal_partition` to its contract.
    """
    separable = maximal_partition_oracle_sets(table, tol)
    blocks = sorted(set(separable.values()))
    return Partition(table.n, tuple(blocks))


def maximal_partition_oracle_sets(
    table: ValueTable, tol: Tolerance = DEFAULT_TOL
) -> dict[int, int]:
    """Feature -> intersection of all separable sets containing it."""
    seps = enumerate_separable_sets(table, tol)
    full = table.full_mask
    if full not in seps:
        raise DegenerateInputError(
            "the full feature set is not separable (nonzero empty-set value?); "
            "no separable partition exists"
        )
    out: dict[int, int] = {}
    for f in range(table.n):
        acc = full
        for s in seps:
            if (s >> f) & 1:
                acc &= s
        out[f] = acc
    return out


def induced_meta_table(
    table: ValueTable, partition: Partition, tol: Tolerance = DEFAULT_TOL
) -> ValueTable:
    """Collapse a separable partition's blocks into meta-features.

    The value of a set of blocks is the sum of the blocks' own values;
    separability makes that agree with the value of the union of their
    members, and the agreement is asserted here (within ``tol`` scaled
    by the block count) before the table is returned.
    """
    reports = validate_partition(table, partition, tol)
    bad = [r for r in reports if not r.separable]
    if bad:
        raise NotSeparableError(
            f"partition block {bad[0].subset} is not separable "
            f"(worst residual {bad[0].worst_residual} at context {bad[0].worst_T})"
        )
    k = len(partition.blocks)
    block_values = np.array([table.values[b] for b in partition.blocks])
    meta_masks = np.arange(1 << k, dtype=np.int64)
    meta = np.zeros(1 << k, dtype=np.float64)
    unions = np.zeros(1 << k, dtype=np.int64)
    for j, block in enumerate(partition.blocks):
        chosen = (meta_masks >> j) & 1 == 1
        meta[chosen] += block_values[j]
        unions[chosen] |= block
    slack = tol.absolute * (k + 1)
    drift = float(np.max(np.abs(meta - table.values[unions])))
    if drift > slack:  # pragma: no cover - excluded by the per-block validation
        raise RuntimeError(
            f"internal inconsistency: block-sum table drifts {drift} from union values"
        )
    return ValueTable(k, meta)


@dataclass(frozen=True)
class ClosureReport:
    """Separability of the sets derived from two separable inputs."""

    complement_ok: bool
    union_ok: bool
    intersection_ok: bool
    complement_first: SeparabilityReport
    complement_second: SeparabilityReport
    union: SeparabilityReport
    intersection: SeparabilityReport


def closure_check(
    table: ValueTable, first: int, second: int, tol: Tolerance = DEFAULT_TOL
) -> ClosureReport:
    """Check complement, union, and intersection of two separable sets.

    Raises :class:`NotSeparableError` when either input fails its own
    separability test; the closure claims only apply to separable sets.
    """
    for label, subset in (("first", first), ("second", second)):
        rep = is_separable(table, subset, tol)
        if not rep.separable:
            raise NotSeparableError(
                f"precondition failed: {label} subset {subset} is not separable "
                f"(worst residual {rep.worst_residual} at context {rep.worst_T})"
            )
    comp1 = is_separable(table, table.full_mask ^ first, tol)
    comp2 = is_separable(table, table.full_mask ^ second, tol)
    union = is_separable(table, first | second, tol)
    inter = is_separable(table, first & second, tol)
    return ClosureReport(
        complement_ok=comp1.separable and comp2.separable,
        union_ok=union.separable,
        intersection_ok=inter.separable,
        complement_first=comp1,
        complement_second=comp2,
        union=union,
        intersection=inter,
    )


def partition_to_dict(partition: Partition) -> dict:
    """JSON-ready form: blocks as ascending index lists, canonical order."""
    return {
        "n": partition.n,
        "blocks": [list(block) for block in partition.block_indices()],
    }


def partition_from_dict(payload: dict, *, max_features: int = MAX_FEATURES) -> Partition:
    if not isinstance(payload, dict) or "n" not in payload or "blocks" not in payload:
        raise PartitionError('a partition needs keys "n" and "blocks"')
    n = payload["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise PartitionError(f"feature count must be a positive integer, got {n!r}")
    if n > max_features:
        raise CapExceededError(f"n={n} exceeds the configured cap of {max_features} features")
    blocks = payload["blocks"]
    if not isinstance(blocks, list) or not all(isinstance(b, list) for b in blocks):
        raise PartitionError('"blocks" must be a list of index lists')
    return Partition.from_indices(n, blocks)
