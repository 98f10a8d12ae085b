"""Weighted collections of per-instance value tables.

A sample space holds one value table per instance plus a probability
weight, modelling importance that varies across a population. The
global view is the weighted mean table. Two consistency notions
connect the levels:

* value consistency: a claimed global table matches the weighted mean;
* importance consistency: scoring the global table matches the
  weighted mean of per-instance scores.

Linear scoring rules satisfy the second automatically; max-based rules
need not, and the checker returns the worst coordinate with a witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .axioms import AxiomReport, Witness
from .errors import DegenerateInputError, TableError
from .importance import ScoreMethod, score_vector
from .subset_algebra import DEFAULT_TOL, Tolerance, ValueTable

_WEIGHT_SUM_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class SampleSpace:
    """Instances of (weight, value table), weights normalized to sum 1."""

    n: int
    instances: tuple[tuple[float, ValueTable], ...]

    def __post_init__(self) -> None:
        if len(self.instances) < 1:
            raise TableError("a sample space needs at least one instance")
        weights = []
        for i, (w, t) in enumerate(self.instances):
            if not isinstance(t, ValueTable):
                raise TableError(f"instance {i} is not a value table")
            if t.n != self.n:
                raise TableError(
                    f"instance {i} has {t.n} features, expected {self.n}"
                )
            w = float(w)
            if not np.isfinite(w) or w < 0:
                raise TableError(f"instance {i} has invalid weight {w!r}")
            weights.append(w)
        total = sum(weights)
        if total <= 0:
            raise DegenerateInputError("instance weights must not all be zero")
        normalized = tuple(
            (w / total, t) for w, (_, t) in zip(weights, self.instances)
        )
        assert abs(sum(w for w, _ in normalized) - 1.0) <= _WEIGHT_SUM_SLACK
        object.__setattr__(self, "instances", normalized)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for w, _ in self.instances], dtype=np.float64)

    @property
    def tables(self) -> tuple[ValueTable, ...]:
        return tuple(t for _, t in self.instances)


def new_sample_space(pairs: Iterable[tuple[float, ValueTable]]) -> SampleSpace:
    """Validating constructor; infers the feature count from the tables."""
    pairs = tuple(pairs)
    if not pairs:
        raise TableError("a sample space needs at least one instance")
    return SampleSpace(pairs[0][1].n, pairs)


def global_table(space: SampleSpace) -> ValueTable:
    """Weighted mean of the instance tables, entry by entry."""
    acc = np.zeros(1 << space.n, dtype=np.float64)
    for w, t in space.instances:
        acc += w * t.values
    return ValueTable(space.n, acc)


def duplicate_space(table: ValueTable, copies: int) -> SampleSpace:
    """Uniform space of identical instances; its global table is the input."""
    if copies < 1:
        raise TableError(f"need at least one copy, got {copies}")
    return SampleSpace(table.n, tuple((1.0, table) for _ in range(copies)))


def check_value_consistency(
    space: SampleSpace, global_claim: ValueTable, tol: Tolerance = DEFAULT_TOL
) -> AxiomReport:
    """Does a claimed global table equal the weighted instance mean?"""
    if global_claim.n != space.n:
        raise TableError(
            f"claimed table over {global_claim.n} features does not match space over {space.n}"
        )
    mean = global_table(space).values
    gaps = np.abs(global_claim.values - mean)
    at = int(np.argmax(gaps))
    worst = float(gaps[at])
    if tol.within(worst):
        return AxiomReport("value_consistency", True, worst, tol.absolute)
    return AxiomReport(
        "value_consistency",
        False,
        worst,
        tol.absolute,
        witness=Witness(subset=at, lhs=float(global_claim.values[at]), rhs=float(mean[at])),
    )


def check_importance_consistency(
    space: SampleSpace, method: ScoreMethod, tol: Tolerance = DEFAULT_TOL
) -> AxiomReport:
    """Does scoring the mean table equal the mean of instance scores?"""
    lhs = score_vector(method, global_table(space)).scores
    rhs = np.zeros(space.n, dtype=np.float64)
    for w, t in space.instances:
        rhs += w * score_vector(method, t).scores
    gaps = np.abs(lhs - rhs)
    at = int(np.argmax(gaps))
    worst = float(gaps[at])
    if tol.within(worst):
        return AxiomReport("importance_consistency", True, worst, tol.absolute)
    return AxiomReport(
        "importance_consistency",
        False,
        worst,
        tol.absolute,
        witness=Witness(feature=at, lhs=float(lhs[at]), rhs=float(rhs[at])),
    )


def space_to_dict(space: SampleSpace) -> dict:
    """JSON-ready form mirroring the on-disk sample-space format."""
    return {
        "n": space.n,
        "instances": [
            {"weight": w, "values": [float(x) for x in t.values]}
            for w, t in space.instances
        ],
    }


def space_from_dict(payload: dict) -> SampleSpace:
    if not isinstance(payload, dict) or "n" not in payload or "instances" not in payload:
        raise TableError('a sample space needs keys "n" and "instances"')
    n = payload["n"]
    rows: Sequence = payload["instances"]
    if not isinstance(rows, list) or not rows:
        raise TableError('"instances" must be a nonempty list')
    pairs = []
    for i, row in enumerate(rows):
        if not isinstance(row, dict) or "weight" not in row or "values" not in row:
            raise TableError(f'instance {i} needs keys "weight" and "values"')
        pairs.append((float(row["weight"]), ValueTable(n, row["values"])))
    return SampleSpace(n, tuple(pairs))
