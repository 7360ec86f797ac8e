"""Pairwise effect matrices, dominance cycles, mixture references and strata."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .effects import EffectEstimates, Extended, State, as_distribution, effects
from .values import DataError, Sample, mixture


def _label(g, i: int) -> str:
    return getattr(g, "label", "") or f"G{i + 1}"


@dataclass(frozen=True)
class PairwiseMatrix:
    labels: tuple[str, ...]
    cells: tuple[tuple[EffectEstimates, ...], ...]

    def __getitem__(self, ij) -> EffectEstimates:
        i, j = ij
        if isinstance(i, str):
            i = self.labels.index(i)
        if isinstance(j, str):
            j = self.labels.index(j)
        return self.cells[i][j]

    @property
    def k(self) -> int:
        return len(self.labels)

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "cells": [
                {"row": self.labels[i], "col": self.labels[j], **self.cells[i][j].to_json()}
                for i in range(self.k) for j in range(self.k)
            ],
        }


def pairwise_effects(groups: Sequence) -> PairwiseMatrix:
    """Effects for every ordered pair (row group X against column group Y)."""
    groups = list(groups)
    if len(groups) < 2:
        raise DataError("pairwise comparison needs at least two groups")
    k = len(groups)
    labels = tuple(_label(g, i) for i, g in enumerate(groups))
    if len(set(labels)) != k:
        raise DataError(f"group labels must be distinct: {list(labels)}")
    rows: list[list[EffectEstimates | None]] = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            e = effects(groups[i], groups[j])
            rows[i][j] = e
            rows[j][i] = e if i == j else e.swapped()
    return PairwiseMatrix(labels, tuple(tuple(r) for r in rows))


@dataclass(frozen=True)
class TournamentReport:
    labels: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]
    cycles: tuple[tuple[str, ...], ...]
    criterion: str = "theta"

    @property
    def transitive(self) -> bool:
        return not self.cycles

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "edges": [list(e) for e in self.edges],
            "cycles": [list(c) for c in self.cycles],
            "transitive": self.transitive,
        }


def _beats(e: EffectEstimates, criterion: str) -> bool:
    if criterion == "theta":
        return e.theta > Fraction(1, 2)
    if criterion == "lambda_wr":
        wr = e.lambda_wr
        return wr.is_inf or (wr.is_finite and wr.value > 1)
    raise ValueError(f"unknown dominance criterion {criterion!r}")


def elementary_cycles(adj: dict[int, set[int]], n: int) -> list[tuple[int, ...]]:
    """All elementary directed cycles, each listed once from its smallest vertex."""
    cycles = []

    def dfs(start, v, path, on_path):
        for w in sorted(adj.get(v, ())):
            if w == start:
                cycles.append(tuple(path))
            elif w > start and w not in on_path:
                on_path.add(w)
                path.append(w)
                dfs(start, w, path, on_path)
                path.pop()
                on_path.discard(w)

    for s in range(n):
        dfs(s, s, [s], {s})
    return cycles


def detect_cycles(m: PairwiseMatrix, criterion: str = "theta") -> TournamentReport:
    """Dominance digraph (i -> j iff i beats j strictly) and its cycles.

    ``criterion="lambda_wr"`` uses win ratio > 1 instead of theta > 1/2.
    """
    adj: dict[int, set[int]] = {}
    edges = []
    for i in range(m.k):
        for j in range(m.k):
            if i != j and _beats(m.cells[i][j], criterion):
                adj.setdefault(i, set()).add(j)
                edges.append((m.labels[i], m.labels[j]))
    cycles = elementary_cycles(adj, m.k)
    cycles.sort(key=lambda c: (len(c), c))
    return TournamentReport(
        m.labels, tuple(edges), tuple(tuple(m.labels[v] for v in c) for c in cycles), criterion
    )


def mixture_reference_effects(groups: Sequence, weights: Sequence | None = None) -> list[EffectEstimates]:
    """Each group against the weighted mixture of all groups, itself included.

    Default weights are proportional to sample size for samples and equal
    for distributions.
    """
    groups = list(groups)
    if not groups:
        raise DataError("no groups given")
    dists = [as_distribution(g) for g in groups]
    if weights is None:
        if all(isinstance(g, Sample) for g in groups):
            weights = [Fraction(len(g)) for g in groups]
        else:
            weights = [Fraction(1)] * len(groups)
    ref = mixture(dists, weights, label="mixture")
    return [effects(d, ref) for d in dists]


def _mean_extended(values: list[Extended]) -> Extended:
    if any(v.is_undefined for v in values):
        return Extended(State.UNDEFINED)
    if any(v.is_inf for v in values):
        return Extended(State.PLUS_INFINITY)
    return Extended.finite(sum(v.value for v in values) / len(values))


@dataclass(frozen=True)
class StratumEffect:
    label: str
    effects: EffectEstimates
    weight: Fraction = Fraction(1)


@dataclass(frozen=True)
class StratifiedSummary:
    per_stratum: tuple[StratumEffect, ...]
    mean_theta: Fraction
    mean_lambda_so: Extended
    mean_lambda_wr: Extended
    pooled: EffectEstimates
    weighting: str = "equal"
    flags: tuple[str, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "weighting": self.weighting,
            "per_stratum": [
                {"stratum": s.label, "weight": float(s.weight), **s.effects.to_json()}
                for s in self.per_stratum
            ],
            "mean_theta": float(self.mean_theta),
            "mean_lambda_so": self.mean_lambda_so.to_json(),
            "mean_lambda_wr": self.mean_lambda_wr.to_json(),
            "pooled": self.pooled.to_json(),
            "flags": list(self.flags),
        }


def stratified_summary(strata: Sequence[tuple], weighting: str = "equal") -> StratifiedSummary:
    """Per-stratum effects of A against B, their averages, and the pooled effect.

    Each stratum is ``(label, a, b)`` with samples or distributions. Averages
    are unweighted by default; ``weighting="size"`` weights strata by
    ``len(a) * len(b)`` (samples only). The pooled effect compares the
    mixture of all A sides against the mixture of all B sides with the same
    stratum weights.
    """
    strata = list(strata)
    if not strata:
        raise DataError("at least one stratum is required")
    if weighting not in ("equal", "size"):
        raise ValueError("weighting must be 'equal' or 'size'")
    per = []
    for label, a, b in strata:
        for side in (a, b):
            if isinstance(side, Sample) and len(side) == 0:
                raise DataError(f"stratum {label!r} has an empty sample")
        if weighting == "size":
            if not (isinstance(a, Sample) and isinstance(b, Sample)):
                raise DataError("size weighting needs samples in every stratum")
            w = Fraction(len(a) * len(b))
        else:
            w = Fraction(1)
        per.append(StratumEffect(str(label), effects(a, b), w))
    total = sum(s.weight for s in per)
    mean_theta = sum(s.weight * s.effects.theta for s in per) / total

    def wmean(attr):
        vals = [getattr(s.effects, attr) for s in per]
        if weighting == "equal":
            return _mean_extended(vals)
        if any(not v.is_finite for v in vals):
            return _mean_extended(vals)
        return Extended.finite(sum(s.weight * v.value for s, v in zip(per, vals)) / total)

    mean_so, mean_wr = wmean("lambda_so"), wmean("lambda_wr")
    flags = []
    for name, v in (("mean_lambda_so", mean_so), ("mean_lambda_wr", mean_wr)):
        if v.is_inf:
            flags.append(f"{name}: infinite in at least one stratum")
        elif v.is_undefined:
            flags.append(f"{name}: undefined in at least one stratum")

    weights = [s.weight for s in per]
    pooled_a = mixture([as_distribution(a) for _, a, _ in strata], weights, "A")
    pooled_b = mixture([as_distribution(b) for _, _, b in strata], weights, "B")
    pooled = effects(pooled_a, pooled_b)
    return StratifiedSummary(tuple(per), mean_theta, mean_so, mean_wr, pooled, weighting, tuple(flags))

