"""Pair counts and the three effect measures.

``theta`` is P(X > Y) + P(X = Y)/2, ``lambda_so`` is theta / (1 - theta) and
``lambda_wr`` is P(X > Y) / P(X < Y). Everything is kept as exact fractions;
ratios that divide by zero become explicit :class:`Extended` states.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import kernels
from .values import (
    DataError,
    DiscreteDistribution,
    NumericScale,
    OrdinalScale,
    OrderedValue,
    Sample,
    ScaleError,
    common_scale,
    parse_scale,
    rescale,
    to_fraction,
    written_decimals,
)

HALF = Fraction(1, 2)


class State(enum.Enum):
    FINITE = "finite"
    PLUS_INFINITY = "inf"
    UNDEFINED = "undef"


@dataclass(frozen=True)
class Extended:
    """A non-negative ratio that may be +inf or 0/0."""

    state: State
    value: Fraction | None = None

    @classmethod
    def ratio(cls, num, den) -> "Extended":
        if den:
            return cls(State.FINITE, Fraction(num) / Fraction(den))
        if num:
            return cls(State.PLUS_INFINITY)
        return cls(State.UNDEFINED)

    @classmethod
    def finite(cls, x) -> "Extended":
        return cls(State.FINITE, Fraction(x))

    @property
    def is_finite(self) -> bool:
        return self.state is State.FINITE

    @property
    def is_inf(self) -> bool:
        return self.state is State.PLUS_INFINITY

    @property
    def is_undefined(self) -> bool:
        return self.state is State.UNDEFINED

    def __float__(self):
        if self.state is State.FINITE:
            return float(self.value)
        return math.inf if self.state is State.PLUS_INFINITY else math.nan

    def to_json(self):
        """Full-precision float, or the strings ``"inf"`` / ``"undef"``."""
        if self.state is State.FINITE:
            return float(self.value)
        return self.state.value

    def __str__(self):
        if self.state is State.FINITE:
            return repr(float(self.value))
        return self.state.value


Number = Union[Fraction, Extended]


@dataclass(frozen=True)
class PairCounts:
    wins: int
    ties: int
    losses: int
    n_pairs: int

    def __post_init__(self):
        if min(self.wins, self.ties, self.losses) < 0:
            raise ValueError("pair counts must be non-negative")
        if self.wins + self.ties + self.losses != self.n_pairs:
            raise ValueError("wins + ties + losses must equal n_pairs")

    def swapped(self) -> "PairCounts":
        return PairCounts(self.losses, self.ties, self.wins, self.n_pairs)

    @property
    def theta(self) -> Fraction:
        return Fraction(2 * self.wins + self.ties, 2 * self.n_pairs)


@dataclass(frozen=True)
class EffectEstimates:
    p_plus: Fraction
    p_zero: Fraction
    p_minus: Fraction
    theta: Fraction
    lambda_so: Extended
    lambda_wr: Extended
    odds_ratio: Extended | None = None
    counts: PairCounts | None = None

    @classmethod
    def from_probabilities(cls, p_plus, p_zero, p_minus, odds_ratio=None, counts=None) -> "EffectEstimates":
        p_plus, p_zero, p_minus = Fraction(p_plus), Fraction(p_zero), Fraction(p_minus)
        theta = p_plus + p_zero / 2
        return cls(
            p_plus=p_plus,
            p_zero=p_zero,
            p_minus=p_minus,
            theta=theta,
            lambda_so=Extended.ratio(theta, 1 - theta),
            lambda_wr=Extended.ratio(p_plus, p_minus),
            odds_ratio=odds_ratio,
            counts=counts,
        )

    def swapped(self) -> "EffectEstimates":
        return EffectEstimates.from_probabilities(
            self.p_minus, self.p_zero, self.p_plus,
            counts=self.counts.swapped() if self.counts else None,
        )

    def to_json(self) -> dict:
        out = {
            "p_plus": float(self.p_plus),
            "p_zero": float(self.p_zero),
            "p_minus": float(self.p_minus),
            "theta": float(self.theta),
            "lambda_so": self.lambda_so.to_json(),
            "lambda_wr": self.lambda_wr.to_json(),
        }
        if self.odds_ratio is not None:
            out["odds_ratio"] = self.odds_ratio.to_json()
        if self.counts is not None:
            c = self.counts
            out["counts"] = {"wins": c.wins, "ties": c.ties, "losses": c.losses, "n_pairs": c.n_pairs}
        return out


# ---------------------------------------------------------------------------
# Counting
# ---------------------------------------------------------------------------


def _aligned_keys(a: Sample, b: Sample) -> tuple[list[int], list[int]]:
    if len(a) == 0 or len(b) == 0:
        raise DataError("empty sample")
    scale = common_scale(a.scale, b.scale)
    return rescale(a.keys, a.scale, scale), rescale(b.keys, b.scale, scale)


def count_pairs(a: Sample, b: Sample) -> PairCounts:
    """Brute-force count over all ``len(a) * len(b)`` pairs."""
    xa, xb = _aligned_keys(a, b)
    w, t, l = kernels.count_pairs_brute(xa, xb)
    return PairCounts(w, t, l, len(xa) * len(xb))


def count_pairs_fast(a: Sample, b: Sample) -> PairCounts:
    """Sort-and-merge count; always equal to :func:`count_pairs`."""
    xa, xb = _aligned_keys(a, b)
    w, t, l = kernels.count_pairs_merge(xa, xb)
    return PairCounts(w, t, l, len(xa) * len(xb))


def effects_from_counts(c: PairCounts) -> EffectEstimates:
    if c.n_pairs == 0:
        raise DataError("no pairs to compare")
    n = c.n_pairs
    return EffectEstimates.from_probabilities(
        Fraction(c.wins, n), Fraction(c.ties, n), Fraction(c.losses, n), counts=c
    )


def effects_from_samples(a: Sample, b: Sample) -> EffectEstimates:
    return effects_from_counts(count_pairs_fast(a, b))


def effects_from_distributions(da: DiscreteDistribution, db: DiscreteDistribution) -> EffectEstimates:
    """Exact effects of X ~ ``da`` against Y ~ ``db``."""
    scale = common_scale(da.scale, db.scale)
    ka, kb = rescale(da.keys, da.scale, scale), rescale(db.keys, db.scale, scale)
    p_plus = p_zero = Fraction(0)
    below = Fraction(0)  # mass of db strictly below the current x
    j = 0
    for x, fa in zip(ka, da.probs):
        while j < len(kb) and kb[j] < x:
            below += db.probs[j]
            j += 1
        p_plus += fa * below
        if j < len(kb) and kb[j] == x:
            p_zero += fa * db.probs[j]
    total_a, total_b = sum(da.probs), sum(db.probs)
    p_minus = total_a * total_b - p_plus - p_zero
    return EffectEstimates.from_probabilities(p_plus, p_zero, p_minus)


def effects(a, b) -> EffectEstimates:
    """Dispatch on samples or distributions; mixed inputs use empirical masses."""
    if isinstance(a, Sample) and isinstance(b, Sample):
        return effects_from_samples(a, b)
    return effects_from_distributions(as_distribution(a), as_distribution(b))


def as_distribution(x) -> DiscreteDistribution:
    if isinstance(x, DiscreteDistribution):
        return x
    if isinstance(x, Sample):
        return DiscreteDistribution.empirical(x)
    raise TypeError(f"expected Sample or DiscreteDistribution, got {type(x).__name__}")


def binary_effects(q_a, q_b) -> EffectEstimates:
    """Effects for two Bernoulli outcomes with success rates ``q_a`` and ``q_b``.

    Floats are read through ``repr`` so that 0.9 means exactly 9/10. In this
    case the win ratio is the odds ratio of the two rates.
    """
    qa, qb = to_fraction(q_a), to_fraction(q_b)
    for name, q in (("q_a", qa), ("q_b", qb)):
        if not 0 <= q <= 1:
            raise DataError(f"{name} must lie in [0, 1], got {float(q)}")
    p_plus = qa * (1 - qb)
    p_minus = qb * (1 - qa)
    p_zero = qa * qb + (1 - qa) * (1 - qb)
    return EffectEstimates.from_probabilities(
        p_plus, p_zero, p_minus, odds_ratio=Extended.ratio(p_plus, p_minus)
    )


# ---------------------------------------------------------------------------
# Coarsening
# ---------------------------------------------------------------------------


def round_half_away(x: Fraction, digits: int = 0) -> Fraction:
    """Round to ``digits`` decimals, ties away from zero."""
    x = Fraction(x)
    scaled = abs(x) * 10**digits
    n = math.floor(scaled + HALF)
    return Fraction(n if x >= 0 else -n, 10**digits)


@dataclass(frozen=True)
class CoarseningRule:
    """Weakly monotone value map.

    ``kind`` is ``"round"`` (round to ``decimals`` places, half away from
    zero) or ``"collapse"`` (values in the closed interval ``[lo, hi]`` become
    ``replacement``).
    """

    kind: str
    decimals: int = 0
    lo: OrderedValue | None = None
    hi: OrderedValue | None = None
    replacement: OrderedValue | None = None

    def __post_init__(self):
        if self.kind == "round":
            if not 0 <= self.decimals <= 9:
                raise ScaleError("round_to_decimals needs 0..9 decimals")
        elif self.kind == "collapse":
            if None in (self.lo, self.hi, self.replacement):
                raise DataError("collapse_interval needs lo, hi and replacement")
            if self.hi < self.lo:
                raise DataError("collapse_interval needs lo <= hi")
            if not self.lo <= self.replacement <= self.hi:
                raise DataError(f"replacement {self.replacement} outside [{self.lo}, {self.hi}]")
        else:
            raise DataError(f"unknown coarsening rule {self.kind!r}")


def round_to_decimals(d: int) -> CoarseningRule:
    return CoarseningRule("round", decimals=d)


def collapse_interval(lo, hi, replacement) -> CoarseningRule:
    def value(v):
        if isinstance(v, OrderedValue):
            return v
        s = Sample.of([v])
        return s.values[0]

    return CoarseningRule("collapse", lo=value(lo), hi=value(hi), replacement=value(replacement))


def coarsen(s: Sample, rule: CoarseningRule) -> Sample:
    """Apply ``rule`` to every value of a numeric sample."""
    if not isinstance(s.scale, NumericScale):
        raise ScaleError("coarsening applies to numeric samples; use merge_categories for ordinal data")
    if rule.kind == "round":
        if rule.decimals >= s.scale.decimals:
            return s
        shift = 10 ** (s.scale.decimals - rule.decimals)
        keys = []
        for k in s.keys:
            q = round_half_away(Fraction(k, shift))
            keys.append(int(q))
        return Sample(tuple(keys), NumericScale(rule.decimals), s.label)

    scale = common_scale(s.scale, rule.replacement.scale)
    scale = common_scale(scale, rule.lo.scale)
    scale = common_scale(scale, rule.hi.scale)
    lo, hi, rep = (rescale([v.key], v.scale, scale)[0] for v in (rule.lo, rule.hi, rule.replacement))
    keys = [rep if lo <= k <= hi else k for k in rescale(s.keys, s.scale, scale)]
    # keep the sample's own precision unless the replacement needs more
    out_scale = common_scale(s.scale, rule.replacement.scale)
    if out_scale != scale:
        factor = 10 ** (scale.decimals - out_scale.decimals)
        if any(k % factor for k in keys):
            out_scale = scale
        else:
            keys = [k // factor for k in keys]
    return Sample(tuple(keys), out_scale, s.label)


def merge_categories(d: DiscreteDistribution, mapping: dict) -> DiscreteDistribution:
    """Combine adjacent categories of ``d``.

    ``mapping`` sends old support points (labels or values) to new ones;
    unmapped points keep their own label. The map must be weakly monotone,
    i.e. every new category is the image of a contiguous run of old ones.
    For ordinal input the result lives on a new category list made of the
    images in order.
    """
    src = d.scale
    old_labels = [src.format(k) for k in d.keys]
    norm = {}
    for k, v in mapping.items():
        key = str(k)
        if isinstance(src, NumericScale):
            key = src.format(src.parse(key))
        if key not in old_labels and isinstance(src, OrdinalScale) and key not in src.categories:
            raise DataError(f"mapping refers to unknown category {k!r}")
        norm[key] = str(v)

    if isinstance(src, OrdinalScale):
        # map every declared category so the new list covers the whole scale
        images = [norm.get(c, c) for c in src.categories]
        new_cats: list[str] = []
        for img in images:
            if not new_cats or new_cats[-1] != img:
                if img in new_cats:
                    raise DataError("category mapping is not order-preserving")
                new_cats.append(img)
        new_scale = OrdinalScale(tuple(new_cats))
        mass: dict[int, Fraction] = {}
        for k, p in zip(d.keys, d.probs):
            nk = new_cats.index(images[k])
            mass[nk] = mass.get(nk, Fraction(0)) + p
    else:
        images_txt = [norm.get(lbl, lbl) for lbl in old_labels]
        new_scale = common_scale(src, parse_scale(f"numeric({max(written_decimals(t) for t in images_txt)})"))
        new_keys = [new_scale.parse(t) for t in images_txt]
        if any(b < a for a, b in zip(new_keys, new_keys[1:])):
            raise DataError("value mapping is not order-preserving")
        mass = {}
        for nk, p in zip(new_keys, d.probs):
            mass[nk] = mass.get(nk, Fraction(0)) + p
    keys = tuple(sorted(mass))
    return DiscreteDistribution(keys, tuple(mass[k] for k in keys), new_scale, d.label)
