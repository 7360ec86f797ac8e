"""Built-in example data sets and the effect tables computed from them.

These are the worked examples for win ratio versus success odds: three
stochastically ordered treatments, measurement coarsening, category merging,
binary outcomes, non-transitive dice and the stratified dice design.
"""

from __future__ import annotations

from fractions import Fraction

from .effects import (
    EffectEstimates,
    binary_effects,
    coarsen,
    collapse_interval,
    effects_from_distributions,
    effects_from_samples,
    merge_categories,
    round_to_decimals,
)
from .multigroup import (
    detect_cycles,
    mixture_reference_effects,
    pairwise_effects,
    stratified_summary,
)
from .values import DiscreteDistribution, OrdinalScale, Sample

# three treatments on outcomes 1 < 2 < 3
TREATMENTS = {
    "A": ("0.10", "0.90", "0"),
    "B": ("0", "0.90", "0.10"),
    "C": ("0", "0.10", "0.90"),
}

MEASUREMENTS_A = ("1.7", "3.3", "3.8", "4.9", "6.3")
MEASUREMENTS_B = ("1.4", "1.6", "2.7", "4.3", "5.0")

SCORES = OrdinalScale(("1", "2", "3", "4", "5", "6"))
SCORE_PROBS = {
    "A": ("0.0", "0.1", "0.2", "0.3", "0.2", "0.2"),
    "B": ("0.3", "0.3", "0.1", "0.2", "0.1", "0.0"),
}
SCORE_MERGE = {"3": "4", "4": "4", "5": "4"}

BINARY_RATES = (
    ("0.9", "0.5"),
    ("0.95", "0.5"),
    ("0.9", "0.6"),
    ("0.95", "0.6"),
    ("0.9", "0.7"),
    ("0.95", "0.7"),
)
EQUAL_ODDS_RATES = (("0.821", "0.6"), ("0.99", "0.97"))

DICE = {
    "D1": (1, 4, 5, 6, 7, 7),
    "D2": (3, 3, 4, 5, 6, 9),
    "D3": (1, 2, 2, 8, 8, 9),
}
DICE_STRATA = (("1", "D1", "D2"), ("2", "D2", "D3"), ("3", "D3", "D1"))


def treatments() -> dict[str, DiscreteDistribution]:
    return {
        k: DiscreteDistribution.of([1, 2, 3], probs, scale="numeric(0)", label=k)
        for k, probs in TREATMENTS.items()
    }


def treatment_comparisons() -> list[tuple[str, EffectEstimates]]:
    d = treatments()
    return [
        (f"{x}, {y}", effects_from_distributions(d[x], d[y]))
        for x, y in (("B", "A"), ("C", "B"), ("C", "A"))
    ]


def coarsening_cases() -> list[tuple[Sample, Sample]]:
    """Measurements at four levels of coarsening, each derived from the previous."""
    a = Sample.of(MEASUREMENTS_A, "numeric(1)", "A")
    b = Sample.of(MEASUREMENTS_B, "numeric(1)", "B")
    rules = [
        round_to_decimals(0),
        collapse_interval("2.6", "4.4", "3.5"),
        collapse_interval("1.6", "5.4", "3.5"),
    ]
    cases = [(a, b)]
    for rule in rules:
        a, b = coarsen(a, rule), coarsen(b, rule)
        cases.append((a, b))
    return cases


def coarsening_effects() -> list[tuple[int, EffectEstimates, Fraction]]:
    """(case, effects, difference of means) per coarsening case."""
    out = []
    for i, (a, b) in enumerate(coarsening_cases(), start=1):
        diff = _mean(a) - _mean(b)
        out.append((i, effects_from_samples(a, b), diff))
    return out


def _mean(s: Sample) -> Fraction:
    return sum(v.as_fraction() for v in s.values) / len(s)


def scores() -> dict[str, DiscreteDistribution]:
    return {
        k: DiscreteDistribution.of(SCORES.categories, probs, scale=SCORES, label=k)
        for k, probs in SCORE_PROBS.items()
    }


def merged_scores() -> dict[str, DiscreteDistribution]:
    return {k: merge_categories(d, SCORE_MERGE) for k, d in scores().items()}


def binary_table() -> list[tuple[Fraction, Fraction, EffectEstimates]]:
    return [(Fraction(qa), Fraction(qb), binary_effects(qa, qb)) for qa, qb in BINARY_RATES]


def equal_odds_rates() -> list[tuple[Fraction, Fraction, EffectEstimates]]:
    return [(Fraction(qa), Fraction(qb), binary_effects(qa, qb)) for qa, qb in EQUAL_ODDS_RATES]


def dice() -> dict[str, Sample]:
    return {k: Sample.of(v, "numeric(0)", k) for k, v in DICE.items()}


def dice_analysis():
    d = list(dice().values())
    m = pairwise_effects(d)
    return m, detect_cycles(m), mixture_reference_effects(d, [1, 1, 1])


def dice_strata():
    d = dice()
    return stratified_summary([(lbl, d[x], d[y]) for lbl, x, y in DICE_STRATA])
