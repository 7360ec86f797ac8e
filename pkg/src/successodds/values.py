"""Exact ordered values, samples, discrete distributions and file ingestion.

Numeric outcomes are held as integer mantissas with a shared decimal scale so
that ties are decided by integer equality. Ordinal outcomes are held as
0-based indices into a declared category list.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from functools import total_ordering
from typing import Iterable, Sequence, Union

MAX_DECIMALS = 9
MAX_MANTISSA = 10**15
PROB_TOLERANCE = Fraction(1, 10**12)


class DataError(ValueError):
    """Base class for input errors; ``code`` is the machine-greppable tag."""

    code = "E_PARSE"


class ParseError(DataError):
    code = "E_PARSE"


class ScaleError(DataError):
    code = "E_SCALE"


# ---------------------------------------------------------------------------
# Scales
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NumericScale:
    decimals: int = 0

    def __post_init__(self):
        if not 0 <= self.decimals <= MAX_DECIMALS:
            raise ScaleError(f"decimals must be in 0..{MAX_DECIMALS}, got {self.decimals}")

    kind = "numeric"

    def spec(self) -> str:
        return f"numeric({self.decimals})"

    def parse(self, text: str) -> int:
        """Return the mantissa of ``text`` at this scale."""
        return parse_decimal(text, self.decimals)

    def format(self, key: int) -> str:
        return format_decimal(key, self.decimals)


@dataclass(frozen=True)
class OrdinalScale:
    categories: tuple[str, ...]

    def __post_init__(self):
        cats = tuple(str(c) for c in self.categories)
        object.__setattr__(self, "categories", cats)
        if not cats:
            raise ScaleError("ordinal scale needs at least one category")
        if len(set(cats)) != len(cats):
            raise ScaleError(f"ordinal categories must be distinct: {list(cats)}")

    kind = "ordinal"

    def spec(self) -> str:
        return "ordinal([" + ",".join(self.categories) + "])"

    def parse(self, text: str) -> int:
        try:
            return self.categories.index(str(text))
        except ValueError:
            raise ScaleError(f"unknown ordinal category {text!r}") from None

    def format(self, key: int) -> str:
        return self.categories[key]


Scale = Union[NumericScale, OrdinalScale]

_SCALE_RE = re.compile(r"^\s*(numeric|ordinal)\s*\((.*)\)\s*$", re.DOTALL)


def parse_scale(spec) -> Scale:
    """Parse ``"numeric(2)"``, ``"ordinal([lo,mid,hi])"`` or an equivalent dict."""
    if isinstance(spec, (NumericScale, OrdinalScale)):
        return spec
    if isinstance(spec, dict):
        kind = spec.get("kind")
        if kind == "numeric":
            return NumericScale(int(spec.get("decimals", 0)))
        if kind == "ordinal":
            return OrdinalScale(tuple(spec.get("categories", ())))
        raise ScaleError(f"unknown scale kind {kind!r}")
    m = _SCALE_RE.match(str(spec))
    if not m:
        raise ScaleError(f"cannot parse scale spec {spec!r}")
    kind, body = m.groups()
    body = body.strip()
    if kind == "numeric":
        try:
            return NumericScale(int(body))
        except ValueError:
            raise ScaleError(f"numeric scale needs an integer precision, got {body!r}") from None
    if body.startswith("[") and body.endswith("]"):
        body = body[1:-1]
    cats = [c.strip() for c in next(csv.reader([body], skipinitialspace=True))] if body else []
    return OrdinalScale(tuple(cats))


def common_scale(a: Scale, b: Scale) -> Scale:
    """Smallest scale on which values of both ``a`` and ``b`` are exact.

    Numeric scales of different precision widen to the finer one (an exact
    rescaling). Mixing kinds or category lists raises :class:`ScaleError`.
    """
    if isinstance(a, NumericScale) and isinstance(b, NumericScale):
        return a if a.decimals >= b.decimals else b
    if isinstance(a, OrdinalScale) and isinstance(b, OrdinalScale):
        if a.categories != b.categories:
            raise ScaleError("ordinal values use different category lists")
        return a
    raise ScaleError(f"cannot compare {a.kind} values with {b.kind} values")


def rescale(keys: Iterable[int], src: Scale, dst: Scale) -> list[int]:
    if src == dst:
        return list(keys)
    if isinstance(src, NumericScale) and isinstance(dst, NumericScale):
        shift = dst.decimals - src.decimals
        if shift < 0:
            raise ScaleError("cannot rescale to a coarser precision")
        factor = 10**shift
        return [k * factor for k in keys]
    common_scale(src, dst)
    return list(keys)


# ---------------------------------------------------------------------------
# Decimal text
# ---------------------------------------------------------------------------


def parse_decimal(text, decimals: int) -> int:
    text = str(text).strip()
    try:
        d = Decimal(text)
    except InvalidOperation:
        raise ParseError(f"unparseable numeric value {text!r}") from None
    if not d.is_finite():
        raise ParseError(f"non-finite numeric value {text!r}")
    scaled = d.scaleb(decimals)
    if scaled != scaled.to_integral_value():
        raise ScaleError(f"decimal precision exceeded for {text!r} (max {decimals} places)")
    key = int(scaled)
    if abs(key) > MAX_MANTISSA:
        raise ScaleError(f"value {text!r} out of range at {decimals} decimals")
    return key


def format_decimal(key: int, decimals: int) -> str:
    if decimals == 0:
        return str(key)
    sign = "-" if key < 0 else ""
    digits = str(abs(key)).rjust(decimals + 1, "0")
    return f"{sign}{digits[:-decimals]}.{digits[-decimals:]}"


def written_decimals(text) -> int:
    """Number of decimal places needed to hold ``text`` exactly."""
    try:
        d = Decimal(str(text).strip())
    except InvalidOperation:
        raise ParseError(f"unparseable numeric value {text!r}") from None
    if not d.is_finite():
        raise ParseError(f"non-finite numeric value {text!r}")
    exp = d.normalize().as_tuple().exponent
    return max(0, -exp)


def infer_numeric_scale(values: Iterable) -> NumericScale:
    places = max((written_decimals(v) for v in values), default=0)
    if places > MAX_DECIMALS:
        raise ScaleError(f"values need {places} decimals, max is {MAX_DECIMALS}")
    return NumericScale(places)


# ---------------------------------------------------------------------------
# Values, samples, distributions
# ---------------------------------------------------------------------------


@total_ordering
@dataclass(frozen=True, eq=False)
class OrderedValue:
    """One outcome: an integer ``key`` interpreted on ``scale``."""

    key: int
    scale: Scale

    @property
    def kind(self) -> str:
        return self.scale.kind

    def _aligned(self, other: "OrderedValue") -> tuple[int, int]:
        if not isinstance(other, OrderedValue):
            raise TypeError(f"cannot compare OrderedValue with {type(other).__name__}")
        s = common_scale(self.scale, other.scale)
        return rescale([self.key], self.scale, s)[0], rescale([other.key], other.scale, s)[0]

    def __eq__(self, other):
        if not isinstance(other, OrderedValue):
            return NotImplemented
        x, y = self._aligned(other)
        return x == y

    def __lt__(self, other):
        if not isinstance(other, OrderedValue):
            return NotImplemented
        x, y = self._aligned(other)
        return x < y

    def __hash__(self):
        if isinstance(self.scale, NumericScale):
            return hash(Fraction(self.key, 10**self.scale.decimals))
        return hash((self.scale.categories, self.key))

    def as_fraction(self) -> Fraction:
        if not isinstance(self.scale, NumericScale):
            raise ScaleError("ordinal values have no numeric magnitude")
        return Fraction(self.key, 10**self.scale.decimals)

    def __str__(self):
        return self.scale.format(self.key)

    def __repr__(self):
        return f"OrderedValue({self})"


def _keys_from(values: Iterable, scale: Scale) -> tuple[int, ...]:
    out = []
    for v in values:
        if isinstance(v, OrderedValue):
            if common_scale(v.scale, scale) != scale:
                raise ScaleError(f"value {v} exceeds the precision of {scale.spec()}")
            out.append(rescale([v.key], v.scale, scale)[0])
        else:
            out.append(scale.parse(v))
    return tuple(out)


@dataclass(frozen=True)
class Sample:
    """A labelled multiset of outcomes, stored as integer keys on one scale."""

    keys: tuple[int, ...]
    scale: Scale
    label: str = ""

    @classmethod
    def of(cls, values: Sequence, scale=None, label: str = "") -> "Sample":
        """Build a sample from text, numbers or :class:`OrderedValue` items.

        Without ``scale`` numeric values get the smallest decimal scale that
        holds them exactly (numbers are read through their ``str`` form).
        """
        values = list(values)
        if scale is None:
            if values and all(isinstance(v, OrderedValue) for v in values):
                scale = values[0].scale
                for v in values[1:]:
                    scale = common_scale(scale, v.scale)
            else:
                scale = infer_numeric_scale(v for v in values)
        else:
            scale = parse_scale(scale)
        return cls(_keys_from(values, scale), scale, label)

    def __len__(self):
        return len(self.keys)

    @property
    def values(self) -> tuple[OrderedValue, ...]:
        return tuple(OrderedValue(k, self.scale) for k in self.keys)

    def on(self, scale: Scale) -> "Sample":
        if scale == self.scale:
            return self
        return Sample(tuple(rescale(self.keys, self.scale, scale)), scale, self.label)

    def texts(self) -> list[str]:
        return [self.scale.format(k) for k in self.keys]


def align(*samples: Sample) -> list[Sample]:
    """Re-express samples on their common scale."""
    scale = samples[0].scale
    for s in samples[1:]:
        scale = common_scale(scale, s.scale)
    return [s.on(scale) for s in samples]


@dataclass(frozen=True)
class DiscreteDistribution:
    """Point masses on a strictly increasing support."""

    keys: tuple[int, ...]
    probs: tuple[Fraction, ...]
    scale: Scale
    label: str = ""

    def __post_init__(self):
        if len(self.keys) != len(self.probs):
            raise DataError(
                f"support has {len(self.keys)} points but {len(self.probs)} probabilities"
            )
        if not self.keys:
            raise DataError("distribution needs a non-empty support")
        if any(b <= a for a, b in zip(self.keys, self.keys[1:])):
            raise DataError("support must be strictly increasing")
        probs = tuple(Fraction(p) for p in self.probs)
        if any(p < 0 for p in probs):
            raise DataError("probabilities must be non-negative")
        total = sum(probs)
        if abs(total - 1) > PROB_TOLERANCE:
            raise DataError(f"probabilities sum to {_fmt_sum(total)}")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def of(cls, support: Sequence, probs: Sequence, scale=None, label: str = "") -> "DiscreteDistribution":
        support = list(support)
        if scale is None:
            scale = infer_numeric_scale(support)
        else:
            scale = parse_scale(scale)
        return cls(_keys_from(support, scale), tuple(to_fraction(p) for p in probs), scale, label)

    @classmethod
    def empirical(cls, sample: Sample, label: str | None = None) -> "DiscreteDistribution":
        n = len(sample)
        if n == 0:
            raise DataError("empty sample")
        counts: dict[int, int] = {}
        for k in sample.keys:
            counts[k] = counts.get(k, 0) + 1
        keys = tuple(sorted(counts))
        return cls(keys, tuple(Fraction(counts[k], n) for k in keys), sample.scale,
                   sample.label if label is None else label)

    @property
    def support(self) -> tuple[OrderedValue, ...]:
        return tuple(OrderedValue(k, self.scale) for k in self.keys)

    def on(self, scale: Scale) -> "DiscreteDistribution":
        if scale == self.scale:
            return self
        return DiscreteDistribution(tuple(rescale(self.keys, self.scale, scale)), self.probs, scale, self.label)

    def as_dict(self) -> dict[int, Fraction]:
        return dict(zip(self.keys, self.probs))


def _fmt_sum(total: Fraction) -> str:
    return str(Decimal(total.numerator) / Decimal(total.denominator))


def to_fraction(p) -> Fraction:
    """Exact rational from a number or numeric text; floats go through ``repr``."""
    if isinstance(p, Fraction):
        return p
    if isinstance(p, (int, Decimal)):
        return Fraction(p)
    if isinstance(p, float):
        return Fraction(repr(p))
    try:
        return Fraction(str(p).strip())
    except ValueError:
        raise ParseError(f"not a probability: {p!r}") from None


def mixture(dists: Sequence[DiscreteDistribution], weights: Sequence | None = None,
            label: str = "mixture") -> DiscreteDistribution:
    """Weighted mixture of distributions on a common scale."""
    if not dists:
        raise DataError("mixture of no distributions")
    if weights is None:
        weights = [Fraction(1, len(dists))] * len(dists)
    weights = [to_fraction(w) for w in weights]
    if len(weights) != len(dists):
        raise DataError("one weight per distribution required")
    if any(w < 0 for w in weights):
        raise DataError("mixture weights must be non-negative")
    total = sum(weights)
    if total == 0:
        raise DataError("mixture weights sum to zero")
    scale = dists[0].scale
    for d in dists[1:]:
        scale = common_scale(scale, d.scale)
    mass: dict[int, Fraction] = {}
    for d, w in zip(dists, weights):
        for k, p in zip(d.on(scale).keys, d.probs):
            mass[k] = mass.get(k, Fraction(0)) + w * p / total
    keys = tuple(sorted(mass))
    return DiscreteDistribution(keys, tuple(mass[k] for k in keys), scale, label)


# ---------------------------------------------------------------------------
# Datasets and CSV
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Record:
    value: OrderedValue
    group: str
    stratum: str | None = None


@dataclass(frozen=True)
class CsvConfig:
    value_column: str = "value"
    group_column: str = "group"
    stratum_column: str | None = None
    scale: str = "numeric(0)"
    skip_blank_rows: bool = False


@dataclass(frozen=True)
class Dataset:
    records: tuple[Record, ...]
    scale: Scale
    config: CsvConfig = field(default_factory=CsvConfig)

    def group_labels(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.records:
            seen.setdefault(r.group)
        return list(seen)

    def stratum_labels(self) -> list[str]:
        seen: dict[str, None] = {}
        for r in self.records:
            if r.stratum is not None:
                seen.setdefault(r.stratum)
        return list(seen)

    def sample(self, group: str, stratum: str | None = None) -> Sample:
        keys = tuple(
            r.value.key for r in self.records
            if r.group == group and (stratum is None or r.stratum == stratum)
        )
        if not keys:
            where = f" in stratum {stratum!r}" if stratum is not None else ""
            raise DataError(f"group {group!r}{where} has no observations")
        return Sample(keys, self.scale, group)

    def samples(self) -> dict[str, Sample]:
        return {g: self.sample(g) for g in self.group_labels()}

    def to_csv(self) -> str:
        cfg = self.config
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        header = [cfg.value_column, cfg.group_column]
        if cfg.stratum_column:
            header.append(cfg.stratum_column)
        w.writerow(header)
        for r in self.records:
            row = [self.scale.format(r.value.key), r.group]
            if cfg.stratum_column:
                row.append(r.stratum or "")
            w.writerow(row)
        return buf.getvalue()


def parse_csv(raw, config: CsvConfig | None = None, **kwargs) -> Dataset:
    """Read a UTF-8 CSV with a header row into a :class:`Dataset`.

    ``raw`` may be bytes, text or a binary/text file object. Keyword arguments
    override fields of ``config``. Errors name the 1-based file row (the
    header is row 1).
    """
    if config is None:
        config = CsvConfig(**kwargs)
    elif kwargs:
        config = CsvConfig(**{**config.__dict__, **kwargs})
    if hasattr(raw, "read"):
        raw = raw.read()
    if isinstance(raw, (bytes, bytearray)):
        try:
            raw = bytes(raw).decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not valid UTF-8: {exc}") from None
    scale = parse_scale(config.scale)
    if not raw.strip():
        raise ParseError("empty file")
    rows = list(csv.reader(io.StringIO(raw)))
    header = [h.strip() for h in rows[0]]
    wanted = [config.value_column, config.group_column]
    if config.stratum_column:
        wanted.append(config.stratum_column)
    for col in wanted:
        if col not in header:
            raise ParseError(f"missing required column {col!r}, row 1")
    vi = header.index(config.value_column)
    gi = header.index(config.group_column)
    si = header.index(config.stratum_column) if config.stratum_column else None

    records = []
    for rowno, row in enumerate(rows[1:], start=2):
        if not any(c.strip() for c in row):
            if config.skip_blank_rows:
                continue
            raise ParseError(f"blank row, row {rowno}")
        cells = []
        for idx, col in zip((vi, gi, si), wanted):
            if idx is None:
                continue
            if idx >= len(row) or not row[idx].strip():
                raise ParseError(f"missing value in column {col!r}, row {rowno}")
            cells.append(row[idx].strip())
        text = cells[0]
        try:
            key = scale.parse(text)
        except ScaleError as exc:
            if isinstance(scale, NumericScale) and "precision" in str(exc):
                raise ScaleError(f"decimal precision exceeded, row {rowno}: {text!r}") from None
            raise type(exc)(f"{exc}, row {rowno}") from None
        except ParseError as exc:
            raise ParseError(f"{exc}, row {rowno}") from None
        records.append(Record(OrderedValue(key, scale), cells[1], cells[2] if si is not None else None))
    if not records:
        raise ParseError("empty file: no data rows")
    return Dataset(tuple(records), scale, config)


def parse_distribution_spec(raw) -> list[DiscreteDistribution]:
    """Read a JSON distribution document.

    Accepts ``{"scale": ..., "distributions": [{"label", "support", "probs"}]}``
    or a bare single entry ``{"support": [...], "probs": [...]}``.
    Probabilities are read as exact decimals.
    """
    if hasattr(raw, "read"):
        raw = raw.read()
    if isinstance(raw, (bytes, bytearray)):
        raw = bytes(raw).decode("utf-8-sig")
    try:
        doc = json.loads(raw, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("distribution document must be a JSON object")
    entries = doc.get("distributions")
    if entries is None:
        if "support" not in doc:
            raise ParseError("document needs a 'distributions' list")
        entries = [doc]
    if not isinstance(entries, list) or not entries:
        raise ParseError("'distributions' must be a non-empty list")
    scale = parse_scale(doc["scale"]) if "scale" in doc else None
    if scale is None:
        supports = [v for e in entries for v in e.get("support", [])]
        if supports and all(isinstance(v, str) for v in supports) and not _all_numeric(supports):
            raise ParseError("ordinal supports need an explicit 'scale'")
        scale = infer_numeric_scale(supports)
    out = []
    for i, e in enumerate(entries):
        if not isinstance(e, dict) or "support" not in e or "probs" not in e:
            raise ParseError(f"distribution {i} needs 'support' and 'probs'")
        label = str(e.get("label", f"F{i + 1}"))
        try:
            out.append(DiscreteDistribution.of(e["support"], e["probs"], scale, label))
        except DataError as exc:
            raise type(exc)(f"distribution {label!r}: {exc}") from None
    return out


def _all_numeric(values) -> bool:
    try:
        for v in values:
            written_decimals(v)
    except ParseError:
        return False
    return True
