"""Categorical datasets: loading, bucketizing and exact pattern counting.

Cells are stored as dense integer codes into each attribute's active domain,
with ``MISSING`` (-1) for absent values. Rows may carry integer weights so that
heavily repeated tuples need not be materialized; every count honors them.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence, Union

import numpy as np

MISSING = -1

CATEGORICAL = "categorical"
BUCKETIZED = "bucketized-numeric"


class FormatError(ValueError):
    """Malformed input file or serialized object."""


class ValidationError(ValueError):
    """Input that is well-formed but inconsistent with a schema."""


@dataclass(frozen=True)
class AttributeSchema:
    name: str
    index: int
    domain: tuple[str, ...]
    kind: str = CATEGORICAL

    def __post_init__(self):
        if len(set(self.domain)) != len(self.domain):
            raise ValidationError(f"attribute {self.name!r}: duplicate domain values")
        if not self.domain:
            raise ValidationError(f"attribute {self.name!r}: empty active domain")
        if any(v == "" for v in self.domain):
            raise ValidationError(f"attribute {self.name!r}: empty domain value")

    def code(self, value: str) -> int:
        try:
            return self.domain.index(value)
        except ValueError:
            raise ValidationError(
                f"unknown value {value!r} for attribute {self.name!r}"
            ) from None


@dataclass(frozen=True, order=True)
class Pattern:
    """Sparse assignment attribute index -> value code, sorted by attribute."""

    bindings: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        attrs = [a for a, _ in self.bindings]
        if attrs != sorted(set(attrs)):
            raise ValidationError(f"pattern bindings not strictly increasing: {self.bindings}")

    @classmethod
    def of(cls, mapping: Mapping[int, int] | Iterable[tuple[int, int]]) -> "Pattern":
        items = mapping.items() if isinstance(mapping, Mapping) else mapping
        return cls(tuple(sorted((int(a), int(v)) for a, v in items)))

    @property
    def attrs(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.bindings)

    def as_dict(self) -> dict[int, int]:
        return dict(self.bindings)

    def __len__(self):
        return len(self.bindings)


# per attribute: value code -> weighted count (codes with zero count absent)
ValueCounts = tuple[dict[int, int], ...]


class Dataset:
    """Immutable table of categorical codes with optional row weights."""

    def __init__(self, schema: Sequence[AttributeSchema], codes, weights=None):
        codes = np.asarray(codes, dtype=np.int64)
        if codes.ndim != 2:
            codes = codes.reshape(len(codes), len(schema))
        if codes.shape[1] != len(schema):
            raise ValidationError("row arity does not match schema")
        if weights is None:
            weights = np.ones(codes.shape[0], dtype=np.int64)
        weights = np.asarray(weights, dtype=np.int64)
        if weights.shape != (codes.shape[0],):
            raise ValidationError("weights must have one entry per row")
        if (weights < 1).any():
            raise ValidationError("row weights must be positive integers")
        for i, attr in enumerate(schema):
            if attr.index != i:
                raise ValidationError(f"attribute {attr.name!r} has index {attr.index}, expected {i}")
            col = codes[:, i]
            if ((col < MISSING) | (col >= len(attr.domain))).any():
                raise ValidationError(f"attribute {attr.name!r}: code out of range")
            present = np.unique(col[col != MISSING])
            if len(present) != len(attr.domain):
                raise ValidationError(
                    f"attribute {attr.name!r}: domain value never occurs (active domain violated)"
                )
        codes.setflags(write=False)
        weights.setflags(write=False)
        self.schema: tuple[AttributeSchema, ...] = tuple(schema)
        self.codes = codes
        self.weights = weights

    @property
    def n_attrs(self) -> int:
        return len(self.schema)

    @property
    def row_count(self) -> int:
        """Logical number of tuples (sum of weights)."""
        return int(self.weights.sum())

    @property
    def domain_sizes(self) -> tuple[int, ...]:
        return tuple(len(a.domain) for a in self.schema)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.schema)

    @property
    def has_missing(self) -> bool:
        return bool((self.codes == MISSING).any())

    def attr_index(self, name: str) -> int:
        for a in self.schema:
            if a.name == name:
                return a.index
        raise ValidationError(f"unknown attribute {name!r}")

    def fingerprint(self) -> tuple[tuple[str, tuple[str, ...]], ...]:
        return tuple((a.name, a.domain) for a in self.schema)

    def pattern(self, assignment: Mapping[str, str]) -> Pattern:
        """Build a pattern from attribute names and value labels."""
        out = {}
        for name, value in assignment.items():
            idx = self.attr_index(name)
            out[idx] = self.schema[idx].code(value)
        return Pattern.of(out)

    def validate_pattern(self, p: Pattern) -> None:
        validate_pattern(self.fingerprint(), p)

    def __repr__(self):
        return f"Dataset({len(self.codes)} rows, |D|={self.row_count}, attrs={list(self.names)})"


def validate_pattern(fingerprint, p: Pattern) -> None:
    for a, v in p.bindings:
        if not 0 <= a < len(fingerprint):
            raise ValidationError(f"pattern references unknown attribute index {a}")
        name, domain = fingerprint[a]
        if not 0 <= v < len(domain):
            raise ValidationError(f"pattern references unknown value code {v} for attribute {name!r}")


def from_rows(
    names: Sequence[str],
    rows: Iterable[Sequence[str | None]],
    weights: Sequence[int] | None = None,
    missing_token: str = "",
) -> Dataset:
    """Encode string rows; domains are built in first-occurrence order."""
    domains: list[dict[str, int]] = [{} for _ in names]
    coded = []
    for row in rows:
        if len(row) != len(names):
            raise FormatError(f"row {len(coded) + 1}: expected {len(names)} fields, got {len(row)}")
        out = []
        for dom, cell in zip(domains, row):
            if cell is None or cell == missing_token:
                out.append(MISSING)
            else:
                out.append(dom.setdefault(cell, len(dom)))
        coded.append(out)
    for name, dom in zip(names, domains):
        if not dom:
            raise FormatError(f"attribute {name!r} has no non-missing values")
    schema = [AttributeSchema(n, i, tuple(dom)) for i, (n, dom) in enumerate(zip(names, domains))]
    codes = np.array(coded, dtype=np.int64).reshape(len(coded), len(names))
    return Dataset(schema, codes, weights)


def load_csv(
    source: Union[str, bytes, IO],
    has_header: bool = True,
    missing_token: str = "",
    count_col: str | None = None,
) -> Dataset:
    """Read comma-separated text into a Dataset.

    ``source`` may be a path, raw bytes, or a binary/text stream. ``count_col``
    names an integer column holding the multiplicity of each row; it is
    stripped from the schema.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8-sig")
    elif isinstance(source, str):
        with open(source, "rb") as fh:
            text = fh.read().decode("utf-8-sig")
    else:
        raw = source.read()
        text = raw.decode("utf-8-sig") if isinstance(raw, bytes) else raw
    records = [r for r in csv.reader(io.StringIO(text)) if r]
    if not records:
        raise FormatError("empty input")
    if has_header:
        names, body, first_line = records[0], records[1:], 2
    else:
        names = [f"A{i + 1}" for i in range(len(records[0]))]
        body, first_line = records, 1
    if not body:
        raise FormatError("input has no data rows")
    if len(set(names)) != len(names):
        raise FormatError("duplicate column names in header")
    for n, row in enumerate(body):
        if len(row) != len(names):
            raise FormatError(
                f"row {n + first_line}: expected {len(names)} fields, got {len(row)}"
            )

    weights = None
    if count_col is not None:
        if count_col not in names:
            raise FormatError(f"count column {count_col!r} not found")
        ci = names.index(count_col)
        weights = []
        for n, row in enumerate(body):
            try:
                w = int(row[ci])
            except ValueError:
                raise FormatError(f"row {n + first_line}: bad count {row[ci]!r}") from None
            if w < 1:
                raise FormatError(f"row {n + first_line}: count must be >= 1")
            weights.append(w)
        names = names[:ci] + names[ci + 1:]
        body = [row[:ci] + row[ci + 1:] for row in body]
    if not names:
        raise FormatError("no attributes")
    return from_rows(names, body, weights, missing_token)


def to_csv(d: Dataset, count_col: str | None = None) -> str:
    """Inverse of ``load_csv`` (missing cells written as empty strings)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = list(d.names) + ([count_col] if count_col else [])
    w.writerow(header)
    for row, weight in zip(d.codes, d.weights):
        cells = ["" if c == MISSING else d.schema[i].domain[c] for i, c in enumerate(row)]
        if count_col:
            cells.append(str(int(weight)))
            w.writerow(cells)
        else:
            for _ in range(int(weight)):
                w.writerow(cells)
    return buf.getvalue()


def _fmt(x: float) -> str:
    return f"{x:g}"


def _equal_width(values: np.ndarray, k: int):
    lo, hi = float(values.min()), float(values.max())
    if lo == hi:
        return np.zeros(len(values), dtype=np.int64), [f"[{_fmt(lo)},{_fmt(hi)}]"]
    pos = np.floor((values - lo) / (hi - lo) * k).astype(np.int64)
    bins = np.minimum(pos, k - 1)
    edges = [lo + (hi - lo) * i / k for i in range(k + 1)]
    edges[-1] = hi
    labels = [f"[{_fmt(edges[i])},{_fmt(edges[i + 1])})" for i in range(k)]
    labels[-1] = labels[-1][:-1] + "]"
    return bins, labels


def _equal_frequency(values: np.ndarray, weights: np.ndarray, k: int):
    distinct, inverse = np.unique(values, return_inverse=True)
    mass = np.bincount(inverse, weights=weights).astype(np.int64)
    total = int(mass.sum())
    bucket_of = np.empty(len(distinct), dtype=np.int64)
    b, cum = 0, 0
    for j, m in enumerate(mass):
        bucket_of[j] = b
        cum += int(m)
        # a tie run stays whole; the bucket reaching its quota absorbs the surplus
        if b < k - 1 and cum * k >= (b + 1) * total and j < len(distinct) - 1:
            b += 1
    n_buckets = b + 1
    starts = [float(distinct[np.argmax(bucket_of == i)]) for i in range(n_buckets)]
    labels = [f"[{_fmt(starts[i])},{_fmt(starts[i + 1])})" for i in range(n_buckets - 1)]
    labels.append(f"[{_fmt(starts[-1])},{_fmt(float(distinct[-1]))}]")
    return bucket_of[inverse], labels


def bucketize(d: Dataset, attr: int, num_bins: int, strategy: str = "equal-width") -> Dataset:
    """Replace a numeric attribute by interval buckets.

    Empty buckets are dropped so the active-domain property holds; the
    resulting domain is in ascending interval order.
    """
    if num_bins < 1:
        raise ValidationError("num_bins must be positive")
    if strategy not in ("equal-width", "equal-frequency"):
        raise ValidationError(f"unknown bucketize strategy {strategy!r}")
    schema = d.schema[attr]
    numeric = []
    for label in schema.domain:
        try:
            x = float(label)
        except ValueError:
            raise ValidationError(f"attribute {schema.name!r}: non-numeric value {label!r}") from None
        if not math.isfinite(x):
            raise ValidationError(f"attribute {schema.name!r}: non-finite value {label!r}")
        numeric.append(x)
    numeric = np.array(numeric)
    col = d.codes[:, attr]
    present = col != MISSING
    values = numeric[col[present]]
    k = min(num_bins, len(np.unique(values)))
    if strategy == "equal-width":
        bins, labels = _equal_width(values, k)
    else:
        bins, labels = _equal_frequency(values, d.weights[present], k)
    used = np.unique(bins)
    remap = np.full(len(labels), MISSING, dtype=np.int64)
    remap[used] = np.arange(len(used))
    new_col = np.full(len(col), MISSING, dtype=np.int64)
    new_col[present] = remap[bins]
    codes = d.codes.copy()
    codes[:, attr] = new_col
    new_attr = AttributeSchema(schema.name, attr, tuple(labels[i] for i in used), BUCKETIZED)
    new_schema = list(d.schema)
    new_schema[attr] = new_attr
    return Dataset(new_schema, codes, d.weights)


def count_pattern(d: Dataset, p: Pattern) -> int:
    d.validate_pattern(p)
    mask = np.ones(len(d.codes), dtype=bool)
    for a, v in p.bindings:
        mask &= d.codes[:, a] == v
    return int(d.weights[mask].sum())


def value_counts(d: Dataset) -> ValueCounts:
    out = []
    for i, attr in enumerate(d.schema):
        col = d.codes[:, i]
        present = col != MISSING
        counts = np.bincount(col[present], weights=d.weights[present], minlength=len(attr.domain))
        out.append({c: int(n) for c, n in enumerate(counts.astype(np.int64)) if n > 0})
    return tuple(out)


def group_counts(d: Dataset, attrs: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    """One-pass group-by over ``attrs``.

    Returns ``(keys, counts)``: the distinct complete code tuples in
    lexicographic order and their weighted counts. Rows missing any of the
    attributes are ignored.
    """
    attrs = list(attrs)
    if not attrs:
        n = d.row_count
        return np.zeros((1 if n else 0, 0), dtype=np.int64), np.array([n] if n else [], dtype=np.int64)
    sub = d.codes[:, attrs]
    keep = (sub != MISSING).all(axis=1)
    sub, w = sub[keep], d.weights[keep]
    if len(sub) == 0:
        return np.zeros((0, len(attrs)), dtype=np.int64), np.zeros(0, dtype=np.int64)
    radices = [d.domain_sizes[a] for a in attrs]
    if math.prod(radices) < 2**62:
        flat = encode_keys(sub, radices)
        uniq, inverse = np.unique(flat, return_inverse=True)
        keys = decode_keys(uniq, radices)
    else:
        keys, inverse = np.unique(sub, axis=0, return_inverse=True)
    counts = np.bincount(inverse.ravel(), weights=w, minlength=len(keys)).astype(np.int64)
    return keys, counts


def encode_keys(sub: np.ndarray, radices: Sequence[int]) -> np.ndarray:
    """Mixed-radix encoding preserving lexicographic order of code tuples."""
    flat = np.zeros(len(sub), dtype=np.int64)
    for j, r in enumerate(radices):
        flat = flat * r + sub[:, j]
    return flat


def decode_keys(flat: np.ndarray, radices: Sequence[int]) -> np.ndarray:
    out = np.empty((len(flat), len(radices)), dtype=np.int64)
    rest = flat.copy()
    for j in range(len(radices) - 1, -1, -1):
        out[:, j] = rest % radices[j]
        rest //= radices[j]
    return out


def patterns_over(d: Dataset, s: Iterable[int]) -> dict[Pattern, int]:
    attrs = sorted(s)
    keys, counts = group_counts(d, attrs)
    return {
        Pattern(tuple(zip(attrs, (int(v) for v in key)))): int(c)
        for key, c in zip(keys, counts)
    }


def restrict(p: Pattern, s: Iterable[int]) -> Pattern:
    keep = set(s)
    return Pattern(tuple((a, v) for a, v in p.bindings if a in keep))


def complete_row_patterns(d: Dataset) -> dict[Pattern, int]:
    """Distinct complete rows (patterns over every attribute) with counts."""
    return patterns_over(d, range(d.n_attrs))
