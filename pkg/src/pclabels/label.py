"""Pattern-count labels and count estimation from them.

A label over an attribute subset S stores the count of every pattern over S
that occurs in the data (PC) plus the count of every single attribute value
(VC). Any other pattern is estimated by scaling the count of its restriction
to S by the value fractions of its remaining attributes.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .dataset import (
    MISSING,
    Dataset,
    FormatError,
    Pattern,
    ValidationError,
    ValueCounts,
    count_pattern,
    encode_keys,
    group_counts,
    patterns_over,
    validate_pattern,
    value_counts,
)

FORMAT_VERSION = 1

# chunk size is fixed so parallel evaluation reduces in the same order at any thread count
EVAL_CHUNK = 4096


@dataclass(frozen=True, order=True)
class AttrSubset:
    indices: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValidationError(f"subset indices must be strictly increasing: {self.indices}")
        if self.indices and self.indices[0] < 0:
            raise ValidationError("negative attribute index")

    @classmethod
    def of(cls, indices: Iterable[int]) -> "AttrSubset":
        return cls(tuple(sorted(set(indices))))

    @property
    def idx(self) -> int:
        """1-based position of the highest attribute, 0 for the empty set."""
        return self.indices[-1] + 1 if self.indices else 0

    @property
    def max_index(self) -> int:
        return self.idx

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, a):
        return a in self.indices

    def issubset(self, other: "AttrSubset") -> bool:
        return set(self.indices) <= set(other.indices)

    def validate(self, n_attrs: int) -> None:
        if self.indices and self.indices[-1] >= n_attrs:
            raise ValidationError(f"subset {self.indices} out of range for {n_attrs} attributes")

    def __repr__(self):
        return f"AttrSubset({list(self.indices)})"


@dataclass(frozen=True, eq=True)
class Label:
    subset: AttrSubset
    pc: dict[Pattern, int]
    vc: ValueCounts
    dataset_size: int
    attributes: tuple[tuple[str, tuple[str, ...]], ...]

    def __post_init__(self):
        attrs = self.subset.indices
        for p, c in self.pc.items():
            if p.attrs != attrs or c <= 0:
                raise ValidationError(f"bad PC entry {p} -> {c}")
        if len(self.vc) != len(self.attributes):
            raise ValidationError("VC must cover every attribute of the schema")
        self.subset.validate(len(self.attributes))

    __hash__ = None

    @property
    def size(self) -> int:
        return len(self.pc)

    @property
    def name(self) -> str:
        return "{" + ",".join(self.attributes[i][0] for i in self.subset) + "}"

    def check_compatible(self, d: Dataset) -> None:
        if d.fingerprint() != self.attributes:
            raise ValidationError("label schema fingerprint does not match the dataset")

    @cached_property
    def fractions(self) -> tuple[np.ndarray, ...]:
        """Per attribute, value count over the summed value counts of its domain."""
        out = []
        for (_, domain), counts in zip(self.attributes, self.vc):
            denom = sum(counts.values())
            out.append(np.array([counts.get(c, 0) / denom for c in range(len(domain))]))
        return tuple(out)

    @cached_property
    def _pc_arrays(self):
        radices = [len(self.attributes[a][1]) for a in self.subset]
        items = sorted(self.pc.items())
        keys = np.array([[v for _, v in p.bindings] for p, _ in items], dtype=np.int64)
        keys = keys.reshape(len(items), len(radices))
        counts = np.array([c for _, c in items], dtype=np.int64)
        return _PCIndex(self.subset.indices, radices, keys, counts)


class _PCIndex:
    """Sorted lookup table from patterns over S to their counts."""

    def __init__(self, attrs, radices, keys, counts):
        self.attrs = list(attrs)
        self.radices = list(radices)
        self.keys = keys
        self.counts = counts
        self.flat = encode_keys(keys, radices) if self.attrs else None

    def lookup(self, codes: np.ndarray) -> np.ndarray:
        """Counts for full patterns over S given as a (m, |S|) code matrix; 0 if absent."""
        flat = encode_keys(codes, self.radices)
        pos = np.searchsorted(self.flat, flat)
        pos = np.minimum(pos, len(self.flat) - 1) if len(self.flat) else pos
        hit = (self.flat[pos] == flat) if len(self.flat) else np.zeros(len(flat), dtype=bool)
        out = np.zeros(len(flat), dtype=np.int64)
        out[hit] = self.counts[pos[hit]]
        return out

    def marginal(self, partial: dict[int, int]) -> int:
        """Sum of PC counts over entries agreeing with a partial pattern on S."""
        mask = np.ones(len(self.keys), dtype=bool)
        for j, a in enumerate(self.attrs):
            if a in partial:
                mask &= self.keys[:, j] == partial[a]
        return int(self.counts[mask].sum())


def build_label(d: Dataset, s: AttrSubset | Iterable[int]) -> Label:
    s = s if isinstance(s, AttrSubset) else AttrSubset.of(s)
    s.validate(d.n_attrs)
    return Label(s, patterns_over(d, s.indices), value_counts(d), d.row_count, d.fingerprint())


def label_size(d: Dataset, s: AttrSubset | Iterable[int]) -> int:
    """Number of distinct patterns over ``s`` occurring in ``d`` (|PC|)."""
    indices = s.indices if isinstance(s, AttrSubset) else sorted(s)
    keys, _ = group_counts(d, indices)
    return len(keys)


def _restricted_count(l: Label, p: Pattern) -> int:
    s = l.subset.indices
    bound = p.as_dict()
    if not s or not any(a in bound for a in s):
        return l.dataset_size
    if all(a in bound for a in s):
        return l.pc.get(Pattern(tuple((a, bound[a]) for a in s)), 0)
    return l._pc_arrays.marginal(bound)


def estimate(l: Label, p: Pattern) -> float:
    """Estimated count of ``p``: restricted count times outside-attribute fractions."""
    validate_pattern(l.attributes, p)
    est = float(_restricted_count(l, p))
    fr = l.fractions
    for a, v in p.bindings:
        if a not in l.subset:
            est *= float(fr[a][v])
    return est


def abs_error(l: Label, p: Pattern, true_count: int) -> float:
    return abs(true_count - estimate(l, p))


def q_error(est: float, true_count: int) -> float:
    if true_count < 1:
        raise ValueError("q-error needs a positive true count")
    if est == 0:
        est = 1.0
    return max(true_count / est, est / true_count)


# ---------------------------------------------------------------------------
# batched evaluation


class PatternBatch:
    """A pattern set as a dense code matrix, sorted by true count descending.

    Unbound cells hold ``MISSING``. Ties in count are broken by the pattern's
    lexicographic order, which is also the arg-max witness order.
    """

    def __init__(self, patterns: Sequence[Pattern], counts: Sequence[int], n_attrs: int):
        if len(patterns) == 0:
            raise ValueError("empty pattern set")
        order = sorted(range(len(patterns)), key=lambda i: (-counts[i], patterns[i]))
        self.patterns = [patterns[i] for i in order]
        self.counts = np.array([counts[i] for i in order], dtype=np.int64)
        self.matrix = np.full((len(order), n_attrs), MISSING, dtype=np.int64)
        for r, p in enumerate(self.patterns):
            for a, v in p.bindings:
                self.matrix[r, a] = v
        self.bound = self.matrix != MISSING

    def __len__(self):
        return len(self.patterns)

    @classmethod
    def from_dataset(cls, d: Dataset, patterns: Sequence[Pattern] | None = None) -> "PatternBatch":
        """``patterns=None`` means every distinct complete row of ``d``."""
        if patterns is None:
            attrs = list(range(d.n_attrs))
            keys, counts = group_counts(d, attrs)
            pats = [Pattern(tuple(zip(attrs, map(int, k)))) for k in keys]
            return cls(pats, counts.tolist(), d.n_attrs)
        for p in patterns:
            d.validate_pattern(p)
        return cls(list(patterns), [count_pattern(d, p) for p in patterns], d.n_attrs)


def _batch_estimates(
    subset: Sequence[int], pc: _PCIndex, fractions, dataset_size: int, matrix, bound
) -> np.ndarray:
    s = list(subset)
    m = len(matrix)
    if not s:
        base = np.full(m, dataset_size, dtype=np.int64)
    else:
        full = bound[:, s].all(axis=1)
        none = ~bound[:, s].any(axis=1)
        base = np.empty(m, dtype=np.int64)
        if full.any():
            base[full] = pc.lookup(matrix[full][:, s])
        base[none] = dataset_size
        for r in np.flatnonzero(~full & ~none):
            row = matrix[r]
            base[r] = pc.marginal({a: int(row[a]) for a in s if row[a] != MISSING})
    est = base.astype(np.float64)
    in_s = set(s)
    for a in range(matrix.shape[1]):
        if a in in_s:
            continue
        col = bound[:, a]
        if col.any():
            est[col] *= fractions[a][matrix[col, a]]
    return est


@dataclass
class EvaluationReport:
    label: str
    max_abs_error: float
    mean_abs_error: float | None
    max_q_error: float | None
    mean_q_error: float | None
    n_patterns: int
    n_evaluated: int
    n_skipped: int
    mode: str
    witness: list[list[int]] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True, separators=(",", ":"))


def error_metrics(est: np.ndarray, true_counts: np.ndarray) -> tuple[dict[str, float], int]:
    """Max/mean absolute and q-error of estimates against positive true counts.

    Also returns the position of the first maximal absolute error.
    """
    if (true_counts < 1).any():
        raise ValueError("q-error needs every pattern to have a positive true count")
    true = true_counts.astype(np.float64)
    abs_err = np.abs(true - est)
    e = np.where(est == 0, 1.0, est)
    q = np.maximum(true / e, e / true)
    arg = int(np.argmax(abs_err))
    n = len(true)
    return {
        "max_abs_error": float(abs_err[arg]),
        "mean_abs_error": float(np.sum(abs_err)) / n,
        "max_q_error": float(np.max(q)),
        "mean_q_error": float(np.sum(q)) / n,
    }, arg


def _chunk_estimates(l_args, batch: PatternBatch, lo: int, hi: int) -> np.ndarray:
    return _batch_estimates(*l_args, batch.matrix[lo:hi], batch.bound[lo:hi])


class _Evaluator:
    """Shared evaluation core for a label given as (subset, pc index, fractions, |D|)."""

    def __init__(self, subset, pc, fractions, dataset_size, name=""):
        self.args = (tuple(subset), pc, fractions, dataset_size)
        self.name = name

    def estimates(self, batch: PatternBatch, threads: int = 1) -> np.ndarray:
        bounds = [(lo, min(lo + EVAL_CHUNK, len(batch))) for lo in range(0, len(batch), EVAL_CHUNK)]
        if threads > 1 and len(bounds) > 1:
            with ThreadPoolExecutor(threads) as pool:
                parts = list(pool.map(lambda b: _chunk_estimates(self.args, batch, *b), bounds))
        else:
            parts = [_chunk_estimates(self.args, batch, *b) for b in bounds]
        return np.concatenate(parts)

    def exact(self, batch: PatternBatch, threads: int = 1) -> EvaluationReport:
        est = self.estimates(batch, threads)
        metrics, arg = error_metrics(est, batch.counts)
        n = len(batch)
        return EvaluationReport(
            label=self.name,
            **metrics,
            n_patterns=n,
            n_evaluated=n,
            n_skipped=0,
            mode="exact",
            witness=[list(b) for b in batch.patterns[arg].bindings],
        )

    def sorted_early_exit(self, batch: PatternBatch) -> EvaluationReport:
        best, arg, evaluated = -1.0, 0, 0
        for lo in range(0, len(batch), EVAL_CHUNK):
            hi = min(lo + EVAL_CHUNK, len(batch))
            counts = batch.counts[lo:hi]
            if counts[0] < best:
                break
            err = np.abs(counts.astype(np.float64) - _chunk_estimates(self.args, batch, lo, hi))
            # running max over everything before each position
            before = np.maximum.accumulate(np.concatenate(([best], err[:-1])))
            stop = np.flatnonzero(counts < before)
            end = int(stop[0]) if len(stop) else len(err)
            if end:
                j = int(np.argmax(err[:end]))
                if err[j] > best:
                    best, arg = float(err[j]), lo + j
            evaluated = lo + end
            if end < len(err):
                break
        return EvaluationReport(
            label=self.name,
            max_abs_error=best,
            mean_abs_error=None,
            max_q_error=None,
            mean_q_error=None,
            n_patterns=len(batch),
            n_evaluated=evaluated,
            n_skipped=len(batch) - evaluated,
            mode="sorted-early-exit",
            witness=[list(b) for b in batch.patterns[arg].bindings],
        )

    def run(self, batch: PatternBatch, mode: str = "exact", threads: int = 1) -> EvaluationReport:
        if mode == "exact":
            return self.exact(batch, threads)
        if mode in ("sorted", "sorted-early-exit"):
            return self.sorted_early_exit(batch)
        raise ValueError(f"unknown evaluation mode {mode!r}")


def evaluator_for(l: Label) -> _Evaluator:
    return _Evaluator(l.subset.indices, l._pc_arrays, l.fractions, l.dataset_size, l.name)


def evaluate(
    l: Label,
    d: Dataset,
    patterns: Sequence[Pattern] | PatternBatch | None = None,
    mode: str = "exact",
    threads: int = 1,
) -> EvaluationReport:
    """Error metrics of ``l`` over a pattern set (default: distinct complete rows).

    ``sorted-early-exit`` only yields the max absolute error: patterns are
    scanned by descending true count and the scan stops at the first pattern
    whose count is below the running maximum. It is exact for patterns that
    are under-estimated but can miss a larger over-estimate further down.
    """
    l.check_compatible(d)
    batch = patterns if isinstance(patterns, PatternBatch) else PatternBatch.from_dataset(d, patterns)
    return evaluator_for(l).run(batch, mode, threads)


# ---------------------------------------------------------------------------
# serialization


def _canonical(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def serialize(l: Label) -> bytes:
    vc = [[a, v, c] for a, counts in enumerate(l.vc) for v, c in sorted(counts.items())]
    pc = [[[a, v] for a, v in p.bindings] + [c] for p, c in sorted(l.pc.items())]
    return _canonical(
        {
            "format_version": FORMAT_VERSION,
            "dataset_size": l.dataset_size,
            "attributes": [{"name": n, "domain": list(dom)} for n, dom in l.attributes],
            "subset": list(l.subset.indices),
            "vc": vc,
            "pc": pc,
        }
    )


def deserialize(data: bytes) -> Label:
    try:
        obj = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"invalid label file: {exc}") from None
    if not isinstance(obj, dict):
        raise FormatError("label file must hold a JSON object")
    if obj.get("format_version") != FORMAT_VERSION:
        raise FormatError(f"unsupported label format version {obj.get('format_version')!r}")
    try:
        attributes = tuple((str(a["name"]), tuple(str(v) for v in a["domain"])) for a in obj["attributes"])
        subset = AttrSubset(tuple(obj["subset"]))
        vc: list[dict[int, int]] = [{} for _ in attributes]
        for a, v, c in obj["vc"]:
            vc[a][int(v)] = int(c)
        pc = {}
        for entry in obj["pc"]:
            *bindings, c = entry
            pc[Pattern(tuple((int(a), int(v)) for a, v in bindings))] = int(c)
        size = int(obj["dataset_size"])
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"malformed label file: {exc!r}") from None
    return Label(subset, pc, tuple(vc), size, attributes)
