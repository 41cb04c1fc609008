"""Reference estimators: uniform sampling and attribute independence."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import MISSING, Dataset, Pattern, ValidationError, encode_keys, value_counts
from .label import Label


@dataclass(frozen=True)
class SampleEstimator:
    codes: np.ndarray  # distinct physical rows present in the sample
    weights: np.ndarray  # how many sampled tuples each of those rows accounts for
    sample_size: int
    dataset_size: int
    seed: int


def sample_size_for_bound(d: Dataset, bound: int) -> int:
    """Sample size matched to a label bound: the bound plus the number of VC entries."""
    return bound + sum(len(c) for c in value_counts(d))


def draw_sample(d: Dataset, size: int, seed: int) -> SampleEstimator:
    """Uniform sample of ``size`` tuples without replacement (weights expanded logically)."""
    total = d.row_count
    if not 1 <= size <= total:
        raise ValidationError(f"sample size {size} outside [1, {total}]")
    rng = np.random.default_rng(seed)
    picked = rng.choice(total, size=size, replace=False)
    rows = np.searchsorted(np.cumsum(d.weights), picked, side="right")
    hits = np.bincount(rows, minlength=len(d.codes))
    keep = hits > 0
    return SampleEstimator(d.codes[keep], hits[keep].astype(np.int64), size, total, seed)


def sample_estimate(se: SampleEstimator, p: Pattern) -> float:
    mask = np.ones(len(se.codes), dtype=bool)
    for a, v in p.bindings:
        mask &= se.codes[:, a] == v
    c = int(se.weights[mask].sum())
    return c * se.dataset_size / se.sample_size


def sample_estimates(se: SampleEstimator, matrix: np.ndarray, radices) -> np.ndarray:
    """``sample_estimate`` for every row of a code matrix (``MISSING`` = unbound).

    Patterns are grouped by their attribute set and matched against the
    sample with one sorted lookup per group.
    """
    bound = matrix != MISSING
    out = np.empty(len(matrix), dtype=np.float64)
    groups: dict[tuple[int, ...], list[int]] = {}
    for r, row in enumerate(bound):
        groups.setdefault(tuple(np.flatnonzero(row)), []).append(r)
    for attrs, rows in groups.items():
        cols = list(attrs)
        rad = [radices[a] for a in cols]
        sub = se.codes[:, cols]
        keep = (sub != MISSING).all(axis=1)
        keys = encode_keys(sub[keep], rad)
        uniq, inv = np.unique(keys, return_inverse=True)
        counts = np.bincount(inv.ravel(), weights=se.weights[keep], minlength=len(uniq)).astype(np.int64)
        want = encode_keys(matrix[rows][:, cols], rad)
        if len(uniq):
            pos = np.minimum(np.searchsorted(uniq, want), len(uniq) - 1)
            c = np.where(uniq[pos] == want, counts[pos], 0)
        else:
            c = np.zeros(len(rows), dtype=np.int64)
        for r, ci in zip(rows, c):
            out[r] = int(ci) * se.dataset_size / se.sample_size
    return out


def independence_estimate(source: Dataset | Label, p: Pattern) -> float:
    """|D| times the value fraction of every bound attribute."""
    if isinstance(source, Dataset):
        source.validate_pattern(p)
        vc, size = value_counts(source), source.row_count
    else:
        vc, size = source.vc, source.dataset_size
    est = float(size)
    for a, v in p.bindings:
        est *= vc[a].get(v, 0) / sum(vc[a].values())
    return est
