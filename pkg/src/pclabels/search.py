"""Choosing the attribute subset of a label under a size bound.

Three strategies share one error evaluator:

* ``top_down_search``: lattice walk with the ``gen`` operator, keeping only
  the most specific within-bound subsets as candidates;
* ``naive_search``: level-by-level enumeration of all subsets;
* ``brute_force_optimal``: all 2^n subsets, the test oracle.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import asdict, dataclass, field
from typing import Sequence

from .dataset import Dataset, Pattern, ValidationError, group_counts
from .label import (
    AttrSubset,
    Label,
    PatternBatch,
    _Evaluator,
    _PCIndex,
    build_label,
    label_size,
)

OBJECTIVES = ("max-abs", "max-q", "mean-q")
EVAL_MODES = ("exact", "sorted")
BRUTE_FORCE_MAX_ATTRS = 20


@dataclass
class SearchConfig:
    bound: int
    patterns: Sequence[Pattern] | None = None  # None: every distinct complete row
    objective: str = "max-abs"
    eval_mode: str = "exact"
    threads: int = 1

    def __post_init__(self):
        if self.bound < 1:
            raise ValidationError("size bound must be >= 1")
        if self.objective not in OBJECTIVES:
            raise ValidationError(f"unknown objective {self.objective!r}")
        if self.eval_mode == "sorted-early-exit":
            self.eval_mode = "sorted"
        if self.eval_mode not in EVAL_MODES:
            raise ValidationError(f"unknown evaluation mode {self.eval_mode!r}")
        if self.eval_mode == "sorted" and self.objective != "max-abs":
            raise ValidationError("sorted early-exit evaluation only supports the max-abs objective")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")


@dataclass
class SearchStats:
    algorithm: str
    subsets_generated: int = 0
    subsets_size_checked: int = 0
    candidates_final: int = 0
    labels_fully_evaluated: int = 0
    duplicate_generations: int = 0
    candidates: list[list[int]] = field(default_factory=list)
    chosen: list[int] = field(default_factory=list)
    label_size: int = 0
    error: float = 0.0
    fallback: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def gen(s: AttrSubset, n: int) -> list[AttrSubset]:
    """Children of ``s`` that add one attribute past its highest index."""
    return [AttrSubset(s.indices + (j,)) for j in range(s.idx, n)]


def remove_parents(cands: set[AttrSubset], c: AttrSubset) -> None:
    """Drop from ``cands`` every direct parent of ``c`` (one attribute fewer)."""
    for a in c.indices:
        cands.discard(AttrSubset(tuple(i for i in c.indices if i != a)))


class _Scorer:
    """Error of the label over a subset, for a fixed dataset and pattern set."""

    def __init__(self, d: Dataset, cfg: SearchConfig):
        self.d = d
        self.cfg = cfg
        self.batch = PatternBatch.from_dataset(d, cfg.patterns)
        self.fractions = build_label(d, AttrSubset()).fractions
        self.evaluated = 0

    def error(self, s: AttrSubset) -> float:
        keys, counts = group_counts(self.d, s.indices)
        radices = [self.d.domain_sizes[a] for a in s]
        pc = _PCIndex(s.indices, radices, keys, counts)
        ev = _Evaluator(s.indices, pc, self.fractions, self.d.row_count)
        report = ev.run(self.batch, "exact" if self.cfg.eval_mode == "exact" else "sorted", self.cfg.threads)
        self.evaluated += 1
        if self.cfg.objective == "max-abs":
            return report.max_abs_error
        if self.cfg.objective == "max-q":
            return report.max_q_error
        return report.mean_q_error


def _rank(error: float, size: int, s: AttrSubset):
    return (error, size, s.indices)


def top_down_search(d: Dataset, cfg: SearchConfig) -> tuple[Label, SearchStats]:
    n = d.n_attrs
    if n < 2:
        raise ValidationError("top-down search needs at least two attributes")
    stats = SearchStats("topdown")
    seen: set[AttrSubset] = set()

    def generate(parent: AttrSubset) -> list[AttrSubset]:
        children = gen(parent, n)
        stats.subsets_generated += len(children)
        for c in children:
            if c in seen:
                stats.duplicate_generations += 1
            seen.add(c)
        return children

    queue = deque(generate(AttrSubset()))
    cands: set[AttrSubset] = set()
    sizes: dict[AttrSubset, int] = {}
    while queue:
        curr = queue.popleft()
        for c in generate(curr):
            size = label_size(d, c)
            stats.subsets_size_checked += 1
            if size <= cfg.bound:
                queue.append(c)
                remove_parents(cands, c)
                cands.add(c)
                sizes[c] = size

    scorer = _Scorer(d, cfg)
    stats.candidates = [list(c.indices) for c in sorted(cands)]
    stats.candidates_final = len(cands)
    if cands:
        ranked = sorted(_rank(scorer.error(c), sizes[c], c) for c in sorted(cands))
        err, size, best = ranked[0]
        best = AttrSubset(best)
    else:
        best, stats.fallback = AttrSubset(), True
        size, err = label_size(d, best), scorer.error(best)
    stats.labels_fully_evaluated = scorer.evaluated
    stats.chosen, stats.label_size, stats.error = list(best.indices), size, err
    return build_label(d, best), stats


def naive_search(d: Dataset, cfg: SearchConfig) -> tuple[Label, SearchStats]:
    """Enumerate subsets by increasing size, scoring those within the bound.

    Stops after a level in which every subset exceeds the bound. That cut is
    only sound when label size is monotone under inclusion, which requires a
    dataset without missing values; otherwise all levels are enumerated.
    """
    n = d.n_attrs
    stats = SearchStats("naive")
    scorer = _Scorer(d, cfg)
    monotone = not d.has_missing
    best = None
    for k in range(n + 1):
        any_fit = False
        for combo in itertools.combinations(range(n), k):
            s = AttrSubset(combo)
            stats.subsets_generated += 1
            size = label_size(d, s)
            stats.subsets_size_checked += 1
            if size > cfg.bound:
                continue
            any_fit = True
            r = _rank(scorer.error(s), size, s)
            if best is None or r < best:
                best = r
        if monotone and not any_fit:
            break
    stats.labels_fully_evaluated = scorer.evaluated
    if best is None:
        s = AttrSubset()
        best = _rank(scorer.error(s), label_size(d, s), s)
        stats.fallback = True
    err, size, idx = best
    stats.chosen, stats.label_size, stats.error = list(idx), size, err
    return build_label(d, AttrSubset(idx)), stats


def brute_force_optimal(d: Dataset, cfg: SearchConfig) -> tuple[AttrSubset, float]:
    n = d.n_attrs
    if n > BRUTE_FORCE_MAX_ATTRS:
        raise ValidationError(f"brute force limited to {BRUTE_FORCE_MAX_ATTRS} attributes")
    scorer = _Scorer(d, cfg)
    best = None
    for k in range(n + 1):
        for combo in itertools.combinations(range(n), k):
            s = AttrSubset(combo)
            size = label_size(d, s)
            if size > cfg.bound:
                continue
            r = _rank(scorer.error(s), size, s)
            if best is None or r < best:
                best = r
    if best is None:
        # only reachable when even the empty subset (one empty pattern) exceeds the bound
        s = AttrSubset()
        return s, scorer.error(s)
    return AttrSubset(best[2]), best[0]


ALGORITHMS = {"topdown": top_down_search, "naive": naive_search}


def run_search(d: Dataset, cfg: SearchConfig, algorithm: str = "topdown") -> tuple[Label, SearchStats]:
    if algorithm in ALGORITHMS:
        return ALGORITHMS[algorithm](d, cfg)
    if algorithm == "bruteforce":
        s, err = brute_force_optimal(d, cfg)
        stats = SearchStats("bruteforce", subsets_generated=2**d.n_attrs)
        stats.chosen, stats.label_size, stats.error = list(s.indices), label_size(d, s), err
        return build_label(d, s), stats
    raise ValidationError(f"unknown algorithm {algorithm!r}")
