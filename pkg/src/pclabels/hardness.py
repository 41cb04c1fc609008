"""Vertex-cover reduction to the bounded-label decision problem.

Builds the dataset, pattern set and size bound from a graph and cover budget
``k``, plus brute-force oracles for both sides of the equivalence.

Attributes are ordered ``A1..An`` (one per node) followed by ``AE``. Node
attributes take values ``x1``/``x2``; ``AE`` takes ``x1..x|E|``, one per edge.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dataset import MISSING, AttributeSchema, Dataset, FormatError, Pattern, ValidationError

BRUTE_FORCE_MAX_NODES = 20


@dataclass(frozen=True)
class Graph:
    n_nodes: int
    edges: tuple[tuple[int, int], ...]  # 0-based, each (i, j) with i < j

    def __post_init__(self):
        if self.n_nodes < 2:
            raise ValidationError("graph needs at least two nodes")
        if not self.edges:
            raise ValidationError("graph needs at least one edge")
        norm = []
        for i, j in self.edges:
            if i == j:
                raise ValidationError(f"self loop on node {i + 1}")
            if not (0 <= i < self.n_nodes and 0 <= j < self.n_nodes):
                raise ValidationError(f"edge ({i + 1},{j + 1}) out of range")
            norm.append((min(i, j), max(i, j)))
        if len(set(norm)) != len(norm):
            raise ValidationError("duplicate edge")
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def is_connected(self) -> bool:
        adj = {v: set() for v in range(self.n_nodes)}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        seen, stack = {0}, [0]
        while stack:
            for w in adj[stack.pop()] - seen:
                seen.add(w)
                stack.append(w)
        return len(seen) == self.n_nodes


def parse_edge_list(text: str, n_nodes: int | None = None) -> Graph:
    """Parse ``u v`` lines with 1-based node ids; ``#`` starts a comment."""
    edges = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError(f"line {lineno}: node ids must be integers") from None
        if u < 1 or v < 1:
            raise FormatError(f"line {lineno}: node ids are 1-based")
        edges.append((u - 1, v - 1))
    if not edges:
        raise FormatError("edge list is empty")
    n = n_nodes or max(max(e) for e in edges) + 1
    return Graph(n, tuple(edges))


@dataclass(frozen=True)
class ReductionInstance:
    graph: Graph
    k: int
    dataset: Dataset
    patterns: tuple[Pattern, ...]
    size_bound: int
    error_bound: int = 0

    @property
    def edge_attr(self) -> int:
        return self.graph.n_nodes


def size_bound(n_edges: int, k: int) -> int:
    return 2 * n_edges + 4 * sum(range(1, k))


def reduce_vertex_cover(g: Graph, k: int) -> ReductionInstance:
    if not 2 <= k <= g.n_nodes - 1:
        raise ValidationError(f"k must lie in [2, {g.n_nodes - 1}]")
    n, m = g.n_nodes, g.n_edges
    ae = n
    rows, weights = [], []

    def row(assign):
        r = [MISSING] * (n + 1)
        for a, v in assign.items():
            r[a] = v
        return r

    for r_idx, (i, j) in enumerate(g.edges):
        for p, q in itertools.product((0, 1), repeat=2):
            rows.append(row({ae: r_idx, i: p, j: q}))
            weights.append(m)
    edge_set = set(g.edges)
    for i, j in itertools.combinations(range(n), 2):
        if (i, j) in edge_set:
            for p in (0, 1):
                rows.append(row({i: p, j: p}))
                weights.append(2 * m * m)
        else:
            for p, q in itertools.product((0, 1), repeat=2):
                rows.append(row({i: p, j: q}))
                weights.append(m)

    schema = [AttributeSchema(f"A{i + 1}", i, ("x1", "x2")) for i in range(n)]
    schema.append(AttributeSchema("AE", ae, tuple(f"x{r + 1}" for r in range(m))))
    d = Dataset(schema, np.array(rows, dtype=np.int64), np.array(weights, dtype=np.int64))
    patterns = tuple(Pattern.of({ae: r_idx, i: 0, j: 0}) for r_idx, (i, j) in enumerate(g.edges))
    return ReductionInstance(g, k, d, patterns, size_bound(m, k))


def expected_dataset_size(g: Graph) -> int:
    m, n = g.n_edges, g.n_nodes
    return 4 * m**2 + 4 * m**3 + 4 * m * (n * (n - 1) // 2 - m)


def brute_force_vertex_cover(g: Graph, k: int) -> bool:
    if g.n_nodes > BRUTE_FORCE_MAX_NODES:
        raise ValidationError(f"brute force limited to {BRUTE_FORCE_MAX_NODES} nodes")
    for size in range(0, min(k, g.n_nodes) + 1):
        for cover in itertools.combinations(range(g.n_nodes), size):
            c = set(cover)
            if all(i in c or j in c for i, j in g.edges):
                return True
    return False


def reduction_label_size_formula(g: Graph, s) -> int:
    """Closed-form label size for a subset holding ``AE`` and some node attributes.

    ``s`` holds attribute indices of the reduction dataset (``AE`` is index
    ``g.n_nodes``); the node count ``k`` is ``|s| - 1``.
    """
    s = set(s)
    if g.n_nodes not in s:
        raise ValidationError("subset must contain the edge attribute AE")
    nodes = s - {g.n_nodes}
    k = len(nodes)
    touched = sum(1 for i, j in g.edges if i in nodes or j in nodes)
    return 2 * touched + 4 * sum(range(1, k))


def _canonical_edges(n_nodes: int, edges) -> tuple:
    return min(
        tuple(sorted(tuple(sorted((perm[i], perm[j]))) for i, j in edges))
        for perm in itertools.permutations(range(n_nodes))
    )


def connected_graphs(n_nodes: int, up_to_isomorphism: bool = True):
    """Every connected graph on ``n_nodes`` nodes (one per isomorphism class by default)."""
    pairs = list(itertools.combinations(range(n_nodes), 2))
    seen = set()
    for mask in range(1, 1 << len(pairs)):
        edges = tuple(p for b, p in enumerate(pairs) if mask >> b & 1)
        if len(edges) < n_nodes - 1:
            continue
        g = Graph(n_nodes, edges)
        if not g.is_connected():
            continue
        if up_to_isomorphism:
            key = _canonical_edges(n_nodes, edges)
            if key in seen:
                continue
            seen.add(key)
        yield g
