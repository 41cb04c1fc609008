"""Seeded synthetic categorical datasets for tests and experiments."""
from __future__ import annotations

import itertools

import numpy as np

from .dataset import MISSING, AttributeSchema, Dataset


def _from_codes(codes: np.ndarray, weights=None, kinds=None) -> Dataset:
    """Wrap raw codes, compacting every column to its active domain."""
    codes = np.array(codes, dtype=np.int64)
    schema = []
    for j in range(codes.shape[1]):
        col = codes[:, j]
        present = np.unique(col[col != MISSING])
        remap = {int(v): i for i, v in enumerate(present)}
        codes[:, j] = [remap[int(v)] if v != MISSING else MISSING for v in col]
        schema.append(AttributeSchema(f"A{j + 1}", j, tuple(f"v{int(v)}" for v in present)))
    return Dataset(schema, codes, weights)


def binary_complete(n_attrs: int) -> Dataset:
    """Every 0/1 combination of ``n_attrs`` binary attributes exactly once."""
    codes = np.array(list(itertools.product((0, 1), repeat=n_attrs)), dtype=np.int64)
    schema = [AttributeSchema(f"A{j + 1}", j, ("0", "1")) for j in range(n_attrs)]
    return Dataset(schema, codes)


def random_dataset(
    rng: np.random.Generator,
    n_attrs: int,
    n_rows: int,
    max_values: int = 3,
    max_weight: int = 1,
    missing_rate: float = 0.0,
) -> Dataset:
    """Uniformly random codes, optionally with missing cells.

    The first row is always complete, so the dataset has at least one
    distinct complete row.
    """
    sizes = rng.integers(1, max_values + 1, size=n_attrs)
    codes = np.stack([rng.integers(0, s, size=n_rows) for s in sizes], axis=1)
    if missing_rate > 0:
        holes = rng.random(codes.shape) < missing_rate
        holes[0] = False
        codes[holes] = MISSING
    weights = rng.integers(1, max_weight + 1, size=n_rows)
    return _from_codes(codes, weights)


# (attributes in group, values per attribute, noise rate)
DEFAULT_GROUPS = ((5, 2, 0.002), (5, 3, 0.01), (5, 4, 0.05))


def correlated_dataset(seed: int, n_rows: int = 2000, groups=DEFAULT_GROUPS) -> Dataset:
    """Attributes driven by shared latent factors.

    Each group follows one latent categorical variable; every attribute of
    the group copies it except with probability ``noise``, where a uniform
    value is drawn instead. Attributes of a group are therefore strongly
    pairwise correlated, and the default yields 15 attributes.
    """
    rng = np.random.default_rng(seed)
    cols = []
    for size, n_values, noise in groups:
        z = rng.integers(0, n_values, size=n_rows)
        for _ in range(size):
            flip = rng.random(n_rows) < noise
            cols.append(np.where(flip, rng.integers(0, n_values, size=n_rows), z))
    return _from_codes(np.stack(cols, axis=1))
