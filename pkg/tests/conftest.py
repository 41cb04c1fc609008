from importlib import resources

import numpy as np
import pytest
from hypothesis import strategies as st

from pclabels.dataset import MISSING, load_csv
from pclabels.synthetic import _from_codes

FRAGMENT_PATH = str(resources.files("pclabels") / "data" / "compas_fragment.csv")

G, A, R, M = 0, 1, 2, 3


@pytest.fixture(scope="session")
def fragment():
    return load_csv(FRAGMENT_PATH)


@st.composite
def datasets(draw, max_attrs=6, max_values=3, max_rows=40, max_weight=3, missing=False, min_attrs=1):
    n_attrs = draw(st.integers(min_attrs, max_attrs))
    sizes = draw(st.lists(st.integers(1, max_values), min_size=n_attrs, max_size=n_attrs))
    n_rows = draw(st.integers(1, max_rows))
    cells = st.tuples(*[st.integers(0, s - 1) for s in sizes])
    rows = draw(st.lists(cells, min_size=n_rows, max_size=n_rows))
    codes = np.array(rows, dtype=np.int64).reshape(n_rows, n_attrs)
    if missing:
        mask = draw(st.lists(st.booleans(), min_size=codes.size, max_size=codes.size))
        mask = np.array(mask).reshape(codes.shape)
        mask[0] = False
        codes[mask] = MISSING
    weights = draw(st.lists(st.integers(1, max_weight), min_size=n_rows, max_size=n_rows))
    return _from_codes(codes, weights)


@st.composite
def dataset_and_pattern(draw, **kw):
    """A dataset plus a pattern whose values occur in the data."""
    d = draw(datasets(**kw))
    attrs = draw(st.lists(st.integers(0, d.n_attrs - 1), unique=True, max_size=d.n_attrs))
    bindings = {a: draw(st.integers(0, len(d.schema[a].domain) - 1)) for a in attrs}
    return d, bindings


# one line per acceptance criterion, printed after the run
ACCEPTANCE_RESULTS: dict[str, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS, key=lambda k: int(k.split()[0])):
        terminalreporter.write_line(ACCEPTANCE_RESULTS[key])
