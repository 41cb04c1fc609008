import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pclabels.dataset import ValidationError
from pclabels.label import AttrSubset, build_label, evaluate, label_size
from pclabels.search import (
    SearchConfig, brute_force_optimal, gen, naive_search, remove_parents, run_search, top_down_search,
)
from pclabels.synthetic import binary_complete

from conftest import A, G, M, R, datasets
from oracles import brute_optimum_max_abs, expand


def test_gen_children():
    assert gen(AttrSubset(), 3) == [AttrSubset((0,)), AttrSubset((1,)), AttrSubset((2,))]
    assert gen(AttrSubset((0, 1)), 4) == [AttrSubset((0, 1, 2)), AttrSubset((0, 1, 3))]
    assert gen(AttrSubset((1, 3)), 4) == []


def test_gen_covers_lattice_once():
    n = 6
    seen, frontier = [], [AttrSubset()]
    while frontier:
        s = frontier.pop()
        for c in gen(s, n):
            seen.append(c)
            frontier.append(c)
    assert len(seen) == len(set(seen)) == 2**n - 1


def test_remove_parents_direct_only():
    cands = {AttrSubset((0,)), AttrSubset((0, 1)), AttrSubset((1, 2)), AttrSubset((0, 2))}
    remove_parents(cands, AttrSubset((0, 1, 2)))
    # the singleton is a grandparent and stays
    assert cands == {AttrSubset((0,))}


def test_config_validation():
    with pytest.raises(ValidationError):
        SearchConfig(0)
    with pytest.raises(ValidationError):
        SearchConfig(5, objective="median")
    with pytest.raises(ValidationError):
        SearchConfig(5, eval_mode="sorted", objective="max-q")


def test_topdown_fragment(fragment):
    label, stats = top_down_search(fragment, SearchConfig(5))
    assert label.subset == AttrSubset((A, M))
    assert stats.candidates == [[G, A], [A, M]]
    assert stats.error == 0
    assert stats.duplicate_generations == 0


def test_naive_and_bruteforce_fragment(fragment):
    cfg = SearchConfig(5)
    label, stats = naive_search(fragment, cfg)
    s, err = brute_force_optimal(fragment, cfg)
    assert stats.error == err == 0
    assert label.subset == s == AttrSubset((A, M))


def test_unbounded_gives_full_set(fragment):
    label, stats = top_down_search(fragment, SearchConfig(10**6))
    assert label.subset == AttrSubset(tuple(range(4)))
    assert stats.error == 0


def test_fallback_to_empty_label(fragment):
    label, stats = top_down_search(fragment, SearchConfig(1))
    assert label.subset == AttrSubset() and stats.fallback
    assert stats.error == evaluate(build_label(fragment, []), fragment).max_abs_error


def test_topdown_needs_two_attributes():
    with pytest.raises(ValidationError):
        top_down_search(binary_complete(1), SearchConfig(3))


@pytest.mark.parametrize("objective", ["max-abs", "max-q", "mean-q"])
def test_run_search_objectives(fragment, objective):
    cfg = SearchConfig(6, objective=objective)
    _, td = run_search(fragment, cfg, "topdown")
    _, nv = run_search(fragment, cfg, "naive")
    _, bf = run_search(fragment, cfg, "bruteforce")
    assert nv.error == bf.error <= td.error


def test_run_search_unknown(fragment):
    with pytest.raises(ValidationError):
        run_search(fragment, SearchConfig(5), "greedy")


@settings(max_examples=80, deadline=None)
@given(datasets(max_attrs=5, min_attrs=2, max_rows=25, missing=True), st.integers(1, 30))
def test_search_invariants(d, bound):
    cfg = SearchConfig(bound)
    label, stats = top_down_search(d, cfg)
    assert stats.duplicate_generations == 0
    cands = [AttrSubset(tuple(c)) for c in stats.candidates]
    for c in cands:
        assert label_size(d, c) <= bound
        for a in c:
            assert AttrSubset(tuple(i for i in c if i != a)) not in cands
    _, nv = naive_search(d, cfg)
    _, err = brute_force_optimal(d, cfg)
    assert nv.error == err <= stats.error
    assert float(brute_optimum_max_abs(expand(d), d.n_attrs, bound, _all_rows(d))) == pytest.approx(err, abs=1e-9)
    if not d.has_missing:
        assert stats.subsets_generated <= nv.subsets_generated


def _all_rows(d):
    return [dict(enumerate(r)) for r in sorted({tuple(x) for x in d.codes.tolist() if -1 not in x})]


@settings(max_examples=80, deadline=None)
@given(datasets(max_attrs=6, max_rows=30), st.data())
def test_label_size_monotone(d, data):
    s2 = data.draw(st.lists(st.integers(0, d.n_attrs - 1), unique=True))
    s1 = data.draw(st.lists(st.sampled_from(s2), unique=True)) if s2 else []
    assert label_size(d, s1) <= label_size(d, s2)
