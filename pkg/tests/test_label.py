from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pclabels.dataset import FormatError, Pattern, ValidationError, count_pattern, load_csv, restrict
from pclabels.label import (
    EVAL_CHUNK, AttrSubset, Label, PatternBatch, abs_error, build_label, deserialize, estimate,
    evaluate, label_size, q_error, serialize,
)
from pclabels.synthetic import _from_codes, binary_complete

from conftest import A, G, M, R, dataset_and_pattern, datasets
from oracles import count, exact_estimate, expand


def married_pattern(d):
    return d.pattern({"gender": "Female", "age group": "20-39", "marital status": "married"})


def test_attrsubset_idx_is_one_based():
    assert AttrSubset().idx == 0
    assert AttrSubset.of([0]).idx == 1
    assert AttrSubset.of([3, 1]).indices == (1, 3)
    assert AttrSubset.of([1, 3]).idx == 4


def test_attrsubset_rejects_unsorted():
    with pytest.raises(ValidationError):
        AttrSubset((2, 1))


def test_label_age_marital(fragment):
    l = build_label(fragment, [A, M])
    assert l.size == 3 and l.dataset_size == 18
    vc = {
        fragment.schema[a].name: {fragment.schema[a].domain[v]: c for v, c in l.vc[a].items()}
        for a in range(4)
    }
    assert vc == {
        "gender": {"Female": 9, "Male": 9},
        "age group": {"under 20": 6, "20-39": 12},
        "race": {"African-American": 6, "Hispanic": 6, "Caucasian": 6},
        "marital status": {"single": 6, "divorced": 6, "married": 6},
    }


def test_empty_label(fragment):
    l = build_label(fragment, [])
    assert l.pc == {Pattern(()): 18}


def test_full_label_keys_are_distinct_rows(fragment):
    l = build_label(fragment, range(4))
    assert l.size == len({tuple(r) for r in fragment.codes.tolist()})


@pytest.mark.parametrize(
    "s,size",
    [((G, A), 4), ((A, M), 3), ((G, R), 6), ((G, M), 6), ((A, R), 6), ((R, M), 9)],
)
def test_pair_label_sizes(fragment, s, size):
    assert label_size(fragment, s) == size == build_label(fragment, s).size


def test_two_label_estimates(fragment):
    p = married_pattern(fragment)
    l, l2 = build_label(fragment, [A, M]), build_label(fragment, [G, A])
    assert estimate(l, p) == 3.0
    assert estimate(l2, p) == 2.0
    assert count_pattern(fragment, p) == 3
    assert abs_error(l, p, 3) == 0
    assert abs_error(l2, p, 3) == 1


def test_independence_on_binary_cube():
    d = binary_complete(4)
    l = build_label(d, [])
    assert d.row_count == 16
    assert estimate(l, Pattern.of({0: 0, 1: 0, 2: 0})) == 2.0


def test_estimate_rejects_unknown_value(fragment):
    l = build_label(fragment, [A, M])
    with pytest.raises(ValidationError):
        estimate(l, Pattern.of({R: 7}))


def test_absent_full_restriction_is_zero(fragment):
    l = build_label(fragment, [A, M])
    p = fragment.pattern({"age group": "under 20", "marital status": "divorced", "gender": "Male"})
    assert estimate(l, p) == 0.0


@pytest.mark.parametrize("est,true,q", [(3, 3, 1), (2, 3, 1.5), (0, 7, 7), (0, 1, 1)])
def test_q_error_examples(est, true, q):
    assert q_error(est, true) == q


@given(st.floats(0, 1e6), st.integers(1, 10**6))
def test_q_error_at_least_one(est, true):
    assert q_error(est, true) >= 1


# evaluation ---------------------------------------------------------------

def test_evaluate_fragment_against_bruteforce(fragment):
    l = build_label(fragment, [A, M])
    rows = expand(fragment)
    distinct = sorted(set(rows))
    errs = [abs(count(rows, dict(enumerate(r))) - exact_estimate(rows, (A, M), dict(enumerate(r)))) for r in distinct]
    rep = evaluate(l, fragment)
    assert rep.n_patterns == len(distinct)
    assert rep.max_abs_error == pytest.approx(float(max(errs)), abs=1e-12)
    assert rep.mean_abs_error == pytest.approx(float(sum(errs) / len(errs)), abs=1e-12)
    assert rep.max_abs_error >= rep.mean_abs_error
    assert rep.max_q_error >= rep.mean_q_error >= 1


def test_full_label_zero_error(fragment):
    rep = evaluate(build_label(fragment, range(4)), fragment)
    assert rep.max_abs_error == 0 and rep.max_q_error == 1


def test_evaluate_empty_pattern_set(fragment):
    with pytest.raises((ValidationError, ValueError)):
        evaluate(build_label(fragment, [A]), fragment, [])


def test_evaluate_rejects_other_dataset(fragment):
    other = load_csv(b"A\nx\n")
    with pytest.raises(ValidationError):
        evaluate(build_label(fragment, [A]), other)


def test_early_exit_matches_exact_when_all_under_estimated():
    # independent-looking label on perfectly correlated data: every complete
    # row is under-estimated by the empty label
    d = load_csv(b"A,B\n" + b"x,x\n" * 6 + b"y,y\n" * 3 + b"z,z\n")
    l = build_label(d, [])
    exact = evaluate(l, d, mode="exact")
    early = evaluate(l, d, mode="sorted-early-exit")
    batch = PatternBatch.from_dataset(d)
    assert all(estimate(l, p) < c for p, c in zip(batch.patterns, batch.counts))
    assert early.max_abs_error == exact.max_abs_error
    assert early.n_evaluated + early.n_skipped == exact.n_patterns
    assert early.n_skipped > 0
    assert early.mean_abs_error is None


@settings(max_examples=60, deadline=None)
@given(datasets(max_attrs=4, max_rows=30))
def test_early_exit_never_exceeds_exact(d):
    l = build_label(d, [0])
    exact = evaluate(l, d)
    early = evaluate(l, d, mode="sorted-early-exit")
    assert early.max_abs_error <= exact.max_abs_error


def test_threads_identical_across_chunks():
    rng = np.random.default_rng(3)
    codes = rng.integers(0, 6, size=(3 * EVAL_CHUNK, 6))
    d = _from_codes(codes)
    batch = PatternBatch.from_dataset(d)
    assert len(batch) > EVAL_CHUNK
    l = build_label(d, [1, 4])
    base = evaluate(l, d, batch, threads=1)
    for t in (2, 3, 8):
        assert evaluate(l, d, batch, threads=t) == base


# serialization ------------------------------------------------------------

def test_round_trip_structural(fragment):
    l = build_label(fragment, [A, M])
    back = deserialize(serialize(l))
    assert back.subset == l.subset and back.pc == l.pc and back.vc == l.vc
    assert back.dataset_size == l.dataset_size and back.attributes == l.attributes
    assert serialize(back) == serialize(l)


def test_serialization_deterministic(fragment):
    assert serialize(build_label(fragment, [G, R])) == serialize(build_label(fragment, [G, R]))


def test_truncated_label(fragment):
    data = serialize(build_label(fragment, [A, M]))
    with pytest.raises(FormatError):
        deserialize(data[: len(data) // 2])


def test_version_mismatch(fragment):
    data = serialize(build_label(fragment, [A])).replace(b'"format_version":1', b'"format_version":99')
    with pytest.raises(FormatError, match="version"):
        deserialize(data)


def test_label_rejects_bad_pc():
    with pytest.raises(ValidationError):
        Label(AttrSubset.of([0]), {Pattern.of({0: 0}): 0}, ({0: 1},), 1, (("A", ("x",)),))


@settings(max_examples=100, deadline=None)
@given(datasets(max_attrs=5, missing=True), st.data())
def test_serialization_round_trip_property(d, data):
    s = data.draw(st.lists(st.integers(0, d.n_attrs - 1), unique=True))
    l = build_label(d, s)
    once = serialize(l)
    assert serialize(deserialize(once)) == once


# estimation properties ----------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(dataset_and_pattern(max_attrs=5), st.data())
def test_estimate_matches_exact_oracle(dp, data):
    d, bindings = dp
    s = tuple(sorted(data.draw(st.lists(st.integers(0, d.n_attrs - 1), unique=True))))
    got = estimate(build_label(d, s), Pattern.of(bindings))
    want = exact_estimate(expand(d), s, bindings)
    assert got == pytest.approx(float(want), rel=1e-12, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(dataset_and_pattern(max_attrs=5, missing=True), st.data())
def test_exact_when_pattern_binds_whole_subset(dp, data):
    d, bindings = dp
    s = sorted(bindings)
    assert estimate(build_label(d, s), Pattern.of(bindings)) == count_pattern(d, Pattern.of(bindings))


@settings(max_examples=200, deadline=None)
@given(dataset_and_pattern(max_attrs=5, missing=True), st.data())
def test_bounded_by_restricted_count(dp, data):
    d, bindings = dp
    s = sorted(data.draw(st.lists(st.integers(0, d.n_attrs - 1), unique=True)))
    p = Pattern.of(bindings)
    r = restrict(p, s)
    est = estimate(build_label(d, s), p)
    ceiling = count_pattern(d, r) if r.bindings else d.row_count
    assert 0 <= est <= ceiling
