"""Command-line interface.

Exit codes: 0 success, 2 I/O or format error, 3 validation error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from pathlib import Path

from .baselines import draw_sample, sample_estimates, sample_size_for_bound
from .dataset import (
    Dataset,
    FormatError,
    Pattern,
    ValidationError,
    bucketize,
    count_pattern,
    load_csv,
    to_csv,
)
from .hardness import brute_force_vertex_cover, parse_edge_list, reduce_vertex_cover
from .label import (
    AttrSubset,
    PatternBatch,
    build_label,
    deserialize,
    error_metrics,
    estimate,
    evaluate,
    serialize,
)
from .search import EVAL_MODES, OBJECTIVES, SearchConfig, brute_force_optimal, run_search

THREADS_ENV = "PCLABELS_THREADS"
STRATEGIES = ("equal-width", "equal-frequency")


# ---------------------------------------------------------------------------
# helpers


def _write(path: str | None, data: bytes) -> None:
    if path in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=".tmp-", suffix=target.suffix)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_bytes(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n").encode()


def _parse_bucketize(spec: str) -> tuple[str, int, str]:
    parts = spec.rsplit(":", 2)
    if len(parts) == 3 and parts[2] in STRATEGIES:
        name, bins, strategy = parts
    else:
        name, _, bins = spec.rpartition(":")
        strategy = "equal-width"
    try:
        n = int(bins)
    except ValueError:
        raise ValidationError(f"bad --bucketize directive {spec!r}; expected ATTR:BINS[:STRATEGY]") from None
    if not name or n < 1:
        raise ValidationError(f"bad --bucketize directive {spec!r}")
    return name, n, strategy


def _load_dataset(path: str, args) -> Dataset:
    directives = [_parse_bucketize(s) for s in args.bucketize or []]
    d = load_csv(path, has_header=not args.no_header, missing_token=args.missing_token, count_col=args.count_col)
    for name, bins, strategy in directives:
        d = bucketize(d, d.attr_index(name), bins, strategy)
    return d


def _pattern_from_names(fingerprint, pairs) -> Pattern:
    names = [n for n, _ in fingerprint]
    out = {}
    for attr, value in pairs:
        if attr not in names:
            raise ValidationError(f"unknown attribute {attr!r}")
        a = names.index(attr)
        domain = fingerprint[a][1]
        if value not in domain:
            raise ValidationError(f"unknown value {value!r} for attribute {attr!r}")
        if a in out:
            raise ValidationError(f"attribute {attr!r} bound twice")
        out[a] = domain.index(value)
    return Pattern.of(out)


def parse_pattern_spec(spec: str, fingerprint) -> Pattern:
    pairs = []
    for item in spec.split(","):
        if not item.strip():
            continue
        attr, sep, value = item.partition("=")
        if not sep:
            raise ValidationError(f"bad pattern item {item!r}; expected attr=value")
        pairs.append((attr.strip(), value.strip()))
    return _pattern_from_names(fingerprint, pairs)


def load_pattern_file(path: str, fingerprint) -> list[Pattern]:
    """JSON list of patterns, each a list of {"attr": name, "value": label}."""
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON: {exc}") from None
    if isinstance(obj, list) and obj and isinstance(obj[0], dict):
        obj = [obj]
    if not isinstance(obj, list):
        raise FormatError(f"{path}: expected a JSON list of patterns")
    out = []
    for entry in obj:
        try:
            pairs = [(str(b["attr"]), str(b["value"])) for b in entry]
        except (TypeError, KeyError):
            raise FormatError(f"{path}: pattern entries need 'attr' and 'value'") from None
        out.append(_pattern_from_names(fingerprint, pairs))
    return out


def pattern_to_json(p: Pattern, fingerprint) -> list[dict]:
    return [{"attr": fingerprint[a][0], "value": fingerprint[a][1][v]} for a, v in p.bindings]


def _threads(args) -> int:
    if args.threads is not None:
        n = args.threads
    else:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            n = int(env)
        except ValueError:
            raise ValidationError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    if n < 1:
        raise ValidationError("thread count must be >= 1")
    return n


def _parse_bounds(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi, step = (int(x) for x in text.split(":"))
            bounds = list(range(lo, hi + 1, step))
        else:
            bounds = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise ValidationError(f"bad bound list {text!r}") from None
    if not bounds or min(bounds) < 1:
        raise ValidationError("bounds must be positive integers")
    return bounds


def _parse_seeds(text: str) -> list[int]:
    try:
        if "," in text:
            return [int(x) for x in text.split(",") if x.strip()]
        n = int(text)
    except ValueError:
        raise ValidationError(f"bad seed spec {text!r}") from None
    if n < 1:
        raise ValidationError("need at least one seed")
    return list(range(n))


# ---------------------------------------------------------------------------
# commands


def cmd_profile(args) -> int:
    threads = _threads(args)
    d = _load_dataset(args.csv, args)
    patterns = load_pattern_file(args.patterns, d.fingerprint()) if args.patterns else None
    cfg = SearchConfig(args.bound, patterns, args.objective, args.eval, threads)
    label, stats = run_search(d, cfg, args.algorithm)
    label_bytes = serialize(label) + b"\n"
    stats_bytes = _json_bytes(stats.to_dict())
    _write(args.out, label_bytes)
    if args.stats:
        _write(args.stats, stats_bytes)
    return 0


def cmd_estimate(args) -> int:
    label = deserialize(Path(args.label).read_bytes())
    fp = label.attributes
    patterns = [parse_pattern_spec(s, fp) for s in args.pattern]
    if args.patterns:
        patterns += load_pattern_file(args.patterns, fp)
    if not patterns:
        raise ValidationError("no pattern given")
    d = None
    if args.dataset:
        d = _load_dataset(args.dataset, args)
        label.check_compatible(d)
    out = io.StringIO()
    for p in patterns:
        est = estimate(label, p)
        if d is None:
            out.write(f"{est!r}\n")
        else:
            true = count_pattern(d, p)
            rec = {"pattern": pattern_to_json(p, fp), "estimate": est, "true_count": true, "abs_error": abs(true - est)}
            out.write(json.dumps(rec, sort_keys=True, ensure_ascii=False) + "\n")
    sys.stdout.write(out.getvalue())
    return 0


def cmd_evaluate(args) -> int:
    threads = _threads(args)
    label = deserialize(Path(args.label).read_bytes())
    d = _load_dataset(args.csv, args)
    label.check_compatible(d)
    patterns = load_pattern_file(args.patterns, d.fingerprint()) if args.patterns else None
    report = evaluate(label, d, patterns, "exact" if args.eval == "exact" else "sorted", threads)
    _write(args.out, _json_bytes(report.__dict__))
    return 0


COMPARE_FIELDS = ("bound", "method", "size", "max_abs_error", "mean_abs_error", "max_q_error", "mean_q_error")


def compare_rows(d: Dataset, bounds, baselines, seeds, algorithm="topdown", objective="max-abs", patterns=None, threads=1):
    """Rows of (bound, method, size, metrics) for labels and the baselines.

    Sampling rows average each metric over the seeds; the sample size for
    bound x is x + |VC| capped at |D|.
    """
    batch = PatternBatch.from_dataset(d, patterns)
    indep_report = evaluate(build_label(d, AttrSubset()), d, batch, "exact", threads)
    rows = []
    for b in bounds:
        label, stats = run_search(d, SearchConfig(b, patterns, objective, "exact", threads), algorithm)
        rep = evaluate(label, d, batch, "exact", threads)
        rows.append({"bound": b, "method": "label", "size": label.size, **_metrics(rep.__dict__)})
        if "sample" in baselines:
            size = min(sample_size_for_bound(d, b), d.row_count)
            acc = {k: 0.0 for k in COMPARE_FIELDS[3:]}
            for seed in seeds:
                se = draw_sample(d, size, seed)
                m, _ = error_metrics(sample_estimates(se, batch.matrix, d.domain_sizes), batch.counts)
                for k in acc:
                    acc[k] += m[k]
            rows.append({"bound": b, "method": "sample", "size": size, **{k: v / len(seeds) for k, v in acc.items()}})
        if "independence" in baselines:
            rows.append({"bound": b, "method": "independence", "size": 0, **_metrics(indep_report.__dict__)})
    return rows


def _metrics(rep: dict) -> dict:
    return {k: rep[k] for k in COMPARE_FIELDS[3:]}


def cmd_compare(args) -> int:
    threads = _threads(args)
    bounds = _parse_bounds(args.bounds)
    seeds = _parse_seeds(args.seeds)
    baselines = [b.strip() for b in args.baselines.split(",") if b.strip()]
    for b in baselines:
        if b not in ("sample", "independence"):
            raise ValidationError(f"unknown baseline {b!r}")
    d = _load_dataset(args.csv, args)
    patterns = load_pattern_file(args.patterns, d.fingerprint()) if args.patterns else None
    rows = compare_rows(d, bounds, baselines, seeds, args.algorithm, args.objective, patterns, threads)
    if args.pretty:
        lines = ["{:>6} {:<13} {:>6} {:>12} {:>12} {:>12} {:>12}".format(*COMPARE_FIELDS)]
        for r in rows:
            lines.append(
                "{bound:>6} {method:<13} {size:>6} {max_abs_error:>12.4f} {mean_abs_error:>12.4f} "
                "{max_q_error:>12.4f} {mean_q_error:>12.4f}".format(**r)
            )
        data = ("\n".join(lines) + "\n").encode()
    elif args.format == "json":
        data = _json_bytes(rows)
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=COMPARE_FIELDS, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
        data = buf.getvalue().encode()
    _write(args.out, data)
    return 0


def cmd_hardness_gen(args) -> int:
    g = parse_edge_list(Path(args.graph).read_text(encoding="utf-8"), args.nodes)
    inst = reduce_vertex_cover(g, args.k)
    fp = inst.dataset.fingerprint()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_bytes = to_csv(inst.dataset, count_col="count").encode()
    pat_bytes = _json_bytes([pattern_to_json(p, fp) for p in inst.patterns])
    meta = _json_bytes({"size_bound": inst.size_bound, "error_bound": inst.error_bound, "k": inst.k,
                        "nodes": g.n_nodes, "edges": [[i + 1, j + 1] for i, j in g.edges]})
    _write(str(out / "dataset.csv"), csv_bytes)
    _write(str(out / "patterns.json"), pat_bytes)
    _write(str(out / "instance.json"), meta)
    return 0


def cmd_hardness_check(args) -> int:
    g = parse_edge_list(Path(args.graph).read_text(encoding="utf-8"), args.nodes)
    inst = reduce_vertex_cover(g, args.k)
    cover = brute_force_vertex_cover(g, args.k)
    s, err = brute_force_optimal(inst.dataset, SearchConfig(inst.size_bound, list(inst.patterns)))
    names = inst.dataset.names
    rec = {"vertex_cover": cover, "zero_error_label": err == 0, "best_subset": [names[i] for i in s],
           "best_error": err, "size_bound": inst.size_bound, "agree": cover == (err == 0)}
    sys.stdout.buffer.write(_json_bytes(rec))
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_loader_flags(p):
    p.add_argument("--count-col", help="integer column holding row multiplicities")
    p.add_argument("--no-header", action="store_true", help="first line is data, attributes named A1..An")
    p.add_argument("--missing-token", default="", help="cell text meaning a missing value (default: empty)")
    p.add_argument("--bucketize", action="append", metavar="ATTR:BINS[:STRATEGY]",
                   help="bucketize a numeric attribute (strategy equal-width|equal-frequency)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pclabels", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="search the best label within a size bound")
    p.add_argument("csv")
    p.add_argument("--bound", type=int, required=True)
    p.add_argument("--algorithm", choices=("topdown", "naive", "bruteforce"), default="topdown")
    p.add_argument("--objective", choices=OBJECTIVES, default="max-abs")
    p.add_argument("--eval", choices=EVAL_MODES, default="exact")
    p.add_argument("--patterns", help="JSON pattern file (default: every distinct complete row)")
    p.add_argument("-o", "--out", default="-", help="label output path (default stdout)")
    p.add_argument("--stats", help="search statistics output path")
    p.add_argument("--threads", type=int)
    _add_loader_flags(p)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("estimate", help="estimate pattern counts from a label")
    p.add_argument("label")
    p.add_argument("pattern", nargs="*", help="attr=value[,attr=value...]")
    p.add_argument("--patterns", help="JSON pattern file")
    p.add_argument("--dataset", help="CSV to report true counts and errors against")
    _add_loader_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("evaluate", help="error report of a label over a pattern set")
    p.add_argument("label")
    p.add_argument("csv")
    p.add_argument("--patterns")
    p.add_argument("--eval", choices=EVAL_MODES, default="exact")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--threads", type=int)
    _add_loader_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("compare", help="labels vs sampling and independence baselines")
    p.add_argument("csv")
    p.add_argument("--bounds", default="10:100:10", help="comma list or LO:HI:STEP")
    p.add_argument("--bound", dest="bounds", help="single bound (alias of --bounds)")
    p.add_argument("--baselines", default="sample,independence")
    p.add_argument("--seeds", default="5", help="seed count N (seeds 0..N-1) or comma list")
    p.add_argument("--algorithm", choices=("topdown", "naive", "bruteforce"), default="topdown")
    p.add_argument("--objective", choices=OBJECTIVES, default="max-abs")
    p.add_argument("--patterns")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--pretty", action="store_true", help="human-readable table")
    p.add_argument("-o", "--out", default="-")
    p.add_argument("--threads", type=int)
    _add_loader_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("hardness", help="vertex-cover reduction instances")
    hsub = p.add_subparsers(dest="hardness_command", required=True)
    h = hsub.add_parser("gen", help="write dataset.csv, patterns.json and instance.json")
    h.add_argument("--graph", required=True, help="edge list, one 'u v' pair per line, 1-based")
    h.add_argument("--k", type=int, required=True)
    h.add_argument("--nodes", type=int, help="node count (default: highest id in the edge list)")
    h.add_argument("--out-dir", default=".")
    h.set_defaults(func=cmd_hardness_gen)
    h = hsub.add_parser("check", help="compare the vertex-cover and zero-error-label oracles")
    h.add_argument("--graph", required=True)
    h.add_argument("--k", type=int, required=True)
    h.add_argument("--nodes", type=int)
    h.set_defaults(func=cmd_hardness_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, FormatError) as exc:
        print(f"pclabels: error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"pclabels: invalid input: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
