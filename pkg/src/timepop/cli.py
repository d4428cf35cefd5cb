"""Command-line pipeline: split, recommend, evaluate, inspect-precursors, ttest, replay.

Every subcommand that writes to an output directory also writes
``manifest.txt``: sorted ``key=value`` lines with all effective parameters and
an ``argv`` line that ``timepop replay`` re-executes.
"""

from __future__ import annotations

import argparse
import logging
import shlex
import sys
from pathlib import Path

from timepop.decay import DECAY_KINDS, DecayParams
from timepop.evaluation import EvalConfig, evaluate, paired_ttest
from timepop.ingestion import FIELDS, ParseConfig, ParseError, parse_id, parse_interactions, write_split
from timepop.model import RecommendationContext, build_dataset, id_key
from timepop.parallel import recommend_all
from timepop.precursors import precursor_set
from timepop.recommend import ALGORITHMS, make_recommender
from timepop.splitter import BOUNDARIES, InfeasibleSplit, SplitSpec, apply_split, find_best_split

_log = logging.getLogger("timepop")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_INFEASIBLE = 4
EXIT_BAD_DATA = 5

MANIFEST = "manifest.txt"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _tau(value: str):
    if value == "auto":
        return "auto"
    try:
        v = float(value)
    except ValueError:
        raise argparse.ArgumentTypeError("tau must be 'auto' or a positive number") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("tau must be positive")
    return v


def _columns(value: str) -> tuple[str, ...]:
    cols = tuple(c.strip() for c in value.split(","))
    if sorted(cols) != sorted(FIELDS):
        raise argparse.ArgumentTypeError(f"columns must be a permutation of {','.join(FIELDS)}")
    return cols


def _delimiter(value: str) -> str:
    value = {"\\t": "\t", "tab": "\t"}.get(value, value)
    if len(value) != 1:
        raise argparse.ArgumentTypeError("delimiter must be one character")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="timepop", description="Time-aware local popularity recommender pipeline.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def parse_flags(sp):
        sp.add_argument("--format", choices=("movielens-dat", "delimited"), default="delimited")
        sp.add_argument("--delimiter", type=_delimiter, default="\t")
        sp.add_argument("--columns", type=_columns, default=FIELDS,
                        help="column order, e.g. user,item,rating,timestamp")
        sp.add_argument("--timestamp-unit", choices=("seconds", "milliseconds"), default="seconds")
        sp.add_argument("--header", action="store_true", help="skip the first line")

    def algo_flags(sp):
        sp.add_argument("--train", required=True, type=Path)
        sp.add_argument("--algo", choices=ALGORITHMS, default="timepop")
        sp.add_argument("--beta", type=float, default=1 / 200, help="decay rate per day")
        sp.add_argument("--decay", choices=DECAY_KINDS, default="exp")
        sp.add_argument("--td", action="store_true", help="time-decay variant for kNN baselines")
        sp.add_argument("--k", type=int, default=50, help="kNN neighborhood size")
        sp.add_argument("--tau", type=_tau, default="auto")
        sp.add_argument("--t0", type=int, help="reference time (default: split time or last train time)")
        sp.add_argument("--split-manifest", type=Path, help="take t0 from a split manifest")
        sp.add_argument("--topn", type=int, default=10)
        sp.add_argument("--workers", type=int, help="worker processes (default $TIMEPOP_WORKERS or 1)")
        sp.add_argument("--out", required=True, type=Path)

    sp = sub.add_parser("split", help="fixed-timestamp train/test split")
    sp.add_argument("--input", required=True, type=Path)
    parse_flags(sp)
    sp.add_argument("--min-train", type=int, default=15)
    sp.add_argument("--min-test", type=int, default=5)
    sp.add_argument("--boundary", choices=BOUNDARIES, default="test",
                    help="side receiving interactions exactly at the split time")
    sp.add_argument("--split-time", type=int, help="use this split time instead of searching")
    sp.add_argument("--name", default="split")
    sp.add_argument("--out", required=True, type=Path)

    sp = sub.add_parser("recommend", help="write top-N lists")
    algo_flags(sp)
    sp.add_argument("--users-from", type=Path, help="TSV whose users receive lists (default: all)")

    sp = sub.add_parser("evaluate", help="nDCG@2..N report")
    algo_flags(sp)
    sp.add_argument("--test", required=True, type=Path)
    sp.add_argument("--threshold", type=float, default=4.0)
    sp.add_argument("--no-skip", action="store_true", help="score users without relevant items as 0")

    sp = sub.add_parser("inspect-precursors", help="dump a user's candidate precursors")
    sp.add_argument("--train", required=True, type=Path)
    sp.add_argument("--user", required=True)
    sp.add_argument("--tau", type=_tau, default="auto")
    sp.add_argument("--out", type=Path, help="output file (default stdout)")

    sp = sub.add_parser("ttest", help="paired t-test over two per-user files")
    sp.add_argument("--a", required=True, type=Path)
    sp.add_argument("--b", required=True, type=Path)
    sp.add_argument("--n", type=int, help="cutoff column (default: largest)")

    sp = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    sp.add_argument("--manifest", required=True, type=Path)
    return p


# -- helpers -----------------------------------------------------------------

def _require(*paths):
    for path in paths:
        if path is not None and not Path(path).is_file():
            raise FileNotFoundError(f"no such file: {path}")


def _write_manifest(out: Path, argv, params: dict):
    params = dict(params, argv=shlex.join(argv))
    lines = [f"{k}={params[k]}" for k in sorted(params)]
    (out / MANIFEST).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path) -> dict:
    out = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip() and "=" in line:
            k, v = line.split("=", 1)
            out[k] = v
    return out


def _context(args, train):
    t0 = args.t0
    if t0 is None and args.split_manifest is not None:
        _require(args.split_manifest)
        t0 = int(read_manifest(args.split_manifest)["split_time"])
    if t0 is None:
        t0 = train.max_time
    return RecommendationContext(t0=t0, top_n=args.topn,
                                 decay=DecayParams(args.beta, args.decay), tau_mode=args.tau)


def _algo_params(args, ctx) -> dict:
    return {
        "algo": args.algo, "beta": repr(args.beta), "decay": args.decay, "knn_time_decay": args.td,
        "k": args.k, "tau_mode": args.tau, "t0": ctx.t0, "topn": args.topn,
    }


def _format_lists(lists: dict) -> str:
    rows = ["user\trank\titem\tscore\tsource\n"]
    for u in sorted(lists, key=id_key):
        rows.extend(f"{u}\t{r}\t{e.item}\t{e.score:.6f}\t{e.source}\n"
                    for r, e in enumerate(lists[u], start=1))
    return "".join(rows)


# -- subcommands -------------------------------------------------------------

def cmd_split(args, argv):
    _require(args.input)
    cfg = ParseConfig(args.format, args.delimiter, args.columns, args.timestamp_unit, args.header)
    data = build_dataset(parse_interactions(args.input, cfg))
    if args.split_time is None:
        spec = find_best_split(data, args.min_train, args.min_test, args.boundary)
    else:
        spec = SplitSpec(args.split_time, args.min_train, args.min_test, args.boundary)
    res = apply_split(data, spec)
    args.out.mkdir(parents=True, exist_ok=True)
    write_split(res.train, res.test, args.out / args.name)
    _write_manifest(args.out, argv, {
        "command": "split", "input": args.input, "format": args.format,
        "timestamp_unit": args.timestamp_unit, "min_train": spec.min_train,
        "min_test": spec.min_test, "boundary": spec.boundary, "split_time": spec.split_time,
        "evaluated_users": len(res.evaluated_users), "train_interactions": len(res.train),
        "test_interactions": len(res.test),
    })
    print(f"split_time={spec.split_time} evaluated_users={len(res.evaluated_users)} "
          f"train={len(res.train)} test={len(res.test)}")


def cmd_recommend(args, argv):
    _require(args.train, args.users_from)
    train = build_dataset(parse_interactions(args.train))
    ctx = _context(args, train)
    if args.users_from is not None:
        wanted = {x.user for x in parse_interactions(args.users_from)}
        users = [u for u in train.user_ids if u in wanted]
    else:
        users = train.user_ids
    rec = make_recommender(args.algo, args.k, args.td)
    lists = recommend_all(train, users, rec, ctx, args.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "recommendations.tsv").write_text(_format_lists(lists), encoding="utf-8")
    _write_manifest(args.out, argv, dict(_algo_params(args, ctx), command="recommend",
                                         train=args.train, users=len(users)))


def cmd_evaluate(args, argv):
    _require(args.train, args.test)
    train = build_dataset(parse_interactions(args.train))
    test = parse_interactions(args.test)
    ctx = _context(args, train)
    config = EvalConfig(args.topn, args.threshold, not args.no_skip)
    rec = make_recommender(args.algo, args.k, args.td)
    report = evaluate(train, test, rec, config, ctx, args.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    (args.out / "recommendations.tsv").write_text(_format_lists(report.lists), encoding="utf-8")
    cut = sorted(report.per_n)
    (args.out / "report.tsv").write_text(
        "N\tmean_ndcg\tevaluated_count\n"
        + "".join(f"{n}\t{report.per_n[n]:.10f}\t{report.evaluated_count}\n" for n in cut),
        encoding="utf-8")
    (args.out / "per_user.tsv").write_text(
        "user\t" + "\t".join(f"ndcg@{n}" for n in cut) + "\n"
        + "".join(f"{u}\t" + "\t".join(f"{v:.10f}" for v in report.per_user[u]) + "\n"
                  for u in sorted(report.per_user, key=id_key)),
        encoding="utf-8")
    (args.out / "curve.csv").write_text(
        "N,ndcg\n" + "".join(f"{n},{report.per_n[n]:.10f}\n" for n in cut), encoding="utf-8")
    _write_manifest(args.out, argv, dict(
        _algo_params(args, ctx), command="evaluate", train=args.train, test=args.test,
        relevance_threshold=args.threshold, skip_users_without_relevant=not args.no_skip,
        evaluated_count=report.evaluated_count))
    for n in cut:
        print(f"nDCG@{n}\t{report.per_n[n]:.6f}")


def cmd_inspect(args, argv):
    _require(args.train)
    train = build_dataset(parse_interactions(args.train))
    ps = precursor_set(train, parse_id(args.user), args.tau)
    text = f"# tau={ps.tau!r}\ncandidate\tcommon_before\tis_precursor\n" + "".join(
        f"{c}\t{n}\t{int(p)}\n" for c, n, p in ps.rows())
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text, encoding="utf-8")


def read_per_user(path, n=None) -> dict:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    header = lines[0].split("\t")
    col = len(header) - 1 if n is None else header.index(f"ndcg@{n}")
    out = {}
    for line in lines[1:]:
        parts = line.split("\t")
        out[parse_id(parts[0])] = float(parts[col])
    return out


def cmd_ttest(args, argv):
    _require(args.a, args.b)
    try:
        a, b = read_per_user(args.a, args.n), read_per_user(args.b, args.n)
    except (ValueError, IndexError) as e:
        raise ParseError(f"bad per-user file: {e}") from None
    t, p = paired_ttest(a, b)
    print(f"t={t:.6f}\tp={p:.6g}\tusers={len(set(a) & set(b))}")


def cmd_replay(args, argv):
    _require(args.manifest)
    recorded = read_manifest(args.manifest).get("argv")
    if not recorded:
        raise ParseError(f"{args.manifest}: no argv entry")
    return run(shlex.split(recorded))


COMMANDS = {
    "split": cmd_split, "recommend": cmd_recommend, "evaluate": cmd_evaluate,
    "inspect-precursors": cmd_inspect, "ttest": cmd_ttest, "replay": cmd_replay,
}


def run(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as e:
        print(f"timepop: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args, argv) or EXIT_OK
    except FileNotFoundError as e:
        print(f"timepop: {e}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except InfeasibleSplit as e:
        print(f"timepop: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ParseError, ValueError, KeyError) as e:
        print(f"timepop: {e}", file=sys.stderr)
        return EXIT_BAD_DATA


def main():
    logging.basicConfig(level=logging.WARNING)
    sys.exit(run())


if __name__ == "__main__":
    main()
