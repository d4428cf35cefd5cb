"""Exit criteria. Each test logs one PASS/FAIL line shown in the terminal summary."""

import math
import random
import time

import numpy as np
import pytest
from sklearn.metrics import ndcg_score

import oracles
from timepop.cli import read_manifest, run
from timepop.decay import DecayParams, decay_weight, delta_t_days
from timepop.evaluation import EvalConfig, evaluate, ndcg_at
from timepop.model import RecommendationContext, build_dataset
from timepop.precursors import precursor_set
from timepop.recommend import mostpop_recommend, timepop_recommend
from timepop.splitter import InfeasibleSplit, apply_split, count_eligible_users, find_best_split
from timepop.synthetic import movielens_like, planted_signal, write_movielens_dat

DAY = 86400


def test_golden_precursors(four_users, record):
    precursor_set(four_users, "u")
    best = math.inf
    for _ in range(20):
        t = time.perf_counter()
        ps = precursor_set(four_users, "u")
        best = min(best, time.perf_counter() - t)
    ok = ps.tau == 1.5 and ps.precursors == {"u2"} and best < 1e-3
    record("golden precursor example", ok, f"tau={ps.tau} P={sorted(ps.precursors)} {best * 1e3:.3f} ms")
    assert ok


def test_precursor_oracle_equivalence(record):
    rng = random.Random(20240101)
    start = time.perf_counter()
    mismatches = 0
    for k in range(200):
        recs = oracles.random_records(rng, n_users=rng.randint(2, 50), n_items=rng.randint(2, 100),
                                      n=rng.randint(1, 2000), str_ids=k % 3 == 0)
        ds = build_dataset(recs)
        prof = oracles.profiles_of(recs)
        for u in ds.user_ids:
            cands, tau, precs = oracles.precursors(prof, u)
            ps = precursor_set(ds, u)
            if dict(ps.candidates) != cands or abs(ps.tau - tau) > 1e-12 or ps.precursors != precs:
                mismatches += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 30
    record("precursor oracle equivalence (200 datasets)", ok, f"mismatches={mismatches} {elapsed:.1f} s")
    assert ok


def test_timepop_scoring_oracle(record):
    rng = random.Random(77)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(100):
        recs = oracles.random_records(rng, n_users=rng.randint(2, 30), n_items=rng.randint(2, 60),
                                      n=rng.randint(1, 600), t_range=rng.choice([100, 500 * DAY]))
        ds = build_dataset(recs)
        t0 = ds.max_time + rng.randint(0, 30 * DAY)
        n = rng.randint(1, 20)
        ctx = RecommendationContext(t0=t0, top_n=n)
        for u in ds.user_ids:
            got = timepop_recommend(ds, u, ctx)
            exp = oracles.timepop(recs, u, t0, 1 / 200, n)
            same = [(e.item, e.source) for e in got] == [(i, s) for i, _, s in exp] and all(
                abs(e.score - s) <= 1e-9 for e, (_, s, _) in zip(got, exp))
            mismatches += not same
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 60
    record("timepop scoring oracle (100 datasets)", ok, f"mismatches={mismatches} {elapsed:.1f} s")
    assert ok


def test_decay_closed_forms(record):
    t0, tl, ti = 100 * DAY, 70 * DAY, 40 * DAY
    cases = [
        delta_t_days(t0, t0, t0) == 0.0,
        delta_t_days(t0, ti, ti) == (t0 - ti) / DAY,
        delta_t_days(t0, t0, ti) == (t0 - ti) / DAY,
        delta_t_days(t0, tl, tl) == (t0 - tl) / DAY,
        delta_t_days(t0, t0, tl) == (t0 - tl) / DAY,
    ]
    w = decay_weight(200.0, DecayParams(1 / 200))
    ok = all(cases) and abs(w - math.exp(-1)) <= 1e-12
    record("decay closed forms", ok, f"cases={cases} w(200d)={w!r}")
    assert ok


def test_splitter_correctness(record):
    rng = random.Random(5)
    bad = feasible = 0
    for _ in range(100):
        recs = oracles.random_records(rng, n_users=rng.randint(5, 40), n_items=rng.randint(40, 120),
                                      n=rng.randint(300, 2000), t_range=rng.choice([40, 1000, 10**6]))
        ds = build_dataset(recs)
        prof = oracles.profiles_of(recs)
        t_ref, c_ref = oracles.best_split(prof, 15, 5)
        try:
            spec = find_best_split(ds)
        except InfeasibleSplit:
            bad += c_ref != 0
            continue
        feasible += 1
        c = count_eligible_users(ds, spec.split_time)
        bad += (c != c_ref) or (spec.split_time != t_ref)
        res = apply_split(ds, spec)
        for u in res.evaluated_users:
            n_tr = sum(x.user == u for x in res.train)
            n_te = sum(x.user == u for x in res.test)
            bad += n_tr < 15 or n_te < 5
    ok = bad == 0 and feasible >= 50
    record("splitter correctness (100 datasets)", ok, f"violations={bad} feasible={feasible}")
    assert ok


def _sklearn_ndcg(items, relevant, n, universe):
    """sklearn reference over the full item universe; valid when len(items) >= n."""
    y_true = np.array([[1.0 if i in relevant else 0.0 for i in universe]])
    score = {it: len(items) - p for p, it in enumerate(items)}
    y_score = np.array([[score.get(i, -1.0) for i in universe]])
    return ndcg_score(y_true, y_score, k=n)


def test_ndcg_reference(record):
    rng = random.Random(99)
    universe = list(range(60))
    worst = 0.0
    for _ in range(1000):
        items = rng.sample(universe, rng.randint(0, 30))
        rel = set(rng.sample(universe, rng.randint(1, 15)))
        n = rng.randint(1, 15)
        got = ndcg_at(items, rel, n)
        worst = max(worst, abs(got - oracles.ndcg(items, rel, n)))
        if len(items) >= n:
            worst = max(worst, abs(got - _sklearn_ndcg(items, rel, n, universe)))
    perfect = all(ndcg_at(sorted(r)[:k] + [100], set(r), k) == 1.0
                  for r in ([1], [1, 2, 3], list(range(20))) for k in (1, 2, 5, 10))
    ok = worst <= 1e-9 and perfect
    record("nDCG reference equivalence (1000 instances)", ok, f"max|diff|={worst:.2e} perfect={perfect}")
    assert ok


def test_planted_signal(record):
    start = time.perf_counter()
    recs = planted_signal(seed=0)
    users = {x.user for x in recs}
    oracle, oracle_split = oracles.pipeline(recs)
    target = oracle["timepop"] - oracle["mostpop"]

    ds = build_dataset(recs)
    spec = find_best_split(ds)
    res = apply_split(ds, spec)
    ctx = RecommendationContext(t0=spec.split_time)
    tp = evaluate(res.train_dataset, res.test, timepop_recommend, EvalConfig(), ctx)
    mp = evaluate(res.train_dataset, res.test, mostpop_recommend, EvalConfig(), ctx)
    margin = tp.per_n[10] - mp.per_n[10]
    elapsed = time.perf_counter() - start
    ok = (len(users) == 500 and spec.split_time == oracle_split and target > 0
          and abs(margin - target) <= 1e-9 and elapsed < 120)
    record("planted-signal experiment", ok,
           f"timepop={tp.per_n[10]:.6f} mostpop={mp.per_n[10]:.6f} margin={margin:.12f} "
           f"oracle={target:.12f} {elapsed:.1f} s")
    assert ok


@pytest.fixture(scope="module")
def split_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("accept")
    recs = planted_signal(seed=3, n_groups=15)
    (d / "r.dat").write_text("".join(f"{x.user}::{x.item}::{int(x.rating)}::{x.timestamp}\n" for x in recs))
    assert run(["split", "--input", str(d / "r.dat"), "--format", "movielens-dat", "--out", str(d / "s")]) == 0
    return d


def _evaluate(d, test, out, algo="timepop", workers="1"):
    return run(["evaluate", "--train", str(d / "s" / "split.train.tsv"), "--test", str(test),
                "--split-manifest", str(d / "s" / "manifest.txt"), "--algo", algo,
                "--workers", workers, "--out", str(out)])


def test_protocol_hygiene(split_dir, record):
    d = split_dir
    assert _evaluate(d, d / "s" / "split.test.tsv", d / "clean") == 0
    rng = random.Random(0)
    lines = (d / "s" / "split.test.tsv").read_text().splitlines()
    poisoned = []
    for line in lines:
        u, i, r, t = line.split("\t")
        poisoned.append(f"{u}\t{i}\t{rng.choice([1, 2, 3, 4, 5])}\t{int(t) + rng.randint(-10**6, 10**8)}\n")
    (d / "poisoned.tsv").write_text("".join(poisoned))
    assert _evaluate(d, d / "poisoned.tsv", d / "dirty") == 0
    same = (d / "clean" / "recommendations.tsv").read_bytes() == (d / "dirty" / "recommendations.tsv").read_bytes()
    record("protocol hygiene (poisoned test set)", same, f"{len(lines)} test records mutated")
    assert same


def test_determinism(split_dir, record):
    d = split_dir
    outs = []
    for k, workers in enumerate(["1", "1", "2", "3"]):
        assert _evaluate(d, d / "s" / "split.test.tsv", d / f"det{k}", workers=workers) == 0
        outs.append({name: (d / f"det{k}" / name).read_bytes()
                     for name in ("recommendations.tsv", "report.tsv", "per_user.tsv", "curve.csv")})
    ok = all(o == outs[0] for o in outs)
    record("determinism (runs x workers 1,1,2,3)", ok)
    assert ok


@pytest.mark.slow
def test_performance_movielens_scale(tmp_path, record):
    write_movielens_dat(tmp_path / "ml.dat", movielens_like(seed=0))
    start = time.perf_counter()
    assert run(["split", "--input", str(tmp_path / "ml.dat"), "--format", "movielens-dat",
                "--out", str(tmp_path / "s")]) == 0
    assert run(["evaluate", "--train", str(tmp_path / "s" / "split.train.tsv"),
                "--test", str(tmp_path / "s" / "split.test.tsv"),
                "--split-manifest", str(tmp_path / "s" / "manifest.txt"),
                "--algo", "timepop", "--out", str(tmp_path / "e")]) == 0
    elapsed = time.perf_counter() - start
    users = read_manifest(tmp_path / "s" / "manifest.txt")["evaluated_users"]
    ok = elapsed < 300
    record("performance (1e6 interactions, full pipeline)", ok, f"{elapsed:.1f} s, {users} evaluated users")
    assert ok
