"""Brute-force reference implementations used as test oracles.

Plain dicts and loops only; nothing here touches the package's indexes.
"""

import bisect
import math
import random
from collections import defaultdict

from timepop.model import Interaction, id_key


def dedup(records):
    """Earliest interaction per (user, item); on equal time the higher rating."""
    best = {}
    for x in records:
        k = (x.user, x.item)
        if k not in best or (x.timestamp, -x.rating) < (best[k].timestamp, -best[k].rating):
            best[k] = x
    return list(best.values())


def profiles_of(records):
    """user -> {item: (timestamp, rating)} after dedup."""
    prof = defaultdict(dict)
    for x in dedup(records):
        prof[x.user][x.item] = (x.timestamp, x.rating)
    return dict(prof)


def popularity_of(records):
    pop = defaultdict(int)
    for x in dedup(records):
        pop[x.item] += 1
    return dict(pop)


def candidates(prof, target):
    """All-pairs scan: {v: common_before} for every v preceding target somewhere."""
    out = {}
    pu = prof[target]
    for v, pv in prof.items():
        if v == target:
            continue
        c = 0
        for i, (tu, _) in pu.items():
            if i in pv and pv[i][0] < tu:
                c += 1
        if c:
            out[v] = c
    return out


def precursors(prof, target, tau_mode="auto"):
    cands = candidates(prof, target)
    if not cands:
        return cands, 0.0, set()
    tau = sum(cands.values()) / len(cands) if tau_mode == "auto" else float(tau_mode)
    return cands, tau, {v for v, c in cands.items() if c >= tau}


def _order_and_fill(scores, pop, rated, n):
    ranked = sorted(scores, key=lambda i: (-scores[i], -pop[i], id_key(i)))[:n]
    out = [(i, scores[i], "scored") for i in ranked]
    if len(out) < n:
        taken = set(rated) | set(ranked)
        rest = sorted((i for i in pop if i not in taken), key=lambda i: (-pop[i], id_key(i)))
        out += [(i, 0.0, "backfill") for i in rest[: n - len(out)]]
    return out


def timepop(records, target, t0, beta=1 / 200, n=10, tau_mode="auto"):
    """Enumerate every (precursor, item) pair and sum its decayed contribution."""
    prof = profiles_of(records)
    pop = popularity_of(records)
    _, _, precs = precursors(prof, target, tau_mode)
    rated = prof[target]
    scores = {}
    for v in sorted(precs, key=id_key):
        last = max(t for t, _ in prof[v].values())
        for i, (t, _) in sorted(prof[v].items(), key=lambda kv: (kv[1][0], id_key(kv[0]))):
            if i in rated:
                continue
            dt = abs(t0 - 2 * last + t) / 86400
            scores[i] = scores.get(i, 0.0) + math.exp(-beta * dt)
    return _order_and_fill(scores, pop, rated, n)


def most_popular(records, target, n):
    prof = profiles_of(records)
    pop = popularity_of(records)
    return _order_and_fill({}, pop, prof[target], n)


def knn(records, target, t0, variant, k, decay=False, beta=1 / 200, n=10):
    prof = profiles_of(records)
    pop = popularity_of(records)

    def w(t):
        return math.exp(-beta * (t0 - t) / 86400) if decay else 1.0

    scores = {}
    pu = prof[target]
    if variant == "user":
        sims = {}
        for v, pv in prof.items():
            if v != target:
                s = len(set(pu) & set(pv)) / math.sqrt(len(pu) * len(pv))
                if s > 0:
                    sims[v] = s
        nbrs = sorted(sims, key=lambda v: (-sims[v], id_key(v)))[:k]
        for v in nbrs:
            for i, (t, _) in prof[v].items():
                scores[i] = scores.get(i, 0.0) + sims[v] * w(t)
    else:
        raters = defaultdict(set)
        for u, p in prof.items():
            for i in p:
                raters[i].add(u)
        for i in raters:
            sims = {}
            for j in raters:
                if j != i:
                    s = len(raters[i] & raters[j]) / math.sqrt(len(raters[i]) * len(raters[j]))
                    if s > 0:
                        sims[j] = s
            top = sorted(sims, key=lambda j: (-sims[j], id_key(j)))[:k]
            hits = [j for j in top if j in pu]
            if hits:
                scores[i] = sum(sims[j] * w(pu[j][0]) for j in hits)
    scores = {i: s for i, s in scores.items() if i not in pu}
    return _order_and_fill(scores, pop, pu, n)


def ndcg(items, relevant, n):
    dcg = 0.0
    for p, it in enumerate(items[:n], start=1):
        if it in relevant:
            dcg += 1.0 / math.log2(p + 1)
    idcg = 0.0
    for p in range(1, min(n, len(relevant)) + 1):
        idcg += 1.0 / math.log2(p + 1)
    return dcg / idcg


def eligible(prof, t, min_train, min_test):
    c = 0
    for p in prof.values():
        past = sum(1 for ts, _ in p.values() if ts < t)
        if past >= min_train and len(p) - past >= min_test:
            c += 1
    return c


def best_split(prof, min_train, min_test):
    """Exhaustive scan over distinct timestamps: (time, count), earliest on ties."""
    grid = sorted({ts for p in prof.values() for ts, _ in p.values()})
    per_user = [sorted(ts for ts, _ in p.values()) for p in prof.values()]
    best, best_count = None, -1
    for t in grid:
        c = 0
        for ts in per_user:
            past = bisect.bisect_left(ts, t)
            if past >= min_train and len(ts) - past >= min_test:
                c += 1
        if c > best_count:
            best, best_count = t, c
    return best, best_count


def pipeline(records, min_train=15, min_test=5, threshold=4.0, n=10, beta=1 / 200):
    """Split, recommend (TimePop and MostPopular) and mean nDCG@n, all by brute force."""
    prof = profiles_of(records)
    split_time, _ = best_split(prof, min_train, min_test)
    evaluated = []
    for u, p in prof.items():
        past = sum(1 for ts, _ in p.values() if ts < split_time)
        if past >= min_train and len(p) - past >= min_test:
            evaluated.append(u)
    train = [x for x in dedup(records) if x.timestamp < split_time]
    totals = {"timepop": [], "mostpop": []}
    for u in sorted(evaluated, key=id_key):
        rel = {i for i, (ts, r) in prof[u].items() if ts >= split_time and r >= threshold}
        if not rel:
            continue
        tp = [i for i, _, _ in timepop(train, u, split_time, beta, n)]
        mp = [i for i, _, _ in most_popular(train, u, n)]
        totals["timepop"].append(ndcg(tp, rel, n))
        totals["mostpop"].append(ndcg(mp, rel, n))
    return {k: sum(v) / len(v) for k, v in totals.items()}, split_time


def random_records(rng: random.Random, n_users=None, n_items=None, n=None, t_range=None,
                   str_ids=False):
    """Small random dataset with deliberate timestamp ties and duplicate pairs."""
    n_users = n_users or rng.randint(2, 50)
    n_items = n_items or rng.randint(2, 100)
    n = n or rng.randint(1, 2000)
    t_range = t_range or rng.choice([5, 50, 10**4, 10**8])
    uid = (lambda k: f"u{k}") if str_ids else (lambda k: k)
    return [Interaction(uid(rng.randrange(n_users)), rng.randrange(n_items),
                        float(rng.randint(1, 5)), rng.randrange(t_range))
            for _ in range(n)]
