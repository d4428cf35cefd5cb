"""
End-to-end run on MovieLens-1M-sized data
=========================================

Pass the path to MovieLens ``ratings.dat`` to use the real data; otherwise a
synthetic file with one million interactions and the same shape is generated.
The same steps are available from the shell::

    timepop split --input ratings.dat --format movielens-dat --out runs/ml1m
    timepop evaluate --train runs/ml1m/split.train.tsv --test runs/ml1m/split.test.tsv \\
        --split-manifest runs/ml1m/manifest.txt --algo timepop --out runs/ml1m/timepop
"""

# %%
import sys
import tempfile
import time
from pathlib import Path

from timepop import (
    EvalConfig, ParseConfig, RecommendationContext, apply_split, build_dataset, evaluate,
    find_best_split, parse_interactions, timepop_recommend,
)
from timepop.synthetic import movielens_like, write_movielens_dat

if len(sys.argv) > 1:
    path = Path(sys.argv[1])
else:
    path = Path(tempfile.mkdtemp()) / "ratings.dat"
    write_movielens_dat(path, movielens_like(seed=0))

# %%
t = time.perf_counter()
ds = build_dataset(parse_interactions(path, ParseConfig.movielens()))
print(ds, f"parsed in {time.perf_counter() - t:.1f} s")

# %%
spec = find_best_split(ds)
split = apply_split(ds, spec)
print(f"split at {spec.split_time}: {len(split.evaluated_users)} users evaluated, "
      f"{len(split.train)} train / {len(split.test)} test interactions")

# %%
t = time.perf_counter()
report = evaluate(split.train_dataset, split.test, timepop_recommend, EvalConfig(),
                  RecommendationContext(t0=spec.split_time))
print(f"TimePop over {report.evaluated_count} users in {time.perf_counter() - t:.1f} s")
for n, v in report.per_n.items():
    print(f"nDCG@{n} = {v:.4f}")
