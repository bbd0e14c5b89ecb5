#!/usr/bin/env python3
"""Default vs no-operation with naive Bayes on a subsample of the Yemeksepeti CSV.

Usage: scripts/kaggle_ablation.py path/to/comments.csv [--n 50000] [--seed 1]

The input must already be in the `text,label` dialect (label 0/1). A seeded
subsample is written to a work directory, `yorum evaluate` runs both variants,
and the accuracy gap is printed. No threshold is asserted.
"""

import argparse
import csv
import random
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

CONFIG = """seed = {seed}
variants = ["default", "no-operation"]
models = ["naive-bayes"]
corpus = "sample.csv"
cache_dir = "cache"
"""


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", type=Path)
    parser.add_argument("--n", type=int, default=50000)
    parser.add_argument("--seed", type=int, default=1)
    parser.add_argument("--work", type=Path, help="keep outputs here instead of a temp dir")
    args = parser.parse_args()

    with args.csv.open(encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader)
        if header != ["text", "label"]:
            sys.exit(f"expected header text,label, found {','.join(header)}")
        rows = list(reader)
    random.Random(args.seed).shuffle(rows)
    rows = rows[: args.n]

    work = args.work or Path(tempfile.mkdtemp(prefix="yorum-kaggle-"))
    work.mkdir(parents=True, exist_ok=True)
    with (work / "sample.csv").open("w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["text", "label"])
        writer.writerows(rows)
    (work / "run.toml").write_text(CONFIG.format(seed=args.seed), encoding="utf-8")

    cmd = ["cargo", "run", "--release", "-q", "-p", "yorum-cli", "--",
           "-v", "evaluate", "--config", str(work / "run.toml"), "--runs", str(work / "runs")]
    subprocess.run(cmd, cwd=ROOT, check=True)

    acc = {}
    with (work / "runs" / "results.csv").open(encoding="utf-8", newline="") as f:
        for row in csv.DictReader(f):
            acc[row["variant"]] = float(row["accuracy"])
    gap = acc["default"] - acc["no-operation"]
    print(f"{len(rows)} docs: default {acc['default']:.4f}, no-operation {acc['no-operation']:.4f}, gap {gap * 100:+.2f} pp")
    print(f"outputs in {work}")


if __name__ == "__main__":
    main()
