"""
Full-scale MNIST classification (70000 digits), offline.

Usage::

    python scripts/reproduce_mnist.py DATA_DIR [--repeats 10] [--out mnist.csv]

``DATA_DIR`` holds the four standard IDX files (train/t10k images and
labels, optionally gzipped); train and test sets are pooled. For each label
count and method the script draws ``--repeats`` seeded labeled sets,
classifies all points and reports the mean accuracy on the unlabeled ones
next to the published reference. Expect several hours of CPU time; the
graph is built once and shared by all runs.
"""
import argparse
import csv
import logging
import time
from pathlib import Path

import numpy as np

from wecure import io, ssl
from wecure.graph import GraphConfig, build_weight_graph
from wecure.solver import SolverParams

# published accuracies (%) for 50 / 100 / 700 labels out of 70000
REFERENCE = {
    "wnll": {50: 73.60, 100: 87.84, 700: 93.25},
    "cure": {50: 88.40, 100: 92.42, 700: 96.13},
    "wecure": {50: 90.48, 100: 93.49, 700: 96.12},
}
STEMS = ("train-images-idx3-ubyte", "train-labels-idx1-ubyte",
         "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte")


def find(root, stem):
    for name in (stem, stem + ".gz", stem.replace("-idx", ".idx"), stem.replace("-idx", ".idx") + ".gz"):
        if (root / name).exists():
            return root / name
    raise SystemExit(f"missing {stem}[.gz] in {root}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("data_dir", type=Path)
    ap.add_argument("--counts", type=int, nargs="+", default=[50, 100, 700])
    ap.add_argument("--methods", nargs="+", default=["wnll", "cure", "wecure"])
    ap.add_argument("--repeats", type=int, default=10)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--out", default="mnist_full.csv")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    xtr, ytr, xte, yte = (io.load_idx(find(args.data_dir, s)) for s in STEMS)
    X = np.vstack([xtr, xte])
    y = np.concatenate([ytr, yte])
    t0 = time.perf_counter()
    G = build_weight_graph(X, GraphConfig(ssl.K_SIGMA["mnist"], 50))
    logging.info("graph on %d points built in %.0f s", len(y), time.perf_counter() - t0)

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["method", "labels", "seed", "accuracy"])
        for count in args.counts:
            for method in args.methods:
                accs = []
                for seed in range(args.repeats):
                    ids = ssl.sample_training_set(y, count, np.random.default_rng(seed))
                    ds = ssl.LabeledDataset(X, ids, y[ids])
                    pred = ssl.classify(ds, SolverParams(method, lam=args.lam), graph=G)
                    accs.append(ssl.accuracy(pred, y, exclude=ids))
                    w.writerow([method, count, seed, accs[-1]])
                    fh.flush()
                ref = REFERENCE.get(method, {}).get(count)
                print(f"{method:7s} {count:4d} labels: {100 * np.mean(accs):6.2f} "
                      f"+- {100 * np.std(accs):.2f}  (reference {ref})", flush=True)


if __name__ == "__main__":
    main()
