"""
Semi-supervised digit classification on the bundled 2000-digit subset.

One graph is built for all runs. For five seeded draws of 100 labeled
digits, each method classifies the remaining 1900 and we report the mean
accuracy.

Run with ``python demos/mnist_subset.py``.
"""
import numpy as np

from wecure import GraphConfig, LabeledDataset, SolverParams, build_weight_graph, classify
from wecure import datasets, ssl

X, y = datasets.load_mnist2000()
G = build_weight_graph(X, GraphConfig(k_sigma=ssl.K_SIGMA["mnist"], k_trunc=50))

splits = [ssl.sample_training_set(y, 100, np.random.default_rng(seed)) for seed in range(5)]
for method in ("ldmm", "wnll", "cure", "wecure"):
    accs = []
    for ids in splits:
        pred = classify(LabeledDataset(X, ids, y[ids]), SolverParams(method, lam=1.0), graph=G)
        accs.append(ssl.accuracy(pred, y, exclude=ids))
    print(f"{method:7s} accuracy {np.mean(accs):.4f} +- {np.std(accs):.4f}")
