"""
Command-line entry points.

```
wecure inpaint --image bundled:cameraman128 --sample-rate 0.2 --seed 0 \
    --method wecure --out restored.png --report run.json --csv runs.csv
wecure ssl --data bundled:mnist2000 --labels-per-run 100 --seed 0 --repeats 5 \
    --method wecure --out predictions.csv --report run.json
```

Exit status is 0 on success, 1 for invalid input or arguments and 2 when
the numerics fail (singular system, CG not converging, zero bandwidth).
"""
import argparse
import csv
import json
import logging
import math
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, datasets, io, metrics, ssl
from .errors import (DegenerateBandwidthError, InvalidArgumentError, NonConvergenceError,
                     SingularSystemError, WecureError)
from .graph import GraphConfig, build_weight_graph
from .inpaint import InpaintConfig, inpaint, sample_mask
from .solver import METHODS, SolverParams

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2
NUMERICAL_ERRORS = (SingularSystemError, NonConvergenceError, DegenerateBandwidthError)
BUNDLED = "bundled:"

INPAINT_COLUMNS = ("image", "method", "rate", "seed", "psnr_db", "ssim", "seconds")
SSL_COLUMNS = ("dataset", "method", "labels", "seed", "repeats", "accuracy_mean",
               "accuracy_std", "seconds")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunReport:
    """One experiment: what ran, on what, with which seed, and how it scored."""
    command: str
    method: str
    source: str
    seed: int
    metrics: dict
    config: dict
    seconds: float
    extra: dict = field(default_factory=dict)
    version: str = __version__

    def to_json(self):
        return json.dumps(_finite(asdict(self)), indent=2, sort_keys=True) + "\n"

    def row(self):
        if self.command == "inpaint":
            values = (self.source, self.method, self.config["sample_rate"], self.seed,
                      self.metrics["psnr_db"], self.metrics["ssim"], self.seconds)
        else:
            values = (self.source, self.method, self.extra["labels"], self.seed,
                      self.config["repeats"], self.metrics["accuracy_mean"],
                      self.metrics["accuracy_std"], self.seconds)
        return [_cell(v) for v in values]


def _finite(obj):
    # JSON has no infinity; the sentinel is the string "inf"
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return str(v)


def append_csv(path, columns, row):
    """Append ``row``, writing the header first when the file is new or empty."""
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with open(path, "a", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if new:
            w.writerow(columns)
        w.writerow(row)


def _emit(report, args, columns):
    text = report.to_json()
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        append_csv(args.csv, columns, report.row())


def _patch_size(text):
    parts = text.lower().split("x")
    try:
        sizes = tuple(int(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad patch size {text!r}, expected e.g. 11 or 11x9")
    if len(sizes) == 1:
        sizes = sizes * 2
    if len(sizes) != 2:
        raise argparse.ArgumentTypeError(f"bad patch size {text!r}")
    return sizes


def _rate(text):
    r = float(text)
    if not 0 < r <= 1:
        raise argparse.ArgumentTypeError(f"rate must lie in (0, 1], got {text}")
    return r


def _resolve(source, kind):
    if not source.startswith(BUNDLED):
        return source, Path(source)
    name = source[len(BUNDLED):]
    known = {"image": {"cameraman128": "cameraman128.pgm"},
             "data": {"mnist2000": "mnist2000-images-idx3-ubyte.gz"}}[kind]
    if name not in known:
        raise InvalidArgumentError(f"unknown bundled {kind} {name!r}; available: {sorted(known)}")
    return source, datasets.data_path(known[name])


def _common(p):
    p.add_argument("--method", choices=METHODS, default="wecure")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="curvature weight for cure/wecure (default 1.0)")
    p.add_argument("--knn-sigma", type=int, default=20)
    p.add_argument("--knn-trunc", type=int, default=50)
    p.add_argument("--cg-tol", type=float, default=1e-6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (restored image / predictions CSV)")
    p.add_argument("--report", help="write the JSON run report here instead of stdout")
    p.add_argument("--csv", help="append a one-line summary to this CSV table")
    p.add_argument("--no-timing", action="store_true",
                   help="record 0 seconds so reports are byte-identical across runs")


def build_parser():
    parser = _Parser(prog="wecure", description=__doc__.split("\n\n")[0].strip())
    parser.add_argument("--version", action="version", version=f"wecure {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("inpaint", help="restore an image from a subset of its pixels")
    p.add_argument("--image", required=True,
                   help="PGM/PNG path, or bundled:cameraman128")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--mask", help="PGM/PNG mask, 255 = observed, 0 = missing")
    src.add_argument("--sample-rate", type=_rate, help="observe this fraction of pixels at random")
    p.add_argument("--patch-size", type=_patch_size, default=(11, 11))
    p.add_argument("--outer-iters", type=int, default=10)
    p.add_argument("--warm-start-iters", type=int, default=6)
    _common(p)

    p = sub.add_parser("ssl", help="semi-supervised classification")
    p.add_argument("--data", required=True,
                   help="IDX image file, CSV point cloud, or bundled:mnist2000")
    p.add_argument("--labels", help="IDX label file (IDX data only)")
    p.add_argument("--label-column", default="-1",
                   help="CSV column holding labels, index or name (default: last)")
    p.add_argument("--header", action="store_true", help="CSV has a header row")
    n = p.add_mutually_exclusive_group()
    n.add_argument("--labels-per-run", type=int, help="number of labeled points to draw")
    n.add_argument("--label-rate", type=_rate, help="fraction of points to label")
    p.add_argument("--repeats", type=int, default=1)
    _common(p)
    return parser


def cmd_inpaint(args):
    source, path = _resolve(args.image, "image")
    truth = io.load_image(path)
    if args.mask:
        mask = io.load_mask(args.mask)
        if mask.shape != truth.shape:
            raise InvalidArgumentError(f"mask shape {mask.shape} differs from image {truth.shape}")
        rate = float(mask.mean())
    else:
        mask = sample_mask(truth.shape, args.sample_rate, args.seed)
        rate = args.sample_rate
    cfg = InpaintConfig(method=args.method, patch_size=args.patch_size, lam=args.lam,
                        k_sigma=args.knn_sigma, k_trunc=args.knn_trunc,
                        outer_iters=args.outer_iters, warm_start_iters=args.warm_start_iters,
                        cg_tol=args.cg_tol, seed=args.seed)
    t0 = time.perf_counter()
    restored = inpaint(truth, mask, cfg)
    seconds = 0.0 if args.no_timing else round(time.perf_counter() - t0, 3)
    if args.out:
        io.write_image(restored, args.out)
    config = asdict(cfg)
    config.update(sample_rate=rate, mask=args.mask)
    report = RunReport("inpaint", args.method, source, args.seed,
                       {"psnr_db": metrics.psnr(restored, truth),
                        "ssim": metrics.ssim(restored, truth)},
                       config, seconds)
    _emit(report, args, INPAINT_COLUMNS)


def _load_points(args):
    source, path = _resolve(args.data, "data")
    if source.startswith(BUNDLED):
        X, y = datasets.load_mnist2000()
        return source, X, np.arange(y.size), y
    if str(path).lower().endswith(".csv"):
        col = args.label_column
        col = int(col) if col.lstrip("-").isdigit() else col
        t = io.load_pointcloud_csv(path, label_column=col, header=args.header)
        return source, t.points, t.labeled, t.labels
    if not args.labels:
        raise InvalidArgumentError("IDX data needs --labels")
    X, y = io.load_idx(path), io.load_idx(args.labels)
    if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.size:
        raise InvalidArgumentError("IDX data and label files do not match")
    return source, X, np.arange(y.size), y


def cmd_ssl(args):
    source, X, known, y = _load_points(args)
    n = X.shape[0]
    if args.repeats < 1:
        raise InvalidArgumentError("--repeats must be at least 1")
    sampling = args.labels_per_run is not None or args.label_rate is not None
    if sampling and known.size != n:
        raise InvalidArgumentError("sampling labeled points needs a label for every point")
    if args.labels_per_run is not None:
        count = args.labels_per_run
    elif args.label_rate is not None:
        count = int(round(args.label_rate * n))
    else:
        count = known.size
    truth = np.full(n, -1, dtype=np.int64)
    truth[known] = y
    classes = np.unique(y)

    t0 = time.perf_counter()
    cfg = GraphConfig(args.knn_sigma, min(args.knn_trunc, n - 1))
    graph = build_weight_graph(X, cfg) if count < n else None
    params = SolverParams(args.method, args.lam, cg_tol=args.cg_tol)
    seeds = [args.seed + r for r in range(args.repeats)]
    preds, accs = [], []
    for s in seeds:
        if sampling:
            ids = ssl.sample_training_set(y, count, np.random.default_rng(s))
        else:
            ids = known
        ds = ssl.LabeledDataset(X, ids, truth[ids], classes)
        pred = ssl.classify(ds, params, graph=graph)
        preds.append(pred)
        if sampling:
            accs.append(ssl.accuracy(pred, truth, exclude=ids))
    seconds = 0.0 if args.no_timing else round(time.perf_counter() - t0, 3)

    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "label"] + [f"seed_{s}" for s in seeds])
            for i in range(n):
                w.writerow([i, "" if truth[i] < 0 else truth[i]] + [int(p[i]) for p in preds])
    mean = float(np.mean(accs)) if accs else None
    std = float(np.std(accs)) if accs else None
    config = {k: v for k, v in vars(args).items() if k not in ("func", "command", "verbose")}
    report = RunReport("ssl", args.method, source, args.seed,
                       {"accuracy_mean": mean, "accuracy_std": std, "accuracy": accs},
                       config, seconds, extra={"labels": int(count), "points": int(n)})
    _emit(report, args, SSL_COLUMNS)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"wecure: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, *a, **k: print(f"wecure: warning: {msg}",
                                                           file=sys.stderr)
        try:
            {"inpaint": cmd_inpaint, "ssl": cmd_ssl}[args.command](args)
        except NUMERICAL_ERRORS as exc:
            print(f"wecure: numerical failure: {_one_line(exc)}", file=sys.stderr)
            return EXIT_NUMERICAL
        except (WecureError, OSError, ValueError) as exc:
            print(f"wecure: error: {_one_line(exc)}", file=sys.stderr)
            return EXIT_USAGE
    return EXIT_OK


def _one_line(exc):
    return " ".join(str(exc).split()) or type(exc).__name__


if __name__ == "__main__":
    sys.exit(main())
