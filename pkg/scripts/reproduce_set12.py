"""
Inpainting on the twelve standard test images, offline.

Usage::

    python scripts/reproduce_set12.py IMAGE_DIR [--seed 0] [--out set12.csv]

``IMAGE_DIR`` holds the grayscale images as PNG or PGM files named after
the keys of ``IMAGES`` (e.g. ``cameraman.png``, ``house.png``). Every image
is subsampled at 10%, 15% and 20% and restored with each method; PSNR and
SSIM go to the CSV and the PSNR is printed next to the published value.
Full 256x256 and 512x512 images take hours.
"""
import argparse
import csv
import logging
import time
from pathlib import Path

from wecure import inpaint, io, metrics
from wecure.inpaint import InpaintConfig

IMAGES = ("cameraman", "house", "peppers", "starfish", "monarch", "airplane",
          "parrot", "lena", "barbara", "boat", "man", "couple")

# published PSNR (dB) per rate and method, in the order of IMAGES
REFERENCE_PSNR = {
    (0.10, "ldmm"): (19.9329, 24.8723, 20.6103, 19.9285, 19.3395, 19.9612, 19.5449, 26.1005, 23.3176, 22.6681, 23.9415, 22.7225),
    (0.10, "wnll"): (21.9993, 28.3325, 23.3210, 22.2705, 22.4218, 21.7954, 21.6121, 28.5089, 26.3732, 24.8116, 25.8126, 25.0263),
    (0.10, "cure"): (21.7095, 28.3023, 23.3315, 22.0185, 22.0650, 21.4078, 21.5080, 28.3013, 26.3031, 24.6798, 25.7207, 24.9033),
    (0.10, "wecure"): (21.8571, 28.7967, 23.7416, 22.3540, 22.5829, 21.4335, 21.7753, 28.7926, 26.7155, 25.0060, 25.7145, 25.1940),
    (0.15, "ldmm"): (21.0948, 26.4075, 21.6434, 20.9887, 20.9843, 21.0712, 21.3412, 27.7591, 25.6175, 23.8791, 25.1269, 24.0065),
    (0.15, "wnll"): (23.3052, 29.1647, 25.0635, 23.5147, 23.7171, 22.7292, 22.5851, 29.5856, 27.7837, 25.8633, 26.9433, 26.2245),
    (0.15, "cure"): (22.8514, 29.5745, 25.1007, 23.4509, 23.8326, 22.5211, 22.4579, 29.6253, 27.7315, 25.7653, 26.9278, 26.1798),
    (0.15, "wecure"): (23.0993, 30.9540, 25.7840, 24.0722, 24.2587, 22.8246, 22.8708, 30.1331, 28.5615, 26.2943, 27.3484, 26.7266),
    (0.20, "ldmm"): (21.9057, 28.2924, 22.7767, 22.6264, 22.4175, 22.1073, 21.9409, 28.9160, 26.8121, 24.8777, 26.2350, 25.0044),
    (0.20, "wnll"): (23.9478, 30.8222, 25.8068, 24.5382, 24.6738, 23.8359, 23.2844, 30.5140, 28.7357, 26.6614, 27.7806, 26.7532),
    (0.20, "cure"): (23.7846, 31.4606, 25.7513, 24.7232, 24.8360, 23.7147, 23.5282, 30.6271, 28.9715, 26.6736, 27.8198, 26.8165),
    (0.20, "wecure"): (24.5007, 32.1789, 26.6428, 25.3982, 25.5151, 24.1406, 24.0625, 31.3711, 29.7794, 27.3033, 28.3473, 27.4934),
}


def find(root, name):
    for ext in (".png", ".pgm", ".PNG", ".tif"):
        if (root / (name + ext)).exists():
            return root / (name + ext)
    return None


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("image_dir", type=Path)
    ap.add_argument("--rates", type=float, nargs="+", default=[0.10, 0.15, 0.20])
    ap.add_argument("--methods", nargs="+", default=["ldmm", "wnll", "cure", "wecure"])
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--lam", type=float, default=1.0)
    ap.add_argument("--outer-iters", type=int, default=10)
    ap.add_argument("--out", default="set12.csv")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["image", "method", "rate", "seed", "psnr_db", "ssim", "seconds", "reference_psnr_db"])
        for i, name in enumerate(IMAGES):
            path = find(args.image_dir, name)
            if path is None:
                logging.warning("skipping %s: not found in %s", name, args.image_dir)
                continue
            truth = io.load_image(path)
            for rate in args.rates:
                mask = inpaint.sample_mask(truth.shape, rate, args.seed)
                for method in args.methods:
                    cfg = InpaintConfig(method=method, lam=args.lam, seed=args.seed,
                                        outer_iters=args.outer_iters)
                    t0 = time.perf_counter()
                    out = inpaint.inpaint(truth, mask, cfg)
                    secs = time.perf_counter() - t0
                    p, s = metrics.psnr(out, truth), metrics.ssim(out, truth)
                    ref = REFERENCE_PSNR.get((round(rate, 2), method), (None,) * 12)[i]
                    w.writerow([name, method, rate, args.seed, p, s, round(secs, 1), ref])
                    fh.flush()
                    print(f"{name:10s} {rate:.2f} {method:7s} PSNR {p:7.3f} (reference {ref}) "
                          f"SSIM {s:.4f}  {secs:.0f} s", flush=True)


if __name__ == "__main__":
    main()
