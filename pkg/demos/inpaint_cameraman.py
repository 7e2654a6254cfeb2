"""
Restoring an image from 20% of its pixels.

The bundled 128x128 crop is subsampled, restored with WNLL and WeCURE and
the results are written next to the masked input as PNG files. WeCURE
reuses the first six WNLL iterations as its warm start, so here it simply
resumes the WNLL run from that point instead of repeating them.

Run with ``python demos/inpaint_cameraman.py [OUTPUT_DIR]`` (about two
minutes).
"""
import sys
from pathlib import Path

import numpy as np

from wecure import InpaintConfig, datasets, inpaint, io, metrics

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else ".")
out_dir.mkdir(parents=True, exist_ok=True)

truth = datasets.load_cameraman128()
mask = inpaint.sample_mask(truth.shape, 0.2, seed=0)
io.write_image(np.where(mask, truth, 0), out_dir / "observed.png")

warm = {}
cfg = InpaintConfig(method="wnll")


def keep_warm_start(k, method, u):
    print(f"  iteration {k} ({method}): PSNR {metrics.psnr(u, truth):.2f} dB")
    if k == cfg.warm_start_iters - 1:
        warm["u"] = u.copy()


results = {"wnll": inpaint.inpaint(truth, mask, cfg, callback=keep_warm_start)}
results["wecure"] = inpaint.inpaint(truth, mask, InpaintConfig(method="wecure"),
                                    resume=(cfg.warm_start_iters, warm["u"]))
for method, img in results.items():
    io.write_image(img, out_dir / f"{method}.png")
    print(f"{method:7s} PSNR {metrics.psnr(img, truth):.2f} dB  SSIM {metrics.ssim(img, truth):.4f}")
