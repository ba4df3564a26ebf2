"""The full method against the two baselines on the phantom.

* hard: threshold the frame coefficients of the log-image at 2 sigma
* l2tv: quadratic fidelity plus TV on the log-image
* l1frame-tv: l1 fidelity to the thresholded coefficients plus TV,
  minimized by Douglas-Rachford
"""

import time

import numpy as np

from despeckle.frame import TightFrame
from despeckle.imageio import write_image
from despeckle.pipeline import denoise, denoise_hardthreshold, denoise_l2tv, mae, psnr, shepp_logan
from despeckle.special import NoiseModel, apply_multiplicative_noise

from _common import out_dir

out = out_dir("compare")
model = NoiseModel(10)
s0 = shepp_logan(256)
frame = TightFrame()

methods = {
    "hard": lambda s: denoise_hardthreshold(s, model, frame),
    "l2tv": lambda s: denoise_l2tv(s, model),
    "l1frame-tv": lambda s: denoise(s, model, frame),
}
scores = {name: [] for name in ["noisy", *methods]}
for seed in (1, 2, 3):
    s = apply_multiplicative_noise(s0, model, seed)
    scores["noisy"].append((psnr(s0, s), mae(s0, s), 0.0))
    for name, fn in methods.items():
        t0 = time.perf_counter()
        s_hat = fn(s)
        scores[name].append((psnr(s0, s_hat), mae(s0, s_hat), time.perf_counter() - t0))
        if seed == 1:
            write_image(out / f"{name}.pgm", s_hat)

print(f"{'method':12s} {'PSNR':>7s} {'MAE':>7s} {'time':>6s}")
for name, rows in scores.items():
    p, m, t = np.mean(rows, axis=0)
    print(f"{name:12s} {p:7.2f} {m:7.2f} {t:6.2f}")
print(f"images in {out}")
