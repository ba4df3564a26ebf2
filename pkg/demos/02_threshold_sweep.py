"""Hard thresholding alone, for a range of thresholds.

Small thresholds leave speckle; large ones leave ringing around edges and
erase detail.  Neither end is satisfactory, which motivates the variational
step that follows the threshold.
"""

import numpy as np

from despeckle.frame import TightFrame
from despeckle.imageio import write_image
from despeckle.pipeline import default_threshold, denoise_hardthreshold, mae, psnr, shepp_logan
from despeckle.special import NoiseModel, apply_multiplicative_noise

from _common import out_dir

out = out_dir("threshold_sweep")
model = NoiseModel(10)
s0 = shepp_logan(256)
s = apply_multiplicative_noise(s0, model, seed=1)
frame = TightFrame(levels=4)
write_image(out / "truth.pgm", s0)
write_image(out / "noisy.pgm", s)

print(f"noisy: PSNR {psnr(s0, s):.2f} dB, MAE {mae(s0, s):.2f}")
for t in (2, 3, 4, 5, 6, 8):
    s_hat = denoise_hardthreshold(s, model, frame, default_threshold(model, t))
    write_image(out / f"hard_T{t}.pgm", s_hat)
    print(f"T = {t} sigma: PSNR {psnr(s0, s_hat):.2f} dB, MAE {mae(s0, s_hat):.2f}")
print(f"images in {out}")
