"""Speckle statistics.

Averaging K looks gives Gamma(K, mu/K) noise: mean mu, std mu/sqrt(K).
After the log transform the noise is additive with mean psi0(K) - log K
(+ log mu) and variance psi1(K).  This script checks both against samples
and shows that frame coefficients of the log-noise are close to Gaussian,
which is what makes a threshold at a few sigma meaningful.
"""

import math

import numpy as np

from despeckle.frame import TightFrame
from despeckle.special import NoiseModel, log_noise_stats, sample_speckle

print(f"{'K':>3} {'mean':>8} {'std':>8} {'std pred':>8} {'log mean':>9} {'pred':>9} {'log var':>8} {'pred':>8}")
for K in (1, 3, 10, 30):
    model = NoiseModel(K)
    eta = sample_speckle(model, (512, 512), seed=K)
    le = np.log(eta)
    st = log_noise_stats(model)
    print(
        f"{K:>3} {eta.mean():8.4f} {eta.std():8.4f} {1 / math.sqrt(K):8.4f} "
        f"{le.mean():9.4f} {st.mean:9.4f} {le.var():8.4f} {st.variance:8.4f}"
    )

# skewness of the raw log-noise versus its frame coefficients
le = np.log(sample_speckle(NoiseModel(10), (256, 256), seed=0))
le -= le.mean()


def skew(a):
    a = a.ravel() - a.mean()
    return float(np.mean(a**3) / np.std(a) ** 3)


frame = TightFrame(levels=3)
y = frame.analyze(le)
print(f"\nskewness of log-noise (K=10): {skew(le):+.3f}")
for b, (kind, level, orient) in enumerate(frame.labels):
    if kind == "detail":
        print(f"  level {level} {orient:8s}: {skew(y[b]):+.3f}")
