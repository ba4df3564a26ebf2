"""How the Douglas-Rachford stepsize affects progress in a fixed budget.

The objective and the fixed-point residual are recorded per iteration.  The
residual scales with gamma, so compare objectives across gammas, not
residuals.  A long run at gamma = 1 serves as the reference minimum.
"""

import numpy as np

from despeckle.frame import TightFrame, hard_threshold
from despeckle.pipeline import default_threshold, shepp_logan
from despeckle.solver import SolverConfig, douglas_rachford, objective
from despeckle.special import NoiseModel, apply_multiplicative_noise

from _common import out_dir

out = out_dir("convergence")
model = NoiseModel(10)
frame = TightFrame()
s0 = shepp_logan(64)
v = np.log(apply_multiplicative_noise(s0, model, seed=1))
y_th, part = hard_threshold(frame.analyze(v), frame.subband_thresholds(default_threshold(model)))
x0 = np.linalg.norm(y_th)

ref = douglas_rachford(y_th, part, frame, SolverConfig(gamma=1.0, n_dr=1000))
f_ref = objective(ref.x_hat, y_th, SolverConfig().weights, part, frame)
print(f"reference objective (1000 steps at gamma 1): {f_ref:.3f}")

for gamma in (10.0, 3.0, 1.0, 0.3):
    cfg = SolverConfig(gamma=gamma, record_trace=True)
    res = douglas_rachford(y_th, part, frame, cfg)
    res.trace.to_csv(out / f"trace_gamma{gamma:g}.csv")
    f_end = objective(res.x_hat, y_th, cfg.weights, part, frame)
    print(
        f"gamma {gamma:5g}: objective {f_end:10.3f} ({100 * (f_end / f_ref - 1):5.1f}% above), "
        f"residual/|x0| {res.trace.residual[-1] / x0:.1e}"
    )
print(f"traces in {out}")
