"""Douglas-Rachford minimization of ``Psi(x) + TV(W~ x)`` over frame coefficients."""

import csv
from dataclasses import dataclass, field
import time

import numpy as np

from .grid import tv_norm
from .prox import LambdaWeights, TvProxConfig, prox_psi, rprox_phi, rprox_psi

__all__ = ["SolverConfig", "SolveTrace", "SolveResult", "objective", "douglas_rachford"]


@dataclass(frozen=True)
class SolverConfig:
    gamma: float = 10.0
    mu: float = 1.0
    n_dr: int = 50
    weights: LambdaWeights = field(default_factory=LambdaWeights)
    tv: TvProxConfig = field(default_factory=TvProxConfig)
    record_trace: bool = False

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        # constant relaxation in (0, 2) makes sum mu(2 - mu) diverge
        if not 0 < self.mu < 2:
            raise ValueError(f"mu must lie in (0, 2), got {self.mu}")
        if int(self.n_dr) != self.n_dr or self.n_dr < 1:
            raise ValueError(f"n_dr must be a positive integer, got {self.n_dr}")


@dataclass
class SolveTrace:
    """Per-iteration record: objective at ``prox_phi(x_t)``, ``|x_{t+1} - x_t|``, elapsed seconds."""

    objective: list = field(default_factory=list)
    residual: list = field(default_factory=list)
    seconds: list = field(default_factory=list)

    def __len__(self):
        return len(self.residual)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["iteration", "objective", "residual", "seconds"])
            for t in range(len(self)):
                obj = self.objective[t] if self.objective else ""
                w.writerow([t + 1, obj, self.residual[t], self.seconds[t]])


@dataclass
class SolveResult:
    x_hat: np.ndarray  # prox_phi of the last DR iterate
    u_hat: np.ndarray  # W~ x_hat
    x_last: np.ndarray  # raw DR iterate x^(N_DR)
    x_psi: np.ndarray  # prox_psi(rprox_phi(x_last)); equals x_hat at a fixed point
    trace: SolveTrace


def objective(x, y_th, weights, part, frame):
    """``sum_i lambda_i |x[i] - y_th[i]| + TV(W~ x)``."""
    lam = weights.as_array(part, frame)
    return float(np.sum(lam * np.abs(x - y_th))) + tv_norm(frame.synthesize(x))


def douglas_rachford(y_th, part, frame, cfg=SolverConfig(), x0=None):
    """Run ``cfg.n_dr`` relaxed Douglas-Rachford steps

        x <- (1 - mu/2) x + (mu/2) rprox_psi(rprox_phi(x))

    starting from ``x0`` (default ``y_th``).

    The iterate itself is not the minimizer: the returned ``x_hat`` is
    ``prox_phi`` applied to the final iterate, and ``u_hat = W~ x_hat``.
    The companion point ``x_psi = prox_psi(rprox_phi(x))`` is also returned;
    it is where coefficients snap exactly onto ``y_th``, and it coincides
    with ``x_hat`` once the iteration has converged.
    The inner TV dual field is carried from one outer step to the next.
    """
    gamma, mu = cfg.gamma, cfg.mu
    x = np.array(y_th if x0 is None else x0, dtype=np.float64)
    trace = SolveTrace()
    z = None
    t0 = time.perf_counter()
    for _ in range(cfg.n_dr):
        r, z = rprox_phi(x, frame, gamma, cfg.tv, z0=z, return_dual=True)
        if cfg.record_trace:
            # prox_phi(x) = (x + rprox_phi(x)) / 2
            trace.objective.append(objective(0.5 * (x + r), y_th, cfg.weights, part, frame))
        q = rprox_psi(r, y_th, cfg.weights, part, gamma, frame)
        x_new = (1.0 - 0.5 * mu) * x + 0.5 * mu * q
        trace.residual.append(float(np.linalg.norm(x_new - x)))
        trace.seconds.append(time.perf_counter() - t0)
        x = x_new
    r, _ = rprox_phi(x, frame, gamma, cfg.tv, z0=z, return_dual=True)
    x_hat = 0.5 * (x + r)
    x_psi = prox_psi(r, y_th, cfg.weights, part, gamma, frame)
    return SolveResult(
        x_hat=x_hat, u_hat=frame.synthesize(x_hat), x_last=x, x_psi=x_psi, trace=trace
    )
