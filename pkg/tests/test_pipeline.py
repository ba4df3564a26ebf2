import json
import math

import numpy as np
import pytest

from despeckle.frame import TightFrame
from despeckle.pipeline import (
    DenoiseReport,
    bias_factor,
    default_threshold,
    denoise,
    denoise_hardthreshold,
    denoise_l2tv,
    mae,
    psnr,
    shepp_logan,
)
from despeckle.prox import LambdaWeights
from despeckle.solver import SolverConfig
from despeckle.special import NoiseModel, apply_multiplicative_noise, digamma, trigamma

FAST = SolverConfig(n_dr=10)


def test_bias_factor_values():
    assert bias_factor(NoiseModel(1)) == pytest.approx(1 + math.pi**2 / 12, abs=1e-12)
    assert bias_factor(NoiseModel(10)) == pytest.approx(1.05258, abs=1e-5)
    assert abs(bias_factor(NoiseModel(10**6)) - 1.0) < 1e-6


@pytest.mark.parametrize("K", [5, 10, 20, 50])
def test_bias_factor_close_to_exact_mean_correction(K):
    exact = math.exp(math.log(K) - digamma(K))
    assert abs(bias_factor(NoiseModel(K)) - exact) <= 0.01


def test_default_threshold():
    assert default_threshold(NoiseModel(10)) == pytest.approx(2 * math.sqrt(trigamma(10)))
    assert default_threshold(NoiseModel(10), 3.0) == pytest.approx(3 * math.sqrt(trigamma(10)))


def test_psnr_mae_worked_example():
    s0 = np.full((2, 2), 10.0)
    assert psnr(s0, s0 + 1) == pytest.approx(20.0)
    assert mae(s0, s0 + 1) == pytest.approx(1.0)
    assert psnr(s0, s0) == math.inf
    assert mae(s0, s0) == 0.0


def test_psnr_scale_invariant_and_errors():
    rng = np.random.default_rng(0)
    a = rng.uniform(1, 5, (6, 6))
    b = a + rng.standard_normal(a.shape)
    assert psnr(3.7 * a, 3.7 * b) == pytest.approx(psnr(a, b))
    with pytest.raises(ValueError):
        psnr(a, b[:, :5])
    with pytest.raises(ValueError):
        psnr(np.zeros((2, 2)), np.ones((2, 2)))


@pytest.mark.parametrize("K", [1, 10])
def test_constant_image_maps_to_biased_constant(K):
    s = np.full((16, 16), 37.0)
    m = NoiseModel(K)
    for out in (
        denoise(s, m, TightFrame(levels=2), FAST),
        denoise_l2tv(s, m),
        denoise_hardthreshold(s, m, TightFrame(levels=2)),
    ):
        np.testing.assert_allclose(out, 37.0 * bias_factor(m), rtol=1e-12)


def test_rejects_nonpositive_input():
    s = np.ones((8, 8))
    s[2, 2] = 0.0
    for fn in (denoise, denoise_l2tv, denoise_hardthreshold):
        with pytest.raises(ValueError):
            fn(s, NoiseModel())
    with pytest.raises(ValueError):
        denoise(np.ones(5), NoiseModel())


def test_hard_threshold_limits():
    rng = np.random.default_rng(1)
    s = rng.uniform(1, 100, (12, 12))
    m = NoiseModel(10)
    f = TightFrame(levels=2)
    np.testing.assert_allclose(denoise_hardthreshold(s, m, f, T=0.0), s * bias_factor(m), rtol=1e-12)
    coarse = denoise_hardthreshold(s, m, f, T=1e12)
    y = f.analyze(np.log(s))
    y[1:] = 0
    np.testing.assert_allclose(coarse, np.exp(f.synthesize(y)) * bias_factor(m), rtol=1e-12)


def test_l2tv_large_rho_returns_input():
    s = np.random.default_rng(2).uniform(1, 100, (10, 10))
    m = NoiseModel(10)
    np.testing.assert_allclose(denoise_l2tv(s, m, rho=1e9), s * bias_factor(m), rtol=1e-6)
    with pytest.raises(ValueError):
        denoise_l2tv(s, m, rho=0.0)


def test_heavy_fidelity_returns_biased_input():
    s = np.random.default_rng(3).uniform(1, 100, (16, 16))
    m = NoiseModel(10)
    # the DR iterate has to travel about gamma times a TV subgradient before
    # prox_phi of it settles on the data, so a small gamma gets there sooner
    cfg = SolverConfig(gamma=1.0, n_dr=400, weights=LambdaWeights(50.0, 50.0))
    out = denoise(s, m, TightFrame(levels=2), cfg, T=0.0)
    assert np.abs(np.log(out / (s * bias_factor(m)))).max() <= 1e-3


def test_l2tv_improves_on_noisy_phantom():
    s0 = shepp_logan(64)
    s = apply_multiplicative_noise(s0, NoiseModel(10), seed=4)
    assert psnr(s0, denoise_l2tv(s, NoiseModel(10))) > psnr(s0, s)


def test_denoise_improves_on_noisy_phantom_and_is_deterministic():
    s0 = shepp_logan(64)
    m = NoiseModel(10)
    s = apply_multiplicative_noise(s0, m, seed=5)
    f = TightFrame(levels=3)
    a = denoise(s, m, f, SolverConfig(n_dr=20))
    b = denoise(s, m, f, SolverConfig(n_dr=20))
    assert a.tobytes() == b.tobytes()
    assert psnr(s0, a) > psnr(s0, s) + 1.0


def test_denoise_return_solve():
    s = np.random.default_rng(6).uniform(1, 50, (16, 16))
    out, result, y_th, part = denoise(s, NoiseModel(), TightFrame(levels=2), FAST, return_solve=True)
    np.testing.assert_allclose(out, np.exp(result.u_hat) * bias_factor(NoiseModel()))
    assert y_th.shape == part.i1.shape == (7, 16, 16)


def test_phantom_shape_and_range():
    p = shepp_logan(128)
    assert p.shape == (128, 128)
    assert p.min() == 1.0 and p.max() == 256.0
    # piecewise constant: only a handful of gray levels
    assert len(np.unique(p)) < 12
    assert shepp_logan(32, low=5.0, high=9.0).min() == 5.0


def test_mean_preservation_constant_image():
    s0 = np.full((32, 32), 80.0)
    m = NoiseModel(10)
    f = TightFrame(levels=3)
    ratios = [denoise(apply_multiplicative_noise(s0, m, seed), m, f, FAST).mean() / 80.0 for seed in range(12)]
    assert abs(np.mean(ratios) - 1.0) <= 0.05


def test_report_json_roundtrip():
    truth = np.full((4, 4), 5.0)
    rep = DenoiseReport(
        method="hard",
        shape=(4, 4),
        input_stats=DenoiseReport.image_stats(truth),
        model={"K": 10, "mu": 1.0},
        config={"T_over_sigma": 2.0},
        bias_factor=1.05,
        runtime=0.01,
    )
    d = json.loads(rep.to_json())
    assert d["psnr_noisy"] is None
    rep.add_metrics(truth, truth, truth + 1)
    d = json.loads(rep.to_json())
    assert d["psnr_noisy"] == "inf"
    assert d["mae_denoised"] == 1.0
    assert d["input_stats"] == {"max": 5.0, "mean": 5.0, "min": 5.0}
