"""Command-line front end.

Subcommands
-----------
simulate   corrupt an image with Gamma speckle
denoise    restore an image (l1frame-tv, l2tv or hard)
eval       PSNR / MAE between two images
sweep      run a parameter grid, one CSV row and one image per cell
rerun      replay a command from its run manifest

Every command that writes images also writes ``<output>.manifest.json``,
which records the resolved arguments and is enough to reproduce the images
byte for byte with ``despeckle rerun``.
"""

import argparse
import csv
import dataclasses
import itertools
import json
import math
import os
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .frame import TightFrame
from .imageio import image_bits, read_image, write_image
from .pipeline import (
    DenoiseReport,
    Timer,
    bias_factor,
    default_threshold,
    denoise,
    denoise_hardthreshold,
    denoise_l2tv,
    mae,
    psnr,
)
from .prox import LambdaWeights, TvProxConfig
from .solver import SolverConfig
from .special import RNG_ALGORITHM, NoiseModel, apply_multiplicative_noise

OUTPUT_DIR_ENV = "DESPECKLE_OUTPUT_DIR"
METHODS = ("l1frame-tv", "l2tv", "hard")

# grid keys accepted by ``sweep`` and the type of their values
SWEEP_KEYS = {
    "gamma": float,
    "lambda0": float,
    "lambda1": float,
    "T_over_sigma": float,
    "n_dr": int,
    "n_fb": int,
    "beta": float,
    "mu": float,
    "levels": int,
    "rho": float,
}


class UsageError(Exception):
    """Bad flag value; reported like an argparse error (exit status 2)."""


def _warn(msg):
    print(f"despeckle: warning: {msg}", file=sys.stderr)


def _output_dir():
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def _default_output(input_path, tag):
    p = Path(input_path)
    return _output_dir() / f"{p.stem}_{tag}{p.suffix}"


def _load(path):
    """Read an image and make it strictly positive for the log transform."""
    u = read_image(path)
    bad = ~(u > 0)
    if bad.any():
        _warn(f"{path}: {int(bad.sum())} non-positive pixel(s) clamped to 1")
        u = np.where(bad, 1.0, u)
    return u


def _save(path, u, bits):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    clamped = write_image(path, u, bits=bits)
    if clamped:
        _warn(f"{path}: {clamped} pixel(s) clamped to the {bits}-bit range")
    return clamped


def _manifest_path(output):
    return Path(str(output) + ".manifest.json")


def _write_manifest(command, argv, params, seed, inputs, outputs):
    manifest = {
        "command": command,
        "argv": argv,
        "params": params,
        "rng": {"algorithm": RNG_ALGORITHM, "seed": seed},
        "inputs": {k: str(v) for k, v in inputs.items() if v is not None},
        "outputs": {k: str(v) for k, v in outputs.items() if v is not None},
        "software": {"despeckle": __version__, "numpy": np.__version__},
    }
    path = _manifest_path(outputs["image"] if "image" in outputs else outputs["dir"])
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _model(args):
    try:
        return NoiseModel(args.K, args.mu_noise)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _solver_config(p):
    """Build the solver settings from a flat parameter dict."""
    try:
        tv = TvProxConfig(beta=p["beta"], n_inner=p["n_fb"])
        return SolverConfig(
            gamma=p["gamma"],
            mu=p["mu"],
            n_dr=p["n_dr"],
            weights=LambdaWeights(p["lambda0"], p["lambda1"], relative=not p.get("absolute_lambda", False)),
            tv=tv,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _frame(levels):
    try:
        return TightFrame(levels=levels)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _method_params(args):
    return {
        "method": args.method,
        "gamma": args.gamma,
        "lambda0": args.lambda0,
        "lambda1": args.lambda1,
        "absolute_lambda": args.absolute_lambda,
        "T_over_sigma": args.T_over_sigma,
        "n_dr": args.n_dr,
        "n_fb": args.n_fb,
        "beta": args.beta,
        "mu": args.mu,
        "levels": args.levels,
        "rho": args.rho,
    }


def _check_params(p):
    if not p["T_over_sigma"] >= 0:
        raise UsageError(f"T_over_sigma must be >= 0, got {p['T_over_sigma']}")
    if not p["rho"] > 0:
        raise UsageError(f"rho must be > 0, got {p['rho']}")
    # builds and discards the configs purely for validation
    _solver_config(p)
    _frame(p["levels"])


def _run_method(s, model, p, trace=False):
    """Dispatch one denoiser; returns (image, SolveResult or None)."""
    frame = _frame(p["levels"])
    T = default_threshold(model, p["T_over_sigma"])
    if p["method"] == "hard":
        return denoise_hardthreshold(s, model, frame, T), None
    if p["method"] == "l2tv":
        tv = TvProxConfig(beta=p["beta"], n_inner=p["n_fb"])
        return denoise_l2tv(s, model, p["rho"], tv), None
    cfg = _solver_config(p)
    if trace:
        cfg = dataclasses.replace(cfg, record_trace=True)
    s_hat, result, _, _ = denoise(s, model, frame, cfg, T, return_solve=True)
    return s_hat, result


# -- commands -----------------------------------------------------------------


def cmd_simulate(args):
    model = _model(args)
    s0 = _load(args.input)
    output = Path(args.output) if args.output else _default_output(args.input, "noisy")
    s = apply_multiplicative_noise(s0, model, args.seed)
    _save(output, s, image_bits(args.input))
    _write_manifest(
        "simulate",
        _argv_simulate(args, output),
        {"K": model.K, "mu": model.mu},
        args.seed,
        {"input": args.input},
        {"image": output},
    )
    print(f"wrote {output}")
    return 0


def _argv_simulate(args, output):
    return [
        "simulate", str(Path(args.input).resolve()),
        "--K", str(args.K), "--mu-noise", repr(args.mu_noise),
        "--seed", str(args.seed), "--output", str(Path(output).resolve()),
    ]


def _param_flags(p):
    out = ["--method", p["method"]]
    for key in SWEEP_KEYS:
        out += ["--" + key.replace("_", "-"), repr(p[key])]
    return out


def cmd_denoise(args):
    model = _model(args)
    params = _method_params(args)
    _check_params(params)
    s = _load(args.input)
    truth = _load(args.truth) if args.truth else None
    if truth is not None and truth.shape != s.shape:
        raise UsageError(f"truth shape {truth.shape} does not match input shape {s.shape}")
    output = Path(args.output) if args.output else _default_output(args.input, args.method)

    with Timer() as timer:
        s_hat, result = _run_method(s, model, params, trace=bool(args.trace))
    clamped = _save(output, s_hat, image_bits(args.input))

    report = DenoiseReport(
        method=args.method,
        shape=s.shape,
        input_stats=DenoiseReport.image_stats(s),
        model={"K": model.K, "mu": model.mu},
        config=params,
        bias_factor=bias_factor(model),
        runtime=timer.elapsed,
        trace=str(args.trace) if args.trace else None,
        extra={"clamped_pixels": clamped},
    )
    if truth is not None:
        report.add_metrics(truth, s, s_hat)
    if result is not None:
        report.extra["final_residual"] = result.trace.residual[-1]
        if args.trace:
            result.trace.to_csv(args.trace)
    elif args.trace:
        _warn(f"method {args.method} has no iteration trace; {args.trace} not written")
    report_path = output.with_suffix(".json")
    report_path.write_text(report.to_json() + "\n")

    argv = ["denoise", str(Path(args.input).resolve()), "--K", str(args.K),
            "--mu-noise", repr(args.mu_noise), "--seed", str(args.seed)]
    argv += _param_flags(params) + ["--output", str(output.resolve())]
    if args.truth:
        argv += ["--truth", str(Path(args.truth).resolve())]
    _write_manifest(
        "denoise", argv, params, args.seed,
        {"input": args.input, "truth": args.truth},
        {"image": output, "report": report_path, "trace": args.trace},
    )
    if truth is not None:
        print(f"PSNR noisy {report.psnr_noisy:.3f} dB -> denoised {report.psnr_denoised:.3f} dB")
    print(f"wrote {output}")
    return 0


def _fmt_metric(v):
    if math.isinf(v):
        return "inf"
    return f"{v:.6g}"


def cmd_eval(args):
    truth = read_image(args.truth)
    cand = read_image(args.candidate)
    if truth.shape != cand.shape:
        raise UsageError(f"shape mismatch: {truth.shape} vs {cand.shape}")
    print(f"PSNR: {_fmt_metric(psnr(truth, cand))}, MAE: {_fmt_metric(mae(truth, cand))}")
    return 0


def parse_grid(specs):
    """``["gamma=1,10", "levels=3"]`` -> ordered dict of value lists."""
    grid = {}
    for spec in specs or []:
        key, sep, values = spec.partition("=")
        key = key.strip()
        if not sep or key not in SWEEP_KEYS:
            raise UsageError(f"bad grid entry {spec!r}; expected KEY=v1,v2 with KEY in {sorted(SWEEP_KEYS)}")
        try:
            vals = [SWEEP_KEYS[key](v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"bad value in grid entry {spec!r}") from None
        if not vals:
            raise UsageError(f"grid entry {spec!r} has no values")
        grid[key] = vals
    if not grid:
        raise UsageError("empty parameter grid; give at least one --grid KEY=v1,v2,...")
    return grid


def _cell_tag(cell):
    return "_".join(f"{k}{v:g}" if isinstance(v, float) else f"{k}{v}" for k, v in cell.items())


def cmd_sweep(args):
    model = _model(args)
    grid = parse_grid(args.grid)
    base = _method_params(args)
    cells = [dict(zip(grid, combo)) for combo in itertools.product(*grid.values())]
    for cell in cells:
        _check_params({**base, **cell})

    s = _load(args.input)
    truth = _load(args.truth) if args.truth else None
    if truth is not None and truth.shape != s.shape:
        raise UsageError(f"truth shape {truth.shape} does not match input shape {s.shape}")
    out_dir = Path(args.output_dir) if args.output_dir else _output_dir() / f"{Path(args.input).stem}_sweep"
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / "sweep.csv"
    ext = args.format or Path(args.input).suffix
    bits = image_bits(args.input)

    fields = ["cell"] + list(grid) + ["psnr", "mae", "runtime", "image"]
    done = set()
    if csv_path.exists():
        with open(csv_path, newline="") as fh:
            done = {row["cell"] for row in csv.DictReader(fh)}
    new_file = not csv_path.exists()
    with open(csv_path, "a", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        if new_file:
            writer.writeheader()
            fh.flush()
        for cell in cells:
            tag = _cell_tag(cell)
            image_path = out_dir / f"{args.method}_{tag}{ext}"
            if args.resume and tag in done and image_path.exists():
                continue
            p = {**base, **cell}
            with Timer() as timer:
                s_hat, _ = _run_method(s, model, p)
            _save(image_path, s_hat, bits)
            row = {"cell": tag, **cell, "runtime": f"{timer.elapsed:.4f}", "image": image_path.name}
            if truth is not None:
                row["psnr"] = _fmt_metric(psnr(truth, s_hat))
                row["mae"] = _fmt_metric(mae(truth, s_hat))
            writer.writerow(row)
            # flush per row so an interrupted sweep keeps its finished cells
            fh.flush()
            print(f"{tag}: psnr={row.get('psnr', '-')}", file=sys.stderr)

    argv = ["sweep", str(Path(args.input).resolve()), "--K", str(args.K),
            "--mu-noise", repr(args.mu_noise), "--seed", str(args.seed)]
    argv += _param_flags(base) + ["--output-dir", str(out_dir.resolve())]
    for key, vals in grid.items():
        argv += ["--grid", f"{key}=" + ",".join(repr(v) for v in vals)]
    if args.truth:
        argv += ["--truth", str(Path(args.truth).resolve())]
    if args.format:
        argv += ["--format", args.format]
    _write_manifest(
        "sweep", argv, {"base": base, "grid": grid}, args.seed,
        {"input": args.input, "truth": args.truth},
        {"dir": out_dir / "sweep", "csv": csv_path},
    )
    print(f"wrote {len(cells)} cell(s) to {out_dir}")
    return 0


def _replace_flag(argv, flag, value):
    argv = list(argv)
    if flag in argv:
        argv[argv.index(flag) + 1] = value
    else:
        argv += [flag, value]
    return argv


def cmd_rerun(args):
    try:
        manifest = json.loads(Path(args.manifest).read_text())
        argv = list(manifest["argv"])
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read manifest {args.manifest}: {exc}") from None
    if args.output:
        if argv[0] == "sweep":
            argv = _replace_flag(argv, "--output-dir", args.output)
        else:
            argv = _replace_flag(argv, "--output", args.output)
            if argv[0] == "denoise" and "--trace" in argv:
                argv = _replace_flag(argv, "--trace", str(Path(args.output).with_suffix(".csv")))
    return main(argv)


# -- parser -------------------------------------------------------------------


def _add_model_flags(p):
    p.add_argument("--K", type=int, default=10, help="number of looks (default 10)")
    p.add_argument("--mu-noise", type=float, default=1.0, dest="mu_noise",
                   help="mean of the speckle (default 1)")
    p.add_argument("--seed", type=int, default=0, help="noise seed (default 0)")


def _add_method_flags(p):
    d = SolverConfig()
    p.add_argument("--method", choices=METHODS, default="l1frame-tv")
    p.add_argument("--gamma", type=float, default=d.gamma, help="DR stepsize (default 10)")
    p.add_argument("--lambda0", type=float, default=d.weights.lambda0,
                   help="fidelity weight on thresholded coefficients, as a fraction of the atom TV bound")
    p.add_argument("--lambda1", type=float, default=d.weights.lambda1,
                   help="fidelity weight on kept coefficients, as a fraction of the atom TV bound")
    p.add_argument("--absolute-lambda", action="store_true", dest="absolute_lambda",
                   help="use lambda0 and lambda1 as raw weights instead of fractions")
    p.add_argument("--T-over-sigma", type=float, default=2.0, dest="T_over_sigma",
                   help="hard threshold in units of the log-noise std (default 2)")
    p.add_argument("--n-dr", type=int, default=d.n_dr, dest="n_dr", help="outer iterations (default 50)")
    p.add_argument("--n-fb", type=int, default=d.tv.n_inner, dest="n_fb",
                   help="inner TV iterations (default 200)")
    p.add_argument("--beta", type=float, default=d.tv.beta, help="inner stepsize, < 1/4 (default 0.24)")
    p.add_argument("--mu", type=float, default=d.mu, help="DR relaxation in (0, 2) (default 1)")
    p.add_argument("--levels", type=int, default=4, help="frame levels (default 4)")
    p.add_argument("--rho", type=float, default=2.0, help="l2tv fidelity weight (default 2)")


def build_parser():
    parser = argparse.ArgumentParser(prog="despeckle", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="apply Gamma speckle to an image")
    p.add_argument("input")
    _add_model_flags(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("denoise", help="remove speckle from an image")
    p.add_argument("input")
    _add_model_flags(p)
    _add_method_flags(p)
    p.add_argument("-o", "--output")
    p.add_argument("--truth", help="clean image; adds PSNR/MAE to the report")
    p.add_argument("--trace", help="CSV path for the per-iteration trace")
    p.set_defaults(func=cmd_denoise)

    p = sub.add_parser("eval", help="PSNR and MAE of a candidate against a reference")
    p.add_argument("truth")
    p.add_argument("candidate")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="run a parameter grid")
    p.add_argument("input")
    _add_model_flags(p)
    _add_method_flags(p)
    p.add_argument("--grid", action="append", metavar="KEY=v1,v2",
                   help="parameter values to sweep; repeat for a Cartesian product")
    p.add_argument("--truth")
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--format", choices=(".pgm", ".png", ".raw"),
                   help="image format of the cells (default: same as input)")
    p.add_argument("--resume", action="store_true",
                   help="skip cells already listed in sweep.csv")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("rerun", help="replay a command from its manifest")
    p.add_argument("manifest")
    p.add_argument("-o", "--output", help="write to this path (or directory, for sweeps) instead")
    p.set_defaults(func=cmd_rerun)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"despeckle: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
