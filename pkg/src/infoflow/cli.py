"""Command-line front end.

Subcommands: analyze (two-series flow estimate), simulate (sample paths),
theory (moment trajectory + stationary flows), map (index vs gridded field),
validate (reference-band harness).

Exit codes: 0 success, 1 validation bands failed, 2 input error,
3 numerical degeneracy. Every output embeds a run manifest (resolved
parameters, input digests, tool version) for reproducibility. The
environment variable INFOFLOW_SEED provides the default seed.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .errors import InputError, NumericalError
from .estimator import (
    FlowEstimate,
    bootstrap_ci,
    covariances,
    fisher_ci,
    fit_mle,
)
from .fieldmap import load_grid, map_flows, write_flow_maps
from .series import align, load_csv, subsample
from .simulator import SimConfig, simulate, window
from .theory import LinearModel2D, MomentState, analytic_flows, integrate_moments, stationary_covariance
from .validate import FIXTURE_SEEDS, run_validation, star_window_from_times

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


@dataclass
class RunManifest:
    """Reproducibility record embedded verbatim in every output."""

    command: str
    parameters: dict = field(default_factory=dict)
    input_digests: dict = field(default_factory=dict)
    tool_version: str = __version__

    def to_dict(self) -> dict:
        return asdict(self)

    def json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _env_seed(default: int = 0) -> int:
    raw = os.environ.get("INFOFLOW_SEED")
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"INFOFLOW_SEED must be an integer, got {raw!r}")


def _parse_floats(text: str, n: int, what: str) -> list[float]:
    parts = [p for p in text.replace(";", ",").split(",") if p.strip()]
    if len(parts) != n:
        raise InputError(f"{what} needs {n} comma-separated reals, got {text!r}")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise InputError(f"{what}: cannot parse {text!r} as reals")


def _parse_window(text: str, what: str) -> tuple[float, float]:
    parts = text.split(":")
    if len(parts) != 2:
        raise InputError(f"{what} must look like T_START:T_END, got {text!r}")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise InputError(f"{what}: cannot parse {text!r}")


def _open_out(path: str | None):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", newline=""), True


def _model_from_args(args) -> LinearModel2D:
    f = _parse_floats(args.f, 2, "--f")
    a = _parse_floats(args.a, 4, "--a")
    b = _parse_floats(args.b, 2, "--b")
    if b[0] < 0 or b[1] < 0:
        raise InputError(f"--b entries must be >= 0, got {b}")
    return LinearModel2D(f=np.array(f), a=np.array(a).reshape(2, 2), b1=b[0], b2=b[1])


def _flow_json(est: FlowEstimate, model, cov, manifest: RunManifest, units: str) -> dict:
    return {
        "variant": est.variant.value,
        "t21": est.t21,
        "t12": est.t12,
        "se21": est.se21,
        "se12": est.se12,
        "ci21": list(est.ci21),
        "ci12": list(est.ci12),
        "alpha": est.alpha,
        "m": est.m,
        "dt": est.dt,
        "a_hat": [
            [model.a11_hat, model.a12_hat],
            [model.a21_hat, model.a22_hat],
        ],
        "f_hat": [model.f1_hat, model.f2_hat],
        "b_hat": [model.b1_hat, model.b2_hat],
        "det_c": cov.det,
        "units": units,
        "manifest": manifest.to_dict(),
    }


def _summary_line(direction: str, t: float, significant: bool, alpha: float, units: str) -> str:
    if t > 0:
        kind = "destabilizing (source makes target more uncertain)"
    elif t < 0:
        kind = "stabilizing"
    else:
        kind = "zero"
    sig = "significant" if significant else "not significant"
    return f"{direction}: {t:+.6g} {units}, {kind}, {sig} at alpha={alpha:g}"


# --- analyze ------------------------------------------------------------------


def cmd_analyze(args) -> int:
    seed = args.seed if args.seed is not None else _env_seed()
    x1, x2 = load_csv(args.input, args.x1, args.x2, args.dt)
    if args.window:
        t_start, t_end = _parse_window(args.window, "--window")
        x1, x2 = window(x1, t_start, t_end), window(x2, t_start, t_end)
    if args.subsample > 1:
        x1, x2 = subsample(x1, args.subsample), subsample(x2, args.subsample)
    pair = align(x1, x2)
    cov = covariances(pair)
    model = fit_mle(pair, cov)

    star = None
    if args.star_window:
        t_start, t_end = _parse_window(args.star_window, "--star-window")
        star = star_window_from_times(x1, t_start, t_end)
        if args.ci == "bootstrap":
            raise InputError(
                "bootstrap intervals are not defined for the star variant; use --ci fisher"
            )
    if args.ci == "bootstrap":
        est = bootstrap_ci(
            pair, alpha=args.alpha, n_boot=args.n_boot, block_len=args.block_len, seed=seed
        )
    else:
        est = fisher_ci(
            pair, model, cov, alpha=args.alpha, star_window=star, detrend_star=args.detrend_star
        )

    units = f"nats/{args.time_unit}"
    manifest = RunManifest(
        command="analyze",
        parameters={
            "input": args.input,
            "x1": args.x1,
            "x2": args.x2,
            "dt": args.dt,
            "subsample": args.subsample,
            "window": args.window,
            "star_window": args.star_window,
            "detrend_star": args.detrend_star,
            "alpha": args.alpha,
            "ci": args.ci,
            "n_boot": args.n_boot if args.ci == "bootstrap" else None,
            "block_len": args.block_len if args.ci == "bootstrap" else None,
            "seed": seed,
            "time_unit": args.time_unit,
        },
        input_digests={args.input: _sha256(args.input)},
    )
    payload = _flow_json(est, model, cov, manifest, units)
    out, close = _open_out(args.output)
    try:
        json.dump(payload, out, indent=2, sort_keys=True)
        out.write("\n")
    finally:
        if close:
            out.close()
    print(
        _summary_line(
            f"{x2.label or 'x2'} -> {x1.label or 'x1'}",
            est.t21,
            est.significant21(),
            est.alpha,
            units,
        ),
        file=sys.stderr,
    )
    print(
        _summary_line(
            f"{x1.label or 'x1'} -> {x2.label or 'x2'}",
            est.t12,
            est.significant12(),
            est.alpha,
            units,
        ),
        file=sys.stderr,
    )
    return EXIT_OK


# --- simulate -----------------------------------------------------------------


def _read_config_file(path: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    try:
        with open(path) as fh:
            for i, line in enumerate(fh, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise InputError(f"{path}: line {i}: expected key=value, got {line!r}")
                key, value = line.split("=", 1)
                entries[key.strip()] = value.strip()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}")
    return entries


_SIM_DEFAULTS = {
    "dt": "0.001",
    "steps": "100000",
    "x0": "1,2",
    "f": "0,0",
    "a": "-1,0.5,0,-1",
    "b": "0.1,0.1",
}


def cmd_simulate(args) -> int:
    config = dict(_SIM_DEFAULTS)
    digests = {}
    if args.config:
        file_cfg = _read_config_file(args.config)
        unknown = set(file_cfg) - set(_SIM_DEFAULTS) - {"seed"}
        if unknown:
            raise InputError(f"unknown config keys: {sorted(unknown)}")
        config.update(file_cfg)
        digests[args.config] = _sha256(args.config)
    for key in ("dt", "steps", "x0", "f", "a", "b"):
        flag = getattr(args, key)
        if flag is not None:
            config[key] = str(flag)
    if args.seed is not None:
        seed = args.seed
    elif "seed" in config:
        seed = int(config["seed"])
    else:
        seed = _env_seed()

    try:
        dt = float(config["dt"])
        n_steps = int(config["steps"])
    except ValueError as exc:
        raise InputError(f"bad simulate configuration: {exc}")
    x0 = _parse_floats(config["x0"], 2, "x0")
    model = LinearModel2D(
        f=np.array(_parse_floats(config["f"], 2, "f")),
        a=np.array(_parse_floats(config["a"], 4, "a")).reshape(2, 2),
        b1=_parse_floats(config["b"], 2, "b")[0],
        b2=_parse_floats(config["b"], 2, "b")[1],
    )
    try:
        cfg = SimConfig(model, (x0[0], x0[1]), dt, n_steps, seed)
    except ValueError as exc:
        raise InputError(str(exc))
    x1, x2 = simulate(cfg)

    manifest = RunManifest(
        command="simulate",
        parameters={**config, "seed": seed},
        input_digests=digests,
    )
    out, close = _open_out(args.out)
    try:
        out.write(f"# manifest: {manifest.json_line()}\n")
        out.write("t,x1,x2\n")
        for i in range(len(x1)):
            out.write(f"{i * dt:.17g},{x1.values[i]:.17g},{x2.values[i]:.17g}\n")
    finally:
        if close:
            out.close()
    if close:
        print(f"wrote {len(x1)} rows to {args.out}", file=sys.stderr)
    return EXIT_OK


# --- theory -------------------------------------------------------------------


def cmd_theory(args) -> int:
    model = _model_from_args(args)
    sigma = stationary_covariance(model)
    t21_inf, t12_inf = analytic_flows(model, sigma)

    mu0 = _parse_floats(args.mu0, 2, "--mu0")
    s0 = _parse_floats(args.sigma0, 3, "--sigma0")
    init = MomentState(
        mu=np.array(mu0), sigma=np.array([[s0[0], s0[1]], [s0[1], s0[2]]]), t=0.0
    )
    trajectory = integrate_moments(model, init, args.t_end, args.dt)

    manifest = RunManifest(
        command="theory",
        parameters={
            "f": args.f,
            "a": args.a,
            "b": args.b,
            "mu0": args.mu0,
            "sigma0": args.sigma0,
            "t_end": args.t_end,
            "dt": args.dt,
        },
    )
    out, close = _open_out(args.out)
    try:
        out.write(f"# manifest: {manifest.json_line()}\n")
        out.write("t,mu1,mu2,s11,s12,s22,t21,t12\n")
        for state in trajectory:
            t21, t12 = analytic_flows(model, state.sigma)
            out.write(
                f"{state.t:.17g},{state.mu[0]:.17g},{state.mu[1]:.17g},"
                f"{state.sigma[0, 0]:.17g},{state.sigma[0, 1]:.17g},"
                f"{state.sigma[1, 1]:.17g},{t21:.17g},{t12:.17g}\n"
            )
    finally:
        if close:
            out.close()
    print(
        json.dumps(
            {
                "stationary_sigma": [
                    [sigma[0, 0], sigma[0, 1]],
                    [sigma[1, 0], sigma[1, 1]],
                ],
                "t21": t21_inf,
                "t12": t12_inf,
                "manifest": manifest.to_dict(),
            },
            sort_keys=True,
        ),
        file=sys.stderr,
    )
    return EXIT_OK


# --- map ----------------------------------------------------------------------


def cmd_map(args) -> int:
    field_grid = load_grid(args.grid_manifest)
    index, _ = load_csv(args.index, args.index_col, args.index_col, field_grid.dt)
    flow_map = map_flows(index, field_grid, alpha=args.alpha)

    digests = {args.grid_manifest: _sha256(args.grid_manifest), args.index: _sha256(args.index)}
    manifest = RunManifest(
        command="map",
        parameters={
            "index": args.index,
            "index_col": args.index_col,
            "grid_manifest": args.grid_manifest,
            "alpha": args.alpha,
        },
        input_digests=digests,
    )
    paths = write_flow_maps(flow_map, args.out_dir, f"manifest: {manifest.json_line()}")
    n_cells = int(field_grid.mask.sum())
    n_sig_i2f = int(flow_map.significant_index_to_field.sum())
    n_sig_f2i = int(flow_map.significant_field_to_index.sum())
    print(
        f"{n_cells} unmasked cells; significant index->field: {n_sig_i2f}, "
        f"field->index: {n_sig_f2i}; outputs in {args.out_dir}",
        file=sys.stderr,
    )
    for path in paths.values():
        print(path, file=sys.stderr)
    return EXIT_OK


# --- validate -------------------------------------------------------------------


def cmd_validate(args) -> int:
    seed = args.seed if args.seed is not None else _env_seed(FIXTURE_SEEDS[0])
    manifest = RunManifest(
        command="validate", parameters={"seed": seed, "band_scale": args.band_scale}
    )
    rows = run_validation(seed, band_scale=args.band_scale)
    print(f"# manifest: {manifest.json_line()}")
    print(f"{'check':44s} {'value':>12s} {'reference':>10s} {'band':>24s} result")
    failed = []
    for row in rows:
        ref = f"{row.reference:.4g}" if row.reference is not None else "-"
        if row.lo is not None and row.hi is not None:
            band = f"[{row.lo:.4g}, {row.hi:.4g}]"
        elif row.lo is not None:
            band = f"> {row.lo:.4g}"
        else:
            band = "-"
        if row.passed is None:
            result = "info"
        elif row.passed:
            result = "pass"
        else:
            result = "FAIL"
            failed.append(row.name)
        print(f"{row.name:44s} {row.value:12.5g} {ref:>10s} {band:>24s} {result}")
    if failed:
        print(f"{len(failed)} band(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_VALIDATION
    print("all bands pass", file=sys.stderr)
    return EXIT_OK


# --- parser -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infoflow",
        description="Information-flow causality rates between two time series.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="estimate flow rates between two CSV columns")
    p.add_argument("--input", required=True, help="CSV file with a header row")
    p.add_argument("--x1", required=True, help="column name of the target series x1")
    p.add_argument("--x2", required=True, help="column name of the source series x2")
    p.add_argument("--dt", required=True, type=float, help="sampling step in time units")
    p.add_argument("--subsample", type=int, default=1, metavar="N", help="keep every N-th sample")
    p.add_argument("--window", metavar="T1:T2", help="analyze user times [T1, T2] only")
    p.add_argument(
        "--star-window",
        metavar="T1:T2",
        help="stationary slab for the starred covariance ratio (nonstationary variant)",
    )
    p.add_argument(
        "--detrend-star",
        action="store_true",
        help="remove a linear trend from the star slab before the starred covariances",
    )
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--ci", choices=("fisher", "bootstrap"), default="fisher")
    p.add_argument("--n-boot", type=int, default=1000)
    p.add_argument("--block-len", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--time-unit", default="unit-time", help="label for reported units")
    p.add_argument("--output", default=None, help="write the JSON result here (default stdout)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="generate a sample path of the 2-D linear SDE")
    p.add_argument("--config", help="key=value file with dt/steps/x0/f/a/b/seed")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--x0", default=None, help="initial point, e.g. '1,2'")
    p.add_argument("--f", default=None, help="drift constants, e.g. '0,0'")
    p.add_argument("--a", default=None, help="drift matrix row-major, e.g. '-1,0.5,0,-1'")
    p.add_argument("--b", default=None, help="diagonal diffusion, e.g. '0.1,0.1'")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("theory", help="moment trajectory and analytic stationary flows")
    p.add_argument("--f", default="0,0")
    p.add_argument("--a", default="-1,0.5,0,-1")
    p.add_argument("--b", default="0.1,0.1")
    p.add_argument("--mu0", default="1,2")
    p.add_argument("--sigma0", default="0.1,0,0.1", help="initial s11,s12,s22")
    p.add_argument("--t-end", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--out", default=None, help="trajectory CSV path (default stdout)")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("map", help="flow maps between an index series and a gridded field")
    p.add_argument("--index", required=True, help="CSV with the index series")
    p.add_argument("--index-col", default="index")
    p.add_argument("--grid-manifest", required=True)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("validate", help="run the reference validation harness")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument(
        "--band-scale",
        type=float,
        default=1.0,
        help="scale all band half-widths (harness testing hook)",
    )
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, OSError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
