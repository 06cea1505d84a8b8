"""Command-line front end.

Subcommands: render, reconstruct, scalogram, gradcheck, boundcheck, train,
evaluate.  Every run is deterministic given the config file plus --seed; the
environment is never consulted.  Outputs land under --out with fixed names:
delimited data (CSV/JSON) plus a rendered PNG per report.

Exit codes: 0 success, 2 usage or configuration error, 3 numerical failure.
Failures print a single JSON line to stderr.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

import numpy as np

from . import figures
from .cwt import admissibility_check, scale_grid, scalogram
from .data import (
    CLASS_NAMES,
    EmptyDataset,
    ParseError,
    load_heartbeats,
    synthesize_dataset,
    synthesize_heartbeat,
    split_dataset,
)
from .derivatives import jacobian_check
from .network import (
    NetworkConfig,
    NonFiniteActivation,
    evaluate,
    load_model,
    save_history,
    save_model,
    train,
)
from .varpro import (
    Divergence,
    SupportViolation,
    bound_convergence_study,
    error_bound,
    estimate_derivative,
    fit_signal,
)
from .wavelets import (
    DegenerateWavelet,
    MotherShape,
    SampleGrid,
    build_wavelet_matrix,
    eval_mother,
    random_eta,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3

GRADCHECK_TOLERANCE = 1e-5
SLOPE_BAND = (0.8, 1.2)

# Fixed output names per subcommand, all written under --out.
OUTPUT_FILES = {
    "render": ("wavelet.csv", "admissibility.json", "wavelet.png"),
    "reconstruct": ("reconstruction.csv", "reconstruction.json", "reconstruction.png"),
    "scalogram": ("scalogram.csv", "scalogram.png"),
    "gradcheck": ("gradcheck.csv", "gradcheck.json", "gradcheck.png"),
    "boundcheck": ("boundcheck.csv", "boundcheck.json", "boundcheck.png"),
    "train": ("model.json", "history.csv", "training.png"),
    "evaluate": ("metrics.json", "evaluation.png"),
}

# Config schema: one section per subcommand plus [common]; anything else is
# rejected so typos never pass silently.
CONFIG_KEYS = {
    "common": {"seed", "out"},
    "render": {"p", "n", "points", "half_width"},
    "reconstruct": {
        "m", "p", "n", "steps", "learning_rate", "mother",
        "signal", "beats", "record", "synthetic", "noise_level",
    },
    "scalogram": {
        "p", "n", "scales", "low", "high", "spacing",
        "signal", "beats", "record", "synthetic", "noise_level",
    },
    "gradcheck": {"draws", "m", "p", "n", "grid_points"},
    "boundcheck": {"signals", "m", "p", "n"},
    "train": {
        "train", "synthetic_size", "veb_fraction", "noise_level", "val_fraction",
        "epochs", "m", "p", "n", "hidden_units", "alpha", "learning_rate",
        "batch_size", "mother", "init_scheme", "patience", "veb_weight",
    },
    "evaluate": {"model", "test", "synthetic_size", "veb_fraction", "noise_level"},
}


class UsageError(ValueError):
    """Bad flags, bad config, or missing inputs; maps to exit code 2."""


class _Parser(argparse.ArgumentParser):
    # argparse would print usage and sys.exit(2); route through our JSON path.
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    shared = _Parser(add_help=False)
    shared.add_argument("--config", help="INI config file with per-subcommand sections")
    shared.add_argument("--seed", type=int, help="seed for every random draw (default 0)")
    shared.add_argument("--out", help="output directory (default .)")

    parser = _Parser(prog="rgwave", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", parents=[shared], help="sample one random mother wavelet")
    p.add_argument("--p", type=int, help="number of adjustable polynomial roots (default 10)")
    p.add_argument("--n", type=int, help="number of pole quadruples (default 3)")
    p.add_argument("--points", type=int, help="grid size (default 4096)")
    p.add_argument("--half-width", type=float, help="grid half width (default 8.0)")

    p = sub.add_parser("reconstruct", parents=[shared], help="fit a signal by residual descent")
    p.add_argument("--m", type=int, help="number of wavelets (default 8)")
    p.add_argument("--p", type=int, help="adjustable roots (default 3)")
    p.add_argument("--n", type=int, help="pole quadruples (default 4)")
    p.add_argument("--steps", type=int, help="optimizer steps (default 600)")
    p.add_argument("--learning-rate", type=float, help="Adam step size (default 0.02)")
    p.add_argument("--mother", choices=("rgw", "ricker"), help="mother family (default rgw)")
    _add_signal_source(p)

    p = sub.add_parser("scalogram", parents=[shared], help="coefficient magnitudes on a scale grid")
    p.add_argument("--p", type=int, help="adjustable roots of the analyzing mother (default 3)")
    p.add_argument("--n", type=int, help="pole quadruples of the analyzing mother (default 4)")
    p.add_argument("--scales", type=int, help="number of scales (default 25)")
    p.add_argument("--low", type=float, help="smallest scale (default 0.1)")
    p.add_argument("--high", type=float, help="largest scale (default 1.5)")
    p.add_argument("--spacing", choices=("linear", "octave"), help="scale spacing (default linear)")
    _add_signal_source(p)

    p = sub.add_parser("gradcheck", parents=[shared], help="analytic vs numeric derivatives")
    p.add_argument("--draws", type=int, help="number of random parameter draws (default 10)")
    p.add_argument("--m", type=int, help="wavelets per draw (default 3)")
    p.add_argument("--p", type=int, help="adjustable roots (default 2)")
    p.add_argument("--n", type=int, help="pole quadruples (default 2)")
    p.add_argument("--grid-points", type=int, help="sampling grid size (default 120)")

    p = sub.add_parser("boundcheck", parents=[shared], help="projection error bound vs observation")
    p.add_argument("--signals", type=int, help="number of smooth test signals (default 20)")
    p.add_argument("--m", type=int, help="wavelets per signal (default 3)")
    p.add_argument("--p", type=int, help="adjustable roots (default 2)")
    p.add_argument("--n", type=int, help="pole quadruples (default 2)")

    p = sub.add_parser("train", parents=[shared], help="train the classifier")
    p.add_argument("--train", dest="train", help="heartbeat CSV (default: synthesized)")
    p.add_argument("--synthetic-size", type=int, help="records to synthesize without --train (default 2000)")
    p.add_argument("--veb-fraction", type=float, help="synthetic ectopic share (default 0.2)")
    p.add_argument("--noise-level", type=float, help="synthetic noise level (default 0.05)")
    p.add_argument("--val-fraction", type=float, help="validation share (default 0.2)")
    p.add_argument("--epochs", type=int, help="training epochs (default 50)")
    p.add_argument("--m", type=int, help="wavelets (default 10)")
    p.add_argument("--p", type=int, help="adjustable roots (default 3)")
    p.add_argument("--n", type=int, help="pole quadruples (default 4)")
    p.add_argument("--hidden-units", type=int, help="hidden layer width (default 15)")
    p.add_argument("--alpha", type=float, help="projection penalty weight (default 0.1)")
    p.add_argument("--learning-rate", type=float, help="Adam step size (default 1e-3)")
    p.add_argument("--batch-size", type=int, help="mini-batch size (default 32)")
    p.add_argument("--mother", choices=("rgw", "ricker"), help="mother family (default rgw)")
    p.add_argument("--init-scheme", choices=("random", "spread"), help="initialization (default random)")
    p.add_argument("--patience", type=int, help="early-stopping patience (default 20)")
    p.add_argument("--veb-weight", type=float, help="positive-class loss weight (default 1.0)")

    p = sub.add_parser("evaluate", parents=[shared], help="score a trained model")
    p.add_argument("--model", help="model JSON written by train (required)")
    p.add_argument("--test", help="heartbeat CSV (default: synthesized)")
    p.add_argument("--synthetic-size", type=int, help="records to synthesize without --test (default 1000)")
    p.add_argument("--veb-fraction", type=float, help="synthetic ectopic share (default 0.2)")
    p.add_argument("--noise-level", type=float, help="synthetic noise level (default 0.05)")

    return parser


def _add_signal_source(p) -> None:
    p.add_argument("--signal", help="plain text file, one sample per line")
    p.add_argument("--beats", help="heartbeat CSV to take one record from")
    p.add_argument("--record", type=int, help="row of --beats to use (default 0)")
    p.add_argument("--synthetic", choices=sorted(CLASS_NAMES), help="synthesize one beat (default veb)")
    p.add_argument("--noise-level", type=float, help="noise for --synthetic (default 0.0)")


def _load_config(path: str) -> dict[str, dict[str, str]]:
    file = Path(path)
    if not file.is_file():
        raise UsageError(f"config file not found: {path}")
    parser = configparser.ConfigParser()
    try:
        parser.read(file)
    except configparser.Error as exc:
        raise UsageError(f"bad config file: {exc}") from None
    out: dict[str, dict[str, str]] = {}
    for section in parser.sections():
        if section not in CONFIG_KEYS:
            raise UsageError(f"unknown config section [{section}]")
        known = CONFIG_KEYS[section]
        values = dict(parser.items(section))
        for key in values:
            if key not in known:
                raise UsageError(f"unknown key {key!r} in config section [{section}]")
        out[section] = values
    return out


class Options:
    """CLI > config > default resolution for one subcommand."""

    def __init__(self, args: argparse.Namespace, config: dict[str, dict[str, str]]):
        self.args = args
        self.common = config.get("common", {})
        self.section = config.get(args.command, {})

    def _from_config(self, table, key, cast):
        raw = table.get(key)
        if raw is None:
            return None
        try:
            return cast(raw)
        except ValueError:
            raise UsageError(f"config value {key} = {raw!r} is not a valid {cast.__name__}") from None

    def get(self, key: str, cast, default):
        cli = getattr(self.args, key, None)
        if cli is not None:
            return cli
        value = self._from_config(self.section, key, cast)
        return default if value is None else value

    @property
    def seed(self) -> int:
        if self.args.seed is not None:
            return self.args.seed
        value = self._from_config(self.common, "seed", int)
        return 0 if value is None else value

    @property
    def out_dir(self) -> Path:
        if self.args.out is not None:
            return Path(self.args.out)
        value = self.common.get("out")
        return Path(value) if value is not None else Path(".")


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise UsageError(message)


def _input_file(path_str: str | None, what: str) -> Path | None:
    if path_str is None:
        return None
    path = Path(path_str)
    if not path.is_file():
        raise UsageError(f"{what} not found: {path_str}")
    return path


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_cell(value) for value in row) + "\n")


def _cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _random_shape(rng: np.random.Generator, p: int, n: int) -> MotherShape:
    return MotherShape(
        zeros=rng.uniform(0.5, 2.5, size=p),
        pole_reals=rng.uniform(-1.0, 1.0, size=n),
        pole_imags_raw=rng.uniform(0.5, 1.5, size=n),
    )


def _load_signal(opts: Options) -> tuple[np.ndarray, str]:
    """Signal samples plus a short provenance string for the report."""
    signal_path = opts.get("signal", str, None)
    beats_path = opts.get("beats", str, None)
    synthetic = opts.get("synthetic", str, None)
    chosen = [name for name, value in (
        ("--signal", signal_path), ("--beats", beats_path), ("--synthetic", synthetic),
    ) if value is not None]
    _require(len(chosen) <= 1, f"pick one signal source, got {' and '.join(chosen)}")

    if signal_path is not None:
        path = _input_file(signal_path, "signal file")
        try:
            samples = np.loadtxt(path, dtype=float, ndmin=1)
        except ValueError as exc:
            raise UsageError(f"cannot parse signal file {signal_path}: {exc}") from None
        _require(samples.ndim == 1 and samples.size >= 2, "signal file must hold one column of at least two samples")
        _require(bool(np.all(np.isfinite(samples))), "signal file contains non-finite samples")
        return samples, str(path)
    if beats_path is not None:
        path = _input_file(beats_path, "heartbeat file")
        record = opts.get("record", int, 0)
        dataset = load_heartbeats(path)
        _require(0 <= record < len(dataset), f"--record {record} out of range for {len(dataset)} records")
        return dataset.records[record].samples.copy(), f"{path}:{record}"
    klass = synthetic if synthetic is not None else "veb"
    noise = opts.get("noise_level", float, 0.0)
    beat = synthesize_heartbeat(seed=opts.seed, klass=klass, noise_level=noise)
    return beat.samples.copy(), beat.source_id


# --- subcommands -------------------------------------------------------------


def cmd_render(opts: Options) -> None:
    p = opts.get("p", int, 10)
    n = opts.get("n", int, 3)
    points = opts.get("points", int, 4096)
    half_width = opts.get("half_width", float, 8.0)
    _require(p >= 0, "--p must be >= 0")
    _require(n >= 1, "--n must be >= 1")
    _require(points >= 16, "--points must be >= 16")
    _require(half_width > 0, "--half-width must be positive")

    shape = _random_shape(np.random.default_rng(opts.seed), p, n)
    grid = SampleGrid.symmetric(half_width, points)
    values = eval_mother(shape, grid.points)
    report = admissibility_check(shape)

    out = opts.out_dir
    _write_csv(out / "wavelet.csv", ["t", "psi"], zip(grid.points, values))
    _write_json(out / "admissibility.json", report.as_dict())
    figures.save_wavelet_figure(
        grid.points, values, out / "wavelet.png",
        label=f"rational Gaussian mother (p={p}, n={n}, seed={opts.seed})",
    )


def cmd_reconstruct(opts: Options) -> None:
    m = opts.get("m", int, 8)
    steps = opts.get("steps", int, 600)
    learning_rate = opts.get("learning_rate", float, 0.02)
    mother = opts.get("mother", str, "rgw")
    p = opts.get("p", int, 3)
    n = opts.get("n", int, 4)
    _require(m >= 1, "--m must be >= 1")
    _require(steps >= 0, "--steps must be >= 0")
    _require(learning_rate > 0, "--learning-rate must be positive")
    _require(mother in ("rgw", "ricker"), f"unknown mother {mother!r}")
    _require(p >= 0 and n >= 1, "--p must be >= 0 and --n >= 1")

    f, source = _load_signal(opts)
    grid = SampleGrid.signal(len(f))
    result = fit_signal(
        f, grid, m=m, mother=mother, p=p, n=n,
        steps=steps, learning_rate=learning_rate, seed=opts.seed,
    )

    out = opts.out_dir
    _write_csv(
        out / "reconstruction.csv",
        ["t", "signal", "reconstruction"],
        zip(grid.points, f, result.reconstruction),
    )
    _write_json(
        out / "reconstruction.json",
        {
            "source": source,
            "mother": result.mother,
            "m": m,
            "steps_run": result.steps_run,
            "relative_error": result.relative_error,
            "initial_energy": result.energy_history[0],
            "final_energy": result.energy_history[-1],
        },
    )
    figures.save_reconstruction_figure(
        grid.points, f, result.reconstruction, out / "reconstruction.png", result.relative_error
    )


def cmd_scalogram(opts: Options) -> None:
    count = opts.get("scales", int, 25)
    low = opts.get("low", float, 0.1)
    high = opts.get("high", float, 1.5)
    spacing = opts.get("spacing", str, "linear")
    p = opts.get("p", int, 3)
    n = opts.get("n", int, 4)
    _require(count >= 2, "--scales must be >= 2")
    _require(0 < low < high, "need 0 < --low < --high")
    _require(spacing in ("linear", "octave"), f"unknown spacing {spacing!r}")
    _require(p >= 0 and n >= 1, "--p must be >= 0 and --n >= 1")

    f, source = _load_signal(opts)
    grid = SampleGrid.signal(len(f))
    shape = _random_shape(np.random.default_rng(opts.seed), p, n)
    scales = scale_grid(count, low, high, spacing)
    gram = scalogram(f, shape, scales, grid.points, grid)

    out = opts.out_dir
    rows = (
        (lam, tau, gram.magnitudes[i, j])
        for i, lam in enumerate(gram.scales)
        for j, tau in enumerate(gram.translations)
    )
    _write_csv(out / "scalogram.csv", ["scale", "translation", "magnitude"], rows)
    figures.save_scalogram_figure(
        gram.scales, gram.translations, gram.magnitudes, out / "scalogram.png"
    )


def cmd_gradcheck(opts: Options) -> None:
    draws = opts.get("draws", int, 10)
    m = opts.get("m", int, 3)
    p = opts.get("p", int, 2)
    n = opts.get("n", int, 2)
    grid_points = opts.get("grid_points", int, 120)
    _require(draws >= 1, "--draws must be >= 1")
    _require(m >= 1 and n >= 1 and p >= 0, "--m and --n must be >= 1, --p >= 0")
    _require(grid_points >= 8, "--grid-points must be >= 8")

    grid = SampleGrid.signal(grid_points)
    rng = np.random.default_rng(opts.seed)
    rows = []
    worst: dict[str, float] = {}
    for draw in range(draws):
        eta = random_eta(rng, m, p, n)
        report = jacobian_check(eta, grid)
        for block, error in report.items():
            rows.append((draw, block, error))
            worst[block] = max(worst.get(block, 0.0), error)
    passed = max(worst.values()) < GRADCHECK_TOLERANCE

    out = opts.out_dir
    _write_csv(out / "gradcheck.csv", ["draw", "block", "max_relative_error"], rows)
    _write_json(
        out / "gradcheck.json",
        {
            "draws": draws,
            "tolerance": GRADCHECK_TOLERANCE,
            "worst_by_block": worst,
            "passed": passed,
        },
    )
    figures.save_gradcheck_figure(worst, GRADCHECK_TOLERANCE, out / "gradcheck.png")
    if not passed:
        raise Divergence(
            f"gradient check failed: worst block error {max(worst.values()):.3e} "
            f">= {GRADCHECK_TOLERANCE:g}"
        )


def _bump_family(rng: np.random.Generator):
    # Width capped so the Gaussian window is far below 1e-6 of its peak at
    # the grid ends; the bound refuses signals without compact support.
    center = rng.uniform(0.8, 1.2)
    width = rng.uniform(0.08, 0.15)
    freq = rng.uniform(3.0, 9.0)

    def bump(t):
        return np.exp(-(((t - center) / width) ** 2)) * np.sin(freq * t)

    return bump


def cmd_boundcheck(opts: Options) -> None:
    n_signals = opts.get("signals", int, 20)
    m = opts.get("m", int, 3)
    p = opts.get("p", int, 2)
    n = opts.get("n", int, 2)
    _require(n_signals >= 1, "--signals must be >= 1")
    _require(m >= 1 and n >= 1 and p >= 0, "--m and --n must be >= 1, --p >= 0")

    rng = np.random.default_rng(opts.seed)
    grid = SampleGrid.signal(300)
    rows = []
    all_passed = True
    first_report = None
    slope_study = None
    for index in range(n_signals):
        bump = _bump_family(rng)
        eta = random_eta(rng, m, p, n, pole_imag_range=(0.2, 1.5))
        f = bump(grid.points)
        report = error_bound(
            build_wavelet_matrix(eta, grid), f, grid, estimate_derivative(f, grid.h)
        )
        if first_report is None:
            first_report = report
            slope_study = bound_convergence_study(bump, eta)
        all_passed = all_passed and report.passed
        for k, observed in enumerate(report.observed_errors):
            rows.append((index, k, observed, report.bound_rhs))

    assert slope_study is not None and first_report is not None
    slope_ok = SLOPE_BAND[0] <= slope_study.slope <= SLOPE_BAND[1]

    out = opts.out_dir
    _write_csv(out / "boundcheck.csv", ["signal", "coefficient", "observed", "bound_rhs"], rows)
    _write_json(
        out / "boundcheck.json",
        {
            "signals": n_signals,
            "all_bounds_hold": all_passed,
            "quadrature_slope": slope_study.slope,
            "slope_band": list(SLOPE_BAND),
            "slope_in_band": slope_ok,
            "passed": bool(all_passed and slope_ok),
        },
    )
    figures.save_boundcheck_figure(
        first_report.observed_errors,
        np.full_like(first_report.observed_errors, first_report.bound_rhs),
        out / "boundcheck.png",
    )
    if not (all_passed and slope_ok):
        raise Divergence(
            f"bound check failed: bounds hold={all_passed}, slope={slope_study.slope:.3f}"
        )


def cmd_train(opts: Options) -> None:
    train_path = _input_file(opts.get("train", str, None), "training file")
    synthetic_size = opts.get("synthetic_size", int, 2000)
    veb_fraction = opts.get("veb_fraction", float, 0.2)
    noise_level = opts.get("noise_level", float, 0.05)
    val_fraction = opts.get("val_fraction", float, 0.2)
    _require(synthetic_size >= 5, "--synthetic-size must be >= 5")
    _require(0 < val_fraction < 1, "--val-fraction must lie in (0, 1)")

    try:
        config = NetworkConfig(
            m=opts.get("m", int, 10),
            p=opts.get("p", int, 3),
            n=opts.get("n", int, 4),
            hidden_units=opts.get("hidden_units", int, 15),
            alpha=opts.get("alpha", float, 0.1),
            learning_rate=opts.get("learning_rate", float, 1e-3),
            epochs=opts.get("epochs", int, 50),
            batch_size=opts.get("batch_size", int, 32),
            seed=opts.seed,
            init_scheme=opts.get("init_scheme", str, "random"),
            mother=opts.get("mother", str, "rgw"),
            veb_weight=opts.get("veb_weight", float, 1.0),
            patience=opts.get("patience", int, 20),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    if train_path is not None:
        dataset = load_heartbeats(train_path, split_tag="train")
    else:
        dataset = synthesize_dataset(
            seed=opts.seed, size=synthetic_size,
            veb_fraction=veb_fraction, noise_level=noise_level,
        )
    train_set, val_set = split_dataset(dataset, val_fraction, seed=opts.seed)

    model = train(config, train_set, val_set)

    out = opts.out_dir
    save_model(model, out / "model.json")
    save_history(model.history, out / "history.csv")
    figures.save_training_figure(model.history, out / "training.png")


def cmd_evaluate(opts: Options) -> None:
    model_path = opts.get("model", str, None)
    _require(model_path is not None, "--model is required")
    model_file = _input_file(model_path, "model file")
    test_path = _input_file(opts.get("test", str, None), "test file")
    synthetic_size = opts.get("synthetic_size", int, 1000)
    veb_fraction = opts.get("veb_fraction", float, 0.2)
    noise_level = opts.get("noise_level", float, 0.05)
    _require(synthetic_size >= 1, "--synthetic-size must be >= 1")

    try:
        model = load_model(model_file)
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot load model {model_path}: {exc}") from None

    if test_path is not None:
        dataset = load_heartbeats(test_path, split_tag="test")
    else:
        dataset = synthesize_dataset(
            seed=opts.seed, size=synthetic_size,
            veb_fraction=veb_fraction, noise_level=noise_level, split_tag="test",
        )

    metrics = evaluate(model, dataset)

    out = opts.out_dir
    _write_json(out / "metrics.json", metrics.as_dict())
    figures.save_evaluation_figure(metrics, out / "evaluation.png")


COMMANDS = {
    "render": cmd_render,
    "reconstruct": cmd_reconstruct,
    "scalogram": cmd_scalogram,
    "gradcheck": cmd_gradcheck,
    "boundcheck": cmd_boundcheck,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
}


def _emit_error(kind: str, message: str) -> None:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_config(args.config) if args.config else {}
        opts = Options(args, config)
        opts.out_dir.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](opts)
    except UsageError as exc:
        _emit_error("usage", str(exc))
        return EXIT_USAGE
    except (ParseError, EmptyDataset) as exc:
        _emit_error("data", str(exc))
        return EXIT_USAGE
    except (
        Divergence,
        DegenerateWavelet,
        NonFiniteActivation,
        SupportViolation,
        np.linalg.LinAlgError,
    ) as exc:
        _emit_error("numerical", str(exc))
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
