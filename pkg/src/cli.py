"""``ablate`` command line: train, eval, stats, sweep, compare, plotdata.

Exit codes: 0 success, 1 usage, 2 data or validation, 3 runtime. Failures
print one stderr line ``ablate: error[<category>]: <message>``.
"""

import argparse
import json
import logging
import sys
from pathlib import Path

from pydantic import ValidationError

from src import __version__
from src.config.settings import (
    configure_logging,
    get_default_seed,
    get_default_top_k,
    get_models_dir,
    get_reference_manifest_path,
    get_workers,
)
from src.data.dataset import normalize
from src.data.idx import load_idx
from src.data.synthetic import SyntheticSpec, synth_dataset
from src.errors import AblateError, DataError, UsageError
from src.harness.analysis import cell_accuracies, compare_cells
from src.harness.export import export, load_result, write_plot_series
from src.harness.schemas import CellKey, SweepConfig
from src.harness.sweep import run_sweep
from src.model.network import build_network, evaluate
from src.model.param_stats import network_param_stats
from src.model.schemas import NetworkManifest, infer_shapes
from src.model.serialization import load, save
from src.model.training import TrainConfig, train, write_history_csv
from src.stats.metrics import chance_level, mean_std

logger = logging.getLogger(__name__)

PROG = "ablate"
STATS_COLUMNS = ["layer", "size", "mean", "median", "sigma", "min", "max", "kurtosis", "skew"]
SYNTHETIC_FLAGS = ("classes", "per_class", "test_per_class", "image_size", "noise")


class CommandParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit 1 with the machine-readable prefix."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(UsageError.exit_code, f"{PROG}: error[usage]: {message}\n")


def _default_model_path():
    return str(Path(get_models_dir()) / "desk.ablate")


def _read_json(path):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise DataError(f"{path} must hold a JSON object")
    return data


def _synthetic_fields(args):
    return {name: getattr(args, name) for name in SYNTHETIC_FLAGS if getattr(args, name) is not None}


def _load_split(args, split):
    """Dataset named by the dataset flags; `split` picks the synthetic half."""
    if args.images or args.labels:
        if args.synthetic:
            raise UsageError("--images/--labels and --synthetic are mutually exclusive")
        if not (args.images and args.labels):
            raise UsageError("--images and --labels must be given together")
        dataset = load_idx(args.images, args.labels)
    elif args.synthetic:
        spec = SyntheticSpec(**_synthetic_fields(args))
        dataset = getattr(synth_dataset(spec, args.data_seed or 0), split)
    else:
        raise UsageError("name a dataset with --images/--labels or --synthetic")
    if args.normalize is not None:
        dataset = normalize(dataset, *args.normalize)
    return dataset


def _fmt(value):
    return "n/a" if value is None else f"{value:.4g}"


def cmd_train(args):
    """Build a network from a manifest, train it and save container plus history."""
    overrides = _read_json(args.config) if args.config else {}
    flags = {
        "epochs": args.epochs,
        "batch_size": args.batch_size,
        "learning_rate": args.learning_rate,
        "momentum": args.momentum,
        "seed": args.seed,
    }
    overrides.update({key: value for key, value in flags.items() if value is not None})
    if "seed" not in overrides:
        overrides["seed"] = get_default_seed()
    config = TrainConfig.model_validate(overrides)

    manifest = NetworkManifest.model_validate(_read_json(args.manifest))
    infer_shapes(manifest)
    train_set = _load_split(args, "train")
    network = build_network(manifest, seed=config.seed)
    print(f"Training {manifest.name} on {len(train_set)} images for {config.epochs} epoch(s)")
    trained, history = train(network, train_set, config)

    out = save(trained, args.out)
    history_path = Path(args.history) if args.history else out.with_suffix(".history.csv")
    write_history_csv(history, history_path)
    for row in history:
        print(f"  epoch {row.epoch}: loss {row.loss:.4f}  train top-1 {row.train_top1:.4f}")
    print(f"Model: {out}")
    print(f"History: {history_path}")
    if args.synthetic:
        test_set = _load_split(args, "test")
        print(f"Test top-1: {evaluate(trained, test_set, ks=(1,))[1]:.4f}")
    return 0


def cmd_eval(args):
    """Baseline top-1 and top-k accuracy of a saved model, plus chance level."""
    network = load(args.model)
    dataset = _load_split(args, "test")
    k = args.top_k if args.top_k is not None else get_default_top_k()
    scores = evaluate(network, dataset, ks=sorted({1, k}))
    print(f"images: {len(dataset)}")
    for key in sorted(scores):
        print(f"top-{key} accuracy: {scores[key]!r}")
    print(f"chance top-{k}: {chance_level(dataset.class_frequencies(), k)!r}")
    return 0


def cmd_stats(args):
    """Descriptive statistics of every parameter tensor, one row each."""
    network = load(args.model)
    rows = network_param_stats(network)
    if args.format == "csv":
        print(",".join(STATS_COLUMNS))
        for name, s in rows:
            values = [s.mean, s.median, s.sigma, s.min, s.max, s.kurtosis, s.skew]
            print(",".join([name, str(s.size)] + ["" if v is None else repr(v) for v in values]))
        return 0
    print(f"{'layer':<14}{'size':>8}" + "".join(f"{c:>12}" for c in STATS_COLUMNS[2:]))
    for name, s in rows:
        values = [s.mean, s.median, s.sigma, s.min, s.max, s.kurtosis, s.skew]
        print(f"{name:<14}{s.size:>8}" + "".join(f"{_fmt(v):>12}" for v in values))
    return 0


def _sweep_config(args):
    """Merge flags over the JSON config over environment defaults."""
    data = _read_json(args.config) if args.config else {}
    if args.images or args.labels:
        if args.synthetic:
            raise UsageError("--images/--labels and --synthetic are mutually exclusive")
        data.update(images_path=args.images, labels_path=args.labels, synthetic=None)
    elif args.synthetic or _synthetic_fields(args):
        synthetic = dict(data.get("synthetic") or {})
        synthetic.update(_synthetic_fields(args))
        data.update(synthetic=synthetic, images_path=None, labels_path=None)
    flags = {
        "model_path": args.model,
        "data_seed": args.data_seed,
        "normalize": args.normalize,
        "treatments": args.treatment,
        "layers": args.layers,
        "magnitudes": args.magnitudes,
        "trials": args.trials,
        "top_k": args.top_k,
        "seed": args.seed,
        "eval_subset": args.eval_subset,
        "workers": args.workers,
    }
    if args.treatment:
        data.pop("treatment", None)
    data.update({key: value for key, value in flags.items() if value is not None})
    defaults = {
        "model_path": _default_model_path,
        "top_k": get_default_top_k,
        "seed": get_default_seed,
        "workers": get_workers,
    }
    for key, getter in defaults.items():
        if key not in data:
            data[key] = getter()
    return SweepConfig.model_validate(data)


def cmd_sweep(args):
    """Run a perturbation sweep and export its trial records."""
    config = _sweep_config(args)
    fmt = args.format or ("json" if Path(args.out).suffix.lower() == ".json" else "csv")
    result = run_sweep(config)
    path = export(result, fmt, args.out)
    print(f"baseline top-{config.top_k}: {result.baseline!r}")
    for cell in result.cells:
        print(
            f"  {cell.treatment:<17} {cell.layer:<10} {cell.magnitude:<6g} "
            f"{cell.mean:.4f} +/- {cell.std:.4f}  (n={cell.trials})"
        )
    print(f"Wrote {len(result.records)} trials to {path}")
    return 0


def cmd_compare(args):
    """Wilcoxon rank-sum test between two cells of a saved sweep result."""
    result = load_result(args.result)
    cell_a, cell_b = CellKey.parse(args.a), CellKey.parse(args.b)
    test = compare_cells(result, cell_a, cell_b)
    for label, cell in (("A", cell_a), ("B", cell_b)):
        values = cell_accuracies(result, cell)
        mean, std = mean_std(values)
        print(f"{label}  {cell}  mean {mean:.4f} +/- {std:.4f} (n={len(values)})")
    print(f"rank-sum statistic: {test.statistic!r}")
    print(f"p-value: {test.p_value!r}")
    print(f"method: {test.method}")
    return 0


def cmd_plotdata(args):
    """Write one magnitude/mean/std series file per (treatment, layer)."""
    result = load_result(args.result)
    paths = write_plot_series(result, args.out_dir)
    for path in paths:
        print(path)
    print(f"{len(paths)} series written to {args.out_dir}")
    return 0


def _add_dataset_flags(parser):
    group = parser.add_argument_group("dataset")
    group.add_argument("--images", help="IDX image file")
    group.add_argument("--labels", help="IDX label file")
    group.add_argument("--synthetic", action="store_true", help="use the generated dataset")
    group.add_argument("--classes", type=int, help="synthetic class count (default 10)")
    group.add_argument("--per-class", type=int, help="synthetic train images per class (default 200)")
    group.add_argument("--test-per-class", type=int, help="synthetic test images per class")
    group.add_argument("--image-size", type=int, help="synthetic image side (default 16)")
    group.add_argument("--noise", type=float, help="synthetic pixel noise std (default 0.1)")
    group.add_argument("--data-seed", type=int, help="synthetic generation seed (default 0)")
    group.add_argument(
        "--normalize", type=float, nargs=2, metavar=("MEAN", "STD"), help="map x to (x - MEAN) / STD"
    )


def build_parser():
    parser = CommandParser(prog=PROG, description="CNN fault injection and robustness sweeps")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING (default: ABLATE_LOG_LEVEL or WARNING)")
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = commands.add_parser("train", help="train a network and save a model container")
    p.add_argument("--manifest", default=get_reference_manifest_path(), help="network manifest JSON")
    p.add_argument("--config", help="JSON file with training hyperparameters")
    p.add_argument("--epochs", type=int)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--learning-rate", "--lr", type=float)
    p.add_argument("--momentum", type=float)
    p.add_argument("--seed", type=int, help="initialization and shuffling seed")
    p.add_argument("--out", default=_default_model_path(), help="model container path")
    p.add_argument("--history", help="history CSV path (default: next to --out)")
    _add_dataset_flags(p)
    p.set_defaults(handler=cmd_train)

    p = commands.add_parser("eval", help="top-k accuracy of a saved model")
    p.add_argument("--model", default=_default_model_path())
    p.add_argument("--top-k", type=int, help="k (default: ABLATE_TOP_K or 5)")
    _add_dataset_flags(p)
    p.set_defaults(handler=cmd_eval)

    p = commands.add_parser("stats", help="descriptive statistics of every parameter tensor")
    p.add_argument("--model", default=_default_model_path())
    p.add_argument("--format", choices=["table", "csv"], default="table")
    p.set_defaults(handler=cmd_stats)

    p = commands.add_parser("sweep", help="run a perturbation sweep")
    p.add_argument("--config", help="JSON sweep config; flags override its fields")
    p.add_argument("--model", help="model container path")
    p.add_argument(
        "--treatment",
        action="append",
        choices=["synapse_knockout", "node_knockout", "gaussian"],
        help="treatment to sweep (repeatable)",
    )
    p.add_argument("--layers", nargs="+", help="layers to perturb, one at a time")
    p.add_argument("--magnitudes", type=float, nargs="+", help="proportions or sigma multiples")
    p.add_argument("--trials", type=int, help="trials per cell (default 5)")
    p.add_argument("--top-k", type=int, help="k (default: ABLATE_TOP_K or 5)")
    p.add_argument("--seed", type=int, help="base seed (default: ABLATE_SEED or 0)")
    p.add_argument("--eval-subset", type=int, help="evaluate on a fixed subset of this size")
    p.add_argument("--workers", type=int, help="worker processes (default: ABLATE_WORKERS or 1)")
    p.add_argument("--out", required=True, help="result file (.csv or .json)")
    p.add_argument("--format", choices=["csv", "json"], help="default: from the --out suffix")
    _add_dataset_flags(p)
    p.set_defaults(handler=cmd_sweep)

    p = commands.add_parser("compare", help="rank-sum test between two sweep cells")
    p.add_argument("--result", required=True, help="sweep result (.csv or .json)")
    p.add_argument("--a", required=True, metavar="TREATMENT:LAYER:MAGNITUDE")
    p.add_argument("--b", required=True, metavar="TREATMENT:LAYER:MAGNITUDE")
    p.set_defaults(handler=cmd_compare)

    p = commands.add_parser("plotdata", help="per-layer magnitude/mean/std series files")
    p.add_argument("--result", required=True, help="sweep result (.csv or .json)")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(handler=cmd_plotdata)
    return parser


def _report(category, message, code):
    first_line = str(message).strip().splitlines()[0] if str(message).strip() else type(message).__name__
    print(f"{PROG}: error[{category}]: {first_line}", file=sys.stderr)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        configure_logging(args.log_level)
    except ValueError as exc:
        return _report("usage", f"bad --log-level: {exc}", UsageError.exit_code)
    try:
        return args.handler(args)
    except ValidationError as exc:
        logger.debug("validation failed", exc_info=True)
        first = exc.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or exc.title
        return _report("data", f"{where}: {first['msg']}", DataError.exit_code)
    except AblateError as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        return _report(exc.category, exc, exc.exit_code)
    except OSError as exc:
        return _report("runtime", exc, AblateError.exit_code)


if __name__ == "__main__":
    sys.exit(main())
