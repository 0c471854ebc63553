"""
Command-line front end.

    hyperhate train      --model static --train data.csv [--test test.csv] --out run/
    hyperhate eval       --checkpoint run/checkpoint.json --test test.csv --out run/
    hyperhate predict    --checkpoint run/checkpoint.json --text "some text"
    hyperhate params     [--model dynamic]
    hyperhate experiment --model static,dynamic --train DV.csv --grid 0,5000,10000 --out exp/
    hyperhate gen-toy    --n 64 --noise 0 --out toy/

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from hyperhate.adapters.base import DefaultClassifierAdapterFactory
from hyperhate.errors import (
    CorruptInputError,
    DataError,
    ExperimentError,
    HyperHateError,
    IncompatibleCheckpointError,
    NumericalError,
    UsageError,
)
from hyperhate.models.example import GENERATED, HATE, NON_HATE, AugmentationSpec, Dataset
from hyperhate.models.params import ParamCount, ParamReport
from hyperhate.models.report import ExperimentSpec
from hyperhate.models.run_config import MODEL_KINDS, RunConfig
from hyperhate.services.checkpoint_service import load_checkpoint, save_checkpoint
from hyperhate.services.config_service import ConfigService
from hyperhate.services.data_service import (
    DEFAULT_MARKERS,
    SHIFTED_MARKERS,
    DataService,
    generate_toy_dataset,
    merge_augmentation,
    stratified_split,
    write_examples,
    write_generated,
)
from hyperhate.services.database_service import RESULTS_DB, DatabaseService
from hyperhate.services.evaluation_service import comparison_table, emit_comparison, emit_curves
from hyperhate.services.experiment_service import ExperimentService
from hyperhate.services.prediction_service import evaluate_model, predict_texts
from hyperhate.services.result_storage_service import ResultStorageService
from hyperhate.services.training_service import TrainingService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3

RUN_CONFIG_FILE = "run_config.txt"
COMMANDS = ("train", "eval", "predict", "params", "experiment", "gen-toy")


class ArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of exiting so the caller chooses the exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _add_common(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    add("--config", help="key=value file, e.g. a run_config.txt from an earlier run")
    add("--out", help="output directory")
    add("--seed", type=int)
    add("--log-level", dest="log_level", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    add("--format", choices=["csv", "tsv", "line-json"], help="input format (default: by extension)")
    add("--skip-bad-records", dest="skip_bad_records", action="store_const", const=True,
        help="skip unparseable records instead of failing")


def _add_data(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    add("--train", action="append", help="gold training file; repeat for a combined dataset")
    add("--test", action="append", help="gold test file matching the --train at the same position")
    add("--dataset", action="append", help="dataset name for the --train at the same position")
    add("--train-fraction", dest="train_fraction", type=float,
        help="stratified train share when no --test is given")
    add("--aug-hate", dest="aug_hate", help="generated hate records (text<TAB>class per line)")
    add("--aug-nonhate", dest="aug_nonhate", help="generated non-hate records")


def _add_training(parser: argparse.ArgumentParser) -> None:
    add = parser.add_argument
    add("--lr", type=float)
    add("--epochs", type=int)
    add("--patience", type=int)
    add("--batch-size", dest="batch_size", type=int)
    add("--validation-fraction", dest="validation_fraction", type=float)
    add("--threshold", type=float)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="hyperhate", description="Compact character-level hate speech classifiers")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("train", help="train a model and write a checkpoint")
    _add_common(p)
    _add_data(p)
    _add_training(p)
    p.add_argument("--model", choices=MODEL_KINDS)
    p.add_argument("--aug-n", dest="aug_n", type=int, help="generated records to add (n/2 per class)")

    p = sub.add_parser("eval", help="evaluate a checkpoint on a test file")
    _add_common(p)
    p.add_argument("--checkpoint")
    p.add_argument("--test", action="append")
    p.add_argument("--threshold", type=float)
    p.add_argument("--precision", choices=["double", "single"])

    p = sub.add_parser("predict", help="score texts with a checkpoint")
    _add_common(p)
    p.add_argument("--checkpoint")
    p.add_argument("--text", action="append", help="text to score; may be repeated")
    p.add_argument("--input", help="file with one text per line")
    p.add_argument("--threshold", type=float)
    p.add_argument("--precision", choices=["double", "single"])

    p = sub.add_parser("params", help="print per-layer parameter counts")
    _add_common(p)
    p.add_argument("--model", choices=MODEL_KINDS)

    p = sub.add_parser("experiment", help="run an augmentation grid")
    _add_common(p)
    _add_data(p)
    _add_training(p)
    p.add_argument("--model", help="comma-separated model kinds")
    p.add_argument("--target-train", dest="target_train")
    p.add_argument("--target-test", dest="target_test")
    p.add_argument("--target-dataset", dest="target_dataset")
    p.add_argument("--grid", help="comma-separated augmentation sizes, e.g. 0,5000,10000")
    p.add_argument("--seeds", help="comma-separated seeds")
    p.add_argument("--workers", type=int, help="grid cells in parallel (0: one per core)")

    p = sub.add_parser("gen-toy", help="write a toy dataset")
    _add_common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--noise", type=float)
    p.add_argument("--train-fraction", dest="train_fraction", type=float)
    p.add_argument("--aug-n", dest="aug_n", type=int, help="also write n generated records")
    p.add_argument("--shift", action="store_const", const=True,
                   help="use the alternative marker set")
    return parser


def resolve_run_config(args: argparse.Namespace,
                       environ: Optional[Mapping[str, str]] = None) -> Tuple[RunConfig, ConfigService]:
    overrides = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    config_service = ConfigService(args.config, overrides, environ)
    return RunConfig.from_settings(args.command, config_service.settings()), config_service


def configure_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def _out_dir(run: RunConfig) -> str:
    os.makedirs(run.out, exist_ok=True)
    return run.out


def write_run_config(run: RunConfig) -> str:
    path = os.path.join(_out_dir(run), RUN_CONFIG_FILE)
    with open(path, "w", encoding="utf-8") as f:
        f.write(run.to_flat())
    return path


def _write_json(path: str, data: Any) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")


def _require(value, flag: str):
    if not value:
        raise UsageError(f"{flag} is required")
    return value


def cmd_train(run: RunConfig, config_service: ConfigService) -> int:
    _require(run.train, "--train")
    config = run.train_config()
    data = DataService(config_service, run.skip_bad_records).load_split(
        run.train, run.test, run.dataset, run.format, run.train_fraction, run.seed)
    train_data = merge_augmentation(data.train, AugmentationSpec(run.aug_hate, run.aug_nonhate, run.aug_n))

    service = TrainingService()
    model = service.build_model(config, config_service.get_adapter_config(config.model_kind))
    result = service.train(model, train_data, config)

    out = _out_dir(run)
    save_checkpoint(model, os.path.join(out, "checkpoint.json"), {"train_config": config.to_dict()})
    with open(os.path.join(out, "history.jsonl"), "w", encoding="utf-8") as f:
        f.write(result.history.to_lines())
    train_report = evaluate_model(model, train_data, run.threshold, augmentation=run.aug_n)
    reports = {"train": train_report.to_dict()}
    if len(data.test):
        reports["test"] = evaluate_model(model, data.test, run.threshold, augmentation=run.aug_n).to_dict()
    _write_json(os.path.join(out, "eval.json"), reports)
    write_run_config(run)
    for split, report in reports.items():
        print(f"{split}\tP={report['precision']:.4f}\tR={report['recall']:.4f}\tF1={report['f1']:.4f}")
    return EXIT_OK


def _load_tests(run: RunConfig, config_service: ConfigService) -> Dataset:
    service = DataService(config_service, run.skip_bad_records)
    parts = [service.load(path, run.format) for path in _require(run.test, "--test")]
    if len(parts) == 1:
        return parts[0]
    return Dataset(name="combined", examples=tuple(e for d in parts for e in d))


def cmd_eval(run: RunConfig, config_service: ConfigService) -> int:
    model = load_checkpoint(_require(run.checkpoint, "--checkpoint"))
    report = evaluate_model(model, _load_tests(run, config_service), run.threshold,
                            precision=run.precision)
    _write_json(os.path.join(_out_dir(run), "eval.json"), report.to_dict())
    write_run_config(run)
    print(json.dumps(report.to_dict(), sort_keys=True))
    return EXIT_OK


def cmd_predict(run: RunConfig, config_service: ConfigService) -> int:
    model = load_checkpoint(_require(run.checkpoint, "--checkpoint"))
    texts: List[str] = list(run.text)
    if run.input:
        with open(run.input, "r", encoding="utf-8") as f:
            texts.extend(line.rstrip("\n").rstrip("\r") for line in f)
    if not texts:
        raise UsageError("--text or --input is required")
    results = predict_texts(model, texts, run.threshold, run.precision)
    lines = [f"{p!r}\t{label}" for p, label in results]
    out = _out_dir(run)
    with open(os.path.join(out, "predictions.tsv"), "w", encoding="utf-8") as f:
        f.write("".join(line + "\n" for line in lines))
    write_run_config(run)
    print("\n".join(lines))
    return EXIT_OK


def published_report(report: ParamReport, config_service: ConfigService) -> ParamReport:
    """Attach published layer, auxiliary and total counts where they exist."""
    layers = config_service.get_published("layers")
    rows = [ParamCount(r.name, r.count, layers.get(r.name), r.generated) for r in report.rows]
    return ParamReport(model=report.model, rows=rows,
                       published_total=config_service.get_published("totals").get(report.model))


def format_param_report(report: ParamReport, config_service: ConfigService) -> str:
    lines = [f"model: {report.model}", f"{'layer':<12}{'count':>12}{'published':>12}"]
    for row in report.rows:
        published = "" if row.published is None else f"{row.published:,}"
        note = "  (generated, not learned)" if row.generated else ""
        lines.append(f"{row.name:<12}{row.count:>12,}{published:>12}{note}")
    aux_rows = [r for r in report.rows if r.name.startswith("aux.")]
    if aux_rows:
        aux_published = config_service.get_published("aux").get(report.model)
        aux_total = sum(r.count for r in aux_rows)
        lines.append(f"{'aux total':<12}{aux_total:>12,}"
                     f"{'' if aux_published is None else f'{aux_published:,}':>12}")
    published = "" if report.published_total is None else f"{report.published_total:,}"
    deviation = "" if report.deviation is None else f"  ({report.deviation:+.2%})"
    lines.append(f"{'total':<12}{report.total:>12,}{published:>12}{deviation}")
    return "\n".join(lines)


def cmd_params(run: RunConfig, config_service: ConfigService) -> int:
    factory = DefaultClassifierAdapterFactory()
    kinds = [run.model] if run.model else list(MODEL_KINDS)
    blocks = []
    for kind in kinds:
        model = factory.create_adapter(kind, np.random.default_rng(run.seed),
                                       config_service.get_adapter_config(kind))
        blocks.append(format_param_report(published_report(model.param_report(), config_service),
                                          config_service))
    sizes = config_service.get_published("model_sizes")
    if sizes:
        blocks.append("published model sizes:\n" + "\n".join(
            f"{name:<20}{count:>14,}" for name, count in sizes.items()))
    print("\n\n".join(blocks))
    return EXIT_OK


def cmd_experiment(run: RunConfig, config_service: ConfigService) -> int:
    _require(run.train, "--train")
    kinds = [k.strip() for k in (run.model or "static").split(",") if k.strip()]
    unknown = [k for k in kinds if k not in MODEL_KINDS]
    if unknown:
        raise UsageError(f"unknown model kinds {unknown}; choose from {list(MODEL_KINDS)}")
    data_service = DataService(config_service, run.skip_bad_records)
    source = data_service.load_split(run.train, run.test, run.dataset, run.format,
                                     run.train_fraction, run.seed)
    service = ExperimentService(base_config=run.train_config(), threshold=run.threshold,
                                workers=run.workers,
                                architectures={k: config_service.get_adapter_config(k) for k in kinds})
    if run.target_train or run.target_test:
        target = data_service.load_split(
            [_require(run.target_train, "--target-train")],
            [run.target_test] if run.target_test else [],
            [run.target_dataset] if run.target_dataset else [],
            run.format, run.train_fraction, run.seed)
        rows = service.run_cross_experiment(source, target, kinds, run.grid, run.seeds,
                                            run.aug_hate, run.aug_nonhate)
        spec_target = target.name
    else:
        rows = service.run_intra_experiment(source, kinds, run.grid, run.seeds,
                                            run.aug_hate, run.aug_nonhate)
        spec_target = source.name

    out = _out_dir(run)
    emit_curves(rows, os.path.join(out, "curves.tsv"))
    emit_comparison(comparison_table(rows), os.path.join(out, "comparison.tsv"))
    storage = ResultStorageService(DatabaseService(os.path.join(out, RESULTS_DB)))
    storage.save_experiment(ExperimentSpec(source=source.name, target=spec_target,
                                           grid=tuple(run.grid), model_kinds=tuple(kinds),
                                           seeds=tuple(run.seeds)), rows)
    write_run_config(run)
    for row in sorted(rows, key=lambda r: r.sort_key):
        print(f"{row.model}\t{row.source}->{row.target}\tn={row.n}\tseed={row.seed}\t"
              f"P={row.precision:.4f}\tR={row.recall:.4f}\tF1={row.f1:.4f}")
    return EXIT_OK


def cmd_gen_toy(run: RunConfig, config_service: ConfigService) -> int:
    markers = SHIFTED_MARKERS if run.shift else DEFAULT_MARKERS
    dataset = generate_toy_dataset(run.n, run.noise, run.seed, markers=markers)
    out = _out_dir(run)
    write_examples(dataset, os.path.join(out, "toy.csv"))
    split = stratified_split(dataset, run.train_fraction, run.seed)
    write_examples(split.train, os.path.join(out, "train.csv"))
    write_examples(split.test, os.path.join(out, "test.csv"))
    if run.aug_n:
        generated = generate_toy_dataset(run.aug_n, run.noise, run.seed + 1, markers=markers,
                                         provenance=GENERATED)
        write_generated((e for e in generated if e.label == HATE),
                        os.path.join(out, "generated_hate.tsv"))
        write_generated((e for e in generated if e.label == NON_HATE),
                        os.path.join(out, "generated_nonhate.tsv"))
    write_run_config(run)
    print(f"wrote {len(dataset)} toy examples to {out}")
    return EXIT_OK


HANDLERS: Dict[str, Callable[[RunConfig, ConfigService], int]] = {
    "train": cmd_train,
    "eval": cmd_eval,
    "predict": cmd_predict,
    "params": cmd_params,
    "experiment": cmd_experiment,
    "gen-toy": cmd_gen_toy,
}


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the documented exit code."""
    if isinstance(error, ExperimentError) and error.__cause__ is not None:
        return exit_code_for(error.__cause__)
    if isinstance(error, NumericalError):
        return EXIT_NUMERIC
    if isinstance(error, UsageError):
        return EXIT_USAGE
    if isinstance(error, (DataError, CorruptInputError, IncompatibleCheckpointError,
                          ExperimentError, OSError)):
        return EXIT_DATA
    return EXIT_USAGE


def run_command(argv: Optional[Sequence[str]] = None,
                environ: Optional[Mapping[str, str]] = None) -> int:
    """Parse ``argv``, run the command and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        run, config_service = resolve_run_config(args, environ)
        configure_logging(run.log_level)
        return HANDLERS[args.command](run, config_service)
    except SystemExit as e:
        return int(e.code or 0)
    except (HyperHateError, ValueError, OSError) as e:
        code = exit_code_for(e)
        print(f"hyperhate: error: {e}", file=sys.stderr)
        logger.debug("command failed", exc_info=True)
        return code


def main() -> None:
    sys.exit(run_command())
