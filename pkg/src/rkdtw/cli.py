"""Command-line front door: learn bands, predict labels, evaluate bands.

Exit codes: 0 success, 2 data error, 64 usage error, 65 band/data
incompatibility. Every output file is written atomically (temp file plus
rename), so a failing run never leaves a partial artifact behind.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from dataclasses import dataclass

import numpy as np

from .bands import BandSet, bandset_from_json, bandset_to_json, uniform_bandset
from .classify import build_model, loo_accuracy, predict_many
from .learning import LearnLog, learn_best_band
from .series import (
    ComplexityUnreachableError,
    DatasetFormatError,
    LabeledDataset,
    load_labeled,
    load_unlabeled,
    preprocess,
    znormalize_rows,
)
from .silhouette import evaluate

EXIT_OK = 0
EXIT_DATA = 2
EXIT_USAGE = 64
EXIT_INCOMPATIBLE = 65


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the contract reserves 2 for
    # data errors and wants 64 for usage problems.
    def error(self, message):
        raise _UsageError(message)


@dataclass
class RunConfig:
    """Validated flag values for one subcommand invocation."""

    command: str
    train_path: str
    test_path: str | None = None
    band_in: str | None = None
    band_out: str | None = None
    out_path: str | None = None
    log_path: str | None = None
    sc_width: int | None = None
    bound_percent: int = 100
    complexity_threshold: float = 9.0
    seed: int = 0
    threads: int = 1
    normalize: bool = True

    def validate(self) -> None:
        if not 0 <= self.bound_percent <= 100:
            raise _UsageError(f"--bound must be in [0, 100], got {self.bound_percent}")
        if not self.complexity_threshold > 0:
            raise _UsageError(
                f"--complexity-threshold must be positive, got {self.complexity_threshold}"
            )
        if self.sc_width is not None and not 0 <= self.sc_width <= 100:
            raise _UsageError(f"--sc-width must be in [0, 100], got {self.sc_width}")
        if self.threads < 1:
            raise _UsageError(f"--threads must be at least 1, got {self.threads}")
        if self.command == "eval" and self.band_in is None and self.sc_width is None:
            raise _UsageError("eval needs --band-in or --sc-width")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="rkdtw",
        description=(
            "1-NN time series classification under DTW constrained by "
            "per-class learned warping bands."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p: _Parser, seeded: bool = True, bounded: bool = True) -> None:
        p.add_argument(
            "--train",
            required=True,
            metavar="F",
            help="labeled training file: one series per line, integer label first",
        )
        p.add_argument(
            "--complexity-threshold",
            type=float,
            default=9.0,
            metavar="X",
            help="halve series lengths while 2*log10(N*L) exceeds X (default 9)",
        )
        p.add_argument(
            "--threads",
            type=int,
            default=os.cpu_count() or 1,
            metavar="N",
            help="worker threads for distance tables and prediction (default: all cores)",
        )
        p.add_argument(
            "--no-normalize",
            action="store_true",
            help="skip per-series z-normalization at load time",
        )
        if bounded:
            p.add_argument(
                "--bound",
                type=int,
                default=100,
                metavar="K",
                help="band width cap for learning, as a percent of series length (default 100)",
            )
        if seeded:
            p.add_argument(
                "--seed",
                type=int,
                default=0,
                metavar="N",
                help="seed for the randomized segment dequeue (default 0)",
            )

    learn = sub.add_parser("learn", help="learn per-class bands from a labeled file")
    common(learn)
    learn.add_argument("--band-out", metavar="F", help="write the learned band set as JSON")
    learn.add_argument("--log", metavar="F", help="write the learning evaluation log as TSV")

    predict = sub.add_parser("predict", help="classify unlabeled series with 1-NN")
    common(predict)
    predict.add_argument(
        "--test", required=True, metavar="F", help="unlabeled series file, one per line"
    )
    predict.add_argument(
        "--band-in", metavar="F", help="band-set JSON to use instead of learning"
    )
    predict.add_argument("--band-out", metavar="F", help="write the band set in use as JSON")
    predict.add_argument(
        "--out", metavar="F", help="write predictions here instead of stdout"
    )
    predict.add_argument("--log", metavar="F", help="write the learning evaluation log as TSV")

    ev = sub.add_parser("eval", help="score a band set on a labeled file")
    common(ev, seeded=False, bounded=False)
    ev.add_argument("--band-in", metavar="F", help="band-set JSON to evaluate")
    ev.add_argument(
        "--sc-width",
        type=int,
        metavar="K",
        help="evaluate the uniform band of this width percent instead of --band-in",
    )
    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(
        command=args.command,
        train_path=args.train,
        test_path=getattr(args, "test", None),
        band_in=getattr(args, "band_in", None),
        band_out=getattr(args, "band_out", None),
        out_path=getattr(args, "out", None),
        log_path=getattr(args, "log", None),
        sc_width=getattr(args, "sc_width", None),
        bound_percent=getattr(args, "bound", 100),
        complexity_threshold=args.complexity_threshold,
        seed=getattr(args, "seed", 0),
        threads=args.threads,
        normalize=not args.no_normalize,
    )
    config.validate()
    return config


def _write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rkdtw-tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_train(config: RunConfig) -> LabeledDataset:
    data = load_labeled(config.train_path)
    if config.normalize:
        data = data.with_values(znormalize_rows(data.values))
    return data


def _read_bands(path: str) -> BandSet:
    with open(path, encoding="utf-8") as fh:
        return bandset_from_json(fh.read())


def _incompatibility(bands: BandSet, data: LabeledDataset) -> str | None:
    if bands.n != data.series_length:
        return (
            f"band length {bands.n} does not match the preprocessed "
            f"series length {data.series_length}"
        )
    missing = sorted(set(data.label_set) - set(bands.labels))
    if missing:
        return f"band set has no band for classes {missing}"
    return None


def _learn_bound(length: int, bound_percent: int) -> int:
    return int(math.floor(length * bound_percent / 100.0 + 0.5))


def cmd_learn(config: RunConfig) -> int:
    train = _load_train(config)
    train, _, length = preprocess(train, np.empty((0, 0)), config.complexity_threshold)
    log = LearnLog() if config.log_path else None
    bands, score, learner = learn_best_band(
        train, _learn_bound(length, config.bound_percent), config.seed, log, config.threads
    )
    accuracy = loo_accuracy(train, bands, config.threads)
    print(f"learner: {learner}")
    print(f"silhouette: {score:.12g}")
    print(f"loo-accuracy: {accuracy:.12g}")
    if config.band_out:
        _write_atomic(config.band_out, bandset_to_json(bands))
    if config.log_path:
        _write_atomic(config.log_path, log.to_tsv())
    return EXIT_OK


def cmd_predict(config: RunConfig) -> int:
    train = _load_train(config)
    test = load_unlabeled(config.test_path)
    if config.normalize and test.size:
        test = znormalize_rows(test)
    train, test, length = preprocess(train, test, config.complexity_threshold)
    log = LearnLog() if config.log_path else None
    if config.band_in:
        bands = _read_bands(config.band_in)
        problem = _incompatibility(bands, train)
        if problem:
            print(f"error: {problem}", file=sys.stderr)
            return EXIT_INCOMPATIBLE
    else:
        bands, _, _ = learn_best_band(
            train, _learn_bound(length, config.bound_percent), config.seed, log, config.threads
        )
    model = build_model(train, bands, config.threads)
    predictions = predict_many(model, test, config.threads)
    text = "".join(f"{label}\n" for label in predictions.tolist())
    if config.out_path:
        _write_atomic(config.out_path, text)
        print(f"predicted-accuracy: {model.predicted_accuracy:.12g}")
    else:
        sys.stdout.write(text)
        print(f"predicted-accuracy: {model.predicted_accuracy:.12g}", file=sys.stderr)
    if config.band_out:
        _write_atomic(config.band_out, bandset_to_json(model.bands))
    if config.log_path:
        _write_atomic(config.log_path, log.to_tsv())
    return EXIT_OK


def cmd_eval(config: RunConfig) -> int:
    train = _load_train(config)
    train, _, length = preprocess(train, np.empty((0, 0)), config.complexity_threshold)
    if config.band_in:
        bands = _read_bands(config.band_in)
        problem = _incompatibility(bands, train)
        if problem:
            print(f"error: {problem}", file=sys.stderr)
            return EXIT_INCOMPATIBLE
    else:
        bands = uniform_bandset(train.label_set, length, config.sc_width)
    score = evaluate(train, bands, config.threads)
    accuracy = loo_accuracy(train, bands, config.threads)
    print(f"silhouette: {score:.12g}")
    print(f"loo-accuracy: {accuracy:.12g}")
    return EXIT_OK


_COMMANDS = {"learn": cmd_learn, "predict": cmd_predict, "eval": cmd_eval}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _config_from_args(args)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _COMMANDS[config.command](config)
    except (DatasetFormatError, ComplexityUnreachableError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
