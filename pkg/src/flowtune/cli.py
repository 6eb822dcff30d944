"""Command-line toolbox: scenario runner, classifier training/evaluation,
ROC reports, PSNR/MSE computation, synthetic trace generation, and a
register control-endpoint passthrough.

Exit codes: 0 success, 2 config/validation error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional

import numpy as np

from . import qoe
from .collector import export_rows, import_dataset
from .config import DEFAULT_DUMBBELL_CFG, load_scenario, parse_scenario_text
from .errors import (
    ClassTooSmall,
    ConfigInvalid,
    DimensionMismatch,
    FlowtuneError,
    MissingLabel,
    OverlappingPortSets,
    ParseFailure,
    SchemaMismatch,
    SingleClassOnly,
    UnsortedTrace,
    ValueOutOfRange,
)
from .ml import (
    DecisionTree,
    KnnClassifier,
    RandomForest,
    evaluate,
    featurize_rows,
    labels_of,
    load_model,
    roc,
    save_model,
    train_test_split,
)
from .model import NUM_CLASSES, ClassLabel
from .scenario import run_scenario
from .switch import RegisterBank, Switch
from .traffic import DEFAULT_IOT_PROFILES, gen_synthetic_iot_trace

_VALIDATION_ERRORS = (
    ConfigInvalid,
    SchemaMismatch,
    MissingLabel,
    ClassTooSmall,
    DimensionMismatch,
    ParseFailure,
    UnsortedTrace,
    OverlappingPortSets,
    ValueOutOfRange,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flowtune")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a dumbbell scenario arm")
    run.add_argument("--config", help="scenario config file (defaults to the shipped dumbbell)")
    run.add_argument("--arm", choices=("baseline", "congested", "adjusted"), default="adjusted")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--out", required=True, help="artifact output directory")

    train = sub.add_parser("train", help="train and evaluate a classifier on a labeled dataset")
    train.add_argument("--dataset", required=True)
    train.add_argument("--model", required=True, choices=("dt", "knn", "rf"))
    train.add_argument("--out", required=True, help="model file to write")
    train.add_argument("--seed", type=int, default=0)
    train.add_argument("--train-fraction", type=float, default=0.8)
    train.add_argument("--k", type=int, default=5)
    train.add_argument("--trees", type=int, default=50)
    train.add_argument("--max-depth", type=int, default=None)
    train.add_argument("--features-per-split", type=int, default=3)

    predict = sub.add_parser("predict", help="classify dataset rows with a saved model")
    predict.add_argument("--model", required=True)
    predict.add_argument("--dataset", required=True)
    predict.add_argument("--out", default=None, help="predictions CSV (default: stdout)")

    roc_cmd = sub.add_parser("roc", help="per-class ROC point files and AUC summary")
    roc_cmd.add_argument("--model", required=True)
    roc_cmd.add_argument("--dataset", required=True)
    roc_cmd.add_argument("--out", required=True, help="output directory")

    psnr_cmd = sub.add_parser("psnr", help="MSE and PSNR between two image grids")
    psnr_cmd.add_argument("reference")
    psnr_cmd.add_argument("test")

    gen = sub.add_parser("gen-trace", help="generate the synthetic labeled IoT trace")
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, default=42)
    gen.add_argument("--per-class", type=int, default=2000)

    regs = sub.add_parser("registers", help="control-endpoint passthrough on a fresh switch")
    regs.add_argument("--config", default=None)
    regs.add_argument("verb", choices=("set-priority", "set-mirror-flag", "set-mirror-interval", "dump-registers"))
    regs.add_argument("args", nargs="*")
    return parser


def _load_rows(path):
    return import_dataset(path).rows


def _make_model(args):
    if args.model == "dt":
        return DecisionTree(max_depth=args.max_depth)
    if args.model == "knn":
        return KnnClassifier(k=args.k)
    return RandomForest(
        n_trees=args.trees,
        max_depth=args.max_depth,
        features_per_split=args.features_per_split,
        seed=args.seed,
    )


def _cmd_run(args) -> int:
    config = load_scenario(args.config) if args.config else parse_scenario_text(DEFAULT_DUMBBELL_CFG)
    result = run_scenario(config, arm=args.arm, seed=args.seed, outdir=args.out)
    print(f"arm={result.arm} video_fps={result.video_fps:.4f} "
          f"delivered={result.delivered} dropped={result.dropped} "
          f"mirrored={result.mirrored} adjustments={result.adjustments}")
    return 0


def _cmd_train(args) -> int:
    rows = _load_rows(args.dataset)
    X = featurize_rows(rows)
    y = labels_of(rows)
    X_train, y_train, X_test, y_test = train_test_split(X, y, args.train_fraction, args.seed)
    model = _make_model(args)
    model.fit(X_train, y_train)
    report = evaluate(model.predict(X_test), y_test)
    save_model(model, args.out)
    print("model,accuracy,f1_score,mse,precision")
    print(report.table_row(args.model))
    return 0


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    rows = _load_rows(args.dataset)
    preds = model.predict(featurize_rows(rows))
    lines = ["row,predicted_class,class_name"]
    lines += [f"{i},{int(p)},{ClassLabel(int(p)).display_name}" for i, p in enumerate(preds)]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_roc(args) -> int:
    model = load_model(args.model)
    rows = _load_rows(args.dataset)
    scores = model.predict_proba(featurize_rows(rows))
    truths = labels_of(rows)
    os.makedirs(args.out, exist_ok=True)
    summary = ["class,auc"]
    for class_no in range(NUM_CLASSES):
        name = ClassLabel(class_no).display_name
        try:
            curve = roc(scores[:, class_no], truths, class_no)
        except SingleClassOnly:
            print(f"class {class_no} ({name}): SingleClassOnly, skipped")
            summary.append(f"{class_no},")
            continue
        path = os.path.join(args.out, f"roc_class{class_no}.csv")
        with open(path, "w") as handle:
            handle.write("class,threshold,fpr,tpr\n")
            for thr, fpr, tpr in zip(curve.thresholds, curve.fpr, curve.tpr):
                handle.write(f"{class_no},{thr},{fpr},{tpr}\n")
        print(f"class {class_no} ({name}): AUC = {curve.auc:.2f}")
        summary.append(f"{class_no},{curve.auc:.2f}")
    with open(os.path.join(args.out, "auc_summary.csv"), "w") as handle:
        handle.write("\n".join(summary) + "\n")
    return 0


def _cmd_psnr(args) -> int:
    ref = qoe.load_image_csv(args.reference)
    test = qoe.load_image_csv(args.test)
    err = qoe.mse(ref, test)
    value = qoe.psnr(ref, test)
    shown = "inf" if isinstance(value, qoe.PerfectMatch) else f"{value:.4f}"
    print(f"mse={err:g} psnr={shown}")
    return 0


def _cmd_gen_trace(args) -> int:
    rows = gen_synthetic_iot_trace(DEFAULT_IOT_PROFILES, args.per_class, args.seed)
    count = export_rows(rows, args.out, run_id=f"synthetic-s{args.seed}")
    print(f"wrote {count} rows to {args.out}")
    return 0


def _cmd_registers(args) -> int:
    config = load_scenario(args.config) if args.config else parse_scenario_text(DEFAULT_DUMBBELL_CFG)
    switch = Switch(bank=RegisterBank(config.register_capacity, config.priority_levels))
    verb, extra = args.verb, args.args
    if verb == "set-priority":
        if len(extra) != 2:
            raise ConfigInvalid("set-priority needs <flow_id> <level>")
        switch.write_register("prio_reg", int(extra[1]), index=int(extra[0]))
    elif verb == "set-mirror-flag":
        if len(extra) != 1 or extra[0] not in ("on", "off"):
            raise ConfigInvalid("set-mirror-flag needs on|off")
        switch.write_register("mirror_flag", extra[0] == "on")
    elif verb == "set-mirror-interval":
        if len(extra) != 1:
            raise ConfigInvalid("set-mirror-interval needs <microseconds>")
        switch.write_register("mirror_interval", int(extra[0]))
    for key, value in switch.dump_registers().items():
        print(f"{key}: {value}")
    return 0


_HANDLERS = {
    "run": _cmd_run,
    "train": _cmd_train,
    "predict": _cmd_predict,
    "roc": _cmd_roc,
    "psnr": _cmd_psnr,
    "gen-trace": _cmd_gen_trace,
    "registers": _cmd_registers,
}


def main(argv: Optional[list] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FlowtuneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
