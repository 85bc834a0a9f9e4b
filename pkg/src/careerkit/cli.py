"""Command-line interface: train, evaluate, compare, predict, serve, report."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .artifacts import ALL_KINDS, load_artifact
from .errors import CareerKitError
from .pipeline import (
    PipelineConfig,
    comparison_table,
    evaluate_all,
    predict_text,
    prepare,
    train_all,
)
from .textprep import StopWordList


def _load_config(args) -> PipelineConfig:
    if args.config:
        config = PipelineConfig.from_json(args.config)
    else:
        config = PipelineConfig().validated()
    if args.seed is not None:
        config = config.with_seed(args.seed)
    return config


def _kinds(args) -> list[str]:
    if not args.models:
        return list(ALL_KINDS)
    kinds = [k.strip() for k in args.models.split(",") if k.strip()]
    for kind in kinds:
        if kind not in ALL_KINDS:
            raise CareerKitError(f"unknown model kind {kind!r}; "
                                 f"choose from {', '.join(ALL_KINDS)}")
    return kinds


def _cmd_train(args) -> int:
    config = _load_config(args)
    prepared = prepare(config)
    kept = len(prepared.dataset.documents)
    dropped = len(prepared.dataset.provenance) - kept
    print(f"dataset: {kept} documents kept, {dropped} dropped, "
          f"|V|={len(prepared.vocabulary)}, "
          f"train/test = {len(prepared.train_indices)}/{len(prepared.test_indices)}")
    artifacts = train_all(config, kinds=_kinds(args), prepared=prepared)
    for kind, artifact in artifacts.items():
        path = Path(config.artifacts_dir) / f"{kind}.json"
        print(f"trained {kind:<5} -> {path}")
    return 0


def _cmd_evaluate(args) -> int:
    config = _load_config(args)
    prepared = prepare(config)
    artifacts = {}
    for kind in _kinds(args):
        path = Path(config.artifacts_dir) / f"{kind}.json"
        if not path.is_file():
            raise CareerKitError(f"missing artifact {path}; run `careerkit train`")
        artifacts[kind] = load_artifact(path)
    reports = evaluate_all(config, artifacts, prepared=prepared)
    for kind in sorted(reports, key=lambda k: -reports[k].accuracy):
        r = reports[kind]
        print(f"{kind:<5} accuracy={r.accuracy:.4f}  "
              f"TP={r.counts.tp} FP={r.counts.fp} "
              f"TN={r.counts.tn} FN={r.counts.fn}")
    print(f"reports written to {config.reports_dir}")
    return 0


def _cmd_compare(args) -> int:
    config = _load_config(args)
    prepared = prepare(config)
    artifacts = {}
    for kind in _kinds(args):
        path = Path(config.artifacts_dir) / f"{kind}.json"
        if path.is_file():
            artifacts[kind] = load_artifact(path)
    if not artifacts:
        raise CareerKitError(f"no artifacts in {config.artifacts_dir}")
    reports = evaluate_all(config, artifacts, prepared=prepared, write=False)
    print(comparison_table(reports), end="")
    return 0


def _cmd_predict(args) -> int:
    config = _load_config(args)
    path = Path(config.artifacts_dir) / f"{args.model}.json"
    if not path.is_file():
        raise CareerKitError(f"missing artifact {path}; run `careerkit train`")
    artifact = load_artifact(path)
    stops = StopWordList.from_file(config.stopwords)
    response = predict_text(artifact, stops, args.skills)
    print(response.summary())
    if response.low_confidence:
        print("note: low confidence, no input token is in the vocabulary")
    if response.oov:
        print(f"out-of-vocabulary tokens: {', '.join(response.oov)}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    config = _load_config(args)
    serve(config, bind=args.bind, ui_dir=args.ui)
    return 0


def _cmd_report(args) -> int:
    config = _load_config(args)
    reports_dir = Path(config.reports_dir)
    shown = 0
    for kind in _kinds(args):
        text = reports_dir / f"{kind}.report.txt"
        if text.is_file():
            print(text.read_text("utf-8"))
            shown += 1
        curve = Path(config.artifacts_dir) / f"{kind}.curve.csv"
        if curve.is_file():
            lines = curve.read_text("utf-8").strip().splitlines()
            print(f"{kind} learning curve: {len(lines) - 1} epochs "
                  f"(final: {lines[-1]})")
            print()
    if not shown:
        raise CareerKitError(f"no reports in {reports_dir}; "
                             "run `careerkit evaluate` first")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="careerkit",
        description="Career-field prediction from skill surveys.")
    parser.add_argument("--config", help="pipeline config JSON path")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the train/test split seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train models and save artifacts")
    p_train.add_argument("--models", help="comma-separated kinds (default: all)")
    p_train.set_defaults(func=_cmd_train)

    p_eval = sub.add_parser("evaluate", help="evaluate artifacts on the test split")
    p_eval.add_argument("--models", help="comma-separated kinds (default: all)")
    p_eval.set_defaults(func=_cmd_evaluate)

    p_cmp = sub.add_parser("compare", help="print the model comparison table")
    p_cmp.add_argument("--models", help="comma-separated kinds (default: all)")
    p_cmp.set_defaults(func=_cmd_compare)

    p_pred = sub.add_parser("predict", help="rank career fields for skill text")
    p_pred.add_argument("--skills", required=True, help="free-text skill list")
    p_pred.add_argument("--model", default="svm", choices=ALL_KINDS)
    p_pred.set_defaults(func=_cmd_predict)

    p_serve = sub.add_parser("serve", help="run the HTTP prediction service")
    p_serve.add_argument("--bind", default="127.0.0.1:8000")
    p_serve.add_argument("--ui", default=None,
                         help="directory of static UI files to mount at /")
    p_serve.set_defaults(func=_cmd_serve)

    p_rep = sub.add_parser("report", help="print saved evaluation reports")
    p_rep.add_argument("--models", help="comma-separated kinds (default: all)")
    p_rep.set_defaults(func=_cmd_report)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CareerKitError as exc:
        print(f"error [{exc.error_kind}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
