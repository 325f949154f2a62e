"""Operator command line: ingest, train, predict, eval, serve.

Configuration comes from an ini-style file (key=value sections) with
flags taking precedence; the artifact directory falls back to the
REPOSITIONER_ARTIFACTS environment variable.  Results go to stdout,
diagnostics to stderr; exit codes: 0 ok, 1 validation error, 2 runtime
error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .data import DataError, load_dataset, load_manifest
from .service import (
    MODEL_KINDS,
    ArtifactError,
    Registry,
    evaluate_model,
    load_artifact,
    save_artifact,
    train_model,
)

__all__ = ["main", "run"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="repositioner",
        description="drug repositioning models, registry and prediction service")
    parser.add_argument("--config", type=Path, help="ini-style configuration file")
    sub = parser.add_subparsers(dest="command")

    p_ingest = sub.add_parser("ingest", help="validate a data manifest and print counts")
    p_ingest.add_argument("--manifest", type=Path)

    p_train = sub.add_parser("train", help="train a model kind and persist the artifact")
    p_train.add_argument("--model", required=True,
                         help=f"one of {', '.join(MODEL_KINDS)}, 'rotate' or 'all'")
    p_train.add_argument("--manifest", type=Path)
    p_train.add_argument("--seed", type=int)
    p_train.add_argument("--artifacts", type=Path)

    p_predict = sub.add_parser("predict", help="rank drugs for an entity offline")
    p_predict.add_argument("--model", required=True)
    p_predict.add_argument("--entity", required=True)
    p_predict.add_argument("--top", type=int, default=20)
    p_predict.add_argument("--manifest", type=Path)
    p_predict.add_argument("--artifacts", type=Path)

    p_eval = sub.add_parser("eval", help="held-out evaluation of one model kind")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--manifest", type=Path)
    p_eval.add_argument("--seed", type=int)

    p_serve = sub.add_parser("serve", help="run the HTTP prediction service")
    p_serve.add_argument("--manifest", type=Path)
    p_serve.add_argument("--artifacts", type=Path)
    p_serve.add_argument("--port", type=int)
    p_serve.add_argument("--host", default="127.0.0.1")

    return parser


def _settings(args) -> dict:
    """Merge config file and flags; flags win."""
    settings = {"seed": 0, "port": 8000, "artifacts": None, "manifest": None}
    if args.config:
        parser = load_manifest(args.config)
        if parser.has_section("data") and "manifest" in parser["data"]:
            settings["manifest"] = args.config.parent / parser["data"]["manifest"]
        if parser.has_section("artifacts") and "dir" in parser["artifacts"]:
            settings["artifacts"] = args.config.parent / parser["artifacts"]["dir"]
        if parser.has_section("train") and "seed" in parser["train"]:
            settings["seed"] = parser["train"].getint("seed")
        if parser.has_section("serve") and "port" in parser["serve"]:
            settings["port"] = parser["serve"].getint("port")
        settings["hyper"] = {
            kind: dict(parser[f"train.{kind}"]) for kind in MODEL_KINDS
            if parser.has_section(f"train.{kind}")
        }
    env_dir = os.environ.get("REPOSITIONER_ARTIFACTS")
    if settings["artifacts"] is None and env_dir:
        settings["artifacts"] = Path(env_dir)
    for key in ("manifest", "artifacts", "seed", "port"):
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    return settings


def _require(settings, key, what):
    if settings.get(key) is None:
        raise SystemExit(f"error: no {what} given (flag --{key} or config)")
    return settings[key]


def _parse_hyper(raw: dict) -> dict:
    out = {}
    for key, value in raw.items():
        try:
            out[key] = json.loads(value)
        except json.JSONDecodeError:
            out[key] = value
    return out


def _cmd_ingest(args) -> int:
    settings = _settings(args)
    dataset = load_dataset(_require(settings, "manifest", "data manifest"))
    summary = dataset.summary()
    print("vocab:")
    for kind, count in summary["vocab"].items():
        print(f"\t{kind}\t{count}")
    print("layers (nonzero cells):")
    for name, count in summary["layers"].items():
        print(f"\t{name}\t{count}")
    if "kg" in summary:
        print("knowledge graph:")
        print(f"\tentities\t{summary['kg']['entities']}")
        print(f"\ttriples\t{summary['kg']['triples']}")
        for rel, count in summary["kg"]["relations"].items():
            print(f"\trelation\t{rel}\t{count}")
    print("tables:")
    for name, count in summary["tables"].items():
        print(f"\t{name}\t{count}")
    print("pairs:")
    for name, count in summary["pairs"].items():
        print(f"\t{name}\t{count}")
    print(f"fingerprint\t{dataset.fingerprint()}")
    return 0


def _train_kinds(model: str) -> list[str]:
    if model == "all":
        return list(MODEL_KINDS)
    if model == "rotate":
        return ["diskge", "tarkge"]
    if model not in MODEL_KINDS:
        raise SystemExit(f"error: unknown model {model!r}")
    return [model]


def _cmd_train(args) -> int:
    settings = _settings(args)
    dataset = load_dataset(_require(settings, "manifest", "data manifest"))
    artifacts = _require(settings, "artifacts", "artifact directory")
    hyper_all = settings.get("hyper", {})
    for kind in _train_kinds(args.model):
        hyper = _parse_hyper(hyper_all.get(kind, {}))
        payload = train_model(kind, dataset, seed=settings["seed"],
                              hyper=hyper or None)
        version = save_artifact(payload, artifacts)
        import hashlib
        blob = (Path(artifacts) / kind / version / "params.bin").read_bytes()
        print(f"{kind}\t{version}\tsha256:{hashlib.sha256(blob).hexdigest()}")
    return 0


def _cmd_predict(args) -> int:
    settings = _settings(args)
    dataset = load_dataset(_require(settings, "manifest", "data manifest"))
    artifacts = _require(settings, "artifacts", "artifact directory")
    if args.model not in MODEL_KINDS:
        raise SystemExit(f"error: unknown model {args.model!r}")
    payload = load_artifact(artifacts, args.model)
    if payload.fingerprint != dataset.fingerprint():
        raise SystemExit("error: artifact was trained against different data")
    from .service import build_predictor
    kind = "disease" if MODEL_KINDS[args.model] == "disease-centric" else "target"
    entity = dataset.catalog.resolve(args.entity, kind)
    ranking = build_predictor(payload, dataset)(entity, args.top)
    for i, (ref, score) in enumerate(ranking.entries, start=1):
        print(f"{i}\t{ref.id}\t{ref.name}\t{score!r}")
    return 0


def _cmd_eval(args) -> int:
    settings = _settings(args)
    dataset = load_dataset(_require(settings, "manifest", "data manifest"))
    if args.model not in MODEL_KINDS:
        raise SystemExit(f"error: unknown model {args.model!r}")
    metrics = evaluate_model(args.model, dataset, seed=settings["seed"])
    for key in sorted(metrics):
        print(f"{key}\t{metrics[key]!r}")
    return 0


def _cmd_serve(args) -> int:
    settings = _settings(args)
    dataset = load_dataset(_require(settings, "manifest", "data manifest"))
    artifacts = _require(settings, "artifacts", "artifact directory")
    registry = Registry(dataset, artifacts)
    from .service import create_app
    static = Path(__file__).resolve().parent.parent.parent / "frontend" / "dist"
    app = create_app(registry, static_dir=static if static.is_dir() else None)
    import uvicorn
    uvicorn.run(app, host=args.host, port=settings["port"], log_level="info")
    return 0


def run(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    handlers = {"ingest": _cmd_ingest, "train": _cmd_train,
                "predict": _cmd_predict, "eval": _cmd_eval, "serve": _cmd_serve}
    try:
        return handlers[args.command](args)
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(exc.code, file=sys.stderr)
            return 1
        raise
    except (DataError, ArtifactError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:   # runtime failure
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
