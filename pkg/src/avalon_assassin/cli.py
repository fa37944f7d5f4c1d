"""Command-line entry point wiring the pipeline into reproducible runs.

Every subcommand is deterministic given its flags (seeds default to 0 and
are always recorded); each run writes a manifest next to its primary
output. Exit codes: 0 success, 1 usage error, 2 data error, 3 internal.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time

from . import __version__
from .evaluation import BadK, baseline_random, cross_validate, error_analysis
from .feature_search import powerset_search, search_summary, search_to_csv
from .features import (
    DEFAULT_SUBSET,
    STAT_IDS,
    engineered_header,
    engineered_matrix,
    general_header,
    general_matrix,
    matrix_to_csv,
    normalize_subset,
)
from .game_model import InvalidGameError, assassin_view, canonicalize, validate_game
from .log_ingest import (
    SchemaError,
    filter_assassination_eligible,
    game_from_dict,
    read_game_stream,
    write_game_stream,
)
from .mlp import MlpConfig, curve_to_csv, train_mlp
from .service import (
    FeatureSchemaMismatch,
    ViewSchemaError,
    advice_response_json,
    advise,
    build_model_meta,
    model_checksum,
    serve,
    view_from_dict,
)
from .simulator import SimConfig, simulate_dataset
from .svm import (
    BadMask,
    DimensionMismatch,
    EmptyDataset,
    NonPositiveC,
    NonPositiveGamma,
    load_model,
    save_model,
    train_linear_svc,
    train_rbf_svc,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

DATA_ERRORS = (SchemaError, InvalidGameError, BadK, BadMask, EmptyDataset,
               DimensionMismatch, NonPositiveC, NonPositiveGamma,
               FeatureSchemaMismatch, ViewSchemaError, FileNotFoundError,
               ValueError)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _sha256(path) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _write_manifest(subcommand: str, args: argparse.Namespace, outputs,
                    started: float):
    flags = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    manifest = {
        "subcommand": subcommand,
        "flags": flags,
        "seed": flags.get("seed"),
        "outputs": {str(p): _sha256(p) for p in outputs},
        "duration_s": round(time.monotonic() - started, 3),
    }
    if outputs:
        path = str(outputs[0]) + ".manifest.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    return manifest


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        return [out_path]
    sys.stdout.write(text)
    return []


def _load_stream(path, eligible: bool = True):
    stream = read_game_stream(path)
    if eligible:
        stream = filter_assassination_eligible(stream)
    return stream


def _parse_subset(text: str):
    return normalize_subset(tuple(text.split(",")))


def _featurizer(kind: str, subset):
    if kind == "engineered":
        return lambda stream: engineered_matrix(stream, subset)
    if kind == "general":
        return general_matrix
    raise ValueError(f"unknown feature kind: {kind}")


# ---------------------------------------------------------------------------
# subcommands

def cmd_simulate(args):
    cfg = SimConfig(seed=args.seed, num_games=args.games,
                    merlin_leak=args.merlin_leak, spy_sabotage=args.spy_sabotage,
                    base_approve=args.base_approve, eligible_only=args.eligible_only)
    stream = simulate_dataset(cfg)
    if args.out:
        write_game_stream(stream, args.out)
        return [args.out]
    for log in stream.games:
        from .log_ingest import game_to_line
        sys.stdout.write(game_to_line(log) + "\n")
    return []


def cmd_validate(args):
    stream = read_game_stream(args.infile)
    report = {
        "source": stream.source,
        "valid_games": len(stream.games),
        "parse_errors": [{"line": e.line, "message": e.message}
                         for e in stream.parse_errors],
    }
    return _emit(json.dumps(report, indent=2) + "\n", args.out)


def cmd_filter(args):
    stream = _load_stream(args.infile, eligible=True)
    write_game_stream(stream, args.out)
    return [args.out]


def cmd_featurize(args):
    stream = _load_stream(args.infile)
    if args.features == "engineered":
        subset = _parse_subset(args.subset)
        X, y, _ = engineered_matrix(stream, subset)
        csv_text = matrix_to_csv(X, y, engineered_header(subset))
    else:
        X, y, _ = general_matrix(stream)
        csv_text = matrix_to_csv(X, y, general_header())
    return _emit(csv_text, args.out)


def cmd_train(args):
    stream = _load_stream(args.infile)
    subset = _parse_subset(args.subset)
    if args.features == "engineered":
        X, y, _ = engineered_matrix(stream, subset)
        schema = {"kind": "engineered", "subset": list(subset), "dim": X.shape[1]}
    else:
        X, y, _ = general_matrix(stream)
        schema = {"kind": "general", "dim": X.shape[1]}
    if args.model == "linear-svc":
        model = train_linear_svc(X, y, C=args.c, max_iter=args.max_iter,
                                 tol=args.tol, seed=args.seed,
                                 feature_schema=schema)
    elif args.model == "rbf-svc":
        model = train_rbf_svc(X, y, C=args.c, gamma=args.gamma, tol=args.tol,
                              feature_schema=schema)
    else:
        config = MlpConfig(
            layer_widths=tuple(int(w) for w in args.layers.split(",")),
            batch_size=args.batch, learning_rate=args.lr,
            epochs=args.epochs, seed=args.seed)
        model = train_mlp(X, y, config, feature_schema=schema)
    save_model(model, args.out)
    outputs = [args.out]
    if args.model == "mlp" and args.curve_out:
        with open(args.curve_out, "w", encoding="utf-8") as fh:
            fh.write(curve_to_csv(model))
        outputs.append(args.curve_out)
    return outputs


def _trainer_from_args(args, subset):
    from .svm import decision_scores

    def trainer(X, y):
        if args.model == "linear-svc":
            model = train_linear_svc(X, y, C=args.c, max_iter=args.max_iter,
                                     tol=args.tol, seed=args.seed)
        elif args.model == "rbf-svc":
            model = train_rbf_svc(X, y, C=args.c, gamma=args.gamma, tol=args.tol)
        else:
            config = MlpConfig(
                layer_widths=tuple(int(w) for w in args.layers.split(",")),
                batch_size=args.batch, learning_rate=args.lr,
                epochs=args.epochs, seed=args.seed)
            model = train_mlp(X, y, config)
        return lambda x: decision_scores(model, x)
    return trainer


def cmd_cv(args):
    stream = _load_stream(args.infile)
    subset = _parse_subset(args.subset)
    report = cross_validate(stream, _featurizer(args.features, subset),
                            _trainer_from_args(args, subset),
                            k=args.folds, seed=args.seed)
    if args.json:
        return _emit(report.to_json(), args.out)
    return _emit(report.to_text(), args.out)


def cmd_select_features(args):
    stream = _load_stream(args.infile)
    candidates = _parse_subset(args.candidates)
    result = powerset_search(stream, candidates, folds=args.folds,
                             seed=args.seed,
                             svc_params={"C": args.c, "max_iter": args.max_iter,
                                         "tol": args.tol})
    outputs = []
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(search_to_csv(result))
        outputs.append(args.out)
    sys.stdout.write(search_summary(result))
    return outputs


def cmd_predict(args):
    model = load_model(args.model)
    with open(args.game, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if "roles" in obj:
        log = canonicalize(game_from_dict(obj))
        view = assassin_view(log)
    else:
        view = view_from_dict(obj)
    advice = advise(view, model)
    meta = build_model_meta(model, model_checksum(args.model))
    sys.stdout.write(f"target: seat {advice.target}\n")
    sys.stdout.write("scores: " + " ".join(repr(s) for s in advice.scores) + "\n")
    sys.stdout.write(advice_response_json(advice, meta) + "\n")
    return []


def cmd_analyze(args):
    model = load_model(args.model)
    stream = _load_stream(args.infile)
    schema = model.feature_schema

    def predict_fn(log):
        result = advise(assassin_view(log), model)
        return result.target

    if schema.get("kind") != "engineered":
        raise FeatureSchemaMismatch("analyze requires an engineered-feature model")
    report = error_analysis(predict_fn, stream)
    report.baseline_random = baseline_random(stream, args.seed)
    if args.json:
        return _emit(report.to_json(), args.out)
    return _emit(report.to_text(), args.out)


def cmd_serve(args):
    serve(args.model, args.port)
    return []


# ---------------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="avalon-assassin",
                     description="Merlin-assassination inference pipeline")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, infile=False, out_required=False):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1,
                       help="parallelism bound (output is identical for any N)")
        if infile:
            p.add_argument("--in", dest="infile", required=True)
        p.add_argument("--out", required=out_required, default=None)

    def model_flags(p):
        p.add_argument("--model", choices=["linear-svc", "rbf-svc", "mlp"],
                       default="linear-svc")
        p.add_argument("--features", choices=["engineered", "general"],
                       default="engineered")
        p.add_argument("--subset", default=",".join(DEFAULT_SUBSET))
        p.add_argument("--c", type=float, default=1.0)
        p.add_argument("--gamma", type=float, default=None)
        p.add_argument("--layers", default="16,16,8")
        p.add_argument("--batch", type=int, default=256)
        p.add_argument("--lr", type=float, default=1e-5)
        p.add_argument("--epochs", type=int, default=50)
        p.add_argument("--max-iter", type=int, default=100_000)
        p.add_argument("--tol", type=float, default=None)

    p = sub.add_parser("simulate", help="generate synthetic games")
    common(p)
    p.add_argument("--games", type=int, required=True)
    p.add_argument("--merlin-leak", type=float, default=0.0)
    p.add_argument("--spy-sabotage", type=float, default=0.3)
    p.add_argument("--base-approve", type=float, default=0.7)
    p.add_argument("--eligible-only", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="parse a JSONL file and report violations")
    common(p, infile=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("filter", help="keep assassination-eligible games")
    common(p, infile=True, out_required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("featurize", help="export a feature matrix as CSV")
    common(p, infile=True)
    p.add_argument("--features", choices=["engineered", "general"],
                   default="engineered")
    p.add_argument("--subset", default=",".join(DEFAULT_SUBSET))
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", help="train a classifier and write a model file")
    common(p, infile=True, out_required=True)
    model_flags(p)
    p.add_argument("--curve-out", default=None)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("cv", help="k-fold cross-validated accuracy")
    common(p, infile=True)
    model_flags(p)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("select-features", help="powerset search over statistics")
    common(p, infile=True)
    p.add_argument("--candidates", default=",".join(STAT_IDS))
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--max-iter", type=int, default=100_000)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_select_features)

    p = sub.add_parser("predict", help="advise a target for one game or view")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--game", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("analyze", help="human-vs-model error analysis")
    common(p, infile=True)
    p.add_argument("--model", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("serve", help="run the HTTP advisor service")
    common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(func=cmd_serve)

    return parser


def _fill_tol(args):
    if getattr(args, "tol", 1) is None:
        args.tol = 1e-3 if getattr(args, "model", "") == "rbf-svc" else 1e-6


def dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    _fill_tol(args)
    started = time.monotonic()
    try:
        outputs = args.func(args)
    except DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except KeyboardInterrupt:
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    _write_manifest(args.subcommand, args, outputs, started)
    return EXIT_OK


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
