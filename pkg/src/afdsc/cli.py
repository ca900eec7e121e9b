"""Command-line surface: synth, train, eval, predict, ablate, poolers, crossdomain.

Every run resolves its configuration as defaults < preset < config file <
flags and writes the resolved config next to its outputs so it can be
replayed exactly. Exit codes: 0 success, 2 usage, 3 config error, 4 data
error, 5 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .corpus import load_corpus, load_queries, write_corpus, write_queries
from .errors import AfdscError, ConfigError, DataError
from .evaluation import (
    compare_poolers,
    config_hash,
    cross_domain,
    evaluate,
    render_table,
    results_to_json,
    run_ablation,
)
from .model import predict_aspect_polarity
from .synthetic import (
    builtin_lexicon,
    generate_mixed_polarity_queries,
    oracle_corpus,
)
from .trainer import PRESETS, TrainConfig, load_checkpoint, save_checkpoint, train

EXIT_OK, EXIT_USAGE, EXIT_CONFIG, EXIT_DATA, EXIT_RUNTIME = 0, 2, 3, 4, 5

_OVERRIDE_FIELDS = (
    "batch_size", "learning_rate", "warmup_ratio", "max_grad_norm", "epochs",
    "seed", "mwp_weight", "pooling", "vocab_min_count",
)
_ENCODER_FIELDS = ("max_len", "dim", "num_layers", "num_heads", "ffn_dim", "dropout_rate")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config file (see README)")
    parser.add_argument("--preset", choices=sorted(PRESETS), help="named hyperparameter preset")
    for name in _OVERRIDE_FIELDS:
        flag = "--" + name.replace("_", "-")
        if name == "pooling":
            parser.add_argument(flag, choices=("pos_att", "cls", "avg"))
        elif name in ("batch_size", "epochs", "seed", "vocab_min_count"):
            parser.add_argument(flag, type=int)
        else:
            parser.add_argument(flag, type=float)
    for name in _ENCODER_FIELDS:
        flag = "--" + name.replace("_", "-")
        parser.add_argument(flag, type=float if name == "dropout_rate" else int)
    parser.add_argument("--no-wsp", action="store_true", help="drop the word-sentiment task")
    parser.add_argument("--no-mwp", action="store_true", help="drop the masked-word task")
    parser.add_argument("--no-pos-mask", action="store_true",
                        help="attend over all tokens instead of aspect positions")
    parser.add_argument("--mwp-all-positions", action="store_true",
                        help="reconstruct every token, not only masked ones")


def resolve_config(args: argparse.Namespace) -> TrainConfig:
    data = TrainConfig().to_dict()
    if getattr(args, "preset", None):
        data.update(PRESETS[args.preset])
    if getattr(args, "config", None):
        try:
            data.update(json.loads(Path(args.config).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file {args.config}: {exc}") from exc
    for name in _OVERRIDE_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    encoder = dict(data.get("encoder", {}))
    for name in _ENCODER_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            encoder[name] = value
    data["encoder"] = encoder
    if getattr(args, "no_wsp", False):
        data["use_wsp"] = False
    if getattr(args, "no_mwp", False):
        data["use_mwp"] = False
    if getattr(args, "no_pos_mask", False):
        data["use_pos_mask"] = False
    if getattr(args, "mwp_all_positions", False):
        data["mwp_all_positions"] = True
    return TrainConfig.from_dict(data)


def _write_resolved_config(cfg: TrainConfig, out_dir: Path) -> None:
    payload = {"config_hash": config_hash(cfg), **cfg.to_dict()}
    (out_dir / "config.json").write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def _cmd_synth(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    docs, queries = oracle_corpus(
        num_docs=args.num_docs,
        seed=args.seed,
        num_eval_docs=args.eval_docs,
        domain=args.domain,
    )
    write_corpus(docs, out / "train.jsonl")
    write_queries(queries, out / "queries.jsonl")
    if args.mixed_docs > 0:
        mixed = generate_mixed_polarity_queries(args.mixed_docs, seed=args.seed, domain=args.domain)
        write_queries(mixed, out / "mixed_queries.jsonl")
    lex = builtin_lexicon()
    (out / "lexicon_positive.txt").write_text("\n".join(sorted(lex.positive)) + "\n")
    (out / "lexicon_negative.txt").write_text("\n".join(sorted(lex.negative)) + "\n")
    resolved = {
        "num_docs": args.num_docs,
        "eval_docs": args.eval_docs,
        "seed": args.seed,
        "domain": args.domain,
        "mixed_docs": args.mixed_docs,
    }
    (out / "synth_config.json").write_text(json.dumps(resolved, indent=2) + "\n")
    print(f"wrote {len(docs)} documents and {len(queries)} queries under {out}")
    return EXIT_OK


def _cmd_train(args) -> int:
    cfg = resolve_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus = load_corpus(args.train)
    result = train(corpus, cfg, metrics_path=out / "metrics.csv")
    save_checkpoint(result.state, out / "checkpoint.ckpt")
    _write_resolved_config(cfg, out)
    (out / "epoch_metrics.json").write_text(json.dumps(result.epoch_metrics, indent=2) + "\n")
    final = result.epoch_metrics[-1] if result.epoch_metrics else {}
    print(f"trained {result.state.step} steps; final epoch loss {final.get('loss', float('nan')):.4f}")
    print(f"checkpoint: {out / 'checkpoint.ckpt'}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    state = load_checkpoint(args.ckpt)
    queries = load_queries(args.queries)
    result = evaluate(state.model, queries)
    payload = results_to_json({"eval": result}, state.config)
    if args.format == "json":
        print(json.dumps(payload, indent=2))
    else:
        print(render_table({"eval": result}))
    if args.out:
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_predict(args) -> int:
    state = load_checkpoint(args.ckpt)
    queries = load_queries(args.input, require_gold=False)
    lines = [
        json.dumps(predict_aspect_polarity(lq.query, state.model).to_json())
        for lq in queries
    ]
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _run_comparison(args, runner, label: str) -> int:
    cfg = resolve_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus = load_corpus(args.train)
    queries = load_queries(args.queries)
    seeds = None
    if args.seeds:
        try:
            seeds = [int(s) for s in args.seeds.split(",")]
        except ValueError as exc:
            raise ConfigError(f"--seeds must be a comma-separated int list: {args.seeds!r}") from exc
    results = runner(corpus, queries, cfg, seeds=seeds)
    print(render_table(results))
    payload = results_to_json(results, cfg)
    (out / f"{label}_results.json").write_text(json.dumps(payload, indent=2) + "\n")
    _write_resolved_config(cfg, out)
    return EXIT_OK


def _cmd_crossdomain(args) -> int:
    cfg = resolve_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    corpus = load_corpus(args.train)
    queries = load_queries(args.queries)
    result = cross_domain(corpus, queries, cfg)
    results = {"cross_domain": result}
    print(render_table(results))
    (out / "crossdomain_results.json").write_text(
        json.dumps(results_to_json(results, cfg), indent=2) + "\n"
    )
    _write_resolved_config(cfg, out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afdsc",
        description="Train a rating classifier over aspect-pooled representations "
        "and reuse it zero-shot for aspect sentiment.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic corpus with known aspect polarities")
    p.add_argument("--out", required=True)
    p.add_argument("--num-docs", type=int, default=5000)
    p.add_argument("--eval-docs", type=int, default=700)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--domain", choices=("a", "b", "all"), default="all")
    p.add_argument("--mixed-docs", type=int, default=0)
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("train", help="train on a rated JSONL corpus")
    p.add_argument("--train", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("eval", help="zero-shot aspect metrics from a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--format", choices=("json", "table"), default="table")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("predict", help="per-aspect predictions as JSONL")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("ablate", help="train and evaluate {full, -wsp, -mwp, -pos_mask}")
    p.add_argument("--train", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seeds", help="comma-separated seed list; results pool the seeds")
    _add_config_flags(p)
    p.set_defaults(func=lambda args: _run_comparison(args, run_ablation, "ablation"))

    p = sub.add_parser("poolers", help="compare attention pooling with CLS and mean baselines")
    p.add_argument("--train", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seeds", help="comma-separated seed list; results pool the seeds")
    _add_config_flags(p)
    p.set_defaults(func=lambda args: _run_comparison(args, compare_poolers, "poolers"))

    p = sub.add_parser("crossdomain", help="train on one domain, evaluate on another")
    p.add_argument("--train", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p)
    p.set_defaults(func=_cmd_crossdomain)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (AfdscError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
