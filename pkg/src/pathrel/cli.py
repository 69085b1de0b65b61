"""Command-line interface.

Subcommands: extract-sdp, synth, train, eval, dict-match.

Exit codes: 0 success; 2 usage errors (from argparse); 3 malformed input
data, files, or configuration; 4 schema mismatch between a checkpoint
and a dataset; 1 unexpected internal failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import sys

from . import __version__
from .checkpoint import CheckpointError, load_checkpoint
from .data import (
    DatasetError,
    format_path_line,
    load_dataset,
    load_entity_pairs,
    path_record,
    save_dataset,
)
from .depgraph import ConlluError, entity_head, parse_conllu
from .dictmatch import dict_match, format_standoff
from .labels import UnknownLabel
from .model import RelationModel
from .structreg import CutRule, cut_and_line, extract_sr_sdp, select_cut_nodes
from .synth import SynthConfig, generate
from .training import ExperimentConfig, SchemaMismatch, evaluate, train


def _add_rule_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rule", choices=CutRule.VARIANTS, default=None, help="cut rule")
    p.add_argument("--cut-p", type=float, default=0.5, help="random-rule cut probability")
    p.add_argument("--cut-seed", type=int, default=0, help="random-rule seed")
    p.add_argument("--cut-tags", default="ADP,P,IN", help="prep-rule POS tags, comma-separated")


def _rule_from_args(args, default: CutRule | None = None) -> CutRule:
    if args.rule is None:
        return default if default is not None else CutRule()
    return CutRule(
        variant=args.rule,
        p=args.cut_p,
        seed=args.cut_seed,
        tag_set=frozenset(t for t in args.cut_tags.split(",") if t),
    )


def _write_out(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands


def cmd_extract_sdp(args) -> int:
    with open(args.conllu, "r", encoding="utf-8") as fh:
        trees = parse_conllu(fh.read())
    pairs = load_entity_pairs(args.pairs)
    if len(pairs) != len(trees):
        raise DatasetError(
            f"{len(trees)} sentences but {len(pairs)} entity-pair lines; they must correspond 1:1"
        )
    rule = _rule_from_args(args)
    lines = []
    for ordinal, (tree, (e1, e2)) in enumerate(zip(trees, pairs)):
        for span in (e1, e2):
            if span.end > tree.n:
                raise DatasetError(
                    f"sentence {ordinal + 1}: span [{span.start}, {span.end}] exceeds length {tree.n}"
                )
        cuts = select_cut_nodes(tree, rule, ordinal=ordinal)
        rt = cut_and_line(tree, cuts)
        h1, h2 = entity_head(tree, e1), entity_head(tree, e2)
        path = extract_sr_sdp(rt, h1, h2)
        if args.json:
            lines.append(json.dumps(path_record(h1, h2, path), sort_keys=True, separators=(",", ":")))
        else:
            lines.append(format_path_line(h1, h2, path))
    _write_out(args.out, "".join(line + "\n" for line in lines))
    return 0


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        n=args.n,
        k_types=args.k,
        seed=args.seed,
        blocks=args.blocks,
        fillers=args.fillers,
        prep_density=args.prep_density,
        span2_prob=args.span2_prob,
        residual_frac=args.residual_frac,
        distractor_prob=args.distractor_prob,
        bridge_prob=args.bridge_prob,
        entity_pool=args.entity_pool,
        filler_pool=args.filler_pool,
    )
    instances = generate(cfg)
    save_dataset(args.out, instances)
    print(f"wrote {len(instances)} instances (schema {cfg.schema.name}) to {args.out}")
    return 0


def cmd_train(args) -> int:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    overrides = {}
    for key in ("schema", "seed", "epochs", "val_size", "train_path", "embeddings_path",
                "checkpoint_path", "log_path"):
        flag = getattr(args, key)
        if flag is not None:
            overrides[key] = flag
    if args.rule is not None:
        overrides["rule"] = _rule_from_args(args)
    if args.alpha is not None:
        overrides["model"] = dataclasses.replace(config.model, alpha=args.alpha)
    config = dataclasses.replace(config, **overrides)
    result = train(config)
    best = result.history[result.best_epoch - 1]
    print(
        f"trained {config.epochs} epochs; best epoch {result.best_epoch} "
        f"(loss {best['loss']:.6f}, macro-F1 {best['macro_f1']:.4f})"
    )
    if config.checkpoint_path:
        print(f"checkpoint: {config.checkpoint_path}")
    return 0


def cmd_eval(args) -> int:
    model = RelationModel.load(args.checkpoint)
    _, meta = load_checkpoint(args.checkpoint)
    if args.rule is not None:
        rule = _rule_from_args(args)
    elif "rule" in meta:
        rule = CutRule.from_dict(meta["rule"])
    else:
        rule = CutRule()
    instances = load_dataset(args.data)
    cm = evaluate(model, instances, rule, alpha=args.alpha)
    report = cm.summary()
    report["rule"] = rule.to_dict()
    _write_out(args.out, json.dumps(report, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_dict_match(args) -> int:
    with open(args.text, "r", encoding="utf-8") as fh:
        text = fh.read()
    with open(args.dictionary, "r", encoding="utf-8") as fh:
        entries = [line.rstrip("\n") for line in fh if line.strip()]
    _write_out(args.out, format_standoff(dict_match(text, entries)))
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pathrel",
        description="Structure-regularized dependency-path relation classification.",
    )
    parser.add_argument("--version", action="version", version=f"pathrel {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-sdp", help="extract entity-head paths from CoNLL-U sentences")
    p.add_argument("--conllu", required=True, help="CoNLL-U input file")
    p.add_argument("--pairs", required=True, help="entity-pair file (4 span ints per line)")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--json", action="store_true", help="JSON-lines output with forms and POS")
    _add_rule_args(p)
    p.set_defaults(func=cmd_extract_sdp)

    p = sub.add_parser("synth", help="generate a synthetic relation corpus")
    p.add_argument("--out", required=True, help="output dataset (JSON-lines)")
    p.add_argument("--n", type=int, default=100, help="number of instances")
    p.add_argument("--k", type=int, default=9, help="number of relation types")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--blocks", type=int, default=3, help="candidate prepositional blocks")
    p.add_argument("--fillers", type=int, default=2, help="filler nouns per block")
    p.add_argument("--prep-density", type=float, default=1.0, help="per-block inclusion probability")
    p.add_argument("--span2-prob", type=float, default=0.3, help="two-token entity probability")
    p.add_argument("--residual-frac", type=float, default=0.1, help="residual-class fraction")
    p.add_argument(
        "--distractor-prob", type=float, default=0.0,
        help="probability a filler is a decoy marker form",
    )
    p.add_argument(
        "--bridge-prob", type=float, default=0.0,
        help="probability e1 attaches through a bridge noun",
    )
    p.add_argument("--entity-pool", type=int, default=30, help="entity form vocabulary size")
    p.add_argument("--filler-pool", type=int, default=20, help="filler form vocabulary size")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train a model")
    p.add_argument("--config", default=None, help="experiment config JSON file")
    p.add_argument("--train", dest="train_path", default=None, help="training dataset")
    p.add_argument("--schema", default=None, help="label schema (builtin name, synth-k<K>, or JSON file)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--val-size", dest="val_size", type=int, default=None)
    p.add_argument("--alpha", type=float, default=None, help="decode mixture weight")
    p.add_argument("--embeddings", dest="embeddings_path", default=None, help="word embeddings file")
    p.add_argument("--checkpoint", dest="checkpoint_path", default=None, help="checkpoint output")
    p.add_argument("--log", dest="log_path", default=None, help="metrics log output (JSON-lines)")
    _add_rule_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on a dataset")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--data", required=True, help="evaluation dataset (JSON-lines)")
    p.add_argument("--alpha", type=float, default=None, help="decode mixture weight")
    p.add_argument("--out", default=None, help="report file (default stdout)")
    _add_rule_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("dict-match", help="match dictionary entities in raw text")
    p.add_argument("--text", required=True, help="input text file")
    p.add_argument("--dictionary", required=True, help="one entity surface form per line")
    p.add_argument("--out", default=None, help="standoff TSV output (default stdout)")
    p.set_defaults(func=cmd_dict_match)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except SchemaMismatch as err:
        print(f"schema mismatch: {err}", file=sys.stderr)
        return 4
    except (DatasetError, ConlluError, UnknownLabel, CheckpointError, OSError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except Exception as err:  # pragma: no cover - safety net
        print(f"unexpected error: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
