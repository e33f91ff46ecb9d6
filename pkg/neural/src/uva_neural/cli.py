"""Command-line driver: train graph embeddings, train a model, evaluate.

Consumes the dataset pipeline's exports (triple files, JSONL pair files) and
emits metrics CSV plus a checkpoint directory with a JSON config snapshot.
"""

from __future__ import annotations

import argparse
import sys

from . import context, io, kge, models


def cmd_train_kge(args) -> int:
    triples = io.read_triples(args.triples)
    config = kge.KgeConfig(
        technique=args.technique,
        half_dim=args.half_dim,
        epochs=args.epochs,
        learning_rate=args.lr,
        margin=args.margin,
        negatives_per_positive=args.negatives,
        seed=args.seed,
    )
    embeddings = kge.train_kge(triples, config)
    embeddings.save(args.out)
    kge.save_config(config, args.out)
    print(
        f"train-kge: {len(triples)} triples, {len(embeddings.vectors)} entities, "
        f"loss {embeddings.loss_history[0]:.4f} -> {embeddings.loss_history[-1]:.4f}, saved to {args.out}"
    )
    return 0


def _context_store_for(records, args):
    embeddings = kge.EntityEmbeddings.load(args.embeddings)
    scui_of, sg_of_scui = io.context_maps(records)
    auis = sorted({r.anchor_aui for r in records} | {r.other_aui for r in records})
    return context.build_context_store(auis, args.context_variant, embeddings, scui_of, sg_of_scui)


def cmd_train_model(args) -> int:
    records = io.read_pairs_jsonl(args.train)
    config = models.ModelConfig(
        kind=args.kind,
        token_dim=args.token_dim,
        hidden=args.hidden,
        context_variant=args.context_variant if args.kind == "ConLM" else None,
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        seed=args.seed,
    )
    store = None
    if args.kind == "ConLM":
        if not args.embeddings:
            print("error: ConLM needs --embeddings", file=sys.stderr)
            return 4
        store = _context_store_for(records, args)
    word_vectors = models.load_word_vectors(args.word_vectors) if args.word_vectors else None
    model = models.train_model(records, config, context_store=store, word_vectors=word_vectors)
    model.save(args.out)
    print(
        f"train-model: {len(records)} pairs, loss {model.loss_history[0]:.4f} -> "
        f"{model.loss_history[-1]:.4f}, saved to {args.out}"
    )
    return 0


def cmd_evaluate(args) -> int:
    model = models.TrainedModel.load(args.model)
    records = io.read_pairs_jsonl(args.pairs)
    if model.config.kind == "ConLM":
        missing = {
            aui
            for r in records
            for aui in (r.anchor_aui, r.other_aui)
            if aui not in (model.context_store or {})
        }
        if missing and args.embeddings:
            # derive contexts for unseen atoms from the same embedding space
            class _Args:
                embeddings = args.embeddings
                context_variant = model.config.context_variant

            extra = _context_store_for(records, _Args)
            model.context_store.update(extra)
    report = models.evaluate_model(
        model, records, predictor=model.config.kind, dataset=args.dataset
    )
    csv_text = io.metrics_csv([report])
    print(csv_text, end="")
    if args.out_csv:
        with open(args.out_csv, "w", encoding="utf-8") as f:
            f.write(csv_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uva-neural")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-kge", help="train entity embeddings over a triple file")
    p.add_argument("--triples", required=True)
    p.add_argument("--technique", choices=list(kge.TECHNIQUES), default="ComplEx")
    p.add_argument("--half-dim", dest="half_dim", type=int, default=16)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=0.05)
    p.add_argument("--margin", type=float, default=1.0)
    p.add_argument("--negatives", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_kge)

    p = sub.add_parser("train-model", help="train LexLM or ConLM on JSONL pairs")
    p.add_argument("--train", required=True, help="JSONL pair export")
    p.add_argument("--kind", choices=["LexLM", "ConLM"], default="LexLM")
    p.add_argument("--context-variant", dest="context_variant", default="ConSS",
                   choices=list(context.CONTEXT_VARIANTS))
    p.add_argument("--embeddings", help="directory written by train-kge (ConLM)")
    p.add_argument("--word-vectors", dest="word_vectors", help="plain-text token vectors")
    p.add_argument("--token-dim", dest="token_dim", type=int, default=32)
    p.add_argument("--hidden", type=int, default=32)
    p.add_argument("--epochs", type=int, default=25)
    p.add_argument("--batch-size", dest="batch_size", type=int, default=32)
    p.add_argument("--lr", type=float, default=1e-2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_model)

    p = sub.add_parser("evaluate", help="score a trained model on JSONL pairs")
    p.add_argument("--model", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--embeddings", help="embedding dir, to derive contexts for unseen atoms")
    p.add_argument("--dataset", default="GEN")
    p.add_argument("--out-csv", dest="out_csv")
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
