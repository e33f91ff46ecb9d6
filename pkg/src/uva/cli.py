"""Command-line pipeline driver.

Subcommands: synth, ingest, index, generate, rba, eval, export-conkg,
export-pairs. Every stage is deterministic given its inputs and seed, and
every output file carries the corpus content hash so cross-stage mismatches
abort early.

Settings resolve in precedence order: command-line flag > environment
(UVA_THREADS, UVA_SEED) > config file (plain ``key = value`` lines, ``#``
comments) > built-in default.

Exit status: 0 success, 2 parse error (E_PARSE), 3 validation error
(E_VALIDATE), 4 parameter error (E_PARAM), 5 unknown identifier (E_NOTFOUND),
6 prediction/label join failure (E_JOIN), 7 filesystem failure (E_IO),
1 unexpected failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import corpus as corpus_mod
from . import datagen, eval as eval_mod, lexsim, rba
from .errors import ParameterError, ParseError, UvaError, ValidationError

_DEFAULTS: dict[str, object] = {
    "atoms": None,
    "hierarchy": None,
    "out_dir": "out",
    "release": "SYN",
    "seed": 0,
    "threads": 1,
    "pos_split": 0.80,
    "neg_split": 0.50,
    "topn_multiplier": 2,
    "ransim_multiplier": 2,
    "rannosim_multiplier": 2,
    "rba_mode": "ss-lssc-trans",
    "df_cutoff": None,
    "n_cuis": 1000,
    "cui_size_weights": (0.4, 0.3, 0.15, 0.1, 0.05),
    "vocab_sources": 3,
    "sg_pool": ("CHEM", "DISO", "PROC", "ANAT"),
    "token_pool": 400,
    "tokens_per_term": 3,
    "variant_rate": 0.4,
    "share_rate": 0.15,
    "hierarchy_depth": 3,
    "scui_absent_rate": 0.05,
}

_INT_KEYS = {
    "seed", "threads", "topn_multiplier", "ransim_multiplier", "rannosim_multiplier",
    "df_cutoff", "n_cuis", "vocab_sources", "token_pool", "tokens_per_term",
    "hierarchy_depth",
}
_FLOAT_KEYS = {"pos_split", "neg_split", "variant_rate", "share_rate", "scui_absent_rate"}
_FLOAT_LIST_KEYS = {"cui_size_weights"}
_STR_LIST_KEYS = {"sg_pool"}


def parse_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            values[key.strip()] = value.strip()
    return values


def _convert(key: str, raw: str) -> object:
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _FLOAT_LIST_KEYS:
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if key in _STR_LIST_KEYS:
            return tuple(x.strip() for x in raw.split(",") if x.strip())
    except ValueError:
        raise ParameterError(f"bad value for {key}: {raw!r}") from None
    return raw


class Settings:
    """Resolved configuration for one CLI invocation."""

    def __init__(self, args: argparse.Namespace):
        values = dict(_DEFAULTS)
        config_path = getattr(args, "config", None)
        if config_path:
            for key, raw in parse_config_file(config_path).items():
                if key not in _DEFAULTS:
                    raise ParameterError(f"unknown config key {key!r} in {config_path}")
                values[key] = _convert(key, raw)
        if "UVA_THREADS" in os.environ:
            values["threads"] = _convert("threads", os.environ["UVA_THREADS"])
        if "UVA_SEED" in os.environ:
            values["seed"] = _convert("seed", os.environ["UVA_SEED"])
        for key in _DEFAULTS:
            flag = getattr(args, key, None)
            if flag is not None:
                values[key] = flag
        if values["threads"] < 1:
            raise ParameterError("threads must be >= 1")
        self.values = values

    def __getattr__(self, key: str):
        try:
            return self.values[key]
        except KeyError:
            raise AttributeError(key) from None

    def gen_config(self) -> datagen.GenConfig:
        return datagen.GenConfig(
            seed=self.seed,
            pos_split=self.pos_split,
            neg_split=self.neg_split,
            topn_multiplier=self.topn_multiplier,
            ransim_multiplier=self.ransim_multiplier,
            rannosim_multiplier=self.rannosim_multiplier,
        )

    def synth_params(self) -> corpus_mod.SynthParams:
        return corpus_mod.SynthParams(
            n_cuis=self.n_cuis,
            cui_size_weights=tuple(self.cui_size_weights),
            vocab_sources=self.vocab_sources,
            sg_pool=tuple(self.sg_pool),
            token_pool=self.token_pool,
            tokens_per_term=self.tokens_per_term,
            variant_rate=self.variant_rate,
            share_rate=self.share_rate,
            hierarchy_depth=self.hierarchy_depth,
            scui_absent_rate=self.scui_absent_rate,
        )

    def load_corpus(self, src_filter: set[str] | None = None) -> corpus_mod.Corpus:
        if not self.atoms:
            raise ParameterError("no atoms file configured (key 'atoms' or --atoms)")
        return corpus_mod.load_corpus(self.atoms, self.hierarchy, src_filter=src_filter)


def _corpus_paths(settings: Settings) -> tuple[str, str]:
    base = os.path.join(settings.out_dir, settings.release)
    return base + "_atoms.psv", base + "_hierarchy.psv"


def cmd_synth(settings: Settings, args) -> int:
    c = corpus_mod.synth_corpus(settings.synth_params(), settings.seed)
    os.makedirs(settings.out_dir, exist_ok=True)
    atoms_path, hier_path = _corpus_paths(settings)
    corpus_mod.write_corpus(c, atoms_path, hier_path)
    print(f"synth: {len(c)} atoms, {len(c.by_cui)} concepts -> {atoms_path}")
    print(f"corpus_hash {c.content_hash()}")
    return 0


def cmd_ingest(settings: Settings, args) -> int:
    src_filter = set(args.src_allowlist.split(",")) if args.src_allowlist else None
    c = settings.load_corpus(src_filter)
    print(
        f"ingest: {len(c)} atoms, {len(c.by_cui)} concepts, {len(c.by_scui)} scuis, "
        f"{sum(len(p) for p in c.hierarchy.values())} hierarchy edges"
    )
    print(f"corpus_hash {c.content_hash()}")
    if args.out_atoms:
        corpus_mod.write_corpus(c, args.out_atoms, args.out_hierarchy)
        print(f"wrote canonical corpus to {args.out_atoms}")
    return 0


def cmd_index(settings: Settings, args) -> int:
    c = settings.load_corpus()
    index = lexsim.build_index(c, workers=settings.threads, df_cutoff=settings.df_cutoff)
    lexsim.save_index(index, args.out)
    print(f"index: {len(index.postings)} tokens over {len(index.aui_list)} atoms -> {args.out}")
    print(f"corpus_hash {index.corpus_hash}")
    return 0


def cmd_generate(settings: Settings, args) -> int:
    c = settings.load_corpus()
    if args.index:
        index = lexsim.load_index(args.index)
    else:
        index = lexsim.build_index(c, workers=settings.threads, df_cutoff=settings.df_cutoff)
    bundle = datagen.generate_bundle(c, index, settings.gen_config(), workers=settings.threads)
    manifest = datagen.write_bundle(bundle, settings.out_dir, settings.release)
    total = sum(v["total"] for v in manifest["counts"].values())
    print(f"generate: {total} pair rows across {len(manifest['counts'])} sets -> {settings.out_dir}")
    if any(manifest["shortfalls"].values()):
        print(f"shortfalls: {manifest['shortfalls']}")
    print(f"corpus_hash {bundle.corpus_hash}")
    return 0


def cmd_rba(settings: Settings, args) -> int:
    c = settings.load_corpus()
    pairs = datagen.read_pairs(args.pairs, expect_hash=c.content_hash())
    mode = rba.mode_from_cli(settings.rba_mode)
    partition = rba.build_partition(c, mode) if mode == "SS_LS_SC_TRANS" else None
    preds = rba.predict_pairs(c, pairs, mode, partition)
    eval_mod_ns = eval_mod
    write_predictions(preds, args.out, c.content_hash())
    cm = eval_mod_ns.score_predictions(pairs, preds)
    report = eval_mod_ns.metrics(cm, predictor=f"rba-{settings.rba_mode}", dataset=os.path.basename(args.pairs))
    print(eval_mod_ns.render_report([report]), end="")
    if args.metrics_csv:
        with open(args.metrics_csv, "w", encoding="utf-8") as f:
            f.write(eval_mod_ns.to_csv([report]))
    print(f"rba: {len(preds)} predictions -> {args.out}")
    return 0


def write_predictions(preds: list[tuple[str, str, int]], path: str, corpus_hash: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        if corpus_hash:
            f.write(f"# corpus={corpus_hash}\n")
        for anchor, other, pred in sorted(preds):
            f.write(f"{anchor}|{other}|{pred}\n")


def read_predictions(path: str) -> tuple[list[tuple[str, str, int]], str | None]:
    preds: list[tuple[str, str, int]] = []
    file_hash = None
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if line.startswith("# corpus="):
                    file_hash = line.split("=", 1)[1].strip()
                continue
            fields = line.split("|")
            if len(fields) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 fields, got {len(fields)}")
            if fields[2] not in ("0", "1"):
                raise ParseError(f"{path}:{lineno}: prediction must be 0 or 1")
            preds.append((fields[0], fields[1], int(fields[2])))
    return preds, file_hash


def _parse_pair_set(spec: str) -> tuple[str, str, str]:
    name, _, rest = spec.partition("=")
    labels, _, preds = rest.partition(":")
    if not name or not labels or not preds:
        raise ParameterError(f"--pair-set must look like NAME=LABELS.psv:PREDS.psv, got {spec!r}")
    return name, labels, preds


def cmd_eval(settings: Settings, args) -> int:
    reports = []
    for spec in args.pair_set:
        dataset, labels_path, preds_path = _parse_pair_set(spec)
        labels = datagen.read_pairs(labels_path)
        preds, preds_hash = read_predictions(preds_path)
        label_hash = _file_corpus_hash(labels_path)
        if label_hash and preds_hash and label_hash != preds_hash:
            raise ValidationError(
                f"{preds_path} was produced from corpus {preds_hash[:12]}..., "
                f"labels are from {label_hash[:12]}..."
            )
        cm = eval_mod.score_predictions(labels, preds)
        reports.append(eval_mod.metrics(cm, predictor=args.predictor, dataset=dataset))
    print(eval_mod.render_report(reports), end="")
    if args.out_csv:
        with open(args.out_csv, "w", encoding="utf-8") as f:
            f.write(eval_mod.to_csv(reports))
        print(f"eval: wrote {args.out_csv}")
    return 0


def _file_corpus_hash(path: str) -> str | None:
    with open(path, encoding="utf-8") as f:
        for line in f:
            if line.startswith("# corpus="):
                return line.rstrip("\n").split("=", 1)[1].strip()
            if not line.startswith("#"):
                break
    return None


def cmd_export_conkg(settings: Settings, args) -> int:
    c = settings.load_corpus()
    variants = datagen.CONKG_VARIANTS if args.variant == "all" else (args.variant,)
    os.makedirs(settings.out_dir, exist_ok=True)
    for variant in variants:
        triples = datagen.export_conkg(c, variant)
        path = os.path.join(settings.out_dir, f"{settings.release}_{variant}.psv")
        datagen.write_triples(triples, path, c.content_hash())
        print(f"export-conkg: {len(triples)} triples -> {path}")
    return 0


def cmd_export_pairs(settings: Settings, args) -> int:
    c = settings.load_corpus()
    pairs = datagen.read_pairs(args.pairs, expect_hash=c.content_hash())
    datagen.export_pairs_jsonl(c, pairs, args.out)
    print(f"export-pairs: {len(pairs)} records -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uva",
        description="Terminology synonymy pipeline: corpus, similarity index, dataset generation, rule baseline, evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, with_corpus: bool = True) -> None:
        p.add_argument("--config", help="key = value settings file")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--out-dir", dest="out_dir")
        p.add_argument("--release")
        if with_corpus:
            p.add_argument("--atoms", help="atoms file (AUI|STR|SRC|SCUI|CUI|SG|SUI|LUI)")
            p.add_argument("--hierarchy", help="hierarchy file (SCUI|PARENT_SCUI)")

    p = sub.add_parser("synth", help="generate a synthetic corpus")
    common(p, with_corpus=False)
    for key in ("n_cuis", "vocab_sources", "token_pool", "tokens_per_term", "hierarchy_depth"):
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int)
    for key in ("variant_rate", "share_rate", "scui_absent_rate"):
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="load, validate and summarize a corpus")
    common(p)
    p.add_argument("--src-allowlist", help="comma-separated source ids to keep")
    p.add_argument("--out-atoms", help="write the canonical corpus here")
    p.add_argument("--out-hierarchy")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="build and save the similarity index")
    common(p)
    p.add_argument("--df-cutoff", dest="df_cutoff", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("generate", help="generate the eight-dataset bundle")
    common(p)
    p.add_argument("--index", help="reuse a saved index instead of rebuilding")
    for key in ("pos_split", "neg_split"):
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=float)
    for key in ("topn_multiplier", "ransim_multiplier", "rannosim_multiplier"):
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, type=int)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("rba", help="rule-based predictions over a pair file")
    common(p)
    p.add_argument("--pairs", required=True)
    p.add_argument("--mode", dest="rba_mode", choices=sorted(rba._CLI_MODES))
    p.add_argument("--out", required=True, help="prediction file (ANCHOR|OTHER|PRED)")
    p.add_argument("--metrics-csv")
    p.set_defaults(func=cmd_rba)

    p = sub.add_parser("eval", help="score prediction files against labeled pairs")
    common(p, with_corpus=False)
    p.add_argument(
        "--pair-set",
        action="append",
        required=True,
        help="NAME=LABELS.psv:PREDS.psv (repeatable)",
    )
    p.add_argument("--predictor", default="predictor")
    p.add_argument("--out-csv")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-conkg", help="export context triples")
    common(p)
    p.add_argument("--variant", default="all", choices=list(datagen.CONKG_VARIANTS) + ["all"])
    p.set_defaults(func=cmd_export_conkg)

    p = sub.add_parser("export-pairs", help="export a pair file as JSONL records")
    common(p)
    p.add_argument("--pairs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_pairs)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings(args)
        return args.func(settings, args)
    except UvaError as exc:
        print(f"error {exc.code}: {exc}", file=sys.stderr)
        return exc.exit_status
    except OSError as exc:
        print(f"error E_IO: {exc}", file=sys.stderr)
        return 7


if __name__ == "__main__":
    sys.exit(main())
