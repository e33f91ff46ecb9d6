"""Synonymy dataset generation.

Positive pairs are all ordered same-concept atom pairs. Negative pairs come in
four variants controlled by per-anchor count laws, where k is the anchor's
positive count (concept size minus one):

  TOPN_SIM   the 2k highest-Jaccard different-concept atoms (1 when k = 0)
  RAN_SIM    2k uniform draws from the Jaccard > 0 pool (1 when k = 0)
  RAN_NOSIM  2k uniform draws from the Jaccard = 0 pool (0 when k = 0)
  ALL        union of the three, at most 6k per anchor after dedup

The multipliers (default 2) are configurable. Every anchor samples from its
own RNG stream derived from (seed, sampler, anchor AUI), so output is
independent of iteration order and worker count. When ALL is assembled the
random-SIM sampler excludes the top-N picks of the same anchor; a variant
generated on its own samples from the full pool.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .corpus import Corpus
from .errors import ParameterError, ParseError, ValidationError
from .lexsim import SimIndex
from .util import parallel_map, sha256_file, stream_rng

NEG_VARIANTS = ("TOPN_SIM", "RAN_SIM", "RAN_NOSIM")
VARIANTS = NEG_VARIANTS + ("ALL",)
BUNDLE_SETS = tuple(f"{half}_{v}" for half in ("TRAIN", "GEN") for v in VARIANTS)

POS = "POS"
NEG = "NEG"
SIM = "SIM"
NOSIM = "NOSIM"
NA = "NA"


@dataclass(frozen=True, slots=True)
class LabeledPair:
    """Ordered (anchor, other) pair; jacc is populated for negatives."""

    anchor: str
    other: str
    label: str
    simclass: str
    jacc: float | None = None

    def key(self) -> tuple[str, str]:
        return (self.anchor, self.other)


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    pos_split: float = 0.80
    neg_split: float = 0.50
    topn_multiplier: int = 2
    ransim_multiplier: int = 2
    rannosim_multiplier: int = 2

    def validate(self) -> None:
        for name in ("pos_split", "neg_split"):
            ratio = getattr(self, name)
            if not 0.0 < ratio < 1.0:
                raise ParameterError(f"{name} must be in (0, 1), got {ratio}")
        for name in ("topn_multiplier", "ransim_multiplier", "rannosim_multiplier"):
            mult = getattr(self, name)
            if mult < 0:
                raise ParameterError(f"{name} must be >= 0, got {mult}")


@dataclass
class DatasetBundle:
    """The eight generated pair sets plus provenance."""

    sets: dict[str, list[LabeledPair]]
    corpus_hash: str
    config: GenConfig
    shortfalls: dict[str, int] = field(default_factory=dict)

    def counts(self) -> dict[str, dict[str, int]]:
        out = {}
        for name, pairs in self.sets.items():
            pos = sum(1 for p in pairs if p.label == POS)
            out[name] = {"pos": pos, "neg": len(pairs) - pos, "total": len(pairs)}
        return out


def positives(corpus: Corpus) -> list[LabeledPair]:
    """All ordered pairs of distinct atoms sharing a concept; each anchor in a
    concept of size n contributes exactly n - 1 pairs."""
    pairs: list[LabeledPair] = []
    for cui in sorted(corpus.by_cui):
        members = corpus.by_cui[cui]
        if len(members) < 2:
            continue
        for a in members:
            for b in members:
                if a != b:
                    pairs.append(LabeledPair(a, b, POS, NA))
    return pairs


def _check_index(corpus: Corpus, index: SimIndex) -> None:
    if index.corpus_hash != corpus.content_hash():
        raise ValidationError(
            "index/corpus mismatch: index was built for corpus "
            f"{index.corpus_hash[:12]}..., got {corpus.content_hash()[:12]}..."
        )


class _NegSampler:
    """Per-anchor negative sampling over a corpus + index pair."""

    def __init__(self, corpus: Corpus, index: SimIndex, config: GenConfig):
        _check_index(corpus, index)
        config.validate()
        self.corpus = corpus
        self.index = index
        self.config = config
        self.aui_list = corpus.aui_list
        self.n = len(self.aui_list)
        cui_codes: dict[str, int] = {}
        codes = np.empty(self.n, dtype=np.int64)
        for i, aui in enumerate(self.aui_list):
            cui = corpus.atoms[aui].cui
            codes[i] = cui_codes.setdefault(cui, len(cui_codes))
        self.cui_code = codes
        self.k_of = np.array(
            [corpus.concept_size(corpus.atoms[aui].cui) - 1 for aui in self.aui_list],
            dtype=np.int64,
        )

    def _targets(self, k: int) -> tuple[int, int, int]:
        cfg = self.config
        topn = cfg.topn_multiplier * k if k > 0 else (1 if cfg.topn_multiplier > 0 else 0)
        ransim = cfg.ransim_multiplier * k if k > 0 else (1 if cfg.ransim_multiplier > 0 else 0)
        nosim = cfg.rannosim_multiplier * k
        return topn, ransim, nosim

    def sample_anchor(
        self, idx: int, variants: tuple[str, ...], exclusive: bool
    ) -> tuple[dict[str, list[LabeledPair]], dict[str, int]]:
        aui = self.aui_list[idx]
        k = int(self.k_of[idx])
        want_topn, want_ransim, want_nosim = self._targets(k)
        out: dict[str, list[LabeledPair]] = {v: [] for v in variants}
        short: dict[str, int] = {v: 0 for v in variants}

        sim_idx = sim_scores = None
        if "TOPN_SIM" in variants or "RAN_SIM" in variants:
            cand, scores = self.index.candidate_arrays(idx)
            neg_mask = self.cui_code[cand] != self.cui_code[idx]
            sim_idx, sim_scores = cand[neg_mask], scores[neg_mask]

        taken_topn = 0
        if "TOPN_SIM" in variants:
            taken_topn = min(want_topn, len(sim_idx))
            out["TOPN_SIM"] = [
                LabeledPair(aui, self.aui_list[j], NEG, SIM, float(s))
                for j, s in zip(sim_idx[:taken_topn], sim_scores[:taken_topn])
            ]
            short["TOPN_SIM"] = want_topn - taken_topn

        if "RAN_SIM" in variants:
            start = taken_topn if exclusive else 0
            pool_positions = range(start, len(sim_idx))
            take = min(want_ransim, len(pool_positions))
            rng = stream_rng(self.config.seed, "ransim", aui)
            picks = rng.sample(pool_positions, take) if take else []
            out["RAN_SIM"] = [
                LabeledPair(aui, self.aui_list[sim_idx[p]], NEG, SIM, float(sim_scores[p]))
                for p in sorted(picks)
            ]
            short["RAN_SIM"] = want_ransim - take

        if "RAN_NOSIM" in variants and want_nosim > 0:
            picked = self._sample_nosim(idx, aui, want_nosim)
            out["RAN_NOSIM"] = [
                LabeledPair(aui, self.aui_list[j], NEG, NOSIM, 0.0) for j in picked
            ]
            short["RAN_NOSIM"] = want_nosim - len(picked)

        return out, short

    def _sample_nosim(self, idx: int, aui: str, want: int) -> list[int]:
        """Uniform draws without replacement from the Jaccard = 0 pool.

        Rejection sampling against the token sets; falls back to exact pool
        enumeration when the pool is too small for rejection to finish.
        """
        rng = stream_rng(self.config.seed, "rannosim", aui)
        anchor_set = self.index.token_set(idx)
        anchor_code = self.cui_code[idx]
        token_sets = self.index.token_sets
        picked: set[int] = set()
        tries = 0
        cap = 60 * want + 200
        while len(picked) < want and tries < cap:
            tries += 1
            j = rng.randrange(self.n)
            if j == idx or j in picked or self.cui_code[j] == anchor_code:
                continue
            if anchor_set.isdisjoint(token_sets[j]):
                picked.add(j)
        if len(picked) < want:
            pool = [
                j
                for j in range(self.n)
                if j != idx
                and self.cui_code[j] != anchor_code
                and anchor_set.isdisjoint(token_sets[j])
            ]
            exact_rng = stream_rng(self.config.seed, "rannosim.exact", aui)
            return sorted(exact_rng.sample(pool, min(want, len(pool))))
        return sorted(picked)


def _run_sampler(
    sampler: _NegSampler,
    variants: tuple[str, ...],
    exclusive: bool,
    workers: int = 1,
) -> tuple[dict[str, list[LabeledPair]], dict[str, int]]:
    n = sampler.n
    step = max(1, (n + max(workers, 1) - 1) // max(workers, 1))
    chunks = [(lo, min(lo + step, n)) for lo in range(0, n, step)]

    def do_chunk(chunk: tuple[int, int]):
        lo, hi = chunk
        sets: dict[str, list[LabeledPair]] = {v: [] for v in variants}
        short: dict[str, int] = {v: 0 for v in variants}
        for i in range(lo, hi):
            out, s = sampler.sample_anchor(i, variants, exclusive)
            for v in variants:
                sets[v].extend(out[v])
                short[v] += s[v]
        return sets, short

    sets: dict[str, list[LabeledPair]] = {v: [] for v in variants}
    shortfalls: dict[str, int] = {v: 0 for v in variants}
    for chunk_sets, chunk_short in parallel_map(do_chunk, chunks, workers=workers):
        for v in variants:
            sets[v].extend(chunk_sets[v])
            shortfalls[v] += chunk_short[v]
    return sets, shortfalls


def negatives(
    corpus: Corpus,
    index: SimIndex,
    variant: str,
    config: GenConfig,
    workers: int = 1,
) -> list[LabeledPair]:
    """Generate one negative variant on its own (no cross-variant exclusion
    except inside ALL, which assembles all three with per-anchor exclusion)."""
    if variant not in VARIANTS:
        raise ParameterError(f"unknown variant {variant!r}, expected one of {VARIANTS}")
    sampler = _NegSampler(corpus, index, config)
    if variant == "ALL":
        sets, _ = _run_sampler(sampler, NEG_VARIANTS, exclusive=True, workers=workers)
        merged = sets["TOPN_SIM"] + sets["RAN_SIM"] + sets["RAN_NOSIM"]
        return sorted(set(merged), key=lambda p: (p.anchor, p.other))
    sets, _ = _run_sampler(sampler, (variant,), exclusive=False, workers=workers)
    return sets[variant]


def split(
    pos: list[LabeledPair],
    negs_by_variant: dict[str, list[LabeledPair]],
    config: GenConfig,
    corpus_hash: str = "",
    shortfalls: dict[str, int] | None = None,
) -> DatasetBundle:
    """Split positives pos_split/(1-pos_split) and each negative variant
    neg_split/(1-neg_split) by seeded shuffle (train side gets the floor), then
    assemble the eight sets. ALL reuses the component splits, so every
    TRAIN/GEN ALL set is exactly the union of its component variants plus the
    shared positive half.
    """
    config.validate()
    if not pos:
        raise ValidationError("positive pair set is empty; nothing to split")
    missing = [v for v in NEG_VARIANTS if v not in negs_by_variant]
    if missing:
        raise ParameterError(f"negatives missing for variants {missing}")

    def cut(pairs: list[LabeledPair], ratio: float, label: str):
        ordered = sorted(pairs, key=lambda p: (p.anchor, p.other))
        stream_rng(config.seed, "split", label).shuffle(ordered)
        n_train = int(len(ordered) * ratio)
        return ordered[:n_train], ordered[n_train:]

    pos_train, pos_gen = cut(pos, config.pos_split, "POS")
    neg_train: dict[str, list[LabeledPair]] = {}
    neg_gen: dict[str, list[LabeledPair]] = {}
    for v in NEG_VARIANTS:
        neg_train[v], neg_gen[v] = cut(negs_by_variant[v], config.neg_split, v)
    neg_train["ALL"] = neg_train["TOPN_SIM"] + neg_train["RAN_SIM"] + neg_train["RAN_NOSIM"]
    neg_gen["ALL"] = neg_gen["TOPN_SIM"] + neg_gen["RAN_SIM"] + neg_gen["RAN_NOSIM"]

    sets = {}
    for v in VARIANTS:
        sets[f"TRAIN_{v}"] = pos_train + neg_train[v]
        sets[f"GEN_{v}"] = pos_gen + neg_gen[v]
    return DatasetBundle(
        sets=sets,
        corpus_hash=corpus_hash,
        config=config,
        shortfalls=dict(shortfalls or {}),
    )


def generate_bundle(
    corpus: Corpus, index: SimIndex, config: GenConfig, workers: int = 1
) -> DatasetBundle:
    """End-to-end generation: positives, the three negative variants with
    per-anchor exclusion, and the split."""
    sampler = _NegSampler(corpus, index, config)
    negs, shortfalls = _run_sampler(sampler, NEG_VARIANTS, exclusive=True, workers=workers)
    return split(
        positives(corpus),
        negs,
        config,
        corpus_hash=corpus.content_hash(),
        shortfalls=shortfalls,
    )


# ---------------------------------------------------------------------------
# Context knowledge-graph triples.

REL_SCUI = "has_SCUI"
REL_SG = "has_SG"
REL_PARENT = "has_parentSCUI"
CONKG_VARIANTS = ("ConSS", "ConSG", "ConHR", "ConAll")

Triple = tuple[str, str, str]


def export_conkg(corpus: Corpus, variant: str) -> list[Triple]:
    """Context triples for one variant, deduplicated and sorted.

    ConSS: (atom, has_SCUI, its scui) for every atom with an SCUI.
    ConSG: (scui, has_SG, g) for every group of the SCUI's member atoms.
    ConHR: (scui, has_parentSCUI, parent) for every hierarchy edge.
    ConAll: the union of the three.
    """
    if variant not in CONKG_VARIANTS:
        raise ParameterError(f"unknown ConKG variant {variant!r}, expected one of {CONKG_VARIANTS}")
    triples: set[Triple] = set()
    if variant in ("ConSS", "ConAll"):
        for aui in corpus.aui_list:
            scui = corpus.atoms[aui].scui
            if scui is not None:
                triples.add((aui, REL_SCUI, scui))
    if variant in ("ConSG", "ConAll"):
        for scui, groups in corpus.sg_of_scui.items():
            for g in groups:
                triples.add((scui, REL_SG, g))
    if variant in ("ConHR", "ConAll"):
        for child, parents in corpus.hierarchy.items():
            for parent in parents:
                triples.add((child, REL_PARENT, parent))
    return sorted(triples)


# ---------------------------------------------------------------------------
# File formats. Pair files: `ANCHOR_AUI|OTHER_AUI|LABEL|SIMCLASS|JACC` with
# JACC empty for positives; triple files: `HEAD|RELATION|TAIL`. Both carry a
# leading `# corpus=<hash>` comment; `#` lines are skipped on read.


def _pair_line(p: LabeledPair) -> str:
    jacc = "" if p.jacc is None else repr(p.jacc)
    return f"{p.anchor}|{p.other}|{p.label}|{p.simclass}|{jacc}"


def write_pairs(pairs: list[LabeledPair], path: str, corpus_hash: str = "") -> None:
    lines = sorted({_pair_line(p) for p in pairs})
    with open(path, "w", encoding="utf-8") as f:
        if corpus_hash:
            f.write(f"# corpus={corpus_hash}\n")
        f.write("\n".join(lines))
        if lines:
            f.write("\n")


def read_pairs(path: str, expect_hash: str | None = None) -> list[LabeledPair]:
    pairs: list[LabeledPair] = []
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
            if len(fields) != 5:
                raise ParseError(f"{path}:{lineno}: expected 5 fields, got {len(fields)}")
            anchor, other, label, simclass, jacc_raw = fields
            if label not in (POS, NEG) or simclass not in (SIM, NOSIM, NA):
                raise ParseError(f"{path}:{lineno}: bad label/simclass {label!r}/{simclass!r}")
            pairs.append(
                LabeledPair(anchor, other, label, simclass, float(jacc_raw) if jacc_raw else None)
            )
    if expect_hash is not None and file_hash is not None and file_hash != expect_hash:
        raise ValidationError(
            f"{path}: pair file was generated from corpus {file_hash[:12]}..., "
            f"expected {expect_hash[:12]}..."
        )
    return pairs


def write_triples(triples: list[Triple], path: str, corpus_hash: str = "") -> None:
    with open(path, "w", encoding="utf-8") as f:
        if corpus_hash:
            f.write(f"# corpus={corpus_hash}\n")
        for head, rel, tail in triples:
            f.write(f"{head}|{rel}|{tail}\n")


def read_triples(path: str) -> list[Triple]:
    triples: list[Triple] = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("|")
            if len(fields) != 3:
                raise ParseError(f"{path}:{lineno}: expected 3 fields, got {len(fields)}")
            triples.append((fields[0], fields[1], fields[2]))
    return triples


def bundle_file_name(release: str, set_name: str) -> str:
    return f"{release}_{set_name}.psv"


def write_bundle(bundle: DatasetBundle, out_dir: str, release: str) -> dict:
    """Write the eight pair files plus a manifest.json; returns the manifest."""
    import os

    os.makedirs(out_dir, exist_ok=True)
    files: dict[str, str] = {}
    for set_name in BUNDLE_SETS:
        fname = bundle_file_name(release, set_name)
        fpath = os.path.join(out_dir, fname)
        write_pairs(bundle.sets[set_name], fpath, bundle.corpus_hash)
        files[fname] = sha256_file(fpath)
    manifest = {
        "release": release,
        "corpus_hash": bundle.corpus_hash,
        "config": asdict(bundle.config),
        "counts": bundle.counts(),
        "shortfalls": bundle.shortfalls,
        "files": files,
    }
    with open(os.path.join(out_dir, f"{release}_manifest.json"), "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return manifest


def export_pairs_jsonl(corpus: Corpus, pairs: list[LabeledPair], path: str) -> None:
    """Line-delimited JSON pair records for downstream model training: term
    strings, labels, and the context ids needed to look up graph embeddings.
    The first line is a `# corpus=<hash>` comment; readers skip `#` lines."""
    with open(path, "w", encoding="utf-8") as f:
        f.write(f"# corpus={corpus.content_hash()}\n")
        for p in sorted(pairs, key=lambda q: (q.anchor, q.other)):
            a, b = corpus.atom(p.anchor), corpus.atom(p.other)
            record = {
                "anchor_aui": a.aui,
                "anchor_str": a.term,
                "anchor_scui": a.scui,
                "anchor_sg": sorted(a.sg),
                "other_aui": b.aui,
                "other_str": b.term,
                "other_scui": b.scui,
                "other_sg": sorted(b.sg),
                "label": 1 if p.label == POS else 0,
            }
            f.write(json.dumps(record) + "\n")
