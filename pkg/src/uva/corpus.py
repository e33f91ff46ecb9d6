"""Terminology corpus: atoms, identifier spaces, and mapping functions.

An atom is one occurrence of a term in one source vocabulary. Each atom
carries its raw string, source, optional source-concept id (SCUI), concept id
(CUI, the ground-truth synonymy cluster), and a set of semantic groups.
String identity (SUI) and normalized-term identity (LUI) are derived
deterministically when the input file does not provide them.

A Corpus is immutable after construction and safe to read concurrently.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from . import lexsim
from .errors import NotFoundError, ParameterError, ParseError, ValidationError
from .util import sha256_text


@dataclass(frozen=True, slots=True)
class AtomRecord:
    """One occurrence of a term in one source vocabulary."""

    aui: str
    term: str
    src: str
    scui: str | None
    cui: str
    sg: frozenset[str]
    sui: str
    lui: str


@dataclass(frozen=True)
class SynthParams:
    """Knobs for the synthetic terminology generator.

    cui_size_weights are categorical weights over concept sizes 1..len(weights).
    variant_rate is the probability that an extra atom of a multi-atom concept
    is a pure lexical variant of the concept's base term (same LUI);
    share_rate is the probability that a drawn token comes from a small shared
    "hub" pool, which creates token overlap across concepts.
    """

    n_cuis: int
    cui_size_weights: tuple[float, ...] = (0.4, 0.3, 0.15, 0.1, 0.05)
    vocab_sources: int = 3
    sg_pool: tuple[str, ...] = ("CHEM", "DISO", "PROC", "ANAT")
    token_pool: int = 400
    tokens_per_term: int = 3
    variant_rate: float = 0.4
    share_rate: float = 0.15
    hierarchy_depth: int = 3
    scui_absent_rate: float = 0.05

    def validate(self) -> None:
        if self.n_cuis < 1 or self.vocab_sources < 1 or self.hierarchy_depth < 1:
            raise ParameterError("n_cuis, vocab_sources and hierarchy_depth must be >= 1")
        if self.token_pool < 1 or self.tokens_per_term < 1:
            raise ParameterError("token_pool and tokens_per_term must be >= 1")
        if self.tokens_per_term > self.token_pool:
            raise ParameterError(
                f"tokens_per_term ({self.tokens_per_term}) exceeds token_pool ({self.token_pool})"
            )
        if not self.cui_size_weights or min(self.cui_size_weights) < 0 or sum(self.cui_size_weights) <= 0:
            raise ParameterError("cui_size_weights must be non-negative and sum > 0")
        if not self.sg_pool:
            raise ParameterError("sg_pool must not be empty")
        for name in ("variant_rate", "share_rate", "scui_absent_rate"):
            rate = getattr(self, name)
            if not 0.0 <= rate <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {rate}")


class Corpus:
    """Immutable indexed view over a set of atoms plus hierarchy edges.

    atoms maps AUI -> AtomRecord. by_cui / by_scui are the exact inverses of
    the per-atom cui / scui fields, with member lists sorted by AUI.
    sg_of_scui unions the sg sets of an SCUI's member atoms. tokens_by_atom
    caches the normalized token set of each atom, aligned with aui_list.
    """

    def __init__(
        self,
        atoms: dict[str, AtomRecord],
        hierarchy: dict[str, tuple[str, ...]],
        tokens_by_atom: tuple[tuple[str, ...], ...],
    ):
        self.atoms = atoms
        self.aui_list: tuple[str, ...] = tuple(sorted(atoms))
        self.aui_index = {aui: i for i, aui in enumerate(self.aui_list)}
        self.hierarchy = hierarchy
        self.tokens_by_atom = tokens_by_atom

        by_cui: dict[str, list[str]] = {}
        by_scui: dict[str, list[str]] = {}
        sg_union: dict[str, set[str]] = {}
        for aui in self.aui_list:
            rec = atoms[aui]
            by_cui.setdefault(rec.cui, []).append(aui)
            if rec.scui is not None:
                by_scui.setdefault(rec.scui, []).append(aui)
                sg_union.setdefault(rec.scui, set()).update(rec.sg)
        self.by_cui = {c: tuple(members) for c, members in by_cui.items()}
        self.by_scui = {s: tuple(members) for s, members in by_scui.items()}
        self.sg_of_scui = {s: frozenset(groups) for s, groups in sg_union.items()}
        self._hash: str | None = None

    def __len__(self) -> int:
        return len(self.atoms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.atoms == other.atoms and self.hierarchy == other.hierarchy

    def __hash__(self) -> int:  # identity hash; content_hash() is the stable one
        return id(self)

    def atom(self, aui: str) -> AtomRecord:
        try:
            return self.atoms[aui]
        except KeyError:
            raise NotFoundError(f"unknown atom {aui!r}") from None

    def concept_size(self, cui: str) -> int:
        return len(self.by_cui.get(cui, ()))

    def canonical_lines(self) -> list[str]:
        lines = [_atom_line(self.atoms[aui]) for aui in self.aui_list]
        lines.append("--")
        for child in sorted(self.hierarchy):
            for parent in self.hierarchy[child]:
                lines.append(f"{child}|{parent}")
        return lines

    def content_hash(self) -> str:
        if self._hash is None:
            self._hash = sha256_text(self.canonical_lines())
        return self._hash


def concept_members(corpus: Corpus, cui: str) -> list[str]:
    """All AUIs belonging to a concept, sorted ascending."""
    try:
        return list(corpus.by_cui[cui])
    except KeyError:
        raise NotFoundError(f"unknown concept {cui!r}") from None


def atom_context(
    corpus: Corpus, aui: str
) -> tuple[str | None, frozenset[str], frozenset[str]]:
    """(scui, semantic groups, parent SCUIs) of an atom; parents are empty
    when the atom has no SCUI or its SCUI has no hierarchy entry."""
    rec = corpus.atom(aui)
    parents: frozenset[str] = frozenset()
    if rec.scui is not None:
        parents = frozenset(corpus.hierarchy.get(rec.scui, ()))
    return rec.scui, rec.sg, parents


# ---------------------------------------------------------------------------
# Construction shared by the loader and the synthesizer.
# Input rows are (aui, term, src, scui, cui, sg, sui_or_None, lui_or_None).

_Row = tuple[str, str, str, "str | None", str, frozenset, "str | None", "str | None"]


def _assign_group_ids(
    keys_in_order: list[str],
    provided: dict[str, set[str]],
    prefix: str,
    *,
    strict: bool,
    what: str,
) -> dict[str, str]:
    """Give every group key one id: the provided one when present, else a
    fresh dense id that cannot collide with any provided id."""
    used: set[str] = set()
    chosen: dict[str, str] = {}
    owner_of: dict[str, str] = {}
    for key in keys_in_order:
        ids = provided.get(key, set())
        if len(ids) > 1:
            if strict:
                raise ValidationError(
                    f"conflicting {what} ids {sorted(ids)} for identical {what} group"
                )
            ids = {min(ids)}
        if ids:
            (chosen_id,) = ids
            prior = owner_of.get(chosen_id)
            if prior is not None and prior != key and strict:
                raise ValidationError(f"{what} id {chosen_id!r} assigned to two different strings")
            owner_of[chosen_id] = key
            chosen[key] = chosen_id
            used.add(chosen_id)
    counter = 0
    for key in keys_in_order:
        if key in chosen:
            continue
        new_id = f"{prefix}{counter}"
        while new_id in used:
            counter += 1
            new_id = f"{prefix}{counter}"
        counter += 1
        used.add(new_id)
        chosen[key] = new_id
    return chosen


def _build_corpus(rows: list[_Row], edges: list[tuple[str, str]], origin: str) -> Corpus:
    seen: set[str] = set()
    for row in rows:
        aui = row[0]
        if aui in seen:
            raise ValidationError(f"{origin}: duplicate AUI {aui!r}")
        seen.add(aui)

    norm_cache: dict[str, tuple[str, ...]] = {}
    for row in rows:
        term = row[1]
        if term not in norm_cache:
            norm_cache[term] = lexsim.normalize(term)

    # SUI: one id per distinct raw string. Conflicting provided ids for the
    # same string, or one id on two strings, are invalid input.
    term_order: list[str] = []
    sui_provided: dict[str, set[str]] = {}
    for row in rows:
        term, sui = row[1], row[6]
        if term not in sui_provided:
            sui_provided[term] = set()
            term_order.append(term)
        if sui is not None:
            sui_provided[term].add(sui)
    sui_of = _assign_group_ids(term_order, sui_provided, "S", strict=True, what="SUI")

    # LUI: one id per distinct normalized string when derived. Provided LUIs
    # come from an external normalizer and are trusted verbatim; atoms missing
    # one adopt the smallest provided LUI of their normalized group, if any.
    norm_order: list[str] = []
    lui_provided: dict[str, set[str]] = {}
    for row in rows:
        key = " ".join(norm_cache[row[1]])
        if key not in lui_provided:
            lui_provided[key] = set()
            norm_order.append(key)
        if row[7] is not None:
            lui_provided[key].add(row[7])
    lui_of = _assign_group_ids(norm_order, lui_provided, "L", strict=False, what="LUI")

    atoms: dict[str, AtomRecord] = {}
    for aui, term, src, scui, cui, sg, sui, lui in rows:
        atoms[aui] = AtomRecord(
            aui=aui,
            term=term,
            src=src,
            scui=scui,
            cui=cui,
            sg=sg,
            sui=sui if sui is not None else sui_of[term],
            lui=lui if lui is not None else lui_of[" ".join(norm_cache[term])],
        )

    scui_space = {rec.scui for rec in atoms.values() if rec.scui is not None}
    hierarchy: dict[str, set[str]] = {}
    for child, parent in edges:
        if child == parent:
            raise ValidationError(f"{origin}: hierarchy self-loop on {child!r}")
        if child not in scui_space or parent not in scui_space:
            missing = child if child not in scui_space else parent
            raise ValidationError(f"{origin}: hierarchy references unknown SCUI {missing!r}")
        hierarchy.setdefault(child, set()).add(parent)
    hierarchy_sorted = {c: tuple(sorted(ps)) for c, ps in hierarchy.items()}

    aui_sorted = sorted(atoms)
    tokens_by_atom = tuple(norm_cache[atoms[aui].term] for aui in aui_sorted)
    return Corpus(atoms, hierarchy_sorted, tokens_by_atom)


# ---------------------------------------------------------------------------
# File format. Atoms: `AUI|STR|SRC|SCUI|CUI|SG1;SG2;...|SUI|LUI`, exactly 8
# pipe-delimited fields, SCUI/SUI/LUI optionally empty, one record per line,
# UTF-8, `#` starts a comment line, no quoting, `|` forbidden inside fields.
# Hierarchy: `SCUI|PARENT_SCUI`.

_ATOM_FIELDS = 8


def _atom_line(rec: AtomRecord) -> str:
    return "|".join(
        (
            rec.aui,
            rec.term,
            rec.src,
            rec.scui or "",
            rec.cui,
            ";".join(sorted(rec.sg)),
            rec.sui,
            rec.lui,
        )
    )


def _data_lines(path: str):
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            yield lineno, line


def load_corpus(
    atoms_path: str,
    hierarchy_path: str | None = None,
    src_filter: set[str] | None = None,
) -> Corpus:
    """Parse, validate and index a corpus from its pipe-delimited files.

    src_filter, when given, keeps only atoms from the listed sources
    (hierarchy edges touching dropped SCUIs are dropped with them).
    Missing SUI/LUI fields are derived; see the module docstring.
    """
    rows: list[_Row] = []
    kept_scuis: set[str] = set()
    for lineno, line in _data_lines(atoms_path):
        fields = line.split("|")
        if len(fields) != _ATOM_FIELDS:
            raise ParseError(
                f"{atoms_path}:{lineno}: expected {_ATOM_FIELDS} fields, got {len(fields)}"
            )
        aui, term, src, scui, cui, sg_raw, sui, lui = fields
        if not aui or not term or not src or not cui:
            raise ParseError(f"{atoms_path}:{lineno}: AUI, STR, SRC and CUI must be non-empty")
        if src_filter is not None and src not in src_filter:
            continue
        sg = frozenset(g for g in sg_raw.split(";") if g)
        rows.append((aui, term, src, scui or None, cui, sg, sui or None, lui or None))
        if scui:
            kept_scuis.add(scui)

    edges: list[tuple[str, str]] = []
    if hierarchy_path is not None:
        for lineno, line in _data_lines(hierarchy_path):
            fields = line.split("|")
            if len(fields) != 2:
                raise ParseError(f"{hierarchy_path}:{lineno}: expected 2 fields, got {len(fields)}")
            child, parent = fields
            if not child or not parent:
                raise ParseError(f"{hierarchy_path}:{lineno}: empty SCUI field")
            if src_filter is not None and (child not in kept_scuis or parent not in kept_scuis):
                continue
            edges.append((child, parent))

    return _build_corpus(rows, edges, atoms_path)


def write_corpus(
    corpus: Corpus, atoms_path: str, hierarchy_path: str | None = None
) -> None:
    """Write the canonical serialization; load_corpus() round-trips it exactly."""
    with open(atoms_path, "w", encoding="utf-8") as f:
        f.write(f"# corpus={corpus.content_hash()}\n")
        for aui in corpus.aui_list:
            f.write(_atom_line(corpus.atoms[aui]) + "\n")
    if hierarchy_path is not None:
        with open(hierarchy_path, "w", encoding="utf-8") as f:
            f.write(f"# corpus={corpus.content_hash()}\n")
            for child in sorted(corpus.hierarchy):
                for parent in corpus.hierarchy[child]:
                    f.write(f"{child}|{parent}\n")


# ---------------------------------------------------------------------------
# Synthetic corpora. Deterministic in (params, seed); plants lexical variants
# inside concepts, shared SCUIs within (concept, source) groups, and
# cross-concept token overlap, so every downstream rule and sampler has
# material to work with.


def _draw_tokens(rng: random.Random, pool: list[str], hubs: list[str], k: int, share_rate: float) -> list[str]:
    chosen: list[str] = []
    seen: set[str] = set()
    while len(chosen) < k:
        if hubs and rng.random() < share_rate:
            tok = hubs[rng.randrange(len(hubs))]
        else:
            tok = pool[rng.randrange(len(pool))]
        if tok not in seen:
            seen.add(tok)
            chosen.append(tok)
    return chosen


def _variant_term(rng: random.Random, base_tokens: list[str]) -> str:
    """A surface variant with the same normalized token set as the base."""
    toks = list(base_tokens)
    form = rng.randrange(5)
    if form == 0:
        toks[-1] = toks[-1] + "s"
        return " ".join(toks)
    if form == 1:
        return toks[0].upper() + ", " + " ".join(toks[1:]) if len(toks) > 1 else toks[0].upper()
    if form == 2:
        return toks[0] + "'s " + " ".join(toks[1:]) if len(toks) > 1 else toks[0] + "'s"
    if form == 3:
        return " of the ".join([" ".join(toks[:1]), " ".join(toks[1:])]) if len(toks) > 1 else toks[0]
    rng.shuffle(toks)
    return " ".join(tok.capitalize() for tok in toks)


def synth_corpus(params: SynthParams, seed: int) -> Corpus:
    """Generate a corpus as a pure function of (params, seed)."""
    params.validate()
    rng = random.Random(seed)

    pool = [f"term{i:05d}" for i in range(params.token_pool)]
    hubs = pool[: max(params.tokens_per_term, params.token_pool // 20)]
    sizes = rng.choices(
        range(1, len(params.cui_size_weights) + 1),
        weights=params.cui_size_weights,
        k=params.n_cuis,
    )
    sources = [f"V{j}" for j in range(params.vocab_sources)]

    rows: list[_Row] = []
    scuis_by_src: dict[str, list[str]] = {s: [] for s in sources}
    counter = 0
    for ci in range(params.n_cuis):
        cui = f"C{ci:06d}"
        size = sizes[ci]
        base = _draw_tokens(rng, pool, hubs, params.tokens_per_term, params.share_rate)
        primary_sg = params.sg_pool[rng.randrange(len(params.sg_pool))]

        # One shared SCUI per (concept, source) most of the time, so the
        # source-synonymy rule fires inside concepts; a small rate of borrowed
        # SCUIs from other concepts makes it imperfect, as in real data.
        scui_of_src: dict[str, str | None] = {}

        for j in range(size):
            aui = f"A{counter:07d}"
            counter += 1
            if j == 0:
                term = " ".join(base)
            elif rng.random() < params.variant_rate:
                term = _variant_term(rng, base)
            else:
                toks = list(base)
                replace = rng.randrange(1, len(toks) + 1) if len(toks) > 1 else 1
                fresh = _draw_tokens(rng, pool, hubs, replace, params.share_rate)
                toks[:replace] = fresh
                dedup = sorted(set(toks))
                term = " ".join(dedup)

            src = sources[rng.randrange(len(sources))]
            scui: str | None
            if rng.random() < params.scui_absent_rate:
                scui = None
            else:
                if src not in scui_of_src:
                    all_scuis = scuis_by_src[src]
                    if all_scuis and rng.random() < 0.02:
                        scui_of_src[src] = all_scuis[rng.randrange(len(all_scuis))]
                    else:
                        new_scui = f"{src}:SC{ci:06d}"
                        scuis_by_src[src].append(new_scui)
                        scui_of_src[src] = new_scui
                scui = scui_of_src[src]

            roll = rng.random()
            if roll < 0.02:
                sg: frozenset[str] = frozenset()
            elif roll < 0.07 and len(params.sg_pool) > 1:
                others = [g for g in params.sg_pool if g != primary_sg]
                sg = frozenset({others[rng.randrange(len(others))]})
            elif roll < 0.22 and len(params.sg_pool) > 1:
                others = [g for g in params.sg_pool if g != primary_sg]
                sg = frozenset({primary_sg, others[rng.randrange(len(others))]})
            else:
                sg = frozenset({primary_sg})

            rows.append((aui, term, src, scui, cui, sg, None, None))

    edges: list[tuple[str, str]] = []
    if params.hierarchy_depth > 1:
        for src in sources:
            scuis = scuis_by_src[src]
            levels: dict[int, list[str]] = {}
            for scui in scuis:
                levels.setdefault(rng.randrange(params.hierarchy_depth), []).append(scui)
            for level in range(1, params.hierarchy_depth):
                uppers = levels.get(level - 1, [])
                if not uppers:
                    continue
                for scui in levels.get(level, []):
                    if rng.random() < 0.7:
                        edges.append((scui, uppers[rng.randrange(len(uppers))]))

    return _build_corpus(rows, edges, f"synth(seed={seed})")
