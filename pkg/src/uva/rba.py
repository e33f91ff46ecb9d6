"""Rule-based synonymy prediction.

Two editorial rules and their combinations:

  SS          source synonymy: both atoms carry an SCUI, come from the same
              source, and the SCUIs are equal. SCUIs are source-scoped ids,
              so equality across different sources never fires.
  LS_SC       lexical similarity + semantic compatibility: equal normalized
              term (LUI) and overlapping semantic groups.
  SS_LS_SC    logical OR of the two.
  SS_LS_SC_TRANS  the transitive closure of the OR rule: two atoms are
              predicted synonymous iff they are connected through any chain
              of rule firings.

The closure is computed as connected components over rule edges generated
from buckets (shared (src, scui); shared (lui, group)), never by pairwise
evaluation, so it scales linearly in the bucket sizes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import AtomRecord, Corpus
from .errors import ParameterError, ValidationError

MODES = ("SS", "LS_SC", "SS_LS_SC", "SS_LS_SC_TRANS")

_CLI_MODES = {
    "ss": "SS",
    "lssc": "LS_SC",
    "ss-lssc": "SS_LS_SC",
    "ss-lssc-trans": "SS_LS_SC_TRANS",
}


def mode_from_cli(name: str) -> str:
    try:
        return _CLI_MODES[name]
    except KeyError:
        raise ParameterError(f"unknown rba mode {name!r}, expected one of {sorted(_CLI_MODES)}") from None


def predict_ss(t: AtomRecord, t2: AtomRecord) -> int:
    """1 iff both SCUIs are present, sources match, and SCUIs are equal."""
    if t.scui is None or t2.scui is None:
        return 0
    return int(t.src == t2.src and t.scui == t2.scui)


def predict_lssc(t: AtomRecord, t2: AtomRecord) -> int:
    """1 iff the normalized terms (LUIs) are equal and the semantic-group sets
    overlap. Atoms without groups can never fire this rule."""
    return int(t.lui == t2.lui and not t.sg.isdisjoint(t2.sg))


class _DisjointSet:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if ra > rb:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass
class SynonymyPartition:
    """Equivalence classes of atoms under one rule mode's closure.

    component_of is total over all AUIs; component ids are dense and numbered
    by first appearance in AUI order, so the partition is deterministic.
    """

    component_of: dict[str, int]
    mode: str
    corpus_hash: str

    def same_component(self, aui: str, aui2: str) -> bool:
        return self.component_of[aui] == self.component_of[aui2]


def build_partition(corpus: Corpus, mode: str = "SS_LS_SC_TRANS") -> SynonymyPartition:
    """Union-find over the edges of the requested mode's base rules.

    SS edges come from buckets of atoms sharing (src, scui); LS_SC edges from
    buckets sharing (lui, group) — equal LUI plus a common group is exactly
    the pairwise rule, so unioning bucket members reproduces its closure.
    """
    if mode not in MODES:
        raise ParameterError(f"unknown rba mode {mode!r}, expected one of {MODES}")
    aui_list = corpus.aui_list
    dsu = _DisjointSet(len(aui_list))

    if mode in ("SS", "SS_LS_SC", "SS_LS_SC_TRANS"):
        buckets: dict[tuple[str, str], int] = {}
        for i, aui in enumerate(aui_list):
            rec = corpus.atoms[aui]
            if rec.scui is None:
                continue
            key = (rec.src, rec.scui)
            first = buckets.setdefault(key, i)
            if first != i:
                dsu.union(first, i)

    if mode in ("LS_SC", "SS_LS_SC", "SS_LS_SC_TRANS"):
        lui_buckets: dict[tuple[str, str], int] = {}
        for i, aui in enumerate(aui_list):
            rec = corpus.atoms[aui]
            for g in rec.sg:
                key = (rec.lui, g)
                first = lui_buckets.setdefault(key, i)
                if first != i:
                    dsu.union(first, i)

    component_of: dict[str, int] = {}
    relabel: dict[int, int] = {}
    for i, aui in enumerate(aui_list):
        root = dsu.find(i)
        component_of[aui] = relabel.setdefault(root, len(relabel))
    return SynonymyPartition(component_of=component_of, mode=mode, corpus_hash=corpus.content_hash())


def predict(
    t: AtomRecord,
    t2: AtomRecord,
    mode: str,
    partition: SynonymyPartition | None = None,
) -> int:
    """Evaluate one rule mode on a pair of atoms.

    The transitive mode requires a partition built over the same corpus; the
    caller is responsible for the hash check (see predict_pairs)."""
    if mode == "SS":
        return predict_ss(t, t2)
    if mode == "LS_SC":
        return predict_lssc(t, t2)
    if mode == "SS_LS_SC":
        return 1 if predict_ss(t, t2) or predict_lssc(t, t2) else 0
    if mode == "SS_LS_SC_TRANS":
        if partition is None:
            raise ParameterError("transitive mode needs a prebuilt partition")
        return int(partition.same_component(t.aui, t2.aui))
    raise ParameterError(f"unknown rba mode {mode!r}, expected one of {MODES}")


def predict_pairs(
    corpus: Corpus,
    pairs,
    mode: str,
    partition: SynonymyPartition | None = None,
) -> list[tuple[str, str, int]]:
    """Predict over (anchor, other) labeled pairs; returns (anchor, other, pred)."""
    if mode == "SS_LS_SC_TRANS":
        if partition is None:
            partition = build_partition(corpus, mode)
        if partition.corpus_hash != corpus.content_hash():
            raise ValidationError(
                "partition/corpus mismatch: partition was built for corpus "
                f"{partition.corpus_hash[:12]}..., got {corpus.content_hash()[:12]}..."
            )
    out = []
    for p in pairs:
        t, t2 = corpus.atom(p.anchor), corpus.atom(p.other)
        out.append((p.anchor, p.other, predict(t, t2, mode, partition)))
    return out
