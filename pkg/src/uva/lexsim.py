"""String normalization, Jaccard similarity over token sets, and an exact
inverted index for finding every positive-similarity counterpart of an atom.

The normalizer below is the single source of normalized-term identity for the
whole toolkit: the same token sets drive LUI derivation, the lexical rule of
the rule-based baseline, and the SIM/NOSIM partition of negative sampling.
It is a documented deterministic pipeline, not a re-implementation of any
external lexical tool.
"""

from __future__ import annotations

import re
import struct
import unicodedata
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Iterable

import numpy as np

from .errors import NotFoundError, ValidationError
from .util import parallel_map

if TYPE_CHECKING:
    from .corpus import Corpus

# Tokens dropped after splitting. A deliberate, fixed list: changing it changes
# LUI identity and SIM membership, so it is part of the data contract.
STOPWORDS = frozenset(
    {"a", "an", "and", "by", "for", "in", "of", "on", "or", "the", "to", "with"}
)

_POSSESSIVE_RE = re.compile(r"'s(?=$|[^a-z0-9])")
_NON_ALNUM_RE = re.compile(r"[^a-z0-9]+")


def _singularize(token: str) -> str:
    """Singularize a plural token by suffix rules.

    Rules, first match wins:
      1. ``...ies`` -> ``...y``   (berries -> berry), length > 4
      2. ``...sses`` -> ``...ss`` (classes -> class), length > 4
      3. trailing ``s`` dropped when length > 3, unless the token ends in
         ``ss``, ``us`` or ``is`` (diseases -> disease, aspirins -> aspirin;
         virus and diagnosis are left alone)
    """
    if len(token) > 4 and token.endswith("ies"):
        return token[:-3] + "y"
    if len(token) > 4 and token.endswith("sses"):
        return token[:-2]
    if len(token) > 3 and token.endswith("s") and not token.endswith(("ss", "us", "is")):
        return token[:-1]
    return token


def normalize(raw: str) -> tuple[str, ...]:
    """Normalize raw term text into a sorted, deduplicated token tuple.

    Pipeline, in order: NFKD compatibility decomposition with combining marks
    dropped (accent folding) -> lowercase -> possessive ``'s`` stripped ->
    every remaining non-alphanumeric character replaced by a space -> split on
    whitespace -> stopwords dropped -> plural tokens singularized
    (see ``_singularize``) -> dedupe -> sort. Empty input yields ().
    """
    text = unicodedata.normalize("NFKD", raw)
    text = "".join(ch for ch in text if not unicodedata.combining(ch))
    text = text.lower().replace("’", "'")
    text = _POSSESSIVE_RE.sub("", text)
    text = _NON_ALNUM_RE.sub(" ", text)
    tokens = {
        _singularize(tok) for tok in text.split() if tok and tok not in STOPWORDS
    }
    return tuple(sorted(tokens))


def jaccard(ts: Iterable[str], ts2: Iterable[str]) -> float:
    """|intersection| / |union| of two token sets; 0.0 when both are empty."""
    a, b = set(ts), set(ts2)
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


@dataclass
class SimIndex:
    """Exact inverted index over the normalized token sets of a corpus.

    postings[t] holds the indices (ascending) of the atoms whose token set
    contains t; df[t] == len(postings[t]). Atom indices follow the sorted-AUI
    order of the corpus, so results are reproducible for a given corpus.
    """

    corpus_hash: str
    aui_list: tuple[str, ...]
    tokens_by_atom: tuple[tuple[str, ...], ...]
    postings: dict[str, np.ndarray]
    df_cutoff: int | None = None
    _aui_index: dict[str, int] = field(default_factory=dict, repr=False)
    _token_sets: list[frozenset[str]] = field(default_factory=list, repr=False)
    _sizes: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if not self._aui_index:
            self._aui_index = {aui: i for i, aui in enumerate(self.aui_list)}
        if not self._token_sets:
            self._token_sets = [frozenset(ts) for ts in self.tokens_by_atom]
        if self._sizes is None:
            self._sizes = np.array([len(ts) for ts in self.tokens_by_atom], dtype=np.int64)

    @property
    def df(self) -> dict[str, int]:
        return {tok: len(arr) for tok, arr in self.postings.items()}

    @property
    def token_sets(self) -> list[frozenset[str]]:
        return self._token_sets

    @property
    def tokenset_of(self) -> dict[str, tuple[str, ...]]:
        return {aui: self.tokens_by_atom[i] for i, aui in enumerate(self.aui_list)}

    def atom_index(self, aui: str) -> int:
        try:
            return self._aui_index[aui]
        except KeyError:
            raise NotFoundError(f"atom {aui!r} is not indexed") from None

    def token_set(self, idx: int) -> frozenset[str]:
        return self._token_sets[idx]

    def candidate_arrays(self, idx: int) -> tuple[np.ndarray, np.ndarray]:
        """All atoms sharing at least one token with atom idx, as
        (indices, jaccard scores), ordered by score descending, index ascending.
        """
        arrays = [self.postings[t] for t in self.tokens_by_atom[idx] if t in self.postings]
        if not arrays:
            return np.empty(0, dtype=np.int32), np.empty(0, dtype=np.float64)
        cand, inter = np.unique(np.concatenate(arrays), return_counts=True)
        keep = cand != idx
        cand, inter = cand[keep], inter[keep]
        own = len(self._token_sets[idx])
        union = own + self._sizes[cand] - inter
        scores = inter / union
        order = np.lexsort((cand, -scores))
        return cand[order].astype(np.int32, copy=False), scores[order]

    def candidates(
        self, aui: str, top_n: int | None = None
    ) -> list[tuple[str, float]]:
        """Exact (aui, score) list of every atom with jaccard > 0 against aui,
        score descending with ties broken by ascending counterpart AUI,
        truncated to top_n when given."""
        idx = self.atom_index(aui)
        cand, scores = self.candidate_arrays(idx)
        if top_n is not None:
            cand, scores = cand[:top_n], scores[:top_n]
        return [(self.aui_list[c], float(s)) for c, s in zip(cand, scores)]


def candidates(
    index: SimIndex, aui: str, top_n: int | None = None
) -> list[tuple[str, float]]:
    """Module-level alias for SimIndex.candidates."""
    return index.candidates(aui, top_n)


def build_index(
    corpus: "Corpus", workers: int = 1, df_cutoff: int | None = None
) -> SimIndex:
    """Build complete postings over the corpus token sets.

    Atoms are partitioned into contiguous chunks handed to workers; the
    chunk-local postings are merged in chunk order, so the result is identical
    for any worker count. df_cutoff, when set, drops tokens whose document
    frequency exceeds it; this trades exactness of SIM membership for speed on
    very large corpora and is off by default.
    """
    tokens_by_atom = corpus.tokens_by_atom

    def chunk_postings(chunk: tuple[int, int]) -> dict[str, list[int]]:
        lo, hi = chunk
        part: dict[str, list[int]] = {}
        for i in range(lo, hi):
            for t in tokens_by_atom[i]:
                part.setdefault(t, []).append(i)
        return part

    n = len(tokens_by_atom)
    step = max(1, (n + max(workers, 1) - 1) // max(workers, 1))
    chunks = [(lo, min(lo + step, n)) for lo in range(0, n, step)]
    postings_lists: dict[str, list[int]] = {}
    for part in parallel_map(chunk_postings, chunks, workers=workers):
        for t, idxs in part.items():
            postings_lists.setdefault(t, []).extend(idxs)

    if df_cutoff is not None:
        postings_lists = {t: p for t, p in postings_lists.items() if len(p) <= df_cutoff}
    postings = {t: np.array(p, dtype=np.int32) for t, p in postings_lists.items()}
    return SimIndex(
        corpus_hash=corpus.content_hash(),
        aui_list=corpus.aui_list,
        tokens_by_atom=tokens_by_atom,
        postings=postings,
        df_cutoff=df_cutoff,
    )


# Binary persistence. Layout (all integers little-endian unsigned 32-bit,
# all strings UTF-8 preceded by their byte length):
#
#   magic   7 bytes  b"UVAIDX1"
#   hash    u32 len + bytes         corpus content hash (hex)
#   cutoff  u32                     df cutoff + 1, 0 means "no cutoff"
#   atoms   u32 count, then per atom:
#             u32 len + aui bytes
#             u32 token count, then per token u32 len + token bytes
#
# Postings are rebuilt on load by inverting the per-atom token lists, which
# reproduces build_index output exactly.

MAGIC = b"UVAIDX1"


def _write_str(f, s: str) -> None:
    b = s.encode("utf-8")
    f.write(struct.pack("<I", len(b)))
    f.write(b)


def _read_str(f) -> str:
    (n,) = struct.unpack("<I", f.read(4))
    return f.read(n).decode("utf-8")


def save_index(index: SimIndex, path: str) -> None:
    with open(path, "wb") as f:
        f.write(MAGIC)
        _write_str(f, index.corpus_hash)
        f.write(struct.pack("<I", 0 if index.df_cutoff is None else index.df_cutoff + 1))
        f.write(struct.pack("<I", len(index.aui_list)))
        for aui, toks in zip(index.aui_list, index.tokens_by_atom):
            _write_str(f, aui)
            f.write(struct.pack("<I", len(toks)))
            for t in toks:
                _write_str(f, t)


def load_index(path: str) -> SimIndex:
    with open(path, "rb") as f:
        if f.read(len(MAGIC)) != MAGIC:
            raise ValidationError(f"{path}: not a UVAIDX1 index file")
        corpus_hash = _read_str(f)
        (cutoff_raw,) = struct.unpack("<I", f.read(4))
        (n_atoms,) = struct.unpack("<I", f.read(4))
        aui_list: list[str] = []
        tokens_by_atom: list[tuple[str, ...]] = []
        postings_lists: dict[str, list[int]] = {}
        for i in range(n_atoms):
            aui_list.append(_read_str(f))
            (n_toks,) = struct.unpack("<I", f.read(4))
            toks = tuple(_read_str(f) for _ in range(n_toks))
            tokens_by_atom.append(toks)
            for t in toks:
                postings_lists.setdefault(t, []).append(i)
    cutoff = None if cutoff_raw == 0 else cutoff_raw - 1
    if cutoff is not None:
        postings_lists = {t: p for t, p in postings_lists.items() if len(p) <= cutoff}
    postings = {t: np.array(p, dtype=np.int32) for t, p in postings_lists.items()}
    return SimIndex(
        corpus_hash=corpus_hash,
        aui_list=tuple(aui_list),
        tokens_by_atom=tuple(tokens_by_atom),
        postings=postings,
        df_cutoff=cutoff,
    )
