"""Shared test fixtures and independent brute-force oracles.

The oracles deliberately avoid the library's index/closure code paths: pair
similarity is recomputed from raw strings, and the rule closure is computed by
boolean matrix fixpoint.
"""

from __future__ import annotations

import numpy as np

from uva import corpus as corpus_mod
from uva import lexsim, rba


def corpus_from_rows(tmp_path, rows, hierarchy=(), name="atoms.psv"):
    """Build a corpus by writing an atoms file and loading it.

    rows: (aui, term, src, scui, cui, sg) tuples with scui "" for absent and
    sg an iterable of group ids.
    """
    atoms_path = tmp_path / name
    lines = []
    for aui, term, src, scui, cui, sg in rows:
        lines.append(f"{aui}|{term}|{src}|{scui}|{cui}|{';'.join(sorted(sg))}||")
    atoms_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    hier_path = None
    if hierarchy:
        hier_path = tmp_path / ("hier_" + name)
        hier_path.write_text(
            "\n".join(f"{c}|{p}" for c, p in hierarchy) + "\n", encoding="utf-8"
        )
    return corpus_mod.load_corpus(str(atoms_path), str(hier_path) if hier_path else None)


def brute_sim_sets(corpus):
    """For every atom, the set of other AUIs with Jaccard > 0, via a direct
    pairwise scan over normalized raw strings. O(N^2); keep corpora small."""
    token_sets = {aui: set(lexsim.normalize(corpus.atoms[aui].term)) for aui in corpus.aui_list}
    out = {aui: set() for aui in corpus.aui_list}
    auis = list(corpus.aui_list)
    for i, a in enumerate(auis):
        ts_a = token_sets[a]
        for b in auis[i + 1 :]:
            if ts_a & token_sets[b]:
                out[a].add(b)
                out[b].add(a)
    return out


def brute_jaccard(corpus, a, b):
    return lexsim.jaccard(
        lexsim.normalize(corpus.atoms[a].term), lexsim.normalize(corpus.atoms[b].term)
    )


def rule_matrix(corpus, mode):
    """Dense pairwise rule evaluation; the slow path the partition must match."""
    auis = list(corpus.aui_list)
    n = len(auis)
    m = np.zeros((n, n), dtype=bool)
    for i in range(n):
        ti = corpus.atoms[auis[i]]
        for j in range(i + 1, n):
            tj = corpus.atoms[auis[j]]
            fired = False
            if mode in ("SS", "SS_LS_SC", "SS_LS_SC_TRANS"):
                fired = bool(rba.predict_ss(ti, tj))
            if not fired and mode in ("LS_SC", "SS_LS_SC", "SS_LS_SC_TRANS"):
                fired = bool(rba.predict_lssc(ti, tj))
            m[i, j] = m[j, i] = fired
    return m


def matrix_closure(m):
    """Reflexive-transitive closure by repeated boolean squaring."""
    closure = m.copy()
    np.fill_diagonal(closure, True)
    while True:
        nxt = closure | (closure @ closure)
        if np.array_equal(nxt, closure):
            return closure
        closure = nxt
