"""Build a synthetic terminology and poke around its identifier spaces.

Run: python3 demos/01_corpus_basics.py
"""

import tempfile

from uva.corpus import SynthParams, atom_context, concept_members, load_corpus, synth_corpus, write_corpus

params = SynthParams(
    n_cuis=200,
    cui_size_weights=(0.3, 0.3, 0.2, 0.2),  # concept sizes 1..4
    vocab_sources=3,
    variant_rate=0.5,
)
corpus = synth_corpus(params, seed=7)

print(f"atoms: {len(corpus)}")
print(f"concepts (CUIs): {len(corpus.by_cui)}")
print(f"source concepts (SCUIs): {len(corpus.by_scui)}")
print(f"hierarchy edges: {sum(len(p) for p in corpus.hierarchy.values())}")
print(f"content hash: {corpus.content_hash()[:16]}...")

# a multi-atom concept and its members
big_cui = max(corpus.by_cui, key=lambda c: len(corpus.by_cui[c]))
print(f"\nlargest concept {big_cui}:")
for aui in concept_members(corpus, big_cui):
    rec = corpus.atoms[aui]
    print(f"  {aui}  src={rec.src:3} scui={rec.scui or '-':14} sui={rec.sui:5} lui={rec.lui:5}  {rec.term!r}")

# lexical variants planted inside a concept share a LUI but not a SUI
luis = [corpus.atoms[a].lui for a in concept_members(corpus, big_cui)]
print(f"distinct LUIs among its {len(luis)} atoms: {len(set(luis))}")

# context of one atom: scui, semantic groups, hierarchy parents
aui = concept_members(corpus, big_cui)[0]
scui, sg, parents = atom_context(corpus, aui)
print(f"\ncontext of {aui}: scui={scui} groups={sorted(sg)} parents={sorted(parents)}")

# round trip through the pipe-delimited file format
with tempfile.TemporaryDirectory() as tmp:
    write_corpus(corpus, f"{tmp}/atoms.psv", f"{tmp}/hier.psv")
    reloaded = load_corpus(f"{tmp}/atoms.psv", f"{tmp}/hier.psv")
    print(f"\nround trip equal: {reloaded == corpus}")
