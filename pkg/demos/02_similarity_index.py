"""Normalization, Jaccard scores, and exact candidate retrieval.

Run: python3 demos/02_similarity_index.py
"""

from uva.corpus import SynthParams, synth_corpus
from uva.lexsim import build_index, jaccard, normalize

for raw in ("Lung Cancer", "Cancer of the Lung", "Addison's Diseases", "ALPHA-beta, gamma"):
    print(f"{raw!r:28} -> {normalize(raw)}")

a = normalize("lung cancer screening")
b = normalize("screening for cancers")
print(f"\njaccard{a, b} = {jaccard(a, b):.4f}")

corpus = synth_corpus(SynthParams(n_cuis=300, token_pool=350, share_rate=0.25), seed=3)
index = build_index(corpus)
print(f"\nindexed {len(index.aui_list)} atoms, {len(index.postings)} distinct tokens")

# every counterpart with jaccard > 0, best first, ties by ascending id
anchor = corpus.aui_list[17]
print(f"anchor {anchor}: {corpus.atoms[anchor].term!r}")
for other, score in index.candidates(anchor, top_n=5):
    print(f"  {score:.3f}  {other}  {corpus.atoms[other].term!r}")

# candidate sets are exact: compare one anchor against a brute-force scan
tokens = set(index.tokenset_of[anchor])
brute = {
    aui
    for aui in corpus.aui_list
    if aui != anchor and tokens & set(normalize(corpus.atoms[aui].term))
}
got = {other for other, _ in index.candidates(anchor)}
print(f"\nbrute-force set == index set: {got == brute} ({len(got)} candidates)")
