"""Run the rule-based baseline in all four modes and score it per variant.

The recall column is identical across the four GEN variants of one bundle
because they share the same positive pairs; precision varies with how
lexically confusable the negatives are.

Run: python3 demos/04_rule_baseline.py
"""

from uva import eval as eval_mod
from uva.corpus import SynthParams, synth_corpus
from uva.datagen import GenConfig, generate_bundle
from uva.lexsim import build_index
from uva.rba import MODES, build_partition, predict_pairs

corpus = synth_corpus(
    SynthParams(n_cuis=500, token_pool=500, variant_rate=0.5, share_rate=0.2), seed=29
)
index = build_index(corpus)
bundle = generate_bundle(corpus, index, GenConfig(seed=4))
partition = build_partition(corpus, "SS_LS_SC_TRANS")
components = len(set(partition.component_of.values()))
print(f"{len(corpus)} atoms collapse to {components} rule components\n")

reports = []
for mode in MODES:
    for variant in ("ALL", "TOPN_SIM", "RAN_SIM", "RAN_NOSIM"):
        pairs = bundle.sets[f"GEN_{variant}"]
        preds = predict_pairs(corpus, pairs, mode, partition)
        cm = eval_mod.score_predictions(pairs, preds)
        reports.append(eval_mod.metrics(cm, predictor=mode, dataset=f"GEN_{variant}"))

print(eval_mod.render_report(reports))
