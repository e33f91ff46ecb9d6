"""Hand the pipeline's exports to the neural package: train graph embeddings
and both Siamese models, then score them on the generalization set.

Requires both packages installed (`pip install -e . -e neural/`).

Run: python3 demos/06_neural_handoff.py
"""

import pathlib
import subprocess
import sys
import tempfile

out = pathlib.Path(tempfile.mkdtemp(prefix="uva_handoff_")) / "out"


def run(module, *args):
    cmd = [sys.executable, "-m", module, *args]
    print(f"$ {module.split('.')[0]} {' '.join(args)}")
    subprocess.run(cmd, check=True)
    print()


corpus = ("--atoms", f"{out}/H_atoms.psv", "--hierarchy", f"{out}/H_hierarchy.psv")
run("uva.cli", "synth", "--n-cuis", "300", "--token-pool", "350", "--seed", "7",
    "--out-dir", str(out), "--release", "H")
run("uva.cli", "generate", *corpus, "--seed", "7", "--out-dir", str(out), "--release", "H")
run("uva.cli", "export-conkg", *corpus, "--out-dir", str(out), "--release", "H")
run("uva.cli", "export-pairs", *corpus, "--pairs", f"{out}/H_TRAIN_ALL.psv", "--out", f"{out}/train.jsonl")
run("uva.cli", "export-pairs", *corpus, "--pairs", f"{out}/H_GEN_ALL.psv", "--out", f"{out}/gen.jsonl")

run("uva_neural.cli", "train-kge", "--triples", f"{out}/H_ConSS.psv", "--technique", "ComplEx",
    "--half-dim", "8", "--epochs", "150", "--lr", "0.4", "--negatives", "4", "--seed", "2",
    "--out", f"{out}/kge")
run("uva_neural.cli", "train-model", "--train", f"{out}/train.jsonl", "--kind", "LexLM",
    "--epochs", "12", "--seed", "0", "--out", f"{out}/lexlm")
run("uva_neural.cli", "train-model", "--train", f"{out}/train.jsonl", "--kind", "ConLM",
    "--context-variant", "ConSS", "--embeddings", f"{out}/kge",
    "--epochs", "12", "--seed", "0", "--out", f"{out}/conlm")
run("uva_neural.cli", "evaluate", "--model", f"{out}/lexlm", "--pairs", f"{out}/gen.jsonl",
    "--dataset", "GEN_ALL")
run("uva_neural.cli", "evaluate", "--model", f"{out}/conlm", "--pairs", f"{out}/gen.jsonl",
    "--embeddings", f"{out}/kge", "--dataset", "GEN_ALL")

print(f"artifacts in {out}")
