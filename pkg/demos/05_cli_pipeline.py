"""Drive the whole pipeline through the `uva` CLI, ending with the file
exports the neural package consumes.

Run: python3 demos/05_cli_pipeline.py
"""

import pathlib
import subprocess
import sys
import tempfile

tmp = pathlib.Path(tempfile.mkdtemp(prefix="uva_demo_"))
cfg = tmp / "pipeline.cfg"
cfg.write_text(
    "\n".join(
        [
            "n_cuis = 400",
            "token_pool = 450",
            "seed = 7",
            "release = DEMO",
            f"out_dir = {tmp / 'out'}",
        ]
    )
    + "\n"
)


def uva(*args):
    cmd = [sys.executable, "-m", "uva.cli", *args]
    print(f"$ uva {' '.join(args)}")
    subprocess.run(cmd, check=True)
    print()


out = tmp / "out"
uva("synth", "--config", str(cfg))
corpus_args = ("--atoms", f"{out}/DEMO_atoms.psv", "--hierarchy", f"{out}/DEMO_hierarchy.psv")
uva("ingest", "--config", str(cfg), *corpus_args)
uva("index", "--config", str(cfg), *corpus_args, "--out", f"{out}/DEMO.idx")
uva("generate", "--config", str(cfg), *corpus_args, "--index", f"{out}/DEMO.idx")
for variant in ("ALL", "TOPN_SIM", "RAN_SIM", "RAN_NOSIM"):
    uva(
        "rba", "--config", str(cfg), *corpus_args,
        "--pairs", f"{out}/DEMO_GEN_{variant}.psv",
        "--mode", "ss-lssc-trans",
        "--out", f"{out}/preds_{variant}.psv",
    )
uva(
    "eval",
    "--predictor", "rba-trans",
    *[
        f"--pair-set=GEN_{v}={out}/DEMO_GEN_{v}.psv:{out}/preds_{v}.psv"
        for v in ("ALL", "TOPN_SIM", "RAN_SIM", "RAN_NOSIM")
    ],
    "--out-csv", f"{out}/report.csv",
)

# exports for the neural package
uva("export-conkg", "--config", str(cfg), *corpus_args)
uva(
    "export-pairs", "--config", str(cfg), *corpus_args,
    "--pairs", f"{out}/DEMO_TRAIN_ALL.psv", "--out", f"{out}/DEMO_train.jsonl",
)
uva(
    "export-pairs", "--config", str(cfg), *corpus_args,
    "--pairs", f"{out}/DEMO_GEN_ALL.psv", "--out", f"{out}/DEMO_gen.jsonl",
)

print(f"artifacts in {out}")
