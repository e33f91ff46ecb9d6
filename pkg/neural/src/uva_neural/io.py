"""File interfaces shared with the dataset pipeline, plus metric conventions.

Consumes the pipeline's exports: line-delimited JSON pair records and
pipe-delimited context triple files (``HEAD|RELATION|TAIL``, ``#`` comments).
Emits metrics CSV rows in the shared schema
``predictor,dataset,accuracy,precision,recall,f1`` (percentages, 2 decimals).
"""

from __future__ import annotations

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class PairRecord:
    anchor_aui: str
    anchor_str: str
    anchor_scui: str | None
    anchor_sg: tuple[str, ...]
    other_aui: str
    other_str: str
    other_scui: str | None
    other_sg: tuple[str, ...]
    label: int


def read_pairs_jsonl(path: str) -> list[PairRecord]:
    records = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: bad JSON: {exc}") from None
            records.append(
                PairRecord(
                    anchor_aui=obj["anchor_aui"],
                    anchor_str=obj["anchor_str"],
                    anchor_scui=obj.get("anchor_scui"),
                    anchor_sg=tuple(obj.get("anchor_sg") or ()),
                    other_aui=obj["other_aui"],
                    other_str=obj["other_str"],
                    other_scui=obj.get("other_scui"),
                    other_sg=tuple(obj.get("other_sg") or ()),
                    label=int(obj["label"]),
                )
            )
    return records


def read_triples(path: str) -> list[tuple[str, str, str]]:
    triples = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("|")
            if len(fields) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 fields, got {len(fields)}")
            triples.append((fields[0], fields[1], fields[2]))
    return triples


def context_maps(
    records: list[PairRecord],
) -> tuple[dict[str, str | None], dict[str, tuple[str, ...]]]:
    """Per-atom SCUI and per-SCUI group union, as carried by the pair records."""
    scui_of: dict[str, str | None] = {}
    groups: dict[str, set[str]] = {}
    for rec in records:
        for aui, scui, sg in (
            (rec.anchor_aui, rec.anchor_scui, rec.anchor_sg),
            (rec.other_aui, rec.other_scui, rec.other_sg),
        ):
            scui_of[aui] = scui
            if scui is not None:
                groups.setdefault(scui, set()).update(sg)
    sg_of_scui = {s: tuple(sorted(g)) for s, g in groups.items()}
    return scui_of, sg_of_scui


@dataclass(frozen=True)
class Metrics:
    predictor: str
    dataset: str
    accuracy: float
    precision: float
    recall: float
    f1: float

    def values(self) -> tuple[float, float, float, float]:
        return (self.accuracy, self.precision, self.recall, self.f1)


def compute_metrics(
    tp: int, fp: int, fn: int, tn: int, predictor: str = "", dataset: str = ""
) -> Metrics:
    total = tp + fp + fn + tn
    if total <= 0:
        raise ValueError("no scored pairs")
    accuracy = (tp + tn) / total
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return Metrics(
        predictor=predictor,
        dataset=dataset,
        accuracy=round(accuracy * 100, 2),
        precision=round(precision * 100, 2),
        recall=round(recall * 100, 2),
        f1=round(f1 * 100, 2),
    )


CSV_HEADER = "predictor,dataset,accuracy,precision,recall,f1"


def metrics_csv(rows: list[Metrics]) -> str:
    out = [CSV_HEADER]
    for r in rows:
        out.append(
            f"{r.predictor},{r.dataset},{r.accuracy:.2f},{r.precision:.2f},{r.recall:.2f},{r.f1:.2f}"
        )
    return "\n".join(out) + "\n"
