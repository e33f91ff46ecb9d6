"""Per-atom context vectors derived from trained graph embeddings.

Variant recipes (d is the embedding dimension):

  ConSS   E(atom) ++ E(scui)                      -> 2d
  ConSG   E(scui) ++ mean over group embeddings   -> 2d
  ConHR   E(scui)                                 -> d
  ConAll  E(atom) ++ E(scui) ++ group mean        -> 3d

A missing SCUI (or an atom/scui absent from the embedding vocabulary) is
substituted by the dedicated absent-SCUI embedding; an SCUI with no groups
contributes a zero vector as its group mean. ++ is concatenation; the group
aggregate is the element-wise arithmetic mean.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .kge import ABSENT_SCUI, EntityEmbeddings

log = logging.getLogger(__name__)

CONTEXT_VARIANTS = ("ConSS", "ConSG", "ConHR", "ConAll")


def context_dim(variant: str, dim: int) -> int:
    if variant in ("ConSS", "ConSG"):
        return 2 * dim
    if variant == "ConHR":
        return dim
    if variant == "ConAll":
        return 3 * dim
    raise ValueError(f"unknown context variant {variant!r}, expected one of {CONTEXT_VARIANTS}")


@dataclass(frozen=True)
class ContextVector:
    aui: str
    variant: str
    vector: np.ndarray
    used_fallback: bool = False


def derive_context(
    aui: str,
    variant: str,
    embeddings: EntityEmbeddings,
    scui_of: dict[str, str | None],
    sg_of_scui: dict[str, tuple[str, ...]],
) -> ContextVector:
    """Build one atom's context vector; see the module docstring for recipes."""
    context_dim(variant, embeddings.dim)  # validates the variant
    lookup = embeddings.vectors
    absent = lookup[ABSENT_SCUI]
    fallback = False

    scui = scui_of.get(aui)
    if scui is None or scui not in lookup:
        if scui is not None:
            log.debug("scui %s of atom %s missing from embeddings; using fallback", scui, aui)
        scui_vec = absent
        groups: tuple[str, ...] = ()
        fallback = True
    else:
        scui_vec = lookup[scui]
        groups = sg_of_scui.get(scui, ())

    parts: list[np.ndarray] = []
    if variant in ("ConSS", "ConAll"):
        if aui in lookup:
            parts.append(lookup[aui])
        else:
            parts.append(absent)
            fallback = True
    if variant in ("ConSS", "ConSG", "ConHR", "ConAll"):
        parts.append(scui_vec)
    if variant in ("ConSG", "ConAll"):
        group_vecs = [lookup[g] for g in groups if g in lookup]
        if group_vecs:
            parts.append(np.mean(group_vecs, axis=0))
        else:
            parts.append(np.zeros(embeddings.dim))
    return ContextVector(aui=aui, variant=variant, vector=np.concatenate(parts), used_fallback=fallback)


def build_context_store(
    auis: list[str],
    variant: str,
    embeddings: EntityEmbeddings,
    scui_of: dict[str, str | None],
    sg_of_scui: dict[str, tuple[str, ...]],
) -> dict[str, np.ndarray]:
    """Context vectors for every atom, logging how many needed the fallback."""
    store: dict[str, np.ndarray] = {}
    fallbacks = 0
    for aui in auis:
        cv = derive_context(aui, variant, embeddings, scui_of, sg_of_scui)
        store[aui] = cv.vector
        fallbacks += cv.used_fallback
    if fallbacks:
        log.info("%d/%d atoms used the absent-SCUI fallback", fallbacks, len(store))
    return store
