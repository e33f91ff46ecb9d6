"""Knowledge-graph embedding training over context triples.

Two techniques, both trained by full-batch gradient descent with analytic
gradients (numpy, float64), so results are exactly reproducible from a seed
and the gradients can be checked against finite differences:

  TransE    one vector of dimension d per entity/relation; triple score is
            the Euclidean length of h + r - t; margin ranking loss against
            corrupted triples; entity vectors renormalized to unit length
            after every epoch.
  ComplEx   complex-valued embeddings with real and imaginary parts of
            dimension i each, stored concatenated as one vector of d = 2i;
            triple score is Re(<h, r, conj(t)>); logistic loss with L2
            regularization on the embeddings of each sample.

Negative triples corrupt the head or the tail of a positive and are always
rejected if the corruption lands inside the training triple set.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field

import numpy as np

TECHNIQUES = ("TransE", "ComplEx")

# Entity id substituted for a missing source-concept id when deriving context
# vectors; registered in every embedding vocabulary.
ABSENT_SCUI = "__ABSENT_SCUI__"

Triple = tuple[str, str, str]


@dataclass(frozen=True)
class KgeConfig:
    technique: str = "ComplEx"
    half_dim: int = 16  # i; stored vectors have dimension d = 2 * i
    epochs: int = 200
    learning_rate: float = 0.05
    margin: float = 1.0  # TransE only
    negatives_per_positive: int = 2
    regularization: float = 1e-3  # ComplEx only
    seed: int = 0

    @property
    def dim(self) -> int:
        return 2 * self.half_dim

    def validate(self) -> None:
        if self.technique not in TECHNIQUES:
            raise ValueError(f"unknown technique {self.technique!r}, expected one of {TECHNIQUES}")
        if self.half_dim < 1:
            raise ValueError("half_dim must be >= 1")
        if self.epochs < 1 or self.negatives_per_positive < 1:
            raise ValueError("epochs and negatives_per_positive must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class EntityEmbeddings:
    """Trained entity vectors; ComplEx vectors are re/im halves concatenated."""

    technique: str
    dim: int
    vectors: dict[str, np.ndarray]
    loss_history: list[float] = field(default_factory=list)

    def vector(self, entity: str) -> np.ndarray:
        try:
            return self.vectors[entity]
        except KeyError:
            raise KeyError(f"no embedding for entity {entity!r}") from None

    def save(self, out_dir: str) -> None:
        os.makedirs(out_dir, exist_ok=True)
        names = sorted(self.vectors)
        np.savez_compressed(
            os.path.join(out_dir, "embeddings.npz"),
            matrix=np.stack([self.vectors[n] for n in names]),
        )
        meta = {
            "technique": self.technique,
            "dim": self.dim,
            "entities": names,
            "loss_history": self.loss_history,
        }
        with open(os.path.join(out_dir, "embeddings.json"), "w", encoding="utf-8") as f:
            json.dump(meta, f, indent=2)

    @classmethod
    def load(cls, out_dir: str) -> "EntityEmbeddings":
        with open(os.path.join(out_dir, "embeddings.json"), encoding="utf-8") as f:
            meta = json.load(f)
        matrix = np.load(os.path.join(out_dir, "embeddings.npz"))["matrix"]
        vectors = {name: matrix[i] for i, name in enumerate(meta["entities"])}
        return cls(
            technique=meta["technique"],
            dim=meta["dim"],
            vectors=vectors,
            loss_history=list(meta.get("loss_history", [])),
        )


def _vocab(triples: list[Triple]) -> tuple[list[str], list[str]]:
    entities = {ABSENT_SCUI}
    relations = set()
    for h, r, t in triples:
        entities.add(h)
        entities.add(t)
        relations.add(r)
    return sorted(entities), sorted(relations)


def sample_negatives(
    triples: list[Triple],
    n_entities: int,
    encoded: np.ndarray,
    triple_set: set[tuple[int, int, int]],
    per_positive: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """(B, per_positive, 3) corrupted triples, none of which are in the
    training set. Head or tail is replaced uniformly."""
    out = np.empty((len(encoded), per_positive, 3), dtype=np.int64)
    for b, (h, r, t) in enumerate(encoded):
        for m in range(per_positive):
            for _ in range(1000):
                corrupt_head = rng.integers(2) == 0
                e = int(rng.integers(n_entities))
                cand = (e, r, t) if corrupt_head else (h, r, e)
                if cand not in triple_set:
                    out[b, m] = cand
                    break
            else:
                raise ValueError(f"cannot corrupt triple {triples[b]}: graph too dense")
    return out


# --- TransE ---------------------------------------------------------------


def transe_loss_grad(
    ent: np.ndarray,
    rel: np.ndarray,
    pos: np.ndarray,
    neg: np.ndarray,
    margin: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean margin ranking loss over (positive, corruption) pairs and its
    gradients with respect to the entity and relation matrices."""
    g_ent = np.zeros_like(ent)
    g_rel = np.zeros_like(rel)
    n_pairs = pos.shape[0] * neg.shape[1]
    total = 0.0
    eps = 1e-12
    for b in range(pos.shape[0]):
        h, r, t = pos[b]
        delta_p = ent[h] + rel[r] - ent[t]
        dist_p = float(np.linalg.norm(delta_p))
        unit_p = delta_p / max(dist_p, eps)
        for m in range(neg.shape[1]):
            hn, rn, tn = neg[b, m]
            delta_n = ent[hn] + rel[rn] - ent[tn]
            dist_n = float(np.linalg.norm(delta_n))
            slack = margin + dist_p - dist_n
            if slack <= 0:
                continue
            total += slack
            unit_n = delta_n / max(dist_n, eps)
            scale = 1.0 / n_pairs
            g_ent[h] += scale * unit_p
            g_ent[t] -= scale * unit_p
            g_rel[r] += scale * unit_p
            g_ent[hn] -= scale * unit_n
            g_ent[tn] += scale * unit_n
            g_rel[rn] -= scale * unit_n
    return total / n_pairs, g_ent, g_rel


# --- ComplEx ---------------------------------------------------------------


def _complex_phi(ent, rel, triples, i):
    h, r, t = ent[triples[:, 0]], rel[triples[:, 1]], ent[triples[:, 2]]
    hr, hi = h[:, :i], h[:, i:]
    rr, ri = r[:, :i], r[:, i:]
    tr, ti = t[:, :i], t[:, i:]
    return np.sum(hr * rr * tr + hi * rr * ti + hr * ri * ti - hi * ri * tr, axis=1)


def complex_loss_grad(
    ent: np.ndarray,
    rel: np.ndarray,
    pos: np.ndarray,
    neg: np.ndarray,
    reg: float,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean logistic loss softplus(-y * phi) over positives (y = +1) and
    corruptions (y = -1), plus per-sample L2 on the involved embeddings."""
    i = ent.shape[1] // 2
    samples = np.concatenate([pos, neg.reshape(-1, 3)], axis=0)
    y = np.concatenate([np.ones(len(pos)), -np.ones(neg.shape[0] * neg.shape[1])])
    n = len(samples)

    phi = _complex_phi(ent, rel, samples, i)
    # softplus(-y*phi), numerically stable
    z = -y * phi
    loss_terms = np.logaddexp(0.0, z)
    # d softplus(z) / d phi = sigmoid(z) * dz/dphi = -y * sigmoid(-y*phi)
    sig = np.where(z >= 0, 1.0 / (1.0 + np.exp(-np.abs(z))), np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))
    dphi = -y * sig / n

    h, r, t = ent[samples[:, 0]], rel[samples[:, 1]], ent[samples[:, 2]]
    hr, hi = h[:, :i], h[:, i:]
    rr, ri = r[:, :i], r[:, i:]
    tr, ti = t[:, :i], t[:, i:]

    d = dphi[:, None]
    gh = np.concatenate([(rr * tr + ri * ti), (rr * ti - ri * tr)], axis=1) * d
    gr = np.concatenate([(hr * tr + hi * ti), (hr * ti - hi * tr)], axis=1) * d
    gt = np.concatenate([(hr * rr - hi * ri), (hi * rr + hr * ri)], axis=1) * d

    g_ent = np.zeros_like(ent)
    g_rel = np.zeros_like(rel)
    np.add.at(g_ent, samples[:, 0], gh)
    np.add.at(g_rel, samples[:, 1], gr)
    np.add.at(g_ent, samples[:, 2], gt)

    total = float(np.mean(loss_terms))
    if reg > 0:
        total += reg * float(np.mean(np.sum(h * h, 1) + np.sum(r * r, 1) + np.sum(t * t, 1)))
        scale = 2.0 * reg / n
        np.add.at(g_ent, samples[:, 0], scale * h)
        np.add.at(g_rel, samples[:, 1], scale * r)
        np.add.at(g_ent, samples[:, 2], scale * t)
    return total, g_ent, g_rel


# --- training loop ----------------------------------------------------------


def train_kge(triples: list[Triple], config: KgeConfig) -> EntityEmbeddings:
    """Train entity embeddings over a triple set; deterministic in the seed."""
    config.validate()
    if not triples:
        raise ValueError("triple set is empty")
    entities, relations = _vocab(triples)
    ent_index = {e: i for i, e in enumerate(entities)}
    rel_index = {r: i for i, r in enumerate(relations)}
    encoded = np.array(
        [(ent_index[h], rel_index[r], ent_index[t]) for h, r, t in triples], dtype=np.int64
    )
    triple_set = {tuple(row) for row in encoded.tolist()}

    rng = np.random.default_rng(config.seed)
    d = config.dim
    bound = 6.0 / np.sqrt(d)
    ent = rng.uniform(-bound, bound, size=(len(entities), d))
    rel = rng.uniform(-bound, bound, size=(len(relations), d))
    if config.technique == "TransE":
        ent /= np.linalg.norm(ent, axis=1, keepdims=True)

    losses = []
    for _ in range(config.epochs):
        neg = sample_negatives(
            triples, len(entities), encoded, triple_set, config.negatives_per_positive, rng
        )
        if config.technique == "TransE":
            loss, g_ent, g_rel = transe_loss_grad(ent, rel, encoded, neg, config.margin)
        else:
            loss, g_ent, g_rel = complex_loss_grad(ent, rel, encoded, neg, config.regularization)
        ent -= config.learning_rate * g_ent
        rel -= config.learning_rate * g_rel
        if config.technique == "TransE":
            ent /= np.maximum(np.linalg.norm(ent, axis=1, keepdims=True), 1e-12)
        losses.append(loss)

    vectors = {e: ent[i].copy() for e, i in ent_index.items()}
    return EntityEmbeddings(
        technique=config.technique, dim=d, vectors=vectors, loss_history=losses
    )


def save_config(config: KgeConfig, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "kge_config.json"), "w", encoding="utf-8") as f:
        json.dump(asdict(config), f, indent=2)
