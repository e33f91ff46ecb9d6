import pytest

from uva_neural import context, io, kge

from taskgen import planted_context_task

MODEL_KW = dict(token_dim=24, hidden=24, epochs=40, learning_rate=0.02)


@pytest.fixture(scope="session")
def planted_task():
    return planted_context_task(seed=1, n_train=600, n_gen=200)


@pytest.fixture(scope="session")
def planted_embeddings(planted_task):
    _, _, triples = planted_task
    config = kge.KgeConfig(
        technique="ComplEx",
        half_dim=8,
        epochs=250,
        learning_rate=0.5,
        negatives_per_positive=4,
        seed=2,
    )
    return kge.train_kge(triples, config)


@pytest.fixture(scope="session")
def planted_context_store(planted_task, planted_embeddings):
    train, gen, _ = planted_task
    scui_of, sg_of_scui = io.context_maps(train + gen)
    auis = sorted({r.anchor_aui for r in train + gen} | {r.other_aui for r in train + gen})
    return context.build_context_store(auis, "ConSS", planted_embeddings, scui_of, sg_of_scui)
