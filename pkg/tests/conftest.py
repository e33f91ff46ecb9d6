import pytest

from uva import corpus as corpus_mod
from uva import lexsim


@pytest.fixture(scope="session")
def small_synth():
    """~350 atoms; enough structure for every sampler and rule to fire."""
    params = corpus_mod.SynthParams(
        n_cuis=150,
        cui_size_weights=(0.35, 0.3, 0.15, 0.12, 0.08),
        token_pool=220,
        tokens_per_term=3,
        variant_rate=0.45,
        share_rate=0.2,
    )
    return corpus_mod.synth_corpus(params, 11)


@pytest.fixture(scope="session")
def small_synth_index(small_synth):
    return lexsim.build_index(small_synth)
