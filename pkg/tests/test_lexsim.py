import numpy as np
import pytest
from hypothesis import given, strategies as st

from uva import corpus as corpus_mod
from uva import lexsim
from uva.errors import NotFoundError

from helpers import brute_sim_sets, brute_jaccard, corpus_from_rows


class TestNormalize:
    def test_basic(self):
        assert lexsim.normalize("Lung Cancer") == ("cancer", "lung")

    def test_stopwords(self):
        assert lexsim.normalize("Cancer of the Lung") == ("cancer", "lung")

    def test_possessive_and_plural(self):
        # hand application of the documented rules: possessive 's stripped,
        # "diseases" loses its trailing s
        assert lexsim.normalize("Addison's Diseases") == ("addison", "disease")

    def test_empty(self):
        assert lexsim.normalize("") == ()
        assert lexsim.normalize("  ,;  ") == ()

    def test_plural_rules(self):
        assert lexsim.normalize("berries") == ("berry",)
        assert lexsim.normalize("glasses") == ("glass",)
        assert lexsim.normalize("aspirins") == ("aspirin",)
        # short tokens and -us/-is/-ss endings stay put
        assert lexsim.normalize("gas") == ("gas",)
        assert lexsim.normalize("virus") == ("virus",)

    def test_punctuation_and_case(self):
        assert lexsim.normalize("ALPHA-beta, gamma") == ("alpha", "beta", "gamma")

    def test_dedupe_and_sort(self):
        assert lexsim.normalize("zeta tau zeta tau") == ("tau", "zeta")

    def test_accent_fold(self):
        assert lexsim.normalize("Café") == ("cafe",)


class TestJaccard:
    def test_identity(self):
        assert lexsim.jaccard({"a", "b"}, {"a", "b"}) == 1.0

    def test_disjoint(self):
        assert lexsim.jaccard({"a"}, {"b"}) == 0.0

    def test_half(self):
        # |{b,c}| / |{a,b,c,d}| = 2/4
        assert lexsim.jaccard({"a", "b", "c"}, {"b", "c", "d"}) == 0.5

    def test_both_empty(self):
        assert lexsim.jaccard(set(), set()) == 0.0

    @given(
        st.sets(st.text(alphabet="abcdef", min_size=1, max_size=3), max_size=8),
        st.sets(st.text(alphabet="abcdef", min_size=1, max_size=3), max_size=8),
    )
    def test_symmetric_and_bounded(self, x, y):
        s = lexsim.jaccard(x, y)
        assert s == lexsim.jaccard(y, x)
        assert 0.0 <= s <= 1.0
        if x:
            assert lexsim.jaccard(x, x) == 1.0


class TestIndex:
    def test_single_atom(self, tmp_path):
        c = corpus_from_rows(tmp_path, [("A1", "Lung Cancer", "V0", "", "C1", ["DISO"])])
        idx = lexsim.build_index(c)
        assert set(idx.postings) == {"cancer", "lung"}
        assert idx.candidates("A1") == []

    def test_shared_token_postings(self, tmp_path):
        rows = [
            ("A1", "lung cancer", "V0", "", "C1", []),
            ("A2", "cancer screening", "V0", "", "C2", []),
            ("A3", "bone scan", "V0", "", "C3", []),
        ]
        c = corpus_from_rows(tmp_path, rows)
        idx = lexsim.build_index(c)
        assert list(idx.postings["cancer"]) == [0, 1]
        assert idx.df["cancer"] == 2

    def test_candidates_pair_score(self, tmp_path):
        rows = [
            ("A1", "alpha beta", "V0", "", "C1", []),
            ("A2", "beta gamma delta", "V0", "", "C2", []),
            ("A3", "epsilon zeta", "V0", "", "C3", []),
        ]
        c = corpus_from_rows(tmp_path, rows)
        idx = lexsim.build_index(c)
        assert idx.candidates("A1") == [("A2", 0.25)]
        assert idx.candidates("A3") == []

    def test_unknown_aui(self, small_synth_index):
        with pytest.raises(NotFoundError):
            small_synth_index.candidates("A9999999")

    def test_candidates_match_brute_force(self, small_synth, small_synth_index):
        brute = brute_sim_sets(small_synth)
        for aui in small_synth.aui_list:
            got = {other for other, _ in small_synth_index.candidates(aui)}
            assert got == brute[aui], f"candidate set mismatch for {aui}"

    def test_candidate_scores_exact(self, small_synth, small_synth_index):
        for aui in list(small_synth.aui_list)[:60]:
            for other, score in small_synth_index.candidates(aui):
                assert score == brute_jaccard(small_synth, aui, other)

    def test_top_n_rank_and_ties(self, tmp_path):
        # five counterparts: two at 1/3, two at 1/2, one at 1/5; ties break by id
        rows = [
            ("A0", "w x", "V0", "", "C0", []),
            ("A1", "w x", "V0", "", "C1", []),  # 1.0
            ("A2", "w q", "V0", "", "C2", []),  # 1/3
            ("A3", "x q", "V0", "", "C3", []),  # 1/3
            ("A4", "w x y z q", "V0", "", "C4", []),  # 2/5
            ("A5", "q r s t", "V0", "", "C5", []),  # 0
        ]
        c = corpus_from_rows(tmp_path, rows)
        idx = lexsim.build_index(c)
        ranked = idx.candidates("A0")
        assert [a for a, _ in ranked] == ["A1", "A4", "A2", "A3"]
        top2 = idx.candidates("A0", top_n=2)
        assert [a for a, _ in top2] == ["A1", "A4"]

    def test_equal_lui_implies_jacc_one(self, small_synth, small_synth_index):
        by_lui = {}
        for aui in small_synth.aui_list:
            by_lui.setdefault(small_synth.atoms[aui].lui, []).append(aui)
        checked = 0
        for members in by_lui.values():
            for a, b in zip(members, members[1:]):
                if small_synth.tokens_by_atom[small_synth.aui_index[a]]:
                    assert brute_jaccard(small_synth, a, b) == 1.0
                    checked += 1
        assert checked > 0

    def test_worker_count_invariance(self, small_synth):
        idx1 = lexsim.build_index(small_synth, workers=1)
        idx8 = lexsim.build_index(small_synth, workers=8)
        assert idx1.tokens_by_atom == idx8.tokens_by_atom
        assert set(idx1.postings) == set(idx8.postings)
        for tok in idx1.postings:
            assert np.array_equal(idx1.postings[tok], idx8.postings[tok])

    def test_df_cutoff_drops_tokens(self, tmp_path):
        rows = [(f"A{i}", f"common w{i}", "V0", "", f"C{i}", []) for i in range(5)]
        c = corpus_from_rows(tmp_path, rows)
        idx = lexsim.build_index(c, df_cutoff=3)
        assert "common" not in idx.postings
        assert idx.candidates("A0") == []


class TestPersistence:
    def test_round_trip(self, small_synth, small_synth_index, tmp_path):
        path = str(tmp_path / "corpus.idx")
        lexsim.save_index(small_synth_index, path)
        loaded = lexsim.load_index(path)
        assert loaded.corpus_hash == small_synth_index.corpus_hash
        assert loaded.aui_list == small_synth_index.aui_list
        assert loaded.tokens_by_atom == small_synth_index.tokens_by_atom
        for tok, arr in small_synth_index.postings.items():
            assert np.array_equal(loaded.postings[tok], arr)

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.idx"
        path.write_bytes(b"NOTANIDX")
        from uva.errors import ValidationError

        with pytest.raises(ValidationError):
            lexsim.load_index(str(path))
