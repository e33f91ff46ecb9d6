import pytest

from uva import corpus as corpus_mod
from uva.corpus import SynthParams, atom_context, concept_members, load_corpus, synth_corpus, write_corpus
from uva.errors import NotFoundError, ParameterError, ParseError, ValidationError

from helpers import corpus_from_rows


class TestLoad:
    def test_shared_cui(self, tmp_path):
        rows = [
            ("A1", "lung cancer", "V0", "", "C1", ["DISO"]),
            ("A2", "cancer of the lung", "V1", "", "C1", ["DISO"]),
        ]
        c = corpus_from_rows(tmp_path, rows)
        assert c.by_cui["C1"] == ("A1", "A2")

    def test_sui_lui_derivation(self, tmp_path):
        rows = [
            ("A1", "Aspirin", "V0", "", "C1", ["CHEM"]),
            ("A2", "aspirin", "V1", "", "C1", ["CHEM"]),
        ]
        c = corpus_from_rows(tmp_path, rows)
        a1, a2 = c.atoms["A1"], c.atoms["A2"]
        assert a1.sui != a2.sui
        assert a1.lui == a2.lui

    def test_provided_sui_lui_respected(self, tmp_path):
        path = tmp_path / "atoms.psv"
        path.write_text(
            "A1|Aspirin|V0||C1|CHEM|S77|L88\nA2|Aspirin|V1||C1|CHEM|S77|L88\n",
            encoding="utf-8",
        )
        c = load_corpus(str(path))
        assert c.atoms["A1"].sui == "S77"
        assert c.atoms["A2"].lui == "L88"

    def test_conflicting_sui_rejected(self, tmp_path):
        path = tmp_path / "atoms.psv"
        path.write_text(
            "A1|Aspirin|V0||C1|CHEM|S77|\nA2|Aspirin|V1||C1|CHEM|S78|\n",
            encoding="utf-8",
        )
        with pytest.raises(ValidationError):
            load_corpus(str(path))

    def test_malformed_line_reports_lineno(self, tmp_path):
        path = tmp_path / "atoms.psv"
        path.write_text("A1|term a|V0||C1|||\n# comment\nA2|term b|V0|C1\n", encoding="utf-8")
        with pytest.raises(ParseError, match=r"atoms\.psv:3"):
            load_corpus(str(path))

    def test_duplicate_aui(self, tmp_path):
        rows = [
            ("A1", "alpha", "V0", "", "C1", []),
            ("A1", "beta", "V0", "", "C2", []),
        ]
        with pytest.raises(ValidationError, match="duplicate AUI"):
            corpus_from_rows(tmp_path, rows)

    def test_hierarchy_unknown_scui(self, tmp_path):
        rows = [("A1", "alpha", "V0", "S1", "C1", [])]
        with pytest.raises(ValidationError, match="unknown SCUI"):
            corpus_from_rows(tmp_path, rows, hierarchy=[("S1", "S9")])

    def test_hierarchy_self_loop(self, tmp_path):
        rows = [("A1", "alpha", "V0", "S1", "C1", [])]
        with pytest.raises(ValidationError, match="self-loop"):
            corpus_from_rows(tmp_path, rows, hierarchy=[("S1", "S1")])

    def test_comments_and_blank_lines_skipped(self, tmp_path):
        path = tmp_path / "atoms.psv"
        path.write_text("# header\n\nA1|alpha|V0||C1|||\n", encoding="utf-8")
        assert len(load_corpus(str(path))) == 1

    def test_src_filter(self, tmp_path):
        rows = [
            ("A1", "alpha", "V0", "S1", "C1", []),
            ("A2", "beta", "V1", "S2", "C1", []),
        ]
        atoms_path = tmp_path / "atoms.psv"
        lines = [f"{a}|{t}|{s}|{sc}|{c}|||" for a, t, s, sc, c, _ in rows]
        atoms_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        c = load_corpus(str(atoms_path), src_filter={"V0"})
        assert list(c.atoms) == ["A1"]


class TestLookups:
    def test_concept_members_singleton(self, tmp_path):
        c = corpus_from_rows(tmp_path, [("A1", "alpha", "V0", "", "C1", [])])
        assert concept_members(c, "C1") == ["A1"]

    def test_concept_members_sorted(self, tmp_path):
        rows = [
            ("A3", "alpha", "V0", "", "C1", []),
            ("A1", "beta", "V0", "", "C1", []),
            ("A2", "gamma", "V0", "", "C1", []),
        ]
        c = corpus_from_rows(tmp_path, rows)
        assert concept_members(c, "C1") == ["A1", "A2", "A3"]

    def test_concept_members_unknown(self, tmp_path):
        c = corpus_from_rows(tmp_path, [("A1", "alpha", "V0", "", "C1", [])])
        with pytest.raises(NotFoundError):
            concept_members(c, "C9")

    def test_membership_inverse_law(self, small_synth):
        for aui, rec in small_synth.atoms.items():
            assert aui in concept_members(small_synth, rec.cui)

    def test_atom_context(self, tmp_path):
        rows = [
            ("A1", "alpha", "V0", "S1", "C1", ["DISO"]),
            ("A2", "beta", "V0", "SP", "C2", []),
        ]
        c = corpus_from_rows(tmp_path, rows, hierarchy=[("S1", "SP")])
        scui, sg, parents = atom_context(c, "A1")
        assert (scui, sg, parents) == ("S1", frozenset({"DISO"}), frozenset({"SP"}))

    def test_atom_context_no_scui(self, tmp_path):
        c = corpus_from_rows(tmp_path, [("A1", "alpha", "V0", "", "C1", ["CHEM"])])
        scui, sg, parents = atom_context(c, "A1")
        assert scui is None and sg == frozenset({"CHEM"}) and parents == frozenset()

    def test_atom_context_unknown(self, tmp_path):
        c = corpus_from_rows(tmp_path, [("A1", "alpha", "V0", "", "C1", [])])
        with pytest.raises(NotFoundError):
            atom_context(c, "A7")

    def test_parents_within_scui_space(self, small_synth):
        scuis = set(small_synth.by_scui)
        for aui in small_synth.aui_list:
            _, _, parents = atom_context(small_synth, aui)
            assert parents <= scuis


class TestSynth:
    def test_single_atom(self):
        params = SynthParams(n_cuis=1, cui_size_weights=(1.0,))
        c = synth_corpus(params, 42)
        assert len(c) == 1 and len(c.by_cui) == 1

    def test_deterministic_bytes(self, tmp_path):
        params = SynthParams(n_cuis=80)
        c1 = synth_corpus(params, 5)
        c2 = synth_corpus(params, 5)
        p1, p2 = tmp_path / "a1.psv", tmp_path / "a2.psv"
        h1, h2 = tmp_path / "h1.psv", tmp_path / "h2.psv"
        write_corpus(c1, str(p1), str(h1))
        write_corpus(c2, str(p2), str(h2))
        assert p1.read_bytes() == p2.read_bytes()
        assert h1.read_bytes() == h2.read_bytes()

    def test_seed_changes_output(self):
        params = SynthParams(n_cuis=30)
        assert synth_corpus(params, 1) != synth_corpus(params, 2)

    def test_variant_rate_one_plants_shared_lui(self):
        params = SynthParams(n_cuis=60, variant_rate=1.0)
        c = synth_corpus(params, 9)
        multi = [m for m in c.by_cui.values() if len(m) >= 2]
        assert multi
        for members in multi:
            luis = [c.atoms[a].lui for a in members]
            assert len(set(luis)) < len(luis), "expected at least two atoms sharing a lui"

    def test_infeasible_params(self):
        with pytest.raises(ParameterError):
            SynthParams(n_cuis=5, token_pool=2, tokens_per_term=5).validate()
        with pytest.raises(ParameterError):
            SynthParams(n_cuis=0).validate()
        with pytest.raises(ParameterError):
            SynthParams(n_cuis=1, variant_rate=1.5).validate()

    def test_round_trip_5k(self, tmp_path):
        params = SynthParams(n_cuis=1600, token_pool=900)
        c = synth_corpus(params, 7)
        assert len(c) > 3000
        atoms_path, hier_path = str(tmp_path / "a.psv"), str(tmp_path / "h.psv")
        write_corpus(c, atoms_path, hier_path)
        reloaded = load_corpus(atoms_path, hier_path)
        assert reloaded == c
        assert reloaded.content_hash() == c.content_hash()

    def test_sui_matches_string_identity_exhaustively(self):
        params = SynthParams(n_cuis=1600, token_pool=900)
        c = synth_corpus(params, 7)
        by_term = {}
        by_sui = {}
        for rec in c.atoms.values():
            by_term.setdefault(rec.term, set()).add(rec.sui)
            by_sui.setdefault(rec.sui, set()).add(rec.term)
        assert all(len(s) == 1 for s in by_term.values())
        assert all(len(t) == 1 for t in by_sui.values())

    def test_lui_matches_normalized_identity_exhaustively(self):
        from uva import lexsim

        params = SynthParams(n_cuis=800, token_pool=600)
        c = synth_corpus(params, 13)
        by_norm = {}
        by_lui = {}
        for rec in c.atoms.values():
            key = " ".join(lexsim.normalize(rec.term))
            by_norm.setdefault(key, set()).add(rec.lui)
            by_lui.setdefault(rec.lui, set()).add(key)
        assert all(len(s) == 1 for s in by_norm.values())
        assert all(len(k) == 1 for k in by_lui.values())

    def test_sg_of_scui_is_member_union(self, small_synth):
        for scui, members in small_synth.by_scui.items():
            union = frozenset().union(*(small_synth.atoms[a].sg for a in members))
            assert small_synth.sg_of_scui[scui] == union
