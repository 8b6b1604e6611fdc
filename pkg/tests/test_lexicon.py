"""Lexicon loading, validation, and resolution against a vocabulary."""
from __future__ import annotations

import json

import numpy as np
import numpy.testing as npt
import pytest

from fairvec.errors import LexiconError, ResolutionError
from fairvec.lexicon import (
    bundled_lexicon_path,
    lexicon_from_dict,
    load_lexicon,
    resolve,
)
from fairvec.store import store_from_pairs

MINIMAL = {
    "class": "religion",
    "subclasses": [
        {"name": "a", "targets": ["ta1", "ta2"]},
        {"name": "b", "targets": ["tb1", "tb2"]},
    ],
    "equality_sets": [["ta1", "tb1"]],
    "attribute_sets": [
        {"name": "pleasant", "words": ["nice", "good"]},
        {"name": "unpleasant", "words": ["bad", "awful"]},
    ],
}


def minimal_doc():
    return json.loads(json.dumps(MINIMAL))


def store_for(words, dim=4, seed=0):
    rng = np.random.default_rng(seed)
    return store_from_pairs([(w, rng.normal(size=dim)) for w in words])


ALL_MINIMAL_WORDS = ["ta1", "ta2", "tb1", "tb2", "nice", "good", "bad", "awful"]


class TestLoad:
    def test_minimal_loads(self):
        lex = lexicon_from_dict(minimal_doc())
        assert lex.class_name == "religion"
        assert lex.subclass_names() == ["a", "b"]
        assert lex.equality_sets[0].terms == ("ta1", "tb1")
        assert [a.name for a in lex.attribute_sets] == ["pleasant", "unpleasant"]

    def test_load_from_file(self, tmp_path):
        p = tmp_path / "lex.json"
        p.write_text(json.dumps(minimal_doc()))
        assert lexicon_from_dict(minimal_doc()) == load_lexicon(p)

    def test_invalid_json_reported(self, tmp_path):
        p = tmp_path / "lex.json"
        p.write_text("{not json")
        with pytest.raises(LexiconError, match="invalid JSON"):
            load_lexicon(p)

    def test_wrong_arity_equality_set(self):
        doc = minimal_doc()
        doc["subclasses"].append({"name": "c", "targets": ["tc1"]})
        # still ["ta1","tb1"]: 2 terms under 3 subclasses
        with pytest.raises(LexiconError, match=r"equality_sets\[0\].*3 subclasses"):
            lexicon_from_dict(doc)

    def test_missing_field_named(self):
        doc = minimal_doc()
        del doc["attribute_sets"]
        with pytest.raises(LexiconError, match="attribute_sets"):
            lexicon_from_dict(doc)

    def test_one_subclass_rejected(self):
        doc = minimal_doc()
        doc["subclasses"] = doc["subclasses"][:1]
        doc["equality_sets"] = [["ta1"]]
        with pytest.raises(LexiconError, match="at least 2"):
            lexicon_from_dict(doc)

    def test_duplicate_subclass_names(self):
        doc = minimal_doc()
        doc["subclasses"][1]["name"] = "a"
        with pytest.raises(LexiconError, match="unique"):
            lexicon_from_dict(doc)

    def test_duplicate_targets(self):
        doc = minimal_doc()
        doc["subclasses"][0]["targets"] = ["ta1", "ta1"]
        with pytest.raises(LexiconError, match=r"subclasses\[0\].targets.*duplicate"):
            lexicon_from_dict(doc)

    def test_embedded_whitespace_rejected(self):
        doc = minimal_doc()
        doc["attribute_sets"][0]["words"][1] = "holy trinity"
        with pytest.raises(LexiconError, match=r"words\[1\].*whitespace"):
            lexicon_from_dict(doc)

    def test_empty_attribute_words(self):
        doc = minimal_doc()
        doc["attribute_sets"][0]["words"] = []
        with pytest.raises(LexiconError, match="non-empty"):
            lexicon_from_dict(doc)

    def test_non_string_word_named(self):
        doc = minimal_doc()
        doc["subclasses"][0]["targets"][0] = 3
        with pytest.raises(LexiconError, match=r"targets\[0\].*string"):
            lexicon_from_dict(doc)

    def test_lowercased_with_source_forms(self):
        doc = minimal_doc()
        doc["subclasses"][0]["targets"] = ["Church", "chapel"]
        doc["equality_sets"] = [["Church", "tb1"]]
        lex = lexicon_from_dict(doc)
        assert lex.subclasses[0].targets == ("church", "chapel")
        assert lex.source_forms == {"church": "Church"}


class TestBundledLexicon:
    def test_loads_and_is_well_formed(self):
        lex = load_lexicon(bundled_lexicon_path())
        assert lex.class_name == "religion"
        assert lex.subclass_names() == ["christianity", "islam", "judaism"]
        assert len(lex.equality_sets) >= 11
        assert ("church", "mosque", "synagogue") in {
            e.terms for e in lex.equality_sets
        }
        # every equality-set term belongs to the matching subclass's targets
        for eq in lex.equality_sets:
            for term, sub in zip(eq.terms, lex.subclasses):
                assert term in sub.targets, (term, sub.name)

    def test_has_expected_attribute_sets(self):
        lex = load_lexicon(bundled_lexicon_path())
        names = [a.name for a in lex.attribute_sets]
        assert names == ["pleasant", "unpleasant", "family", "violence"]


class TestResolve:
    def test_all_present_zero_drops(self):
        lex = lexicon_from_dict(minimal_doc())
        store = store_for(ALL_MINIMAL_WORDS)
        res = resolve(lex, store)
        assert res.drops.total == 0
        assert res.subclass("a").words == ("ta1", "ta2")
        assert len(res.equality_sets) == 1
        npt.assert_array_equal(res.subclass("a").matrix[0], store.get("ta1"))
        assert res.subclass("a").matrix.dtype == np.float64

    def test_oov_attribute_word_shrinks_set(self):
        lex = lexicon_from_dict(minimal_doc())
        store = store_for([w for w in ALL_MINIMAL_WORDS if w != "good"])
        res = resolve(lex, store)
        assert res.attribute_set("pleasant").words == ("nice",)
        assert res.drops.attributes == {"pleasant": ["good"]}
        assert res.drops.total == 1

    def test_partial_equality_set_dropped_whole(self):
        doc = minimal_doc()
        doc["subclasses"] = [
            {"name": "christianity", "targets": ["church", "chapel"]},
            {"name": "islam", "targets": ["mosque", "minaret"]},
            {"name": "judaism", "targets": ["synagogue", "menorah"]},
        ]
        doc["equality_sets"] = [
            ["church", "mosque", "synagogue"],
            ["chapel", "minaret", "menorah"],
        ]
        lex = lexicon_from_dict(doc)
        words = ["church", "chapel", "mosque", "minaret", "menorah",
                 "nice", "good", "bad", "awful"]  # no "synagogue"
        res = resolve(lex, store_for(words))
        assert [e.terms for e in res.equality_sets] == [
            ("chapel", "minaret", "menorah")]
        assert res.drops.equality_sets == [("church", "mosque", "synagogue")]
        # judaism subclass itself survives via its other term
        assert res.subclass("judaism").words == ("menorah",)

    def test_empty_subclass_fatal(self):
        lex = lexicon_from_dict(minimal_doc())
        store = store_for(["ta1", "ta2", "nice", "good", "bad", "awful"])
        with pytest.raises(ResolutionError, match="subclass 'b'"):
            resolve(lex, store)

    def test_no_surviving_equality_set_fatal(self):
        lex = lexicon_from_dict(minimal_doc())
        # tb1 missing kills the only equality set but not subclass b
        store = store_for(["ta1", "ta2", "tb2", "nice", "good", "bad", "awful"])
        with pytest.raises(ResolutionError, match="equality set"):
            resolve(lex, store)

    def test_case_fallback_lookup(self):
        doc = minimal_doc()
        doc["subclasses"][0]["targets"] = ["Church", "ta2"]
        doc["equality_sets"] = [["Church", "tb1"]]
        lex = lexicon_from_dict(doc)
        words = ["Church", "ta2", "tb1", "tb2", "nice", "good", "bad", "awful"]
        res = resolve(lex, store_for(words))
        sub = res.subclass("a")
        assert sub.words[0] == "church"   # lexicon form stays lowercased
        assert sub.keys[0] == "Church"    # matched row is the original spelling
        assert res.drops.total == 0

    def test_lowercase_preferred_over_original(self):
        doc = minimal_doc()
        doc["subclasses"][0]["targets"] = ["Church", "ta2"]
        doc["equality_sets"] = [["Church", "tb1"]]
        lex = lexicon_from_dict(doc)
        words = ["church", "Church", "ta2", "tb1", "tb2",
                 "nice", "good", "bad", "awful"]
        res = resolve(lex, store_for(words))
        assert res.subclass("a").keys[0] == "church"

    def test_dropping_monotone(self):
        lex = lexicon_from_dict(minimal_doc())
        small = store_for(["ta1", "tb1", "nice", "bad"])
        res_small = resolve(lex, small)
        res_big = resolve(lex, store_for(ALL_MINIMAL_WORDS))
        assert res_big.drops.total <= res_small.drops.total
        for name in ("a", "b"):
            assert set(res_small.subclass(name).words) <= set(
                res_big.subclass(name).words)

    def test_deterministic(self):
        lex = lexicon_from_dict(minimal_doc())
        store = store_for(ALL_MINIMAL_WORDS)
        r1, r2 = resolve(lex, store), resolve(lex, store)
        assert r1.subclass("a").words == r2.subclass("a").words
        npt.assert_array_equal(r1.subclass("b").matrix, r2.subclass("b").matrix)
