"""Cosine-geometry metrics against hand values and brute-force oracles."""
from __future__ import annotations

import math

import numpy as np
import numpy.testing as npt
import pytest

from fairvec.errors import DegenerateInputError, ResolutionError
from fairvec.lexicon import lexicon_from_dict, resolve
from fairvec.metrics import (
    AnalogyScore,
    assoc_s,
    cosine,
    enumerate_analogies,
    mac,
    nearest_neighbors,
    score_analogy,
    weat,
    weat_all_pairs,
    word_set,
)
from fairvec.store import store_from_pairs


def ws(name, vectors):
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    return word_set(name, [f"{name}{i}" for i in range(len(vectors))], vectors)


def random_sets(rng, dim, max_size=5):
    sizes = rng.integers(1, max_size + 1, size=4)
    t1, t2, a1, a2 = (rng.normal(size=(s, dim)) for s in sizes)
    while len(t1) + len(t2) < 2:
        t1 = rng.normal(size=(2, dim))
    return ws("t1", t1), ws("t2", t2), ws("a1", a1), ws("a2", a2)


# plain-python reference implementations, deliberately written differently
# from the library (loops and built-in sum)

def ref_cos(u, v):
    nu = math.sqrt(sum(x * x for x in u))
    nv = math.sqrt(sum(x * x for x in v))
    if nu == 0 or nv == 0:
        return 0.0
    return sum(a * b for a, b in zip(u, v)) / (nu * nv)


def ref_s(w, A1, A2):
    m1 = sum(ref_cos(w, a) for a in A1) / len(A1)
    m2 = sum(ref_cos(w, a) for a in A2) / len(A2)
    return m1 - m2


def ref_weat(T1, T2, A1, A2):
    s1 = [ref_s(w, A1, A2) for w in T1]
    s2 = [ref_s(w, A1, A2) for w in T2]
    union = s1 + s2
    mean = sum(union) / len(union)
    std = math.sqrt(sum((v - mean) ** 2 for v in union) / len(union))
    stat = sum(s1) - sum(s2)
    d = (sum(s1) / len(s1) - sum(s2) / len(s2)) / std
    return stat, d


def ref_mac(targets, attributes):
    vals = []
    for T in targets:
        for t in T:
            for A in attributes:
                vals.append(sum(1 - ref_cos(t, a) for a in A) / len(A))
    return sum(vals) / len(vals)


class TestCosine:
    def test_identity(self):
        v = np.array([2.0, -3.0, 1.0])
        assert cosine(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine([1, 0], [0, 1]) == 0.0

    def test_hand_value(self):
        assert cosine([1, 0], [1, 1]) == pytest.approx(0.70710678, abs=1e-8)

    def test_zero_vector_gives_zero(self):
        assert cosine([0, 0], [1, 2]) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            cosine([1, 0], [1, 0, 0])


class TestAssoc:
    def test_equal_attribute_sets_zero(self):
        A = ws("a", [[1, 2], [3, -1]])
        assert assoc_s(np.array([1.0, 1.0]), A, A) == 0.0

    def test_hand_value(self):
        A1 = ws("a1", [[1, 0]])
        A2 = ws("a2", [[0, 1]])
        assert assoc_s(np.array([1.0, 0.0]), A1, A2) == pytest.approx(1.0)

    def test_swap_negates_exactly(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            w = rng.normal(size=6)
            A1 = ws("a1", rng.normal(size=(3, 6)))
            A2 = ws("a2", rng.normal(size=(4, 6)))
            assert assoc_s(w, A2, A1) == -assoc_s(w, A1, A2)

    def test_empty_attribute_set(self):
        A1 = ws("a1", [[1, 0]])
        empty = word_set("a2", [], np.empty((0, 2)))
        with pytest.raises(DegenerateInputError):
            assoc_s(np.array([1.0, 0.0]), A1, empty)


class TestWeat:
    def test_hand_instance(self):
        T1, T2 = ws("t1", [[1, 0]]), ws("t2", [[0, 1]])
        A1, A2 = ws("a1", [[1, 0]]), ws("a2", [[0, 1]])
        r = weat(T1, T2, A1, A2)
        assert r.statistic == pytest.approx(2.0)
        assert r.effect_size == pytest.approx(2.0)
        assert r.per_word_assoc == {"t10": pytest.approx(1.0),
                                    "t20": pytest.approx(-1.0)}

    def test_mirror_symmetry_zero_effect(self):
        T1 = ws("t1", [[1, 0], [0, 1]])
        T2 = ws("t2", [[0, 1], [1, 0]])
        A1, A2 = ws("a1", [[1, 0]]), ws("a2", [[0, 1]])
        r = weat(T1, T2, A1, A2)
        assert r.effect_size == 0.0
        assert r.statistic == 0.0

    def test_zero_spread_raises(self):
        T1, T2 = ws("t1", [[1, 0]]), ws("t2", [[1, 0]])
        A1, A2 = ws("a1", [[1, 0]]), ws("a2", [[0, 1]])
        with pytest.raises(DegenerateInputError, match="identical"):
            weat(T1, T2, A1, A2)

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            T1, T2, A1, A2 = random_sets(rng, dim=int(rng.integers(2, 8)))
            stat, d = ref_weat(T1.matrix, T2.matrix, A1.matrix, A2.matrix)
            r = weat(T1, T2, A1, A2)
            assert r.statistic == pytest.approx(stat, abs=1e-9)
            assert r.effect_size == pytest.approx(d, abs=1e-9)

    def test_target_swap_negates_exactly(self):
        rng = np.random.default_rng(12)
        for _ in range(25):
            T1, T2, A1, A2 = random_sets(rng, dim=5)
            r = weat(T1, T2, A1, A2)
            rs = weat(T2, T1, A1, A2)
            assert rs.effect_size == -r.effect_size
            assert rs.statistic == -r.statistic

    def test_attribute_swap_negates_exactly(self):
        rng = np.random.default_rng(13)
        for _ in range(25):
            T1, T2, A1, A2 = random_sets(rng, dim=5)
            r = weat(T1, T2, A1, A2)
            rs = weat(T1, T2, A2, A1)
            assert rs.effect_size == -r.effect_size
            assert rs.statistic == -r.statistic

    def test_single_vector_scaling_invariance(self):
        rng = np.random.default_rng(14)
        T1, T2, A1, A2 = random_sets(rng, dim=6)
        r = weat(T1, T2, A1, A2)
        scaled = np.array(T1.matrix)
        scaled[0] *= 37.5
        r2 = weat(ws("t1", scaled), T2, A1, A2)
        assert r2.effect_size == pytest.approx(r.effect_size, abs=1e-9)
        assert r2.statistic == pytest.approx(r.statistic, abs=1e-9)

    def test_orthogonal_invariance(self):
        rng = np.random.default_rng(15)
        dim = 7
        T1, T2, A1, A2 = random_sets(rng, dim=dim)
        q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
        r = weat(T1, T2, A1, A2)
        rq = weat(ws("t1", T1.matrix @ q.T), ws("t2", T2.matrix @ q.T),
                  ws("a1", A1.matrix @ q.T), ws("a2", A2.matrix @ q.T))
        assert rq.effect_size == pytest.approx(r.effect_size, abs=1e-6)
        assert rq.statistic == pytest.approx(r.statistic, abs=1e-6)

    def test_zero_vector_counted_degenerate(self):
        T1, T2 = ws("t1", [[1, 0], [0, 1]]), ws("t2", [[1, 1]])
        A1, A2 = ws("a1", [[0, 0], [1, 0]]), ws("a2", [[0, 1]])
        r = weat(T1, T2, A1, A2)
        assert r.degenerate_count == 3  # zero attribute row hit once per target

    def test_empty_set_rejected(self):
        empty = word_set("t2", [], np.empty((0, 2)))
        T1 = ws("t1", [[1, 0], [0, 1]])
        A1, A2 = ws("a1", [[1, 0]]), ws("a2", [[0, 1]])
        with pytest.raises(DegenerateInputError, match="'t2'"):
            weat(T1, empty, A1, A2)


class TestMac:
    def test_all_orthogonal_gives_one(self):
        targets = [ws("t", [[1, 0, 0], [0, 1, 0]])]
        attributes = [ws("a", [[0, 0, 1]])]
        assert mac(targets, attributes).mac == pytest.approx(1.0)

    def test_aligned_gives_zero(self):
        targets = [ws("t", [[2, 0], [1, 0]])]
        attributes = [ws("a", [[5, 0]])]
        assert mac(targets, attributes).mac == pytest.approx(0.0)

    def test_range(self):
        rng = np.random.default_rng(16)
        for _ in range(20):
            targets = [ws("t", rng.normal(size=(3, 4)))]
            attributes = [ws("a", rng.normal(size=(4, 4))),
                          ws("b", rng.normal(size=(2, 4)))]
            assert 0.0 <= mac(targets, attributes).mac <= 2.0

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(17)
        for _ in range(40):
            targets = [ws(f"t{i}", rng.normal(size=(int(rng.integers(1, 4)), 5)))
                       for i in range(2)]
            attributes = [ws(f"a{i}", rng.normal(size=(int(rng.integers(1, 4)), 5)))
                          for i in range(3)]
            expected = ref_mac([t.matrix for t in targets],
                               [a.matrix for a in attributes])
            assert mac(targets, attributes).mac == pytest.approx(expected, abs=1e-9)

    def test_flat_mean_weighting(self):
        # a large and a small target set: every word counts once
        t_big = ws("big", [[1, 0], [1, 0], [1, 0]])
        t_small = ws("small", [[0, 1]])
        attributes = [ws("a", [[1, 0]])]
        r = mac([t_big, t_small], attributes)
        assert r.mac == pytest.approx((0.0 * 3 + 1.0) / 4)
        assert r.per_pair[("big", "a")] == pytest.approx(0.0)
        assert r.per_pair[("small", "a")] == pytest.approx(1.0)

    def test_scaling_invariance(self):
        rng = np.random.default_rng(18)
        targets = [ws("t", rng.normal(size=(3, 4)))]
        attributes = [ws("a", rng.normal(size=(3, 4)))]
        base = mac(targets, attributes).mac
        scaled = np.array(targets[0].matrix)
        scaled[1] *= 250.0
        assert mac([ws("t", scaled)], attributes).mac == pytest.approx(
            base, abs=1e-9)


class TestWeatAllPairs:
    def lexicon(self, n_subs, n_attrs, dim=6, seed=19):
        rng = np.random.default_rng(seed)
        words = {}
        doc = {
            "class": "toy",
            "subclasses": [], "equality_sets": [], "attribute_sets": [],
        }
        for i in range(n_subs):
            targets = [f"s{i}w{j}" for j in range(3)]
            doc["subclasses"].append({"name": f"sub{i}", "targets": targets})
            for w in targets:
                words[w] = rng.normal(size=dim)
        doc["equality_sets"] = [[f"s{i}w0" for i in range(n_subs)]]
        for i in range(n_attrs):
            attr_words = [f"a{i}w{j}" for j in range(3)]
            doc["attribute_sets"].append(
                {"name": f"attr{i}", "words": attr_words})
            for w in attr_words:
                words[w] = rng.normal(size=dim)
        store = store_from_pairs(list(words.items()))
        return resolve(lexicon_from_dict(doc), store)

    def test_combination_counts(self):
        assert len(weat_all_pairs(self.lexicon(2, 2)).pairs) == 1
        assert len(weat_all_pairs(self.lexicon(3, 3)).pairs) == 9

    def test_aggregate_is_mean_absolute_effect(self):
        summary = weat_all_pairs(self.lexicon(3, 3))
        hand = sum(abs(p.result.effect_size) for p in summary.pairs) / 9
        assert summary.aggregate == pytest.approx(hand, abs=1e-12)

    def test_requires_two_attribute_sets(self):
        with pytest.raises(DegenerateInputError, match="attribute"):
            weat_all_pairs(self.lexicon(2, 1))


class TestScoreAnalogy:
    @staticmethod
    def analogy_store():
        return store_from_pairs([
            ("a", np.array([1.0, 0.0, 0.0])),
            ("b", np.array([0.0, 1.0, 0.0])),
            ("x", np.array([1.0, 0.0, 0.5])),
            ("y", np.array([0.0, 1.0, 0.5])),
            ("far", np.array([9.0, 9.0, 9.0])),
            ("dup", np.array([1.0, 0.0, 0.5])),
        ])

    def test_parallel_offsets_score_one(self):
        r = score_analogy(self.analogy_store(), "a", "b", "x", "y", delta=2.0)
        assert r.score == pytest.approx(1.0)

    def test_identical_pair_scores_zero(self):
        r = score_analogy(self.analogy_store(), "a", "b", "x", "dup")
        assert r.score == 0.0

    def test_threshold_gates(self):
        store = self.analogy_store()
        assert score_analogy(store, "a", "b", "x", "far", delta=1.0).score == 0.0
        wide = score_analogy(store, "a", "b", "x", "far", delta=100.0)
        assert wide.score != 0.0

    def test_delta_zero_forces_zero(self):
        store = self.analogy_store()
        assert score_analogy(store, "a", "b", "x", "y", delta=0.0).score == 0.0
        assert score_analogy(store, "a", "b", "x", "dup", delta=0.0).score == 0.0

    def test_magnitude_bounded(self):
        rng = np.random.default_rng(20)
        store = store_from_pairs(
            [(f"w{i}", rng.normal(size=5)) for i in range(12)])
        for _ in range(40):
            a, b, x, y = (f"w{i}" for i in rng.integers(0, 12, size=4))
            r = score_analogy(store, a, b, x, y, delta=10.0)
            assert abs(r.score) <= 1.0 + 1e-12

    def test_oov_raises(self):
        with pytest.raises(ResolutionError, match="'nope'"):
            score_analogy(self.analogy_store(), "a", "b", "x", "nope")


class TestEnumerateAnalogies:
    @staticmethod
    def toy_store():
        rng = np.random.default_rng(22)
        pairs = [(f"L{i}", rng.normal(size=4)) for i in range(3)]
        pairs += [(f"R{i}", rng.normal(size=4)) for i in range(3)]
        pairs += [(f"attr{i}", rng.normal(size=4)) for i in range(4)]
        from fairvec.store import normalize_all
        return normalize_all(store_from_pairs(pairs))

    def test_min_score_above_one_empty(self):
        store = self.toy_store()
        out = enumerate_analogies(store, ["L0"], ["R0"], ["attr0", "attr1"],
                                  min_score=1.1)
        assert out == []

    def test_single_candidate(self):
        store = self.toy_store()
        out = enumerate_analogies(store, ["L0"], ["R0"], ["attr0", "attr1"],
                                  delta=2.0, min_score=0.0)
        # 1 left x 1 right x (2 choose ordered distinct pairs) = 2 candidates
        assert len(out) == 2
        assert all(isinstance(s, AnalogyScore) for s in out)

    def test_sorted_descending_and_filtered(self):
        store = self.toy_store()
        out = enumerate_analogies(store, ["L0", "L1", "L2"],
                                  ["R0", "R1", "R2"],
                                  ["attr0", "attr1", "attr2", "attr3"],
                                  delta=2.0, min_score=0.2)
        scores = [s.score for s in out]
        assert scores == sorted(scores, reverse=True)
        assert all(abs(s) >= 0.2 for s in scores)

    def test_never_pairs_same_attribute_or_identity(self):
        store = self.toy_store()
        out = enumerate_analogies(store, ["L0", "R0"], ["R0", "L0"],
                                  ["attr0", "attr1"], delta=2.0, min_score=0.0)
        for s in out:
            assert s.a != s.x
            assert s.b != s.y

    def test_oov_dropped_with_warning(self, caplog):
        store = self.toy_store()
        with caplog.at_level("WARNING"):
            out = enumerate_analogies(store, ["L0", "ghost"], ["R0"],
                                      ["attr0", "attr1"], delta=2.0,
                                      min_score=0.0)
        assert "ghost" in caplog.text
        assert all(s.a == "L0" for s in out)


class TestNearestNeighbors:
    def test_duplicate_vector_is_nearest(self):
        store = store_from_pairs([
            ("q", np.array([1.0, 0.0])),
            ("other", np.array([0.0, 1.0])),
            ("twin", np.array([2.0, 0.0])),
        ])
        assert nearest_neighbors(store, "q", 1)[0][0] == "twin"

    def test_exclude_promotes_second(self):
        store = store_from_pairs([
            ("q", np.array([1.0, 0.0])),
            ("twin", np.array([2.0, 0.0])),
            ("close", np.array([1.0, 0.2])),
        ])
        out = nearest_neighbors(store, "q", 1, exclude={"twin"})
        assert out[0][0] == "close"

    def test_matches_bruteforce_scan(self):
        rng = np.random.default_rng(23)
        words = [f"w{i}" for i in range(100)]
        vecs = {w: rng.normal(size=8) for w in words}
        store = store_from_pairs([(w, vecs[w]) for w in words])
        got = nearest_neighbors(store, "w0", 5)
        sims = sorted(
            ((ref_cos(vecs["w0"], vecs[w]), w) for w in words if w != "w0"),
            key=lambda t: -t[0])
        assert [w for _, w in sims[:5]] == [w for w, _ in got]
        for (sim, _), (_, got_sim) in zip(sims[:5], got):
            assert got_sim == pytest.approx(sim, abs=1e-9)

    def test_tie_broken_by_vocab_index(self):
        store = store_from_pairs([
            ("q", np.array([1.0, 0.0])),
            ("late_twin", np.array([3.0, 0.0])),
            ("early_twin", np.array([2.0, 0.0])),
        ])
        # both twins have cosine 1; "late_twin" has the smaller index
        out = nearest_neighbors(store, "q", 2)
        assert [w for w, _ in out] == ["late_twin", "early_twin"]

    def test_oov_query(self):
        store = store_from_pairs([("a", np.array([1.0, 0.0]))])
        with pytest.raises(ResolutionError):
            nearest_neighbors(store, "missing", 1)

    def test_n_validation(self):
        store = store_from_pairs([("a", np.array([1.0, 0.0]))])
        with pytest.raises(ValueError):
            nearest_neighbors(store, "a", 0)
