import numpy as np
import pytest

from embeval.metrics import (
    coverage,
    diversity,
    diversity_matrix,
    keyword_covered,
    keyword_tokens,
    relational_coverage,
)
from embeval.neighbors import cache_load, cache_store, top_k_batch
from embeval.report import pct
from embeval.thesaurus import DescriptorPair
from conftest import anchored, make_model, random_model
from oracles import naive_coverage_count, naive_diversity, naive_relational


def test_keyword_tokens_lowercases_and_splits_hyphens():
    assert keyword_tokens("Nord-Süd-Konflikt") == ("nord", "süd", "konflikt")
    assert keyword_tokens("soziale Ungleichheit") == ("soziale", "ungleichheit")
    assert keyword_tokens("Macht", lowercase=False) == ("Macht",)


def test_keyword_covered_exact():
    model = make_model("m", ["macht"], [[1.0, 0.0]])
    for s in (0.9, 1.0):
        assert keyword_covered(("macht",), model, s) is not None


def test_keyword_covered_compound_threshold():
    model = make_model("m", ["sozial", "ungleichheit"], [[1, 0], [0, 1]])
    assert keyword_covered(("soziale", "ungleichheit"), model, 1.0) is None
    matches = keyword_covered(("soziale", "ungleichheit"), model, 0.9)
    assert matches is not None
    assert matches[0][1] == "sozial"
    assert matches[0][2] == pytest.approx(12 / 13)


def test_keyword_covered_empty_warns(caplog):
    model = make_model("m", ["macht"], [[1.0, 0.0]])
    with caplog.at_level("WARNING"):
        assert keyword_covered((), model, 0.9) is None
    assert "no tokens" in caplog.text


def test_coverage_superset_is_100():
    model = make_model("m", ["a", "b", "c"], np.eye(3))
    result = coverage(model, ["a", "b", "c"], 1.0)
    assert result.n_covered == 3
    assert pct(result.c) == "100.00"


def test_coverage_three_keyword_fixture():
    model = make_model("m", ["sozial", "ungleichheit", "macht"], np.eye(3))
    labels = ["soziale Ungleichheit", "Macht", "Armut"]
    at_1 = coverage(model, labels, 1.0)
    at_09 = coverage(model, labels, 0.9)
    assert (at_1.n_covered, at_1.n_keywords) == (1, 3)
    assert (at_09.n_covered, at_09.n_keywords) == (2, 3)
    assert pct(at_1.c) == "33.33"
    assert pct(at_09.c) == "66.67"


def test_coverage_hit_records():
    model = make_model("m", ["sozial", "macht"], np.eye(2))
    result = coverage(model, ["Macht", "soziale"], 0.9)
    assert {h.keyword for h in result.hits} == {"Macht", "soziale"}
    by_kw = {h.keyword: h for h in result.hits}
    assert by_kw["Macht"].min_ratio == 1.0
    assert by_kw["soziale"].min_ratio == pytest.approx(12 / 13)


def test_coverage_monotone_in_s():
    rng = np.random.default_rng(21)
    words = ["macht", "staat", "sozial", "armut", "kultur", "wandel", "bildung"]
    for trial in range(20):
        size = int(rng.integers(3, len(words) + 1))
        vocab = list(rng.choice(words, size=size, replace=False))
        model = make_model("m", vocab, rng.standard_normal((size, 4)))
        labels = [w + suffix for w in words for suffix in ("", "e")][: int(rng.integers(3, 12))]
        previous = None
        for s in (0.85, 0.9, 0.95, 1.0):
            c = coverage(model, labels, s).c
            if previous is not None:
                assert c <= previous + 1e-12
            previous = c


def test_coverage_matches_naive_enumeration():
    rng = np.random.default_rng(22)
    vocab = ["macht", "herrschaft", "staat", "sozial", "armut"]
    model = make_model("m", vocab, rng.standard_normal((5, 3)))
    labels = ["Macht", "mächte", "soziale Ungleichheit", "Armut", "staaten", "xyz"]
    for s in (0.8, 0.9, 0.95, 1.0):
        assert coverage(model, labels, s).n_covered == naive_coverage_count(
            vocab, labels, s
        )


def _diversity_plant():
    """Two models where keyword "a" shares a neighbor and "b" does not."""
    vocab = ["a", "b", "x", "y", "z", "p", "q", "r", "t"]
    model_a = make_model("A", vocab, [
        [1, 0], [0, 1],
        anchored(0.99, 0), anchored(0.98, 0), anchored(0.5, 0),
        anchored(0.99, 1), anchored(0.98, 1), anchored(0.30, 1), anchored(0.20, 1),
    ])
    model_b = make_model("B", vocab, [
        [1, 0], [0, 1],
        anchored(0.5, 0), anchored(0.99, 0), anchored(0.98, 0),
        anchored(0.30, 1), anchored(0.20, 1), anchored(0.99, 1), anchored(0.98, 1),
    ])
    return model_a, model_b


def test_diversity_planted_fixture():
    model_a, model_b = _diversity_plant()
    # sanity: the planted neighborhoods are what we think they are
    from embeval.neighbors import top_k

    assert set(top_k(model_a, "a", 2).tokens()) == {"x", "y"}
    assert set(top_k(model_b, "a", 2).tokens()) == {"y", "z"}
    assert set(top_k(model_a, "b", 2).tokens()) == {"p", "q"}
    assert set(top_k(model_b, "b", 2).tokens()) == {"r", "t"}

    result = diversity(model_a, model_b, ["a", "b"], 2)
    assert result.n_evaluated == 2
    assert result.n_disjoint == 1
    assert pct(result.d) == "50.00"


def test_diversity_self_is_zero():
    rng = np.random.default_rng(23)
    model = random_model(rng, "m", 30, 4)
    result = diversity(model, model, list(model.vocab[:10]), 5)
    assert result.n_disjoint == 0
    assert pct(result.d) == "0.00"


def test_diversity_is_symmetric():
    model_a, model_b = _diversity_plant()
    ab = diversity(model_a, model_b, ["a", "b"], 2)
    ba = diversity(model_b, model_a, ["a", "b"], 2)
    assert ab.d == ba.d
    assert ab.n_evaluated == ba.n_evaluated


def test_diversity_skips_multiword_and_oov():
    model_a, model_b = _diversity_plant()
    labels = ["a", "b", "soziale Ungleichheit", "missing"]
    result = diversity(model_a, model_b, labels, 2)
    assert result.n_total == 4
    assert result.n_evaluated == 2
    assert result.n_skipped_multiword == 1
    assert result.n_skipped_oov == 1


def test_diversity_denominator_policies():
    model_a, model_b = _diversity_plant()
    labels = ["a", "b", "missing"]
    evaluated = diversity(model_a, model_b, labels, 2, denominator="evaluated")
    total = diversity(model_a, model_b, labels, 2, denominator="total")
    assert pct(evaluated.d) == "50.00"
    assert pct(total.d) == "33.33"
    assert evaluated.d_total == total.d
    assert total.d_evaluated == evaluated.d


def test_diversity_anti_monotone_in_k():
    rng = np.random.default_rng(24)
    for trial in range(10):
        model_a = random_model(rng, "A", 40, 4)
        model_b = random_model(rng, "B", 40, 4)
        labels = list(model_a.vocab[:15])
        previous = None
        for k in (1, 5, 10, 50):
            d = diversity(model_a, model_b, labels, k).d
            if previous is not None:
                assert d <= previous + 1e-12
            previous = d


def test_diversity_matches_naive_enumeration():
    rng = np.random.default_rng(25)
    model_a = random_model(rng, "A", 30, 4)
    model_b = random_model(rng, "B", 30, 4)
    labels = list(model_a.vocab[:12]) + ["nicht da", "fehlt"]
    for k in (1, 3, 7):
        result = diversity(model_a, model_b, labels, k)
        n_eval, n_disj = naive_diversity(model_a, model_b, labels, k)
        assert (result.n_evaluated, result.n_disjoint) == (n_eval, n_disj)


def test_diversity_matrix_symmetry_and_diagonal_convention():
    rng = np.random.default_rng(26)
    models = [random_model(rng, f"m{i}", 25, 4) for i in range(3)]
    labels = list(models[0].vocab[:10])
    matrix = diversity_matrix(models, labels, 5)
    assert len(matrix) == 6  # 3 unordered pairs, mirrored
    for a in models:
        for b in models:
            if a.name != b.name:
                assert matrix[(a.name, b.name)].d == matrix[(b.name, a.name)].d


def test_diversity_from_cache_equals_fresh(tmp_path):
    model_a, model_b = _diversity_plant()
    fresh = diversity(model_a, model_b, ["a", "b"], 2)
    maps = {}
    for model in (model_a, model_b):
        path = tmp_path / f"{model.name}.tsv"
        sets = top_k_batch(model, ["a", "b"], 2).neighbor_sets
        cache_store(path, model, 2, sets)
        maps[model.name] = cache_load(path, model, 2)
    cached = diversity(
        model_a, model_b, ["a", "b"], 2,
        neighbors_a=maps["A"], neighbors_b=maps["B"],
    )
    assert (cached.n_evaluated, cached.n_disjoint, cached.d) == (
        fresh.n_evaluated, fresh.n_disjoint, fresh.d,
    )


def test_diversity_matrix_from_cache_equals_fresh(tmp_path):
    rng = np.random.default_rng(30)
    models = [random_model(rng, f"m{i}", 30, 4) for i in range(3)]
    labels = list(models[0].vocab[:12])
    fresh = diversity_matrix(models, labels, 4)

    maps = {}
    for model in models:
        path = tmp_path / f"{model.name}.tsv"
        sets = top_k_batch(model, labels, 4).neighbor_sets
        cache_store(path, model, 4, sets)
        maps[model.name] = cache_load(path, model, 4)
    cached = diversity_matrix(models, labels, 4, neighbor_maps=maps)

    assert set(cached) == set(fresh)
    for key in fresh:
        assert (cached[key].n_evaluated, cached[key].n_disjoint, cached[key].d) == (
            fresh[key].n_evaluated, fresh[key].n_disjoint, fresh[key].d,
        )


def test_coverage_empty_keyword_list():
    model = make_model("m", ["a"], [[1.0, 0.0]])
    result = coverage(model, [], 1.0)
    assert result.n_keywords == 0
    assert result.c == 0.0


def _relation_plant():
    """Model where "herrschaft" sits at rank 3 of "macht"'s neighborhood."""
    model = make_model("m", ["macht", "staat", "politik", "herrschaft", "kultur"], [
        [1, 0],
        anchored(0.99, 0), anchored(0.98, 0), anchored(0.97, 0), anchored(0.20, 0),
    ])
    pairs = [DescriptorPair("Macht", "Herrschaft", "related", "de")]
    return model, pairs


def test_relational_planted_rank_flip():
    model, pairs = _relation_plant()
    low = relational_coverage(model, pairs, 2)["related"]
    high = relational_coverage(model, pairs, 10)["related"]
    assert low.n_found == 0
    assert high.n_found == 1
    assert pct(low.r) == "0.00"
    assert pct(high.r) == "100.00"


def test_relational_oov_policies():
    model, _ = _relation_plant()
    pairs = [
        DescriptorPair("Macht", "Herrschaft", "related", "de"),
        DescriptorPair("Unbekannt", "Staat", "related", "de"),
    ]
    miss = relational_coverage(model, pairs, 10, oov_policy="miss")["related"]
    assert (miss.n_pairs, miss.n_found, miss.n_oov_descriptors) == (2, 1, 1)
    assert pct(miss.r) == "50.00"
    skip = relational_coverage(model, pairs, 10, oov_policy="skip")["related"]
    assert pct(skip.r) == "100.00"


def test_relational_monotone_in_k():
    rng = np.random.default_rng(27)
    for trial in range(10):
        model = random_model(rng, "m", 30, 4)
        pairs = [
            DescriptorPair(model.vocab[i], model.vocab[j], "broader", "de")
            for i, j in zip(range(0, 10), range(10, 20))
        ]
        previous = None
        for k in (1, 3, 10, 29):
            r = relational_coverage(model, pairs, k)["broader"].r
            if previous is not None:
                assert r >= previous - 1e-12
            previous = r


def test_relational_groups_by_relation_type():
    model, _ = _relation_plant()
    pairs = [
        DescriptorPair("Macht", "Herrschaft", "related", "de"),
        DescriptorPair("Macht", "Staat", "narrower", "de"),
    ]
    results = relational_coverage(model, pairs, 10)
    assert set(results) == {"related", "narrower"}
    assert results["related"].n_pairs == 1
    assert results["narrower"].n_pairs == 1


def test_results_independent_of_keyword_order():
    rng = np.random.default_rng(29)
    model_a = random_model(rng, "A", 25, 4)
    model_b = random_model(rng, "B", 25, 4)
    labels = list(model_a.vocab[:10]) + ["zwei wörter", "fehlt"]
    shuffled = list(reversed(labels))
    for s in (0.9, 1.0):
        assert coverage(model_a, labels, s).n_covered == coverage(model_a, shuffled, s).n_covered
    d1 = diversity(model_a, model_b, labels, 4)
    d2 = diversity(model_a, model_b, shuffled, 4)
    assert (d1.n_evaluated, d1.n_disjoint) == (d2.n_evaluated, d2.n_disjoint)


def test_relational_matches_naive_enumeration():
    rng = np.random.default_rng(28)
    model = random_model(rng, "m", 25, 4)
    pairs = [
        DescriptorPair(model.vocab[i], model.vocab[(i * 3 + 1) % 25], "broader", "de")
        for i in range(12)
    ] + [DescriptorPair("fehlt", model.vocab[0], "broader", "de")]
    for k in (1, 5, 10):
        result = relational_coverage(model, pairs, k)["broader"]
        n_pairs, n_found, n_oov = naive_relational(model, pairs, k)["broader"]
        assert (result.n_pairs, result.n_found, result.n_oov_descriptors) == (
            n_pairs, n_found, n_oov,
        )
