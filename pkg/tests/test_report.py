"""Corpus reports: pooling, ill-formed handling, JSON shape, determinism."""

from __future__ import annotations

import json

import pytest

from tmrkit.core.parser import parse_tmr
from tmrkit.scoring.report import FieldCounts, micro_f1, pair_seed, score_corpus
from tmrkit.scoring.smatch import smatch_pair
from tmrkit.scoring.triples import FieldClass, to_triples

FULL = """\
(t1 / tombstone.n.01
    :ent (x1 / male.n.02
        :occ (o1 / constable.n.03
            :hco "58220")
        :pob (v1 / village.n.02
            :nam "SEBALDEBUREN"
            :geo "2747409")
        :dob (d1 / date.n.05
            :dom "23"
            :moy "02"
            :yoc "1883")
        :rol (h1 / husband.n.01
            :tgt (x2 / female.n.02))))
"""


def test_field_counts_f1():
    assert FieldCounts(2, 0, 2).f1 == pytest.approx(2 / 3)
    assert FieldCounts(0, 0, 0).f1 == 0.0
    assert FieldCounts(3, 0, 0).f1 == 1.0


def test_geo_mismatch_counts_one_each_way():
    pred = parse_tmr('(a1 / village.n.02 :geo "000")')
    gold = parse_tmr('(b1 / village.n.02 :geo "2747409")')
    _, mapping = smatch_pair(pred, gold)
    counts = micro_f1([(to_triples(pred), to_triples(gold), mapping)], FieldClass.GEO)
    assert (counts.tp, counts.fp, counts.fn) == (0, 1, 1)
    assert counts.f1 == 0.0


def test_micro_pools_counts_instead_of_averaging_pairs():
    perfect = '(a1 / male.n.02 :nam "JAN" :pfx "DE")'
    empty_pred = "(b1 / male.n.02)"
    gold_two_names = '(c1 / male.n.02 :nam "JAN" :pfx "DE")'

    pairs = []
    for pred_text, gold_text in ((perfect, perfect), (empty_pred, gold_two_names)):
        pred, gold = parse_tmr(pred_text), parse_tmr(gold_text)
        _, mapping = smatch_pair(pred, gold)
        pairs.append((to_triples(pred), to_triples(gold), mapping))
    counts = micro_f1(pairs, FieldClass.NAME)
    # Pooled: tp=2, fp=0, fn=2 gives 2/3; a per-pair average would say 1/2.
    assert (counts.tp, counts.fp, counts.fn) == (2, 0, 2)
    assert counts.f1 == pytest.approx(2 / 3)


def test_identity_corpus_scores_one_everywhere():
    entries = [(FULL, FULL), (FULL, FULL)]
    report = score_corpus(entries, restarts=4, seed=0)
    assert report.smatch.f1 == 1.0
    assert report.ifr == 0.0
    assert report.n_pairs == 2
    for field in FieldClass:
        assert report.fields[field].f1 == 1.0, field
        assert report.fields[field].fp == 0 and report.fields[field].fn == 0


def test_one_bad_prediction_in_four_gives_quarter_ifr():
    good = "(t1 / tombstone.n.01)"
    entries = [(good, good)] * 3 + [("(t1 / broken", good)]
    report = score_corpus(entries)
    assert report.ifr == 0.25
    assert report.smatch.predicted == 3
    assert report.smatch.gold == 4


def test_ill_formed_prediction_feeds_false_negatives():
    gold = '(t1 / tombstone.n.01 :ent (x1 / male.n.02 :nam "JAN"))'
    report = score_corpus([("(t1 / broken", gold)])
    assert report.fields[FieldClass.NAME].fn == 1
    assert report.fields[FieldClass.SYNSET].fn == 2
    assert report.fields[FieldClass.ROLE].fn == 1
    assert report.fields[FieldClass.NAME].tp == 0
    assert report.smatch.f1 == 0.0


def test_ill_formed_gold_aborts():
    with pytest.raises(ValueError, match="gold entry 1"):
        score_corpus(
            [
                ("(t1 / tombstone.n.01)", "(t1 / tombstone.n.01)"),
                ("(t1 / tombstone.n.01)", "(t1 / tombstone.n.01"),
            ]
        )


def test_report_is_bit_identical_for_fixed_seed():
    entries = [
        (FULL, FULL),
        ("(a1 / tombstone.n.01 :ent (b1 / male.n.02))", FULL),
        ("(t1 / broken", FULL),
    ]
    first = json.dumps(score_corpus(entries, restarts=4, seed=5).to_json_dict())
    second = json.dumps(score_corpus(entries, restarts=4, seed=5).to_json_dict())
    assert first == second


def test_json_shape():
    report = score_corpus([(FULL, FULL)], restarts=4, seed=9)
    payload = report.to_json_dict()
    assert set(payload) == {"smatch", "fields", "ifr", "n_pairs", "seed", "restarts"}
    assert set(payload["smatch"]) == {"precision", "recall", "f1"}
    assert set(payload["fields"]) == {"name", "role", "date", "geo", "hisco", "synset"}
    for counts in payload["fields"].values():
        assert set(counts) == {"tp", "fp", "fn", "f1"}
    assert payload["seed"] == 9
    assert payload["restarts"] == 4
    json.dumps(payload)


def test_render_table_mentions_every_field():
    table = score_corpus([(FULL, FULL)]).render_table()
    assert "Smatch" in table and "IFR" in table
    for field in FieldClass:
        assert f"F1-{field.value.capitalize()}" in table


def test_pair_seed_is_stable_arithmetic():
    assert pair_seed(3, 7) == 3 * 1_000_003 + 7
    assert pair_seed(0, 0) == 0


def test_empty_corpus():
    report = score_corpus([])
    assert report.n_pairs == 0
    assert report.ifr == 0.0
    assert report.smatch.f1 == 0.0
