"""Validation verdicts for every defect kind, with an independent cycle oracle."""

from __future__ import annotations

import random

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphgen import LABELS, random_graph, with_inverse_edges
from tmrkit.core.model import (
    DefectKind,
    Edge,
    Literal,
    NodeRef,
    Relation,
    TmrGraph,
)
from tmrkit.core.parser import parse_tmr
from tmrkit.core.validate import (
    check_tmr,
    normalize_inverse,
    structurally_equal,
    validate,
)

# ---------------------------------------------------------------------------
# one test per defect kind
# ---------------------------------------------------------------------------


def kinds_of(text: str) -> set[DefectKind]:
    return validate(text).kinds()


def test_clean_graph():
    verdict = validate("(t1 / tombstone.n.01 :ent (x1 / male.n.02))")
    assert verdict.well_formed
    assert verdict.verdict == "well-formed"
    assert verdict.defects == ()


def test_parse_failure():
    graph, verdict = check_tmr("(t1 / tombstone.n.01")
    assert graph is None
    assert verdict.kinds() == {DefectKind.PARSE_FAILURE}
    assert verdict.verdict == "ill-formed"


def test_dangling_edge():
    assert kinds_of("(t1 / tombstone.n.01 :ent x9)") == {DefectKind.DANGLING_EDGE}


def test_cycle():
    text = "(a1 / male.n.02 :rol (a2 / husband.n.01 :tgt a1))"
    assert kinds_of(text) == {DefectKind.CYCLE}


def test_self_loop_is_a_cycle():
    assert kinds_of("(t1 / tombstone.n.01 :tgt t1)") == {DefectKind.CYCLE}


def test_duplicate_var():
    text = "(t1 / tombstone.n.01 :ent (x1 / male.n.02) :rol (x1 / husband.n.01))"
    assert kinds_of(text) == {DefectKind.DUPLICATE_VAR}


def test_multiple_roots():
    text = "(t1 / tombstone.n.01) (t2 / tombstone.n.01)"
    assert kinds_of(text) == {DefectKind.MULTIPLE_ROOTS}


def test_bad_concept_format():
    assert kinds_of("(t1 / Tombstone.n.1)") == {DefectKind.BAD_CONCEPT_FORMAT}


def test_bad_relation_format():
    text = "(t1 / tombstone.n.01 :ENT (x1 / male.n.02))"
    assert kinds_of(text) == {DefectKind.BAD_RELATION_FORMAT}


def test_inverse_relation_with_literal_target_is_flagged():
    verdict = validate('(t1 / tombstone.n.01 :nam-of "ANNA")')
    assert verdict.kinds() == {DefectKind.BAD_RELATION_FORMAT}


def test_isolated_node_in_api_built_graph():
    graph = TmrGraph(
        root="t1",
        nodes={"t1": "tombstone.n.01", "x1": "male.n.02"},
        edges=(),
    )
    verdict = validate(graph)
    assert verdict.kinds() == {DefectKind.ISOLATED_NODE}
    assert "x1" in verdict.defects[0].location


def test_undefined_root_in_api_built_graph():
    graph = TmrGraph(root="z9", nodes={"t1": "tombstone.n.01"}, edges=())
    assert DefectKind.DANGLING_EDGE in validate(graph).kinds()


def test_bad_variable_name_in_api_built_graph():
    graph = TmrGraph(root="T1", nodes={"T1": "tombstone.n.01"}, edges=())
    assert DefectKind.BAD_CONCEPT_FORMAT in validate(graph).kinds()


def test_defects_come_in_kind_order():
    text = "(t1 / Tombstone.n.1 :ent x9)"
    kinds = [d.kind for d in validate(text).defects]
    assert kinds == [DefectKind.BAD_CONCEPT_FORMAT, DefectKind.DANGLING_EDGE]


# ---------------------------------------------------------------------------
# reachability and cycles work on the forward-oriented graph
# ---------------------------------------------------------------------------


def test_subtree_hanging_off_an_inverse_edge_is_reachable():
    graph = TmrGraph(
        root="t1",
        nodes={"t1": "tombstone.n.01", "x1": "male.n.02"},
        edges=(Edge("x1", Relation("ent", inverted=True), NodeRef("t1")),),
    )
    assert validate(graph).well_formed


def test_root_whose_only_edge_is_inverse_leaves_child_isolated():
    # Reachability is judged on the forward-oriented graph, so an inverse
    # edge cannot be the sole path from the root into a subtree.
    verdict = validate("(x1 / male.n.02 :ent-of (t1 / tombstone.n.01))")
    assert verdict.kinds() == {DefectKind.ISOLATED_NODE}


def test_forward_edge_into_the_root_leaves_source_isolated():
    graph = TmrGraph(
        root="t1",
        nodes={"t1": "tombstone.n.01", "x1": "male.n.02"},
        edges=(Edge("x1", Relation("ent"), NodeRef("t1")),),
    )
    assert validate(graph).kinds() == {DefectKind.ISOLATED_NODE}


def test_cycle_formed_through_an_inverse_edge():
    graph = TmrGraph(
        root="t1",
        nodes={"t1": "tombstone.n.01", "x1": "male.n.02"},
        edges=(
            Edge("t1", Relation("ent"), NodeRef("x1")),
            Edge("t1", Relation("rol", inverted=True), NodeRef("x1")),
        ),
    )
    assert validate(graph).kinds() == {DefectKind.CYCLE}


def test_cycle_detection_against_networkx():
    rng = random.Random(20260815)
    for _ in range(300):
        graph = random_graph(rng, max_nodes=7)
        if rng.random() < 0.7 and len(graph.nodes) >= 2:
            names = list(graph.nodes)
            extra = Edge(
                rng.choice(names), Relation(rng.choice(LABELS)), NodeRef(rng.choice(names))
            )
            graph = TmrGraph(
                root=graph.root, nodes=graph.nodes, edges=graph.edges + (extra,)
            )
        digraph = nx.DiGraph()
        digraph.add_nodes_from(graph.nodes)
        for edge in graph.edges:
            if isinstance(edge.target, NodeRef):
                pair = (edge.source, edge.target.var)
                if edge.relation.inverted:
                    pair = (pair[1], pair[0])
                digraph.add_edge(*pair)
        expect_cycle = not nx.is_directed_acyclic_graph(digraph)
        got_cycle = DefectKind.CYCLE in validate(graph).kinds()
        assert got_cycle == expect_cycle


# ---------------------------------------------------------------------------
# inverse normalization
# ---------------------------------------------------------------------------


def test_normalize_inverse_flips_in_place():
    graph = TmrGraph(
        root="t1",
        nodes={"t1": "tombstone.n.01", "x1": "male.n.02"},
        edges=(
            Edge("x1", Relation("ent", inverted=True), NodeRef("t1")),
            Edge("t1", Relation("nam"), Literal("ANNA")),
        ),
    )
    flat = normalize_inverse(graph)
    assert flat.edges[0] == Edge("t1", Relation("ent"), NodeRef("x1"))
    assert flat.edges[1] == graph.edges[1]
    assert flat.nodes == graph.nodes and flat.root == graph.root


def test_normalize_inverse_is_idempotent_and_identity_when_clean():
    rng = random.Random(7)
    for _ in range(100):
        graph = with_inverse_edges(random_graph(rng), rng)
        flat = normalize_inverse(graph)
        assert normalize_inverse(flat) is flat
        assert structurally_equal(graph, flat)
    plain = random_graph(rng)
    assert normalize_inverse(plain) is plain


def test_normalize_inverse_rejects_literal_targets():
    graph = TmrGraph(
        root="t1",
        nodes={"t1": "tombstone.n.01"},
        edges=(Edge("t1", Relation("nam", inverted=True), Literal("ANNA")),),
    )
    with pytest.raises(ValueError):
        normalize_inverse(graph)


def test_restating_edges_keeps_graphs_well_formed():
    rng = random.Random(99)
    for _ in range(100):
        graph = random_graph(rng)
        restated = with_inverse_edges(graph, rng)
        assert validate(restated).well_formed


# ---------------------------------------------------------------------------
# structural equality
# ---------------------------------------------------------------------------


def test_structural_equality_ignores_edge_order():
    first = parse_tmr('(t1 / tombstone.n.01 :dom "23" :moy "02")')
    second = TmrGraph(
        root=first.root, nodes=first.nodes, edges=tuple(reversed(first.edges))
    )
    assert structurally_equal(first, second)


def test_structural_equality_detects_value_changes():
    first = parse_tmr('(t1 / tombstone.n.01 :geo "2747409")')
    second = parse_tmr('(t1 / tombstone.n.01 :geo "9999999")')
    third = parse_tmr('(t2 / tombstone.n.01 :geo "2747409")')
    assert not structurally_equal(first, second)
    assert not structurally_equal(first, third)


def test_repeated_identical_edges_count():
    once = parse_tmr('(t1 / tombstone.n.01 :nam "A")')
    twice = parse_tmr('(t1 / tombstone.n.01 :nam "A" :nam "A")')
    assert not structurally_equal(once, twice)


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=80))
def test_validate_is_total_over_text(text):
    verdict = validate(text)
    assert verdict.verdict in ("well-formed", "ill-formed")
