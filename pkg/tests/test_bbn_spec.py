from __future__ import annotations

import pytest

from fairride.bbn import (
    CptTooLarge,
    CycleDetected,
    NetworkSpec,
    NetworkSpecError,
    Node,
    StateCollision,
    UnknownNode,
)


def make_spec(nodes, edges, query="Accept"):
    return NetworkSpec(nodes=tuple(nodes), edges=tuple(edges), query_node=query)


ACCEPT = Node("Accept", ("accept", "decline"))


class TestValidation:
    def test_minimal_spec_is_valid(self):
        spec = make_spec([ACCEPT], [])
        assert spec.query_states == ("accept", "decline")
        assert spec.parents("Accept") == ()

    def test_cycle_detected(self):
        a = Node("A", ("x", "y"))
        with pytest.raises(CycleDetected):
            make_spec([ACCEPT, a], [("Accept", "A"), ("A", "Accept")])

    def test_self_loop_detected(self):
        with pytest.raises(CycleDetected):
            make_spec([ACCEPT], [("Accept", "Accept")])

    def test_unknown_edge_endpoint(self):
        with pytest.raises(UnknownNode):
            make_spec([ACCEPT], [("Ghost", "Accept")])

    def test_unknown_query_node(self):
        with pytest.raises(UnknownNode):
            make_spec([ACCEPT], [], query="Missing")

    def test_query_must_be_binary(self):
        tri = Node("Q", ("a", "b", "c"))
        with pytest.raises(NetworkSpecError):
            make_spec([tri], [], query="Q")

    def test_duplicate_state_labels(self):
        with pytest.raises(StateCollision):
            make_spec([ACCEPT, Node("A", ("x", "x"))], [])

    def test_duplicate_node_names(self):
        with pytest.raises(StateCollision):
            make_spec([ACCEPT, Node("Accept", ("a", "b"))], [])

    def test_single_state_node_rejected(self):
        with pytest.raises(NetworkSpecError):
            make_spec([ACCEPT, Node("A", ("only",))], [])

    def test_cpt_size_guard(self):
        # 7 binary parents = 128 rows is fine; 13 = 8192 is not
        parents = [Node(f"P{i}", ("0", "1")) for i in range(13)]
        edges = [(p.name, "Accept") for p in parents]
        with pytest.raises(CptTooLarge):
            make_spec([ACCEPT, *parents], edges)
        ok = make_spec([ACCEPT, *parents[:7]], edges[:7])
        assert ok.row_count("Accept") == 128


class TestRowIndexing:
    def test_row_roundtrip(self):
        spec = make_spec(
            [ACCEPT, Node("A", ("a0", "a1", "a2")), Node("B", ("b0", "b1"))],
            [("A", "Accept"), ("B", "Accept")],
        )
        for row in range(spec.row_count("Accept")):
            assignment = spec.row_assignment("Accept", row)
            assert spec.row_index("Accept", assignment) == row

    def test_parents_in_declaration_order(self):
        spec = make_spec(
            [ACCEPT, Node("B", ("b0", "b1")), Node("A", ("a0", "a1"))],
            [("A", "Accept"), ("B", "Accept")],
        )
        assert spec.parents("Accept") == ("B", "A")


class TestSerialization:
    def test_json_roundtrip(self):
        spec = make_spec(
            [ACCEPT, Node("A", ("a0", "a1", "a2"))],
            [("A", "Accept")],
        )
        again = NetworkSpec.from_json(spec.to_json())
        assert again == spec

    def test_to_dict_shape(self):
        spec = make_spec([ACCEPT], [])
        doc = spec.to_dict()
        assert doc["query_node"] == "Accept"
        assert doc["nodes"] == [{"name": "Accept", "states": ["accept", "decline"]}]
