from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fairride.bbn import NetworkSpec, Node, build_network


@pytest.fixture
def lone_accept_network():
    spec = NetworkSpec(
        nodes=(Node("Accept", ("accept", "decline")),),
        edges=(),
        query_node="Accept",
    )
    return build_network(spec, smoothing=1.0)


@pytest.fixture
def chain_network():
    """A -> Accept with |A| = 3."""
    spec = NetworkSpec(
        nodes=(Node("A", ("a1", "a2", "a3")), Node("Accept", ("accept", "decline"))),
        edges=(("A", "Accept"),),
        query_node="Accept",
    )
    return build_network(spec, smoothing=1.0)


def random_network(rng: np.random.Generator, max_nodes: int = 6, max_states: int = 4):
    """A random DAG network with randomized positive CPT counts."""
    n_nodes = int(rng.integers(2, max_nodes + 1))
    nodes = [Node("Accept", ("accept", "decline"))]
    for i in range(n_nodes - 1):
        n_states = int(rng.integers(2, max_states + 1))
        nodes.append(Node(f"N{i}", tuple(f"s{j}" for j in range(n_states))))
    order = list(rng.permutation(n_nodes))
    edges = []
    for i in range(n_nodes):
        for j in range(i + 1, n_nodes):
            if rng.random() < 0.4:
                edges.append((nodes[order[i]].name, nodes[order[j]].name))
    spec = NetworkSpec(nodes=tuple(nodes), edges=tuple(edges), query_node="Accept")
    net = build_network(spec, smoothing=1.0)
    for name, table in net.cpt_counts.items():
        net.cpt_counts[name] = rng.uniform(0.2, 10.0, size=table.shape) + 1.0
    net.smoothing = 0.2
    return net


def random_evidence(rng: np.random.Generator, net) -> dict[str, str]:
    evidence = {}
    for node in net.spec.nodes:
        if node.name == net.spec.query_node:
            continue
        if rng.random() < 0.5:
            evidence[node.name] = node.states[int(rng.integers(len(node.states)))]
    return evidence
