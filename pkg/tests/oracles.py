"""Independent reference implementations used to check the engine.

Everything here works by brute force over the full joint distribution —
no variable elimination, no factor algebra — so agreement with the
production path is meaningful.
"""

from __future__ import annotations

import itertools

from fairride.bbn.network import BayesNetwork


def joint_probability(network: BayesNetwork, assignment: dict[str, str]) -> float:
    """P(full assignment) as the product of CPT rows."""
    spec = network.spec
    prob = 1.0
    for node in spec.nodes:
        table = network.cpt_counts[node.name]
        row = spec.row_index(node.name, {p: assignment[p] for p in spec.parents(node.name)})
        row_counts = table[row]
        prob *= row_counts[node.state_index(assignment[node.name])] / row_counts.sum()
    return prob


def enumerate_acceptance(network: BayesNetwork, evidence: dict[str, str]) -> float:
    """P(query = accept | evidence) by summing the whole joint."""
    spec = network.spec
    free = [n for n in spec.nodes if n.name not in evidence]
    accept_mass = 0.0
    total_mass = 0.0
    for states in itertools.product(*(n.states for n in free)):
        assignment = dict(evidence)
        assignment.update({n.name: s for n, s in zip(free, states)})
        p = joint_probability(network, assignment)
        total_mass += p
        if assignment[spec.query_node] == spec.accept_state:
            accept_mass += p
    return accept_mass / total_mass


def enumerate_marginal(network: BayesNetwork, target: str, evidence: dict[str, str]) -> list[float]:
    """P(target | evidence) over the target's states, by joint enumeration."""
    spec = network.spec
    node = spec.node(target)
    masses = []
    for state in node.states:
        ev = dict(evidence)
        ev[target] = state
        free = [n for n in spec.nodes if n.name not in ev]
        mass = 0.0
        for states in itertools.product(*(n.states for n in free)):
            assignment = dict(ev)
            assignment.update({n.name: s for n, s in zip(free, states)})
            mass += joint_probability(network, assignment)
        masses.append(mass)
    total = sum(masses)
    return [m / total for m in masses]
