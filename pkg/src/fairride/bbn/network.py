"""Dirichlet-count CPTs: building, online updates, prior elicitation, audit I/O.

Every node carries a table of nonnegative pseudo-counts, one row per
parent-state combination, one column per node state. Probabilities are
always row-normalized counts, so the network state IS the count table —
exportable, diffable, and replayable.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from datetime import datetime
from typing import Iterable

import numpy as np

from .spec import NetworkSpec


class InvalidEvidence(ValueError):
    pass


class UnknownPreferenceDimension(ValueError):
    pass


Evidence = dict[str, str]


@dataclass(frozen=True)
class Observation:
    """One accept/decline outcome under a concrete offer context."""

    evidence: Evidence
    outcome: str
    timestamp: datetime


@dataclass(frozen=True)
class FactorAttribution:
    factor: str
    impact: float
    direction: str  # "raises" | "lowers"


@dataclass(frozen=True)
class Preference:
    """A profile-stated lean on one variable, e.g. DestinationCategory=airport."""

    node: str
    state: str
    lean: str = "accept"  # "accept" | "decline"


def validate_evidence(spec: NetworkSpec, evidence: Evidence) -> None:
    for name, state in evidence.items():
        if not spec.has_node(name):
            raise InvalidEvidence(f"evidence references unknown node {name!r}")
        if name == spec.query_node:
            raise InvalidEvidence("evidence must not assign the query node")
        if state not in spec.node(name).states:
            raise InvalidEvidence(f"node {name!r} has no state {state!r}")


@dataclass
class BayesNetwork:
    """A spec plus per-node count tables. Mutating ops return new networks."""

    spec: NetworkSpec
    cpt_counts: dict[str, np.ndarray]
    smoothing: float = 1.0

    def validate(self) -> None:
        for node in self.spec.nodes:
            table = self.cpt_counts[node.name]
            expected = (self.spec.row_count(node.name), len(node.states))
            if table.shape != expected:
                raise ValueError(f"CPT for {node.name!r} has shape {table.shape}, expected {expected}")
            if np.any(table < self.smoothing):
                raise ValueError(f"CPT for {node.name!r} has counts below the smoothing floor")

    def copy(self) -> "BayesNetwork":
        return BayesNetwork(
            spec=self.spec,
            cpt_counts={name: table.copy() for name, table in self.cpt_counts.items()},
            smoothing=self.smoothing,
        )

    def probabilities(self, name: str) -> np.ndarray:
        """Row-normalized CPT for one node."""
        table = self.cpt_counts[name]
        return table / table.sum(axis=1, keepdims=True)

    def total_count(self, name: str) -> float:
        return float(self.cpt_counts[name].sum())

    # -- audit I/O --------------------------------------------------------

    def export_counts(self) -> str:
        """Tabular text dump of every count cell: node, row key, state, count."""
        out = io.StringIO()
        out.write("node\trow\tstate\tcount\n")
        for node in self.spec.nodes:
            table = self.cpt_counts[node.name]
            for row in range(table.shape[0]):
                assignment = self.spec.row_assignment(node.name, row)
                key = "|".join(f"{p}={s}" for p, s in assignment.items()) or "-"
                for col, state in enumerate(node.states):
                    out.write(f"{node.name}\t{key}\t{state}\t{float(table[row, col])!r}\n")
        return out.getvalue()

    def import_counts(self, text: str) -> "BayesNetwork":
        """Load a count dump produced by :meth:`export_counts`."""
        net = self.copy()
        lines = text.strip().splitlines()
        if not lines or lines[0].split("\t") != ["node", "row", "state", "count"]:
            raise ValueError("count table missing header line")
        for lineno, line in enumerate(lines[1:], start=2):
            name, key, state, count = line.split("\t")
            node = self.spec.node(name)
            if key == "-":
                row = 0
            else:
                assignment = dict(part.split("=", 1) for part in key.split("|"))
                row = self.spec.row_index(name, assignment)
            net.cpt_counts[name][row, node.state_index(state)] = float(count)
        net.validate()
        return net


def build_network(spec: NetworkSpec, smoothing: float = 1.0) -> BayesNetwork:
    """Fresh network with every CPT cell at the uniform pseudo-count ``smoothing``."""
    if smoothing <= 0:
        raise ValueError("smoothing must be positive")
    counts = {
        node.name: np.full((spec.row_count(node.name), len(node.states)), float(smoothing))
        for node in spec.nodes
    }
    net = BayesNetwork(spec=spec, cpt_counts=counts, smoothing=float(smoothing))
    net.validate()
    return net


def record_observation(network: BayesNetwork, obs: Observation) -> BayesNetwork:
    """Add one outcome to the query CPT; every other table is untouched.

    Query parents missing from the evidence are imputed as the MAP state
    of their posterior marginal given the evidence (ties to the lowest
    state index), which keeps the update closed-form.
    """
    spec = network.spec
    validate_evidence(spec, obs.evidence)
    q0, q1 = spec.query_states
    if obs.outcome not in (q0, q1):
        raise InvalidEvidence(f"outcome must be {q0!r} or {q1!r}, got {obs.outcome!r}")

    parent_states: dict[str, str] = {}
    for parent in spec.parents(spec.query_node):
        if parent in obs.evidence:
            parent_states[parent] = obs.evidence[parent]
        else:
            parent_states[parent] = _map_state(network, parent, obs.evidence)

    row = spec.row_index(spec.query_node, parent_states)
    col = spec.node(spec.query_node).state_index(obs.outcome)
    updated = network.copy()
    updated.cpt_counts[spec.query_node][row, col] += 1.0
    return updated


def _map_state(network: BayesNetwork, name: str, evidence: Evidence) -> str:
    from .inference import posterior_marginal

    marginal = posterior_marginal(network, name, evidence)
    return network.spec.node(name).states[int(np.argmax(marginal))]


def elicit_priors(
    network: BayesNetwork,
    preferences: Iterable[Preference],
    equivalent_sample_size: float,
    accept_share: float = 0.8,
) -> BayesNetwork:
    """Seed the query CPT with profile-stated leans before any data arrives.

    Each preference adds ``equivalent_sample_size`` of mass to every
    matching query-CPT row, split ``accept_share`` toward the leaned
    outcome. A row matches directly when the preference dimension is a
    query parent; a preference on an indirect ancestor matches rows
    whose mediating parent sits at its MAP state given the preferred
    value. Preferences on nodes with no directed path to the query node
    have nothing to re-weight and are skipped.
    """
    if equivalent_sample_size < 0:
        raise ValueError("equivalent sample size must be nonnegative")
    if not 0.0 < accept_share < 1.0:
        raise ValueError("accept share must sit strictly between 0 and 1")

    spec = network.spec
    updated = network.copy()
    if equivalent_sample_size == 0:
        return updated

    table = updated.cpt_counts[spec.query_node]
    accept_col = spec.node(spec.query_node).state_index(spec.accept_state)
    decline_col = 1 - accept_col

    for pref in preferences:
        if not spec.has_node(pref.node):
            raise UnknownPreferenceDimension(f"profile references unknown dimension {pref.node!r}")
        node = spec.node(pref.node)
        if pref.state not in node.states:
            raise UnknownPreferenceDimension(f"{pref.node!r} has no state {pref.state!r}")
        if pref.lean not in ("accept", "decline"):
            raise ValueError(f"preference lean must be accept or decline, got {pref.lean!r}")

        matchers = _row_matchers(network, pref)
        if not matchers:
            continue
        lean_col = accept_col if pref.lean == "accept" else decline_col
        other_col = decline_col if pref.lean == "accept" else accept_col
        lean_mass = accept_share * equivalent_sample_size
        other_mass = equivalent_sample_size - lean_mass  # row sum grows by exactly ESS
        for row in range(table.shape[0]):
            assignment = spec.row_assignment(spec.query_node, row)
            if all(assignment[parent] == state for parent, state in matchers):
                table[row, lean_col] += lean_mass
                table[row, other_col] += other_mass

    return updated


def _row_matchers(network: BayesNetwork, pref: Preference) -> list[tuple[str, str]]:
    """(parent, state) constraints a query-CPT row must satisfy to match ``pref``."""
    spec = network.spec
    query_parents = spec.parents(spec.query_node)
    if pref.node in query_parents:
        return [(pref.node, pref.state)]
    matchers = []
    for parent in query_parents:
        if pref.node in spec.ancestors(parent):
            matchers.append((parent, _map_state(network, parent, {pref.node: pref.state})))
    return matchers
