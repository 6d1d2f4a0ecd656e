"""Discrete network structure: nodes, states, edges, and the query node.

A network spec is pure structure. Probability mass lives in the
:class:`~fairride.bbn.network.BayesNetwork` built from it. Specs are
serializable to plain JSON so deployments can audit and version the
structure independently of any learned counts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

MAX_PARENT_COMBOS = 4096


class NetworkSpecError(ValueError):
    """Structural problem in a network spec."""


class CycleDetected(NetworkSpecError):
    pass


class UnknownNode(NetworkSpecError):
    pass


class StateCollision(NetworkSpecError):
    pass


class CptTooLarge(NetworkSpecError):
    pass


@dataclass(frozen=True)
class Node:
    name: str
    states: tuple[str, ...]

    def state_index(self, state: str) -> int:
        try:
            return self.states.index(state)
        except ValueError:
            raise UnknownNode(f"node {self.name!r} has no state {state!r}") from None


@dataclass(frozen=True)
class NetworkSpec:
    """A validated DAG over discrete variables with one binary query node.

    The first state of the query node is the positive outcome (the one
    whose probability :func:`~fairride.bbn.inference.infer_acceptance`
    returns).
    """

    nodes: tuple[Node, ...]
    edges: tuple[tuple[str, str], ...]
    query_node: str
    _index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)
    _parents: dict[str, tuple[str, ...]] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {n.name: i for i, n in enumerate(self.nodes)})
        self._validate_nodes()
        self._validate_edges()
        parents: dict[str, list[str]] = {n.name: [] for n in self.nodes}
        for parent, child in self.edges:
            parents[child].append(parent)
        # parents kept in node-declaration order so CPT row layout is canonical
        ordered = {
            name: tuple(sorted(ps, key=self._index.__getitem__)) for name, ps in parents.items()
        }
        object.__setattr__(self, "_parents", ordered)
        self._validate_query()
        self._validate_acyclic()
        self._validate_cpt_sizes()

    # -- validation ------------------------------------------------------

    def _validate_nodes(self):
        if len(self._index) != len(self.nodes):
            dupes = [n.name for n in self.nodes if sum(m.name == n.name for m in self.nodes) > 1]
            raise StateCollision(f"duplicate node name(s): {sorted(set(dupes))}")
        for node in self.nodes:
            if len(node.states) < 2:
                raise NetworkSpecError(f"node {node.name!r} needs at least 2 states")
            if len(set(node.states)) != len(node.states):
                raise StateCollision(f"node {node.name!r} has duplicate state labels")

    def _validate_edges(self):
        seen = set()
        for parent, child in self.edges:
            for endpoint in (parent, child):
                if endpoint not in self._index:
                    raise UnknownNode(f"edge ({parent!r}, {child!r}) references unknown node {endpoint!r}")
            if parent == child:
                raise CycleDetected(f"self-loop on {parent!r}")
            if (parent, child) in seen:
                raise NetworkSpecError(f"duplicate edge ({parent!r}, {child!r})")
            seen.add((parent, child))

    def _validate_query(self):
        if self.query_node not in self._index:
            raise UnknownNode(f"query node {self.query_node!r} is not declared")
        if len(self.node(self.query_node).states) != 2:
            raise NetworkSpecError(
                f"query node {self.query_node!r} must be binary, "
                f"got {len(self.node(self.query_node).states)} states"
            )

    def _validate_acyclic(self):
        # Kahn's algorithm; whatever is left after peeling sits on a cycle.
        indegree = {n.name: len(self._parents[n.name]) for n in self.nodes}
        children: dict[str, list[str]] = {n.name: [] for n in self.nodes}
        for parent, child in self.edges:
            children[parent].append(child)
        ready = [name for name, deg in indegree.items() if deg == 0]
        seen = 0
        while ready:
            name = ready.pop()
            seen += 1
            for child in children[name]:
                indegree[child] -= 1
                if indegree[child] == 0:
                    ready.append(child)
        if seen != len(self.nodes):
            cyclic = sorted(name for name, deg in indegree.items() if deg > 0)
            raise CycleDetected(f"edges form a cycle through {cyclic}")

    def _validate_cpt_sizes(self):
        for node in self.nodes:
            combos = 1
            for parent in self.parents(node.name):
                combos *= len(self.node(parent).states)
                if combos > MAX_PARENT_COMBOS:
                    raise CptTooLarge(
                        f"node {node.name!r} has more than {MAX_PARENT_COMBOS} parent-state combinations"
                    )

    # -- lookups ---------------------------------------------------------

    def node(self, name: str) -> Node:
        try:
            return self.nodes[self._index[name]]
        except KeyError:
            raise UnknownNode(f"unknown node {name!r}") from None

    def has_node(self, name: str) -> bool:
        return name in self._index

    def node_order(self, name: str) -> int:
        return self._index[name]

    def parents(self, name: str) -> tuple[str, ...]:
        if name not in self._parents:
            raise UnknownNode(f"unknown node {name!r}")
        return self._parents[name]

    def children(self, name: str) -> tuple[str, ...]:
        self.node(name)
        return tuple(child for parent, child in self.edges if parent == name)

    @property
    def query_states(self) -> tuple[str, str]:
        states = self.node(self.query_node).states
        return states[0], states[1]

    @property
    def accept_state(self) -> str:
        return self.query_states[0]

    def ancestors(self, name: str) -> set[str]:
        out: set[str] = set()
        frontier = list(self.parents(name))
        while frontier:
            cur = frontier.pop()
            if cur not in out:
                out.add(cur)
                frontier.extend(self.parents(cur))
        return out

    def row_count(self, name: str) -> int:
        combos = 1
        for parent in self.parents(name):
            combos *= len(self.node(parent).states)
        return combos

    def row_index(self, name: str, parent_states: dict[str, str]) -> int:
        """Mixed-radix row index for a full assignment of ``name``'s parents."""
        idx = 0
        for parent in self.parents(name):
            node = self.node(parent)
            idx = idx * len(node.states) + node.state_index(parent_states[parent])
        return idx

    def row_assignment(self, name: str, row: int) -> dict[str, str]:
        """Inverse of :meth:`row_index`."""
        out: dict[str, str] = {}
        for parent in reversed(self.parents(name)):
            node = self.node(parent)
            row, state_idx = divmod(row, len(node.states))
            out[parent] = node.states[state_idx]
        return {p: out[p] for p in self.parents(name)}

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "nodes": [{"name": n.name, "states": list(n.states)} for n in self.nodes],
            "edges": [list(e) for e in self.edges],
            "query_node": self.query_node,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkSpec":
        nodes = tuple(Node(d["name"], tuple(d["states"])) for d in data["nodes"])
        edges = tuple((str(a), str(b)) for a, b in data["edges"])
        return cls(nodes=nodes, edges=edges, query_node=data["query_node"])

    @classmethod
    def from_json(cls, text: str) -> "NetworkSpec":
        return cls.from_dict(json.loads(text))

    @classmethod
    def from_file(cls, path: str | Path) -> "NetworkSpec":
        return cls.from_json(Path(path).read_text())
