"""Exact inference by sum-product variable elimination.

Networks here are small by contract (CPT rows are capped at spec level),
so the priority is determinism: a fixed, memoized elimination order and
a canonical factor axis order make repeated queries bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .network import BayesNetwork, Evidence, FactorAttribution, InvalidEvidence, validate_evidence
from .spec import NetworkSpec


@dataclass(frozen=True)
class _Factor:
    """A table over a sorted tuple of node indices, one axis per variable."""

    scope: tuple[int, ...]
    table: np.ndarray

    def multiply(self, other: "_Factor") -> "_Factor":
        scope = tuple(sorted(set(self.scope) | set(other.scope)))
        return _Factor(scope, self._expand(scope) * other._expand(scope))

    def _expand(self, scope: tuple[int, ...]) -> np.ndarray:
        # insert singleton axes for scope vars we don't carry; broadcasting does the rest
        shape = [1] * len(scope)
        src_axes = {var: axis for axis, var in enumerate(self.scope)}
        table = self.table
        order = [src_axes[var] for var in scope if var in src_axes]
        table = np.transpose(table, order) if order else table.reshape(())
        for axis, var in enumerate(scope):
            if var in src_axes:
                shape[axis] = table.shape[sum(1 for v in scope[:axis] if v in src_axes)]
        return table.reshape(shape)

    def marginalize(self, var: int) -> "_Factor":
        axis = self.scope.index(var)
        scope = self.scope[:axis] + self.scope[axis + 1 :]
        return _Factor(scope, self.table.sum(axis=axis))


def _node_factor(network: BayesNetwork, name: str, evidence: Evidence) -> _Factor:
    """CPT as a factor over (parents + node), restricted by the evidence."""
    spec = network.spec
    parents = spec.parents(name)
    probs = network.probabilities(name)
    shape = [len(spec.node(p).states) for p in parents] + [len(spec.node(name).states)]
    table = probs.reshape(shape)

    scope_names = list(parents) + [name]
    keep: list[str] = []
    index: list[object] = []
    for var in scope_names:
        if var in evidence:
            index.append(spec.node(var).state_index(evidence[var]))
        else:
            index.append(slice(None))
            keep.append(var)
    table = table[tuple(index)]

    order = sorted(range(len(keep)), key=lambda i: spec.node_order(keep[i]))
    table = np.transpose(table, order)
    scope = tuple(spec.node_order(keep[i]) for i in order)
    return _Factor(scope, np.ascontiguousarray(table, dtype=float))


@lru_cache(maxsize=4096)
def _elimination_order(
    spec: NetworkSpec, observed: frozenset[str], targets: frozenset[str]
) -> tuple[int, ...]:
    """Greedy min-neighbors order over the moralized graph, name tiebreak."""
    hidden = {n.name for n in spec.nodes} - observed - targets
    neighbors: dict[str, set[str]] = {n.name: set() for n in spec.nodes}
    for node in spec.nodes:
        family = [p for p in spec.parents(node.name) if p not in observed]
        if node.name not in observed:
            family.append(node.name)
        for a in family:
            for b in family:
                if a != b:
                    neighbors[a].add(b)

    order: list[int] = []
    remaining = set(hidden)
    while remaining:
        pick = min(remaining, key=lambda name: (len(neighbors[name] & remaining), name))
        remaining.discard(pick)
        adjacent = neighbors[pick] & remaining
        for a in adjacent:
            neighbors[a] |= adjacent - {a}
        order.append(spec.node_order(pick))
    return tuple(order)


def _posterior(network: BayesNetwork, target: str, evidence: Evidence) -> np.ndarray:
    spec = network.spec
    factors = [_node_factor(network, node.name, evidence) for node in spec.nodes]
    order = _elimination_order(spec, frozenset(evidence), frozenset([target]))

    for var in order:
        involved = [f for f in factors if var in f.scope]
        if not involved:
            continue
        product = involved[0]
        for f in involved[1:]:
            product = product.multiply(f)
        factors = [f for f in factors if var not in f.scope] + [product.marginalize(var)]

    result = factors[0]
    for f in factors[1:]:
        result = result.multiply(f)
    target_idx = spec.node_order(target)
    if result.scope != (target_idx,):
        raise AssertionError(f"elimination left scope {result.scope}, wanted ({target_idx},)")
    total = result.table.sum()
    if total <= 0:
        raise InvalidEvidence("evidence has zero probability under the network")
    return result.table / total


def posterior_marginal(network: BayesNetwork, target: str, evidence: Evidence) -> np.ndarray:
    """P(target | evidence) as a vector over the target's states."""
    validate_evidence(network.spec, {k: v for k, v in evidence.items() if k != target})
    if target in evidence:
        raise InvalidEvidence(f"target {target!r} is already observed")
    return _posterior(network, target, evidence)


def infer_acceptance(network: BayesNetwork, evidence: Evidence) -> float:
    """Exact P(query = accept | evidence)."""
    validate_evidence(network.spec, evidence)
    marginal = _posterior(network, network.spec.query_node, evidence)
    accept_idx = network.spec.node(network.spec.query_node).state_index(network.spec.accept_state)
    return float(marginal[accept_idx])


def top_factors(network: BayesNetwork, evidence: Evidence, k: int) -> list[FactorAttribution]:
    """Leave-one-out attribution of the evidence variables.

    impact(v) = |P(accept | evidence) - P(accept | evidence without v)|;
    v "raises" when its presence pushes the probability up. Sorted by
    impact descending, node name ascending on ties.
    """
    if k < 1:
        raise ValueError("k must be positive")
    validate_evidence(network.spec, evidence)
    if not evidence:
        raise InvalidEvidence("factor attribution needs non-empty evidence")

    full = infer_acceptance(network, evidence)
    attributions = []
    for var in evidence:
        rest = {name: state for name, state in evidence.items() if name != var}
        without = infer_acceptance(network, rest)
        delta = full - without
        attributions.append(
            FactorAttribution(
                factor=var,
                impact=abs(delta),
                direction="raises" if delta >= 0 else "lowers",
            )
        )
    attributions.sort(key=lambda a: (-a.impact, a.factor))
    return attributions[: min(k, len(attributions))]
