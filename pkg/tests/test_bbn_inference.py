from __future__ import annotations

import numpy as np
import pytest

from fairride.bbn import (
    InvalidEvidence,
    NetworkSpec,
    Node,
    build_network,
    infer_acceptance,
    posterior_marginal,
    top_factors,
)

from conftest import random_evidence, random_network
from oracles import enumerate_acceptance, enumerate_marginal


def test_uniform_prior_gives_half(lone_accept_network):
    assert infer_acceptance(lone_accept_network, {}) == 0.5


def test_single_row_lookup(chain_network):
    net = chain_network
    row = net.spec.row_index("Accept", {"A": "a1"})
    net.cpt_counts["Accept"][row] = [9.0, 1.0]
    assert infer_acceptance(net, {"A": "a1"}) == pytest.approx(0.9, abs=1e-12)


def test_partial_evidence_matches_enumeration():
    rng = np.random.default_rng(7)
    net = random_network(rng)
    for _ in range(5):
        evidence = random_evidence(rng, net)
        got = infer_acceptance(net, evidence)
        want = enumerate_acceptance(net, evidence)
        assert got == pytest.approx(want, abs=1e-9)


def test_posterior_marginal_matches_enumeration():
    rng = np.random.default_rng(21)
    for _ in range(10):
        net = random_network(rng)
        evidence = random_evidence(rng, net)
        for node in net.spec.nodes:
            if node.name in evidence:
                continue
            got = posterior_marginal(net, node.name, evidence)
            want = enumerate_marginal(net, node.name, evidence)
            assert np.allclose(got, want, atol=1e-9)


def test_invalid_evidence_rejected(chain_network):
    with pytest.raises(InvalidEvidence):
        infer_acceptance(chain_network, {"Ghost": "x"})
    with pytest.raises(InvalidEvidence):
        infer_acceptance(chain_network, {"A": "nope"})
    with pytest.raises(InvalidEvidence):
        infer_acceptance(chain_network, {"Accept": "accept"})


def test_determinism_bit_identical():
    rng = np.random.default_rng(3)
    net = random_network(rng)
    evidence = random_evidence(rng, net)
    first = infer_acceptance(net, evidence)
    for _ in range(5):
        assert infer_acceptance(net, evidence) == first


class TestTopFactors:
    def build_vee(self):
        # A and B both drive Accept; C is disconnected
        spec = NetworkSpec(
            nodes=(
                Node("A", ("a0", "a1")),
                Node("B", ("b0", "b1")),
                Node("C", ("c0", "c1")),
                Node("Accept", ("accept", "decline")),
            ),
            edges=(("A", "Accept"), ("B", "Accept")),
            query_node="Accept",
        )
        net = build_network(spec, smoothing=1.0)
        table = net.cpt_counts["Accept"]
        # rows ordered (A,B): a0b0, a0b1, a1b0, a1b1
        table[:] = [[9.0, 1.0], [8.0, 2.0], [2.0, 8.0], [1.0, 9.0]]
        return net

    def test_single_evidence_variable_is_sole_factor(self):
        net = self.build_vee()
        factors = top_factors(net, {"A": "a0"}, k=3)
        assert [f.factor for f in factors] == ["A"]

    def test_disconnected_variable_has_zero_impact(self):
        net = self.build_vee()
        factors = top_factors(net, {"A": "a0", "C": "c0"}, k=3)
        by_name = {f.factor: f for f in factors}
        assert by_name["C"].impact == pytest.approx(0.0, abs=1e-12)
        assert by_name["A"].impact > 0

    def test_ranking_matches_leave_one_out_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(10):
            net = random_network(rng)
            evidence = random_evidence(rng, net)
            if len(evidence) < 2:
                continue
            factors = top_factors(net, evidence, k=len(evidence))
            full = enumerate_acceptance(net, evidence)
            oracle = {}
            for var in evidence:
                rest = {k: v for k, v in evidence.items() if k != var}
                delta = full - enumerate_acceptance(net, rest)
                oracle[var] = (abs(delta), "raises" if delta >= 0 else "lowers")
            for got in factors:
                want_impact, want_direction = oracle[got.factor]
                assert got.impact == pytest.approx(want_impact, abs=1e-9)
                if got.impact > 1e-9:
                    assert got.direction == want_direction
            # order must agree with the oracle wherever impacts are not tied
            for earlier, later in zip(factors, factors[1:]):
                assert oracle[earlier.factor][0] >= oracle[later.factor][0] - 1e-9

    def test_top_factor_dominates_all_alternatives(self):
        rng = np.random.default_rng(13)
        for _ in range(10):
            net = random_network(rng)
            evidence = random_evidence(rng, net)
            if not evidence:
                continue
            ranked = top_factors(net, evidence, k=len(evidence))
            top = ranked[0]
            for other in ranked[1:]:
                assert top.impact >= other.impact - 1e-12

    def test_k_truncates(self):
        net = self.build_vee()
        factors = top_factors(net, {"A": "a0", "B": "b1", "C": "c0"}, k=2)
        assert len(factors) == 2

    def test_empty_evidence_rejected(self):
        net = self.build_vee()
        with pytest.raises(InvalidEvidence):
            top_factors(net, {}, k=1)
