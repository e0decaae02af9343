"""Degree-sequence DP, stub pairing, and the rejection sampler."""

import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from degwin.degset import parse_degree_set
from degwin.errors import InfeasibleError, MaxAttemptsError, OutOfRangeError
from degwin.sampler import (
    _simple_edges_or_none,
    build_dp,
    edges_for_mu,
    exact_sequence_probability,
    pair_configuration,
    sample_batch,
    sample_degree_sequence,
    sample_simple_graph,
    step_distribution,
    trial_generator,
)

from oracles import enumerate_matchings, enumerate_sequences, enumerate_simple_graphs

FAMILIES = ("1,3", "1,2,3", "0,1,4,5")

# (degrees, n, m) triples that admit plenty of simple graphs.
SAMPLE_CONFIGS = (
    ("1,3", 8, 5),
    ("1,2,3", 9, 7),
    ("0,1,4,5", 10, 6),
    ("1,3,5,7", 10, 9),
)


def _bucket_total(degrees, i, j):
    return sum(
        enumerate_sequences(degrees, i).get(j, {}).values(), Fraction(0)
    )


class TestWeightTable:
    def test_prefix_weights(self):
        ds = parse_degree_set("1,3")
        dp = build_dp(ds, 4, 6)
        assert math.exp(dp.logw[2, 2]) == pytest.approx(1.0, rel=1e-12)
        assert math.exp(dp.logw[4, 6]) == pytest.approx(2.0 / 3.0, rel=1e-12)
        assert dp.feasible

    @pytest.mark.parametrize("spec", FAMILIES)
    def test_matches_enumeration(self, spec):
        ds = parse_degree_set(spec)
        for n in range(2, 7):
            buckets = enumerate_sequences(ds.degrees, n)
            for two_m, table in buckets.items():
                if two_m == 0 or two_m > 16:
                    continue
                dp = build_dp(ds, n, two_m)
                want = float(sum(table.values(), Fraction(0)))
                assert math.exp(dp.logw[n, two_m]) == pytest.approx(want, rel=1e-12)

    def test_parity_infeasible(self):
        with pytest.raises(InfeasibleError, match="sums to"):
            build_dp(parse_degree_set("1,3"), 2, 3)

    def test_argument_validation(self):
        ds = parse_degree_set("1,3")
        with pytest.raises(ValueError, match="n must be"):
            build_dp(ds, 0, 2)
        with pytest.raises(ValueError, match="two_m must be"):
            build_dp(ds, 2, -2)
        with pytest.raises(InfeasibleError, match="exceeds"):
            build_dp(ds, 2, 8)


class TestStepDistribution:
    def test_first_step_marginal(self):
        ds = parse_degree_set("1,3")
        dp = build_dp(ds, 4, 6)
        law = step_distribution(dp, ds, 4, 6)
        assert law[1] == pytest.approx(0.75, rel=1e-12)
        assert law[3] == pytest.approx(0.25, rel=1e-12)

    @pytest.mark.parametrize(
        "spec, two_m", [("1,3", 9), ("1,2,3", 8), ("0,1,4,5", 8)]
    )
    def test_all_states_match_enumeration(self, spec, two_m):
        ds = parse_degree_set(spec)
        n = 5
        dp = build_dp(ds, n, two_m)
        for i in range(1, n + 1):
            for j in range(two_m + 1):
                if not np.isfinite(dp.logw[i, j]):
                    continue
                law = step_distribution(dp, ds, i, j)
                weights = {
                    d: _bucket_total(ds.degrees, i - 1, j - d)
                    / math.factorial(d)
                    for d in ds.degrees
                    if d <= j
                }
                total = sum(weights.values(), Fraction(0))
                for d, w in weights.items():
                    want = float(w / total)
                    assert law.get(d, 0.0) == pytest.approx(want, abs=1e-12)

    def test_domain_errors(self):
        ds = parse_degree_set("1,3")
        dp = build_dp(ds, 4, 6)
        with pytest.raises(OutOfRangeError, match="outside"):
            step_distribution(dp, ds, 0, 6)
        with pytest.raises(OutOfRangeError, match="outside"):
            step_distribution(dp, ds, 4, 7)
        with pytest.raises(InfeasibleError, match="zero weight"):
            step_distribution(dp, ds, 1, 2)


class TestSequenceSampling:
    def test_exact_probability_example(self):
        ds = parse_degree_set("1,3")
        assert exact_sequence_probability(ds, 4, 3, (3, 1, 1, 1)) == Fraction(1, 4)
        total = sum(
            exact_sequence_probability(ds, 4, 3, seq)
            for seq in set(itertools.permutations((3, 1, 1, 1)))
        )
        assert total == 1

    def test_exact_probability_invalid_sequences(self):
        ds = parse_degree_set("1,3")
        assert exact_sequence_probability(ds, 4, 3, (2, 2, 1, 1)) == 0
        assert exact_sequence_probability(ds, 4, 3, (1, 1, 1, 1)) == 0

    def test_exact_probability_guards(self):
        ds = parse_degree_set("1,3")
        with pytest.raises(OutOfRangeError, match="n <= 12"):
            exact_sequence_probability(ds, 13, 7, (1,) * 13)
        with pytest.raises(ValueError, match="length"):
            exact_sequence_probability(ds, 4, 3, (1, 1))

    def test_empirical_frequencies(self):
        ds = parse_degree_set("1,3")
        dp = build_dp(ds, 4, 6)
        rng = trial_generator(12345, 0)
        counts = Counter(
            tuple(sample_degree_sequence(dp, ds, rng)) for _ in range(10_000)
        )
        assert set(counts) == set(itertools.permutations((3, 1, 1, 1)))
        for seq, k in counts.items():
            want = float(exact_sequence_probability(ds, 4, 3, seq))
            assert k / 10_000 == pytest.approx(want, abs=0.02)

    def test_consumes_exactly_one_uniform_block(self):
        ds = parse_degree_set("1,3")
        dp = build_dp(ds, 6, 8)
        rng = trial_generator(9, 1)
        sample_degree_sequence(dp, ds, rng)
        ref = trial_generator(9, 1)
        ref.random(dp.n)
        assert np.array_equal(rng.random(5), ref.random(5))


class TestPairing:
    def test_single_edge(self):
        assert pair_configuration((1, 1), trial_generator(0, 0)) == [(1, 2)]

    def test_single_loop(self):
        assert pair_configuration((2,), trial_generator(0, 0)) == [(1, 1)]

    def test_odd_sum_rejected(self):
        with pytest.raises(ValueError, match="even"):
            pair_configuration((1, 1, 1), trial_generator(0, 0))

    def test_edges_ordered_and_degrees_preserved(self):
        seq = (2, 3, 1, 2)
        edges = pair_configuration(seq, trial_generator(7, 0))
        assert len(edges) == sum(seq) // 2
        deg = [0] * (len(seq) + 1)
        for u, v in edges:
            assert 1 <= u <= v <= len(seq)
            deg[u] += 1
            deg[v] += 1
        assert tuple(deg[1:]) == seq

    def test_matching_counts_star(self):
        # Four vertices with degrees (3,1,1,1): 15 stub matchings, 6 simple.
        matchings = enumerate_matchings([1, 1, 1, 2, 3, 4])
        assert len(matchings) == 15
        simple = [
            m
            for m in matchings
            if all(u != v for u, v in m) and len(set(m)) == len(m)
        ]
        assert len(simple) == 6
        assert set(simple) == {((1, 2), (1, 3), (1, 4))}

    def test_exhaustive_conditional_uniformity(self):
        # All 720 stub permutations of (1,1,2,2): the two simple graphs on
        # that sequence are hit exactly equally often.
        seq = np.array([1, 1, 2, 2])
        hits = Counter()
        for perm in itertools.permutations(range(6)):
            edges = _simple_edges_or_none(seq, np.array(perm), 4)
            if edges is not None:
                hits[frozenset(edges)] += 1
        want = {frozenset(g) for g in enumerate_simple_graphs((1, 1, 2, 2))}
        assert set(hits) == want
        assert len(hits) == 2
        assert len(set(hits.values())) == 1


class TestRejectionSampler:
    @pytest.mark.parametrize("spec, n, m", SAMPLE_CONFIGS)
    def test_sampled_graph_postconditions(self, spec, n, m):
        ds = parse_degree_set(spec)
        g, attempts = sample_simple_graph(ds, n, m, trial_generator(42, 0))
        assert attempts >= 1
        assert g.n == n
        assert len(g.edges) == m
        allowed = set(ds.degrees)
        deg = [0] * (n + 1)
        for u, v in g.edges:
            assert 1 <= u < v <= n
            deg[u] += 1
            deg[v] += 1
        assert len(set(g.edges)) == m
        assert all(d in allowed for d in deg[1:])

    def test_batch_equals_sequential(self):
        ds = parse_degree_set("1,3")
        dp = build_dp(ds, 8, 10)
        rngs = [trial_generator(3, t) for t in range(6)]
        graphs, attempts = sample_batch(ds, dp, rngs)
        for t in range(6):
            g, a = sample_simple_graph(ds, 8, 5, trial_generator(3, t), dp=dp)
            assert g.edges == graphs[t].edges
            assert a == attempts[t]

    def test_no_simple_graph_exists(self):
        # Degrees (3,3,3,1) force a double edge on four vertices.
        ds = parse_degree_set("1,3")
        with pytest.raises(MaxAttemptsError, match="no simple graph"):
            sample_simple_graph(ds, 4, 5, trial_generator(0, 0), max_attempts=64)

    def test_mismatched_table(self):
        ds = parse_degree_set("1,3")
        dp = build_dp(ds, 8, 10)
        with pytest.raises(ValueError, match="table is for"):
            sample_simple_graph(ds, 6, 4, trial_generator(0, 0), dp=dp)

    def test_trial_generator_contract(self):
        got = trial_generator(5, 7, 2).random(4)
        ref = np.random.default_rng(
            np.random.SeedSequence(5, spawn_key=(2, 7))
        ).random(4)
        assert np.array_equal(got, ref)

    @settings(max_examples=20, deadline=None)
    @given(
        config=st.sampled_from(SAMPLE_CONFIGS),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
        trial=st.integers(min_value=0, max_value=50),
    )
    def test_reproducible_and_simple(self, config, seed, trial):
        spec, n, m = config
        ds = parse_degree_set(spec)
        g1, a1 = sample_simple_graph(ds, n, m, trial_generator(seed, trial))
        g2, a2 = sample_simple_graph(ds, n, m, trial_generator(seed, trial))
        assert g1.edges == g2.edges
        assert a1 == a2
        assert len(set(g1.edges)) == m
        assert all(u != v for u, v in g1.edges)


class TestEdgesForMu:
    def test_unconstrained_centre(self):
        m, realized = edges_for_mu(parse_degree_set("all:60"), 1000, 0.0)
        assert m == 500
        assert realized == pytest.approx(0.0, abs=1e-12)

    def test_adjusted_with_warning(self):
        ds = parse_degree_set("1,3")
        with pytest.warns(UserWarning, match="not admissible"):
            m, realized = edges_for_mu(ds, 4, -2.0)
        assert m == 3
        assert realized == pytest.approx(0.0, abs=1e-12)

    def test_too_small_infeasible(self):
        with pytest.raises(InfeasibleError, match="no admissible edge count"):
            edges_for_mu(parse_degree_set("1,3"), 1, 0.0)

    def test_realized_mu_consistent(self):
        from degwin.critical import critical_point

        ds = parse_degree_set("1,3,5,7")
        cp = critical_point(ds)
        m, realized = edges_for_mu(ds, 1000, 0.7)
        want = (m / (cp.alpha * 1000) - 1.0) * 1000.0 ** (1.0 / 3.0)
        assert realized == pytest.approx(want, rel=1e-12)
        assert abs(realized - 0.7) < 0.05
