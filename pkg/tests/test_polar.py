import itertools

import numpy as np
import pytest

from polarwire.channels import bec, bsc
from polarwire.gf2 import BitVector, mat_vec_mul, polar_generator
from polarwire.polar import (BeliefPair, belief_combine_f, belief_combine_g,
                             channel_evidence_arrays, combined_channel_table,
                             exact_combined_prob, exact_split_table,
                             matrix_form_prob, polar_encode,
                             split_channel_evidence)


def all_outputs(channel, n):
    return itertools.product(range(channel.num_outputs), repeat=n)


def y_index(y, m):
    idx = 0
    for d in y:
        idx = idx * m + d
    return idx


def test_polar_encode_examples():
    assert polar_encode(np.zeros(8, dtype=np.uint8)).tolist() == [0] * 8
    assert polar_encode([0, 0, 0, 1]).tolist() == [1, 1, 1, 1]
    assert polar_encode([0, 1, 0, 0]).tolist() == [1, 0, 1, 0]
    out = polar_encode(BitVector([0, 1, 0, 0]))
    assert isinstance(out, BitVector) and out == BitVector([1, 0, 1, 0])
    with pytest.raises(ValueError):
        polar_encode([0, 1, 0])


@pytest.mark.parametrize("n", [1, 2, 4, 8])
def test_encoder_matches_matrix_exhaustive(n):
    g = polar_generator(n)
    for bits in itertools.product((0, 1), repeat=n):
        w = BitVector(bits)
        assert polar_encode(w) == mat_vec_mul(w, g)


def test_encoder_matches_matrix_random_n16():
    rng = np.random.default_rng(3)
    g = polar_generator(16)
    for _ in range(100):
        w = BitVector(rng.integers(0, 2, 16))
        assert polar_encode(w) == mat_vec_mul(w, g)


def test_exact_combined_prob_base_case():
    c = bsc(0.3)
    assert exact_combined_prob(c, [0], [1]) == pytest.approx(0.3, abs=1e-15)
    assert exact_combined_prob(c, [1], [1]) == pytest.approx(0.7, abs=1e-15)


def test_exact_combined_prob_two_uses_factorizes():
    c = bec(0.4)
    for w in itertools.product((0, 1), repeat=2):
        for y in all_outputs(c, 2):
            p = exact_combined_prob(c, w, y)
            expect = c.transition[w[0] ^ w[1], y[0]] * c.transition[w[1], y[1]]
            assert p == pytest.approx(expect, abs=1e-15)


@pytest.mark.parametrize("channel", [bec(0.5), bsc(0.3)])
@pytest.mark.parametrize("n", [2, 4])
def test_recursion_equals_matrix_form(channel, n):
    worst = 0.0
    for w in itertools.product((0, 1), repeat=n):
        for y in all_outputs(channel, n):
            rec = exact_combined_prob(channel, w, y)
            direct = matrix_form_prob(channel, w, y)
            worst = max(worst, abs(rec - direct))
    assert worst <= 1e-12


def test_exact_combined_prob_refuses_oversize():
    with pytest.raises(ValueError):
        exact_combined_prob(bec(0.5), [0] * 16, [0] * 16)


def test_combined_channel_table_consistency():
    c = bec(0.5)
    table = combined_channel_table(c, 4)
    assert table.shape == (16, 81)
    # every row is a probability law over output vectors
    assert np.allclose(table.sum(axis=1), 1.0, atol=1e-12)
    # spot-check against the recursion
    for w_idx in (0, 5, 9):
        w = [(w_idx >> (3 - k)) & 1 for k in range(4)]
        for y in ((0, 1, 2, 0), (2, 2, 2, 2)):
            assert table[w_idx, y_index(y, 3)] == pytest.approx(
                exact_combined_prob(c, w, y), abs=1e-12)


def test_split_table_base_case_is_channel():
    c = bsc(0.25)
    st = exact_split_table(c, 1, 0)
    assert np.allclose(st.probs[:, 0, :], c.transition)


def test_split_table_second_index_formula():
    # the even split at n=2: half the product of the pair, prefix known
    c = bec(0.5)
    st = exact_split_table(c, 2, 1)
    for w1 in (0, 1):
        for x in (0, 1):
            for y in all_outputs(c, 2):
                expect = 0.5 * c.transition[w1 ^ x, y[0]] * c.transition[x, y[1]]
                got = st.probs[x, w1, y_index(y, 3)]
                assert got == pytest.approx(expect, abs=1e-15)


def test_split_table_bhattacharyya_matches_bec_recursion():
    c = bec(0.5)
    expect = [0.9375, 0.5625, 0.4375, 0.0625]
    for l in range(4):
        st = exact_split_table(c, 4, l)
        assert st.bhattacharyya() == pytest.approx(expect[l], abs=1e-9)


def test_split_table_refuses_oversize():
    with pytest.raises(ValueError):
        exact_split_table(bec(0.5), 16, 0)


@pytest.mark.parametrize("channel,cap", [(bec(0.5), 0.5), (bsc(0.3), None)])
@pytest.mark.parametrize("n", [2, 4])
def test_split_chain_rule(channel, cap, n):
    from polarwire.channels import capacity
    total = sum(exact_split_table(channel, n, l).mutual_info() for l in range(n))
    assert total == pytest.approx(n * capacity(channel), abs=1e-9)


def test_belief_combine_examples():
    erased = BeliefPair(0.5, 0.5)
    sure0 = BeliefPair(1.0, 0.0)
    # symmetric evidence stays symmetric through f
    out = belief_combine_f(erased, BeliefPair(0.9, 0.1))
    assert out.pr0 == pytest.approx(out.pr1)
    # g with one side erased keeps the other side's decision
    out = belief_combine_g(erased, sure0, 1)
    assert out.pr1 == 0.0 and out.pr0 > 0.0
    # two sure-zero inputs are decisively zero after f
    out = belief_combine_f(sure0, sure0)
    assert out.pr0 == pytest.approx(0.5) and out.pr1 == 0.0
    assert out.decide() == 0


def test_belief_combine_floor():
    out = belief_combine_f(BeliefPair(1.0, 0.0), BeliefPair(1.0, 0.0), floor=1e-300)
    assert out.pr1 == 1e-300


def test_belief_pair_validation():
    with pytest.raises(ValueError):
        BeliefPair(-0.1, 0.5)
    with pytest.raises(ValueError):
        belief_combine_g(BeliefPair(1, 0), BeliefPair(1, 0), u=2)
    assert BeliefPair(0.0, 0.0).normalized() == BeliefPair(0.5, 0.5)


@pytest.mark.parametrize("channel", [bec(0.5), bsc(0.3)])
@pytest.mark.parametrize("n", [1, 2, 4])
def test_split_evidence_matches_exhaustive_tables(channel, n):
    m = channel.num_outputs
    for l in range(n):
        st = exact_split_table(channel, n, l)
        for y in all_outputs(channel, n):
            pr0, pr1 = channel_evidence_arrays(channel, np.array(y))
            beliefs = [BeliefPair(pr0[i], pr1[i]) for i in range(n)]
            for prefix_bits in itertools.product((0, 1), repeat=l):
                ev = split_channel_evidence(beliefs, l, list(prefix_bits)).normalized()
                prefix_idx = int("".join(map(str, prefix_bits)), 2) if l else 0
                tab = st.evidence(y_index(y, m), prefix_idx).normalized()
                assert ev.pr0 == pytest.approx(tab.pr0, abs=1e-9)
                assert ev.pr1 == pytest.approx(tab.pr1, abs=1e-9)
