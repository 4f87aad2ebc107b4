import numpy as np
import pytest
from hypothesis import given, strategies as st

from cycloc import gf2
from cycloc.cyclic import encode, puncture_generator, punctured_zeros, support_sets
from cycloc.ordering import (Chain, OrderingError, apply_order, enumerate_chains, gamma_order,
                             identity_order, proper_divisors)

from conftest import all_cyclic_codes


def test_fig4_permutation():
    assert gamma_order(16, (4, 8)).perm == (0, 4, 8, 12, 2, 6, 10, 14, 1, 5, 9, 13, 3, 7, 11, 15)


def test_chain_enumeration():
    ch63 = {c.elements for c in enumerate_chains(63)}
    assert {(3, 21), (7, 21), (3, 9), (7,), (3,), (9,), (21,)} <= ch63
    assert (4, 8) in {c.elements for c in enumerate_chains(16)}
    assert (2, 4, 8) in {c.elements for c in enumerate_chains(16)}
    assert [c.elements for c in enumerate_chains(6)] == [(2,), (3,)]
    assert enumerate_chains(7) == []
    for c in enumerate_chains(63):
        assert all(b % a == 0 for a, b in zip(c.elements, c.elements[1:]))


def test_invalid_chains():
    with pytest.raises(OrderingError):
        Chain(63, (3, 7))
    with pytest.raises(OrderingError):
        Chain(63, (63,))
    with pytest.raises(OrderingError):
        gamma_order(63, (5,))


def test_order_63_7_21():
    perm = gamma_order(63, (7, 21)).perm
    assert set(perm[:7]) == {0, 9, 18, 27, 36, 45, 54}
    # each run of 21 is a length-21 support set made of three length-7 ones
    for j in range(3):
        assert set(perm[21 * j:21 * j + 21]) == set(support_sets(63, 21)[j].indices)


def test_single_level_chain_blocks():
    perm = gamma_order(63, (21,)).perm
    for j, s in enumerate(support_sets(63, 21)):
        assert list(perm[21 * j:21 * (j + 1)]) == s.indices


CHAINS = [(n, c.elements) for n in (12, 16, 30, 36, 63, 105) for c in enumerate_chains(n)]


@pytest.mark.parametrize("n,chain", CHAINS)
def test_block_alignment(n, chain):
    perm = gamma_order(n, chain).perm
    assert sorted(perm) == list(range(n))
    sets = {x: [set(s.indices) for s in support_sets(n, x)] for x in chain}
    for x in chain:
        for j in range(n // x):
            assert set(perm[j * x:(j + 1) * x]) in sets[x]


@given(st.sampled_from(CHAINS), st.data())
def test_apply_inverse_roundtrip(nc, data):
    n, chain = nc
    g = gamma_order(n, chain)
    x = np.asarray(data.draw(st.lists(st.integers(0, 9), min_size=n, max_size=n)))
    assert (apply_order(apply_order(x, g), g, inverse=True) == x).all()
    assert (apply_order(x, g) == x[list(g.perm)]).all()


def test_identity_order():
    g = identity_order(9)
    assert g.perm == tuple(range(9))
    assert (apply_order(np.arange(9), None) == np.arange(9)).all()
    with pytest.raises(OrderingError):
        apply_order(np.arange(8), g)


def test_permuted_codewords_have_contiguous_repair_groups(c63_36, rng):
    g = gamma_order(63, (7, 21))
    words = encode(c63_36, rng.integers(0, 2, (50, c63_36.k)))
    pw = apply_order(words, g)
    assert not (pw.reshape(50, 9, 7).sum(axis=2) % 2).any()


@pytest.mark.parametrize("code", all_cyclic_codes(21, k_max=16) + all_cyclic_codes(45, k_max=16)[:12],
                         ids=repr)
def test_prefix_puncture_dimension(code):
    for ch in enumerate_chains(code.n):
        g = gamma_order(code.n, ch)
        G = apply_order(code.G, g)
        for x in ch.elements:
            assert gf2.rank(G[:, :x]) == x - len(punctured_zeros(code, x))
            assert gf2.rank(G[:, :x]) == gf2.rank(puncture_generator(code.G,
                                                                     support_sets(code.n, x)[0].indices))


def test_proper_divisors():
    assert proper_divisors(63) == [3, 7, 9, 21]
    assert proper_divisors(13) == []
