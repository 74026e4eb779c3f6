import hashlib

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from seedtree.addressing import (
    AddressBook,
    depth,
    hash_bit,
    is_ancestor,
    path_node,
    route_child,
)
from conftest import items_with_prefix

items = st.integers(min_value=0, max_value=2**63)
seeds = st.integers(min_value=0, max_value=2**64 - 1)


def test_bits_match_sha512_digest():
    seed, item = 7, 12345
    key = seed.to_bytes(8, "big") + item.to_bytes(8, "big") + (0).to_bytes(8, "big")
    digest = hashlib.sha512(key).digest()
    expected = [(digest[i // 8] >> (7 - i % 8)) & 1 for i in range(64)]
    assert [hash_bit(item, seed, i) for i in range(64)] == expected


def test_bits_continue_into_next_block():
    seed, item = 3, 99
    key = seed.to_bytes(8, "big") + item.to_bytes(8, "big") + (1).to_bytes(8, "big")
    digest = hashlib.sha512(key).digest()
    assert hash_bit(item, seed, 512) == digest[0] >> 7
    assert hash_bit(item, seed, 513) == (digest[0] >> 6) & 1


def test_prefix_001_item():
    (v,) = items_with_prefix([0, 0, 1], seed=11)
    assert [hash_bit(v, 11, i) for i in range(3)] == [0, 0, 1]
    assert [path_node(v, 11, lvl) for lvl in range(4)] == [1, 2, 4, 9]


def test_deterministic():
    assert hash_bit(5, 1, 17) == hash_bit(5, 1, 17)


def test_negative_bit_index_rejected():
    with pytest.raises(ValueError):
        hash_bit(1, 1, -1)


def test_first_bit_is_balanced():
    bits = [hash_bit(v, 2024, 0) for v in range(10_000)]
    assert 0.48 <= np.mean(bits) <= 0.52


@pytest.mark.parametrize("node,bit,child", [(1, 0, 2), (1, 1, 3), (5, 1, 11)])
def test_route_child(node, bit, child):
    assert route_child(node, bit) == child


def test_depth():
    assert [depth(j) for j in (1, 2, 3, 4, 7, 8)] == [0, 1, 1, 2, 2, 3]


@given(items, seeds)
def test_root_on_every_path(item, seed):
    assert path_node(item, seed, 0) == 1


@given(items, seeds, st.integers(0, 40))
def test_path_is_child_chain(item, seed, level):
    here = path_node(item, seed, level)
    nxt = path_node(item, seed, level + 1)
    assert nxt == route_child(here, hash_bit(item, seed, level))
    assert depth(here) == level


@given(items, seeds, st.integers(0, 30), st.integers(0, 30))
def test_prefix_property(item, seed, a, b):
    lo, hi = sorted((a, b))
    assert is_ancestor(path_node(item, seed, lo), path_node(item, seed, hi))


def test_deep_path_beyond_one_block():
    v, seed = 42, 5
    node = 1
    for i in range(520):
        node = route_child(node, hash_bit(v, seed, i))
    assert path_node(v, seed, 520) == node


@pytest.mark.parametrize("level", [1, 3, 5])
def test_path_nodes_uniform_on_level(level):
    nodes = [path_node(v, 99, level) - (1 << level) for v in range(10_000)]
    counts = np.bincount(nodes, minlength=1 << level)
    assert stats.chisquare(counts).pvalue > 0.001


@given(items, st.integers(0, 600))
def test_address_book_agrees(item, i):
    book = AddressBook(17)
    assert book.bit(item, i) == hash_bit(item, 17, i)
    assert book.node(item, min(i, 530)) == path_node(item, 17, min(i, 530))


def test_address_book_rejects_unknown_hash():
    with pytest.raises(ValueError):
        AddressBook(1, algorithm="no-such-hash")
