import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seedtree.baselines import oblivious_cost, static_optimal_cost
from seedtree.metrics import mru_level
from seedtree.tree import init


def test_single_item_root():
    assert oblivious_cost([7, 7, 7], 2, 0.5, 0).total == 0


def test_permutation_costs_initial_levels():
    tree = init(range(31), 2, 0.5, 4)
    perm = list(range(31))
    random.Random(0).shuffle(perm)
    expected = sum(tree.level_of(v) for v in perm)
    ledger = oblivious_cost(perm, 2, 0.5, 4)
    assert ledger.access == expected
    assert ledger.reconfig == 0


def test_static_optimal_examples():
    assert static_optimal_cost([3] * 10, 1) == 0
    assert static_optimal_cost(list("aaaaabbbc"), 1) == 5 * 0 + 3 * 1 + 1 * 1 == 4


def test_static_optimal_uniform_4095():
    per_request = static_optimal_cost(list(range(4095)), 1) / 4095
    exact = sum(i * 2**i for i in range(12)) / 4095
    assert per_request == pytest.approx(exact)
    assert per_request == pytest.approx(10.0, abs=0.01)


def test_static_optimal_ties_by_id():
    # b and a tie; a (smaller id) takes the root slot
    assert static_optimal_cost([2, 1], 1) == static_optimal_cost([1, 2], 1) == mru_level(2, 1)


@given(st.lists(st.integers(0, 30), min_size=1, max_size=200), st.integers(1, 8), st.randoms())
def test_static_optimal_permutation_invariant(seq, c, rnd):
    shuffled = list(seq)
    rnd.shuffle(shuffled)
    assert static_optimal_cost(seq, c) == static_optimal_cost(shuffled, c)


def test_static_optimal_beats_oblivious_on_average():
    rng = random.Random(3)
    seq = [min(int(rng.paretovariate(1.2)), 255) for _ in range(3000)]
    universe = list(range(256))
    obl = sum(oblivious_cost(seq, 2, 0.5, s, items=universe).access for s in range(8)) / 8
    assert static_optimal_cost(seq, 2) <= obl
