"""Static reference policies: the demand-oblivious tree and the
frequency-optimal static layout."""
from __future__ import annotations

from collections import Counter
from typing import Iterable, Optional

from .metrics import CostLedger, mru_level
from .tree import SeedTree


def frequency_table(trace: Iterable[int]) -> Counter:
    return Counter(trace)


def oblivious_cost(
    trace: Iterable[int],
    capacity: int,
    occupancy: float,
    seed: int,
    items: Optional[Iterable[int]] = None,
    tree: Optional[SeedTree] = None,
) -> CostLedger:
    """Serve ``trace`` on the initial placement without ever reconfiguring.

    ``items`` defaults to the distinct ids of the trace; pass ``tree`` to reuse
    an already-built initial state.
    """
    seq = list(trace)
    if tree is None:
        universe = sorted(set(seq)) if items is None else list(items)
        tree = SeedTree.build(universe, capacity, occupancy, seed)
    level = {v: n.bit_length() - 1 for v, n in tree.item_locations.items()}
    ledger = CostLedger(keep_records=False)
    for v in seq:
        ledger.add_static(level[v])
    return ledger


def static_optimal_cost(trace: Iterable[int], capacity: int) -> int:
    """Cost of the best static layout: items sorted by descending frequency
    (ties by id) fill slots level by level, ignoring hash paths."""
    freq = frequency_table(trace)
    order = sorted(freq, key=lambda v: (-freq[v], v))
    return sum(freq[v] * mru_level(p, capacity) for p, v in enumerate(order, 1))
