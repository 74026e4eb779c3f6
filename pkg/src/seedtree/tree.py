"""The self-adjusting tree: capacity-c nodes, local routing, move-to-root and
randomized push-down.

Each node keeps ``c + 1`` slots.  Slot ``c`` is only ever occupied while an
access is in progress (the overfilled root, or an intermediate node that has
received an item but not yet handed one down).  Items keep their slot unless
they move, which keeps the membership-matching export stable.
"""
from __future__ import annotations

import math
import random
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .addressing import ADDRESS_HASH, AddressBook, depth

_MASK = (1 << 64) - 1


class CorruptedStateError(RuntimeError):
    """Raised when the tree state contradicts hash-path residency or a
    reversal fails to restore the pre-attempt state."""


def _pair_hash(node: int, item: int) -> int:
    # tuple hashing of ints is not salted, so this is stable across processes
    return hash((node, item)) & _MASK


def level_quota(capacity: int, occupancy: float, level: int) -> int:
    """Initial item count of ``level``: floor(c * f * 2**level)."""
    # epsilon guards values like 0.3 * 10 landing just below an integer
    return math.floor(capacity * occupancy * (1 << level) + 1e-9)


@dataclass(frozen=True)
class AccessRecord:
    item: int
    level_found: int
    access_cost: int
    move_up_cost: int
    push_down_attempts: int
    reconfig_cost: int
    total_cost: int
    # cost if reversals of failed attempts were free
    reconfig_uncharged: int = 0
    terminal_node: Optional[int] = None

    @classmethod
    def from_attempts(cls, item: int, level: int, attempts: int, terminal: Optional[int] = None) -> "AccessRecord":
        if level == 0:
            return cls(item, 0, 0, 0, 0, 0, 0, 0, terminal)
        reconfig = level + (attempts - 1) * 2 * level + level
        return cls(
            item=item,
            level_found=level,
            access_cost=level,
            move_up_cost=level,
            push_down_attempts=attempts,
            reconfig_cost=reconfig,
            total_cost=level + reconfig,
            reconfig_uncharged=2 * level,
            terminal_node=terminal,
        )


@dataclass
class InitReport:
    quotas: dict[int, int]
    counts: dict[int, int]
    target: dict[int, int]

    @property
    def met_exactly(self) -> bool:
        levels = set(self.counts) | set(self.target)
        return all(self.counts.get(i, 0) == self.target.get(i, 0) for i in levels)

    @property
    def deviations(self) -> dict[int, tuple[int, int]]:
        """level -> (actual, target) for every level that missed its target."""
        levels = sorted(set(self.counts) | set(self.target))
        return {
            i: (self.counts.get(i, 0), self.target.get(i, 0))
            for i in levels
            if self.counts.get(i, 0) != self.target.get(i, 0)
        }


class SeedTree:
    """Mutable tree state.  Single owner; not safe for concurrent mutation."""

    def __init__(
        self,
        capacity: int,
        seed: int,
        occupancy: Optional[float] = None,
        rng: Optional[random.Random] = None,
        algorithm: str = ADDRESS_HASH,
    ):
        if not isinstance(capacity, int) or capacity < 1:
            raise ValueError(f"capacity must be an integer >= 1, got {capacity!r}")
        if occupancy is not None and not 0 < occupancy < 1:
            raise ValueError(f"occupancy must lie in (0, 1), got {occupancy!r}")
        self.capacity = capacity
        self.occupancy = occupancy
        self.seed = seed
        self.addresses = AddressBook(seed, algorithm)
        self.rng = rng if rng is not None else random.Random(f"pushdown:{seed}")
        self.item_locations: dict[int, int] = {}
        self.level_counts: Counter = Counter()
        self.height = 0
        self.init_report: Optional[InitReport] = None
        # observer(item, src, src_slot, dst, dst_slot), called on every single move
        self.on_move: Optional[Callable[[int, int, int, int, int], None]] = None
        self.reversals_checked = 0
        self._slots: dict[int, list[Optional[int]]] = {}
        self._size: dict[int, int] = {}
        self._digest = 0
        self._in_access = False
        self.last_touched: set[int] = set()

    # ------------------------------------------------------------------ build

    @classmethod
    def build(
        cls,
        items: Iterable[int],
        capacity: int,
        occupancy: float,
        seed: int,
        rng: Optional[random.Random] = None,
        algorithm: str = ADDRESS_HASH,
    ) -> "SeedTree":
        """Place ``items`` greedily on their hash paths, respecting per-level
        quotas floor(c * f * 2**i)."""
        items = list(items)
        if not items:
            raise ValueError("items must be non-empty")
        if len(set(items)) != len(items):
            raise ValueError("item ids must be unique")
        tree = cls(capacity, seed, occupancy, rng, algorithm)
        if occupancy is None:
            raise ValueError("occupancy is required")
        if capacity * occupancy < 1:
            warnings.warn(
                f"c*f = {capacity * occupancy:g} < 1: the root starts empty",
                RuntimeWarning,
                stacklevel=2,
            )

        order = list(items)
        random.Random(f"init:{seed}").shuffle(order)
        quotas: dict[int, int] = {}

        def quota(i: int) -> int:
            q = quotas.get(i)
            if q is None:
                q = quotas[i] = level_quota(capacity, occupancy, i)
            return q

        addr = tree.addresses
        for v in order:
            level = 0
            node = 1
            while tree.level_counts[level] >= quota(level) or tree._size.get(node, 0) >= capacity:
                level += 1
                node = addr.node(v, level)
            tree._place(v, node)

        tree.height = max(i for i, n in tree.level_counts.items() if n > 0)
        target: dict[int, int] = {}
        remaining = len(items)
        i = 0
        while remaining > 0:
            t = min(quota(i), remaining)
            if t:
                target[i] = t
            remaining -= t
            i += 1
        tree.init_report = InitReport(
            quotas={i: quota(i) for i in range(tree.height + 1)},
            counts={i: n for i, n in sorted(tree.level_counts.items()) if n},
            target=target,
        )
        return tree

    @classmethod
    def from_placement(
        cls,
        placement: dict[int, Iterable[int]],
        capacity: int,
        seed: int,
        occupancy: Optional[float] = None,
        rng: Optional[random.Random] = None,
        algorithm: str = ADDRESS_HASH,
    ) -> "SeedTree":
        """Build a tree from an explicit node -> items map (fixtures, replays)."""
        tree = cls(capacity, seed, occupancy, rng, algorithm)
        for node, items in sorted(placement.items()):
            for v in items:
                if v in tree.item_locations:
                    raise ValueError(f"item {v} placed twice")
                if tree.addresses.node(v, depth(node)) != node:
                    raise ValueError(f"item {v} is not on the hash path through node {node}")
                tree._place(v, node)
            if tree._size.get(node, 0) > capacity:
                raise ValueError(f"node {node} holds more than {capacity} items")
        if not tree.item_locations:
            raise ValueError("placement is empty")
        tree.height = max(i for i, n in tree.level_counts.items() if n > 0)
        return tree

    # ------------------------------------------------------------- primitives

    def _place(self, item: int, node: int, slot: Optional[int] = None) -> int:
        slots = self._slots.get(node)
        if slots is None:
            slots = self._slots[node] = [None] * (self.capacity + 1)
        if slot is None:
            slot = slots.index(None)
        elif slots[slot] is not None:
            raise CorruptedStateError(f"slot {slot} of node {node} is occupied")
        slots[slot] = item
        self._size[node] = self._size.get(node, 0) + 1
        self.item_locations[item] = node
        self.level_counts[node.bit_length() - 1] += 1
        self._digest = (self._digest + _pair_hash(node, item)) & _MASK
        return slot

    def _move(self, item: int, src: int, dst: int, log: Optional[list] = None,
              s: Optional[int] = None, d: Optional[int] = None) -> None:
        """Move one item between nodes (or slots); the hot path of every access."""
        src_slots = self._slots[src]
        if s is None:
            s = src_slots.index(item)
        elif src_slots[s] != item:
            raise CorruptedStateError(f"item {item} is not in slot {s} of node {src}")
        src_slots[s] = None
        dst_slots = self._slots.get(dst)
        if dst_slots is None:
            dst_slots = self._slots[dst] = [None] * (self.capacity + 1)
        if d is None:
            d = dst_slots.index(None)
        elif dst_slots[d] is not None:
            raise CorruptedStateError(f"slot {d} of node {dst} is occupied")
        dst_slots[d] = item
        if src != dst:
            size = self._size
            size[src] -= 1
            size[dst] = size.get(dst, 0) + 1
            self.item_locations[item] = dst
            ls, ld = src.bit_length() - 1, dst.bit_length() - 1
            if ls != ld:
                lc = self.level_counts
                lc[ls] -= 1
                lc[ld] += 1
            self._digest = (self._digest - _pair_hash(src, item) + _pair_hash(dst, item)) & _MASK
        if log is not None:
            log.append((item, src, s, dst, d))
        if self.on_move is not None:
            self.on_move(item, src, s, dst, d)

    def _compact(self, node: int, log: Optional[list] = None) -> None:
        """Move an item out of the overflow slot once a regular slot frees up."""
        slots = self._slots[node]
        c = self.capacity
        v = slots[c]
        if v is not None and self._size[node] <= c:
            self._move(v, node, node, log, c, slots.index(None))

    def _undo(self, log: list) -> None:
        for item, src, s, dst, d in reversed(log):
            self._move(item, dst, src, None, d, s)

    # ------------------------------------------------------------- operations

    def items_at(self, node: int) -> list[int]:
        slots = self._slots.get(node)
        return [] if slots is None else [v for v in slots if v is not None]

    def slots_at(self, node: int) -> list[Optional[int]]:
        slots = self._slots.get(node)
        return [None] * (self.capacity + 1) if slots is None else list(slots)

    def nodes(self) -> list[int]:
        """Indices of all non-empty nodes, ascending."""
        return sorted(n for n, k in self._size.items() if k)

    def __len__(self) -> int:
        return len(self.item_locations)

    def __contains__(self, item: int) -> bool:
        return item in self.item_locations

    def find(self, item: int) -> tuple[int, int]:
        """Walk from the root along the item's hash bits until the node that
        holds it; returns ``(node, level)``.  Read-only."""
        if item not in self.item_locations:
            raise KeyError(f"item {item} is not in the tree")
        bit = self.addresses.bit
        node = 1
        level = 0
        slots = self._slots
        while True:
            s = slots.get(node)
            if s is not None and item in s:
                return node, level
            if level >= self.height:
                raise CorruptedStateError(
                    f"item {item} not found on its hash path (recorded at node "
                    f"{self.item_locations[item]})"
                )
            node = 2 * node + bit(item, level)
            level += 1

    def access(self, item: int, audit: bool = False) -> AccessRecord:
        """Serve one request: find, move-to-root, push-down with retries.

        With ``audit=True`` every failed attempt's reversal is checked against
        a snapshot of the touched nodes and the state digest.
        """
        node, level = self.find(item)
        self.last_touched = {node}
        if level == 0:
            return AccessRecord.from_attempts(item, 0, 0)

        c = self.capacity
        bit = self.addresses.bit
        randrange = self.rng.randrange
        slots_of = self._slots
        self._in_access = True
        self._move(item, node, 1)
        attempts = 0
        while True:
            attempts += 1
            log: list = []
            if audit:
                before = self._digest
                snap: dict[int, list] = {}
            s = 1
            for d in range(level):
                slots = slots_of[s]
                present = [x for x in slots if x is not None]
                v = present[randrange(len(present))]
                child = 2 * s + bit(v, d)
                if audit:
                    snap.setdefault(s, list(slots))
                    snap.setdefault(child, self.slots_at(child))
                self._move(v, s, child, log)
                self._compact(s, log)
                s = child
            if self._size[s] <= c:
                break
            self._undo(log)
            if audit:
                self._check_reversal(before, snap)
        self._in_access = False
        for entry in log:
            self.last_touched.add(entry[1])
            self.last_touched.add(entry[3])
        return AccessRecord.from_attempts(item, level, attempts, s)

    def _check_reversal(self, before: int, snap: dict[int, list]) -> None:
        if self._digest != before:
            raise CorruptedStateError("digest differs after reversing a failed push-down")
        for n, slots in snap.items():
            if self.slots_at(n) != slots:
                raise CorruptedStateError(f"node {n} not restored after reversal")
        self.reversals_checked += 1

    # ------------------------------------------------------------- inspection

    @property
    def in_access(self) -> bool:
        return self._in_access

    @property
    def overfilled(self) -> bool:
        return any(k > self.capacity for k in self._size.values())

    def level_of(self, item: int) -> int:
        return depth(self.item_locations[item])

    def level_census(self) -> dict[int, int]:
        """Non-zero entries of ``level_counts`` as a plain dict."""
        return {i: k for i, k in sorted(self.level_counts.items()) if k}

    def incremental_digest(self) -> int:
        return self._digest

    def full_fraction(self, max_level: Optional[int] = None) -> float:
        """Fraction of full nodes among all nodes on levels 0..max_level."""
        top = self.height if max_level is None else max_level
        full = sum(
            1 for n, k in self._size.items()
            if k >= self.capacity and n.bit_length() - 1 <= top
        )
        return full / ((1 << (top + 1)) - 1)

    def node_violations(self, nodes: Iterable[int]) -> list[str]:
        """Capacity and residency problems on the given nodes."""
        out = []
        c = self.capacity
        node_of = self.addresses.node
        for n in nodes:
            items = self.items_at(n)
            if len(items) > c:
                out.append(f"node {n} holds {len(items)} > {c} items")
            if self._slots.get(n) is not None and self._slots[n][c] is not None:
                out.append(f"node {n} uses its overflow slot outside an access")
            lvl = depth(n)
            for v in items:
                if node_of(v, lvl) != n:
                    out.append(f"item {v} at node {n} is off its hash path")
                if self.item_locations.get(v) != n:
                    out.append(f"item {v} at node {n} but recorded at {self.item_locations.get(v)}")
        return out

    def violations(self) -> list[str]:
        """Full scan: capacity, residency, bookkeeping and digest consistency."""
        out = self.node_violations(self.nodes())
        counts: Counter = Counter()
        seen = 0
        for n in self.nodes():
            k = len(self.items_at(n))
            counts[depth(n)] += k
            seen += k
            if self._size[n] != k:
                out.append(f"node {n} size cache {self._size[n]} != {k}")
        if seen != len(self.item_locations):
            out.append(f"{seen} placed items but {len(self.item_locations)} locations")
        for v, n in self.item_locations.items():
            if v not in self.items_at(n):
                out.append(f"item {v} recorded at node {n} but absent there")
        if {i: k for i, k in counts.items() if k} != {i: k for i, k in self.level_counts.items() if k}:
            out.append("level_counts disagree with the placement")
        if int(state_digest(self), 16) != self._digest:
            out.append("incremental digest disagrees with a full rescan")
        return out

    def check_invariants(self) -> None:
        problems = self.violations()
        if problems:
            raise CorruptedStateError("; ".join(problems[:5]))

    def placement(self) -> dict[int, list[int]]:
        return {n: self.items_at(n) for n in self.nodes()}


def init(items: Iterable[int], capacity: int, occupancy: float, seed: int, **kwargs) -> SeedTree:
    return SeedTree.build(items, capacity, occupancy, seed, **kwargs)


def state_digest(tree: SeedTree) -> str:
    """Order-independent digest of the node -> item multiset."""
    total = 0
    for n in tree.nodes():
        for v in tree.items_at(n):
            total = (total + _pair_hash(n, v)) & _MASK
    return f"{total:016x}"
