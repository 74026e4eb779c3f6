"""Encode a tree state as 2 static topological matchings plus ``c`` dynamic
membership matchings, search over them, and diff/apply membership changes.

Dump format, one section per matching::

    [topo-left]
    <parent> <child>
    [topo-right]
    ...
    [membership-0]
    <node> <item>

Nodes are written as fixed-width binary labels (root ``0...01``), items in
decimal.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Union

from .addressing import AddressBook
from .tree import SeedTree

Edge = tuple[int, int]
MatchingId = Union[str, int]


class MatchingError(RuntimeError):
    pass


@dataclass(frozen=True)
class MatchingSet:
    capacity: int
    height: int
    topo_left: frozenset
    topo_right: frozenset
    membership: tuple

    def matchings(self) -> list[frozenset]:
        return [self.topo_left, self.topo_right, *self.membership]

    @cached_property
    def _children(self) -> dict[int, tuple]:
        kids: dict[int, list] = {}
        for p, ch in self.topo_left:
            kids.setdefault(p, [None, None])[0] = ch
        for p, ch in self.topo_right:
            kids.setdefault(p, [None, None])[1] = ch
        return {p: tuple(v) for p, v in kids.items()}

    @cached_property
    def _members(self) -> dict[int, set]:
        out: dict[int, set] = {}
        for m in self.membership:
            for node, item in m:
                out.setdefault(node, set()).add(item)
        return out

    def placement(self) -> dict[int, set]:
        return {n: set(v) for n, v in self._members.items()}

    def validate(self) -> None:
        for ident, m in enumerate(self.membership):
            nodes = [n for n, _ in m]
            items = [v for _, v in m]
            if len(set(nodes)) != len(nodes) or len(set(items)) != len(items):
                raise MatchingError(f"membership-{ident} is not a matching")
        seen: set = set()
        for m in self.membership:
            for _, v in m:
                if v in seen:
                    raise MatchingError(f"item {v} appears in two membership matchings")
                seen.add(v)
        for p, ch in self.topo_left:
            if ch != 2 * p:
                raise MatchingError(f"bad left edge {(p, ch)}")
        for p, ch in self.topo_right:
            if ch != 2 * p + 1:
                raise MatchingError(f"bad right edge {(p, ch)}")


@dataclass
class MatchingDelta:
    removals: list = field(default_factory=list)
    additions: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.removals) + len(self.additions)


def export(tree: SeedTree) -> MatchingSet:
    if tree.in_access or tree.overfilled:
        raise MatchingError("cannot export a tree in transient overfill")
    c = tree.capacity
    inner = range(1, 1 << tree.height)
    left = frozenset((j, 2 * j) for j in inner)
    right = frozenset((j, 2 * j + 1) for j in inner)
    membership: list[set] = [set() for _ in range(c)]
    for n in tree.nodes():
        for k, v in enumerate(tree.slots_at(n)[:c]):
            if v is not None:
                membership[k].add((n, v))
    return MatchingSet(c, tree.height, left, right, tuple(frozenset(m) for m in membership))


def matching_search(ms: MatchingSet, item: int, address: Union[AddressBook, Callable[[int], int]]) -> int:
    """Walk from node 1 along topological edges chosen by the item's address
    bits until a membership edge hosts the item."""
    if isinstance(address, AddressBook):
        book = address
        bit = lambda i: book.bit(item, i)  # noqa: E731
    else:
        bit = address
    node = 1
    level = 0
    members = ms._members
    children = ms._children
    while True:
        if item in members.get(node, ()):
            return node
        kids = children.get(node)
        if kids is None:
            raise MatchingError(f"item {item} not found; walk left the structure at node {node}")
        nxt = kids[bit(level)]
        if nxt is None:
            raise MatchingError(f"missing topological edge out of node {node}")
        node = nxt
        level += 1


def _index(ms: MatchingSet) -> dict[int, tuple[int, int]]:
    out = {}
    for k, m in enumerate(ms.membership):
        for node, item in m:
            out[item] = (k, node)
    return out


def diff(before: MatchingSet, after: MatchingSet) -> list[MatchingDelta]:
    """Per-item membership changes turning ``before`` into ``after``, ordered
    so that ``apply_deltas`` accepts them one at a time.

    A change is emitted once its target edge is free. Items that swap slots
    form cycles; one item of a cycle is parked in the buffer matching (index
    ``capacity``) of its new node until the cycle has unwound.
    """
    if before.topo_left != after.topo_left or before.topo_right != after.topo_right:
        raise MatchingError("topological matchings differ")
    c = before.capacity
    a, b = _index(before), _index(after)
    pending = {}
    for item in sorted(set(a) | set(b)):
        if a.get(item) != b.get(item):
            pending[item] = (a.get(item), b.get(item))
    occupied = {kn: item for item, kn in a.items()}
    deltas = []

    def emit(item, old, new):
        d = MatchingDelta()
        if old is not None:
            d.removals.append((old[0], (old[1], item)))
            del occupied[old]
        if new is not None:
            d.additions.append((new[0], (new[1], item)))
            occupied[new] = item
        deltas.append(d)

    while pending:
        progress = False
        for item in list(pending):
            old, new = pending[item]
            if new is None or new not in occupied:
                emit(item, old, new)
                del pending[item]
                progress = True
        if progress:
            continue
        # every remaining target is held by another pending item: break a cycle
        for item, (old, new) in pending.items():
            park = (c, new[1])
            if park not in occupied:
                emit(item, old, park)
                pending[item] = (park, new)
                break
        else:
            raise MatchingError("no applicable order for the membership changes")
    return deltas


def move_delta(item: int, src: int, src_slot: int, dst: int, dst_slot: int) -> MatchingDelta:
    """Delta of a single item move: one removal plus one addition."""
    return MatchingDelta([(src_slot, (src, item))], [(dst_slot, (dst, item))])


def apply_deltas(ms: MatchingSet, deltas: Iterable[MatchingDelta]) -> MatchingSet:
    """Apply deltas in order, checking the matching property after each one.

    Index ``capacity`` is accepted as a transient buffer matching (the
    overfilled-node slot); it must be empty once all deltas are applied.
    """
    c = ms.capacity
    mem = [set(m) for m in ms.membership] + [set()]
    node_busy = [{n for n, _ in m} for m in mem]
    item_at: dict[int, int] = {v: k for k, m in enumerate(mem) for _, v in m}
    for d in deltas:
        for k, edge in d.removals:
            if edge not in mem[k]:
                raise MatchingError(f"removal of absent edge {edge} from membership-{k}")
            mem[k].remove(edge)
            node_busy[k].discard(edge[0])
            del item_at[edge[1]]
        for k, edge in d.additions:
            if k > c:
                raise MatchingError(f"membership index {k} out of range")
            node, item = edge
            if node in node_busy[k]:
                raise MatchingError(f"node {node} matched twice in membership-{k}")
            if item in item_at:
                raise MatchingError(f"item {item} matched twice")
            mem[k].add(edge)
            node_busy[k].add(node)
            item_at[item] = k
    if mem[c]:
        raise MatchingError("buffer matching not empty after applying deltas")
    return MatchingSet(c, ms.height, ms.topo_left, ms.topo_right, tuple(frozenset(m) for m in mem[:c]))


def _label(node: int, width: int) -> str:
    return format(node, f"0{width}b")


def dumps(ms: MatchingSet) -> str:
    width = ms.height + 1
    out = ["[topo-left]"]
    out += [f"{_label(p, width)} {_label(ch, width)}" for p, ch in sorted(ms.topo_left)]
    out.append("[topo-right]")
    out += [f"{_label(p, width)} {_label(ch, width)}" for p, ch in sorted(ms.topo_right)]
    for k, m in enumerate(ms.membership):
        out.append(f"[membership-{k}]")
        out += [f"{_label(n, width)} {v}" for n, v in sorted(m)]
    return "\n".join(out) + "\n"


def loads(text: str) -> MatchingSet:
    sections: dict[str, set] = {}
    current = None
    width = 1
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            sections.setdefault(current, set())
            continue
        if current is None:
            raise MatchingError(f"line {lineno}: edge outside a section")
        parts = line.split()
        if len(parts) != 2:
            raise MatchingError(f"line {lineno}: expected two fields")
        width = max(width, len(parts[0]))
        u = int(parts[0], 2)
        v = int(parts[1], 2) if current.startswith("topo") else int(parts[1])
        sections[current].add((u, v))
    members = sorted(
        (int(name.split("-", 1)[1]), edges)
        for name, edges in sections.items()
        if name.startswith("membership-")
    )
    if [k for k, _ in members] != list(range(len(members))):
        raise MatchingError("membership sections must be numbered 0..c-1")
    return MatchingSet(
        capacity=len(members),
        height=width - 1,
        topo_left=frozenset(sections.get("topo-left", ())),
        topo_right=frozenset(sections.get("topo-right", ())),
        membership=tuple(frozenset(e) for _, e in members),
    )
