"""Hash-derived item addresses and heap-index navigation.

An item's address is an unbounded bit stream.  Block ``k`` of the stream is
the digest of ``(seed, item, k)``; bits are consumed most-significant first.
Node indices use heap numbering: the root is 1 and node ``j`` has children
``2j`` (bit 0) and ``2j + 1`` (bit 1).
"""
from __future__ import annotations

import hashlib
from functools import lru_cache

ADDRESS_HASH = "sha512"

_U64 = (1 << 64) - 1


def _block_key(item: int, seed: int, block: int) -> bytes:
    if item < 0:
        raise ValueError(f"item ids are unsigned, got {item}")
    return (
        (seed & _U64).to_bytes(8, "big")
        + item.to_bytes(8, "big")
        + block.to_bytes(8, "big")
    )


@lru_cache(maxsize=1 << 16)
def address_block(item: int, seed: int, block: int = 0, algorithm: str = ADDRESS_HASH) -> tuple[int, int]:
    """Return ``(value, nbits)`` for one digest block of an item's address."""
    h = hashlib.new(algorithm, _block_key(item, seed, block))
    digest = h.digest()
    return int.from_bytes(digest, "big"), len(digest) * 8


def hash_bit(item: int, seed: int, i: int, algorithm: str = ADDRESS_HASH) -> int:
    """The ``i``-th bit of the address of ``item`` under ``seed``."""
    if i < 0:
        raise ValueError("bit index must be non-negative")
    _, width = address_block(item, seed, 0, algorithm)
    block, offset = divmod(i, width)
    value, width = address_block(item, seed, block, algorithm)
    return (value >> (width - 1 - offset)) & 1


def route_child(node: int, bit: int) -> int:
    return 2 * node + (1 if bit else 0)


def depth(node: int) -> int:
    if node < 1:
        raise ValueError(f"node index must be >= 1, got {node}")
    return node.bit_length() - 1


def is_ancestor(a: int, b: int) -> bool:
    """True if node ``a`` lies on the root path of node ``b`` (inclusive)."""
    shift = depth(b) - depth(a)
    return shift >= 0 and (b >> shift) == a


def path_node(item: int, seed: int, level: int, algorithm: str = ADDRESS_HASH) -> int:
    """Node at depth ``level`` on the hash path of ``item``."""
    if level < 0:
        raise ValueError("level must be non-negative")
    value, width = address_block(item, seed, 0, algorithm)
    if level <= width:
        return (1 << level) | (value >> (width - level))
    node = 1
    for i in range(level):
        node = route_child(node, hash_bit(item, seed, i, algorithm))
    return node


class AddressBook:
    """Per-tree cache of the first address block of every item seen.

    The hot loops only need the first few dozen bits, so caching one integer
    per item avoids rehashing on every routing step.
    """

    def __init__(self, seed: int, algorithm: str = ADDRESS_HASH):
        hashlib.new(algorithm)  # fail fast on unknown names
        self.seed = seed
        self.algorithm = algorithm
        self._prefix: dict[int, int] = {}
        self._width = hashlib.new(algorithm).digest_size * 8

    def _value(self, item: int) -> int:
        v = self._prefix.get(item)
        if v is None:
            v = int.from_bytes(
                hashlib.new(self.algorithm, _block_key(item, self.seed, 0)).digest(), "big"
            )
            self._prefix[item] = v
        return v

    def bit(self, item: int, i: int) -> int:
        if i < self._width:
            return (self._value(item) >> (self._width - 1 - i)) & 1
        return hash_bit(item, self.seed, i, self.algorithm)

    def node(self, item: int, level: int) -> int:
        if level <= self._width:
            return (1 << level) | (self._value(item) >> (self._width - level))
        return path_node(item, self.seed, level, self.algorithm)

    def __call__(self, item: int, i: int) -> int:
        return self.bit(item, i)
