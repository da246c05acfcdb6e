"""Fixed-depth append-only Merkle accumulator.

One implementation serves both sides of the trust boundary: workers build
trees over plain dicts, while contracts pass a metered storage view and a
gas-charging hash so every node write and hash lands on the meter. Unfilled
subtrees hash to precomputed per-level zero values.

Node storage keys are namespaced as ("mt", "size") and ("mt", level, index)
so a tree can live inside a contract's storage next to other state.
"""

from __future__ import annotations

from typing import Callable, MutableMapping

from .primitives import hash256, zero_leaf

DEFAULT_DEPTH = 16

SIZE_KEY = ("mt", "size")


class TreeFull(Exception):
    pass


def zero_levels(depth: int, hash_fn: Callable[[bytes], bytes] = hash256) -> list[bytes]:
    """zero_levels[i] = hash of an empty subtree of height i (0 = leaf)."""
    levels = [zero_leaf()]
    for _ in range(depth):
        z = levels[-1]
        levels.append(hash_fn(z + z))
    return levels


class MerklePath:
    """Bottom-up sibling path for one leaf."""

    __slots__ = ("leaf_index", "siblings")

    def __init__(self, leaf_index: int, siblings: list[bytes]):
        self.leaf_index = leaf_index
        self.siblings = siblings

    def fold(self, leaf: bytes, hash_fn: Callable[[bytes], bytes] = hash256) -> bytes:
        node = leaf
        index = self.leaf_index
        for sibling in self.siblings:
            if index & 1:
                node = hash_fn(sibling + node)
            else:
                node = hash_fn(node + sibling)
            index >>= 1
        return node


class MerkleTree:
    """Append-only tree of capacity 2**depth over a dict-like node store.

    Only nodes on appended paths are materialized; everything else reads as
    the zero value for its level. Pass precomputed `zeros` to skip the
    zero-level hashing (contracts cache them at deploy time).
    """

    def __init__(
        self,
        depth: int = DEFAULT_DEPTH,
        store: MutableMapping | None = None,
        hash_fn: Callable[[bytes], bytes] = hash256,
        zeros: list[bytes] | None = None,
    ):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self.depth = depth
        self.hash_fn = hash_fn
        self.store = store if store is not None else {}
        self.zeros = zeros if zeros is not None else zero_levels(depth, hash_fn)
        if SIZE_KEY not in self.store:
            self.store[SIZE_KEY] = 0

    @property
    def size(self) -> int:
        return self.store[SIZE_KEY]

    @property
    def capacity(self) -> int:
        return 1 << self.depth

    def node(self, level: int, index: int) -> bytes:
        return self.store.get(("mt", level, index), self.zeros[level])

    def root(self) -> bytes:
        return self.node(self.depth, 0)

    def leaf(self, index: int) -> bytes:
        if index >= self.size:
            raise IndexError(f"leaf {index} not appended yet")
        return self.node(0, index)

    def leaves(self) -> list[bytes]:
        return [self.node(0, i) for i in range(self.size)]

    def append(self, leaf: bytes) -> tuple[int, bytes]:
        """Insert at the next free slot; returns (leaf_index, new_root)."""
        index = self.size
        if index >= self.capacity:
            raise TreeFull(f"tree at capacity {self.capacity}")
        self.store[("mt", 0, index)] = leaf
        node = leaf
        pos = index
        for level in range(1, self.depth + 1):
            sibling = self.node(level - 1, pos ^ 1)
            if pos & 1:
                node = self.hash_fn(sibling + node)
            else:
                node = self.hash_fn(node + sibling)
            pos >>= 1
            self.store[("mt", level, pos)] = node
        self.store[SIZE_KEY] = index + 1
        return index, node

    def path(self, leaf_index: int) -> MerklePath:
        if leaf_index >= self.size:
            raise IndexError(f"leaf {leaf_index} not appended yet")
        siblings = []
        pos = leaf_index
        for level in range(self.depth):
            siblings.append(self.node(level, pos ^ 1))
            pos >>= 1
        return MerklePath(leaf_index, siblings)

    @classmethod
    def from_leaves(cls, leaves: list[bytes], depth: int = DEFAULT_DEPTH) -> "MerkleTree":
        tree = cls(depth)
        for leaf in leaves:
            tree.append(leaf)
        return tree
