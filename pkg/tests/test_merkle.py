"""Accumulator checks against an independent full-tree fold."""

import hashlib

import pytest
from hypothesis import given, settings, strategies as st

from crowdlabel.zk.merkle import MerkleTree, TreeFull, zero_levels
from crowdlabel.zk.primitives import hash256, zero_leaf


def scratch_root(leaves: list[bytes], depth: int) -> bytes:
    """Oracle: pad to capacity with zero leaves and fold the whole level."""
    level = list(leaves) + [zero_leaf()] * ((1 << depth) - len(leaves))
    for _ in range(depth):
        level = [hash256(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def leaf(i: int) -> bytes:
    return hashlib.sha256(f"leaf-{i}".encode()).digest()


def test_empty_depth2_root_matches_scratch():
    tree = MerkleTree(depth=2)
    z = zero_leaf()
    expected = hash256(hash256(z + z) + hash256(z + z))
    assert tree.root() == expected
    assert tree.root() == scratch_root([], 2)


@pytest.mark.parametrize("depth", [2, 3, 5])
def test_incremental_equals_scratch(depth):
    tree = MerkleTree(depth=depth)
    leaves = []
    for i in range(1 << depth):
        leaves.append(leaf(i))
        _, root = tree.append(leaf(i))
        assert root == scratch_root(leaves, depth)
        assert tree.root() == root


@settings(max_examples=30, deadline=None)
@given(st.lists(st.binary(min_size=32, max_size=32), min_size=1, max_size=16))
def test_incremental_equals_scratch_random(leaves):
    tree = MerkleTree.from_leaves(leaves, depth=4)
    assert tree.root() == scratch_root(leaves[:16], 4)


def test_paths_verify_after_each_append():
    tree = MerkleTree(depth=4)
    for i in range(10):
        tree.append(leaf(i))
        for j in range(i + 1):
            path = tree.path(j)
            assert path.fold(leaf(j)) == tree.root()


def test_path_invalidated_by_later_append():
    tree = MerkleTree(depth=4)
    tree.append(leaf(0))
    path = tree.path(0)
    old_root = tree.root()
    tree.append(leaf(1))
    assert path.fold(leaf(0)) == old_root
    assert path.fold(leaf(0)) != tree.root()


def test_tree_full():
    tree = MerkleTree(depth=2)
    for i in range(4):
        tree.append(leaf(i))
    with pytest.raises(TreeFull):
        tree.append(leaf(4))


def test_zero_levels_chain():
    zeros = zero_levels(3)
    assert zeros[0] == zero_leaf()
    for i in range(3):
        assert zeros[i + 1] == hash256(zeros[i] + zeros[i])
