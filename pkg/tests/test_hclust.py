from __future__ import annotations

import json

import numpy as np
import pytest

from canopymap.errors import EmptyInput, RangeError, UnknownLeaf, UnknownNode
from canopymap.hclust import (
    cut_k,
    dendrogram_from_dict,
    dendrogram_to_dict,
    hops_from_leaf,
    lca_hops,
    load_dendrogram,
    subtree_cut,
    ward_dendrogram,
    write_dendrogram,
)

from conftest import balanced_tree, load_schema
from oracles import engine_tree_map, naive_ward_tree


class TestWardDendrogram:
    def test_two_points_merge_at_euclidean_distance(self):
        d = ward_dendrogram(np.array([[0.0, 0.0], [3.0, 4.0]]))
        assert d.n_leaves == 2
        assert d.merge_height[d.root_id] == pytest.approx(5.0, abs=1e-12)

    def test_three_points_lance_williams(self):
        # {0,1} merge at 1.0, then the pair joins 10 at sqrt((2*100+2*81-1)/3).
        d = ward_dendrogram(np.array([[0.0], [1.0], [10.0]]))
        heights = sorted(float(h) for h in d.merge_height[3:])
        assert heights[0] == pytest.approx(1.0, abs=1e-12)
        assert heights[1] == pytest.approx(np.sqrt(361.0 / 3.0), abs=1e-12)

    def test_matches_naive_oracle(self, rng):
        points = rng.normal(size=(64, 8))
        d = ward_dendrogram(points)
        expected = naive_ward_tree(points)
        actual = engine_tree_map(d)
        assert set(actual) == set(expected)
        for leafset, height in expected.items():
            assert actual[leafset] == pytest.approx(height, abs=1e-9)

    def test_structure_invariants(self, rng):
        n = 33
        d = ward_dendrogram(rng.normal(size=(n, 3)))
        assert d.n_nodes == 2 * n - 1
        internal = np.arange(n, d.n_nodes)
        assert np.all(d.left[internal] >= 0) and np.all(d.right[internal] >= 0)
        assert np.all(d.leaf_count[internal] == d.leaf_count[d.left[internal]] + d.leaf_count[d.right[internal]])
        assert np.all(d.merge_height[:n] == 0.0)
        assert np.all(d.merge_height[internal] >= 0.0)
        assert sorted(d.leaf_order) == list(range(n))
        # left child always owns the smallest leaf in its subtree
        for v in internal:
            left_leaves = d.leaves_of(int(d.left[v]))
            right_leaves = d.leaves_of(int(d.right[v]))
            assert min(left_leaves) < min(right_leaves)

    def test_leaf_order_is_in_order_traversal(self, rng):
        d = ward_dendrogram(rng.normal(size=(12, 2)))
        order = []

        def walk(node):
            if d.is_leaf(node):
                order.append(node)
                return
            walk(int(d.left[node]))
            walk(int(d.right[node]))

        walk(d.root_id)
        assert order == list(d.leaf_order)

    def test_permutation_invariance(self, rng):
        points = rng.normal(size=(20, 4))
        perm = rng.permutation(20)
        d1 = ward_dendrogram(points)
        d2 = ward_dendrogram(points[perm])
        h1 = sorted(float(h) for h in d1.merge_height[20:])
        h2 = sorted(float(h) for h in d2.merge_height[20:])
        np.testing.assert_allclose(h1, h2, atol=1e-9)
        # Isomorphic up to relabeling: map d2 leaves back through the permutation.
        trees2 = {frozenset(int(perm[v]) for v in leafset): h for leafset, h in engine_tree_map(d2).items()}
        trees1 = engine_tree_map(d1)
        assert set(trees1) == set(trees2)

    def test_single_point(self):
        d = ward_dendrogram(np.array([[1.5, 2.5]]))
        assert d.n_nodes == 1
        assert d.root_id == 0
        assert list(d.leaf_order) == [0]

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            ward_dendrogram(np.zeros((0, 4)))


class TestCuts:
    def test_k1_is_root(self, rng):
        d = ward_dendrogram(rng.normal(size=(9, 2)))
        assert cut_k(d, 1).node_ids == (d.root_id,)

    def test_kn_is_all_leaves(self, rng):
        d = ward_dendrogram(rng.normal(size=(9, 2)))
        assert cut_k(d, 9).node_ids == tuple(range(9))

    def test_balanced_4_leaf_k3(self):
        d = balanced_tree(4)
        cut = cut_k(d, 3)
        depths = sorted(int(d.depth[v]) for v in cut.node_ids)
        assert depths == [1, 2, 2]
        leaves = sorted(int(v) for node in cut.node_ids for v in d.leaves_of(node))
        assert leaves == [0, 1, 2, 3]

    def test_out_of_range(self, rng):
        d = ward_dendrogram(rng.normal(size=(5, 2)))
        with pytest.raises(RangeError):
            cut_k(d, 0)
        with pytest.raises(RangeError):
            cut_k(d, 6)

    def test_refinement_property(self, rng):
        d = ward_dendrogram(rng.normal(size=(40, 3)))
        previous = cut_k(d, 1)
        for k in range(2, 41):
            current = cut_k(d, k)
            gone = set(previous.node_ids) - set(current.node_ids)
            added = set(current.node_ids) - set(previous.node_ids)
            assert len(gone) == 1 and len(added) == 2
            parent = gone.pop()
            assert added == {int(d.left[parent]), int(d.right[parent])}
            previous = current

    def test_cuts_partition_leaves(self, rng):
        d = ward_dendrogram(rng.normal(size=(23, 4)))
        for k in (1, 2, 7, 23):
            cut = cut_k(d, k)
            assert len(cut.node_ids) == k
            leaves = [int(v) for node in cut.node_ids for v in d.leaves_of(node)]
            assert sorted(leaves) == list(range(23))

    def test_subtree_cut_at_root_matches_cut_k(self, rng):
        d = ward_dendrogram(rng.normal(size=(16, 2)))
        assert subtree_cut(d, d.root_id, 5) == cut_k(d, 5)

    def test_subtree_cut_of_leaf(self, rng):
        d = ward_dendrogram(rng.normal(size=(6, 2)))
        assert subtree_cut(d, 3, 1).node_ids == (3,)

    def test_subtree_cut_balanced_8(self):
        d = balanced_tree(8)
        left = int(d.left[d.root_id])
        cut = subtree_cut(d, left, 2)
        assert set(cut.node_ids) == {int(d.left[left]), int(d.right[left])}

    def test_subtree_cut_errors(self, rng):
        d = ward_dendrogram(rng.normal(size=(6, 2)))
        with pytest.raises(UnknownNode):
            subtree_cut(d, 99, 1)
        with pytest.raises(RangeError):
            subtree_cut(d, 0, 2)  # a leaf holds only one cluster


class TestLcaHops:
    def test_same_leaf_is_zero(self, rng):
        d = ward_dendrogram(rng.normal(size=(7, 2)))
        assert lca_hops(d, 4, 4) == 0

    def test_siblings_one_hop(self):
        d = ward_dendrogram(np.array([[0.0], [1.0], [50.0]]))
        assert lca_hops(d, 0, 1) == 1
        assert lca_hops(d, 1, 0) == 1

    def test_asymmetric_three_leaf_chain(self):
        # ((a,b),c): two hops from a to the root, one from c.
        d = ward_dendrogram(np.array([[0.0], [1.0], [50.0]]))
        assert lca_hops(d, 0, 2) == 2
        assert lca_hops(d, 2, 0) == 1

    def test_bounded_by_depth(self, rng):
        d = ward_dendrogram(rng.normal(size=(20, 3)))
        for i in range(20):
            for j in range(20):
                hops = lca_hops(d, i, j)
                assert hops <= int(d.depth[i])
                assert (hops == 0) == (i == j)

    def test_hops_from_leaf_matches_pairwise(self, rng):
        d = ward_dendrogram(rng.normal(size=(15, 2)))
        for i in range(15):
            row = hops_from_leaf(d, i)
            assert [int(v) for v in row] == [lca_hops(d, i, j) for j in range(15)]

    def test_unknown_leaf(self, rng):
        d = ward_dendrogram(rng.normal(size=(5, 2)))
        with pytest.raises(UnknownLeaf):
            lca_hops(d, 0, 5)


class TestSerialization:
    def test_round_trip(self, tmp_path, rng):
        d = ward_dendrogram(rng.normal(size=(11, 3)))
        path = tmp_path / "dendrogram.json"
        write_dendrogram(d, path)
        loaded = load_dendrogram(path)
        np.testing.assert_array_equal(loaded.parent, d.parent)
        np.testing.assert_array_equal(loaded.left, d.left)
        np.testing.assert_array_equal(loaded.leaf_order, d.leaf_order)
        np.testing.assert_allclose(loaded.merge_height, d.merge_height, rtol=0, atol=0)

    def test_nested_shape(self, rng):
        d = ward_dendrogram(rng.normal(size=(4, 2)))
        doc = dendrogram_to_dict(d)
        assert doc["root"]["leaf_count"] == 4
        assert len(doc["root"]["children"]) == 2
        stack = [doc["root"]]
        leaves = 0
        while stack:
            node = stack.pop()
            children = node.get("children")
            if children is None:
                assert node["image_id"] == node["id"]
                assert node["merge_height"] == 0.0
                leaves += 1
            else:
                stack.extend(children)
        assert leaves == 4

    def test_matches_schema(self, rng):
        jsonschema = pytest.importorskip("jsonschema")
        d = ward_dendrogram(rng.normal(size=(6, 2)))
        jsonschema.validate(dendrogram_to_dict(d), load_schema("dendrogram.schema.json"))

    def test_serialization_is_deterministic(self, rng):
        points = rng.normal(size=(9, 2))
        a = json.dumps(dendrogram_to_dict(ward_dendrogram(points)), sort_keys=True)
        b = json.dumps(dendrogram_to_dict(ward_dendrogram(points)), sort_keys=True)
        assert a == b

    def test_rejects_corrupt_document(self):
        one_child = {
            "schema_version": 1,
            "root": {
                "id": 2,
                "leaf_count": 2,
                "merge_height": 1.0,
                "children": [{"id": 0, "leaf_count": 1, "merge_height": 0.0, "image_id": 0}],
            },
        }
        from canopymap.errors import ParseError

        with pytest.raises(ParseError):
            dendrogram_from_dict(one_child)
        with pytest.raises(ParseError):
            dendrogram_from_dict({"schema_version": 99, "root": {}})
