"""Solid-grammar sampling and prefix-notation parsing."""

from __future__ import annotations

import numpy as np
import pytest

from sketchgraph.csg import (
    DIFFERENCE,
    KIND_PMF,
    KINDS,
    ORIENTATION_PMF,
    ORIENTATIONS,
    PrefixError,
    SCALE_BOUNDS,
    TRANSLATE_HI,
    TRANSLATE_LO,
    UNION,
    parse_prefix,
    sample_csg_tree,
    sample_transformed_primitives,
    scene_from_json,
    scene_to_json,
    serialize,
)


def toks(text: str) -> list[str]:
    return text.split()


# --- parsing -----------------------------------------------------------------

def test_parse_two_leaf_union():
    tree = parse_prefix(toks("∪ 0 1"))
    assert tree.leaf_count == 2
    assert tree.root.op == UNION
    assert tree.root.left.leaf == 0
    assert tree.root.right.leaf == 1


def test_parse_known_shapes():
    # representative grammar strings with one to six leaves
    for text in ("0",
                 "∪ 0 1",
                 "∪ ∪ 1 2 0",
                 "∪ ∪ 2 3 − 0 1",
                 "∪ 5 − ∪ ∪ 2 3 ∪ 4 0 1",
                 "∪ ∪ 2 3 − ∪ 0 1 ∪ 4 5"):
        tree = parse_prefix(toks(text))
        assert tree.prefix == tuple(toks(text))


def test_parse_accepts_ascii_hyphen():
    tree = parse_prefix(toks("- 0 1"))
    assert tree.root.op == DIFFERENCE
    assert tree.prefix == (DIFFERENCE, "0", "1")


def test_parse_missing_operand():
    with pytest.raises(PrefixError, match="end of tokens"):
        parse_prefix(toks("∪ 0"))


def test_parse_leftover_tokens():
    with pytest.raises(PrefixError, match="unconsumed"):
        parse_prefix(toks("0 1"))


def test_parse_unknown_token():
    with pytest.raises(PrefixError, match="unknown token"):
        parse_prefix(toks("∩ 0 1"))


def test_parse_checks_leaf_coverage():
    with pytest.raises(PrefixError, match="leaf indices"):
        parse_prefix(toks("∪ 0 2"))
    with pytest.raises(PrefixError, match="leaf indices"):
        parse_prefix(toks("∪ 0 0"))


def test_round_trip_random_trees():
    for k in range(1000):
        tree, _ = sample_csg_tree(6, 0.5, [11, k])
        assert parse_prefix(serialize(tree)).prefix == tree.prefix


# --- sampling ----------------------------------------------------------------

def test_sample_rejects_bad_bounds():
    with pytest.raises(ValueError):
        sample_csg_tree(0, 0.5, 0)
    with pytest.raises(ValueError):
        sample_csg_tree(7, 0.5, 0)
    with pytest.raises(ValueError):
        sample_csg_tree(3, 1.5, 0)


def test_single_leaf_tree():
    tree, prims = sample_csg_tree(1, 0.0, 123)
    assert tree.prefix == ("0",)
    assert len(prims) == 1


def test_leaf_count_matches_primitives():
    for k in range(200):
        tree, prims = sample_csg_tree(6, 0.4, [21, k])
        assert tree.leaf_count == len(prims)
        assert 1 <= tree.leaf_count <= 6


def test_symmetric_counts_satisfy_identity():
    for k in range(300):
        _, prims = sample_csg_tree(6, 0.7, [31, k])
        n2 = sum(1 for p in prims if p.symmetry is not None) // 2
        n1 = sum(1 for p in prims if p.symmetry is None)
        assert n1 + 2 * n2 == len(prims)


def test_symmetric_pairs_are_unit_depth_unions():
    found_pair = False
    for k in range(100):
        tree, prims = sample_csg_tree(6, 0.9, [41, k])
        pairs = [(i, i + 1) for i in range(len(prims) - 1)
                 if prims[i].symmetry is not None
                 and prims[i + 1].symmetry == prims[i].symmetry]
        text = " ".join(tree.prefix)
        for i, j in pairs:
            assert f"{UNION} {i} {j}" in text
            found_pair = True
    assert found_pair


def test_primitive_bounds():
    prims = sample_transformed_primitives(200, 0, 7)
    for p in prims:
        assert p.kind in KINDS
        assert p.orientation in ORIENTATIONS
        assert all(SCALE_BOUNDS[0] <= v <= SCALE_BOUNDS[1] for v in p.scale)
        assert all(lo <= v <= hi for lo, v, hi in
                   zip(TRANSLATE_LO, p.translate, TRANSLATE_HI))


def test_symmetric_pair_differs_by_twice_shift():
    prims = sample_transformed_primitives(0, 50, 9)
    assert len(prims) == 100
    for k in range(0, 100, 2):
        a, b = prims[k], prims[k + 1]
        assert a.symmetry is not None and a.symmetry == b.symmetry
        assert a.kind == b.kind and a.orientation == b.orientation
        assert a.scale == b.scale
        ax = {"X": 0, "Y": 1}[a.symmetry.axis]
        diff = np.array(a.translate) - np.array(b.translate)
        assert np.isclose(diff[ax], 2.0 * a.symmetry.shift)
        off_axis = [i for i in range(3) if i != ax]
        assert np.allclose(diff[off_axis], 0.0)


def test_orientation_frequencies_within_3_sigma():
    prims = sample_transformed_primitives(10000, 0, 99)
    counts = {o: 0 for o in ORIENTATIONS}
    for p in prims:
        counts[p.orientation] += 1
    n = len(prims)
    for o, prob in zip(ORIENTATIONS, ORIENTATION_PMF):
        sigma = (n * prob * (1 - prob)) ** 0.5
        assert abs(counts[o] - n * prob) <= 3 * sigma


def test_kind_frequencies_within_3_sigma():
    prims = sample_transformed_primitives(10000, 0, 101)
    counts = {kind: 0 for kind in KINDS}
    for p in prims:
        counts[p.kind] += 1
    n = len(prims)
    for kind, prob in zip(KINDS, KIND_PMF):
        sigma = (n * prob * (1 - prob)) ** 0.5
        assert abs(counts[kind] - n * prob) <= 3 * sigma


def test_sampling_deterministic():
    a = sample_csg_tree(6, 0.5, 42)
    b = sample_csg_tree(6, 0.5, 42)
    assert a[0].prefix == b[0].prefix
    assert a[1] == b[1]


# --- scene serialization -------------------------------------------------------

def test_scene_json_round_trip():
    tree, prims = sample_csg_tree(6, 0.5, 77)
    text = scene_to_json(tree, prims, 77)
    tree2, prims2, seed = scene_from_json(text)
    assert tree2.prefix == tree.prefix
    assert prims2 == prims
    assert seed == 77


def test_scene_json_validates_counts():
    tree, prims = sample_csg_tree(3, 0.0, 5)
    text = scene_to_json(tree, prims[:-1] if len(prims) > 1 else [], 5)
    with pytest.raises(ValueError):
        scene_from_json(text)
