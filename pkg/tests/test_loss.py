"""Loss numerics against finite differences and exact arithmetic."""

from __future__ import annotations

import math

import numpy as np
import pytest

from sketchgraph.loss import class_weights, pixel_weights, softmax, xent_loss


def test_class_weights_balanced_classes():
    labels = np.array([[0, 1], [1, 0]])
    assert np.allclose(class_weights(labels, 2), [0.5, 0.5])


def test_class_weights_90_10():
    labels = np.zeros((10, 10), dtype=int)
    labels.ravel()[:10] = 1  # 90 zeros, 10 ones
    w = class_weights(labels, 2)
    assert np.allclose(w, [0.1, 0.9])


def test_class_weights_absent_class_floored():
    labels = np.zeros((16, 16), dtype=int)
    labels[:8] = 1  # classes 0 and 1 at 50/50, class 2 absent
    w = class_weights(labels, 3)
    # p = (0.5, 0.5, 1/256); weights proportional to (2, 2, 256)
    expected = np.array([2.0, 2.0, 256.0])
    assert np.allclose(w, expected / expected.sum())
    assert math.isclose(w.sum(), 1.0)


def test_class_weights_permutation_equivariant():
    rng = np.random.default_rng(0)
    labels = rng.integers(0, 3, (12, 12))
    w = class_weights(labels, 3)
    perm = np.array([2, 0, 1])
    w_perm = class_weights(perm[labels], 3)
    # weight of relabeled class equals original class weight
    for old in range(3):
        assert math.isclose(w_perm[perm[old]], w[old])


def test_class_weights_requires_two_classes():
    with pytest.raises(ValueError):
        class_weights(np.zeros((2, 2), dtype=int), 1)


def test_saturated_prediction_has_near_zero_loss():
    labels = np.array([[0, 1], [2, 1]])
    acts = np.full((3, 2, 2), -40.0)
    for r in range(2):
        for c in range(2):
            acts[labels[r, c], r, c] = 40.0
    for mode in ("plain", "balanced", "max_weighted"):
        loss, _ = xent_loss(acts, labels, mode)
        assert loss < 1e-12


def test_uniform_activations_plain_loss_is_ln3():
    acts = np.zeros((3, 4, 4))
    labels = np.random.default_rng(1).integers(0, 3, (4, 4))
    loss, _ = xent_loss(acts, labels, "plain")
    assert math.isclose(loss, math.log(3.0), rel_tol=1e-12)


def _fd_gradient(acts, labels, mode, h=1e-5):
    grad = np.zeros_like(acts)
    it = np.nditer(acts, flags=["multi_index"])
    while not it.finished:
        idx = it.multi_index
        bumped = acts.copy()
        bumped[idx] += h
        up, _ = xent_loss(bumped, labels, mode)
        bumped[idx] -= 2 * h
        down, _ = xent_loss(bumped, labels, mode)
        grad[idx] = (up - down) / (2 * h)
        it.iternext()
    return grad


def _safe_instance(rng):
    """Random instance whose argmax has a healthy margin, so the
    piecewise-constant weights cannot flip under the probe step."""
    while True:
        acts = rng.normal(size=(3, 8, 8))
        top2 = np.sort(acts, axis=0)[-2:]
        if (top2[1] - top2[0]).min() > 1e-3:
            labels = rng.integers(0, 3, (8, 8))
            return acts, labels


@pytest.mark.parametrize("mode", ["plain", "balanced", "max_weighted"])
def test_gradient_matches_finite_differences(mode):
    rng = np.random.default_rng(99)
    for _ in range(4):
        acts, labels = _safe_instance(rng)
        _, grad = xent_loss(acts, labels, mode)
        fd = _fd_gradient(acts, labels, mode)
        denom = np.maximum(np.maximum(np.abs(fd), np.abs(grad)), 1e-8)
        assert (np.abs(fd - grad) / denom).max() <= 1e-4


def test_loss_nonnegative():
    rng = np.random.default_rng(3)
    for _ in range(20):
        acts = rng.normal(size=(3, 6, 6)) * 3
        labels = rng.integers(0, 3, (6, 6))
        for mode in ("plain", "balanced", "max_weighted"):
            loss, _ = xent_loss(acts, labels, mode)
            assert loss >= 0.0


def test_max_weighted_at_least_balanced():
    rng = np.random.default_rng(4)
    for _ in range(30):
        acts = rng.normal(size=(3, 6, 6)) * 2
        labels = rng.integers(0, 3, (6, 6))
        balanced, _ = xent_loss(acts, labels, "balanced")
        maxw, _ = xent_loss(acts, labels, "max_weighted")
        assert maxw >= balanced - 1e-15


def test_max_weighted_equals_balanced_when_predictions_correct():
    rng = np.random.default_rng(5)
    labels = rng.integers(0, 3, (6, 6))
    acts = rng.normal(size=(3, 6, 6))
    rows, cols = np.indices((6, 6))
    acts[labels, rows, cols] += 10.0  # argmax == label everywhere
    balanced, gb = xent_loss(acts, labels, "balanced")
    maxw, gm = xent_loss(acts, labels, "max_weighted")
    assert balanced == maxw
    assert np.array_equal(gb, gm)


def test_argmax_tie_takes_lowest_index():
    acts = np.zeros((3, 1, 1))
    labels = np.array([[2]])
    w = pixel_weights(acts, labels, "max_weighted")
    omega = class_weights(labels, 3)
    # predicted label is class 0 on an exact tie
    assert w[0, 0] == max(omega[2], omega[0])


def test_softmax_rows_sum_to_one():
    rng = np.random.default_rng(6)
    acts = rng.normal(size=(3, 5, 5)) * 50
    p = softmax(acts)
    assert np.allclose(p.sum(axis=0), 1.0)
    assert (p >= 0).all()


def test_xent_validates_shapes():
    with pytest.raises(ValueError):
        xent_loss(np.zeros((3, 4, 4)), np.zeros((5, 5), dtype=int))
    with pytest.raises(ValueError):
        xent_loss(np.zeros((3, 4, 4)), np.full((4, 4), 3))
    with pytest.raises(ValueError):
        xent_loss(np.zeros((3, 4, 4)), np.zeros((4, 4), dtype=int), "bogus")
