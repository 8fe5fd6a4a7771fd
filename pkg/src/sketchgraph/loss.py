"""Framework-free softmax cross-entropy with class-balanced and max
weights, plus its exact gradient.

Activations are (K, h, w) float arrays, labels (h, w) integer class ids.
The loss is the mean over pixels of w(x) * -log p_label(x); weights are
treated as constants in the gradient (class frequencies and the argmax are
piecewise constant in the activations).
"""

from __future__ import annotations

import numpy as np

LOG_FLOOR = 1e-12

MODES = ("plain", "balanced", "max_weighted")


def class_weights(labels: np.ndarray, num_classes: int) -> np.ndarray:
    """Normalized reciprocal class frequencies for one label image.

    Empirical per-image frequencies are floored at one pixel's worth so an
    absent class still gets a finite (large) weight; the result sums to 1.
    """
    if num_classes < 2:
        raise ValueError("need at least two classes")
    labels = np.asarray(labels)
    n = labels.size
    counts = np.bincount(labels.ravel(), minlength=num_classes).astype(np.float64)
    p = np.maximum(counts / n, 1.0 / n)
    inv = 1.0 / p
    return inv / inv.sum()


def softmax(acts: np.ndarray) -> np.ndarray:
    """Stable softmax over the class axis of (K, h, w) activations."""
    shifted = acts - acts.max(axis=0, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=0, keepdims=True)


def predicted_labels(acts: np.ndarray) -> np.ndarray:
    """Argmax class per pixel; ties resolve to the lowest class index."""
    return np.argmax(acts, axis=0)


def pixel_weights(acts: np.ndarray, labels: np.ndarray, mode: str) -> np.ndarray:
    k = acts.shape[0]
    if mode == "plain":
        return np.ones(labels.shape, dtype=np.float64)
    omega = class_weights(labels, k)
    if mode == "balanced":
        return omega[labels]
    if mode == "max_weighted":
        rho = predicted_labels(acts)
        return np.maximum(omega[labels], omega[rho])
    raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")


def xent_loss(acts: np.ndarray, labels: np.ndarray,
              mode: str = "plain") -> tuple[float, np.ndarray]:
    """Weighted negative log-likelihood and its gradient w.r.t. acts.

    Modes: "plain" (unit weights), "balanced" (true-label class weight),
    "max_weighted" (larger of true-label and predicted-label weights).
    """
    acts = np.asarray(acts, dtype=np.float64)
    labels = np.asarray(labels)
    if acts.ndim != 3:
        raise ValueError("activations must be (K, h, w)")
    k, h, w = acts.shape
    if labels.shape != (h, w):
        raise ValueError(f"labels shape {labels.shape} does not match ({h}, {w})")
    if labels.min() < 0 or labels.max() >= k:
        raise ValueError("label ids must lie in [0, K)")

    p = softmax(acts)
    rows, cols = np.indices((h, w))
    p_true = p[labels, rows, cols]
    weights = pixel_weights(acts, labels, mode)

    n = h * w
    loss = float((weights * -np.log(np.maximum(p_true, LOG_FLOOR))).sum() / n)

    # d(-log p_l)/da_i = p_i - [i == l]; mean reduction and the constant
    # per-pixel weight scale each pixel's term.
    grad = p.copy()
    grad[labels, rows, cols] -= 1.0
    grad *= weights[None, :, :] / n
    return loss, grad
