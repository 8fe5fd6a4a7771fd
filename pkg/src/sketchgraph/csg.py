"""Procedural solid-grammar sampling.

Scenes are binary trees over union and difference whose leaves are
transformed primitive solids, written in prefix notation with integer
tokens for leaves ("∪ ∪ 2 3 − ∪ 0 1 ∪ 4 5").  Mirrored primitive pairs
enter the tree as unit-depth union subtrees over adjacent leaf indices.
Only the parametric description is produced here; mesh construction and
rendering live elsewhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

UNION = "∪"       # ∪
DIFFERENCE = "−"  # −
OPERATORS = (UNION, DIFFERENCE)
_DIFFERENCE_ALIASES = {DIFFERENCE, "-"}

KINDS = ("cube", "cylinder", "prism", "sphere", "pyramid", "cone")
KIND_PMF = (10 / 25, 10 / 25, 2 / 25, 1 / 25, 1 / 25, 1 / 25)
ORIENTATIONS = ("+X", "+Y", "+Z", "-X", "-Y", "-Z")
ORIENTATION_PMF = (1 / 16, 1 / 16, 1 / 2, 1 / 16, 1 / 16, 1 / 4)
SCALE_BOUNDS = (0.2, 1.1)
TRANSLATE_LO = (-0.7, -0.7, 0.0)
TRANSLATE_HI = (0.7, 0.7, 0.3)
SYMMETRY_AXES = ("X", "Y")
SYMMETRY_SHIFT_MEAN = 0.4
SYMMETRY_SHIFT_STD = 0.5  # second moment given as variance 0.25
MAX_LEAVES = 6


@dataclass(frozen=True)
class Symmetry:
    axis: str  # "X" or "Y"
    shift: float


@dataclass(frozen=True)
class TransformedPrimitive:
    kind: str
    orientation: str
    scale: tuple[float, float, float]
    translate: tuple[float, float, float]
    symmetry: Symmetry | None = None

    def to_json_dict(self) -> dict:
        sym = None if self.symmetry is None else {
            "axis": self.symmetry.axis, "shift": self.symmetry.shift}
        return {"kind": self.kind, "orientation": self.orientation,
                "scale": list(self.scale), "translate": list(self.translate),
                "symmetry": sym}

    @classmethod
    def from_json_dict(cls, d: dict) -> "TransformedPrimitive":
        sym = d.get("symmetry")
        return cls(d["kind"], d["orientation"], tuple(d["scale"]),
                   tuple(d["translate"]),
                   None if sym is None else Symmetry(sym["axis"], sym["shift"]))


@dataclass(frozen=True)
class Node:
    """Prefix-tree node: either op with two children, or a leaf index."""

    op: str | None = None
    left: "Node | None" = None
    right: "Node | None" = None
    leaf: int | None = None

    def tokens(self) -> list[str]:
        if self.op is None:
            return [str(self.leaf)]
        return [self.op] + self.left.tokens() + self.right.tokens()


@dataclass(frozen=True)
class CsgTree:
    prefix: tuple[str, ...]
    leaf_count: int
    root: Node


class PrefixError(ValueError):
    pass


def parse_prefix(tokens) -> CsgTree:
    """Parse prefix tokens into a tree, validating arity and that leaf
    indices cover 0..N-1 exactly once.  The ASCII hyphen is accepted for
    the difference operator."""
    tokens = list(tokens)
    leaves: list[int] = []
    pos = 0

    def parse_node() -> Node:
        nonlocal pos
        if pos >= len(tokens):
            raise PrefixError("unexpected end of tokens")
        tok = tokens[pos]
        pos += 1
        if tok == UNION or tok in _DIFFERENCE_ALIASES:
            op = UNION if tok == UNION else DIFFERENCE
            left = parse_node()
            right = parse_node()
            return Node(op=op, left=left, right=right)
        try:
            idx = int(tok)
        except ValueError:
            raise PrefixError(f"unknown token {tok!r}") from None
        if idx < 0:
            raise PrefixError(f"negative leaf index {idx}")
        leaves.append(idx)
        return Node(leaf=idx)

    root = parse_node()
    if pos != len(tokens):
        raise PrefixError(f"{len(tokens) - pos} unconsumed tokens")
    if sorted(leaves) != list(range(len(leaves))):
        raise PrefixError("leaf indices must cover 0..N-1 exactly once")
    return CsgTree(tuple(root.tokens()), len(leaves), root)


def serialize(tree: CsgTree) -> list[str]:
    return list(tree.prefix)


def _draw_primitive(rng: np.random.Generator) -> TransformedPrimitive:
    kind = KINDS[int(rng.choice(len(KINDS), p=KIND_PMF))]
    orientation = ORIENTATIONS[int(rng.choice(len(ORIENTATIONS), p=ORIENTATION_PMF))]
    scale = tuple(float(v) for v in rng.uniform(SCALE_BOUNDS[0], SCALE_BOUNDS[1], 3))
    translate = tuple(float(v) for v in rng.uniform(TRANSLATE_LO, TRANSLATE_HI))
    return TransformedPrimitive(kind, orientation, scale, translate)


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample_transformed_primitives(n1: int, n2: int, seed) -> list[TransformedPrimitive]:
    """n1 single primitives followed by n2 mirrored pairs (adjacent
    records).  A pair shares all parameters except the translate component
    along the symmetry axis, shifted by +shift and -shift."""
    if n1 < 0 or n2 < 0:
        raise ValueError("counts must be non-negative")
    rng = _as_rng(seed)
    out = [_draw_primitive(rng) for _ in range(n1)]
    for _ in range(n2):
        base = _draw_primitive(rng)
        axis = SYMMETRY_AXES[int(rng.integers(0, 2))]
        shift = float(rng.normal(SYMMETRY_SHIFT_MEAN, SYMMETRY_SHIFT_STD))
        ax = {"X": 0, "Y": 1}[axis]
        sym = Symmetry(axis, shift)
        for sign in (+1.0, -1.0):
            t = list(base.translate)
            t[ax] += sign * shift
            out.append(TransformedPrimitive(base.kind, base.orientation,
                                            base.scale, tuple(t), sym))
    return out


def sample_csg_tree(n_max: int, sym_rate: float, seed) -> tuple[CsgTree, list[TransformedPrimitive]]:
    """Sample a scene: leaf count uniform on 1..n_max, mirrored pairs from
    successive Bernoulli draws at the given rate (so N1 + 2*N2 = N), then
    combine all units bottom-up with coin-flip union/difference."""
    if n_max < 1 or n_max > MAX_LEAVES:
        raise ValueError(f"n_max must lie in 1..{MAX_LEAVES}")
    if not 0.0 <= sym_rate <= 1.0:
        raise ValueError("sym_rate must lie in [0, 1]")
    rng = _as_rng(seed)
    n = int(rng.integers(1, n_max + 1))

    n1 = n2 = 0
    remaining = n
    while remaining > 0:
        if remaining >= 2 and rng.random() < sym_rate:
            n2 += 1
            remaining -= 2
        else:
            n1 += 1
            remaining -= 1

    primitives = sample_transformed_primitives(n1, n2, rng)

    units: list[Node] = [Node(leaf=i) for i in range(n1)]
    for k in range(n2):
        i = n1 + 2 * k
        units.append(Node(op=UNION, left=Node(leaf=i), right=Node(leaf=i + 1)))

    while len(units) > 1:
        i, j = (int(v) for v in rng.choice(len(units), size=2, replace=False))
        a = units[i]
        b = units[j]
        op = UNION if rng.random() < 0.5 else DIFFERENCE
        merged = Node(op=op, left=a, right=b)
        units = [u for k, u in enumerate(units) if k not in (i, j)]
        units.append(merged)

    root = units[0]
    tree = CsgTree(tuple(root.tokens()), n, root)
    return tree, primitives


def scene_to_json(tree: CsgTree, primitives: list[TransformedPrimitive],
                  seed: int) -> str:
    doc = {"prefix": list(tree.prefix),
           "primitives": [p.to_json_dict() for p in primitives],
           "seed": seed}
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def scene_from_json(text: str | bytes) -> tuple[CsgTree, list[TransformedPrimitive], int]:
    doc = json.loads(text)
    tree = parse_prefix(doc["prefix"])
    prims = [TransformedPrimitive.from_json_dict(d) for d in doc["primitives"]]
    if tree.leaf_count != len(prims):
        raise ValueError("leaf count does not match primitive records")
    return tree, prims, int(doc.get("seed", 0))


def load_scene(path: str | Path) -> tuple[CsgTree, list[TransformedPrimitive], int]:
    return scene_from_json(Path(path).read_text(encoding="utf-8"))
