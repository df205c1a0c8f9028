"""Per-axis generalization hierarchies and their information-loss model.

Each coordinate axis gets a full binary tree whose leaves are equal-width
intervals covering ``[axis_min, axis_max]``.  Node ids follow heap numbering:
the root is 1 and the children of node ``n`` are ``2n`` and ``2n + 1``, so the
leaves of a tree of height ``H`` (edges from leaf to root) are the ids in
``[2^H, 2^(H+1) - 1]``.

Replacing a node with an ancestor surrenders ``depth(node) - depth(ancestor)``
bits of precision; generalizing a leaf all the way to the root (suppression)
therefore costs exactly ``H`` bits.  Two nodes are generalized jointly by
lifting both to their lowest common ancestor.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BoundsError, ConfigError

MAX_HEIGHT = 24

ROOT = 1


def depth_of(node: int) -> int:
    """Depth of a heap-numbered node; the root has depth 0."""
    return node.bit_length() - 1


def lca_of(a: int, b: int) -> int:
    """Lowest common ancestor of two heap-numbered nodes."""
    da, db = a.bit_length(), b.bit_length()
    if da > db:
        a >>= da - db
    elif db > da:
        b >>= db - da
    while a != b:
        a >>= 1
        b >>= 1
    return a


def is_ancestor(ancestor: int, node: int) -> bool:
    """True iff ``ancestor`` lies on ``node``'s path to the root (or is it)."""
    shift = node.bit_length() - ancestor.bit_length()
    return shift >= 0 and (node >> shift) == ancestor


@dataclass(frozen=True)
class GridTree:
    """Immutable generalization hierarchy over one coordinate axis.

    All methods are pure functions of the tree parameters and are safe for
    unrestricted concurrent use.
    """

    axis_min: float
    axis_max: float
    height: int

    def __post_init__(self):
        if not self.axis_max > self.axis_min:
            raise ConfigError(
                f"degenerate axis range [{self.axis_min}, {self.axis_max}]"
            )
        if not 1 <= self.height <= MAX_HEIGHT:
            raise ConfigError(
                f"tree height must be in [1, {MAX_HEIGHT}], got {self.height}"
            )

    @property
    def leaf_count(self) -> int:
        return 1 << self.height

    @property
    def leaf_width(self) -> float:
        return (self.axis_max - self.axis_min) / self.leaf_count

    @property
    def first_leaf(self) -> int:
        return 1 << self.height

    @property
    def last_leaf(self) -> int:
        return (1 << (self.height + 1)) - 1

    @property
    def max_node(self) -> int:
        return self.last_leaf

    def check_node(self, node: int) -> None:
        if not (isinstance(node, int) and ROOT <= node <= self.max_node):
            raise ValueError(f"node id {node!r} outside [1, {self.max_node}]")

    def is_leaf(self, node: int) -> bool:
        self.check_node(node)
        return node >= self.first_leaf

    def leaf_of(self, value: float) -> int:
        """Leaf id covering ``value``; the top boundary maps to the last leaf."""
        if not self.axis_min <= value <= self.axis_max:
            raise BoundsError(
                f"value {value} outside [{self.axis_min}, {self.axis_max}]"
            )
        idx = int((value - self.axis_min) / self.leaf_width)
        idx = min(idx, self.leaf_count - 1)
        return self.first_leaf + idx

    def lf(self, node: int) -> int:
        """Number of leaves owned by ``node``."""
        self.check_node(node)
        return 1 << (self.height - depth_of(node))

    def lca(self, a: int, b: int) -> int:
        self.check_node(a)
        self.check_node(b)
        return lca_of(a, b)

    def loss_single(self, ancestor: int, node: int) -> float:
        """Bits lost by generalizing ``node`` up to ``ancestor``."""
        self.check_node(ancestor)
        self.check_node(node)
        if not is_ancestor(ancestor, node):
            raise ValueError(
                f"node {ancestor} is not an ancestor-or-self of node {node}"
            )
        return float(depth_of(node) - depth_of(ancestor))

    def loss_suppress(self) -> float:
        """Bits lost by suppressing a leaf to the root: the tree height."""
        return float(self.height)

    def loss_pair(self, a: int, b: int) -> tuple[float, int]:
        """Joint generalization of two nodes: (loss in bits, their LCA)."""
        anc = self.lca(a, b)
        loss = (depth_of(a) - depth_of(anc)) + (depth_of(b) - depth_of(anc))
        return float(loss), anc

    def node_interval(self, node: int) -> tuple[float, float]:
        """Coordinate interval covered by ``node``."""
        self.check_node(node)
        span = self.lf(node)
        first = (node << (self.height - depth_of(node))) - self.first_leaf
        lo = self.axis_min + first * self.leaf_width
        hi = self.axis_min + (first + span) * self.leaf_width
        return lo, hi


def build_tree(axis_min: float, axis_max: float, height: int) -> GridTree:
    """Build a hierarchy with ``2^height`` equal-width leaf intervals."""
    return GridTree(axis_min=axis_min, axis_max=axis_max, height=height)
