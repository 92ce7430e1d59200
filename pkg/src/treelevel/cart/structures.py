"""Data structures for binary classification trees."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..dataset import ColumnInfo, DataError


@dataclass(frozen=True)
class GrowControls:
    """Growth and validation settings.

    ``cp`` is the pre-pruning bar: a split is kept only when its Gini
    improvement (scaled by the fraction of observations with the variable
    observed) strictly exceeds ``cp`` times the root misclassification risk.
    Defaults match the conventional classification settings of recursive
    partitioning tools.
    """

    min_split: int = 20
    min_bucket: int = 7
    max_depth: int = 30
    cp: float = 0.01
    max_surrogate: int = 5
    cv_folds: int = 10
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.min_split < 2:
            raise DataError("min_split must be >= 2")
        if self.min_bucket < 1:
            raise DataError("min_bucket must be >= 1")
        if self.max_depth < 0:
            raise DataError("max_depth must be >= 0")
        if not 0.0 <= self.cp <= 1.0:
            raise DataError("cp must lie in [0, 1]")
        if self.max_surrogate < 0:
            raise DataError("max_surrogate must be >= 0")
        if self.cv_folds < 2:
            raise DataError("cv_folds must be >= 2")


@dataclass(frozen=True)
class Split:
    """A binary routing rule on one predictor.

    Numeric/ordinal splits carry a ``threshold`` (ordinal thresholds are in
    integer code units); values at or below it route left, unless ``flip`` is
    set (used by surrogate search, which may adopt the reversed orientation).
    Nominal splits carry ``left_levels``, a proper non-empty subset of the
    declared levels.  ``improvement`` is the Gini decrease per root
    observation; surrogate splits, ranked by agreement instead, record 0.0.
    ``majority_direction`` names the child that received more non-missing
    observations (ties go left).
    """

    variable: str
    threshold: float | None = None
    left_levels: frozenset[str] | None = None
    flip: bool = False
    improvement: float = 0.0
    majority_direction: str = "left"

    def __post_init__(self) -> None:
        if (self.threshold is None) == (self.left_levels is None):
            raise DataError("split needs exactly one of threshold or left_levels")
        if self.left_levels is not None and not self.left_levels:
            raise DataError("left_levels must be non-empty")
        if self.left_levels is not None and self.flip:
            raise DataError("flip applies only to threshold splits")
        if self.improvement < 0:
            raise DataError("improvement must be >= 0")
        if self.majority_direction not in ("left", "right"):
            raise DataError("majority_direction must be left or right")

    def goes_left(self, code: float) -> bool:
        """Route a non-missing encoded value; nominal codes are level names."""
        if self.threshold is not None:
            below = code <= self.threshold
            return below != self.flip
        return code in self.left_levels


@dataclass(frozen=True)
class Surrogate:
    """An alternative routing rule and its agreement with the primary split."""

    split: Split
    agreement: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.agreement <= 1.0:
            raise DataError("agreement must lie in [0, 1]")


@dataclass
class TreeNode:
    """One node; leaves have no split, internal nodes have both children.

    ``node_id`` follows the usual breadth numbering: root 1, children of node
    i are 2i and 2i+1.  ``counts`` are the response counts of all
    observations routed here.  ``collapse_alpha`` is filled by the pruning
    sequence: the scaled cost-complexity value at which this node collapses
    into a leaf.
    """

    node_id: int
    depth: int
    counts: tuple[int, int]
    split: Split | None = None
    surrogates: list[Surrogate] = field(default_factory=list)
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    collapse_alpha: float | None = None

    @property
    def is_leaf(self) -> bool:
        return self.split is None

    @property
    def n(self) -> int:
        return self.counts[0] + self.counts[1]

    @property
    def predicted_class(self) -> int:
        # ties predict class 0
        return 1 if self.counts[1] > self.counts[0] else 0

    @property
    def predicted_prob(self) -> float:
        if self.n == 0:
            raise DataError("empty node has no class probability")
        return self.counts[1] / self.n

    @property
    def risk(self) -> int:
        """Misclassification count under this node's majority prediction."""
        return min(self.counts)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TreeNode):
            return NotImplemented
        return (
            self.node_id == other.node_id
            and self.depth == other.depth
            and self.counts == other.counts
            and self.split == other.split
            and self.surrogates == other.surrogates
            and self.collapse_alpha == other.collapse_alpha
            and self.left == other.left
            and self.right == other.right
        )


@dataclass(frozen=True)
class CpRow:
    """One row of the complexity table.

    ``cp`` is the scaled alpha at which this subtree collapses into the next
    smaller one (infinity for the root-only row).  ``rel_error`` is training
    risk over root risk; ``x_error``/``x_std`` are filled by cross-validation.
    """

    cp: float
    n_splits: int
    rel_error: float
    x_error: float | None = None
    x_std: float | None = None


@dataclass
class Tree:
    """A grown tree plus everything needed to reuse it on new rows."""

    root: TreeNode
    response: str
    predictors: list[str]
    predictor_info: dict[str, ColumnInfo]
    controls: GrowControls
    n_root: int
    cp_table: list[CpRow] | None = None

    def internal_nodes(self) -> list[TreeNode]:
        """Internal nodes in pre-order (root, left subtree, right subtree)."""
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                out.append(node)
                stack.append(node.right)
                stack.append(node.left)
        return out

    def leaves(self) -> list[TreeNode]:
        """Leaves from left to right."""
        out = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.append(node.right)
                stack.append(node.left)
        return out

    @property
    def n_splits(self) -> int:
        return len(self.internal_nodes())

    @property
    def root_risk(self) -> int:
        return self.root.risk

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tree):
            return NotImplemented
        return (
            self.root == other.root
            and self.response == other.response
            and self.predictors == other.predictors
            and self.predictor_info == other.predictor_info
            and self.controls == other.controls
            and self.n_root == other.n_root
            and self.cp_table == other.cp_table
        )
