"""Decomposition trees for limit-level Wadge analysis.

Given two disjoint upward-closed sets that between them decide every
maximal sequence, the undecided stages form a finite well-founded tree.
Each undecided node splits into its immediate extensions, guarded by
pairwise disjoint single-generator separators one fundamental-sequence
step up; the nesting depth of these splits is the iterated
separated-union rank.
"""

from __future__ import annotations

import dataclasses
from typing import Optional

from .hierarchy import UpsetRep, eval_at, upset_from_json, upset_to_json
from .jump import Seq
from .ordinals import OrdinalNotation, classify, compare, fund_seq, parse_ordinal, render
from .stages import TrueStageSystem
from .universe import Universe, seq_str


@dataclasses.dataclass(frozen=True)
class DecompositionTree:
    node: Seq
    kind: str  # "leaf" or "internal"
    rank: int
    value: Optional[int] = None
    witness_level: Optional[OrdinalNotation] = None
    children: tuple["DecompositionTree", ...] = ()
    separators: tuple[UpsetRep, ...] = ()
    separator_level: Optional[OrdinalNotation] = None


def wadge_tree(
    sys: TrueStageSystem,
    w0: UpsetRep,
    w1: UpsetRep,
    lam: OrdinalNotation,
    universe: Universe,
) -> DecompositionTree:
    if classify(lam).kind != "limit":
        raise ValueError(f"{render(lam)} is not a limit level")
    for name, w in (("W0", w0), ("W1", w1)):
        if compare(w.level, lam) != 0:
            raise ValueError(
                f"{name} lives at level {render(w.level)}, expected {render(lam)}"
            )
    for sigma in universe.all_seqs():
        if eval_at(sys, w0, sigma) and eval_at(sys, w1, sigma):
            raise ValueError(f"W0 and W1 overlap at {seq_str(sigma)}")
    for x in universe.maximal():
        if not (eval_at(sys, w0, x) or eval_at(sys, w1, x)):
            raise ValueError(f"maximal sequence {seq_str(x)} is uncovered")

    seqs = universe.all_seqs()

    def build(node: Seq) -> DecompositionTree:
        k = sys.height(node, lam)
        if eval_at(sys, w1, node):
            return DecompositionTree(node, "leaf", 0, value=1,
                                     witness_level=fund_seq(lam, k))
        if eval_at(sys, w0, node):
            return DecompositionTree(node, "leaf", 0, value=0,
                                     witness_level=fund_seq(lam, k))
        kids = sorted(
            tau for tau in seqs
            if len(tau) > len(node)
            and sys.height(tau, lam) == k + 1
            and sys.leq(node, tau, lam)
        )
        if not kids:
            raise ValueError(
                f"undecided stage {seq_str(node)} has no extensions to split on"
            )
        level = fund_seq(lam, k + 1)
        subtrees = tuple(build(tau) for tau in kids)
        separators = tuple(
            UpsetRep(level, frozenset({tau})) for tau in kids
        )
        rank = 1 + max(t.rank for t in subtrees)
        return DecompositionTree(node, "internal", rank,
                                 children=subtrees, separators=separators,
                                 separator_level=level)

    return build(())


def decomposition_eval(
    sys: TrueStageSystem, tree: DecompositionTree, x_prefix: Seq
) -> bool:
    x_prefix = tuple(x_prefix)
    while tree.kind == "internal":
        matches = [
            i for i, sep in enumerate(tree.separators)
            if eval_at(sys, sep, x_prefix)
        ]
        if len(matches) != 1:
            raise ValueError(
                f"{len(matches)} separators match {seq_str(x_prefix)} "
                f"at node {seq_str(tree.node)}"
            )
        tree = tree.children[matches[0]]
    return bool(tree.value)


def isu_rank(tree: DecompositionTree) -> int:
    return tree.rank


def tree_to_json(tree: DecompositionTree) -> dict:
    data: dict = {
        "node": list(tree.node),
        "kind": tree.kind,
        "rank": tree.rank,
    }
    if tree.kind == "leaf":
        data["value"] = tree.value
        data["witnessLevel"] = render(tree.witness_level)
    else:
        data["separatorLevel"] = render(tree.separator_level)
        data["separators"] = [upset_to_json(s) for s in tree.separators]
        data["children"] = [tree_to_json(c) for c in tree.children]
    return data


def tree_from_json(data: dict) -> DecompositionTree:
    node = tuple(data["node"])
    if data["kind"] == "leaf":
        return DecompositionTree(
            node, "leaf", data["rank"], value=data["value"],
            witness_level=parse_ordinal(data["witnessLevel"]),
        )
    return DecompositionTree(
        node, "internal", data["rank"],
        children=tuple(tree_from_json(c) for c in data["children"]),
        separators=tuple(upset_from_json(s) for s in data["separators"]),
        separator_level=parse_ordinal(data["separatorLevel"]),
    )
