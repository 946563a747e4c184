"""Difference-hierarchy conversions over upward-closed sets.

Sets are represented by generator families that are closed upward under
a level relation.  The four conversion directions connect level-set
families, limit approximations, and ordinal-valued witness functions
counting mind changes; the mind-change tree ranked in Kleene-Brouwer
order turns an arbitrary approximation into a witness.
"""

from __future__ import annotations

import dataclasses
import functools
from typing import Iterable, Optional

from .jump import Seq
from .ordinals import (
    ComputableCopy,
    OrdinalNotation,
    ZERO,
    classify,
    compare,
    enum_copy,
    from_int,
    kb_rank,
    parity,
    parse_ordinal,
    render,
    successor,
)
from .ordinals import RankedTree
from .stages import TrueStageSystem
from .universe import Universe, parse_seq, seq_str

_ord_key = functools.cmp_to_key(compare)


@dataclasses.dataclass(frozen=True)
class UpsetRep:
    """An upward-closed set given by generators at a fixed level."""

    level: OrdinalNotation
    generators: frozenset[Seq]


def upset_close(
    sys: TrueStageSystem,
    generators: Iterable[Seq],
    alpha: OrdinalNotation,
    universe: Universe,
) -> UpsetRep:
    """Materialize the least upward-closed superset within the universe."""
    gens = {tuple(g) for g in generators}
    for g in gens:
        if g not in universe:
            raise ValueError(f"generator {seq_str(g)} is outside the universe")
    closed = frozenset(
        tau
        for tau in universe.all_seqs()
        if any(sys.leq(g, tau, alpha) for g in gens)
    )
    return UpsetRep(alpha, closed)


def eval_at(sys: TrueStageSystem, upset: UpsetRep, x_prefix: Seq) -> bool:
    x_prefix = tuple(x_prefix)
    return any(sys.leq(g, x_prefix, upset.level) for g in upset.generators)


def disjointify(
    sys: TrueStageSystem,
    upsets: list[UpsetRep],
    alpha: OrdinalNotation,
    universe: Universe,
) -> list[UpsetRep]:
    """Least-index refinement: a stage joins the n-th modified set only
    below its own height and only when no earlier-indexed set claims it."""
    level = successor(alpha)
    for u in upsets:
        if compare(u.level, level) != 0:
            raise ValueError(
                f"expected level {render(level)}, got {render(u.level)}"
            )
    members: list[set[Seq]] = [set() for _ in upsets]
    for tau in universe.all_seqs():
        height = sys.height(tau, level)
        for n, u in enumerate(upsets):
            if n >= height:
                break
            if eval_at(sys, u, tau):
                members[n].add(tau)
                break
    return [UpsetRep(level, frozenset(m)) for m in members]


@dataclasses.dataclass(frozen=True)
class ApproxFn:
    """A total guessing function on a finite universe."""

    level: OrdinalNotation
    table: dict[Seq, int]

    def value(self, sigma: Seq) -> int:
        sigma = tuple(sigma)
        if sigma not in self.table:
            raise ValueError(f"{seq_str(sigma)} is outside the table")
        return self.table[sigma]


def measurable_to_approx(
    sys: TrueStageSystem,
    upsets: list[UpsetRep],
    alpha: OrdinalNotation,
    universe: Universe,
) -> ApproxFn:
    """Read an approximation off a level-set family, disjointifying
    first; value 0 everywhere outside the family."""
    refined = disjointify(sys, upsets, alpha, universe)
    table: dict[Seq, int] = {}
    for tau in universe.all_seqs():
        table[tau] = 0
        for n, u in enumerate(refined):
            if tau in u.generators:
                table[tau] = n
                break
    return ApproxFn(alpha, table)


def approx_limit(
    sys: TrueStageSystem, fn: ApproxFn, x_prefix: Seq
) -> tuple[int, bool]:
    """Value along the apparent-truth chain of a prefix, plus a bit
    reporting whether the last step kept it constant."""
    chain = sys.chain(tuple(x_prefix), fn.level)
    value = fn.value(chain[-1])
    stable = len(chain) >= 2 and fn.value(chain[-2]) == value
    return value, stable


def approx_to_level_sets(
    sys: TrueStageSystem, fn: ApproxFn, universe: Universe
) -> dict[tuple[int, int], UpsetRep]:
    """Split the universe by guessed value and height."""
    seqs = universe.all_seqs()
    if not seqs:
        return {}
    top_value = max(fn.value(s) for s in seqs)
    top_height = max(sys.height(s, fn.level) for s in seqs)
    family: dict[tuple[int, int], UpsetRep] = {}
    for n in range(top_value + 1):
        for k in range(top_height + 1):
            gens = frozenset(
                s for s in seqs
                if fn.value(s) == n and sys.height(s, fn.level) == k
            )
            family[(n, k)] = UpsetRep(fn.level, gens)
    return family


@dataclasses.dataclass(frozen=True)
class WitnessFn:
    """An ordinal-valued mind-change counter over a fixed copy of eta."""

    eta: OrdinalNotation
    copy: ComputableCopy
    table: dict[Seq, OrdinalNotation]

    def value(self, sigma: Seq) -> OrdinalNotation:
        sigma = tuple(sigma)
        if sigma not in self.table:
            raise ValueError(f"{seq_str(sigma)} is outside the table")
        return self.table[sigma]


def verify_witness_laws(
    sys: TrueStageSystem,
    fn: ApproxFn,
    witness: WitnessFn,
    universe: Universe,
    require_eta_clause: bool = True,
) -> list[dict]:
    """Check the three monotonicity laws over every comparable pair;
    returns one record per violation."""
    violations: list[dict] = []
    alpha = fn.level
    for sigma, tau in universe.prefix_pairs():
        if sigma == tau or not sys.leq(sigma, tau, alpha):
            continue
        os, ot = witness.value(sigma), witness.value(tau)
        if compare(ot, os) > 0:
            violations.append({
                "clause": "i", "sigma": list(sigma), "tau": list(tau),
                "detail": f"o rose from {render(os)} to {render(ot)}",
            })
        if fn.value(sigma) != fn.value(tau) and compare(ot, os) >= 0:
            violations.append({
                "clause": "ii", "sigma": list(sigma), "tau": list(tau),
                "detail": f"value changed but o kept {render(ot)}",
            })
    if require_eta_clause:
        for sigma in universe.all_seqs():
            if (compare(witness.value(sigma), witness.eta) == 0
                    and fn.value(sigma) != 0):
                violations.append({
                    "clause": "iii", "sigma": list(sigma), "tau": list(sigma),
                    "detail": "o reached eta with a nonzero value",
                })
    return violations


def dsets_to_witness(
    sys: TrueStageSystem,
    upsets: list[UpsetRep],
    eta: OrdinalNotation,
    alpha: OrdinalNotation,
    universe: Universe,
    gate: str = "length",
) -> tuple[ApproxFn, WitnessFn]:
    """From an increasing difference family to (approximation, witness).

    The candidate pool for a stage opens up one copy index per unit of
    length (or of height, under gate="height"); eta itself is always a
    candidate and the full universe stands behind it.
    """
    if gate not in ("length", "height"):
        raise ValueError(f"unknown gate {gate!r}")
    copy = enum_copy(eta)
    for u in upsets:
        if compare(u.level, alpha) != 0:
            raise ValueError(
                f"expected level {render(alpha)}, got {render(u.level)}"
            )
    ordinals = [copy.at_index(n) for n in range(len(upsets))]
    seqs = universe.all_seqs()
    membership = [
        frozenset(s for s in seqs if eval_at(sys, u, s)) for u in upsets
    ]
    for n, nu in enumerate(ordinals):
        for m, mu in enumerate(ordinals):
            if compare(nu, mu) < 0 and not membership[n] <= membership[m]:
                raise ValueError(
                    f"family is not increasing: set {n} (index {render(nu)}) "
                    f"is not contained in set {m} (index {render(mu)})"
                )
    f_table: dict[Seq, int] = {}
    o_table: dict[Seq, OrdinalNotation] = {}
    for sigma in seqs:
        bound = (
            len(sigma) if gate == "length" else sys.height(sigma, alpha)
        )
        open_positions = [n for n in range(min(bound, len(upsets)))]
        candidates = sorted(
            (ordinals[n] for n in open_positions if sigma in membership[n]),
            key=_ord_key,
        )
        o_val = candidates[0] if candidates else eta
        o_table[sigma] = o_val
        f_table[sigma] = int(parity(o_val) != parity(eta))
    return ApproxFn(alpha, f_table), WitnessFn(eta, copy, o_table)


def witness_to_dsets(
    sys: TrueStageSystem,
    fn: ApproxFn,
    witness: WitnessFn,
    eta: OrdinalNotation,
    alpha: OrdinalNotation,
    universe: Universe,
) -> list[UpsetRep]:
    """Rebuild an increasing family from a lawful (f, o) pair.

    o is nudged to o or o+1 so that its parity against eta encodes f,
    then the family collects the stages at or below each copy index.
    """
    violations = verify_witness_laws(sys, fn, witness, universe)
    if violations:
        first = violations[0]
        raise ValueError(
            f"witness law ({first['clause']}) fails at "
            f"({seq_str(tuple(first['sigma']))}, {seq_str(tuple(first['tau']))}): "
            f"{first['detail']}"
        )
    adjusted: dict[Seq, OrdinalNotation] = {}
    for sigma in universe.all_seqs():
        o_val = witness.value(sigma)
        want = fn.value(sigma)
        if want not in (0, 1):
            raise ValueError(
                f"two-valued approximation required, got {want} at {seq_str(sigma)}"
            )
        if int(parity(o_val) != parity(eta)) == want:
            adjusted[sigma] = o_val
        else:
            adjusted[sigma] = successor(o_val)
        if compare(adjusted[sigma], eta) > 0:
            raise ValueError(
                f"adjusted witness exceeds eta at {seq_str(sigma)}"
            )
    if witness.copy is not None and compare(witness.eta, eta) == 0:
        copy = witness.copy
    else:
        copy = enum_copy(eta)
    if copy.size is not None:
        positions = copy.size
    else:
        below = [v for v in adjusted.values() if compare(v, eta) < 0]
        positions = max((copy.index_of(v) for v in below), default=-1) + 1
    family = []
    for n in range(positions):
        bound = copy.at_index(n)
        gens = frozenset(
            s for s, v in adjusted.items() if compare(v, bound) <= 0
        )
        family.append(UpsetRep(alpha, gens))
    return family


def difference_value(
    sys: TrueStageSystem,
    upsets: list[UpsetRep],
    eta: OrdinalNotation,
    x_prefix: Seq,
) -> int:
    """The parity rule: odd-side membership is decided by the least
    ordinal index whose set contains the point; outside them all, 0."""
    copy = enum_copy(eta)
    best: Optional[OrdinalNotation] = None
    for n, u in enumerate(upsets):
        if eval_at(sys, u, x_prefix):
            nu = copy.at_index(n)
            if best is None or compare(nu, best) < 0:
                best = nu
    if best is None:
        return 0
    return int(parity(best) != parity(eta))


class MindChangeTree(RankedTree):
    """The stages whose guess differs from their immediate predecessor's,
    wired up by longest tree predecessor."""

    def __init__(self, nodes: tuple[Seq, ...], parent: dict[Seq, Optional[Seq]],
                 level: OrdinalNotation):
        super().__init__(nodes, parent)
        self.level = level


def mind_change_tree(
    sys: TrueStageSystem, fn: ApproxFn, universe: Universe
) -> MindChangeTree:
    alpha = fn.level
    nodes: list[Seq] = [()]
    for sigma in universe.all_seqs():
        if sigma == ():
            continue
        chain = sys.chain(sigma, alpha)
        if fn.value(chain[-2]) != fn.value(sigma):
            nodes.append(sigma)
    node_set = set(nodes)
    parent: dict[Seq, Optional[Seq]] = {(): None}
    for sigma in nodes:
        if sigma == ():
            continue
        chain = sys.chain(sigma, alpha)
        above = [rho for rho in chain[:-1] if rho in node_set]
        parent[sigma] = above[-1]
    return MindChangeTree(tuple(nodes), parent, alpha)


def approx_to_witness(
    sys: TrueStageSystem, fn: ApproxFn, universe: Universe
) -> tuple[OrdinalNotation, WitnessFn]:
    """Rank the mind-change tree and read the witness off the longest
    tree predecessor of each stage.  Values stay strictly below eta, so
    the eta clause of the laws never fires."""
    tree = mind_change_tree(sys, fn, universe)
    eta, ranks = kb_rank(tree)
    node_set = set(tree.nodes)
    table: dict[Seq, OrdinalNotation] = {}
    for sigma in universe.all_seqs():
        chain = sys.chain(sigma, fn.level)
        on_tree = [rho for rho in chain if rho in node_set]
        table[sigma] = from_int(ranks[on_tree[-1]])
    return eta, WitnessFn(eta, enum_copy(eta), table)


# ---------------------------------------------------------------------------
# JSON forms.

def upset_to_json(upset: UpsetRep) -> dict:
    return {
        "level": render(upset.level),
        "generators": sorted(list(g) for g in upset.generators),
    }


def upset_from_json(data: dict) -> UpsetRep:
    return UpsetRep(
        parse_ordinal(data["level"]),
        frozenset(tuple(g) for g in data["generators"]),
    )


def approx_to_json(fn: ApproxFn) -> dict:
    return {
        "level": render(fn.level),
        "table": {seq_str(s): v for s, v in sorted(fn.table.items())},
    }


def approx_from_json(data: dict) -> ApproxFn:
    return ApproxFn(
        parse_ordinal(data["level"]),
        {parse_seq(k): int(v) for k, v in data["table"].items()},
    )


def witness_to_json(witness: WitnessFn) -> dict:
    return {
        "eta": render(witness.eta),
        "table": {seq_str(s): render(v) for s, v in sorted(witness.table.items())},
    }


def witness_from_json(data: dict) -> WitnessFn:
    eta = parse_ordinal(data["eta"])
    return WitnessFn(
        eta,
        enum_copy(eta),
        {parse_seq(k): parse_ordinal(v) for k, v in data["table"].items()},
    )
