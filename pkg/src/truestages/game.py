"""A two-player separation game with an open winning condition.

Player I builds a sequence x one entry at a time; player II answers with
pairs (y, z).  A fixed upward-closed set W gives each finite x an opinion,
and II is graded only at the stages that currently look true and share
that opinion: the referee collects z-entries at those stages and asks
whether the collected pair still lies in the corresponding tree T0 or T1.
The referee check is open for player I, so bounded-depth play is exactly
solvable by backward induction.

A strategy for player I pulls the true-stage relations back onto the
candidate second coordinates that II might play.  The resulting
correctness predicates, the extension search, the evidence search for
the separating set, and the adversarial play that tries to defeat a
winning strategy are all implemented here at finite scale.
"""

from __future__ import annotations

import dataclasses
import itertools
import threading
from typing import Callable, Optional, Union

from .hierarchy import UpsetRep, eval_at, upset_from_json, upset_to_json
from .jump import Seq
from .ordinals import (
    OrdinalNotation,
    ZERO,
    classify,
    compare,
    fund_seq,
    parse_ordinal,
    render,
)
from .stages import TrueStageSystem
from .universe import seq_str


class StrategyUndefinedError(ValueError):
    """A strategy table was consulted at a play it does not cover."""


class ResourceBoundError(RuntimeError):
    """The solver exceeded its node budget before reaching an answer."""


class _PreRoot:
    def __repr__(self) -> str:
        return "pre-root"


# Distinguished token preceding the empty sequence; by convention its
# length is -1 and every strategy answers it with the empty play.
PRE_ROOT = _PreRoot()

Node = Union[Seq, _PreRoot]
Pair = tuple[int, int]


@dataclasses.dataclass(frozen=True)
class PairTree:
    """A tree of equal-length sequence pairs, or the full such tree.

    Explicit trees must be closed under simultaneous truncation; use
    from_pairs to close an arbitrary pair set.
    """

    full: bool = False
    pairs: frozenset[tuple[Seq, Seq]] = frozenset()

    def __post_init__(self) -> None:
        if self.full and self.pairs:
            raise ValueError("a full tree must not list explicit pairs")
        for y, z in self.pairs:
            if len(y) != len(z):
                raise ValueError(f"pair lengths differ: {seq_str(y)}, {seq_str(z)}")
            if y and (y[:-1], z[:-1]) not in self.pairs:
                raise ValueError(
                    f"tree is not truncation-closed at ({seq_str(y)}, {seq_str(z)})"
                )

    @staticmethod
    def from_pairs(pairs) -> "PairTree":
        closed = set()
        for y, z in pairs:
            y, z = tuple(y), tuple(z)
            if len(y) != len(z):
                raise ValueError(f"pair lengths differ: {seq_str(y)}, {seq_str(z)}")
            for j in range(len(y) + 1):
                closed.add((y[:j], z[:j]))
        return PairTree(pairs=frozenset(closed))

    def contains(self, ybar: Seq, zbar: Seq) -> bool:
        if len(ybar) != len(zbar):
            return False
        if self.full:
            return True
        return (tuple(ybar), tuple(zbar)) in self.pairs


@dataclasses.dataclass(frozen=True)
class GameInstance:
    """Game data: the opinion set W at level xi, the two pair trees, and
    the bounds within which plays are enumerated.

    W is represented by generators, so it is upward closed in the
    level-xi relation by construction.
    """

    xi: OrdinalNotation
    w: UpsetRep
    t0: PairTree
    t1: PairTree
    alphabet: int
    depth: int

    def __post_init__(self) -> None:
        if compare(self.w.level, self.xi) != 0:
            raise ValueError(
                f"W lives at level {render(self.w.level)}, expected {render(self.xi)}"
            )
        if self.alphabet < 1:
            raise ValueError("alphabet bound must be positive")
        if self.depth < 1:
            raise ValueError("depth bound must be positive")


@dataclasses.dataclass(frozen=True)
class PartialPlay:
    """Position at the start of one of player I's turns: I has played xs
    and II has answered with the pairs in yzs."""

    xs: Seq
    yzs: tuple[Pair, ...]


@dataclasses.dataclass(frozen=True)
class RefereeVerdict:
    f_indices: tuple[int, ...]
    ybar: Seq
    zbar: Seq
    status: str  # "IWon" or "Continues"


def referee(sys: TrueStageSystem, g: GameInstance, play: PartialPlay) -> RefereeVerdict:
    """Grade a position.

    The index set F keeps the 1-based rounds i whose prefix of x looks
    true at level xi now (and shares x's opinion about W when x has one).
    II is judged on the first |F| y-entries together with the z-entries
    from exactly the rounds in F.
    """
    n = len(play.xs)
    if len(play.yzs) != n:
        raise ValueError(
            f"player I has made {n} moves but player II has made {len(play.yzs)}"
        )
    if n < 1:
        raise ValueError("referee needs at least one completed round")
    xbar = tuple(play.xs)
    in_w = eval_at(sys, g.w, xbar)
    if in_w:
        f = [
            i for i in range(1, n + 1)
            if sys.leq(xbar[:i], xbar, g.xi) and eval_at(sys, g.w, xbar[:i])
        ]
    else:
        f = [i for i in range(1, n + 1) if sys.leq(xbar[:i], xbar, g.xi)]
    ybar = tuple(play.yzs[i][0] for i in range(len(f)))
    zbar = tuple(play.yzs[a - 1][1] for a in f)
    tree = g.t1 if in_w else g.t0
    status = "Continues" if tree.contains(ybar, zbar) else "IWon"
    return RefereeVerdict(tuple(f), ybar, zbar, status)


@dataclasses.dataclass(frozen=True)
class StrategyTable:
    """A deterministic strategy, keyed by the opponent's moves so far.

    For side I a key is the tuple of (y, z) pairs played by II and the
    value is the next x.  For side II a key is the tuple of x values
    played by I (the last one unanswered) and the value is a (y, z)
    pair.  The player's own earlier moves are recovered by replay, so
    they are not part of the key.  An optional fallback callable serves
    plays outside the table.
    """

    side: str  # "I" or "II"
    depth: int
    moves: dict
    fallback: Optional[Callable] = None

    def __post_init__(self) -> None:
        if self.side not in ("I", "II"):
            raise ValueError(f"unknown side {self.side!r}")

    def move_at(self, key: tuple):
        if key in self.moves:
            return self.moves[key]
        if self.fallback is not None:
            return self.fallback(key)
        raise StrategyUndefinedError(
            f"side {self.side} strategy is undefined after opponent moves {key!r}"
        )


def apply_strategy(table: StrategyTable, y_prefix: Seq, sigma: Node) -> Seq:
    """The x-sequence player I produces against the pair play (y, sigma).

    The pre-root token yields the empty sequence; otherwise the result
    has length |sigma| + 1 because I moves first and answers every pair.
    """
    if table.side != "I":
        raise ValueError("apply_strategy needs a side I strategy")
    if sigma is PRE_ROOT:
        return ()
    sigma = tuple(sigma)
    if len(y_prefix) < len(sigma):
        raise ValueError(
            f"need {len(sigma)} values of y, got {len(y_prefix)}"
        )
    xs: list[int] = []
    yzs: tuple[Pair, ...] = ()
    for i in range(len(sigma) + 1):
        xs.append(table.move_at(yzs))
        if i < len(sigma):
            yzs = yzs + ((y_prefix[i], sigma[i]),)
    return tuple(xs)


@dataclasses.dataclass(frozen=True)
class SolveResult:
    status: str  # "IWins" or "Undetermined"
    strategy: StrategyTable
    by_turn: Optional[int] = None


def solve(
    sys: TrueStageSystem,
    g: GameInstance,
    depth: Optional[int] = None,
    max_nodes: int = 1_000_000,
) -> SolveResult:
    """Exhaustive backward induction within the instance bounds.

    IWins carries the least round by which player I can force a win and
    a strategy achieving it (ties broken by least move).  Undetermined
    carries a player II strategy surviving to the depth bound; an open
    win for II is not certifiable at finite depth, so no stronger claim
    is made.
    """
    if depth is None:
        depth = g.depth
    b = g.alphabet
    nodes = 0
    i_choice: dict[tuple, int] = {}
    ii_choice: dict[tuple, Pair] = {}

    def value(xs: Seq, yzs: tuple[Pair, ...]) -> Optional[int]:
        nonlocal nodes
        n = len(xs)
        if n == depth:
            return None
        best: Optional[tuple[int, int]] = None
        for x in range(b):
            xs2 = xs + (x,)
            worst = 0
            surviving: Optional[Pair] = None
            for y in range(b):
                if surviving is not None:
                    break
                for z in range(b):
                    nodes += 1
                    if nodes > max_nodes:
                        raise ResourceBoundError(
                            f"solver exceeded {max_nodes} referee evaluations"
                        )
                    yzs2 = yzs + ((y, z),)
                    verdict = referee(sys, g, PartialPlay(xs2, yzs2))
                    if verdict.status == "IWon":
                        worst = max(worst, n + 1)
                        continue
                    sub = value(xs2, yzs2)
                    if sub is None:
                        surviving = (y, z)
                        break
                    worst = max(worst, sub)
            if surviving is None:
                if best is None or (worst, x) < best:
                    best = (worst, x)
            else:
                ii_choice[(xs, yzs, x)] = surviving
        if best is None:
            return None
        i_choice[(xs, yzs)] = best[1]
        return best[0]

    root = value((), ())
    if root is not None:
        moves: dict = {}

        def fill_i(xs: Seq, yzs: tuple[Pair, ...]) -> None:
            x = i_choice[(xs, yzs)]
            moves[yzs] = x
            xs2 = xs + (x,)
            for y in range(b):
                for z in range(b):
                    yzs2 = yzs + ((y, z),)
                    if referee(sys, g, PartialPlay(xs2, yzs2)).status == "IWon":
                        continue
                    fill_i(xs2, yzs2)

        fill_i((), ())
        return SolveResult("IWins", StrategyTable("I", depth, moves), by_turn=root)

    moves = {}

    def fill_ii(xs: Seq, yzs: tuple[Pair, ...]) -> None:
        if len(xs) == depth:
            return
        for x in range(b):
            reply = ii_choice[(xs, yzs, x)]
            moves[xs + (x,)] = reply
            fill_ii(xs + (x,), yzs + (reply,))

    fill_ii((), ())
    return SolveResult("Undetermined", StrategyTable("II", depth, moves))


def extract_reduction(
    g: GameInstance, table: StrategyTable, x_prefix: Seq
) -> tuple[Seq, Seq]:
    """Player II's answers along x_prefix, split into the y and z parts.

    The result is prefix-monotone in x_prefix, which is the finite trace
    of the continuous reduction a surviving II strategy induces.
    """
    if table.side != "II":
        raise ValueError("extract_reduction needs a side II strategy")
    xs: Seq = ()
    ys: list[int] = []
    zs: list[int] = []
    for x in x_prefix:
        xs = xs + (x,)
        y, z = table.move_at(xs)
        ys.append(y)
        zs.append(z)
    return tuple(ys), tuple(zs)


@dataclasses.dataclass(frozen=True)
class ExtendResult:
    status: str  # "Found" or "BoundExhausted"
    tau: Optional[Seq] = None


@dataclasses.dataclass(frozen=True)
class EvidenceResult:
    status: str  # "Evidence" or "NoneWithin"
    sigma: Optional[Seq] = None


class CorrectnessChecker:
    """Correctness predicates for II's candidate plays against a fixed
    side I strategy.

    The strategy pulls the stage relations back onto candidate second
    coordinates: sigma precedes tau at level alpha when sigma is a
    prefix of tau and the induced x-sequences are stage-related.  A
    sequence is 0-correct when the referee lets the induced play run;
    higher levels follow the stage recursion.  At limit levels the
    unbounded quantifier over lower levels is checked on the first
    limit_window fundamental-sequence levels plus the one selected by
    the height of the induced play; results are memoised under a lock
    so callers may share a checker across threads.
    """

    def __init__(
        self,
        sys: TrueStageSystem,
        game: GameInstance,
        table: StrategyTable,
        limit_window: int = 4,
    ) -> None:
        if table.side != "I":
            raise ValueError("correctness analysis needs a side I strategy")
        self.sys = sys
        self.game = game
        self.table = table
        self.limit_window = limit_window
        self._lock = threading.RLock()
        self._plays: dict = {}
        self._correct: dict = {}
        self._strong: dict = {}

    # -- induced plays ------------------------------------------------

    def play(self, y_prefix: Seq, sigma: Node) -> Seq:
        if sigma is PRE_ROOT:
            return ()
        key = (tuple(y_prefix[: len(sigma)]), tuple(sigma))
        with self._lock:
            if key not in self._plays:
                self._plays[key] = apply_strategy(self.table, key[0], key[1])
            return self._plays[key]

    def tri_leq(self, y_prefix: Seq, sigma: Node, tau: Node, alpha: OrdinalNotation) -> bool:
        if not _prefix_of(sigma, tau):
            return False
        return self.sys.leq(self.play(y_prefix, sigma), self.play(y_prefix, tau), alpha)

    # -- correctness --------------------------------------------------

    def is_correct(self, y_prefix: Seq, sigma: Node, alpha: OrdinalNotation) -> bool:
        key = self._key(y_prefix, sigma, alpha)
        with self._lock:
            if key in self._correct:
                return self._correct[key]
            cls = classify(alpha)
            if cls.kind == "zero":
                out = self._zero_correct(y_prefix, sigma)
            elif cls.kind == "successor":
                beta = cls.predecessor
                out = self.is_strongly_correct(y_prefix, sigma, beta)
                if out:
                    for tau in _closure(sigma):
                        if not self.tri_leq(y_prefix, tau, sigma, beta):
                            continue
                        if not self.is_strongly_correct(y_prefix, tau, beta):
                            continue
                        if not self.tri_leq(y_prefix, tau, sigma, alpha):
                            out = False
                            break
            else:
                k = self.sys.height(self.play(y_prefix, sigma), alpha)
                indices = sorted(set(range(self.limit_window)) | {k})
                out = all(
                    self.is_correct(y_prefix, sigma, fund_seq(alpha, j))
                    for j in indices
                )
            self._correct[key] = out
            return out

    def is_strongly_correct(self, y_prefix: Seq, sigma: Node, alpha: OrdinalNotation) -> bool:
        key = self._key(y_prefix, sigma, alpha)
        with self._lock:
            if key in self._strong:
                return self._strong[key]
            out = True
            for tau in _closure(sigma):
                if self.tri_leq(y_prefix, tau, sigma, alpha):
                    if not self.is_correct(y_prefix, tau, alpha):
                        out = False
                        break
            self._strong[key] = out
            return out

    def _zero_correct(self, y_prefix: Seq, sigma: Node) -> bool:
        if sigma is PRE_ROOT:
            return True
        xs: list[int] = []
        yzs: tuple[Pair, ...] = ()
        for i in range(len(sigma)):
            xs.append(self.table.move_at(yzs))
            yzs = yzs + ((y_prefix[i], sigma[i]),)
            verdict = referee(self.sys, self.game, PartialPlay(tuple(xs), yzs))
            if verdict.status == "IWon":
                return False
        return True

    def _key(self, y_prefix: Seq, sigma: Node, alpha: OrdinalNotation) -> tuple:
        if sigma is PRE_ROOT:
            return ((), PRE_ROOT, render(alpha))
        sigma = tuple(sigma)
        return (tuple(y_prefix[: len(sigma)]), sigma, render(alpha))

    # -- extension search ---------------------------------------------

    def extend_correct(
        self,
        y_prefix: Seq,
        rho: Node,
        sigma: Seq,
        alpha: OrdinalNotation,
        search_bound: int,
        minimal_length: bool = False,
    ) -> ExtendResult:
        """Search for a strongly alpha-correct extension of sigma.

        The default search follows the extension argument: recurse one
        level down, then minimise the p-value at a successor or take a
        related-minimal candidate at a limit, verifying the pick and
        falling back to a shortest-first scan.  With minimal_length the
        shortest-first scan is used directly, which is what the
        defeating-play construction needs.  BoundExhausted reports an
        exhausted search space, not nonexistence.
        """
        sigma = tuple(sigma)
        if rho is PRE_ROOT:
            extends = sigma == ()
        else:
            rho = tuple(rho)
            extends = len(sigma) == len(rho) + 1 and sigma[: len(rho)] == rho
        if not extends:
            raise ValueError("sigma must be a one-element extension of rho")
        if not self.is_strongly_correct(y_prefix, rho, alpha):
            raise ValueError(f"rho is not strongly {render(alpha)}-correct")
        if not self.is_correct(y_prefix, sigma, ZERO):
            raise ValueError("sigma is not 0-correct")
        cls = classify(alpha)
        if cls.kind == "zero":
            return ExtendResult("Found", sigma)
        candidates = list(self._extensions(sigma, search_bound, len(y_prefix)))
        if minimal_length:
            for tau in candidates:
                if self.is_strongly_correct(y_prefix, tau, alpha):
                    return ExtendResult("Found", tau)
            return ExtendResult("BoundExhausted")
        if cls.kind == "successor":
            beta = cls.predecessor
            pool = [
                tau for tau in candidates
                if self.is_strongly_correct(y_prefix, tau, beta)
            ]
            if pool:
                best = min(
                    pool,
                    key=lambda t: (self.sys.p(self.play(y_prefix, t), beta), len(t), t),
                )
                if self.is_strongly_correct(y_prefix, best, alpha):
                    return ExtendResult("Found", best)
        else:
            k = self.sys.height(self.play(y_prefix, rho), alpha) + 1
            level = fund_seq(alpha, k)
            pool = [
                tau for tau in candidates
                if self.is_strongly_correct(y_prefix, tau, level)
            ]
            minimal = [
                t for t in pool
                if not any(u != t and self.tri_leq(y_prefix, u, t, level) for u in pool)
            ]
            if minimal:
                if self.is_strongly_correct(y_prefix, minimal[0], alpha):
                    return ExtendResult("Found", minimal[0])
        for tau in pool:
            if self.is_strongly_correct(y_prefix, tau, alpha):
                return ExtendResult("Found", tau)
        return ExtendResult("BoundExhausted")

    def _extensions(self, sigma: Seq, search_bound: int, y_len: int):
        for extra in range(search_bound):
            if len(sigma) + extra > y_len:
                return
            for suffix in itertools.product(range(self.game.alphabet), repeat=extra):
                yield sigma + suffix

    # -- evidence for the separating set ------------------------------

    def separator_evidence(self, y_prefix: Seq, length_bound: int) -> EvidenceResult:
        """Shortest strongly xi-correct sigma whose induced play lands
        in W, scanning lengths up to length_bound.  NoneWithin is a
        bounded negative, not a nonmembership claim."""
        xi = self.game.xi
        top = min(length_bound, len(y_prefix))
        for n in range(top + 1):
            for sigma in itertools.product(range(self.game.alphabet), repeat=n):
                if not eval_at(self.sys, self.game.w, self.play(y_prefix, sigma)):
                    continue
                if self.is_strongly_correct(y_prefix, sigma, xi):
                    return EvidenceResult("Evidence", sigma)
        return EvidenceResult("NoneWithin")


def _prefix_of(sigma: Node, tau: Node) -> bool:
    if sigma is PRE_ROOT:
        return True
    if tau is PRE_ROOT:
        return False
    sigma, tau = tuple(sigma), tuple(tau)
    return tau[: len(sigma)] == sigma


def _closure(sigma: Node) -> list[Node]:
    """The pre-root token and every prefix of sigma, sigma included."""
    out: list[Node] = [PRE_ROOT]
    if sigma is not PRE_ROOT:
        sigma = tuple(sigma)
        out.extend(sigma[:i] for i in range(len(sigma) + 1))
    return out


@dataclasses.dataclass(frozen=True)
class PlayStep:
    index: int
    sigma: Seq
    strongly_correct: bool
    appended_matches: Optional[bool]
    witness_set_matches: bool
    witness_consistent: Optional[bool]


@dataclasses.dataclass(frozen=True)
class PlayTranscript:
    mode: str  # "T1" or "T0"
    steps: tuple[PlayStep, ...]
    outcome: str
    failed_extension: Optional[Seq] = None


def adversarial_play(
    checker: CorrectnessChecker,
    y_prefix: Seq,
    v_prefix: Optional[Seq],
    depth: int,
    search_bound: int,
) -> PlayTranscript:
    """Try to defeat a side I strategy along y.

    With v given (the T1 case) the start is the least separator
    evidence and each step appends the next v entry; without v (the T0
    case) the start is the least strongly correct sequence and each
    step appends the least entry that stays 0-correct.  Every step
    records the construction invariants: strong correctness, the
    appended entry, the predecessor-set identity, and in the T1 case
    whether (y, v) is still inside T1.  Against a strategy that wins by
    round d the construction must halt before d surviving steps.
    """
    g = checker.game
    xi = g.xi
    if v_prefix is not None:
        mode = "T1"
        found = checker.separator_evidence(y_prefix, len(y_prefix))
        if found.status != "Evidence":
            return PlayTranscript(mode, (), "NoEvidence")
        sigma = found.sigma
    else:
        mode = "T0"
        sigma = None
        for n in range(len(y_prefix) + 1):
            for cand in itertools.product(range(g.alphabet), repeat=n):
                if checker.is_strongly_correct(y_prefix, cand, xi):
                    sigma = cand
                    break
            if sigma is not None:
                break
        if sigma is None:
            return PlayTranscript(mode, (), "NoStronglyCorrectStart")

    sigmas = [sigma]
    steps = [_record(checker, mode, y_prefix, v_prefix, sigmas, None)]
    outcome = "ReachedDepth"
    failed: Optional[Seq] = None
    for i in range(depth):
        if v_prefix is not None:
            if i >= len(v_prefix) or len(sigma) + 1 > len(y_prefix):
                outcome = "WitnessExhausted"
                break
            vi = v_prefix[i]
            tau = sigma + (vi,)
            if not checker.is_correct(y_prefix, tau, ZERO):
                outcome = "PlayerIWon"
                failed = tau
                break
        else:
            tau = None
            if len(sigma) + 1 > len(y_prefix):
                outcome = "WitnessExhausted"
                break
            for u in range(g.alphabet):
                cand = sigma + (u,)
                if checker.is_correct(y_prefix, cand, ZERO):
                    tau = cand
                    vi = u
                    break
            if tau is None:
                outcome = "PlayerIWon"
                failed = sigma + (g.alphabet - 1,)
                break
        ext = checker.extend_correct(
            y_prefix, sigma, tau, xi, search_bound, minimal_length=True
        )
        if ext.status != "Found":
            outcome = "BoundExhausted"
            break
        sigma = ext.tau
        sigmas.append(sigma)
        steps.append(_record(checker, mode, y_prefix, v_prefix, sigmas, vi))
    return PlayTranscript(mode, tuple(steps), outcome, failed_extension=failed)


def _record(
    checker: CorrectnessChecker,
    mode: str,
    y_prefix: Seq,
    v_prefix: Optional[Seq],
    sigmas: list[Seq],
    appended: Optional[int],
) -> PlayStep:
    xi = checker.game.xi
    sigma = sigmas[-1]
    index = len(sigmas) - 1
    if appended is None:
        appended_matches = None
    else:
        appended_matches = sigma[len(sigmas[-2])] == appended
    related = set()
    for i in range(len(sigma) + 1):
        rho = sigma[:i]
        if not checker.tri_leq(y_prefix, rho, sigma, xi):
            continue
        if mode == "T1" and not eval_at(
            checker.sys, checker.game.w, checker.play(y_prefix, rho)
        ):
            continue
        related.add(rho)
    witness_set_matches = related == set(sigmas)
    if mode == "T1" and index > 0:
        witness_consistent = checker.game.t1.contains(
            tuple(y_prefix[:index]), tuple(v_prefix[:index])
        )
    else:
        witness_consistent = None
    return PlayStep(
        index=index,
        sigma=sigma,
        strongly_correct=checker.is_strongly_correct(y_prefix, sigma, xi),
        appended_matches=appended_matches,
        witness_set_matches=witness_set_matches,
        witness_consistent=witness_consistent,
    )


def pair_tree_to_json(tree: PairTree) -> dict:
    if tree.full:
        return {"full": True}
    return {
        "pairs": [
            [list(y), list(z)] for y, z in sorted(tree.pairs)
        ]
    }


def pair_tree_from_json(data: dict) -> PairTree:
    if data.get("full"):
        return PairTree(full=True)
    return PairTree.from_pairs(
        (tuple(y), tuple(z)) for y, z in data.get("pairs", [])
    )


def game_to_json(g: GameInstance) -> dict:
    return {
        "xi": render(g.xi),
        "W": upset_to_json(g.w),
        "T0": pair_tree_to_json(g.t0),
        "T1": pair_tree_to_json(g.t1),
        "bounds": {"alphabet": g.alphabet, "depth": g.depth},
    }


def game_from_json(data: dict) -> GameInstance:
    return GameInstance(
        xi=parse_ordinal(data["xi"]),
        w=upset_from_json(data["W"]),
        t0=pair_tree_from_json(data["T0"]),
        t1=pair_tree_from_json(data["T1"]),
        alphabet=data["bounds"]["alphabet"],
        depth=data["bounds"]["depth"],
    )


def strategy_to_json(table: StrategyTable) -> dict:
    if table.side == "I":
        moves = [
            [[list(p) for p in key], x] for key, x in sorted(table.moves.items())
        ]
    else:
        moves = [
            [list(key), list(yz)] for key, yz in sorted(table.moves.items())
        ]
    return {"side": table.side, "depth": table.depth, "moves": moves}


def strategy_from_json(data: dict) -> StrategyTable:
    side = data["side"]
    moves: dict = {}
    for key, move in data["moves"]:
        if side == "I":
            moves[tuple(tuple(p) for p in key)] = move
        else:
            moves[tuple(key)] = tuple(move)
    return StrategyTable(side, data["depth"], moves)


def transcript_to_json(t: PlayTranscript) -> dict:
    return {
        "mode": t.mode,
        "outcome": t.outcome,
        "failedExtension": None if t.failed_extension is None else list(t.failed_extension),
        "steps": [
            {
                "index": s.index,
                "sigma": list(s.sigma),
                "stronglyCorrect": s.strongly_correct,
                "appendedMatches": s.appended_matches,
                "witnessSetMatches": s.witness_set_matches,
                "witnessConsistent": s.witness_consistent,
            }
            for s in t.steps
        ],
    }
