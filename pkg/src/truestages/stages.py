"""Level-indexed apparent-truth relations on finite sequences.

At level 0 the relation is the prefix order.  At a successor level,
sigma stays true to tau when no intermediate stage's p-value dips below
sigma's own.  At a limit level the relation defers to the member of the
fundamental sequence picked out by sigma's height.  A guess string
packages, per chain element, a bound on the lower-level jump together
with the numbers known to lie inside it; flattening a guess produces
the oracle fed back to the operator to climb one level.
"""

from __future__ import annotations

import dataclasses
import functools
import threading
from fractions import Fraction
from typing import Iterable, Optional

from .jump import EnumerationOperator, JumpTrace, Seq, enumerate_jump
from .ordinals import OrdinalNotation, classify, compare, fund_seq, render, successor
from .universe import Universe


@dataclasses.dataclass(frozen=True)
class Block:
    """One chain element's guess: every e below the bound is declared in
    or out of the lower-level jump set by the members list."""

    p_bound: int
    members: tuple[int, ...] = ()

    def __post_init__(self):
        if list(self.members) != sorted(set(self.members)):
            raise ValueError("members must be strictly increasing")
        if self.members and self.members[-1] >= self.p_bound:
            raise ValueError("members must lie below the bound")

    def decides(self, e: int) -> bool:
        return 0 <= e < self.p_bound

    def bit(self, e: int) -> int:
        if not self.decides(e):
            raise ValueError(f"{e} is not below the bound {self.p_bound}")
        return int(e in self.members)


@dataclasses.dataclass(frozen=True)
class GuessString:
    level: OrdinalNotation
    blocks: tuple[Block, ...]

    def flatten(self) -> Seq:
        """Injective sequence encoding; the root block is dropped so the
        empty stage has an empty oracle at every level."""
        if self.level.is_zero():
            return tuple(b.p_bound for b in self.blocks[1:])
        out: list[int] = []
        for b in self.blocks[1:]:
            out.append(b.p_bound)
            out.append(len(b.members))
            out.extend(b.members)
        return tuple(out)

    def block_prefix_of(self, other: "GuessString") -> bool:
        return self.blocks == other.blocks[: len(self.blocks)]


class TrueStageSystem:
    """Memoizing evaluator for the level-indexed relations of one
    enumeration operator.  Memo access is serialized, so one instance
    may be shared across threads."""

    def __init__(self, operator: EnumerationOperator):
        self.operator = operator
        self._lock = threading.RLock()
        self._leq: dict[tuple[Seq, Seq, str], bool] = {}
        self._height: dict[tuple[Seq, str], int] = {}
        self._chain: dict[tuple[Seq, str], tuple[Seq, ...]] = {}
        self._guess: dict[tuple[Seq, str], GuessString] = {}
        self._trace: dict[tuple[Seq, str], JumpTrace] = {}

    def leq(self, sigma: Seq, tau: Seq, alpha: OrdinalNotation) -> bool:
        sigma, tau = tuple(sigma), tuple(tau)
        if sigma == tau:
            return True
        if tau[: len(sigma)] != sigma:
            return False
        with self._lock:
            key = (sigma, tau, render(alpha))
            hit = self._leq.get(key)
            if hit is not None:
                return hit
            cls = classify(alpha)
            if cls.kind == "zero":
                result = True
            elif cls.kind == "successor":
                beta = cls.predecessor
                if not self.leq(sigma, tau, beta):
                    result = False
                else:
                    floor = self.p(sigma, beta)
                    result = all(
                        self.p(rho, beta) >= floor
                        for rho in self.chain(tau, beta)
                        if len(rho) > len(sigma)
                    )
            else:
                k = self.height(sigma, alpha)
                result = self.leq(sigma, tau, fund_seq(alpha, k))
            self._leq[key] = result
            return result

    def height(self, sigma: Seq, alpha: OrdinalNotation) -> int:
        """Number of strict predecessors; at a limit this recursion only
        ever consults strictly shorter sequences."""
        sigma = tuple(sigma)
        with self._lock:
            key = (sigma, render(alpha))
            hit = self._height.get(key)
            if hit is not None:
                return hit
            h = sum(
                1 for i in range(len(sigma)) if self.leq(sigma[:i], sigma, alpha)
            )
            self._height[key] = h
            return h

    def chain(self, tau: Seq, alpha: OrdinalNotation) -> tuple[Seq, ...]:
        tau = tuple(tau)
        with self._lock:
            key = (tau, render(alpha))
            hit = self._chain.get(key)
            if hit is not None:
                return hit
            ch = tuple(
                tau[:i] for i in range(len(tau) + 1) if self.leq(tau[:i], tau, alpha)
            )
            self._chain[key] = ch
            return ch

    def guess(self, sigma: Seq, alpha: OrdinalNotation) -> GuessString:
        sigma = tuple(sigma)
        with self._lock:
            key = (sigma, render(alpha))
            hit = self._guess.get(key)
            if hit is not None:
                return hit
            ch = self.chain(sigma, alpha)
            cls = classify(alpha)
            blocks = [Block(0)]
            if cls.kind == "zero":
                blocks.extend(Block(rho[-1]) for rho in ch[1:])
            elif cls.kind == "successor":
                blocks.extend(self._block(rho, cls.predecessor) for rho in ch[1:])
            else:
                blocks.extend(
                    self._block(rho, fund_seq(alpha, self.height(rho, alpha)))
                    for rho in ch[1:]
                )
            g = GuessString(alpha, tuple(blocks))
            self._guess[key] = g
            return g

    def _block(self, rho: Seq, level: OrdinalNotation) -> Block:
        bound = self.p(rho, level)
        inside = tuple(
            sorted(e for e in self.trace_at(rho, level).codes if e < bound)
        )
        return Block(bound, inside)

    def oracle(self, sigma: Seq, alpha: OrdinalNotation) -> Seq:
        sigma = tuple(sigma)
        if alpha.is_zero():
            return sigma
        return self.guess(sigma, alpha).flatten()

    def trace_at(self, sigma: Seq, alpha: OrdinalNotation) -> JumpTrace:
        sigma = tuple(sigma)
        with self._lock:
            key = (sigma, render(alpha))
            hit = self._trace.get(key)
            if hit is not None:
                return hit
            trace = enumerate_jump(self.operator, self.oracle(sigma, alpha))
            self._trace[key] = trace
            return trace

    def p(self, sigma: Seq, alpha: OrdinalNotation) -> int:
        return self.trace_at(sigma, alpha).p

    def distance(self, sigma: Seq, tau: Seq, alpha: OrdinalNotation) -> Fraction:
        sigma, tau = tuple(sigma), tuple(tau)
        if sigma == tau:
            return Fraction(0)
        common = [
            rho for rho in self.chain(sigma, alpha) if self.leq(rho, tau, alpha)
        ]
        return Fraction(1, 2 ** len(common[-1]))


# Module-level entry points mirroring the method surface.

def ts_leq(sys: TrueStageSystem, sigma: Seq, tau: Seq, alpha: OrdinalNotation) -> bool:
    return sys.leq(sigma, tau, alpha)


def ts_height(sys: TrueStageSystem, sigma: Seq, alpha: OrdinalNotation) -> int:
    return sys.height(sigma, alpha)


def ts_chain(sys: TrueStageSystem, tau: Seq, alpha: OrdinalNotation) -> tuple[Seq, ...]:
    return sys.chain(tau, alpha)


def ts_p(sys: TrueStageSystem, sigma: Seq, alpha: OrdinalNotation) -> int:
    return sys.p(sigma, alpha)


def ts_guess(sys: TrueStageSystem, sigma: Seq, alpha: OrdinalNotation) -> GuessString:
    return sys.guess(sigma, alpha)


def ts_distance(
    sys: TrueStageSystem, sigma: Seq, tau: Seq, alpha: OrdinalNotation
) -> Fraction:
    return sys.distance(sigma, tau, alpha)


# ---------------------------------------------------------------------------
# The property verifier.

@dataclasses.dataclass
class PropertyResult:
    name: str
    passed: bool = True
    checked: int = 0
    failures: int = 0
    counterexamples: list[dict] = dataclasses.field(default_factory=list)


@dataclasses.dataclass
class PropertyReport:
    results: dict[str, PropertyResult]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results.values())

    def summary_lines(self) -> list[str]:
        lines = []
        for r in self.results.values():
            if r.passed:
                lines.append(f"{r.name}: pass ({r.checked} checks)")
            else:
                lines.append(f"{r.name}: FAIL ({r.failures} of {r.checked} checks)")
        return lines


def _example(res: PropertyResult, cap: int, **data) -> None:
    res.passed = False
    res.failures += 1
    if len(res.counterexamples) < cap:
        res.counterexamples.append(
            {k: (render(v) if isinstance(v, OrdinalNotation) else
                 list(v) if isinstance(v, tuple) else v)
             for k, v in data.items()}
        )


def ts_verify(
    sys: TrueStageSystem,
    universe: Universe,
    levels: Iterable[OrdinalNotation],
    window: int = 4,
    max_counterexamples: int = 5,
) -> PropertyReport:
    """Exhaustively check the order axioms on a finite universe.

    Failures are recorded, never raised; a corrupted operator shows up
    as counterexample entries in the report.
    """
    levels = list(levels)
    seqs = universe.all_seqs()
    pairs = list(universe.prefix_pairs())
    cap = max_counterexamples
    report = PropertyReport(results={})

    def fresh(name: str) -> PropertyResult:
        res = PropertyResult(name)
        report.results[name] = res
        return res

    # TS1: the relation refines the prefix order.
    res = fresh("TS1")
    for alpha in levels:
        for sigma in seqs:
            for tau in seqs:
                res.checked += 1
                if sys.leq(sigma, tau, alpha) and tau[: len(sigma)] != sigma:
                    _example(res, cap, alpha=alpha, sigma=sigma, tau=tau,
                             detail="related but not a prefix")

    # TS2: predecessor sets are chains rooted at the empty sequence.
    res = fresh("TS2")
    for alpha in levels:
        for tau in seqs:
            ch = sys.chain(tau, alpha)
            res.checked += 1
            if not ch or ch[0] != ():
                _example(res, cap, alpha=alpha, tau=tau,
                         detail="chain does not start at the root")
                continue
            for i in range(len(ch)):
                for j in range(i + 1, len(ch)):
                    res.checked += 1
                    if not sys.leq(ch[i], ch[j], alpha):
                        _example(res, cap, alpha=alpha, tau=tau,
                                 sigma=ch[i], rho=ch[j],
                                 detail="chain elements incomparable")

    # TS5: higher levels refine lower ones (consecutive listed levels).
    res = fresh("TS5")
    ordered = sorted(levels, key=_level_key)
    for lo, hi in zip(ordered, ordered[1:]):
        for sigma, tau in pairs:
            res.checked += 1
            if sys.leq(sigma, tau, hi) and not sys.leq(sigma, tau, lo):
                _example(res, cap, low=lo, high=hi, sigma=sigma, tau=tau,
                         detail="related at the higher level only")

    # TS7-consistency: successor levels re-derived straight-line, and
    # jump traces must extend along every related pair (the enumeration
    # presupposition behind p; a non-monotone operator fails here).
    res = fresh("TS7-consistency")
    for alpha in levels:
        cls = classify(alpha)
        if cls.kind != "successor":
            continue
        beta = cls.predecessor
        for sigma, tau in pairs:
            res.checked += 1
            if sigma == tau:
                expected = True
            else:
                ch = sys.chain(tau, beta)
                if sigma not in ch:
                    expected = False
                else:
                    floor = sys.p(sigma, beta)
                    expected = all(
                        sys.p(rho, beta) >= floor
                        for rho in ch
                        if len(rho) > len(sigma)
                    )
            if sys.leq(sigma, tau, alpha) != expected:
                _example(res, cap, alpha=alpha, sigma=sigma, tau=tau,
                         detail="successor formula disagrees")
    for alpha in levels:
        for sigma, tau in pairs:
            if sigma == tau or not sys.leq(sigma, tau, alpha):
                continue
            res.checked += 1
            if not sys.trace_at(tau, alpha).extends(sys.trace_at(sigma, alpha)):
                _example(res, cap, alpha=alpha, sigma=sigma, tau=tau,
                         detail="jump trace not extended along the chain")

    # Club: between levels alpha and alpha+1, truth cannot skip over an
    # intermediate stage.
    res = fresh("club")
    for alpha in levels:
        up = successor(alpha)
        for tau in seqs:
            ch = sys.chain(tau, alpha)
            for i in range(len(ch)):
                for j in range(i + 1, len(ch)):
                    res.checked += 1
                    if sys.leq(ch[i], tau, up) and not sys.leq(ch[i], ch[j], up):
                        _example(res, cap, alpha=alpha, sigma=ch[i],
                                 rho=ch[j], tau=tau,
                                 detail="skipped an intermediate stage")

    # TS3 finite analog: on each maximal sequence the apparently true
    # stages are pairwise comparable.
    res = fresh("TS3-finite")
    for alpha in levels:
        for tau in universe.maximal():
            ch = sys.chain(tau, alpha)
            for i in range(len(ch)):
                for j in range(i + 1, len(ch)):
                    res.checked += 1
                    if not (sys.leq(ch[i], ch[j], alpha)
                            or sys.leq(ch[j], ch[i], alpha)):
                        _example(res, cap, alpha=alpha, tau=tau,
                                 sigma=ch[i], rho=ch[j],
                                 detail="true stages incomparable")

    # TS9 stabilization: past the height index, the limit answer must
    # not flicker within the test window.
    res = fresh("TS9-stabilization")
    for lam in levels:
        if classify(lam).kind != "limit":
            continue
        for sigma, tau in pairs:
            if sigma == tau:
                continue
            res.checked += 1
            k = sys.height(sigma, lam)
            base = sys.leq(sigma, tau, fund_seq(lam, k))
            for j in range(k + 1, k + window + 1):
                if sys.leq(sigma, tau, fund_seq(lam, j)) != base:
                    _example(res, cap, lam=lam, sigma=sigma, tau=tau,
                             k=k, j=j, detail="answer flickers past the height")
                    break

    return report


_level_key = functools.cmp_to_key(compare)
