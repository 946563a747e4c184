"""Ordinal notations in Cantor normal form, canonical copies, and
Kleene-Brouwer ranks of finite trees.

A notation is a finite sum of terms ``w^e * c`` with exponents that are
themselves notations, strictly decreasing along the sum, and positive
integer coefficients.  The empty sum is zero.  The concrete syntax is

    expr := term ("+" term)*
    term := "w" ["^" expr] ["*" nat] | nat

with no whitespace.  Rendering always emits the minimal form, so
``w^1`` renders back as ``w`` and coefficients of one are dropped.

By default constructors accept notations up to ``w^w``; call
:func:`set_ceiling` to raise or remove the bound.
"""

from __future__ import annotations

import dataclasses
import itertools
from typing import Callable, Iterator, Optional


class ParseError(ValueError):
    """Raised on malformed notation text; carries the failing position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class CeilingError(ValueError):
    """Raised when a constructed notation exceeds the configured ceiling."""


_CEILING: Optional["OrdinalNotation"] = None


@dataclasses.dataclass(frozen=True)
class OrdinalNotation:
    """Cantor normal form: a tuple of (exponent, coefficient) pairs."""

    terms: tuple[tuple["OrdinalNotation", int], ...] = ()

    def __post_init__(self):
        prev = None
        for exp, coeff in self.terms:
            if not isinstance(coeff, int) or coeff < 1:
                raise ValueError(f"coefficient must be a positive int, got {coeff!r}")
            if prev is not None and compare(exp, prev) >= 0:
                raise ValueError("exponents must be strictly decreasing")
            prev = exp
        if _CEILING is not None and compare(self, _CEILING) > 0:
            raise CeilingError(
                f"notation {render(self)} exceeds the ceiling {render(_CEILING)}"
            )

    def is_zero(self) -> bool:
        return not self.terms

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero())

    def as_int(self) -> int:
        if self.is_zero():
            return 0
        if not self.is_finite():
            raise ValueError(f"{render(self)} is not finite")
        return self.terms[0][1]

    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"OrdinalNotation[{render(self)}]"

    def __lt__(self, other: "OrdinalNotation") -> bool:
        return compare(self, other) < 0

    def __le__(self, other: "OrdinalNotation") -> bool:
        return compare(self, other) <= 0

    def __gt__(self, other: "OrdinalNotation") -> bool:
        return compare(self, other) > 0

    def __ge__(self, other: "OrdinalNotation") -> bool:
        return compare(self, other) >= 0


ZERO = OrdinalNotation()
ONE = OrdinalNotation(((ZERO, 1),))
OMEGA = OrdinalNotation(((ONE, 1),))


def from_int(n: int) -> OrdinalNotation:
    if n < 0:
        raise ValueError("naturals only")
    return ZERO if n == 0 else OrdinalNotation(((ZERO, n),))


def compare(a: OrdinalNotation, b: OrdinalNotation) -> int:
    """Total order on notations: -1, 0, or 1."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        c = compare(ea, eb)
        if c != 0:
            return c
        if ca != cb:
            return -1 if ca < cb else 1
    if len(a.terms) != len(b.terms):
        return -1 if len(a.terms) < len(b.terms) else 1
    return 0


def render(a: OrdinalNotation) -> str:
    if not a.terms:
        return "0"
    parts = []
    for exp, coeff in a.terms:
        if exp.is_zero():
            parts.append(str(coeff))
            continue
        if exp == ONE:
            head = "w"
        else:
            head = "w^" + render(exp)
        parts.append(head if coeff == 1 else f"{head}*{coeff}")
    return "+".join(parts)


def successor(a: OrdinalNotation) -> OrdinalNotation:
    if a.terms and a.terms[-1][0].is_zero():
        exp, coeff = a.terms[-1]
        return OrdinalNotation(a.terms[:-1] + ((exp, coeff + 1),))
    return OrdinalNotation(a.terms + ((ZERO, 1),))


@dataclasses.dataclass(frozen=True)
class Classified:
    kind: str  # "zero" | "successor" | "limit"
    predecessor: Optional[OrdinalNotation]


def classify(a: OrdinalNotation) -> Classified:
    if a.is_zero():
        return Classified("zero", None)
    exp, coeff = a.terms[-1]
    if not exp.is_zero():
        return Classified("limit", None)
    if coeff > 1:
        pred = OrdinalNotation(a.terms[:-1] + ((exp, coeff - 1),))
    else:
        pred = OrdinalNotation(a.terms[:-1])
    return Classified("successor", pred)


def parity(a: OrdinalNotation) -> int:
    """Parity of the finite remainder: 0 for even, 1 for odd.

    Limits and zero have an empty remainder and count as even.
    """
    if a.terms and a.terms[-1][0].is_zero():
        return a.terms[-1][1] % 2
    return 0


def fund_seq(lam: OrdinalNotation, k: int) -> OrdinalNotation:
    """The k-th member of the canonical fundamental sequence of a limit.

    (b + w^(g+1))[k] = b + w^g * (k+1); (b + w^g)[k] = b + w^(g[k]) for
    g a limit.  In particular w[k] = k+1.
    """
    if k < 0:
        raise ValueError("index must be a natural")
    if classify(lam).kind != "limit":
        raise ValueError(f"{render(lam)} is not a limit")
    exp, coeff = lam.terms[-1]
    base = lam.terms[:-1] if coeff == 1 else lam.terms[:-1] + ((exp, coeff - 1),)
    cls = classify(exp)
    if cls.kind == "successor":
        gamma = cls.predecessor
        if gamma.is_zero():
            return OrdinalNotation(base + ((ZERO, k + 1),))
        return OrdinalNotation(base + ((gamma, k + 1),))
    return OrdinalNotation(base + ((fund_seq(exp, k), 1),))


def set_ceiling(ceiling: Optional[OrdinalNotation]) -> None:
    """Set the largest admissible notation; None removes the bound."""
    global _CEILING
    _CEILING = ceiling


# ---------------------------------------------------------------------------
# Parsing.

def parse_ordinal(text: str) -> OrdinalNotation:
    """Parse notation text; the result round-trips through render()."""
    if text == "0":
        return ZERO
    value, pos = _parse_expr(text, 0)
    if pos != len(text):
        raise ParseError("unexpected trailing input", pos)
    return value


def _parse_expr(s: str, i: int) -> tuple[OrdinalNotation, int]:
    terms = []
    term, i = _parse_term(s, i)
    terms.append(term)
    while i < len(s) and s[i] == "+":
        save = i
        term, j = _parse_term(s, i + 1)
        # A term whose exponent does not drop belongs to the enclosing
        # expression (this is what keeps w^2+w meaning (w^2)+w).
        if compare(term[0], terms[-1][0]) >= 0:
            i = save
            break
        terms.append(term)
        i = j
    try:
        return OrdinalNotation(tuple(terms)), i
    except ValueError as exc:
        raise ParseError(str(exc), i) from exc


def _parse_term(s: str, i: int) -> tuple[tuple[OrdinalNotation, int], int]:
    if i >= len(s):
        raise ParseError("expected a term", i)
    if s[i] == "w":
        i += 1
        exp = ONE
        if i < len(s) and s[i] == "^":
            exp, i = _parse_expr(s, i + 1)
            if exp.is_zero():
                raise ParseError("exponent must be positive", i)
        coeff = 1
        if i < len(s) and s[i] == "*":
            coeff, i = _parse_nat(s, i + 1)
            if coeff == 0:
                raise ParseError("coefficient must be positive", i)
        return (exp, coeff), i
    n, i = _parse_nat(s, i)
    if n == 0:
        raise ParseError("zero cannot appear inside a sum", i)
    return (ZERO, n), i


def _parse_nat(s: str, i: int) -> tuple[int, int]:
    j = i
    while j < len(s) and s[j].isdigit():
        j += 1
    if j == i:
        raise ParseError("expected a number", i)
    if s[i] == "0" and j - i > 1:
        raise ParseError("leading zero", i)
    return int(s[i:j]), j


# ---------------------------------------------------------------------------
# Canonical copies.

_CHAR_ORDER = {c: k for k, c in enumerate("w0123456789*+^")}


def _string_key(text: str) -> tuple:
    return tuple(_CHAR_ORDER[c] for c in text)


class ComputableCopy:
    """A bijection between an initial segment of the naturals and the
    notations strictly below eta.

    The enumeration lists rendered expressions by length, and within a
    length by character order with ``w`` before the digits.  This keeps
    finite eta in natural order and puts ``w`` first for eta = w+1.
    """

    def __init__(self, eta: OrdinalNotation):
        if eta.is_zero():
            raise ValueError("eta must be positive")
        self.eta = eta
        self._items: list[OrdinalNotation] = []
        self._positions: dict[OrdinalNotation, int] = {}
        if eta.is_finite():
            self.size: Optional[int] = eta.as_int()
            self._stream: Optional[Iterator[OrdinalNotation]] = iter(
                from_int(n) for n in range(self.size)
            )
        else:
            self.size = None
            self._stream = _below(eta)

    def _extend(self) -> bool:
        if self._stream is None:
            return False
        nxt = next(self._stream, None)
        if nxt is None:
            self._stream = None
            return False
        self._positions[nxt] = len(self._items)
        self._items.append(nxt)
        return True

    def at_index(self, n: int) -> OrdinalNotation:
        if n < 0:
            raise ValueError("index must be a natural")
        while len(self._items) <= n:
            if not self._extend():
                raise ValueError(f"index {n} is beyond the copy of {render(self.eta)}")
        return self._items[n]

    def index_of(self, b: OrdinalNotation) -> int:
        if compare(b, self.eta) >= 0:
            raise ValueError(f"{render(b)} is not below {render(self.eta)}")
        while b not in self._positions:
            if not self._extend():
                raise ValueError(f"{render(b)} never enumerated")  # pragma: no cover
        return self._positions[b]


def enum_copy(eta: OrdinalNotation) -> ComputableCopy:
    return ComputableCopy(eta)


def _below(eta: OrdinalNotation) -> Iterator[OrdinalNotation]:
    for length in itertools.count(1):
        for nu in _w_headed(length):
            if compare(nu, eta) < 0:
                yield nu
        lo = 0 if length == 1 else 10 ** (length - 1)
        for n in range(lo, 10 ** length):
            nu = from_int(n)
            if compare(nu, eta) < 0:
                yield nu


def _try_terms(
    terms: tuple[tuple[OrdinalNotation, int], ...]
) -> Optional[OrdinalNotation]:
    try:
        return OrdinalNotation(terms)
    except CeilingError:
        return None


def _w_headed(length: int) -> list[OrdinalNotation]:
    """All notations whose rendering has the given length and starts with w."""
    out = []
    for first, used in _w_terms(length):
        if used == length:
            nu = _try_terms((first,))
            if nu is not None:
                out.append(nu)
        elif used + 2 <= length:
            for rest in _bounded_exprs(length - used - 1, first[0]):
                nu = _try_terms((first,) + rest.terms)
                if nu is not None:
                    out.append(nu)
    out.sort(key=lambda nu: _string_key(render(nu)))
    return out


def _w_terms(maxlen: int) -> Iterator[tuple[tuple[OrdinalNotation, int], int]]:
    """Terms of the form w[^e][*c] with rendering length at most maxlen."""
    if maxlen >= 1:
        yield (ONE, 1), 1
    for digits in range(1, maxlen - 1):
        for c in range(max(2, 10 ** (digits - 1)), 10 ** digits):
            if 2 + digits <= maxlen:
                yield (ONE, c), 2 + digits
    for explen in range(1, maxlen - 1):
        for exp in _exponents(explen):
            if 2 + explen <= maxlen:
                yield (exp, 1), 2 + explen
            for digits in range(1, maxlen - 2 - explen):
                for c in range(max(2, 10 ** (digits - 1)), 10 ** digits):
                    yield (exp, c), 3 + explen + digits


def _exponents(length: int) -> list[OrdinalNotation]:
    """Notations valid as a rendered ^-exponent: anything but 0 and 1."""
    out = []
    lo = 2 if length == 1 else 10 ** (length - 1)
    for n in range(lo, 10 ** length):
        out.append(from_int(n))
    out.extend(_w_headed(length))
    return out


def _bounded_exprs(length: int, bound: OrdinalNotation) -> list[OrdinalNotation]:
    """Notations of the given rendered length with leading exponent < bound."""
    out = []
    if compare(ZERO, bound) < 0:
        lo = 1 if length == 1 else 10 ** (length - 1)
        for n in range(lo, 10 ** length):
            out.append(from_int(n))
    for first, used in _w_terms(length):
        if compare(first[0], bound) >= 0:
            continue
        if used == length:
            nu = _try_terms((first,))
            if nu is not None:
                out.append(nu)
        elif used + 2 <= length:
            for rest in _bounded_exprs(length - used - 1, first[0]):
                nu = _try_terms((first,) + rest.terms)
                if nu is not None:
                    out.append(nu)
    return out


# ---------------------------------------------------------------------------
# Kleene-Brouwer ranks.

Node = tuple[int, ...]


class RankedTree:
    """A finite tree over sequence-labelled nodes with an explicit parent map
    and a sibling order."""

    def __init__(
        self,
        nodes: tuple[Node, ...],
        parent: dict[Node, Optional[Node]],
        child_key: Optional[Callable[[Node], object]] = None,
    ):
        self.nodes = tuple(nodes)
        self.parent = dict(parent)
        self.child_key = child_key or (lambda node: (len(node), node))
        roots = [n for n in self.nodes if self.parent.get(n) is None]
        if len(roots) != 1:
            raise ValueError(f"expected a single root, found {len(roots)}")
        self.root = roots[0]
        node_set = set(self.nodes)
        if len(node_set) != len(self.nodes):
            raise ValueError("duplicate nodes")
        for n in self.nodes:
            p = self.parent.get(n)
            if p is not None and p not in node_set:
                raise ValueError(f"parent of {n} is not a node")
        self._children: dict[Node, list[Node]] = {n: [] for n in self.nodes}
        for n in self.nodes:
            p = self.parent.get(n)
            if p is not None:
                self._children[p].append(n)
        for kids in self._children.values():
            kids.sort(key=self.child_key)
        # Reaching the root from every node rules out cycles.
        for n in self.nodes:
            seen = set()
            cur = n
            while cur is not None:
                if cur in seen:
                    raise ValueError("parent map has a cycle")
                seen.add(cur)
                cur = self.parent.get(cur)

    def children(self, node: Node) -> list[Node]:
        return list(self._children[node])


def kb_rank(tree: RankedTree) -> tuple[OrdinalNotation, dict[Node, int]]:
    """Kleene-Brouwer ranks: descendants before ancestors, siblings in
    child order.  Returns the order type (as a notation) and the rank map.
    """
    ranks: dict[Node, int] = {}
    counter = 0
    stack: list[tuple[Node, bool]] = [(tree.root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            ranks[node] = counter
            counter += 1
        else:
            stack.append((node, True))
            for child in reversed(tree.children(node)):
                stack.append((child, False))
    return from_int(len(tree.nodes)), ranks


_CEILING = OrdinalNotation(((OMEGA, 1),))  # default ceiling: w^w
