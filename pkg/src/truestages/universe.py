"""Finite test universes: every sequence up to a length bound over an
initial-segment alphabet."""

from __future__ import annotations

import dataclasses
import itertools
from typing import Iterator

Seq = tuple[int, ...]


@dataclasses.dataclass(frozen=True)
class Universe:
    max_len: int
    alphabet: int

    def __post_init__(self):
        if self.max_len < 0:
            raise ValueError("max_len must be a natural")
        if self.alphabet < 1:
            raise ValueError("alphabet must contain at least one value")

    def all_seqs(self) -> list[Seq]:
        """All members, shortest first, lexicographic within a length."""
        out: list[Seq] = []
        for n in range(self.max_len + 1):
            out.extend(itertools.product(range(self.alphabet), repeat=n))
        return out

    def maximal(self) -> list[Seq]:
        return list(itertools.product(range(self.alphabet), repeat=self.max_len))

    def prefix_pairs(self) -> Iterator[tuple[Seq, Seq]]:
        """Every (sigma, tau) with sigma a (possibly equal) prefix of tau."""
        for tau in self.all_seqs():
            for i in range(len(tau) + 1):
                yield tau[:i], tau

    def extensions(self, sigma: Seq) -> list[Seq]:
        if len(sigma) >= self.max_len:
            return []
        return [sigma + (v,) for v in range(self.alphabet)]

    def __contains__(self, seq: object) -> bool:
        return (
            isinstance(seq, tuple)
            and len(seq) <= self.max_len
            and all(isinstance(v, int) and 0 <= v < self.alphabet for v in seq)
        )

    @property
    def size(self) -> int:
        if self.alphabet == 1:
            return self.max_len + 1
        return (self.alphabet ** (self.max_len + 1) - 1) // (self.alphabet - 1)


def seq_str(seq: Seq) -> str:
    return "[" + ",".join(str(v) for v in seq) + "]"


def parse_seq(text: str) -> Seq:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"expected a bracketed sequence, got {text!r}")
    body = text[1:-1].strip()
    if not body:
        return ()
    return tuple(int(part) for part in body.split(","))
