from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from tools.exceptions import InputError

__all__ = ("MultiIndex", "shuffle")


@dataclass(frozen=True, slots=True)
class MultiIndex:
    """
    A word over {0, 1, ..., d} indexing the iterated integral over the
    ordered simplex. Letter 0 is time, letter j the j-th noise component.
    Positions are 1-based, like the integration variables t_1 < ... < t_k.
    """

    word: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(not isinstance(a, int) or a < 0 for a in self.word):
            raise InputError(f"letters must be non-negative integers, got {self.word}")

    @classmethod
    def parse(cls, text: str) -> MultiIndex:
        text = text.strip().strip("()[]")
        if not text:
            return cls(())

        try:
            return cls(tuple(int(part) for part in text.replace(" ", "").split(",")))
        except ValueError:
            raise InputError(f"cannot read {text!r} as a comma separated word") from None

    @classmethod
    def of(cls, letters: Iterable[int]) -> MultiIndex:
        return cls(tuple(int(a) for a in letters))

    def __len__(self) -> int:
        return len(self.word)

    def __iter__(self) -> Iterator[int]:
        return iter(self.word)

    def __getitem__(self, position: int) -> int:
        """Letter at 1-based `position`."""

        return self.word[position - 1]

    def __str__(self) -> str:
        return ",".join(map(str, self.word))

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def noise_positions(self) -> tuple[int, ...]:
        return tuple(p for p, a in enumerate(self.word, start=1) if a != 0)

    @property
    def norm(self) -> int:
        """Number of noise letters."""

        return sum(1 for a in self.word if a != 0)

    @property
    def zeros(self) -> int:
        return self.length - self.norm

    def positions_of(self, letter: int) -> tuple[int, ...]:
        return tuple(p for p, a in enumerate(self.word, start=1) if a == letter)

    def letter_counts(self) -> Counter[int]:
        return Counter(a for a in self.word if a != 0)

    def has_odd_letter(self) -> bool:
        return any(c % 2 for c in self.letter_counts().values())

    def remove(self, position: int) -> MultiIndex:
        if not 1 <= position <= self.length:
            raise InputError(f"position {position} outside 1..{self.length}")

        return MultiIndex(self.word[: position - 1] + self.word[position:])

    def split(self, position: int) -> tuple[MultiIndex, MultiIndex]:
        return MultiIndex(self.word[: position - 1]), MultiIndex(self.word[position:])

    def reversed(self) -> MultiIndex:
        return MultiIndex(self.word[::-1])

    def canonical(self) -> MultiIndex:
        """
        Rename noise letters in order of first appearance. Expectations of
        iterated integrals are invariant under this renaming because the
        components are i.i.d.
        """

        names: dict[int, int] = {}
        out = []
        for a in self.word:
            if a == 0:
                out.append(0)
                continue

            if a not in names:
                names[a] = len(names) + 1

            out.append(names[a])

        return MultiIndex(tuple(out))

    def concat(self, other: MultiIndex) -> MultiIndex:
        return MultiIndex(self.word + other.word)


def shuffle(u: Sequence[int], v: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """
    All interleavings of `u` and `v` with multiplicity. The product of two
    iterated integrals over the same simplex is the sum of the iterated
    integrals over the shuffled words.
    """

    if not u:
        yield tuple(v)
        return

    if not v:
        yield tuple(u)
        return

    for rest in shuffle(u[:-1], v):
        yield rest + (u[-1],)

    for rest in shuffle(u, v[:-1]):
        yield rest + (v[-1],)
