from __future__ import annotations

from typing import Iterator, Sequence

from tools.exceptions import OddWordError

from .words import MultiIndex

__all__ = (
    "Matching",
    "valid_matchings",
    "crosses",
    "crossing_components",
    "double_factorial",
)

Matching = tuple[tuple[int, int], ...]


def _same_letter_pairings(word: MultiIndex, items: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not items:
        yield []
        return

    first, rest = items[0], items[1:]
    for i, other in enumerate(rest):
        if word[other] != word[first]:
            continue

        for tail in _same_letter_pairings(word, rest[:i] + rest[i + 1 :]):
            yield [(first, other), *tail]


def valid_matchings(alpha: MultiIndex | Sequence[int]) -> list[Matching]:
    """
    Perfect matchings of the noise positions of `alpha` whose pairs carry
    the same letter. Independent components never pair up.
    """

    word = alpha if isinstance(alpha, MultiIndex) else MultiIndex.of(alpha)
    if word.norm % 2:
        raise OddWordError(f"word {word} has an odd number ({word.norm}) of noise letters")

    return [tuple(m) for m in _same_letter_pairings(word, list(word.noise_positions))]


def crosses(a: tuple[int, int], b: tuple[int, int]) -> bool:
    (p, q), (r, s) = sorted(a), sorted(b)
    return p < r < q < s or r < p < s < q


def crossing_components(matching: Matching) -> list[Matching]:
    """Connected components of the crossing graph, each sorted by left endpoint."""

    pairs = [tuple(sorted(pair)) for pair in matching]
    parent = list(range(len(pairs)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]

        return i

    for i in range(len(pairs)):
        for j in range(i + 1, len(pairs)):
            if crosses(pairs[i], pairs[j]):
                parent[find(i)] = find(j)

    groups: dict[int, list[tuple[int, int]]] = {}
    for i, pair in enumerate(pairs):
        groups.setdefault(find(i), []).append(pair)  # type: ignore[arg-type]

    return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2

    return out
