from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Iterator, Optional, Sequence

from features.moments.words import MultiIndex
from tools.exceptions import InputError, UnassignedSlotError, UnsupportedRegimeError


class Kind(Enum):
    ROOT = "γ"
    DETERMINISTIC = "τ0"
    STOCHASTIC = "τj"

    @classmethod
    def from_bit(cls, bit: int) -> Kind:
        return cls.STOCHASTIC if bit else cls.DETERMINISTIC


@dataclass(frozen=True, slots=True)
class NodeLabel:
    kind: Kind
    slot: Optional[int] = None

    def __str__(self) -> str:
        if self.kind is Kind.STOCHASTIC:
            return f"τ_j{self.slot}"

        return self.kind.value


ROOT = NodeLabel(Kind.ROOT)
DETERMINISTIC = NodeLabel(Kind.DETERMINISTIC)


@dataclass(frozen=True, slots=True)
class TreeStats:
    l: int
    d: int
    s: int
    rho: float


@dataclass(frozen=True)
class LabelledTree:
    """
    A monotonically labelled stochastic tree on nodes 1..l.

    `parents[i - 2]` is the parent of node i, always smaller than i.
    `labels[i - 1]` is the label of node i; node 1 is the root.
    Stochastic nodes number their variable-index slots 1..s in increasing
    node order.
    """

    parents: tuple[int, ...]
    labels: tuple[NodeLabel, ...]

    def __post_init__(self) -> None:
        l = len(self.labels)
        if l < 1 or len(self.parents) != l - 1:
            raise InputError("a tree on l nodes needs l labels and l - 1 parents")

        if self.labels[0] != ROOT or any(lab.kind is Kind.ROOT for lab in self.labels[1:]):
            raise InputError("exactly node 1 carries the root label")

        for i, p in enumerate(self.parents, start=2):
            if not 1 <= p < i:
                raise InputError(f"node {i} has parent {p}; labels must be monotone")

        slots = [lab.slot for lab in self.labels if lab.kind is Kind.STOCHASTIC]
        if slots != list(range(1, len(slots) + 1)):
            raise InputError("stochastic slots must be 1..s in increasing node order")

    @classmethod
    def build(cls, parents: Sequence[int], bits: Sequence[int]) -> LabelledTree:
        """Tree from a parent vector and a 0/1 word (1 = stochastic) for nodes 2..l."""

        labels = [ROOT]
        slot = 0
        for bit in bits:
            if bit:
                slot += 1
                labels.append(NodeLabel(Kind.STOCHASTIC, slot))
            else:
                labels.append(DETERMINISTIC)

        return cls(tuple(parents), tuple(labels))

    @property
    def l(self) -> int:
        return len(self.labels)

    @cached_property
    def s(self) -> int:
        return sum(1 for lab in self.labels if lab.kind is Kind.STOCHASTIC)

    @property
    def d(self) -> int:
        return self.l - 1 - self.s

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple(int(lab.kind is Kind.STOCHASTIC) for lab in self.labels[1:])

    @property
    def ident(self) -> str:
        parents = ".".join(map(str, self.parents)) or "-"
        bits = "".join(map(str, self.bits)) or "-"
        return f"L{self.l}:{parents}:{bits}"

    def label(self, node: int) -> NodeLabel:
        return self.labels[node - 1]

    def is_stochastic(self, node: int) -> bool:
        return self.label(node).kind is Kind.STOCHASTIC

    @cached_property
    def _children(self) -> tuple[tuple[int, ...], ...]:
        kids: list[list[int]] = [[] for _ in range(self.l)]
        for i, p in enumerate(self.parents, start=2):
            kids[p - 1].append(i)

        return tuple(tuple(k) for k in kids)

    def children(self, node: int) -> tuple[int, ...]:
        return self._children[node - 1]

    def nodes(self) -> Iterator[int]:
        return iter(range(1, self.l + 1))

    def stats(self, H: float) -> TreeStats:
        if not 1 / 3 < H < 1:
            raise UnsupportedRegimeError(f"Hurst parameter {H} outside (1/3, 1)")

        return TreeStats(l=self.l, d=self.d, s=self.s, rho=H * self.s + self.d)

    def is_stratonovich_class(self) -> bool:
        return self.s % 2 == 0

    def label_word(self, assignment: Sequence[int]) -> MultiIndex:
        """Word read from the labels of nodes 2..l under the slot assignment."""

        if len(assignment) != self.s:
            raise UnassignedSlotError(
                f"tree {self.ident} has {self.s} slots, got {len(assignment)} indices"
            )

        if any(j < 1 for j in assignment):
            raise UnassignedSlotError("slot indices start at 1")

        return MultiIndex(
            tuple(
                assignment[lab.slot - 1] if lab.kind is Kind.STOCHASTIC else 0  # type: ignore[operator]
                for lab in self.labels[1:]
            )
        )

    def word_template(self) -> tuple[str, ...]:
        return tuple(
            f"j{lab.slot}" if lab.kind is Kind.STOCHASTIC else "0" for lab in self.labels[1:]
        )

    def __str__(self) -> str:
        from .bracket import bracket_string

        return bracket_string(self)
