"""The seven basic semantic relations and their algebra.

For non-empty, non-universal sets X and Y over a universe U, the emptiness
pattern of the four regions (X and Y, X minus Y, Y minus X, neither) has
exactly seven realizable values, one per relation.  Everything downstream
(converse, join, negation conjugation) is derived mechanically from this
set semantics by exhaustive enumeration over small universes, never written
out by hand.
"""

from __future__ import annotations

import enum
from typing import AbstractSet, FrozenSet, Iterable, Mapping


class SemRelation(enum.Enum):
    EQUIVALENCE = "="
    FORWARD = "<"
    REVERSE = ">"
    NEGATION = "^"
    ALTERNATION = "|"
    COVER = "v"
    INDEPENDENCE = "#"

    @property
    def code(self) -> str:
        return self.value

    def __repr__(self) -> str:  # keeps failed assertions readable
        return f"SemRelation({self.value!r})"


RELATIONS: tuple[SemRelation, ...] = tuple(SemRelation)
RELATION_INDEX: dict[SemRelation, int] = {r: i for i, r in enumerate(RELATIONS)}
CODE_TO_RELATION: dict[str, SemRelation] = {r.value: r for r in RELATIONS}

RelationSet = FrozenSet[SemRelation]

NEGATION_SIDES = ("premise", "hypothesis", "both")

# region pattern: (X & Y nonempty, X - Y nonempty, Y - X nonempty,
#                  complement of X | Y nonempty)
_PATTERN_TO_RELATION: dict[tuple[bool, bool, bool, bool], SemRelation] = {
    (True, False, False, True): SemRelation.EQUIVALENCE,
    (True, False, True, True): SemRelation.FORWARD,
    (True, True, False, True): SemRelation.REVERSE,
    (False, True, True, False): SemRelation.NEGATION,
    (False, True, True, True): SemRelation.ALTERNATION,
    (True, True, True, False): SemRelation.COVER,
    (True, True, True, True): SemRelation.INDEPENDENCE,
}


class DegenerateSetError(ValueError):
    pass


class TableUnstableError(RuntimeError):
    pass


def relation_from_pattern(pattern: tuple[bool, bool, bool, bool]) -> SemRelation:
    """Relation for a four-region emptiness pattern (intersection, left
    difference, right difference, outer complement).  Patterns outside the
    seven relational ones describe degenerate set pairs."""
    try:
        return _PATTERN_TO_RELATION[tuple(bool(b) for b in pattern)]
    except KeyError:
        raise DegenerateSetError(f"pattern {pattern} is not relational") from None


def set_to_codes(relations: Iterable[SemRelation]) -> str:
    """Canonical string form of a relation set, e.g. '=<#'."""
    members = set(relations)
    return "".join(r.value for r in RELATIONS if r in members)


def codes_to_set(codes: str) -> RelationSet:
    out = []
    for ch in codes:
        if ch not in CODE_TO_RELATION:
            raise ValueError(f"unknown relation code {ch!r}")
        out.append(CODE_TO_RELATION[ch])
    return frozenset(out)


def classify_pair(
    x: AbstractSet, y: AbstractSet, universe: AbstractSet
) -> SemRelation:
    """Classify the pair (x, y) of subsets of universe into one of the seven
    relations.  Empty or universal arguments are rejected."""
    x = frozenset(x)
    y = frozenset(y)
    universe = frozenset(universe)
    if not x <= universe or not y <= universe:
        raise DegenerateSetError("arguments must be subsets of the universe")
    for name, s in (("x", x), ("y", y)):
        if not s:
            raise DegenerateSetError(f"{name} is empty")
        if s == universe:
            raise DegenerateSetError(f"{name} is the whole universe")
    pattern = (
        bool(x & y),
        bool(x - y),
        bool(y - x),
        bool(universe - (x | y)),
    )
    return _PATTERN_TO_RELATION[pattern]


def _classify_bits(x: int, y: int, full: int) -> SemRelation:
    # bitmask twin of classify_pair, for the enumeration loops
    pattern = (
        bool(x & y),
        bool(x & ~y & full),
        bool(y & ~x & full),
        bool(full & ~(x | y)),
    )
    return _PATTERN_TO_RELATION[pattern]


_CONVERSE = {
    SemRelation.EQUIVALENCE: SemRelation.EQUIVALENCE,
    SemRelation.FORWARD: SemRelation.REVERSE,
    SemRelation.REVERSE: SemRelation.FORWARD,
    SemRelation.NEGATION: SemRelation.NEGATION,
    SemRelation.ALTERNATION: SemRelation.ALTERNATION,
    SemRelation.COVER: SemRelation.COVER,
    SemRelation.INDEPENDENCE: SemRelation.INDEPENDENCE,
}


def converse(relation: SemRelation) -> SemRelation:
    """The relation of (y, x) given the relation of (x, y)."""
    return _CONVERSE[relation]


def _admissible_subsets(size: int) -> list[int]:
    full = (1 << size) - 1
    return [m for m in range(1, full)]


def _join_at_size(size: int) -> dict[tuple[SemRelation, SemRelation], set[SemRelation]]:
    full = (1 << size) - 1
    table: dict[tuple[SemRelation, SemRelation], set[SemRelation]] = {}
    subsets = _admissible_subsets(size)
    classify = {
        (a, b): _classify_bits(a, b, full) for a in subsets for b in subsets
    }
    for x in subsets:
        for y in subsets:
            r1 = classify[(x, y)]
            for z in subsets:
                table.setdefault((r1, classify[(y, z)]), set()).add(
                    classify[(x, z)]
                )
    return table


def derive_join_table(
    max_size: int = 6, stability_check_from: int = 5
) -> dict[tuple[SemRelation, SemRelation], RelationSet]:
    """Join of the relation algebra: entry (r1, r2) collects every relation
    classify(x, z) can take given classify(x, y) = r1 and classify(y, z) = r2,
    enumerated exhaustively over all subset triples for universe sizes up to
    max_size.  The table must be identical at sizes stability_check_from and
    max_size or a TableUnstableError is raised.

    Some entries need five-element witnesses: composing # with # can leave
    five of the eight Venn cells of (x, y, z) non-empty, so the table keeps
    growing through universe size 5 and only then closes.  Padding the
    outer complement cell shows every entry reached at smaller sizes is
    also reachable at any larger size, hence stability at one step implies
    stability forever."""
    cumulative: dict[tuple[SemRelation, SemRelation], set[SemRelation]] = {}
    snapshots: dict[int, dict] = {}
    for size in range(1, max_size + 1):
        for key, vals in _join_at_size(size).items():
            cumulative.setdefault(key, set()).update(vals)
        snapshots[size] = {k: frozenset(v) for k, v in cumulative.items()}
    if snapshots[stability_check_from] != snapshots[max_size]:
        raise TableUnstableError(
            f"join table still growing between universe sizes "
            f"{stability_check_from} and {max_size}"
        )
    return {k: frozenset(v) for k, v in cumulative.items()}


def _conjugate_bits(x: int, y: int, full: int, side: str) -> tuple[int, int]:
    if side == "premise":
        return (full & ~x, y)
    if side == "hypothesis":
        return (x, full & ~y)
    if side == "both":
        return (full & ~x, full & ~y)
    raise ValueError(f"unknown negation side {side!r}")


def derive_negation_table(
    max_size: int = 5, stability_check_from: int = 4
) -> dict[tuple[SemRelation, str], RelationSet]:
    """Conjugation of a relation under set complement on one or both sides,
    derived by the same subset enumeration as the join table."""
    cumulative: dict[tuple[SemRelation, str], set[SemRelation]] = {}
    snapshots: dict[int, dict] = {}
    for size in range(1, max_size + 1):
        full = (1 << size) - 1
        for x in _admissible_subsets(size):
            for y in _admissible_subsets(size):
                rel = _classify_bits(x, y, full)
                for side in NEGATION_SIDES:
                    cx, cy = _conjugate_bits(x, y, full, side)
                    # complements of admissible sets are admissible
                    cumulative.setdefault((rel, side), set()).add(
                        _classify_bits(cx, cy, full)
                    )
        snapshots[size] = {k: frozenset(v) for k, v in cumulative.items()}
    if snapshots[stability_check_from] != snapshots[max_size]:
        raise TableUnstableError(
            f"negation table still growing between universe sizes "
            f"{stability_check_from} and {max_size}"
        )
    return {k: frozenset(v) for k, v in cumulative.items()}


def write_join_tsv(table: Mapping[tuple[SemRelation, SemRelation], RelationSet]) -> str:
    lines = ["r1\tr2\tjoin"]
    for r1 in RELATIONS:
        for r2 in RELATIONS:
            lines.append(f"{r1.value}\t{r2.value}\t{set_to_codes(table[(r1, r2)])}")
    return "\n".join(lines) + "\n"


def read_join_tsv(text: str) -> dict[tuple[SemRelation, SemRelation], RelationSet]:
    table = {}
    for line in text.splitlines()[1:]:
        if not line.strip():
            continue
        c1, c2, codes = line.split("\t")
        table[(CODE_TO_RELATION[c1], CODE_TO_RELATION[c2])] = codes_to_set(codes)
    return table


def write_negation_tsv(table: Mapping[tuple[SemRelation, str], RelationSet]) -> str:
    lines = ["relation\tside\tconjugate"]
    for r in RELATIONS:
        for side in NEGATION_SIDES:
            lines.append(f"{r.value}\t{side}\t{set_to_codes(table[(r, side)])}")
    return "\n".join(lines) + "\n"


def read_negation_tsv(text: str) -> dict[tuple[SemRelation, str], RelationSet]:
    table = {}
    for line in text.splitlines()[1:]:
        if not line.strip():
            continue
        code, side, codes = line.split("\t")
        table[(CODE_TO_RELATION[code], side)] = codes_to_set(codes)
    return table
