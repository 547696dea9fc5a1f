"""Compositional sentence-pair relation calculus and NLI labeling.

Labels are computed bottom-up over the aligned pair tree: lexical relations
at the slot level, modifier-head composition into phrase relations, then
quantifier-table lookups (object scope first, then negation conjugation,
then subject scope).  The quantifier table itself is derived from the
bounded model oracle, so this module is fast at labeling time but defers
all semantic authority to first-order logic.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Optional

from .fragment import CATEGORIES, QUANTIFIERS, NLIPair, Sentence
from .relations import (
    CODE_TO_RELATION,
    RELATIONS,
    RelationSet,
    SemRelation,
    codes_to_set,
    set_to_codes,
)

R = SemRelation


class AlignmentError(Exception):
    """Slot inputs outside the domain the composition rules are defined on."""


class Label(enum.Enum):
    ENTAILMENT = "entailment"
    CONTRADICTION = "contradiction"
    NEUTRAL = "neutral"

    def __repr__(self) -> str:  # pragma: no cover
        return f"Label.{self.name}"


LABELS = (Label.ENTAILMENT, Label.CONTRADICTION, Label.NEUTRAL)

# relations a slot-level (lexical or phrase) comparison can produce
LEXICAL_RANGE = frozenset({R.EQUIVALENCE, R.FORWARD, R.REVERSE, R.INDEPENDENCE})
HEAD_RANGE = frozenset({R.EQUIVALENCE, R.INDEPENDENCE})

MODIFIER_CATEGORIES = ("adjectives", "adverbs")

SLOT_NAMES = ("subject_np", "vp", "object_np")


def lexical_relation(
    w_p: Optional[str], w_h: Optional[str], category: str
) -> SemRelation:
    """Relation between two aligned open-class tokens.

    Identical tokens (including both empty) denote the same set; an empty
    modifier denotes the universe of its head, so it sits strictly above
    any word filling the slot; distinct words are independent.
    """
    if category not in CATEGORIES:
        raise AlignmentError(f"unknown category {category!r}")
    if category not in MODIFIER_CATEGORIES and (w_p is None or w_h is None):
        raise AlignmentError(f"{category} is a head slot and cannot be empty")
    if w_p == w_h:
        return R.EQUIVALENCE
    if w_p is None:
        return R.REVERSE
    if w_h is None:
        return R.FORWARD
    return R.INDEPENDENCE


def modifier_head_relation(r_mod: SemRelation, r_head: SemRelation) -> SemRelation:
    """Relation between (mod_p ∩ head_p) and (mod_h ∩ head_h).

    Valid under the running non-vacuity assumptions: every phrase denotes a
    non-empty, non-universal set.  An independent head makes the phrases
    independent regardless of the modifiers; an equal head passes the
    modifier relation through.
    """
    if r_mod not in LEXICAL_RANGE:
        raise AlignmentError(f"modifier relation {r_mod!r} out of range")
    if r_head not in HEAD_RANGE:
        raise AlignmentError(f"head relation {r_head!r} out of range")
    if r_head is R.INDEPENDENCE:
        return R.INDEPENDENCE
    return r_mod


@dataclass(frozen=True)
class AlignedPair:
    """The nine aligned slot pairs of a premise/hypothesis pair."""

    q_s: tuple[str, str]
    adj_s: tuple[Optional[str], Optional[str]]
    n_s: tuple[str, str]
    neg: tuple[bool, bool]
    adv: tuple[Optional[str], Optional[str]]
    v: tuple[str, str]
    q_o: tuple[str, str]
    adj_o: tuple[Optional[str], Optional[str]]
    n_o: tuple[str, str]

    @classmethod
    def from_pair(cls, pair: NLIPair) -> "AlignedPair":
        p, h = pair.premise, pair.hypothesis
        return cls(
            q_s=(p.q_s, h.q_s),
            adj_s=(p.adj_s, h.adj_s),
            n_s=(p.n_s, h.n_s),
            neg=(p.neg, h.neg),
            adv=(p.adv, h.adv),
            v=(p.v, h.v),
            q_o=(p.q_o, h.q_o),
            adj_o=(p.adj_o, h.adj_o),
            n_o=(p.n_o, h.n_o),
        )


def slot_relations(pair: NLIPair) -> dict[str, SemRelation]:
    """Phrase-level relations for the three aligned composites."""
    a = AlignedPair.from_pair(pair)
    return {
        "subject_np": modifier_head_relation(
            lexical_relation(*a.adj_s, "adjectives"),
            lexical_relation(*a.n_s, "nouns"),
        ),
        "vp": modifier_head_relation(
            lexical_relation(*a.adv, "adverbs"),
            lexical_relation(*a.v, "verbs"),
        ),
        "object_np": modifier_head_relation(
            lexical_relation(*a.adj_o, "adjectives"),
            lexical_relation(*a.n_o, "nouns"),
        ),
    }


RELATION_LABEL: Mapping[SemRelation, Label] = {
    R.EQUIVALENCE: Label.ENTAILMENT,
    R.FORWARD: Label.ENTAILMENT,
    R.NEGATION: Label.CONTRADICTION,
    R.ALTERNATION: Label.CONTRADICTION,
    R.REVERSE: Label.NEUTRAL,
    R.COVER: Label.NEUTRAL,
    R.INDEPENDENCE: Label.NEUTRAL,
}


def relation_set_to_label(rs: RelationSet) -> Optional[Label]:
    """Collapse a relation set to a label, or None when members disagree."""
    if not rs:
        raise ValueError("empty relation set has no label")
    labels = {RELATION_LABEL[r] for r in rs}
    if len(labels) == 1:
        return labels.pop()
    return None


QuantifierTable = Mapping[
    tuple[str, str, SemRelation, SemRelation], RelationSet
]
NegationTable = Mapping[tuple[SemRelation, str], RelationSet]
JoinTable = Mapping[tuple[SemRelation, SemRelation], RelationSet]


@dataclass(frozen=True)
class Tables:
    quantifier: QuantifierTable
    negation: NegationTable
    join: JoinTable


def negation_side(neg_p: bool, neg_h: bool) -> Optional[str]:
    if neg_p and neg_h:
        return "both"
    if neg_p:
        return "premise"
    if neg_h:
        return "hypothesis"
    return None


def sentence_relation(pair: NLIPair, tables: Tables) -> RelationSet:
    """Achievable relations between the two sentences, composed bottom-up.

    Set-valued throughout: each table lookup is applied pointwise to the
    incoming set and the results unioned, so precision is never silently
    collapsed.  With the shipped tables every step happens to stay a
    singleton, which is what makes the oracle fallback rate zero.
    """
    p, h = pair.premise, pair.hypothesis
    slots = slot_relations(pair)
    inner = tables.quantifier[(p.q_o, h.q_o, slots["object_np"], slots["vp"])]
    side = negation_side(p.neg, h.neg)
    if side is None:
        body = inner
    else:
        body = frozenset().union(
            *(tables.negation[(r, side)] for r in inner)
        )
    out: set[SemRelation] = set()
    for r_body in body:
        out |= tables.quantifier[(p.q_s, h.q_s, slots["subject_np"], r_body)]
    return frozenset(out)


def label_natlog(
    pair: NLIPair, tables: Tables, oracle=None
) -> tuple[Label, str]:
    """Label a pair; returns (label, provenance).

    Provenance is "natlog" when the composed relation set maps to a single
    label, "oracle-fallback" when the set was ambiguous and the oracle
    decided.  An ambiguous set without an oracle raises.
    """
    rs = sentence_relation(pair, tables)
    label = relation_set_to_label(rs)
    if label is not None:
        return label, "natlog"
    if oracle is None:
        raise AlignmentError(
            f"ambiguous relation set {set_to_codes(rs)} and no oracle provided"
        )
    return oracle.decide_label(pair).label, "oracle-fallback"


# ---------------------------------------------------------------------------
# quantifier table derivation

_SCHEMA_PREDS = ("RES_p", "RES_h", "SCO_p", "SCO_h")


def derive_quantifier_table(oracle, bound: int) -> dict:
    """Derive the quantifier composition table from the model oracle.

    Each entry instantiates a schematic one-quantifier sentence pair
    "q_p x: RES_p(x). SCO_p(x)" vs "q_h x: RES_h(x). SCO_h(x)", constrains
    the restrictor pair and scope pair to the given relations, and asks
    the oracle for the relation between the two propositions.  Non-vacuity
    premises for all four schematic predicates play the role the aux
    premises play for full pairs.
    """
    from . import folsem

    res_p, res_h, sco_p, sco_h = _SCHEMA_PREDS
    aux = []
    for pred in _SCHEMA_PREDS:
        aux.extend(folsem.nonvacuity_premises(pred, arity=1))
    table: dict[tuple[str, str, SemRelation, SemRelation], RelationSet] = {}
    for q_p, q_h, r_res, r_sco in product(
        QUANTIFIERS, QUANTIFIERS, RELATIONS, RELATIONS
    ):
        links = list(
            folsem.realize_relation_constraints(r_res, res_p, res_h, arity=1)
        ) + list(
            folsem.realize_relation_constraints(r_sco, sco_p, sco_h, arity=1)
        )
        phi_p = folsem.quantify(
            q_p, "x", folsem.UnaryAtom(res_p, "x"), folsem.UnaryAtom(sco_p, "x")
        )
        phi_h = folsem.quantify(
            q_h, "x", folsem.UnaryAtom(res_h, "x"), folsem.UnaryAtom(sco_h, "x")
        )
        rel = oracle.formula_relation(phi_p, phi_h, aux + links, bound)
        table[(q_p, q_h, r_res, r_sco)] = frozenset({rel})
    return table


# ---------------------------------------------------------------------------
# quantifier table serialization

QUANTIFIER_TSV_HEADER = "q_p\tq_h\tr_restrictor\tr_scope\tresult"


def write_quantifier_tsv(table: QuantifierTable) -> str:
    lines = [QUANTIFIER_TSV_HEADER]
    for q_p, q_h, r1, r2 in product(
        QUANTIFIERS, QUANTIFIERS, RELATIONS, RELATIONS
    ):
        rs = table[(q_p, q_h, r1, r2)]
        lines.append(f"{q_p}\t{q_h}\t{r1.value}\t{r2.value}\t{set_to_codes(rs)}")
    return "\n".join(lines) + "\n"


def read_quantifier_tsv(text: str) -> dict:
    table = {}
    for line in text.splitlines()[1:]:
        if not line.strip():
            continue
        q_p, q_h, c1, c2, codes = line.split("\t")
        table[(q_p, q_h, CODE_TO_RELATION[c1], CODE_TO_RELATION[c2])] = (
            codes_to_set(codes)
        )
    return table
