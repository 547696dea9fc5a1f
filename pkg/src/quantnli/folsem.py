"""First-order logic AST, sentence translation, and non-vacuity premises.

The fragment is two-variable: every translated sentence uses exactly the
variables x (subject) and y (object), nested two deep.  Pairs are encoded
against a six-predicate composite signature (four unary NP predicates, two
binary VP predicates) whose linking constraints carry the lexical
relations; an alternative one-predicate-per-word atomic encoding is
provided for cross-checking the composite one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .fragment import NLIPair, Sentence
from .natlog import slot_relations
from .relations import SemRelation

R = SemRelation

Formula = Union[
    "Forall", "Exists", "Not", "And", "Or", "Implies", "UnaryAtom", "BinaryAtom"
]


@dataclass(frozen=True)
class Forall:
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists:
    var: str
    body: Formula


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Or:
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies:
    antecedent: Formula
    consequent: Formula


@dataclass(frozen=True)
class UnaryAtom:
    pred: str
    var: str


@dataclass(frozen=True)
class BinaryAtom:
    pred: str
    var1: str
    var2: str


def mk_iff(a: Formula, b: Formula) -> Formula:
    return And((Implies(a, b), Implies(b, a)))


def format_formula(f: Formula) -> str:
    """Stable prefix-notation printer."""
    if isinstance(f, UnaryAtom):
        return f"({f.pred} {f.var})"
    if isinstance(f, BinaryAtom):
        return f"({f.pred} {f.var1} {f.var2})"
    if isinstance(f, Not):
        return f"(not {format_formula(f.body)})"
    if isinstance(f, And):
        return "(and " + " ".join(format_formula(p) for p in f.parts) + ")"
    if isinstance(f, Or):
        return "(or " + " ".join(format_formula(p) for p in f.parts) + ")"
    if isinstance(f, Implies):
        return (
            f"(implies {format_formula(f.antecedent)}"
            f" {format_formula(f.consequent)})"
        )
    if isinstance(f, Forall):
        return f"(forall {f.var} {format_formula(f.body)})"
    if isinstance(f, Exists):
        return f"(exists {f.var} {format_formula(f.body)})"
    raise TypeError(f"not a formula: {f!r}")


def quantify(q: str, var: str, restrictor: Formula, body: Formula) -> Formula:
    """Generalized-quantifier semantics of the four determiners."""
    if q == "every":
        return Forall(var, Implies(restrictor, body))
    if q == "some":
        return Exists(var, And((restrictor, body)))
    if q == "no":
        return Not(Exists(var, And((restrictor, body))))
    if q == "not_every":
        return Not(Forall(var, Implies(restrictor, body)))
    raise ValueError(f"unknown quantifier {q!r}")


# ---------------------------------------------------------------------------
# signature and linking constraints

# role order: premise subject NP, hypothesis subject NP, premise object NP,
# hypothesis object NP, premise VP, hypothesis VP
UNARY_PRED_IDS = ("S_p", "S_h", "O_p", "O_h")
BINARY_PRED_IDS = ("V_p", "V_h")


@dataclass(frozen=True)
class Signature:
    """Composite predicates for one aligned pair plus linking constraints."""

    subject_np: tuple[str, str]
    object_np: tuple[str, str]
    vp: tuple[str, str]
    constraints: tuple[Formula, ...]

    @property
    def unary_predicates(self) -> tuple[str, ...]:
        return (*self.subject_np, *self.object_np)

    @property
    def binary_predicates(self) -> tuple[str, ...]:
        return self.vp


def _pair_atom(pred: str, arity: int, positive: bool) -> Formula:
    atom: Formula
    if arity == 1:
        atom = UnaryAtom(pred, "x")
    elif arity == 2:
        atom = BinaryAtom(pred, "x", "y")
    else:
        raise ValueError(f"unsupported arity {arity}")
    return atom if positive else Not(atom)


def _close(f: Formula, arity: int, quantifier: type) -> Formula:
    f = quantifier("y", f) if arity == 2 else f
    return quantifier("x", f)


def realize_relation_constraints(
    rel: SemRelation, p_pred: str, h_pred: str, arity: int
) -> tuple[Formula, ...]:
    """Constraints forcing classify(P, H) = rel in every admissible model.

    Admissibility (all predicates non-empty and non-universal) is supplied
    separately by the non-vacuity premises; together with them each
    returned constraint set pins the full four-region emptiness pattern of
    its relation.  Independence contributes no constraint at all: it is
    the absence of any link, not a link demanding overlap.
    """
    p = _pair_atom(p_pred, arity, True)
    h = _pair_atom(h_pred, arity, True)
    np_ = _pair_atom(p_pred, arity, False)
    nh = _pair_atom(h_pred, arity, False)

    def forall(f: Formula) -> Formula:
        return _close(f, arity, Forall)

    def exists(f: Formula) -> Formula:
        return _close(f, arity, Exists)

    if rel is R.EQUIVALENCE:
        return (forall(mk_iff(p, h)),)
    if rel is R.FORWARD:
        return (forall(Implies(p, h)), exists(And((h, np_))))
    if rel is R.REVERSE:
        return (forall(Implies(h, p)), exists(And((p, nh))))
    if rel is R.NEGATION:
        return (forall(Not(And((p, h)))), forall(Or((p, h))))
    if rel is R.ALTERNATION:
        return (forall(Not(And((p, h)))), exists(And((np_, nh))))
    if rel is R.COVER:
        return (forall(Or((p, h))), exists(And((p, h))))
    if rel is R.INDEPENDENCE:
        return ()
    raise ValueError(f"unknown relation {rel!r}")


def nonvacuity_premises(pred: str, arity: int) -> tuple[Formula, Formula]:
    """The predicate is neither empty nor universal."""
    return (
        _close(_pair_atom(pred, arity, True), arity, Exists),
        _close(_pair_atom(pred, arity, False), arity, Exists),
    )


def build_signature(pair: NLIPair) -> Signature:
    """Composite signature for a pair with relation-linking constraints.

    Constraint order is fixed (subject NP, object NP, VP) so signatures,
    and everything derived from them, are deterministic.
    """
    slots = slot_relations(pair)
    constraints: list[Formula] = []
    constraints.extend(
        realize_relation_constraints(slots["subject_np"], "S_p", "S_h", arity=1)
    )
    constraints.extend(
        realize_relation_constraints(slots["object_np"], "O_p", "O_h", arity=1)
    )
    constraints.extend(
        realize_relation_constraints(slots["vp"], "V_p", "V_h", arity=2)
    )
    return Signature(
        subject_np=("S_p", "S_h"),
        object_np=("O_p", "O_h"),
        vp=("V_p", "V_h"),
        constraints=tuple(constraints),
    )


def aux_premises(signature: Signature) -> tuple[Formula, ...]:
    """Non-vacuity premises for all six composite predicates (12 formulas)."""
    out: list[Formula] = []
    for pred in signature.unary_predicates:
        out.extend(nonvacuity_premises(pred, arity=1))
    for pred in signature.binary_predicates:
        out.extend(nonvacuity_premises(pred, arity=2))
    return tuple(out)


def translate(sentence: Sentence, role: str, signature: Signature) -> Formula:
    """Translate a sentence against the composite signature.

    Scope follows surface order: subject quantifier over negation over
    object quantifier.
    """
    if role == "premise":
        i = 0
    elif role == "hypothesis":
        i = 1
    else:
        raise ValueError(f"role must be premise or hypothesis, got {role!r}")
    subj = UnaryAtom(signature.subject_np[i], "x")
    obj = UnaryAtom(signature.object_np[i], "y")
    vp = BinaryAtom(signature.vp[i], "x", "y")
    inner = quantify(sentence.q_o, "y", obj, vp)
    body = Not(inner) if sentence.neg else inner
    return quantify(sentence.q_s, "x", subj, body)


# ---------------------------------------------------------------------------
# atomic encoding: one predicate per word, links carried by word identity

def _atomic_np(adj: Optional[str], noun: str, var: str) -> Formula:
    if adj is None:
        return UnaryAtom(noun, var)
    return And((UnaryAtom(adj, var), UnaryAtom(noun, var)))


def _atomic_vp(adv: Optional[str], verb: str) -> Formula:
    if adv is None:
        return BinaryAtom(verb, "x", "y")
    return And((BinaryAtom(adv, "x", "y"), BinaryAtom(verb, "x", "y")))


def translate_atomic(sentence: Sentence) -> Formula:
    """Atomic-encoding translation; shared words link the pair implicitly."""
    inner = quantify(
        sentence.q_o, "y", _atomic_np(sentence.adj_o, sentence.n_o, "y"),
        _atomic_vp(sentence.adv, sentence.v),
    )
    body = Not(inner) if sentence.neg else inner
    return quantify(
        sentence.q_s, "x", _atomic_np(sentence.adj_s, sentence.n_s, "x"), body
    )


def _phrase_nonvacuity(expr: Formula, arity: int) -> tuple[Formula, Formula]:
    return (
        _close(expr, arity, Exists),
        _close(Not(expr), arity, Exists),
    )


def atomic_aux_premises(pair: NLIPair) -> tuple[Formula, ...]:
    """Non-vacuity of the six composite phrase expressions (12 formulas).

    The atomic encoding has no composite predicates, so non-vacuity
    attaches to the phrase expressions themselves, mirroring the composite
    encoding's aux premises one for one.
    """
    out: list[Formula] = []
    for s in (pair.premise, pair.hypothesis):
        out.extend(_phrase_nonvacuity(_atomic_np(s.adj_s, s.n_s, "x"), arity=1))
    for s in (pair.premise, pair.hypothesis):
        out.extend(_phrase_nonvacuity(_atomic_np(s.adj_o, s.n_o, "x"), arity=1))
    for s in (pair.premise, pair.hypothesis):
        out.extend(_phrase_nonvacuity(_atomic_vp(s.adv, s.v), arity=2))
    return tuple(out)
