"""Bounded finite-model search: the label oracle and table derivation engine.

Formulas are grounded over explicit domains {0..n-1} for n = 1..bound,
converted to CNF, and decided by a small deterministic DPLL.  Absence of a
model up to the bound is treated as absence (bounded completeness); the
cross-validation suites against the compositional labeler are the
empirical check that the default bound is large enough for this fragment.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Optional, Sequence

from .folsem import (
    And,
    BinaryAtom,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    UnaryAtom,
    aux_premises,
    build_signature,
    translate,
)
from .fragment import NLIPair
from .natlog import Label, slot_relations
from .relations import SemRelation, relation_from_pattern


class DegenerateProposition(Exception):
    """A proposition (or the premise) is unsatisfiable or valid under aux."""


@dataclass(frozen=True)
class FiniteModel:
    """Explicit model over domain {0..size-1}."""

    size: int
    unary: Mapping[str, frozenset[int]]
    binary: Mapping[str, frozenset[tuple[int, int]]]


def format_model(model: FiniteModel) -> str:
    lines = [f"domain: {' '.join(str(i) for i in range(model.size))}"]
    for pred in sorted(model.unary):
        elems = " ".join(str(e) for e in sorted(model.unary[pred]))
        lines.append(f"{pred} = {{{elems}}}")
    for pred in sorted(model.binary):
        pairs = " ".join(f"({a},{b})" for a, b in sorted(model.binary[pred]))
        lines.append(f"{pred} = {{{pairs}}}")
    return "\n".join(lines)


def eval_formula(
    formula: Formula, model: FiniteModel, assignment: Optional[dict] = None
) -> bool:
    """Tarskian evaluation; quantifiers range over the model domain."""
    asg = assignment or {}

    def ev(f: Formula, asg: dict) -> bool:
        if isinstance(f, UnaryAtom):
            if f.var not in asg:
                raise ValueError(f"unassigned variable {f.var!r}")
            return asg[f.var] in model.unary.get(f.pred, frozenset())
        if isinstance(f, BinaryAtom):
            for v in (f.var1, f.var2):
                if v not in asg:
                    raise ValueError(f"unassigned variable {v!r}")
            pair = (asg[f.var1], asg[f.var2])
            return pair in model.binary.get(f.pred, frozenset())
        if isinstance(f, Not):
            return not ev(f.body, asg)
        if isinstance(f, And):
            return all(ev(p, asg) for p in f.parts)
        if isinstance(f, Or):
            return any(ev(p, asg) for p in f.parts)
        if isinstance(f, Implies):
            return (not ev(f.antecedent, asg)) or ev(f.consequent, asg)
        if isinstance(f, Forall):
            return all(ev(f.body, {**asg, f.var: e}) for e in range(model.size))
        if isinstance(f, Exists):
            return any(ev(f.body, {**asg, f.var: e}) for e in range(model.size))
        raise TypeError(f"not a formula: {f!r}")

    return ev(formula, asg)


# ---------------------------------------------------------------------------
# grounding and CNF

def collect_predicates(formulas: Iterable[Formula]) -> dict[str, int]:
    """Predicate name -> arity over a formula collection."""
    arities: dict[str, int] = {}

    def walk(f: Formula) -> None:
        if isinstance(f, UnaryAtom):
            found = arities.setdefault(f.pred, 1)
            if found != 1:
                raise ValueError(f"predicate {f.pred!r} used at two arities")
        elif isinstance(f, BinaryAtom):
            found = arities.setdefault(f.pred, 2)
            if found != 2:
                raise ValueError(f"predicate {f.pred!r} used at two arities")
        elif isinstance(f, Not):
            walk(f.body)
        elif isinstance(f, (And, Or)):
            for p in f.parts:
                walk(p)
        elif isinstance(f, Implies):
            walk(f.antecedent)
            walk(f.consequent)
        elif isinstance(f, (Forall, Exists)):
            walk(f.body)
        else:
            raise TypeError(f"not a formula: {f!r}")

    for f in formulas:
        walk(f)
    return arities


class _Grounder:
    """Grounds formulas at a fixed domain size and Tseitin-encodes them.

    Atom variables are allocated up front for every predicate/argument
    combination in a fixed order, so models decode deterministically no
    matter which formulas mention which atoms.
    """

    def __init__(self, arities: Mapping[str, int], size: int):
        self.size = size
        self.atom_vars: dict[tuple, int] = {}
        for pred in sorted(arities):
            if arities[pred] == 1:
                for e in range(size):
                    self.atom_vars[(pred, e)] = len(self.atom_vars) + 1
            else:
                for a, b in product(range(size), range(size)):
                    self.atom_vars[(pred, a, b)] = len(self.atom_vars) + 1
        self.n_atom_vars = len(self.atom_vars)
        self.next_var = self.n_atom_vars + 1
        self.clauses: list[tuple[int, ...]] = []

    def _fresh(self) -> int:
        v = self.next_var
        self.next_var += 1
        return v

    def _encode(self, f: Formula, asg: dict) -> int:
        # returns a literal whose truth is forced equal to the subformula's
        if isinstance(f, UnaryAtom):
            return self.atom_vars[(f.pred, asg[f.var])]
        if isinstance(f, BinaryAtom):
            return self.atom_vars[(f.pred, asg[f.var1], asg[f.var2])]
        if isinstance(f, Not):
            return -self._encode(f.body, asg)
        if isinstance(f, Implies):
            return self._or([-self._encode(f.antecedent, asg),
                             self._encode(f.consequent, asg)])
        if isinstance(f, And):
            return -self._or([-self._encode(p, asg) for p in f.parts])
        if isinstance(f, Or):
            return self._or([self._encode(p, asg) for p in f.parts])
        if isinstance(f, Forall):
            return -self._or(
                [-self._encode(f.body, {**asg, f.var: e})
                 for e in range(self.size)]
            )
        if isinstance(f, Exists):
            return self._or(
                [self._encode(f.body, {**asg, f.var: e})
                 for e in range(self.size)]
            )
        raise TypeError(f"not a formula: {f!r}")

    def _or(self, lits: list[int]) -> int:
        if len(lits) == 1:
            return lits[0]
        v = self._fresh()
        self.clauses.append((-v, *lits))
        for lit in lits:
            self.clauses.append((v, -lit))
        return v

    def assert_formula(self, f: Formula) -> None:
        self.clauses.append((self._encode(f, {}),))

    def decode(self, assignment: Sequence[Optional[bool]]) -> FiniteModel:
        unary: dict[str, set[int]] = {}
        binary: dict[str, set[tuple[int, int]]] = {}
        for key, var in self.atom_vars.items():
            value = assignment[var]
            if len(key) == 2:
                unary.setdefault(key[0], set())
                if value:
                    unary[key[0]].add(key[1])
            else:
                binary.setdefault(key[0], set())
                if value:
                    binary[key[0]].add((key[1], key[2]))
        return FiniteModel(
            size=self.size,
            unary={p: frozenset(s) for p, s in unary.items()},
            binary={p: frozenset(s) for p, s in binary.items()},
        )


def _dpll(clauses: list[tuple[int, ...]], n_vars: int) -> Optional[list]:
    """Deterministic DPLL with unit propagation.

    Branches on the lowest-index unassigned variable, trying True first.
    Returns a 1-indexed assignment list or None.  Unconstrained variables
    come back False, which keeps decoded models minimal and stable.
    """
    assignment: list[Optional[bool]] = [None] * (n_vars + 1)
    # occurrence lists by variable
    occur: list[list[int]] = [[] for _ in range(n_vars + 1)]
    for ci, clause in enumerate(clauses):
        for lit in clause:
            occur[abs(lit)].append(ci)

    def clause_state(clause: tuple[int, ...]):
        # (satisfied, unassigned literals)
        unassigned = []
        for lit in clause:
            value = assignment[abs(lit)]
            if value is None:
                unassigned.append(lit)
            elif value == (lit > 0):
                return True, unassigned
        return False, unassigned

    def propagate(trail: list[int]) -> bool:
        # returns False on conflict; trail records assigned vars for undo
        queue = list(range(len(clauses)))
        while queue:
            next_queue = []
            for ci in queue:
                satisfied, unassigned = clause_state(clauses[ci])
                if satisfied:
                    continue
                if not unassigned:
                    return False
                if len(unassigned) == 1:
                    lit = unassigned[0]
                    assignment[abs(lit)] = lit > 0
                    trail.append(abs(lit))
                    next_queue.extend(occur[abs(lit)])
            queue = next_queue
        return True

    def search() -> bool:
        trail: list[int] = []
        if not propagate(trail):
            for v in trail:
                assignment[v] = None
            return False
        var = next(
            (v for v in range(1, n_vars + 1) if assignment[v] is None), None
        )
        if var is None:
            return True
        for value in (True, False):
            assignment[var] = value
            if search():
                return True
            assignment[var] = None
        for v in trail:
            assignment[v] = None
        return False

    if not search():
        return None
    for v in range(1, n_vars + 1):
        if assignment[v] is None:
            assignment[v] = False
    return assignment


def find_model(
    formulas: Sequence[Formula], bound: int
) -> Optional[FiniteModel]:
    """First model of the conjunction over domain sizes 1..bound, or None.

    Exhaustive up to the bound.  Every returned model is re-checked by
    direct evaluation before being handed out.
    """
    if bound < 1:
        raise ValueError("bound must be at least 1")
    formulas = list(formulas)
    arities = collect_predicates(formulas)
    for size in range(1, bound + 1):
        grounder = _Grounder(arities, size)
        for f in formulas:
            grounder.assert_formula(f)
        solution = _dpll(grounder.clauses, grounder.next_var - 1)
        if solution is None:
            continue
        model = grounder.decode(solution)
        for f in formulas:
            if not eval_formula(f, model):
                raise AssertionError(
                    "solver returned a non-model; grounding is broken"
                )
        return model
    return None


def formula_relation(
    phi: Formula, psi: Formula, aux: Sequence[Formula], bound: int
) -> SemRelation:
    """Relation between two propositions over the aux-constrained model space.

    Determined by the satisfiability pattern of the four sign combinations.
    Requires both propositions to be contingent given aux; after that
    precheck exactly the seven relational patterns are reachable.
    """
    aux = list(aux)

    def sat(*parts: Formula) -> bool:
        return find_model(aux + list(parts), bound) is not None

    for f, name in ((phi, "phi"), (psi, "psi")):
        if not sat(f):
            raise DegenerateProposition(f"{name} unsatisfiable under aux")
        if not sat(Not(f)):
            raise DegenerateProposition(f"{name} valid under aux")
    pattern = (
        sat(phi, psi),
        sat(phi, Not(psi)),
        sat(Not(phi), psi),
        sat(Not(phi), Not(psi)),
    )
    return relation_from_pattern(pattern)


# ---------------------------------------------------------------------------
# pair-level verdicts

@dataclass(frozen=True)
class OracleVerdict:
    label: Label
    bound_used: int
    witnesses: Mapping[str, FiniteModel] = field(default_factory=dict)


DEFAULT_BOUND = 3


class Oracle:
    """Pair labeler by bounded countermodel search.

    Verdicts depend on a pair only through its quantifiers, negations, and
    the three slot relations, so they are memoized per equivalence class;
    witnesses are class-level models over the composite signature.
    """

    def __init__(self, bound: int = DEFAULT_BOUND):
        if bound < 2:
            raise ValueError("bound must be at least 2")
        self.bound = bound
        self._cache: dict[tuple, OracleVerdict] = {}

    def pair_class(self, pair: NLIPair) -> tuple:
        p, h = pair.premise, pair.hypothesis
        slots = slot_relations(pair)
        return (
            p.q_s, h.q_s, p.neg, h.neg, p.q_o, h.q_o,
            slots["subject_np"], slots["vp"], slots["object_np"],
        )

    def formula_relation(
        self, phi: Formula, psi: Formula, aux: Sequence[Formula],
        bound: Optional[int] = None,
    ) -> SemRelation:
        return formula_relation(phi, psi, aux, bound or self.bound)

    def decide_label(self, pair: NLIPair) -> OracleVerdict:
        key = self.pair_class(pair)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        signature = build_signature(pair)
        base = list(aux_premises(signature)) + list(signature.constraints)
        phi_p = translate(pair.premise, "premise", signature)
        phi_h = translate(pair.hypothesis, "hypothesis", signature)
        if find_model(base + [phi_p], self.bound) is None:
            raise DegenerateProposition("premise unsatisfiable under aux")
        both = find_model(base + [phi_p, phi_h], self.bound)
        split = find_model(base + [phi_p, Not(phi_h)], self.bound)
        witnesses: dict[str, FiniteModel] = {}
        if both is not None:
            witnesses["premise_and_hypothesis"] = both
        if split is not None:
            witnesses["premise_and_not_hypothesis"] = split
        if split is None:
            label = Label.ENTAILMENT
        elif both is None:
            label = Label.CONTRADICTION
        else:
            label = Label.NEUTRAL
        verdict = OracleVerdict(
            label=label, bound_used=self.bound, witnesses=witnesses
        )
        self._cache[key] = verdict
        return verdict
