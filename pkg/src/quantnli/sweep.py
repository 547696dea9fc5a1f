"""Exhaustive encoding-equivalence sweep on a two-word mini-lexicon.

Both first-order encodings of a pair (composite: six abstract predicates
with relation-linking constraints; atomic: one predicate per word) are
decided here by direct finite-model enumeration instead of the search
oracle.  At a small bound the full model space per abstract class is tiny,
so every class realizable from a two-word lexicon can be decided exactly,
and a random sample of classes is re-decided through the DPLL oracle on
concrete pairs to pin the enumeration to the real encodings.

Class structure: a concrete pair is determined by its quantifier/negation
configuration (1024 options) together with the word-index pattern of the
four NP slots (1,296 options; noun and adjective choices couple subject
and object slots across both sentences) and of the two VP slots (36
options).  1,296 * 36 * 1,024 equals the number of concrete pairs,
6,912 squared, so sweeping patterns covers the pair space exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import product
from typing import Optional

import numpy as np

from .fragment import QUANTIFIERS, Lexicon, NLIPair, Sentence, build_lexicon
from .natlog import Label
from .relations import SemRelation

R = SemRelation

SLOT_RELATION_ORDER = (R.EQUIVALENCE, R.FORWARD, R.REVERSE, R.INDEPENDENCE)

# verdict codes: 2 * exists(premise and hypothesis) + exists(premise and
# not hypothesis); 0 means no model satisfies the premise under aux
DEGENERATE, CONTRADICTION, ENTAILMENT, NEUTRAL = 0, 1, 2, 3
VERDICT_NAMES = ("degenerate", "contradiction", "entailment", "neutral")

_LABEL_TO_VERDICT = {
    Label.ENTAILMENT: ENTAILMENT,
    Label.CONTRADICTION: CONTRADICTION,
    Label.NEUTRAL: NEUTRAL,
}


def _proper_unary(n: int) -> np.ndarray:
    full = (1 << n) - 1
    masks = np.arange(1 << n)
    return (masks != 0) & (masks != full)


def _proper_binary(n: int) -> np.ndarray:
    full = (1 << (n * n)) - 1
    masks = np.arange(1 << (n * n))
    return (masks != 0) & (masks != full)


def build_truth_table(n: int) -> np.ndarray:
    """Sentence truth over extension triples at universe size n.

    Returns bool array T[cfg, S, V, O]: cfg encodes (q_s, neg, q_o) as
    q_s * 8 + neg * 4 + q_o; S and O are subject/object NP extensions as
    n-bit masks, V the verb-phrase relation as an n*n-bit mask with bit
    x * n + y meaning V(x, y).
    """
    nsub = 1 << n
    nrel = 1 << (n * n)
    sub_full = nsub - 1
    V = np.arange(nrel)
    O = np.arange(nsub)
    rows = [(V >> (x * n)) & sub_full for x in range(n)]  # {y: V(x,y)}

    def holds(q: str, restr, body) -> np.ndarray:
        # classical readings; aux premises exclude empty restrictors anyway
        inter = restr & body
        if q == "every":
            return inter == restr
        if q == "some":
            return inter != 0
        if q == "no":
            return inter == 0
        return inter != restr  # not_every

    T = np.zeros((32, nsub, nrel, nsub), dtype=bool)
    for iq_s, q_s in enumerate(QUANTIFIERS):
        for neg in (0, 1):
            for iq_o, q_o in enumerate(QUANTIFIERS):
                cfg = iq_s * 8 + neg * 4 + iq_o
                # B[V, O] bit x set iff the VP body holds of element x
                B = np.zeros((nrel, nsub), dtype=np.int64)
                for x in range(n):
                    bx = holds(q_o, O[None, :], rows[x][:, None])
                    if neg:
                        bx = ~bx
                    B |= bx.astype(np.int64) << x
                for S in range(nsub):
                    T[cfg, S] = holds(q_s, S, B)
    return T


@dataclass(frozen=True)
class NPPattern:
    """Word indices for the four NP slots of a pair.

    nouns: (subject premise, object premise, subject hyp, object hyp),
    each 0 or 1; adjs likewise with -1 for an empty modifier slot.
    """

    nouns: tuple[int, int, int, int]
    adjs: tuple[int, int, int, int]

    def slot_relation(self, slot: str) -> SemRelation:
        if slot == "subject_np":
            idx = (0, 2)
        else:
            idx = (1, 3)
        n_p, n_h = self.nouns[idx[0]], self.nouns[idx[1]]
        a_p, a_h = self.adjs[idx[0]], self.adjs[idx[1]]
        if n_p != n_h:
            return R.INDEPENDENCE
        if a_p == a_h:
            return R.EQUIVALENCE
        if a_h < 0:
            return R.FORWARD
        if a_p < 0:
            return R.REVERSE
        return R.INDEPENDENCE

    def canonical(self) -> "NPPattern":
        best = None
        for swap_n, swap_a in product((False, True), repeat=2):
            nouns = tuple(1 - i if swap_n else i for i in self.nouns)
            adjs = tuple(
                (1 - i if swap_a else i) if i >= 0 else -1 for i in self.adjs
            )
            cand = (nouns, adjs)
            if best is None or cand < best:
                best = cand
        return NPPattern(nouns=best[0], adjs=best[1])


@dataclass(frozen=True)
class VPPattern:
    """Word indices for the two VP slots: verbs (premise, hyp), adverbs
    likewise with -1 for empty."""

    verbs: tuple[int, int]
    advs: tuple[int, int]

    def slot_relation(self) -> SemRelation:
        if self.verbs[0] != self.verbs[1]:
            return R.INDEPENDENCE
        if self.advs[0] == self.advs[1]:
            return R.EQUIVALENCE
        if self.advs[1] < 0:
            return R.FORWARD
        if self.advs[0] < 0:
            return R.REVERSE
        return R.INDEPENDENCE


def all_np_patterns() -> list[NPPattern]:
    return [
        NPPattern(nouns=nouns, adjs=adjs)
        for nouns in product((0, 1), repeat=4)
        for adjs in product((-1, 0, 1), repeat=4)
    ]


def all_vp_patterns() -> list[VPPattern]:
    return [
        VPPattern(verbs=verbs, advs=advs)
        for verbs in product((0, 1), repeat=2)
        for advs in product((-1, 0, 1), repeat=2)
    ]


def np_tuples_for_pattern(pattern: NPPattern, n: int) -> np.ndarray:
    """All aux-proper (S_p, O_p, S_h, O_h) extension tuples reachable by
    free choice of the two noun and two adjective extensions."""
    nsub = 1 << n
    grids = np.meshgrid(*([np.arange(nsub)] * 4), indexing="ij")
    nouns = grids[:2]
    adjs = grids[2:]
    slots = []
    for pos in range(4):
        ext = nouns[pattern.nouns[pos]]
        a = pattern.adjs[pos]
        if a >= 0:
            ext = ext & adjs[a]
        slots.append(ext.ravel())
    tuples = np.stack(slots, axis=1)
    proper = _proper_unary(n)
    keep = proper[tuples].all(axis=1)
    return np.unique(tuples[keep], axis=0)


def vp_pair_matrix(rel: SemRelation, n: int, strict: bool) -> np.ndarray:
    """Admissible (V_p, V_h) mask pairs for a VP slot in the given relation.

    strict selects the composite encoding's reading (subset means proper
    subset); the atomic encoding reaches equality too, because distinct
    modifier words may denote equal sets.
    """
    nrel = 1 << (n * n)
    V = np.arange(nrel)
    a, b = V[:, None], V[None, :]
    if rel is R.EQUIVALENCE:
        m = a == b
    elif rel is R.FORWARD:
        m = (a & ~b) == 0
        if strict:
            m &= a != b
    elif rel is R.REVERSE:
        m = (b & ~a) == 0
        if strict:
            m &= a != b
    else:
        m = np.ones((nrel, nrel), dtype=bool)
    proper = _proper_binary(n)
    return m & proper[:, None] & proper[None, :]


def unary_pairs(rel: SemRelation, n: int, strict: bool) -> np.ndarray:
    """Aux-proper (premise, hypothesis) extension pairs for a unary slot."""
    nsub = 1 << n
    proper = np.flatnonzero(_proper_unary(n))
    out = []
    for a in proper:
        for b in proper:
            if rel is R.EQUIVALENCE:
                ok = a == b
            elif rel is R.FORWARD:
                ok = (a & ~b) == 0 and (not strict or a != b)
            elif rel is R.REVERSE:
                ok = (b & ~a) == 0 and (not strict or a != b)
            else:
                ok = True
            if ok:
                out.append((a, b))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def verdicts_from_tuples(
    T: np.ndarray,
    tuples: np.ndarray,
    vp_matrix: np.ndarray,
) -> np.ndarray:
    """Verdict codes (32, 32) over premise/hypothesis configs.

    tuples holds (S_p, O_p, S_h, O_h) rows; vp_matrix the admissible
    (V_p, V_h) pairs.  A verdict combines satisfiability of premise-and-
    hypothesis and premise-and-not-hypothesis over the joint model space.
    """
    if len(tuples) == 0 or not vp_matrix.any():
        return np.zeros((32, 32), dtype=np.uint8)
    T2 = np.ascontiguousarray(T.transpose(0, 1, 3, 2))  # (cfg, S, O, V)
    Wp = T2[:, tuples[:, 0], tuples[:, 1], :]  # (32, k, nrel)
    Wh = T2[:, tuples[:, 2], tuples[:, 3], :]
    k, nrel = Wp.shape[1], Wp.shape[2]
    M = vp_matrix.astype(np.float32)
    # X[cfg_p, j, V_h] = exists V_p: premise true and (V_p, V_h) admissible
    X = (Wp.reshape(-1, nrel).astype(np.float32) @ M).reshape(32, k, nrel) > 0
    Xf = X.reshape(32, -1).astype(np.float32)
    Whf = Wh.reshape(32, -1).astype(np.float32)
    both = (Xf @ Whf.T) > 0  # exists premise and hypothesis
    split = (Xf @ (1.0 - Whf).T) > 0  # exists premise and not hypothesis
    return (2 * both + split).astype(np.uint8)


def composite_verdicts(n: int) -> np.ndarray:
    """Verdicts (4, 4, 4, 32, 32) for all slot-relation triples, indexed
    (r_subject, r_vp, r_object) in SLOT_RELATION_ORDER."""
    T = build_truth_table(n)
    out = np.zeros((4, 4, 4, 32, 32), dtype=np.uint8)
    upairs = {rel: unary_pairs(rel, n, strict=True) for rel in SLOT_RELATION_ORDER}
    vmats = {rel: vp_pair_matrix(rel, n, strict=True) for rel in SLOT_RELATION_ORDER}
    for i_s, r_s in enumerate(SLOT_RELATION_ORDER):
        for i_o, r_o in enumerate(SLOT_RELATION_ORDER):
            su, ob = upairs[r_s], upairs[r_o]
            if len(su) == 0 or len(ob) == 0:
                continue
            gs, go = np.meshgrid(
                np.arange(len(su)), np.arange(len(ob)), indexing="ij"
            )
            tuples = np.stack(
                [
                    su[gs.ravel(), 0], ob[go.ravel(), 0],
                    su[gs.ravel(), 1], ob[go.ravel(), 1],
                ],
                axis=1,
            )
            for i_v, r_v in enumerate(SLOT_RELATION_ORDER):
                out[i_s, i_v, i_o] = verdicts_from_tuples(T, tuples, vmats[r_v])
    return out


@dataclass
class SweepReport:
    bound: int
    total_pairs: int
    agree: int
    disagree: int
    composite_degenerate: int
    atomic_degenerate_only: int
    both_degenerate: int
    disagreement_examples: list = field(default_factory=list)
    oracle_checks: int = 0
    oracle_check_failures: int = 0

    @property
    def codefined(self) -> int:
        return self.agree + self.disagree


def run_sweep(bound: int = 2, example_limit: int = 10) -> SweepReport:
    """Compare the two encodings over every pair class at the given bound.

    Every concrete premise/hypothesis pair of the two-word lexicon belongs
    to exactly one (NP pattern, VP pattern, config) class, so the tallies
    below are exact pair counts over the full 6,912 x 6,912 pair space.
    """
    T = build_truth_table(bound)
    comp = composite_verdicts(bound)
    vmats = {
        rel: vp_pair_matrix(rel, bound, strict=False)
        for rel in SLOT_RELATION_ORDER
    }

    # atomic verdicts per canonical NP pattern and VP slot relation
    np_patterns = all_np_patterns()
    canon_cache: dict[NPPattern, dict[SemRelation, np.ndarray]] = {}
    rel_index = {rel: i for i, rel in enumerate(SLOT_RELATION_ORDER)}

    vp_counts = {rel: 0 for rel in SLOT_RELATION_ORDER}
    for vp in all_vp_patterns():
        vp_counts[vp.slot_relation()] += 1

    report = SweepReport(
        bound=bound, total_pairs=0, agree=0, disagree=0,
        composite_degenerate=0, atomic_degenerate_only=0, both_degenerate=0,
    )
    for pattern in np_patterns:
        canon = pattern.canonical()
        if canon not in canon_cache:
            tuples = np_tuples_for_pattern(canon, bound)
            canon_cache[canon] = {
                rel: verdicts_from_tuples(T, tuples, vmats[rel])
                for rel in SLOT_RELATION_ORDER
            }
        i_s = rel_index[pattern.slot_relation("subject_np")]
        i_o = rel_index[pattern.slot_relation("object_np")]
        for rel, count in vp_counts.items():
            atom = canon_cache[canon][rel]
            compv = comp[i_s, rel_index[rel], i_o]
            comp_deg = compv == DEGENERATE
            atom_deg = atom == DEGENERATE
            both = comp_deg & atom_deg
            codef = ~comp_deg & ~atom_deg
            eq = codef & (atom == compv)
            ne = codef & (atom != compv)
            report.total_pairs += count * atom.size
            report.agree += count * int(eq.sum())
            report.disagree += count * int(ne.sum())
            report.both_degenerate += count * int(both.sum())
            report.composite_degenerate += count * int(
                (comp_deg & ~atom_deg).sum()
            )
            report.atomic_degenerate_only += count * int(
                (atom_deg & ~comp_deg).sum()
            )
            if ne.any() and len(report.disagreement_examples) < example_limit:
                cfg_p, cfg_h = np.argwhere(ne)[0]
                report.disagreement_examples.append(
                    {
                        "np_pattern": (pattern.nouns, pattern.adjs),
                        "vp_relation": rel.value,
                        "cfg": (int(cfg_p), int(cfg_h)),
                        "atomic": VERDICT_NAMES[atom[cfg_p, cfg_h]],
                        "composite": VERDICT_NAMES[compv[cfg_p, cfg_h]],
                    }
                )
    return report


# ---------------------------------------------------------------------------
# concrete-pair construction and oracle cross-checks

def _cfg_decode(cfg: int) -> tuple[str, bool, str]:
    return QUANTIFIERS[cfg >> 3], bool((cfg >> 2) & 1), QUANTIFIERS[cfg & 3]


def build_concrete_pair(
    np_pattern: NPPattern, vp_pattern: VPPattern,
    cfg_p: int, cfg_h: int, lexicon: Lexicon,
) -> NLIPair:
    def adj(i: int) -> Optional[str]:
        return None if i < 0 else lexicon.adjectives[i]

    def adv(i: int) -> Optional[str]:
        return None if i < 0 else lexicon.adverbs[i]

    sents = []
    for role, cfg in ((0, cfg_p), (1, cfg_h)):
        q_s, neg, q_o = _cfg_decode(cfg)
        # noun/adj position order is (subject premise, object premise,
        # subject hypothesis, object hypothesis)
        positions = (0, 1) if role == 0 else (2, 3)
        sents.append(
            Sentence(
                q_s=q_s,
                adj_s=adj(np_pattern.adjs[positions[0]]),
                n_s=lexicon.nouns[np_pattern.nouns[positions[0]]],
                neg=neg,
                adv=adv(vp_pattern.advs[role]),
                v=lexicon.verbs[vp_pattern.verbs[role]],
                q_o=q_o,
                adj_o=adj(np_pattern.adjs[positions[1]]),
                n_o=lexicon.nouns[np_pattern.nouns[positions[1]]],
            )
        )
    return NLIPair(sents[0], sents[1])


def atomic_oracle_verdict(pair: NLIPair, bound: int) -> int:
    """Decide a pair through the atomic encoding with the DPLL oracle."""
    from .folsem import Not, atomic_aux_premises, translate_atomic
    from .oracle import find_model

    aux = list(atomic_aux_premises(pair))
    phi_p = translate_atomic(pair.premise)
    phi_h = translate_atomic(pair.hypothesis)
    both = find_model(aux + [phi_p, phi_h], bound) is not None
    split = find_model(aux + [phi_p, Not(phi_h)], bound) is not None
    return 2 * both + split


def composite_oracle_verdict(pair: NLIPair, bound: int) -> int:
    from .oracle import DegenerateProposition, Oracle

    try:
        verdict = Oracle(bound=bound).decide_label(pair)
    except DegenerateProposition:
        return DEGENERATE
    return _LABEL_TO_VERDICT[verdict.label]


def cross_validate_sample(
    seed: int, count: int, bound: int = 2
) -> tuple[int, list]:
    """Re-decide random classes with the DPLL oracle on concrete pairs and
    compare against the enumeration verdicts.  Returns (checked, failures).
    """
    rng = random.Random(seed)
    lexicon = build_lexicon(0, 2)
    T = build_truth_table(bound)
    comp = composite_verdicts(bound)
    rel_index = {rel: i for i, rel in enumerate(SLOT_RELATION_ORDER)}
    vmats = {
        rel: vp_pair_matrix(rel, bound, strict=False)
        for rel in SLOT_RELATION_ORDER
    }
    np_patterns = all_np_patterns()
    vp_patterns = all_vp_patterns()
    failures = []
    for _ in range(count):
        np_pat = rng.choice(np_patterns)
        vp_pat = rng.choice(vp_patterns)
        cfg_p, cfg_h = rng.randrange(32), rng.randrange(32)
        pair = build_concrete_pair(np_pat, vp_pat, cfg_p, cfg_h, lexicon)

        tuples = np_tuples_for_pattern(np_pat, bound)
        vrel = vp_pat.slot_relation()
        want_atom = int(
            verdicts_from_tuples(T, tuples, vmats[vrel])[cfg_p, cfg_h]
        )
        want_comp = int(
            comp[
                rel_index[np_pat.slot_relation("subject_np")],
                rel_index[vrel],
                rel_index[np_pat.slot_relation("object_np")],
                cfg_p, cfg_h,
            ]
        )
        got_atom = atomic_oracle_verdict(pair, bound)
        got_comp = composite_oracle_verdict(pair, bound)
        if got_atom != want_atom or got_comp != want_comp:
            failures.append(
                {
                    "np_pattern": (np_pat.nouns, np_pat.adjs),
                    "vp_pattern": (vp_pat.verbs, vp_pat.advs),
                    "cfg": (cfg_p, cfg_h),
                    "atomic": (VERDICT_NAMES[want_atom], VERDICT_NAMES[got_atom]),
                    "composite": (VERDICT_NAMES[want_comp], VERDICT_NAMES[got_comp]),
                }
            )
    return count, failures
