"""Encoding-equivalence sweep: truth tables, pattern algebra, tallies."""

import random

import numpy as np
import pytest

from quantnli.folsem import BinaryAtom, Not, UnaryAtom, quantify
from quantnli.fragment import QUANTIFIERS, build_lexicon
from quantnli.natlog import slot_relations
from quantnli.oracle import FiniteModel, eval_formula
from quantnli.relations import SemRelation as R
from quantnli.sweep import (
    SLOT_RELATION_ORDER,
    NPPattern,
    VPPattern,
    all_np_patterns,
    all_vp_patterns,
    build_concrete_pair,
    build_truth_table,
    composite_verdicts,
    cross_validate_sample,
    np_tuples_for_pattern,
    run_sweep,
    unary_pairs,
    verdicts_from_tuples,
    vp_pair_matrix,
)


def bits(mask: int, n: int) -> frozenset:
    return frozenset(i for i in range(n) if (mask >> i) & 1)


def rel_bits(mask: int, n: int) -> frozenset:
    return frozenset(
        (x, y) for x in range(n) for y in range(n) if (mask >> (x * n + y)) & 1
    )


class TestPatternEnumeration:
    def test_pattern_counts(self):
        assert len(all_np_patterns()) == 1296
        assert len(all_vp_patterns()) == 36

    def test_pair_space_arithmetic(self):
        # patterns * configs tile the concrete pair space exactly
        assert 1296 * 36 * 32 * 32 == 6912 ** 2

    def test_canonical_idempotent_and_relation_preserving(self):
        for pattern in all_np_patterns():
            canon = pattern.canonical()
            assert canon.canonical() == canon
            for slot in ("subject_np", "object_np"):
                assert canon.slot_relation(slot) is pattern.slot_relation(slot)

    def test_canonical_orbits_partition_the_space(self):
        from collections import Counter

        orbit_of = Counter(p.canonical() for p in all_np_patterns())
        assert sum(orbit_of.values()) == 1296
        assert len(orbit_of) < 1296


class TestSlotRelationsFromPatterns:
    def test_np_spots(self):
        same = NPPattern(nouns=(0, 0, 0, 0), adjs=(-1, -1, -1, -1))
        assert same.slot_relation("subject_np") is R.EQUIVALENCE
        assert same.slot_relation("object_np") is R.EQUIVALENCE

        noun_flip = NPPattern(nouns=(0, 0, 1, 0), adjs=(-1, -1, -1, -1))
        assert noun_flip.slot_relation("subject_np") is R.INDEPENDENCE
        assert noun_flip.slot_relation("object_np") is R.EQUIVALENCE

        premise_mod = NPPattern(nouns=(0, 0, 0, 0), adjs=(0, -1, -1, -1))
        assert premise_mod.slot_relation("subject_np") is R.FORWARD

        hyp_mod = NPPattern(nouns=(0, 0, 0, 0), adjs=(-1, -1, 1, -1))
        assert hyp_mod.slot_relation("subject_np") is R.REVERSE

        distinct_mods = NPPattern(nouns=(0, 0, 0, 0), adjs=(0, -1, 1, -1))
        assert distinct_mods.slot_relation("subject_np") is R.INDEPENDENCE

    def test_vp_spots(self):
        assert VPPattern(verbs=(0, 0), advs=(-1, -1)).slot_relation() is (
            R.EQUIVALENCE
        )
        assert VPPattern(verbs=(0, 1), advs=(0, 0)).slot_relation() is (
            R.INDEPENDENCE
        )
        assert VPPattern(verbs=(1, 1), advs=(0, -1)).slot_relation() is (
            R.FORWARD
        )
        assert VPPattern(verbs=(1, 1), advs=(0, 1)).slot_relation() is (
            R.INDEPENDENCE
        )

    def test_pattern_matches_built_pair(self):
        # relations computed from the pattern equal natlog's relations on
        # the concrete pair the pattern builds
        lexicon = build_lexicon(0, 2)
        rng = random.Random(23)
        np_patterns = all_np_patterns()
        vp_patterns = all_vp_patterns()
        for _ in range(60):
            np_pat = rng.choice(np_patterns)
            vp_pat = rng.choice(vp_patterns)
            pair = build_concrete_pair(
                np_pat, vp_pat, rng.randrange(32), rng.randrange(32), lexicon
            )
            rels = slot_relations(pair)
            assert rels["subject_np"] is np_pat.slot_relation("subject_np")
            assert rels["object_np"] is np_pat.slot_relation("object_np")
            assert rels["vp"] is vp_pat.slot_relation()


class TestTruthTable:
    @pytest.mark.parametrize("n,samples", [(2, 250), (3, 40)])
    def test_grounded_against_formula_evaluation(self, n, samples):
        # the tensor's sentence truth must match Tarskian evaluation of
        # the corresponding quantified formula on the decoded model
        T = build_truth_table(n)
        rng = random.Random(n)
        for _ in range(samples):
            iq_s, neg, iq_o = (
                rng.randrange(4), rng.randrange(2), rng.randrange(4)
            )
            cfg = iq_s * 8 + neg * 4 + iq_o
            s_mask = rng.randrange(1 << n)
            o_mask = rng.randrange(1 << n)
            v_mask = rng.randrange(1 << (n * n))
            model = FiniteModel(
                size=n,
                unary={"S": bits(s_mask, n), "O": bits(o_mask, n)},
                binary={"V": rel_bits(v_mask, n)},
            )
            inner = quantify(
                QUANTIFIERS[iq_o], "y", UnaryAtom("O", "y"),
                BinaryAtom("V", "x", "y"),
            )
            body = Not(inner) if neg else inner
            formula = quantify(
                QUANTIFIERS[iq_s], "x", UnaryAtom("S", "x"), body
            )
            assert bool(T[cfg, s_mask, v_mask, o_mask]) == eval_formula(
                formula, model
            )


class TestExtensionEnumeration:
    def test_identity_pattern_tuples(self):
        pattern = NPPattern(nouns=(0, 0, 0, 0), adjs=(-1, -1, -1, -1))
        tuples = np_tuples_for_pattern(pattern, 2)
        # all four slots share one noun extension; properness leaves the
        # two singleton subsets of a two-element universe
        assert tuples.tolist() == [[1, 1, 1, 1], [2, 2, 2, 2]]

    def test_two_noun_pattern_tuples(self):
        pattern = NPPattern(nouns=(0, 1, 0, 1), adjs=(-1, -1, -1, -1))
        tuples = np_tuples_for_pattern(pattern, 2)
        assert tuples.tolist() == [
            [a, b, a, b] for a in (1, 2) for b in (1, 2)
        ]

    def test_modifier_intersection_respects_properness(self):
        # premise subject carries a modifier: its extension is a proper
        # subset or equal, but never empty or universal
        pattern = NPPattern(nouns=(0, 0, 0, 0), adjs=(0, -1, -1, -1))
        tuples = np_tuples_for_pattern(pattern, 2)
        for s_p, o_p, s_h, o_h in tuples.tolist():
            assert s_p & s_h == s_p  # subset of the shared noun
            assert s_p not in (0, 3)
            assert o_p == s_h == o_h  # unmodified slots share the noun

    def test_unary_pairs_strict_vs_loose(self):
        strict = unary_pairs(R.FORWARD, 2, strict=True)
        loose = unary_pairs(R.FORWARD, 2, strict=False)
        # at size 2 no proper strict subset chain exists among singletons
        assert len(strict) == 0
        assert {tuple(p) for p in loose.tolist()} == {(1, 1), (2, 2)}
        strict3 = unary_pairs(R.FORWARD, 3, strict=True)
        assert all(a != b and a & ~b == 0 for a, b in strict3.tolist())
        assert len(strict3) > 0


class TestVpMatrices:
    def test_equivalence_is_proper_diagonal(self):
        m = vp_pair_matrix(R.EQUIVALENCE, 2, strict=True)
        diag = np.diag(np.ones(m.shape[0], dtype=bool))
        assert m.shape == (16, 16)
        assert not m[0, 0] and not m[15, 15]  # improper extensions excluded
        assert np.array_equal(m & diag, m)

    def test_strict_subset_of_loose(self):
        for rel in SLOT_RELATION_ORDER:
            s = vp_pair_matrix(rel, 2, strict=True)
            l = vp_pair_matrix(rel, 2, strict=False)
            assert not np.any(s & ~l)

    def test_forward_strictness_excludes_equality(self):
        s = vp_pair_matrix(R.FORWARD, 2, strict=True)
        assert not np.any(np.diag(s))
        l = vp_pair_matrix(R.FORWARD, 2, strict=False)
        assert np.any(np.diag(l))


@pytest.fixture(scope="module")
def sweep2():
    return run_sweep(bound=2)


class TestSweepBound2:
    def test_total_covers_pair_space(self, sweep2):
        assert sweep2.total_pairs == 6912 ** 2 == 47_775_744

    def test_frozen_tallies(self, sweep2):
        # exact, reproducible decomposition of the pair space at bound 2
        assert sweep2.agree == 28_819_456
        assert sweep2.disagree == 81_920
        assert sweep2.composite_degenerate == 18_874_368
        assert sweep2.atomic_degenerate_only == 0
        assert sweep2.both_degenerate == 0
        assert sweep2.codefined == sweep2.agree + sweep2.disagree

    def test_partition_sums(self, sweep2):
        total = (
            sweep2.agree + sweep2.disagree + sweep2.composite_degenerate
            + sweep2.atomic_degenerate_only + sweep2.both_degenerate
        )
        assert total == sweep2.total_pairs

    def test_disagreements_are_atomic_entailments(self, sweep2):
        # every bound-2 disagreement comes from extensional collapse:
        # a shared noun plus properness leaves a single possible subject
        # set, so the atomic encoding proves an entailment the composite
        # encoding's abstract relation does not license
        assert sweep2.disagreement_examples
        for example in sweep2.disagreement_examples:
            assert example["atomic"] != example["composite"]
            assert set(example) == {
                "np_pattern", "vp_relation", "cfg", "atomic", "composite",
            }


class TestSweepBound3Spot:
    def test_composite_verdicts_harmless_at_identity(self):
        comp = composite_verdicts(2)
        # identical sentences (same config, all slots equivalent) are
        # entailments wherever defined
        idx = SLOT_RELATION_ORDER.index(R.EQUIVALENCE)
        diag = comp[idx, idx, idx][np.arange(32), np.arange(32)]
        defined = diag != 0
        assert defined.any()
        assert np.all(diag[defined] == 2)


class TestOracleCrossValidation:
    def test_enumeration_matches_dpll_oracle(self):
        checked, failures = cross_validate_sample(seed=5, count=20, bound=2)
        assert checked == 20
        assert failures == []
