"""Relation-controlled sampling, labeling, balancing, splits, and serialization.

The pipeline works on abstract pair classes: a pair's label depends only on
its quantifiers, negations, and the three slot relations, so labeling a
batch is a table lookup into a label array built once per run from the
semantic tables.  Candidate pairs are sampled in fixed-size numpy batches
drawn from named PCG64 substreams, which is what makes corpora
byte-identical across runs at equal config.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .fragment import (
    NEGATIVE_QUANTIFIERS,
    QUANTIFIERS,
    Lexicon,
    NLIPair,
    Sentence,
    build_lexicon,
    pair_negation_count,
    render,
)
from .natlog import (
    Label,
    Tables,
    negation_side,
    relation_set_to_label,
)
from .relations import CODE_TO_RELATION, SemRelation
from .seeding import substream_seed

R = SemRelation

# index orders shared by the whole vectorized path
SLOT_RELATION_ORDER = (R.EQUIVALENCE, R.FORWARD, R.REVERSE, R.INDEPENDENCE)
LABEL_ORDER = (Label.ENTAILMENT, Label.CONTRADICTION, Label.NEUTRAL)
_AMBIGUOUS = 3  # label-array value for cells needing the oracle

SLOT_KEYS = ("subject_np", "vp", "object_np")

BATCH_SIZE = 1 << 16

AUDIT_RATE = 0.01
AUDIT_BOUND = 3


class QuotaExhaustedError(RuntimeError):
    def __init__(self, label: Label, attempts: int):
        super().__init__(
            f"label quota for {label.value!r} unreachable after "
            f"{attempts} sampled candidates"
        )
        self.label = label


@dataclass
class ExampleRecord:
    premise: tuple[str, ...]
    hypothesis: tuple[str, ...]
    label: Label
    slot_relations: dict[str, SemRelation]
    negation_count: int
    labeler: str
    informative: bool
    witnesses: Optional[dict] = None

    def to_json(self) -> str:
        meta: dict = {
            "slot_relations": {
                k: self.slot_relations[k].value for k in SLOT_KEYS
            },
            "negation_count": self.negation_count,
            "labeler": self.labeler,
            "informative": self.informative,
        }
        if self.witnesses is not None:
            meta["witnesses"] = self.witnesses
        return json.dumps(
            {
                "premise": list(self.premise),
                "hypothesis": list(self.hypothesis),
                "label": self.label.value,
                "meta": meta,
            },
            separators=(",", ":"),
        )

    @classmethod
    def from_json(cls, line: str) -> "ExampleRecord":
        obj = json.loads(line)
        meta = obj["meta"]
        return cls(
            premise=tuple(obj["premise"]),
            hypothesis=tuple(obj["hypothesis"]),
            label=Label(obj["label"]),
            slot_relations={
                k: CODE_TO_RELATION[v]
                for k, v in meta["slot_relations"].items()
            },
            negation_count=int(meta["negation_count"]),
            labeler=meta["labeler"],
            informative=bool(meta["informative"]),
            witnesses=meta.get("witnesses"),
        )


def write_jsonl(records: Iterable[ExampleRecord], path: Union[str, Path]) -> None:
    Path(path).write_text(
        "".join(r.to_json() + "\n" for r in records)
    )


def read_jsonl(path: Union[str, Path]) -> list[ExampleRecord]:
    records = []
    for i, line in enumerate(Path(path).read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            records.append(ExampleRecord.from_json(line))
        except (KeyError, ValueError) as err:
            raise ValueError(f"{path}:{i}: malformed record: {err}") from err
    return records


def write_tsv(records: Iterable[ExampleRecord], path: Union[str, Path]) -> None:
    lines = [
        f"{' '.join(r.premise)}\t{' '.join(r.hypothesis)}\t{r.label.value}"
        for r in records
    ]
    Path(path).write_text("".join(line + "\n" for line in lines))


@dataclass(frozen=True)
class CorpusConfig:
    train_size: int = 30_000
    dev_size: int = 1_000
    test_size: int = 1_000
    seed: int = 0
    balance_labels: bool = True
    relation_balanced: bool = True
    oracle_bound: int = 3
    out_dir: Optional[str] = None
    format: str = "jsonl"
    words_per_category: int = 100
    wordlist: Optional[str] = None
    include_witnesses: bool = False
    max_attempts: Optional[int] = None

    def __post_init__(self):
        for name in ("train_size", "dev_size", "test_size"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.format not in ("jsonl", "tsv"):
            raise ValueError(f"format must be jsonl or tsv, got {self.format!r}")
        if self.oracle_bound < 2:
            raise ValueError("oracle_bound must be at least 2")
        if self.words_per_category < 1:
            raise ValueError("words_per_category must be positive")

    @property
    def total_size(self) -> int:
        return self.train_size + self.dev_size + self.test_size

    @property
    def attempt_ceiling(self) -> int:
        if self.max_attempts is not None:
            return self.max_attempts
        return max(1_000_000, 500 * self.total_size)

    def build_lexicon(self) -> Lexicon:
        source: Union[int, str] = (
            self.wordlist if self.wordlist is not None else 0
        )
        return build_lexicon(source, self.words_per_category)


# ---------------------------------------------------------------------------
# scalar relation-balanced sampler (reference implementation)

def _realize_slot(rng, target: SemRelation, heads: Sequence[str],
                  mods: Sequence[str]) -> tuple:
    """(mod_p, head_p, mod_h, head_h) realizing the target slot relation."""
    head_p = rng.choice(heads)
    if target is R.EQUIVALENCE:
        # realization uniform over the two patterns: both empty / shared word
        mod = None if rng.random() < 0.5 else rng.choice(mods)
        return mod, head_p, mod, head_p
    if target is R.FORWARD:
        return rng.choice(mods), head_p, None, head_p
    if target is R.REVERSE:
        return None, head_p, rng.choice(mods), head_p
    # independence: uniform over the six admissible patterns -- five with
    # distinct heads (modifiers empty/empty, empty/word, word/empty,
    # shared word, distinct words) plus shared head with distinct modifiers
    pattern = rng.randrange(6)
    other_head = heads[
        (heads.index(head_p) + 1 + rng.randrange(len(heads) - 1)) % len(heads)
    ]
    w1 = rng.choice(mods)
    w2 = mods[(mods.index(w1) + 1 + rng.randrange(len(mods) - 1)) % len(mods)]
    if pattern == 0:
        return None, head_p, None, other_head
    if pattern == 1:
        return None, head_p, w1, other_head
    if pattern == 2:
        return w1, head_p, None, other_head
    if pattern == 3:
        return w1, head_p, w1, other_head
    if pattern == 4:
        return w1, head_p, w2, other_head
    return w1, head_p, w2, head_p


def sample_pair_relation_balanced(rng, lexicon: Lexicon) -> NLIPair:
    """Pair whose three slot relations are each uniform over {≡, ⊏, ⊐, #}.

    Quantifiers and negation are drawn exactly as in sample_sentence;
    only the open-class slots are relation-controlled.
    """
    targets = [
        SLOT_RELATION_ORDER[rng.randrange(4)] for _ in range(3)
    ]
    adj_s_p, n_s_p, adj_s_h, n_s_h = _realize_slot(
        rng, targets[0], lexicon.nouns, lexicon.adjectives
    )
    adv_p, v_p, adv_h, v_h = _realize_slot(
        rng, targets[1], lexicon.verbs, lexicon.adverbs
    )
    adj_o_p, n_o_p, adj_o_h, n_o_h = _realize_slot(
        rng, targets[2], lexicon.nouns, lexicon.adjectives
    )
    premise = Sentence(
        q_s=rng.choice(QUANTIFIERS), adj_s=adj_s_p, n_s=n_s_p,
        neg=bool(rng.randrange(2)), adv=adv_p, v=v_p,
        q_o=rng.choice(QUANTIFIERS), adj_o=adj_o_p, n_o=n_o_p,
    )
    hypothesis = Sentence(
        q_s=rng.choice(QUANTIFIERS), adj_s=adj_s_h, n_s=n_s_h,
        neg=bool(rng.randrange(2)), adv=adv_h, v=v_h,
        q_o=rng.choice(QUANTIFIERS), adj_o=adj_o_h, n_o=n_o_h,
    )
    return NLIPair(premise, hypothesis)


# ---------------------------------------------------------------------------
# label array over abstract pair classes

def build_label_array(tables: Tables) -> np.ndarray:
    """Label index for every abstract pair class.

    Shape (4,4,2,2,4,4,4,4,4): subject quantifiers, negations, object
    quantifiers, then subject-NP/VP/object-NP slot relations.  Values
    index LABEL_ORDER; 3 marks an ambiguous relation set (oracle needed).
    The negation-parity theorem is asserted over all 65,536 classes while
    building, which covers every pair the samplers can ever produce.
    """
    arr = np.empty((4, 4, 2, 2, 4, 4, 4, 4, 4), dtype=np.uint8)
    quant_negative = [q in NEGATIVE_QUANTIFIERS for q in QUANTIFIERS]
    for iq_sp, q_sp in enumerate(QUANTIFIERS):
        for iq_sh, q_sh in enumerate(QUANTIFIERS):
            for neg_p in (0, 1):
                for neg_h in (0, 1):
                    side = negation_side(bool(neg_p), bool(neg_h))
                    for iq_op, q_op in enumerate(QUANTIFIERS):
                        for iq_oh, q_oh in enumerate(QUANTIFIERS):
                            c_base = (
                                neg_p + neg_h
                                + quant_negative[iq_sp] + quant_negative[iq_sh]
                                + quant_negative[iq_op] + quant_negative[iq_oh]
                            )
                            for i_s, r_s in enumerate(SLOT_RELATION_ORDER):
                                for i_v, r_v in enumerate(SLOT_RELATION_ORDER):
                                    for i_o, r_o in enumerate(SLOT_RELATION_ORDER):
                                        inner = tables.quantifier[
                                            (q_op, q_oh, r_o, r_v)
                                        ]
                                        if side is None:
                                            body = inner
                                        else:
                                            body = frozenset().union(
                                                *(tables.negation[(r, side)]
                                                  for r in inner)
                                            )
                                        out: frozenset = frozenset().union(
                                            *(tables.quantifier[
                                                (q_sp, q_sh, r_s, rb)]
                                              for rb in body)
                                        )
                                        label = relation_set_to_label(out)
                                        if label is None:
                                            value = _AMBIGUOUS
                                        else:
                                            value = LABEL_ORDER.index(label)
                                            if label is Label.CONTRADICTION:
                                                assert c_base % 2 == 1, (
                                                    "parity violation in class",
                                                    q_sp, q_sh, neg_p, neg_h,
                                                    q_op, q_oh, r_s, r_v, r_o,
                                                )
                                            elif label is Label.ENTAILMENT:
                                                assert c_base % 2 == 0, (
                                                    "parity violation in class",
                                                    q_sp, q_sh, neg_p, neg_h,
                                                    q_op, q_oh, r_s, r_v, r_o,
                                                )
                                        arr[iq_sp, iq_sh, neg_p, neg_h,
                                            iq_op, iq_oh, i_s, i_v, i_o] = value
    return arr


# ---------------------------------------------------------------------------
# vectorized batch sampling

@dataclass
class _Batch:
    """Abstract batch state: quantifier/negation indices, word indices
    (-1 = empty modifier), and derived slot-relation indices."""

    q_sp: np.ndarray
    q_sh: np.ndarray
    neg_p: np.ndarray
    neg_h: np.ndarray
    q_op: np.ndarray
    q_oh: np.ndarray
    # per slot: premise modifier, premise head, hypothesis modifier,
    # hypothesis head word indices
    words: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]]

    def slot_relation_indices(self) -> dict[str, np.ndarray]:
        out = {}
        for key, (mod_p, head_p, mod_h, head_h) in self.words.items():
            both_empty = (mod_p < 0) & (mod_h < 0)
            same_word = (mod_p >= 0) & (mod_p == mod_h)
            mod_eq = both_empty | same_word
            mod_fwd = (mod_p >= 0) & (mod_h < 0)
            mod_rev = (mod_p < 0) & (mod_h >= 0)
            mod_rel = np.select(
                [mod_eq, mod_fwd, mod_rev], [0, 1, 2], default=3
            ).astype(np.int64)
            out[key] = np.where(head_p == head_h, mod_rel, 3)
        return out

    def equalized_slot_relation_indices(self) -> dict[str, np.ndarray]:
        # word-level equalization turns every independent aligned word pair
        # into an identical one: heads become equal, independent modifier
        # pairs become equal, one-sided emptiness is preserved
        out = {}
        for key, (mod_p, head_p, mod_h, head_h) in self.words.items():
            mod_fwd = (mod_p >= 0) & (mod_h < 0)
            mod_rev = (mod_p < 0) & (mod_h >= 0)
            out[key] = np.select([mod_fwd, mod_rev], [1, 2], default=0)
        return out

    def negation_counts(self) -> np.ndarray:
        negative = np.array(
            [q in NEGATIVE_QUANTIFIERS for q in QUANTIFIERS], dtype=np.int64
        )
        return (
            self.neg_p + self.neg_h
            + negative[self.q_sp] + negative[self.q_sh]
            + negative[self.q_op] + negative[self.q_oh]
        )

    def sentence(self, i: int, lexicon: Lexicon, role: int) -> Sentence:
        def word(values: Sequence[str], idx: int) -> Optional[str]:
            return None if idx < 0 else values[idx]

        s = self.words["subject_np"]
        v = self.words["vp"]
        o = self.words["object_np"]
        mod_i, head_i = (0, 1) if role == 0 else (2, 3)
        return Sentence(
            q_s=QUANTIFIERS[(self.q_sp if role == 0 else self.q_sh)[i]],
            adj_s=word(lexicon.adjectives, s[mod_i][i]),
            n_s=lexicon.nouns[s[head_i][i]],
            neg=bool((self.neg_p if role == 0 else self.neg_h)[i]),
            adv=word(lexicon.adverbs, v[mod_i][i]),
            v=lexicon.verbs[v[head_i][i]],
            q_o=QUANTIFIERS[(self.q_op if role == 0 else self.q_oh)[i]],
            adj_o=word(lexicon.adjectives, o[mod_i][i]),
            n_o=lexicon.nouns[o[head_i][i]],
        )

    def pair(self, i: int, lexicon: Lexicon) -> NLIPair:
        return NLIPair(self.sentence(i, lexicon, 0), self.sentence(i, lexicon, 1))


def _sample_slot_balanced(
    rng: np.random.Generator, size: int, n_heads: int, n_mods: int
) -> tuple[np.ndarray, ...]:
    """Vectorized twin of _realize_slot; identical pattern distribution."""
    target = rng.integers(0, 4, size)
    head_p = rng.integers(0, n_heads, size)
    head_alt = (head_p + 1 + rng.integers(0, n_heads - 1, size)) % n_heads
    w1 = rng.integers(0, n_mods, size)
    w2 = (w1 + 1 + rng.integers(0, n_mods - 1, size)) % n_mods
    eq_empty = rng.integers(0, 2, size).astype(bool)
    pattern = rng.integers(0, 6, size)

    empty = np.full(size, -1, dtype=np.int64)
    # per-pattern independence realizations
    ind_mod_p = np.select(
        [pattern <= 1, pattern == 2, pattern == 3], [empty, w1, w1], default=w1
    )
    ind_mod_h = np.select(
        [pattern == 0, pattern == 1, pattern == 2, pattern == 3],
        [empty, w1, empty, w1],
        default=w2,
    )
    ind_head_h = np.where(pattern == 5, head_p, head_alt)

    mod_p = np.select(
        [target == 0, target == 1, target == 2],
        [np.where(eq_empty, empty, w1), w1, empty],
        default=ind_mod_p,
    )
    mod_h = np.select(
        [target == 0, target == 1, target == 2],
        [np.where(eq_empty, empty, w1), empty, w1],
        default=ind_mod_h,
    )
    head_h = np.where(target == 3, ind_head_h, head_p)
    return mod_p, head_p, mod_h, head_h, target


def _sample_slot_plain(
    rng: np.random.Generator, size: int, n_heads: int, n_mods: int
) -> tuple[np.ndarray, ...]:
    """Both sides drawn independently as in fragment.sample_sentence."""
    out = []
    for _ in range(2):
        head = rng.integers(0, n_heads, size)
        empty = rng.integers(0, 2, size).astype(bool)
        word = rng.integers(0, n_mods, size)
        mod = np.where(empty, -1, word)
        out.extend([mod, head])
    mod_p, head_p, mod_h, head_h = out
    return mod_p, head_p, mod_h, head_h, None


def sample_batch(
    rng: np.random.Generator, lexicon: Lexicon, size: int,
    relation_balanced: bool,
) -> _Batch:
    q = [rng.integers(0, 4, size) for _ in range(4)]
    neg = [rng.integers(0, 2, size) for _ in range(2)]
    slot_fn = _sample_slot_balanced if relation_balanced else _sample_slot_plain
    words = {}
    targets = {}
    for key, (n_heads, n_mods) in (
        ("subject_np", (len(lexicon.nouns), len(lexicon.adjectives))),
        ("vp", (len(lexicon.verbs), len(lexicon.adverbs))),
        ("object_np", (len(lexicon.nouns), len(lexicon.adjectives))),
    ):
        mod_p, head_p, mod_h, head_h, target = slot_fn(
            rng, size, n_heads, n_mods
        )
        words[key] = (mod_p, head_p, mod_h, head_h)
        targets[key] = target
    batch = _Batch(
        q_sp=q[0], q_sh=q[1], neg_p=neg[0], neg_h=neg[1],
        q_op=q[2], q_oh=q[3], words=words,
    )
    if relation_balanced:
        # realized relations must equal their targets by construction
        realized = batch.slot_relation_indices()
        for key in SLOT_KEYS:
            if not np.array_equal(realized[key], targets[key]):
                raise AssertionError(f"slot realization broken for {key}")
    return batch


def batch_labels(batch: _Batch, label_array: np.ndarray) -> np.ndarray:
    slots = batch.slot_relation_indices()
    return label_array[
        batch.q_sp, batch.q_sh, batch.neg_p, batch.neg_h,
        batch.q_op, batch.q_oh,
        slots["subject_np"], slots["vp"], slots["object_np"],
    ]


def batch_equalized_labels(batch: _Batch, label_array: np.ndarray) -> np.ndarray:
    slots = batch.equalized_slot_relation_indices()
    return label_array[
        batch.q_sp, batch.q_sh, batch.neg_p, batch.neg_h,
        batch.q_op, batch.q_oh,
        slots["subject_np"], slots["vp"], slots["object_np"],
    ]


# ---------------------------------------------------------------------------
# equalization and the informative subset

def equalize_pair(pair: NLIPair) -> NLIPair:
    """Replace every independent aligned open-class word pair by the
    premise word; emptiness patterns are preserved."""
    p, h = pair.premise, pair.hypothesis

    def eq(pw: Optional[str], hw: Optional[str]) -> Optional[str]:
        if pw is not None and hw is not None and pw != hw:
            return pw
        return hw

    equalized = Sentence(
        q_s=h.q_s, adj_s=eq(p.adj_s, h.adj_s), n_s=eq(p.n_s, h.n_s),
        neg=h.neg, adv=eq(p.adv, h.adv), v=eq(p.v, h.v),
        q_o=h.q_o, adj_o=eq(p.adj_o, h.adj_o), n_o=eq(p.n_o, h.n_o),
    )
    return NLIPair(p, equalized)


def pair_informative(pair: NLIPair, tables: Tables, oracle=None) -> bool:
    """A neutral pair is informative iff equalizing open-class words makes
    it non-neutral.  Callers ensure the pair is neutral."""
    from .natlog import label_natlog

    label, _ = label_natlog(equalize_pair(pair), tables, oracle)
    return label is not Label.NEUTRAL


def informative_subset(
    records: Sequence[ExampleRecord], lexicon: Lexicon, tables: Tables,
    oracle=None,
) -> list[ExampleRecord]:
    """Recompute informative flags in place; returns the informative records.

    Only neutral records can be informative; everything else gets False.
    """
    from .fragment import parse_tokens

    subset = []
    for record in records:
        if record.label is not Label.NEUTRAL:
            record.informative = False
            continue
        pair = NLIPair(
            parse_tokens(record.premise, lexicon),
            parse_tokens(record.hypothesis, lexicon),
        )
        record.informative = pair_informative(pair, tables, oracle)
        if record.informative:
            subset.append(record)
    return subset


# ---------------------------------------------------------------------------
# corpus generation

@dataclass
class GenerationReport:
    splits: dict[str, list[ExampleRecord]]
    stats: dict
    paths: dict[str, str] = field(default_factory=dict)


def _split_plan(config: CorpusConfig) -> list[tuple[str, dict]]:
    plan = []
    for name, size in (
        ("train", config.train_size),
        ("dev", config.dev_size),
        ("test", config.test_size),
    ):
        if config.balance_labels:
            third = size // 3
            quotas = {
                Label.ENTAILMENT: third,
                Label.CONTRADICTION: third,
                Label.NEUTRAL: third + size % 3,
            }
        else:
            quotas = {None: size}
        plan.append((name, quotas))
    return plan


def _open_labels(plan) -> set:
    open_: set = set()
    for _, quotas in plan:
        for key, remaining in quotas.items():
            if remaining > 0:
                open_.add(key)
    return open_


def generate_corpus(
    config: CorpusConfig,
    lexicon: Optional[Lexicon] = None,
    tables: Optional[Tables] = None,
    oracle=None,
) -> GenerationReport:
    """Generate, label, balance, split, audit, and optionally write a corpus.

    Deterministic for a given config: identical seeds produce byte-identical
    output files.  Raises QuotaExhaustedError when a label quota cannot be
    filled within the attempt ceiling, and asserts the negation-parity
    invariant for every emitted record.
    """
    from .oracle import Oracle
    from .tables import default_tables

    lexicon = lexicon if lexicon is not None else config.build_lexicon()
    tables = tables if tables is not None else default_tables()
    if oracle is None:
        oracle = Oracle(bound=config.oracle_bound)

    label_array = build_label_array(tables)
    plan = _split_plan(config)
    records: dict[str, list[ExampleRecord]] = {name: [] for name, _ in plan}
    pairs: dict[str, list[NLIPair]] = {name: [] for name, _ in plan}
    seen: set[tuple] = set()

    rng = np.random.Generator(
        np.random.PCG64(substream_seed(config.seed, "sampling"))
    )
    attempts = 0
    dedup_skipped = 0
    fallback_count = 0
    ceiling = config.attempt_ceiling

    while True:
        open_labels = _open_labels(plan)
        if not open_labels:
            break
        if attempts >= ceiling:
            remaining = [
                (quotas[key], key)
                for _, quotas in plan
                for key in quotas
                if quotas[key] > 0
            ]
            _, worst = max(remaining)
            raise QuotaExhaustedError(
                worst if worst is not None else Label.NEUTRAL, attempts
            )
        batch = sample_batch(
            rng, lexicon, BATCH_SIZE, config.relation_balanced
        )
        attempts += BATCH_SIZE
        labels = batch_labels(batch, label_array)
        eq_labels = batch_equalized_labels(batch, label_array)
        counts = batch.negation_counts()
        slots = batch.slot_relation_indices()

        if None in open_labels:
            consider = np.arange(BATCH_SIZE)
        else:
            wanted = np.array(
                [LABEL_ORDER.index(lab) for lab in open_labels], dtype=np.uint8
            )
            consider = np.flatnonzero(
                np.isin(labels, wanted) | (labels == _AMBIGUOUS)
            )

        for i in consider:
            if not any(
                q > 0 for _, quotas in plan for q in quotas.values()
            ):
                break
            value = labels[i]
            if value == _AMBIGUOUS:
                pair = batch.pair(i, lexicon)
                label = oracle.decide_label(pair).label
                labeler = "oracle-fallback"
                fallback_count += 1
            else:
                pair = None
                label = LABEL_ORDER[value]
                labeler = "natlog"
            target = None
            for name, quotas in plan:
                key = label if config.balance_labels else None
                if quotas.get(key, 0) > 0:
                    target = (name, quotas, key)
                    break
            if target is None:
                continue
            if pair is None:
                pair = batch.pair(i, lexicon)
            dedup_key = (render(pair.premise), render(pair.hypothesis))
            if dedup_key in seen:
                dedup_skipped += 1
                continue
            seen.add(dedup_key)

            c = int(counts[i])
            assert c == pair_negation_count(pair)
            # parity invariant, asserted per emitted record at write time
            if label is Label.CONTRADICTION:
                assert c % 2 == 1, ("parity violation", pair)
            if label is Label.ENTAILMENT:
                assert c % 2 == 0, ("parity violation", pair)

            informative = False
            if label is Label.NEUTRAL:
                eq_value = eq_labels[i]
                if eq_value == _AMBIGUOUS:
                    informative = pair_informative(pair, tables, oracle)
                else:
                    informative = LABEL_ORDER[eq_value] is not Label.NEUTRAL

            record = ExampleRecord(
                premise=dedup_key[0],
                hypothesis=dedup_key[1],
                label=label,
                slot_relations={
                    key: SLOT_RELATION_ORDER[slots[key][i]]
                    for key in SLOT_KEYS
                },
                negation_count=c,
                labeler=labeler,
                informative=informative,
            )
            if config.include_witnesses:
                verdict = oracle.decide_label(pair)
                record.witnesses = {
                    name: _model_to_json(m)
                    for name, m in verdict.witnesses.items()
                }
            name, quotas, key = target
            quotas[key] -= 1
            records[name].append(record)
            pairs[name].append(pair)

    audit_oracle = oracle if oracle.bound == AUDIT_BOUND else None
    audit = _audit(records, pairs, config, audit_oracle)
    stats = _generation_stats(
        config, records, attempts, dedup_skipped, fallback_count, audit
    )
    report = GenerationReport(splits=records, stats=stats)
    if config.out_dir is not None:
        report.paths = _write_outputs(config, records, stats)
    return report


def _model_to_json(model) -> dict:
    return {
        "size": model.size,
        "unary": {p: sorted(model.unary[p]) for p in sorted(model.unary)},
        "binary": {
            p: sorted(list(t) for t in model.binary[p])
            for p in sorted(model.binary)
        },
    }


def _audit(records, pairs, config: CorpusConfig, oracle=None) -> dict:
    """Re-verify a random 1% of emitted records with the oracle."""
    from .oracle import Oracle

    all_records = [r for name in records for r in records[name]]
    all_pairs = [p for name in pairs for p in pairs[name]]
    n = len(all_records)
    sample_size = max(1, round(n * AUDIT_RATE)) if n else 0
    rng = np.random.Generator(
        np.random.PCG64(substream_seed(config.seed, "audit"))
    )
    chosen = (
        rng.choice(n, size=sample_size, replace=False) if n else np.array([], int)
    )
    if oracle is None:
        oracle = Oracle(bound=AUDIT_BOUND)
    mismatches = 0
    for i in chosen:
        if oracle.decide_label(all_pairs[i]).label is not all_records[i].label:
            mismatches += 1
    if mismatches:
        raise AssertionError(
            f"oracle audit failed: {mismatches}/{sample_size} mismatches"
        )
    return {"sample": int(sample_size), "mismatches": 0, "bound": AUDIT_BOUND}


def corpus_stats(records: Sequence[ExampleRecord]) -> dict:
    """Distributional report over a record collection."""
    label_counts = {label.value: 0 for label in LABEL_ORDER}
    slot_counts = {key: {} for key in SLOT_KEYS}
    parity = {
        label.value: {"even": 0, "odd": 0} for label in LABEL_ORDER
    }
    fallbacks = 0
    informative = 0
    neutral = 0
    for r in records:
        label_counts[r.label.value] += 1
        for key in SLOT_KEYS:
            code = r.slot_relations[key].value
            slot_counts[key][code] = slot_counts[key].get(code, 0) + 1
        parity[r.label.value][
            "odd" if r.negation_count % 2 else "even"
        ] += 1
        if r.labeler != "natlog":
            fallbacks += 1
        if r.label is Label.NEUTRAL:
            neutral += 1
            if r.informative:
                informative += 1
    n = len(records)
    return {
        "count": n,
        "label_distribution": label_counts,
        "slot_relations": slot_counts,
        "parity": parity,
        "fallback": {
            "count": fallbacks, "rate": fallbacks / n if n else 0.0
        },
        "informative": {
            "neutral": neutral,
            "informative": informative,
            "fraction_of_neutral": informative / neutral if neutral else 0.0,
        },
    }


def _generation_stats(
    config, records, attempts, dedup_skipped, fallback_count, audit
) -> dict:
    from dataclasses import asdict

    all_records = [r for name in records for r in records[name]]
    stats = {
        "config": asdict(config),
        "counts": {name: len(records[name]) for name in records},
        "candidates_considered": attempts,
        "dedup_skipped": dedup_skipped,
        "fallback_count": fallback_count,
        "audit": audit,
        "overall": corpus_stats(all_records),
        "per_split": {
            name: corpus_stats(records[name]) for name in records
        },
    }
    return stats


def _write_outputs(config: CorpusConfig, records, stats) -> dict[str, str]:
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {}
    writer = write_jsonl if config.format == "jsonl" else write_tsv
    ext = config.format
    for name in records:
        path = out_dir / f"{name}.{ext}"
        writer(records[name], path)
        paths[name] = str(path)
    stats_path = out_dir / "stats.json"
    stats_path.write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n")
    paths["stats"] = str(stats_path)
    return paths
