"""Loading and encoding of corpus JSONL files for the five model families.

The corpus format is the one emitted by the quantnli CLI: one JSON object
per line with surface token lists under "premise" and "hypothesis", a
"label" string, and a "meta" object carrying an "informative" flag.
Sentences are nine-slot fragments; empty modifier slots surface as
"<empty>", negation as the two tokens "does not", and the quantifier
"not every" as "not" "every".

Sequence models (cbow, lstm, attn_lstm) consume the surface token lists
verbatim.  Slot-aligned models (treenn, comptreenn) consume the nine
slots per sentence, with the two multi-word items fused into the single
tokens "does_not" and "not_every" so that slot counts line up across any
premise/hypothesis pair.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Optional, Sequence, Union

import numpy as np

LABELS = ("entailment", "contradiction", "neutral")
LABEL_INDEX = {name: i for i, name in enumerate(LABELS)}

PAD = "<pad>"
EMPTY = "<empty>"
NOT_EVERY = "not_every"
DOES_NOT = "does_not"

MODEL_KINDS = ("cbow", "lstm", "treenn", "attn_lstm", "comptreenn")
SEQUENCE_KINDS = frozenset({"cbow", "lstm", "attn_lstm"})
ALIGNED_KINDS = frozenset({"treenn", "comptreenn"})

SLOT_NAMES = ("q_s", "adj_s", "n_s", "neg", "adv", "v", "q_o", "adj_o", "n_o")
NUM_SLOTS = 9

_SIMPLE_QUANTIFIERS = frozenset({"every", "some", "no"})


class SchemaError(ValueError):
    """A corpus line violates the expected record or sentence shape."""


@dataclass(frozen=True)
class Example:
    premise: tuple[str, ...]
    hypothesis: tuple[str, ...]
    label: int
    informative: bool


def _check_tokens(value: object, key: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not value:
        raise SchemaError(f"{key} must be a non-empty token list")
    if not all(isinstance(t, str) and t for t in value):
        raise SchemaError(f"{key} contains a non-string or empty token")
    return tuple(value)


def _parse_line(line: str) -> Example:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as err:
        raise SchemaError(f"not valid JSON: {err}") from None
    if not isinstance(obj, dict):
        raise SchemaError("record is not a JSON object")
    for key in ("premise", "hypothesis", "label", "meta"):
        if key not in obj:
            raise SchemaError(f"missing key {key!r}")
    premise = _check_tokens(obj["premise"], "premise")
    hypothesis = _check_tokens(obj["hypothesis"], "hypothesis")
    label = obj["label"]
    if label not in LABEL_INDEX:
        raise SchemaError(f"unknown label {label!r}")
    meta = obj["meta"]
    if not isinstance(meta, dict) or "informative" not in meta:
        raise SchemaError("meta.informative missing")
    informative = meta["informative"]
    if not isinstance(informative, bool):
        raise SchemaError("meta.informative must be a boolean")
    return Example(premise, hypothesis, LABEL_INDEX[label], informative)


def load_examples(path: Union[str, Path]) -> list[Example]:
    """Parse a corpus JSONL file; schema violations name the line."""
    examples = []
    for lineno, line in enumerate(
        Path(path).read_text().splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            examples.append(_parse_line(line))
        except SchemaError as err:
            raise SchemaError(f"{path}:{lineno}: {err}") from None
    if not examples:
        raise SchemaError(f"{path}: no records")
    return examples


def to_slots(tokens: Sequence[str]) -> tuple[str, ...]:
    """Fold a surface token sequence into the nine sentence slots.

    "not every" and "does not" become single fused tokens; everything
    else is already one token per slot.
    """
    toks = list(tokens)
    slots: list[str] = []

    def take_quantifier() -> str:
        if not toks:
            raise SchemaError("sentence truncated before a quantifier")
        head = toks.pop(0)
        if head == "not":
            if not toks or toks[0] != "every":
                raise SchemaError("'not' not followed by 'every'")
            toks.pop(0)
            return NOT_EVERY
        if head not in _SIMPLE_QUANTIFIERS:
            raise SchemaError(f"bad quantifier token {head!r}")
        return head

    def take_plain(slot: str) -> str:
        if not toks:
            raise SchemaError(f"sentence truncated before {slot}")
        return toks.pop(0)

    slots.append(take_quantifier())
    slots.append(take_plain("adj_s"))
    slots.append(take_plain("n_s"))
    if toks and toks[0] == "does":
        toks.pop(0)
        if not toks or toks.pop(0) != "not":
            raise SchemaError("'does' not followed by 'not'")
        slots.append(DOES_NOT)
    else:
        neg = take_plain("neg")
        if neg != EMPTY:
            raise SchemaError(f"bad negation slot token {neg!r}")
        slots.append(EMPTY)
    slots.append(take_plain("adv"))
    slots.append(take_plain("v"))
    slots.append(take_quantifier())
    slots.append(take_plain("adj_o"))
    slots.append(take_plain("n_o"))
    if toks:
        raise SchemaError(f"trailing tokens {toks!r}")
    return tuple(slots)


def slots_to_tokens(slots: Sequence[str]) -> tuple[str, ...]:
    """Inverse of to_slots: unfuse the multi-word tokens."""
    out: list[str] = []
    for slot in slots:
        if slot == NOT_EVERY:
            out.extend(("not", "every"))
        elif slot == DOES_NOT:
            out.extend(("does", "not"))
        else:
            out.append(slot)
    return tuple(out)


@dataclass(frozen=True)
class Vocabulary:
    """Token inventory shared by all model kinds.

    Index 0 is the padding token.  Both surface tokens and the two fused
    slot tokens are present, so one embedding table serves sequence and
    slot-aligned encodings alike.
    """

    tokens: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.tokens[0] != PAD:
            raise ValueError("vocabulary index 0 must be the pad token")
        object.__setattr__(
            self, "_index", {t: i for i, t in enumerate(self.tokens)}
        )

    @property
    def size(self) -> int:
        return len(self.tokens)

    def encode(self, token: str) -> int:
        try:
            return self._index[token]
        except KeyError:
            raise SchemaError(f"token {token!r} not in vocabulary") from None

    def decode(self, index: int) -> str:
        return self.tokens[index]

    @classmethod
    def build(cls, example_sets: Sequence[Sequence[Example]]) -> "Vocabulary":
        seen: set[str] = set()
        for examples in example_sets:
            for ex in examples:
                seen.update(ex.premise)
                seen.update(ex.hypothesis)
                seen.update(to_slots(ex.premise))
                seen.update(to_slots(ex.hypothesis))
        return cls((PAD,) + tuple(sorted(seen)))


SPLITS = ("train", "dev", "test")


def load_corpus(corpus_dir: Union[str, Path]) -> dict[str, list[Example]]:
    """Load train/dev/test JSONL files from a corpus directory."""
    corpus_dir = Path(corpus_dir)
    out = {}
    for split in SPLITS:
        path = corpus_dir / f"{split}.jsonl"
        if not path.exists():
            raise SchemaError(f"missing split file {path}")
        out[split] = load_examples(path)
    return out


@dataclass
class EncodedDataset:
    """Integer-encoded split ready for a given model kind.

    For sequence kinds premise/hypothesis are padded id matrices with
    explicit lengths; for aligned kinds they are (N, 9) slot id arrays
    and lengths are None.
    """

    kind: str
    labels: np.ndarray
    informative: np.ndarray
    premise: np.ndarray
    hypothesis: np.ndarray
    premise_lengths: Optional[np.ndarray]
    hypothesis_lengths: Optional[np.ndarray]

    def __len__(self) -> int:
        return int(self.labels.shape[0])


def _encode_sequences(
    sents: list[tuple[str, ...]], vocab: Vocabulary
) -> tuple[np.ndarray, np.ndarray]:
    lengths = np.array([len(s) for s in sents], dtype=np.int64)
    width = int(lengths.max())
    ids = np.zeros((len(sents), width), dtype=np.int64)
    for i, sent in enumerate(sents):
        ids[i, : len(sent)] = [vocab.encode(t) for t in sent]
    return ids, lengths


def _encode_slots(
    sents: list[tuple[str, ...]], vocab: Vocabulary
) -> np.ndarray:
    ids = np.zeros((len(sents), NUM_SLOTS), dtype=np.int64)
    for i, sent in enumerate(sents):
        ids[i] = [vocab.encode(t) for t in to_slots(sent)]
    return ids


def encode_dataset(
    examples: Sequence[Example], kind: str, vocab: Vocabulary
) -> EncodedDataset:
    if kind not in MODEL_KINDS:
        raise ValueError(f"unknown model kind {kind!r}")
    labels = np.array([ex.label for ex in examples], dtype=np.int64)
    informative = np.array([ex.informative for ex in examples], dtype=bool)
    prem = [ex.premise for ex in examples]
    hyp = [ex.hypothesis for ex in examples]
    if kind in SEQUENCE_KINDS:
        pids, plen = _encode_sequences(prem, vocab)
        hids, hlen = _encode_sequences(hyp, vocab)
        return EncodedDataset(kind, labels, informative, pids, hids, plen, hlen)
    pids = _encode_slots(prem, vocab)
    hids = _encode_slots(hyp, vocab)
    return EncodedDataset(kind, labels, informative, pids, hids, None, None)


def decode_example(
    dataset: EncodedDataset, i: int, vocab: Vocabulary
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Recover the surface token lists of row i (round-trip check)."""

    def one(ids: np.ndarray, length: Optional[int]) -> tuple[str, ...]:
        toks = tuple(vocab.decode(int(j)) for j in ids)
        if length is not None:
            return toks[:length]
        return slots_to_tokens(toks)

    plen = int(dataset.premise_lengths[i]) if dataset.premise_lengths is not None else None
    hlen = int(dataset.hypothesis_lengths[i]) if dataset.hypothesis_lengths is not None else None
    return one(dataset.premise[i], plen), one(dataset.hypothesis[i], hlen)


def encode_corpus(
    corpus: dict[str, list[Example]], kind: str, vocab: Vocabulary
) -> dict[str, EncodedDataset]:
    return {split: encode_dataset(corpus[split], kind, vocab) for split in corpus}
