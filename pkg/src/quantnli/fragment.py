"""Lexicon and sentence machinery for the quantified fragment.

Sentences follow a fixed nine-field template

    Q_S Adj_S N_S Neg Adv V Q_O Adj_O N_O

where the quantifier slots draw from a closed class of four, negation
surfaces as "does not", and the three modifier slots (Adj_S, Adv, Adj_O)
may be empty.  Empty slots render as a dedicated token so that every
sentence occupies the same slot structure on the surface.  Semantic scope
is fixed by surface order; there is no scope ambiguity to resolve.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterator, Optional, Sequence

QUANTIFIERS = ("every", "some", "no", "not_every")
NEGATIVE_QUANTIFIERS = frozenset({"no", "not_every"})
CATEGORIES = ("nouns", "verbs", "adjectives", "adverbs")
DEFAULT_EMPTY_TOKEN = "<empty>"

# Tokens consumed by the function-word machinery.  Open-class words must not
# collide with these or parsing would become ambiguous.
FUNCTION_TOKENS = frozenset({"every", "some", "no", "not", "does"})

_CATEGORY_PREFIX = {
    "nouns": "noun",
    "verbs": "verb",
    "adjectives": "adj",
    "adverbs": "adv",
}


class LexiconError(ValueError):
    pass


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class Lexicon:
    """Four disjoint open-class word lists plus the empty-slot token."""

    nouns: tuple[str, ...]
    verbs: tuple[str, ...]
    adjectives: tuple[str, ...]
    adverbs: tuple[str, ...]
    empty_token: str = DEFAULT_EMPTY_TOKEN

    def __post_init__(self) -> None:
        reserved = set(FUNCTION_TOKENS) | {self.empty_token}
        seen: dict[str, str] = {}
        for category in CATEGORIES:
            words = getattr(self, category)
            if not words:
                raise LexiconError(f"category {category!r} is empty")
            if len(set(words)) != len(words):
                raise LexiconError(f"category {category!r} contains duplicates")
            for w in words:
                if w in reserved:
                    raise LexiconError(
                        f"category {category!r} contains reserved token {w!r}"
                    )
                if w in seen:
                    raise LexiconError(
                        f"token {w!r} appears in both {seen[w]!r} and {category!r}"
                    )
                seen[w] = category

    @property
    def quantifiers(self) -> tuple[str, ...]:
        return QUANTIFIERS

    def words(self, category: str) -> tuple[str, ...]:
        if category not in CATEGORIES:
            raise LexiconError(f"unknown category {category!r}")
        return getattr(self, category)

    @cached_property
    def _membership(self) -> dict[str, frozenset[str]]:
        return {c: frozenset(getattr(self, c)) for c in CATEGORIES}

    def contains(self, category: str, token: str) -> bool:
        return token in self._membership[category]


def _synthetic_words(category: str, count: int) -> tuple[str, ...]:
    width = max(2, len(str(count - 1)))
    prefix = _CATEGORY_PREFIX[category]
    return tuple(f"{prefix}{i:0{width}d}" for i in range(count))


def _parse_wordlist(path: Path) -> dict[str, list[str]]:
    sections: dict[str, list[str]] = {c: [] for c in CATEGORIES}
    current: Optional[str] = None
    for raw in path.read_text().splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in sections:
                raise LexiconError(f"unknown wordlist section {name!r}")
            current = name
            continue
        if current is None:
            raise LexiconError(f"token {line!r} appears before any section header")
        sections[current].extend(line.split())
    return sections


def build_lexicon(
    source: int | str | Path = 0,
    words_per_category: int = 100,
    empty_token: str = DEFAULT_EMPTY_TOKEN,
) -> Lexicon:
    """Build a lexicon from a seed (synthetic tokens) or a wordlist file.

    Synthetic tokens are positional (noun00, noun01, ...) and do not vary
    with the seed value; the seed argument exists so that callers can treat
    both sources uniformly.  A wordlist file must supply at least
    ``words_per_category`` distinct tokens per section; the first that many
    are used.
    """
    if words_per_category < 1:
        raise LexiconError("words_per_category must be positive")
    if isinstance(source, int):
        picked = {
            c: _synthetic_words(c, words_per_category) for c in CATEGORIES
        }
    else:
        path = Path(source)
        if not path.exists():
            raise LexiconError(f"wordlist file {str(path)!r} does not exist")
        sections = _parse_wordlist(path)
        picked = {}
        for category, words in sections.items():
            distinct = list(dict.fromkeys(words))
            if len(distinct) < words_per_category:
                raise LexiconError(
                    f"category {category!r} supplies {len(distinct)} distinct "
                    f"tokens, need {words_per_category}"
                )
            picked[category] = tuple(distinct[:words_per_category])
    return Lexicon(
        nouns=picked["nouns"],
        verbs=picked["verbs"],
        adjectives=picked["adjectives"],
        adverbs=picked["adverbs"],
        empty_token=empty_token,
    )


def demo_lexicon(words_per_category: int = 100) -> Lexicon:
    """Synthetic lexicon with a few readable words up front, for examples."""
    base = build_lexicon(0, words_per_category)

    def splice(words: tuple[str, ...], head: Sequence[str]) -> tuple[str, ...]:
        head = tuple(head[: len(words)])
        return head + words[len(head):]

    return Lexicon(
        nouns=splice(base.nouns, ["baker", "rock"]),
        verbs=splice(base.verbs, ["rubs", "sells"]),
        adjectives=splice(base.adjectives, ["Swiss", "wild"]),
        adverbs=splice(base.adverbs, ["madly", "gently"]),
        empty_token=base.empty_token,
    )


@dataclass(frozen=True)
class Sentence:
    """One fragment sentence; ``None`` marks an empty modifier slot."""

    q_s: str
    adj_s: Optional[str]
    n_s: str
    neg: bool
    adv: Optional[str]
    v: str
    q_o: str
    adj_o: Optional[str]
    n_o: str

    def __post_init__(self) -> None:
        if self.q_s not in QUANTIFIERS or self.q_o not in QUANTIFIERS:
            raise ValueError(f"bad quantifier in {self!r}")


@dataclass(frozen=True)
class NLIPair:
    premise: Sentence
    hypothesis: Sentence


def _quantifier_tokens(q: str) -> tuple[str, ...]:
    return ("not", "every") if q == "not_every" else (q,)


def render(sentence: Sentence, empty_token: str = DEFAULT_EMPTY_TOKEN) -> tuple[str, ...]:
    """Render a sentence to its surface token sequence.

    Empty modifier slots surface as the empty token, "not_every" as two
    tokens, and negation as "does not"; an unnegated sentence carries the
    empty token in the Neg slot.
    """
    tokens: list[str] = []
    tokens.extend(_quantifier_tokens(sentence.q_s))
    tokens.append(sentence.adj_s if sentence.adj_s is not None else empty_token)
    tokens.append(sentence.n_s)
    if sentence.neg:
        tokens.extend(("does", "not"))
    else:
        tokens.append(empty_token)
    tokens.append(sentence.adv if sentence.adv is not None else empty_token)
    tokens.append(sentence.v)
    tokens.extend(_quantifier_tokens(sentence.q_o))
    tokens.append(sentence.adj_o if sentence.adj_o is not None else empty_token)
    tokens.append(sentence.n_o)
    return tuple(tokens)


class _TokenReader:
    def __init__(self, tokens: Sequence[str]):
        self.tokens = tuple(tokens)
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, slot: str) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"input ended while reading {slot}")
        self.pos += 1
        return tok


def _read_quantifier(reader: _TokenReader, slot: str) -> str:
    tok = reader.take(slot)
    if tok == "not":
        nxt = reader.take(slot)
        if nxt != "every":
            raise ParseError(f"{slot}: expected 'every' after 'not', got {nxt!r}")
        return "not_every"
    if tok in ("every", "some", "no"):
        return tok
    raise ParseError(f"{slot}: {tok!r} is not a quantifier")


def _read_modifier(
    reader: _TokenReader, lexicon: Lexicon, mod_category: str, head_category: str, slot: str
) -> Optional[str]:
    # The modifier slot is optional on the surface: accept an explicit empty
    # token, a modifier word, or the head word directly.
    tok = reader.peek()
    if tok == lexicon.empty_token:
        reader.take(slot)
        return None
    if tok is not None and lexicon.contains(mod_category, tok):
        reader.take(slot)
        return tok
    if tok is not None and lexicon.contains(head_category, tok):
        return None
    raise ParseError(f"{slot}: {tok!r} is neither a modifier nor a head word")


def _read_head(reader: _TokenReader, lexicon: Lexicon, category: str, slot: str) -> str:
    tok = reader.take(slot)
    if not lexicon.contains(category, tok):
        raise ParseError(f"{slot}: {tok!r} is not in category {category!r}")
    return tok


def _read_negation(reader: _TokenReader, lexicon: Lexicon) -> bool:
    tok = reader.peek()
    if tok == lexicon.empty_token:
        reader.take("negation")
        return False
    if tok == "does":
        reader.take("negation")
        nxt = reader.take("negation")
        if nxt != "not":
            raise ParseError(f"negation: expected 'not' after 'does', got {nxt!r}")
        return True
    return False


def parse_tokens(tokens: Sequence[str], lexicon: Lexicon) -> Sentence:
    """Inverse of render.  Also accepts sentences written without the
    explicit empty tokens, since category membership disambiguates."""
    reader = _TokenReader(tokens)
    q_s = _read_quantifier(reader, "subject quantifier")
    adj_s = _read_modifier(reader, lexicon, "adjectives", "nouns", "subject adjective")
    n_s = _read_head(reader, lexicon, "nouns", "subject noun")
    neg = _read_negation(reader, lexicon)
    adv = _read_modifier(reader, lexicon, "adverbs", "verbs", "adverb")
    v = _read_head(reader, lexicon, "verbs", "verb")
    q_o = _read_quantifier(reader, "object quantifier")
    adj_o = _read_modifier(reader, lexicon, "adjectives", "nouns", "object adjective")
    n_o = _read_head(reader, lexicon, "nouns", "object noun")
    if reader.pos != len(reader.tokens):
        raise ParseError(
            f"trailing tokens after object noun: {reader.tokens[reader.pos:]!r}"
        )
    return Sentence(q_s, adj_s, n_s, neg, adv, v, q_o, adj_o, n_o)


def parse_text(text: str, lexicon: Lexicon) -> Sentence:
    return parse_tokens(text.split(), lexicon)


def sample_sentence(rng: random.Random, lexicon: Lexicon) -> Sentence:
    """Draw a sentence slot by slot.

    Quantifiers are uniform over the four values, each modifier slot is
    empty with probability one half (otherwise uniform over its category),
    negation is a fair coin, and heads are uniform.
    """

    def modifier(words: tuple[str, ...]) -> Optional[str]:
        if rng.random() < 0.5:
            return None
        return words[rng.randrange(len(words))]

    def head(words: tuple[str, ...]) -> str:
        return words[rng.randrange(len(words))]

    return Sentence(
        q_s=QUANTIFIERS[rng.randrange(4)],
        adj_s=modifier(lexicon.adjectives),
        n_s=head(lexicon.nouns),
        neg=rng.random() < 0.5,
        adv=modifier(lexicon.adverbs),
        v=head(lexicon.verbs),
        q_o=QUANTIFIERS[rng.randrange(4)],
        adj_o=modifier(lexicon.adjectives),
        n_o=head(lexicon.nouns),
    )


def count_sentences(lexicon: Lexicon, include_empty_modifiers: bool = True) -> int:
    """Exact number of distinct sentences the lexicon generates."""
    extra = 1 if include_empty_modifiers else 0
    adj = len(lexicon.adjectives) + extra
    adv = len(lexicon.adverbs) + extra
    n = len(lexicon.nouns)
    v = len(lexicon.verbs)
    q = len(QUANTIFIERS)
    return q * adj * n * 2 * adv * v * q * adj * n


def iter_sentences(
    lexicon: Lexicon, include_empty_modifiers: bool = True
) -> Iterator[Sentence]:
    """Enumerate every sentence; intended for small test lexicons only."""
    extra: tuple[Optional[str], ...] = (None,) if include_empty_modifiers else ()
    adjs = extra + lexicon.adjectives
    advs = extra + lexicon.adverbs
    for q_s, adj_s, n_s, neg, adv, v, q_o, adj_o, n_o in itertools.product(
        QUANTIFIERS, adjs, lexicon.nouns, (False, True), advs, lexicon.verbs,
        QUANTIFIERS, adjs, lexicon.nouns,
    ):
        yield Sentence(q_s, adj_s, n_s, neg, adv, v, q_o, adj_o, n_o)


def sentence_negations(sentence: Sentence) -> int:
    """Count of negative words in one sentence: "does not" plus negative
    quantifiers ("no", "not every")."""
    count = 1 if sentence.neg else 0
    count += sum(1 for q in (sentence.q_s, sentence.q_o) if q in NEGATIVE_QUANTIFIERS)
    return count


def pair_negation_count(pair: NLIPair) -> int:
    return sentence_negations(pair.premise) + sentence_negations(pair.hypothesis)
