"""Command-line surface: tables, generate, label, validate, stats.

Exit codes: 0 success, 1 usage error, 2 invariant or validation failure.
Every run is reproducible from the config echoed into its outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from .fragment import Lexicon, NLIPair, ParseError, build_lexicon, parse_text
from .natlog import Label, Tables, label_natlog, sentence_relation
from .relations import set_to_codes

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVARIANT = 2

# words usable in hand-typed examples, prepended to the synthetic vocabulary
_READABLE = {
    "nouns": ("baker", "rock"),
    "verbs": ("rubs", "sells"),
    "adjectives": ("Swiss", "wild"),
    "adverbs": ("madly", "gently"),
}


class _Parser(argparse.ArgumentParser):
    """argparse with usage failures mapped to exit code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass(frozen=True)
class RunConfig:
    """Everything a command run depends on, echoed into outputs."""

    command: str
    seed: int
    bound: int
    corpus: Optional[dict] = None

    def as_dict(self) -> dict:
        out = {"command": self.command, "seed": self.seed, "bound": self.bound}
        if self.corpus is not None:
            out["corpus"] = self.corpus
        return out


def _load_config_file(path: Optional[str]) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"config file {path!r} does not exist")
    obj = json.loads(p.read_text())
    if not isinstance(obj, dict):
        raise ValueError(f"config file {path!r} must hold a JSON object")
    return obj


def _corpus_config(args) -> "CorpusConfig":
    from .corpus import CorpusConfig

    values = _load_config_file(getattr(args, "config", None))
    known = {f.name for f in dataclasses.fields(CorpusConfig)}
    unknown = set(values) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    # flags override file values
    if args.seed is not None:
        values["seed"] = args.seed
    if getattr(args, "bound", None) is not None:
        values["oracle_bound"] = args.bound
    if getattr(args, "out", None) is not None:
        values["out_dir"] = args.out
    if getattr(args, "format", None) is not None:
        values["format"] = args.format
    if getattr(args, "no_balance_labels", False):
        values["balance_labels"] = False
    if getattr(args, "no_relation_balance", False):
        values["relation_balanced"] = False
    if getattr(args, "witnesses", False):
        values["include_witnesses"] = True
    return CorpusConfig(**values)


def _label_lexicon(words_per_category: int = 100, wordlist=None) -> Lexicon:
    """Lexicon for hand-typed sentences: a few readable words plus the
    full synthetic vocabulary, so generated corpora parse too."""
    base = build_lexicon(wordlist if wordlist is not None else 0,
                         words_per_category)
    return Lexicon(
        nouns=_READABLE["nouns"] + base.nouns,
        verbs=_READABLE["verbs"] + base.verbs,
        adjectives=_READABLE["adjectives"] + base.adjectives,
        adverbs=_READABLE["adverbs"] + base.adverbs,
        empty_token=base.empty_token,
    )


def cmd_tables(args) -> int:
    from .tables import derive_all, save_tables

    out_dir = Path(args.out)
    bound = args.bound if args.bound is not None else 5
    tables = derive_all(quantifier_bound=bound)
    save_tables(tables, out_dir, quantifier_bound=bound)
    manifest = json.loads((out_dir / "manifest.json").read_text())
    print(f"wrote tables to {out_dir}")
    for name, digest in sorted(manifest["sha256"].items()):
        print(f"  {name}  sha256:{digest[:16]}")
    return EXIT_OK


def cmd_generate(args) -> int:
    from .corpus import QuotaExhaustedError, generate_corpus

    config = _corpus_config(args)
    if config.out_dir is None:
        raise ValueError("generate requires an output directory (--out)")
    try:
        report = generate_corpus(config)
    except QuotaExhaustedError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_INVARIANT
    except AssertionError as err:
        print(f"invariant failure: {err}", file=sys.stderr)
        return EXIT_INVARIANT
    counts = report.stats["counts"]
    labels = report.stats["overall"]["label_distribution"]
    fallback = report.stats["overall"]["fallback"]
    print(f"wrote {sum(counts.values())} records to {config.out_dir}")
    print(f"  splits: {counts}")
    print(f"  labels: {labels}")
    print(f"  fallback rate: {fallback['rate']:.6f} ({fallback['count']})")
    print(f"  audit: {report.stats['audit']}")
    return EXIT_OK


def cmd_label(args) -> int:
    from .oracle import Oracle
    from .corpus import pair_informative
    from .fragment import pair_negation_count
    from .tables import default_tables

    lexicon = _label_lexicon()
    tables = default_tables()
    bound = args.bound if args.bound is not None else 3
    oracle = Oracle(bound=bound)
    try:
        premise = parse_text(args.premise, lexicon)
        hypothesis = parse_text(args.hypothesis, lexicon)
    except ParseError as err:
        print(f"parse error: {err}", file=sys.stderr)
        return EXIT_USAGE
    pair = NLIPair(premise, hypothesis)
    label, provenance = label_natlog(pair, tables, oracle)
    relations = sentence_relation(pair, tables)
    c = pair_negation_count(pair)
    informative = (
        label is Label.NEUTRAL and pair_informative(pair, tables, oracle)
    )
    print(f"label: {label.value}")
    print(f"relation set: {set_to_codes(relations)}")
    print(f"labeler: {provenance}")
    print(f"negation count: {c}")
    print(f"informative: {str(informative).lower()}")
    if args.explain:
        _print_explanation(pair, oracle)
    return EXIT_OK


def _print_explanation(pair: NLIPair, oracle) -> None:
    from .folsem import aux_premises, build_signature, format_formula, translate
    from .oracle import DegenerateProposition, format_model

    signature = build_signature(pair)
    print("premise FOL:")
    print(f"  {format_formula(translate(pair.premise, 'premise', signature))}")
    print("hypothesis FOL:")
    print(
        f"  {format_formula(translate(pair.hypothesis, 'hypothesis', signature))}"
    )
    print(f"aux premises: {len(aux_premises(signature))}"
          f" + {len(signature.constraints)} linking constraints")
    try:
        verdict = oracle.decide_label(pair)
    except DegenerateProposition as err:
        print(f"oracle: degenerate ({err})")
        return
    print(f"oracle label: {verdict.label.value} (bound {verdict.bound_used})")
    for name, model in sorted(verdict.witnesses.items()):
        print(f"witness {name}:")
        for line in format_model(model).splitlines():
            print(f"  {line}")


def cmd_validate(args) -> int:
    from .corpus import read_jsonl
    from .fragment import pair_negation_count, parse_tokens
    from .oracle import Oracle
    from .seeding import substream_rng
    from .tables import default_tables

    path = Path(args.corpus)
    if not path.exists():
        raise FileNotFoundError(f"corpus file {args.corpus!r} does not exist")
    if path.suffix != ".jsonl":
        raise ValueError("validate reads the jsonl format (labels with meta)")
    try:
        records = read_jsonl(path)
    except ValueError as err:
        print(f"format error: {err}", file=sys.stderr)
        return EXIT_INVARIANT

    lexicon = build_lexicon(0, args.words_per_category)
    tables = default_tables()
    bound = args.bound if args.bound is not None else 3
    oracle = Oracle(bound=bound)
    seed = args.seed if args.seed is not None else 0
    rate = args.sample_rate if args.sample_rate is not None else 0.01

    failures = []
    pairs = []
    for i, record in enumerate(records, start=1):
        try:
            pair = NLIPair(
                parse_tokens(record.premise, lexicon),
                parse_tokens(record.hypothesis, lexicon),
            )
        except ParseError as err:
            failures.append(f"line {i}: parse error: {err}")
            pairs.append(None)
            continue
        pairs.append(pair)
        c = pair_negation_count(pair)
        if c != record.negation_count:
            failures.append(
                f"line {i}: negation count {record.negation_count} != {c}"
            )
        if record.label is Label.CONTRADICTION and c % 2 == 0:
            failures.append(f"line {i}: contradiction with even C={c}")
        if record.label is Label.ENTAILMENT and c % 2 == 1:
            failures.append(f"line {i}: entailment with odd C={c}")
        label, _ = label_natlog(pair, tables, oracle)
        if label is not record.label:
            failures.append(
                f"line {i}: stored {record.label.value}, natlog {label.value}"
            )

    rng = substream_rng(seed, "validate")
    sample_size = max(1, round(len(records) * rate)) if records else 0
    oracle_checked = 0
    for i in sorted(rng.sample(range(len(records)), sample_size)):
        if pairs[i] is None:
            continue
        verdict = oracle.decide_label(pairs[i])
        oracle_checked += 1
        if verdict.label is not records[i].label:
            failures.append(
                f"line {i + 1}: stored {records[i].label.value}, "
                f"oracle {verdict.label.value}"
            )

    print(f"validated {len(records)} records "
          f"({oracle_checked} oracle-checked at bound {bound})")
    if failures:
        for f in failures[:50]:
            print(f"  {f}", file=sys.stderr)
        if len(failures) > 50:
            print(f"  ... {len(failures) - 50} more", file=sys.stderr)
        print(f"FAILED: {len(failures)} problems", file=sys.stderr)
        return EXIT_INVARIANT
    print("OK")
    return EXIT_OK


def cmd_stats(args) -> int:
    from .corpus import corpus_stats, read_jsonl

    path = Path(args.corpus)
    if not path.exists():
        raise FileNotFoundError(f"corpus file {args.corpus!r} does not exist")
    if path.suffix != ".jsonl":
        raise ValueError("stats reads the jsonl format (labels with meta)")
    records = read_jsonl(path)
    print(json.dumps(corpus_stats(records), indent=2, sort_keys=True))
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(
        prog="quantnli",
        description="Generate, label, and validate quantified NLI corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser):
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--bound", type=int, default=None,
                       help="universe bound for the model oracle")

    p_tables = sub.add_parser("tables", help="derive and write semantic tables")
    common(p_tables)
    p_tables.add_argument("--out", required=True)
    p_tables.set_defaults(func=cmd_tables)

    p_gen = sub.add_parser("generate", help="generate a corpus")
    common(p_gen)
    p_gen.add_argument("--config", default=None,
                       help="JSON file with CorpusConfig keys")
    p_gen.add_argument("--out", default=None)
    p_gen.add_argument("--format", choices=("jsonl", "tsv"), default=None)
    p_gen.add_argument("--witnesses", action="store_true")
    p_gen.add_argument("--no-balance-labels", action="store_true")
    p_gen.add_argument("--no-relation-balance", action="store_true")
    p_gen.set_defaults(func=cmd_generate)

    p_label = sub.add_parser("label", help="label one sentence pair")
    common(p_label)
    p_label.add_argument("premise")
    p_label.add_argument("hypothesis")
    p_label.add_argument("--explain", action="store_true",
                         help="print FOL forms and countermodel witnesses")
    p_label.set_defaults(func=cmd_label)

    p_val = sub.add_parser("validate", help="re-check a corpus file")
    common(p_val)
    p_val.add_argument("corpus")
    p_val.add_argument("--sample-rate", type=float, default=None,
                       help="fraction re-checked with the oracle")
    p_val.add_argument("--words-per-category", type=int, default=100)
    p_val.set_defaults(func=cmd_validate)

    p_stats = sub.add_parser("stats", help="print statistics for a corpus")
    common(p_stats)
    p_stats.add_argument("corpus")
    p_stats.set_defaults(func=cmd_stats)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
