"""Corpus pipeline: sampling, vectorized labeling, balancing, serialization."""

import json
import random
from collections import Counter
from dataclasses import replace

import numpy as np
import pytest

from quantnli.corpus import (
    LABEL_ORDER,
    SLOT_KEYS,
    SLOT_RELATION_ORDER,
    CorpusConfig,
    ExampleRecord,
    QuotaExhaustedError,
    batch_equalized_labels,
    batch_labels,
    build_label_array,
    corpus_stats,
    equalize_pair,
    generate_corpus,
    informative_subset,
    pair_informative,
    read_jsonl,
    sample_batch,
    sample_pair_relation_balanced,
    write_jsonl,
    write_tsv,
)
from quantnli.fragment import (
    NLIPair,
    Sentence,
    pair_negation_count,
    parse_tokens,
    render,
)
from quantnli.natlog import Label, label_natlog, slot_relations
from quantnli.relations import SemRelation as R
from quantnli.seeding import substream_seed
from test_natlog import make_sentence


def make_record(label=Label.NEUTRAL, **meta):
    p = make_sentence(adj_s="Swiss", adv="madly")
    h = make_sentence(adj_s="wild", v="sells")
    pair = NLIPair(p, h)
    defaults = dict(
        premise=render(p),
        hypothesis=render(h),
        label=label,
        slot_relations=slot_relations(pair),
        negation_count=pair_negation_count(pair),
        labeler="natlog",
        informative=True,
    )
    defaults.update(meta)
    return ExampleRecord(**defaults)


class TestExampleRecord:
    def test_json_round_trip(self):
        record = make_record()
        back = ExampleRecord.from_json(record.to_json())
        assert back == record

    def test_json_shape(self):
        payload = json.loads(make_record().to_json())
        assert set(payload) == {"premise", "hypothesis", "label", "meta"}
        assert payload["label"] == "neutral"
        assert set(payload["meta"]) == {
            "slot_relations", "negation_count", "labeler", "informative",
        }
        assert payload["meta"]["slot_relations"] == {
            "subject_np": "#", "vp": "#", "object_np": "=",
        }

    def test_witnesses_serialized_when_present(self):
        record = make_record(
            witnesses={
                "premise_and_hypothesis": {
                    "size": 2, "unary": {"S_p": [0]}, "binary": {"V_p": []},
                }
            }
        )
        payload = json.loads(record.to_json())
        assert "witnesses" in payload["meta"]
        back = ExampleRecord.from_json(record.to_json())
        assert back.witnesses == record.witnesses


class TestSerialization:
    def test_jsonl_round_trip(self, tmp_path):
        records = [make_record(), make_record(label=Label.ENTAILMENT)]
        path = tmp_path / "out.jsonl"
        write_jsonl(records, path)
        assert read_jsonl(path) == records

    def test_malformed_line_names_position(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text(make_record().to_json() + "\n{broken\n")
        with pytest.raises(ValueError, match=r"bad\.jsonl:2"):
            read_jsonl(path)

    def test_tsv_format(self, tmp_path):
        path = tmp_path / "out.tsv"
        write_tsv([make_record()], path)
        line = path.read_text().splitlines()[0]
        premise, hypothesis, label = line.split("\t")
        assert premise.startswith("every Swiss baker")
        assert hypothesis.startswith("every wild baker")
        assert label == "neutral"


class TestCorpusConfig:
    def test_defaults(self):
        config = CorpusConfig()
        assert config.total_size == 32_000
        assert config.balance_labels and config.relation_balanced
        assert config.oracle_bound == 3

    def test_attempt_ceiling_scales(self):
        small = CorpusConfig(train_size=30, dev_size=0, test_size=0)
        assert small.attempt_ceiling == 1_000_000
        big = CorpusConfig(train_size=100_000)
        assert big.attempt_ceiling == 500 * big.total_size

    def test_explicit_ceiling_wins(self):
        config = CorpusConfig(max_attempts=123)
        assert config.attempt_ceiling == 123

    def test_validation(self):
        with pytest.raises(ValueError):
            CorpusConfig(train_size=-1)
        with pytest.raises(ValueError):
            CorpusConfig(format="parquet")
        with pytest.raises(ValueError):
            CorpusConfig(oracle_bound=1)


class TestScalarSampler:
    def test_realized_relation_matches_recomputation(self, lexicon):
        rng = random.Random(3)
        seen = Counter()
        for _ in range(400):
            pair = sample_pair_relation_balanced(rng, lexicon)
            rels = slot_relations(pair)
            for key in SLOT_KEYS:
                assert rels[key] in SLOT_RELATION_ORDER
                seen[(key, rels[key])] += 1
        # every slot exercises every target relation
        assert len(seen) == 12

    def test_marginals_near_uniform(self, lexicon):
        rng = random.Random(5)
        counts = {key: Counter() for key in SLOT_KEYS}
        n = 4000
        for _ in range(n):
            rels = slot_relations(sample_pair_relation_balanced(rng, lexicon))
            for key in SLOT_KEYS:
                counts[key][rels[key]] += 1
        for key in SLOT_KEYS:
            for rel in SLOT_RELATION_ORDER:
                assert abs(counts[key][rel] / n - 0.25) < 0.03

    def test_forward_realization_shape(self, lexicon):
        # ⊏ slots must use a shared head with only the premise modified
        rng = random.Random(9)
        checked = 0
        for _ in range(300):
            pair = sample_pair_relation_balanced(rng, lexicon)
            rels = slot_relations(pair)
            p, h = pair.premise, pair.hypothesis
            if rels["subject_np"] is R.FORWARD:
                assert p.n_s == h.n_s
                assert p.adj_s is not None and h.adj_s is None
                checked += 1
            if rels["vp"] is R.REVERSE:
                assert p.v == h.v
                assert p.adv is None and h.adv is not None
                checked += 1
        assert checked > 50


@pytest.fixture(scope="module")
def label_array(tables):
    return build_label_array(tables)


@pytest.fixture(scope="module")
def balanced_report(tables):
    config = CorpusConfig(train_size=600, dev_size=60, test_size=60, seed=21)
    return generate_corpus(config, tables=tables)


class TestLabelArray:
    def test_frozen_cell_counts(self, label_array):
        # exact partition of the 65,536 pair classes; no cell is ambiguous,
        # which is why generation never needs the oracle fallback
        counts = Counter(label_array.ravel().tolist())
        assert counts[0] == 3136      # entailment
        assert counts[1] == 3136      # contradiction
        assert counts[2] == 59264     # neutral
        assert counts.get(3, 0) == 0  # ambiguous

    def test_neutral_fraction_value(self, label_array):
        neutral = float(np.mean(label_array == 2))
        assert abs(neutral - 59264 / 65536) < 1e-12

    def test_spot_cells_match_scalar_labeler(self, tables, label_array, lexicon):
        rng = random.Random(17)
        for _ in range(40):
            pair = NLIPair(
                sample_pair_relation_balanced(rng, lexicon).premise,
                sample_pair_relation_balanced(rng, lexicon).hypothesis,
            )
            label, _ = label_natlog(pair, tables)
            p, h = pair.premise, pair.hypothesis
            rels = slot_relations(pair)
            q = ("every", "some", "no", "not_every")
            cell = label_array[
                q.index(p.q_s), q.index(h.q_s), int(p.neg), int(h.neg),
                q.index(p.q_o), q.index(h.q_o),
                SLOT_RELATION_ORDER.index(rels["subject_np"]),
                SLOT_RELATION_ORDER.index(rels["vp"]),
                SLOT_RELATION_ORDER.index(rels["object_np"]),
            ]
            assert LABEL_ORDER[cell] is label


class TestBatchSampler:
    def test_deterministic(self, lexicon):
        a = sample_batch(
            np.random.default_rng(99), lexicon, 512, relation_balanced=True
        )
        b = sample_batch(
            np.random.default_rng(99), lexicon, 512, relation_balanced=True
        )
        for key in SLOT_KEYS:
            for left, right in zip(a.words[key], b.words[key]):
                assert np.array_equal(left, right)
        assert np.array_equal(a.q_sp, b.q_sp)
        assert np.array_equal(a.neg_h, b.neg_h)

    def test_balanced_slot_distribution(self, lexicon):
        batch = sample_batch(
            np.random.default_rng(1), lexicon, 1 << 15, relation_balanced=True
        )
        for key, indices in batch.slot_relation_indices().items():
            freqs = np.bincount(indices, minlength=4) / len(indices)
            assert np.all(np.abs(freqs - 0.25) < 0.02), (key, freqs)

    def test_plain_sampling_is_mostly_independence(self, lexicon):
        batch = sample_batch(
            np.random.default_rng(2), lexicon, 1 << 15, relation_balanced=False
        )
        for key, indices in batch.slot_relation_indices().items():
            assert np.mean(indices == 3) > 0.99, key

    def test_batch_labels_match_scalar_path(self, tables, lexicon, label_array):
        batch = sample_batch(
            np.random.default_rng(4), lexicon, 256, relation_balanced=True
        )
        labels = batch_labels(batch, label_array)
        for i in range(256):
            pair = batch.pair(i, lexicon)
            expected, _ = label_natlog(pair, tables)
            assert LABEL_ORDER[labels[i]] is expected

    def test_batch_equalized_labels_match_scalar_path(
        self, tables, lexicon, label_array
    ):
        batch = sample_batch(
            np.random.default_rng(6), lexicon, 256, relation_balanced=True
        )
        labels = batch_equalized_labels(batch, label_array)
        for i in range(256):
            pair = equalize_pair(batch.pair(i, lexicon))
            expected, _ = label_natlog(pair, tables)
            assert LABEL_ORDER[labels[i]] is expected

    def test_negation_counts_match_scalar(self, lexicon):
        batch = sample_batch(
            np.random.default_rng(8), lexicon, 128, relation_balanced=True
        )
        counts = batch.negation_counts()
        for i in range(128):
            assert counts[i] == pair_negation_count(batch.pair(i, lexicon))


class TestEqualization:
    def test_showcase_pair_equalizes_to_entailment(self, tables):
        p = make_sentence(adj_s="Swiss", adv="madly")
        h = make_sentence(adj_s="wild", v="sells")
        equalized = equalize_pair(NLIPair(p, h))
        assert equalized.premise == p
        assert equalized.hypothesis.adj_s == "Swiss"
        assert equalized.hypothesis.v == "rubs"
        assert equalized.hypothesis.adv is None  # emptiness preserved
        label, _ = label_natlog(equalized, tables)
        assert label is Label.ENTAILMENT
        assert pair_informative(NLIPair(p, h), tables)

    def test_uninformative_pair(self, tables):
        # reverse-forward clash stays neutral after equalization
        p = make_sentence(q_s="some")
        h = make_sentence(q_s="every")
        pair = NLIPair(p, h)
        label, _ = label_natlog(pair, tables)
        assert label is Label.NEUTRAL
        assert not pair_informative(pair, tables)

    def test_informative_subset_flags_written_back(self, tables, lexicon):
        config = CorpusConfig(
            train_size=120, dev_size=0, test_size=0, seed=13,
            balance_labels=False,
        )
        report = generate_corpus(config, tables=tables)
        records = report.splits["train"]
        subset = informative_subset(records, lexicon, tables)
        for record in records:
            if record.label is not Label.NEUTRAL:
                assert record.informative is False
            pair = NLIPair(
                parse_tokens(record.premise, lexicon),
                parse_tokens(record.hypothesis, lexicon),
            )
            if record.label is Label.NEUTRAL:
                assert record.informative == pair_informative(pair, tables)
        assert subset == [r for r in records if r.informative]
        assert 0 < len(subset) < len(records)


class TestGenerateCorpus:
    def test_split_sizes(self, balanced_report):
        sizes = {k: len(v) for k, v in balanced_report.splits.items()}
        assert sizes == {"train": 600, "dev": 60, "test": 60}

    def test_labels_balanced_within_one(self, balanced_report):
        for records in balanced_report.splits.values():
            counts = Counter(r.label for r in records)
            third = len(records) / 3
            for label in LABEL_ORDER:
                assert abs(counts[label] - third) <= 1

    def test_splits_pair_disjoint(self, balanced_report):
        keys = {
            name: {(r.premise, r.hypothesis) for r in records}
            for name, records in balanced_report.splits.items()
        }
        assert not keys["train"] & keys["dev"]
        assert not keys["train"] & keys["test"]
        assert not keys["dev"] & keys["test"]

    def test_no_duplicates_anywhere(self, balanced_report):
        seen = [
            (r.premise, r.hypothesis)
            for records in balanced_report.splits.values()
            for r in records
        ]
        assert len(seen) == len(set(seen))

    def test_parity_theorem_on_every_record(self, balanced_report):
        # contradiction forces odd negation count and entailment forces
        # even; neutral pairs carry either parity
        for records in balanced_report.splits.values():
            for r in records:
                if r.label is Label.CONTRADICTION:
                    assert r.negation_count % 2 == 1
                elif r.label is Label.ENTAILMENT:
                    assert r.negation_count % 2 == 0

    def test_no_fallbacks_needed(self, balanced_report):
        assert balanced_report.stats["fallback_count"] == 0
        assert balanced_report.stats["overall"]["fallback"]["count"] == 0

    def test_audit_clean(self, balanced_report):
        audit = balanced_report.stats["audit"]
        assert audit["mismatches"] == 0
        assert audit["sample"] >= 1
        assert audit["bound"] == 3

    def test_deterministic_across_runs(self, tables):
        config = CorpusConfig(train_size=90, dev_size=9, test_size=9, seed=5)
        a = generate_corpus(config, tables=tables)
        b = generate_corpus(config, tables=tables)
        for name in a.splits:
            assert a.splits[name] == b.splits[name]

    def test_seed_changes_output(self, tables):
        base = CorpusConfig(train_size=90, dev_size=9, test_size=9, seed=5)
        a = generate_corpus(base, tables=tables)
        b = generate_corpus(replace(base, seed=6), tables=tables)
        assert a.splits["train"] != b.splits["train"]

    def test_unbalanced_mode(self, tables):
        config = CorpusConfig(
            train_size=200, dev_size=0, test_size=0, seed=3,
            balance_labels=False,
        )
        report = generate_corpus(config, tables=tables)
        records = report.splits["train"]
        assert len(records) == 200
        counts = Counter(r.label for r in records)
        # unbalanced sampling is dominated by neutral pairs
        assert counts[Label.NEUTRAL] > 150

    def test_quota_exhaustion_names_label(self, tables):
        # entailment/contradiction quotas this size cannot be filled from a
        # single batch, and the ceiling blocks a second one
        config = CorpusConfig(
            train_size=60_000, dev_size=0, test_size=0, seed=1,
            max_attempts=4000,
        )
        with pytest.raises(QuotaExhaustedError) as exc_info:
            generate_corpus(config, tables=tables)
        assert exc_info.value.label in (Label.ENTAILMENT, Label.CONTRADICTION)
        assert "unreachable" in str(exc_info.value)

    def test_witnesses_attached_when_requested(self, tables):
        config = CorpusConfig(
            train_size=30, dev_size=0, test_size=0, seed=2,
            include_witnesses=True,
        )
        report = generate_corpus(config, tables=tables)
        neutral = [
            r for r in report.splits["train"] if r.label is Label.NEUTRAL
        ]
        assert neutral
        for record in neutral:
            assert record.witnesses is not None
            assert "premise_and_hypothesis" in record.witnesses
            model = record.witnesses["premise_and_hypothesis"]
            assert set(model) == {"size", "unary", "binary"}

    def test_output_files_and_stats(self, tables, tmp_path):
        config = CorpusConfig(
            train_size=90, dev_size=9, test_size=9, seed=7,
            out_dir=str(tmp_path),
        )
        report = generate_corpus(config, tables=tables)
        for name in ("train", "dev", "test"):
            records = read_jsonl(report.paths[name])
            assert records == report.splits[name]
        stats = json.loads((tmp_path / "stats.json").read_text())
        assert stats["config"]["seed"] == 7
        assert stats["counts"] == {"train": 90, "dev": 9, "test": 9}

    def test_byte_identical_files_same_seed(self, tables, tmp_path):
        paths = []
        for run in ("a", "b"):
            config = CorpusConfig(
                train_size=90, dev_size=9, test_size=9, seed=11,
                out_dir=str(tmp_path / run),
            )
            generate_corpus(config, tables=tables)
            paths.append(tmp_path / run)
        for name in ("train.jsonl", "dev.jsonl", "test.jsonl", "stats.json"):
            a = (paths[0] / name).read_bytes()
            b = (paths[1] / name).read_bytes()
            if name == "stats.json":
                # out_dir differs inside the config echo; compare the rest
                a_stats = json.loads(a)
                b_stats = json.loads(b)
                a_stats["config"].pop("out_dir")
                b_stats["config"].pop("out_dir")
                assert a_stats == b_stats
            else:
                assert a == b


class TestCorpusStats:
    def test_counts(self):
        records = [
            make_record(),
            make_record(label=Label.ENTAILMENT, informative=False),
            make_record(informative=False),
        ]
        stats = corpus_stats(records)
        assert stats["count"] == 3
        assert stats["label_distribution"] == {
            "entailment": 1, "contradiction": 0, "neutral": 2,
        }
        assert stats["informative"] == {
            "neutral": 2, "informative": 1, "fraction_of_neutral": 0.5,
        }
        assert stats["fallback"] == {"count": 0, "rate": 0.0}
        assert stats["slot_relations"]["object_np"] == {"=": 3}

    def test_empty(self):
        stats = corpus_stats([])
        assert stats["count"] == 0
        assert stats["fallback"]["rate"] == 0.0


class TestSeedSubstreams:
    def test_substreams_distinct(self):
        assert substream_seed(0, "sampling") != substream_seed(0, "audit")
        assert substream_seed(0, "sampling") != substream_seed(1, "sampling")

    def test_substreams_stable(self):
        assert substream_seed(42, "sampling") == substream_seed(42, "sampling")
