"""Architecture construction, shapes, masking, and the fixed tree."""

import numpy as np
import pytest
import torch

from modelharness.data import MODEL_KINDS, NUM_SLOTS, encode_dataset
from modelharness.models import (
    ModelSpec,
    TREE_STEPS,
    build_model,
)
from modelharness.train import _batch


def _small_spec(kind):
    return ModelSpec(kind=kind, embedding_dim=16, hidden_dim=16)


@pytest.fixture(scope="module")
def encoded(tiny_corpus, tiny_vocab):
    return {
        kind: encode_dataset(tiny_corpus["dev"], kind, tiny_vocab)
        for kind in MODEL_KINDS
    }


class TestModelSpec:
    def test_defaults(self):
        spec = ModelSpec(kind="lstm")
        assert spec.embedding_dim == 100
        assert spec.hidden_dim == 100
        assert spec.activation == "relu"

    def test_bad_kind(self):
        with pytest.raises(ValueError, match="unknown model kind"):
            ModelSpec(kind="transformer")

    def test_bad_activation(self):
        with pytest.raises(ValueError, match="unknown activation"):
            ModelSpec(kind="lstm", activation="gelu")

    def test_bad_dropout(self):
        with pytest.raises(ValueError, match="dropout"):
            ModelSpec(kind="lstm", dropout=1.0)

    def test_bad_learning_rate(self):
        with pytest.raises(ValueError, match="optimizer"):
            ModelSpec(kind="lstm", learning_rate=0.0)

    def test_as_dict_round_trip(self):
        spec = ModelSpec(kind="treenn", dropout=0.1, learning_rate=3e-4)
        assert ModelSpec(**spec.as_dict()) == spec


class TestTreeStructure:
    def test_step_count(self):
        # Nine leaves need exactly eight binary compositions.
        assert len(TREE_STEPS) == NUM_SLOTS - 1

    def test_every_leaf_used_once(self):
        used = [node for step in TREE_STEPS for node in step]
        for leaf in range(NUM_SLOTS):
            assert used.count(leaf) == 1

    def test_every_internal_node_consumed_once(self):
        used = [node for step in TREE_STEPS for node in step]
        # Internal nodes are 9..15; node 16 is the root and feeds the head.
        for node in range(NUM_SLOTS, NUM_SLOTS + len(TREE_STEPS) - 1):
            assert used.count(node) == 1
        assert NUM_SLOTS + len(TREE_STEPS) - 1 == 16
        assert 16 not in used

    def test_topological_order(self):
        for i, (left, right) in enumerate(TREE_STEPS):
            assert left < NUM_SLOTS + i
            assert right < NUM_SLOTS + i

    def test_root_pairs_subject_quantifier_with_rest(self):
        assert TREE_STEPS[-1][0] == 0


class TestForward:
    @pytest.mark.parametrize("kind", MODEL_KINDS)
    def test_logit_shape(self, kind, encoded, tiny_vocab):
        torch.manual_seed(3)
        model = build_model(_small_spec(kind), tiny_vocab.size)
        batch = _batch(encoded[kind], np.arange(12))
        logits = model(batch)
        assert logits.shape == (12, 3)
        assert torch.isfinite(logits).all()

    @pytest.mark.parametrize("kind", MODEL_KINDS)
    def test_construction_deterministic(self, kind, encoded, tiny_vocab):
        batch = _batch(encoded[kind], np.arange(8))
        torch.manual_seed(11)
        first = build_model(_small_spec(kind), tiny_vocab.size)(batch)
        torch.manual_seed(11)
        second = build_model(_small_spec(kind), tiny_vocab.size)(batch)
        assert torch.equal(first, second)

    @pytest.mark.parametrize("kind", ("cbow", "lstm", "attn_lstm"))
    def test_padding_width_irrelevant(self, kind, encoded, tiny_vocab):
        """Extra pad columns must not change any sequence model's output."""
        torch.manual_seed(7)
        model = build_model(_small_spec(kind), tiny_vocab.size).eval()
        batch = _batch(encoded[kind], np.arange(16))
        widened = dict(batch)
        for key in ("premise", "hypothesis"):
            ids = batch[key]
            widened[key] = torch.cat(
                [ids, torch.zeros(ids.shape[0], 3, dtype=ids.dtype)], dim=1
            )
        with torch.no_grad():
            narrow = model(batch)
            wide = model(widened)
        assert torch.allclose(narrow, wide, atol=1e-6)


class TestArchitectureDetails:
    def test_cbow_head_sees_concatenated_pair(self, tiny_vocab):
        model = build_model(_small_spec("cbow"), tiny_vocab.size)
        assert model.head[0].in_features == 2 * 16

    def test_lstm_head_sees_concatenated_pair(self, tiny_vocab):
        model = build_model(_small_spec("lstm"), tiny_vocab.size)
        assert model.head[0].in_features == 2 * 16

    def test_joint_models_feed_single_representation(self, tiny_vocab):
        for kind in ("attn_lstm", "comptreenn"):
            model = build_model(_small_spec(kind), tiny_vocab.size)
            assert model.head[0].in_features == 16

    def test_head_has_two_hidden_layers(self, tiny_vocab):
        model = build_model(_small_spec("cbow"), tiny_vocab.size)
        linears = [
            m for m in model.head if isinstance(m, torch.nn.Linear)
        ]
        assert len(linears) == 3
        assert linears[-1].out_features == 3

    def test_comptreenn_leaf_takes_word_vector_pairs(self, tiny_vocab):
        model = build_model(_small_spec("comptreenn"), tiny_vocab.size)
        assert model.leaf.in_features == 2 * 16
        assert model.leaf.out_features == 16

    def test_tree_composition_shared_and_same_shape(self, tiny_vocab):
        for kind in ("treenn", "comptreenn"):
            model = build_model(_small_spec(kind), tiny_vocab.size)
            layer = model.composer.compose
            assert layer.in_features == 2 * 16
            assert layer.out_features == 16

    def test_embedding_uses_pad_index(self, tiny_vocab):
        model = build_model(_small_spec("lstm"), tiny_vocab.size)
        assert model.embedding.padding_idx == 0
        assert model.embedding.num_embeddings == tiny_vocab.size
