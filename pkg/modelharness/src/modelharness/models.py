"""The five architectures: shared embeddings, kind-specific encoders, one head.

Every model embeds tokens with randomly initialized 100-dimensional
vectors (trainable), builds either one joint pair representation
(attn_lstm, comptreenn) or a concatenation of separate premise and
hypothesis representations (cbow, lstm, treenn), and feeds the result
through the same two-hidden-layer + softmax classifier head.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import torch
from torch import nn

from .data import MODEL_KINDS, NUM_SLOTS

ACTIVATIONS = ("relu", "tanh")

NUM_CLASSES = 3

# Fixed constituency over the nine slots, leaves in slot order:
# q_s adj_s n_s neg adv v q_o adj_o n_o (indices 0..8).  Each step
# composes two existing nodes into a new one; the last step is the root.
# Ternary branching (root, object quantifier scope) is right-binarized.
TREE_STEPS = (
    (1, 2),    # node 9: subject adjective + noun
    (4, 5),    # node 10: adverb + verb
    (7, 8),    # node 11: object adjective + noun
    (10, 11),  # node 12: verb core + object N-bar
    (6, 12),   # node 13: object quantifier over the verb core
    (3, 13),   # node 14: negation over the verb phrase
    (9, 14),   # node 15: subject N-bar + verb phrase
    (0, 15),   # node 16 (root): subject quantifier over the rest
)


@dataclass
class ModelSpec:
    """Architecture and optimizer hyperparameters for one model.

    hidden_dim doubles as the LSTM width, the tree composition width,
    and the classifier-head width; it defaults to embedding_dim and is
    the first knob to turn if the desk-scale phenomena fail to appear.
    """

    kind: str
    embedding_dim: int = 100
    hidden_dim: int = 100
    activation: str = "relu"
    dropout: float = 0.0
    learning_rate: float = 1e-3
    l2: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.embedding_dim < 1 or self.hidden_dim < 1:
            raise ValueError("dimensions must be positive")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.learning_rate <= 0 or self.l2 < 0:
            raise ValueError("bad optimizer settings")

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "embedding_dim": self.embedding_dim,
            "hidden_dim": self.hidden_dim,
            "activation": self.activation,
            "dropout": self.dropout,
            "learning_rate": self.learning_rate,
            "l2": self.l2,
        }


def _activation(name: str) -> nn.Module:
    return nn.ReLU() if name == "relu" else nn.Tanh()


def _head(in_dim: int, spec: ModelSpec) -> nn.Sequential:
    """Two hidden layers and a linear softmax layer (logits out)."""
    h = spec.hidden_dim
    return nn.Sequential(
        nn.Linear(in_dim, h),
        _activation(spec.activation),
        nn.Dropout(spec.dropout),
        nn.Linear(h, h),
        _activation(spec.activation),
        nn.Dropout(spec.dropout),
        nn.Linear(h, NUM_CLASSES),
    )


class PairModel(nn.Module):
    """Base: embedding table + classifier head; subclasses encode pairs."""

    def __init__(self, spec: ModelSpec, vocab_size: int, head_in: int):
        super().__init__()
        self.spec = spec
        self.embedding = nn.Embedding(vocab_size, spec.embedding_dim, padding_idx=0)
        self.head = _head(head_in, spec)
        self.input_dropout = nn.Dropout(spec.dropout)

    def forward(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        raise NotImplementedError


def _masked_mean(emb: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
    mask = (
        torch.arange(emb.shape[1], device=emb.device)[None, :]
        < lengths[:, None]
    ).unsqueeze(-1)
    summed = (emb * mask).sum(dim=1)
    return summed / lengths.clamp(min=1).unsqueeze(-1).to(emb.dtype)


class CBoWModel(PairModel):
    """Average word vectors per sentence, concatenate, classify."""

    def __init__(self, spec: ModelSpec, vocab_size: int):
        super().__init__(spec, vocab_size, 2 * spec.embedding_dim)

    def forward(self, batch):
        prem = _masked_mean(
            self.input_dropout(self.embedding(batch["premise"])),
            batch["premise_lengths"],
        )
        hyp = _masked_mean(
            self.input_dropout(self.embedding(batch["hypothesis"])),
            batch["hypothesis_lengths"],
        )
        return self.head(torch.cat([prem, hyp], dim=1))


def _final_states(
    outputs: torch.Tensor, lengths: torch.Tensor
) -> torch.Tensor:
    idx = (lengths - 1).clamp(min=0)
    return outputs[torch.arange(outputs.shape[0]), idx]


class LSTMModel(PairModel):
    """One shared LSTM encodes both sentences; final states concatenated."""

    def __init__(self, spec: ModelSpec, vocab_size: int):
        super().__init__(spec, vocab_size, 2 * spec.hidden_dim)
        self.lstm = nn.LSTM(
            spec.embedding_dim, spec.hidden_dim, batch_first=True
        )
        self.output_dropout = nn.Dropout(spec.dropout)

    def _encode(self, ids, lengths):
        emb = self.input_dropout(self.embedding(ids))
        outputs, _ = self.lstm(emb)
        return self.output_dropout(_final_states(outputs, lengths))

    def forward(self, batch):
        prem = self._encode(batch["premise"], batch["premise_lengths"])
        hyp = self._encode(batch["hypothesis"], batch["hypothesis_lengths"])
        return self.head(torch.cat([prem, hyp], dim=1))


class _TreeComposer(nn.Module):
    """One single-layer feed-forward composition applied over TREE_STEPS.

    The composition function is shared across all internal nodes, the
    classic recursive formulation: every node trains the same matrix, so
    the join operation generalizes across tree positions instead of each
    node fitting its own shortcut.  (An untied per-node variant settles
    roughly twenty points lower on a 30K-example corpus: with nine
    function-word patterns per node to memorize it never finds the
    shared relational structure.)
    """

    def __init__(self, hidden_dim: int, activation: str):
        super().__init__()
        self.compose = nn.Linear(2 * hidden_dim, hidden_dim)
        self.act = _activation(activation)

    def forward(self, leaves: torch.Tensor) -> torch.Tensor:
        # leaves: (B, 9, h); returns the root vector (B, h)
        nodes = [leaves[:, i] for i in range(NUM_SLOTS)]
        for left, right in TREE_STEPS:
            nodes.append(
                self.act(
                    self.compose(
                        torch.cat([nodes[left], nodes[right]], dim=1)
                    )
                )
            )
        return nodes[-1]


class TreeNNModel(PairModel):
    """Per-sentence slot trees; root vectors concatenated."""

    def __init__(self, spec: ModelSpec, vocab_size: int):
        super().__init__(spec, vocab_size, 2 * spec.hidden_dim)
        if spec.embedding_dim == spec.hidden_dim:
            self.leaf_proj: nn.Module = nn.Identity()
        else:
            self.leaf_proj = nn.Linear(spec.embedding_dim, spec.hidden_dim)
        self.composer = _TreeComposer(spec.hidden_dim, spec.activation)

    def _encode(self, slot_ids):
        leaves = self.leaf_proj(self.input_dropout(self.embedding(slot_ids)))
        return self.composer(leaves)

    def forward(self, batch):
        prem = self._encode(batch["premise"])
        hyp = self._encode(batch["hypothesis"])
        return self.head(torch.cat([prem, hyp], dim=1))


class AttnLSTMModel(PairModel):
    """LSTM pair encoder with word-by-word attention over the premise.

    The premise LSTM's final state initializes the hypothesis LSTM; at
    each hypothesis step an attention distribution over premise states
    updates a running summary r, and the final pair representation is
    tanh(Wp r_N + Wx h_N).  One joint representation feeds the head.
    """

    def __init__(self, spec: ModelSpec, vocab_size: int):
        super().__init__(spec, vocab_size, spec.hidden_dim)
        h = spec.hidden_dim
        self.premise_lstm = nn.LSTM(spec.embedding_dim, h, batch_first=True)
        self.hypothesis_lstm = nn.LSTM(spec.embedding_dim, h, batch_first=True)
        self.w_y = nn.Linear(h, h, bias=False)
        self.w_h = nn.Linear(h, h, bias=False)
        self.w_r = nn.Linear(h, h, bias=False)
        self.w_alpha = nn.Linear(h, 1, bias=False)
        self.w_t = nn.Linear(h, h, bias=False)
        self.w_p = nn.Linear(h, h, bias=False)
        self.w_x = nn.Linear(h, h, bias=False)
        self.output_dropout = nn.Dropout(spec.dropout)

    def forward(self, batch):
        prem_ids = batch["premise"]
        hyp_ids = batch["hypothesis"]
        plen = batch["premise_lengths"]
        hlen = batch["hypothesis_lengths"]
        bsz = prem_ids.shape[0]

        prem_emb = self.input_dropout(self.embedding(prem_ids))
        outputs, _ = self.premise_lstm(prem_emb)
        prem_final = _final_states(outputs, plen)
        prem_cell = prem_final.new_zeros(prem_final.shape)
        # Premise states for attention, padded positions masked out.
        attn_mask = (
            torch.arange(prem_ids.shape[1], device=prem_ids.device)[None, :]
            >= plen[:, None]
        )

        hyp_emb = self.input_dropout(self.embedding(hyp_ids))
        hyp_states, _ = self.hypothesis_lstm(
            hyp_emb,
            (prem_final.unsqueeze(0), prem_cell.unsqueeze(0)),
        )

        projected_prem = self.w_y(outputs)
        r = outputs.new_zeros(bsz, self.spec.hidden_dim)
        active_template = torch.arange(
            hyp_ids.shape[1], device=hyp_ids.device
        )
        for t in range(hyp_ids.shape[1]):
            h_t = hyp_states[:, t]
            m = torch.tanh(
                projected_prem
                + (self.w_h(h_t) + self.w_r(r)).unsqueeze(1)
            )
            scores = self.w_alpha(m).squeeze(-1)
            scores = scores.masked_fill(attn_mask, float("-inf"))
            alpha = torch.softmax(scores, dim=1)
            r_new = torch.bmm(alpha.unsqueeze(1), outputs).squeeze(1) + torch.tanh(
                self.w_t(r)
            )
            # Steps past a hypothesis's length must not change its summary.
            active = (active_template[t] < hlen).unsqueeze(-1)
            r = torch.where(active, r_new, r)

        hyp_final = _final_states(hyp_states, hlen)
        pair = torch.tanh(self.w_p(r) + self.w_x(hyp_final))
        return self.head(self.output_dropout(pair))


class CompTreeNNModel(PairModel):
    """Single aligned tree over the nine premise/hypothesis slot pairs.

    Each leaf is one feed-forward layer over the concatenated pair of
    word vectors; internal nodes apply a same-shape composition to child
    outputs; the root is the joint pair representation.
    """

    def __init__(self, spec: ModelSpec, vocab_size: int):
        super().__init__(spec, vocab_size, spec.hidden_dim)
        # One leaf layer shared by all nine slot pairs; the word vectors
        # themselves carry what kind of slot is being compared.
        self.leaf = nn.Linear(2 * spec.embedding_dim, spec.hidden_dim)
        self.leaf_act = _activation(spec.activation)
        self.composer = _TreeComposer(spec.hidden_dim, spec.activation)

    def forward(self, batch):
        prem = self.input_dropout(self.embedding(batch["premise"]))
        hyp = self.input_dropout(self.embedding(batch["hypothesis"]))
        pairs = torch.cat([prem, hyp], dim=2)  # (B, 9, 2d)
        leaves = self.leaf_act(self.leaf(pairs))  # (B, 9, h)
        return self.head(self.composer(leaves))


_MODEL_CLASSES = {
    "cbow": CBoWModel,
    "lstm": LSTMModel,
    "treenn": TreeNNModel,
    "attn_lstm": AttnLSTMModel,
    "comptreenn": CompTreeNNModel,
}


def build_model(spec: ModelSpec, vocab_size: int) -> PairModel:
    return _MODEL_CLASSES[spec.kind](spec, vocab_size)
