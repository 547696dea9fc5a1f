"""Shared fixtures: corpora come from the quantnli CLI via subprocess.

The harness treats the corpus engine as an external tool; nothing in
this package or its tests imports it.
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

from modelharness.data import Vocabulary, load_corpus


def generate_corpus(
    out_dir: Path,
    train: int,
    dev: int,
    test: int,
    seed: int,
) -> Path:
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    cfg_path = out_dir.parent / f"config_{out_dir.name}.json"
    cfg_path.write_text(
        json.dumps(
            {
                "train_size": train,
                "dev_size": dev,
                "test_size": test,
                "seed": seed,
            }
        )
    )
    proc = subprocess.run(
        [
            sys.executable,
            "-m",
            "quantnli.cli",
            "generate",
            "--config",
            str(cfg_path),
            "--out",
            str(out_dir),
        ],
        capture_output=True,
        text=True,
    )
    if proc.returncode != 0:
        raise RuntimeError(
            f"corpus generation failed ({proc.returncode}):\n{proc.stderr}"
        )
    return out_dir


@pytest.fixture(scope="session")
def tiny_corpus_dir(tmp_path_factory) -> Path:
    out = tmp_path_factory.mktemp("corpora") / "tiny"
    return generate_corpus(out, train=600, dev=120, test=120, seed=7)


@pytest.fixture(scope="session")
def tiny_corpus(tiny_corpus_dir):
    return load_corpus(tiny_corpus_dir)


@pytest.fixture(scope="session")
def tiny_vocab(tiny_corpus) -> Vocabulary:
    return Vocabulary.build(list(tiny_corpus.values()))
