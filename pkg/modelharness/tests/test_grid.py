"""Grid search and training-matrix drivers."""

import csv
import json

import pytest

from modelharness.grid import GRID_FIELDS, GridSpec, run_grid, run_matrix
from modelharness.models import ModelSpec

TINY_GRID = GridSpec(
    dropouts=(0.0, 0.1),
    learning_rates=(1e-3,),
    l2s=(0.0,),
    activations=("relu",),
)

SMALL = {"embedding_dim": 16, "hidden_dim": 16}


class TestGridSpec:
    def test_default_size(self):
        assert GridSpec().size == 54

    def test_size_is_product_of_axes(self):
        grid = GridSpec()
        assert grid.size == (
            len(grid.dropouts)
            * len(grid.learning_rates)
            * len(grid.l2s)
            * len(grid.activations)
        )

    def test_configs_cover_grid(self):
        base = ModelSpec(kind="lstm", **SMALL)
        specs = GridSpec().configs("lstm", base)
        assert len(specs) == 54
        assert len(set((s.dropout, s.learning_rate, s.l2, s.activation)
                       for s in specs)) == 54
        assert all(s.kind == "lstm" for s in specs)
        assert all(s.hidden_dim == 16 for s in specs)


class TestRunGrid:
    def test_csv_rows_match_configs(self, tiny_corpus_dir, tmp_path):
        out = tmp_path / "grid.csv"
        rows = run_grid(
            tiny_corpus_dir,
            "cbow",
            out,
            grid=TINY_GRID,
            base=ModelSpec(kind="cbow", **SMALL),
            max_examples=64,
        )
        assert len(rows) == TINY_GRID.size
        with open(out, newline="") as fh:
            read = list(csv.DictReader(fh))
        assert list(read[0].keys()) == list(GRID_FIELDS) + [
            "final_dev_accuracy"
        ]
        assert len(read) == TINY_GRID.size
        for row in read:
            assert row["kind"] == "cbow"
            assert 0.0 <= float(row["final_dev_accuracy"]) <= 1.0

    def test_parallel_matches_serial(self, tiny_corpus_dir, tmp_path):
        kwargs = dict(
            grid=TINY_GRID,
            base=ModelSpec(kind="cbow", **SMALL),
            max_examples=64,
        )
        serial = run_grid(
            tiny_corpus_dir, "cbow", tmp_path / "serial.csv", **kwargs
        )
        parallel = run_grid(
            tiny_corpus_dir, "cbow", tmp_path / "parallel.csv",
            jobs=2, **kwargs
        )
        assert serial == parallel


@pytest.fixture(scope="module")
def matrix(tiny_corpus_dir, tmp_path_factory):
    out = tmp_path_factory.mktemp("matrix")
    summary = run_matrix(
        tiny_corpus_dir,
        kinds=("cbow", "comptreenn"),
        seeds=(0, 1),
        out_dir=out,
        epochs=1,
        spec_overrides=SMALL,
    )
    return summary, out


class TestRunMatrix:
    def test_structure(self, matrix):
        summary, _ = matrix
        assert summary["kinds"] == ["cbow", "comptreenn"]
        assert summary["seeds"] == [0, 1]
        assert set(summary["runs"]) == {"cbow", "comptreenn"}
        for kind in summary["runs"]:
            assert set(summary["runs"][kind]) == {"0", "1"}
            for metrics in summary["runs"][kind].values():
                assert metrics["config"]["kind"] == kind
                assert 0.0 <= metrics["accuracy"]["dev"] <= 1.0

    def test_seed_recorded_per_run(self, matrix):
        summary, _ = matrix
        for kind in summary["runs"]:
            for seed, metrics in summary["runs"][kind].items():
                assert metrics["config"]["seed"] == int(seed)

    def test_recipes_apply_per_kind(self, tiny_corpus_dir):
        summary = run_matrix(
            tiny_corpus_dir,
            kinds=("cbow", "comptreenn"),
            seeds=(0,),
            epochs=1,
            spec_overrides=SMALL,
            recipes={"comptreenn": {"epochs": 2, "hidden_dim": 8,
                                    "dropout": 0.1}},
        )
        cbow = summary["runs"]["cbow"]["0"]["config"]
        tree = summary["runs"]["comptreenn"]["0"]["config"]
        assert cbow["epochs"] == 1 and cbow["hidden_dim"] == 16
        assert tree["epochs"] == 2 and tree["hidden_dim"] == 8
        assert tree["dropout"] == 0.1

    def test_recipes_for_absent_kind_rejected(self, tiny_corpus_dir):
        with pytest.raises(ValueError, match="not in this matrix"):
            run_matrix(
                tiny_corpus_dir,
                kinds=("cbow",),
                seeds=(0,),
                recipes={"lstm": {"epochs": 2}},
            )

    def test_artifacts_on_disk(self, matrix):
        summary, out = matrix
        on_disk = json.loads((out / "summary.json").read_text())
        assert on_disk == summary
        for kind in ("cbow", "comptreenn"):
            for seed in ("0", "1"):
                run_dir = out / f"{kind}_seed{seed}"
                metrics = json.loads((run_dir / "metrics.json").read_text())
                assert metrics == summary["runs"][kind][seed]
                header = (run_dir / "curve.csv").read_text().splitlines()[0]
                assert header == "examples_seen,dev_accuracy"
