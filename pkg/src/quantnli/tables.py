"""Derivation, serialization, and loading of the semantic tables.

Tables are derived from first principles (subset enumeration for join and
negation conjugation, oracle queries for the quantifier table) and shipped
as TSV data files with a checksum manifest; the deriver stays in the
package so the files can always be regenerated and diffed.
"""

from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .natlog import (
    Tables,
    derive_quantifier_table,
    read_quantifier_tsv,
    write_quantifier_tsv,
)
from .relations import (
    TableUnstableError,
    derive_join_table,
    derive_negation_table,
    read_join_tsv,
    read_negation_tsv,
    write_join_tsv,
    write_negation_tsv,
)

# quantifier-table entries realizing a proper-subset restrictor alongside
# an incompatible scope saturate at domain size 4; deriving at 5 doubles as
# the stability comparison point
QUANTIFIER_TABLE_BOUND = 5

TABLE_FILES = ("join.tsv", "negation.tsv", "quantifier.tsv")
MANIFEST_FILE = "manifest.json"


class TableIntegrityError(RuntimeError):
    """Stored table files do not match their manifest."""


def derive_all(
    quantifier_bound: int = QUANTIFIER_TABLE_BOUND, check_stability: bool = True
) -> Tables:
    """Derive the three tables; optionally verify quantifier-table
    saturation by re-deriving one bound lower and comparing."""
    from .oracle import Oracle

    if check_stability and quantifier_bound < 5:
        # bounds below 4 leave degenerate entries, so 4 is the earliest
        # usable comparison point and 5 the smallest checkable bound
        raise ValueError(
            "stability checking needs quantifier_bound >= 5; "
            "pass check_stability=False to derive lower bounds anyway"
        )
    join = derive_join_table()
    negation = derive_negation_table()
    quantifier = derive_quantifier_table(
        Oracle(bound=quantifier_bound), quantifier_bound
    )
    if check_stability:
        smaller = derive_quantifier_table(
            Oracle(bound=quantifier_bound - 1), quantifier_bound - 1
        )
        if smaller != quantifier:
            raise TableUnstableError(
                f"quantifier table differs between bounds "
                f"{quantifier_bound - 1} and {quantifier_bound}"
            )
    return Tables(quantifier=quantifier, negation=negation, join=join)


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def save_tables(
    tables: Tables,
    dirpath: Union[str, Path],
    quantifier_bound: int = QUANTIFIER_TABLE_BOUND,
) -> dict:
    """Write the three TSV files plus a manifest; returns the manifest."""
    dirpath = Path(dirpath)
    dirpath.mkdir(parents=True, exist_ok=True)
    texts = {
        "join.tsv": write_join_tsv(tables.join),
        "negation.tsv": write_negation_tsv(tables.negation),
        "quantifier.tsv": write_quantifier_tsv(tables.quantifier),
    }
    manifest = {
        "quantifier_bound": quantifier_bound,
        "sha256": {name: _sha256(text) for name, text in texts.items()},
    }
    for name, text in texts.items():
        (dirpath / name).write_text(text)
    (dirpath / MANIFEST_FILE).write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    )
    return manifest


def load_tables(dirpath: Union[str, Path]) -> Tables:
    """Load tables from a directory, verifying manifest checksums."""
    dirpath = Path(dirpath)
    manifest_path = dirpath / MANIFEST_FILE
    if not manifest_path.is_file():
        raise TableIntegrityError(f"missing manifest {manifest_path}")
    manifest = json.loads(manifest_path.read_text())
    texts = {}
    for name in TABLE_FILES:
        path = dirpath / name
        if not path.is_file():
            raise TableIntegrityError(f"missing table file {path}")
        text = path.read_text()
        want = manifest.get("sha256", {}).get(name)
        if _sha256(text) != want:
            raise TableIntegrityError(f"checksum mismatch for {name}")
        texts[name] = text
    return Tables(
        quantifier=read_quantifier_tsv(texts["quantifier.tsv"]),
        negation=read_negation_tsv(texts["negation.tsv"]),
        join=read_join_tsv(texts["join.tsv"]),
    )


@lru_cache(maxsize=1)
def default_tables() -> Tables:
    """The packaged tables, loaded once per process."""
    root = resources.files("quantnli") / "data" / "tables"
    with resources.as_file(root) as dirpath:
        return load_tables(dirpath)
