#!/usr/bin/env python3
"""Regenerate the packaged semantic tables in src/quantnli/data/tables.

Run from the repository root after any change to the derivation code; the
result must be byte-identical across reruns.
"""
import sys
import time
from pathlib import Path

from quantnli import tables


def main() -> int:
    out = Path(__file__).resolve().parent.parent / "src" / "quantnli" / "data" / "tables"
    t0 = time.time()
    derived = tables.derive_all()
    manifest = tables.save_tables(derived, out)
    print(f"wrote {out} in {time.time() - t0:.1f}s")
    for name, digest in sorted(manifest["sha256"].items()):
        print(f"  {name}  {digest[:16]}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
