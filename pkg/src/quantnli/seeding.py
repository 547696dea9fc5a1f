"""Named sub-streams derived from a single 64-bit master seed.

Every source of randomness in the package asks for a sub-stream by name, so
that adding a consumer never perturbs the draws of an existing one.
"""

from __future__ import annotations

import hashlib
import random

MASK64 = (1 << 64) - 1


def substream_seed(seed: int, name: str) -> int:
    """Derive a 64-bit child seed for the sub-stream called ``name``."""
    digest = hashlib.blake2b(f"{seed & MASK64}/{name}".encode(), digest_size=8)
    return int.from_bytes(digest.digest(), "big")


def substream_rng(seed: int, name: str) -> random.Random:
    return random.Random(substream_seed(seed, name))
