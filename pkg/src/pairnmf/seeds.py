"""Deterministic seed derivation.

All randomness in a run flows from one base seed; sub-streams (splitting,
fold assignment, GA, per-pair factor initialization) are derived with
string tags so no two consumers share a stream.
"""

from __future__ import annotations

import zlib

import numpy as np


def derive_seed(base: int, *parts) -> int:
    """Derive a child seed from ``base`` and a sequence of int/str tags."""
    entropy = [int(base)]
    for part in parts:
        if isinstance(part, str):
            entropy.append(zlib.crc32(part.encode("utf-8")))
        else:
            entropy.append(int(part))
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])
