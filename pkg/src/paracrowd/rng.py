"""Deterministic RNG derivation.

Every sampling site in the pipeline gets its own ``random.Random`` derived
from the experiment seed plus stable string tags, so reruns are reproducible
across processes (built-in ``hash()`` is salted per process and must not be
used here).
"""

import hashlib
import random


def derive_seed(base_seed: int, *tags: object) -> int:
    """Mix a base seed with string tags into a new 64-bit seed."""
    material = ":".join([str(base_seed)] + [str(t) for t in tags])
    digest = hashlib.sha256(material.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rng(base_seed: int, *tags: object) -> random.Random:
    """A fresh ``random.Random`` seeded from ``derive_seed``."""
    return random.Random(derive_seed(base_seed, *tags))
