"""Named, platform-stable RNG streams.

Every stochastic component draws from its own stream derived from the run
seed plus a scope tag, so concurrency and call order between components can
never change what any one of them sees.
"""

import hashlib

import numpy as np


def derive_rng(seed: int, *scope: "str | int") -> np.random.Generator:
    """Generator for the stream named by (seed, *scope).

    String tags are hashed with SHA-256 so the derivation does not depend on
    Python's per-process hash randomization.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    for part in scope:
        if isinstance(part, str):
            digest = hashlib.sha256(part.encode("utf-8")).digest()[:8]
            entropy.append(int.from_bytes(digest, "little"))
        else:
            entropy.append(int(part) & 0xFFFFFFFFFFFFFFFF)
    return np.random.default_rng(np.random.SeedSequence(entropy))
