"""Deterministic seed derivation.

Every random stream is keyed by (master seed, stream labels). Trajectory
shots draw a fixed number of uniforms each from a counter-based Philox
stream, so shot s always sees the same numbers whatever the batching.
"""

import hashlib

import numpy as np


def label_id(text: str) -> int:
    """Stable 63-bit integer for a text label."""
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def seed_sequence(seed: int, *stream: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(seed), *(int(s) for s in stream)])


def philox_key(seed: int, *stream: int) -> np.ndarray:
    return seed_sequence(seed, *stream).generate_state(2, dtype=np.uint64)


def shot_uniforms(key: np.ndarray, first_shot: int, shots: int, per_shot: int) -> np.ndarray:
    """Uniforms for shots [first_shot, first_shot + shots), shape (shots, per_shot).

    Args:
        key: Philox key from philox_key
        first_shot: Index of the first shot in the batch
        shots: Batch size
        per_shot: Uniforms per shot, a multiple of 4
    """
    if per_shot % 4:
        raise ValueError(f"per_shot must be a multiple of 4, got {per_shot}")
    bit_generator = np.random.Philox(key=key)
    bit_generator.advance(first_shot * per_shot // 4)
    return np.random.Generator(bit_generator).random((shots, per_shot))
