"""Per-task seed derivation: a task's stream depends only on the master seed and its key."""

from __future__ import annotations

import hashlib
from typing import Union

import numpy as np

KeyPart = Union[int, str, float]


def _word(part: KeyPart) -> int:
    if isinstance(part, (int, np.integer)) and part >= 0:
        return int(part)
    digest = hashlib.sha256(repr(part).encode("utf-8")).digest()
    return int.from_bytes(digest[:4], "little")


def task_sequence(master: int, *key: KeyPart) -> np.random.SeedSequence:
    if master < 0:
        raise ValueError(f"master seed must be non-negative, got {master}")
    return np.random.SeedSequence(entropy=int(master), spawn_key=tuple(_word(k) for k in key))


def task_seed(master: int, *key: KeyPart) -> int:
    return int(task_sequence(master, *key).generate_state(1)[0])


def task_rng(master: int, *key: KeyPart) -> np.random.Generator:
    return np.random.default_rng(task_sequence(master, *key))
