"""Deterministic hashing, seeded per-item RNG streams, and a small worker pool.

Randomized stages derive one RNG per (seed, stream, item) from a stable byte
hash, so results never depend on iteration order, scheduling, or the process
hash seed.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def stable_hash_int(*parts: object) -> int:
    """Collapse parts into a 64-bit int, stable across runs and platforms."""
    joined = "\x1f".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.blake2b(joined, digest_size=8).digest(), "big")


def stream_rng(seed: int, *parts: object) -> random.Random:
    """A ``random.Random`` seeded from (seed, *parts); one independent stream per key."""
    return random.Random(stable_hash_int(seed, *parts))


def parallel_map(
    fn: Callable[[T], R],
    items: Sequence[T],
    workers: int = 1,
    chunk_size: int | None = None,
) -> list[R]:
    """Map fn over items preserving order; output is identical for any worker count."""
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk_size or max(1, len(items) // (workers * 4))))


def sha256_text(lines: Iterable[str]) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()


def sha256_file(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()
