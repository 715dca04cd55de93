"""Replica-block fan-out.

Work is cut into fixed blocks of replica indices that do not depend on the
worker count; each block runs a jitted kernel taking ``(master, first, n,
*args)`` and blocks are reassembled in index order.  Integer aggregates are
therefore identical for any number of workers.
"""
from __future__ import annotations

import importlib
from concurrent.futures import ProcessPoolExecutor

import numpy as np

BLOCK_DEFAULT = 1 << 16
_block = BLOCK_DEFAULT


def set_block_size(block: int) -> None:
    """Replica block size used when a caller does not pass one.  Changing it
    changes nothing but the scheduling granularity."""
    global _block
    if block < 1:
        raise ValueError("block size must be positive")
    _block = int(block)


def block_size() -> int:
    return _block


def blocks(n: int, block: int = BLOCK_DEFAULT) -> list[tuple[int, int]]:
    if n < 0 or block < 1:
        raise ValueError("need n >= 0 and block >= 1")
    return [(s, min(block, n - s)) for s in range(0, n, block)]


def _call(target: str, master: int, first: int, n: int, args: tuple):
    mod, name = target.rsplit(":", 1)
    fn = getattr(importlib.import_module(mod), name)
    return fn(np.uint64(master), first, n, *args)


def run_replicas(target: str, master: int, n: int, args: tuple = (), workers: int = 1,
                 block: int | None = None, offset: int = 0) -> list:
    """Run ``module:function`` over replicas ``offset .. offset + n - 1``.

    Returns the per-block results in replica order.
    """
    jobs = [(offset + s, m) for s, m in blocks(n, _block if block is None else block)]
    if workers <= 1 or len(jobs) <= 1:
        return [_call(target, master, s, m, args) for s, m in jobs]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(_call, target, master, s, m, args) for s, m in jobs]
        return [f.result() for f in futs]


def concat(parts: list) -> np.ndarray:
    """Stack row-aligned block outputs (arrays or tuples of arrays)."""
    if parts and isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0])))
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)
