"""Compiled inner loops for urn trajectories.

The kernels consume a buffer of pre-generated 64-bit words strictly in
order. When the buffer runs out mid-step they rewind to the cursor at
the start of that step and return, so the caller can refill the buffer
and resume without disturbing the draw sequence.
"""

import numpy as np
from numba import njit

_U64_ZERO = np.uint64(0)


@njit(cache=True, nogil=True)
def _draw(counts, n, total, raw, idx):
    """One rejection-sampled color draw; (ok, color, new_idx)."""
    bound = np.uint64(total)
    threshold = (_U64_ZERO - bound) % bound
    size = raw.shape[0]
    r = _U64_ZERO
    while True:
        if idx >= size:
            return False, 0, idx
        r = raw[idx]
        idx += 1
        if r >= threshold:
            break
    v = r % bound
    color = n - 1
    for x in range(n):
        c = np.uint64(counts[x])
        if v < c:
            color = x
            break
        v -= c
    return True, color, idx


@njit(cache=True, nogil=True)
def run_pair_steps(beats, counts, total, raw, idx, n_steps):
    """Two-draw reinforcement steps in place; (steps_done, new_idx)."""
    n = counts.shape[0]
    steps = 0
    while steps < n_steps:
        start = idx
        ok, a, idx = _draw(counts, n, total, raw, idx)
        if not ok:
            return steps, start
        ok, b, idx = _draw(counts, n, total, raw, idx)
        if not ok:
            return steps, start
        w = a
        if b != a and beats[b, a]:
            w = b
        counts[w] += 1
        total += 1
        steps += 1
    return steps, idx


@njit(cache=True, nogil=True)
def run_triple_steps(beats, counts, total, raw, idx, n_steps):
    """Three-draw reinforcement steps in place; (steps_done, new_idx)."""
    n = counts.shape[0]
    steps = 0
    while steps < n_steps:
        start = idx
        ok, a, idx = _draw(counts, n, total, raw, idx)
        if not ok:
            return steps, start
        ok, b, idx = _draw(counts, n, total, raw, idx)
        if not ok:
            return steps, start
        ok, c, idx = _draw(counts, n, total, raw, idx)
        if not ok:
            return steps, start
        w = a
        if b != a and beats[b, a]:
            w = b
        if c != w and beats[c, w]:
            w = c
        counts[w] += 1
        total += 1
        steps += 1
    return steps, idx
