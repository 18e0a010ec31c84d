"""Pure-Python implementations of the hashing and sketch kernels.

Bit-for-bit identical to the compiled ``_kernels`` extension; used when the
extension is not built or ``EVENTGRAPH_PURE_PYTHON=1`` is set.
"""

from __future__ import annotations

from heapq import nsmallest
from typing import Iterable

MASK64 = 0xFFFFFFFFFFFFFFFF
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_SEED_SALT = 0x243F6A8885A308D3


def _mix64(z: int) -> int:
    # splitmix64 finalizer
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def hash_user(user: str, seed: int) -> int:
    h = _FNV_OFFSET
    for b in user.encode("utf-8"):
        h = ((h ^ b) * _FNV_PRIME) & MASK64
    return _mix64(h ^ _mix64((seed & MASK64) ^ _SEED_SALT))


def hash_users(users: Iterable[str], seed: int) -> list[int]:
    return [hash_user(u, seed) for u in users]


def bottom_p(values: Iterable[int], p: int) -> list[int]:
    return nsmallest(p, set(values))


def merge_bottom_p(a: list[int], b: list[int], p: int) -> list[int]:
    out: list[int] = []
    i = j = 0
    na, nb = len(a), len(b)
    while len(out) < p and (i < na or j < nb):
        if j >= nb or (i < na and a[i] < b[j]):
            v = a[i]
            i += 1
        elif i >= na or b[j] < a[i]:
            v = b[j]
            j += 1
        else:
            v = a[i]
            i += 1
            j += 1
        out.append(v)
    return out


def sketches_intersect(a: list[int], b: list[int]) -> bool:
    i = j = 0
    na, nb = len(a), len(b)
    while i < na and j < nb:
        if a[i] == b[j]:
            return True
        if a[i] < b[j]:
            i += 1
        else:
            j += 1
    return False
