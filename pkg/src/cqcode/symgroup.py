"""Symmetric-group elements and their action on tensor factors.

Permutations are tuples ``s`` of length n with ``s[j]`` the image of j.
The sequence action is (s.x)[i] = x[s^-1(i)], so the entry sitting at slot j
moves to slot s(j); the matching unitary permutes tensor factors the same
way, giving V_s (A_1 x ... x A_n) V_s* = A_{s^-1(1)} x ... x A_{s^-1(n)}.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import factorial

import numpy as np

from .limits import check_dim

Perm = tuple


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def validate_perm(s) -> Perm:
    s = tuple(int(v) for v in s)
    if sorted(s) != list(range(len(s))):
        raise ValueError(f"not a permutation of 0..{len(s) - 1}: {s}")
    return s


def compose(s: Perm, t: Perm) -> Perm:
    """(s . t)(j) = s(t(j))."""
    return tuple(s[t[j]] for j in range(len(t)))


def inverse(s: Perm) -> Perm:
    out = [0] * len(s)
    for j, v in enumerate(s):
        out[v] = j
    return tuple(out)


def cycle_type(s: Perm) -> tuple:
    """Cycle lengths of s, sorted in decreasing order."""
    seen = [False] * len(s)
    lengths = []
    for start in range(len(s)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = s[j]
            length += 1
        lengths.append(length)
    return tuple(sorted(lengths, reverse=True))


def all_perms(n: int):
    return itertools.permutations(range(n))


def permute_sequence(s: Perm, x) -> tuple:
    """Apply s to a sequence: result[s[j]] = x[j]."""
    out = [None] * len(x)
    for j, v in enumerate(x):
        out[s[j]] = v
    return tuple(out)


def sorting_permutation(x) -> Perm:
    """Permutation s with x = s . sorted(x), stable within equal symbols."""
    return tuple(sorted(range(len(x)), key=lambda i: (x[i], i)))


def block_positions(x, k: int | None = None):
    """Positions of each symbol value 1..k in a 1-based sequence."""
    if k is None:
        k = max(x) if x else 1
    blocks = [[] for _ in range(k)]
    for i, v in enumerate(x):
        if not 1 <= v <= k:
            raise ValueError(f"symbol {v} outside 1..{k}")
        blocks[v - 1].append(i)
    return blocks


def stabilizer_order(x) -> int:
    return int(np.prod([factorial(len(b)) for b in block_positions(x)], dtype=object))


def stabilizer_perms(x):
    """All permutations fixing the sequence x (product of per-symbol blocks)."""
    blocks = [b for b in block_positions(x) if b]
    n = len(x)
    for combo in itertools.product(*[itertools.permutations(b) for b in blocks]):
        image = list(range(n))
        for positions, permuted in zip(blocks, combo):
            for p, q in zip(positions, permuted):
                image[p] = q
        yield tuple(image)


def permutation_index_map(s: Perm, d: int, cap: int | None = None) -> np.ndarray:
    """Basis-index image of V_s on (C^d)^(x n), most significant factor first."""
    n = len(s)
    dim = check_dim(d ** n, cap)
    if n == 0:
        return np.zeros(1, dtype=np.int64)
    powers = d ** (n - 1 - np.arange(n))
    digits = (np.arange(dim)[:, None] // powers) % d
    inv = inverse(s)
    return digits[:, list(inv)] @ powers


def permutation_unitary(s: Perm, d: int, cap: int | None = None) -> np.ndarray:
    """The 0/1 unitary permuting tensor factors of (C^d)^(x n) by s."""
    s = validate_perm(s)
    idx = permutation_index_map(s, d, cap=cap)
    dim = idx.shape[0]
    v = np.zeros((dim, dim), dtype=complex)
    v[idx, np.arange(dim)] = 1.0
    return v


@lru_cache(maxsize=8)
def perm_tables(n: int, d: int):
    """(cycle_type, index_map) for every element of S_n; index maps read-only."""
    check_dim(d ** n)
    out = []
    for s in all_perms(n):
        idx = permutation_index_map(s, d)
        idx.flags.writeable = False
        out.append((cycle_type(s), idx))
    return tuple(out)
