"""Types, Young diagrams, and conditional types over finite alphabets.

Alphabets are 1-based index sets {1, ..., k}; sequences are plain tuples of
symbols.  All enumerations are deterministic, in decreasing lexicographic
order for diagrams and type vectors and increasing lexicographic order for
sequences, so codebooks and tests are reproducible.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import CapacityError
from .limits import enum_cap


@dataclass(frozen=True)
class YoungDiagram:
    """Partition of n into at most d non-increasing parts, padded to depth d."""

    rows: tuple

    def __post_init__(self):
        rows = tuple(int(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if any(r < 0 for r in rows):
            raise ValueError(f"negative row in {rows}")
        if any(rows[i] < rows[i + 1] for i in range(len(rows) - 1)):
            raise ValueError(f"rows not non-increasing: {rows}")

    @property
    def n(self) -> int:
        return sum(self.rows)

    @property
    def depth(self) -> int:
        return len(self.rows)

    def stripped(self) -> tuple:
        """Rows without trailing zeros."""
        return tuple(r for r in self.rows if r > 0)


@dataclass(frozen=True)
class TypeVector:
    """Occurrence counts of each symbol in a length-n sequence."""

    counts: tuple

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if not counts:
            raise ValueError("empty type vector")
        if any(c < 0 for c in counts):
            raise ValueError(f"negative count in {counts}")

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def d(self) -> int:
        return len(self.counts)

    def probs(self) -> tuple:
        """Probability view counts/n (all zeros map to the empty-sum view)."""
        n = self.n
        if n == 0:
            return tuple(0.0 for _ in self.counts)
        return tuple(c / n for c in self.counts)


@dataclass(frozen=True)
class ConditionalType:
    """One TypeVector per conditioning symbol: blocks[a-1] has size m_a."""

    blocks: tuple

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("conditional type needs at least one block")
        sizes = {b.d for b in self.blocks}
        if len(sizes) != 1:
            raise ValueError("blocks must share one output alphabet size")

    @property
    def output_size(self) -> int:
        return self.blocks[0].d


def enum_young(n: int, d: int):
    """All Young diagrams of size n and depth <= d, decreasing lex order."""
    if n < 0 or d < 1:
        raise ValueError("need n >= 0, d >= 1")

    def parts(remaining, slots, bound):
        if slots == 0:
            if remaining == 0:
                yield ()
            return
        lo = -(-remaining // slots)  # ceil: keep rows non-increasing feasible
        for first in range(min(remaining, bound), lo - 1, -1):
            for rest in parts(remaining - first, slots - 1, first):
                yield (first,) + rest

    return [YoungDiagram(p) for p in parts(n, d, n)]


def enum_types(n: int, d: int):
    """All compositions of n into d non-negative parts, decreasing lex order."""
    if n < 0 or d < 1:
        raise ValueError("need n >= 0, d >= 1")

    def comps(remaining, slots):
        if slots == 1:
            yield (remaining,)
            return
        for first in range(remaining, -1, -1):
            for rest in comps(remaining - first, slots - 1):
                yield (first,) + rest

    return [TypeVector(c) for c in comps(n, d)]


@lru_cache(maxsize=None)
def young_count(n: int, d: int) -> int:
    return len(enum_young(n, d))


@lru_cache(maxsize=None)
def type_count(n: int, d: int) -> int:
    return math.comb(n + d - 1, d - 1)


def type_of(x, d: int) -> TypeVector:
    """Empirical counts of a sequence over alphabet 1..d."""
    counts = [0] * d
    for v in x:
        if not 1 <= v <= d:
            raise ValueError(f"symbol {v} outside 1..{d}")
        counts[v - 1] += 1
    return TypeVector(tuple(counts))


def multinomial(counts) -> int:
    n = sum(counts)
    out = math.factorial(n)
    for c in counts:
        out //= math.factorial(c)
    return out


def type_class_size(p: TypeVector) -> int:
    """Number of sequences with type p, with the entropy lower bound checked.

    The exact-rational form of the lower bound (n+1)^-d * e^(n H(p)) is
    n^n * prod(c!) <= (n+1)^d * prod(c^c) * n!, verified in integers.
    """
    size = multinomial(p.counts)
    n, d = p.n, p.d
    if n > 0:
        lhs = n ** n * math.prod(math.factorial(c) for c in p.counts)
        rhs = (n + 1) ** d * math.prod(c ** c for c in p.counts if c) * math.factorial(n)
        if lhs > rhs:
            raise RuntimeError(f"entropy lower bound violated for type {p.counts}")
    return size


def entropy(p: TypeVector) -> float:
    """Shannon entropy of the probability view, in nats (0 log 0 = 0)."""
    n = p.n
    if n == 0:
        return 0.0
    return sum(-(c / n) * math.log(c / n) for c in p.counts if c)


def enum_type_class(p: TypeVector, cap: int | None = None):
    """All sequences of type p in increasing lexicographic order."""
    size = type_class_size(p)
    limit = enum_cap(cap)
    if size > limit:
        raise CapacityError(f"type class size {size} exceeds enumeration cap {limit}")

    def gen(counts, length):
        if length == 0:
            yield ()
            return
        for a, c in enumerate(counts, start=1):
            if c == 0:
                continue
            rest = counts[: a - 1] + (c - 1,) + counts[a:]
            for tail in gen(rest, length - 1):
                yield (a,) + tail

    return list(gen(p.counts, p.n))


def conditional_types_of(x, l: int, k: int | None = None):
    """All conditional types for x onto an output alphabet 1..l.

    The set is the product of per-symbol type sets, one per conditioning
    symbol a in 1..k with block size m_a = (count of a in x); symbols absent
    from x contribute the singleton all-zero type.
    """
    if k is None:
        k = max(x) if x else 1
    tv = type_of(x, k)
    per_symbol = [enum_types(m, l) for m in tv.counts]
    return [ConditionalType(tuple(combo)) for combo in itertools.product(*per_symbol)]


def conditional_type_of(x, y, l: int, k: int | None = None) -> ConditionalType:
    """Joint empirical conditional type of y given x."""
    if len(x) != len(y):
        raise ValueError("sequences must have equal length")
    if k is None:
        k = max(x) if x else 1
    buckets = [[0] * l for _ in range(k)]
    for a, b in zip(x, y):
        if not 1 <= a <= k:
            raise ValueError(f"symbol {a} outside 1..{k}")
        if not 1 <= b <= l:
            raise ValueError(f"symbol {b} outside 1..{l}")
        buckets[a - 1][b - 1] += 1
    return ConditionalType(tuple(TypeVector(tuple(row)) for row in buckets))


def conditional_class_size(v: ConditionalType) -> int:
    """Size of the conditional type class, a product of multinomials."""
    return math.prod(multinomial(b.counts) for b in v.blocks)


def conditional_type_class(x, v: ConditionalType, cap: int | None = None):
    """All y whose joint empirical distribution with x matches v."""
    k = len(v.blocks)
    blocks = [[] for _ in range(k)]
    for i, a in enumerate(x):
        if not 1 <= a <= k:
            raise ValueError(f"symbol {a} outside 1..{k}")
        blocks[a - 1].append(i)
    for positions, block_type in zip(blocks, v.blocks):
        if len(positions) != block_type.n:
            raise ValueError("conditional type does not match the sequence type")
    size = conditional_class_size(v)
    limit = enum_cap(cap)
    if size > limit:
        raise CapacityError(f"conditional class size {size} exceeds cap {limit}")

    out = []
    filled = [b for b in blocks if b]
    choices = [enum_type_class(v.blocks[a]) for a, b in enumerate(blocks) if b]
    for combo in itertools.product(*choices):
        y = [0] * len(x)
        for positions, sub in zip(filled, combo):
            for pos, sym in zip(positions, sub):
                y[pos] = sym
        out.append(tuple(y))
    return out


def is_identity_conditional_type(v: ConditionalType) -> bool:
    """True for the deterministic map sending each symbol to itself.

    Its class contains only the conditioning sequence; the packing condition
    skips exactly this one conditional type.
    """
    l = v.output_size
    for a, block in enumerate(v.blocks, start=1):
        if block.n == 0:
            continue
        if a > l or block.counts[a - 1] != block.n:
            return False
    return True


def nearest_type(p, n: int) -> TypeVector:
    """Type of size n closest to the probability vector p (largest remainder)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    total = float(sum(p))
    if total <= 0:
        raise ValueError("weights must have positive sum")
    scaled = [n * float(w) / total for w in p]
    base = [int(math.floor(s)) for s in scaled]
    short = n - sum(base)
    order = sorted(range(len(p)), key=lambda i: (-(scaled[i] - base[i]), i))
    for i in order[:short]:
        base[i] += 1
    return TypeVector(tuple(base))
