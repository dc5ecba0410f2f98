"""Streaming enumeration of the representative sets S_k.

S_k holds the weight-k vectors of GF(q)^n whose first non-zero coordinate is 1;
every weight-k vector is a non-zero scalar multiple of exactly one of them.

Order is fixed: supports in lexicographic order (as itertools.combinations yields
them) and, per support, the k-1 free values as an odometer over the non-zero
elements 1..q-1 with the last position turning fastest. An element of S_k is thus
addressed by a mixed-radix index: support rank * (q-1)^(k-1) + odometer index.
"""
from dataclasses import (
    dataclass,
)
from math import comb
from typing import (
    Iterator,
)

import numpy as np

from .galois_field import (
    FieldElement,
    FieldSpec,
)


class OutOfRangeError(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class RepVector:
    support: tuple[int, ...]
    values: tuple[FieldElement, ...]

    @property
    def k(self) -> int:
        return len(self.support)

    def dense(self, n: int) -> tuple[FieldElement, ...]:
        out = [0] * n
        for index, value in zip(self.support, self.values):
            out[index] = value
        return tuple(out)


@dataclass(frozen=True, slots=True)
class RepBlock:
    """Consecutive representatives sharing one support: odometer indices [lo, hi)."""
    support: tuple[int, ...]
    lo: int
    hi: int

    def __len__(self) -> int:
        return self.hi - self.lo

    def value_array(self, q: int) -> np.ndarray:
        """Values of every representative in the block, shape (len, k); column 0 is all 1."""
        k = len(self.support)
        radix = q - 1
        index = np.arange(self.lo, self.hi, dtype=np.int64)
        out = np.ones((len(self), k), dtype=np.int64)
        for pos in range(k - 1, 0, -1):
            index, digit = np.divmod(index, radix)
            out[:, pos] = digit + 1
        return out


def _check_range(n: int, k: int, q: int) -> None:
    if not 1 <= k <= n:
        raise OutOfRangeError(f'Weight k={k} must satisfy 1 <= k <= n={n}')
    if q < 2:
        raise OutOfRangeError(f'Field order must be at least 2: {q}')


def rep_count(n: int, k: int, q: int) -> int:
    """|S_k| = C(n, k) * (q-1)^(k-1), exact."""
    _check_range(n, k, q)
    return comb(n, k) * (q - 1) ** (k - 1)


def unrank_support(n: int, k: int, rank: int) -> tuple[int, ...]:
    """The rank-th k-subset of range(n) in lexicographic order."""
    if not 0 <= rank < comb(n, k):
        raise OutOfRangeError(f'Support rank {rank} outside [0, C({n}, {k}))')
    support = []
    first = 0
    for slot in range(k):
        while True:
            count = comb(n - first - 1, k - slot - 1)
            if rank < count:
                break
            rank -= count
            first += 1
        support.append(first)
        first += 1
    return tuple(support)


def _next_support(support: tuple[int, ...], n: int) -> tuple[int, ...] | None:
    k = len(support)
    out = list(support)
    i = k - 1
    while i >= 0 and out[i] == n - k + i:
        i -= 1
    if i < 0:
        return None
    out[i] += 1
    for j in range(i + 1, k):
        out[j] = out[j - 1] + 1
    return tuple(out)


def rep_range(
    field: FieldSpec,
    n: int,
    k: int,
    start: int,
    stop: int,
) -> Iterator[RepVector]:
    """Representatives with mixed-radix index in [start, stop)."""
    total = rep_count(n, k, field.q)
    if not 0 <= start <= stop <= total:
        raise OutOfRangeError(f'Index range [{start}, {stop}) outside [0, {total}]')
    return _walk(n, k, field.q - 1, start, stop)


def _walk(n: int, k: int, radix: int, start: int, stop: int) -> Iterator[RepVector]:
    if start == stop:
        return
    rank, offset = divmod(start, radix ** (k - 1))
    support: tuple[int, ...] | None = unrank_support(n, k, rank)
    digits = [0] * (k - 1)
    for pos in range(k - 2, -1, -1):
        offset, digits[pos] = divmod(offset, radix)

    remaining = stop - start
    while remaining:
        assert support is not None
        yield RepVector(support=support, values=(1, *(d + 1 for d in digits)))
        remaining -= 1
        pos = k - 2
        while pos >= 0:
            digits[pos] += 1
            if digits[pos] < radix:
                break
            digits[pos] = 0
            pos -= 1
        if pos < 0 and remaining:
            support = _next_support(support, n)


def rep_iter(field: FieldSpec, n: int, k: int) -> Iterator[RepVector]:
    return rep_range(field, n, k, 0, rep_count(n, k, field.q))


def shard_bounds(total: int, shards: int) -> list[tuple[int, int]]:
    if shards < 1:
        raise OutOfRangeError(f'Shard count must be at least 1: {shards}')
    return [(total * i // shards, total * (i + 1) // shards) for i in range(shards)]


def rep_split(field: FieldSpec, n: int, k: int, shards: int) -> list[Iterator[RepVector]]:
    """Disjoint sub-streams whose in-order concatenation is rep_iter(field, n, k)."""
    total = rep_count(n, k, field.q)
    return [
        rep_range(field, n, k, start, stop)
        for start, stop in shard_bounds(total, shards)
    ]


def rep_blocks(
    n: int,
    k: int,
    q: int,
    start: int,
    stop: int,
    block_size: int,
) -> Iterator[RepBlock]:
    """Split the index range [start, stop) of S_k into single-support blocks."""
    per_support = (q - 1) ** (k - 1)
    index = start
    while index < stop:
        rank, offset = divmod(index, per_support)
        end = min(stop, (rank + 1) * per_support, index + block_size)
        yield RepBlock(support=unrank_support(n, k, rank), lo=offset, hi=offset + end - index)
        index = end
