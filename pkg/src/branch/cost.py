"""Field-multiplication counts for the representative search and the exhaustive baseline.

Counts are exact integers; log2 values are taken from the integers themselves.
"""
from math import (
    comb,
    log2,
)

import msgspec


class CostDomainError(ValueError):
    pass


class CostEstimate(msgspec.Struct, kw_only=True, frozen=True):
    n: int
    q: int
    mults_new: int
    mults_new_involutory: int
    mults_exhaustive: int
    log2_new: float | None
    log2_new_involutory: float | None
    log2_exhaustive: float


class TableRow(msgspec.Struct, frozen=True):
    n: int
    q_bits: int
    log2_exhaustive: float
    log2_new: float


# Published comparison for q = 2^8 and 2^16
REFERENCE_TABLE = (
    TableRow(4, 8, 36.00, 13.58),
    TableRow(4, 16, 68.00, 21.58),
    TableRow(5, 8, 44.64, 23.63),
    TableRow(5, 16, 84.64, 39.64),
    TableRow(6, 8, 53.17, 24.89),
    TableRow(6, 16, 101.17, 40.91),
    TableRow(7, 8, 61.61, 34.51),
    TableRow(7, 16, 117.62, 58.52),
    TableRow(8, 8, 70.00, 35.70),
    TableRow(8, 16, 134.00, 59.71),
)


def _check_size(n: int, q: int) -> None:
    if n < 1 or q < 2:
        raise CostDomainError(f'Need n >= 1 and q >= 2, got n={n}, q={q}')


def _check_gap_domain(n: int, q: int) -> None:
    if n < 1 or q <= 2:
        raise CostDomainError(f'Need n >= 1 and q > 2, got n={n}, q={q}')


def log2_count(value: int) -> float | None:
    return log2(value) if value > 0 else None


def _class_sum(n: int, q: int, top: int) -> int:
    return sum(comb(n, k) * (k - 1) * (q - 1) ** (k - 1) for k in range(1, top + 1))


def cost_new(n: int, q: int) -> int:
    """2n * sum_{k=1}^{floor((n+1)/2)} C(n,k) (k-1) (q-1)^(k-1): two products per representative."""
    _check_size(n, q)
    return 2 * n * _class_sum(n, q, (n + 1) // 2)


def cost_new_involutory(n: int, q: int) -> int:
    """A single product per representative when M^{-1} is a multiple of M."""
    _check_size(n, q)
    return n * _class_sum(n, q, (n + 1) // 2)


def cost_exhaustive(n: int, q: int) -> int:
    """n^2 * q^n, the count the published comparison uses."""
    _check_size(n, q)
    return n * n * q ** n


def estimate(n: int, q: int) -> CostEstimate:
    mults_new = cost_new(n, q)
    mults_involutory = cost_new_involutory(n, q)
    mults_exhaustive = cost_exhaustive(n, q)
    return CostEstimate(
        n=n,
        q=q,
        mults_new=mults_new,
        mults_new_involutory=mults_involutory,
        mults_exhaustive=mults_exhaustive,
        log2_new=log2_count(mults_new),
        log2_new_involutory=log2_count(mults_involutory),
        log2_exhaustive=log2(mults_exhaustive),
    )


def new_exponent(n: int, q: int) -> float:
    """n + 3/2 + ((n-1)/2) log2(q-1) + (3/2) log2 n."""
    _check_gap_domain(n, q)
    return n + 1.5 + (n - 1) / 2 * log2(q - 1) + 1.5 * log2(n)


def involutory_exponent(n: int, q: int) -> float:
    return new_exponent(n, q) - 1


def gap_f(n: int, q: int) -> float:
    """log2 of the exhaustive order minus the exponent bounding the new search."""
    _check_gap_domain(n, q)
    return (n * log2(q) + 2 * log2(n)) - new_exponent(n, q)


def _within(count: int, exponent: float) -> bool:
    return count == 0 or log2(count) <= exponent


def bound_check(n: int, q: int) -> bool:
    """cost_new(n, q) <= 2^new_exponent(n, q)."""
    return _within(cost_new(n, q), new_exponent(n, q))


def involutory_bound_check(n: int, q: int) -> bool:
    return _within(cost_new_involutory(n, q), involutory_exponent(n, q))


def binomial_sum_sides(n: int, q: int) -> tuple[int, int]:
    """Both sides of the bound on all but the heaviest class of the search.

    sum_{k=1}^{floor((n-1)/2)} C(n,k)(k-1)(q-1)^(k-1)
        <= C(n, floor((n+1)/2)) * floor((n-1)/2) * (q-1)^floor((n-1)/2)
    """
    _check_gap_domain(n, q)
    half = (n - 1) // 2
    lhs = _class_sum(n, q, half)
    rhs = comb(n, (n + 1) // 2) * half * (q - 1) ** half
    return lhs, rhs


def reference_table() -> list[tuple[TableRow, CostEstimate]]:
    return [(row, estimate(row.n, 1 << row.q_bits)) for row in REFERENCE_TABLE]
