"""Dense vectors and square matrices over a FieldSpec.

Matrices are immutable row-major tuples of canonical field elements. Vectors are
columns: `matrix.mat_vec(x)` is Mx.
"""
from dataclasses import (
    dataclass,
)
import random
from typing import (
    Iterable,
    Self,
    Sequence,
)

from .galois_field import (
    FieldElement,
    FieldSpec,
)


class MatrixError(ValueError):
    pass


class DimensionMismatchError(MatrixError):
    pass


class FieldMismatchError(MatrixError):
    pass


class SingularMatrixError(MatrixError):
    pass


def weight(entries: Iterable[FieldElement]) -> int:
    """Hamming weight: number of non-zero coordinates."""
    return sum(1 for entry in entries if entry)


@dataclass(frozen=True, kw_only=True)
class FqVector:
    field: FieldSpec
    entries: tuple[FieldElement, ...]

    def __post_init__(self) -> None:
        for entry in self.entries:
            self.field.check(entry)

    @classmethod
    def create(cls, field: FieldSpec, entries: Iterable[FieldElement]) -> Self:
        return cls(field=field, entries=tuple(entries))

    @classmethod
    def zero(cls, field: FieldSpec, n: int) -> Self:
        return cls(field=field, entries=(0,) * n)

    @classmethod
    def unit(cls, field: FieldSpec, n: int, index: int) -> Self:
        return cls(field=field, entries=tuple(int(i == index) for i in range(n)))

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def weight(self) -> int:
        return weight(self.entries)

    def scale(self, scalar: FieldElement) -> Self:
        mul = self.field.mul
        return type(self)(field=self.field, entries=tuple(mul(scalar, e) for e in self.entries))


def sparse_weight_bounded(
    field: FieldSpec,
    rows: Sequence[Sequence[FieldElement]],
    support: Sequence[int],
    values: Sequence[FieldElement],
    budget: int,
) -> tuple[int | None, int]:
    """Weight of A·x for x given by (support, values), abandoned once it exceeds budget.

    values[0] is taken to be the field's 1 and never multiplied. Returns the weight
    (or None once it is known to exceed budget) and the number of rows evaluated.
    """
    add = field.add
    mul = field.mul
    first = support[0]
    rest = list(zip(support[1:], values[1:]))
    count = 0
    evaluated = 0
    for row in rows:
        evaluated += 1
        acc = row[first]
        for col, value in rest:
            acc = add(acc, mul(row[col], value))
        if acc:
            count += 1
            if count > budget:
                return None, evaluated
    return count, evaluated


@dataclass(frozen=True, kw_only=True)
class FqMatrix:
    field: FieldSpec
    rows: tuple[tuple[FieldElement, ...], ...]

    def __post_init__(self) -> None:
        order = len(self.rows)
        for row in self.rows:
            if len(row) != order:
                raise DimensionMismatchError(
                    f'Matrix must be square: row of length {len(row)} in order {order}'
                )
            for entry in row:
                self.field.check(entry)

    @classmethod
    def from_rows(
        cls,
        field: FieldSpec,
        rows: Iterable[Iterable[FieldElement]],
    ) -> Self:
        return cls(field=field, rows=tuple(tuple(row) for row in rows))

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> Self:
        return cls(
            field=field,
            rows=tuple(tuple(int(i == j) for j in range(n)) for i in range(n)),
        )

    @classmethod
    def circulant(cls, field: FieldSpec, first_row: Sequence[FieldElement]) -> Self:
        """Each row is the previous one rotated right by one position."""
        n = len(first_row)
        return cls.from_rows(
            field,
            [[first_row[(j - i) % n] for j in range(n)] for i in range(n)],
        )

    @classmethod
    def hadamard(cls, field: FieldSpec, first_row: Sequence[FieldElement]) -> Self:
        """Characteristic-2 Hadamard matrix M[i][j] = first_row[i ^ j]; len must be 2^t."""
        n = len(first_row)
        if n & (n - 1):
            raise DimensionMismatchError(f'Hadamard order must be a power of two: {n}')
        return cls.from_rows(field, [[first_row[i ^ j] for j in range(n)] for i in range(n)])

    @classmethod
    def random_nonsingular(cls, field: FieldSpec, n: int, rng: random.Random) -> Self:
        while True:
            matrix = cls.from_rows(
                field,
                [[rng.randrange(field.q) for _ in range(n)] for _ in range(n)],
            )
            if matrix.is_nonsingular():
                return matrix

    @property
    def n(self) -> int:
        return len(self.rows)

    @property
    def columns(self) -> tuple[tuple[FieldElement, ...], ...]:
        return tuple(zip(*self.rows))

    def _check_vector(self, vec: FqVector) -> None:
        if vec.field != self.field:
            raise FieldMismatchError('Vector and matrix are over different fields')
        if len(vec) != self.n:
            raise DimensionMismatchError(
                f'Vector of length {len(vec)} does not match matrix order {self.n}'
            )

    def _check_matrix(self, other: 'FqMatrix') -> None:
        if other.field != self.field:
            raise FieldMismatchError('Matrices are over different fields')
        if other.n != self.n:
            raise DimensionMismatchError(f'Orders differ: {self.n} and {other.n}')

    def mat_vec(self, vec: FqVector) -> FqVector:
        self._check_vector(vec)
        add = self.field.add
        mul = self.field.mul
        out = []
        for row in self.rows:
            acc = 0
            for entry, value in zip(row, vec.entries):
                if entry and value:
                    acc = add(acc, mul(entry, value))
            out.append(acc)
        return FqVector(field=self.field, entries=tuple(out))

    def mat_vec_weight_bounded(self, vec: FqVector, budget: int) -> int | None:
        """w_h(Mx) when it is <= budget, otherwise None (Exceeded)."""
        self._check_vector(vec)
        if budget < 0:
            raise ValueError(f'Weight budget must be non-negative: {budget}')
        support = [i for i, value in enumerate(vec.entries) if value]
        if not support:
            return 0
        # Normalize so the leading value is 1; weight is scale invariant
        lead_inv = self.field.inv(vec.entries[support[0]])
        values = [self.field.mul(lead_inv, vec.entries[i]) for i in support]
        result, _ = sparse_weight_bounded(self.field, self.rows, support, values, budget)
        return result

    def __matmul__(self, other: 'FqMatrix') -> 'FqMatrix':
        self._check_matrix(other)
        add = self.field.add
        mul = self.field.mul
        cols = other.columns
        rows = []
        for row in self.rows:
            out = []
            for col in cols:
                acc = 0
                for lhs, rhs in zip(row, col):
                    if lhs and rhs:
                        acc = add(acc, mul(lhs, rhs))
                out.append(acc)
            rows.append(tuple(out))
        return type(self)(field=self.field, rows=tuple(rows))

    def scale(self, scalar: FieldElement) -> 'FqMatrix':
        mul = self.field.mul
        return type(self)(
            field=self.field,
            rows=tuple(tuple(mul(scalar, e) for e in row) for row in self.rows),
        )

    def transpose(self) -> 'FqMatrix':
        return type(self)(field=self.field, rows=self.columns)

    def is_symmetric(self) -> bool:
        return self.rows == self.columns

    def is_identity(self) -> bool:
        return all(
            entry == int(i == j)
            for i, row in enumerate(self.rows)
            for j, entry in enumerate(row)
        )

    def first_row_sum(self) -> FieldElement:
        acc = 0
        for entry in self.rows[0]:
            acc = self.field.add(acc, entry)
        return acc

    def inverse(self) -> 'FqMatrix':
        """Gauss-Jordan elimination; the pivot is the first non-zero entry in column order."""
        field = self.field
        n = self.n
        aug = [list(row) + [int(i == j) for j in range(n)] for i, row in enumerate(self.rows)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col]), None)
            if pivot is None:
                raise SingularMatrixError(f'Matrix is singular (no pivot in column {col})')
            aug[col], aug[pivot] = aug[pivot], aug[col]
            pivot_inv = field.inv(aug[col][col])
            aug[col] = [field.mul(pivot_inv, e) for e in aug[col]]
            for r in range(n):
                factor = aug[r][col]
                if r == col or not factor:
                    continue
                aug[r] = [
                    field.sub(e, field.mul(factor, p)) for e, p in zip(aug[r], aug[col])
                ]
        return type(self)(field=field, rows=tuple(tuple(row[n:]) for row in aug))

    def is_nonsingular(self) -> bool:
        try:
            self.inverse()
        except SingularMatrixError:
            return False
        return True

    def is_involutory(self) -> bool:
        return (self @ self).is_identity()

    def is_hadamard(self) -> bool:
        """Recursive [[U, V], [V, U]] block structure over characteristic 2."""
        if not self.field.char2:
            return False
        n = self.n
        if n == 0 or n & (n - 1):
            return False
        return _is_hadamard_block(self.rows, 0, 0, n)


def _is_hadamard_block(
    rows: tuple[tuple[FieldElement, ...], ...],
    top: int,
    left: int,
    size: int,
) -> bool:
    if size == 1:
        return True
    half = size // 2
    for i in range(half):
        for j in range(half):
            upper_left = rows[top + i][left + j]
            upper_right = rows[top + i][left + half + j]
            if rows[top + half + i][left + half + j] != upper_left:
                return False
            if rows[top + half + i][left + j] != upper_right:
                return False
    return (
        _is_hadamard_block(rows, top, left, half)
        and _is_hadamard_block(rows, top, left + half, half)
    )


def mat_vec(matrix: FqMatrix, vec: FqVector) -> FqVector:
    return matrix.mat_vec(vec)


def mat_vec_weight_bounded(matrix: FqMatrix, vec: FqVector, budget: int) -> int | None:
    return matrix.mat_vec_weight_bounded(vec, budget)


def mat_inv(matrix: FqMatrix) -> FqMatrix:
    return matrix.inverse()


def transpose(matrix: FqMatrix) -> FqMatrix:
    return matrix.transpose()


def is_involutory(matrix: FqMatrix) -> bool:
    return matrix.is_involutory()


def is_hadamard_char2(matrix: FqMatrix) -> bool:
    return matrix.is_hadamard()
