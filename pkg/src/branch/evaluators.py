"""Weight evaluators for the representative search.

An evaluator scans an index range of S_k and offers w + k to the shared bound, where
w is the smallest output weight over the matrices it was built with (M, and M^{-1}
unless a fast path applies). Two implementations are provided: a scalar one walking
representatives one at a time with budgeted row counting, and a numpy one evaluating
whole blocks of representatives that share a support.
"""
from dataclasses import (
    dataclass,
    field,
)
import threading
from typing import (
    Protocol,
)

from direct.directnotify.DirectNotifyGlobal import directNotify
import numpy as np

from lib.fq_matrix import (
    FqMatrix,
    sparse_weight_bounded,
)
from lib.galois_field import FieldSpec
from lib.representatives import (
    rep_blocks,
    rep_range,
)


notify = directNotify.newCategory('BranchEngine')

GLOBAL_FLOOR = 2


@dataclass(kw_only=True)
class SearchBound:
    """Current best bound B and class limit r, shared between shards.

    Both only ever decrease, so a stale read costs extra work and never a wrong answer.
    """
    value: int
    limit: int
    use_filter: bool = True
    _lock: threading.Lock = field(init=False, default_factory=threading.Lock)

    def active(self, k: int) -> bool:
        return self.value > GLOBAL_FLOOR and k <= self.limit

    def offer(self, candidate: int) -> None:
        if candidate >= self.value:
            return
        with self._lock:
            if candidate >= self.value:
                return
            self.value = candidate
            if self.use_filter and self.value <= self.limit:
                self.limit = self.value - 1
            notify.debug(f'Bound tightened to {self.value} (class limit {self.limit})')


@dataclass(kw_only=True)
class SearchCounters:
    vectors_evaluated: int = 0
    field_mults: int = 0
    field_mults_saved: int = 0
    _lock: threading.Lock = field(init=False, default_factory=threading.Lock)

    def add(self, vectors: int, mults: int, saved: int) -> None:
        with self._lock:
            self.vectors_evaluated += vectors
            self.field_mults += mults
            self.field_mults_saved += saved


class WeightEvaluator(Protocol):
    name: str

    def scan(
        self,
        k: int,
        start: int,
        stop: int,
        bound: SearchBound,
        counters: SearchCounters,
    ) -> None: ...


@dataclass(kw_only=True)
class ScalarEvaluator(WeightEvaluator):
    name: str = field(init=False, default='scalar')
    field_spec: FieldSpec
    matrices: list[FqMatrix]
    use_budget: bool = True

    def scan(
        self,
        k: int,
        start: int,
        stop: int,
        bound: SearchBound,
        counters: SearchCounters,
    ) -> None:
        n = self.matrices[0].n
        product_mults = n * (k - 1)
        row_sets = [matrix.rows for matrix in self.matrices]
        vectors = 0
        mults = 0
        saved = 0
        for rep in rep_range(self.field_spec, n, k, start, stop):
            if not bound.active(k):
                break
            vectors += 1
            # Only an output weight <= B-k-1 can lower the bound
            budget = bound.value - k - 1 if self.use_budget else n
            best = None
            for rows in row_sets:
                if budget < 0:
                    saved += product_mults
                    continue
                weight, evaluated = sparse_weight_bounded(
                    self.field_spec, rows, rep.support, rep.values, budget
                )
                mults += evaluated * (k - 1)
                saved += (n - evaluated) * (k - 1)
                if weight is not None and (best is None or weight < best):
                    best = weight
                    if self.use_budget:
                        budget = weight - 1
            if best is not None:
                bound.offer(best + k)
        counters.add(vectors, mults, saved)


@dataclass(kw_only=True)
class VectorEvaluator(WeightEvaluator):
    name: str = field(init=False, default='vector')
    field_spec: FieldSpec
    matrices: list[FqMatrix]
    block_size: int = 1 << 16
    _tables: list[np.ndarray] = field(init=False, default_factory=list)

    def __post_init__(self) -> None:
        # tables[c][v] is column c of the matrix scaled by v
        for matrix in self.matrices:
            self._tables.append(np.stack([
                self.field_spec.scale_table(column) for column in matrix.columns
            ]))

    def _weights(
        self,
        tables: np.ndarray,
        support: tuple[int, ...],
        values: np.ndarray,
    ) -> np.ndarray:
        acc = tables[support[0], 1]
        for pos in range(1, len(support)):
            acc = self.field_spec.add_arrays(acc, tables[support[pos]][values[:, pos]])
        acc = np.broadcast_to(acc, (len(values), acc.shape[-1]))
        return np.count_nonzero(acc, axis=1)

    def scan(
        self,
        k: int,
        start: int,
        stop: int,
        bound: SearchBound,
        counters: SearchCounters,
    ) -> None:
        n = self.matrices[0].n
        q = self.field_spec.q
        vectors = 0
        for block in rep_blocks(n, k, q, start, stop, self.block_size):
            if not bound.active(k):
                break
            values = block.value_array(q)
            best = min(
                int(self._weights(tables, block.support, values).min())
                for tables in self._tables
            )
            vectors += len(block)
            bound.offer(best + k)
        mults = vectors * n * (k - 1) * len(self._tables)
        counters.add(vectors, mults, 0)


def make_evaluator(
    backend: str,
    field_spec: FieldSpec,
    matrices: list[FqMatrix],
    *,
    use_budget: bool,
    block_size: int,
) -> WeightEvaluator:
    match backend:
        case 'scalar':
            return ScalarEvaluator(field_spec=field_spec, matrices=matrices, use_budget=use_budget)
        case 'vector':
            return VectorEvaluator(field_spec=field_spec, matrices=matrices, block_size=block_size)
        case _:
            raise RuntimeError(f'Unsupported search backend: {backend}')
