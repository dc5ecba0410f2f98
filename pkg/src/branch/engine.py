"""Branch numbers of matrices over GF(q).

The differential branch number of M is min over x != 0 of w_h(x) + w_h(Mx); the linear
one is the same quantity for M^T. `branch_new` searches only the class representatives
S_k for k <= (n+1)/2, evaluating both M and M^{-1}: any x with w_h(x) + w_h(Mx) minimal
has either w_h(x) or w_h(Mx) at most (n+1)/2, and y = Mx turns the second case into
the first for M^{-1}.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import (
    dataclass,
    field,
)
from enum import Enum
import time
from typing import (
    Iterator,
)

from direct.directnotify.DirectNotifyGlobal import directNotify
import msgspec
from msgspec import structs
import numpy as np

from lib.fq_matrix import FqMatrix
from lib.galois_field import FieldSpec
from lib.representatives import (
    rep_count,
    shard_bounds,
)

from branch import config
from branch.evaluators import (
    SearchBound,
    SearchCounters,
    make_evaluator,
)


notify = directNotify.newCategory('BranchEngine')


class SearchTooLargeError(RuntimeError):
    pass


class MissingBranchError(ValueError):
    pass


class MissingLinearError(MissingBranchError):
    pass


class Algorithm(Enum):
    NEW_ALGORITHM = 'NewAlgorithm'
    NEW_ALGORITHM_INVOLUTORY_PATH = 'NewAlgorithmInvolutoryPath'
    EXHAUSTIVE = 'Exhaustive'


class Classification(Enum):
    MDS = 'MDS'
    NEAR_MDS = 'NearMDS'
    OTHER = 'Other'


class BranchReport(msgspec.Struct, kw_only=True, frozen=True):
    n: int
    q: int
    branch_diff: int | None = None
    branch_lin: int | None = None
    classification: Classification | None = None
    algorithm: Algorithm
    vectors_evaluated: int = 0
    field_mults: int = 0
    field_mults_saved: int = 0
    elapsed: float = 0.0
    scanned_weights: tuple[int, ...] = ()
    backend: str = ''
    counters_deterministic: bool = True


@dataclass(kw_only=True)
class SearchOptions:
    use_filter: bool = field(default_factory=lambda: config.class_filter.value)
    use_budget: bool = field(default_factory=lambda: config.budget_weights.value)
    use_fast_path: bool = field(default_factory=lambda: config.involutory_fast_path.value)
    shards: int = field(default_factory=lambda: config.search_threads.value)
    backend: str = field(default_factory=lambda: config.search_backend.value)
    block_size: int = field(default_factory=lambda: config.vector_block_size.value)
    vector_threshold: int = field(default_factory=lambda: config.vector_threshold.value)
    vector_max_order: int = field(default_factory=lambda: config.vector_max_order.value)

    def resolve_backend(self, n: int, q: int) -> str:
        if self.backend == 'vector' and q > self.vector_max_order:
            raise SearchTooLargeError(
                f'Vector backend needs q x n tables; GF({q}) exceeds vector-max-order '
                f'({self.vector_max_order})'
            )
        if self.backend != 'auto':
            return self.backend
        if q > self.vector_max_order:
            return 'scalar'
        if rep_count(n, (n + 1) // 2, q) > self.vector_threshold:
            return 'vector'
        return 'scalar'


def classify(report: BranchReport) -> Classification:
    if report.branch_diff is None:
        raise MissingBranchError('Classification needs the differential branch number')
    n = report.n
    if report.branch_diff == n + 1:
        return Classification.MDS
    if report.branch_diff == n:
        if report.branch_lin is None:
            raise MissingLinearError(
                'Near-MDS classification needs the linear branch number as well'
            )
        if report.branch_lin == n:
            return Classification.NEAR_MDS
    return Classification.OTHER


def _classify_known(report: BranchReport) -> Classification | None:
    try:
        return classify(report)
    except MissingBranchError:
        return None


def _classify_linear_only(branch_lin: int | None, n: int) -> Classification | None:
    # MDS is decided by either number alone; Near-MDS needs both
    if branch_lin is None or branch_lin == n:
        return None
    return Classification.MDS if branch_lin == n + 1 else Classification.OTHER


def _fast_path_applies(matrix: FqMatrix) -> bool:
    if matrix.is_involutory():
        return True
    return matrix.is_hadamard() and matrix.first_row_sum() != 0


def branch_new(matrix: FqMatrix, options: SearchOptions | None = None) -> BranchReport:
    """Differential branch number by the representative search."""
    options = options or SearchOptions()
    started = time.perf_counter()
    field_spec = matrix.field
    n = matrix.n
    q = field_spec.q

    if options.use_fast_path and _fast_path_applies(matrix):
        # w_h(M^{-1}x) = w_h(Mx) when M^{-1} is a non-zero multiple of M
        matrices = [matrix]
        algorithm = Algorithm.NEW_ALGORITHM_INVOLUTORY_PATH
    else:
        matrices = [matrix, matrix.inverse()]
        algorithm = Algorithm.NEW_ALGORITHM

    backend = options.resolve_backend(n, q)
    evaluator = make_evaluator(
        backend,
        field_spec,
        matrices,
        use_budget=options.use_budget,
        block_size=options.block_size,
    )
    bound = SearchBound(value=n + 1, limit=(n + 1) // 2, use_filter=options.use_filter)
    counters = SearchCounters()
    scanned: list[int] = []
    notify.info(
        f'Searching n={n} over GF({q}) with {algorithm.value} '
        f'({backend} backend, {options.shards} shard(s))'
    )

    pool = ThreadPoolExecutor(max_workers=options.shards) if options.shards > 1 else None
    try:
        k = 1
        while bound.active(k):
            total = rep_count(n, k, q)
            scanned.append(k)
            notify.info(f'Scanning S_{k}: {total} representatives, bound {bound.value}')
            if pool is None:
                evaluator.scan(k, 0, total, bound, counters)
            else:
                futures = [
                    pool.submit(evaluator.scan, k, start, stop, bound, counters)
                    for start, stop in shard_bounds(total, options.shards)
                ]
                for future in futures:
                    future.result()
            k += 1
    finally:
        if pool is not None:
            pool.shutdown()

    report = BranchReport(
        n=n,
        q=q,
        branch_diff=bound.value,
        algorithm=algorithm,
        vectors_evaluated=counters.vectors_evaluated,
        field_mults=counters.field_mults,
        field_mults_saved=counters.field_mults_saved,
        elapsed=time.perf_counter() - started,
        scanned_weights=tuple(scanned),
        backend=backend,
        counters_deterministic=options.shards == 1,
    )
    report = structs.replace(report, classification=_classify_known(report))
    notify.info(
        f'Branch number {bound.value} after {counters.vectors_evaluated} representatives '
        f'and {counters.field_mults} multiplications'
    )
    return report


def _check_feasible(q: int, n: int, limit: int | None) -> int:
    limit = config.exhaustive_limit.value if limit is None else limit
    space = q ** n
    if space > limit:
        raise SearchTooLargeError(
            f'Exhaustive search over {q}^{n} vectors exceeds the limit of {limit}'
        )
    if q > config.vector_max_order.value:
        raise SearchTooLargeError(
            f'Exhaustive search over GF({q}) exceeds vector-max-order '
            f'({config.vector_max_order.value})'
        )
    return space


def _index_blocks(space: int, block_size: int) -> Iterator[np.ndarray]:
    for start in range(1, space, block_size):
        yield np.arange(start, min(space, start + block_size), dtype=np.int64)


def _min_combination_weight(
    field_spec: FieldSpec,
    generators: list[tuple[int, ...]],
    block_size: int,
) -> int:
    """min over non-zero coefficient vectors c of w_h(c) + w_h(sum_i c_i * generators[i])."""
    n = len(generators)
    q = field_spec.q
    tables = [field_spec.scale_table(generator) for generator in generators]
    best = None
    for index in _index_blocks(q ** n, block_size):
        coeffs = np.empty((len(index), n), dtype=np.int64)
        rest = index
        for pos in range(n - 1, -1, -1):
            rest, coeffs[:, pos] = np.divmod(rest, q)
        acc = tables[0][coeffs[:, 0]]
        for pos in range(1, n):
            acc = field_spec.add_arrays(acc, tables[pos][coeffs[:, pos]])
        weights = np.count_nonzero(coeffs, axis=1) + np.count_nonzero(acc, axis=1)
        block_best = int(weights.min())
        if best is None or block_best < best:
            best = block_best
    assert best is not None
    return best


def branch_exhaustive(
    matrix: FqMatrix,
    limit: int | None = None,
    block_size: int | None = None,
) -> BranchReport:
    """Definition-based minimum over every non-zero input; singular matrices are allowed."""
    started = time.perf_counter()
    n = matrix.n
    q = matrix.field.q
    space = _check_feasible(q, n, limit)
    block_size = block_size or config.vector_block_size.value
    # Mx is the combination of the columns of M with coefficients x
    best = _min_combination_weight(matrix.field, list(matrix.columns), block_size)
    report = BranchReport(
        n=n,
        q=q,
        branch_diff=best,
        algorithm=Algorithm.EXHAUSTIVE,
        vectors_evaluated=space - 1,
        field_mults=n * n * (space - 1),
        elapsed=time.perf_counter() - started,
        backend='vector',
    )
    return structs.replace(report, classification=_classify_known(report))


def min_distance_code(
    matrix: FqMatrix,
    limit: int | None = None,
    block_size: int | None = None,
) -> int:
    """Minimum distance of the code generated by [I | M], messages as row vectors.

    A codeword is x·[I | M] = (x | xM), so this equals the differential branch number
    of M^T.
    """
    n = matrix.n
    _check_feasible(matrix.field.q, n, limit)
    block_size = block_size or config.vector_block_size.value
    generator_rows = [
        tuple(int(i == j) for j in range(n)) + row
        for i, row in enumerate(matrix.rows)
    ]
    return _min_codeword_weight(matrix.field, generator_rows, block_size)


def _min_codeword_weight(
    field_spec: FieldSpec,
    generator_rows: list[tuple[int, ...]],
    block_size: int,
) -> int:
    n = len(generator_rows)
    q = field_spec.q
    tables = [field_spec.scale_table(row) for row in generator_rows]
    best = None
    for index in _index_blocks(q ** n, block_size):
        rest = index
        codewords = None
        for pos in range(n - 1, -1, -1):
            rest, digit = np.divmod(rest, q)
            term = tables[pos][digit]
            codewords = term if codewords is None else field_spec.add_arrays(codewords, term)
        assert codewords is not None
        block_best = int(np.count_nonzero(codewords, axis=1).min())
        if best is None or block_best < best:
            best = block_best
    assert best is not None
    return best


def branch_linear(
    matrix: FqMatrix,
    algo: Algorithm = Algorithm.NEW_ALGORITHM,
    options: SearchOptions | None = None,
    limit: int | None = None,
) -> BranchReport:
    """Linear branch number: the differential search run on M^T."""
    transposed = matrix.transpose()
    if algo == Algorithm.EXHAUSTIVE:
        report = branch_exhaustive(transposed, limit=limit)
    else:
        report = branch_new(transposed, options)
    return structs.replace(
        report,
        branch_diff=None,
        branch_lin=report.branch_diff,
        classification=_classify_linear_only(report.branch_diff, matrix.n),
    )


def analyze(
    matrix: FqMatrix,
    mode: str = 'both',
    algo: Algorithm = Algorithm.NEW_ALGORITHM,
    options: SearchOptions | None = None,
    limit: int | None = None,
) -> BranchReport:
    """Differential and/or linear branch numbers in one report, classified when decidable."""
    if mode not in ('diff', 'lin', 'both'):
        raise ValueError(f'Unknown branch mode: {mode}')
    if mode == 'lin':
        return branch_linear(matrix, algo, options, limit)

    if algo == Algorithm.EXHAUSTIVE:
        diff = branch_exhaustive(matrix, limit=limit)
    else:
        diff = branch_new(matrix, options)
    if mode == 'diff':
        return diff

    if matrix.is_symmetric():
        # M^T = M: the linear search would repeat the differential one
        combined = structs.replace(diff, branch_lin=diff.branch_diff)
    else:
        lin = branch_linear(matrix, algo, options, limit)
        combined = structs.replace(
            diff,
            branch_lin=lin.branch_lin,
            vectors_evaluated=diff.vectors_evaluated + lin.vectors_evaluated,
            field_mults=diff.field_mults + lin.field_mults,
            field_mults_saved=diff.field_mults_saved + lin.field_mults_saved,
            elapsed=diff.elapsed + lin.elapsed,
            counters_deterministic=(
                diff.counters_deterministic and lin.counters_deterministic
            ),
        )
    return structs.replace(combined, classification=classify(combined))


class VerificationMismatchError(RuntimeError):
    pass


def verify(
    matrix: FqMatrix,
    report: BranchReport,
    options: SearchOptions | None = None,
    limit: int | None = None,
) -> None:
    """Recompute the report's branch numbers with the other engine and the code oracle."""
    if report.algorithm == Algorithm.EXHAUSTIVE:
        reference_algo = Algorithm.NEW_ALGORITHM
    else:
        reference_algo = Algorithm.EXHAUSTIVE
    mismatches = []
    if report.branch_diff is not None:
        if reference_algo == Algorithm.EXHAUSTIVE:
            expected = branch_exhaustive(matrix, limit=limit).branch_diff
        else:
            expected = branch_new(matrix, options).branch_diff
        if expected != report.branch_diff:
            mismatches.append(f'differential {report.branch_diff} != {expected}')
    if report.branch_lin is not None:
        expected = branch_linear(matrix, reference_algo, options, limit).branch_lin
        if expected != report.branch_lin:
            mismatches.append(f'linear {report.branch_lin} != {expected}')
        distance = min_distance_code(matrix, limit=limit)
        if distance != report.branch_lin:
            mismatches.append(f'linear {report.branch_lin} != code distance {distance}')
    if mismatches:
        notify.warning(f'Verification failed: {"; ".join(mismatches)}')
        raise VerificationMismatchError('Verification failed: ' + '; '.join(mismatches))
    notify.info(f'Verified against {reference_algo.value} and the code oracle')
