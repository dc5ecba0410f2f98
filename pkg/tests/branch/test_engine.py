import os
from types import SimpleNamespace

import msgspec
import pytest

from lib.fq_matrix import (
    FqMatrix,
    SingularMatrixError,
)
from lib.galois_field import FieldSpec

from branch import engine
from branch.cost import (
    cost_new,
    cost_new_involutory,
)
from branch.engine import (
    Algorithm,
    BranchReport,
    Classification,
    SearchOptions,
)


GF256 = FieldSpec.create(2, 8, 0x11D)
AES = FieldSpec.create(2, 8, 0x11B)
GF2 = FieldSpec.create(2, 1, 0b11)
GF4 = FieldSpec.create(2, 2, 0b111)
GF16 = FieldSpec.create(2, 4, 0b10011)

KHAZAD = FqMatrix.hadamard(GF256, [0x01, 0x03, 0x04, 0x05, 0x06, 0x08, 0x0B, 0x07])
ANUBIS = FqMatrix.hadamard(GF256, [0x01, 0x02, 0x04, 0x06])
MIX_COLUMNS = FqMatrix.circulant(AES, [0x02, 0x03, 0x01, 0x01])
# All entries and the determinant are non-zero
SMALL_MDS = FqMatrix.hadamard(GF16, [0x1, 0x2])
EXAMPLE2 = FqMatrix.from_rows(GF256, [
    [0x01, 0x02, 0x03, 0x04, 0x01, 0x02, 0x03, 0x07],
    [0x02, 0x01, 0x04, 0x03, 0x02, 0x01, 0x07, 0x03],
    [0x03, 0x04, 0x01, 0x02, 0x03, 0x07, 0x01, 0x02],
    [0x04, 0x03, 0x02, 0x01, 0x07, 0x03, 0x02, 0x01],
    [0x01, 0x02, 0x03, 0x07, 0x01, 0x02, 0x03, 0x04],
    [0x02, 0x01, 0x07, 0x03, 0x02, 0x01, 0x04, 0x03],
    [0x03, 0x07, 0x01, 0x02, 0x03, 0x04, 0x01, 0x02],
    [0x07, 0x03, 0x02, 0x01, 0x07, 0x03, 0x02, 0x01],
])


def options(**kwargs):
    defaults = {
        'use_filter': True,
        'use_budget': True,
        'use_fast_path': True,
        'shards': 1,
        'backend': 'scalar',
    }
    defaults.update(kwargs)
    return SearchOptions(**defaults)


@pytest.mark.parametrize('backend', ['scalar', 'vector'])
def test_engine_example2_stops_after_two_classes(backend):
    report = engine.branch_new(EXAMPLE2, options(backend=backend))
    assert report.branch_diff == 3
    assert report.algorithm == Algorithm.NEW_ALGORITHM
    assert report.scanned_weights == (1, 2)
    # All of S_1 and S_2: 8 + C(8, 2) * 255
    assert report.vectors_evaluated == 8 + 7140
    assert report.classification == Classification.OTHER
    assert report.backend == backend
    assert report.counters_deterministic


def test_engine_class_filter():
    # Three 2x2 MDS blocks: branch number 3, found in S_1
    block = [[1, 1], [1, 2]]
    matrix = FqMatrix.from_rows(GF4, [
        [block[i % 2][j % 2] if i // 2 == j // 2 else 0 for j in range(6)]
        for i in range(6)
    ])
    filtered = engine.branch_new(matrix, options())
    assert filtered.branch_diff == 3
    assert filtered.scanned_weights == (1, 2)

    unfiltered = engine.branch_new(matrix, options(use_filter=False))
    assert unfiltered.branch_diff == 3
    assert unfiltered.scanned_weights == (1, 2, 3)
    assert unfiltered.vectors_evaluated > filtered.vectors_evaluated


def test_engine_example2_sharded():
    report = engine.branch_new(EXAMPLE2, options(shards=4))
    assert report.branch_diff == 3
    assert not report.counters_deterministic

    report = engine.branch_new(EXAMPLE2, options(shards=3, backend='vector', block_size=500))
    assert report.branch_diff == 3


def test_engine_counter_agreement_mds():
    report = engine.branch_new(MIX_COLUMNS, options(use_budget=False))
    assert report.branch_diff == 5
    assert report.algorithm == Algorithm.NEW_ALGORITHM
    assert report.field_mults == cost_new(4, 256) == 12240
    assert report.field_mults_saved == 0

    report = engine.branch_new(MIX_COLUMNS, options(backend='vector'))
    assert report.field_mults == 12240


def test_engine_counter_agreement_involutory():
    report = engine.branch_new(ANUBIS, options(use_budget=False))
    assert report.branch_diff == 5
    assert report.algorithm == Algorithm.NEW_ALGORITHM_INVOLUTORY_PATH
    assert report.field_mults == cost_new_involutory(4, 256) == 6120

    report = engine.branch_new(ANUBIS, options(use_budget=False, use_fast_path=False))
    assert report.algorithm == Algorithm.NEW_ALGORITHM
    assert report.field_mults == 12240


def test_engine_budget_saves_work():
    plain = engine.branch_new(EXAMPLE2, options(use_budget=False))
    budgeted = engine.branch_new(EXAMPLE2, options())
    assert plain.branch_diff == budgeted.branch_diff == 3
    assert budgeted.field_mults < plain.field_mults
    assert budgeted.field_mults + budgeted.field_mults_saved == plain.field_mults


def test_engine_hadamard_fast_path():
    # Hadamard but not involutory: first-row sum 7
    matrix = FqMatrix.hadamard(GF256, [0x01, 0x02, 0x03, 0x07])
    assert not matrix.is_involutory()
    fast = engine.branch_new(matrix, options())
    slow = engine.branch_new(matrix, options(use_fast_path=False))
    assert fast.algorithm == Algorithm.NEW_ALGORITHM_INVOLUTORY_PATH
    assert slow.algorithm == Algorithm.NEW_ALGORITHM
    assert fast.branch_diff == slow.branch_diff


def test_engine_identity():
    report = engine.branch_new(FqMatrix.identity(GF2, 4), options())
    assert report.branch_diff == 2
    assert report.scanned_weights == (1,)
    assert report.classification == Classification.OTHER


def test_engine_singular_matrix():
    matrix = FqMatrix.from_rows(GF256, [[1, 1], [1, 1]])
    with pytest.raises(SingularMatrixError):
        engine.branch_new(matrix, options())
    # The definition itself needs no inverse: x = (1, 1) maps to zero
    assert engine.branch_exhaustive(matrix).branch_diff == 2


def test_engine_exhaustive_report():
    report = engine.branch_exhaustive(SMALL_MDS)
    assert report.branch_diff == 3
    assert report.algorithm == Algorithm.EXHAUSTIVE
    assert report.vectors_evaluated == 16 ** 2 - 1
    assert report.field_mults == 4 * (16 ** 2 - 1)
    assert report.classification == Classification.MDS


def test_engine_exhaustive_guard():
    with pytest.raises(engine.SearchTooLargeError):
        engine.branch_exhaustive(MIX_COLUMNS, limit=1000)
    with pytest.raises(engine.SearchTooLargeError):
        engine.min_distance_code(MIX_COLUMNS, limit=1000)


def test_engine_vector_tables_capped(monkeypatch):
    capped = options(backend='auto', vector_threshold=0, vector_max_order=1 << 16)
    assert capped.resolve_backend(3, 1 << 16) == 'vector'
    assert capped.resolve_backend(3, 1 << 32) == 'scalar'
    with pytest.raises(engine.SearchTooLargeError):
        options(backend='vector').resolve_backend(3, 1 << 32)
    assert options(backend='scalar').resolve_backend(3, 1 << 32) == 'scalar'

    monkeypatch.setattr(engine.config, 'vector_max_order', SimpleNamespace(value=8))
    with pytest.raises(engine.SearchTooLargeError):
        engine.branch_exhaustive(SMALL_MDS)
    with pytest.raises(engine.SearchTooLargeError):
        engine.min_distance_code(SMALL_MDS)


def test_engine_analyze_both():
    report = engine.analyze(MIX_COLUMNS, 'both', options=options())
    assert report.branch_diff == 5
    assert report.branch_lin == 5
    assert report.classification == Classification.MDS
    single = engine.branch_new(MIX_COLUMNS, options())
    assert report.vectors_evaluated == 2 * single.vectors_evaluated

    # Symmetric: the linear search is not repeated
    report = engine.analyze(ANUBIS, 'both', options=options())
    assert report.branch_lin == report.branch_diff == 5
    assert report.vectors_evaluated == engine.branch_new(ANUBIS, options()).vectors_evaluated

    report = engine.analyze(EXAMPLE2, 'both', options=options())
    assert report.branch_diff == 3
    assert report.classification == Classification.OTHER


def test_engine_analyze_single_modes():
    report = engine.analyze(MIX_COLUMNS, 'lin', options=options())
    assert report.branch_diff is None
    assert report.branch_lin == 5
    assert report.classification == Classification.MDS

    report = engine.analyze(SMALL_MDS, 'diff', Algorithm.EXHAUSTIVE)
    assert report.branch_diff == 3
    assert report.branch_lin is None

    with pytest.raises(ValueError):
        engine.analyze(MIX_COLUMNS, 'sideways', options=options())


def test_engine_classify():
    def report(diff, lin, n=4):
        return BranchReport(n=n, q=256, branch_diff=diff, branch_lin=lin,
                            algorithm=Algorithm.NEW_ALGORITHM)

    assert engine.classify(report(5, None)) == Classification.MDS
    assert engine.classify(report(5, 5)) == Classification.MDS
    assert engine.classify(report(4, 4)) == Classification.NEAR_MDS
    assert engine.classify(report(4, 3)) == Classification.OTHER
    assert engine.classify(report(3, 5)) == Classification.OTHER
    with pytest.raises(engine.MissingLinearError):
        engine.classify(report(4, None))
    with pytest.raises(engine.MissingBranchError):
        engine.classify(report(None, 4))


def test_engine_near_mds():
    # Both branch numbers are 3 = n; MDS is out of reach over GF(2)
    matrix = FqMatrix.from_rows(GF2, [[1, 1, 0], [0, 1, 1], [1, 1, 1]])
    report = engine.analyze(matrix, 'both', options=options())
    assert report.branch_diff == engine.branch_exhaustive(matrix).branch_diff
    assert report.branch_lin == engine.branch_exhaustive(matrix.transpose()).branch_diff
    assert report.branch_diff == report.branch_lin == 3
    assert report.classification == Classification.NEAR_MDS


def test_engine_report_is_immutable():
    report = engine.branch_new(ANUBIS, options())
    with pytest.raises(AttributeError):
        report.branch_diff = 1
    assert msgspec.structs.replace(report, branch_diff=1).branch_diff == 1


@pytest.mark.skipif(
    not os.environ.get('GFBRANCH_SLOW_TESTS'),
    reason='full S_4 scan over GF(2^8); set GFBRANCH_SLOW_TESTS=1',
)
@pytest.mark.parametrize('shards', [1, 8])
def test_engine_khazad(shards):
    report = engine.branch_new(KHAZAD, options(backend='vector', shards=shards))
    assert report.branch_diff == 9
    assert report.algorithm == Algorithm.NEW_ALGORITHM_INVOLUTORY_PATH
    assert report.classification == Classification.MDS
