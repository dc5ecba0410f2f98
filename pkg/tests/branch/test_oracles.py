import itertools
import random

from lib.fq_matrix import FqMatrix
from lib.galois_field import FieldSpec

from branch import engine
from branch.engine import (
    Algorithm,
    SearchOptions,
)


FIELDS = [
    FieldSpec.create(2, 1, 0b11),
    FieldSpec.create(3, 1, (0, 1)),
    FieldSpec.create(2, 2, 0b111),
    FieldSpec.create(5, 1, 5),
    FieldSpec.create(2, 3, 0b1011),
    FieldSpec.create(2, 4, 0b10011),
]
ORDERS = (2, 3, 4)
CORPUS_SIZE = 200


def corpus(size, seed=2024):
    rng = random.Random(seed)
    for gf, n in itertools.product(FIELDS, ORDERS):
        for _ in range(size):
            yield FqMatrix.random_nonsingular(gf, n, rng)


def hadamard_corpus(seed=7):
    rng = random.Random(seed)
    for gf in FIELDS:
        if not gf.char2 or gf.q == 2:
            continue
        for n in (2, 4):
            count = 0
            while count < 30:
                first_row = [rng.randrange(gf.q) for _ in range(n)]
                matrix = FqMatrix.hadamard(gf, first_row)
                if matrix.first_row_sum() == 0:
                    continue
                count += 1
                yield matrix


def options(**kwargs):
    return SearchOptions(**{'shards': 1, 'backend': 'scalar', **kwargs})


def minors_all_nonsingular(matrix):
    """MDS test by the classical criterion: every square submatrix is non-singular."""
    n = matrix.n
    for size in range(1, n + 1):
        for rows in itertools.combinations(range(n), size):
            for cols in itertools.combinations(range(n), size):
                sub = FqMatrix.from_rows(
                    matrix.field,
                    [[matrix.rows[r][c] for c in cols] for r in rows],
                )
                if not sub.is_nonsingular():
                    return False
    return True


def test_oracles_new_matches_exhaustive():
    for matrix in corpus(CORPUS_SIZE):
        new = engine.branch_new(matrix, options())
        exhaustive = engine.branch_exhaustive(matrix)
        assert new.branch_diff == exhaustive.branch_diff, matrix
        assert 2 <= new.branch_diff <= matrix.n + 1


def test_oracles_every_2x2_over_gf2_and_gf3():
    for gf, expected_count in ((FIELDS[0], 6), (FIELDS[1], 48)):
        count = 0
        for a, b, c, d in itertools.product(range(gf.q), repeat=4):
            matrix = FqMatrix.from_rows(gf, [[a, b], [c, d]])
            if not matrix.is_nonsingular():
                continue
            count += 1
            exhaustive = engine.branch_exhaustive(matrix).branch_diff
            assert engine.branch_new(matrix, options()).branch_diff == exhaustive, matrix
            assert engine.branch_new(matrix, options(backend='vector')).branch_diff == exhaustive
            assert engine.min_distance_code(matrix) == engine.branch_exhaustive(
                matrix.transpose()
            ).branch_diff
        assert count == expected_count


def test_oracles_code_distance_matches_transpose():
    for matrix in corpus(CORPUS_SIZE, seed=99):
        distance = engine.min_distance_code(matrix)
        assert distance == engine.branch_exhaustive(matrix.transpose()).branch_diff, matrix


def test_oracles_linear_matches_code_distance():
    for matrix in corpus(20, seed=5):
        report = engine.branch_linear(matrix, Algorithm.NEW_ALGORITHM, options())
        assert report.branch_lin == engine.min_distance_code(matrix)


def test_oracles_switches_do_not_change_results():
    variants = [
        options(use_filter=False),
        options(use_budget=False),
        options(use_fast_path=False),
        options(backend='vector', block_size=7),
        options(shards=3),
    ]
    for matrix in itertools.chain(corpus(25, seed=11), hadamard_corpus()):
        expected = engine.branch_new(matrix, options()).branch_diff
        for variant in variants:
            assert engine.branch_new(matrix, variant).branch_diff == expected, (matrix, variant)


def test_oracles_fast_path_matches_exhaustive():
    for matrix in hadamard_corpus(seed=3):
        report = engine.branch_new(matrix, options())
        assert report.algorithm == Algorithm.NEW_ALGORITHM_INVOLUTORY_PATH
        assert report.branch_diff == engine.branch_exhaustive(matrix).branch_diff


def test_oracles_mds_agrees_with_minors():
    for matrix in corpus(15, seed=31):
        report = engine.branch_new(matrix, options())
        assert (report.branch_diff == matrix.n + 1) == minors_all_nonsingular(matrix)


def test_oracles_scale_invariance():
    rng = random.Random(8)
    for matrix in corpus(10, seed=17):
        gf = matrix.field
        scalar = rng.randrange(1, gf.q)
        scaled = matrix.scale(scalar)
        expected = engine.branch_new(matrix, options()).branch_diff
        assert engine.branch_new(scaled, options()).branch_diff == expected


def test_oracles_counters_deterministic():
    for matrix in corpus(5, seed=41):
        first = engine.branch_new(matrix, options())
        second = engine.branch_new(matrix, options())
        assert first.counters_deterministic
        assert first.vectors_evaluated == second.vectors_evaluated
        assert first.field_mults == second.field_mults
        assert first.field_mults_saved == second.field_mults_saved
        assert first.scanned_weights == second.scanned_weights


def test_oracles_led_code_distance():
    # LED's serial matrix A over GF(16) mod x^4 + x + 1; A^4 is MDS
    gf = FieldSpec.create(2, 4, 0b10011)
    serial = FqMatrix.from_rows(gf, [
        [0, 1, 0, 0],
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [4, 1, 2, 2],
    ])
    mds = serial @ serial @ serial @ serial
    assert engine.min_distance_code(mds) == 5
    assert engine.branch_new(mds, options()).branch_diff == 5
    assert minors_all_nonsingular(mds)


def test_oracles_verify():
    for matrix in corpus(3, seed=51):
        report = engine.analyze(matrix, 'both', options=options())
        engine.verify(matrix, report, options())

        exhaustive = engine.analyze(matrix, 'both', Algorithm.EXHAUSTIVE)
        engine.verify(matrix, exhaustive, options())
