import argparse
import pathlib
import sys
from typing import Any

from direct.directnotify.DirectNotifyGlobal import directNotify

from lib.fq_matrix import (
    FqMatrix,
    MatrixError,
    SingularMatrixError,
)
from lib.galois_field import FieldSpec

from branch import config
from branch.cost import (
    CostDomainError,
    estimate,
    reference_table,
)
from branch.engine import (
    Algorithm,
    BranchReport,
    SearchOptions,
    SearchTooLargeError,
    VerificationMismatchError,
    analyze,
    verify,
)
from branch.matrix_file import (
    ParseError,
    format_matrix_text,
    matrix_files,
    parse_matrix_file,
)
from branch.report import (
    MsgspecReportSerializer,
    branch_text,
    cost_table_text,
    cost_text,
)


notify = directNotify.newCategory('BranchCli')

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_PARSE = 2
EXIT_SINGULAR = 3
EXIT_MISMATCH = 4
EXIT_TOO_LARGE = 5

ALGORITHMS = {
    'new': Algorithm.NEW_ALGORITHM,
    'exhaustive': Algorithm.EXHAUSTIVE,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='gfbranch',
        description='Differential and linear branch numbers of matrices over GF(p^m)',
    )
    parser.add_argument('matrix', nargs='?', help='matrix file to analyze')
    parser.add_argument('--mode', choices=('diff', 'lin', 'both'), default='both')
    parser.add_argument('--algo', choices=('new', 'exhaustive', 'auto'), default='auto')
    parser.add_argument(
        '--verify',
        action='store_true',
        help='cross-check against the exhaustive and code-distance oracles',
    )
    parser.add_argument('--json', action='store_true', help='print a JSON report')
    parser.add_argument(
        '--batch',
        metavar='DIR',
        help='analyze every matrix file in DIR, one JSON line each',
    )
    parser.add_argument(
        '--cost',
        nargs=2,
        type=int,
        metavar=('N', 'Q'),
        help='print the multiplication counts for order N over GF(Q)',
    )
    parser.add_argument(
        '--cost-table',
        action='store_true',
        help='print the published cost comparison next to the computed one',
    )
    parser.add_argument('--threads', type=int, help='shards searched concurrently')
    parser.add_argument('--backend', choices=('scalar', 'vector', 'auto'))
    parser.add_argument('--no-filter', action='store_true', help='scan every weight class')
    parser.add_argument('--no-budget', action='store_true', help='count every output row')
    parser.add_argument(
        '--no-fast-path',
        action='store_true',
        help='evaluate M^-1 even for involutory and Hadamard matrices',
    )
    parser.add_argument('--verbose', action='store_true', help='log search progress')
    return parser


def search_options(args: argparse.Namespace) -> SearchOptions:
    options = SearchOptions(
        use_filter=not args.no_filter,
        use_budget=not args.no_budget,
        use_fast_path=not args.no_fast_path,
    )
    if args.threads is not None:
        options.shards = max(1, args.threads)
    if args.backend is not None:
        options.backend = args.backend
    return options


def choose_algorithm(args: argparse.Namespace, matrix: FqMatrix) -> Algorithm:
    if args.algo != 'auto':
        return ALGORITHMS[args.algo]
    small = matrix.field.q ** matrix.n <= config.exhaustive_limit.value
    if args.verify and small:
        return Algorithm.EXHAUSTIVE
    return Algorithm.NEW_ALGORITHM


def exit_code_for(exc: Exception) -> int:
    match exc:
        case SingularMatrixError():
            return EXIT_SINGULAR
        case VerificationMismatchError():
            return EXIT_MISMATCH
        case SearchTooLargeError() | MemoryError():
            return EXIT_TOO_LARGE
        case ParseError() | MatrixError() | OSError():
            return EXIT_PARSE
        case _:
            raise exc


def batch_exit_code(exc: Exception) -> int:
    """Like exit_code_for, but unexpected failures become EXIT_FAILURE instead of raising."""
    try:
        return exit_code_for(exc)
    except Exception:  # pylint: disable=broad-exception-caught
        return EXIT_FAILURE


def analyze_file(
    path: pathlib.Path,
    args: argparse.Namespace,
) -> tuple[FieldSpec, BranchReport]:
    field_spec, matrix = parse_matrix_file(path)
    if notify.getDebug():
        notify.debug(f'Parsed {path}:\n{format_matrix_text(field_spec, matrix)}')
    if not matrix.is_nonsingular():
        raise SingularMatrixError(f'{path}: matrix is singular over GF({field_spec.q})')
    options = search_options(args)
    report = analyze(matrix, args.mode, choose_algorithm(args, matrix), options)
    if args.verify:
        verify(matrix, report, options)
    return field_spec, report


def _print_error(exc: Exception) -> None:
    print(f'error: {exc}', file=sys.stderr)


def run_batch(args: argparse.Namespace, serializer: MsgspecReportSerializer) -> int:
    try:
        paths = matrix_files(args.batch)
    except OSError as exc:
        _print_error(exc)
        return EXIT_PARSE

    status = EXIT_OK
    for path in paths:
        line: dict[str, Any] = {'file': str(path)}
        try:
            _, report = analyze_file(path, args)
        except Exception as exc:  # pylint: disable=broad-exception-caught
            code = batch_exit_code(exc)
            notify.warning(f'{path}: {exc}')
            line['error'] = {
                'type': type(exc).__name__,
                'message': str(exc),
                'exit_code': code,
            }
            status = status or code
        else:
            line.update(serializer.to_builtins(report))
        print(serializer.encode_object(line).decode())
    return status


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        config.set_verbose(True)
    serializer = MsgspecReportSerializer()

    if args.cost_table:
        print(cost_table_text(reference_table()))
        return EXIT_OK

    if args.cost:
        try:
            cost = estimate(*args.cost)
        except CostDomainError as exc:
            _print_error(exc)
            return EXIT_PARSE
        print(serializer.serialize(cost).decode() if args.json else cost_text(cost))
        return EXIT_OK

    if args.batch:
        return run_batch(args, serializer)

    if not args.matrix:
        parser.print_usage(sys.stderr)
        _print_error(ValueError('a matrix file, --batch, --cost or --cost-table is required'))
        return EXIT_PARSE

    path = pathlib.Path(args.matrix)
    try:
        field_spec, report = analyze_file(path, args)
    except Exception as exc:  # pylint: disable=broad-exception-caught
        code = exit_code_for(exc)
        _print_error(exc)
        return code

    if args.json:
        print(serializer.serialize(report).decode())
    else:
        print(branch_text(report, field_spec, str(path)))
    return EXIT_OK


def main() -> None:
    config.load()
    sys.exit(run())
