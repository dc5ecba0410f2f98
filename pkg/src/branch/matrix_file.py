"""Plain-text matrix files.

    # Example: the AES MixColumns matrix
    field 2 8 0x11B
    n 4
    02_x 03_x 01_x 01_x
    ...

Directives come before the rows: `field p m poly` (poly as an integer, `0x` or `_x`
notation allowed), `n N`, and optionally `format hex|dec` selecting how bare entry
tokens are read. `03_x` and `0x03` entries are hex regardless. `#` starts a comment.
"""
from dataclasses import (
    dataclass,
    field,
)
import pathlib

from lib.fq_matrix import FqMatrix
from lib.galois_field import (
    ElementError,
    FieldError,
    FieldSpec,
    ReducibleError,
    parse_hex,
)


class ParseError(ValueError):
    def __init__(self, message: str, path: str, line: int, column: int = 0) -> None:
        location = f'{path}:{line}:{column}' if column else f'{path}:{line}'
        super().__init__(f'{location}: {message}')
        self.path = path
        self.line = line
        self.column = column


class EntryOutOfFieldError(ParseError):
    pass


class ReduciblePolynomialError(ParseError):
    pass


MATRIX_SUFFIXES = ('.mat', '.txt')


def parse_int_token(token: str, bare_hex: bool = False) -> int:
    lowered = token.lower()
    if bare_hex or lowered.endswith('_x') or lowered.startswith('0x'):
        return parse_hex(token)
    return int(token, 10)


@dataclass
class _Token:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[list[_Token]]:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = raw.split('#', 1)[0]
        tokens = []
        column = 0
        for word in content.split():
            column = content.index(word, column)
            tokens.append(_Token(word, lineno, column + 1))
            column += len(word)
        if tokens:
            lines.append(tokens)
    return lines


@dataclass
class _MatrixFileParser:
    source: str
    field_spec: FieldSpec | None = None
    order: int | None = None
    bare_hex: bool = False
    rows: list[tuple[int, ...]] = field(default_factory=list)

    def error(self, message: str, token: _Token) -> ParseError:
        return ParseError(message, self.source, token.line, token.column)

    def _int(self, token: _Token, bare_hex: bool = False) -> int:
        try:
            return parse_int_token(token.text, bare_hex)
        except ValueError:
            raise self.error(f'Expected an integer, found {token.text!r}', token) from None

    def directive(self, tokens: list[_Token]) -> None:
        head = tokens[0]
        if self.rows:
            raise self.error(f'Directive {head.text!r} after matrix rows', head)
        args = tokens[1:]
        match head.text:
            case 'field':
                self._field(head, args)
            case 'n':
                if len(args) != 1:
                    raise self.error('Expected `n N`', head)
                order = self._int(args[0])
                if order < 1:
                    raise self.error(f'Matrix order must be positive: {order}', args[0])
                self.order = order
            case 'format':
                if len(args) != 1 or args[0].text not in ('hex', 'dec'):
                    raise self.error('Expected `format hex` or `format dec`', head)
                self.bare_hex = args[0].text == 'hex'

    def _field(self, head: _Token, args: list[_Token]) -> None:
        if len(args) != 3:
            raise self.error('Expected `field p m poly`', head)
        p, m = self._int(args[0]), self._int(args[1])
        poly = self._int(args[2])
        try:
            self.field_spec = FieldSpec.create(p, m, poly)
        except ReducibleError as exc:
            raise ReduciblePolynomialError(
                str(exc), self.source, args[2].line, args[2].column
            ) from exc
        except FieldError as exc:
            raise self.error(str(exc), head) from exc

    def row(self, tokens: list[_Token]) -> None:
        first = tokens[0]
        if self.field_spec is None:
            raise self.error('Matrix row before the `field` directive', first)
        if self.order is None:
            raise self.error('Matrix row before the `n` directive', first)
        if len(self.rows) == self.order:
            raise self.error(f'More than {self.order} rows', first)
        if len(tokens) != self.order:
            raise self.error(f'Expected {self.order} entries, found {len(tokens)}', first)
        entries = []
        for token in tokens:
            value = self._int(token, self.bare_hex)
            try:
                entries.append(self.field_spec.check(value))
            except ElementError as exc:
                raise EntryOutOfFieldError(
                    f'Entry {token.text}: {exc}',
                    self.source,
                    token.line,
                    token.column,
                ) from exc
        self.rows.append(tuple(entries))

    def finish(self, last_line: int) -> tuple[FieldSpec, FqMatrix]:
        if self.field_spec is None:
            raise ParseError('Missing `field` directive', self.source, last_line)
        if self.order is None:
            raise ParseError('Missing `n` directive', self.source, last_line)
        if len(self.rows) != self.order:
            raise ParseError(
                f'Expected {self.order} rows, found {len(self.rows)}',
                self.source,
                last_line,
            )
        return self.field_spec, FqMatrix.from_rows(self.field_spec, self.rows)


def parse_matrix_text(text: str, source: str = '<string>') -> tuple[FieldSpec, FqMatrix]:
    parser = _MatrixFileParser(source)
    lines = _tokenize(text)
    for tokens in lines:
        if tokens[0].text in ('field', 'n', 'format'):
            parser.directive(tokens)
        else:
            parser.row(tokens)
    last_line = lines[-1][0].line if lines else 0
    return parser.finish(last_line)


def parse_matrix_file(path: str | pathlib.Path) -> tuple[FieldSpec, FqMatrix]:
    path = pathlib.Path(path)
    data = path.read_bytes()
    try:
        text = data.decode('utf-8')
    except UnicodeDecodeError as exc:
        line_start = data.rfind(b'\n', 0, exc.start) + 1
        raise ParseError(
            f'Invalid UTF-8 byte {data[exc.start]:#04x}',
            str(path),
            data.count(b'\n', 0, exc.start) + 1,
            exc.start - line_start + 1,
        ) from exc
    return parse_matrix_text(text, str(path))


def format_matrix_text(field_spec: FieldSpec, matrix: FqMatrix) -> str:
    """Inverse of parse_matrix_text, entries in `03_x` notation."""
    lines = [
        f'field {field_spec.p} {field_spec.m} {field_spec.poly_int:#x}',
        f'n {matrix.n}',
    ]
    lines.extend(
        ' '.join(field_spec.format_element(entry) for entry in row)
        for row in matrix.rows
    )
    return '\n'.join(lines) + '\n'


def matrix_files(directory: str | pathlib.Path) -> list[pathlib.Path]:
    """Matrix files directly inside directory, sorted by name."""
    return sorted(
        path for path in pathlib.Path(directory).iterdir()
        if path.is_file() and path.suffix in MATRIX_SUFFIXES
    )
