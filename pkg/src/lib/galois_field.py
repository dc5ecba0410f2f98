"""Exact arithmetic in GF(p^m).

Elements are plain ints: the base-p digit i of an element is its coefficient of x^i
in the polynomial basis (for p = 2 this is the usual bit packing, so 0x1D is
x^4+x^3+x^2+1). Defining polynomials use the same encoding including the leading term.
"""
from dataclasses import (
    dataclass,
    field,
    InitVar,
)
from functools import cached_property
from itertools import product
import re
from typing import (
    Iterable,
    Protocol,
    Sequence,
    TypeAlias,
)

from direct.directnotify.DirectNotifyGlobal import directNotify
import numpy as np


notify = directNotify.newCategory('GaloisField')

FieldElement: TypeAlias = int
Poly: TypeAlias = list[int]

MAX_ORDER = 1 << 32
LOG_TABLE_MAX_DEGREE = 16


class FieldError(ValueError):
    pass


class NotPrimeError(FieldError):
    pass


class ReducibleError(FieldError):
    pass


class DegreeMismatchError(FieldError):
    pass


class ElementError(FieldError):
    pass


class InverseOfZeroError(FieldError, ZeroDivisionError):
    pass


def is_prime(value: int) -> bool:
    if value < 2:
        return False
    if value % 2 == 0:
        return value == 2
    divisor = 3
    while divisor * divisor <= value:
        if value % divisor == 0:
            return False
        divisor += 2
    return True


def int_to_digits(value: int, p: int, length: int) -> Poly:
    digits = []
    for _ in range(length):
        value, digit = divmod(value, p)
        digits.append(digit)
    return digits


def digits_to_int(digits: Iterable[int], p: int) -> int:
    value = 0
    for digit in reversed(list(digits)):
        value = value * p + digit
    return value


def _trim(poly: Poly) -> Poly:
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def poly_mod(num: Sequence[int], den: Sequence[int], p: int) -> Poly:
    """Remainder of num / den over GF(p); den must have a non-zero leading coefficient."""
    rem = _trim(list(num))
    lead_inv = pow(den[-1], p - 2, p) if p > 2 else 1
    while len(rem) >= len(den):
        coef = rem[-1] * lead_inv % p
        shift = len(rem) - len(den)
        for i, den_coef in enumerate(den):
            rem[shift + i] = (rem[shift + i] - coef * den_coef) % p
        _trim(rem)
    return rem


def poly_mul(lhs: Sequence[int], rhs: Sequence[int], p: int) -> Poly:
    if not lhs or not rhs:
        return []
    out = [0] * (len(lhs) + len(rhs) - 1)
    for i, lcoef in enumerate(lhs):
        if lcoef == 0:
            continue
        for j, rcoef in enumerate(rhs):
            out[i + j] = (out[i + j] + lcoef * rcoef) % p
    return _trim(out)


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Exact test: no root in GF(p) and no monic factor of degree <= deg/2."""
    degree = len(poly) - 1
    if degree <= 1:
        return degree == 1
    if poly[0] == 0:
        return False
    for root in range(p):
        if sum(coef * pow(root, i, p) for i, coef in enumerate(poly)) % p == 0:
            return False
    # Degree-1 factors are exactly the roots checked above
    for factor_degree in range(2, degree // 2 + 1):
        for low in product(range(p), repeat=factor_degree):
            if not poly_mod(poly, list(low) + [1], p):
                return False
    return True


class MulBackend(Protocol):
    def mul(self, lhs: FieldElement, rhs: FieldElement) -> FieldElement: ...
    def inv(self, value: FieldElement) -> FieldElement: ...


@dataclass(kw_only=True)
class PolynomialBackend(MulBackend):
    """Schoolbook multiplication followed by reduction modulo the defining polynomial."""
    p: int
    m: int
    poly: tuple[int, ...]

    def mul(self, lhs: FieldElement, rhs: FieldElement) -> FieldElement:
        if lhs == 0 or rhs == 0:
            return 0
        if self.m == 1:
            return lhs * rhs % self.p
        if self.p == 2:
            return self._mul_char2(lhs, rhs)
        prod = poly_mul(
            _trim(int_to_digits(lhs, self.p, self.m)),
            _trim(int_to_digits(rhs, self.p, self.m)),
            self.p,
        )
        return digits_to_int(poly_mod(prod, self.poly, self.p), self.p)

    def _mul_char2(self, lhs: int, rhs: int) -> int:
        modulus = digits_to_int(self.poly, 2)
        prod = 0
        while rhs:
            if rhs & 1:
                prod ^= lhs
            rhs >>= 1
            lhs <<= 1
            if lhs >> self.m:
                lhs ^= modulus
        return prod

    def inv(self, value: FieldElement) -> FieldElement:
        # a^(q-2) by square-and-multiply
        exponent = self.p ** self.m - 2
        result = 1
        base = value
        while exponent:
            if exponent & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            exponent >>= 1
        return result


@dataclass(kw_only=True)
class LogTableBackend(MulBackend):
    """Log/antilog tables keyed to a generator of the multiplicative group (p = 2 only)."""
    p: int
    m: int
    poly: tuple[int, ...]
    generator: int = field(init=False)
    exp: list[int] = field(init=False, repr=False)
    log: list[int] = field(init=False, repr=False)
    _order: int = field(init=False, default=0)

    def __post_init__(self) -> None:
        if self.p != 2 or self.m > LOG_TABLE_MAX_DEGREE:
            raise RuntimeError(
                f'Log tables need characteristic 2 and degree <= {LOG_TABLE_MAX_DEGREE}'
            )
        schoolbook = PolynomialBackend(p=self.p, m=self.m, poly=self.poly)
        order = (1 << self.m) - 1
        self.generator = find_generator(schoolbook, order)
        notify.debug(f'Generator {self.generator:#x} found for GF(2^{self.m})')

        self.exp = [0] * (2 * order)
        self.log = [0] * (order + 1)
        value = 1
        for i in range(order):
            self.exp[i] = value
            self.exp[i + order] = value
            self.log[value] = i
            value = schoolbook.mul(value, self.generator)
        self._order = order

    def mul(self, lhs: FieldElement, rhs: FieldElement) -> FieldElement:
        if lhs == 0 or rhs == 0:
            return 0
        return self.exp[self.log[lhs] + self.log[rhs]]

    def inv(self, value: FieldElement) -> FieldElement:
        return self.exp[self._order - self.log[value]]


def find_generator(backend: MulBackend, order: int) -> int:
    """Smallest element whose multiplicative order is `order`, found by walking its powers."""
    for candidate in range(1, order + 1):
        value = candidate
        count = 1
        while value != 1:
            value = backend.mul(value, candidate)
            count += 1
            if count > order:
                break
        if count == order:
            return candidate
    raise ReducibleError('Multiplicative group has no generator')


_HEX_SUFFIX = re.compile(r'^([0-9a-fA-F]+)_x$')


def parse_hex(token: str) -> int:
    """Accepts `03_x`, `0x03` and bare hex `03`."""
    token = token.strip()
    match = _HEX_SUFFIX.match(token)
    if match:
        return int(match.group(1), 16)
    if token.lower().startswith('0x'):
        return int(token[2:], 16)
    return int(token, 16)


@dataclass(frozen=True, kw_only=True)
class FieldSpec:
    p: int
    m: int
    poly: tuple[int, ...]
    backend_type: InitVar[type[MulBackend] | None] = None
    q: int = field(init=False)
    backend: MulBackend = field(init=False, repr=False, compare=False)

    def __post_init__(self, backend_type: type[MulBackend] | None) -> None:
        if not is_prime(self.p):
            raise NotPrimeError(f'Characteristic must be prime: {self.p}')
        if self.m < 1:
            raise DegreeMismatchError(f'Extension degree must be at least 1: {self.m}')
        if len(self.poly) != self.m + 1 or self.poly[-1] != 1:
            raise DegreeMismatchError(
                f'Defining polynomial must be monic of degree {self.m}: {self.poly}'
            )
        if any(not 0 <= coef < self.p for coef in self.poly):
            raise DegreeMismatchError(f'Polynomial coefficients must lie in [0, {self.p})')
        order = self.p ** self.m
        if order > MAX_ORDER:
            raise FieldError(f'Field order {self.p}^{self.m} exceeds 2^32')
        if not is_irreducible(self.poly, self.p):
            raise ReducibleError(
                f'Polynomial {self.poly_int:#x} is reducible over GF({self.p})'
            )
        object.__setattr__(self, 'q', order)

        if backend_type is None:
            if self.p == 2 and self.m <= LOG_TABLE_MAX_DEGREE:
                backend_type = LogTableBackend
            else:
                backend_type = PolynomialBackend
        backend = backend_type(p=self.p, m=self.m, poly=self.poly)  # type: ignore[call-arg]
        object.__setattr__(self, 'backend', backend)
        notify.info(
            f'GF({self.p}^{self.m}) ready: poly={self.poly_int:#x}, '
            f'backend={type(backend).__name__}'
        )

    @classmethod
    def create(
        cls,
        p: int,
        m: int,
        poly: int | Sequence[int],
        backend_type: type[MulBackend] | None = None,
    ) -> 'FieldSpec':
        """Build a field from a coefficient sequence (x^0 first) or its integer encoding."""
        if not is_prime(p):
            raise NotPrimeError(f'Characteristic must be prime: {p}')
        if isinstance(poly, int):
            if m < 1 or not p ** m <= poly < p ** (m + 1):
                raise DegreeMismatchError(
                    f'Polynomial {poly:#x} does not have degree {m} over GF({p})'
                )
            coeffs = int_to_digits(poly, p, m + 1)
        else:
            coeffs = list(poly)
        return cls(p=p, m=m, poly=tuple(coeffs), backend_type=backend_type)

    @property
    def poly_int(self) -> int:
        return digits_to_int(self.poly, self.p)

    @property
    def char2(self) -> bool:
        return self.p == 2

    def check(self, value: FieldElement) -> FieldElement:
        if not 0 <= value < self.q:
            raise ElementError(f'{value:#x} is not an element of GF({self.q})')
        return value

    def add(self, lhs: FieldElement, rhs: FieldElement) -> FieldElement:
        if self.p == 2:
            return lhs ^ rhs
        if self.m == 1:
            return (lhs + rhs) % self.p
        return self._digitwise(lhs, rhs, 1)

    def sub(self, lhs: FieldElement, rhs: FieldElement) -> FieldElement:
        if self.p == 2:
            return lhs ^ rhs
        if self.m == 1:
            return (lhs - rhs) % self.p
        return self._digitwise(lhs, rhs, -1)

    def neg(self, value: FieldElement) -> FieldElement:
        return self.sub(0, value)

    def _digitwise(self, lhs: int, rhs: int, sign: int) -> int:
        out = 0
        scale = 1
        for _ in range(self.m):
            lhs, ldigit = divmod(lhs, self.p)
            rhs, rdigit = divmod(rhs, self.p)
            out += ((ldigit + sign * rdigit) % self.p) * scale
            scale *= self.p
        return out

    def mul(self, lhs: FieldElement, rhs: FieldElement) -> FieldElement:
        return self.backend.mul(lhs, rhs)

    def inv(self, value: FieldElement) -> FieldElement:
        if value == 0:
            raise InverseOfZeroError('Zero has no multiplicative inverse')
        return self.backend.inv(value)

    def div(self, lhs: FieldElement, rhs: FieldElement) -> FieldElement:
        return self.mul(lhs, self.inv(rhs))

    def pow(self, value: FieldElement, exponent: int) -> FieldElement:
        if exponent < 0:
            value = self.inv(value)
            exponent = -exponent
        result = 1
        while exponent:
            if exponent & 1:
                result = self.mul(result, value)
            value = self.mul(value, value)
            exponent >>= 1
        return result

    def to_coeffs(self, value: FieldElement) -> Poly:
        return int_to_digits(value, self.p, self.m)

    def from_coeffs(self, coeffs: Sequence[int]) -> FieldElement:
        if len(coeffs) != self.m or any(not 0 <= c < self.p for c in coeffs):
            raise ElementError(f'Invalid coefficient vector for GF({self.q}): {coeffs}')
        return digits_to_int(coeffs, self.p)

    def parse_element(self, token: str) -> FieldElement:
        try:
            value = parse_hex(token)
        except ValueError as exc:
            raise ElementError(f'Cannot parse field element: {token!r}') from exc
        return self.check(value)

    def format_element(self, value: FieldElement) -> str:
        width = max(2, len(f'{self.q - 1:x}'))
        return f'{value:0{width}x}_x'

    # numpy helpers used by the block evaluators

    @cached_property
    def dtype(self) -> type:
        return np.uint32 if self.q > 1 << 16 else np.int32

    def scale_table(self, column: Sequence[FieldElement]) -> np.ndarray:
        """Array t with t[v] = column * v for every field element v; shape (q, len(column))."""
        table = np.zeros((self.q, len(column)), dtype=self.dtype)
        backend = self.backend
        if isinstance(backend, LogTableBackend):
            order = self.q - 1
            exp = np.asarray(backend.exp, dtype=np.int64)
            logs = np.asarray(backend.log, dtype=np.int64)[1:]
            for i, entry in enumerate(column):
                if entry:
                    table[1:, i] = exp[(logs + backend.log[entry]) % order]
            return table
        for i, entry in enumerate(column):
            if entry:
                table[:, i] = [self.mul(entry, value) for value in range(self.q)]
        return table

    def add_arrays(self, lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return np.bitwise_xor(lhs, rhs)
        if self.m == 1:
            return (lhs + rhs) % self.p
        out = np.zeros(np.broadcast_shapes(lhs.shape, rhs.shape), dtype=self.dtype)
        scale = 1
        for _ in range(self.m):
            out += (((lhs // scale) % self.p + (rhs // scale) % self.p) % self.p) * scale
            scale *= self.p
        return out


def field_new(
    p: int,
    m: int,
    poly: int | Sequence[int],
    backend_type: type[MulBackend] | None = None,
) -> FieldSpec:
    return FieldSpec.create(p, m, poly, backend_type)
