"""JSON and text renderings of branch and cost reports.

JSON counters can exceed 64 bits (2^134 for n=8 over GF(2^16)), so they are written as
decimal strings; decoding is lax enough to turn them back into ints.
"""
from typing import (
    Any,
    Protocol,
)

import msgspec

from lib.galois_field import FieldSpec

from branch.cost import (
    CostEstimate,
    TableRow,
)
from branch.engine import BranchReport


BIG_COUNT_FIELDS = frozenset((
    'vectors_evaluated',
    'field_mults',
    'field_mults_saved',
    'mults_new',
    'mults_new_involutory',
    'mults_exhaustive',
))


class ReportSerializer(Protocol):
    def serialize(self, report: BranchReport | CostEstimate) -> bytes: ...
    def deserialize(
        self,
        data: bytes | str,
        report_type: type[BranchReport] | type[CostEstimate]
    ) -> BranchReport | CostEstimate: ...


class MsgspecReportSerializer(ReportSerializer):
    def __init__(self) -> None:
        self._encoder = msgspec.json.Encoder()

    def to_builtins(self, report: BranchReport | CostEstimate) -> dict[str, Any]:
        data = msgspec.to_builtins(report)
        for key in BIG_COUNT_FIELDS.intersection(data):
            data[key] = str(data[key])
        return data

    def serialize(self, report: BranchReport | CostEstimate) -> bytes:
        return self._encoder.encode(self.to_builtins(report))

    def encode_object(self, obj: Any) -> bytes:
        return self._encoder.encode(obj)

    def deserialize(
        self,
        data: bytes | str,
        report_type: type[BranchReport] | type[CostEstimate]
    ) -> BranchReport | CostEstimate:
        return msgspec.json.decode(data, type=report_type, strict=False)


def format_log2(value: float | None) -> str:
    if value is None:
        return '0'
    text = f'{value:.2f}'
    if text.endswith('.00'):
        text = text[:-3]
    return f'2^{text}'


def describe_field(field_spec: FieldSpec) -> str:
    return f'GF({field_spec.p}^{field_spec.m}) mod {field_spec.poly_int:#x}'


def final_branch(report: BranchReport) -> int | None:
    return report.branch_diff if report.branch_diff is not None else report.branch_lin


def branch_text(
    report: BranchReport,
    field_spec: FieldSpec | None = None,
    source: str | None = None,
) -> str:
    lines = []
    if source:
        lines.append(f'matrix: {source}')
    if field_spec is not None:
        lines.append(f'field: {describe_field(field_spec)}')
    lines.append(f'order: {report.n} (q = {report.q})')
    lines.append(f'algorithm: {report.algorithm.value} ({report.backend} backend)')
    if report.branch_diff is not None:
        lines.append(f'differential branch number: {report.branch_diff}')
    if report.branch_lin is not None:
        lines.append(f'linear branch number: {report.branch_lin}')
    lines.append(f'vectors evaluated: {report.vectors_evaluated}')
    lines.append(
        f'field multiplications: {report.field_mults} (saved {report.field_mults_saved})'
    )
    if report.scanned_weights:
        lines.append(f'weights scanned: {", ".join(map(str, report.scanned_weights))}')
    lines.append(f'elapsed: {report.elapsed:.3f}s')
    label = report.classification.value if report.classification else 'unclassified'
    lines.append(f'branch number: {final_branch(report)} ({label})')
    return '\n'.join(lines)


def cost_text(estimate: CostEstimate) -> str:
    return '\n'.join((
        f'n = {estimate.n}, q = {estimate.q}',
        f'exhaustive: {format_log2(estimate.log2_exhaustive)} '
        f'({estimate.mults_exhaustive} multiplications)',
        f'new algorithm: {format_log2(estimate.log2_new)} '
        f'({estimate.mults_new} multiplications)',
        f'new algorithm, involutory path: {format_log2(estimate.log2_new_involutory)} '
        f'({estimate.mults_new_involutory} multiplications)',
        f'{format_log2(estimate.log2_exhaustive)} vs {format_log2(estimate.log2_new)}',
    ))


def cost_table_text(rows: list[tuple[TableRow, CostEstimate]]) -> str:
    lines = [f'{"n":>2} {"q":>5} {"exhaustive":>10} {"new":>8} {"published":>19}']
    for row, estimate in rows:
        published = f'{row.log2_exhaustive:.2f} / {row.log2_new:.2f}'
        lines.append(
            f'{row.n:>2} {"2^" + str(row.q_bits):>5} '
            f'{estimate.log2_exhaustive:>10.2f} {estimate.log2_new or 0.0:>8.2f} '
            f'{published:>19}'
        )
    return '\n'.join(lines)
