import json

from branch import cost
from branch import report
from branch.engine import (
    Algorithm,
    BranchReport,
    Classification,
)


def test_report_format_log2():
    assert report.format_log2(36.0) == '2^36'
    assert report.format_log2(13.5797) == '2^13.58'
    assert report.format_log2(None) == '0'


def test_report_big_counts_are_strings():
    serializer = report.MsgspecReportSerializer()
    big = BranchReport(
        n=8,
        q=65536,
        branch_diff=9,
        algorithm=Algorithm.NEW_ALGORITHM,
        vectors_evaluated=2 ** 70,
        field_mults=2 ** 80 + 1,
    )
    data = json.loads(serializer.serialize(big))
    assert data['vectors_evaluated'] == str(2 ** 70)
    assert data['field_mults'] == str(2 ** 80 + 1)
    assert data['field_mults_saved'] == '0'
    assert data['classification'] is None

    estimate = json.loads(serializer.serialize(cost.estimate(8, 65536)))
    assert estimate['mults_exhaustive'] == str(2 ** 134)
    assert estimate['log2_exhaustive'] == 134.0


def test_report_round_trip():
    serializer = report.MsgspecReportSerializer()
    original = BranchReport(
        n=4,
        q=256,
        branch_diff=5,
        branch_lin=5,
        classification=Classification.MDS,
        algorithm=Algorithm.NEW_ALGORITHM_INVOLUTORY_PATH,
        vectors_evaluated=1534,
        field_mults=6120,
        field_mults_saved=12,
        elapsed=0.25,
        scanned_weights=(1, 2),
        backend='scalar',
    )
    assert serializer.deserialize(serializer.serialize(original), BranchReport) == original


def test_report_text():
    lin_only = BranchReport(
        n=4,
        q=256,
        branch_lin=4,
        algorithm=Algorithm.EXHAUSTIVE,
        backend='vector',
    )
    text = report.branch_text(lin_only, source='m.mat')
    lines = text.splitlines()
    assert lines[0] == 'matrix: m.mat'
    assert 'linear branch number: 4' in lines
    assert not any(line.startswith('differential') for line in lines)
    assert lines[-1] == 'branch number: 4 (unclassified)'

    text = report.cost_text(cost.estimate(4, 256))
    assert text.splitlines()[-1] == '2^36 vs 2^13.58'
