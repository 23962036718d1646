"""Tests for certificate parsing, exact verification and symbolic host expressions."""

import copy
import json
from collections import Counter
from fractions import Fraction

import pytest

from flagcert.certificate import (
    dump_certificate,
    expression_denominator,
    expression_report,
    host_expressions,
    load_certificate,
    load_shipped_certificate,
    max_density_bound,
    parse_certificate,
    shipped_certificate_text,
    verify,
    zero_certificate,
)
from flagcert.errors import ArgumentError, CertificateError, SizeError
from flagcert.graphs import ForbiddenFamily, complete_graph, cycle_graph

K3 = complete_graph(3)
C5 = cycle_graph(5)

# b_H over 120 for the hosts in the certificate's host_order numbering
HOST_EXPRESSIONS = {
    1: "120p11",
    2: "12p11 + 24p12 + 24p13 + 24p15 + 12q11",
    3: "8p12 + 8p13 + 8p14 + 8p15 + 8p16 + 8p17 + 4p22 + 4p33 + 4p55 + 8q12 + 8q13 + 4r11",
    4: "12p14 + 12p16 + 12p17 + 12p18 + 6q22 + 6q33 + 12r13",
    5: "48p18 + 24r33",
    6: "16p23 + 16p25 + 16p35 + 8q11 + 16q14",
    7: "8p27 + 8p36 + 8p45 + 8q14 + 8q24 + 8q34 + 4q44 + 4r11",
    8: "4p23 + 4p24 + 4p25 + 4p26 + 4p34 + 4p35 + 4p37 + 4p56 + 4p57 + 4q12 + 4q13 + 4q15 + 4q16 + 4q23 + 4r12 + 4r14",
    9: "4p27 + 4p28 + 4p36 + 4p38 + 4p45 + 4p58 + 4q15 + 4q16 + 4q25 + 4q36 + 4r13 + 2r22 + 4r23 + 4r34 + 2r44",
    10: "8p44 + 8p66 + 8p77 + 16q23 + 16r15",
    11: "4p48 + 4p68 + 4p78 + 4q26 + 4q35 + 2q55 + 2q66 + 4r15 + 4r23 + 4r25 + 4r34 + 4r35 + 4r45",
    12: "12p88 + 24r35 + 12r55",
    13: "4p46 + 4p47 + 4p67 + 4q24 + 4q26 + 4q34 + 4q35 + 4q45 + 4q46 + 4r12 + 4r14 + 4r24",
    14: "20q56 + 20r24 + 120",
}

SPECIAL_TOTALS = {7: Fraction(322, 9375), 8: Fraction(2355, 62500), 13: Fraction(-126, 6250)}


@pytest.fixture(scope="module")
def shipped():
    return load_shipped_certificate()


@pytest.fixture(scope="module")
def shipped_report(shipped):
    return verify(shipped)


@pytest.fixture
def raw():
    """A fresh, mutable copy of the shipped certificate JSON."""
    return json.loads(shipped_certificate_text())


def parse(data: dict):
    return parse_certificate(json.dumps(data))


def zero_matrix(n: int) -> list[list[str]]:
    return [["0"] * n for _ in range(n)]


# =============================================================================
# Parsing
# =============================================================================


def test_shipped_certificate_parses(shipped):
    """Test the shape of the packaged certificate."""
    assert shipped.l == 5
    assert [len(block.basis) for block in shipped.types] == [8, 6, 5]
    assert all(block.m == 4 and block.type.size == 3 for block in shipped.types)
    assert shipped.claimed_bound == Fraction(24, 625)
    assert len(shipped.host_order) == 14
    assert shipped.warnings == []


def test_rejects_m_above_bound(raw):
    """Test that m = 5 violates m <= (l + |sigma|)/2 for l = 5."""
    raw["types"][0]["m"] = 5
    with pytest.raises(CertificateError) as info:
        parse(raw)
    assert info.value.field == "types[0].m"


def test_rejects_asymmetric_matrix(raw):
    """Test that an asymmetric matrix is refused."""
    raw["types"][1]["matrix"][0][1] = "1/7"
    with pytest.raises(CertificateError) as info:
        parse(raw)
    assert info.value.field == "types[1].matrix"


def test_rejects_duplicate_flag(raw):
    """Test that a flag listed twice is refused."""
    raw["types"][0]["flags"][1] = copy.deepcopy(raw["types"][0]["flags"][0])
    with pytest.raises(CertificateError) as info:
        parse(raw)
    assert info.value.field == "types[0].flags"


def test_rejects_inadmissible_flag(raw):
    """Test that a flag containing a triangle is refused."""
    # extra vertex joined to both ends of the labelled edge
    raw["types"][1]["flags"][5] = {"graph": "Ce", "labels": [1, 2, 3]}
    with pytest.raises(CertificateError) as info:
        parse(raw)
    assert info.value.field == "types[1].flags[5]"


def test_rejects_labels_not_inducing_type(raw):
    """Test that the labelled vertices must induce the type."""
    raw["types"][1]["flags"][0] = {"graph": "C?", "labels": [1, 2, 3]}
    with pytest.raises(CertificateError) as info:
        parse(raw)
    assert info.value.field == "types[1].flags[0]"


def test_rejects_matrix_size_mismatch(raw):
    """Test that the matrix dimension must match the flag list."""
    raw["types"][2]["matrix"] = zero_matrix(4)
    with pytest.raises(CertificateError) as info:
        parse(raw)
    assert info.value.field == "types[2].matrix"


def test_rejects_bad_entries_and_schema(raw):
    """Test schema errors and malformed rationals."""
    bad_entry = copy.deepcopy(raw)
    bad_entry["types"][0]["matrix"][0][0] = "0.0384"
    with pytest.raises(CertificateError) as info:
        parse(bad_entry)
    assert info.value.field == "types[0].matrix[0][0]"

    unknown = copy.deepcopy(raw)
    unknown["comment"] = "hello"
    with pytest.raises(CertificateError):
        parse(unknown)

    with pytest.raises(CertificateError):
        parse_certificate("{not json")


def test_rejects_unknown_host_in_order(raw):
    """Test that host_order entries must be hosts."""
    raw["host_order"][0] = "Bw"
    with pytest.raises(CertificateError) as info:
        parse(raw)
    assert info.value.field == "host_order[0]"


def test_warns_on_partial_flag_list(raw):
    """Test that a proper subset of the admissible flags is accepted with a warning."""
    raw["types"][2]["flags"] = raw["types"][2]["flags"][:4]
    raw["types"][2]["matrix"] = zero_matrix(4)
    cert = parse(raw)
    assert cert.warnings == ["types[2]: lists 4 of 5 admissible flags"]


def test_dump_round_trip(shipped):
    """Test that dumping and parsing gives the same certificate."""
    again = parse_certificate(dump_certificate(shipped))
    assert again.claimed_bound == shipped.claimed_bound
    assert [b.matrix for b in again.types] == [b.matrix for b in shipped.types]
    assert [[f.key for f in b.basis] for b in again.types] == [[f.key for f in b.basis] for b in shipped.types]
    assert again.host_order == shipped.host_order


def test_load_certificate_missing_file(tmp_path):
    """Test that unreadable paths raise ArgumentError."""
    with pytest.raises(ArgumentError):
        load_certificate(tmp_path / "missing.json")


# =============================================================================
# Verification
# =============================================================================


def test_shipped_certificate_verifies(shipped_report):
    """Test the exact bound 24/625 with all matrices PSD."""
    assert shipped_report.all_psd
    assert shipped_report.bound == Fraction(24, 625)
    assert shipped_report.passed
    assert len(shipped_report.hosts) == 14


def test_host_totals(shipped_report):
    """Test every b_H by cross-reference, and the multiset of values."""
    for record in shipped_report.hosts:
        expected = SPECIAL_TOTALS.get(record.cross_ref, Fraction(24, 625))
        assert record.total == expected, record.graph6

    totals = Counter(record.total for record in shipped_report.hosts)
    assert totals == Counter({Fraction(24, 625): 11, **{v: 1 for v in SPECIAL_TOTALS.values()}})


def test_maximizers_and_pentagon_density(shipped_report):
    """Test that the pentagon host has density one and attains the bound."""
    by_ref = {record.cross_ref: record for record in shipped_report.hosts}
    assert by_ref[14].density == 1
    assert all(record.density == 0 for ref, record in by_ref.items() if ref != 14)
    assert by_ref[14] in shipped_report.maximizers
    assert len(shipped_report.maximizers) == 11


def test_non_psd_matrix_fails_without_raising(raw):
    """Test that a negative diagonal entry fails verification with a witness."""
    raw["types"][2]["matrix"][0][0] = "-1"
    report = verify(parse(raw))
    assert not report.all_psd
    assert not report.passed
    verdict = report.psd[2]
    assert verdict.witness_value < 0


def test_claimed_bound_too_small(raw):
    """Test that a claim below the computed bound fails."""
    raw["claimed_bound"] = "1/27"
    report = verify(parse(raw))
    assert report.all_psd
    assert not report.passed


def test_rank_one_term_raises_each_host_by_its_quadratic_form(raw, shipped_report):
    """Test that adding v vᵀ to a matrix shifts every b_H by vᵀ T_H v >= 0."""
    v = [Fraction(1), Fraction(-2), Fraction(0), Fraction(3), Fraction(1, 2)]
    block = raw["types"][2]
    for i, row in enumerate(block["matrix"]):
        for j in range(len(row)):
            row[j] = str(Fraction(row[j]) + v[i] * v[j])
    raw["claimed_bound"] = "1"
    report = verify(parse(raw))

    before = {r.cross_ref: r for r in shipped_report.hosts}
    for record in report.hosts:
        table = before[record.cross_ref].tables[2]
        expected = sum(v[a] * v[b] * table.entry(a, b) for a in range(5) for b in range(5))
        assert expected >= 0
        assert record.total - before[record.cross_ref].total == expected


def test_reports_are_deterministic(tmp_path):
    """Test that identical certificate bytes render identical reports."""
    from flagcert import operations, reporting

    path = tmp_path / "copy.cert.json"
    path.write_text(shipped_certificate_text())

    first = parse_certificate(path.read_text())
    second = parse_certificate(path.read_bytes().decode())
    assert expression_report(first) == expression_report(second)

    renders = [reporting.render_verification(operations.verify_certificate(str(path))) for _ in range(2)]
    assert renders[0] == renders[1]
    assert renders[0] == reporting.render_verification(operations.verify_certificate(None))


def test_empty_type_list_gives_density_bound():
    """Test that no types certifies max_H d_A(H)."""
    family = ForbiddenFamily.of(K3)
    report = verify(zero_certificate(5, family, C5, Fraction(1)))
    assert report.bound == 1
    assert report.passed


def test_zero_matrices_give_density_bound(raw):
    """Test that zero matrices contribute nothing."""
    for record in raw["types"]:
        record["matrix"] = zero_matrix(len(record["flags"]))
    raw["claimed_bound"] = "1"
    report = verify(parse(raw))
    assert report.bound == 1
    assert report.passed


def test_max_density_bound():
    """Test plain bounds for a few families."""
    assert max_density_bound(5, ForbiddenFamily.of(K3), C5) == 1
    assert max_density_bound(5, ForbiddenFamily.of(K3, C5), C5) == 0
    assert max_density_bound(5, ForbiddenFamily.of(complete_graph(2)), C5) == 0
    with pytest.raises(SizeError):
        max_density_bound(4, ForbiddenFamily.of(K3), C5)


# =============================================================================
# Host expressions
# =============================================================================


def test_expression_denominator(shipped):
    """Test lcm(C(5,5), 120) = 120."""
    assert expression_denominator(shipped) == 120


def test_host_expressions_match_reference(shipped_report):
    """Test all fourteen linear forms by cross-reference."""
    expressions = host_expressions(shipped_report)
    assert {e.host.cross_ref: e.text for e in expressions} == HOST_EXPRESSIONS
    assert all(e.denominator == 120 for e in expressions)


def test_expression_report_lines(shipped):
    """Test the rendered report format."""
    lines = expression_report(shipped).splitlines()
    assert len(lines) == 14
    assert lines[0] == "H1 D?? [ref H1]: (120p11)/120"
    assert any(line.endswith(": (20q56 + 20r24 + 120)/120") for line in lines)


def test_expressions_name_many_types(raw):
    """Test m1_, m2_, ... naming once there are more than three types."""
    sigma1 = raw["types"][1]
    raw["types"] = [copy.deepcopy(sigma1) for _ in range(4)]
    raw["claimed_bound"] = "1"
    report = verify(parse(raw))
    by_ref = {e.host.cross_ref: e.text for e in host_expressions(report)}
    assert by_ref[2] == "12m1_11 + 12m2_11 + 12m3_11 + 12m4_11"
