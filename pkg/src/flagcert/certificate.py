"""Certificate files and the exact verifier.

A certificate names a forbidden family, a target graph A, a host order l and
a list of (type, m, explicit flag list, symmetric rational matrix). The
verifier recomputes every host, table and density itself and certifies

    pi_A(F) <= max over hosts H of ( d_A(H) + sum_i c_H(sigma_i, m_i, Q_i) ).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import comb, lcm
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from flagcert.errors import ArgumentError, CertificateError, FlagcertError, SizeError
from flagcert.flags import (
    Flag,
    FlagBasis,
    FlagType,
    PairDensityTable,
    enumerate_flags,
    make_type,
    pair_configurations,
    pair_density_table,
)
from flagcert.formatting import entry_name, format_linear_form, matrix_name
from flagcert.graphs import (
    MAX_CANONICAL,
    ForbiddenFamily,
    Graph,
    canonical_form,
    contains_forbidden,
    enumerate_free_graphs,
    induced_density,
    parse_graph6,
    write_graph6,
)
from flagcert.linalg import PsdVerdict, RationalMatrix, format_rational, parse_rational, psd_check

SHIPPED_CERTIFICATE = "erdos-pentagon.cert.json"


# =============================================================================
# File schema
# =============================================================================


class FlagRecord(BaseModel):
    """One flag: graph6 of the m-vertex graph and the 1-based labelled vertices."""

    model_config = ConfigDict(str_strip_whitespace=True, extra="forbid")

    graph: str = Field(description="graph6 of the flag's underlying graph")
    labels: list[int] = Field(description="Vertex carrying label 1, label 2, ... (1-based)")


class TypeRecord(BaseModel):
    model_config = ConfigDict(str_strip_whitespace=True, extra="forbid")

    type: str = Field(description="graph6 of the type, vertex i carrying label i")
    m: int = Field(description="Flag order")
    flags: list[FlagRecord]
    matrix: list[list[str | int]] = Field(description="Symmetric matrix, entries 'num/den'")


class CertificateFile(BaseModel):
    model_config = ConfigDict(str_strip_whitespace=True, extra="forbid")

    family: list[str] = Field(description="graph6 of each forbidden graph")
    target: str = Field(description="graph6 of the target graph A")
    l: int = Field(description="Host order")
    types: list[TypeRecord] = Field(default_factory=list)
    claimed_bound: str = Field(description="Claimed upper bound, 'num/den'")
    host_order: list[str] | None = Field(default=None, description="External host numbering (graph6)")


# =============================================================================
# Validated certificate
# =============================================================================


@dataclass(frozen=True)
class TypeBlock:
    basis: FlagBasis
    matrix: RationalMatrix

    @property
    def type(self) -> FlagType:
        return self.basis.type

    @property
    def m(self) -> int:
        return self.basis.m


@dataclass
class Certificate:
    family: ForbiddenFamily
    target: Graph
    l: int
    types: tuple[TypeBlock, ...]
    claimed_bound: Fraction
    host_order: tuple[Graph, ...] | None = None
    warnings: list[str] = field(default_factory=list)


def _graph(text: str, where: str) -> Graph:
    try:
        return parse_graph6(text)
    except FlagcertError as e:
        raise CertificateError(str(e), field=where)


def _rational(value: str | int, where: str) -> Fraction:
    try:
        return parse_rational(value)
    except ArgumentError as e:
        raise CertificateError(str(e), field=where)


def _parse_type(i: int, record: TypeRecord, family: ForbiddenFamily, l: int) -> tuple[TypeBlock, str | None]:
    where = f"types[{i}]"
    try:
        t = make_type(_graph(record.type, f"{where}.type"))
    except ArgumentError as e:
        raise CertificateError(str(e), field=f"{where}.type")
    s, m = t.size, record.m
    if m < s:
        raise CertificateError(f"m = {m} is smaller than the type order {s}", field=f"{where}.m")
    if 2 * m > l + s:
        raise CertificateError(
            f"m = {m} violates m <= (l + |sigma|)/2 = {format_rational(Fraction(l + s, 2))}",
            field=f"{where}.m",
        )
    if contains_forbidden(t.graph, family):
        raise CertificateError("type graph contains a forbidden graph", field=f"{where}.type")

    flags = []
    for j, fr in enumerate(record.flags):
        fwhere = f"{where}.flags[{j}]"
        g = _graph(fr.graph, f"{fwhere}.graph")
        if g.n != m:
            raise CertificateError(f"flag has {g.n} vertices, expected m = {m}", field=fwhere)
        try:
            flag = Flag.from_one_based(t, g, fr.labels)
        except ArgumentError as e:
            raise CertificateError(str(e), field=fwhere)
        if contains_forbidden(g, family):
            raise CertificateError("flag is not admissible (contains a forbidden graph)", field=fwhere)
        flags.append(flag)
    try:
        basis = FlagBasis(t, m, tuple(flags))
    except ArgumentError as e:
        raise CertificateError(f"duplicate flag: {e}", field=f"{where}.flags")

    if len(record.matrix) != len(flags) or any(len(row) != len(flags) for row in record.matrix):
        raise CertificateError(
            f"matrix must be {len(flags)}x{len(flags)} to match the flag list",
            field=f"{where}.matrix",
        )
    matrix = RationalMatrix(
        tuple(
            tuple(_rational(x, f"{where}.matrix[{a}][{b}]") for b, x in enumerate(row))
            for a, row in enumerate(record.matrix)
        )
    )
    if not matrix.is_symmetric():
        raise CertificateError("matrix is not symmetric", field=f"{where}.matrix")

    warning = None
    complete = len(enumerate_flags(t, m, family))
    if len(flags) < complete:
        warning = f"{where}: lists {len(flags)} of {complete} admissible flags"
    return TypeBlock(basis, matrix), warning


def certificate_from_model(model: CertificateFile) -> Certificate:
    """Semantic validation of an already schema-checked certificate."""
    family_graphs = [_graph(text, f"family[{i}]") for i, text in enumerate(model.family)]
    try:
        family = ForbiddenFamily(tuple(family_graphs))
    except ArgumentError as e:
        raise CertificateError(str(e), field="family")
    target = _graph(model.target, "target")
    l = model.l
    if not 1 <= l <= MAX_CANONICAL:
        raise CertificateError(f"l must lie in 1..{MAX_CANONICAL}, got {l}", field="l")
    if target.n > l:
        raise CertificateError(f"target has {target.n} vertices, more than l = {l}", field="target")

    blocks, warnings = [], []
    for i, record in enumerate(model.types):
        block, warning = _parse_type(i, record, family, l)
        blocks.append(block)
        if warning:
            warnings.append(warning)

    host_order = None
    if model.host_order is not None:
        known = {canonical_form(h) for h in enumerate_free_graphs(l, family)}
        seen = set()
        graphs = []
        for i, text in enumerate(model.host_order):
            g = _graph(text, f"host_order[{i}]")
            form = canonical_form(g) if g.n == l else None
            if form not in known:
                raise CertificateError(f"{text} is not a host graph", field=f"host_order[{i}]")
            if form in seen:
                raise CertificateError(f"{text} is listed twice", field=f"host_order[{i}]")
            seen.add(form)
            graphs.append(g)
        host_order = tuple(graphs)

    return Certificate(
        family=family,
        target=target,
        l=l,
        types=tuple(blocks),
        claimed_bound=_rational(model.claimed_bound, "claimed_bound"),
        host_order=host_order,
        warnings=warnings,
    )


def parse_certificate(text: str) -> Certificate:
    """Parse and validate certificate JSON text.

    Raises:
        CertificateError: On malformed JSON, schema violations, m-bound
            violations, asymmetric matrices, inadmissible or duplicate flags.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise CertificateError(f"invalid JSON: {e.msg} (line {e.lineno})")
    try:
        model = CertificateFile.model_validate(raw)
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(part) for part in first["loc"]) or None
        raise CertificateError(first["msg"], field=where)
    return certificate_from_model(model)


def load_certificate(path: str | Path) -> Certificate:
    """Parse a certificate file; the bare shipped name falls back to the packaged copy.

    Raises:
        ArgumentError: If the file cannot be read.
        CertificateError: If its content is invalid.
    """
    if str(path) == SHIPPED_CERTIFICATE and not Path(path).exists():
        return load_shipped_certificate()
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ArgumentError(f"Cannot read certificate {path}: {e.strerror}")
    return parse_certificate(text)


def load_shipped_certificate() -> Certificate:
    """The packaged certificate for C5-density in triangle-free graphs."""
    return parse_certificate(shipped_certificate_text())


def shipped_certificate_text() -> str:
    return resources.files("flagcert").joinpath("data", SHIPPED_CERTIFICATE).read_text()


def certificate_to_model(cert: Certificate) -> CertificateFile:
    return CertificateFile(
        family=cert.family.graph6(),
        target=write_graph6(cert.target),
        l=cert.l,
        types=[
            TypeRecord(
                type=write_graph6(block.type.graph),
                m=block.m,
                flags=[FlagRecord(**f.to_record()) for f in block.basis],
                matrix=block.matrix.to_strings(),
            )
            for block in cert.types
        ],
        claimed_bound=format_rational(cert.claimed_bound),
        host_order=[write_graph6(g) for g in cert.host_order] if cert.host_order is not None else None,
    )


def dump_certificate(cert: Certificate) -> str:
    """Certificate JSON text; ``parse_certificate`` reads it back unchanged."""
    data = certificate_to_model(cert).model_dump(exclude_none=True)
    return json.dumps(data, indent=2) + "\n"


# =============================================================================
# Verification
# =============================================================================


@dataclass(frozen=True)
class HostRecord:
    """Exact value b_H = d_A(H) + Σ_i c_H(i) for one host."""

    index: int
    graph: Graph
    cross_ref: int | None
    density: Fraction
    contributions: tuple[Fraction, ...]
    tables: tuple[PairDensityTable, ...]

    @property
    def graph6(self) -> str:
        return write_graph6(self.graph)

    @property
    def total(self) -> Fraction:
        return self.density + sum(self.contributions, Fraction(0))


@dataclass(frozen=True)
class VerificationReport:
    certificate: Certificate
    psd: tuple[PsdVerdict, ...]
    hosts: tuple[HostRecord, ...]

    @property
    def bound(self) -> Fraction:
        return max(h.total for h in self.hosts)

    @property
    def all_psd(self) -> bool:
        return all(v.is_psd for v in self.psd)

    @property
    def passed(self) -> bool:
        return self.all_psd and self.bound <= self.certificate.claimed_bound

    @property
    def maximizers(self) -> list[HostRecord]:
        best = self.bound
        return [h for h in self.hosts if h.total == best]


def _cross_reference(cert: Certificate) -> dict:
    if cert.host_order is None:
        return {}
    return {canonical_form(g): i + 1 for i, g in enumerate(cert.host_order)}


def verify(cert: Certificate) -> VerificationReport:
    """Recompute hosts, tables and densities and evaluate every b_H exactly.

    Only the matrices and the claimed bound are taken from ``cert``. A
    matrix that is not PSD fails the report; it never raises.
    """
    hosts = enumerate_free_graphs(cert.l, cert.family)
    cross = _cross_reference(cert)
    verdicts = tuple(psd_check(block.matrix) for block in cert.types)
    records = []
    for i, h in enumerate(hosts):
        tables = tuple(pair_density_table(block.basis, h) for block in cert.types)
        records.append(
            HostRecord(
                index=i + 1,
                graph=h,
                cross_ref=cross.get(canonical_form(h)),
                density=induced_density(h, cert.target),
                contributions=tuple(t.contract(block.matrix) for t, block in zip(tables, cert.types)),
                tables=tables,
            )
        )
    return VerificationReport(certificate=cert, psd=verdicts, hosts=tuple(records))


@dataclass(frozen=True)
class HostExpression:
    """b_H as a linear form in matrix entries, over a common denominator."""

    host: HostRecord
    denominator: int
    text: str


def expression_denominator(cert: Certificate) -> int:
    """lcm of the table normalisations and C(l, |V(A)|)."""
    n = cert.l
    den = comb(n, cert.target.n)
    for block in cert.types:
        den = lcm(den, pair_configurations(n, block.type.size, block.m))
    return den


def host_expressions(report: VerificationReport) -> list[HostExpression]:
    """Symbolic b_H per host with symmetric pairs merged (``24p12``, not two 12s)."""
    cert = report.certificate
    den = expression_denominator(cert)
    count = len(cert.types)
    out = []
    for record in report.hosts:
        terms: list[tuple[int, str]] = []
        for i, table in enumerate(record.tables):
            name = matrix_name(i, count)
            size = len(table.basis)
            for a in range(size):
                for b in range(a, size):
                    t = table.entry(a, b) + (table.entry(b, a) if a != b else 0)
                    coefficient = t * den
                    terms.append((int(coefficient), entry_name(name, a + 1, b + 1)))
        constant = record.density * den
        out.append(HostExpression(record, den, format_linear_form(terms, int(constant))))
    return out


def expression_report(cert: Certificate) -> str:
    """One line per host: ``H<k> <graph6> [ref Hj]: (<linear form>)/<den>``."""
    lines = []
    for e in host_expressions(verify(cert)):
        ref = f" [ref H{e.host.cross_ref}]" if e.host.cross_ref else ""
        lines.append(f"H{e.host.index} {e.host.graph6}{ref}: ({e.text})/{e.denominator}")
    return "\n".join(lines) + "\n"


def max_density_bound(l: int, family: ForbiddenFamily, target: Graph) -> Fraction:
    """max over hosts of d_A(H), the bound with no quadratic-form terms.

    Raises:
        SizeError: Unless |V(target)| <= l <= 8.
    """
    if not target.n <= l <= MAX_CANONICAL:
        raise SizeError(f"Need |V(A)| <= l <= {MAX_CANONICAL}, got |V(A)| = {target.n}, l = {l}")
    return max(induced_density(h, target) for h in enumerate_free_graphs(l, family))


def zero_certificate(l: int, family: ForbiddenFamily, target: Graph, claimed_bound: Fraction) -> Certificate:
    """Certificate with no types; verifies the plain maximum-density bound."""
    return Certificate(family=family, target=target, l=l, types=(), claimed_bound=claimed_bound)
