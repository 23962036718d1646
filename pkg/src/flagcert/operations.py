"""Shared business logic for flagcert commands.

Every function returns a JSON-serialisable dict with exact values written
as ``num/den`` strings; the CLI renders them as text or prints them as JSON.
"""

from fractions import Fraction
from pathlib import Path

from flagcert.blowup import (
    BlowupSpec,
    blow_up,
    blowup_limit_density,
    density_trend,
    erdos_check,
    parse_factors,
    reduction_demo,
)
from flagcert.certificate import (
    Certificate,
    dump_certificate,
    host_expressions,
    load_certificate,
    load_shipped_certificate,
    max_density_bound,
    verify,
)
from flagcert.config import Settings
from flagcert.errors import ArgumentError
from flagcert.flags import enumerate_flags, named_type
from flagcert.formatting import approx, format_polynomial, format_vector
from flagcert.graphs import (
    canonical_form,
    enumerate_free_graphs,
    named_family,
    named_graph,
    write_graph6,
)
from flagcert.linalg import char_poly, descartes_nonnegative, format_rational, parse_rational
from flagcert.sdp import (
    RoundingPolicy,
    emit_sdp,
    exact_sidecar,
    parse_boost,
    read_solver_matrices,
    round_solution,
    sdp_problem_for,
)
from flagcert.storage import store_report, write_output

DEFAULT_FORBID = ["k3"]


def _certificate(path: str | None) -> Certificate:
    """Load a certificate file, or the shipped one when ``path`` is None."""
    return load_certificate(path) if path else load_shipped_certificate()


def _with_approx(value: Fraction, digits: int | None) -> dict:
    out = {"exact": format_rational(value)}
    if digits is not None:
        out["approx"] = approx(value, digits)
    return out


# =============================================================================
# Graphs and flags
# =============================================================================


def enumerate_hosts(order: int, forbid: list[str]) -> dict:
    """All forbid-free graphs on ``order`` vertices.

    Args:
        order: Number of vertices (1..8)
        forbid: Forbidden graph specs (keywords or graph6)

    Returns:
        Dict with the family, count and hosts in deterministic order.
    """
    family = named_family(forbid)
    hosts = enumerate_free_graphs(order, family)
    return {
        "order": order,
        "family": family.graph6(),
        "count": len(hosts),
        "hosts": [
            {"index": i, "graph6": write_graph6(h), "edges": h.edge_count}
            for i, h in enumerate(hosts, start=1)
        ],
    }


def list_flags(type_spec: str, m: int, forbid: list[str]) -> dict:
    """Admissible flags of a type.

    Args:
        type_spec: ``sigma0``/``sigma1``/``sigma2``, a graph spec, or ``<graph6>:<labels>``
        m: Flag order
        forbid: Forbidden graph specs

    Returns:
        Dict with one record per flag (graph6, 1-based labels, labels adjacent
        to each unlabelled vertex).
    """
    t = named_type(type_spec)
    family = named_family(forbid)
    basis = enumerate_flags(t, m, family)
    flags = []
    for i, f in enumerate(basis, start=1):
        extra = [v for v in range(f.m) if v not in f.labels]
        flags.append({
            "index": i,
            **f.to_record(),
            "edges": f.edge_count,
            "neighbourLabels": [
                [k + 1 for k in range(t.size) if (f.extension_mask(v) >> k) & 1] for v in extra
            ],
        })
    return {
        "type": write_graph6(t.graph),
        "typeName": str(t),
        "m": m,
        "family": family.graph6(),
        "count": len(basis),
        "flags": flags,
    }


def density_bound(order: int, forbid: list[str], target: str) -> dict:
    """max over hosts of d_A(H), the bound with no flag terms."""
    family = named_family(forbid)
    a = named_graph(target)
    return {
        "order": order,
        "family": family.graph6(),
        "target": write_graph6(a),
        "bound": format_rational(max_density_bound(order, family, a)),
    }


# =============================================================================
# Certificates
# =============================================================================


def pair_tables(cert_path: str | None = None, host: str | None = None) -> dict:
    """Pair-density tables of a certificate's bases on every host (or one host).

    Args:
        cert_path: Certificate file; the shipped certificate when None
        host: Restrict to the host given by 1-based index or graph spec

    Returns:
        Dict with, per host, the nonzero entries ``[a, b, "num/den"]`` per type.
    """
    cert = _certificate(cert_path)
    report = verify(cert)
    records = list(report.hosts)
    if host is not None:
        records = [_select_host(records, host, cert)]
    return {
        "l": cert.l,
        "hosts": [
            {
                "index": r.index,
                "graph6": r.graph6,
                "ref": r.cross_ref,
                "types": [
                    {
                        "type": write_graph6(t.basis.type.graph),
                        "configurations": t.configurations,
                        "total": format_rational(t.total()),
                        "entries": [line.split() for line in t.to_lines()],
                    }
                    for t in r.tables
                ],
            }
            for r in records
        ],
        "warnings": cert.warnings,
    }


def _select_host(records, spec: str, cert: Certificate):
    if spec.isdigit():
        k = int(spec)
        if not 1 <= k <= len(records):
            raise ArgumentError(f"Host index {k} outside 1..{len(records)}")
        return records[k - 1]
    g = named_graph(spec)
    if g.n != cert.l:
        raise ArgumentError(f"Host must have {cert.l} vertices, got {g.n}")
    form = canonical_form(g)
    for r in records:
        if canonical_form(r.graph) == form:
            return r
    raise ArgumentError(f"{write_graph6(g)} is not a host graph")


def expressions(cert_path: str | None = None) -> dict:
    """Symbolic b_H per host, symmetric entries merged, over a common denominator."""
    cert = _certificate(cert_path)
    exprs = host_expressions(verify(cert))
    return {
        "denominator": exprs[0].denominator if exprs else 1,
        "hosts": [
            {"index": e.host.index, "graph6": e.host.graph6, "ref": e.host.cross_ref, "expression": e.text}
            for e in exprs
        ],
        "warnings": cert.warnings,
    }


def _psd_record(block, verdict) -> dict:
    record = {
        "type": write_graph6(block.type.graph),
        "m": block.m,
        "dim": block.matrix.dim,
        "psd": verdict.is_psd,
    }
    if verdict.is_psd:
        record["pivots"] = [format_rational(p) for p in verdict.pivots]
    else:
        record["witness"] = format_vector(verdict.witness)
        record["witnessValue"] = format_rational(verdict.witness_value)
    if block.matrix.dim <= 10:
        poly = char_poly(block.matrix)
        record["charpoly"] = format_polynomial(poly.coefficients)
        record["descartes"] = descartes_nonnegative(poly.coefficients)
    return record


def verify_certificate(cert_path: str | None = None, digits: int | None = None) -> dict:
    """Full exact verification.

    Args:
        cert_path: Certificate file; the shipped certificate when None
        digits: Add decimal annotations with this many digits

    Returns:
        Dict with the verdict, the bound, PSD records and per-host values.
    """
    cert = _certificate(cert_path)
    report = verify(cert)
    return {
        "passed": report.passed,
        "bound": _with_approx(report.bound, digits),
        "claimedBound": format_rational(cert.claimed_bound),
        "target": write_graph6(cert.target),
        "family": cert.family.graph6(),
        "l": cert.l,
        "psd": [_psd_record(b, v) for b, v in zip(cert.types, report.psd)],
        "hosts": [
            {
                "index": h.index,
                "graph6": h.graph6,
                "ref": h.cross_ref,
                "density": format_rational(h.density),
                "contributions": [format_rational(c) for c in h.contributions],
                "total": _with_approx(h.total, digits),
            }
            for h in report.hosts
        ],
        "maximizers": [h.index for h in report.maximizers],
        "warnings": cert.warnings,
    }


# =============================================================================
# Blow-ups
# =============================================================================


def blowup(base: str, factors: str) -> dict:
    g = named_graph(base)
    spec = BlowupSpec(g, parse_factors(factors, g))
    h = blow_up(spec)
    return {
        "base": write_graph6(g),
        "factors": list(spec.factors),
        "graph6": write_graph6(h),
        "n": h.n,
        "edges": h.edge_count,
    }


def pentagon_check(graph: str) -> dict:
    """Pentagon count of a triangle-free graph against (n/5)^5."""
    g = named_graph(graph)
    check = erdos_check(g)
    return {
        "graph6": write_graph6(g),
        "n": g.n,
        "count": check.count,
        "cap": format_rational(check.cap),
        "verdict": check.verdict.value,
        "limitDensity": format_rational(blowup_limit_density(g)),
        "summary": str(check),
    }


def trend(base: str, target: str, n_max: int, digits: int | None = None) -> dict:
    g = named_graph(base)
    a = named_graph(target)
    return {
        "base": write_graph6(g),
        "target": write_graph6(a),
        "densities": [{"N": n, "density": _with_approx(d, digits)} for n, d in density_trend(g, a, n_max)],
    }


def demo(graph: str) -> dict:
    g = named_graph(graph)
    return {"graph6": write_graph6(g), "report": reduction_demo(g)}


# =============================================================================
# SDP bridge
# =============================================================================


def emit(cert_path: str | None = None, output: str | None = None) -> dict:
    """SDPA text for the certificate's setup; with ``output`` also writes an exact sidecar.

    Returns:
        Dict with the SDPA text (or the written paths) and the problem shape.
    """
    cert = _certificate(cert_path)
    problem = sdp_problem_for(cert)
    text = emit_sdp(problem)
    result = {
        "constraints": problem.constraint_count,
        "blockSizes": list(problem.block_sizes),
    }
    if output:
        path = write_output(output, text)
        sidecar, _ = store_report(
            "emit-sdp",
            {"certificate": cert_path or "shipped"},
            exact_sidecar(problem),
            output_path=path.with_suffix(".exact.json"),
        )
        result.update({"output": str(path), "sidecar": str(sidecar)})
    else:
        result["sdpa"] = text
    return result


def round_matrices(
    matrices_path: str,
    cert_path: str | None = None,
    settings: Settings | None = None,
    target_bound: str | None = None,
    output: str | None = None,
) -> dict:
    """Round solver matrices on the denominator ladder, then by continued fractions, and verify exactly.

    Args:
        matrices_path: Plain-text solver matrices, one block per type
        cert_path: Skeleton certificate (bases, family, target, l)
        settings: Ladder, continued-fraction cap and diagonal boost
        target_bound: Only accept certificates proving at most this bound
        output: Write the certified certificate here

    Returns:
        Dict with success, the certified bound and every attempt.
    """
    settings = settings or Settings()
    skeleton = _certificate(cert_path)
    try:
        text = Path(matrices_path).read_text()
    except OSError as e:
        raise ArgumentError(f"Cannot read {matrices_path}: {e.strerror}")
    policy = RoundingPolicy(
        denominators=tuple(settings.denominators),
        diagonal_boost=parse_boost(settings.diagonal_boost),
        target_bound=parse_rational(target_bound) if target_bound else None,
        max_denominator=settings.max_denominator,
    )
    outcome = round_solution(read_solver_matrices(text), policy, skeleton)
    attempts = [
        {
            "method": a.method,
            "denominator": a.denominator,
            "bound": format_rational(a.bound),
            "failure": a.reason,
            "witnesses": [
                {"type": i + 1, "witness": format_vector(v.witness), "value": format_rational(v.witness_value)}
                for i, v in enumerate(a.psd)
                if not v.is_psd
            ],
        }
        for a in outcome.attempts
    ]
    result = {
        "success": outcome.succeeded,
        "attempts": attempts,
    }
    if outcome.succeeded:
        result["denominator"] = outcome.denominator
        result["bound"] = format_rational(outcome.report.bound)
        cert_text = dump_certificate(outcome.certificate)
        if output:
            write_output(output, cert_text)
            result["output"] = output
        else:
            result["certificate"] = cert_text
    else:
        best = outcome.best_uncertified_bound
        result["bestUncertifiedBound"] = format_rational(best) if best is not None else None
    return result


def save_report(data: dict, command: str, params: dict, settings: Settings) -> str:
    """Store a command result under the configured storage directory and return its path."""
    path, _ = store_report(command, params, data, storage_dir=settings.storage_dir)
    return str(path)
