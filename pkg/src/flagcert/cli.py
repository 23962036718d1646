"""flagcert CLI - Thin wrapper around operations module."""

import json
import sys
from functools import wraps
from typing import Annotated, Callable

import typer
from rich.console import Console

from flagcert import __version__
from flagcert import operations
from flagcert import reporting
from flagcert.config import load_settings, parse_denominators
from flagcert.errors import FlagcertError

# Main app
app = typer.Typer(
    name="flagcert",
    help="flagcert - Exact flag-algebra certificates for Turán-type density bounds.",
    no_args_is_help=True,
    add_completion=False,
    pretty_exceptions_show_locals=False,
)

# Narration and warnings; stdout carries results only
console = Console(stderr=True, highlight=False)

USAGE_ERROR = 2
FAILED = 1


def output_json(data: dict) -> None:
    """Output JSON to stdout."""
    print(json.dumps(data, indent=2, default=str))


def output_lines(lines: list[str]) -> None:
    print("\n".join(lines))


def output_error(message: str, exit_code: int = USAGE_ERROR) -> None:
    """Output error and exit."""
    print(json.dumps({"error": message}), file=sys.stderr)
    raise typer.Exit(exit_code)


def warn(message: str) -> None:
    console.print(f"[flagcert] {message}", markup=False)


def flagcert_command(func: Callable) -> Callable:
    """Decorator to handle common error patterns for flagcert commands."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (FlagcertError, ValueError) as e:
            output_error(str(e))
    return wrapper


def _emit_warnings(data: dict) -> None:
    for w in data.get("warnings", []):
        warn(f"warning: {w}")


def _digits(approx: bool) -> int | None:
    return load_settings().approx_digits if approx else None


def version_callback(value: bool) -> None:
    """Print version and exit."""
    if value:
        output_json({"version": __version__})
        raise typer.Exit()


@app.callback()
def main(
    version: Annotated[
        bool | None,
        typer.Option(
            "--version", "-v",
            help="Show version and exit.",
            callback=version_callback,
            is_eager=True,
        ),
    ] = None,
) -> None:
    """flagcert - Enumerate hosts and flags, verify certificates, export SDPs."""


Forbid = Annotated[
    list[str] | None,
    typer.Option("--forbid", "-f", help="Forbidden graph (keyword like k3 or graph6); repeatable. Default: k3"),
]
JsonFlag = Annotated[bool, typer.Option("--json", help="Print the machine-readable result as JSON only")]
ApproxFlag = Annotated[bool, typer.Option("--approx", help="Annotate exact values with decimals")]
CertArg = Annotated[
    str | None,
    typer.Argument(help="Certificate JSON file (default: the shipped pentagon certificate)"),
]


# =============================================================================
# Graphs and flags
# =============================================================================


@app.command("enumerate")
@flagcert_command
def enumerate_cmd(
    order: Annotated[int, typer.Option("--order", "-l", help="Number of vertices (1..8)")] = 5,
    forbid: Forbid = None,
    as_json: JsonFlag = False,
) -> None:
    """List all forbidden-subgraph-free graphs of an order, one graph6 per line."""
    data = operations.enumerate_hosts(order, forbid or operations.DEFAULT_FORBID)
    if as_json:
        output_json(data)
    else:
        output_lines(reporting.render_hosts(data))


@app.command("flags")
@flagcert_command
def flags_cmd(
    type_spec: Annotated[
        str, typer.Option("--type", "-t", help="sigma0 | sigma1 | sigma2 | <graph6> | <graph6>:<labels>")
    ] = "sigma0",
    m: Annotated[int, typer.Option("--m", "-m", help="Flag order")] = 4,
    forbid: Forbid = None,
    as_json: JsonFlag = False,
) -> None:
    """List the admissible flags of a type."""
    data = operations.list_flags(type_spec, m, forbid or operations.DEFAULT_FORBID)
    if as_json:
        output_json(data)
    else:
        output_lines(reporting.render_flags(data))


@app.command("bound")
@flagcert_command
def bound_cmd(
    order: Annotated[int, typer.Option("--order", "-l", help="Host order")] = 5,
    forbid: Forbid = None,
    target: Annotated[str, typer.Option("--target", "-a", help="Target graph A")] = "c5",
    as_json: JsonFlag = False,
) -> None:
    """Plain bound max_H d_A(H), without flag terms."""
    data = operations.density_bound(order, forbid or operations.DEFAULT_FORBID, target)
    if as_json:
        output_json(data)
    else:
        output_lines([f"@bound {data['bound']}"])


# =============================================================================
# Certificates
# =============================================================================


@app.command("tables")
@flagcert_command
def tables_cmd(
    cert: CertArg = None,
    host: Annotated[str | None, typer.Option("--host", help="Only this host (1-based index or graph)")] = None,
    as_json: JsonFlag = False,
) -> None:
    """Exact pair-density tables, one 'a b num/den' line per nonzero entry."""
    data = operations.pair_tables(cert, host)
    _emit_warnings(data)
    if as_json:
        output_json(data)
    else:
        output_lines(reporting.render_tables(data))


@app.command("expressions")
@flagcert_command
def expressions_cmd(cert: CertArg = None, as_json: JsonFlag = False) -> None:
    """Per-host bound as a linear form in the matrix entries."""
    data = operations.expressions(cert)
    _emit_warnings(data)
    if as_json:
        output_json(data)
    else:
        output_lines(reporting.render_expressions(data))


@app.command("verify")
@flagcert_command
def verify_cmd(
    cert: CertArg = None,
    approx: ApproxFlag = False,
    save: Annotated[bool, typer.Option("--save", help="Also save the JSON report to the storage directory")] = False,
    as_json: JsonFlag = False,
) -> None:
    """Verify a certificate exactly; exit 0 on pass, 1 on fail."""
    data = operations.verify_certificate(cert, _digits(approx))
    _emit_warnings(data)
    if as_json:
        output_json(data)
    else:
        output_lines(reporting.render_verification(data))
    if save:
        path = operations.save_report(data, "verify", {"certificate": cert or "shipped"}, load_settings())
        warn(f"report saved to {path}")
    if not data["passed"]:
        raise typer.Exit(FAILED)


# =============================================================================
# Blow-ups
# =============================================================================


@app.command("blowup")
@flagcert_command
def blowup_cmd(
    base: Annotated[str, typer.Option("--base", "-b", help="Base graph")] = "c5",
    factor: Annotated[str, typer.Option("--factor", "--factors", "-n", help="N, or per-vertex a,b,c,...")] = "2",
    as_json: JsonFlag = False,
) -> None:
    """Blow up a graph; prints the graph6 of the result."""
    data = operations.blowup(base, factor)
    if as_json:
        output_json(data)
    else:
        output_lines([data["graph6"]])


@app.command("erdos-check")
@flagcert_command
def erdos_check_cmd(
    graph: Annotated[str, typer.Option("--graph", "-g", help="Triangle-free graph")] = "c5",
    as_json: JsonFlag = False,
) -> None:
    """Compare the pentagon count of a triangle-free graph with (n/5)^5."""
    data = operations.pentagon_check(graph)
    if as_json:
        output_json(data)
    else:
        output_lines([data["summary"]])
    if data["verdict"] == "VIOLATION":
        raise typer.Exit(FAILED)


@app.command("trend")
@flagcert_command
def trend_cmd(
    base: Annotated[str, typer.Option("--base", "-b", help="Base graph")] = "c5",
    target: Annotated[str, typer.Option("--target", "-a", help="Target graph A")] = "c5",
    n_max: Annotated[int, typer.Option("--n-max", "-n", help="Largest blow-up factor")] = 3,
    approx: ApproxFlag = False,
    as_json: JsonFlag = False,
) -> None:
    """Exact A-densities of the uniform blow-ups N = 1..n-max."""
    data = operations.trend(base, target, n_max, _digits(approx))
    if as_json:
        output_json(data)
    else:
        output_lines(reporting.render_trend(data))


@app.command("demo")
@flagcert_command
def demo_cmd(
    graph: Annotated[str, typer.Option("--graph", "-g", help="Triangle-free graph")] = "c5",
) -> None:
    """Walk through the pentagon-count reduction for one graph."""
    print(operations.demo(graph)["report"], end="")


# =============================================================================
# SDP bridge
# =============================================================================


@app.command("emit-sdp")
@flagcert_command
def emit_sdp_cmd(
    cert: CertArg = None,
    output: Annotated[
        str | None, typer.Option("--output", "-o", help="Write .dat-s here plus an exact JSON sidecar")
    ] = None,
) -> None:
    """Export the certificate-search problem in SDPA sparse format."""
    data = operations.emit(cert, output)
    if output:
        output_json(data)
    else:
        print(data["sdpa"], end="")


@app.command("round")
@flagcert_command
def round_cmd(
    matrices: Annotated[str, typer.Argument(help="Solver matrices: one whitespace block per type")],
    cert: Annotated[str | None, typer.Option("--cert", help="Skeleton certificate (default: shipped)")] = None,
    denominators: Annotated[
        str | None, typer.Option("--denominators", "-d", help="Ladder like 625,2500")
    ] = None,
    boost: Annotated[str | None, typer.Option("--boost", help="Rational mu added as mu*I")] = None,
    max_denominator: Annotated[
        int | None, typer.Option("--max-denominator", help="Cap for the continued-fraction stage after the ladder")
    ] = None,
    target_bound: Annotated[
        str | None, typer.Option("--target-bound", help="Accept only certificates proving this bound")
    ] = None,
    output: Annotated[str | None, typer.Option("--output", "-o", help="Write the certificate here")] = None,
    as_json: JsonFlag = False,
) -> None:
    """Round solver output to exact matrices and verify; exit 1 if nothing verifies."""
    settings = load_settings(
        denominators=parse_denominators(denominators) if denominators else None,
        diagonal_boost=boost,
        max_denominator=max_denominator,
    )
    data = operations.round_matrices(matrices, cert, settings, target_bound, output)
    if as_json:
        output_json(data)
    else:
        output_lines(reporting.render_round(data))
        if data["success"] and not output:
            print(data["certificate"], end="")
    if not data["success"]:
        raise typer.Exit(FAILED)


def main_cli() -> None:
    """Entry point for CLI."""
    app()


if __name__ == "__main__":
    main_cli()
