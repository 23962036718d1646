"""SDP export and rounding of floating solver output back to exact certificates.

The search problem is written in SDPA sparse form as the dual

    max <F0, Y>  s.t.  <F_H, Y> = c_H  for every host H,  Y PSD,

with Y = diag(Q_1, ..., Q_t, D) and D diagonal holding one slack s_H per
host followed by lambda+ and lambda-. Row H reads

    sum_i <T_H^i, Q_i> + s_H - lambda+ + lambda- = -d_A(H),

so d_A(H) + sum_i c_H(i) <= lambda+ - lambda-, and the objective
-lambda+ + lambda- minimises the bound.

lambda+ and lambda- sit in the same diagonal block as the slacks instead of
two separate 1x1 blocks. SDPA reads a negative block size as that many 1x1
blocks, so both layouts state the same problem; block sizes end in -(h + 2).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from flagcert.certificate import Certificate, TypeBlock, VerificationReport, verify
from flagcert.errors import ArgumentError, SizeError
from flagcert.flags import FlagBasis, PairDensityTable, pair_density_table
from flagcert.graphs import ForbiddenFamily, Graph, enumerate_free_graphs, induced_density, write_graph6
from flagcert.linalg import PsdVerdict, RationalMatrix, format_rational

LADDER = "ladder"
CONTINUED_FRACTION = "continued-fraction"


@dataclass(frozen=True)
class SdpProblem:
    """One PSD block per flag basis plus the diagonal slack/bound block; one row per host."""

    l: int
    family: ForbiddenFamily
    target: Graph
    bases: tuple[FlagBasis, ...]
    hosts: tuple[Graph, ...]
    densities: tuple[Fraction, ...]
    tables: tuple[tuple[PairDensityTable, ...], ...]

    @property
    def constraint_count(self) -> int:
        return len(self.hosts)

    @property
    def block_sizes(self) -> tuple[int, ...]:
        """SDPA block structure; the last, negative entry is the diagonal block."""
        return tuple(len(b) for b in self.bases) + (-(len(self.hosts) + 2),)


def build_sdp_problem(
    l: int,
    family: ForbiddenFamily,
    target: Graph,
    bases: Sequence[FlagBasis],
) -> SdpProblem:
    """Collect hosts, target densities and pair-density tables for export.

    Raises:
        SizeError: If a basis violates m <= (l + |sigma|)/2 or |V(target)| > l.
    """
    if target.n > l:
        raise SizeError(f"Target has {target.n} vertices, more than l = {l}")
    for basis in bases:
        if 2 * basis.m > l + basis.type.size:
            raise SizeError(f"m = {basis.m} violates m <= (l + |sigma|)/2 for type {basis.type}")
    hosts = tuple(enumerate_free_graphs(l, family))
    return SdpProblem(
        l=l,
        family=family,
        target=target,
        bases=tuple(bases),
        hosts=hosts,
        densities=tuple(induced_density(h, target) for h in hosts),
        tables=tuple(tuple(pair_density_table(b, h) for b in bases) for h in hosts),
    )


def sdp_problem_for(cert: Certificate) -> SdpProblem:
    return build_sdp_problem(cert.l, cert.family, cert.target, [block.basis for block in cert.types])


def _number(value: Fraction | int) -> str:
    """Shortest round-trip decimal of the nearest double."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return repr(float(value))


def sdp_entries(problem: SdpProblem) -> list[tuple[int, int, int, int, Fraction]]:
    """(matrix, block, row, col, value) for every nonzero upper-triangle entry, 1-based.

    Matrix 0 is F0; matrix k is the constraint row of host k.
    """
    slack_block = len(problem.bases) + 1
    lam = len(problem.hosts) + 1
    entries: list[tuple[int, int, int, int, Fraction]] = [
        (0, slack_block, lam, lam, Fraction(-1)),
        (0, slack_block, lam + 1, lam + 1, Fraction(1)),
    ]
    for k, tables in enumerate(problem.tables, start=1):
        for block, table in enumerate(tables, start=1):
            size = len(table.basis)
            for a in range(size):
                for b in range(a, size):
                    value = table.entry(a, b)
                    if value:
                        entries.append((k, block, a + 1, b + 1, value))
        entries.append((k, slack_block, k, k, Fraction(1)))
        entries.append((k, slack_block, lam, lam, Fraction(-1)))
        entries.append((k, slack_block, lam + 1, lam + 1, Fraction(1)))
    return entries


def emit_sdp(problem: SdpProblem) -> str:
    """SDPA sparse text; ``*`` comment lines document blocks, flags and hosts."""
    lines = [
        "* flagcert: minimise lambda subject to d_A(H) + sum_i <T_H^i, Q_i> <= lambda for every host H",
        f"* target {write_graph6(problem.target)}, forbidden {' '.join(problem.family.graph6())}, l = {problem.l}",
    ]
    for i, basis in enumerate(problem.bases, start=1):
        lines.append(f"* block {i}: type {write_graph6(basis.type.graph)}, m = {basis.m}, {len(basis)} flags")
        for a, flag in enumerate(basis, start=1):
            lines.append(f"*   {a}: {flag}")
    slack = len(problem.bases) + 1
    n_hosts = len(problem.hosts)
    lines.append(
        f"* block {slack}: diagonal, entries 1..{n_hosts} slacks, "
        f"{n_hosts + 1} lambda+, {n_hosts + 2} lambda-"
    )
    for k, host in enumerate(problem.hosts, start=1):
        lines.append(f"* constraint {k}: host {write_graph6(host)}, d_A = {format_rational(problem.densities[k - 1])}")

    lines.append(str(problem.constraint_count))
    lines.append(str(len(problem.block_sizes)))
    lines.append(" ".join(str(s) for s in problem.block_sizes))
    lines.append(" ".join(_number(-d) for d in problem.densities))
    for matrix, block, row, col, value in sdp_entries(problem):
        lines.append(f"{matrix} {block} {row} {col} {_number(value)}")
    return "\n".join(lines) + "\n"


def exact_sidecar(problem: SdpProblem) -> dict:
    """The same problem with exact ``num/den`` values, for the JSON sidecar."""
    return {
        "l": problem.l,
        "family": problem.family.graph6(),
        "target": write_graph6(problem.target),
        "blockSizes": list(problem.block_sizes),
        "types": [
            {
                "type": write_graph6(b.type.graph),
                "m": b.m,
                "flags": [f.to_record() for f in b],
            }
            for b in problem.bases
        ],
        "hosts": [write_graph6(h) for h in problem.hosts],
        "c": [format_rational(-d) for d in problem.densities],
        "entries": [
            [matrix, block, row, col, format_rational(value)]
            for matrix, block, row, col, value in sdp_entries(problem)
        ],
    }


# =============================================================================
# Solver output and rounding
# =============================================================================


def read_solver_matrices(text: str) -> list[np.ndarray]:
    """Parse whitespace-separated square matrices separated by blank lines.

    Lines starting with ``#`` or ``*`` are ignored.

    Raises:
        ArgumentError: On ragged, non-square or asymmetric blocks.
    """
    blocks: list[list[list[float]]] = []
    current: list[list[float]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped.startswith(("#", "*")):
            continue
        if not stripped:
            if current:
                blocks.append(current)
                current = []
            continue
        try:
            current.append([float(x) for x in stripped.replace(",", " ").split()])
        except ValueError:
            raise ArgumentError(f"Line {lineno}: not a row of numbers")
    if current:
        blocks.append(current)

    matrices = []
    for i, rows in enumerate(blocks, start=1):
        if any(len(r) != len(rows) for r in rows):
            raise ArgumentError(f"Block {i} is not square ({len(rows)} rows)")
        m = np.array(rows, dtype=float)
        _require_symmetric(m, f"Block {i}")
        matrices.append(m)
    return matrices


def _require_symmetric(m: np.ndarray, what: str) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ArgumentError(f"{what} is not a square matrix")
    if not np.allclose(m, m.T, rtol=1e-9, atol=1e-9):
        raise ArgumentError(f"{what} is not symmetric")


@dataclass(frozen=True)
class RoundingPolicy:
    """Denominator ladder, continued-fraction cap, optional diagonal boost mu and bound to reach.

    ``max_denominator`` of None skips the continued-fraction stage after the ladder.
    """

    denominators: tuple[int, ...] = (625, 2500, 12500, 62500)
    diagonal_boost: Fraction = Fraction(0)
    target_bound: Fraction | None = None
    max_denominator: int | None = 1_000_000

    def __post_init__(self) -> None:
        if not self.denominators or any(d <= 0 for d in self.denominators):
            raise ArgumentError("Rounding denominators must be positive integers")
        if self.diagonal_boost < 0:
            raise ArgumentError("Diagonal boost must be >= 0")
        if self.max_denominator is not None and self.max_denominator < 1:
            raise ArgumentError("Continued-fraction denominator cap must be >= 1")
        object.__setattr__(self, "denominators", tuple(sorted(set(self.denominators))))


@dataclass(frozen=True)
class RoundingAttempt:
    """One rounding of all matrices; ``denominator`` is the common denominator of the entries."""

    denominator: int
    bound: Fraction
    psd: tuple[PsdVerdict, ...]
    reason: str | None
    method: str = LADDER

    @property
    def succeeded(self) -> bool:
        return self.reason is None


@dataclass(frozen=True)
class RoundingOutcome:
    """First verified certificate on the ladder, or the record of every failed attempt."""

    certificate: Certificate | None
    report: VerificationReport | None
    attempts: tuple[RoundingAttempt, ...] = field(default_factory=tuple)

    @property
    def succeeded(self) -> bool:
        return self.certificate is not None

    @property
    def denominator(self) -> int | None:
        return self.attempts[-1].denominator if self.succeeded else None

    @property
    def failures(self) -> tuple[RoundingAttempt, ...]:
        return tuple(a for a in self.attempts if not a.succeeded)

    @property
    def best_uncertified_bound(self) -> Fraction | None:
        bounds = [a.bound for a in self.failures]
        return min(bounds) if bounds else None


def round_matrix(m: np.ndarray, denominator: int, boost: Fraction = Fraction(0)) -> RationalMatrix:
    """Nearest multiples of 1/d, symmetrised exactly, plus mu·I."""
    scaled = np.rint(np.asarray(m, dtype=float) * denominator).astype(np.int64)
    n = scaled.shape[0]
    return RationalMatrix(
        tuple(
            tuple(
                Fraction(int(scaled[a, b]) + int(scaled[b, a]), 2 * denominator) + (boost if a == b else 0)
                for b in range(n)
            )
            for a in range(n)
        )
    )


def round_matrix_limited(m: np.ndarray, max_denominator: int, boost: Fraction = Fraction(0)) -> RationalMatrix:
    """Best rational approximations with denominator <= cap, symmetrised exactly, plus mu·I."""
    arr = np.asarray(m, dtype=float)
    n = arr.shape[0]
    near = [[Fraction(float(arr[a, b])).limit_denominator(max_denominator) for b in range(n)] for a in range(n)]
    return RationalMatrix(
        tuple(
            tuple((near[a][b] + near[b][a]) / 2 + (boost if a == b else 0) for b in range(n))
            for a in range(n)
        )
    )


def _common_denominator(matrices: Sequence[RationalMatrix]) -> int:
    return math.lcm(1, *(x.denominator for m in matrices for row in m.rows for x in row))


def round_solution(
    float_matrices: Sequence[np.ndarray],
    policy: RoundingPolicy,
    skeleton: Certificate,
) -> RoundingOutcome:
    """Round solver matrices on each denominator of the ladder and verify exactly.

    When every rung fails and the policy has a ``max_denominator``, each entry
    is replaced by its best approximation with bounded denominator and checked
    the same way, as a last attempt.

    ``skeleton`` supplies family, target, l and the flag bases; its matrices
    are ignored. The returned certificate has passed ``verify``; its claimed
    bound is the policy's target bound, or the certified bound if none.

    Raises:
        ArgumentError: If the matrices do not match the skeleton's bases.
    """
    if len(float_matrices) != len(skeleton.types):
        raise ArgumentError(f"Got {len(float_matrices)} matrices for {len(skeleton.types)} types")
    arrays = []
    for i, (m, block) in enumerate(zip(float_matrices, skeleton.types), start=1):
        m = np.asarray(m, dtype=float)
        _require_symmetric(m, f"Matrix {i}")
        if m.shape[0] != len(block.basis):
            raise ArgumentError(f"Matrix {i} is {m.shape[0]}x{m.shape[0]} but type {i} has {len(block.basis)} flags")
        arrays.append(m)

    candidates = [
        (LADDER, d, [round_matrix(m, d, policy.diagonal_boost) for m in arrays]) for d in policy.denominators
    ]
    if policy.max_denominator is not None:
        limited = [round_matrix_limited(m, policy.max_denominator, policy.diagonal_boost) for m in arrays]
        candidates.append((CONTINUED_FRACTION, _common_denominator(limited), limited))

    attempts: list[RoundingAttempt] = []
    for method, d, matrices in candidates:
        blocks = tuple(TypeBlock(block.basis, q) for q, block in zip(matrices, skeleton.types))
        candidate = dataclasses.replace(skeleton, types=blocks, warnings=list(skeleton.warnings))
        report = verify(candidate)
        bound = report.bound
        reason = None
        if not report.all_psd:
            failed = [i + 1 for i, v in enumerate(report.psd) if not v.is_psd]
            reason = f"matrix {', '.join(map(str, failed))} not PSD"
        elif policy.target_bound is not None and bound > policy.target_bound:
            reason = f"bound {format_rational(bound)} above target {format_rational(policy.target_bound)}"
        attempts.append(RoundingAttempt(d, bound, report.psd, reason, method))
        if reason is None:
            claimed = policy.target_bound if policy.target_bound is not None else bound
            certified = dataclasses.replace(candidate, claimed_bound=claimed)
            return RoundingOutcome(certified, dataclasses.replace(report, certificate=certified), tuple(attempts))
    return RoundingOutcome(None, None, tuple(attempts))


def parse_boost(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ArgumentError(f"Invalid diagonal boost: {text!r}")
