"""Dense simplex over exact or float scalars, with Farkas certificates.

Solves equality-constrained feasibility (find x >= 0 with Ax = b) by Phase-I
simplex on per-row artificial variables, and linear minimization by Phase-II
from the Phase-I basis.  Bland's rule is always on: these systems are tiny
and heavily degenerate, so anti-cycling matters more than pivot counts.  In
exact mode every pivot is a field operation in Q(sqrt2), so "optimum is zero"
and "certificate is valid" are decided without rounding.

Nothing returned here is trusted: feasible points and Farkas certificates are
re-verified by the independent checks at the bottom of this module before the
solver hands them out.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from .scalar import (ExactScalar, MixedBackendError, Scalar, is_exact, sign,
                     zero_like)

#: Pivot-count ceiling; Bland's rule terminates long before this on any
#: problem this library builds, so hitting it means a broken invariant.
MAX_PIVOTS = 200000


class DimensionMismatch(ValueError):
    """Matrix and right-hand side shapes disagree."""


class CyclingDetected(RuntimeError):
    """Internal invariant breach: pivot ceiling hit or output failed audit."""


class Unbounded(RuntimeError):
    """The minimization objective decreases without bound."""


class InfeasibleProblem(RuntimeError):
    """Minimization was asked on an infeasible system; carries the certificate."""

    def __init__(self, certificate: "FarkasCertificate"):
        super().__init__("constraint system is infeasible")
        self.certificate = certificate


@dataclass(frozen=True)
class FarkasCertificate:
    """Row multipliers y proving Ax = b, x >= 0 unsatisfiable.

    Validity means y^T A <= 0 componentwise while y^T b > 0; any x >= 0 with
    Ax = b would force the contradiction 0 < y^T b = y^T A x <= 0.
    """

    y: Tuple[Scalar, ...]


@dataclass(frozen=True)
class LPResult:
    """Outcome of a feasibility solve: a point or a certificate, never both."""

    status: str  # "feasible" | "infeasible"
    x: Optional[Tuple[Scalar, ...]] = None
    certificate: Optional[FarkasCertificate] = None

    @property
    def feasible(self) -> bool:
        return self.status == "feasible"


def _normalize(A: Sequence[Sequence[Scalar]], b: Sequence[Scalar]):
    """Copy inputs, coerce int/Fraction entries, and pick one backend.

    The backend is float when any entry is a float, exact otherwise; mixing
    floats with ExactScalars raises.  Returns (rows, rhs, exact_flag).
    """
    rows = [list(row) for row in A]
    rhs = list(b)
    if len(rows) != len(rhs):
        raise DimensionMismatch(
            f"{len(rows)} constraint rows but {len(rhs)} right-hand sides")
    width = len(rows[0]) if rows else 0
    for row in rows:
        if len(row) != width:
            raise DimensionMismatch("ragged constraint matrix")
    entries = [v for row in rows for v in row] + rhs
    has_float = any(isinstance(v, float) for v in entries)
    has_exact = any(isinstance(v, ExactScalar) for v in entries)
    if has_float and has_exact:
        raise MixedBackendError("constraint system mixes exact and float entries")

    def coerce(v):
        if isinstance(v, (ExactScalar, float)):
            return v
        if isinstance(v, (int, Fraction)):
            return float(v) if has_float else ExactScalar.from_rational(v)
        raise TypeError(f"unsupported matrix entry {v!r}")

    rows = [[coerce(v) for v in row] for row in rows]
    rhs = [coerce(v) for v in rhs]
    return rows, rhs, not has_float


class Tableau:
    """Simplex tableau: constraint rows with rhs, a reduced-cost row, a basis.

    rows[i] has one entry per structural column plus the rhs in the last
    slot.  The objective row stores reduced costs c_j - z_j with -value in
    its rhs slot, so a pivot updates it like any other row.
    """

    def __init__(self, rows: List[List[Scalar]], basis: List[int],
                 cost: List[Scalar]):
        self.rows = rows
        self.basis = basis
        self.ncols = len(rows[0]) - 1 if rows else len(cost)
        self.cost = cost
        self.objective = self._fresh_objective()
        self.pivots = 0

    def _fresh_objective(self) -> List[Scalar]:
        # c_j - sum_i c_basis[i] * rows[i][j], rhs slot gets -objective value
        out = list(self.cost) + [zero_like(self.cost[0])]
        for i, row in enumerate(self.rows):
            weight = self.cost[self.basis[i]]
            if sign(weight) == 0:
                continue
            for j in range(self.ncols + 1):
                out[j] = out[j] - weight * row[j]
        return out

    @property
    def value(self) -> Scalar:
        return -self.objective[-1]

    def pivot(self, row_index: int, col: int):
        rows = self.rows
        head = rows[row_index][col]
        if is_exact(head):
            is_one = head.a == 1 and head.b == 0
        else:
            is_one = head == 1.0
        if not is_one:
            rows[row_index] = [v / head for v in rows[row_index]]
        pivot_row = rows[row_index]
        # only touched cells: zero entries of the pivot row change nothing
        if is_exact(head):
            live = [j for j, v in enumerate(pivot_row) if v.a or v.b]
        else:
            live = [j for j, v in enumerate(pivot_row) if v]
        for target in rows + [self.objective]:
            factor = target[col]
            if target is pivot_row or not factor:
                continue
            for j in live:
                target[j] = target[j] - factor * pivot_row[j]
        self.basis[row_index] = col
        self.pivots += 1
        if self.pivots > MAX_PIVOTS:
            raise CyclingDetected("pivot ceiling exceeded")

    def run(self, allowed_cols: range):
        """Pivot to optimality under Bland's rule; raise Unbounded if needed."""
        while True:
            entering = None
            for j in allowed_cols:
                if sign(self.objective[j]) < 0 and j not in self.basis:
                    entering = j
                    break
            if entering is None:
                return
            leaving = None
            best_ratio = None
            for i, row in enumerate(self.rows):
                coeff = row[entering]
                if sign(coeff) <= 0:
                    continue
                ratio = row[-1] / coeff
                if best_ratio is None or sign(ratio - best_ratio) < 0:
                    best_ratio = ratio
                    leaving = i
                elif sign(ratio - best_ratio) == 0 and \
                        self.basis[i] < self.basis[leaving]:
                    leaving = i
            if leaving is None:
                raise Unbounded("entering column has no positive entry")
            self.pivot(leaving, entering)

    def solution(self, ncols: int) -> Tuple[Scalar, ...]:
        zero = zero_like(self.rows[0][0]) if self.rows else 0.0
        x = [zero] * ncols
        for i, col in enumerate(self.basis):
            if col < ncols:
                x[col] = self.rows[i][-1]
        return tuple(x)

    def dump(self) -> str:
        lines = []
        for i, row in enumerate(self.rows):
            cells = "  ".join(str(v) for v in row)
            lines.append(f"x{self.basis[i]:<3} | {cells}")
        lines.append("obj  | " + "  ".join(str(v) for v in self.objective))
        return "\n".join(lines)


def _phase_one(rows, rhs, exact):
    """Build and solve the Phase-I tableau; returns (tableau, flips, n)."""
    m = len(rows)
    n = len(rows[0]) if rows else 0
    one = ExactScalar.from_rational(1) if exact else 1.0
    zero = ExactScalar.from_rational(0) if exact else 0.0
    flips = []
    body = []
    for i in range(m):
        flip = sign(rhs[i]) < 0
        flips.append(flip)
        row = [-v for v in rows[i]] if flip else list(rows[i])
        artificials = [zero] * m
        artificials[i] = one
        body.append(row + artificials + [-rhs[i] if flip else rhs[i]])
    cost = [zero] * n + [one] * m
    tableau = Tableau(body, basis=[n + i for i in range(m)], cost=cost)
    tableau.run(range(n + m))
    return tableau, flips, n


def solve_feasibility(A: Sequence[Sequence[Scalar]],
                      b: Sequence[Scalar]) -> LPResult:
    """Decide Ax = b, x >= 0.

    Feasible answers come with an exact basic point; infeasible answers with
    a Farkas certificate read off the final Phase-I reduced costs.  Both are
    re-verified here before being returned.
    """
    rows, rhs, exact = _normalize(A, b)
    m = len(rows)
    n = len(rows[0]) if rows else 0
    if m == 0:
        return LPResult(status="feasible", x=())
    tableau, flips, _ = _phase_one(rows, rhs, exact)
    if sign(tableau.value) == 0:
        x = tableau.solution(n)
        if not verify_solution(A, b, x):
            raise CyclingDetected("solver returned a point that fails audit")
        return LPResult(status="feasible", x=x)
    one = ExactScalar.from_rational(1) if exact else 1.0
    y = []
    for i in range(m):
        multiplier = one - tableau.objective[n + i]
        y.append(-multiplier if flips[i] else multiplier)
    certificate = FarkasCertificate(y=tuple(y))
    if not verify_certificate(A, b, certificate):
        raise CyclingDetected("solver produced a certificate that fails audit")
    return LPResult(status="infeasible", certificate=certificate)


def solve_min(c: Sequence[Scalar], A: Sequence[Sequence[Scalar]],
              b: Sequence[Scalar]) -> Tuple[Scalar, Tuple[Scalar, ...]]:
    """Minimize c.x subject to Ax = b, x >= 0.

    Runs Phase-I first and raises InfeasibleProblem (with certificate) when
    the region is empty; raises Unbounded when the objective has no minimum.
    Returns the exact optimal value and an optimal vertex.
    """
    rows, rhs, exact = _normalize(A, b)
    m = len(rows)
    n = len(rows[0]) if rows else 0
    if len(c) != n:
        raise DimensionMismatch(f"cost has {len(c)} entries for {n} columns")
    cost, _, cost_exact = _normalize([list(c)], [0 if exact else 0.0])
    cost = cost[0]
    if cost_exact != exact:
        raise MixedBackendError("cost vector backend differs from constraints")
    if m == 0:
        zero = ExactScalar.from_rational(0) if exact else 0.0
        for j in range(n):
            if sign(cost[j]) < 0:
                raise Unbounded("negative cost on an unconstrained column")
        return zero, tuple([zero] * n)
    tableau, flips, _ = _phase_one(rows, rhs, exact)
    if sign(tableau.value) != 0:
        one = ExactScalar.from_rational(1) if exact else 1.0
        y = []
        for i in range(m):
            multiplier = one - tableau.objective[n + i]
            y.append(-multiplier if flips[i] else multiplier)
        certificate = FarkasCertificate(y=tuple(y))
        if not verify_certificate(A, b, certificate):
            raise CyclingDetected("solver produced a certificate that fails audit")
        raise InfeasibleProblem(certificate)

    # drive artificials out of the basis; rows that cannot release one are
    # redundant combinations of other rows and get dropped
    drop = []
    for i in range(m):
        if tableau.basis[i] < n:
            continue
        pivot_col = None
        for j in range(n):
            if j not in tableau.basis and sign(tableau.rows[i][j]) != 0:
                pivot_col = j
                break
        if pivot_col is None:
            drop.append(i)
        else:
            tableau.pivot(i, pivot_col)
    for i in reversed(drop):
        del tableau.rows[i]
        del tableau.basis[i]

    body = [row[:n] + [row[-1]] for row in tableau.rows]
    phase_two = Tableau(body, basis=list(tableau.basis), cost=cost)
    phase_two.run(range(n))
    x = phase_two.solution(n)
    if not verify_solution(A, b, x):
        raise CyclingDetected("optimizer returned a point that fails audit")
    zero = ExactScalar.from_rational(0) if exact else 0.0
    value = zero
    for j in range(n):
        if sign(x[j]) != 0 and sign(cost[j]) != 0:
            value = value + cost[j] * x[j]
    return value, x


def verify_solution(A: Sequence[Sequence[Scalar]], b: Sequence[Scalar],
                    x: Sequence[Scalar]) -> bool:
    """Independent audit of Ax = b and x >= 0 (exact, or within 1e-9)."""
    if any(sign(v) < 0 for v in x):
        return False
    for row, target in zip(A, b):
        total = None
        for coeff, value in zip(row, x):
            term = coeff * value
            total = term if total is None else total + term
        if total is None:
            total = zero_like(target if isinstance(target, (ExactScalar, float))
                              else 0.0)
        if sign(total - target) != 0:
            return False
    return True


def verify_certificate(A: Sequence[Sequence[Scalar]], b: Sequence[Scalar],
                       certificate: FarkasCertificate) -> bool:
    """Independent audit of y^T A <= 0 componentwise and y^T b > 0."""
    y = certificate.y
    if len(y) != len(b):
        return False
    ncols = len(A[0]) if A else 0
    for j in range(ncols):
        total = None
        for i in range(len(y)):
            term = y[i] * A[i][j]
            total = term if total is None else total + term
        if total is not None and sign(total) > 0:
            return False
    total = None
    for i in range(len(y)):
        term = y[i] * b[i]
        total = term if total is None else total + term
    return total is not None and sign(total) > 0
