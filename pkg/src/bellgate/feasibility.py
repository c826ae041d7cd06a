"""LP formulations of the decomposition and locality questions.

Two families of equality-constrained feasibility problems over nonnegative
variables live here.  The decomposition problem asks for per-state measures
over ontic cells that reproduce single-qubit Born statistics while giving
identical mixtures for each listed decomposition of the maximally mixed
state.  The correlation problem asks for a distribution over pairs of
deterministic local strategies reproducing the two-qubit joint table.
Infeasibility certificates of the correlation problem are re-read as
Bell-type inequalities and double-checked by strategy enumeration.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple

from .ontology import (
    EpistemicState,
    OnticSpace,
    OntologicalModel,
    ResponseFunctions,
    Strategy,
    UnknownMeasurement,
    UnknownState,
    all_strategies,
    strategy_key,
)
from .qubit import (
    Scenario,
    TooFewMeasurements,
    bell_joint,
    born_probability,
)
from .scalar import (
    ExactScalar,
    MixedBackendError,
    Scalar,
    compare,
    is_exact,
    scalar_to_json,
    sign,
    to_float,
)
from .simplex import (
    FarkasCertificate,
    LPResult,
    solve_feasibility,
    solve_min,
    verify_certificate,
)

HARD_ROW_KINDS = ("normalization", "decomp")
SOFT_ROW_KINDS = ("born", "joint")


class FloatModeWithExactRequest(ValueError):
    """Exact answers were requested from a float-backed scenario."""


class UnverifiedCertificate(ValueError):
    """A certificate failed its audit and cannot back an inequality."""


def _target_exact(scenario: Scenario, mode: Optional[str]) -> bool:
    if mode is None:
        return scenario.exact
    if mode == "exact":
        if not scenario.exact:
            raise FloatModeWithExactRequest(
                "scenario carries float angles; exact results are unavailable")
        return True
    if mode == "float":
        return False
    raise ValueError(f"unknown mode {mode!r}")


def _field(exact: bool) -> Tuple[Scalar, Scalar, Scalar]:
    if exact:
        return (ExactScalar(Fraction(0), Fraction(0)),
                ExactScalar(Fraction(1, 2), Fraction(0)),
                ExactScalar(Fraction(1), Fraction(0)))
    return 0.0, 0.5, 1.0


def _emit(value: Scalar, exact: bool) -> Scalar:
    return value if exact else to_float(value)


def _lift(value, exact: bool) -> Scalar:
    """Coerce a raw certificate entry into the problem's backend."""
    if exact:
        if isinstance(value, float):
            raise MixedBackendError("float entry in an exact certificate")
        if isinstance(value, ExactScalar):
            return value
        return ExactScalar(Fraction(value), Fraction(0))
    return float(value)


def _cells(count: int, deterministic: bool) -> Tuple[str, ...]:
    alphabet = "01" if deterministic else "0h1"
    return tuple("".join(chars)
                 for chars in itertools.product(alphabet, repeat=count))


def _response_weight(char: str, outcome: int, zero: Scalar, half: Scalar,
                     one: Scalar) -> Scalar:
    if char == "h":
        return half
    return one if char == str(outcome) else zero


@dataclass(frozen=True)
class LPProblem:
    """Equality system Ax = b over x >= 0, with labeled rows and columns.

    Row labels are tuples: ("normalization",) or ("normalization", state),
    ("born", state, measurement, outcome), ("decomp", i, j, cell) and
    ("joint", meas_a, meas_b, outcome_a, outcome_b).  Column labels are
    ("mu", state, cell) or ("p", strategy_key).  settings records the
    measurement-label order so cells and strategies can be decoded.
    """

    matrix: Tuple[Tuple[Scalar, ...], ...]
    rhs: Tuple[Scalar, ...]
    column_labels: Tuple[Tuple, ...]
    row_labels: Tuple[Tuple, ...]
    settings: Tuple[str, ...]

    def __post_init__(self):
        if len(self.matrix) != len(self.rhs):
            raise ValueError("matrix and rhs disagree on row count")
        if len(self.matrix) != len(self.row_labels):
            raise ValueError("every row needs a label")
        for row in self.matrix:
            if len(row) != len(self.column_labels):
                raise ValueError("every column needs a label")

    @property
    def exact(self) -> bool:
        if self.rhs:
            return is_exact(self.rhs[0])
        return True

    def row_index(self, label: Tuple) -> int:
        return self.row_labels.index(label)

    def column_index(self, label: Tuple) -> int:
        return self.column_labels.index(label)

    def to_json(self) -> dict:
        return {
            "columns": [column_name(label) for label in self.column_labels],
            "settings": list(self.settings),
            "rows": [{
                "label": row_name(label),
                "coefficients": [scalar_to_json(v) for v in row],
                "rhs": scalar_to_json(rhs),
            } for label, row, rhs in zip(self.row_labels, self.matrix,
                                         self.rhs)],
        }


def row_name(label: Tuple) -> str:
    if label == ("normalization",):
        return "normalization"
    kind, rest = label[0], label[1:]
    return f"{kind}({','.join(str(part) for part in rest)})"


def column_name(label: Tuple) -> str:
    kind, rest = label[0], label[1:]
    return f"{kind}({','.join(str(part) for part in rest)})"


def build_prop1(scenario: Scenario,
                include_decomposition_equality: bool = True,
                deterministic_cells: bool = True,
                equality_pairs: Optional[Sequence[Tuple[int, int]]] = None,
                mode: Optional[str] = None) -> LPProblem:
    """Decomposition problem: per-state cell measures matching Born rows,
    plus (optionally) cellwise equality of the decomposition mixtures.

    Cells are joint response assignments, one character per measurement:
    "0"/"1" outcomes, plus "h" (an even coin) when deterministic_cells is
    off.  equality_pairs selects which decomposition pairs are equated;
    the default chains consecutive decompositions, which implies all the
    rest.
    """
    exact = _target_exact(scenario, mode)
    zero, half, one = _field(exact)
    cells = _cells(len(scenario.measurements), deterministic_cells)
    columns = tuple(("mu", state.label, cell)
                    for state in scenario.states for cell in cells)
    index = {label: j for j, label in enumerate(columns)}
    matrix, rhs, labels = [], [], []

    for state in scenario.states:
        row = [zero] * len(columns)
        for cell in cells:
            row[index[("mu", state.label, cell)]] = one
        matrix.append(row)
        rhs.append(one)
        labels.append(("normalization", state.label))

    for state in scenario.states:
        for mi, meas in enumerate(scenario.measurements):
            for outcome in (0, 1):
                row = [zero] * len(columns)
                for cell in cells:
                    row[index[("mu", state.label, cell)]] = _response_weight(
                        cell[mi], outcome, zero, half, one)
                matrix.append(row)
                rhs.append(_emit(born_probability(state, meas, outcome),
                                 exact))
                labels.append(("born", state.label, meas.label, outcome))

    if include_decomposition_equality:
        if equality_pairs is None:
            pairs = [(i, i + 1)
                     for i in range(len(scenario.decompositions) - 1)]
        else:
            pairs = list(equality_pairs)
        for di, dj in pairs:
            left = scenario.decomposition_states(di)
            right = scenario.decomposition_states(dj)
            for cell in cells:
                row = [zero] * len(columns)
                for state in left:
                    j = index[("mu", state.label, cell)]
                    row[j] = row[j] + one
                for state in right:
                    j = index[("mu", state.label, cell)]
                    row[j] = row[j] - one
                matrix.append(row)
                rhs.append(zero)
                labels.append(("decomp", di, dj, cell))

    return LPProblem(matrix=tuple(tuple(row) for row in matrix),
                     rhs=tuple(rhs),
                     column_labels=columns,
                     row_labels=tuple(labels),
                     settings=tuple(m.label for m in scenario.measurements))


def build_prop2(scenario: Scenario, mode: Optional[str] = None) -> LPProblem:
    """Correlation problem: a distribution over deterministic strategy pairs
    reproducing every joint outcome probability of the maximally entangled
    table, for every ordered pair of settings."""
    exact = _target_exact(scenario, mode)
    zero, _, one = _field(exact)
    strategies = all_strategies(len(scenario.measurements))
    columns = tuple(("p", strategy_key(s)) for s in strategies)
    matrix, rhs, labels = [], [], []

    matrix.append([one] * len(columns))
    rhs.append(one)
    labels.append(("normalization",))

    for ia, ma in enumerate(scenario.measurements):
        for ib, mb in enumerate(scenario.measurements):
            for a in (0, 1):
                for b in (0, 1):
                    row = [one if s[0][ia] == a and s[1][ib] == b else zero
                           for s in strategies]
                    matrix.append(row)
                    rhs.append(_emit(bell_joint(ma, mb, a, b), exact))
                    labels.append(("joint", ma.label, mb.label, a, b))

    return LPProblem(matrix=tuple(tuple(row) for row in matrix),
                     rhs=tuple(rhs),
                     column_labels=columns,
                     row_labels=tuple(labels),
                     settings=tuple(m.label for m in scenario.measurements))


def solve_problem(problem: LPProblem) -> LPResult:
    return solve_feasibility(problem.matrix, problem.rhs)


def check_prop1(scenario: Scenario,
                include_decomposition_equality: bool = True,
                deterministic_cells: bool = True,
                equality_pairs: Optional[Sequence[Tuple[int, int]]] = None,
                mode: Optional[str] = None) -> LPResult:
    return solve_problem(build_prop1(
        scenario,
        include_decomposition_equality=include_decomposition_equality,
        deterministic_cells=deterministic_cells,
        equality_pairs=equality_pairs,
        mode=mode))


def check_prop2(scenario: Scenario, mode: Optional[str] = None) -> LPResult:
    return solve_problem(build_prop2(scenario, mode=mode))


def min_slack(problem: LPProblem) -> Tuple[Scalar, Tuple[Scalar, ...]]:
    """Smallest eps >= 0 such that the statistical rows hold within eps.

    Normalization and decomposition rows stay exact; Born/joint rows r are
    relaxed to |A_r x - b_r| <= eps via slack splitting.  eps* = 0 exactly
    when the original problem is feasible.  Returns (eps*, x) with x
    restricted to the original columns.
    """
    exact = problem.exact
    zero, _, one = _field(exact)
    n = len(problem.column_labels)
    soft = [i for i, label in enumerate(problem.row_labels)
            if label[0] in SOFT_ROW_KINDS]
    offset = {r: n + 1 + 2 * k for k, r in enumerate(soft)}
    width = n + 1 + 2 * len(soft)
    matrix, rhs = [], []
    for i, row in enumerate(problem.matrix):
        if i in offset:
            # A_r x - eps + u = b and A_r x + eps - v = b bracket the rhs.
            low = list(row) + [zero] * (width - n)
            low[n] = -one
            low[offset[i]] = one
            high = list(row) + [zero] * (width - n)
            high[n] = one
            high[offset[i] + 1] = -one
            matrix.extend([low, high])
            rhs.extend([problem.rhs[i], problem.rhs[i]])
        else:
            matrix.append(list(row) + [zero] * (width - n))
            rhs.append(problem.rhs[i])
    cost = [zero] * width
    cost[n] = one
    value, x = solve_min(cost, matrix, rhs)
    return value, tuple(x[:n])


@dataclass(frozen=True)
class BellInequality:
    """sum of coefficient * P(ab|Ma,Mb) <= bound, valid for every local
    deterministic strategy pair (hence for every LHV mixture).

    coefficients maps keys (meas_a, meas_b, outcome_a, outcome_b) to
    scalars; settings fixes the measurement order used to decode
    strategies; provenance records the generating certificate's rows.
    """

    coefficients: Tuple[Tuple[Tuple[str, str, int, int], Scalar], ...]
    bound: Scalar
    settings: Tuple[str, ...]
    provenance: Tuple[Tuple, ...]

    def strategy_value(self, strategy: Strategy) -> Scalar:
        abits, bbits = strategy
        place = {label: i for i, label in enumerate(self.settings)}
        total = self.bound - self.bound
        for (ma, mb, a, b), coeff in self.coefficients:
            if abits[place[ma]] == a and bbits[place[mb]] == b:
                total = total + coeff
        return total

    def max_strategy_value(self) -> Tuple[Scalar, Strategy]:
        best = None
        best_strategy = None
        for strategy in all_strategies(len(self.settings)):
            value = self.strategy_value(strategy)
            if best is None or compare(value, best) > 0:
                best = value
                best_strategy = strategy
        if best is None:
            raise TooFewMeasurements("no settings to enumerate")
        return best, best_strategy

    def satisfied_by_all_strategies(self) -> bool:
        best, _ = self.max_strategy_value()
        return compare(best, self.bound) <= 0

    def quantum_value(self, scenario: Scenario) -> Scalar:
        total = self.bound - self.bound
        for (ma, mb, a, b), coeff in self.coefficients:
            joint = bell_joint(scenario.measurement(ma),
                               scenario.measurement(mb), a, b)
            total = total + coeff * joint
        return total

    def quantum_margin(self, scenario: Scenario) -> Scalar:
        return self.quantum_value(scenario) - self.bound

    def to_json(self) -> dict:
        return {
            "terms": [{
                "probability": f"P({a}{b}|{ma},{mb})",
                "coefficient": scalar_to_json(coeff),
            } for (ma, mb, a, b), coeff in self.coefficients],
            "bound": scalar_to_json(self.bound),
            "provenance": [row_name(label) for label in self.provenance],
        }


def extract_inequality(certificate: FarkasCertificate,
                       problem: LPProblem) -> BellInequality:
    """Read a verified infeasibility certificate of the correlation problem
    as a Bell-type inequality.

    The certificate weight on each joint row becomes that probability's
    coefficient; minus the normalization weight becomes the bound.  The
    result is audited twice: every deterministic strategy must satisfy the
    inequality, and the quantum table must violate it by exactly the
    certificate's margin y.b.
    """
    for label in problem.row_labels:
        if label[0] not in ("normalization", "joint"):
            raise ValueError("inequality extraction needs correlation rows")
    y = certificate.y
    if len(y) != len(problem.row_labels):
        raise UnverifiedCertificate(
            f"certificate has {len(y)} entries for {len(problem.row_labels)} rows")
    if not verify_certificate(problem.matrix, problem.rhs, certificate):
        raise UnverifiedCertificate("certificate fails its audit")
    exact = problem.exact
    lifted = [_lift(v, exact) for v in y]
    zero, _, _ = _field(exact)
    bound = zero
    coefficients = []
    provenance = []
    margin = zero
    for i, label in enumerate(problem.row_labels):
        if sign(lifted[i]) == 0:
            continue
        provenance.append(label)
        if label[0] == "normalization":
            bound = bound - lifted[i]
        else:
            coefficients.append((label[1:], lifted[i]))
            margin = margin + lifted[i] * problem.rhs[i]
    inequality = BellInequality(coefficients=tuple(coefficients),
                                bound=bound,
                                settings=problem.settings,
                                provenance=tuple(provenance))
    best, strategy = inequality.max_strategy_value()
    if compare(best, bound) > 0:
        raise UnverifiedCertificate(
            f"strategy {strategy_key(strategy)} reaches {best}, above the bound")
    y_dot_b = zero
    for i, value in enumerate(lifted):
        y_dot_b = y_dot_b + value * problem.rhs[i]
    if compare(margin - bound, y_dot_b) != 0:
        raise UnverifiedCertificate("margin does not match the certificate")
    return inequality


def completed_wigner_certificate(problem: LPProblem,
                                 convention: str = "strict01") -> FarkasCertificate:
    """Certificate form of the three-settings inequality
    P(01|M1,M2) + P(01|M2,M3) >= P(01|M1,M3).

    The three textbook terms alone do not bound general strategy pairs: a
    pair may break the perfect same-setting correlation the argument leans
    on.  Adding weight on the same-setting row P(10|M2,M2) (quantum value
    zero) closes that hole without changing the margin; the result is a
    valid certificate for the correlation problem.
    """
    if len(problem.settings) < 3:
        raise TooFewMeasurements("the inequality needs three settings")
    m1, m2, m3 = problem.settings[:3]
    exact = problem.exact
    zero, _, one = _field(exact)
    weights: Dict[Tuple[str, str, int, int], Scalar] = {
        (m1, m3, 0, 1): one,
        (m1, m2, 0, 1): -one,
        (m2, m3, 0, 1): -one,
        (m2, m2, 1, 0): -one,
    }
    if convention == "differ":
        weights.update({
            (m1, m3, 1, 0): one,
            (m1, m2, 1, 0): -one,
            (m2, m3, 1, 0): -one,
            (m2, m2, 0, 1): -one,
        })
    elif convention != "strict01":
        raise ValueError(f"unknown convention {convention!r}")
    y = []
    for label in problem.row_labels:
        if label[0] == "joint" and label[1:] in weights:
            y.append(weights[label[1:]])
        else:
            y.append(zero)
    return FarkasCertificate(y=tuple(y))


def event_mass(problem: LPProblem, x: Sequence[Scalar], state: str,
               measurement: str, outcome: int) -> Scalar:
    """Mass the solution x gives, under the named state's measure, to the
    cells responding with this outcome.  Recomputed from cell ids, not from
    the Born row, so it independently audits returned solutions."""
    if measurement not in problem.settings:
        raise UnknownMeasurement(measurement)
    mi = problem.settings.index(measurement)
    zero, half, one = _field(problem.exact)
    total = zero
    seen = False
    for j, label in enumerate(problem.column_labels):
        if label[0] == "mu" and label[1] == state:
            seen = True
            weight = _response_weight(label[2][mi], outcome, zero, half, one)
            total = total + weight * x[j]
    if not seen:
        raise UnknownState(state)
    return total


def shared_mass_lower_bound(problem: LPProblem, x: Sequence[Scalar],
                            state_a: str, state_b: str, measurement: str,
                            outcome: int) -> Scalar:
    """Inclusion-exclusion floor on the mass the two states must share on
    one response event: mass_a + mass_b - 1."""
    _, _, one = _field(problem.exact)
    return (event_mass(problem, x, state_a, measurement, outcome)
            + event_mass(problem, x, state_b, measurement, outcome) - one)


def solution_model(problem: LPProblem, x: Sequence[Scalar]) -> OntologicalModel:
    """Ontological model read off a decomposition-problem solution: LP cells
    become ontic cells, solution weights become epistemic states, and cell
    ids fix the (state-independent) response table."""
    zero, half, one = _field(problem.exact)
    cells = []
    weights: Dict[str, Dict[str, Scalar]] = {}
    for j, label in enumerate(problem.column_labels):
        if label[0] != "mu":
            raise ValueError("solution models need decomposition columns")
        _, state, cell = label
        if cell not in cells:
            cells.append(cell)
        if sign(x[j]) != 0:
            weights.setdefault(state, {})[cell] = x[j]
    responses = {
        setting: {cell: (_response_weight(cell[mi], 0, zero, half, one),
                         _response_weight(cell[mi], 1, zero, half, one))
                  for cell in cells}
        for mi, setting in enumerate(problem.settings)}
    return OntologicalModel(
        space=OnticSpace(cells=tuple(cells)),
        epistemics={state: EpistemicState(weights=table)
                    for state, table in weights.items()},
        responses=ResponseFunctions(table=responses))
