"""
Exact linear programming over the rationals.

The solver is a dense two-phase simplex on a ``Fraction`` tableau with Bland's
rule, so it terminates on degenerate programs and never rounds. Free variables
are split into a positive and a negative part. Every optimal answer is
re-substituted into the program and checked exactly before it is returned.
"""

import enum
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Mapping, Sequence

from flowgames.errors.exceptions import InputError, InvariantViolation

logger = logging.getLogger(__name__)

VarId = Hashable


class Sense(str, enum.Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class Relation(str, enum.Enum):
    LE = "<="
    EQ = "=="
    GE = ">="


class LPStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class Constraint:
    coefficients: Mapping[VarId, Fraction]
    relation: Relation
    rhs: Fraction

    def lhs(self, solution: Mapping[VarId, Fraction]) -> Fraction:
        return sum(
            (c * solution.get(v, Fraction(0)) for v, c in self.coefficients.items()),
            Fraction(0),
        )

    def holds(self, solution: Mapping[VarId, Fraction]) -> bool:
        value = self.lhs(solution)
        if self.relation is Relation.LE:
            return value <= self.rhs
        if self.relation is Relation.GE:
            return value >= self.rhs
        return value == self.rhs


@dataclass(frozen=True)
class LinearProgram:
    sense: Sense
    objective: Mapping[VarId, Fraction]
    constraints: tuple[Constraint, ...]
    variables: tuple[VarId, ...]
    nonneg: frozenset[VarId]

    def __post_init__(self):
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise InputError("Duplicate variable declaration in LP")
        for v in self.nonneg:
            if v not in declared:
                raise InputError(
                    "Undeclared variable in nonneg set", details={"variable": v}
                )
        for v in self.objective:
            if v not in declared:
                raise InputError(
                    "Undeclared variable in objective", details={"variable": v}
                )
        for index, row in enumerate(self.constraints):
            for v in row.coefficients:
                if v not in declared:
                    raise InputError(
                        "Undeclared variable in constraint",
                        details={"variable": v, "constraint": index},
                    )

    def objective_value(self, solution: Mapping[VarId, Fraction]) -> Fraction:
        return sum(
            (c * solution.get(v, Fraction(0)) for v, c in self.objective.items()),
            Fraction(0),
        )


@dataclass(frozen=True)
class LPResult:
    status: LPStatus
    value: Fraction | None = None
    solution: dict[VarId, Fraction] | None = None

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


@dataclass
class LPBuilder:
    """Incremental construction of a ``LinearProgram``."""

    sense: Sense = Sense.MAXIMIZE
    _variables: list[VarId] = field(default_factory=list)
    _declared: set[VarId] = field(default_factory=set)
    _nonneg: set[VarId] = field(default_factory=set)
    _objective: dict[VarId, Fraction] = field(default_factory=dict)
    _constraints: list[Constraint] = field(default_factory=list)

    def add_variable(self, var: VarId, nonneg: bool = True) -> VarId:
        if var in self._declared:
            raise InputError("Variable declared twice", details={"variable": var})
        self._variables.append(var)
        self._declared.add(var)
        if nonneg:
            self._nonneg.add(var)
        return var

    def add_variables(self, variables: Iterable[VarId], nonneg: bool = True) -> None:
        for var in variables:
            self.add_variable(var, nonneg=nonneg)

    def has_variable(self, var: VarId) -> bool:
        return var in self._declared

    def add_constraint(
        self,
        coefficients: Mapping[VarId, Fraction | int],
        relation: Relation,
        rhs: Fraction | int,
    ) -> None:
        cleaned = {v: Fraction(c) for v, c in coefficients.items() if c != 0}
        self._constraints.append(Constraint(cleaned, relation, Fraction(rhs)))

    def set_objective(
        self, coefficients: Mapping[VarId, Fraction | int], sense: Sense | None = None
    ) -> None:
        self._objective = {v: Fraction(c) for v, c in coefficients.items() if c != 0}
        if sense is not None:
            self.sense = sense

    def build(self) -> LinearProgram:
        return LinearProgram(
            sense=self.sense,
            objective=dict(self._objective),
            constraints=tuple(self._constraints),
            variables=tuple(self._variables),
            nonneg=frozenset(self._nonneg),
        )


class _Tableau:
    """Dense simplex tableau; row ``i`` reads ``x[basis[i]] + A[i] x = b[i]``."""

    def __init__(
        self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]
    ):
        self.A = rows
        self.b = rhs
        self.basis = basis
        self.width = len(rows[0]) if rows else 0
        self.obj: list[Fraction] = []
        self.value = Fraction(0)
        self.pivots = 0

    def set_objective(self, costs: Sequence[Fraction]) -> None:
        # price out the basic columns so that obj holds reduced costs
        self.obj = list(costs)
        self.value = Fraction(0)
        for i, col in enumerate(self.basis):
            c = costs[col]
            if c == 0:
                continue
            row = self.A[i]
            for j in range(self.width):
                if row[j]:
                    self.obj[j] -= c * row[j]
            self.value += c * self.b[i]

    def pivot(self, r: int, s: int) -> None:
        row = self.A[r]
        piv = row[s]
        if piv != 1:
            for j in range(self.width):
                if row[j]:
                    row[j] /= piv
            self.b[r] /= piv
        for i, other in enumerate(self.A):
            if i == r:
                continue
            f = other[s]
            if f:
                for j in range(self.width):
                    if row[j]:
                        other[j] -= f * row[j]
                self.b[i] -= f * self.b[r]
        f = self.obj[s]
        if f:
            for j in range(self.width):
                if row[j]:
                    self.obj[j] -= f * row[j]
            self.value += f * self.b[r]
        self.basis[r] = s
        self.pivots += 1

    def bland_step(self, allowed: Sequence[bool]) -> str:
        entering = next(
            (j for j in range(self.width) if allowed[j] and self.obj[j] > 0), None
        )
        if entering is None:
            return "optimal"
        candidates = [
            (self.b[i] / self.A[i][entering], self.basis[i], i)
            for i in range(len(self.A))
            if self.A[i][entering] > 0
        ]
        if not candidates:
            return "unbounded"
        _, _, leaving = min(candidates)
        self.pivot(leaving, entering)
        return "go_on"

    def run(self, allowed: Sequence[bool]) -> str:
        while True:
            status = self.bland_step(allowed)
            if status != "go_on":
                return status

    def drop_row(self, i: int) -> None:
        del self.A[i]
        del self.b[i]
        del self.basis[i]


def solve_lp(lp: LinearProgram) -> LPResult:
    """
    Solve a linear program exactly.

    Args:
        lp: The program. Variables outside ``lp.nonneg`` are free.

    Returns:
        LPResult with status ``optimal``, ``infeasible`` or ``unbounded``. An
        optimal result carries the objective value and a basic optimal solution
        covering every declared variable.

    Raises:
        InvariantViolation: If the optimum fails exact re-substitution.
    """
    # Column layout: structural parts, then slack/surplus, then artificials.
    columns: dict[VarId, tuple[int, int | None]] = {}
    n_cols = 0
    for v in lp.variables:
        if v in lp.nonneg:
            columns[v] = (n_cols, None)
            n_cols += 1
        else:
            columns[v] = (n_cols, n_cols + 1)
            n_cols += 2
    n_struct = n_cols

    normalized: list[tuple[dict[int, Fraction], Relation, Fraction]] = []
    for row in lp.constraints:
        coeffs: dict[int, Fraction] = {}
        for v, c in row.coefficients.items():
            plus, minus = columns[v]
            coeffs[plus] = coeffs.get(plus, Fraction(0)) + c
            if minus is not None:
                coeffs[minus] = coeffs.get(minus, Fraction(0)) - c
        relation, rhs = row.relation, row.rhs
        if rhs < 0:
            coeffs = {j: -c for j, c in coeffs.items()}
            rhs = -rhs
            if relation is Relation.LE:
                relation = Relation.GE
            elif relation is Relation.GE:
                relation = Relation.LE
        normalized.append((coeffs, relation, rhs))

    n_slack = sum(1 for _, rel, _ in normalized if rel is not Relation.EQ)
    n_art = sum(1 for _, rel, _ in normalized if rel is not Relation.LE)
    width = n_struct + n_slack + n_art
    first_art = n_struct + n_slack

    rows: list[list[Fraction]] = []
    rhs_col: list[Fraction] = []
    basis: list[int] = []
    slack_at = n_struct
    art_at = first_art
    for coeffs, relation, rhs in normalized:
        row = [Fraction(0)] * width
        for j, c in coeffs.items():
            row[j] = c
        if relation is Relation.LE:
            row[slack_at] = Fraction(1)
            basis.append(slack_at)
            slack_at += 1
        else:
            if relation is Relation.GE:
                row[slack_at] = Fraction(-1)
                slack_at += 1
            row[art_at] = Fraction(1)
            basis.append(art_at)
            art_at += 1
        rows.append(row)
        rhs_col.append(rhs)

    tableau = _Tableau(rows, rhs_col, basis)
    tableau.width = width

    if n_art:
        phase_one = [Fraction(0)] * width
        for j in range(first_art, width):
            phase_one[j] = Fraction(-1)
        tableau.set_objective(phase_one)
        tableau.run([True] * width)
        if tableau.value < 0:
            logger.debug("LP infeasible after %s pivots", tableau.pivots)
            return LPResult(status=LPStatus.INFEASIBLE)
        # Drive zero-level artificials out of the basis; drop redundant rows.
        i = 0
        while i < len(tableau.A):
            if tableau.basis[i] < first_art:
                i += 1
                continue
            entering = next(
                (j for j in range(first_art) if tableau.A[i][j] != 0), None
            )
            if entering is None:
                tableau.drop_row(i)
                continue
            tableau.pivot(i, entering)
            i += 1

    allowed = [j < first_art for j in range(width)]
    sign = Fraction(1) if lp.sense is Sense.MAXIMIZE else Fraction(-1)
    costs = [Fraction(0)] * width
    for v, c in lp.objective.items():
        plus, minus = columns[v]
        costs[plus] += sign * c
        if minus is not None:
            costs[minus] -= sign * c
    tableau.set_objective(costs)
    if tableau.run(allowed) == "unbounded":
        logger.debug("LP unbounded after %s pivots", tableau.pivots)
        return LPResult(status=LPStatus.UNBOUNDED)

    column_values = [Fraction(0)] * width
    for i, col in enumerate(tableau.basis):
        column_values[col] = tableau.b[i]
    solution: dict[VarId, Fraction] = {}
    for v in lp.variables:
        plus, minus = columns[v]
        value = column_values[plus]
        if minus is not None:
            value -= column_values[minus]
        solution[v] = value

    value = lp.objective_value(solution)
    if value != sign * tableau.value:
        raise InvariantViolation(
            "LP objective does not match re-substituted solution",
            details={"tableau": str(sign * tableau.value), "substituted": str(value)},
        )
    for index, row in enumerate(lp.constraints):
        if not row.holds(solution):
            raise InvariantViolation(
                "LP solution violates a constraint", details={"constraint": index}
            )
    for v in lp.nonneg:
        if solution[v] < 0:
            raise InvariantViolation(
                "LP solution violates a sign bound", details={"variable": v}
            )
    logger.debug("LP optimal value %s after %s pivots", value, tableau.pivots)
    return LPResult(status=LPStatus.OPTIMAL, value=value, solution=solution)


def solve_lexicographic(
    lp: LinearProgram, objectives: Sequence[Mapping[VarId, Fraction]]
) -> LPResult:
    """
    Maximize ``objectives`` one after another, fixing each optimum before the next.

    The returned value is the optimum of the last objective.
    """
    constraints = list(lp.constraints)
    result = LPResult(status=LPStatus.INFEASIBLE)
    for objective in objectives:
        stage = LinearProgram(
            sense=Sense.MAXIMIZE,
            objective=dict(objective),
            constraints=tuple(constraints),
            variables=lp.variables,
            nonneg=lp.nonneg,
        )
        result = solve_lp(stage)
        if not result.optimal:
            return result
        constraints.append(Constraint(dict(objective), Relation.EQ, result.value))
    return result
