"""Solver-independent MILP container, evaluation and free-format MPS I/O."""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse

INF = math.inf


class ModelError(ValueError):
    """Raised when a model is built with inconsistent data."""


class VarKind(str, enum.Enum):
    CONTINUOUS = "continuous"
    BINARY = "binary"


class Sense(str, enum.Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class SolveStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    # limit reached with an incumbent available
    FEASIBLE = "feasible"
    # limit reached without any incumbent
    LIMIT = "limit"
    NUMERICAL = "numerical"


@dataclass(frozen=True)
class Variable:
    name: str
    kind: VarKind = VarKind.CONTINUOUS
    lower: float = 0.0
    upper: float = INF


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[int, float], ...]
    sense: Sense
    rhs: float


@dataclass
class Solution:
    status: SolveStatus
    values: np.ndarray | None = None
    objective: float = math.nan
    duals: np.ndarray | None = None
    nodes: int = 0
    iterations: int = 0

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


@dataclass
class Evaluation:
    objective: float
    max_violation: float


def _check_name(name: str) -> None:
    if not name or len(name) > 255 or any(ch.isspace() for ch in name):
        raise ModelError(f"invalid name {name!r}: must be 1-255 chars without whitespace")


class MilpModel:
    """Minimization model: variables, linear rows, linear objective plus a constant.

    The model records exactly what builders add; nothing is merged or presolved.
    """

    def __init__(self, name: str = "model") -> None:
        _check_name(name)
        self.name = name
        self.variables: list[Variable] = []
        self.constraints: list[Constraint] = []
        self.objective: dict[int, float] = {}
        self.offset: float = 0.0
        self._var_index: dict[str, int] = {}
        self._con_index: dict[str, int] = {}
        self._cache: dict[str, object] = {}

    # -- construction -----------------------------------------------------
    def add_variable(
        self,
        name: str,
        kind: VarKind | str = VarKind.CONTINUOUS,
        lower: float = 0.0,
        upper: float = INF,
    ) -> int:
        _check_name(name)
        if name in self._var_index:
            raise ModelError(f"duplicate variable name {name!r}")
        kind = VarKind(kind)
        lower, upper = float(lower), float(upper)
        if math.isnan(lower) or math.isnan(upper) or lower > upper:
            raise ModelError(f"variable {name!r}: bounds [{lower}, {upper}] are invalid")
        if kind is VarKind.BINARY and (lower < 0.0 or upper > 1.0):
            raise ModelError(f"binary {name!r}: bounds must lie within [0, 1]")
        idx = len(self.variables)
        self._cache.clear()
        self.variables.append(Variable(name, kind, lower, upper))
        self._var_index[name] = idx
        return idx

    def add_constraint(
        self,
        name: str,
        terms: Iterable[tuple[int, float]],
        sense: Sense | str,
        rhs: float,
    ) -> int:
        _check_name(name)
        if name in self._con_index:
            raise ModelError(f"duplicate constraint name {name!r}")
        terms = tuple((int(v), float(c)) for v, c in terms)
        seen = set()
        n = len(self.variables)
        for var, coef in terms:
            if not 0 <= var < n:
                raise ModelError(f"constraint {name!r}: unknown variable id {var}")
            if var in seen:
                raise ModelError(f"constraint {name!r}: variable id {var} repeated")
            if not math.isfinite(coef):
                raise ModelError(f"constraint {name!r}: non-finite coefficient")
            seen.add(var)
        rhs = float(rhs)
        if not math.isfinite(rhs):
            raise ModelError(f"constraint {name!r}: non-finite rhs")
        idx = len(self.constraints)
        self._cache.clear()
        self.constraints.append(Constraint(name, terms, Sense(sense), rhs))
        self._con_index[name] = idx
        return idx

    def add_objective_term(self, var: int, coef: float) -> None:
        if not 0 <= var < len(self.variables):
            raise ModelError(f"objective: unknown variable id {var}")
        self.objective[var] = self.objective.get(var, 0.0) + float(coef)

    def set_bounds(self, var: int, lower: float, upper: float) -> None:
        old = self.variables[var]
        if lower > upper:
            raise ModelError(f"variable {old.name!r}: bounds [{lower}, {upper}] are invalid")
        self.variables[var] = Variable(old.name, old.kind, float(lower), float(upper))

    def copy(self) -> "MilpModel":
        other = MilpModel(self.name)
        other.variables = list(self.variables)
        other.constraints = list(self.constraints)
        other.objective = dict(self.objective)
        other.offset = self.offset
        other._var_index = dict(self._var_index)
        other._con_index = dict(self._con_index)
        other._cache = dict(self._cache)
        return other

    # -- lookup -----------------------------------------------------------
    def var_id(self, name: str) -> int:
        return self._var_index[name]

    def con_id(self, name: str) -> int:
        return self._con_index[name]

    def constraint(self, name: str) -> Constraint:
        return self.constraints[self._con_index[name]]

    def row(self, name: str) -> dict[str, float]:
        """Coefficients of a named constraint keyed by variable name."""
        return {self.variables[v].name: c for v, c in self.constraint(name).terms}

    @property
    def num_vars(self) -> int:
        return len(self.variables)

    @property
    def num_constraints(self) -> int:
        return len(self.constraints)

    @property
    def binaries(self) -> list[int]:
        return [i for i, v in enumerate(self.variables) if v.kind is VarKind.BINARY]

    # -- array views ------------------------------------------------------
    def cost_vector(self) -> np.ndarray:
        c = np.zeros(self.num_vars)
        for var, coef in self.objective.items():
            c[var] = coef
        return c

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        lo = np.array([v.lower for v in self.variables], dtype=float)
        hi = np.array([v.upper for v in self.variables], dtype=float)
        return lo, hi

    def matrix(self) -> sparse.csr_matrix:
        if "matrix" in self._cache:
            return self._cache["matrix"]
        rows, cols, vals = [], [], []
        for i, con in enumerate(self.constraints):
            for var, coef in con.terms:
                rows.append(i)
                cols.append(var)
                vals.append(coef)
        mat = sparse.csr_matrix(
            (vals, (rows, cols)), shape=(self.num_constraints, self.num_vars)
        )
        self._cache["matrix"] = mat
        return mat

    def row_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if "row_bounds" in self._cache:
            return self._cache["row_bounds"]
        lo = np.full(self.num_constraints, -INF)
        hi = np.full(self.num_constraints, INF)
        for i, con in enumerate(self.constraints):
            if con.sense is not Sense.LE:
                lo[i] = con.rhs
            if con.sense is not Sense.GE:
                hi[i] = con.rhs
        self._cache["row_bounds"] = (lo, hi)
        return lo, hi


def evaluate(model: MilpModel, values: Sequence[float] | Mapping[int, float]) -> Evaluation:
    """Objective value and the largest bound or row violation at ``values``."""
    if isinstance(values, Mapping):
        missing = [i for i in range(model.num_vars) if i not in values]
        if missing:
            raise ModelError(f"missing value for variable {model.variables[missing[0]].name!r}")
        x = np.array([values[i] for i in range(model.num_vars)], dtype=float)
    else:
        x = np.asarray(values, dtype=float)
        if x.shape != (model.num_vars,):
            raise ModelError(f"expected {model.num_vars} values, got {x.shape[0]}")
    obj = model.offset + float(model.cost_vector() @ x) if model.num_vars else model.offset
    lo, hi = model.bounds()
    worst = float(np.max(np.maximum(lo - x, x - hi), initial=0.0))
    if model.num_constraints:
        act = model.matrix() @ x
        rl, ru = model.row_bounds()
        worst = max(worst, float(np.max(np.maximum(rl - act, act - ru))))
    return Evaluation(float(obj), float(worst))


# ---------------------------------------------------------------------------
# MPS
# ---------------------------------------------------------------------------

_OBJ_ROW = "OBJ"
_ROW_TYPE = {Sense.LE: "L", Sense.GE: "G", Sense.EQ: "E"}
_TYPE_ROW = {v: k for k, v in _ROW_TYPE.items()}


def _num(x: float) -> str:
    x = float(x)
    if x == 0.0:
        return "0"
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def mps_text(model: MilpModel) -> str:
    """Free-format MPS, deterministic given the model."""
    if model.num_vars == 0 and model.num_constraints == 0:
        raise ModelError("cannot write an empty model")
    by_col: list[list[tuple[int, float]]] = [[] for _ in range(model.num_vars)]
    for i, con in enumerate(model.constraints):
        for var, coef in con.terms:
            by_col[var].append((i, coef))

    out = io.StringIO()
    w = out.write
    w(f"NAME {model.name}\n")
    w("ROWS\n")
    w(f" N {_OBJ_ROW}\n")
    for con in model.constraints:
        w(f" {_ROW_TYPE[con.sense]} {con.name}\n")

    w("COLUMNS\n")
    in_int = False
    marker = 0
    for var, spec in enumerate(model.variables):
        is_int = spec.kind is VarKind.BINARY
        if is_int != in_int:
            kind = "INTORG" if is_int else "INTEND"
            w(f" MARKER{marker} 'MARKER' '{kind}'\n")
            marker += 1
            in_int = is_int
        w(f" {spec.name} {_OBJ_ROW} {_num(model.objective.get(var, 0.0))}\n")
        for row, coef in sorted(by_col[var]):
            w(f" {spec.name} {model.constraints[row].name} {_num(coef)}\n")
    if in_int:
        w(f" MARKER{marker} 'MARKER' 'INTEND'\n")

    w("RHS\n")
    if model.offset != 0.0:
        w(f" RHS {_OBJ_ROW} {_num(-model.offset)}\n")
    for con in model.constraints:
        if con.rhs != 0.0:
            w(f" RHS {con.name} {_num(con.rhs)}\n")

    w("RANGES\n")

    w("BOUNDS\n")
    for spec in model.variables:
        lo, hi = spec.lower, spec.upper
        if spec.kind is VarKind.BINARY:
            w(f" LO BND {spec.name} {_num(lo)}\n")
            w(f" UP BND {spec.name} {_num(hi)}\n")
        elif lo == hi:
            w(f" FX BND {spec.name} {_num(lo)}\n")
        elif lo == -INF and hi == INF:
            w(f" FR BND {spec.name}\n")
        else:
            if lo == -INF:
                w(f" MI BND {spec.name}\n")
            elif lo != 0.0 or hi < 0.0:
                w(f" LO BND {spec.name} {_num(lo)}\n")
            if hi != INF:
                w(f" UP BND {spec.name} {_num(hi)}\n")
    w("ENDATA\n")
    return out.getvalue()


def write_mps(model: MilpModel, destination: str | Path | IO[bytes]) -> bytes:
    data = mps_text(model).encode("ascii")
    if isinstance(destination, (str, Path)):
        Path(destination).write_bytes(data)
    else:
        destination.write(data)
    return data


def read_mps(source: str | Path | bytes) -> MilpModel:
    """Parse the free-format MPS produced by :func:`write_mps`.

    Supports the subset needed for round trips: N/L/G/E rows, integer markers,
    RHS (including the objective constant) and LO/UP/FX/FR/MI/PL/BV bounds.
    """
    if isinstance(source, bytes):
        text = source.decode("ascii")
    elif isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        text = Path(source).read_text()
    else:
        text = source

    name = "model"
    section = None
    rows: list[tuple[str, Sense]] = []
    row_index: dict[str, int] = {}
    obj_row = None
    columns: dict[str, dict] = {}
    col_order: list[str] = []
    rhs: dict[str, float] = {}
    offset = 0.0
    integer = False

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("*"):
            continue
        if not raw[0].isspace():
            head = line.split()
            section = head[0]
            if section == "NAME" and len(head) > 1:
                name = head[1]
            if section == "ENDATA":
                break
            continue
        tok = line.split()
        if section == "ROWS":
            kind, rname = tok
            if kind == "N":
                obj_row = obj_row or rname
            else:
                row_index[rname] = len(rows)
                rows.append((rname, _TYPE_ROW[kind]))
        elif section == "COLUMNS":
            if len(tok) >= 3 and tok[1] == "'MARKER'":
                integer = tok[2] == "'INTORG'"
                continue
            cname = tok[0]
            if cname not in columns:
                columns[cname] = {"int": integer, "obj": 0.0, "terms": [], "lo": 0.0, "up": INF}
                col_order.append(cname)
            col = columns[cname]
            for rname, val in zip(tok[1::2], tok[2::2]):
                if rname == obj_row:
                    col["obj"] = float(val)
                elif rname in row_index:
                    col["terms"].append((row_index[rname], float(val)))
                else:
                    raise ModelError(f"MPS line {lineno}: unknown row {rname!r}")
        elif section == "RHS":
            for rname, val in zip(tok[1::2], tok[2::2]):
                if rname == obj_row:
                    offset = -float(val)
                else:
                    rhs[rname] = float(val)
        elif section == "RANGES":
            raise ModelError("RANGES entries are not supported")
        elif section == "BOUNDS":
            btype, cname = tok[0], tok[2]
            col = columns[cname]
            val = float(tok[3]) if len(tok) > 3 else None
            if btype == "LO":
                col["lo"] = val
            elif btype == "UP":
                col["up"] = val
            elif btype == "FX":
                col["lo"] = col["up"] = val
            elif btype == "FR":
                col["lo"], col["up"] = -INF, INF
            elif btype == "MI":
                col["lo"] = -INF
            elif btype == "PL":
                col["up"] = INF
            elif btype == "BV":
                col["lo"], col["up"] = 0.0, 1.0
            else:
                raise ModelError(f"MPS line {lineno}: unsupported bound type {btype}")

    model = MilpModel(name)
    row_terms: list[list[tuple[int, float]]] = [[] for _ in rows]
    for cname in col_order:
        col = columns[cname]
        kind = VarKind.BINARY if col["int"] else VarKind.CONTINUOUS
        vid = model.add_variable(cname, kind, col["lo"], col["up"])
        model.objective[vid] = col["obj"]
        for r, val in col["terms"]:
            row_terms[r].append((vid, val))
    for (rname, sense), terms in zip(rows, row_terms):
        model.add_constraint(rname, terms, sense, rhs.get(rname, 0.0))
    model.offset = offset
    return model


def read_solution_file(path: str | Path, model: MilpModel) -> np.ndarray:
    """Read ``name value`` lines produced by an external solver."""
    values = np.zeros(model.num_vars)
    seen = set()
    for raw in Path(path).read_text().splitlines():
        parts = raw.split()
        if len(parts) != 2 or parts[0].startswith("#"):
            continue
        try:
            vid = model.var_id(parts[0])
        except KeyError:
            continue
        values[vid] = float(parts[1])
        seen.add(vid)
    if len(seen) != model.num_vars:
        missing = next(i for i in range(model.num_vars) if i not in seen)
        raise ModelError(f"solution file lacks variable {model.variables[missing].name!r}")
    return values
