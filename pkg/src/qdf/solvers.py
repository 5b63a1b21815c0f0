"""MaxSAT and MILP models of the distance problem, small reference solvers
for them, and a subprocess bridge to external solvers.
"""
from __future__ import annotations

import math
import os
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .codes import as_detector_model
from .dem import DetectorModel
from .gf2 import BitVector
from .results import INF, Deadline, DistanceResult, NoResultError, Status

WEIGHT_SCALE = 1000


@dataclass
class ClauseSet:
    """Weighted clauses; weight 0 marks a hard clause."""

    clauses: list[tuple[int, list[int]]] = field(default_factory=list)
    var_count: int = 0
    num_errors: int = 0

    def __post_init__(self) -> None:
        for w, lits in self.clauses:
            self._check(w, lits)

    def _check(self, weight: int, lits) -> None:
        if weight < 0:
            raise ValueError("clause weights must be non-negative")
        for lit in lits:
            if lit == 0 or abs(lit) > self.var_count:
                raise ValueError(f"literal {lit} out of range 1..{self.var_count}")

    def add(self, weight: int, lits: list[int]) -> None:
        self._check(weight, lits)
        self.clauses.append((weight, list(lits)))

    @property
    def hard(self) -> list[list[int]]:
        return [lits for w, lits in self.clauses if w == 0]

    @property
    def soft(self) -> list[tuple[int, list[int]]]:
        return [(w, lits) for w, lits in self.clauses if w > 0]

    def top(self) -> int:
        """Hard-clause weight: one more than the clause count, or than the total soft weight if larger."""
        return max(len(self.clauses), sum(w for w, _ in self.soft)) + 1


def _model(code, basis: str, rep: int) -> DetectorModel:
    dem = as_detector_model(code, basis, rep)
    if dem.num_errors == 0:
        raise ValueError("model has no error columns")
    if dem.num_observables == 0:
        raise NoResultError("model has no observables")
    return dem


def _soft_weights(dem: DetectorModel, weighted: bool) -> list[int]:
    if weighted and dem.p is not None:
        return [max(1, round(WEIGHT_SCALE * c)) for c in dem.costs()]
    return [1] * dem.num_errors


def row_constraint(cs: ClauseSet, e: int, u: int, v: int) -> None:
    """Clauses forcing ``v = u XOR e``: each forbids one wrong truth-table row."""
    cs.add(0, [-u, v, e])
    cs.add(0, [u, -v, e])
    cs.add(0, [u, v, -e])
    cs.add(0, [-u, -v, -e])


def build_sat_model(code, basis: str = "Z", rep: int = 3, weighted: bool = False) -> ClauseSet:
    """MaxSAT model whose optimum is the weight of the lightest logical error.

    Variables ``1..m`` are the errors.  Scanning errors left to right, each
    row of ``[H; L]`` keeps a running parity variable; a new variable and an
    XOR gadget are added whenever an error extends a row already started.
    Detector parities are forced to 0 and at least one observable parity to 1.
    Each error gets the soft unit clause ``-e`` so that satisfied soft
    clauses count absent errors.
    """
    dem = _model(code, basis, rep)
    if dem.rep == 2:
        raise ValueError("the SAT model counts bits, use a three- or four-block model")
    r = dem.num_detectors
    HL = np.vstack([dem.H.to_dense(), dem.L.to_dense()])
    m = dem.num_errors
    soft = _soft_weights(dem, weighted)
    cs = ClauseSet(var_count=m, num_errors=m)
    parity = [0] * HL.shape[0]
    v = m
    for e in range(1, m + 1):
        cs.add(soft[e - 1], [-e])
        for d in np.flatnonzero(HL[:, e - 1]):
            u = parity[d]
            if u == 0:
                parity[d] = e
            else:
                v += 1
                cs.var_count = v
                row_constraint(cs, e, u, v)
                parity[d] = v
    for d in range(r):
        if parity[d]:
            cs.add(0, [-parity[d]])
    logical = [parity[d] for d in range(r, HL.shape[0]) if parity[d]]
    if not logical:
        raise NoResultError("no error flips any observable")
    cs.add(0, logical)
    return cs


def serialize_wcnf(cs: ClauseSet) -> str:
    """WDIMACS text: ``p wcnf <vars> <clauses> <top>`` then one clause per line."""
    top = cs.top()
    lines = [f"p wcnf {cs.var_count} {len(cs.clauses)} {top}"]
    for w, lits in cs.clauses:
        lines.append(" ".join(str(x) for x in [w or top, *lits, 0]))
    return "\n".join(lines) + "\n"


class SolverOutputError(ValueError):
    pass


def parse_wcnf(text: str) -> ClauseSet:
    """Read WDIMACS, accepting both ``p wcnf`` and bare ``wcnf`` headers."""
    header = None
    body = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        toks = line.split()
        if header is None:
            if toks[0] == "p":
                toks = toks[1:]
            if len(toks) != 4 or toks[0] != "wcnf":
                raise SolverOutputError(f"bad header {raw!r}")
            header = [int(t) for t in toks[1:]]
            continue
        nums = [int(t) for t in toks]
        if nums[-1] != 0:
            raise SolverOutputError(f"clause line not terminated by 0: {raw!r}")
        body.append(nums[:-1])
    if header is None:
        raise SolverOutputError("missing header")
    nvars, nclauses, top = header
    if len(body) != nclauses:
        raise SolverOutputError(f"header declares {nclauses} clauses, found {len(body)}")
    cs = ClauseSet(var_count=nvars)
    for nums in body:
        cs.add(0 if nums[0] >= top else nums[0], nums[1:])
    return cs


def solve_maxsat_toy(cs: ClauseSet, max_nodes: int = 1 << 16) -> tuple[int, list[bool]] | None:
    """Branch and bound with unit propagation.

    Returns the minimum total weight of falsified soft clauses and a model,
    or ``None`` when the hard clauses are unsatisfiable.  Raises
    ``RuntimeError`` past ``max_nodes`` search nodes.
    """
    hard = cs.hard
    soft = cs.soft
    n = cs.var_count
    best: list = [INF, None]
    nodes = [0]

    def value(assign, lit):
        a = assign[abs(lit)]
        return None if a is None else (a if lit > 0 else not a)

    def propagate(assign) -> bool:
        changed = True
        while changed:
            changed = False
            for lits in hard:
                free = None
                nfree = 0
                sat = False
                for lit in lits:
                    val = value(assign, lit)
                    if val is None:
                        nfree += 1
                        free = lit
                    elif val:
                        sat = True
                        break
                if sat:
                    continue
                if nfree == 0:
                    return False
                if nfree == 1:
                    assign[abs(free)] = free > 0
                    changed = True
        return True

    def cost(assign) -> int:
        total = 0
        for w, lits in soft:
            if all(value(assign, lit) is False for lit in lits):
                total += w
        return total

    def search(assign) -> None:
        nodes[0] += 1
        if nodes[0] > max_nodes:
            raise RuntimeError("toy solver node budget exceeded")
        if not propagate(assign):
            return
        c = cost(assign)
        if c >= best[0]:
            return
        try:
            var = assign.index(None, 1)
        except ValueError:
            best[0], best[1] = c, assign[1:]
            return
        for val in (False, True):
            nxt = assign.copy()
            nxt[var] = val
            search(nxt)

    search([True] + [None] * n)
    if best[1] is None:
        return None
    return int(best[0]), list(best[1])


@dataclass
class MilpModel:
    """Integer program: binaries ``E`` (errors) and ``P`` (observable flips),
    integer slacks ``S_H``, ``S_L``, and for symplectic weight the per-qubit
    indicators ``W``.

    Constraints: ``H E - 2 S_H = 0``, ``L E + P - 2 S_L = 0``, ``sum P >= 1``.
    """

    H: np.ndarray
    L: np.ndarray
    cost: np.ndarray
    sh_bound: np.ndarray
    sl_bound: np.ndarray
    n_qubits: int | None = None
    divisor: int = 1

    @property
    def symplectic(self) -> bool:
        return self.n_qubits is not None


def build_milp_model(code, basis: str = "Z", rep: int = 3, weighted: bool = False) -> MilpModel:
    """Slack bounds are ``floor(w/2)`` for a detector row of weight ``w`` and
    ``floor((w+1)/2)`` for an observable row, whose sum also includes ``P``.
    """
    dem = _model(code, basis, rep)
    H = dem.H.to_dense().astype(np.int64)
    L = dem.L.to_dense().astype(np.int64)
    if weighted and dem.p is not None:
        cost = dem.costs()
    else:
        cost = np.ones(dem.num_errors)
    return MilpModel(H, L, cost, H.sum(axis=1) // 2, (L.sum(axis=1) + 1) // 2,
                     dem.n_qubits if dem.rep == 2 else None, dem.weight_divisor)


def _terms(coeffs, names) -> str:
    parts = []
    for c, name in zip(coeffs, names):
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        coef = "" if mag == 1 else f"{mag:g} "
        parts.append(f"{sign} {coef}{name}")
    if not parts:
        return "0"
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def serialize_lp(model: MilpModel, name: str = "distance") -> str:
    """CPLEX LP text of ``model``."""
    r, m = model.H.shape
    k = model.L.shape[0]
    E = [f"e{j}" for j in range(m)]
    P = [f"p{i}" for i in range(k)]
    lines = [f"\\ {name}", "Minimize"]
    if model.symplectic:
        nq = model.n_qubits
        W = [f"w{q}" for q in range(nq)]
        lines.append(" obj: " + _terms(np.ones(nq), W))
    else:
        W = []
        lines.append(" obj: " + _terms(model.cost, E))
    lines.append("Subject To")
    for i in range(r):
        if not model.H[i].any():
            continue
        lines.append(f" h{i}: " + _terms(list(model.H[i]) + [-2], E + [f"sh{i}"]) + " = 0")
    for i in range(k):
        lines.append(f" l{i}: " + _terms(list(model.L[i]) + [1, -2], E + [P[i], f"sl{i}"]) + " = 0")
    lines.append(" flip: " + _terms(np.ones(k), P) + " >= 1")
    if model.symplectic:
        nq = model.n_qubits
        for q in range(nq):
            lines.append(f" wx{q}: w{q} - e{q} >= 0")
            lines.append(f" wz{q}: w{q} - e{q + nq} >= 0")
    lines.append("Bounds")
    for i in range(r):
        if model.H[i].any():
            lines.append(f" 0 <= sh{i} <= {int(model.sh_bound[i])}")
    for i in range(k):
        lines.append(f" 0 <= sl{i} <= {int(model.sl_bound[i])}")
    lines.append("Binaries")
    lines.append(" " + " ".join(E + P + W))
    lines.append("Generals")
    gens = [f"sh{i}" for i in range(r) if model.H[i].any()] + [f"sl{i}" for i in range(k)]
    lines.append(" " + " ".join(gens))
    lines.append("End")
    return "\n".join(lines) + "\n"


def solve_milp_toy(model: MilpModel, max_assignments: int = 1 << 20) -> tuple[float, np.ndarray] | None:
    """Enumerate every ``E``; ``P`` and the slacks are then forced.

    Checks the slack bounds explicitly, so a bound that is too tight makes
    the model infeasible here just as it would for a real solver.
    """
    r, m = model.H.shape
    if 2 ** m > max_assignments:
        raise RuntimeError(f"{2 ** m} assignments exceed the toy budget")
    shifts = np.arange(m, dtype=np.int64)
    best = (INF, None)
    chunk = 1 << 12
    for start in range(0, 2 ** m, chunk):
        masks = np.arange(start, min(2 ** m, start + chunk), dtype=np.int64)
        E = (masks[:, None] >> shifts) & 1
        hs = E @ model.H.T
        ok = ~((hs % 2).any(axis=1) | (hs // 2 > model.sh_bound).any(axis=1))
        ls = E @ model.L.T
        P = ls % 2
        ok &= P.any(axis=1) & ~((ls + P) // 2 > model.sl_bound).any(axis=1)
        if not ok.any():
            continue
        E = E[ok]
        if model.symplectic:
            nq = model.n_qubits
            obj = np.count_nonzero(E[:, :nq] | E[:, nq:], axis=1).astype(float)
        else:
            obj = E @ model.cost
        i = int(np.argmin(obj))
        if obj[i] < best[0]:
            best = (float(obj[i]), E[i])
    return None if best[1] is None else best


def _toy_result(dem: DetectorModel, support, cost: float, method: str, deadline: Deadline) -> DistanceResult:
    e = BitVector.from_indices(dem.num_errors, support)
    if not dem.is_undetectable_logical(e):
        raise AssertionError("solver optimum is not an undetectable logical error")
    d = dem.error_weight(e)
    return DistanceResult(Status.EXACT, d, d, dem.to_pauli(e), deadline.elapsed(), method)


def sat_distance(code, basis: str = "Z", rep: int = 3, solver: str | None = None,
                 max_time: float | None = None) -> DistanceResult:
    """Distance from the MaxSAT model, by an external solver or the toy one."""
    deadline = Deadline(max_time)
    dem = _model(code, basis, rep)
    cs = build_sat_model(dem)
    if solver is not None:
        return _external(serialize_wcnf(cs), ".wcnf", solver, max_time, "maxsat", dem.weight_divisor, "sat")
    out = solve_maxsat_toy(cs)
    if out is None:
        raise NoResultError("hard clauses unsatisfiable")
    _, assign = out
    support = [j for j in range(dem.num_errors) if assign[j]]
    return _toy_result(dem, support, out[0], "sat", deadline)


def milp_distance(code, basis: str = "Z", rep: int = 3, solver: str | None = None,
                  max_time: float | None = None) -> DistanceResult:
    """Distance from the integer program, by an external solver or the toy one."""
    deadline = Deadline(max_time)
    dem = _model(code, basis, rep)
    model = build_milp_model(dem)
    if solver is not None:
        return _external(serialize_lp(model), ".lp", solver, max_time, "lp", model.divisor, "milp")
    out = solve_milp_toy(model)
    if out is None:
        raise NoResultError("integer program infeasible")
    return _toy_result(dem, np.flatnonzero(out[1]).tolist(), out[0], "milp", deadline)


@dataclass(frozen=True)
class OutputProfile:
    """Regexes (multiline) recognising solver progress lines."""

    incumbent: str
    bound: str | None = None
    optimum: str | None = None


PROFILES = {
    "maxsat": OutputProfile(incumbent=r"^o\s+(\S+)\s*$", optimum=r"^s\s+OPTIMUM FOUND\s*$"),
    "lp": OutputProfile(
        incumbent=r"(?i)^\s*(?:best objective|objective value|primal bound)\s*[:=]?\s*(\S+?),?\s*$",
        bound=r"(?i)^\s*(?:best bound|dual bound)\s*[:=]?\s*(\S+?),?\s*$",
        optimum=r"(?i)^\s*(?:optimal solution found|status\s*[:=]?\s*optimal)",
    ),
}


def parse_solver_output(text: str, profile: OutputProfile | str = "maxsat", divisor: int = 1,
                        method: str = "external", elapsed: float = 0.0) -> DistanceResult:
    """Map solver output to a result: optimum gives Exact, incumbent and
    bound give Bounds, incumbent alone gives UpperOnly, nothing gives Timeout.

    The last incumbent and bound lines win.  A matching line whose value is
    not a number raises :class:`SolverOutputError`.
    """
    prof = PROFILES[profile] if isinstance(profile, str) else profile

    def last(pattern):
        if pattern is None:
            return None
        hits = re.findall(pattern, text, flags=re.MULTILINE)
        if not hits:
            return None
        try:
            return float(hits[-1])
        except ValueError:
            raise SolverOutputError(f"unparsable solver value {hits[-1]!r}") from None

    inc = last(prof.incumbent)
    bound = last(prof.bound)
    optimal = prof.optimum is not None and re.search(prof.optimum, text, flags=re.MULTILINE) is not None
    if optimal and inc is None:
        raise SolverOutputError("solver reports an optimum without an objective value")
    if inc is None:
        return DistanceResult(Status.TIMEOUT, 1, INF, None, elapsed, method)
    ub = int(round(inc)) // divisor
    if optimal:
        return DistanceResult(Status.EXACT, ub, ub, None, elapsed, method)
    if bound is not None:
        lb = max(1, math.ceil(round(bound, 6) / divisor))
        return DistanceResult(Status.BOUNDS, min(lb, ub), ub, None, elapsed, method)
    return DistanceResult(Status.UPPER_ONLY, 1, ub, None, elapsed, method)


def solver_template(name: str) -> str | None:
    """Command template from ``QDF_SOLVER_<NAME>``, e.g. ``"maxhs {file}"``."""
    return os.environ.get(f"QDF_SOLVER_{name.upper()}")


def run_external(model_file: str | Path, template: str, max_time: float | None = None,
                 profile: OutputProfile | str = "maxsat", divisor: int = 1,
                 method: str = "external") -> DistanceResult:
    """Run ``template`` with ``{file}`` replaced and parse its stdout.

    On timeout the output captured so far is still parsed, so incumbents
    survive.  A failing process with nothing parsable gives Timeout with
    the diagnostics in ``trace``.
    """
    if "{file}" not in template:
        raise ValueError("solver template needs a {file} placeholder")
    cmd = shlex.split(template.replace("{file}", shlex.quote(str(model_file))))
    deadline = Deadline(max_time)
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=max_time)
        out, err, code = proc.stdout, proc.stderr, proc.returncode
    except subprocess.TimeoutExpired as exc:
        out = exc.stdout.decode() if isinstance(exc.stdout, bytes) else (exc.stdout or "")
        err, code = "timeout", None
    except OSError as exc:
        out, err, code = "", str(exc), None
    res = parse_solver_output(out, profile, divisor, method, deadline.elapsed())
    if res.status is Status.TIMEOUT:
        res.trace = [("exit", code), ("stderr", err[-2000:])]
    return res


def _external(text: str, suffix: str, solver: str, max_time, profile, divisor, method) -> DistanceResult:
    template = solver_template(solver) or solver
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / f"model{suffix}"
        path.write_text(text)
        return run_external(path, template, max_time, profile, divisor, method)
