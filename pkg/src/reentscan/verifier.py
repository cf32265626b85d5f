"""Re-entrancy verdicts by path-condition equivalence.

For a function pair (f, g) two scenario sets are collected over the same
symbol environment:

* I: f runs to completion, then g runs as a fresh transaction from the
  account f paid out to (sequential baseline).
* C: g is injected through the attacker dummy while f is still executing
  (re-entrant candidate). Paths where no re-entry happened get the
  sequential g appended so both sets describe f-then-g executions.

The pair is vulnerable when some feasible re-entrant condition is equivalent
to no sequential condition: the attack reaches a final state the sequential
schedule cannot. Account solvency terms are part of every final condition,
which is what exposes double-pay effects to the equivalence check.
"""

from __future__ import annotations

import enum
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .cfg_manager import PathExplosion
from .evm_core import Bytecode, FunctionId
from .smt import IndeterminateEquivalence, Solver, SolverStatus
from .smt import terms as tm
from .symdomain import BasicBlock, ConstraintOrigin, ECFG, PathCondition
from .symvm import (
    AbiCalldata,
    FunctionEntry,
    Mode,
    RunResult,
    ScenarioConfig,
    SymVM,
    VmConfig,
    extract_function_ids,
)


class Status(enum.Enum):
    VULNERABLE = "vulnerable"
    BENIGN = "benign"
    INCONCLUSIVE = "inconclusive"


@dataclass
class AnalyzerConfig:
    call_depth_bound: int = 8
    loop_bound: int = 3
    path_cap: int = 10_000
    solver_timeout: float = 60.0
    reentry_budget: int = 1
    workers: int = 4

    def vm_config(self) -> VmConfig:
        return VmConfig(
            call_depth_bound=self.call_depth_bound,
            loop_bound=self.loop_bound,
            path_cap=self.path_cap,
            solver_timeout=self.solver_timeout,
        )


@dataclass
class ScenarioSet:
    """All end-path conditions for one pair, plus the graphs behind them."""

    f: FunctionEntry
    g: FunctionEntry
    I: list[PathCondition] = field(default_factory=list)
    C: list[PathCondition] = field(default_factory=list)
    ecfg_I: ECFG | None = None
    ecfg_C: ECFG | None = None
    created: list[Bytecode] = field(default_factory=list)


@dataclass
class PairResult:
    f: FunctionEntry
    g: FunctionEntry
    status: Status
    witness: dict[str, int] | None = None
    paths_I: int = 0
    paths_C: int = 0
    elapsed_ms: int = 0
    note: str | None = None
    scenarios: ScenarioSet | None = None  # kept for inspection, not serialized

    def to_dict(self) -> dict:
        return {
            "f": self.f.describe(),
            "g": self.g.describe(),
            "status": self.status.value,
            "witness-model": (None if self.witness is None else
                              {k: hex(v) for k, v in sorted(self.witness.items())}),
            "paths_I": self.paths_I,
            "paths_C": self.paths_C,
            "elapsed_ms": self.elapsed_ms,
            **({"note": self.note} if self.note else {}),
        }


@dataclass
class ContractReport:
    label: str
    source: str
    status: Status
    functions: list[FunctionEntry] = field(default_factory=list)
    pairs: list[PairResult] = field(default_factory=list)
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "contract": self.label,
            "source": self.source,
            "status": self.status.value,
            "functions": [{"selector": f.describe(), "has_call": f.has_call}
                          for f in self.functions],
            "pairs": [p.to_dict() for p in self.pairs],
            **({"error": self.error} if self.error else {}),
        }


@dataclass
class AnalysisReport:
    contracts: list[ContractReport]
    elapsed_ms: int

    @property
    def status(self) -> Status:
        return _aggregate(c.status for c in self.contracts)

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "elapsed_ms": self.elapsed_ms,
            "contracts": [c.to_dict() for c in self.contracts],
        }


def _aggregate(statuses) -> Status:
    out = Status.BENIGN
    for s in statuses:
        if s is Status.VULNERABLE:
            return Status.VULNERABLE
        if s is Status.INCONCLUSIVE:
            out = Status.INCONCLUSIVE
    return out


# -- scenario collection ------------------------------------------------------

def _finalized(block: BasicBlock) -> PathCondition:
    """A block's condition with end-state solvency terms appended."""
    pc = block.path_condition
    for c in block.world.solvency_constraints():
        pc = pc.extended(c, ConstraintOrigin.BALANCE)
    return pc


def _sequential_g(vm: SymVM, end: BasicBlock, g: FunctionEntry,
                  out: ScenarioSet, into: list[PathCondition]) -> None:
    """Continue a finished f path with g as its own transaction."""
    caller = end.ext_call_target if end.ext_call_target is not None \
        else tm.var("caller")
    res = vm.run_entry(
        None, AbiCalldata(g.selector, "g"),
        world=end.world.clone(),
        caller=caller,
        callvalue=tm.var("g_callvalue"),
        path_condition=end.path_condition,
        scenario=ScenarioConfig(end_constraints=True))
    into.extend(b.path_condition for b in res.completed)
    _merge_created(out, res)


def _merge_created(out: ScenarioSet, res: RunResult) -> None:
    known = {c.data for c in out.created}
    for code in res.created:
        if code.data not in known:
            known.add(code.data)
            out.created.append(code)


def collect_scenarios(code: Bytecode, f: FunctionEntry, g: FunctionEntry,
                      config: AnalyzerConfig,
                      solver: Solver | None = None) -> ScenarioSet:
    solver = solver or Solver(config.solver_timeout)
    vm = SymVM(solver, config.vm_config())
    out = ScenarioSet(f=f, g=g)

    # I: strictly sequential f then g
    seq = vm.run_entry(code, AbiCalldata(f.selector, "f"),
                       scenario=ScenarioConfig(end_constraints=False))
    out.ecfg_I = seq.ecfg
    _merge_created(out, seq)
    for end in seq.completed:
        _sequential_g(vm, end, g, out, out.I)

    # C: g injected mid-f through the attacker dummy
    ree = vm.run_entry(code, AbiCalldata(f.selector, "f"),
                       scenario=ScenarioConfig(
                           mode=Mode.REENTRANT,
                           reentry_selector=g.selector,
                           reentry_budget=config.reentry_budget,
                           end_constraints=False))
    out.ecfg_C = ree.ecfg
    _merge_created(out, ree)
    for end in ree.completed:
        if end.reentered:
            out.C.append(_finalized(end))
        else:
            # no external call was reached; the schedules coincide
            _sequential_g(vm, end, g, out, out.C)
    return out


# -- verdicts -----------------------------------------------------------------

def _dedupe(conditions: list[PathCondition]) -> list[PathCondition]:
    seen: set[frozenset] = set()
    out = []
    for c in conditions:
        k = c.key()
        if k not in seen:
            seen.add(k)
            out.append(c)
    return out


def _feasible_only(conditions: list[PathCondition],
                   solver: Solver) -> tuple[list[PathCondition], bool]:
    """Drop provably-unsatisfiable conditions; report if any were undecided."""
    out = []
    undecided = False
    for c in conditions:
        verdict = solver.check_sat(c.terms, want_model=False)
        if verdict.status is SolverStatus.UNSAT:
            continue
        if verdict.status is SolverStatus.UNKNOWN:
            undecided = True
        out.append(c)
    return out, undecided


def verify_pair(code: Bytecode, f: FunctionEntry, g: FunctionEntry,
                config: AnalyzerConfig | None = None) -> PairResult:
    config = config or AnalyzerConfig()
    solver = Solver(config.solver_timeout)
    start = time.monotonic()

    def done(status: Status, scenarios: ScenarioSet | None = None,
             witness: dict[str, int] | None = None,
             note: str | None = None) -> PairResult:
        return PairResult(
            f=f, g=g, status=status, witness=witness,
            paths_I=len(scenarios.I) if scenarios else 0,
            paths_C=len(scenarios.C) if scenarios else 0,
            elapsed_ms=int((time.monotonic() - start) * 1000),
            note=note, scenarios=scenarios)

    try:
        scenarios = collect_scenarios(code, f, g, config, solver)
    except PathExplosion as exc:
        return done(Status.INCONCLUSIVE, note=str(exc))

    I = _dedupe(scenarios.I)
    C = _dedupe(scenarios.C)
    I, i_undecided = _feasible_only(I, solver)
    C, _ = _feasible_only(C, solver)
    scenarios.I, scenarios.C = I, C
    if not I or not C:
        note = "empty scenario set" if not (scenarios.I or scenarios.C) else None
        if i_undecided:
            return done(Status.INCONCLUSIVE, scenarios, note="undecided baseline")
        return done(Status.BENIGN, scenarios, note=note)

    inconclusive = False
    for c in C:
        matched = False
        undecided = False
        for i in I:
            try:
                if solver.check_equivalence(c.terms, i.terms):
                    matched = True
                    break
            except IndeterminateEquivalence:
                undecided = True
        if matched:
            continue
        if undecided or i_undecided:
            inconclusive = True
            continue
        sat = solver.check_sat(c.terms)
        if sat.status is SolverStatus.SAT:
            return done(Status.VULNERABLE, scenarios, witness=sat.model)
        inconclusive = True  # witness extraction failed within budget
    if inconclusive:
        return done(Status.INCONCLUSIVE, scenarios)
    return done(Status.BENIGN, scenarios)


def enumerate_pairs(functions: list[FunctionEntry]) -> list[tuple[FunctionEntry, FunctionEntry]]:
    """Calling functions f crossed with every dispatchable g (f = g included).

    The fallback pseudo-entry has no selector an attacker can dispatch by
    name, so it participates in neither role.
    """
    dispatchable = [fn for fn in functions if fn.selector is not None]
    return [(f, g) for f in dispatchable if f.has_call for g in dispatchable]


# -- whole-target analysis ----------------------------------------------------

def analyze(targets: list[tuple[str, Bytecode, str]],
            config: AnalyzerConfig | None = None) -> AnalysisReport:
    """Analyze each (label, code, source) target, following contracts the
    code deploys at run time. Pair verification fans out over a thread pool;
    results are aggregated in enumeration order, so reports are deterministic.
    """
    config = config or AnalyzerConfig()
    start = time.monotonic()
    reports: list[ContractReport] = []
    for label, code, source in targets:
        queue: list[tuple[str, Bytecode, str]] = [(label, code, source)]
        seen = {code.data}
        while queue:
            qlabel, qcode, qsource = queue.pop(0)
            report = _analyze_one(qlabel, qcode, qsource, config)
            reports.append(report)
            for pair in report.pairs:
                if pair.scenarios is None:
                    continue
                for created in pair.scenarios.created:
                    if created.data not in seen:
                        seen.add(created.data)
                        queue.append((f"{qlabel}.created{len(seen) - 1}",
                                      created, "create"))
    return AnalysisReport(reports, int((time.monotonic() - start) * 1000))


def _analyze_one(label: str, code: Bytecode, source: str,
                 config: AnalyzerConfig) -> ContractReport:
    try:
        functions = extract_function_ids(
            code, Solver(config.solver_timeout), config.vm_config())
        pairs = enumerate_pairs(functions)
    except Exception as exc:  # noqa: BLE001 - one bad contract must not stop the run
        return ContractReport(label, source, Status.INCONCLUSIVE, error=str(exc))

    def work(pair: tuple[FunctionEntry, FunctionEntry]) -> PairResult:
        try:
            return verify_pair(code, pair[0], pair[1], config)
        except Exception as exc:  # noqa: BLE001
            return PairResult(f=pair[0], g=pair[1],
                              status=Status.INCONCLUSIVE, note=str(exc))

    if not pairs:
        results: list[PairResult] = []
    elif config.workers <= 1 or len(pairs) == 1:
        results = [work(p) for p in pairs]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            results = list(pool.map(work, pairs))
    return ContractReport(
        label=label, source=source,
        status=_aggregate(r.status for r in results),
        functions=functions, pairs=results)
