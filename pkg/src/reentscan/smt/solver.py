"""Satisfiability and path-condition equivalence checks over 256-bit words.

The backend is swappable behind :class:`Solver`; this build lowers terms to
CNF and decides them with the in-tree CDCL engine. Unknown results (budget
exhausted or an unsupported operation) are always surfaced, never coerced.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .bitblast import BitBlaster, UnsupportedTermError
from .sat import SatSolver
from .terms import FALSE, TRUE, Term, band, bnot, evaluate


class SolverStatus(enum.Enum):
    SAT = "sat"
    UNSAT = "unsat"
    UNKNOWN = "unknown"


@dataclass
class SolverVerdict:
    status: SolverStatus
    model: dict[str, int] | None
    elapsed: float

    @property
    def is_sat(self) -> bool:
        return self.status is SolverStatus.SAT


class IndeterminateEquivalence(Exception):
    """The solver could not decide an equivalence query within budget."""


def _flatten(constraints: Iterable[Term]) -> list[Term]:
    out: list[Term] = []
    seen: set[Term] = set()
    for c in constraints:
        parts = c.args if c.op == "band" else (c,)
        for p in parts:
            if p == TRUE:
                continue
            if p not in seen:
                seen.add(p)
                out.append(p)
    return out


class Solver:
    """One instance per worker; holds only configuration, no shared state."""

    def __init__(self, timeout: float = 60.0) -> None:
        self.timeout = timeout

    def check_sat(self, constraints: Iterable[Term],
                  want_model: bool = True) -> SolverVerdict:
        start = time.monotonic()
        flat = _flatten(constraints)
        if any(c == FALSE for c in flat):
            return SolverVerdict(SolverStatus.UNSAT, None, time.monotonic() - start)
        if not flat:
            model: dict[str, int] | None = {} if want_model else None
            return SolverVerdict(SolverStatus.SAT, model, time.monotonic() - start)

        sat = SatSolver()
        blaster = BitBlaster(sat)
        try:
            for c in flat:
                blaster.assert_true(c)
        except UnsupportedTermError:
            return SolverVerdict(SolverStatus.UNKNOWN, None, time.monotonic() - start)

        result = sat.solve(deadline=start + self.timeout)
        elapsed = time.monotonic() - start
        if result is None:
            return SolverVerdict(SolverStatus.UNKNOWN, None, self.timeout)
        if not result:
            return SolverVerdict(SolverStatus.UNSAT, None, elapsed)
        model = None
        if want_model:
            model = {}
            for c in flat:
                for v in c.variables():
                    model[v.name] = blaster.var_value(v.name, v.width)
            self._verify_model(flat, model)
        return SolverVerdict(SolverStatus.SAT, model, elapsed)

    @staticmethod
    def _verify_model(constraints: Sequence[Term], model: Mapping[str, int]) -> None:
        for c in constraints:
            if evaluate(c, model) != 1:
                raise RuntimeError(f"solver returned a bogus model for {c!r}")

    def check_equivalence(self, left: Sequence[Term], right: Sequence[Term]) -> bool:
        """Model-set equality of two constraint conjunctions.

        Decided by refuting both directed differences; raises
        :class:`IndeterminateEquivalence` if either query is Unknown.
        """
        a = _flatten(left)
        b = _flatten(right)
        if set(a) == set(b):
            return True
        forward = self.check_sat([*a, bnot(band(b))], want_model=False)
        if forward.status is SolverStatus.UNKNOWN:
            raise IndeterminateEquivalence("left minus right undecided")
        if forward.is_sat:
            return False
        backward = self.check_sat([*b, bnot(band(a))], want_model=False)
        if backward.status is SolverStatus.UNKNOWN:
            raise IndeterminateEquivalence("right minus left undecided")
        return not backward.is_sat
