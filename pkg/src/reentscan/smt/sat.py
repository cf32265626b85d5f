"""A compact CDCL SAT solver (watched literals, 1UIP learning, VSIDS, restarts).

Literals are nonzero ints: +v / -v for variable v (1-based). ``solve`` returns
True/False for sat/unsat and None when the time or conflict budget runs out.
"""

from __future__ import annotations

import time


class SatSolver:
    def __init__(self) -> None:
        self.num_vars = 0
        self.clauses: list[list[int]] = []
        self.watches: dict[int, list[int]] = {}
        self.assign: list[int] = [0]  # var -> 0 unassigned, 1 true, -1 false
        self.level: list[int] = [0]
        self.reason: list[int] = [0]  # var -> clause index + 1, 0 = decision
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.activity: list[float] = [0.0]
        self.phase: list[int] = [0]  # saved polarity
        self.var_inc = 1.0
        self.var_decay = 0.95
        self.qhead = 0
        self.ok = True

    # -- construction ---------------------------------------------------------

    def new_var(self) -> int:
        self.num_vars += 1
        self.assign.append(0)
        self.level.append(0)
        self.reason.append(0)
        self.activity.append(0.0)
        self.phase.append(-1)
        return self.num_vars

    def add_clause(self, lits: list[int]) -> None:
        if not self.ok:
            return
        # dedupe, drop tautologies
        seen: set[int] = set()
        out: list[int] = []
        for lit in lits:
            if -lit in seen:
                return
            if lit not in seen:
                seen.add(lit)
                out.append(lit)
        # drop literals falsified at level 0; a clause satisfied at level 0 is a no-op
        filtered = []
        for lit in out:
            v = self._value(lit)
            if v == 1 and self.level[abs(lit)] == 0:
                return  # already satisfied
            if v == -1 and self.level[abs(lit)] == 0:
                continue
            filtered.append(lit)
        if not filtered:
            self.ok = False
            return
        if len(filtered) == 1:
            if not self._enqueue(filtered[0], 0):
                self.ok = False
            return
        self._attach(filtered)

    def _attach(self, lits: list[int]) -> int:
        idx = len(self.clauses)
        self.clauses.append(lits)
        self.watches.setdefault(-lits[0], []).append(idx)
        self.watches.setdefault(-lits[1], []).append(idx)
        return idx

    # -- core -----------------------------------------------------------------

    def _value(self, lit: int) -> int:
        v = self.assign[abs(lit)]
        return v if lit > 0 else -v

    def _enqueue(self, lit: int, reason: int) -> bool:
        v = self._value(lit)
        if v == 1:
            return True
        if v == -1:
            return False
        var = abs(lit)
        self.assign[var] = 1 if lit > 0 else -1
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.phase[var] = 1 if lit > 0 else -1
        self.trail.append(lit)
        return True

    def _propagate(self) -> int:
        """Return conflicting clause index + 1, or 0."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            watch_list = self.watches.get(lit)
            if not watch_list:
                continue
            kept: list[int] = []
            i = 0
            n = len(watch_list)
            while i < n:
                ci = watch_list[i]
                i += 1
                clause = self.clauses[ci]
                # ensure the falsified literal is at position 1
                if clause[0] == -lit:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self._value(first) == 1:
                    kept.append(ci)
                    continue
                # search replacement watch
                found = False
                for k in range(2, len(clause)):
                    if self._value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches.setdefault(-clause[1], []).append(ci)
                        found = True
                        break
                if found:
                    continue
                kept.append(ci)
                if not self._enqueue(first, ci + 1):
                    kept.extend(watch_list[i:])
                    self.watches[lit] = kept
                    return ci + 1
            self.watches[lit] = kept
        return 0

    def _bump(self, var: int) -> None:
        self.activity[var] += self.var_inc
        if self.activity[var] > 1e100:
            for i in range(1, self.num_vars + 1):
                self.activity[i] *= 1e-100
            self.var_inc *= 1e-100

    def _analyze(self, conflict: int) -> tuple[list[int], int]:
        learnt = [0]
        seen = [False] * (self.num_vars + 1)
        counter = 0
        lit = 0
        index = len(self.trail)
        clause = self.clauses[conflict - 1]
        cur_level = len(self.trail_lim)
        while True:
            for q in clause if lit == 0 else clause[1:]:
                var = abs(q)
                if not seen[var] and self.level[var] > 0:
                    seen[var] = True
                    self._bump(var)
                    if self.level[var] >= cur_level:
                        counter += 1
                    else:
                        learnt.append(q)
            while True:
                index -= 1
                lit = self.trail[index]
                if seen[abs(lit)]:
                    break
            counter -= 1
            if counter == 0:
                break
            reason = self.reason[abs(lit)]
            clause = self.clauses[reason - 1]
            # put the implied literal first so the [1:] slice skips it
            if clause[0] != lit:
                pos = clause.index(lit)
                clause[0], clause[pos] = clause[pos], clause[0]
            seen[abs(lit)] = False
        learnt[0] = -lit
        if len(learnt) == 1:
            return learnt, 0
        back = max(self.level[abs(q)] for q in learnt[1:])
        # move a max-level literal to position 1 for watching
        for k in range(1, len(learnt)):
            if self.level[abs(learnt[k])] == back:
                learnt[1], learnt[k] = learnt[k], learnt[1]
                break
        return learnt, back

    def _backtrack(self, level: int) -> None:
        if len(self.trail_lim) <= level:
            return
        limit = self.trail_lim[level]
        for lit in reversed(self.trail[limit:]):
            self.assign[abs(lit)] = 0
        del self.trail[limit:]
        del self.trail_lim[level:]
        self.qhead = len(self.trail)

    def _decide(self) -> int:
        best, best_act = 0, -1.0
        for var in range(1, self.num_vars + 1):
            if self.assign[var] == 0 and self.activity[var] > best_act:
                best, best_act = var, self.activity[var]
        if best == 0:
            return 0
        return best if self.phase[best] >= 0 else -best

    def solve(self, deadline: float | None = None,
              max_conflicts: int | None = None) -> bool | None:
        if not self.ok:
            return False
        if self._propagate():
            self.ok = False
            return False
        conflicts = 0
        restart_limit = 100
        since_restart = 0
        while True:
            conflict = self._propagate()
            if conflict:
                conflicts += 1
                since_restart += 1
                if len(self.trail_lim) == 0:
                    self.ok = False
                    return False
                learnt, back = self._analyze(conflict)
                self._backtrack(back)
                if len(learnt) == 1:
                    if not self._enqueue(learnt[0], 0):
                        self.ok = False
                        return False
                else:
                    ci = self._attach(learnt)
                    self._enqueue(learnt[0], ci + 1)
                self.var_inc /= self.var_decay
                if max_conflicts is not None and conflicts >= max_conflicts:
                    self._backtrack(0)
                    return None
                if conflicts % 256 == 0 and deadline is not None \
                        and time.monotonic() > deadline:
                    self._backtrack(0)
                    return None
                if since_restart >= restart_limit:
                    since_restart = 0
                    restart_limit = int(restart_limit * 1.5)
                    self._backtrack(0)
            else:
                lit = self._decide()
                if lit == 0:
                    return True
                if deadline is not None and time.monotonic() > deadline:
                    self._backtrack(0)
                    return None
                self.trail_lim.append(len(self.trail))
                self._enqueue(lit, 0)

    def model_value(self, var: int) -> bool:
        return self.assign[var] == 1
