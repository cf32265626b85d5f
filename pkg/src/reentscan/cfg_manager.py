"""Path bookkeeping: the depth-first worklist, block sealing, branching, DOT export.

The :class:`Explorer` owns the extended CFG under construction and the
``dfs_stack`` of pending blocks. Branches follow the fall-through side first
and push the jump side; single-feasible branches continue in place without
forking a new node.
"""

from __future__ import annotations

from .smt import Solver, SolverStatus
from .smt import terms as tm
from .smt.terms import Term
from .symdomain import (
    HALTED,
    BasicBlock,
    ConstraintOrigin,
    ECFG,
    EdgeKind,
    EndState,
    NodeInfo,
)


class DoubleSealError(Exception):
    """A block was sealed twice; exploration bookkeeping is corrupt."""


class PathExplosion(Exception):
    """The number of explored paths exceeded the configured cap."""


class Explorer:
    def __init__(self, solver: Solver, path_cap: int = 10_000):
        self.solver = solver
        self.path_cap = path_cap
        self.ecfg = ECFG()
        self.dfs_stack: list[BasicBlock] = []
        self.sealed: list[BasicBlock] = []
        self._next_id = 0

    # -- block lifecycle ------------------------------------------------------

    def _register(self, block: BasicBlock) -> None:
        self.ecfg.add_node(NodeInfo(
            block_id=block.id,
            contract=block.machine.account,
            start_pc=block.machine.pc,
        ))

    def adopt(self, block: BasicBlock) -> BasicBlock:
        """Take ownership of an externally built root block."""
        block.id = self._next_id
        self._next_id += 1
        self._register(block)
        return block

    def fork(self, block: BasicBlock) -> BasicBlock:
        out = block.copy_as(self._next_id)
        self._next_id += 1
        self._register(out)
        return out

    def push(self, block: BasicBlock) -> None:
        self.dfs_stack.append(block)

    def _close(self, block: BasicBlock, end_state: EndState) -> None:
        block.end_state = end_state
        info = self.ecfg.nodes[block.id]
        info.end_state = end_state
        info.flags = frozenset(block.flags)

    def seal(self, block: BasicBlock, end_state: EndState,
             note: str | None = None) -> None:
        if block.end_state is not EndState.OPEN:
            raise DoubleSealError(
                f"block {block.id} already sealed as {block.end_state}")
        if end_state not in HALTED:
            raise ValueError(f"{end_state} is not a halting end state")
        block.note = note
        self._close(block, end_state)
        self.sealed.append(block)
        if len(self.sealed) > self.path_cap:
            raise PathExplosion(f"more than {self.path_cap} paths")

    def transition(self, block: BasicBlock, kind: EdgeKind,
                   contract: str | None = None) -> BasicBlock:
        """End ``block`` at a contract boundary and continue in a successor."""
        self._close(block, EndState.TRANSITED)
        out = self.fork(block)
        if contract is not None:
            self.ecfg.nodes[out.id].contract = contract
        self.ecfg.add_edge(block.id, out.id, kind)
        return out

    # -- branching ------------------------------------------------------------

    def _feasible(self, constraints: list[Term]) -> bool:
        verdict = self.solver.check_sat(constraints, want_model=False)
        # an undecided branch is still explored; its condition rides along
        return verdict.status is not SolverStatus.UNSAT

    def _resolve_target(self, block: BasicBlock, target: Term,
                        jumpdests: set[int]) -> int | None:
        if target.is_const:
            value = target.value
        else:
            verdict = self.solver.check_sat(block.path_condition.terms)
            if not verdict.is_sat:
                return None
            value = tm.evaluate(target, verdict.model or {})
            block.path_condition = block.path_condition.extended(
                tm.eq(target, tm.const(value)), ConstraintOrigin.CONCRETIZE)
        return value if value in jumpdests else None

    def jump(self, block: BasicBlock, target: Term,
             jumpdests: set[int]) -> BasicBlock | None:
        value = self._resolve_target(block, target, jumpdests)
        if value is None:
            self.seal(block, EndState.INVALID, "bad jump target")
            return None
        block.machine.pc = value
        return block

    def branch_on_jumpi(self, block: BasicBlock, target: Term, cond: Term,
                        jumpdests: set[int], fall_pc: int) -> BasicBlock | None:
        """Split (or continue) at a conditional jump; returns the block to keep
        executing, with any second successor pushed onto the worklist."""
        if cond.is_const:
            if cond.value:
                return self.jump(block, target, jumpdests)
            block.machine.pc = fall_pc
            return block

        pc_terms = block.path_condition.terms
        neg = tm.bnot(cond)
        fall_ok = self._feasible(pc_terms + [neg])
        jump_ok = self._feasible(pc_terms + [cond])

        if fall_ok and jump_ok:
            self._close(block, EndState.BRANCHED)
            fall = self.fork(block)
            fall.path_condition = fall.path_condition.extended(neg)
            fall.machine.pc = fall_pc
            jump = self.fork(block)
            jump.path_condition = jump.path_condition.extended(cond)
            self.ecfg.add_edge(block.id, fall.id, EdgeKind.FALLTHROUGH)
            self.ecfg.add_edge(block.id, jump.id, EdgeKind.JUMP)
            resolved = self._resolve_target(jump, target, jumpdests)
            if resolved is None:
                self.seal(jump, EndState.INVALID, "bad jump target")
            else:
                jump.machine.pc = resolved
                self.push(jump)
            return fall
        if jump_ok:
            block.path_condition = block.path_condition.extended(cond)
            return self.jump(block, target, jumpdests)
        if fall_ok:
            block.path_condition = block.path_condition.extended(neg)
            block.machine.pc = fall_pc
            return block
        self.seal(block, EndState.INVALID, "contradictory branch")
        return None


# -- DOT export ---------------------------------------------------------------

_ENTER_KINDS = {EdgeKind.CREATE_ENTER, EdgeKind.CALL_ENTER}
_RETURN_KINDS = {EdgeKind.CREATE_RETURN, EdgeKind.CALL_RETURN}


def export_dot(ecfg: ECFG, title: str = "ecfg") -> str:
    """Render the extended CFG; call/create entry nodes red, return nodes green."""
    entered = {dst for _, dst, kind in ecfg.edges if kind in _ENTER_KINDS}
    returned = {dst for _, dst, kind in ecfg.edges if kind in _RETURN_KINDS}
    lines = [f"digraph {title} {{", "  node [shape=box fontname=monospace];"]
    for bid in sorted(ecfg.nodes):
        info = ecfg.nodes[bid]
        label = info.label or f"{info.contract}@{info.start_pc}\\n{info.end_state.value}"
        attrs = [f'label="{label}"']
        if bid in entered:
            attrs.append('style=filled fillcolor=salmon')
        elif bid in returned:
            attrs.append('style=filled fillcolor=palegreen')
        lines.append(f"  n{bid} [{' '.join(attrs)}];")
    for src, dst, kind in ecfg.edges:
        lines.append(f'  n{src} -> n{dst} [label="{kind.value}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
