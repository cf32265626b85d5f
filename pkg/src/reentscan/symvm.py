"""Symbolic EVM interpreter over local world states.

One :class:`SymVM` explores every feasible path of a transaction, forking at
conditional jumps and crossing contract boundaries at CREATE and CALL. In the
re-entrant scenario an external call to unknown code is answered by an
attacker dummy that immediately calls back into the victim with a chosen
selector before reporting success; the dummy is behavioral, it has no
bytecode of its own.

Symbol names are fixed by role (``caller``, ``f_callvalue``, ``g_arg0``,
storage reads keyed by account and slot digest) so that path conditions from
independently explored scenarios over the same function pair share one symbol
environment.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .cfg_manager import Explorer
from .evm_core import (
    Bytecode,
    BytecodeOrigin,
    FunctionId,
    Instruction,
    OPCODES,
    disassemble,
    valid_jump_targets,
)
from .keccak import keccak256
from .smt import Solver, SolverStatus
from .smt import terms as tm
from .smt.terms import Term
from .symdomain import (
    AbiCalldata,
    Account,
    BasicBlock,
    CALLABLE,
    Calldata,
    CallKind,
    CallStackEntry,
    COMPLETED,
    ConstraintOrigin,
    ECFG,
    EdgeKind,
    EndState,
    LocalWorldState,
    MachineState,
    MAX_STACK,
    PathCondition,
    TermCalldata,
)

WORD = (1 << 256) - 1


@dataclass
class VmConfig:
    call_depth_bound: int = 8
    loop_bound: int = 3
    path_cap: int = 10_000
    solver_timeout: float = 60.0


class Mode(enum.Enum):
    SEQUENTIAL = "sequential"
    REENTRANT = "reentrant"


@dataclass
class ScenarioConfig:
    mode: Mode = Mode.SEQUENTIAL
    reentry_selector: FunctionId | None = None
    reentry_budget: int = 1
    end_constraints: bool = True  # add solvency terms at top-level halts
    victim_account: str = "c0"


@dataclass
class RunResult:
    completed: list[BasicBlock]   # top-level Stop/Return blocks
    sealed: list[BasicBlock]      # every halted block, Revert and Invalid included
    ecfg: ECFG
    created: list[Bytecode]       # runtime code returned by CREATE along any path


@dataclass(frozen=True)
class FunctionEntry:
    selector: FunctionId | None   # None marks the fallback pseudo-entry
    has_call: bool

    def describe(self) -> str:
        return self.selector.hex() if self.selector else "fallback"


def _signed(v: int) -> int:
    return v - (1 << 256) if v >> 255 else v


class SymVM:
    def __init__(self, solver: Solver | None = None,
                 config: VmConfig | None = None):
        self.config = config or VmConfig()
        self.solver = solver or Solver(self.config.solver_timeout)
        self._code_cache: dict[bytes, tuple[dict[int, Instruction], set[int]]] = {}

    # -- entry points ---------------------------------------------------------

    def run_entry(self, code: Bytecode | None, calldata: Calldata, *,
                  world: LocalWorldState | None = None,
                  caller: Term | None = None,
                  callvalue: Term | None = None,
                  path_condition: PathCondition | None = None,
                  scenario: ScenarioConfig | None = None) -> RunResult:
        """Explore one transaction against the victim contract."""
        scenario = scenario or ScenarioConfig()
        label = scenario.victim_account
        if world is None:
            world = LocalWorldState()
        if label not in world.accounts:
            if code is None:
                raise ValueError("fresh world needs the victim bytecode")
            world.add_account(label, tm.var(f"address_{label}"), code=code)
        victim = world.accounts[label]
        caller = caller if caller is not None else tm.var("caller")
        callvalue = callvalue if callvalue is not None else tm.var("f_callvalue")
        sender = world.external_account(caller)
        self._transfer(sender, victim, callvalue)
        machine = MachineState(
            code=victim.code,
            account=label,
            caller=caller,
            callvalue=callvalue,
            calldata=calldata,
        )
        root = BasicBlock(
            id=0,
            machine=machine,
            world=world,
            path_condition=path_condition or PathCondition(),
            reentry_budget=(scenario.reentry_budget
                            if scenario.mode is Mode.REENTRANT else 0),
        )
        return self.explore(root, scenario)

    def explore(self, root: BasicBlock, scenario: ScenarioConfig) -> RunResult:
        ex = Explorer(self.solver, self.config.path_cap)
        self._created: list[Bytecode] = []
        ex.push(ex.adopt(root))
        while ex.dfs_stack:
            block = ex.dfs_stack.pop()
            cur: BasicBlock | None = block
            while cur is not None and cur.end_state is EndState.OPEN:
                cur = self._step(cur, ex, scenario)
        completed = [b for b in ex.sealed
                     if b.end_state in COMPLETED and not b.call_stack]
        return RunResult(completed, ex.sealed, ex.ecfg, self._created)

    # -- helpers --------------------------------------------------------------

    def _decoded(self, code: Bytecode) -> tuple[dict[int, Instruction], set[int]]:
        cached = self._code_cache.get(code.data)
        if cached is None:
            table = {ins.offset: ins for ins in disassemble(code)}
            cached = (table, valid_jump_targets(code))
            self._code_cache[code.data] = cached
        return cached

    @staticmethod
    def _transfer(src: Account | None, dst: Account | None, value: Term) -> None:
        if value.is_const and value.value == 0:
            return
        if src is not None:
            src.debits.append(value)
        if dst is not None:
            dst.credits.append(value)

    def _concretize(self, block: BasicBlock, ex: Explorer,
                    term: Term, what: str) -> int | None:
        """Pin a symbolic word to one model value, recorded on the path."""
        if term.is_const:
            return term.value
        verdict = self.solver.check_sat(block.path_condition.terms)
        if not verdict.is_sat:
            ex.seal(block, EndState.INVALID, f"cannot concretize {what}")
            return None
        value = tm.evaluate(term, verdict.model or {})
        block.path_condition = block.path_condition.extended(
            tm.eq(term, tm.const(value)), ConstraintOrigin.CONCRETIZE)
        return value

    @staticmethod
    def _memo_word(name: str, *parts: Term) -> Term:
        """Deterministic opaque result for ops outside the solver fragment."""
        tag = "_".join(p.digest() for p in parts)
        return tm.var(f"{name}_{tag}")

    def _solvency(self, block: BasicBlock) -> None:
        for c in block.world.solvency_constraints():
            block.path_condition = block.path_condition.extended(
                c, ConstraintOrigin.BALANCE)

    # -- halting --------------------------------------------------------------

    def _halt(self, block: BasicBlock, ex: Explorer, scenario: ScenarioConfig,
              end: EndState, data: tuple[Term, ...] = ()) -> BasicBlock | None:
        if end is EndState.REVERT:
            # a revert anywhere abandons the whole path
            ex.seal(block, EndState.REVERT)
            return None
        if not block.call_stack:
            if scenario.end_constraints:
                self._solvency(block)
            ex.seal(block, end)
            return None

        entry = block.call_stack.pop()
        if entry.kind is CallKind.CREATE:
            runtime = self._require_concrete_bytes(block, ex, data, "init return")
            if runtime is None:
                return None
            acct = block.world.accounts[entry.created_label]
            acct.code = Bytecode(runtime, BytecodeOrigin.CREATE_RETURNED)
            if runtime and all(runtime != c.data for c in self._created):
                self._created.append(acct.code)
            cont = ex.transition(block, EdgeKind.CREATE_RETURN,
                                 contract=entry.saved_machine.account)
            cont.machine = entry.saved_machine.clone()
            cont.machine.stack.append(acct.address)
            return cont

        if entry.kind is CallKind.CALL:
            cont = ex.transition(block, EdgeKind.CALL_RETURN,
                                 contract=entry.saved_machine.account)
            cont.machine = entry.saved_machine.clone()
            self._write_return(cont.machine, entry, data)
            cont.machine.stack.append(tm.const(1))
            return cont

        # dummy re-entry: hop back through the attacker node, then resume f
        attacker = ex.ecfg.nodes[entry.dummy_node].contract
        hop = ex.transition(block, EdgeKind.CALL_RETURN, contract=attacker)
        cont = ex.transition(hop, EdgeKind.CALL_RETURN,
                             contract=entry.saved_machine.account)
        cont.machine = entry.saved_machine.clone()
        self._write_return(cont.machine, entry, data)
        cont.machine.stack.append(tm.const(1))
        return cont

    @staticmethod
    def _write_return(machine: MachineState, entry: CallStackEntry,
                      data: tuple[Term, ...]) -> None:
        machine.returndata = list(data)
        for i in range(min(entry.out_size, len(data))):
            machine.memory[entry.out_offset + i] = data[i]

    def _require_concrete_bytes(self, block: BasicBlock, ex: Explorer,
                                data: tuple[Term, ...],
                                what: str) -> bytes | None:
        if not all(b.is_const for b in data):
            ex.seal(block, EndState.INVALID, f"symbolic {what}")
            return None
        return bytes(b.value & 0xFF for b in data)

    # -- call and create ------------------------------------------------------

    def _do_call(self, block: BasicBlock, ex: Explorer,
                 scenario: ScenarioConfig, next_pc: int) -> BasicBlock | None:
        m = block.machine
        _gas = m.stack.pop()
        to = m.stack.pop()
        value = m.stack.pop()
        in_off = m.stack.pop()
        in_size = m.stack.pop()
        out_off = m.stack.pop()
        out_size = m.stack.pop()
        block.flags.add(CALLABLE)

        world = block.world
        caller_acct = world.accounts[m.account]
        target = world.external_account(to)
        self._transfer(caller_acct, target, value)

        sizes = []
        for t, what in ((in_off, "call in offset"), (in_size, "call in size"),
                        (out_off, "call out offset"), (out_size, "call out size")):
            v = self._concretize(block, ex, t, what)
            if v is None:
                return None
            sizes.append(v)
        in_off_v, in_size_v, out_off_v, out_size_v = sizes

        if target.code is not None:
            if not target.code.data:
                # deployed empty contract: succeeds without running anything
                m.stack.append(tm.const(1))
                m.returndata = []
                m.pc = next_pc
                return block
            if len(block.call_stack) + 1 >= self.config.call_depth_bound:
                ex.seal(block, EndState.DEPTH_BOUND)
                return None
            saved = m.clone()
            saved.pc = next_pc
            entry = CallStackEntry(
                kind=CallKind.CALL, saved_machine=saved, return_pc=next_pc,
                out_offset=out_off_v, out_size=out_size_v)
            nxt = ex.transition(block, EdgeKind.CALL_ENTER, contract=target.label)
            nxt.call_stack.append(entry)
            nxt.machine = MachineState(
                code=target.code, account=target.label,
                caller=caller_acct.address, callvalue=value,
                calldata=TermCalldata(m.mbytes(in_off_v, in_size_v)))
            return nxt

        # unknown code behind the target address
        if block.ext_call_target is None:
            block.ext_call_target = to
        if scenario.mode is Mode.REENTRANT and block.reentry_budget > 0:
            return self._reenter(block, ex, scenario, target,
                                 next_pc, out_off_v, out_size_v)
        m.stack.append(tm.const(1))
        m.returndata = []
        m.pc = next_pc
        return block

    def _reenter(self, block: BasicBlock, ex: Explorer, scenario: ScenarioConfig,
                 attacker: Account, next_pc: int,
                 out_off: int, out_size: int) -> BasicBlock | None:
        if len(block.call_stack) + 2 >= self.config.call_depth_bound:
            ex.seal(block, EndState.DEPTH_BOUND)
            return None
        block.reentry_budget -= 1
        block.reentered = True
        victim = block.world.accounts[scenario.victim_account]
        g_value = tm.var("g_callvalue")
        self._transfer(attacker, victim, g_value)

        saved = block.machine.clone()
        saved.pc = next_pc
        dummy = ex.transition(block, EdgeKind.CALL_ENTER, contract=attacker.label)
        entry_block = ex.transition(dummy, EdgeKind.CALL_ENTER,
                                    contract=victim.label)
        entry_block.call_stack.append(CallStackEntry(
            kind=CallKind.DUMMY_REENTRY, saved_machine=saved, return_pc=next_pc,
            out_offset=out_off, out_size=out_size, dummy_node=dummy.id))
        entry_block.machine = MachineState(
            code=victim.code, account=victim.label,
            caller=attacker.address, callvalue=g_value,
            calldata=AbiCalldata(scenario.reentry_selector, "g"))
        return entry_block

    def _do_create(self, block: BasicBlock, ex: Explorer,
                   next_pc: int) -> BasicBlock | None:
        m = block.machine
        value = m.stack.pop()
        offset = m.stack.pop()
        length = m.stack.pop()
        off_v = self._concretize(block, ex, offset, "create offset")
        if off_v is None:
            return None
        len_v = self._concretize(block, ex, length, "create length")
        if len_v is None:
            return None
        init = self._require_concrete_bytes(block, ex, m.mbytes(off_v, len_v),
                                            "init code")
        if init is None:
            return None
        if len(block.call_stack) + 1 >= self.config.call_depth_bound:
            ex.seal(block, EndState.DEPTH_BOUND)
            return None

        world = block.world
        creator = world.accounts[m.account]
        label = world.fresh_account_label(m.account)
        address = tm.const(int.from_bytes(keccak256(label.encode())[12:], "big"))
        acct = world.add_account(label, address, code=None)
        self._transfer(creator, acct, value)

        saved = m.clone()
        saved.pc = next_pc
        entry = CallStackEntry(kind=CallKind.CREATE, saved_machine=saved,
                               return_pc=next_pc, created_label=label)
        nxt = ex.transition(block, EdgeKind.CREATE_ENTER, contract=label)
        nxt.call_stack.append(entry)
        nxt.machine = MachineState(
            code=Bytecode(init, BytecodeOrigin.CREATE_RETURNED),
            account=label, caller=creator.address, callvalue=value,
            calldata=TermCalldata(()))
        return nxt

    # -- single instruction ---------------------------------------------------

    def _step(self, block: BasicBlock, ex: Explorer,
              scenario: ScenarioConfig) -> BasicBlock | None:
        m = block.machine
        table, jumpdests = self._decoded(m.code)
        ins = table.get(m.pc)
        if ins is None:
            # fell off the end of the code: implicit stop
            return self._halt(block, ex, scenario, EndState.STOP)
        name = ins.name
        entry = OPCODES.get(ins.opcode)
        if entry is None or name == "INVALID":
            ex.seal(block, EndState.INVALID, f"invalid opcode 0x{ins.opcode:02x}")
            return None
        if len(m.stack) < entry[1]:
            ex.seal(block, EndState.INVALID, "stack underflow")
            return None
        next_pc = ins.offset + ins.size
        stack = m.stack
        world = block.world

        if ins.is_push:
            stack.append(tm.const(ins.push_value))
        elif name.startswith("DUP"):
            stack.append(stack[-int(name[3:])])
        elif name.startswith("SWAP"):
            n = int(name[4:])
            stack[-1], stack[-n - 1] = stack[-n - 1], stack[-1]
        elif name == "POP":
            stack.pop()
        elif name in _BINOPS:
            a, b = stack.pop(), stack.pop()
            stack.append(_BINOPS[name](a, b))
        elif name in ("SDIV", "SMOD"):
            a, b = stack.pop(), stack.pop()
            if a.is_const and b.is_const:
                x, y = _signed(a.value), _signed(b.value)
                if y == 0:
                    r = 0
                elif name == "SDIV":
                    r = abs(x) // abs(y) * (1 if (x < 0) == (y < 0) else -1)
                else:
                    r = abs(x) % abs(y) * (1 if x >= 0 else -1)
                stack.append(tm.const(r))
            else:
                stack.append(self._memo_word(name.lower(), a, b))
        elif name == "EXP":
            a, b = stack.pop(), stack.pop()
            if a.is_const and b.is_const:
                stack.append(tm.const(pow(a.value, b.value, 1 << 256)))
            else:
                stack.append(self._memo_word("exp", a, b))
        elif name in ("ADDMOD", "MULMOD"):
            a, b, n = stack.pop(), stack.pop(), stack.pop()
            if a.is_const and b.is_const and n.is_const:
                if n.value == 0:
                    stack.append(tm.const(0))
                elif name == "ADDMOD":
                    stack.append(tm.const((a.value + b.value) % n.value))
                else:
                    stack.append(tm.const((a.value * b.value) % n.value))
            else:
                stack.append(self._memo_word(name.lower(), a, b, n))
        elif name == "SIGNEXTEND":
            b, x = stack.pop(), stack.pop()
            if b.is_const and x.is_const:
                if b.value >= 31:
                    stack.append(x)
                else:
                    bits = 8 * (b.value + 1)
                    v = x.value & ((1 << bits) - 1)
                    if v >> (bits - 1):
                        v |= WORD ^ ((1 << bits) - 1)
                    stack.append(tm.const(v))
            else:
                stack.append(self._memo_word("signextend", b, x))
        elif name == "BYTE":
            i, x = stack.pop(), stack.pop()
            if i.is_const:
                if i.value > 31:
                    stack.append(tm.const(0))
                else:
                    stack.append(tm.bv_and(
                        tm.shr(x, tm.const(8 * (31 - i.value))), tm.const(0xFF)))
            else:
                stack.append(self._memo_word("byte", i, x))
        elif name == "SAR":
            shift, x = stack.pop(), stack.pop()
            if shift.is_const and x.is_const:
                s = min(shift.value, 256)
                v = _signed(x.value) >> s
                stack.append(tm.const(v))
            else:
                stack.append(self._memo_word("sar", shift, x))
        elif name == "NOT":
            stack.append(tm.bv_not(stack.pop()))
        elif name == "ISZERO":
            stack.append(tm.bool_to_word(tm.eq(stack.pop(), tm.const(0))))
        elif name == "SHA3":
            off = self._concretize(block, ex, stack.pop(), "sha3 offset")
            if off is None:
                return None
            size = self._concretize(block, ex, stack.pop(), "sha3 size")
            if size is None:
                return None
            stack.append(world.sha3(m.mbytes(off, size)))
        elif name == "ADDRESS":
            stack.append(world.accounts[m.account].address)
        elif name == "BALANCE":
            stack.append(world.external_account(stack.pop()).balance_expr())
        elif name == "CALLER":
            stack.append(m.caller)
        elif name == "CALLVALUE":
            stack.append(m.callvalue)
        elif name == "ORIGIN":
            stack.append(tm.var("origin"))
        elif name == "CALLDATALOAD":
            off = self._concretize(block, ex, stack.pop(), "calldata offset")
            if off is None:
                return None
            stack.append(m.calldata.load_word(off))
        elif name == "CALLDATASIZE":
            stack.append(m.calldata.size())
        elif name == "CALLDATACOPY":
            args = [self._concretize(block, ex, stack.pop(), "calldatacopy arg")
                    for _ in range(3)]
            if any(v is None for v in args):
                return None
            dst, src, size = args
            for i in range(size):
                m.memory[dst + i] = m.calldata.byte_at(src + i)
        elif name == "CODESIZE":
            stack.append(tm.const(len(m.code.data)))
        elif name == "CODECOPY":
            args = [self._concretize(block, ex, stack.pop(), "codecopy arg")
                    for _ in range(3)]
            if any(v is None for v in args):
                return None
            dst, src, size = args
            data = m.code.data
            for i in range(size):
                byte = data[src + i] if src + i < len(data) else 0
                m.memory[dst + i] = tm.const(byte)
        elif name == "EXTCODESIZE":
            addr = stack.pop()
            acct = world.account_at(addr)
            if acct is not None and acct.code is not None:
                stack.append(tm.const(len(acct.code.data)))
            else:
                stack.append(self._memo_word("extcodesize", addr))
        elif name == "EXTCODEHASH":
            stack.append(self._memo_word("extcodehash", stack.pop()))
        elif name == "RETURNDATASIZE":
            stack.append(tm.const(len(m.returndata)))
        elif name == "RETURNDATACOPY":
            args = [self._concretize(block, ex, stack.pop(), "returndatacopy arg")
                    for _ in range(3)]
            if any(v is None for v in args):
                return None
            dst, src, size = args
            for i in range(size):
                j = src + i
                m.memory[dst + i] = (m.returndata[j] if j < len(m.returndata)
                                     else tm.const(0))
        elif name == "BLOCKHASH":
            stack.append(self._memo_word("blockhash", stack.pop()))
        elif name in ("COINBASE", "TIMESTAMP", "NUMBER", "DIFFICULTY",
                      "GASLIMIT", "GASPRICE", "GAS"):
            stack.append(tm.var(name.lower()))
        elif name == "PC":
            stack.append(tm.const(ins.offset))
        elif name == "MSIZE":
            top = max(m.memory, default=-1) + 1
            stack.append(tm.const((top + 31) // 32 * 32))
        elif name == "MLOAD":
            off = self._concretize(block, ex, stack.pop(), "mload offset")
            if off is None:
                return None
            stack.append(m.mload_word(off))
        elif name == "MSTORE":
            off = self._concretize(block, ex, stack.pop(), "mstore offset")
            if off is None:
                return None
            m.mstore_word(off, stack.pop())
        elif name == "MSTORE8":
            off = self._concretize(block, ex, stack.pop(), "mstore8 offset")
            if off is None:
                return None
            m.memory[off] = tm.bv_and(stack.pop(), tm.const(0xFF))
        elif name == "SLOAD":
            stack.append(world.accounts[m.account].read_storage(stack.pop()))
        elif name == "SSTORE":
            slot, value = stack.pop(), stack.pop()
            world.accounts[m.account].write_storage(slot, value)
        elif name == "JUMPDEST":
            pass
        elif name in ("JUMP", "JUMPI"):
            key = (m.account, ins.offset)
            count = block.visit_counts.get(key, 0) + 1
            block.visit_counts[key] = count
            if count > self.config.loop_bound:
                ex.seal(block, EndState.LOOP_BOUND)
                return None
            if name == "JUMP":
                return ex.jump(block, stack.pop(), jumpdests)
            target, cond_word = stack.pop(), stack.pop()
            cond = tm.truthy(cond_word)
            return ex.branch_on_jumpi(block, target, cond, jumpdests, next_pc)
        elif name.startswith("LOG"):
            for _ in range(entry[1]):
                stack.pop()
        elif name == "STOP":
            return self._halt(block, ex, scenario, EndState.STOP)
        elif name in ("RETURN", "REVERT"):
            off = self._concretize(block, ex, stack.pop(), "return offset")
            if off is None:
                return None
            size = self._concretize(block, ex, stack.pop(), "return size")
            if size is None:
                return None
            end = EndState.RETURN if name == "RETURN" else EndState.REVERT
            return self._halt(block, ex, scenario, end, m.mbytes(off, size))
        elif name == "CALL":
            return self._do_call(block, ex, scenario, next_pc)
        elif name == "CREATE":
            return self._do_create(block, ex, next_pc)
        else:
            # DELEGATECALL, CALLCODE, STATICCALL, CREATE2, SELFDESTRUCT,
            # EXTCODECOPY: outside the modeled fragment
            ex.seal(block, EndState.INVALID, f"unsupported opcode {name}")
            return None

        if len(stack) > MAX_STACK:
            ex.seal(block, EndState.INVALID, "stack overflow")
            return None
        m.pc = next_pc
        return block


_BINOPS = {
    "ADD": tm.bv_add,
    "MUL": tm.bv_mul,
    "SUB": tm.bv_sub,
    "DIV": tm.udiv,
    "MOD": tm.urem,
    "AND": tm.bv_and,
    "OR": tm.bv_or,
    "XOR": tm.bv_xor,
    "LT": lambda a, b: tm.bool_to_word(tm.ult(a, b)),
    "GT": lambda a, b: tm.bool_to_word(tm.ugt(a, b)),
    "SLT": lambda a, b: tm.bool_to_word(tm.slt(a, b)),
    "SGT": lambda a, b: tm.bool_to_word(tm.sgt(a, b)),
    "EQ": lambda a, b: tm.bool_to_word(tm.eq(a, b)),
    # EVM shift operands: top of stack is the shift amount
    "SHL": lambda shift, x: tm.shl(x, shift),
    "SHR": lambda shift, x: tm.shr(x, shift),
}


# -- function discovery -------------------------------------------------------

def extract_function_ids(code: Bytecode, solver: Solver | None = None,
                         config: VmConfig | None = None) -> list[FunctionEntry]:
    """Recover dispatchable selectors by solving each completed path for the
    symbolic function id; ambiguous paths collapse into a fallback entry."""
    vm = SymVM(solver, config)
    scenario = ScenarioConfig(end_constraints=False)
    result = vm.run_entry(code, AbiCalldata(None, "f"), scenario=scenario)

    fid_low = tm.bv_and(tm.var("function_id"), tm.const(0xFFFFFFFF))
    by_selector: dict[int, bool] = {}
    fallback: bool | None = None
    for block in result.completed:
        terms = block.path_condition.terms
        verdict = vm.solver.check_sat(terms)
        has_call = CALLABLE in block.flags
        if verdict.status is not SolverStatus.SAT:
            continue  # unreachable (or undecidable) dispatch arm
        value = (verdict.model or {}).get("function_id", 0) & 0xFFFFFFFF
        unique = vm.solver.check_sat(
            terms + [tm.bnot(tm.eq(fid_low, tm.const(value)))], want_model=False)
        if unique.status is SolverStatus.UNSAT:
            by_selector[value] = by_selector.get(value, False) or has_call
        else:
            fallback = (fallback or False) or has_call

    out = [FunctionEntry(FunctionId(v.to_bytes(4, "big")), hc)
           for v, hc in sorted(by_selector.items())]
    if fallback is not None:
        out.append(FunctionEntry(None, fallback))
    return out
