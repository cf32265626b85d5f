"""Symbolic machine domain: words, calldata, storage, world state, basic blocks.

Every value flowing through the emulated machine is a 256-bit
:class:`~reentscan.smt.terms.Term`; concrete values are constant terms, so
constant folding doubles as a concrete interpreter. Fresh symbols are named
deterministically from their role (never from global counters), which keeps
independently-collected path conditions over one scenario pair in a shared
symbol environment and makes parallel runs reproducible.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .evm_core import Bytecode, FunctionId
from .keccak import keccak256
from .smt import terms as tm
from .smt.terms import Term

WORD_MASK = (1 << 256) - 1

# SymWord is simply a term; symbolic words are "var" terms whose name doubles
# as the human-readable tag.
SymWord = Term


def concrete(value: int) -> SymWord:
    return tm.const(value)


def symbol(name: str) -> SymWord:
    return tm.var(name)


# -- path conditions ----------------------------------------------------------

class ConstraintOrigin(enum.Enum):
    BRANCH = "branch"
    DISPATCH = "dispatch"
    CONCRETIZE = "concretize"
    BALANCE = "balance"


@dataclass(frozen=True)
class Constraint:
    term: Term
    origin: ConstraintOrigin = ConstraintOrigin.BRANCH


class PathCondition:
    """An immutable, monotonically-grown conjunction of boolean terms."""

    __slots__ = ("constraints",)

    def __init__(self, constraints: tuple[Constraint, ...] = ()):
        self.constraints = constraints

    def extended(self, term: Term,
                 origin: ConstraintOrigin = ConstraintOrigin.BRANCH) -> "PathCondition":
        if term == tm.TRUE:
            return self
        return PathCondition(self.constraints + (Constraint(term, origin),))

    @property
    def terms(self) -> list[Term]:
        return [c.term for c in self.constraints]

    def key(self) -> frozenset[Term]:
        """Order-insensitive identity, used for structural dedup."""
        return frozenset(self.terms)

    def mentions(self, name_prefix: str) -> bool:
        return any(v.name.startswith(name_prefix)
                   for c in self.constraints for v in c.term.variables())

    def __len__(self) -> int:
        return len(self.constraints)

    def __repr__(self) -> str:
        return f"PathCondition({', '.join(map(repr, self.terms))})"


# -- calldata -----------------------------------------------------------------

class Calldata:
    """Byte-addressable transaction input."""

    def byte_at(self, i: int) -> Term:
        raise NotImplementedError

    def size(self) -> Term:
        raise NotImplementedError

    def load_word(self, offset: int) -> Term:
        word = tm.const(0)
        for i in range(32):
            word = tm.bv_or(word, tm.shl(self.byte_at(offset + i),
                                         tm.const(8 * (31 - i))))
        return word


class ConcreteCalldata(Calldata):
    def __init__(self, data: bytes):
        self.data = data

    def byte_at(self, i: int) -> Term:
        return tm.const(self.data[i] if i < len(self.data) else 0)

    def size(self) -> Term:
        return tm.const(len(self.data))


class AbiCalldata(Calldata):
    """A 4-byte selector followed by symbolic 32-byte argument words.

    ``selector=None`` leaves the dispatch selector itself symbolic (the low 32
    bits of the ``function_id`` word).
    """

    def __init__(self, selector: FunctionId | None, tag: str):
        self.selector = selector
        self.tag = tag
        self.function_id = tm.var("function_id")

    def _selector_word(self) -> Term:
        # 256-bit word whose low 32 bits are the selector
        if self.selector is not None:
            return tm.const(self.selector.value)
        return tm.bv_and(self.function_id, tm.const(0xFFFFFFFF))

    def arg(self, k: int) -> Term:
        return tm.var(f"{self.tag}_arg{k}")

    def byte_at(self, i: int) -> Term:
        if i < 4:
            sel = self._selector_word()
            return tm.bv_and(tm.shr(sel, tm.const(8 * (3 - i))), tm.const(0xFF))
        k, off = divmod(i - 4, 32)
        return tm.bv_and(tm.shr(self.arg(k), tm.const(8 * (31 - off))),
                         tm.const(0xFF))

    def size(self) -> Term:
        return tm.var(f"{self.tag}_calldatasize")

    def load_word(self, offset: int) -> Term:
        if offset == 0:
            return tm.bv_or(tm.shl(self._selector_word(), tm.const(224)),
                            tm.shr(self.arg(0), tm.const(32)))
        if offset >= 4 and (offset - 4) % 32 == 0:
            return self.arg((offset - 4) // 32)
        return super().load_word(offset)


class TermCalldata(Calldata):
    """Calldata carved out of caller memory: a fixed tuple of byte terms."""

    def __init__(self, data: tuple[Term, ...]):
        self.data = data

    def byte_at(self, i: int) -> Term:
        return self.data[i] if i < len(self.data) else tm.const(0)

    def size(self) -> Term:
        return tm.const(len(self.data))


# -- accounts and world state -------------------------------------------------

@dataclass
class Account:
    """Per-path localized view of one blockchain account."""

    label: str
    address: Term
    code: Bytecode | None = None
    storage: dict[Term, Term] = field(default_factory=dict)       # writes, in order
    storage_base: dict[Term, Term] = field(default_factory=dict)  # memoized initial reads
    credits: list[Term] = field(default_factory=list)
    debits: list[Term] = field(default_factory=list)
    concrete_storage: dict[int, int] | None = None
    concrete_balance: int | None = None
    is_dummy: bool = False

    def clone(self) -> "Account":
        return Account(
            label=self.label,
            address=self.address,
            code=self.code,
            storage=dict(self.storage),
            storage_base=dict(self.storage_base),
            credits=list(self.credits),
            debits=list(self.debits),
            concrete_storage=self.concrete_storage,
            concrete_balance=self.concrete_balance,
            is_dummy=self.is_dummy,
        )

    # storage ----------------------------------------------------------------

    def _base_read(self, slot: Term) -> Term:
        cached = self.storage_base.get(slot)
        if cached is not None:
            return cached
        if self.concrete_storage is not None and slot.is_const:
            value = tm.const(self.concrete_storage.get(slot.value, 0))
        else:
            value = tm.var(f"sload_{self.label}_{slot.digest()}")
        self.storage_base[slot] = value
        return value

    def read_storage(self, slot: Term) -> Term:
        exact = self.storage.get(slot)
        if exact is not None:
            return exact
        # unresolved aliasing against symbolic slots: most recent write wins
        value = self._base_read(slot)
        for written_slot, written_value in self.storage.items():
            value = tm.ite(tm.eq(slot, written_slot), written_value, value)
        return value

    def write_storage(self, slot: Term, value: Term) -> None:
        # re-insert to refresh recency for the aliasing chain
        self.storage.pop(slot, None)
        self.storage[slot] = value

    # balance ----------------------------------------------------------------

    def initial_balance(self) -> Term:
        if self.concrete_balance is not None:
            return tm.const(self.concrete_balance)
        return tm.var(f"balance_{self.label}")

    def balance_expr(self) -> Term:
        total = self.initial_balance()
        for c in self.credits:
            total = tm.bv_add(total, c)
        for d in self.debits:
            total = tm.bv_sub(total, d)
        return total

    @property
    def touched(self) -> bool:
        return bool(self.credits or self.debits)

    def solvency_constraint(self) -> Term:
        """No-underflow condition: initial balance plus inflow covers outflow."""
        inflow = self.initial_balance()
        for c in self.credits:
            inflow = tm.bv_add(inflow, c)
        outflow = tm.const(0)
        for d in self.debits:
            outflow = tm.bv_add(outflow, d)
        return tm.uge(inflow, outflow)


class LocalWorldState:
    """Per-block copy of global chain data; mutations stay on this path."""

    def __init__(self) -> None:
        self.accounts: dict[str, Account] = {}
        self.addr_index: dict[Term, str] = {}
        self.next_fresh_account = 0
        self.sha3_memo: dict[tuple[Term, ...], Term] = {}

    def clone(self) -> "LocalWorldState":
        out = LocalWorldState()
        out.accounts = {k: v.clone() for k, v in self.accounts.items()}
        out.addr_index = dict(self.addr_index)
        out.next_fresh_account = self.next_fresh_account
        out.sha3_memo = dict(self.sha3_memo)
        return out

    def add_account(self, label: str, address: Term,
                    code: Bytecode | None = None, **kwargs) -> Account:
        acct = Account(label=label, address=address, code=code, **kwargs)
        self.accounts[label] = acct
        self.addr_index[address] = label
        return acct

    def account_at(self, address: Term) -> Account | None:
        label = self.addr_index.get(address)
        return self.accounts[label] if label is not None else None

    def external_account(self, address: Term) -> Account:
        """The (possibly fresh) code-less account behind an arbitrary address."""
        existing = self.account_at(address)
        if existing is not None:
            return existing
        return self.add_account(f"ext_{address.digest()}", address, code=None)

    def fresh_account_label(self, creator: str) -> str:
        label = f"{creator}.new{self.next_fresh_account}"
        self.next_fresh_account += 1
        return label

    def sha3(self, data: tuple[Term, ...]) -> Term:
        """Keccak over memory bytes: real hash when concrete, else a memoized
        fresh symbol keyed by the structural hash of the input expression."""
        if all(b.is_const for b in data):
            raw = bytes(b.value & 0xFF for b in data)
            return tm.const(int.from_bytes(keccak256(raw), "big"))
        cached = self.sha3_memo.get(data)
        if cached is None:
            joined = tm.const(0)
            for b in data:
                joined = tm.bv_add(tm.bv_mul(joined, tm.const(257)), b)
            cached = tm.var(f"sha3_{joined.digest()}")
            self.sha3_memo[data] = cached
        return cached

    def solvency_constraints(self) -> list[Term]:
        return [acct.solvency_constraint()
                for acct in self.accounts.values() if acct.touched]


def read_storage(world: LocalWorldState, account: str, slot: Term) -> Term:
    return world.accounts[account].read_storage(slot)


# -- machine state and call stack ---------------------------------------------

MAX_STACK = 1024


@dataclass
class MachineState:
    code: Bytecode
    account: str
    caller: Term
    callvalue: Term
    calldata: Calldata
    stack: list[Term] = field(default_factory=list)
    memory: dict[int, Term] = field(default_factory=dict)  # byte address -> byte value
    pc: int = 0
    returndata: list[Term] = field(default_factory=list)

    def clone(self) -> "MachineState":
        return MachineState(
            code=self.code,
            account=self.account,
            caller=self.caller,
            callvalue=self.callvalue,
            calldata=self.calldata,
            stack=list(self.stack),
            memory=dict(self.memory),
            pc=self.pc,
            returndata=list(self.returndata),
        )

    # memory -----------------------------------------------------------------

    def mstore_byte(self, offset: int, value: Term) -> None:
        self.memory[offset] = value

    def mstore_word(self, offset: int, value: Term) -> None:
        for i in range(32):
            self.memory[offset + i] = tm.bv_and(
                tm.shr(value, tm.const(8 * (31 - i))), tm.const(0xFF))

    def mload_word(self, offset: int) -> Term:
        word = tm.const(0)
        for i in range(32):
            byte = self.memory.get(offset + i, tm.const(0))
            word = tm.bv_or(word, tm.shl(byte, tm.const(8 * (31 - i))))
        return word

    def mbytes(self, offset: int, length: int) -> tuple[Term, ...]:
        return tuple(self.memory.get(offset + i, tm.const(0))
                     for i in range(length))


class CallKind(enum.Enum):
    CREATE = "create"
    CALL = "call"
    DUMMY_REENTRY = "dummy_reentry"


@dataclass
class CallStackEntry:
    kind: CallKind
    saved_machine: MachineState
    return_pc: int
    out_offset: int = 0
    out_size: int = 0
    created_label: str | None = None
    dummy_node: int | None = None  # ECFG node of the attacker hop, if any

    def clone(self) -> "CallStackEntry":
        return CallStackEntry(
            kind=self.kind,
            saved_machine=self.saved_machine.clone(),
            return_pc=self.return_pc,
            out_offset=self.out_offset,
            out_size=self.out_size,
            created_label=self.created_label,
            dummy_node=self.dummy_node,
        )


# -- basic blocks and the extended CFG ----------------------------------------

class EndState(enum.Enum):
    OPEN = "open"
    STOP = "stop"
    RETURN = "return"
    REVERT = "revert"
    INVALID = "invalid"
    DEPTH_BOUND = "depth_bound"
    LOOP_BOUND = "loop_bound"
    BRANCHED = "branched"      # continued into forked successors
    TRANSITED = "transited"    # continued across a contract boundary

HALTED = {EndState.STOP, EndState.RETURN, EndState.REVERT,
          EndState.INVALID, EndState.DEPTH_BOUND, EndState.LOOP_BOUND}
COMPLETED = {EndState.STOP, EndState.RETURN}

CALLABLE = "CALLABLE"


@dataclass
class BasicBlock:
    id: int
    machine: MachineState
    world: LocalWorldState
    path_condition: PathCondition
    call_stack: list[CallStackEntry] = field(default_factory=list)
    flags: set[str] = field(default_factory=set)
    end_state: EndState = EndState.OPEN
    instructions: list = field(default_factory=list)
    visit_counts: dict[tuple[str, int], int] = field(default_factory=dict)
    ext_call_target: Term | None = None
    reentered: bool = False
    reentry_budget: int = 0
    note: str | None = None

    def copy_as(self, new_id: int) -> "BasicBlock":
        """Deep, independent copy with a fresh id (path state only)."""
        return BasicBlock(
            id=new_id,
            machine=self.machine.clone(),
            world=self.world.clone(),
            path_condition=self.path_condition,
            call_stack=[e.clone() for e in self.call_stack],
            flags=set(self.flags),
            end_state=EndState.OPEN,
            instructions=[],
            visit_counts=dict(self.visit_counts),
            ext_call_target=self.ext_call_target,
            reentered=self.reentered,
            reentry_budget=self.reentry_budget,
        )


class EdgeKind(enum.Enum):
    FALLTHROUGH = "fallthrough"
    JUMP = "jump"
    CREATE_ENTER = "create_enter"
    CREATE_RETURN = "create_return"
    CALL_ENTER = "call_enter"
    CALL_RETURN = "call_return"


@dataclass
class NodeInfo:
    block_id: int
    contract: str
    start_pc: int
    end_state: EndState = EndState.OPEN
    flags: frozenset[str] = frozenset()
    label: str = ""


class ECFG:
    """Control-flow graph whose edges may cross contract boundaries."""

    def __init__(self) -> None:
        self.nodes: dict[int, NodeInfo] = {}
        self.edges: list[tuple[int, int, EdgeKind]] = []

    def add_node(self, info: NodeInfo) -> None:
        self.nodes[info.block_id] = info

    def add_edge(self, src: int, dst: int, kind: EdgeKind) -> None:
        self.edges.append((src, dst, kind))

    def edges_of_kind(self, kind: EdgeKind) -> list[tuple[int, int, EdgeKind]]:
        return [e for e in self.edges if e[2] == kind]

    def structure_key(self) -> tuple:
        """Isomorphism-stable summary: node ids replaced by creation order."""
        order = {bid: i for i, bid in enumerate(sorted(self.nodes))}
        nodes = tuple(sorted((order[b], n.contract, n.start_pc, n.end_state.value)
                             for b, n in self.nodes.items()))
        edges = tuple(sorted((order[s], order[d], k.value)
                             for s, d, k in self.edges))
        return nodes, edges
