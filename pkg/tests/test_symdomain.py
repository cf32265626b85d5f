"""Symbolic domain: path conditions, storage, calldata, block forking."""

from hypothesis import given, strategies as st

from reentscan.evm_core import Bytecode, selector_of
from reentscan.smt import terms as tm
from reentscan.smt.terms import evaluate
from reentscan.symdomain import (
    AbiCalldata,
    BasicBlock,
    ConcreteCalldata,
    Constraint,
    ConstraintOrigin,
    EndState,
    LocalWorldState,
    MachineState,
    PathCondition,
    TermCalldata,
)


def _machine() -> MachineState:
    return MachineState(
        code=Bytecode(b"\x00"), account="c0",
        caller=tm.var("caller"), callvalue=tm.var("f_callvalue"),
        calldata=ConcreteCalldata(b""))


def _block(pc: PathCondition | None = None) -> BasicBlock:
    world = LocalWorldState()
    world.add_account("c0", tm.const(0xC0DE), code=Bytecode(b"\x00"))
    return BasicBlock(id=0, machine=_machine(), world=world,
                      path_condition=pc or PathCondition())


# -- path conditions ----------------------------------------------------------

@given(st.lists(st.integers(0, 50), max_size=8))
def test_path_condition_monotone_growth(values):
    pc = PathCondition()
    seen: list[PathCondition] = []
    for v in values:
        seen.append(pc)
        pc = pc.extended(tm.ult(tm.var("x"), tm.const(v + 1)))
    # extending never mutates earlier snapshots and never drops constraints
    for i, snap in enumerate(seen):
        assert len(snap) <= len(pc)
        assert snap.terms == pc.terms[: len(snap)]


def test_path_condition_drops_trivial_true():
    pc = PathCondition().extended(tm.TRUE)
    assert len(pc) == 0


def test_path_condition_key_is_order_insensitive():
    a = tm.ult(tm.var("x"), tm.const(3))
    b = tm.eq(tm.var("y"), tm.const(1))
    assert PathCondition((Constraint(a), Constraint(b))).key() == \
        PathCondition((Constraint(b), Constraint(a))).key()


def test_constraint_origins_recorded():
    pc = PathCondition().extended(tm.ult(tm.var("x"), tm.const(3)),
                                  ConstraintOrigin.BALANCE)
    assert pc.constraints[0].origin is ConstraintOrigin.BALANCE


# -- storage ------------------------------------------------------------------

def test_storage_exact_write_read():
    block = _block()
    acct = block.world.accounts["c0"]
    slot = tm.var("caller")
    acct.write_storage(slot, tm.const(7))
    assert acct.read_storage(slot) == tm.const(7)


def test_storage_unwritten_read_is_memoized_symbol():
    block = _block()
    acct = block.world.accounts["c0"]
    first = acct.read_storage(tm.const(5))
    second = acct.read_storage(tm.const(5))
    assert first == second
    assert first.op == "var"


def test_storage_aliasing_prefers_most_recent_write():
    acct = _block().world.accounts["c0"]
    acct.write_storage(tm.const(1), tm.const(10))
    acct.write_storage(tm.const(1), tm.const(20))
    # a symbolic slot may alias slot 1: under s == 1 the read must be 20
    read = acct.read_storage(tm.var("s"))
    assert evaluate(read, {"s": 1}) == 20
    assert acct.read_storage(tm.const(1)) == tm.const(20)


def test_concrete_storage_backs_base_reads():
    world = LocalWorldState()
    acct = world.add_account("c0", tm.const(1), concrete_storage={3: 99})
    assert acct.read_storage(tm.const(3)) == tm.const(99)
    assert acct.read_storage(tm.const(4)) == tm.const(0)


def test_solvency_constraint_semantics():
    acct = _block().world.accounts["c0"]
    acct.concrete_balance = 100
    acct.credits.append(tm.const(30))
    acct.debits.append(tm.var("d"))
    c = acct.solvency_constraint()
    assert evaluate(c, {"d": 130}) == 1
    assert evaluate(c, {"d": 131}) == 0


def test_sha3_concrete_vs_symbolic():
    world = LocalWorldState()
    concrete = world.sha3((tm.const(0x61),))
    from reentscan.keccak import keccak256
    assert concrete.value == int.from_bytes(keccak256(b"a"), "big")
    symbolic = world.sha3((tm.var("x"),))
    assert symbolic.op == "var"
    assert world.sha3((tm.var("x"),)) == symbolic  # memoized


# -- calldata -----------------------------------------------------------------

def test_concrete_calldata_zero_padding():
    cd = ConcreteCalldata(b"\x01\x02")
    assert cd.byte_at(0).value == 1
    assert cd.byte_at(9).value == 0
    assert cd.size().value == 2


@given(st.integers(0, (1 << 256) - 1))
def test_abi_calldata_word_layout(arg0):
    cd = AbiCalldata(selector_of("withdraw()"), "f")
    env = {"f_arg0": arg0}
    word0 = evaluate(cd.load_word(0), env)
    assert word0 >> 224 == 0x3CCFD60B
    assert evaluate(cd.load_word(4), env) == arg0
    # byte view agrees with word view
    rebuilt = 0
    for i in range(32):
        rebuilt = (rebuilt << 8) | evaluate(cd.byte_at(i), env)
    assert rebuilt == word0


def test_abi_calldata_symbolic_selector():
    cd = AbiCalldata(None, "f")
    word0 = cd.load_word(0)
    assert evaluate(word0, {"function_id": 0xAABBCCDD}) >> 224 == 0xAABBCCDD


def test_term_calldata():
    cd = TermCalldata((tm.const(1), tm.var("b")))
    assert cd.byte_at(0).value == 1
    assert cd.byte_at(1).op == "var"
    assert cd.byte_at(5).value == 0


# -- memory and forking -------------------------------------------------------

@given(st.integers(0, (1 << 256) - 1), st.integers(0, 64))
def test_memory_word_round_trip(value, offset):
    m = _machine()
    m.mstore_word(offset, tm.const(value))
    assert evaluate(m.mload_word(offset)) == value


def test_fork_isolation():
    original = _block(PathCondition().extended(tm.ult(tm.var("x"), tm.const(9))))
    original.machine.stack.append(tm.const(1))
    original.machine.memory[0] = tm.const(0xAB)
    original.world.accounts["c0"].write_storage(tm.const(0), tm.const(5))
    original.flags.add("CALLABLE")

    copy = original.copy_as(1)
    copy.machine.stack.append(tm.const(2))
    copy.machine.memory[0] = tm.const(0xCD)
    copy.world.accounts["c0"].write_storage(tm.const(0), tm.const(6))
    copy.world.accounts["c0"].credits.append(tm.const(4))
    copy.flags.add("EXTRA")
    copy.path_condition = copy.path_condition.extended(tm.eq(tm.var("y"), tm.const(1)))

    assert original.machine.stack == [tm.const(1)]
    assert original.machine.memory[0] == tm.const(0xAB)
    assert original.world.accounts["c0"].read_storage(tm.const(0)) == tm.const(5)
    assert original.world.accounts["c0"].credits == []
    assert original.flags == {"CALLABLE"}
    assert len(original.path_condition) == 1
    # the fork keeps inherited state
    assert copy.flags >= {"CALLABLE"}
    assert copy.end_state is EndState.OPEN
