"""Regenerates the committed fixture bytecode from assembly sources.

Run from the repository root:  python3 fixtures/make_fixtures.py

Each fixture is one runtime-bytecode hex file styled after the classic
re-entrancy examples: a selector dispatcher in front, one body per function.
See fixtures/README.md for what each contract does and the expected verdicts.
"""

from __future__ import annotations

import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE.parent / "tests"))

from asm import assemble  # noqa: E402

from reentscan.evm_core import selector_of  # noqa: E402


def dispatcher(functions: list[tuple[str, str]]) -> str:
    """Selector dispatch prelude: functions are (signature, label) pairs."""
    lines = ["PUSH1 0x00 CALLDATALOAD PUSH1 0xe0 SHR"]
    for signature, label in functions:
        sel = selector_of(signature)
        lines.append(f"DUP1 PUSH4 {sel.hex()} EQ PUSHL {label} JUMPI")
    lines.append("STOP  ; fallback")
    return "\n".join(lines)


# CALL(gas, caller, value=<top>, no data): value is DUP5 after four zero pushes
PAY_CALLER = """
PUSH1 0 PUSH1 0 PUSH1 0 PUSH1 0
DUP5 CALLER GAS CALL
POP
"""

# -- Fund: a guarded withdraw that pays before zeroing the balance ------------

FUND = f"""
{dispatcher([("withdraw()", "withdraw")])}
withdraw:
JUMPDEST POP
CALLER SLOAD                  ; s = balances[caller]
DUP1 ISZERO PUSHL done JUMPI
{PAY_CALLER}
POP
PUSH1 0 CALLER SSTORE         ; balances[caller] = 0, too late
STOP
done:
JUMPDEST POP STOP
"""

# -- KnownReentrancy: the single-function textbook case, no guard at all ------

KNOWN_REENTRANCY = f"""
{dispatcher([("withdrawBalance()", "withdraw")])}
withdraw:
JUMPDEST POP
CALLER SLOAD                  ; s = userBalances[caller]
{PAY_CALLER}
POP
PUSH1 0 CALLER SSTORE
STOP
"""

# -- Bank: create-based re-entrancy -------------------------------------------
# withdraw() pays the whole pot to a freshly CREATEd settlement contract whose
# init code immediately forwards the value to a fixed external address; the
# pot is zeroed only after the CREATE returns.
#
# init code (15 bytes): CALL(gas, 0xaa, callvalue, no data) POP STOP
_INIT = bytes.fromhex("60006000600060003460aa5af15000")
_INIT_WORD = "0x" + (_INIT + b"\x00" * (32 - len(_INIT))).hex()

BANK = f"""
{dispatcher([("withdraw()", "withdraw"),
             ("deposit()", "deposit"),
             ("getBalance()", "getbalance")])}
withdraw:
JUMPDEST POP
PUSH1 0 SLOAD                 ; pot
DUP1 ISZERO PUSHL wdone JUMPI
PUSH32 {_INIT_WORD}
PUSH1 0 MSTORE
PUSH1 {len(_INIT)} PUSH1 0 DUP3 CREATE   ; CREATE(value=pot, 0, len)
POP
PUSH1 0 PUSH1 0 SSTORE        ; pot = 0, after the money left
wdone:
JUMPDEST POP STOP
deposit:
JUMPDEST POP
CALLVALUE PUSH1 0 SLOAD ADD
PUSH1 0 SSTORE
STOP
getbalance:
JUMPDEST POP
PUSH1 0 SLOAD PUSH1 0 MSTORE
PUSH1 0x20 PUSH1 0 RETURN
"""

# -- shared locked-withdraw / unguarded-transfer bodies -----------------------
# withdraw() takes a mutex, pays out, zeroes the balance, releases the mutex:
# re-entering withdraw itself reverts, but transfer() never checks the lock.

LOCKED_WITHDRAW = f"""
withdraw:
JUMPDEST POP
PUSH1 1 SLOAD PUSHL wrevert JUMPI   ; locked -> revert
PUSH1 1 PUSH1 1 SSTORE              ; lock = 1
CALLER SLOAD                        ; a = balances[caller]
{PAY_CALLER}
POP
PUSH1 0 CALLER SSTORE               ; balances[caller] = 0
PUSH1 0 PUSH1 1 SSTORE              ; lock = 0
STOP
wrevert:
JUMPDEST PUSH1 0 PUSH1 0 REVERT
"""

UNGUARDED_TRANSFER = """
transfer:
JUMPDEST POP
PUSH1 0x24 CALLDATALOAD             ; amount
CALLER SLOAD                        ; balance
DUP1 DUP3 GT PUSHL trevert JUMPI    ; amount > balance -> revert
DUP2 SWAP1 SUB
CALLER SSTORE                       ; balances[caller] -= amount
PUSH1 4 CALLDATALOAD                ; to
DUP1 SLOAD DUP3 ADD
SWAP1 SSTORE                        ; balances[to] += amount
POP STOP
trevert:
JUMPDEST PUSH1 0 PUSH1 0 REVERT
"""


def _getter(label: str, slot_source: str) -> str:
    return f"""
{label}:
JUMPDEST POP
{slot_source} SLOAD PUSH1 0 MSTORE
PUSH1 0x20 PUSH1 0 RETURN
"""


# -- Token: twelve functions, one locked withdraw, one vulnerable transfer ----

TOKEN_FUNCTIONS = [
    ("withdraw()", "withdraw"),
    ("transfer(address,uint256)", "transfer"),
    ("deposit()", "deposit"),
    ("balanceOf(address)", "balanceof"),
    ("totalSupply()", "totalsupply"),
    ("approve(address,uint256)", "approve"),
    ("allowance(address)", "allowance"),
    ("setOwner(address)", "setowner"),
    ("owner()", "owner"),
    ("pause()", "pause"),
    ("unpause()", "unpause"),
    ("mint(uint256)", "mint"),
]

TOKEN = f"""
{dispatcher(TOKEN_FUNCTIONS)}
{LOCKED_WITHDRAW}
{UNGUARDED_TRANSFER}
deposit:
JUMPDEST POP
CALLVALUE CALLER SLOAD ADD
CALLER SSTORE
STOP
{_getter("balanceof", "PUSH1 4 CALLDATALOAD")}
{_getter("totalsupply", "PUSH1 2")}
approve:
JUMPDEST POP
PUSH1 0x24 CALLDATALOAD
PUSH1 4 CALLDATALOAD
SSTORE
STOP
{_getter("allowance", "PUSH1 4 CALLDATALOAD")}
setowner:
JUMPDEST POP
PUSH1 4 CALLDATALOAD PUSH1 3 SSTORE
STOP
{_getter("owner", "PUSH1 3")}
pause:
JUMPDEST POP
PUSH1 1 PUSH1 4 SSTORE
STOP
unpause:
JUMPDEST POP
PUSH1 0 PUSH1 4 SSTORE
STOP
mint:
JUMPDEST POP
PUSH1 4 CALLDATALOAD PUSH1 2 SLOAD ADD
PUSH1 2 SSTORE
STOP
"""

# -- KnownCrossFunction: just the two interacting functions ------------------

KNOWN_CROSS_FUNCTION = f"""
{dispatcher([("withdraw()", "withdraw"),
             ("transfer(address,uint256)", "transfer")])}
{LOCKED_WITHDRAW}
{UNGUARDED_TRANSFER}
"""

FIXTURES = {
    "fund.hex": FUND,
    "known_reentrancy.hex": KNOWN_REENTRANCY,
    "bank.hex": BANK,
    "token.hex": TOKEN,
    "known_cross_function.hex": KNOWN_CROSS_FUNCTION,
}


def main() -> None:
    for name, source in FIXTURES.items():
        code = assemble(source)
        (HERE / name).write_text(code.hex() + "\n")
        print(f"{name}: {len(code)} bytes")


if __name__ == "__main__":
    main()
