"""Tseitin encoding of bitvector terms onto the CDCL SAT backend."""

from __future__ import annotations

from .sat import SatSolver
from .terms import Term


class UnsupportedTermError(Exception):
    """The term uses an operation outside the supported bitvector fragment."""


class BitBlaster:
    """Lowers Terms to CNF. Bitvectors become LSB-first literal lists."""

    def __init__(self, sat: SatSolver) -> None:
        self.sat = sat
        self.true_lit = sat.new_var()
        sat.add_clause([self.true_lit])
        self._bv_memo: dict[Term, list[int]] = {}
        self._bool_memo: dict[Term, int] = {}
        self._gates: dict[tuple, int] = {}
        self._var_bits: dict[str, list[int]] = {}

    # -- gate layer -----------------------------------------------------------

    def _const(self, value: bool) -> int:
        return self.true_lit if value else -self.true_lit

    def g_and(self, a: int, b: int) -> int:
        t = self.true_lit
        if a == -t or b == -t:
            return -t
        if a == t:
            return b
        if b == t:
            return a
        if a == b:
            return a
        if a == -b:
            return -t
        key = ("and", min(a, b), max(a, b))
        cached = self._gates.get(key)
        if cached is not None:
            return cached
        o = self.sat.new_var()
        self.sat.add_clause([-a, -b, o])
        self.sat.add_clause([a, -o])
        self.sat.add_clause([b, -o])
        self._gates[key] = o
        return o

    def g_or(self, a: int, b: int) -> int:
        return -self.g_and(-a, -b)

    def g_xor(self, a: int, b: int) -> int:
        t = self.true_lit
        if a == t:
            return -b
        if a == -t:
            return b
        if b == t:
            return -a
        if b == -t:
            return a
        if a == b:
            return -t
        if a == -b:
            return t
        key = ("xor", min(abs(a), abs(b)), max(abs(a), abs(b)),
               (a < 0) ^ (b < 0))
        cached = self._gates.get(key)
        if cached is not None:
            return cached
        o = self.sat.new_var()
        self.sat.add_clause([-a, -b, -o])
        self.sat.add_clause([a, b, -o])
        self.sat.add_clause([-a, b, o])
        self.sat.add_clause([a, -b, o])
        self._gates[key] = o
        return o

    def g_mux(self, c: int, a: int, b: int) -> int:
        """c ? a : b"""
        t = self.true_lit
        if c == t:
            return a
        if c == -t:
            return b
        if a == b:
            return a
        return self.g_or(self.g_and(c, a), self.g_and(-c, b))

    def g_maj(self, a: int, b: int, c: int) -> int:
        return self.g_or(self.g_and(a, b), self.g_and(c, self.g_xor(a, b)))

    def g_and_many(self, lits: list[int]) -> int:
        acc = self.true_lit
        for lit in lits:
            acc = self.g_and(acc, lit)
        return acc

    def g_or_many(self, lits: list[int]) -> int:
        return -self.g_and_many([-lit for lit in lits])

    # -- arithmetic helpers ---------------------------------------------------

    def _adder(self, a: list[int], b: list[int], carry: int) -> list[int]:
        out = []
        for ai, bi in zip(a, b):
            out.append(self.g_xor(self.g_xor(ai, bi), carry))
            carry = self.g_maj(ai, bi, carry)
        return out

    def _negate(self, a: list[int]) -> list[int]:
        # two's complement: ~a + 1
        return self._adder([-x for x in a],
                           [self._const(False)] * len(a), self.true_lit)

    def _shift_const(self, bits: list[int], amount: int, left: bool) -> list[int]:
        w = len(bits)
        zero = self._const(False)
        if amount >= w:
            return [zero] * w
        if left:
            return [zero] * amount + bits[:w - amount]
        return bits[amount:] + [zero] * amount

    def _barrel_shift(self, bits: list[int], amount: list[int], left: bool) -> list[int]:
        w = len(bits)
        stages = max(1, (w - 1).bit_length())
        cur = bits
        for s in range(stages):
            shifted = self._shift_const(cur, 1 << s, left)
            cur = [self.g_mux(amount[s], sh, keep)
                   for sh, keep in zip(shifted, cur)]
        # any set bit beyond the in-range stages zeroes the result
        overflow = self.g_or_many(amount[stages:])
        zero = self._const(False)
        return [self.g_mux(overflow, zero, x) for x in cur]

    def _ult(self, a: list[int], b: list[int]) -> int:
        lt = self._const(False)
        for ai, bi in zip(a, b):  # LSB to MSB
            eq_bit = -self.g_xor(ai, bi)
            lt = self.g_or(self.g_and(-ai, bi), self.g_and(eq_bit, lt))
        return lt

    def _mul(self, a: list[int], b: Term) -> list[int]:
        # shift-and-add against a constant multiplicand
        assert b.is_const and b.value is not None
        w = len(a)
        acc = [self._const(False)] * w
        value = b.value
        bit = 0
        while value and bit < w:
            if value & 1:
                acc = self._adder(acc, self._shift_const(a, bit, True),
                                  self._const(False))
            value >>= 1
            bit += 1
        return acc

    # -- term lowering --------------------------------------------------------

    def blast_bv(self, term: Term) -> list[int]:
        memo = self._bv_memo
        cached = memo.get(term)
        if cached is not None:
            return cached
        op = term.op
        w = term.width
        if op == "const":
            bits = [self._const(bool((term.value >> i) & 1)) for i in range(w)]
        elif op == "var":
            key = term.name
            if key not in self._var_bits:
                self._var_bits[key] = [self.sat.new_var() for _ in range(w)]
            bits = self._var_bits[key]
        elif op in ("add", "sub"):
            a = self.blast_bv(term.args[0])
            b = self.blast_bv(term.args[1])
            if op == "add":
                bits = self._adder(a, b, self._const(False))
            else:
                bits = self._adder(a, [-x for x in b], self.true_lit)
        elif op == "mul":
            lhs, rhs = term.args
            if rhs.is_const:
                bits = self._mul(self.blast_bv(lhs), rhs)
            elif lhs.is_const:
                bits = self._mul(self.blast_bv(rhs), lhs)
            else:
                raise UnsupportedTermError("symbolic*symbolic multiplication")
        elif op in ("udiv", "urem"):
            raise UnsupportedTermError(f"{op} with symbolic divisor")
        elif op == "and":
            a, b = map(self.blast_bv, term.args)
            bits = [self.g_and(x, y) for x, y in zip(a, b)]
        elif op == "or":
            a, b = map(self.blast_bv, term.args)
            bits = [self.g_or(x, y) for x, y in zip(a, b)]
        elif op == "xor":
            a, b = map(self.blast_bv, term.args)
            bits = [self.g_xor(x, y) for x, y in zip(a, b)]
        elif op == "not":
            bits = [-x for x in self.blast_bv(term.args[0])]
        elif op in ("shl", "shr"):
            a = self.blast_bv(term.args[0])
            amount = term.args[1]
            if amount.is_const:
                bits = self._shift_const(a, amount.value, op == "shl")
            else:
                bits = self._barrel_shift(a, self.blast_bv(amount), op == "shl")
        elif op == "ite":
            c = self.blast_bool(term.args[0])
            a = self.blast_bv(term.args[1])
            b = self.blast_bv(term.args[2])
            bits = [self.g_mux(c, x, y) for x, y in zip(a, b)]
        else:
            raise UnsupportedTermError(f"bitvector op {op!r}")
        memo[term] = bits
        return bits

    def blast_bool(self, term: Term) -> int:
        memo = self._bool_memo
        cached = memo.get(term)
        if cached is not None:
            return cached
        op = term.op
        if op == "const":
            lit = self._const(bool(term.value))
        elif op == "eq":
            a, b = map(self.blast_bv, term.args)
            lit = self.g_and_many([-self.g_xor(x, y) for x, y in zip(a, b)])
        elif op == "ult":
            a, b = map(self.blast_bv, term.args)
            lit = self._ult(a, b)
        elif op == "bnot":
            lit = -self.blast_bool(term.args[0])
        elif op == "band":
            lit = self.g_and_many([self.blast_bool(a) for a in term.args])
        elif op == "bor":
            lit = self.g_or_many([self.blast_bool(a) for a in term.args])
        else:
            raise UnsupportedTermError(f"boolean op {op!r}")
        memo[term] = lit
        return lit

    def assert_true(self, term: Term) -> None:
        self.sat.add_clause([self.blast_bool(term)])

    def var_value(self, name: str, width: int) -> int:
        bits = self._var_bits.get(name)
        if bits is None:
            return 0
        value = 0
        for i, lit in enumerate(bits):
            if self.sat.model_value(lit):
                value |= 1 << i
        return value
