"""Immutable fixed-width bitvector and boolean terms with constant folding.

Terms are structural values: two terms built the same way compare equal and
hash identically, which the rest of the analyzer relies on for memoization
(storage reads, hash summaries) and for cheap equality of path conditions.
"""

from __future__ import annotations

import hashlib
from typing import Iterable, Mapping

BOOL = 0  # sentinel width for boolean terms


def mask(width: int) -> int:
    return (1 << width) - 1


class Term:
    __slots__ = ("op", "width", "args", "value", "name", "_hash", "_digest")

    def __init__(self, op: str, width: int, args: tuple["Term", ...] = (),
                 value: int | None = None, name: str | None = None):
        self.op = op
        self.width = width
        self.args = args
        self.value = value
        self.name = name
        self._hash = hash((op, width, value, name, tuple(a._hash for a in args)))
        self._digest: str | None = None

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, Term):
            return NotImplemented
        if self._hash != other._hash:
            return False
        return (self.op == other.op and self.width == other.width
                and self.value == other.value and self.name == other.name
                and self.args == other.args)

    @property
    def is_const(self) -> bool:
        return self.op == "const"

    @property
    def is_bool(self) -> bool:
        return self.width == BOOL

    def digest(self, length: int = 10) -> str:
        """Stable short hex digest of the term structure (for memo symbol names)."""
        if self._digest is None:
            h = hashlib.sha256()
            stack: list[Term] = [self]
            while stack:
                t = stack.pop()
                h.update(f"{t.op}:{t.width}:{t.value}:{t.name};".encode())
                stack.extend(t.args)
            self._digest = h.hexdigest()
        return self._digest[:length]

    def variables(self) -> set["Term"]:
        out: set[Term] = set()
        seen: set[int] = set()
        stack = [self]
        while stack:
            t = stack.pop()
            if id(t) in seen:
                continue
            seen.add(id(t))
            if t.op == "var":
                out.add(t)
            stack.extend(t.args)
        return out

    def __repr__(self) -> str:
        if self.op == "const":
            if self.width == BOOL:
                return "true" if self.value else "false"
            return hex(self.value)  # type: ignore[arg-type]
        if self.op == "var":
            return f"{self.name}"
        return f"({self.op} {' '.join(map(repr, self.args))})"


# -- bitvector constructors ---------------------------------------------------

def const(value: int, width: int = 256) -> Term:
    return Term("const", width, value=value & mask(width))


def var(name: str, width: int = 256) -> Term:
    return Term("var", width, name=name)


def _check_bv(*terms: Term) -> int:
    width = terms[0].width
    for t in terms:
        if t.width != width or t.width == BOOL:
            raise ValueError(f"width mismatch: {[x.width for x in terms]}")
    return width


def bv_add(a: Term, b: Term) -> Term:
    w = _check_bv(a, b)
    if a.is_const and b.is_const:
        return const(a.value + b.value, w)
    if a.is_const and a.value == 0:
        return b
    if b.is_const and b.value == 0:
        return a
    return Term("add", w, (a, b))


def bv_sub(a: Term, b: Term) -> Term:
    w = _check_bv(a, b)
    if a.is_const and b.is_const:
        return const(a.value - b.value, w)
    if b.is_const and b.value == 0:
        return a
    if a == b:
        return const(0, w)
    return Term("sub", w, (a, b))


def bv_mul(a: Term, b: Term) -> Term:
    w = _check_bv(a, b)
    if a.is_const and b.is_const:
        return const(a.value * b.value, w)
    for x, y in ((a, b), (b, a)):
        if x.is_const:
            if x.value == 0:
                return const(0, w)
            if x.value == 1:
                return y
    return Term("mul", w, (a, b))


def udiv(a: Term, b: Term) -> Term:
    w = _check_bv(a, b)
    if b.is_const:
        if b.value == 0:
            return const(0, w)  # EVM convention
        if b.value == 1:
            return a
        if b.value & (b.value - 1) == 0:
            return shr(a, const(b.value.bit_length() - 1, w))
        if a.is_const:
            return const(a.value // b.value, w)
    return Term("udiv", w, (a, b))


def urem(a: Term, b: Term) -> Term:
    w = _check_bv(a, b)
    if b.is_const:
        if b.value == 0:
            return const(0, w)  # EVM convention
        if b.value & (b.value - 1) == 0:
            return bv_and(a, const(b.value - 1, w))
        if a.is_const:
            return const(a.value % b.value, w)
    return Term("urem", w, (a, b))


def bv_and(a: Term, b: Term) -> Term:
    w = _check_bv(a, b)
    if a.is_const and b.is_const:
        return const(a.value & b.value, w)
    for x, y in ((a, b), (b, a)):
        if x.is_const:
            if x.value == 0:
                return const(0, w)
            if x.value == mask(w):
                return y
    if a == b:
        return a
    return Term("and", w, (a, b))


def bv_or(a: Term, b: Term) -> Term:
    w = _check_bv(a, b)
    if a.is_const and b.is_const:
        return const(a.value | b.value, w)
    for x, y in ((a, b), (b, a)):
        if x.is_const:
            if x.value == 0:
                return y
            if x.value == mask(w):
                return const(mask(w), w)
    if a == b:
        return a
    return Term("or", w, (a, b))


def bv_xor(a: Term, b: Term) -> Term:
    w = _check_bv(a, b)
    if a.is_const and b.is_const:
        return const(a.value ^ b.value, w)
    for x, y in ((a, b), (b, a)):
        if x.is_const and x.value == 0:
            return y
    if a == b:
        return const(0, w)
    return Term("xor", w, (a, b))


def bv_not(a: Term) -> Term:
    if a.is_const:
        return const(~a.value, a.width)
    return Term("not", a.width, (a,))


def shl(a: Term, amount: Term) -> Term:
    w = _check_bv(a, amount)
    if amount.is_const:
        if amount.value == 0:
            return a
        if amount.value >= w:
            return const(0, w)
        if a.is_const:
            return const(a.value << amount.value, w)
    return Term("shl", w, (a, amount))


def shr(a: Term, amount: Term) -> Term:
    w = _check_bv(a, amount)
    if amount.is_const:
        if amount.value == 0:
            return a
        if amount.value >= w:
            return const(0, w)
        if a.is_const:
            return const(a.value >> amount.value, w)
    return Term("shr", w, (a, amount))


def ite(cond: Term, then: Term, other: Term) -> Term:
    if not cond.is_bool:
        raise ValueError("ite condition must be boolean")
    _check_bv(then, other)
    if cond.is_const:
        return then if cond.value else other
    if then == other:
        return then
    return Term("ite", then.width, (cond, then, other))


# -- boolean constructors -----------------------------------------------------

TRUE = Term("const", BOOL, value=1)
FALSE = Term("const", BOOL, value=0)


def true() -> Term:
    return TRUE


def false() -> Term:
    return FALSE


def _bool_const(v: bool) -> Term:
    return TRUE if v else FALSE


def eq(a: Term, b: Term) -> Term:
    _check_bv(a, b)
    if a.is_const and b.is_const:
        return _bool_const(a.value == b.value)
    if a == b:
        return TRUE
    # normalize: constant on the right
    if a.is_const:
        a, b = b, a
    # eq(ite(c, 1, 0), k) collapses back to the condition
    if a.op == "ite" and a.args[1].is_const and a.args[2].is_const and b.is_const:
        cond, x, y = a.args
        hits = [x.value == b.value, y.value == b.value]
        if hits == [True, False]:
            return cond
        if hits == [False, True]:
            return bnot(cond)
        if hits == [True, True]:
            return TRUE
        return FALSE
    return Term("eq", BOOL, (a, b))


def ult(a: Term, b: Term) -> Term:
    w = _check_bv(a, b)
    if a.is_const and b.is_const:
        return _bool_const(a.value < b.value)
    if b.is_const and b.value == 0:
        return FALSE
    if a.is_const and a.value == mask(w):
        return FALSE
    if a == b:
        return FALSE
    return Term("ult", BOOL, (a, b))


def ugt(a: Term, b: Term) -> Term:
    return ult(b, a)


def ule(a: Term, b: Term) -> Term:
    return bnot(ult(b, a))


def uge(a: Term, b: Term) -> Term:
    return bnot(ult(a, b))


def _flip_sign(a: Term) -> Term:
    return bv_xor(a, const(1 << (a.width - 1), a.width))


def slt(a: Term, b: Term) -> Term:
    return ult(_flip_sign(a), _flip_sign(b))


def sgt(a: Term, b: Term) -> Term:
    return slt(b, a)


def sle(a: Term, b: Term) -> Term:
    return bnot(slt(b, a))


def sge(a: Term, b: Term) -> Term:
    return bnot(slt(a, b))


def bnot(a: Term) -> Term:
    if not a.is_bool:
        raise ValueError("bnot expects a boolean")
    if a.is_const:
        return _bool_const(not a.value)
    if a.op == "bnot":
        return a.args[0]
    return Term("bnot", BOOL, (a,))


def band(terms: Iterable[Term]) -> Term:
    flat: list[Term] = []
    seen: set[Term] = set()
    for t in terms:
        if not t.is_bool:
            raise ValueError("band expects booleans")
        items = t.args if t.op == "band" else (t,)
        for item in items:
            if item.is_const:
                if not item.value:
                    return FALSE
                continue
            if item not in seen:
                seen.add(item)
                flat.append(item)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return Term("band", BOOL, tuple(flat))


def bor(terms: Iterable[Term]) -> Term:
    flat: list[Term] = []
    seen: set[Term] = set()
    for t in terms:
        if not t.is_bool:
            raise ValueError("bor expects booleans")
        items = t.args if t.op == "bor" else (t,)
        for item in items:
            if item.is_const:
                if item.value:
                    return TRUE
                continue
            if item not in seen:
                seen.add(item)
                flat.append(item)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Term("bor", BOOL, tuple(flat))


def truthy(a: Term) -> Term:
    """Boolean "word is nonzero" condition."""
    return bnot(eq(a, const(0, a.width)))


def bool_to_word(cond: Term, width: int = 256) -> Term:
    return ite(cond, const(1, width), const(0, width))


# -- concrete evaluation ------------------------------------------------------

def evaluate(term: Term, env: Mapping[str, int] | None = None) -> int:
    """Evaluate a term to a concrete int (booleans yield 0/1).

    Unbound variables default to 0, matching model extraction where the solver
    left them unconstrained.
    """
    env = env or {}
    memo: dict[Term, int] = {}
    stack: list[tuple[Term, bool]] = [(term, False)]
    while stack:
        t, ready = stack.pop()
        if t in memo:
            continue
        if not ready:
            stack.append((t, True))
            stack.extend((a, False) for a in t.args)
            continue
        a = [memo[x] for x in t.args]
        w = t.width
        m = mask(w) if w else 1
        op = t.op
        if op == "const":
            r = t.value  # type: ignore[assignment]
        elif op == "var":
            r = env.get(t.name, 0) & m  # type: ignore[arg-type]
        elif op == "add":
            r = (a[0] + a[1]) & m
        elif op == "sub":
            r = (a[0] - a[1]) & m
        elif op == "mul":
            r = (a[0] * a[1]) & m
        elif op == "udiv":
            r = a[0] // a[1] if a[1] else 0
        elif op == "urem":
            r = a[0] % a[1] if a[1] else 0
        elif op == "and":
            r = a[0] & a[1]
        elif op == "or":
            r = a[0] | a[1]
        elif op == "xor":
            r = a[0] ^ a[1]
        elif op == "not":
            r = ~a[0] & m
        elif op == "shl":
            r = (a[0] << a[1]) & m if a[1] < w else 0
        elif op == "shr":
            r = a[0] >> a[1] if a[1] < w else 0
        elif op == "ite":
            r = a[1] if a[0] else a[2]
        elif op == "eq":
            r = int(a[0] == a[1])
        elif op == "ult":
            r = int(a[0] < a[1])
        elif op == "bnot":
            r = int(not a[0])
        elif op == "band":
            r = int(all(a))
        elif op == "bor":
            r = int(any(a))
        else:
            raise ValueError(f"cannot evaluate op {op!r}")
        memo[t] = r
    return memo[term]
