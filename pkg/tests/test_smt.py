"""Solver stack: constant folding, SAT core, bit-blasting, equivalence.

The main oracle is exhaustive enumeration at width 8: random constraint sets
over two variables are decided both by brute force and by the solver.
"""

import random

import pytest
from hypothesis import given, settings, strategies as st

from reentscan.smt import (
    IndeterminateEquivalence,
    Solver,
    SolverStatus,
    UnsupportedTermError,
    band,
    bnot,
    bv_add,
    bv_and,
    bv_mul,
    bv_not,
    bv_or,
    bv_sub,
    bv_xor,
    const,
    eq,
    evaluate,
    ite,
    shl,
    shr,
    sle,
    slt,
    udiv,
    ule,
    ult,
    urem,
    var,
)
from reentscan.smt.sat import SatSolver
from reentscan.smt.terms import TRUE, FALSE, truthy

WORD_EDGES = [0, 1, 2, (1 << 255) - 1, 1 << 255, (1 << 256) - 2, (1 << 256) - 1]


# -- constant folding vs bigint semantics -------------------------------------

@pytest.mark.parametrize("a", WORD_EDGES)
@pytest.mark.parametrize("b", WORD_EDGES)
def test_folding_matches_bigints(a, b):
    m = (1 << 256) - 1
    ca, cb = const(a), const(b)
    assert bv_add(ca, cb).value == (a + b) & m
    assert bv_sub(ca, cb).value == (a - b) & m
    assert bv_mul(ca, cb).value == (a * b) & m
    assert udiv(ca, cb).value == (a // b if b else 0)
    assert urem(ca, cb).value == (a % b if b else 0)
    assert bv_and(ca, cb).value == a & b
    assert bv_or(ca, cb).value == a | b
    assert bv_xor(ca, cb).value == a ^ b
    assert eq(ca, cb) is (TRUE if a == b else FALSE)
    assert ult(ca, cb) is (TRUE if a < b else FALSE)


@given(st.integers(0, (1 << 256) - 1), st.integers(0, 300))
def test_shift_folding(a, s):
    m = (1 << 256) - 1
    assert shl(const(a), const(s)).value == ((a << s) & m if s < 256 else 0)
    assert shr(const(a), const(s)).value == (a >> s if s < 256 else 0)


def test_division_by_zero_convention():
    x = var("x")
    assert udiv(x, const(0)).value == 0
    assert urem(x, const(0)).value == 0


def test_structural_identity():
    a = bv_add(var("x"), const(1))
    b = bv_add(var("x"), const(1))
    assert a == b and hash(a) == hash(b)
    assert a.digest() == b.digest()
    assert a != bv_add(var("y"), const(1))


def test_boolean_simplifications():
    x = var("x")
    assert bnot(bnot(truthy(x))) == truthy(x)
    assert band([TRUE, truthy(x), truthy(x)]) == truthy(x)
    assert band([FALSE, truthy(x)]) is FALSE
    assert eq(ite(ult(x, const(5)), const(1), const(0)), const(1)) == ult(x, const(5))
    assert bv_not(bv_not(const(7))).value == 7


# -- CDCL core ----------------------------------------------------------------

def test_pigeonhole_unsat():
    # 5 pigeons in 4 holes
    sat = SatSolver()
    holes = 4
    v = [[sat.new_var() for _ in range(holes)] for _ in range(holes + 1)]
    for p in v:
        sat.add_clause(p)
    for h in range(holes):
        for i in range(holes + 1):
            for j in range(i + 1, holes + 1):
                sat.add_clause([-v[i][h], -v[j][h]])
    assert sat.solve() is False


def test_sat_model_is_verified():
    sat = SatSolver()
    a, b, c = sat.new_var(), sat.new_var(), sat.new_var()
    sat.add_clause([a, b])
    sat.add_clause([-a, c])
    sat.add_clause([-b, -c])
    assert sat.solve() is True
    model = {x: sat.model_value(x) for x in (a, b, c)}
    assert (model[a] or model[b]) and (not model[a] or model[c]) \
        and (not model[b] or not model[c])


def test_random_cnf_against_bruteforce():
    rng = random.Random(7)
    for _ in range(150):
        n = rng.randint(1, 8)
        clauses = [[rng.choice([-1, 1]) * rng.randint(1, n)
                    for _ in range(rng.randint(1, 3))]
                   for _ in range(rng.randint(1, 25))]
        brute = any(
            all(any((assign >> (abs(l) - 1)) & 1 == (l > 0) for l in cl)
                for cl in clauses)
            for assign in range(1 << n))
        sat = SatSolver()
        for _ in range(n):
            sat.new_var()
        for cl in clauses:
            sat.add_clause(list(cl))
        assert sat.solve() is brute


# -- width-8 enumeration oracle ----------------------------------------------

def _random_term(rng, depth, width=8):
    if depth == 0:
        if rng.random() < 0.5:
            return var(rng.choice("xy"), width)
        return const(rng.randrange(1 << width), width)
    a = _random_term(rng, depth - 1, width)
    b = _random_term(rng, depth - 1, width)
    op = rng.choice([bv_add, bv_sub, bv_and, bv_or, bv_xor, shl, shr,
                     lambda p, q: bv_mul(p, const(rng.randrange(1 << width), width)),
                     lambda p, q: ite(ult(p, q), p, q)])
    return op(a, b)


def _random_constraint(rng):
    a = _random_term(rng, rng.randint(0, 2))
    b = _random_term(rng, rng.randint(0, 2))
    return rng.choice([eq, ult, ule, slt, sle,
                       lambda p, q: bnot(eq(p, q))])(a, b)


def test_solver_against_enumeration():
    rng = random.Random(2024)
    solver = Solver(timeout=30.0)
    for _ in range(80):
        constraints = [_random_constraint(rng) for _ in range(rng.randint(1, 3))]
        brute_sat = any(
            all(evaluate(c, {"x": x, "y": y}) == 1 for c in constraints)
            for x in range(256) for y in range(256))
        verdict = solver.check_sat(constraints)
        assert verdict.status in (SolverStatus.SAT, SolverStatus.UNSAT)
        assert verdict.is_sat == brute_sat
        if verdict.is_sat:
            model = verdict.model or {}
            assert all(evaluate(c, model) == 1 for c in constraints)


def test_equivalence_against_enumeration():
    rng = random.Random(11)
    solver = Solver(timeout=30.0)
    for _ in range(40):
        left = [_random_constraint(rng)]
        right = [_random_constraint(rng)]

        def models(cs):
            return {(x, y) for x in range(256) for y in range(256)
                    if all(evaluate(c, {"x": x, "y": y}) == 1 for c in cs)}

        assert solver.check_equivalence(left, right) == (models(left) == models(right))


# -- 256-bit behavior ---------------------------------------------------------

def test_equivalence_reflexive_and_symmetric():
    solver = Solver()
    b, s = var("b"), var("s")
    two_s = bv_add(s, s)
    ge_s = bnot(ult(b, s))
    ge_2s = bnot(ult(b, two_s))
    assert solver.check_equivalence([ge_s], [ge_s])
    assert not solver.check_equivalence([ge_s], [ge_2s])
    assert not solver.check_equivalence([ge_2s], [ge_s])  # symmetric


def test_equivalence_of_rewritten_forms():
    solver = Solver()
    x = var("x")
    # x > 0 and x >= 1 denote the same model set
    assert solver.check_equivalence([ult(const(0), x)],
                                    [bnot(ult(x, const(1)))])


def test_unsupported_ops_are_unknown():
    solver = Solver()
    x, y = var("x"), var("y")
    verdict = solver.check_sat([eq(bv_mul(x, y), const(6))])
    assert verdict.status is SolverStatus.UNKNOWN
    verdict = solver.check_sat([eq(udiv(x, y), const(2))])
    assert verdict.status is SolverStatus.UNKNOWN
    with pytest.raises(IndeterminateEquivalence):
        solver.check_equivalence([eq(bv_mul(x, y), const(6))], [TRUE])


def test_model_extraction_256_bit():
    solver = Solver()
    x = var("x")
    verdict = solver.check_sat([ult(const(1 << 200), x), ult(x, bv_not(const(0)))])
    assert verdict.is_sat
    assert (1 << 200) < verdict.model["x"] < (1 << 256) - 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, (1 << 256) - 1))
def test_evaluate_matches_solver_on_point_constraints(v):
    solver = Solver()
    x = var("x")
    verdict = solver.check_sat([eq(x, const(v))])
    assert verdict.is_sat
    assert verdict.model["x"] == v
