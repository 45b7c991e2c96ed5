"""Exterior-algebra kernel: wedge, derivatives, evaluation, oracles."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from fermifields._core import merge_words
from fermifields.algebra import (Algebra, Configuration, GeneratorId,
                                 evaluate, kth_derivative, left_derivative,
                                 random_element)
from fermifields.scalars import QC
from fermifields.verify import (multilinear_evaluation_oracle,
                                wedge_permutation_oracle)


def test_generator_order_is_lexicographic():
    gens = [GeneratorId(1, 1, 0, 0), GeneratorId(0, 2, 0, 0),
            GeneratorId(0, 1, 3, 1), GeneratorId(0, 1, 3, 0)]
    alg = Algebra(gens)
    assert alg.generators == (GeneratorId(0, 1, 3, 0), GeneratorId(0, 1, 3, 1),
                              GeneratorId(0, 2, 0, 0), GeneratorId(1, 1, 0, 0))
    assert GeneratorId(0, 1, 3, 0) == GeneratorId(0, 1, 3, 0)
    assert GeneratorId(0, 1, 3, 0) != GeneratorId(0, 1, 3, 1)


def test_wedge_basic_signs(alg6):
    e1, e2 = alg6.generator(0), alg6.generator(1)
    assert (e1 ^ e2).terms() == {(0, 1): QC(1)}
    assert (e2 ^ e1).terms() == {(0, 1): QC(-1)}
    assert (e1 ^ e1).is_zero()


def test_wedge_rejects_mismatched_algebras(alg6, fl_rat):
    with pytest.raises(ValueError):
        alg6.generator(0).wedge(fl_rat.algebra.generator(0))


def test_merge_words_sign_matches_sorting():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(2, 9)
        wa = tuple(sorted(rng.sample(range(n), rng.randint(0, n // 2))))
        rest = [i for i in range(n) if i not in wa]
        wb = tuple(sorted(rng.sample(rest, rng.randint(0, len(rest)))))
        out = merge_words(wa, wb)
        concat = list(wa) + list(wb)
        inv = sum(1 for x in range(len(concat)) for y in range(x + 1, len(concat))
                  if concat[x] > concat[y])
        sign, word = out
        assert word == tuple(sorted(concat))
        assert sign == (-1) ** inv


def test_wedge_matches_permutation_sum_oracle(alg6, rng):
    for p in range(0, 4):
        for q in range(0, 7 - p):
            if p + q > 6:
                continue
            a = random_element(alg6, rng, p, 3)
            b = random_element(alg6, rng, q, 3)
            assert (a.wedge(b) - wedge_permutation_oracle(a, p, b, q)).is_zero()


def test_left_derivative_definition_on_basis(alg6):
    # (d_h t)(u) = t(h ∧ u) checked over every basis configuration
    t = alg6.monomial((0, 1)) + alg6.monomial((1, 3), Fraction(2))
    for i in range(6):
        h = alg6.generator(i)
        dt = left_derivative(h, t)
        import itertools
        for r in range(0, 3):
            for word in itertools.combinations(range(6), r):
                u = alg6.monomial(word)
                lhs = evaluate(dt, u)
                rhs = evaluate(t, h.wedge(u)) if not h.wedge(u).is_zero() \
                    else alg6.ring.zero
                assert lhs == rhs


def test_left_derivative_contract_first_slot(alg6):
    t = alg6.monomial((0, 1))
    h = alg6.generator(0)
    assert left_derivative(h, t).terms() == {(1,): QC(1)}
    assert left_derivative(alg6.generator(1), t).terms() == {(0,): QC(-1)}


def test_left_derivative_scalar_is_zero(alg6):
    assert left_derivative(alg6.generator(2), alg6.scalar(3)).is_zero()


def test_left_derivative_requires_grade_one(alg6):
    with pytest.raises(ValueError):
        left_derivative(alg6.monomial((0, 1)), alg6.generator(2))


def test_left_derivative_graded_leibniz(alg6, rng):
    for _ in range(50):
        p, q = rng.randint(0, 3), rng.randint(0, 3)
        s = random_element(alg6, rng, p, 3)
        t = random_element(alg6, rng, q, 3)
        h = {rng.randrange(6): alg6.ring.number(rng.randint(-3, 3))}
        lhs = left_derivative(h, s.wedge(t))
        rhs = left_derivative(h, s).wedge(t)
        tail = s.wedge(left_derivative(h, t))
        rhs = rhs + (tail if p % 2 == 0 else -tail)
        assert (lhs - rhs).is_zero()


def test_evaluation_examples(alg6):
    c, d = QC(Fraction(3, 2)), QC(2, 1)
    t = alg6.monomial((0, 1), c)
    u = Configuration(alg6, {(0, 1): d})
    assert evaluate(t, u) == c * d
    # grade mismatch annihilates
    u3 = alg6.monomial((0, 1, 2))
    assert evaluate(t, u3) == QC(0)


def test_evaluation_matches_multilinear_oracle(rng):
    alg = Algebra([GeneratorId(0, 1, i, 0) for i in range(5)], mode="rational")
    for _ in range(20):
        t = random_element(alg, rng, rng.randint(0, 3), 3)
        u = random_element(alg, rng, rng.randint(0, 3), 3)
        assert evaluate(t, u) == multilinear_evaluation_oracle(t, u)


def test_kth_derivative_examples(alg6, rng):
    # k = 1 on a grade-1 element recovers its coefficients
    e = alg6.linear({1: QC(2), 4: QC(0, 1)})
    d1 = kth_derivative(e, 1)
    assert d1((1,)).terms() == {(): QC(2)}
    assert d1((4,)).terms() == {(): QC(0, 1)}
    # alternating in the direction arguments
    t = random_element(alg6, rng, 3, 3)
    d2 = kth_derivative(t, 2)
    for i in range(6):
        for j in range(6):
            assert (d2((i, j)) + d2((j, i))).is_zero()
    # unrolled definition: (d_i d_j t)(u) = t(e_j ∧ e_i ∧ u), the inner
    # derivative contributing the innermost wedge factor
    t = alg6.monomial((0, 1, 2))
    d2 = kth_derivative(t, 2)
    import itertools
    for i, j in itertools.permutations(range(4), 2):
        for word in itertools.combinations(range(6), 1):
            u = alg6.monomial(word)
            hh = alg6.generator(j).wedge(alg6.generator(i)).wedge(u)
            assert evaluate(d2((i, j)), u) == evaluate(t, hh)


def test_homogeneity_and_parity(alg6):
    a = alg6.monomial((0, 1))
    assert a.is_homogeneous() and a.grade() == 2 and a.parity() == 0
    b = a + alg6.generator(3)
    assert not b.is_homogeneous()
    with pytest.raises(ValueError):
        b.grade()
    even, odd = b.parity_parts()
    assert even.grades() == {2} and odd.grades() == {1}


def test_no_stored_zero_coefficients(alg6):
    a = alg6.monomial((0, 1))
    b = alg6.monomial((0, 1), QC(-1))
    assert len(a + b) == 0
    assert (a + b).is_zero()


def test_json_terms_deterministic(alg6f):
    e = alg6f.element({(0, 2): 1.5 + 0.5j, (1,): -2.0})
    assert e.to_json_terms() == [[[1], -2.0, 0.0], [[0, 2], 1.5, 0.5]]


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 1000))
def test_wedge_graded_commutativity_hypothesis(p, q, seed):
    alg = Algebra([GeneratorId(0, 1, i, 0) for i in range(6)], mode="rational")
    r = random.Random(seed)
    a = random_element(alg, r, p, 2)
    b = random_element(alg, r, q, 2)
    flip = b.wedge(a)
    if (p * q) % 2 == 1:
        flip = -flip
    assert (a.wedge(b) - flip).is_zero()


@settings(max_examples=60, deadline=None, derandomize=True)
@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3),
       st.integers(0, 1000))
def test_wedge_associativity_hypothesis(p, q, s, seed):
    alg = Algebra([GeneratorId(0, 1, i, 0) for i in range(6)], mode="rational")
    r = random.Random(seed)
    a, b, c = (random_element(alg, r, g, 2) for g in (p, q, s))
    assert (a.wedge(b).wedge(c) - a.wedge(b.wedge(c))).is_zero()


def test_backend_consistency(alg6f, rng):
    """Compiled and pure-Python cores must agree exactly."""
    from fermifields import _core_py
    from fermifields import _core
    for _ in range(100):
        a = random_element(alg6f, rng, rng.randint(0, 3), 3)
        b = random_element(alg6f, rng, rng.randint(0, 3), 3)
        fast = _core.wedge_terms(a.terms(), b.terms())
        slow = _core_py.wedge_terms(a.terms(), b.terms())
        assert fast == slow
        g = rng.randrange(6)
        assert _core.contract(a.terms(), g) == _core_py.contract(a.terms(), g)
