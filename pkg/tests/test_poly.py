"""Polynomial ring: canonical form, arithmetic laws, calculus, substitution."""

import math
from fractions import Fraction

import pytest

from detcomp.fields import QQ, FieldMismatchError, Fp
from detcomp.poly import (
    Polynomial,
    euler_combination,
    mono_key,
    poly_ring,
    random_polynomial,
    varset,
)

XY = varset("x", "y")
XYZ = varset("x", "y", "z")
XYZT = varset("x", "y", "z", "t")


def P(text, vars=XYZ, field=QQ):
    return Polynomial.parse(text, vars=vars, field=field)


def rand(vars, field, rng, **kw):
    return random_polynomial(vars, field, rng, **kw)


# ---------------------------------------------------------------- canonical


def test_difference_of_squares():
    x, y = poly_ring(XY, QQ)
    assert (x + y) * (x - y) == P("x^2 - y^2", XY)


def test_canonical_form_invariants(rng):
    """No zero coefficients, exponents strictly descending in the term order."""
    for _ in range(60):
        f = rand(XYZ, QQ, rng) * rand(XYZ, QQ, rng) + rand(XYZ, QQ, rng)
        seen = set()
        last_key = None
        for e, c in f.terms:
            assert c != QQ.zero
            assert e not in seen
            seen.add(e)
            k = mono_key(e)
            if last_key is not None:
                assert k < last_key
            last_key = k


def test_term_order_is_degrevlex():
    # independent comparator: higher total degree wins, ties broken by the
    # SMALLEST exponent on the LAST variable where they differ
    def degrevlex_greater(a, b):
        if sum(a) != sum(b):
            return sum(a) > sum(b)
        for x, y in zip(reversed(a), reversed(b)):
            if x != y:
                return x < y
        return False

    f = P("(x + y + z)^2 + x + z + 1")
    monos = f.monomials()
    for i in range(len(monos) - 1):
        assert degrevlex_greater(monos[i], monos[i + 1])
    # frozen spot check for three variables
    assert monos[0] == (2, 0, 0)
    assert f.leading_monomial() == (2, 0, 0)


def test_zero_polynomial_degree_sentinel():
    z = Polynomial.zero(XY, QQ)
    assert z.is_zero()
    assert z.degree() < 0
    assert z.degree() < Polynomial.const(XY, QQ, 1).degree()


def test_from_dict_drops_nothing_and_sorts():
    f = Polynomial.from_dict(XY, QQ, {(0, 1): QQ.of(2), (1, 0): QQ.of(3)})
    assert f.terms[0][0] == (1, 0)
    assert str(f) == "3*x + 2*y"


def test_from_dict_drops_zero_coefficients():
    f = Polynomial.from_dict(XY, QQ, {(1, 0): QQ.of(0), (0, 1): QQ.of(1)})
    assert len(f.terms) == 1
    assert f == P("y", XY)
    g = Polynomial.from_dict(XY, Fp(5), {(2, 0): Fp(5).of(10)})
    assert g.is_zero()


# ---------------------------------------------------------------- arithmetic


def test_multinomial_expansion_cube():
    """(x+y+z)^3 against the closed-form multinomial coefficients."""
    f = P("(x + y + z)^3")
    assert len(f.terms) == 10
    for (i, j, k), c in f.terms:
        assert i + j + k == 3
        expected = math.factorial(3) // (
            math.factorial(i) * math.factorial(j) * math.factorial(k)
        )
        assert c == Fraction(expected)


def test_ring_axioms_randomized(rng):
    """Associativity, commutativity, distributivity, identities, inverses."""
    cases = 0
    for field in (QQ, Fp(5), Fp(32003)):
        zero = Polynomial.zero(XYZ, field)
        one = Polynomial.const(XYZ, field, 1)
        for _ in range(60):
            f = rand(XYZ, field, rng, degree=3, terms=4)
            g = rand(XYZ, field, rng, degree=3, terms=4)
            h = rand(XYZ, field, rng, degree=2, terms=3)
            assert (f + g) + h == f + (g + h)
            assert (f * g) * h == f * (g * h)
            assert f + g == g + f
            assert f * g == g * f
            assert f * (g + h) == f * g + f * h
            assert f + zero == f
            assert f * one == f
            assert f - f == zero
            assert f * zero == zero
            cases += 10
    assert cases >= 1000


def test_scalar_and_int_coercion():
    f = P("x + 1", XY)
    assert 2 * f == P("2*x + 2", XY)
    assert f * 2 == P("2*x + 2", XY)
    assert f - 1 == P("x", XY)
    assert f.scale(QQ.of(Fraction(1, 2))) == P("1/2*x + 1/2", XY)


def test_pow_matches_repeated_multiplication(rng):
    for _ in range(10):
        f = rand(XY, Fp(7), rng, degree=2, terms=3)
        acc = Polynomial.const(XY, Fp(7), 1)
        for k in range(5):
            assert f**k == acc
            acc = acc * f
    with pytest.raises(ValueError):
        P("x", XY) ** (-1)


def test_mismatched_rings_rejected():
    from detcomp.poly import ArityError

    with pytest.raises(ArityError):
        P("x", XY) + P("x", XYZ)
    with pytest.raises(FieldMismatchError):
        P("x", XY, QQ) * P("x", XY, Fp(5))


# ---------------------------------------------------------------- calculus


def test_partial_derivative_examples():
    cubic = P("x*y^2 + y*t^2 + z^3", XYZT)
    assert cubic.partial_derivative(0) == P("y^2", XYZT)
    assert cubic.partial_derivative("y") == P("2*x*y + t^2", XYZT)
    assert cubic.partial_derivative("z") == P("3*z^2", XYZT)
    assert cubic.partial_derivative("t") == P("2*y*t", XYZT)


def test_partial_derivative_char_p_kills_pth_powers():
    f = Polynomial.parse("x^2", vars=XY, field=Fp(2))
    assert f.partial_derivative(0).is_zero()
    g = Polynomial.parse("x^3", vars=XY, field=Fp(3))
    assert g.partial_derivative(0).is_zero()


def test_euler_identity_homogeneous(rng):
    for field in (QQ, Fp(32003)):
        for d in (2, 3, 4):
            f = rand(XYZ, field, rng, degree=d, terms=5, homogeneous=True)
            assert euler_combination(f) == f.scale(field.of(d))


def test_leibniz_product_rule(rng):
    for field in (QQ, Fp(7)):
        for _ in range(50):
            f = rand(XYZ, field, rng, degree=3, terms=4)
            g = rand(XYZ, field, rng, degree=3, terms=4)
            for i in range(3):
                lhs = (f * g).partial_derivative(i)
                rhs = f.partial_derivative(i) * g + f * g.partial_derivative(i)
                assert lhs == rhs


# ------------------------------------------------------------- substitution


def test_substitute_affine_example():
    x, y = poly_ring(XY, QQ)
    f = x * y
    assert f.substitute_affine([x + y, x - y]) == P("x^2 - y^2", XY)


def test_substitute_identity_is_noop(rng):
    gens = list(poly_ring(XYZ, QQ))
    for _ in range(10):
        f = rand(XYZ, QQ, rng)
        assert f.substitute_affine(gens) == f


def test_substitution_composition_law(rng):
    """f(g(h)) computed either way agrees."""
    field = Fp(13)
    gens = poly_ring(XYZ, field)
    for _ in range(8):
        f = rand(XYZ, field, rng, degree=2, terms=4)
        g_imgs = [rand(XYZ, field, rng, degree=1, terms=3) for _ in gens]
        h_imgs = [rand(XYZ, field, rng, degree=1, terms=3) for _ in gens]
        once = f.substitute_affine([g.substitute_affine(h_imgs) for g in g_imgs])
        twice = f.substitute_affine(g_imgs).substitute_affine(h_imgs)
        assert once == twice


def test_substitute_arity_checked():
    with pytest.raises(ValueError):
        P("x", XY).substitute_affine([P("x", XY)])


# --------------------------------------------------------------- evaluation


def test_evaluate_examples():
    cubic = P("x*y^2 + y*t^2 + z^3", XYZT)
    assert cubic.evaluate([1, 1, 1, 1]) == QQ.of(3)
    assert cubic.evaluate([0, 0, 0, 0]) == QQ.zero
    assert P("7", XY).evaluate([4, 5]) == QQ.of(7)


def test_evaluate_agrees_with_constant_substitution(rng):
    field = Fp(101)
    for _ in range(30):
        f = rand(XYZ, field, rng)
        pt = [field.sample(rng, 101) for _ in range(3)]
        consts = [Polynomial.const(XYZ, field, c) for c in pt]
        assert f.substitute_affine(consts) == Polynomial.const(
            XYZ, field, f.evaluate(pt)
        )


def test_evaluate_is_a_ring_map(rng):
    field = Fp(31)
    for _ in range(40):
        f = rand(XYZ, field, rng)
        g = rand(XYZ, field, rng)
        pt = [field.sample(rng, 31) for _ in range(3)]
        assert (f + g).evaluate(pt) == f.evaluate(pt) + g.evaluate(pt)
        assert (f * g).evaluate(pt) == f.evaluate(pt) * g.evaluate(pt)


# ---------------------------------------------------------- structure query


def test_graded_parts_sum_to_whole(rng):
    for _ in range(20):
        f = rand(XYZT, QQ, rng, degree=4, terms=8)
        parts = f.graded_parts()
        total = Polynomial.zero(XYZT, QQ)
        for d, part in parts.items():
            assert part.is_homogeneous()
            assert part.degree() == d
            total = total + part
        assert total == f


def test_homogeneity_detection():
    assert P("x^2 + y*z").is_homogeneous()
    assert not P("x^2 + y").is_homogeneous()
    assert Polynomial.zero(XY, QQ).is_homogeneous()


def test_rename_extend_restrict():
    f = P("x*y", XY)
    g = f.extend(XYZ)
    assert g == P("x*y", XYZ)
    assert g.restrict(XY) == f
    with pytest.raises(ValueError):
        P("x*z").restrict(XY)
    ab = varset("a", "b")
    assert f.rename(ab) == Polynomial.parse("a*b", vars=ab)


# ------------------------------------------------------------ text round trip


def test_parse_print_round_trip(rng):
    for field in (QQ, Fp(7)):
        for _ in range(40):
            f = rand(XYZT, field, rng, degree=4, terms=6)
            assert Polynomial.parse(str(f), vars=XYZT, field=field) == f


def test_parse_rational_and_negative_literals():
    assert P("-x + 3/2*y", XY) == Polynomial.from_dict(
        XY, QQ, {(1, 0): QQ.of(-1), (0, 1): QQ.of(Fraction(3, 2))}
    )
    assert P("x - - y", XY) == P("x + y", XY)
    assert P("2^3", XY) == P("8", XY)
