"""Affine matrix maps: determinants, rank normalization, verification."""

import warnings
from itertools import permutations

import pytest

from detcomp import linalg
from detcomp.expressions import catalog_get
from detcomp.fields import QQ, FieldMismatchError, Fp
from detcomp.matmap import (
    AffineMatrixMap,
    DeterminantSizeError,
    FieldTooSmallError,
    generic_det_polynomial,
    generic_matrix_map,
    perm_polynomial,
    rank_and_normalize,
    symbolic_det,
    verify_expression,
)
from detcomp.poly import Polynomial, random_polynomial, varset


def parse_map(rows, vars, field=QQ):
    grid = [
        [Polynomial.parse(cell, vars=vars, field=field) for cell in row]
        for row in rows
    ]
    return AffineMatrixMap.from_rows(vars, field, grid)


def random_map(vars, field, m, rng):
    rows = [
        [
            random_polynomial(vars, field, rng, degree=1, terms=2)
            for _ in range(m)
        ]
        for _ in range(m)
    ]
    return AffineMatrixMap.from_rows(vars, field, rows)


# ------------------------------------------------------------- construction


def test_shape_and_degree_validation():
    xy = varset("x", "y")
    x = Polynomial.parse("x", vars=xy)
    with pytest.raises(ValueError):
        AffineMatrixMap.from_rows(xy, QQ, [[x, x]])
    with pytest.raises(ValueError):
        AffineMatrixMap.from_rows(xy, QQ, [[x * x]])
    with pytest.raises(FieldMismatchError):
        AffineMatrixMap.from_rows(xy, Fp(5), [[x]])
    with pytest.raises(ValueError):
        AffineMatrixMap(xy, QQ, ())


def test_structure_accessors():
    xy = varset("x", "y")
    L = parse_map([["x + 2*y + 3", "y"], ["1", "x - 1"]], xy)
    assert L.size == 2
    assert L.constant_part() == [[QQ.of(3), QQ.of(0)], [QQ.of(1), QQ.of(-1)]]
    assert L.coefficient_matrix(0) == [[QQ.of(1), QQ.of(0)], [QQ.of(0), QQ.of(1)]]
    assert L.coefficient_matrix(1) == [[QQ.of(2), QQ.of(1)], [QQ.of(0), QQ.of(0)]]
    assert L.evaluate([1, 1]) == [[QQ.of(6), QQ.of(1)], [QQ.of(1), QQ.of(0)]]
    lin = L.linear_part()
    assert all(p.constant_term() == QQ.zero for row in lin.entries for p in row)


# ------------------------------------------------------------- determinants


def test_quadric_determinant():
    xyz = varset("x", "y", "z")
    L = parse_map([["x", "y"], ["-z", "x"]], xyz)
    assert symbolic_det(L) == Polynomial.parse("x^2 + y*z", vars=xyz)


def test_det_of_constant_diagonal():
    xy = varset("x", "y")
    L = parse_map([["2", "0"], ["0", "3"]], xy)
    assert symbolic_det(L) == Polynomial.const(xy, QQ, 6)


def test_det_with_zero_row_is_zero():
    xy = varset("x", "y")
    L = parse_map([["0", "0"], ["x", "y"]], xy)
    assert symbolic_det(L).is_zero()


def test_laplace_and_berkowitz_agree(rng):
    """Spot agreement here; the 200-map sweep runs in the acceptance suite."""
    for field in (QQ, Fp(7)):
        vars = varset("x", "y", "z")
        for m in (1, 2, 3, 4):
            for _ in range(5):
                L = random_map(vars, field, m, rng)
                a = symbolic_det(L, algorithm="laplace-memo")
                b = symbolic_det(L, algorithm="berkowitz")
                assert a == b


def test_det_evaluation_commutes_with_numeric_det(rng):
    field = Fp(101)
    vars = varset("x", "y", "z")
    for m in (2, 3):
        for _ in range(10):
            L = random_map(vars, field, m, rng)
            det = symbolic_det(L)
            pt = [field.sample(rng, 101) for _ in range(3)]
            assert det.evaluate(pt).value == linalg.mat_det(field, L.evaluate(pt))


def test_laplace_cap_and_berkowitz_fallback():
    m = 7
    vars = varset("x")
    one = Polynomial.const(vars, QQ, 1)
    x = Polynomial.parse("x", vars=vars)
    rows = [
        tuple(x if i == j else one if j == i + 1 else Polynomial.zero(vars, QQ) for j in range(m))
        for i in range(m)
    ]
    L = AffineMatrixMap(vars, QQ, tuple(rows))
    with pytest.raises(DeterminantSizeError):
        symbolic_det(L, algorithm="laplace-memo", cap=6)
    assert symbolic_det(L, algorithm="berkowitz") == Polynomial.parse("x^7", vars=vars)
    assert symbolic_det(L, algorithm="auto", cap=6) == Polynomial.parse("x^7", vars=vars)
    with pytest.raises(ValueError):
        symbolic_det(L, algorithm="gauss")


# -------------------------------------------------------- rank normalization


def test_rank_normalize_zero_constant_part():
    xy = varset("x", "y")
    L = parse_map([["x", "y"], ["y", "x"]], xy)
    norm = rank_and_normalize(L)
    assert norm.rank == 0
    assert norm.normalized.entries == L.entries
    assert norm.scalar == QQ.of(1)


def test_rank_normalize_constant_block_shape(rng):
    """P L Q has ones exactly on the trailing diagonal slots, r of them."""
    field = Fp(7)
    vars = varset("x", "y")
    for _ in range(20):
        L = random_map(vars, field, 4, rng)
        norm = rank_and_normalize(L)
        m = 4
        c = norm.normalized.constant_part()
        expected_rank = linalg.mat_rank(field, L.constant_part())
        assert norm.rank == expected_rank
        for i in range(m):
            for j in range(m):
                want = field.one if (i == j and i >= m - norm.rank) else field.zero
                assert c[i][j] == want


def test_rank_normalize_recomposition(rng):
    """normalized = P L Q entrywise, and det picks up det(P) det(Q)."""
    field = Fp(7)
    vars = varset("x", "y")
    for _ in range(10):
        L = random_map(vars, field, 4, rng)
        norm = rank_and_normalize(L)
        P, Q = norm.left, norm.right
        m = 4
        zero = Polynomial.zero(vars, field)
        for i in range(m):
            for j in range(m):
                acc = zero
                for k in range(m):
                    for l in range(m):
                        c = field.mul(P[i][k], Q[l][j])
                        if c != field.zero:
                            acc = acc + L.entries[k][l].scale(c)
                assert acc == norm.normalized.entries[i][j]
        assert norm.scalar == field.mul(
            linalg.mat_det(field, P), linalg.mat_det(field, Q)
        )
        lhs = symbolic_det(norm.normalized)
        rhs = symbolic_det(L).scale(norm.scalar)
        assert lhs == rhs


def test_rank_normalize_full_rank_constant():
    vars = varset("x")
    rows = [["x + 1", "0", "0"], ["0", "1", "x"], ["0", "0", "1"]]
    L = parse_map(rows, vars)
    norm = rank_and_normalize(L)
    assert norm.rank == 3
    ident = linalg.identity(QQ, 3)
    assert norm.normalized.constant_part() == ident
    assert symbolic_det(norm.normalized) == symbolic_det(L).scale(norm.scalar)
    # linear_entry strips the constant part of an entry
    e00 = norm.normalized.entries[0][0]
    assert norm.linear_entry(0, 0) == e00 - Polynomial.const(
        vars, QQ, e00.constant_term()
    )


# ------------------------------------------------- generic perm and det


def test_perm_polynomial_small():
    p2 = perm_polynomial(2)
    assert str(p2) == "x12*x21 + x11*x22"
    assert p2.coefficient((1, 0, 0, 1)) == QQ.of(1)
    assert p2.coefficient((0, 1, 1, 0)) == QQ.of(1)
    p3 = perm_polynomial(3)
    assert len(p3.terms) == 6
    assert all(c == QQ.of(1) for _, c in p3.terms)
    assert p3.is_homogeneous() and p3.degree() == 3
    p4 = perm_polynomial(4)
    assert len(p4.terms) == 24
    # multilinear: every variable appears with exponent at most 1
    assert all(max(e) == 1 for e, _ in p4.terms)


def test_perm_cap_and_char2_warning():
    with pytest.raises(ValueError):
        perm_polynomial(7)
    with pytest.raises(ValueError):
        perm_polynomial(0)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        perm_polynomial(2, field=Fp(2))
    assert any("characteristic 2" in str(w.message) for w in caught)


def test_generic_det_signs_match_parity():
    for m in (2, 3):
        det = generic_det_polynomial(m)
        assert len(det.terms) == [1, 1, 2, 6][m]
        for sigma in permutations(range(m)):
            e = [0] * (m * m)
            for i, j in enumerate(sigma):
                e[i * m + j] = 1
            inversions = sum(
                1
                for a in range(m)
                for b in range(a + 1, m)
                if sigma[a] > sigma[b]
            )
            assert det.coefficient(tuple(e)) == QQ.of((-1) ** inversions)


def test_generic_det_agrees_with_symbolic_det():
    for m in (2, 3, 4):
        assert generic_det_polynomial(m) == symbolic_det(generic_matrix_map(m))
    with pytest.raises(ValueError):
        generic_det_polynomial(6)


def test_det_is_multiplicative_under_constant_sandwich(rng):
    """det(P L Q) = det(P) det(L) det(Q) for constant invertible P, Q."""
    field = Fp(11)
    vars = varset("x", "y")
    for _ in range(10):
        L = random_map(vars, field, 3, rng)
        P = linalg.random_invertible(field, 3, rng)
        Q = linalg.random_invertible(field, 3, rng)
        zero = Polynomial.zero(vars, field)
        rows = []
        for i in range(3):
            row = []
            for j in range(3):
                acc = zero
                for k in range(3):
                    for l in range(3):
                        c = field.mul(P[i][k], Q[l][j])
                        if c != field.zero:
                            acc = acc + L.entries[k][l].scale(c)
                row.append(acc)
            rows.append(tuple(row))
        sandwich = AffineMatrixMap(vars, field, tuple(rows))
        scalar = field.mul(linalg.mat_det(field, P), linalg.mat_det(field, Q))
        assert symbolic_det(sandwich) == symbolic_det(L).scale(scalar)


# --------------------------------------------------------------- verification


def test_verify_expression_exact():
    mapping, target = catalog_get("quadric_2x2")
    report = verify_expression(mapping, target)
    assert report.mode == "exact" and report.ok
    assert report.witness_monomial is None


def test_verify_expression_mismatch_witness():
    xyz = varset("x", "y", "z")
    L = parse_map([["x", "y"], ["z", "x"]], xyz)  # det = x^2 - y*z
    target = Polynomial.parse("x^2 + y*z", vars=xyz)
    report = verify_expression(L, target)
    assert not report.ok
    assert report.witness_monomial == "y*z"
    diff = symbolic_det(L) - target
    assert not diff.coefficient(diff.leading_monomial()) == QQ.zero


def test_verify_expression_probabilistic():
    mapping, target = catalog_get("cubic_5x5")
    report = verify_expression(mapping, target, mode="probabilistic", trials=40)
    assert report.ok
    assert report.trials == 40
    assert report.failure_bound is not None and report.failure_bound < 1e-20


def test_probabilistic_catches_perturbation():
    mapping, target = catalog_get("cubic_5x5", field=Fp(32003))
    rows = [list(r) for r in mapping.entries]
    rows[0][0] = rows[0][0] + Polynomial.const(mapping.vars, mapping.field, 1)
    broken = AffineMatrixMap.from_rows(mapping.vars, mapping.field, rows)
    report = verify_expression(broken, target, mode="probabilistic", trials=30)
    assert not report.ok
    assert report.witness_point is not None
    # the witness is a genuine counterexample
    pt = [v for v in report.witness_point]
    det_val = linalg.mat_det(mapping.field, broken.evaluate(pt))
    assert det_val != target.evaluate(pt).value


def test_probabilistic_needs_enough_field_elements():
    field = Fp(2)
    xy = varset("x", "y")
    L = parse_map([["x", "0"], ["0", "y"]], xy, field)
    target = Polynomial.parse("x*y", vars=xy, field=field)
    with pytest.raises(FieldTooSmallError):
        verify_expression(L, target, mode="probabilistic")
    assert verify_expression(L, target, mode="exact").ok


def test_exact_and_probabilistic_agree(rng):
    field = Fp(101)
    vars = varset("x", "y")
    for _ in range(10):
        L = random_map(vars, field, 2, rng)
        target = symbolic_det(L)
        exact = verify_expression(L, target)
        prob = verify_expression(L, target, mode="probabilistic", trials=20)
        assert exact.ok and prob.ok


def test_verify_rejects_mismatched_rings():
    xy = varset("x", "y")
    L = parse_map([["x"]], xy)
    with pytest.raises(FieldMismatchError):
        verify_expression(L, Polynomial.parse("x", vars=varset("x")))
