import itertools
import json
import random

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given
from hypothesis import strategies as st
from sympy.polys.domains import GF as SGF
from sympy.polys.matrices import DomainMatrix

from hvb import GF, QQ, ExactMatrix, InputError, kernel_basis, rank, solve
from hvb.exactfield import field_from_json, first_irreducible, is_irreducible_fp
from hvb.instances import random_matrix

GF9 = GF(3, 2, [2, 2, 1])  # x^2 + 2x + 2 is irreducible over GF(3)
GF4 = GF(2, 2, [1, 1, 1])


def M(F, rows):
    return ExactMatrix.from_rows(F, rows)


def test_rank_examples():
    assert rank(ExactMatrix.identity(QQ, 3)) == 3
    assert rank(ExactMatrix.zeros(QQ, 2, 2)) == 0
    assert rank(M(QQ, [[1, 2], [2, 4]])) == 1


def test_kernel_examples():
    assert kernel_basis(ExactMatrix.identity(QQ, 2)) == []
    ker = kernel_basis(ExactMatrix.zeros(QQ, 2, 3))
    assert sorted(ker) == sorted([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    F2 = GF(2)
    assert kernel_basis(M(F2, [[1, 1]])) == [(1, 1)]


def test_solve_examples():
    b = (mpq(3), mpq(-2))
    assert tuple(solve(ExactMatrix.identity(QQ, 2), b)) == b
    assert solve(ExactMatrix.zeros(QQ, 2, 2), (1, 0)) is None
    assert tuple(solve(M(QQ, [[2]]), (1,))) == (mpq(1, 2),)


def test_rank_agrees_with_sympy():
    rng = random.Random(5)
    for _ in range(30):
        r, c = rng.randint(1, 6), rng.randint(1, 6)
        A = random_matrix(QQ, rng, r, c, bound=3)
        ref = sympy.Matrix([[sympy.Rational(int(x.numerator), int(x.denominator)) for x in row]
                            for row in A.entries]).rank()
        assert rank(A) == ref


def test_rank_over_gf_agrees_with_sympy():
    rng = random.Random(6)
    for p in (2, 3, 5):
        F = GF(p)
        dom = SGF(p)
        for _ in range(15):
            r, c = rng.randint(1, 5), rng.randint(1, 5)
            A = random_matrix(F, rng, r, c)
            dm = DomainMatrix([[dom(int(x)) for x in row] for row in A.entries], (r, c), dom)
            assert rank(A) == dm.rank()


@st.composite
def qq_matrices(draw, max_dim=5):
    r = draw(st.integers(1, max_dim))
    c = draw(st.integers(1, max_dim))
    ent = st.fractions(min_value=-3, max_value=3, max_denominator=3)
    rows = draw(st.lists(st.lists(ent, min_size=c, max_size=c), min_size=r, max_size=r))
    return ExactMatrix.from_rows(QQ, [[mpq(x.numerator, x.denominator) for x in row] for row in rows])


@given(qq_matrices())
def test_rank_nullity(A):
    ker = kernel_basis(A)
    assert rank(A) + len(ker) == A.cols
    for v in ker:
        assert all(x == 0 for x in A.apply(v))


@given(qq_matrices(), st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_solve_consistent(A, raw_b):
    b = tuple(mpq(x) for x in raw_b[:A.rows])
    x = solve(A, b)
    aug = A.hstack(ExactMatrix(QQ, A.rows, 1, tuple((y,) for y in b)))
    if rank(aug) == rank(A):
        assert x is not None and tuple(A.apply(x)) == b
    else:
        assert x is None


@given(st.sampled_from([GF(2), GF(5), GF9, GF4, GF(2, 3, [1, 1, 0, 1])]), st.integers(0, 2**32))
def test_field_axioms(F, seed):
    rng = random.Random(seed)
    a, b, c = (F.random_element(rng) for _ in range(3))
    assert F.mul(a, F.mul(b, c)) == F.mul(F.mul(a, b), c)
    assert F.add(a, F.add(b, c)) == F.add(F.add(a, b), c)
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == F.zero
    if not F.is_zero(a):
        assert F.mul(a, F.inv(a)) == F.one


def test_gf9_exhaustive_distributivity():
    els = list(GF9.elements())
    assert len(els) == 9
    for a, b, c in itertools.product(els, repeat=3):
        assert GF9.mul(a, GF9.add(b, c)) == GF9.add(GF9.mul(a, b), GF9.mul(a, c))


def test_frobenius_is_additive_in_gf8():
    F = GF(2, 3, [1, 1, 0, 1])
    for a, b in itertools.product(list(F.elements()), repeat=2):
        assert F.pow(F.add(a, b), 2) == F.add(F.pow(a, 2), F.pow(b, 2))


def test_irreducibility_agrees_with_sympy():
    x = sympy.Symbol("x")
    for p in (2, 3):
        for deg in (2, 3, 4):
            for coeffs in itertools.product(range(p), repeat=deg):
                poly = list(coeffs) + [1]
                ref = sympy.Poly(sum(c * x**i for i, c in enumerate(poly)), x, modulus=p).is_irreducible
                assert is_irreducible_fp(poly, p) == ref


def test_reducible_modulus_rejected():
    with pytest.raises(InputError):
        GF(2, 2, [1, 0, 1])  # x^2 + 1 = (x + 1)^2
    with pytest.raises(InputError):
        GF(4)
    assert is_irreducible_fp(first_irreducible(5, 3), 5)


def test_rational_json_strict():
    with pytest.raises(InputError):
        ExactMatrix.from_json(QQ, [["2/4"]], 1, 1)
    with pytest.raises(InputError):
        ExactMatrix.from_json(QQ, [["1/-2"]], 1, 1)
    A = ExactMatrix.from_json(QQ, [["-1/2", 3]], 1, 2)
    assert A.entries == ((mpq(-1, 2), mpq(3)),)


def test_matrix_json_roundtrip():
    rng = random.Random(1)
    for F in (QQ, GF(3), GF9):
        A = random_matrix(F, rng, 3, 4)
        raw = json.loads(json.dumps(A.to_json()))
        assert ExactMatrix.from_json(F, raw, 3, 4) == A
        assert field_from_json(json.loads(json.dumps(F.to_json()))) == F


def test_gf_element_codes_validated():
    with pytest.raises(InputError):
        ExactMatrix.from_json(GF9, [[9]], 1, 1)


def test_inverse_and_kron():
    rng = random.Random(2)
    A = random_matrix(QQ, rng, 3, 3)
    while rank(A) < 3:
        A = random_matrix(QQ, rng, 3, 3)
    assert (A @ A.inverse()).is_identity()
    B = random_matrix(QQ, rng, 2, 2)
    K = A.kron(B)
    assert K.rows == 6 and K.entries[2 + 1][2 * 1 + 0] == A.entries[1][1] * B.entries[1][0]
