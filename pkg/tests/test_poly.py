import random

import sympy
from gmpy2 import mpq

from hvb import GF, QQ
from hvb.instances import random_matrix
from hvb.poly import charpoly, distinct_irreducible_factors, pmul

x = sympy.Symbol("x")


def _sympy_poly(F, coeffs):
    if F.kind == "Q":
        return sympy.Poly(sum(sympy.Rational(int(c.numerator), int(c.denominator)) * x**i
                              for i, c in enumerate(coeffs)), x, domain="QQ")
    return sympy.Poly(sum(int(c) * x**i for i, c in enumerate(coeffs)), x, modulus=F.characteristic)


def test_charpoly_matches_sympy():
    rng = random.Random(3)
    for _ in range(20):
        n = rng.randint(1, 6)
        A = random_matrix(QQ, rng, n, n, bound=3)
        S = sympy.Matrix([[sympy.Rational(int(v.numerator), int(v.denominator)) for v in row] for row in A.entries])
        ref = S.charpoly(x).all_coeffs()[::-1]
        assert [sympy.Rational(int(c.numerator), int(c.denominator)) for c in charpoly(A)] == ref


def test_charpoly_over_gf():
    rng = random.Random(4)
    for p in (2, 3, 7):
        F = GF(p)
        for _ in range(10):
            n = rng.randint(1, 6)
            A = random_matrix(F, rng, n, n)
            S = sympy.Matrix(A.entries)
            ref = [int(c) % p for c in S.charpoly(x).all_coeffs()[::-1]]
            assert charpoly(A) == ref


def test_factors_match_sympy_finite():
    rng = random.Random(7)
    for p in (2, 3, 5):
        F = GF(p)
        for _ in range(25):
            deg = rng.randint(1, 9)
            f = [rng.randrange(p) for _ in range(deg)] + [1]
            ours = distinct_irreducible_factors(F, f, seed=1)
            _, ref = _sympy_poly(F, f).factor_list()
            ref_set = {tuple(int(c) % p for c in g.monic().all_coeffs()[::-1]) for g, _ in ref}
            assert {tuple(g) for g in ours} == ref_set


def test_factors_repeated_and_inseparable():
    F = GF(2)
    # (x^2 + x + 1)^2 (x + 1)^4 has zero derivative parts
    f = pmul(F, pmul(F, [1, 1, 1], [1, 1, 1]), pmul(F, pmul(F, [1, 1], [1, 1]), pmul(F, [1, 1], [1, 1])))
    assert distinct_irreducible_factors(F, f) == [[1, 1], [1, 1, 1]]


def test_factors_over_extension_field_multiply_back():
    F = GF(3, 2, [2, 2, 1])
    rng = random.Random(8)
    for _ in range(10):
        f = [F.random_element(rng) for _ in range(rng.randint(2, 6))] + [F.one]
        facs = distinct_irreducible_factors(F, f, seed=2)
        # every factor divides f and x^2+1 (irreducible over GF(3)) splits over GF(9)
        from hvb.poly import pdivmod
        for g in facs:
            assert pdivmod(F, f, g)[1] == []
    assert len(distinct_irreducible_factors(F, [F.one, F.zero, F.one])) == 2


def test_factors_over_q():
    f = [mpq(c) for c in (-2, 0, 1)]  # x^2 - 2
    assert distinct_irreducible_factors(QQ, f) == [f]
    g = [mpq(c) for c in (-1, 0, 1)]
    assert distinct_irreducible_factors(QQ, g) == [[mpq(-1), mpq(1)], [mpq(1), mpq(1)]]
