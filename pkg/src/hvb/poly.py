"""Univariate polynomials over an exact field, characteristic polynomials and
factorisation into distinct irreducible factors.

Polynomials are lists of coefficients, least degree first, with no trailing
zeros (the zero polynomial is ``[]``).
"""

from __future__ import annotations

import random

import sympy
from gmpy2 import mpq

from .exactfield import ExactMatrix, FieldSpec


def trim(F: FieldSpec, a):
    a = list(a)
    while a and F.is_zero(a[-1]):
        a.pop()
    return a


def padd(F, a, b):
    n = max(len(a), len(b))
    z = F.zero
    return trim(F, [F.add(a[i] if i < len(a) else z, b[i] if i < len(b) else z) for i in range(n)])


def psub(F, a, b):
    n = max(len(a), len(b))
    z = F.zero
    return trim(F, [F.sub(a[i] if i < len(a) else z, b[i] if i < len(b) else z) for i in range(n)])


def pmul(F, a, b):
    if not a or not b:
        return []
    out = [F.zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if F.is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = F.add(out[i + j], F.mul(x, y))
    return trim(F, out)


def pdivmod(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db = len(b) - 1
    inv = F.inv(b[-1])
    q = [F.zero] * max(len(a) - db, 0)
    for i in range(len(a) - 1, db - 1, -1):
        c = F.mul(a[i], inv)
        if F.is_zero(c):
            continue
        q[i - db] = c
        for j in range(db + 1):
            a[i - db + j] = F.sub(a[i - db + j], F.mul(c, b[j]))
    return trim(F, q), trim(F, a[:db])


def pmod(F, a, b):
    return pdivmod(F, a, b)[1]


def monic(F, a):
    if not a:
        return a
    inv = F.inv(a[-1])
    return [F.mul(inv, x) for x in a]


def pgcd(F, a, b):
    a, b = trim(F, a), trim(F, b)
    while b:
        a, b = b, pmod(F, a, b)
    return monic(F, a)


def pderiv(F, a):
    return trim(F, [F.mul(F.from_int(i), a[i]) for i in range(1, len(a))])


def ppowmod(F, base, e, mod):
    result = [F.one]
    base = pmod(F, base, mod)
    while e:
        if e & 1:
            result = pmod(F, pmul(F, result, base), mod)
        base = pmod(F, pmul(F, base, base), mod)
        e >>= 1
    return result


def evaluate_at_matrix(F: FieldSpec, poly, A: ExactMatrix) -> ExactMatrix:
    """Horner evaluation of ``poly`` at the square matrix ``A``."""
    n = A.rows
    result = ExactMatrix.zeros(F, n, n)
    eye = ExactMatrix.identity(F, n)
    for c in reversed(poly):
        result = result @ A + eye.scale(c)
    return result


def charpoly(A: ExactMatrix):
    """Characteristic polynomial det(xI - A) via reduction to Hessenberg form."""
    F = A.field
    n = A.rows
    H = [list(r) for r in A.entries]
    for m in range(1, n - 1):
        piv = next((i for i in range(m, n) if not F.is_zero(H[i][m - 1])), None)
        if piv is None:
            continue
        if piv != m:
            H[piv], H[m] = H[m], H[piv]
            for row in H:
                row[piv], row[m] = row[m], row[piv]
        t_inv = F.inv(H[m][m - 1])
        for i in range(m + 1, n):
            u = F.mul(H[i][m - 1], t_inv)
            if F.is_zero(u):
                continue
            Hi, Hm = H[i], H[m]
            for j in range(n):
                if not F.is_zero(Hm[j]):
                    Hi[j] = F.sub(Hi[j], F.mul(u, Hm[j]))
            for row in H:
                if not F.is_zero(row[i]):
                    row[m] = F.add(row[m], F.mul(u, row[i]))
    polys = [[F.one]]
    for m in range(1, n + 1):
        p = pmul(F, [F.neg(H[m - 1][m - 1]), F.one], polys[m - 1])
        prod = F.one
        for i in range(m - 1, 0, -1):
            prod = F.mul(prod, H[i][i - 1])
            if F.is_zero(prod):
                break
            coef = F.mul(H[i - 1][m - 1], prod)
            if not F.is_zero(coef):
                p = psub(F, p, [F.mul(coef, c) for c in polys[i - 1]])
        polys.append(p)
    return polys[n]


# ---------------------------------------------------------------------------
# factorisation into distinct irreducibles
# ---------------------------------------------------------------------------

def _pth_root(F, f):
    """f = h(x^p) with coefficients c -> h^(1/p); Frobenius is bijective on finite fields."""
    p = F.characteristic
    e = F.order // p
    return trim(F, [F.pow(f[i], e) for i in range(0, len(f), p)])


def _ddf(F, f):
    q = F.order
    x = [F.zero, F.one]
    h = x
    out = []
    d = 1
    while len(f) - 1 >= 2 * d:
        h = ppowmod(F, h, q, f)
        g = pgcd(F, f, psub(F, h, x))
        if len(g) > 1:
            out.append((g, d))
            f = pdivmod(F, f, g)[0]
            h = pmod(F, h, f)
        d += 1
    if len(f) > 1:
        out.append((monic(F, f), len(f) - 1))
    return out


def _edf(F, f, d, rng):
    n = len(f) - 1
    if n == d:
        return [monic(F, f)]
    q = F.order
    while True:
        a = trim(F, [F.random_element(rng) for _ in range(n)])
        if len(a) < 2:
            continue
        if q % 2:
            b = ppowmod(F, a, (q**d - 1) // 2, f)
            b = psub(F, b, [F.one])
        else:
            k = (q.bit_length() - 1) * d
            b, t = a, a
            for _ in range(k - 1):
                t = pmod(F, pmul(F, t, t), f)
                b = padd(F, b, t)
        g = pgcd(F, f, b)
        if 0 < len(g) - 1 < n:
            return _edf(F, g, d, rng) + _edf(F, pdivmod(F, f, g)[0], d, rng)


def _finite_factors(F, f, rng):
    f = monic(F, f)
    if len(f) <= 1:
        return []
    df = pderiv(F, f)
    if not df:
        return _finite_factors(F, _pth_root(F, f), rng)
    g = pgcd(F, f, df)
    sqf = monic(F, pdivmod(F, f, g)[0])
    out = []
    for part, d in _ddf(F, sqf):
        out.extend(_edf(F, part, d, rng))
    return out + _finite_factors(F, g, rng)


def _key(F, f):
    enc = F.encode
    return (len(f), [str(enc(c)) for c in f])


def distinct_irreducible_factors(F: FieldSpec, f, seed: int = 0) -> list:
    """Distinct monic irreducible factors of ``f`` in a canonical order (degree, then coefficients)."""
    f = trim(F, f)
    if len(f) <= 1:
        return []
    if F.kind == "Q":
        x = sympy.Symbol("x")
        expr = sum(sympy.Rational(int(c.numerator), int(c.denominator)) * x**i for i, c in enumerate(f))
        _, facs = sympy.factor_list(sympy.Poly(expr, x, domain="QQ"))
        found = []
        for fac, _mult in facs:
            coeffs = [mpq(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1])) for c in reversed(fac.all_coeffs())]
            found.append(monic(F, coeffs))
    else:
        found = _finite_factors(F, f, random.Random(seed))
    uniq = {tuple(str(F.encode(c)) for c in g): g for g in found}
    return sorted(uniq.values(), key=lambda g: _key(F, g))
