"""Krull-Schmidt splitting of a module through its endomorphism algebra.

A *piece* is a summand of the input, described by a basis (columns, in the
coordinates of the input), the nilpotent parts of the generators in that
basis, and a spanning set of its endomorphism algebra.  Pieces are split by
primary decomposition of the action of algebra elements (Fitting's lemma);
a piece is declared indecomposable only with a certificate that its
endomorphism algebra is local.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import DecompositionError
from .exactfield import ExactMatrix, FieldSpec, kernel_from_rref, rref_sparse
from .poly import charpoly, distinct_irreducible_factors, evaluate_at_matrix, pderiv, pdivmod

RANDOM_TRIALS = 24
MAX_RESIDUE_ENUMERATION = 1 << 14


@dataclass
class Piece:
    basis: ExactMatrix
    gens: list
    alg: list

    @property
    def dim(self) -> int:
        return self.basis.cols


def intertwiner_rows(F: FieldSpec, src_gens, dst_gens, r: int, s: int):
    """Sparse equations for Z (s x r) with Z X_i = Y_i Z; unknown Z[u][v] has index u*r + v."""
    rows = []
    for X, Y in zip(src_gens, dst_gens):
        xcols = [dict() for _ in range(r)]
        for v, row in enumerate(X.entries):
            for w, x in enumerate(row):
                if not F.is_zero(x):
                    xcols[w][v] = x
        yrows = Y.sparse_rows()
        for u in range(s):
            yu = yrows[u]
            for w in range(r):
                eq = {}
                for v, x in xcols[w].items():
                    eq[u * r + v] = x
                for t, y in yu.items():
                    k = t * r + w
                    val = F.sub(eq.get(k, F.zero), y)
                    if F.is_zero(val):
                        eq.pop(k, None)
                    else:
                        eq[k] = val
                if eq:
                    rows.append(eq)
    return rows


def intertwiners(F: FieldSpec, src_gens, dst_gens, r: int, s: int) -> list[ExactMatrix]:
    """Basis of {Z : Z X_i = Y_i Z} as s x r matrices (reduced-echelon order)."""
    if r == 0 or s == 0:
        return []
    piv = rref_sparse(F, intertwiner_rows(F, src_gens, dst_gens, r, s))
    return [ExactMatrix.unflatten(F, v, s, r) for v in kernel_from_rref(F, piv, r * s)]


def span_basis(F: FieldSpec, mats, rows: int, cols: int) -> list[ExactMatrix]:
    piv = rref_sparse(F, (m.flatten() for m in mats))
    return [ExactMatrix.unflatten(F, piv[c], rows, cols) for c in sorted(piv)]


def is_nilpotent(A: ExactMatrix) -> bool:
    n = A.rows
    if n == 0:
        return True
    P = A
    e = 1
    while e < n:
        P = P @ P
        e *= 2
        if P.is_zero():
            return True
    return P.is_zero()


def _linear_root(F, f):
    """Root of a monic linear polynomial."""
    return F.neg(f[0])


def _multiplicity(F, chi, f) -> int:
    e = 0
    while True:
        q, r = pdivmod(F, chi, f)
        if r:
            return e
        chi, e = q, e + 1


def _primary_components(F, a: ExactMatrix, chi, factors):
    comps = []
    for f in factors:
        T = evaluate_at_matrix(F, f, a).power(_multiplicity(F, chi, f))
        piv = rref_sparse(F, T.sparse_rows())
        comps.append(kernel_from_rref(F, piv, a.rows))
    return comps


def split_piece(F: FieldSpec, piece: Piece, comps) -> list[Piece]:
    """Split a piece along a direct-sum decomposition given by sparse column bases."""
    k = piece.dim
    cols = [c for comp in comps for c in comp]
    P = ExactMatrix.from_sparse_columns(F, k, cols)
    Pinv = P.inverse()
    bounds, start = [], 0
    for comp in comps:
        bounds.append((start, start + len(comp)))
        start += len(comp)
    conj_gens = [Pinv @ X @ P for X in piece.gens]
    new_basis = piece.basis @ P
    out = []
    for lo, hi in bounds:
        basis = new_basis.submatrix(0, new_basis.rows, lo, hi)
        gens = [X.submatrix(lo, hi, lo, hi) for X in conj_gens]
        # End(summand) is small; recomputing it beats compressing the parent algebra
        alg = intertwiners(F, gens, gens, hi - lo, hi - lo)
        out.append(Piece(basis, gens, alg))
    return out


def _combo(F, mats, coeffs, k):
    acc = ExactMatrix.zeros(F, k, k)
    for c, m in zip(coeffs, mats):
        if not F.is_zero(c):
            acc = acc + m.scale(c)
    return acc


def _annihilator_elements(F, alg, j, k):
    """Basis of {x in span(alg) : x e_j = 0}."""
    d = len(alg)
    rows = []
    for i in range(k):
        rows.append({l: alg[l].entries[i][j] for l in range(d) if not F.is_zero(alg[l].entries[i][j])})
    piv = rref_sparse(F, rows)
    out = []
    for v in kernel_from_rref(F, piv, d):
        out.append(_combo(F, [alg[l] for l in v], [v[l] for l in v], k))
    return out


def _in_span(F, piv, vec) -> bool:
    v = dict(vec)
    for c in sorted(piv):
        x = v.get(c)
        if x is not None:
            F.axpy(v, F.neg(x), piv[c])
    return not v


def _nil_ideal_is_nilpotent(F, J, k) -> bool:
    """J^n = 0 for some n, tested through the chain M > J M > J^2 M > ..."""
    W = [{i: F.one} for i in range(k)]
    for _ in range(k + 1):
        imgs = []
        for x in J:
            rows = x.sparse_rows()
            for w in W:
                out = {}
                for i, r in enumerate(rows):
                    acc = F.zero
                    for t, a in r.items():
                        b = w.get(t)
                        if b is not None:
                            acc = F.add(acc, F.mul(a, b))
                    if not F.is_zero(acc):
                        out[i] = acc
                if out:
                    imgs.append(out)
        piv = rref_sparse(F, imgs)
        if not piv:
            return True
        if len(piv) == len(W):
            return False
        W = [piv[c] for c in sorted(piv)]
    return False


def _semisimple_part(F, a: ExactMatrix, f):
    """Jordan-Chevalley semisimple part of a, when its characteristic polynomial is a power of f."""
    df = pderiv(F, f)
    s = a
    for _ in range(a.rows.bit_length() + 2):
        fs = evaluate_at_matrix(F, f, s)
        if fs.is_zero():
            return s
        s = s - evaluate_at_matrix(F, df, s).inverse() @ fs
    if not evaluate_at_matrix(F, f, s).is_zero():  # pragma: no cover
        raise DecompositionError("Newton iteration for the semisimple part did not converge")
    return s


def _certify_local(F: FieldSpec, piece: Piece, residue) -> bool:
    """Check that End(piece) is local, given per-basis-element single irreducible factors."""
    k = piece.dim
    alg = piece.alg
    d = len(alg)
    deg = max(len(f) - 1 for f in residue)
    eye = ExactMatrix.identity(F, k)
    if deg == 1:
        J = [b - eye.scale(_linear_root(F, f)) for b, f in zip(alg, residue)]
    else:
        if not F.is_finite:
            return _certify_local_trace(F, piece, residue, deg)
        if F.order**deg > MAX_RESIDUE_ENUMERATION:
            return False
        idx = next(i for i, f in enumerate(residue) if len(f) - 1 == deg)
        s = _semisimple_part(F, alg[idx], residue[idx])
        powers = [eye]
        for _ in range(deg - 1):
            powers.append(powers[-1] @ s)
        field_elems = _enumerate_span(F, powers, k)
        J = []
        for b in alg:
            for x in field_elems:
                if is_nilpotent(b - x):
                    J.append(b - x)
                    break
            else:
                return False
    jb = span_basis(F, J, k, k)
    if len(jb) != d - deg:
        return False
    piv = rref_sparse(F, (x.flatten() for x in jb))
    for x in jb:
        for b in alg:
            if not _in_span(F, piv, (b @ x).flatten()) or not _in_span(F, piv, (x @ b).flatten()):
                return False
    return _nil_ideal_is_nilpotent(F, jb, k)


def _enumerate_span(F, basis, k):
    import itertools
    out = []
    for coeffs in itertools.product(list(F.elements()), repeat=len(basis)):
        out.append(_combo(F, basis, coeffs, k))
    return out


def _certify_local_trace(F, piece, residue, deg) -> bool:
    """Characteristic 0: the radical is the kernel of the trace form; local iff E/rad has dim = deg."""
    alg = piece.alg
    d = len(alg)
    flat = [a.flatten() for a in alg]
    flatT = [a.T.flatten() for a in alg]
    rows = []
    for i in range(d):
        row = {}
        for j in range(d):
            acc = F.zero
            fi, fj = flat[i], flatT[j]
            for key, x in fi.items():
                y = fj.get(key)
                if y is not None:
                    acc = F.add(acc, F.mul(x, y))
            if not F.is_zero(acc):
                row[j] = acc
        rows.append(row)
    rad_dim = d - len(rref_sparse(F, rows))
    return d - rad_dim == deg


def _try_split(F, piece, a, seed):
    chi = charpoly(a)
    factors = distinct_irreducible_factors(F, chi, seed)
    if len(factors) >= 2:
        return split_piece(F, piece, _primary_components(F, a, chi, factors)), factors
    return None, factors


def decompose_piece(F: FieldSpec, piece: Piece, rng: random.Random) -> list[Piece]:
    """Fully decompose a piece into indecomposable pieces (deterministic given rng state)."""
    k = piece.dim
    if k <= 1:
        return [piece] if k == 1 else []
    alg = piece.alg
    seed = rng.randrange(1 << 30)
    # one generic element first: splits most decomposable pieces at once
    for _ in range(2):
        a = _combo(F, alg, [F.random_element(rng, 7) for _ in alg], k)
        parts, _ = _try_split(F, piece, a, seed)
        if parts:
            return [q for p in parts for q in decompose_piece(F, p, rng)]
    residue = []
    for b in alg:
        parts, factors = _try_split(F, piece, b, seed)
        if parts:
            return [q for p in parts for q in decompose_piece(F, p, rng)]
        residue.append(factors[0] if factors else [F.zero, F.one])
    if _certify_local(F, piece, residue):
        return [piece]
    candidates = []
    for j in range(k):
        candidates.extend(_annihilator_elements(F, alg, j, k))
    for a in candidates:
        parts, _ = _try_split(F, piece, a, seed)
        if parts:
            return [q for p in parts for q in decompose_piece(F, p, rng)]
    for _ in range(RANDOM_TRIALS):
        pool = candidates or alg
        a = _combo(F, pool, [F.random_element(rng, 7) for _ in pool], k)
        b = _combo(F, alg, [F.random_element(rng, 7) for _ in alg], k)
        for c in (a, a @ b, b @ a):
            parts, _ = _try_split(F, piece, c, seed)
            if parts:
                return [q for p in parts for q in decompose_piece(F, p, rng)]
    raise DecompositionError(
        f"could not split a rank-{k} summand nor certify its endomorphism algebra (dim {len(alg)}) as local"
    )
