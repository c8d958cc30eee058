"""Unipotent modules as tuples of commuting nilpotent or unipotent matrices.

Objects are tuples ``(X_1, ..., X_g)`` of pairwise commuting ``r x r``
matrices; a morphism from ``(X_i)`` to ``(Y_i)`` is a matrix ``Z`` with
``Z X_i = Y_i Z``.

Two flavors are supported:

``additive``
    the ``X_i`` are nilpotent (modules over a vector group).  Tensor
    products use the primitive rule ``X (x) 1 + 1 (x) Y`` and duals ``-X^T``.
``unipotent``
    characteristic ``p > 0``; the ``X_i`` are unipotent (modules over
    ``Z_p^g``).  Tensor products use ``X (x) Y`` and duals ``(X^-1)^T``.

Kronecker products are taken with the left factor major.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Sequence

from .errors import DecompositionError, InputError, UnsupportedRegimeError
from .exactfield import ExactMatrix, FieldSpec, field_from_json, rref_sparse
from .krull import Piece, decompose_piece, intertwiners, is_nilpotent

ADDITIVE = "additive"
UNIPOTENT = "unipotent"
FLAVORS = (ADDITIVE, UNIPOTENT)


@dataclass(frozen=True, eq=False)
class NilModule:
    field: FieldSpec
    flavor: str
    g: int
    rank: int
    mats: tuple

    def __post_init__(self):
        if self.flavor not in FLAVORS:
            raise InputError(f"unknown flavor {self.flavor!r}")
        if self.g < 1:
            raise InputError(f"number of generators must be >= 1, got {self.g}")
        if self.rank < 0:
            raise InputError(f"rank must be >= 0, got {self.rank}")
        if len(self.mats) != self.g:
            raise InputError(f"expected {self.g} generator matrices, got {len(self.mats)}")
        for i, X in enumerate(self.mats):
            if not isinstance(X, ExactMatrix) or X.rows != self.rank or X.cols != self.rank:
                raise InputError(f"generator {i + 1} is not a {self.rank}x{self.rank} matrix")
            if X.field != self.field:
                raise InputError(f"generator {i + 1} has entries in {X.field!r}, module field is {self.field!r}")
        if self.flavor == UNIPOTENT and self.field.characteristic == 0:
            raise InputError("unipotent flavor needs a field of positive characteristic")

    # constructors -------------------------------------------------------
    @classmethod
    def from_nil_parts(cls, field, flavor, g, nil_parts) -> "NilModule":
        nil_parts = list(nil_parts)
        r = nil_parts[0].rows if nil_parts else 0
        if flavor == UNIPOTENT:
            eye = ExactMatrix.identity(field, r)
            mats = tuple(N + eye for N in nil_parts)
        else:
            mats = tuple(nil_parts)
        return cls(field, flavor, g, r, mats)

    @classmethod
    def trivial(cls, field: FieldSpec, g: int = 1, rank: int = 1, flavor: str = ADDITIVE) -> "NilModule":
        zero = ExactMatrix.zeros(field, rank, rank)
        return cls.from_nil_parts(field, flavor, g, [zero] * g) if rank else cls(
            field, flavor, g, 0, tuple(ExactMatrix.zeros(field, 0, 0) for _ in range(g)))

    @classmethod
    def jordan(cls, field: FieldSpec, n: int, g: int = 1, flavor: str = ADDITIVE, generator: int = 0) -> "NilModule":
        """Single Jordan block of size n for one generator, the others acting trivially."""
        J = ExactMatrix.from_rows(field, [[1 if j == i + 1 else 0 for j in range(n)] for i in range(n)], n)
        zero = ExactMatrix.zeros(field, n, n)
        return cls.from_nil_parts(field, flavor, g, [J if i == generator else zero for i in range(g)])

    # derived data -------------------------------------------------------
    @cached_property
    def nil_parts(self) -> tuple:
        if self.flavor == ADDITIVE:
            return self.mats
        eye = ExactMatrix.identity(self.field, self.rank)
        return tuple(X - eye for X in self.mats)

    def conjugate(self, P: ExactMatrix) -> "NilModule":
        """The module in the basis given by the columns of P (generators P^-1 X P)."""
        Pinv = P.inverse()
        return NilModule(self.field, self.flavor, self.g, self.rank, tuple(Pinv @ X @ P for X in self.mats))

    def _check_compatible(self, other: "NilModule", op: str):
        if self.field != other.field or self.flavor != other.flavor or self.g != other.g:
            raise InputError(
                f"{op}: modules differ in field/flavor/g "
                f"({self.field!r}, {self.flavor}, g={self.g}) vs ({other.field!r}, {other.flavor}, g={other.g})")

    # serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "field": self.field.to_json(),
            "flavor": self.flavor,
            "g": self.g,
            "rank": self.rank,
            "mats": [X.to_json() for X in self.mats],
        }

    @classmethod
    def from_json(cls, obj) -> "NilModule":
        if not isinstance(obj, dict):
            raise InputError("module must be a JSON object")
        missing = {"field", "flavor", "g", "rank", "mats"} - set(obj)
        if missing:
            raise InputError(f"module is missing keys {sorted(missing)}")
        field = field_from_json(obj["field"])
        g, r = obj["g"], obj["rank"]
        if not isinstance(g, int) or not isinstance(r, int):
            raise InputError("'g' and 'rank' must be integers")
        if not isinstance(obj["mats"], list):
            raise InputError("'mats' must be a list of matrices")
        mats = tuple(
            ExactMatrix.from_json(field, m, r, r) if r else ExactMatrix.zeros(field, 0, 0) for m in obj["mats"])
        return cls(field, obj["flavor"], g, r, mats)

    def __eq__(self, other):
        return (isinstance(other, NilModule) and self.field == other.field and self.flavor == other.flavor
                and self.g == other.g and self.rank == other.rank and self.mats == other.mats)

    def __hash__(self):
        return hash((self.flavor, self.g, self.rank, self.mats))

    def __repr__(self):
        return f"NilModule({self.field!r}, {self.flavor}, g={self.g}, rank={self.rank})"


@dataclass(frozen=True)
class DecompositionReport:
    summands: tuple  # ((NilModule, multiplicity), ...)
    basechange: ExactMatrix

    def modules(self) -> list[NilModule]:
        return [m for m, k in self.summands for _ in range(k)]

    def to_json(self) -> dict:
        return {
            "summands": [{"module": m.to_json(), "multiplicity": k} for m, k in self.summands],
            "basechange": self.basechange.to_json(),
        }

    @classmethod
    def from_json(cls, obj) -> "DecompositionReport":
        summands = tuple((NilModule.from_json(s["module"]), int(s["multiplicity"])) for s in obj["summands"])
        if summands:
            F = summands[0][0].field
        else:
            raise InputError("a decomposition report needs at least one summand to fix the field")
        n = sum(m.rank * k for m, k in summands)
        return cls(summands, ExactMatrix.from_json(F, obj["basechange"], n, n) if n else ExactMatrix.zeros(F, 0, 0))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def validate(m: NilModule) -> list[str]:
    """Violated commutation / nilpotence / unipotence conditions; empty when valid."""
    if m.flavor == UNIPOTENT and m.field.characteristic == 0:  # pragma: no cover - rejected at construction
        raise InputError("unipotent flavor needs positive characteristic")
    problems = []
    for i in range(m.g):
        for j in range(i + 1, m.g):
            if m.mats[i] @ m.mats[j] != m.mats[j] @ m.mats[i]:
                problems.append(f"generators {i + 1} and {j + 1} do not commute")
    for i, N in enumerate(m.nil_parts):
        if not is_nilpotent(N):
            what = "nilpotent" if m.flavor == ADDITIVE else "unipotent"
            problems.append(f"generator {i + 1} is not {what}")
    return problems


def require_valid(m: NilModule) -> NilModule:
    problems = validate(m)
    if problems:
        raise InputError("invalid module: " + "; ".join(problems))
    return m


def direct_sum(a: NilModule, b: NilModule) -> NilModule:
    a._check_compatible(b, "direct_sum")
    F = a.field
    return NilModule(F, a.flavor, a.g, a.rank + b.rank,
                     tuple(ExactMatrix.block_diag(F, [X, Y]) for X, Y in zip(a.mats, b.mats)))


def direct_sum_all(mods: Sequence[NilModule]) -> NilModule:
    out = mods[0]
    for m in mods[1:]:
        out = direct_sum(out, m)
    return out


def tensor(a: NilModule, b: NilModule) -> NilModule:
    a._check_compatible(b, "tensor")
    F = a.field
    if a.flavor == ADDITIVE:
        Ia, Ib = ExactMatrix.identity(F, a.rank), ExactMatrix.identity(F, b.rank)
        mats = tuple(X.kron(Ib) + Ia.kron(Y) for X, Y in zip(a.mats, b.mats))
    else:
        mats = tuple(X.kron(Y) for X, Y in zip(a.mats, b.mats))
    return NilModule(F, a.flavor, a.g, a.rank * b.rank, mats)


def dual(a: NilModule) -> NilModule:
    if a.flavor == ADDITIVE:
        mats = tuple((-X).T for X in a.mats)
    else:
        mats = tuple(X.inverse().T for X in a.mats) if a.rank else a.mats
    return NilModule(a.field, a.flavor, a.g, a.rank, mats)


def hom_module(a: NilModule, b: NilModule) -> NilModule:
    """Internal Hom(a, b) = dual(a) (x) b."""
    a._check_compatible(b, "hom_module")
    return tensor(dual(a), b)


def hom_basis(a: NilModule, b: NilModule) -> list[ExactMatrix]:
    """Basis of the intertwiners Z (rank(b) x rank(a)) with Z X_i = Y_i Z."""
    a._check_compatible(b, "hom")
    return intertwiners(a.field, a.nil_parts, b.nil_parts, a.rank, b.rank)


def hom_dim(a: NilModule, b: NilModule) -> int:
    a._check_compatible(b, "hom_dim")
    if a.rank == 0 or b.rank == 0:
        return 0
    from .krull import intertwiner_rows
    n = a.rank * b.rank
    return n - len(rref_sparse(a.field, intertwiner_rows(a.field, a.nil_parts, b.nil_parts, a.rank, b.rank)))


def end_algebra(m: NilModule) -> list[ExactMatrix]:
    return hom_basis(m, m)


def radical_series(m: NilModule) -> list[int]:
    """Dimensions of rad^k M = (sum of generator nil parts)^k M for k = 0, 1, ... until 0."""
    F = m.field
    if m.rank == 0:
        return [0]
    W = [{i: F.one} for i in range(m.rank)]
    dims = [m.rank]
    rows_of = [N.sparse_rows() for N in m.nil_parts]
    while W:
        imgs = []
        for rows in rows_of:
            for w in W:
                out = {}
                for i, r in enumerate(rows):
                    acc = F.zero
                    for t, x in r.items():
                        y = w.get(t)
                        if y is not None:
                            acc = F.add(acc, F.mul(x, y))
                    if not F.is_zero(acc):
                        out[i] = acc
                if out:
                    imgs.append(out)
        piv = rref_sparse(F, imgs)
        W = [piv[c] for c in sorted(piv)]
        dims.append(len(W))
    return dims


def loewy_length(m: NilModule) -> int:
    """Nilpotency index of the ideal generated by the nil parts (0 for the zero module)."""
    return len(radical_series(m)) - 1


def socle_dim(m: NilModule) -> int:
    """Dimension of the common kernel of the nil parts (= hom from the trivial rank-1 module)."""
    return hom_dim(NilModule.trivial(m.field, m.g, 1, m.flavor), m) if m.rank else 0


def power_order(m: NilModule) -> int:
    """Least n with X_i^(p^n) = I for every generator."""
    if m.flavor != UNIPOTENT:
        raise UnsupportedRegimeError("power_order is defined for the unipotent flavor only")
    p = m.field.characteristic
    n = 0
    cur = list(m.mats)
    while not all(X.is_identity() for X in cur):
        cur = [X.power(p) for X in cur]
        n += 1
        if n > m.rank + 1:  # pragma: no cover - impossible for valid input
            raise InputError("generators are not unipotent")
    return n


def ext_dims(a: NilModule, b: NilModule, max_degree: int) -> list[int]:
    """dim Ext^i(a, b), i = 0..max_degree, via the Koszul complex of Hom(a, b)."""
    a._check_compatible(b, "ext_dims")
    if a.flavor != ADDITIVE or a.field.characteristic != 0:
        raise UnsupportedRegimeError("Ext unsupported in characteristic p")
    if max_degree < 0:
        raise InputError("max_degree must be >= 0")
    M = hom_module(a, b)
    return koszul_cohomology(M, max_degree)


def koszul_cohomology(M: NilModule, max_degree: int) -> list[int]:
    F = M.field
    g, r = M.g, M.rank
    from itertools import combinations
    subsets = [list(combinations(range(g), j)) for j in range(g + 1)]
    index = [{S: n for n, S in enumerate(sub)} for sub in subsets]
    gen_cols = []
    for Z in M.nil_parts:
        cols = [dict() for _ in range(r)]
        for u, row in enumerate(Z.entries):
            for v, x in enumerate(row):
                if not F.is_zero(x):
                    cols[v][u] = x
        gen_cols.append(cols)
    ranks = []
    for j in range(g):
        # columns of d_j : C^j -> C^{j+1}, fed to elimination as rows of the transpose
        cols = []
        for S in subsets[j]:
            for v in range(r):
                col = {}
                for i in range(g):
                    if i in S:
                        continue
                    T = tuple(sorted(S + (i,)))
                    sign = -1 if sum(1 for s in S if s < i) % 2 else 1
                    base = index[j + 1][T] * r
                    for u, x in gen_cols[i][v].items():
                        val = x if sign > 0 else F.neg(x)
                        k = base + u
                        nv = F.add(col.get(k, F.zero), val)
                        if F.is_zero(nv):
                            col.pop(k, None)
                        else:
                            col[k] = nv
                cols.append(col)
        ranks.append(len(rref_sparse(F, cols)))
    dims = []
    for j in range(max_degree + 1):
        if j > g:
            dims.append(0)
            continue
        c = r * comb(g, j)
        out_rank = ranks[j] if j < g else 0
        in_rank = ranks[j - 1] if j > 0 else 0
        dims.append(c - out_rank - in_rank)
    return dims


# ---------------------------------------------------------------------------
# Krull-Schmidt
# ---------------------------------------------------------------------------

def _sort_key(m: NilModule):
    series = radical_series(m)
    return (m.rank, len(series) - 1, tuple(series))


def _indecomposables_isomorphic(u: NilModule, v: NilModule):
    """Iso test for indecomposables: some g o f in Hom(v,u)Hom(u,v) lies outside the radical."""
    if u.rank != v.rank or _sort_key(u) != _sort_key(v):
        return None
    fs = hom_basis(u, v)
    gs = hom_basis(v, u)
    for f in fs:
        for g in gs:
            if not is_nilpotent(g @ f):
                return f
    return None


def decompose(m: NilModule, seed: int = 0) -> DecompositionReport:
    """Krull-Schmidt decomposition through the endomorphism algebra."""
    require_valid(m)
    F = m.field
    if m.rank == 0:
        return DecompositionReport((), ExactMatrix.zeros(F, 0, 0))
    rng = random.Random(seed)
    root = Piece(ExactMatrix.identity(F, m.rank), list(m.nil_parts), end_algebra(m))
    pieces = decompose_piece(F, root, rng)
    mods = [NilModule.from_nil_parts(F, m.flavor, m.g, p.gens) for p in pieces]
    order = sorted(range(len(pieces)), key=lambda i: _sort_key(mods[i]))
    classes = []  # [representative index, [(piece index, iso rep -> copy)]]
    for i in order:
        for cls in classes:
            if _sort_key(mods[cls[0]]) != _sort_key(mods[i]):
                continue
            f = _indecomposables_isomorphic(mods[cls[0]], mods[i])
            if f is not None:
                cls[1].append((i, f))
                break
        else:
            classes.append([i, [(i, ExactMatrix.identity(F, mods[i].rank))]])
    cols = []
    summands = []
    for rep, copies in classes:
        summands.append((mods[rep], len(copies)))
        for i, f in copies:
            # copy basis composed with the iso rep -> copy, so the block equals the representative
            B = pieces[i].basis @ f
            cols.extend(B.column(j) for j in range(B.cols))
    P = ExactMatrix(F, m.rank, m.rank, tuple(zip(*cols)))
    return DecompositionReport(tuple(summands), P)


def same_isomorphism_classes(r1: DecompositionReport, r2: DecompositionReport) -> bool:
    """Multisets of isomorphism classes agree (summands are indecomposable)."""
    left = list(r1.summands)
    right = list(r2.summands)
    if len(left) != len(right):
        return False
    used = [False] * len(right)
    for u, k in left:
        for j, (v, l) in enumerate(right):
            if not used[j] and k == l and _indecomposables_isomorphic(u, v) is not None:
                used[j] = True
                break
        else:
            return False
    return True


def is_isomorphic(a: NilModule, b: NilModule, seed: int = 0):
    """``(True, W)`` with W a = b W invertible when a and b are isomorphic, else ``(False, None)``."""
    a._check_compatible(b, "is_isomorphic")
    F = a.field
    if a.rank != b.rank:
        return False, None
    if a == b:
        return True, ExactMatrix.identity(F, a.rank)
    if a.rank == 0:
        return True, ExactMatrix.zeros(F, 0, 0)
    if radical_series(a) != radical_series(b) or hom_dim(a, a) != hom_dim(b, b):
        return False, None
    ra, rb = decompose(a, seed), decompose(b, seed)
    # blocks of a in basechange order
    blocks_b = []
    start = 0
    for v, l in rb.summands:
        for _ in range(l):
            blocks_b.append([v, start, False])
            start += v.rank
    Q_cols = []
    for u, k in ra.summands:
        for _ in range(k):
            for blk in blocks_b:
                if blk[2]:
                    continue
                f = _indecomposables_isomorphic(u, blk[0])
                if f is not None:
                    blk[2] = True
                    Pb = rb.basechange.submatrix(0, b.rank, blk[1], blk[1] + blk[0].rank)
                    C = Pb @ f
                    Q_cols.extend(C.column(j) for j in range(C.cols))
                    break
            else:
                return False, None
    Q = ExactMatrix(F, a.rank, a.rank, tuple(zip(*Q_cols)))
    W = Q @ ra.basechange.inverse()
    for X, Y in zip(a.mats, b.mats):
        if W @ X != Y @ W:  # pragma: no cover - internal consistency
            raise DecompositionError("constructed isomorphism does not intertwine")
    return True, W
