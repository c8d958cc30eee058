"""Seeded random instances used by the property and acceptance suites."""

from __future__ import annotations

import random
from math import gcd

from .exactfield import ExactMatrix, FieldSpec, rank
from .nilmod import ADDITIVE, NilModule, direct_sum_all


def random_matrix(F: FieldSpec, rng: random.Random, rows: int, cols: int, bound: int = 2) -> ExactMatrix:
    return ExactMatrix(F, rows, cols, tuple(
        tuple(F.random_element(rng, bound) for _ in range(cols)) for _ in range(rows)))


def random_invertible(F: FieldSpec, rng: random.Random, n: int, bound: int = 2) -> ExactMatrix:
    while True:
        P = random_matrix(F, rng, n, n, bound)
        if rank(P) == n:
            return P


def _polynomial_block(F, rng, g, t):
    N = ExactMatrix(F, t, t, tuple(
        tuple(F.random_element(rng, 2) if j > i else F.zero for j in range(t)) for i in range(t)))
    powers = [N]
    for _ in range(t - 2):
        powers.append(powers[-1] @ N)
    mats = []
    for _ in range(g):
        X = ExactMatrix.zeros(F, t, t)
        for P in powers:
            X = X + P.scale(F.random_element(rng, 2))
        mats.append(X)
    return mats


def _square_zero_block(F, rng, g, s1, s2):
    mats = []
    for _ in range(g):
        A = random_matrix(F, rng, s1, s2)
        rows = [[F.zero] * s1 + list(A.entries[i]) for i in range(s1)] + [[F.zero] * (s1 + s2) for _ in range(s2)]
        mats.append(ExactMatrix(F, s1 + s2, s1 + s2, tuple(tuple(r) for r in rows)))
    return mats


def random_module(F: FieldSpec, rng: random.Random, g: int, max_rank: int, flavor: str = ADDITIVE) -> NilModule:
    """Direct sum of random polynomial-in-one-nilpotent and square-zero blocks (some repeated)."""
    blocks = []
    total = 0
    while total < max_rank:
        room = max_rank - total
        kind = rng.random()
        if blocks and kind < 0.2 and blocks[-1][0].rows <= room:
            mats = blocks[-1]
        elif kind < 0.6 or room < 2:
            mats = _polynomial_block(F, rng, g, rng.randint(1, min(4, room)))
        else:
            s1 = rng.randint(1, min(2, room - 1))
            s2 = rng.randint(1, min(2, room - s1))
            mats = _square_zero_block(F, rng, g, s1, s2)
        blocks.append(mats)
        total += mats[0].rows
        if rng.random() < 0.3:
            break
    mods = [NilModule.from_nil_parts(F, flavor, g, mats) for mats in blocks]
    return direct_sum_all(mods)


def random_automorphism(rng: random.Random, n: int, k: int):
    """Integer matrix invertible mod n (rejection sampling on the determinant for k <= 2)."""
    while True:
        A = [[rng.randrange(n) for _ in range(k)] for _ in range(k)]
        if k == 1:
            det = A[0][0]
        elif k == 2:
            det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        else:
            raise ValueError("only k <= 2 supported")
        if gcd(det % n, n) == 1:
            return A


def random_bundle(ctx, rng: random.Random, max_summands: int = 3, max_rank: int = 3, points=None):
    """Random bundle over ``ctx``: module data in supported regimes, semisimple rank-only data elsewhere."""
    from .bundlecat import HomogBundle, RankOnly
    from .galois import CharacterPoint, orbit_of

    M = ctx.characters
    pts = list(points) if points is not None else list(M.points())
    pairs = []
    for _ in range(rng.randint(1, max_summands)):
        orbit = orbit_of(M, CharacterPoint(rng.choice(pts)))
        if ctx.flavor is not None:
            data = random_module(ctx.field, rng, ctx.g, rng.randint(1, max_rank), ctx.flavor)
        else:
            data = RankOnly(rng.randint(1, max_rank), True)
        pairs.append((orbit, data))
    return HomogBundle(ctx, tuple(pairs))


def random_isogeny(rng: random.Random, max_level: int = 60, p: int = 1, unipotent: bool = False):
    """Isogeny of elliptic curves seen on n-torsion (Z/n)^2 with dual map c0 + c1*G.

    G is a random automorphism generating the Galois image; the dual map commutes with G, so it is equivariant for the same action on
    both sides.  In positive characteristic the level is prime to p and a
    random etale unipotent factor is added when ``unipotent`` is set.
    """
    from .bundlecat import GroundContext
    from .galois import GaloisModule, GammaHom
    from .isogeny import IsogenyData

    n = rng.randint(2, max_level)
    while p > 1 and n % p == 0:
        n = rng.randint(2, max_level)
    G = random_automorphism(rng, n, 2)
    M = GaloisModule([n, n], [G], None if p == 1 else p)
    while True:
        c0, c1 = rng.randrange(n), rng.randrange(n)
        f = [[(c0 + c1 * G[i][j] if i == j else c1 * G[i][j]) % n for j in range(2)] for i in range(2)]
        h = GammaHom(f, M, M)
        if len(h.kernel) <= n:  # keep fibers small
            break
    ctx = GroundContext(1, p, 0, False, None, M)
    factors = (p ** rng.randint(1, 2),) if unipotent and p > 1 else ()
    return IsogenyData(ctx, ctx, f, len(h.kernel), factors, 1)
