"""Finite Galois modules: truncated character groups with a finite group action.

A :class:`GaloisModule` presents ``Z/n_1 x ... x Z/n_k`` with a finite group
generated by integer matrices acting on coordinate columns.  Homomorphisms
between two such modules (dual isogenies) are integer matrices; the
generators of both modules are paired by position, i.e. generator ``t`` of
the source and of the target are images of the same Galois element.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, reduce
from math import gcd
from typing import Sequence

from .errors import InputError

MAX_GROUP_ORDER = 10**5
MAX_ENUMERATION = 10**6


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _as_int_matrix(raw, rows: int, cols: int, what: str):
    if not isinstance(raw, (list, tuple)) or len(raw) != rows:
        raise InputError(f"{what} must have {rows} rows")
    out = []
    for r in raw:
        if not isinstance(r, (list, tuple)) or len(r) != cols:
            raise InputError(f"{what} must have {cols} columns")
        if any(isinstance(x, bool) or not isinstance(x, int) for x in r):
            raise InputError(f"{what} must have integer entries")
        out.append(tuple(r))
    return tuple(out)


class GaloisModule:
    """Z/n_1 x ... x Z/n_k with a finite group of automorphisms (closure cached at construction)."""

    def __init__(self, orders: Sequence[int], gamma: Sequence = (), p: int | None = None):
        orders = tuple(orders)
        if any(isinstance(n, bool) or not isinstance(n, int) or n < 1 for n in orders):
            raise InputError(f"cyclic orders must be positive integers, got {list(orders)}")
        self.orders = orders
        self.k = len(orders)
        self.p = p
        gens = []
        for t, A in enumerate(gamma):
            A = _as_int_matrix(A, self.k, self.k, f"Galois generator {t + 1}")
            gens.append(self._reduce_hom(A, self.orders, self.orders, f"Galois generator {t + 1}"))
        self.gamma = tuple(gens)
        for t, A in enumerate(self.gamma):
            self._check_automorphism(A, t)
        self.group = self._closure()

    # matrix helpers -------------------------------------------------------
    @staticmethod
    def _reduce_hom(A, src_orders, dst_orders, what):
        out = []
        for i, row in enumerate(A):
            new = []
            for j, a in enumerate(row):
                if (a * src_orders[j]) % dst_orders[i]:
                    raise InputError(
                        f"{what}: entry ({i + 1},{j + 1}) = {a} does not give a map Z/{src_orders[j]} -> Z/{dst_orders[i]}")
                new.append(a % dst_orders[i])
            out.append(tuple(new))
        return tuple(out)

    def _compose(self, A, B):
        """Matrix of A o B (both endomorphisms of this module)."""
        k, n = self.k, self.orders
        return tuple(tuple(sum(A[i][l] * B[l][j] for l in range(k)) % n[i] for j in range(k)) for i in range(k))

    @property
    def identity(self):
        return tuple(tuple(1 % self.orders[i] if i == j else 0 for j in range(self.k)) for i in range(self.k))

    def _check_automorphism(self, A, t):
        cur = A
        seen = {A}
        for _ in range(MAX_GROUP_ORDER):
            if cur == self.identity:
                return
            cur = self._compose(A, cur)
            if cur in seen:
                break
            seen.add(cur)
        raise InputError(f"Galois generator {t + 1} is not an automorphism (no power equals the identity)")

    def _closure(self):
        ident = self.identity
        group = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for g in frontier:
                for A in self.gamma:
                    h = self._compose(A, g)
                    if h not in group:
                        group.add(h)
                        nxt.append(h)
                        if len(group) > MAX_GROUP_ORDER:
                            raise InputError(f"generated group exceeds {MAX_GROUP_ORDER} elements")
            frontier = nxt
        return tuple(sorted(group))

    # points -----------------------------------------------------------------
    @property
    def size(self) -> int:
        return reduce(lambda a, b: a * b, self.orders, 1)

    @property
    def exponent(self) -> int:
        return reduce(_lcm, self.orders, 1)

    def check_point(self, coords) -> tuple:
        coords = tuple(coords)
        if len(coords) != self.k:
            raise InputError(f"point {list(coords)} has {len(coords)} coordinates, module has {self.k}")
        for c, n in zip(coords, self.orders):
            if isinstance(c, bool) or not isinstance(c, int) or not 0 <= c < n:
                raise InputError(f"coordinate {c!r} out of range for Z/{n}")
        return coords

    def points(self):
        if self.size > MAX_ENUMERATION:
            raise InputError(f"module of size {self.size} is too large to enumerate")
        return itertools.product(*(range(n) for n in self.orders))

    def act(self, A, x) -> tuple:
        return tuple(sum(a * c for a, c in zip(row, x)) % n for row, n in zip(A, self.orders))

    def add(self, x, y) -> tuple:
        return tuple((a + b) % n for a, b, n in zip(x, y, self.orders))

    def neg(self, x) -> tuple:
        return tuple(-a % n for a, n in zip(x, self.orders))

    def zero(self) -> tuple:
        return (0,) * self.k

    def point_order(self, x) -> int:
        return reduce(_lcm, (n // gcd(c, n) for c, n in zip(x, self.orders)), 1)

    def orbit_points(self, x) -> tuple:
        x = tuple(x)
        seen = {x}
        frontier = [x]
        while frontier:
            nxt = []
            for y in frontier:
                for A in self.gamma:
                    z = self.act(A, y)
                    if z not in seen:
                        seen.add(z)
                        nxt.append(z)
            frontier = nxt
        return tuple(sorted(seen))

    def stabilizer_size(self, x) -> int:
        return len(self.group) // len(self.orbit_points(x))

    # serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        return {"orders": list(self.orders), "gamma": [[list(r) for r in A] for A in self.gamma], "p": self.p}

    @classmethod
    def from_json(cls, obj) -> "GaloisModule":
        if not isinstance(obj, dict) or "orders" not in obj:
            raise InputError("Galois module must be an object with 'orders'")
        return cls(obj["orders"], obj.get("gamma", []), obj.get("p"))

    def __eq__(self, other):
        return isinstance(other, GaloisModule) and (self.orders, self.gamma, self.p) == (other.orders, other.gamma, other.p)

    def __hash__(self):
        return hash((self.orders, self.gamma))

    def __repr__(self):
        return f"GaloisModule(orders={list(self.orders)}, |gamma|={len(self.group)})"


@dataclass(frozen=True)
class CharacterPoint:
    coords: tuple
    q: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if isinstance(self.q, bool) or not isinstance(self.q, int) or self.q < 1:
            raise InputError(f"inseparable degree must be a positive integer, got {self.q!r}")

    def to_json(self) -> dict:
        return {"coords": list(self.coords), "q": self.q}

    @classmethod
    def from_json(cls, obj) -> "CharacterPoint":
        if not isinstance(obj, dict) or "coords" not in obj:
            raise InputError("character point must be an object with 'coords'")
        return cls(tuple(obj["coords"]), obj.get("q", 1))


@dataclass(frozen=True)
class CharacterOrbit:
    """A Galois orbit of characters; ``s`` is the separable and ``q`` the inseparable degree."""

    points: tuple
    q: int
    orders: tuple

    @property
    def s(self) -> int:
        return len(self.points)

    @property
    def degree(self) -> int:
        return self.s * self.q

    @property
    def rep(self) -> tuple:
        return self.points[0]

    def is_zero(self) -> bool:
        return self.points == ((0,) * len(self.orders),)

    def label(self) -> str:
        pts = ",".join("(" + ",".join(map(str, p)) + ")" for p in self.points)
        return "{" + pts + "}" + (f"^q{self.q}" if self.q > 1 else "")

    def to_json(self) -> dict:
        return {"points": [list(p) for p in self.points], "q": self.q}


def check_point_q(M: GaloisModule, x: CharacterPoint):
    M.check_point(x.coords)
    if M.p in (None, 0, 1) and x.q != 1:
        raise InputError("inseparable degree q must be 1 in characteristic 0")
    if M.p not in (None, 0, 1):
        q = x.q
        while q % M.p == 0:
            q //= M.p
        if q != 1:
            raise InputError(f"inseparable degree {x.q} is not a power of p = {M.p}")


def orbit_of(M: GaloisModule, x: CharacterPoint) -> CharacterOrbit:
    check_point_q(M, x)
    return CharacterOrbit(M.orbit_points(x.coords), x.q, M.orders)


def orbit_from_json(M: GaloisModule, obj) -> CharacterOrbit:
    """Parse an orbit given by its points (or a single representative) and close it under the group."""
    if not isinstance(obj, dict) or "points" not in obj or not obj["points"]:
        raise InputError("orbit must be an object with a nonempty 'points' list")
    q = obj.get("q", 1)
    orb = orbit_of(M, CharacterPoint(tuple(obj["points"][0]), q))
    given = tuple(sorted(tuple(M.check_point(p)) for p in obj["points"]))
    if len(given) > 1 and given != orb.points:
        raise InputError(f"listed points {list(map(list, given))} are not a Galois orbit")
    return orb


def all_orbits(M: GaloisModule) -> list[tuple]:
    seen = set()
    out = []
    for x in M.points():
        if x in seen:
            continue
        orb = M.orbit_points(x)
        seen.update(orb)
        out.append(orb)
    return out


class GammaHom:
    """A Galois-equivariant homomorphism ``src -> dst`` given by an integer matrix."""

    def __init__(self, f, src: GaloisModule, dst: GaloisModule, collapse: int = 1):
        self.src, self.dst = src, dst
        self.f = GaloisModule._reduce_hom(_as_int_matrix(f, dst.k, src.k, "homomorphism"), src.orders, dst.orders,
                                          "homomorphism")
        if isinstance(collapse, bool) or not isinstance(collapse, int) or collapse < 1:
            raise InputError("inseparable collapse must be a positive integer")
        self.collapse = collapse

    def violations(self) -> list[str]:
        out = []
        if len(self.src.gamma) != len(self.dst.gamma):
            return [f"source has {len(self.src.gamma)} Galois generators, target has {len(self.dst.gamma)}"]
        for t, (A, B) in enumerate(zip(self.src.gamma, self.dst.gamma)):
            for j in range(self.src.k):
                e = tuple(1 % self.src.orders[i] if i == j else 0 for i in range(self.src.k))
                if self(self.src.act(A, e)) != self.dst.act(B, self(e)):
                    out.append(f"not equivariant for generator {t + 1} at point {list(e)}")
        return out

    def require_equivariant(self):
        bad = self.violations()
        if bad:
            raise InputError("; ".join(bad))
        return self

    def __call__(self, x) -> tuple:
        return tuple(sum(a * c for a, c in zip(row, x)) % n for row, n in zip(self.f, self.dst.orders))

    def image_point(self, x: CharacterPoint) -> CharacterPoint:
        check_point_q(self.src, x)
        if x.q % self.collapse:
            raise InputError(f"collapse {self.collapse} does not divide q = {x.q}")
        return CharacterPoint(self(x.coords), x.q // self.collapse)

    @cached_property
    def _preimages(self) -> dict:
        table: dict = {}
        for y in self.src.points():
            table.setdefault(self(y), []).append(y)
        return table

    @cached_property
    def kernel(self) -> tuple:
        return tuple(self._preimages.get(self.dst.zero(), ()))

    def fiber(self, x) -> list:
        return list(self._preimages.get(tuple(x), ()))

    def is_surjective(self) -> bool:
        return len(self._preimages) == self.dst.size


def apply_hom(f, src: GaloisModule, dst: GaloisModule, x: CharacterPoint, collapse: int = 1) -> CharacterPoint:
    return GammaHom(f, src, dst, collapse).require_equivariant().image_point(x)


def fiber_of(f, src: GaloisModule, dst: GaloisModule, x: CharacterPoint, collapse: int = 1) -> list[CharacterPoint]:
    """All preimages of x in src (inseparable degree multiplied back by the collapse)."""
    h = GammaHom(f, src, dst, collapse).require_equivariant()
    check_point_q(dst, x)
    return [CharacterPoint(y, x.q * collapse) for y in h.fiber(x.coords)]
