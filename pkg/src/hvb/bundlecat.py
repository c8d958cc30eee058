"""Homogeneous bundles as finite sums of (character orbit, module) blocks.

Each block sits at a Galois orbit of characters.  In the two regimes where the
unipotent part of the fundamental group is understood concretely (char 0,
or ordinary over a separably closed field of char p) the block carries an
explicit :class:`~hvb.nilmod.NilModule`; elsewhere only a :class:`RankOnly`
record is kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Optional, Union

from . import nilmod
from .errors import InputError, UnsupportedRegimeError
from .exactfield import GF, QQ, FieldSpec, _is_prime, field_from_json
from .galois import CharacterOrbit, CharacterPoint, GaloisModule, orbit_from_json, orbit_of
from .nilmod import ADDITIVE, UNIPOTENT, NilModule


@dataclass(frozen=True)
class GroundContext:
    g: int
    p: int = 1
    r: int = 0
    sep_closed: bool = True
    field: Optional[FieldSpec] = None
    characters: Optional[GaloisModule] = None

    def __post_init__(self):
        for name in ("g", "p", "r"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int):
                raise InputError(f"context '{name}' must be an integer")
        if self.g < 1:
            raise InputError(f"g must be >= 1, got {self.g}")
        if self.p < 1 or (self.p > 1 and not _is_prime(self.p)):
            raise InputError(f"characteristic exponent must be 1 or a prime, got {self.p}")
        if not 0 <= self.r <= self.g:
            raise InputError(f"p-rank must satisfy 0 <= r <= g, got r={self.r}, g={self.g}")
        if self.p == 1 and self.r:
            raise InputError("p-rank is only meaningful in positive characteristic")
        F = self.field
        if F is None:
            F = QQ if self.p == 1 else GF(self.p)
        if F.characteristic != (0 if self.p == 1 else self.p):
            raise InputError(f"field {F!r} does not have characteristic exponent {self.p}")
        object.__setattr__(self, "field", F)
        M = self.characters
        if M is None:
            M = GaloisModule([])
        cp = 1 if M.p in (None, 0, 1) else M.p
        if M.p is not None and cp != self.p:
            raise InputError(f"character module has p={M.p}, context has p={self.p}")
        if M.p is None:
            M = GaloisModule(M.orders, M.gamma, self.p)
        if self.sep_closed and len(M.group) > 1:
            raise InputError("a separably closed ground field has trivial Galois action")
        object.__setattr__(self, "characters", M)

    @property
    def flavor(self) -> Optional[str]:
        """Module flavor of the supported regimes, None when only ranks are tracked."""
        if self.p == 1:
            return ADDITIVE
        if self.r == self.g and self.sep_closed:
            return UNIPOTENT
        return None

    def to_json(self) -> dict:
        return {"g": self.g, "p": self.p, "r": self.r, "sep_closed": self.sep_closed,
                "field": self.field.to_json(), "characters": self.characters.to_json()}

    @classmethod
    def from_json(cls, obj) -> "GroundContext":
        if not isinstance(obj, dict) or "g" not in obj:
            raise InputError("context must be an object with at least 'g'")
        F = field_from_json(obj["field"]) if obj.get("field") is not None else None
        M = GaloisModule.from_json(obj["characters"]) if obj.get("characters") is not None else None
        sep = obj.get("sep_closed", True)
        if not isinstance(sep, bool):
            raise InputError("'sep_closed' must be a boolean")
        return cls(obj["g"], obj.get("p", 1), obj.get("r", 0), sep, F, M)


@dataclass(frozen=True)
class RankOnly:
    """Block data when no module model is available: multiplicity of E(x) plus known invariants."""

    rank: int
    semisimple: Optional[bool] = None
    socle: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.rank, bool) or not isinstance(self.rank, int) or self.rank < 0:
            raise InputError(f"rank-only data needs a nonnegative integer rank, got {self.rank!r}")
        if self.semisimple and self.socle is None:
            object.__setattr__(self, "socle", self.rank)

    def to_json(self) -> dict:
        out = {"rank_only": self.rank}
        if self.semisimple is not None:
            out["semisimple"] = self.semisimple
        if self.socle is not None:
            out["socle"] = self.socle
        return out


Data = Union[NilModule, RankOnly]


def data_rank(d: Data) -> int:
    return d.rank


def data_semisimple(d: Data) -> Optional[bool]:
    if isinstance(d, RankOnly):
        return d.semisimple
    return all(N.is_zero() for N in d.nil_parts)


def data_socle(d: Data) -> Optional[int]:
    if isinstance(d, RankOnly):
        return d.socle
    return nilmod.socle_dim(d)


def data_head(d: Data) -> Optional[int]:
    if isinstance(d, RankOnly):
        return d.rank if d.semisimple else None
    rs = nilmod.radical_series(d)
    return rs[0] - (rs[1] if len(rs) > 1 else 0)


def data_loewy(d: Data) -> Optional[int]:
    if isinstance(d, RankOnly):
        if d.rank == 0:
            return 0
        return 1 if d.semisimple else None
    return nilmod.loewy_length(d)


def as_rank_only(d: Data) -> RankOnly:
    if isinstance(d, RankOnly):
        return d
    return RankOnly(d.rank, data_semisimple(d), data_socle(d))


def _merge(a: Data, b: Data) -> Data:
    if isinstance(a, NilModule) and isinstance(b, NilModule):
        return nilmod.direct_sum(a, b)
    a, b = as_rank_only(a), as_rank_only(b)
    ss = None if a.semisimple is None or b.semisimple is None else (a.semisimple and b.semisimple)
    soc = None if a.socle is None or b.socle is None else a.socle + b.socle
    return RankOnly(a.rank + b.rank, ss, soc)


def data_from_json(obj) -> Data:
    if not isinstance(obj, dict):
        raise InputError("summand data must be an object")
    if "module" in obj:
        return nilmod.require_valid(NilModule.from_json(obj["module"]))
    if "rank_only" in obj:
        return RankOnly(obj["rank_only"], obj.get("semisimple"), obj.get("socle"))
    raise InputError("summand data needs 'module' or 'rank_only'")


def data_to_json(d: Data) -> dict:
    return {"module": d.to_json()} if isinstance(d, NilModule) else d.to_json()


@dataclass(frozen=True)
class HomogBundle:
    """Sum over distinct orbits; equal orbits are merged and blocks sorted by least point."""

    context: GroundContext
    summands: tuple = field(default=())

    def __post_init__(self):
        merged: dict = {}
        order = []
        for orbit, data in self.summands:
            self._check_summand(orbit, data)
            if data.rank == 0:
                continue
            key = (orbit.points, orbit.q)
            if key in merged:
                merged[key] = (orbit, _merge(merged[key][1], data))
            else:
                merged[key] = (orbit, data)
                order.append(key)
        object.__setattr__(self, "summands", tuple(merged[k] for k in sorted(order)))

    def _check_summand(self, orbit: CharacterOrbit, data: Data):
        ctx = self.context
        M = ctx.characters
        if orbit.orders != M.orders:
            raise InputError(f"orbit {orbit.label()} lives in a different character module")
        real = orbit_of(M, CharacterPoint(orbit.rep, orbit.q))
        if real.points != orbit.points:
            raise InputError(f"{orbit.label()} is not a Galois orbit")
        if isinstance(data, NilModule):
            if ctx.flavor is None:
                raise UnsupportedRegimeError(
                    f"module data needs char 0 or an ordinary separably closed context (p={ctx.p}, r={ctx.r}, "
                    f"g={ctx.g}, sep_closed={ctx.sep_closed}); use rank-only data")
            if orbit.q != 1:
                raise UnsupportedRegimeError(f"inseparable orbit {orbit.label()} carries rank-only data only")
            if data.flavor != ctx.flavor or data.g != ctx.g or data.field != ctx.field:
                raise InputError(
                    f"module data ({data.field!r}, {data.flavor}, g={data.g}) does not match the context "
                    f"({ctx.field!r}, {ctx.flavor}, g={ctx.g})")

    @property
    def rank(self) -> int:
        return sum(o.s * o.q * d.rank for o, d in self.summands)

    def orbits(self) -> list[CharacterOrbit]:
        return [o for o, _ in self.summands]

    def to_json(self) -> dict:
        return {"context": self.context.to_json(),
                "summands": [{"orbit": o.to_json(), "data": data_to_json(d)} for o, d in self.summands]}

    @classmethod
    def from_json(cls, obj) -> "HomogBundle":
        if not isinstance(obj, dict) or "context" not in obj or "summands" not in obj:
            raise InputError("bundle must be an object with 'context' and 'summands'")
        ctx = GroundContext.from_json(obj["context"])
        if not isinstance(obj["summands"], list):
            raise InputError("'summands' must be a list")
        pairs = []
        for s in obj["summands"]:
            if not isinstance(s, dict) or "orbit" not in s or "data" not in s:
                raise InputError("each summand needs 'orbit' and 'data'")
            pairs.append((orbit_from_json(ctx.characters, s["orbit"]), data_from_json(s["data"])))
        return cls(ctx, tuple(pairs))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def irreducible_bundle(ctx: GroundContext, orbit: CharacterOrbit) -> HomogBundle:
    """E(x): the simple object of the block at ``orbit`` (rank s*q)."""
    if ctx.flavor is not None and orbit.q == 1:
        data: Data = NilModule.trivial(ctx.field, ctx.g, 1, ctx.flavor)
    else:
        data = RankOnly(1, True, 1)
    return HomogBundle(ctx, ((orbit, data),))


def trivial_bundle(ctx: GroundContext) -> HomogBundle:
    M = ctx.characters
    return irreducible_bundle(ctx, orbit_of(M, CharacterPoint(M.zero())))


def bundle_rank(E: HomogBundle) -> int:
    return E.rank


def direct_sum_bundles(E: HomogBundle, F: HomogBundle) -> HomogBundle:
    _same_context(E, F)
    return HomogBundle(E.context, E.summands + F.summands)


@dataclass(frozen=True)
class Block:
    orbit: CharacterOrbit
    bundle: HomogBundle
    report: Optional[nilmod.DecompositionReport]

    @property
    def indecomposable(self) -> Optional[bool]:
        if self.report is None:
            d = self.bundle.summands[0][1]
            return True if d.rank == 1 else (False if data_semisimple(d) else None)
        return len(self.report.summands) == 1 and self.report.summands[0][1] == 1

    def to_json(self) -> dict:
        out = {"orbit": self.orbit.to_json(), "rank": self.bundle.rank, "indecomposable": self.indecomposable,
               "loewy": data_loewy(self.bundle.summands[0][1])}
        if self.report is not None:
            out["summands"] = [{"module": m.to_json(), "multiplicity": k, "loewy": nilmod.loewy_length(m)}
                               for m, k in self.report.summands]
        else:
            out["data"] = data_to_json(self.bundle.summands[0][1])
        return out


def block_decompose(E: HomogBundle, seed: int = 0) -> list[Block]:
    """One block per orbit (canonical order); module data split by Krull-Schmidt."""
    out = []
    for orbit, data in E.summands:
        rep = nilmod.decompose(data, seed) if isinstance(data, NilModule) else None
        out.append(Block(orbit, HomogBundle(E.context, ((orbit, data),)), rep))
    return out


def _same_context(E: HomogBundle, F: HomogBundle):
    if E.context != F.context:
        raise InputError("bundles live over different ground contexts")


def _diagonal_orbits(M: GaloisModule, xs, ys) -> list[list]:
    todo = {(x, y) for x in xs for y in ys}
    out = []
    while todo:
        start = min(todo)
        todo.discard(start)
        orb = [start]
        frontier = [start]
        while frontier:
            nxt = []
            for x, y in frontier:
                for A in M.gamma:
                    pr = (M.act(A, x), M.act(A, y))
                    if pr in todo:
                        todo.discard(pr)
                        orb.append(pr)
                        nxt.append(pr)
            frontier = nxt
        out.append(orb)
    return out


def tensor_bundles(E: HomogBundle, F: HomogBundle) -> HomogBundle:
    """Tensor product: diagonal orbits on orbit(x) x orbit(y) each give copies of E(x_i + y_j)."""
    _same_context(E, F)
    ctx = E.context
    if ctx.flavor is None:
        raise UnsupportedRegimeError("tensor products need a module-data regime")
    M = ctx.characters
    pairs = []
    for ox, d1 in E.summands:
        for oy, d2 in F.summands:
            if ox.q > 1 or oy.q > 1:
                raise UnsupportedRegimeError("tensor product of blocks with inseparable degree q > 1 is unsupported")
            if isinstance(d1, NilModule) and isinstance(d2, NilModule):
                prod: Data = nilmod.tensor(d1, d2)
            else:
                a, b = as_rank_only(d1), as_rank_only(d2)
                ss = None if a.semisimple is None or b.semisimple is None else (a.semisimple and b.semisimple)
                prod = RankOnly(a.rank * b.rank, ss)
            for P in _diagonal_orbits(M, ox.points, oy.points):
                x, y = P[0]
                oz = orbit_of(M, CharacterPoint(M.add(x, y)))
                copies = len(P) // oz.s
                data = prod
                for _ in range(copies - 1):
                    data = _merge(data, prod)
                pairs.append((oz, data))
    out = HomogBundle(ctx, tuple(pairs))
    assert out.rank == E.rank * F.rank
    return out


def dual_bundle(E: HomogBundle) -> HomogBundle:
    M = E.context.characters
    pairs = []
    for orbit, data in E.summands:
        neg = CharacterOrbit(M.orbit_points(M.neg(orbit.rep)), orbit.q, orbit.orders)
        if isinstance(data, NilModule):
            d: Data = nilmod.dual(data)
        else:
            d = RankOnly(data.rank, data.semisimple, data.rank if data.semisimple else None)
        pairs.append((neg, d))
    return HomogBundle(E.context, tuple(pairs))


def _block_hom(d1: Data, d2: Data) -> int:
    if isinstance(d1, NilModule) and isinstance(d2, NilModule):
        return nilmod.hom_dim(d1, d2)
    if data_semisimple(d1):
        soc = data_socle(d2)
        if soc is not None:
            return d1.rank * soc
    if data_semisimple(d2):
        head = data_head(d1)
        if head is not None:
            return d2.rank * head
    raise UnsupportedRegimeError("Hom between rank-only blocks needs a semisimple side with known socle/head")


def hom_ext_dims(E: HomogBundle, F: HomogBundle, max_degree: int = 0) -> list[int]:
    """dim_k Ext^i(E, F) for i = 0..max_degree; blocks at different orbits contribute nothing."""
    _same_context(E, F)
    if isinstance(max_degree, bool) or not isinstance(max_degree, int) or max_degree < 0:
        raise InputError("max_degree must be a nonnegative integer")
    out = [0] * (max_degree + 1)
    fmap = {(o.points, o.q): d for o, d in F.summands}
    for ox, d1 in E.summands:
        d2 = fmap.get((ox.points, ox.q))
        if d2 is None:
            continue
        deg = ox.s * ox.q
        if max_degree == 0:
            dims = [_block_hom(d1, d2)]
        elif isinstance(d1, NilModule) and isinstance(d2, NilModule):
            dims = nilmod.ext_dims(d1, d2, max_degree)
        else:
            raise UnsupportedRegimeError("Ext in positive degree is unsupported for rank-only blocks")
        for i, v in enumerate(dims):
            out[i] += deg * v
    return out


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def classify(E: HomogBundle) -> dict:
    M = E.context.characters
    flags = [data_semisimple(d) for _, d in E.summands]
    if all(f is True for f in flags):
        semisimple: Optional[bool] = True
    elif any(f is False for f in flags):
        semisimple = False
    else:
        semisimple = None
    zero = M.zero()
    unipotent = all(o.points == (zero,) for o, _ in E.summands)
    n = reduce(_lcm, (M.point_order(x) for o, _ in E.summands for x in o.points), 1)
    irreducible = len(E.summands) == 1 and E.summands[0][1].rank == 1
    return {"semisimple": semisimple, "unipotent": unipotent, "essentially_finite": True,
            "witness_n": n, "irreducible": irreducible}


def block_semisimplicity_test(U_order: Optional[int], K_deg: int, L_deg: int) -> bool:
    """The block of a character with fields L in K is semisimple iff U is finite of order [K:L]."""
    for name, v in (("K_deg", K_deg), ("L_deg", L_deg)):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise InputError(f"{name} must be a positive integer")
    if K_deg % L_deg:
        raise InputError(f"[L:k] = {L_deg} does not divide [K:k] = {K_deg}")
    if U_order is None:
        return False
    if isinstance(U_order, bool) or not isinstance(U_order, int) or U_order < 1:
        raise InputError("U_order must be a positive integer or None (infinite)")
    return U_order == K_deg // L_deg
