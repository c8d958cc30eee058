"""Pullback and pushforward of homogeneous bundles along isogenies.

An isogeny A -> B is described through its dual on character groups,
``dual_map: B^ -> A^`` (an integer matrix between truncated character
modules), together with the shape of its kernel N: the order of the
multiplicative part, the cyclic orders of the etale unipotent part and the
order of the infinitesimal part.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from functools import reduce
from typing import Optional

from . import nilmod
from .bundlecat import (Data, GroundContext, HomogBundle, RankOnly, as_rank_only, data_loewy, data_semisimple,
                        data_socle, data_to_json)
from .errors import InputError, UnsupportedRegimeError
from .exactfield import ExactMatrix
from .galois import CharacterOrbit, CharacterPoint, GaloisModule, GammaHom, orbit_of
from .nilmod import UNIPOTENT, NilModule


def _is_power_of(n: int, p: int) -> bool:
    if p == 1:
        return n == 1
    while n % p == 0:
        n //= p
    return n == 1


@dataclass(frozen=True)
class IsogenyData:
    src: GroundContext
    dst: GroundContext
    dual_map: tuple
    mult_kernel_order: int = 1
    unip_etale_factors: tuple = ()
    infinitesimal_order: int = 1
    declared_degree: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "dual_map", tuple(tuple(r) for r in self.dual_map))
        object.__setattr__(self, "unip_etale_factors", tuple(self.unip_etale_factors))
        for name in ("mult_kernel_order", "infinitesimal_order"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise InputError(f"{name} must be a positive integer")
        if any(isinstance(a, bool) or not isinstance(a, int) or a < 1 for a in self.unip_etale_factors):
            raise InputError("unip_etale_factors must be positive integers")

    @property
    def unipotent_degree(self) -> int:
        return reduce(lambda a, b: a * b, self.unip_etale_factors, 1) * self.infinitesimal_order

    @property
    def degree(self) -> int:
        return self.mult_kernel_order * self.unipotent_degree

    @property
    def separable(self) -> bool:
        """True when the dual isogeny is separable, i.e. the kernel has no unipotent part."""
        return self.unipotent_degree == 1

    def hom(self) -> GammaHom:
        return GammaHom(self.dual_map, self.dst.characters, self.src.characters)

    def to_json(self) -> dict:
        out = {"src": self.src.to_json(), "dst": self.dst.to_json(), "dual_map": [list(r) for r in self.dual_map],
               "mult_kernel_order": self.mult_kernel_order, "unip_etale_factors": list(self.unip_etale_factors),
               "infinitesimal_order": self.infinitesimal_order}
        if self.declared_degree is not None:
            out["degree"] = self.declared_degree
        return out

    @classmethod
    def from_json(cls, obj) -> "IsogenyData":
        if not isinstance(obj, dict):
            raise InputError("isogeny must be a JSON object")
        missing = {"src", "dst", "dual_map"} - set(obj)
        if missing:
            raise InputError(f"isogeny is missing keys {sorted(missing)}")
        if not isinstance(obj["dual_map"], list):
            raise InputError("'dual_map' must be a matrix")
        return cls(GroundContext.from_json(obj["src"]), GroundContext.from_json(obj["dst"]), obj["dual_map"],
                   obj.get("mult_kernel_order", 1), obj.get("unip_etale_factors", []),
                   obj.get("infinitesimal_order", 1), obj.get("degree"))


def identity_isogeny(ctx: GroundContext) -> IsogenyData:
    k = ctx.characters.k
    return IsogenyData(ctx, ctx, tuple(tuple(int(i == j) for j in range(k)) for i in range(k)))


def validate_isogeny(iso: IsogenyData) -> list[str]:
    """Violations of the isogeny invariants, each with a witness; empty when valid."""
    out = []
    s, d = iso.src, iso.dst
    for name in ("g", "p", "r", "sep_closed"):
        if getattr(s, name) != getattr(d, name):
            out.append(f"source and target differ in {name}: {getattr(s, name)} vs {getattr(d, name)}")
    if s.field != d.field:
        out.append(f"source and target fields differ: {s.field!r} vs {d.field!r}")
    p = s.p
    for a in iso.unip_etale_factors:
        if p == 1 or not _is_power_of(a, p):
            out.append(f"unipotent etale factor {a} is not a power of p = {p}")
    if not _is_power_of(iso.infinitesimal_order, p):
        out.append(f"infinitesimal order {iso.infinitesimal_order} is not a power of p = {p}")
    if iso.declared_degree is not None and iso.declared_degree != iso.degree:
        out.append(f"declared degree {iso.declared_degree} != {iso.mult_kernel_order} * "
                   f"{list(iso.unip_etale_factors)} * {iso.infinitesimal_order} = {iso.degree}")
    try:
        h = iso.hom()
    except InputError as exc:
        return out + [str(exc)]
    out.extend(h.violations())
    if len(h.kernel) != iso.mult_kernel_order:
        out.append(f"kernel of the dual map has {len(h.kernel)} points at this level, "
                   f"mult_kernel_order is {iso.mult_kernel_order}")
    return out


def require_valid_isogeny(iso: IsogenyData) -> IsogenyData:
    bad = validate_isogeny(iso)
    if bad:
        raise InputError("invalid isogeny: " + "; ".join(bad))
    return iso


def factor_isogeny(iso: IsogenyData) -> tuple[IsogenyData, IsogenyData]:
    """phi = phi_u o phi_m with ker phi_m multiplicative and ker phi_u unipotent.

    On k-bar points the purely inseparable dual of phi_u is a bijection, so the
    middle variety is given the target's character module and phi_u^ = id.
    """
    require_valid_isogeny(iso)
    mid = iso.dst
    iso_m = IsogenyData(iso.src, mid, iso.dual_map, iso.mult_kernel_order, (), 1)
    iso_u = identity_isogeny(mid)
    iso_u = IsogenyData(mid, iso.dst, iso_u.dual_map, 1, iso.unip_etale_factors, iso.infinitesimal_order)
    return iso_m, iso_u


def pullback(iso: IsogenyData, F: HomogBundle) -> HomogBundle:
    """phi^* F(y) = [k(y):k(x)] E(x) with x = phi^(y); module data kept for separable isogenies."""
    require_valid_isogeny(iso)
    if F.context != iso.dst:
        raise InputError("bundle does not live on the target of the isogeny")
    h = iso.hom()
    M = iso.src.characters
    pairs = []
    for oy, d in F.summands:
        ox = orbit_of(M, h.image_point(CharacterPoint(oy.rep, oy.q)))
        mult = (oy.s * oy.q) // (ox.s * ox.q)
        if iso.separable and isinstance(d, NilModule) and iso.src.flavor is not None and ox.q == 1:
            data: Data = nilmod.direct_sum_all([d] * mult)
        else:
            r = as_rank_only(d)
            data = RankOnly(mult * r.rank, r.semisimple, mult * r.rank if r.semisimple else None)
        pairs.append((ox, data))
    return HomogBundle(iso.src, tuple(pairs))


def cyclic_shift(F, n: int) -> ExactMatrix:
    """Permutation matrix of e_i -> e_{i+1 mod n} (the regular representation of Z/n)."""
    return ExactMatrix(F, n, n, tuple(tuple(F.one if i == (j + 1) % n else F.zero for j in range(n))
                                      for i in range(n)))


def regular_module(F, g: int, factors) -> NilModule:
    """Regular representation of Z/a_1 x ... x Z/a_c; generator i acts on factor i, the rest trivially."""
    if len(factors) > g:
        raise UnsupportedRegimeError(f"{len(factors)} cyclic factors cannot be a quotient of Z_p^{g}")
    sizes = list(factors)
    n = reduce(lambda a, b: a * b, sizes, 1)
    mats = []
    for i in range(g):
        X = ExactMatrix.identity(F, 1)
        for j, a in enumerate(sizes):
            X = X.kron(cyclic_shift(F, a) if j == i else ExactMatrix.identity(F, a))
        mats.append(X)
    return NilModule(F, UNIPOTENT, g, n, tuple(mats))


@dataclass(frozen=True)
class PushBlock:
    orbit: CharacterOrbit
    rank: int
    indecomposable: Optional[bool]
    semisimple: Optional[bool]
    data: Data

    @property
    def loewy(self) -> Optional[int]:
        return data_loewy(self.data)

    def to_json(self) -> dict:
        out = {"orbit": self.orbit.to_json(), "rank": self.rank, "indecomposable": self.indecomposable,
               "semisimple": self.semisimple, "loewy": self.loewy}
        out.update(data_to_json(self.data))
        return out


class UniformBlocks(Sequence):
    """The blocks t + L, t in (Z/level)^r, all of one rank and datum; built on demand."""

    def __init__(self, orders, r: int, level: int, L, size: int, data: Data):
        self.orders, self.r, self.level, self.L = tuple(orders), r, level, tuple(L)
        self.size, self.data = size, data

    def __len__(self) -> int:
        return self.level**self.r

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        if i < 0:
            i += len(self)
        if not 0 <= i < len(self):
            raise IndexError(i)
        t = []
        for _ in range(self.r):
            i, c = divmod(i, self.level)
            t.append(c)
        orbit = CharacterOrbit(((*reversed(t), *self.L),), 1, self.orders)
        return PushBlock(orbit, self.size, True, self.size == 1, self.data)


@dataclass(frozen=True)
class PushforwardReport:
    context: GroundContext
    blocks: tuple

    @property
    def total_rank(self) -> int:
        if isinstance(self.blocks, UniformBlocks):
            return len(self.blocks) * self.blocks.size
        return sum(b.rank for b in self.blocks)

    def to_bundle(self) -> HomogBundle:
        return HomogBundle(self.context, tuple((b.orbit, b.data) for b in self.blocks))

    def to_json(self) -> dict:
        return {"context": self.context.to_json(), "total_rank": self.total_rank,
                "blocks": [b.to_json() for b in self.blocks]}


def _indecomposable(d: Data, seed: int) -> Optional[bool]:
    if d.rank == 1:
        return True
    if isinstance(d, NilModule):
        rep = nilmod.decompose(d, seed)
        return len(rep.summands) == 1 and rep.summands[0][1] == 1
    return False if d.semisimple else None


def _required_level(M: GaloisModule, x, kernel_order: int) -> int:
    return M.point_order(x) * kernel_order


def pushforward(iso: IsogenyData, E: HomogBundle, seed: int = 0) -> PushforwardReport:
    """phi_* E: one block per Galois orbit y of B^ with phi^(y) in the orbit of x."""
    require_valid_isogeny(iso)
    if E.context != iso.src:
        raise InputError("bundle does not live on the source of the isogeny")
    h = iso.hom()
    B = iso.dst.characters
    u = iso.unipotent_degree
    blocks = []
    for ox, d in E.summands:
        ys = h.fiber(ox.rep)
        if len(ys) != iso.mult_kernel_order:
            need = _required_level(iso.src.characters, ox.rep, iso.mult_kernel_order)
            raise InputError(f"torsion level too small: fiber over {list(ox.rep)} has {len(ys)} points, "
                             f"expected {iso.mult_kernel_order}; use a level divisible by {need}")
        # Galois orbits of the union of fibers over the orbit of x
        seen: set = set()
        orbits = []
        for x in ox.points:
            for y in h.fiber(x):
                if y not in seen:
                    pts = B.orbit_points(y)
                    seen.update(pts)
                    orbits.append(CharacterOrbit(pts, ox.q, B.orders))
        for oy in orbits:
            rank = u * oy.s * oy.q * d.rank
            if u == 1:
                data = d
                indec = _indecomposable(d, seed)
                ss = data_semisimple(d)
            else:
                ss = False
                indec = True if d.rank == 1 else None
                data = None
                if (isinstance(d, NilModule) and iso.infinitesimal_order == 1 and iso.dst.flavor == UNIPOTENT
                        and oy.q == 1 and len(iso.unip_etale_factors) <= iso.dst.g):
                    data = nilmod.tensor(regular_module(iso.dst.field, iso.dst.g, iso.unip_etale_factors), d)
                if data is None:
                    data = RankOnly(u * d.rank, False, data_socle(d))
            blocks.append(PushBlock(oy, rank, indec, ss, data))
    blocks.sort(key=lambda b: (b.orbit.points, b.orbit.q))
    rep = PushforwardReport(iso.dst, tuple(blocks))
    assert rep.total_rank == iso.degree * E.rank
    return rep


def frobenius_pushforward(ctx: GroundContext, n: int, L_point: Optional[CharacterPoint] = None) -> PushforwardReport:
    """(F^n)_* L over a separably closed field: p^(nr) indecomposable blocks of rank p^(n(g-r)).

    Block labels are t + y_0 with t in (Z/p^n)^r (the etale part of the dual
    kernel) and y_0 a preimage of L; they live in (Z/p^n)^r x (the module of L).
    """
    if ctx.p == 1:
        raise UnsupportedRegimeError("Frobenius needs positive characteristic")
    if not ctx.sep_closed:
        raise UnsupportedRegimeError("Frobenius pushforward is implemented over separably closed fields only")
    if isinstance(n, bool) or not isinstance(n, int) or n < 0:
        raise InputError("n must be a nonnegative integer")
    p, g, r = ctx.p, ctx.g, ctx.r
    base = ctx.characters
    if L_point is None:
        L = base.zero()
    else:
        L = base.check_point(L_point.coords)
        if L_point.q != 1:
            raise InputError("L must be a rational point (q = 1)")
    level = p**n
    orders = (level,) * r + base.orders
    M = GaloisModule(orders, (), p)
    out_ctx = GroundContext(g, p, r, True, ctx.field, M)
    size = p ** (n * (g - r))
    if r == g:
        data: Data = NilModule.trivial(ctx.field, g, 1, UNIPOTENT)
    else:
        data = RankOnly(size, size == 1, 1)
    return PushforwardReport(out_ctx, UniformBlocks(orders, r, level, L, size, data))
