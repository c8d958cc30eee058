import json
import random
from math import comb, lcm

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hvb import GF, QQ, InputError, UnsupportedRegimeError
from hvb.bundlecat import (GroundContext, HomogBundle, RankOnly, block_decompose, block_semisimplicity_test,
                           bundle_rank, classify, direct_sum_bundles, dual_bundle, hom_ext_dims,
                           irreducible_bundle, tensor_bundles, trivial_bundle)
from hvb.galois import CharacterPoint, GaloisModule, orbit_of
from hvb.instances import random_automorphism, random_bundle
from hvb.nilmod import ADDITIVE, UNIPOTENT, NilModule, is_isomorphic, same_isomorphism_classes

Z5 = GaloisModule([5], [[[-1]]])


def ctx_z5(g=1):
    return GroundContext(g, 1, 0, False, None, Z5)


def orb(ctx, *c, q=1):
    return orbit_of(ctx.characters, CharacterPoint(tuple(c), q))


def at(ctx, orbit, data):
    return HomogBundle(ctx, ((orbit, data),))


def J(n, g=1, F=QQ, flavor=ADDITIVE):
    return NilModule.jordan(F, n, g, flavor)


def bundles_isomorphic(E, F):
    if [(o.points, o.q) for o, _ in E.summands] != [(o.points, o.q) for o, _ in F.summands]:
        return False
    for (_, a), (_, b) in zip(E.summands, F.summands):
        if isinstance(a, RankOnly) or isinstance(b, RankOnly):
            if a != b:
                return False
        elif not is_isomorphic(a, b)[0]:
            return False
    return True


# -- examples -----------------------------------------------------------------

def test_irreducible_examples():
    c = ctx_z5()
    assert trivial_bundle(c).rank == 1
    assert irreducible_bundle(c, orb(c, 1)).rank == 2
    cp = GroundContext(1, 3, 0, True, None, GaloisModule([1]))
    E = irreducible_bundle(cp, orb(cp, 0, q=3))
    assert E.rank == 3 and isinstance(E.summands[0][1], RankOnly)


def test_bundle_rank_examples():
    c = ctx_z5()
    assert bundle_rank(trivial_bundle(c)) == 1
    Ex = irreducible_bundle(c, orb(c, 1))
    assert bundle_rank(direct_sum_bundles(Ex, Ex)) == 4
    assert bundle_rank(at(c, orb(c, 0), J(3))) == 3


def test_block_decompose_examples():
    c = ctx_z5()
    E = direct_sum_bundles(trivial_bundle(c), irreducible_bundle(c, orb(c, 2)))
    assert len(block_decompose(E)) == 2
    U = at(c, orb(c, 0), J(3))
    blocks = block_decompose(U)
    assert len(blocks) == 1 and blocks[0].bundle == U
    from hvb.nilmod import direct_sum
    blocks = block_decompose(at(c, orb(c, 0), direct_sum(J(2), J(1))))
    assert [(m.rank, k) for m, k in blocks[0].report.summands] == [(1, 1), (2, 1)]


def test_tensor_examples():
    c = ctx_z5()
    E = direct_sum_bundles(at(c, orb(c, 1), J(2)), trivial_bundle(c))
    assert bundles_isomorphic(tensor_bundles(E, trivial_bundle(c)), E)
    sc = GroundContext(1, 1, 0, True, None, GaloisModule([7]))
    T = tensor_bundles(irreducible_bundle(sc, orb(sc, 3)), irreducible_bundle(sc, orb(sc, 5)))
    assert [o.points for o in T.orbits()] == [((1,),)] and T.rank == 1
    J2 = at(sc, orb(sc, 0), J(2))
    blocks = block_decompose(tensor_bundles(J2, J2))
    assert [(m.rank, k) for m, k in blocks[0].report.summands] == [(1, 1), (3, 1)]


def test_tensor_rejects_inseparable():
    c = GroundContext(1, 2, 1, True, GF(2), GaloisModule([1]))
    E = irreducible_bundle(c, orb(c, 0, q=2))
    with pytest.raises(UnsupportedRegimeError):
        tensor_bundles(E, E)


def test_mixed_contexts_rejected():
    with pytest.raises(InputError):
        tensor_bundles(trivial_bundle(ctx_z5()), trivial_bundle(GroundContext(1)))


def test_dual_examples():
    c = ctx_z5()
    O = trivial_bundle(c)
    assert dual_bundle(O) == O
    Ex = irreducible_bundle(c, orb(c, 1))
    assert dual_bundle(Ex).orbits()[0].points == ((1,), (4,))
    sc = GroundContext(1, 1, 0, True, None, GaloisModule([7]))
    assert dual_bundle(irreducible_bundle(sc, orb(sc, 3))).orbits()[0].points == ((4,),)


def test_hom_ext_examples():
    c2 = GroundContext(2)
    O = trivial_bundle(c2)
    assert hom_ext_dims(O, O, 2) == [1, 2, 1]
    c = ctx_z5()
    assert hom_ext_dims(irreducible_bundle(c, orb(c, 1)), irreducible_bundle(c, orb(c, 2)), 1) == [0, 0]
    Ex = irreducible_bundle(c, orb(c, 1))
    assert hom_ext_dims(Ex, Ex, 1) == [2, 2]


def test_ext_in_char_p_unsupported():
    c = GroundContext(1, 2, 1, True)
    O = trivial_bundle(c)
    assert hom_ext_dims(O, O, 0) == [1]
    with pytest.raises(UnsupportedRegimeError, match="Ext unsupported in characteristic p"):
        hom_ext_dims(O, O, 1)


def test_classify_examples():
    c = ctx_z5()
    flags = classify(trivial_bundle(c))
    assert flags["semisimple"] and flags["unipotent"] and flags["essentially_finite"] and flags["irreducible"]
    flags = classify(at(c, orb(c, 0), J(2)))
    assert flags["semisimple"] is False and flags["unipotent"]
    c6 = GroundContext(1, 1, 0, True, None, GaloisModule([12]))
    E = direct_sum_bundles(irreducible_bundle(c6, orb(c6, 3)), irreducible_bundle(c6, orb(c6, 2)))
    flags = classify(E)
    assert flags["semisimple"] and not flags["unipotent"] and flags["witness_n"] == lcm(4, 6)


def test_block_semisimplicity_examples():
    assert not block_semisimplicity_test(None, 1, 1)
    assert not block_semisimplicity_test(None, 4, 2)
    assert block_semisimplicity_test(3, 3, 1)
    assert block_semisimplicity_test(1, 5, 5)
    with pytest.raises(InputError):
        block_semisimplicity_test(2, 3, 2)


def test_module_data_regimes():
    c = GroundContext(1, 2, 0, True)  # supersingular: rank-only
    with pytest.raises(UnsupportedRegimeError):
        at(c, orb(c), NilModule.trivial(GF(2), 1, 1, UNIPOTENT))
    c = GroundContext(1, 2, 1, True)
    with pytest.raises(InputError):
        at(c, orb(c), NilModule.trivial(GF(2), 1, 1, ADDITIVE))
    with pytest.raises(InputError):
        GroundContext(1, 1, 0, True, None, Z5)  # nontrivial action over a separably closed field


def test_json_roundtrip():
    rng = random.Random(3)
    for c in (ctx_z5(2), GroundContext(1, 3, 1, True), GroundContext(1, 3, 0, False, None, GaloisModule([4], [[[3]]], 3))):
        for _ in range(5):
            E = random_bundle(c, rng)
            assert HomogBundle.from_json(json.loads(json.dumps(E.to_json()))) == E


# -- properties ---------------------------------------------------------------

@st.composite
def contexts(draw):
    kind = draw(st.sampled_from(["q-galois", "q-closed", "ordinary"]))
    if kind == "q-galois":
        n = draw(st.integers(2, 9))
        A = random_automorphism(random.Random(draw(st.integers(0, 999))), n, 1)
        return GroundContext(draw(st.integers(1, 2)), 1, 0, False, None, GaloisModule([n], [A]))
    if kind == "q-closed":
        return GroundContext(draw(st.integers(1, 2)), 1, 0, True, None, GaloisModule([draw(st.integers(1, 6))]))
    p = draw(st.sampled_from([2, 3]))
    g = draw(st.integers(1, 2))
    return GroundContext(g, p, g, True, None, GaloisModule([draw(st.integers(1, 6))]))


@st.composite
def bundle_pairs(draw):
    c = draw(contexts())
    rng = random.Random(draw(st.integers(0, 2**32)))
    return random_bundle(c, rng, 2, 2), random_bundle(c, rng, 2, 2)


@given(bundle_pairs())
def test_rank_additive_and_multiplicative(EF):
    E, F = EF
    assert sum(b.bundle.rank for b in block_decompose(E)) == E.rank
    assert tensor_bundles(E, F).rank == E.rank * F.rank
    assert direct_sum_bundles(E, F).rank == E.rank + F.rank


@given(bundle_pairs())
def test_block_orthogonality(EF):
    E, F = EF
    shared = {o.points for o in E.orbits()} & {o.points for o in F.orbits()}
    deg = E.context.g if E.context.p == 1 else 0
    dims = hom_ext_dims(E, F, deg)
    if not shared:
        assert dims == [0] * (deg + 1)


@given(bundle_pairs())
def test_unit_and_dual(EF):
    E, _ = EF
    O = trivial_bundle(E.context)
    assert bundles_isomorphic(tensor_bundles(E, O), E)
    D = dual_bundle(E)
    assert D.rank == E.rank
    assert bundles_isomorphic(dual_bundle(D), E)


@given(bundle_pairs())
def test_closed_labels_add(EF):
    E, F = EF
    if not E.context.sep_closed:
        return
    M = E.context.characters
    expected = {M.add(a.rep, b.rep) for a in E.orbits() for b in F.orbits()}
    assert {o.rep for o in tensor_bundles(E, F).orbits()} == expected


@given(st.integers(1, 4))
def test_trivial_ext1_is_g(g):
    O = trivial_bundle(GroundContext(g))
    assert classify(O)["semisimple"]
    assert hom_ext_dims(O, O, g) == [comb(g, i) for i in range(g + 1)]


@given(bundle_pairs(), st.integers(0, 99))
def test_block_decompose_stable(EF, seed):
    E, _ = EF
    if E.context.flavor is None:
        return
    a = block_decompose(E, 0)
    b = block_decompose(E, seed)
    for x, y in zip(a, b):
        assert same_isomorphism_classes(x.report, y.report)
