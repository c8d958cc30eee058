import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hvb import InputError
from hvb.galois import (CharacterPoint, GaloisModule, GammaHom, all_orbits, apply_hom, fiber_of, orbit_from_json,
                        orbit_of)


def P(*c, q=1):
    return CharacterPoint(tuple(c), q)


def test_orbit_examples():
    M = GaloisModule([5])
    assert orbit_of(M, P(3)).points == ((3,),)
    N = GaloisModule([5], [[[-1]]])
    o = orbit_of(N, P(1))
    assert o.points == ((1,), (4,)) and o.s == 2
    assert orbit_of(N, P(0)).s == 1
    with pytest.raises(InputError):
        orbit_of(N, P(5))


def test_q_carried_and_checked():
    M = GaloisModule([4], [], p=2)
    assert orbit_of(M, P(1, q=4)).q == 4
    with pytest.raises(InputError):
        orbit_of(M, P(1, q=3))
    with pytest.raises(InputError):
        orbit_of(GaloisModule([4]), P(1, q=2))


def test_apply_hom_examples():
    M = GaloisModule([5])
    assert apply_hom([[1]], M, M, P(3)) == P(3)
    assert apply_hom([[2]], M, M, P(1)) == P(2)
    A = GaloisModule([6, 6], [[[0, -1], [1, 0]], [[1, 1], [0, 1]]])
    for x in A.points():
        assert apply_hom([[5, 0], [0, 5]], A, A, CharacterPoint(x)) == CharacterPoint(tuple(5 * c % 6 for c in x))


def test_apply_hom_collapse():
    M = GaloisModule([4], [], p=2)
    assert apply_hom([[1]], M, M, P(1, q=4), collapse=2) == P(1, q=2)


def test_non_equivariant_rejected_with_witness():
    A = GaloisModule([6, 6], [[[0, -1], [1, 0]]])
    with pytest.raises(InputError, match=r"generator 1 at point \[1, 0\]"):
        apply_hom([[1, 0], [0, 2]], A, A, P(1, 0))


def test_ill_defined_map_rejected():
    with pytest.raises(InputError):
        GammaHom([[1]], GaloisModule([4]), GaloisModule([3]))


def test_fiber_examples():
    M = GaloisModule([5])
    assert fiber_of([[1]], M, M, P(2)) == [P(2)]
    N = GaloisModule([4])
    assert fiber_of([[2]], N, N, P(0)) == [P(0), P(2)]
    assert fiber_of([[2]], N, N, P(1)) == []


def test_separable_fiber_size():
    # multiplication by 3 on (Z/9)^2 -> (Z/9)^2 has kernel of order 9
    M = GaloisModule([9, 9], [[[0, -1], [1, 0]]])
    for x in M.points():
        fib = fiber_of([[3, 0], [0, 3]], M, M, CharacterPoint(x))
        assert len(fib) in (0, 9)
        if x[0] % 3 == 0 and x[1] % 3 == 0:
            assert len(fib) == 9


def test_non_automorphism_rejected():
    with pytest.raises(InputError):
        GaloisModule([4], [[[2]]])
    with pytest.raises(InputError):
        GaloisModule([0])


def test_group_closure_and_json():
    M = GaloisModule([7, 7], [[[0, -1], [1, 0]], [[2, 0], [0, 2]]])
    assert len(M.group) == 12  # <rotation of order 4> x <2 of order 3>
    back = GaloisModule.from_json(json.loads(json.dumps(M.to_json())))
    assert back == M
    pt = P(1, 2, q=1)
    assert CharacterPoint.from_json(json.loads(json.dumps(pt.to_json()))) == pt


def test_orbit_from_json_checks_orbit():
    M = GaloisModule([5], [[[-1]]])
    assert orbit_from_json(M, {"points": [[4], [1]], "q": 1}).points == ((1,), (4,))
    with pytest.raises(InputError):
        orbit_from_json(M, {"points": [[1], [2]], "q": 1})


# -- random modules -----------------------------------------------------------

def _random_auto(rng, n, k):
    while True:
        A = [[rng.randrange(n) for _ in range(k)] for _ in range(k)]
        try:
            GaloisModule([n] * k, [A])
            return A
        except InputError:
            continue


@st.composite
def galois_modules(draw):
    n = draw(st.integers(1, 12))
    k = draw(st.integers(1, 2))
    seed = draw(st.integers(0, 2**32))
    rng = random.Random(seed)
    gens = [_random_auto(rng, n, k) for _ in range(draw(st.integers(0, 2)))]
    return GaloisModule([n] * k, gens)


@given(galois_modules())
def test_orbits_partition(M):
    orbits = all_orbits(M)
    assert sum(len(o) for o in orbits) == M.size
    assert len({x for o in orbits for x in o}) == M.size
    for o in orbits:
        for A in M.gamma:
            assert {M.act(A, x) for x in o} == set(o)


@given(galois_modules(), st.integers(0, 11))
def test_scalar_hom_maps_orbits_onto_orbits(M, c):
    f = [[c if i == j else 0 for j in range(M.k)] for i in range(M.k)]
    h = GammaHom(f, M, M).require_equivariant()
    for o in all_orbits(M):
        img = orbit_of(M, CharacterPoint(h(o[0])))
        assert {h(x) for x in o} == set(img.points)
    sizes = {len(h.fiber(x)) for x in M.points()}
    assert sizes <= {0, len(h.kernel)}


@given(galois_modules(), st.integers(1, 11))
def test_fibers_permuted_by_group(M, c):
    f = [[c if i == j else 0 for j in range(M.k)] for i in range(M.k)]
    h = GammaHom(f, M, M)
    for x in M.points():
        fib = set(h.fiber(x))
        for A in M.gamma:
            assert {M.act(A, y) for y in fib} == set(h.fiber(M.act(A, x)))
