
import pytest
from hypothesis import given, settings, strategies as st

from shimura_atlas.errors import GroupTooLarge
from shimura_atlas.permgroup import (
    Permutation,
    PermGroup,
    canonical_subset,
    close,
    mask_of,
    members,
    orbit_of_point,
    orbit_of_subset,
    setwise_stabilizer,
)

from conftest import cycles, transitive_corpus


def brute_closure(gens, n):
    # words of growing length until nothing new appears
    elems = {tuple(range(n))}
    frontier = set(elems)
    while frontier:
        new = set()
        for e in frontier:
            for g in gens:
                w = tuple(g.images[e[i]] for i in range(n))
                if w not in elems:
                    new.add(w)
        elems |= new
        frontier = new
    return elems


def test_close_examples():
    assert len(close([cycles(3, (0, 1, 2))])) == 3
    assert len(close([cycles(3, (0, 1)), cycles(3, (0, 1, 2))])) == 6
    assert len(close([Permutation.identity(4)])) == 1


def test_close_limit():
    with pytest.raises(GroupTooLarge):
        close([cycles(6, (0, 1)), cycles(6, (0, 1, 2, 3, 4, 5))], limit=100)


def test_group_limit_env(monkeypatch):
    monkeypatch.setenv("SHIMURA_ATLAS_GROUP_LIMIT", "10")
    with pytest.raises(GroupTooLarge):
        PermGroup.symmetric(4).order


def test_composition_convention():
    p, q = cycles(3, (0, 1)), cycles(3, (1, 2))
    for x in range(3):
        assert (p * q)(x) == p(q(x))
    assert (p * p.inverse()).is_identity()


def test_orbit_of_point():
    assert orbit_of_point(PermGroup.cyclic(3), 0) == {0, 1, 2}
    assert orbit_of_point(PermGroup.trivial(3), 1) == {1}
    assert orbit_of_point(PermGroup(4, (cycles(4, (0, 1)),)), 2) == {2}


def test_orbit_of_subset():
    S3 = PermGroup.symmetric(3)
    assert set(orbit_of_subset(S3, mask_of([0, 1]))) == {mask_of(s) for s in ([0, 1], [0, 2], [1, 2])}
    assert orbit_of_subset(S3, 0) == [0]
    C5 = PermGroup.cyclic(5)
    assert set(orbit_of_subset(C5, mask_of([0, 1]))) == {mask_of([i, (i + 1) % 5]) for i in range(5)}


def test_setwise_stabilizer():
    S3 = PermGroup.symmetric(3)
    stab = setwise_stabilizer(S3, mask_of([0, 1]))
    assert stab.order == 2 and cycles(3, (0, 1)) in stab
    C4 = PermGroup.cyclic(4)
    assert setwise_stabilizer(C4, C4.full_mask).same_elements(C4)
    assert setwise_stabilizer(PermGroup.cyclic(3), 1).order == 1


def test_elements_match_brute_force():
    for name, G in transitive_corpus().items():
        assert {g.images for g in G.elements} == brute_closure(G.generators, G.ground_size), name


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(transitive_corpus())), st.data())
def test_orbit_stabilizer(name, data):
    G = transitive_corpus()[name]
    mask = data.draw(st.integers(0, G.full_mask))
    orb = orbit_of_subset(G, mask)
    assert len(orb) * setwise_stabilizer(G, mask).order == G.order
    assert canonical_subset(G, mask) == min(orb)
    assert all(canonical_subset(G, J) == orb[0] for J in orb)


@given(st.sets(st.integers(0, 15)))
def test_mask_round_trip(s):
    assert members(mask_of(s)) == sorted(s)


@given(st.permutations(range(6)), st.permutations(range(6)))
def test_multiplication_is_associative_with_inverse(a, b):
    p, q = Permutation(tuple(a)), Permutation(tuple(b))
    assert (p * q).inverse() == q.inverse() * p.inverse()
