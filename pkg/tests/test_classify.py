import itertools

import pytest
from hypothesis import given, settings

from shimura_atlas import classify as C
from shimura_atlas.brauer import QuaternionData
from shimura_atlas.cmtypes import PartialCMType, all_data, all_partial_cm_types, make_datum
from shimura_atlas.errors import (
    DuplicateIsotype,
    InconsistentData,
    InvalidData,
    MixedAdjointData,
    NotPrimitive,
    OrbitMismatch,
)
from shimura_atlas.fieldmodel import CMModel, TotallyRealModel
from shimura_atlas.orbitrep import enumerate_orbits, make_orbit
from shimura_atlas.permgroup import PermGroup, mask_of, members

from conftest import (
    C4_CM,
    QUAD_CM,
    cm_corpus,
    mumford_data,
    perm,
    quaternion_data,
    type_ii_data,
    type_iii_data,
)

C6_CM = CMModel(PermGroup.cyclic(6), perm(3, 4, 5, 0, 1, 2))


def unitary():
    D = type_iii_data()
    return D.field, D, make_orbit(D.field.group, 1), make_datum(C4_CM, [[0, 2], [1, 3]], [1])


def vz():
    F = TotallyRealModel(PermGroup.cyclic(5))
    D = QuaternionData(F, 0)
    E = CMModel(PermGroup.cyclic(10), perm(*[(i + 5) % 10 for i in range(10)]))
    datum = make_datum(E, [[i, i + 5] for i in range(5)], [1, 2, 3])
    return F, D, make_orbit(F.group, mask_of([0, 1])), datum


def test_construction1_examples():
    D = mumford_data()
    rec = C.construction1(D.field, D)
    assert (rec.albert_type, rec.g, rec.endo.kind, rec.inputs["dim_W"]) == ("I", 4, C.EndoKind.RATIONAL, 8)
    D = type_ii_data()
    rec = C.construction1(D.field, D)
    assert (rec.albert_type, rec.g, rec.endo.kind) == ("II", 8, C.EndoKind.QUAT_SPLIT)
    D = type_iii_data()
    rec = C.construction1(D.field, D)
    assert (rec.albert_type, rec.g, rec.endo.kind) == ("III", 4, C.EndoKind.QUAT_RAMIFIED)
    assert C.construction1(D.field, D, 3).g == 12


def test_construction1_rejects_invalid():
    F = TotallyRealModel(PermGroup.cyclic(2))
    with pytest.raises(InvalidData):
        C.construction1(F, QuaternionData(F, 0))


@settings(max_examples=100, deadline=None)
@given(quaternion_data())
def test_albert_trichotomy(D):
    m = D.degree
    try:
        rec = C.construction1(D.field, D)
    except InconsistentData:
        pytest.fail("valid data never yields the impossible (m even, split) combination")
    assert rec.albert_type in ("I", "II", "III")
    if m % 2 == 0:
        assert rec.albert_type == "III"
    assert rec.dim_V == 2 * rec.g == rec.inputs["dim_W"]


def test_construction2_unitary():
    F, D, orbit, datum = unitary()
    phi = mask_of([1])
    rec = C.construction2(F, D, orbit, datum, phi, "Split")
    assert (rec.g, rec.n, rec.albert_type, rec.endo.kind) == (4, 2, "IV", C.EndoKind.CM)
    assert sorted(rec.mult_type.values) == sorted((2, 0, 1, 1))
    rec = C.construction2(F, D, orbit, datum, phi, "NonSplit")
    assert (rec.g, rec.n, rec.endo.kind, rec.endo.centre_degree) == (8, 4, C.EndoKind.QUAT_CM, 4)


def test_construction2_viehweg_zuo():
    F, D, orbit, datum = vz()
    t = all_partial_cm_types(datum)[0]
    rec = C.construction2(F, D, orbit, datum, t, "Split")
    assert (rec.g, rec.n) == (20, 4)
    assert all(rec.inputs["viehweg_zuo"].values())


def test_construction2_rejects_wrong_sigma():
    F, D, orbit, _ = unitary()
    for sigma in ([], [0, 1]):
        datum = make_datum(C4_CM, [[0, 2], [1, 3]], sigma)
        with pytest.raises(OrbitMismatch):
            C.construction2(F, D, orbit, datum, all_partial_cm_types(datum)[0])


def test_construction2_rejects_full_orbit():
    F, D, _, datum = unitary()
    with pytest.raises(OrbitMismatch):
        C.construction2(F, D, make_orbit(F.group, 0b11), datum, mask_of([1]))


def test_construction2_rejects_imprimitive():
    # C2 x C4 regular: find a datum with [k:Q] = 2 over the singleton orbit of a quadratic F,
    # and an imprimitive phi; both tests must refuse it
    F, D, orbit, _ = unitary()
    seen = 0
    for name, M in cm_corpus().items():
        if M.degree != 8:
            continue
        for datum in all_data(M):
            if datum.k_degree != 2 or bin(datum.sigma_set).count("1") != 1:
                continue
            for t in all_partial_cm_types(datum):
                try:
                    C.construction2(F, D, orbit, datum, t, "Split")
                except NotPrimitive:
                    seen += 1
    assert seen > 0


def test_records_satisfy_centre_checks():
    for F, D, orbit, datum in (unitary(), vz()):
        for t in all_partial_cm_types(datum):
            rec = C.construction2(F, D, orbit, datum, t, "Split")
            f = rec.mult_type
            assert all(f(x) + f(datum.E.bar(x)) == rec.n for x in range(datum.degree))
            assert len(set(f.values)) >= 2
            assert rec.dim_V == 2 * rec.g == datum.degree * rec.n


def test_combine_examples():
    D = mumford_data()
    mum = C.construction1(D.field, D)
    elliptic = C.cm_factor(PartialCMType(make_datum(QUAD_CM, [[0, 1]], [0]), 1))
    assert C.combine_nonsimple(elliptic, [(mum, 1)]).g == 5
    assert C.combine_nonsimple(None, [(mum, 2)]).g == 8
    with pytest.raises(DuplicateIsotype):
        C.combine_nonsimple(None, [(mum, 1), (mum, 1)])
    other = QuaternionData(D.field, 1)
    single = make_orbit(D.field.group, 1)
    pair = make_orbit(D.field.group, 0b11)
    d_single = make_datum(C6_CM, [[0, 3], [1, 4], [2, 5]], [1, 2])
    d_pair = make_datum(C6_CM, [[0, 3], [1, 4], [2, 5]], [0])
    r1 = C.construction2(D.field, D, single, d_single, all_partial_cm_types(d_single)[0])
    r2 = C.construction2(D.field, D, pair, d_pair, all_partial_cm_types(d_pair)[0])
    both = C.combine_nonsimple(None, [(r1, 1), (r2, 1)])
    assert both.g == r1.g + r2.g
    with pytest.raises(DuplicateIsotype):
        C.combine_nonsimple(None, [(r1, 1), (r1, 2)])
    with pytest.raises(MixedAdjointData):
        C.combine_nonsimple(None, [(mum, 1), (C.construction2(D.field, other, single, d_single, all_partial_cm_types(d_single)[0]), 1)])


def test_catalog_examples():
    D = mumford_data()
    recs = C.catalog(D.field, D, 4)
    assert [(r.albert_type, r.g) for r in recs] == [("I", 4)]
    D = type_iii_data()
    recs = C.catalog(D.field, D, 8)
    assert [(r.albert_type, r.g, r.r) for r in recs] == [("III", 4, 1), ("III", 8, 2)]
    assert C.catalog(D.field, D, 3) == []


# ---------------------------------------------------------------------------
# completeness against an independent nested-loop generator


def brute_valid_phis(datum):
    E = datum.E
    over = {x for x in range(E.degree) if datum.sigma_set >> datum.k_of(x) & 1}
    for bits in range(1 << E.degree):
        phi = set(members(bits))
        if not phi <= over:
            continue
        pairs = [frozenset((x, E.bar(x))) for x in phi]
        if len(set(pairs)) != len(pairs):
            continue
        if set().union(*pairs) != over:
            continue
        if len(set(pairs)) * 2 != len(over):
            continue
        yield bits


def brute_primitive(datum, phi):
    G = list(datum.E.group.elements)
    n = datum.degree
    for x, y in itertools.permutations(range(n), 2):
        if datum.k_of(x) == datum.k_of(y) and not any(phi >> g(x) & 1 and not phi >> g(y) & 1 for g in G):
            return False
    return True


def brute_sigma_match(F, D, orbit, datum):
    Gk_blocks = datum.to_k_from_E.blocks
    k = len(Gk_blocks)
    if k != orbit.size:
        return False
    target = [J for J in orbit.members if not J >> D.sigma_nc & 1]
    for beta in itertools.permutations(orbit.members):
        if {beta[i] for i in members(datum.sigma_set)} != set(target):
            continue
        # equivariance: the induced permutation groups on k and on the orbit correspond under beta
        on_k = {tuple(datum.to_k_from_E(g(Gk_blocks[i][0])) for i in range(k)) for g in datum.E.group.elements}
        on_I = {tuple(beta.index(g.act_on_subset(beta[i])) for i in range(k)) for g in F.group.elements}
        if on_k == on_I:
            return True
    return False


def brute_iso(d1, p1, d2, p2):
    n = d1.degree
    G2 = {g.images for g in d2.E.group.elements}
    for pi in itertools.permutations(range(n)):
        if any(pi[d1.E.bar(x)] != d2.E.bar(pi[x]) for x in range(n)):
            continue
        if any((p1 >> x & 1) != (p2 >> pi[x] & 1) for x in range(n)):
            continue
        if any((d1.k_of(x) == d1.k_of(y)) != (d2.k_of(pi[x]) == d2.k_of(pi[y])) for x in range(n) for y in range(n)):
            continue
        inv = [pi.index(i) for i in range(n)]
        if {tuple(pi[g(inv[i])] for i in range(n)) for g in d1.E.group.elements} == G2:
            return True
    return False


def brute_catalog(F, D, g_max, data, flags=("Split", "NonSplit")):
    m = F.degree
    out = []
    g1 = 2 ** (m - 1) if not any(v for v in _cores(D).values()) else 2 ** m
    for r in range(1, g_max // g1 + 1):
        out.append(("Construction1", g1 * r, (1 << m) - 1, None, r, None))
    classes = []
    for orbit in enumerate_orbits(F):
        if not orbit.is_proper:
            continue
        for datum in data:
            if not brute_sigma_match(F, D, orbit, datum):
                continue
            for phi in brute_valid_phis(datum):
                if not brute_primitive(datum, phi):
                    continue
                for flag in flags:
                    g_base = datum.degree * 2 ** (orbit.ell - 1 if flag == "Split" else orbit.ell)
                    for r in range(1, g_max // g_base + 1):
                        key = ("Construction2", g_base * r, orbit.canonical, flag, r)
                        if any(k == key and brute_iso(d, p, datum, phi) for k, d, p in classes):
                            continue
                        classes.append((key, datum, phi))
                        out.append(key + (datum.degree,))
    return sorted(out, key=repr)


def _cores(D):
    from shimura_atlas.brauer import cores_to_Q_local_invariants
    return cores_to_Q_local_invariants(D)


def test_catalog_matches_brute_force():
    D = mumford_data()
    F = D.field
    data = [d for d in all_data(C6_CM)] + [d for d in all_data(C4_CM)]
    entries = [C.CorpusEntry(d) for d in data]
    g_max = 12
    recs = C.catalog(F, D, g_max, entries)
    simple = [r for r in recs if r.provenance != "NonsimpleCombination"]
    ours = sorted(
        [("Construction1", r.g, r.orbit.canonical, None, r.r, None) if r.provenance == "Construction1"
         else ("Construction2", r.g, r.orbit.canonical, r.case_flag.value, r.r, r.inputs["E_degree"])
         for r in simple],
        key=repr,
    )
    assert ours == brute_catalog(F, D, g_max, data)
    # nonsimple: every set of >= 2 simple records with distinct orbits and total g <= g_max
    expected = 0
    for k in range(2, len(simple) + 1):
        for combo in itertools.combinations(simple, k):
            if len({r.orbit.canonical for r in combo}) == k and sum(r.g for r in combo) <= g_max:
                expected += 1
    assert sum(r.provenance == "NonsimpleCombination" for r in recs) == expected
    assert all(r.g <= g_max for r in recs)
    assert recs == sorted(recs, key=lambda r: r.sort_key())


def test_catalog_is_deterministic():
    F, D, _, datum = unitary()
    entries = [C.CorpusEntry(d) for d in all_data(C4_CM)]
    a = [r.to_dict() for r in C.catalog(F, D, 8, entries)]
    b = [r.to_dict() for r in C.catalog(F, D, 8, list(reversed(entries)))]
    assert a == b
