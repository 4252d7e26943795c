"""Shared corpora: transitive groups, CM models, quaternion data."""
from __future__ import annotations

import itertools
import random
import sys

import pytest
from hypothesis import strategies as st

from shimura_atlas.brauer import QuaternionData
from shimura_atlas.fieldmodel import CMModel, TotallyRealModel, validate_cm_model
from shimura_atlas.permgroup import Permutation, PermGroup


def perm(*images):
    return Permutation(tuple(images))


def cycles(n, *cs):
    return Permutation.from_cycles(n, *cs)


def dihedral(n: int) -> PermGroup:
    rot = [(i + 1) % n for i in range(n)]
    ref = [(-i) % n for i in range(n)]
    return PermGroup.from_images(n, [rot, ref])


def regular(G: PermGroup) -> PermGroup:
    """Left-regular action of G on its own elements."""
    elems = list(G.elements)
    pos = {g: i for i, g in enumerate(elems)}
    gens = [Permutation(tuple(pos[g * h] for h in elems)) for g in G.generators]
    return PermGroup(len(elems), tuple(gens))


def wreath_c2(d: int) -> PermGroup:
    """C2 wr S_d on 2d points: pairs {i, i+d}."""
    n = 2 * d
    swap = [d if i == 0 else 0 if i == d else i for i in range(n)]
    gens = [swap]
    if d > 1:
        cyc = [(i + 1) % d + (i // d) * d for i in range(n)]
        tr = list(range(n))
        tr[0], tr[1], tr[d], tr[d + 1] = 1, 0, d + 1, d
        gens += [cyc, tr]
    return PermGroup.from_images(n, gens)


def product_regular(*orders: int) -> PermGroup:
    """Regular action of C_a x C_b x ... ."""
    shape = list(orders)
    pts = list(itertools.product(*[range(a) for a in shape]))
    pos = {p: i for i, p in enumerate(pts)}
    gens = []
    for k, a in enumerate(shape):
        gens.append([pos[tuple((x + 1) % a if j == k else x for j, x in enumerate(p))] for p in pts])
    return PermGroup.from_images(len(pts), gens)


def quaternion_group_regular() -> PermGroup:
    # Q8 as a subgroup of S8: i, j acting on {1,i,j,k,-1,-i,-j,-k} = 0..7 by left multiplication
    mul_i = [1, 4, 3, 6, 5, 0, 7, 2]
    mul_j = [2, 7, 4, 1, 6, 3, 0, 5]
    return PermGroup.from_images(8, [mul_i, mul_j])


def transitive_corpus() -> dict[str, PermGroup]:
    out = {f"C{n}": PermGroup.cyclic(n) for n in range(1, 9)}
    out.update({f"D{n}": dihedral(n) for n in range(3, 9)})
    out["S3"] = PermGroup.symmetric(3)
    out["S4"] = PermGroup.symmetric(4)
    out["A4"] = PermGroup.from_images(4, [[1, 2, 0, 3], [0, 2, 3, 1]])
    out["S5"] = PermGroup.symmetric(5)
    out["V4reg"] = product_regular(2, 2)
    out["C2xC4reg"] = product_regular(2, 4)
    out["C2^3reg"] = product_regular(2, 2, 2)
    out["Q8reg"] = quaternion_group_regular()
    out["D4reg"] = regular(dihedral(4))
    out["C2wrS3"] = wreath_c2(3)
    out["C2wrS4"] = wreath_c2(4)
    return out


def cm_models_of(G: PermGroup) -> list[CMModel]:
    """All CM models on G: bar ranges over central fixed-point-free involutions in G."""
    out = []
    for b in G.elements:
        M = CMModel(G, b)
        if not validate_cm_model(M):
            out.append(M)
    return out


def cm_corpus(include_large: bool = False) -> dict[str, CMModel]:
    groups = {
        "C2": PermGroup.cyclic(2),
        "C4": PermGroup.cyclic(4),
        "V4": product_regular(2, 2),
        "C6": PermGroup.cyclic(6),
        "D6hex": dihedral(6),
        "C2wrS2": wreath_c2(2),
        "C2wrS3": wreath_c2(3),
        "C2wrS4": wreath_c2(4),
        "C8": PermGroup.cyclic(8),
        "C2xC4reg": product_regular(2, 4),
        "C2^3reg": product_regular(2, 2, 2),
        "Q8reg": quaternion_group_regular(),
        "D4reg": regular(dihedral(4)),
        "D8oct": dihedral(8),
        "C10": PermGroup.cyclic(10),
        "D10dec": dihedral(10),
    }
    if include_large:
        groups["C2wrS5"] = wreath_c2(5)
    out = {}
    for name, G in groups.items():
        for i, M in enumerate(cm_models_of(G)):
            out[f"{name}/bar{i}"] = M
    return out


@pytest.fixture(scope="session")
def transitive_groups():
    return transitive_corpus()


@pytest.fixture(scope="session")
def cm_models():
    return cm_corpus()


C3 = PermGroup.cyclic(3)
C4_CM = CMModel(PermGroup.cyclic(4), perm(2, 3, 0, 1))
# biquadratic, regular labels e=0, a=1, b=2, ab=3; bar = b
V4_CM = CMModel(PermGroup.from_images(4, [[1, 0, 3, 2], [2, 3, 0, 1]]), perm(2, 3, 0, 1))
QUAD_CM = CMModel(PermGroup.cyclic(2), perm(1, 0))


def mumford_data() -> QuaternionData:
    return QuaternionData(TotallyRealModel(C3), 0)


def type_ii_data() -> QuaternionData:
    return QuaternionData(TotallyRealModel(C3), 0, (("p", ("1/2",)), ("q", ("1/2",))))


def type_iii_data() -> QuaternionData:
    return QuaternionData(TotallyRealModel(PermGroup.cyclic(2)), 0, (("p", ("1/2",)),))


def random_quaternion_data(rng: random.Random, m: int, G: PermGroup) -> QuaternionData:
    """A valid D: random sigma_nc, random finite blocks, fixed up for reciprocity."""
    F = TotallyRealModel(G)
    blocks = []
    for i in range(rng.randrange(0, 4)):
        invs = tuple(rng.choice(("0", "1/2")) for _ in range(rng.randrange(1, m + 1)))
        blocks.append((f"p{i}", invs))
    real_sum = (m - 1) % 2
    fin_sum = sum(v == "1/2" for _, b in blocks for v in b) % 2
    if (real_sum + fin_sum) % 2:
        blocks.append((f"p{len(blocks)}", ("1/2",)))
    return QuaternionData(F, rng.randrange(m), tuple(blocks))


@st.composite
def quaternion_data(draw, groups: dict[str, PermGroup] | None = None):
    """Hypothesis strategy over valid quaternion data on cyclic/symmetric fields of degree 2..7."""
    m = draw(st.integers(2, 7))
    G = draw(st.sampled_from([PermGroup.cyclic(m), dihedral(m) if m >= 3 else PermGroup.cyclic(m)]))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_quaternion_data(random.Random(seed), m, G)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
