"""Galois orbits of subsets of Emb(F) and the invariants of their representations.

For an orbit ``I`` of nonempty subsets of Emb(F), the irreducible
representation rho_I of Res_{F/Q} SL_1(D) is never built; only its discrete
invariants are: the degree of its centre k_I (= orbit length), the degree of
its endomorphism algebra (1 or 2), its Q-dimension and the multiset of
geometric constituents, one tensor product of standard representations per
orbit member.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .brauer import QuaternionData, cores_to_Q_is_trivial, real_invariant_along
from .errors import DimensionMismatch, EmptyOrbitMember, InvalidModel
from .fieldmodel import TotallyRealModel
from .permgroup import PermGroup, orbit_of_subset, popcount, setwise_stabilizer


@dataclass(frozen=True)
class SubsetOrbit:
    canonical: int
    members: tuple[int, ...]
    ell: int
    stab: PermGroup
    ground_size: int

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def is_full(self) -> bool:
        return self.members == ((1 << self.ground_size) - 1,)

    @property
    def is_singletons(self) -> bool:
        return self.ell == 1

    @property
    def is_proper(self) -> bool:
        """Nonempty sets, and not the orbit {Emb(F)}."""
        return self.ell > 0 and not self.is_full

    def label(self) -> str:
        return "{" + ",".join(str(i) for i in range(self.ground_size) if self.canonical >> i & 1) + "}"


def make_orbit(group: PermGroup, mask: int) -> SubsetOrbit:
    orb = orbit_of_subset(group, mask)
    canon = orb[0]
    return SubsetOrbit(canon, tuple(orb), popcount(canon), setwise_stabilizer(group, canon), group.ground_size)


def _is_canonical(group: PermGroup, mask: int) -> bool:
    return all(g.act_on_subset(mask) >= mask for g in group.elements)


def enumerate_orbits(F: TotallyRealModel, nonempty_only: bool = True) -> list[SubsetOrbit]:
    """Every orbit of subsets of Emb(F), sorted by (ell, canonical bitmask)."""
    bad = F.validate()
    if bad:
        raise InvalidModel("; ".join(map(str, bad)))
    G = F.group
    out = []
    for mask in range(1 if nonempty_only else 0, 1 << G.ground_size):
        if _is_canonical(G, mask):
            out.append(make_orbit(G, mask))
    out.sort(key=lambda o: (o.ell, o.canonical))
    return out


@dataclass(frozen=True)
class IrrepRecord:
    orbit: SubsetOrbit
    k_degree: int
    endo_degree: int
    dim_W: int
    qbar_decomposition: tuple[tuple[int, int], ...]


def irrep_record(orbit: SubsetOrbit, D: QuaternionData) -> IrrepRecord:
    """Invariants of rho_I.

    Proper orbits: the class of the endomorphism algebra at the real place
    attached to J is the sum of D's real invariants over J, and some member
    gives 1/2, so the algebra is quaternionic.  Full orbit: it is the
    division algebra of Cores_{F/Q}(D).
    """
    if orbit.ground_size != D.degree:
        raise DimensionMismatch("orbit and quaternion data live over different fields")
    if orbit.ell == 0:
        raise EmptyOrbitMember("the orbit of the empty set carries no representation")
    if orbit.is_full:
        endo = 1 if cores_to_Q_is_trivial(D) else 2
    elif any(real_invariant_along(D, J) for J in orbit.members):
        endo = 2
    else:
        raise AssertionError("proper orbit with split real classes everywhere; D is not valid")
    k_degree = orbit.size
    return IrrepRecord(
        orbit=orbit,
        k_degree=k_degree,
        endo_degree=endo,
        dim_W=k_degree * endo * 2 ** orbit.ell,
        qbar_decomposition=tuple((J, endo) for J in orbit.members),
    )


@dataclass(frozen=True)
class TorusOrbitRep:
    lattice_rank: int
    orbit: tuple[tuple[int, ...], ...]
    endo_field_degree: int


def permute_vector(g, v: Sequence[int]) -> tuple[int, ...]:
    # coordinate i moves to g(i)
    out = [0] * len(v)
    for i, a in enumerate(v):
        out[g(i)] = a
    return tuple(out)


def torus_orbit_rep(action: PermGroup, seed: Sequence[int]) -> TorusOrbitRep:
    """Galois orbit of a character of an induced torus; End of rho is k(seed)."""
    if len(seed) != action.ground_size:
        raise DimensionMismatch(f"seed of length {len(seed)} for a rank-{action.ground_size} lattice")
    seed = tuple(int(a) for a in seed)
    orbit = {seed}
    queue = [seed]
    while queue:
        v = queue.pop()
        for g in action.generators:
            w = permute_vector(g, v)
            if w not in orbit:
                orbit.add(w)
                queue.append(w)
    return TorusOrbitRep(action.ground_size, tuple(sorted(orbit)), len(orbit))
