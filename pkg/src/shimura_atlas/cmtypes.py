"""Partial CM types relative to (k, Sigma), primitivity, multiplication types.

Conventions: ``phi`` is a bitmask over Emb(E).  ``datum.to_E0`` restricts
Emb(E) -> Emb(E_0) (blocks are conjugate pairs), ``datum.to_k`` restricts
Emb(E_0) -> Emb(k), and ``sigma_set`` is a bitmask over Emb(k).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Iterator, Sequence

from . import intlattice
from .errors import InvalidModel, InvalidPartialCMType, NotClassicalCMType
from .fieldmodel import (
    CMModel,
    SubfieldMap,
    Violation,
    block_map,
    block_systems,
    real_quotient,
    validate_cm_model,
)
from .orbitrep import permute_vector
from .permgroup import PermGroup, mask_of, members


@dataclass(frozen=True)
class CMDatum:
    E: CMModel
    to_E0: SubfieldMap
    to_k: SubfieldMap
    sigma_set: int

    @property
    def degree(self) -> int:
        return self.E.degree

    @property
    def k_degree(self) -> int:
        return self.to_k.target_size

    @cached_property
    def to_k_from_E(self) -> SubfieldMap:
        return self.to_E0.then(self.to_k)

    def k_of(self, x: int) -> int:
        """Index in Emb(k) of the restriction of x in Emb(E)."""
        return self.to_k_from_E(x)

    @property
    def is_classical(self) -> bool:
        return self.k_degree == 1 and self.sigma_set == 1

    @property
    def k_is_E0(self) -> bool:
        return self.k_degree == self.to_E0.target_size

    def validate(self) -> list[Violation]:
        out = list(validate_cm_model(self.E))
        if out:
            return out
        if self.to_E0.blocks != real_quotient(self.E).blocks:
            out.append(Violation("E0-blocks", "to_E0 blocks are not the conjugate pairs"))
        if self.to_k.source_size != self.to_E0.target_size:
            out.append(Violation("k-blocks", "to_k does not start at Emb(E_0)"))
        elif not self.to_k.is_invariant():
            out.append(Violation("k-blocks", f"partition {self.to_k.blocks} of Emb(E_0) is not group-invariant"))
        if self.sigma_set >> self.k_degree:
            out.append(Violation("sigma-subset", f"Sigma={self.sigma_set:#b} is not a subset of Emb(k)"))
        return out

    def sigma_members(self) -> list[int]:
        return members(self.sigma_set)


def make_datum(E: CMModel, k_blocks: Sequence[Sequence[int]], sigma: Sequence[int]) -> CMDatum:
    """Build a datum from a partition of Emb(E) into bar-stable k-fibers.

    ``sigma`` indexes the k-fibers in the order of their least element.
    """
    to_E0 = real_quotient(E)
    E0_blocks = []
    for blk in sorted(tuple(sorted(b)) for b in k_blocks):
        ids = sorted({to_E0(x) for x in blk})
        if sorted(y for t in ids for y in to_E0.blocks[t]) != list(blk):
            raise InvalidModel(f"k-fiber {list(blk)} is not a union of conjugate pairs")
        E0_blocks.append(ids)
    to_k = block_map(to_E0.target_group, E0_blocks)
    datum = CMDatum(E, to_E0, to_k, mask_of(sigma))
    bad = datum.validate()
    if bad:
        raise InvalidModel("; ".join(map(str, bad)))
    return datum


def k_levels(E: CMModel) -> list[SubfieldMap]:
    """All subfields k of E_0, as maps Emb(E_0) -> Emb(k)."""
    return block_systems(real_quotient(E).target_group)


def all_data(E: CMModel) -> Iterator[CMDatum]:
    """Every (k, Sigma) for the model E."""
    to_E0 = real_quotient(E)
    for to_k in k_levels(E):
        for sigma in range(1 << to_k.target_size):
            yield CMDatum(E, to_E0, to_k, sigma)


@dataclass(frozen=True)
class PartialCMType:
    datum: CMDatum
    phi: int

    def members(self) -> list[int]:
        return members(self.phi)


def validate_partial_cm(t: PartialCMType) -> list[Violation]:
    """Check that phi -> Emb(E_0) is a bijection onto the E_0-embeddings over Sigma."""
    d = t.datum
    out = list(d.validate())
    if out:
        return out
    if t.phi >> d.degree:
        return [Violation("subset", f"phi={t.phi:#b} is not a subset of Emb(E)")]
    hit: dict[int, int] = {}
    for x in t.members():
        y = d.to_E0(x)
        if y in hit:
            out.append(Violation("injective", f"{hit[y]} and {x} both restrict to E_0-embedding {y}"))
        hit.setdefault(y, x)
        if not d.sigma_set >> d.to_k(y) & 1:
            out.append(Violation("over-sigma", f"{x} restricts to k-embedding {d.to_k(y)} outside Sigma"))
    for y in range(d.to_E0.target_size):
        if d.sigma_set >> d.to_k(y) & 1 and y not in hit:
            out.append(Violation("surjective", f"no element of phi above E_0-embedding {y}"))
    return out


def _require_valid(t: PartialCMType) -> None:
    bad = validate_partial_cm(t)
    if bad:
        raise InvalidPartialCMType("; ".join(map(str, bad)))


def all_partial_cm_types(datum: CMDatum) -> list[PartialCMType]:
    """All valid partial CM types relative to the datum's (k, Sigma)."""
    over = [y for y in range(datum.to_E0.target_size) if datum.sigma_set >> datum.to_k(y) & 1]
    out = []
    for choice in product((0, 1), repeat=len(over)):
        phi = 0
        for y, c in zip(over, choice):
            phi |= 1 << datum.to_E0.blocks[y][c]
        out.append(PartialCMType(datum, phi))
    return sorted(out, key=lambda t: t.phi)


@dataclass(frozen=True)
class MultiplicationType:
    n: int
    values: tuple[int, ...]

    def __call__(self, x: int) -> int:
        return self.values[x]

    def is_constant(self) -> bool:
        return len(set(self.values)) <= 1


def multiplication_type(t: PartialCMType, n: int) -> MultiplicationType:
    """f(x) = n on phi, 0 on bar(phi), n/2 elsewhere."""
    _require_valid(t)
    if n <= 0 or n % 2:
        raise ValueError(f"n={n} must be a positive even integer")
    bar = t.datum.E.bar
    vals = []
    for x in range(t.datum.degree):
        if t.phi >> x & 1:
            vals.append(n)
        elif t.phi >> bar(x) & 1:
            vals.append(0)
        else:
            vals.append(n // 2)
    return MultiplicationType(n, tuple(vals))


def is_primitive_definition(t: PartialCMType) -> bool:
    """Brute-force quantifier check: every pair in a common k-fiber is separated by phi."""
    _require_valid(t)
    d = t.datum
    G = d.E.group.elements
    # hits[x] = {gamma : gamma(x) in phi}, as a bitmask over the group elements
    hits = [sum(1 << i for i, g in enumerate(G) if t.phi >> g(x) & 1) for x in range(d.degree)]
    for x in range(d.degree):
        for y in range(d.degree):
            if x == y or d.k_of(x) != d.k_of(y):
                continue
            # need some gamma with gamma(x) in phi and gamma(y) not in phi
            if not hits[x] & ~hits[y]:
                return False
    return True


def is_primitive_stabilizer(t: PartialCMType, n: int) -> bool:
    """Stab(x) == Stab(P(x)) & Stab(e_x) at x = 0, with Stab(e_x) from the multiplication type.

    delta stabilizes e_x iff f(gamma(delta(x))) = f(gamma(x)) for all gamma,
    i.e. iff x and delta(x) have the same f-profile over the group.
    """
    f = multiplication_type(t, n)
    d = t.datum
    G = d.E.group.elements
    x = 0
    fiber = d.to_k_from_E.fiber_mask(d.k_of(x))
    vals = f.values
    profiles: dict[int, tuple[int, ...]] = {}

    def profile(y: int) -> tuple[int, ...]:
        if y not in profiles:
            profiles[y] = tuple(vals[g.images[y]] for g in G)
        return profiles[y]

    # Stab(x) lies in both Stab(P) and Stab(e_x); equality fails iff some
    # delta in Stab(P) moves x yet fixes e_x.  P is a block through x, so
    # delta(P) = P iff delta(x) is in P.
    stab_P = [g for g in G if fiber >> g.images[x] & 1]
    return all(g(x) == x or profile(g(x)) != profile(x) for g in stab_P)


def cm_subfield_quotients(E: CMModel) -> list[SubfieldMap]:
    """Block systems of proper CM subfields: coarser than points, bar free on blocks."""
    out = []
    for q in block_systems(E.group):
        if q.target_size == E.degree:
            continue
        b = q.induced(E.bar)
        if b is not None and all(b(i) != i for i in range(q.target_size)):
            out.append(q)
    return out


def induced_from_subfield(t: PartialCMType) -> bool:
    """True iff the classical CM type phi is a union of fibers over a proper CM subfield."""
    _require_valid(t)
    if not t.datum.is_classical:
        raise NotClassicalCMType("need k = Q and Sigma = Emb(Q)")
    for q in cm_subfield_quotients(t.datum.E):
        if all(_union_of(t.phi, blk) for blk in q.blocks):
            return True
    return False


def _union_of(phi: int, blk: Sequence[int]) -> bool:
    hits = sum(phi >> x & 1 for x in blk)
    return hits in (0, len(blk))


@dataclass(frozen=True)
class CentralTorus:
    cochar_basis: tuple[tuple[int, ...], ...]
    rank: int

    def contains(self, v: Sequence[int]) -> bool:
        return intlattice.contains([list(r) for r in self.cochar_basis], v)


def hodge_cocharacter(f: MultiplicationType) -> tuple[int, ...]:
    """Coefficients 2 f(x) / n of the central part of the Hodge cocharacter."""
    return tuple(2 * v // f.n for v in f.values)


def central_torus(f: MultiplicationType, group: PermGroup) -> CentralTorus:
    """Saturated cocharacter lattice of the smallest subtorus of T_E through which the cocharacter factors."""
    a = hodge_cocharacter(f)
    if len(a) != group.ground_size:
        raise InvalidModel("multiplication type and group act on different sets")
    orbit = {a}
    queue = [a]
    while queue:
        v = queue.pop()
        for g in group.generators:
            w = permute_vector(g, v)
            if w not in orbit:
                orbit.add(w)
                queue.append(w)
    basis = intlattice.saturate(sorted(orbit))
    return CentralTorus(tuple(tuple(r) for r in basis), len(basis))


def contains_weight(Z: CentralTorus, size: int) -> bool:
    return Z.contains([1] * size)


def in_unitary_torus(Z: CentralTorus, E: CMModel) -> bool:
    """Every basis vector v has v_x + v_bar(x) independent of x."""
    for v in Z.cochar_basis:
        if len({v[x] + v[E.bar(x)] for x in range(E.degree)}) != 1:
            return False
    return True
