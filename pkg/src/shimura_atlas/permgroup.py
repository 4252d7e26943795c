"""Finite permutation groups acting on {0, ..., n-1} and on subsets of it.

Subsets are plain ``int`` bitmasks: bit ``i`` set means ``i`` is a member.
Groups are materialized by full closure (no Schreier-Sims); the closure is
capped by a size limit, overridable through ``SHIMURA_ATLAS_GROUP_LIMIT``.
"""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

from .errors import DimensionMismatch, GroupTooLarge

DEFAULT_GROUP_LIMIT = 100_000


def group_limit() -> int:
    raw = os.environ.get("SHIMURA_ATLAS_GROUP_LIMIT")
    return int(raw) if raw else DEFAULT_GROUP_LIMIT


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection of {0, ..., n-1}, stored as its image array."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(len(self.images))):
            raise ValueError(f"not a permutation: {self.images}")

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> Permutation:
        """Build from disjoint cycles, e.g. ``from_cycles(4, (0, 1), (2, 3))``."""
        img = list(range(n))
        for cyc in cycles:
            for a, b in zip(cyc, tuple(cyc[1:]) + (cyc[0],)):
                img[a] = b
        return cls(tuple(img))

    @property
    def size(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Permutation) -> Permutation:
        # (p * q)(x) = p(q(x))
        if other.size != self.size:
            raise DimensionMismatch("permutations on different ground sets")
        return Permutation(tuple(self.images[i] for i in other.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.size
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def act_on_subset(self, mask: int) -> int:
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= 1 << self.images[i]
            mask >>= 1
            i += 1
        return out

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(self.size):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            nxt = self.images[start]
            while nxt != start:
                cyc.append(nxt)
                seen.add(nxt)
                nxt = self.images[nxt]
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def __repr__(self):
        cyc = self.cycles()
        body = "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"
        return f"Permutation{body}"


def close(generators: Sequence[Permutation], limit: int | None = None) -> list[Permutation]:
    """Breadth-first closure of ``generators``, sorted by image array.

    Raises GroupTooLarge as soon as more than ``limit`` elements are found.
    """
    if not generators:
        raise ValueError("need at least one generator")
    n = generators[0].size
    if any(g.size != n for g in generators):
        raise DimensionMismatch("generators act on different ground sets")
    if limit is None:
        limit = group_limit()
    ident = Permutation.identity(n)
    seen = {ident}
    queue = deque([ident])
    while queue:
        x = queue.popleft()
        for g in generators:
            y = g * x
            if y not in seen:
                seen.add(y)
                if len(seen) > limit:
                    raise GroupTooLarge(f"group closure exceeds limit {limit}")
                queue.append(y)
    return sorted(seen)


@dataclass(frozen=True)
class PermGroup:
    ground_size: int
    generators: tuple[Permutation, ...]
    limit: int | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if not self.generators:
            object.__setattr__(self, "generators", (Permutation.identity(self.ground_size),))
        if any(g.size != self.ground_size for g in self.generators):
            raise DimensionMismatch("generator does not act on the ground set")

    @classmethod
    def from_images(cls, n: int, generators: Iterable[Sequence[int]], limit: int | None = None) -> PermGroup:
        return cls(n, tuple(Permutation(tuple(g)) for g in generators), limit)

    @classmethod
    def cyclic(cls, n: int) -> PermGroup:
        return cls(n, (Permutation(tuple((i + 1) % n for i in range(n))),))

    @classmethod
    def symmetric(cls, n: int) -> PermGroup:
        if n < 2:
            return cls(n, ())
        gens = (Permutation.from_cycles(n, (0, 1)), Permutation(tuple((i + 1) % n for i in range(n))))
        return cls(n, gens)

    @classmethod
    def trivial(cls, n: int) -> PermGroup:
        return cls(n, ())

    @cached_property
    def elements(self) -> tuple[Permutation, ...]:
        return tuple(close(self.generators, self.limit))

    @cached_property
    def element_set(self) -> frozenset[Permutation]:
        return frozenset(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[Permutation]:
        return iter(self.elements)

    def __len__(self) -> int:
        return self.order

    def __contains__(self, p: Permutation) -> bool:
        return p in self.element_set

    @property
    def full_mask(self) -> int:
        return (1 << self.ground_size) - 1

    def is_transitive(self) -> bool:
        return self.ground_size == 0 or len(orbit_of_point(self, 0)) == self.ground_size

    def same_elements(self, other: PermGroup) -> bool:
        return self.ground_size == other.ground_size and self.element_set == other.element_set


def orbit_of_point(G: PermGroup, x: int) -> set[int]:
    if not 0 <= x < G.ground_size:
        raise IndexError(f"point {x} outside ground set of size {G.ground_size}")
    orbit = {x}
    queue = [x]
    while queue:
        y = queue.pop()
        for g in G.generators:
            z = g(y)
            if z not in orbit:
                orbit.add(z)
                queue.append(z)
    return orbit


def _check_mask(G: PermGroup, mask: int) -> None:
    if mask < 0 or mask >> G.ground_size:
        raise DimensionMismatch(f"subset {mask:#b} wider than ground set of size {G.ground_size}")


def orbit_of_subset(G: PermGroup, mask: int) -> list[int]:
    """The orbit of a subset, ascending; element 0 is the canonical representative."""
    _check_mask(G, mask)
    orbit = {mask}
    queue = [mask]
    while queue:
        y = queue.pop()
        for g in G.generators:
            z = g.act_on_subset(y)
            if z not in orbit:
                orbit.add(z)
                queue.append(z)
    return sorted(orbit)


def canonical_subset(G: PermGroup, mask: int) -> int:
    return orbit_of_subset(G, mask)[0]


def setwise_stabilizer(G: PermGroup, mask: int) -> PermGroup:
    _check_mask(G, mask)
    stab = tuple(g for g in G.elements if g.act_on_subset(mask) == mask)
    return PermGroup(G.ground_size, stab, G.limit)


def point_stabilizer(G: PermGroup, x: int) -> PermGroup:
    return setwise_stabilizer(G, 1 << x)


def mask_of(points: Iterable[int]) -> int:
    out = 0
    for p in points:
        out |= 1 << p
    return out


def members(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: int) -> int:
    return bin(mask).count("1")
