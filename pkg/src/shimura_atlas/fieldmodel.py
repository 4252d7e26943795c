"""Combinatorial models of totally real and CM fields.

A field K is represented by the Galois action on Emb(K) = Hom(K, Qbar),
realized as a transitive permutation group on {0, ..., [K:Q]-1}.  A CM field
additionally carries complex conjugation ``bar``.  Subfields are block
systems; the subfield's embeddings are the blocks.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Iterator, Sequence

from .errors import IndexOutOfRange, InvalidModel
from .permgroup import Permutation, PermGroup, mask_of, orbit_of_point


@dataclass(frozen=True)
class Violation:
    axiom: str
    message: str

    def __str__(self):
        return f"{self.axiom}: {self.message}"


@dataclass(frozen=True)
class TotallyRealModel:
    group: PermGroup

    @property
    def degree(self) -> int:
        return self.group.ground_size

    def validate(self) -> list[Violation]:
        if self.degree == 0:
            return [Violation("nonempty", "Emb(F) is empty")]
        if not self.group.is_transitive():
            orb = sorted(orbit_of_point(self.group, 0))
            return [Violation("transitive", f"orbit of 0 is {orb}, not all of Emb(F)")]
        return []


@dataclass(frozen=True)
class CMModel:
    group: PermGroup
    bar: Permutation

    @property
    def degree(self) -> int:
        return self.group.ground_size

    def validate(self) -> list[Violation]:
        return validate_cm_model(self)


def validate_cm_model(M: CMModel) -> list[Violation]:
    """Every failed CM-model axiom, each with a witness."""
    out: list[Violation] = []
    n = M.group.ground_size
    if M.bar.size != n:
        return [Violation("size", f"bar acts on {M.bar.size} points, group on {n}")]
    if n == 0 or n % 2:
        out.append(Violation("even-degree", f"|Emb(E)| = {n} is not a positive even number"))
    if not M.group.is_transitive():
        out.append(Violation("transitive", f"orbit of 0 is {sorted(orbit_of_point(M.group, 0))}"))
    for x in range(n):
        if M.bar(M.bar(x)) != x:
            out.append(Violation("involution", f"bar(bar({x})) = {M.bar(M.bar(x))}"))
            break
    fixed = [x for x in range(n) if M.bar(x) == x]
    if fixed:
        out.append(Violation("fixed-point-free", f"bar fixes {fixed[0]}"))
    for g in M.group.generators:
        bad = next((x for x in range(n) if g(M.bar(x)) != M.bar(g(x))), None)
        if bad is not None:
            out.append(Violation(
                "equivariance",
                f"gamma={g!r}, x={bad}: gamma(bar(x))={g(M.bar(bad))} != bar(gamma(x))={M.bar(g(bad))}",
            ))
    # complex conjugation is itself an element of the Galois group
    if not out and M.bar not in M.group:
        out.append(Violation("conjugation-in-group", f"bar={M.bar!r} is not a group element"))
    return out


@dataclass(frozen=True)
class SubfieldMap:
    """Restriction Emb(source) -> Emb(target), given by a block system.

    ``blocks`` are sorted tuples, ordered by their least element; the block
    at position ``t`` is the fiber over target embedding ``t``.
    """

    group: PermGroup
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(sorted(tuple(sorted(b)) for b in self.blocks))
        object.__setattr__(self, "blocks", blocks)
        flat = sorted(x for b in blocks for x in b)
        if flat != list(range(self.group.ground_size)) or any(not b for b in blocks):
            raise InvalidModel(f"blocks {blocks} do not partition the embedding set")

    @property
    def source_size(self) -> int:
        return self.group.ground_size

    @property
    def target_size(self) -> int:
        return len(self.blocks)

    @cached_property
    def index(self) -> tuple[int, ...]:
        idx = [0] * self.source_size
        for t, b in enumerate(self.blocks):
            for x in b:
                idx[x] = t
        return tuple(idx)

    def __call__(self, x: int) -> int:
        return self.index[x]

    def fiber(self, t: int) -> set[int]:
        if not 0 <= t < self.target_size:
            raise IndexOutOfRange(f"target index {t} outside 0..{self.target_size - 1}")
        return set(self.blocks[t])

    def fiber_mask(self, t: int) -> int:
        return mask_of(self.fiber(t))

    def is_invariant(self) -> bool:
        return all(self.induced(g) is not None for g in self.group.generators)

    def induced(self, g: Permutation) -> Permutation | None:
        """Permutation of blocks induced by ``g``; None if ``g`` breaks a block."""
        img = []
        for b in self.blocks:
            targets = {self.index[g(x)] for x in b}
            if len(targets) != 1:
                return None
            img.append(targets.pop())
        if sorted(img) != list(range(self.target_size)):
            return None
        return Permutation(tuple(img))

    @cached_property
    def target_group(self) -> PermGroup:
        gens = []
        for g in self.group.generators:
            h = self.induced(g)
            if h is None:
                raise InvalidModel(f"block system {self.blocks} is not invariant under {g!r}")
            gens.append(h)
        return PermGroup(self.target_size, tuple(gens), self.group.limit)

    def then(self, other: SubfieldMap) -> SubfieldMap:
        """Compose with a map out of this map's target."""
        if other.source_size != self.target_size:
            raise InvalidModel("composed maps do not line up")
        blocks = [tuple(x for t in ob for x in self.blocks[t]) for ob in other.blocks]
        return SubfieldMap(self.group, tuple(blocks))


def block_map(group: PermGroup, blocks: Sequence[Sequence[int]]) -> SubfieldMap:
    """SubfieldMap from a partition, checking group invariance."""
    q = SubfieldMap(group, tuple(tuple(b) for b in blocks))
    if not q.is_invariant():
        raise InvalidModel(f"partition {q.blocks} is not group-invariant")
    return q


def identity_map(group: PermGroup) -> SubfieldMap:
    return SubfieldMap(group, tuple((x,) for x in range(group.ground_size)))


def to_rationals(group: PermGroup) -> SubfieldMap:
    return SubfieldMap(group, (tuple(range(group.ground_size)),))


def real_quotient(M: CMModel) -> SubfieldMap:
    """Emb(E) -> Emb(E_0): blocks are the pairs {x, bar(x)}."""
    if validate_cm_model(M):
        raise InvalidModel("; ".join(map(str, validate_cm_model(M))))
    pairs = {tuple(sorted((x, M.bar(x)))) for x in range(M.degree)}
    return block_map(M.group, sorted(pairs))


def block_systems(group: PermGroup) -> list[SubfieldMap]:
    """All group-invariant partitions of a transitive action, trivial ones included.

    Brute force over subsets containing 0; fine up to ~16 points.
    """
    n = group.ground_size
    found: dict[tuple, SubfieldMap] = {}
    for rest in range(1 << (n - 1)):
        B = 1 | (rest << 1)
        blocks = _orbit_of_block(group, B)
        if blocks is None:
            continue
        q = SubfieldMap(group, tuple(tuple(i for i in range(n) if b >> i & 1) for b in blocks))
        found.setdefault(q.blocks, q)
    return [found[k] for k in sorted(found, key=lambda bl: (-len(bl), bl))]


def _orbit_of_block(group: PermGroup, B: int) -> list[int] | None:
    orbit = {B}
    queue = [B]
    while queue:
        y = queue.pop()
        for g in group.generators:
            z = g.act_on_subset(y)
            if z not in orbit:
                if any(z & w for w in orbit):
                    return None
                orbit.add(z)
                queue.append(z)
    return sorted(orbit)


def coarsenings(q: SubfieldMap) -> list[SubfieldMap]:
    """Block systems on Emb(source) whose blocks are unions of blocks of ``q``."""
    return [q.then(p) for p in block_systems(q.target_group)]


def bar_on_blocks(M: CMModel, q: SubfieldMap) -> Permutation | None:
    return q.induced(M.bar)


# ---------------------------------------------------------------------------
# isomorphism search


def equivariant_bijections(
    G1: PermGroup,
    G2: PermGroup,
    pairing: tuple[Permutation, Permutation] | None = None,
    accept: Callable[[list[int | None]], bool] | None = None,
) -> Iterator[tuple[int, ...]]:
    """Bijections pi with pi G1 pi^-1 = G2, by backtracking.

    ``pairing=(b1, b2)`` additionally forces pi b1 = b2 pi (used for complex
    conjugation).  ``accept`` is a pruning predicate on partial assignments;
    it must return True whenever the partial map could still extend to an
    acceptable full one.
    """
    n = G1.ground_size
    if G2.ground_size != n or G1.order != G2.order:
        return
    elems2 = G2.elements
    gens1 = G1.generators
    pi: list[int | None] = [None] * n
    used = [False] * n

    def consistent() -> bool:
        for g in gens1:
            constraints = [(pi[x], pi[g(x)]) for x in range(n) if pi[x] is not None and pi[g(x)] is not None]
            if not constraints:
                continue
            if not any(all(h(a) == b for a, b in constraints) for h in elems2):
                return False
        return accept is None or accept(pi)

    def assign(x: int, y: int) -> list[int] | None:
        todo = [(x, y)]
        if pairing is not None:
            todo.append((pairing[0](x), pairing[1](y)))
        done = []
        for a, b in todo:
            if pi[a] is None and not used[b]:
                pi[a] = b
                used[b] = True
                done.append(a)
            elif pi[a] != b:
                for d in done:
                    used[pi[d]] = False
                    pi[d] = None
                return None
        return done

    def undo(done):
        for d in done:
            used[pi[d]] = False
            pi[d] = None

    def rec():
        try:
            x = pi.index(None)
        except ValueError:
            # pi g pi^-1 sends pi(i) to pi(g(i))
            ok = True
            for g in gens1:
                img = [0] * n
                for i in range(n):
                    img[pi[i]] = pi[g(i)]
                if Permutation(tuple(img)) not in G2:
                    ok = False
                    break
            if ok:
                yield tuple(pi)
            return
        for y in range(n):
            if used[y]:
                continue
            done = assign(x, y)
            if done is None:
                continue
            if consistent():
                yield from rec()
            undo(done)

    yield from rec()


def models_isomorphic(M1: CMModel, M2: CMModel) -> bool:
    return next(equivariant_bijections(M1.group, M2.group, (M1.bar, M2.bar)), None) is not None
