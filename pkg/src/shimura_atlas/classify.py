"""Classification records for isotypical and nonsimple triples (G, Y, rho).

Two recipes produce every isotypical triple over a fixed adjoint datum
(F, D):

* the corestriction recipe (orbit {Emb(F)}): Albert types I, II, III;
* the partial-CM-type recipe (proper orbit, CM field E over k_I, primitive
  Phi): Albert type IV.

Records keep only discrete invariants.  Different polarization forms on the
same representation are not distinguished.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

from .brauer import (
    INFINITY,
    QuaternionData,
    contains_sigma_nc,
    cores_to_Q_local_invariants,
    validate as validate_quaternion,
)
from .cmtypes import (
    CMDatum,
    MultiplicationType,
    PartialCMType,
    all_partial_cm_types,
    central_torus,
    contains_weight,
    in_unitary_torus,
    is_primitive_definition,
    is_primitive_stabilizer,
    multiplication_type,
    validate_partial_cm,
)
from .errors import (
    Case0Rejected,
    DuplicateIsotype,
    InconsistentData,
    InvalidData,
    InvalidPartialCMType,
    MixedAdjointData,
    NotPrimitive,
    OrbitMismatch,
)
from .fieldmodel import TotallyRealModel, block_systems, equivariant_bijections
from .orbitrep import SubsetOrbit, enumerate_orbits, irrep_record, make_orbit
from .permgroup import Permutation, PermGroup, members


class CaseFlag(str, Enum):
    SPLIT = "Split"
    NONSPLIT = "NonSplit"


class EndoKind(str, Enum):
    RATIONAL = "RationalField"
    QUAT_SPLIT = "QuatOverQ_SplitAtInfinity"
    QUAT_RAMIFIED = "QuatOverQ_RamifiedAtInfinity"
    CM = "CMField"
    QUAT_CM = "QuatOverCM"
    PRODUCT = "Product"


ALBERT_ORDER = {"I": 0, "II": 1, "III": 2, "IV": 3, "CM": 4, "nonsimple": 5}


@dataclass(frozen=True)
class EndoDescriptor:
    kind: EndoKind
    centre_degree: int
    matrix_size: int
    factors: tuple[tuple[EndoDescriptor, int], ...] = ()

    def __post_init__(self):
        if self.kind in (EndoKind.RATIONAL, EndoKind.QUAT_SPLIT, EndoKind.QUAT_RAMIFIED) and self.centre_degree != 1:
            raise ValueError(f"{self.kind.value} has centre Q")

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "centre_degree": self.centre_degree, "matrix_size": self.matrix_size}
        if self.factors:
            out["factors"] = [{"endo": e.to_dict(), "multiplicity": m} for e, m in self.factors]
        return out

    def dim_Q(self) -> int:
        if self.kind is EndoKind.PRODUCT:
            return sum(m * m * e.dim_Q() for e, m in self.factors)
        quat = 4 if self.kind in (EndoKind.QUAT_SPLIT, EndoKind.QUAT_RAMIFIED, EndoKind.QUAT_CM) else 1
        return quat * self.centre_degree * self.matrix_size ** 2


def adjoint_key(D: QuaternionData) -> tuple:
    """Identity of the adjoint datum (F, D) as plain data."""
    return (
        D.degree,
        tuple(sorted(g.images for g in D.field.group.elements)),
        D.sigma_nc,
        tuple((b.prime, tuple(str(v) for v in b.invariants)) for b in D.finite_blocks),
    )


@dataclass(frozen=True)
class ClassificationRecord:
    provenance: str
    albert_type: str
    g: int
    n: int | None
    r: int
    endo: EndoDescriptor
    dim_V: int
    mult_type: MultiplicationType | None = None
    orbit: SubsetOrbit | None = None
    case_flag: CaseFlag | None = None
    central_rank: int | None = None
    inputs: dict = field(default_factory=dict, compare=False)
    components: tuple[tuple[ClassificationRecord, int], ...] = ()
    adjoint: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def orbit_canonical(self) -> int:
        return self.orbit.canonical if self.orbit is not None else -1

    def sort_key(self) -> tuple:
        return (self.g, ALBERT_ORDER[self.albert_type], self.orbit_canonical, self.endo.kind.value)

    def to_dict(self) -> dict:
        out = {
            "provenance": self.provenance,
            "albert_type": self.albert_type,
            "g": self.g,
            "n": self.n,
            "r": self.r,
            "dim_V": self.dim_V,
            "endo": self.endo.to_dict(),
            "orbit": None,
            "case_flag": self.case_flag.value if self.case_flag else None,
            "mult_type": list(self.mult_type.values) if self.mult_type else None,
            "central_torus_rank": self.central_rank,
            "inputs": self.inputs,
        }
        if self.orbit is not None:
            out["orbit"] = {
                "canonical": self.orbit.label(),
                "ell": self.orbit.ell,
                "size": self.orbit.size,
            }
        if self.components:
            out["components"] = [{"record": c.to_dict(), "multiplicity": m} for c, m in self.components]
        return out

    def row(self) -> dict:
        """Flat view for tabular output."""
        return {
            "provenance": self.provenance,
            "albert_type": self.albert_type,
            "g": self.g,
            "n": "" if self.n is None else self.n,
            "r": self.r,
            "endo": self.endo.kind.value,
            "centre_degree": self.endo.centre_degree,
            "orbit": self.orbit.label() if self.orbit is not None else "",
            "ell": self.orbit.ell if self.orbit is not None else "",
            "case_flag": self.case_flag.value if self.case_flag else "",
            "mult_type": " ".join(map(str, self.mult_type.values)) if self.mult_type else "",
            "E_degree": self.inputs.get("E_degree", ""),
            "phi": " ".join(map(str, self.inputs.get("phi", []))),
            "components": " + ".join(f"{m}x{c.albert_type}(g={c.g})" for c, m in self.components),
        }


def _require_quaternion(D: QuaternionData) -> None:
    bad = validate_quaternion(D)
    if bad:
        raise InvalidData("; ".join(map(str, bad)))


def construction1(F: TotallyRealModel, D: QuaternionData, r: int = 1) -> ClassificationRecord:
    """The corestriction representation of Res_{F/Q} SL_1(D), r copies."""
    if D.field != F:
        raise InvalidData("quaternion data is not over the given field")
    _require_quaternion(D)
    if r < 1:
        raise ValueError("multiplicity r must be positive")
    m = F.degree
    full = make_orbit(F.group, F.group.full_mask)
    rep = irrep_record(full, D)
    local = cores_to_Q_local_invariants(D)
    trivial = not any(local.values())
    if m % 2 == 0 and trivial:
        raise InconsistentData(
            f"m={m} is even but Cores_F/Q(D) is split; the invariant at infinity must be 1/2"
        )
    if trivial:
        albert, kind = "I", EndoKind.RATIONAL
    elif not local[INFINITY]:
        albert, kind = "II", EndoKind.QUAT_SPLIT
    else:
        albert, kind = "III", EndoKind.QUAT_RAMIFIED
    dim_V = r * rep.dim_W
    g = dim_V // 2
    assert g == r * 2 ** (m - 1 if albert == "I" else m)
    return ClassificationRecord(
        provenance="Construction1",
        albert_type=albert,
        g=g,
        n=2 * g,
        r=r,
        endo=EndoDescriptor(kind, 1, r),
        dim_V=dim_V,
        orbit=full,
        central_rank=1,
        inputs={
            "m": m,
            "sigma_nc": D.sigma_nc,
            "cores_invariants": {p: str(v) for p, v in local.items()},
            "dim_W": rep.dim_W,
        },
        adjoint=adjoint_key(D),
    )


def orbit_action(F: TotallyRealModel, orbit: SubsetOrbit) -> PermGroup:
    """Action of F's Galois group on the members of an orbit (= on Emb(k_I))."""
    pos = {J: i for i, J in enumerate(orbit.members)}
    gens = [Permutation(tuple(pos[g.act_on_subset(J)] for J in orbit.members)) for g in F.group.generators]
    return PermGroup(orbit.size, tuple(gens), F.group.limit)


def orbit_sigma(D: QuaternionData, orbit: SubsetOrbit) -> int:
    """Members J of the orbit with sigma_nc not in J, as a bitmask over positions."""
    out = 0
    for i, J in enumerate(orbit.members):
        if not contains_sigma_nc(D, J):
            out |= 1 << i
    return out


def match_k_level(
    F: TotallyRealModel,
    D: QuaternionData,
    orbit: SubsetOrbit,
    datum: CMDatum,
    k_to_orbit: Sequence[int] | None = None,
) -> tuple[int, ...]:
    """An equivariant bijection Emb(k) -> orbit carrying Sigma onto {J : sigma_nc not in J}.

    Returned (and supplied) as ``k_to_orbit[i]`` = the orbit member (bitmask
    over Emb(F)) attached to k-embedding i.  A supplied map is verified;
    otherwise one is searched for.
    """
    Gk = datum.to_k.target_group
    GI = orbit_action(F, orbit)
    target_sigma = orbit_sigma(D, orbit)
    if Gk.ground_size != GI.ground_size:
        raise OrbitMismatch(f"[k:Q]={Gk.ground_size} but the orbit has {GI.ground_size} members")

    def sigma_ok(pi) -> bool:
        for i, j in enumerate(pi):
            if j is not None and (datum.sigma_set >> i & 1) != (target_sigma >> j & 1):
                return False
        return True

    if k_to_orbit is not None:
        pos = {J: i for i, J in enumerate(orbit.members)}
        if any(J not in pos for J in k_to_orbit):
            raise OrbitMismatch(f"k_to_orbit names sets outside orbit {orbit.label()}")
        pi = tuple(pos[J] for J in k_to_orbit)
        if sorted(pi) != list(range(GI.ground_size)):
            raise OrbitMismatch("supplied k_to_orbit is not a bijection")
        ok = sigma_ok(pi) and Gk.order == GI.order and all(
            Permutation(tuple(_conj_images(pi, g))) in GI for g in Gk.generators
        )
        if not ok:
            raise OrbitMismatch("supplied k_to_orbit is not an equivariant bijection matching Sigma")
    else:
        pi = next(equivariant_bijections(Gk, GI, accept=sigma_ok), None)
        if pi is None:
            raise OrbitMismatch(
                f"no equivariant identification of Emb(k) with orbit {orbit.label()} "
                "carrying Sigma to the sets without sigma_nc"
            )
    return tuple(orbit.members[j] for j in pi)


def _conj_images(pi: Sequence[int], g: Permutation) -> list[int]:
    img = [0] * len(pi)
    for i in range(len(pi)):
        img[pi[i]] = pi[g(i)]
    return img


def viehweg_zuo_conditions(F: TotallyRealModel, orbit: SubsetOrbit) -> dict[str, bool]:
    """Side conditions making a type-IV record a counterexample to the Viehweg-Zuo claim."""
    m = F.degree
    return {
        "prime_degree": m > 1 and all(m % p for p in range(2, int(m ** 0.5) + 1)),
        "no_intermediate_subfields": len(block_systems(F.group)) == 2,
        "not_singletons": orbit.ell != 1,
        "not_full": not orbit.is_full,
    }


def construction2(
    F: TotallyRealModel,
    D: QuaternionData,
    orbit: SubsetOrbit,
    datum: CMDatum,
    phi: PartialCMType | int,
    case_flag: CaseFlag | str = CaseFlag.SPLIT,
    r: int = 1,
    k_to_orbit: Sequence[int] | None = None,
) -> ClassificationRecord:
    """Type IV record from a primitive partial CM type relative to (k_I, Sigma)."""
    if D.field != F:
        raise InvalidData("quaternion data is not over the given field")
    _require_quaternion(D)
    if r < 1:
        raise ValueError("multiplicity r must be positive")
    case_flag = CaseFlag(case_flag)
    if not orbit.is_proper:
        raise OrbitMismatch("the second recipe needs a proper orbit of nonempty subsets")
    rep = irrep_record(orbit, D)
    if rep.endo_degree == 1:
        raise Case0Rejected("endomorphism algebra of rho_I is commutative; this case cannot occur")
    beta = match_k_level(F, D, orbit, datum, k_to_orbit)

    t = phi if isinstance(phi, PartialCMType) else PartialCMType(datum, phi)
    if t.datum != datum:
        raise InvalidPartialCMType("partial CM type belongs to a different datum")
    bad = validate_partial_cm(t)
    if bad:
        raise InvalidPartialCMType("; ".join(map(str, bad)))
    ell = orbit.ell
    n = 2 ** ell if case_flag is CaseFlag.SPLIT else 2 ** (ell + 1)
    by_definition = is_primitive_definition(t)
    by_stabilizer = is_primitive_stabilizer(t, n)
    if by_definition != by_stabilizer:
        raise AssertionError(f"primitivity tests disagree on phi={t.members()}")
    if not by_definition:
        raise NotPrimitive(f"phi={t.members()} is not primitive relative to (k, Sigma)")

    f = multiplication_type(t, n)
    if f.is_constant():
        raise InconsistentData("multiplication type is constant")
    Z = central_torus(f, datum.E.group)
    if not contains_weight(Z, datum.degree):
        raise InconsistentData("weight cocharacter is not in the centre")
    if not in_unitary_torus(Z, datum.E):
        raise InconsistentData("centre is not contained in the unitary torus U_E")

    e_deg = datum.degree
    g = r * e_deg * 2 ** (ell - 1 if case_flag is CaseFlag.SPLIT else ell)
    # V^{+2} or V equals St_E (x)_k W_I; recompute dim V from W_I
    dim_V = r * e_deg * rep.dim_W // rep.k_degree // (2 if case_flag is CaseFlag.SPLIT else 1)
    if dim_V != 2 * g or dim_V != r * e_deg * n:
        raise InconsistentData(f"dim V = {dim_V} but 2g = {2 * g}")
    kind = EndoKind.CM if case_flag is CaseFlag.SPLIT else EndoKind.QUAT_CM
    return ClassificationRecord(
        provenance="Construction2",
        albert_type="IV",
        g=g,
        n=n,
        r=r,
        endo=EndoDescriptor(kind, e_deg, r),
        dim_V=dim_V,
        mult_type=f,
        orbit=orbit,
        case_flag=case_flag,
        central_rank=Z.rank,
        inputs={
            "m": F.degree,
            "sigma_nc": D.sigma_nc,
            "E_degree": e_deg,
            "E_generators": [list(gg.images) for gg in datum.E.group.generators],
            "bar": list(datum.E.bar.images),
            "k_degree": datum.k_degree,
            "k_blocks": [list(b) for b in datum.to_k_from_E.blocks],
            "sigma": members(datum.sigma_set),
            "k_to_orbit": [members(J) for J in beta],
            "phi": t.members(),
            "viehweg_zuo": viehweg_zuo_conditions(F, orbit),
        },
        adjoint=adjoint_key(D),
    )


def cm_factor(t: PartialCMType) -> ClassificationRecord:
    """A CM abelian variety of classical CM type (E, phi), taken as given."""
    if not t.datum.is_classical:
        raise InvalidPartialCMType("a CM factor needs a classical CM type (k = Q)")
    bad = validate_partial_cm(t)
    if bad:
        raise InvalidPartialCMType("; ".join(map(str, bad)))
    g0 = len(t.members())
    e_deg = t.datum.degree
    return ClassificationRecord(
        provenance="CM",
        albert_type="CM",
        g=g0,
        n=None,
        r=1,
        endo=EndoDescriptor(EndoKind.CM, e_deg, 1),
        dim_V=2 * g0,
        inputs={
            "E_degree": e_deg,
            "E_generators": [list(gg.images) for gg in t.datum.E.group.generators],
            "bar": list(t.datum.E.bar.images),
            "phi": t.members(),
            "primitive": is_primitive_definition(t),
        },
    )


def combine_nonsimple(
    cm: ClassificationRecord | None,
    factors: Sequence[tuple[ClassificationRecord, int]],
) -> ClassificationRecord:
    """X_0 x X_1^m_1 x ... x X_t^m_t with pairwise distinct underlying orbits."""
    if not factors:
        raise ValueError("need at least one non-CM factor")
    if cm is not None and cm.provenance != "CM":
        raise ValueError("the CM factor must be a CM record")
    keys = set()
    seen: dict[int, ClassificationRecord] = {}
    for rec, mult in factors:
        if rec.provenance not in ("Construction1", "Construction2"):
            raise ValueError(f"factor of provenance {rec.provenance} is not isotypical")
        if mult < 1:
            raise ValueError("multiplicities must be positive")
        keys.add(rec.adjoint)
        if rec.orbit.canonical in seen:
            raise DuplicateIsotype(
                f"two factors share the irreducible representation of orbit {rec.orbit.label()}"
            )
        seen[rec.orbit.canonical] = rec
    if len(keys) != 1:
        raise MixedAdjointData("factors are built over different (F, D)")
    g0 = cm.g if cm is not None else 0
    g = g0 + sum(m * rec.g for rec, m in factors)
    parts = ([(cm, 1)] if cm is not None else []) + list(factors)
    endo = EndoDescriptor(EndoKind.PRODUCT, 0, 0, tuple((rec.endo, m) for rec, m in parts))
    return ClassificationRecord(
        provenance="NonsimpleCombination",
        albert_type="nonsimple",
        g=g,
        n=None,
        r=1,
        endo=endo,
        dim_V=sum(m * rec.dim_V for rec, m in parts),
        components=tuple(parts),
        inputs={"g0": g0},
        adjoint=next(iter(keys)),
    )


@dataclass(frozen=True)
class CorpusEntry:
    """A CM datum with the partial CM types and case flags to try."""

    datum: CMDatum
    phi_candidates: tuple[int, ...] | None = None
    case_flags: tuple[CaseFlag, ...] = (CaseFlag.SPLIT, CaseFlag.NONSPLIT)
    k_to_orbit: tuple[int, ...] | None = None
    name: str = ""

    def candidates(self) -> list[PartialCMType]:
        if self.phi_candidates is None:
            return all_partial_cm_types(self.datum)
        return [PartialCMType(self.datum, p) for p in self.phi_candidates]


def _type_iv_equivalent(a: ClassificationRecord, b: ClassificationRecord) -> bool:
    if (a.orbit_canonical, a.case_flag, a.r, a.inputs["E_degree"]) != (
        b.orbit_canonical, b.case_flag, b.r, b.inputs["E_degree"]
    ):
        return False
    return datum_isomorphic(_record_datum(a), set(a.inputs["phi"]), _record_datum(b), set(b.inputs["phi"]))


def _record_datum(rec: ClassificationRecord):
    n = rec.inputs["E_degree"]
    G = PermGroup.from_images(n, rec.inputs["E_generators"])
    kidx = {}
    for i, blk in enumerate(rec.inputs["k_blocks"]):
        for x in blk:
            kidx[x] = i
    return G, Permutation(tuple(rec.inputs["bar"])), kidx


def datum_isomorphic(d1, phi1: set[int], d2, phi2: set[int]) -> bool:
    """Brute-force search for an equivariant bijection respecting bar, k-fibers and phi."""
    G1, bar1, k1 = d1
    G2, bar2, k2 = d2
    if len(phi1) != len(phi2):
        return False

    def accept(pi) -> bool:
        done = [x for x, y in enumerate(pi) if y is not None]
        for x in done:
            if (x in phi1) != (pi[x] in phi2):
                return False
        for x in done:
            for y in done:
                if (k1[x] == k1[y]) != (k2[pi[x]] == k2[pi[y]]):
                    return False
        return True

    return next(equivariant_bijections(G1, G2, (bar1, bar2), accept), None) is not None


def _dedup(records: Iterable[ClassificationRecord]) -> list[ClassificationRecord]:
    """One record per equivalence class; the representative is the least by serialized form."""
    out: list[ClassificationRecord] = []
    for rec in sorted(records, key=_tiebreak):
        if rec.provenance == "Construction2":
            if any(o.provenance == "Construction2" and _type_iv_equivalent(o, rec) for o in out):
                continue
        elif rec in out:
            continue
        out.append(rec)
    return out


def _tiebreak(rec: ClassificationRecord) -> str:
    return json.dumps(rec.to_dict(), sort_keys=True)


def catalog(
    F: TotallyRealModel,
    D: QuaternionData,
    g_max: int,
    cm_corpus: Sequence[CorpusEntry] = (),
    r_max: int | None = None,
    cm_factors: Sequence[PartialCMType] = (),
    diagnostics: list[str] | None = None,
) -> list[ClassificationRecord]:
    """Every record with g <= g_max obtainable from (F, D) and the corpus."""
    diag = diagnostics if diagnostics is not None else []
    _require_quaternion(D)

    def r_range(g_base: int) -> range:
        top = g_max // g_base
        if r_max is not None:
            top = min(top, r_max)
        return range(1, top + 1)

    simple: list[ClassificationRecord] = []
    base1 = construction1(F, D, 1)
    simple.extend(construction1(F, D, r) for r in r_range(base1.g))

    for orbit in enumerate_orbits(F):
        if not orbit.is_proper:
            continue
        for entry in cm_corpus:
            label = entry.name or f"E_degree={entry.datum.degree}"
            try:
                beta = match_k_level(F, D, orbit, entry.datum, entry.k_to_orbit)
            except OrbitMismatch as exc:
                diag.append(f"orbit {orbit.label()} / {label}: skipped ({exc})")
                continue
            for t in entry.candidates():
                for flag in entry.case_flags:
                    try:
                        base = construction2(F, D, orbit, entry.datum, t, flag, 1, beta)
                    except (NotPrimitive, InvalidPartialCMType) as exc:
                        diag.append(f"orbit {orbit.label()} / {label} / phi={t.members()}: skipped ({exc})")
                        break
                    for r in r_range(base.g):
                        simple.append(base if r == 1 else construction2(F, D, orbit, entry.datum, t, flag, r, beta))

    simple = _dedup(simple)
    cm_records = _dedup(cm_factor(t) for t in cm_factors)

    combos: list[ClassificationRecord] = []
    by_orbit: dict[int, list[ClassificationRecord]] = {}
    for rec in simple:
        by_orbit.setdefault(rec.orbit_canonical, []).append(rec)
    orbit_keys = sorted(by_orbit)

    def extend(start: int, chosen: list[ClassificationRecord], g_used: int):
        for i in range(start, len(orbit_keys)):
            for rec in by_orbit[orbit_keys[i]]:
                if g_used + rec.g > g_max:
                    continue
                chosen.append(rec)
                yield list(chosen)
                yield from extend(i + 1, chosen, g_used + rec.g)
                chosen.pop()

    for cm in [None, *cm_records]:
        g0 = cm.g if cm is not None else 0
        for chosen in extend(0, [], g0):
            if cm is None and len(chosen) < 2:
                continue
            combos.append(combine_nonsimple(cm, [(rec, 1) for rec in chosen]))

    out = [rec for rec in simple + combos if rec.g <= g_max]
    out.sort(key=lambda rec: (rec.sort_key(), _tiebreak(rec)))
    return out


def with_multiplicity(rec: ClassificationRecord, r: int) -> ClassificationRecord:
    """Same isotype, r copies instead of rec.r."""
    scale = r / rec.r
    if rec.provenance not in ("Construction1", "Construction2") or scale != int(scale):
        raise ValueError("can only rescale a simple record by an integer factor")
    s = int(scale)
    return replace(
        rec,
        g=rec.g * s,
        r=r,
        dim_V=rec.dim_V * s,
        endo=replace(rec.endo, matrix_size=r),
        n=rec.n * s if rec.provenance == "Construction1" else rec.n,
    )
