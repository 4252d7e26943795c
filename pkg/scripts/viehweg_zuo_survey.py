"""Survey of type-IV records over cyclic fields of prime degree.

For F cyclic of prime degree p with D unramified at all finite places, E is
the cyclic CM field of degree 2p (k = E_0 = F).  Every proper orbit of
subsets is tried; records satisfying all the side conditions (prime degree,
orbit neither the singletons nor the full set) are counterexamples of the
kind discussed for Shimura curves in A_g.

    python scripts/viehweg_zuo_survey.py [--primes 3 5 7]
"""
from __future__ import annotations

import argparse

from shimura_atlas import classify as C
from shimura_atlas.brauer import QuaternionData
from shimura_atlas.cmtypes import make_datum
from shimura_atlas.errors import OrbitMismatch
from shimura_atlas.fieldmodel import CMModel, TotallyRealModel
from shimura_atlas.orbitrep import enumerate_orbits
from shimura_atlas.permgroup import Permutation, PermGroup


def survey(p: int) -> list[C.ClassificationRecord]:
    F = TotallyRealModel(PermGroup.cyclic(p))
    D = QuaternionData(F, 0)
    E = CMModel(PermGroup.cyclic(2 * p), Permutation(tuple((i + p) % (2 * p) for i in range(2 * p))))
    k_blocks = [[i, i + p] for i in range(p)]
    out = []
    for orbit in enumerate_orbits(F):
        if not orbit.is_proper or orbit.size != p:
            continue
        # Sigma must have as many members as orbit sets avoiding sigma_nc; the
        # equivariant matching itself is searched by match_k_level
        n_sigma = sum(1 for J in orbit.members if not J & 1)
        for shift in range(p):
            sigma = [(shift + j) % p for j in range(n_sigma)]
            datum = make_datum(E, k_blocks, sigma)
            try:
                C.match_k_level(F, D, orbit, datum)
            except OrbitMismatch:
                continue
            out += C.catalog(F, D, 10 ** 6, [C.CorpusEntry(datum, case_flags=(C.CaseFlag.SPLIT,))], r_max=1)
            break
    return [r for r in out if r.provenance == "Construction2"]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--primes", type=int, nargs="+", default=[3, 5, 7])
    args = ap.parse_args()
    print(f"{'p':>2} {'orbit':<14} {'ell':>3} {'g':>5} {'n':>3} {'counterexample':>14}  mult_type")
    seen = set()
    for p in args.primes:
        for rec in survey(p):
            key = (p, rec.orbit.canonical, rec.mult_type.values)
            if key in seen:
                continue
            seen.add(key)
            flag = all(rec.inputs["viehweg_zuo"].values())
            print(f"{p:>2} {rec.orbit.label():<14} {rec.orbit.ell:>3} {rec.g:>5} {rec.n:>3} {str(flag):>14}  {rec.mult_type.values}")


if __name__ == "__main__":
    main()
