"""Census of partial CM types: how many are primitive, per CM model and k-level.

Both primitivity tests are run on every (k, Sigma, Phi); the script aborts on
any disagreement.

    python scripts/primitivity_census.py [--max-degree 8]
"""
from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from conftest import cm_corpus  # noqa: E402
from shimura_atlas.cmtypes import (  # noqa: E402
    all_data,
    all_partial_cm_types,
    is_primitive_definition,
    is_primitive_stabilizer,
)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-degree", type=int, default=8)
    args = ap.parse_args()
    print(f"{'model':<16} {'[k:Q]':>5} {'|Sigma|':>7} {'types':>6} {'primitive':>9}")
    for name, M in cm_corpus().items():
        if M.degree > args.max_degree:
            continue
        tally: Counter = Counter()
        for datum in all_data(M):
            for t in all_partial_cm_types(datum):
                verdict = is_primitive_definition(t)
                if verdict != is_primitive_stabilizer(t, 2):
                    raise SystemExit(f"tests disagree on {name} phi={t.members()}")
                key = (datum.k_degree, bin(datum.sigma_set).count("1"))
                tally[key + ("all",)] += 1
                tally[key + ("prim",)] += verdict
        for k, s in sorted({key[:2] for key in tally}):
            print(f"{name:<16} {k:>5} {s:>7} {tally[(k, s, 'all')]:>6} {tally[(k, s, 'prim')]:>9}")


if __name__ == "__main__":
    main()
