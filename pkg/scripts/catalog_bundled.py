"""Write a markdown catalog for every bundled input to results/.

    python scripts/catalog_bundled.py [--g-max 24] [--out results]
"""
from __future__ import annotations

import argparse
import io
from pathlib import Path

from shimura_atlas.cli import bundled_names, run


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--g-max", type=int, default=24)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    for name in bundled_names():
        command = "cm-check" if name.endswith("_cm") or name.endswith("_types") else "catalog"
        buf = io.StringIO()
        code = run([command, name, "--format", "md", "--g-max", str(args.g_max)], buf)
        path = args.out / f"{name}.md"
        path.write_text(f"# {name} ({command})\n\n" + buf.getvalue())
        print(f"{name:<28} exit={code} -> {path}")


if __name__ == "__main__":
    main()
