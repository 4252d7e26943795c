"""Command-line front end: JSON input, tabular/JSON output.

    shimura-atlas <command> <input.json> [--format json|csv|md] [--g-max N] [--r-max N]

Exit codes: 0 success, 1 I/O or parse error, 2 semantic validation failure.
A bare name such as ``mumford_m3`` resolves to the bundled corpus.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from . import classify as C
from .brauer import QZInvariant, QuaternionData, validate as validate_quaternion
from .cmtypes import (
    CMDatum,
    PartialCMType,
    all_partial_cm_types,
    induced_from_subfield,
    is_primitive_definition,
    is_primitive_stabilizer,
    make_datum,
    validate_partial_cm,
)
from .errors import AtlasError
from .fieldmodel import CMModel, TotallyRealModel, validate_cm_model
from .orbitrep import enumerate_orbits, irrep_record, make_orbit
from .permgroup import Permutation, PermGroup, mask_of

COMMANDS = ("validate", "orbits", "construction1", "construction2", "catalog", "cm-check")
EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2


class ParseError(Exception):
    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


# ---------------------------------------------------------------------------
# input schema


@dataclass
class CorpusSpec:
    datum: CMDatum
    phi_candidates: tuple[int, ...] | None
    case_flags: tuple[C.CaseFlag, ...]
    k_to_orbit: tuple[int, ...] | None
    name: str

    def entry(self) -> C.CorpusEntry:
        return C.CorpusEntry(self.datum, self.phi_candidates, self.case_flags, self.k_to_orbit, self.name)


@dataclass
class InputSpec:
    F: TotallyRealModel
    D: QuaternionData
    cm_corpus: list[CorpusSpec] = field(default_factory=list)
    cm_factors: list[PartialCMType] = field(default_factory=list)
    g_max: int | None = None
    multiplicity_max: int | None = None
    orbit: list[int] | None = None
    r: int = 1
    diagnostics: list[str] = field(default_factory=list)


def _get(obj: dict, key: str, where: str, kind=None, default: Any = ...):
    if key not in obj:
        if default is ...:
            raise ParseError(f"{where}.{key}", "missing")
        return default
    val = obj[key]
    if kind is not None and not isinstance(val, kind) or isinstance(val, bool) and kind is int:
        raise ParseError(f"{where}.{key}", f"expected {getattr(kind, '__name__', kind)}, got {type(val).__name__}")
    return val


def _int_list(val, where: str, size: int | None = None) -> list[int]:
    if not isinstance(val, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in val):
        raise ParseError(where, "expected a list of integers")
    if size is not None and any(not 0 <= v < size for v in val):
        raise ParseError(where, f"index outside 0..{size - 1}")
    return val


def _perm(val, where: str, size: int) -> Permutation:
    imgs = _int_list(val, where, size)
    if len(imgs) != size or sorted(imgs) != list(range(size)):
        raise ParseError(where, f"{imgs} is not a permutation of 0..{size - 1}")
    return Permutation(tuple(imgs))


def _group(degree: int, gens, where: str) -> PermGroup:
    if not isinstance(gens, list):
        raise ParseError(where, "expected a list of image arrays")
    perms = tuple(_perm(g, f"{where}[{i}]", degree) for i, g in enumerate(gens))
    return PermGroup(degree, perms)


def _check(violations, where: str, diag: list[str]) -> bool:
    for v in violations:
        diag.append(f"{where}: {v}")
    return not violations


def parse_cm_model(obj: dict, where: str, diag: list[str]) -> CMModel | None:
    n = _get(obj, "embE_degree", where, int)
    if n <= 0:
        raise ParseError(f"{where}.embE_degree", "must be positive")
    G = _group(n, _get(obj, "generators", where, list), f"{where}.generators")
    M = CMModel(G, _perm(_get(obj, "bar", where, list), f"{where}.bar", n))
    return M if _check(validate_cm_model(M), where, diag) else None


def parse_input(data: Any) -> InputSpec:
    """Parse and validate.  Semantic problems are collected in ``diagnostics``."""
    if not isinstance(data, dict):
        raise ParseError("$", "top level must be an object")
    diag: list[str] = []
    gal = _get(data, "galois", "$", dict)
    m = _get(gal, "degree", "$.galois", int)
    if m <= 0:
        raise ParseError("$.galois.degree", "must be positive")
    F = TotallyRealModel(_group(m, _get(gal, "generators", "$.galois", list), "$.galois.generators"))
    blocks = []
    for i, b in enumerate(_get(data, "finite_blocks", "$", list, [])):
        w = f"$.finite_blocks[{i}]"
        if not isinstance(b, dict):
            raise ParseError(w, "expected an object")
        prime = _get(b, "prime", w, str)
        invs = _get(b, "invariants", w, list)
        for j, v in enumerate(invs):
            if not isinstance(v, str):
                raise ParseError(f"{w}.invariants[{j}]", "invariants are strings such as \"0\" or \"1/2\"")
            try:
                QZInvariant.parse(v)
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"{w}.invariants[{j}]", f"cannot parse {v!r}") from None
        blocks.append((prime, tuple(invs)))
    D = QuaternionData(F, _get(data, "sigma_nc", "$", int), tuple(blocks))
    _check(validate_quaternion(D), "$", diag)

    spec = InputSpec(F, D, diagnostics=diag)
    spec.g_max = _get(data, "g_max", "$", int, None)
    spec.multiplicity_max = _get(data, "multiplicity_max", "$", int, None)
    spec.r = _get(data, "r", "$", int, 1)
    if "orbit" in data:
        spec.orbit = _int_list(data["orbit"], "$.orbit", m)

    for i, e in enumerate(_get(data, "cm_corpus", "$", list, [])):
        w = f"$.cm_corpus[{i}]"
        if not isinstance(e, dict):
            raise ParseError(w, "expected an object")
        M = parse_cm_model(e, w, diag)
        if M is None:
            continue
        n = M.degree
        kb = _get(e, "k_blocks", w, list)
        k_blocks = [_int_list(b, f"{w}.k_blocks[{j}]", n) for j, b in enumerate(kb)]
        sigma = _int_list(_get(e, "sigma_set", w, list), f"{w}.sigma_set", len(k_blocks))
        try:
            datum = make_datum(M, k_blocks, sigma)
        except AtlasError as exc:
            diag.append(f"{w}: {exc}")
            continue
        phis = _get(e, "phi_candidates", w, list, None)
        cands = None
        if phis is not None:
            cands = []
            for j, p in enumerate(phis):
                t = PartialCMType(datum, mask_of(_int_list(p, f"{w}.phi_candidates[{j}]", n)))
                if _check(validate_partial_cm(t), f"{w}.phi_candidates[{j}]", diag):
                    cands.append(t.phi)
            cands = tuple(cands)
        flags = []
        for j, fl in enumerate(_get(e, "case_flags", w, list, ["Split", "NonSplit"])):
            try:
                flags.append(C.CaseFlag(fl))
            except ValueError:
                raise ParseError(f"{w}.case_flags[{j}]", f"unknown flag {fl!r}") from None
        kto = _get(e, "k_to_orbit", w, list, None)
        spec.cm_corpus.append(CorpusSpec(
            datum, cands, tuple(flags),
            tuple(mask_of(_int_list(J, f"{w}.k_to_orbit[{j}]", m)) for j, J in enumerate(kto))
            if kto is not None else None,
            _get(e, "name", w, str, f"cm_corpus[{i}]"),
        ))

    for i, e in enumerate(_get(data, "cm_factors", "$", list, [])):
        w = f"$.cm_factors[{i}]"
        if not isinstance(e, dict):
            raise ParseError(w, "expected an object")
        M = parse_cm_model(e, w, diag)
        if M is None:
            continue
        datum = make_datum(M, [list(range(M.degree))], [0])
        t = PartialCMType(datum, mask_of(_int_list(_get(e, "phi", w, list), f"{w}.phi", M.degree)))
        if _check(validate_partial_cm(t), w, diag):
            spec.cm_factors.append(t)
    return spec


# ---------------------------------------------------------------------------
# reports


@dataclass
class Report:
    records: list[dict] = field(default_factory=list)
    diagnostics: list[str] = field(default_factory=list)
    columns: list[str] | None = None
    # flat rows for csv/md when ``records`` are nested
    table: list[dict] | None = None


def _flat_rows(report: Report) -> tuple[list[str], list[dict]]:
    src = report.table if report.table is not None else report.records
    rows = [{k: _cell(v) for k, v in rec.items() if not isinstance(v, dict)} for rec in src]
    cols = report.columns or (list(rows[0]) if rows else ["albert_type"])
    return cols, rows


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return " ".join(map(str, v))
    return str(v)


def emit(report: Report, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps({"records": report.records, "diagnostics": report.diagnostics},
                          separators=(",", ":"), ensure_ascii=False) + "\n"
    cols, rows = _flat_rows(report)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=cols, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)
        return buf.getvalue()
    if fmt in ("md", "markdown"):
        lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
        for row in rows:
            lines.append("| " + " | ".join(row.get(c, "").replace("|", "\\|") for c in cols) + " |")
        if report.diagnostics:
            lines.append("")
            lines.extend(f"- {d}" for d in report.diagnostics)
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


RECORD_COLUMNS = ["provenance", "albert_type", "g", "n", "r", "endo", "centre_degree", "orbit", "ell",
                  "case_flag", "mult_type", "E_degree", "phi", "components"]


def _record_report(records: Sequence[C.ClassificationRecord], diag: list[str]) -> Report:
    # json carries the nested form; tables use the flat row
    return Report([r.to_dict() for r in records], list(diag), RECORD_COLUMNS, [r.row() for r in records])


# ---------------------------------------------------------------------------
# commands


def cmd_validate(spec: InputSpec, args) -> tuple[int, Report]:
    rows = [{"object": "F", "degree": spec.F.degree, "order": spec.F.group.order},
            {"object": "D", "sigma_nc": spec.D.sigma_nc, "finite_primes": len(spec.D.finite_blocks)}]
    for c in spec.cm_corpus:
        rows.append({"object": c.name, "degree": c.datum.degree, "k_degree": c.datum.k_degree,
                     "sigma": c.datum.sigma_members()})
    return (EXIT_INVALID if spec.diagnostics else EXIT_OK), Report(rows, list(spec.diagnostics))


def cmd_orbits(spec: InputSpec, args) -> tuple[int, Report]:
    rows = []
    for orb in enumerate_orbits(spec.F):
        rep = irrep_record(orb, spec.D)
        rows.append({
            "orbit": orb.label(),
            "ell": orb.ell,
            "size": orb.size,
            "stabilizer_order": orb.stab.order,
            "k_degree": rep.k_degree,
            "endo_degree": rep.endo_degree,
            "dim_W": rep.dim_W,
            "proper": orb.is_proper,
        })
    return EXIT_OK, Report(rows, [])


def cmd_construction1(spec: InputSpec, args) -> tuple[int, Report]:
    r = args.r_max or spec.r
    return EXIT_OK, _record_report([C.construction1(spec.F, spec.D, r)], [])


def cmd_construction2(spec: InputSpec, args) -> tuple[int, Report]:
    if spec.orbit is None:
        raise ParseError("$.orbit", "construction2 needs an orbit member (list of indices)")
    orbit = make_orbit(spec.F.group, mask_of(spec.orbit))
    r = args.r_max or spec.r
    records, diag, failed = [], [], False
    for c in spec.cm_corpus:
        cands = c.entry().candidates()
        for t in cands:
            for flag in c.case_flags:
                try:
                    records.append(C.construction2(spec.F, spec.D, orbit, c.datum, t, flag, r, c.k_to_orbit))
                except AtlasError as exc:
                    failed = True
                    diag.append(f"{c.name} phi={t.members()} {flag.value}: {type(exc).__name__}: {exc}")
    return (EXIT_INVALID if failed and not records else EXIT_OK), _record_report(records, diag)


def cmd_catalog(spec: InputSpec, args) -> tuple[int, Report]:
    g_max = args.g_max if args.g_max is not None else spec.g_max
    if g_max is None:
        raise ParseError("$.g_max", "catalog needs g_max (input field or --g-max)")
    r_max = args.r_max if args.r_max is not None else spec.multiplicity_max
    diag: list[str] = []
    recs = C.catalog(spec.F, spec.D, g_max, [c.entry() for c in spec.cm_corpus], r_max, spec.cm_factors, diag)
    diag.append("records are classes of discrete invariants; polarization choices and the choice of "
                "isomorphisms between isotypic factors are not distinguished")
    return EXIT_OK, _record_report(recs, diag)


def cmd_cm_check(spec: InputSpec, args) -> tuple[int, Report]:
    rows = []
    for c in spec.cm_corpus:
        ell_ns = (2, 4)
        cands = c.entry().candidates() if c.phi_candidates is not None else all_partial_cm_types(c.datum)
        for t in cands:
            by_def = is_primitive_definition(t)
            by_stab = {n: is_primitive_stabilizer(t, n) for n in ell_ns}
            row = {
                "datum": c.name,
                "phi": t.members(),
                "k_degree": c.datum.k_degree,
                "sigma": c.datum.sigma_members(),
                "primitive_definition": by_def,
                "primitive_stabilizer": by_stab[2],
                "agree": by_def == by_stab[2] == by_stab[4],
            }
            if c.datum.is_classical:
                row["induced_from_subfield"] = induced_from_subfield(t)
            rows.append(row)
    return EXIT_OK, Report(rows, [])


HANDLERS = {
    "validate": cmd_validate,
    "orbits": cmd_orbits,
    "construction1": cmd_construction1,
    "construction2": cmd_construction2,
    "catalog": cmd_catalog,
    "cm-check": cmd_cm_check,
}


def resolve_input(name: str) -> Path | resources.abc.Traversable:
    p = Path(name)
    if p.exists():
        return p
    bundled = resources.files("shimura_atlas") / "corpus" / (p.stem + ".json")
    if bundled.is_file():
        return bundled
    raise FileNotFoundError(name)


def bundled_names() -> list[str]:
    root = resources.files("shimura_atlas") / "corpus"
    return sorted(f.name[:-5] for f in root.iterdir() if f.name.endswith(".json"))


def load_spec(name: str) -> InputSpec:
    return parse_input(json.loads(resolve_input(name).read_text()))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shimura-atlas", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("input", help="input JSON file, or the name of a bundled example")
    ap.add_argument("--format", choices=("json", "csv", "md"), default="json")
    ap.add_argument("--g-max", type=int, default=None)
    ap.add_argument("--r-max", type=int, default=None)
    return ap


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        spec = load_spec(args.input)
    except (OSError, FileNotFoundError) as exc:
        err.write(f"error: cannot read {args.input}: {exc}\n")
        return EXIT_IO
    except (json.JSONDecodeError, ParseError) as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_IO
    except AtlasError as exc:
        out.write(emit(Report([], [f"{type(exc).__name__}: {exc}"]), args.format))
        return EXIT_INVALID
    if spec.diagnostics and args.command != "validate":
        out.write(emit(Report([], spec.diagnostics), args.format))
        return EXIT_INVALID
    try:
        code, report = HANDLERS[args.command](spec, args)
    except ParseError as exc:
        err.write(f"parse error: {exc}\n")
        return EXIT_IO
    except AtlasError as exc:
        out.write(emit(Report([], [f"{type(exc).__name__}: {exc}"]), args.format))
        return EXIT_INVALID
    out.write(emit(report, args.format))
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
