"""Command-line front end.

Exit codes: 0 verified bound, 1 certificate failure, 2 usage error,
3 infeasible, 4 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from .access import (PUBLISHED_GENERATORS, AccessStructure, automorphism_group, catalog,
                     catalog_names, published_group)
from .copylemma import CopySpec, parse_copy_chain
from .entropy import ContractError
from .lp import Certificate, LpProblem, NotASubgroupError, assemble, export_lp
from .pipeline import BoundConfig, BoundResult, compute_bound
from .solver import HybridError, Status, decimal6, hybrid_solve, verify_certificate
from .symmetry import orbits
from .table import TABLE

EXIT_OK, EXIT_CERT, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_BUDGET = 0, 1, 2, 3, 4
NOT_SUBGROUP = "symmetry group is not a subgroup of the automorphism group"


class UsageError(Exception):
    pass


def fmt_value(q: Fraction) -> str:
    q = Fraction(q)
    frac = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    return f"{frac} = {decimal6(q)}"


def _color(text: str, code: str, stream=sys.stdout) -> str:
    if os.environ.get("NO_COLOR") or not getattr(stream, "isatty", lambda: False)():
        return text
    return f"\033[{code}m{text}\033[0m"


def _frac_str(q: Fraction | None) -> str | None:
    return None if q is None else f"{q.numerator}/{q.denominator}"


# --- problem selection shared by several commands ------------------------

def _add_problem_args(ap: argparse.ArgumentParser) -> None:
    ap.add_argument("--spec", help="problem-spec JSON file")
    ap.add_argument("--structure", help="catalog name or a structure JSON file")
    ap.add_argument("--copy", action="append", default=[],
                    help="copy-lemma application, e.g. '0,3,4,7|1,2,5,6' (repeatable)")
    ap.add_argument("--symmetry", choices=["none", "equalities", "quotient"], default=None)
    ap.add_argument("--group", default=None,
                    help="'auto' or comma-separated generators like '(12)(56),(14)(36)'")
    ap.add_argument("--override", action="store_true",
                    help="allow a group outside the automorphism group")


def _structure(value: str) -> AccessStructure:
    if value in catalog_names():
        return catalog(value)
    path = Path(value)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise UsageError(f"no such file: {value}")
        return AccessStructure.from_json(path)
    raise UsageError(f"unknown structure {value!r}; choose from {', '.join(catalog_names())}")


def _split_group(text: str | None):
    if text is None or text == "auto":
        return "auto"
    return [g for g in text.replace(" ", "").replace("),(", ")|(").split("|") if g]


def _problem(args) -> LpProblem:
    spec: dict = {}
    if args.spec:
        try:
            spec = json.loads(Path(args.spec).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read spec {args.spec}: {exc}") from None
    if args.structure:
        A = _structure(args.structure)
    elif "structure" in spec:
        s = spec["structure"]
        A = catalog(s) if isinstance(s, str) else AccessStructure.from_json(s)
    else:
        raise UsageError("give --spec or --structure")
    copies = []
    for item in spec.get("copies", []) if not args.copy else []:
        if isinstance(item, str):
            copies.extend(parse_copy_chain(item, spec.get("aliases")))
        else:
            copies.append(CopySpec.from_json(item))
    for text in args.copy:
        copies.extend(parse_copy_chain(text))
    sym = args.symmetry or spec.get("symmetry", "none")
    group = _split_group(args.group) if args.group else spec.get("group", "auto")
    override = args.override or bool(spec.get("override", False))
    return assemble(A, copies, sym, group, override)


def _stats(p: LpProblem) -> dict:
    s = p.summary()
    return {"n": s["n"], "columns": s["columns"], "rows": s["rows"],
            "elemental": s["elemental"], "scheme": s["scheme"], "copy": s["copy"],
            "share": s["objective-link"], "normalization": s["normalization"],
            "symmetry": s["symmetry"]}


def _stats_line(st: dict) -> str:
    return (f"{st['rows']} (elemental {st['elemental']}, scheme {st['scheme']}, "
            f"copy {st['copy']}, share {st['share']}, normalization {st['normalization']}, "
            f"symmetry {st['symmetry']})")


def _emit(args, report: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(report, indent=1, sort_keys=True))
    else:
        print("\n".join(lines))


# --- commands ------------------------------------------------------------

def cmd_list(args) -> int:
    rows = []
    for name in catalog_names():
        A = catalog(name)
        rows.append({"name": name, "parties": A.parties, "minimal_sets": len(A.minimal_sets)})
    _emit(args, {"structures": rows},
          [f"{r['name']:<5} {r['parties']} parties, {r['minimal_sets']} minimal sets" for r in rows])
    return EXIT_OK


def cmd_show(args) -> int:
    A = _structure(args.name)
    G = automorphism_group(A)
    gens = [str(g) for g in G.generators]
    report = {"name": A.name, "parties": A.parties, "minimal_sets": A.minimal_strings(),
              "group_order": G.order(), "generators": gens}
    lines = [f"structure     {A.name}", f"parties       {A.parties}",
             f"minimal sets  {len(A.minimal_sets)}: {' '.join(A.minimal_strings())}",
             f"group order   {G.order()}", f"generators    {' '.join(gens) or '()'}"]
    _emit(args, report, lines)
    return EXIT_OK


def cmd_group(args) -> int:
    A = _structure(args.name)
    G = automorphism_group(A)
    orbs = orbits(G, A.parties)
    published = PUBLISHED_GENERATORS.get(A.name)
    report = {"name": A.name, "group_order": G.order(),
              "generators": [str(g) for g in G.generators], "orbits": len(orbs),
              "symmetry_equalities": (1 << (A.parties + 1)) - 1 - len(orbs)}
    lines = [f"group order          {G.order()}",
             f"generators           {' '.join(report['generators']) or '()'}",
             f"orbits on subsets    {len(orbs)}",
             f"symmetry equalities  {report['symmetry_equalities']}"]
    if published is not None:
        same = published_group(A.name) == G
        report["published_generators"] = published
        report["published_match"] = same
        lines.append(f"published <{' '.join(published)}>  {'MATCH' if same else 'DIFFERENT'}")
    if args.elements:
        report["elements"] = [str(g) for g in G]
        lines.extend(f"  {g}" for g in G)
    _emit(args, report, lines)
    return EXIT_OK


def cmd_export(args) -> int:
    p = _problem(args)
    out = Path(args.output_dir) / args.name if args.output_dir else Path(args.name)
    if out.suffix.lstrip(".") not in ("lp", "mps"):
        out = out.with_suffix("." + args.format)
    out.parent.mkdir(parents=True, exist_ok=True)
    export_lp(p, args.format, out)
    st = _stats(p)
    _emit(args, {"file": str(out), "format": args.format, **st},
          [f"wrote {out}", f"columns {st['columns']}", f"rows    {_stats_line(st)}"])
    return EXIT_OK


def _bound_report(p: LpProblem, res: BoundResult, args) -> tuple[dict, list[str], int]:
    st = _stats(p)
    meta = p.metadata
    report = {"structure": meta["structure"], "copies": meta["copies"],
              "symmetry": meta["symmetry"], "status": res.status.value,
              "route": res.route, "verified": res.verified, **st}
    lines = [f"structure    {meta['structure']}",
             f"copies       {' and '.join(meta['copies']) or '-'}",
             f"symmetry     {meta['symmetry']}",
             f"columns      {st['columns']}",
             f"rows         {_stats_line(st)}"]
    cert_path = res.files.get("certificate")
    if cert_path is not None:
        report["certificate"] = str(cert_path)
    if res.status is Status.INFEASIBLE:
        why = "program is infeasible"
        if meta.get("group") is not None and getattr(args, "override", False):
            why += f": {NOT_SUBGROUP}"
        report["diagnostic"] = why
        lines.append(f"status       infeasible ({why})")
        if res.verified:
            lines.append("certificate  infeasibility proof verified")
        return report, lines, EXIT_INFEASIBLE
    if res.status is Status.BUDGET and not res.verified:
        report["diagnostic"] = res.message or "budget exceeded"
        lines.append(f"status       budget exceeded ({report['diagnostic']})")
        return report, lines, EXIT_BUDGET
    if not res.verified or res.bound is None:
        report["diagnostic"] = res.message
        lines.append(f"status       no verified bound ({res.message})")
        return report, lines, EXIT_CERT
    report["bound"] = _frac_str(res.bound)
    report["decimal"] = decimal6(res.bound)
    label = "bound" if res.status is Status.OPTIMAL else "partial bound"
    lines.append(f"{label:<12} {fmt_value(res.bound)}")
    if cert_path is not None:
        lines.append(f"certificate  {cert_path} (verified)")
    else:
        lines.append("certificate  verified")
    code = EXIT_OK if res.status is Status.OPTIMAL else EXIT_BUDGET
    return report, lines, code


def cmd_bound(args) -> int:
    p = _problem(args)
    workdir = Path(args.output_dir) if args.output_dir else None
    cfg = BoundConfig(method=args.method, budget=args.budget, cap=args.cap, workdir=workdir,
                      stem=args.name or _stem(p), allow_large_exact=args.allow_large_exact)
    res = compute_bound(p, cfg)
    report, lines, code = _bound_report(p, res, args)
    _emit(args, report, lines)
    return code


def _stem(p: LpProblem) -> str:
    m = p.metadata
    name = m["structure"].replace("*", "star")
    tag = "copy" if m["copies"] else "shannon"
    return f"{name}-{tag}-{m['symmetry']}"


def cmd_verify(args) -> int:
    p = _problem(args)
    try:
        cert = Certificate.load(args.certificate)
    except (OSError, ValueError, KeyError) as exc:
        raise UsageError(f"cannot read certificate: {exc}") from None
    check = verify_certificate(p, cert)
    report = {"verified": bool(check), "reason": check.reason, "kind": cert.kind,
              "bound": _frac_str(Fraction(cert.bound))}
    if check and cert.kind == "bound":
        lines = [f"verified     x >= {fmt_value(cert.bound)}"]
    elif check:
        lines = ["verified     infeasibility proof"]
    else:
        lines = [f"REJECTED     {check.reason}"]
    _emit(args, report, lines)
    if not check:
        return EXIT_CERT
    return EXIT_OK if cert.kind == "bound" else EXIT_INFEASIBLE


def cmd_certify(args) -> int:
    p = _problem(args)
    try:
        cert = hybrid_solve(p, args.solution, cap=args.cap)
    except (HybridError, ContractError) as exc:
        _emit(args, {"verified": False, "diagnostic": str(exc)}, [f"FAILED       {exc}"])
        return EXIT_CERT
    except OSError as exc:
        raise UsageError(str(exc)) from None
    out = None
    if args.output_dir:
        out = Path(args.output_dir) / f"{args.name or _stem(p)}.cert.json"
        out.parent.mkdir(parents=True, exist_ok=True)
        cert.save(out)
    lines = [f"bound        {fmt_value(cert.bound)}",
             f"certificate  {out if out else '(not saved)'} (verified)"]
    _emit(args, {"verified": True, "bound": _frac_str(cert.bound),
                 "decimal": decimal6(cert.bound), "certificate": str(out) if out else None},
          lines)
    return EXIT_OK


def cmd_reproduce(args) -> int:
    wanted = set(args.rows.split(",")) if args.rows else None
    if wanted:
        unknown = wanted - {r.structure for r in TABLE}
        if unknown:
            raise UsageError(f"unknown table rows: {', '.join(sorted(unknown))}")
    outdir = Path(args.output_dir) if args.output_dir else None
    results = []
    worst = EXIT_OK
    for row in TABLE:
        if wanted and row.structure not in wanted:
            continue
        entry = {"structure": row.structure, "copies": row.copies}
        A = catalog(row.structure)
        for key, sym in (("without", "none"), ("with", args.symmetry_form)):
            p = assemble(A, row.specs(), sym)
            expected = row.expected(sym != "none")
            cell = {"expected": _frac_str(expected), "n": p.n}
            stem = f"{row.structure.replace('*', 'star')}-{key}"
            if row.export_only and not (args.solve_q or args.q_solution):
                cell["status"] = "exported, not solved"
                if outdir is not None:
                    outdir.mkdir(parents=True, exist_ok=True)
                    path = outdir / f"{stem}.mps"
                    export_lp(p, "mps", path)
                    cell["file"] = str(path)
                else:
                    with tempfile.TemporaryDirectory() as tmp:
                        export_lp(p, "mps", Path(tmp) / "q.mps")
                entry[key] = cell
                continue
            if row.export_only and args.q_solution:
                sol = Path(args.q_solution.replace("{sym}", key))
                try:
                    cert = hybrid_solve(p, sol, cap=args.cap)
                    ok = bool(verify_certificate(p, cert))
                    res = BoundResult(Status.OPTIMAL, cert.bound if ok else None, cert, ok,
                                      "hybrid", 0.0)
                except (HybridError, ContractError, OSError) as exc:
                    res = BoundResult(Status.OPTIMAL, None, None, False, "hybrid", 0.0, str(exc))
            else:
                cfg = BoundConfig(method="hybrid", budget=args.budget, cap=args.cap,
                                  workdir=outdir, stem=stem, allow_large_exact=False)
                res = compute_bound(p, cfg)
            if res.verified and res.bound is not None:
                cell["bound"] = _frac_str(res.bound)
                cell["decimal"] = decimal6(res.bound)
                cell["status"] = "MATCH" if res.bound == expected else "DIFFER"
                if res.bound != expected:
                    worst = max(worst, EXIT_CERT)
            elif res.status is Status.BUDGET:
                cell["status"] = "budget exceeded"
                if worst == EXIT_OK:
                    worst = EXIT_BUDGET
            else:
                cell["status"] = f"unverified: {res.message}"
                worst = max(worst, EXIT_CERT)
            if "certificate" in res.files:
                cell["certificate"] = str(res.files["certificate"])
            entry[key] = cell
        results.append(entry)

    if args.json:
        print(json.dumps({"rows": results}, indent=1, sort_keys=True))
        return worst
    head = f"{'structure':<9} {'without symmetry':<28} {'':<7} {'with symmetry':<28}"
    print(head)
    for e in results:
        cells = [_cell_text(e[k]) for k in ("without", "with")]
        print(f"{e['structure']:<9} {cells[0]} {cells[1]}".rstrip())
    return worst


def _cell_text(cell: dict) -> str:
    status = cell["status"]
    if "bound" in cell:
        value = fmt_value(Fraction(cell["bound"]))
        code = "32" if status == "MATCH" else "31"
        return f"{value:<28} {_color(status, code):<7}"
    return f"{status + ' (expected ' + cell['expected'] + ')':<36}"


# --- entry point ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="infratio",
                                 description="Certified lower bounds on the information ratio.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("list", help="list the built-in structures")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_list)

    s = sub.add_parser("show", help="minimal sets and automorphism group of a structure")
    s.add_argument("name")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_show)

    s = sub.add_parser("group", help="automorphism group, orbits and symmetry row count")
    s.add_argument("name")
    s.add_argument("--elements", action="store_true", help="list every group element")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_group)

    s = sub.add_parser("export", help="write the LP in LP-text or MPS format")
    _add_problem_args(s)
    s.add_argument("--format", choices=["lp", "mps"], default="mps")
    s.add_argument("--name", default="problem")
    s.add_argument("--output-dir")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_export)

    s = sub.add_parser("bound", help="compute and verify a lower bound")
    _add_problem_args(s)
    s.add_argument("--method", choices=["auto", "exact", "hybrid"], default="auto")
    s.add_argument("--budget", type=float, default=3600.0, help="seconds per solve")
    s.add_argument("--cap", type=int, default=10 ** 6, help="denominator cap for float duals")
    s.add_argument("--allow-large-exact", action="store_true",
                   help="permit the internal exact solver at n >= 14")
    s.add_argument("--name", help="file stem for artifacts")
    s.add_argument("--output-dir", help="directory for LP, solution and certificate files")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("verify", help="check a certificate file against a problem")
    _add_problem_args(s)
    s.add_argument("certificate")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("certify", help="turn an external float solution into a certificate")
    _add_problem_args(s)
    s.add_argument("solution")
    s.add_argument("--cap", type=int, default=10 ** 6)
    s.add_argument("--name")
    s.add_argument("--output-dir")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_certify)

    s = sub.add_parser("reproduce-table", help="recompute the table of improved bounds")
    s.add_argument("--rows", help="comma-separated structure names (default: all)")
    s.add_argument("--budget", type=float, default=3600.0, help="seconds per solve")
    s.add_argument("--cap", type=int, default=10 ** 6)
    s.add_argument("--symmetry-form", choices=["equalities", "quotient"], default="equalities")
    s.add_argument("--solve-q", action="store_true",
                   help="also solve the n=16 row with the external solver")
    s.add_argument("--q-solution",
                   help="external solution for the n=16 row; '{sym}' expands to without/with")
    s.add_argument("--output-dir")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_reproduce)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NotASubgroupError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ContractError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
