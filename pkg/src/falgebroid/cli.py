"""Command line front end.

Exit codes: 0 all checks pass, 1 a verification fails, 2 bad input or
usage. Reports print as text to stdout; --json writes the same report
as a machine-readable document. FALG_THREADS caps the worker pool used
for independent law checks; output order is deterministic regardless.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .algebroid import (
    AlgebroidPresentation,
    Section,
    check_comm_assoc,
    check_f_algebroid,
    check_lie_algebroid,
    check_pre_f,
    check_pre_lie_algebroid,
    check_prelie_com,
)
from .constructions import fixture_names, load_fixture
from .deformation import (
    FormalDeformation,
    MultiDer,
    check_n_deformation,
    obstruction,
    semiclassical_limit,
)
from .duality import (
    BundleMap,
    deform_by_nijenhuis,
    dubrovin_dual,
    is_nijenhuis,
    pre_f_dual,
    verify_certificate,
)
from .errors import (
    ExprSyntaxError,
    FalgError,
    MissingStructure,
    NotCompatible,
    NotTangent,
    SchemaError,
    ShapeError,
    UnknownFixture,
    UnknownVariable,
)
from .exprparse import parse_expr, parse_presentation, presentation_to_document
from .hierarchy import Connection, flow_from_section, flows_commute, principal_hierarchy
from .report import Report
from .ring import RatFunc, VectorField

_LAWS = {
    "comm-assoc": check_comm_assoc,
    "lie": check_lie_algebroid,
    "f-algebroid": check_f_algebroid,
    "pre-lie": check_pre_lie_algebroid,
    "pre-f": check_pre_f,
    "prelie-com": check_prelie_com,
}


class _InputError(Exception):
    pass


def _load_presentation(args) -> AlgebroidPresentation:
    if getattr(args, "fixture", None):
        return load_fixture(args.fixture)
    if not getattr(args, "file", None):
        raise _InputError("provide a structure file or --fixture NAME")
    try:
        with open(args.file) as fh:
            text = fh.read()
    except OSError as exc:
        raise _InputError(str(exc)) from None
    return parse_presentation(text)


def _thread_count() -> int:
    raw = os.environ.get("FALG_THREADS", "")
    try:
        value = int(raw)
    except ValueError:
        return 1
    return max(1, value)


def _emit(report: Report, json_path: str | None) -> int:
    print(report.summary())
    if json_path:
        with open(json_path, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    return 0 if report.overall else 1


def _default_laws(A: AlgebroidPresentation) -> list[str]:
    laws = []
    if A.bracket is not None:
        laws.append("f-algebroid")
    if A.prelie is not None:
        laws.append("pre-f")
    if not laws:
        laws.append("comm-assoc")
    return laws


def cmd_check(args) -> int:
    A = _load_presentation(args)
    laws = args.law or _default_laws(A)
    for law in laws:
        if law not in _LAWS:
            raise _InputError(f"unknown law {law!r}; known: {', '.join(sorted(_LAWS))}")
    report = Report(f"check {args.fixture or args.file}")
    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda l: _LAWS[l](A), laws))
    else:
        results = [_LAWS[law](A) for law in laws]
    for sub in results:
        report.extend_from(sub)
    return _emit(report, args.json)


def _parse_section(text: str, A: AlgebroidPresentation, what: str) -> Section:
    parts = [p for p in text.split(",")]
    if len(parts) != A.rank:
        raise _InputError(f"{what}: expected {A.rank} comma-separated components")
    return Section([parse_expr(p, A.base_vars) for p in parts])


def cmd_dual(args) -> int:
    A = _load_presentation(args)
    E = _parse_section(args.ev, A, "--ev")
    cert = pre_f_dual(A, E) if args.pre_f else dubrovin_dual(A, E)
    report = verify_certificate(cert, pre_f=args.pre_f)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(presentation_to_document(cert.dual), fh, indent=2)
            fh.write("\n")
    else:
        print(json.dumps(presentation_to_document(cert.dual), indent=2))
    return _emit(report, args.json)


def _load_matrix(path: str, A: AlgebroidPresentation):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise _InputError(str(exc)) from None
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    r = A.rank
    if not isinstance(raw, list) or len(raw) != r or any(
        not isinstance(row, list) or len(row) != r for row in raw
    ):
        raise SchemaError("$", f"expected a {r}x{r} matrix of expression strings")
    return [[parse_expr(cell, A.base_vars) for cell in row] for row in raw]


def _load_cochain(path: str, A: AlgebroidPresentation) -> list[MultiDer]:
    """Load one or more degree-2 cochains: {"D": c[k][i][j], "sigma": rows}."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise _InputError(str(exc)) from None
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    docs = raw if isinstance(raw, list) else [raw]
    r, n = A.rank, A.n
    out = []
    for pos, doc in enumerate(docs):
        path_k = f"[{pos}]" if isinstance(raw, list) else "$"
        if not isinstance(doc, dict) or "D" not in doc:
            raise SchemaError(path_k, "expected an object with a 'D' tensor")
        D_raw = doc["D"]
        if not isinstance(D_raw, list) or len(D_raw) != r:
            raise SchemaError(f"{path_k}.D", f"expected {r} matrices")
        D = {}
        for k, mat in enumerate(D_raw):
            for i, row in enumerate(mat):
                for j, cell in enumerate(row):
                    f = parse_expr(cell, A.base_vars)
                    key = (i, j)
                    cur = D.get(key)
                    comps = list(cur.components) if cur else [RatFunc.zero(n)] * r
                    comps[k] = f
                    D[key] = Section(comps)
        for i in range(r):
            for j in range(r):
                D.setdefault((i, j), Section.zero(r, n))
        sigma = {(i,): VectorField.zero(n) for i in range(r)}
        if doc.get("sigma") is not None:
            rows = doc["sigma"]
            if not isinstance(rows, list) or len(rows) != r:
                raise SchemaError(f"{path_k}.sigma", f"expected {r} rows")
            for i, row in enumerate(rows):
                sigma[(i,)] = VectorField([parse_expr(cell, A.base_vars) for cell in row])
        out.append(MultiDer(2, r, n, D, sigma))
    return out


def cmd_deform(args) -> int:
    A = _load_presentation(args)
    if args.nijenhuis:
        N = BundleMap(_load_matrix(args.nijenhuis, A))
        mode = "f" if A.bracket is not None else "pre_f" if A.prelie is not None else "comm"
        report = Report("nijenhuis deformation")
        report.extend_from(is_nijenhuis(A, N, mode))
        if report.overall:
            deformed = deform_by_nijenhuis(A, N)
            law = (
                check_f_algebroid
                if deformed.bracket is not None
                else check_pre_f if deformed.prelie is not None else check_comm_assoc
            )
            report.extend_from(law(deformed))
            doc = presentation_to_document(deformed)
            if args.out:
                with open(args.out, "w") as fh:
                    json.dump(doc, fh, indent=2)
                    fh.write("\n")
            else:
                print(json.dumps(doc, indent=2))
        return _emit(report, args.json)
    if not args.mu1:
        raise _InputError("provide --nijenhuis FILE or --mu1 FILE")
    mus = _load_cochain(args.mu1, A)
    order = args.order or len(mus)
    while len(mus) < order:
        mus.append(MultiDer.zero(2, A.rank, A.n))
    deform = FormalDeformation(A, mus[:order])
    report = check_n_deformation(deform)
    if report.overall:
        limit = semiclassical_limit(deform)
        names = [limit.basis_name(i) for i in range(limit.rank)]
        for i in range(limit.rank):
            for j in range(i + 1, limit.rank):
                val = limit.bracket_of(limit.basis(i), limit.basis(j))
                print(f"semiclassical [{names[i]},{names[j]}] = {limit.fmt(val)}")
        theta = obstruction(deform)
        report.add("obstruction-vanishes", f"theta_{order}", theta.is_zero(), None)
    return _emit(report, args.json)


def cmd_hierarchy(args) -> int:
    A = _load_presentation(args)
    if args.flows:
        halves = args.flows.split(";")
        if len(halves) != 2:
            raise _InputError("--flows expects two ';'-separated section expressions")
        X = _parse_section(halves[0], A, "--flows")
        Y = _parse_section(halves[1], A, "--flows")
        F = flow_from_section(A, X)
        G = flow_from_section(A, Y)
        return _emit(flows_commute(F, G, A.base_vars), args.json)
    alpha = args.alpha_max if args.alpha_max is not None else 1
    basis = [A.basis(i) for i in range(A.rank)]
    data = principal_hierarchy(A, Connection(), basis, alpha)
    return _emit(data.commutation, args.json)


def cmd_fixtures(args) -> int:
    for name, desc in sorted(fixture_names().items()):
        print(f"{name}\t{desc}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="falg",
        description="Exact symbolic checks for F-algebroids and their deformations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("file", nargs="?", help="structure file (JSON)")
        p.add_argument("--fixture", help="built-in fixture name (see 'fixtures')")
        p.add_argument("--json", metavar="PATH", help="also write the report as JSON")
        p.add_argument(
            "--seed",
            type=int,
            default=0,
            help="seed for randomized sub-checks (deterministic checks ignore it)",
        )

    p = sub.add_parser("check", help="verify structure laws")
    common(p)
    p.add_argument(
        "--law",
        action="append",
        choices=sorted(_LAWS),
        help="law to check (repeatable); default inferred from structures",
    )
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("dual", help="build and verify an eventual-identity dual")
    common(p)
    p.add_argument("--ev", required=True, help="eventual identity, comma-separated components")
    p.add_argument("--pre-f", dest="pre_f", action="store_true", help="use the pre-F dual")
    p.add_argument("--out", help="write the dual structure file here")
    p.set_defaults(func=cmd_dual)

    for name in ("deform", "nijenhuis"):
        p = sub.add_parser(name, help="Nijenhuis or formal deformation checks")
        common(p)
        p.add_argument("--nijenhuis", metavar="FILE", help="bundle-map matrix file (JSON)")
        p.add_argument("--mu1", metavar="FILE", help="deformation cochain file (JSON)")
        p.add_argument("--order", type=int, help="deformation order (pads with zeros)")
        p.add_argument("--out", help="write the deformed structure file here")
        p.set_defaults(func=cmd_deform)

    p = sub.add_parser("hierarchy", help="flow commutation and the principal hierarchy")
    common(p)
    p.add_argument("--alpha-max", type=int, dest="alpha_max", help="hierarchy depth")
    p.add_argument("--flows", help="two sections 'x1,..,xr;y1,..,yr' to compare directly")
    p.set_defaults(func=cmd_hierarchy)

    p = sub.add_parser("fixtures", help="list built-in fixtures")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (
        _InputError,
        SchemaError,
        ExprSyntaxError,
        UnknownVariable,
        UnknownFixture,
        ShapeError,
        NotTangent,
        NotCompatible,
        MissingStructure,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FalgError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
