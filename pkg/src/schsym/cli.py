"""Command-line front end.

Verbs: `catalog list|show`, `verify algebra|invariance|potentials`,
`numeric covariance|bridge`, `explain`, `run`.  The report path of `run`
writes report.json, report.md, one CSV per suite, and the matplotlib figures
into the output directory (flag --out, else $SCHSYM_OUT, else ./schsym-out).

Exit status: 0 all checks pass, 1 check failures, 2 configuration errors,
3 internal errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import catalog, report, suites
from .fields import rep_to_text

SUITE_NAMES = ("algebra", "roots", "invariance", "potentials", "numeric", "bridge")


class ConfigError(Exception):
    pass


def _parse_params(spec: str) -> dict[str, Fraction]:
    out = {}
    if not spec:
        return out
    for item in spec.split(","):
        name, _, val = item.partition("=")
        if not name or not val:
            raise ConfigError(f"malformed parameter binding {item!r}")
        try:
            out[name.strip()] = Fraction(val.strip())
        except ValueError as exc:
            raise ConfigError(f"parameter {name!r}: {exc}") from exc
    return out


def _parse_grid(spec: str) -> tuple[int, float, float]:
    try:
        n_s, h_s, dt_s = spec.split(",")
        return int(n_s), float(h_s), float(dt_s)
    except ValueError as exc:
        raise ConfigError(f"--grid expects n,h,dt (got {spec!r})") from exc


def _load_config(path: str) -> dict[str, str]:
    out = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ConfigError(f"config line without '=': {line!r}")
        out[key.strip()] = val.strip()
    return out


def _outdir(args) -> Path:
    out = args.out or os.environ.get("SCHSYM_OUT") or "schsym-out"
    return Path(out)


def cmd_catalog(args) -> int:
    if args.action == "list":
        for info in catalog.list_cases():
            u = ", ".join(f"{k}={v}" for k, v in info.unknowns.items())
            print(f"case {info.case}: {info.label:6s} {info.variant}  ({u})")
        return 0
    rep = catalog.build_variable_mass(args.case, args.branch)
    print(rep_to_text(rep), end="")
    return 0


def cmd_explain(args) -> int:
    try:
        info = catalog.case_info(args.case)
    except catalog.UnknownCaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print("valid cases: 1..8", file=sys.stderr)
        return 2
    print(f"case {info.case}: algebra {info.label} ({info.variant}, "
          f"{'parabolic' if info.parabolic else 'almost-parabolic'})")
    print(f"generators: {', '.join(info.members)}")
    print(f"coupling functions: " + ", ".join(f"{k}={v}" for k, v in info.unknowns.items()))
    for branch in catalog.BRANCHES:
        ops = catalog.invariant_operators(info.case, branch)
        print(f"invariant operator(s) [{branch}]: " + " ; ".join(str(o) for o in ops))
    from .potentials import POTENTIAL_TABLE

    for (case, variant), row in sorted(POTENTIAL_TABLE.items()):
        if case != info.case:
            continue
        desc = row.form_spec["prefactor"] + f" * f({', '.join(row.form_spec['args'])})" \
            if row.form_spec else "derived-candidate (symbols not defined in the source table)"
        cond = f"  [{row.condition}]" if row.condition else ""
        print(f"potential ({variant}): {desc}{cond}  status={row.status}")
    print()
    print(rep_to_text(catalog.build_variable_mass(info.case, "x!=1/2")), end="")
    return 0


def _run_suites(selected, args):
    results = []
    figdata = {}
    for name in selected:
        if name == "algebra":
            results.append(suites.run_algebra())
        elif name == "roots":
            results.append(suites.run_roots())
            figdata["roots"] = suites.root_diagram_points()
        elif name == "invariance":
            cases = [args.case] if getattr(args, "case", None) else range(1, 9)
            results.append(suites.run_invariance(cases))
        elif name == "potentials":
            results.append(suites.run_potentials(real=getattr(args, "real", False)))
        elif name == "numeric":
            n, h, dt = getattr(args, "grid_tuple", (256, None, 1e-3))
            res, fd = suites.run_numeric(n=n, dt=dt, quick=getattr(args, "quick", False))
            results.append(res)
            figdata["numeric"] = fd
        elif name == "bridge":
            res, fd = suites.run_bridge()
            results.append(res)
            figdata["bridge"] = fd
        else:
            raise ConfigError(f"unknown suite {name!r}; choose from {SUITE_NAMES}")
    return results, figdata


def _emit(results, figdata, args, config_echo) -> int:
    doc = report.assemble(results, config_echo)
    outdir = _outdir(args)
    fmt = args.format if args.format != "both" else "both"
    written = report.write_outputs(doc, outdir, "both" if fmt == "both" else fmt)
    from . import figures

    if "roots" in figdata:
        written.append(figures.render_root_diagram(figdata["roots"], outdir / "root_diagram.png"))
        written.append(figures.render_root_diagram(figdata["roots"], outdir / "root_diagram.svg"))
    if "numeric" in figdata:
        written.append(figures.render_convergence(figdata["numeric"], outdir / "covariance.png"))
    if "bridge" in figdata:
        written.append(figures.render_bridge(figdata["bridge"], outdir / "bridge_rate.png"))
    for p in written:
        print(f"wrote {p}")
    ok = doc["report"]["pass"]
    print(f"overall: {'PASS' if ok else 'FAIL'}")
    return 0 if ok else 1


def cmd_verify(args) -> int:
    mapping = {"algebra": ["algebra", "roots"], "invariance": ["invariance"],
               "potentials": ["potentials"]}
    results, figdata = _run_suites(mapping[args.what], args)
    return _emit(results, figdata, args, {"verb": f"verify {args.what}"})


def cmd_numeric(args) -> int:
    mapping = {"covariance": ["numeric"], "bridge": ["bridge"]}
    if args.grid:
        args.grid_tuple = _parse_grid(args.grid)
        n, h, dt = args.grid_tuple
        args.grid_tuple = (n, h, dt)
    results, figdata = _run_suites(mapping[args.what], args)
    return _emit(results, figdata, args, {"verb": f"numeric {args.what}"})


def cmd_run(args) -> int:
    if args.config:
        cfg = _load_config(args.config)
        if args.suite is None and "suite" in cfg:
            args.suite = cfg["suite"]
        if args.out is None and "out" in cfg:
            args.out = cfg["out"]
        if args.format == "both" and "format" in cfg:
            args.format = cfg["format"]
        if not args.params and "params" in cfg:
            args.params = cfg["params"]
    if not args.suite:
        raise ConfigError(
            f"no suites selected; pass --suite with a comma list from {SUITE_NAMES}"
        )
    selected = [s.strip() for s in args.suite.split(",") if s.strip()]
    if not selected:
        raise ConfigError("empty suite list")
    if args.grid:
        args.grid_tuple = _parse_grid(args.grid)
    results, figdata = _run_suites(selected, args)
    return _emit(results, figdata, args, {"suites": selected})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="schsym", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="verb", required=True)

    def common(sp):
        sp.add_argument("--out", default=None, help="output directory (or $SCHSYM_OUT)")
        sp.add_argument("--format", default="both", choices=("json", "markdown", "both"))
        sp.add_argument("--params", default="", help="k=v,... parameter bindings")
        sp.add_argument("--x", default=None, help="scaling dimension binding")
        sp.add_argument("--real", action="store_true", help="real field (PsiS = Psi)")
        sp.add_argument("--case", type=int, default=None)
        sp.add_argument("--grid", default=None, help="n,h,dt for the numeric suites")
        sp.add_argument("--quick", action="store_true", help="skip refinement reruns")

    pc = sub.add_parser("catalog", help="list or show the classification rows")
    pc.add_argument("action", choices=("list", "show"))
    pc.add_argument("case", type=int, nargs="?", default=None)
    pc.add_argument("--branch", default="x!=1/2", choices=catalog.BRANCHES)
    pc.set_defaults(fn=cmd_catalog)

    pe = sub.add_parser("explain", help="describe one case end to end")
    pe.add_argument("case", type=int)
    pe.set_defaults(fn=cmd_explain)

    pv = sub.add_parser("verify", help="run the symbolic verification suites")
    pv.add_argument("what", choices=("algebra", "invariance", "potentials"))
    common(pv)
    pv.set_defaults(fn=cmd_verify)

    pn = sub.add_parser("numeric", help="run the floating-point cross checks")
    pn.add_argument("what", choices=("covariance", "bridge"))
    common(pn)
    pn.set_defaults(fn=cmd_numeric)

    pr = sub.add_parser("run", help="run selected suites and write reports")
    pr.add_argument("--suite", default=None,
                    help="comma list from " + ",".join(SUITE_NAMES))
    pr.add_argument("--config", default=None, help="key=value config file")
    common(pr)
    pr.set_defaults(fn=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb == "catalog" and args.action == "show" and args.case is None:
        print("error: catalog show needs a case id", file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 2
    except catalog.UnknownCaseError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
