"""Command-line front-end.

Subcommands: validate, classical, seesaw, ptm, report, catalog.  All
randomness flows from --seed through per-restart seed streams, and reports
with identical flags and seed are byte-identical (timings are only included
on request because they never reproduce).

Exit codes: 0 success, 1 invalid input file, 2 infeasible parameters
(enumeration caps, dimension or marginal-uniformity preconditions),
3 numerical breakdown inside a solver.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import catalog, fileio
from .ccp import build_game
from .classical import bell_bound, ccp_bound_general
from .errors import (
    DimensionMismatchError,
    EnumerationCapError,
    InvalidFunctionalError,
    MarginalUniformityError,
    NumericalBreakdownError,
    SchemaError,
)
from .functional import validate
from .ptm import _bob_ptm_operators, ptm_from_bell, ptm_value, seesaw_ptm
from .quantum import MeasurementSet, check_uniform_marginals, measurement_best_response, seesaw_bell

EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3


def _fmt(value: float) -> str:
    return f"{value:.9g}"


def _load(path: str):
    f = fileio.load_functional(path)
    violations = validate(f)
    if violations:
        raise InvalidFunctionalError(violations)
    return f


def _add_solver_flags(sub, ptm_flags=False):
    sub.add_argument("--dims", nargs=2, type=int, metavar=("DA", "DB"), default=None,
                     help="local dimensions for the entangled search (default: d d)")
    sub.add_argument("--restarts", type=int, default=10)
    sub.add_argument("--tol", type=float, default=1e-10, help="see-saw convergence tolerance")
    sub.add_argument("--max-iters", type=int, default=300)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--threads", type=int, default=1, help="worker threads for restarts")
    sub.add_argument("--aii-tol", type=float, default=1e-6,
                     help="tolerance for the uniform-marginal check")
    if ptm_flags:
        sub.add_argument("--force-aii", action="store_true",
                         help="renormalize preparations when marginals are not uniform")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bellccp",
                                 description="Bell functionals and their communication games")
    sp = ap.add_subparsers(dest="command", required=True)

    v = sp.add_parser("validate", help="check a functional file against all invariants")
    v.add_argument("file")

    c = sp.add_parser("classical", help="exact classical bounds (Bell and game)")
    c.add_argument("file")
    c.add_argument("--cap-bell", type=int, default=10**8)
    c.add_argument("--cap-ccp", type=int, default=10**7)

    s = sp.add_parser("seesaw", help="lower-bound the quantum value by see-saw")
    s.add_argument("file")
    _add_solver_flags(s)
    s.add_argument("--dump", metavar="PREFIX",
                   help="write PREFIX.state.txt / .alice.txt / .bob.txt dumps")

    p = sp.add_parser("ptm", help="prepare-transmit-measure values")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--from-seesaw", action="store_true",
                       help="build preparations from the entangled see-saw optimum")
    group.add_argument("--prep", metavar="DUMP",
                       help="load preparations from a dump and optimize Bob only")
    _add_solver_flags(p, ptm_flags=True)
    p.add_argument("--dump-prep", metavar="PATH", help="write the resulting preparations")

    r = sp.add_parser("report", help="run all solvers and emit a comparison report")
    r.add_argument("file")
    _add_solver_flags(r, ptm_flags=True)
    r.add_argument("--cap-bell", type=int, default=10**8)
    r.add_argument("--cap-ccp", type=int, default=10**7)
    r.add_argument("--format", choices=("text", "json"), default="text")
    r.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    r.add_argument("--timings", action="store_true",
                   help="include wall-clock timings in JSON (breaks byte-identical reruns)")

    cat = sp.add_parser("catalog", help="list or export built-in instances")
    csub = cat.add_subparsers(dest="catalog_command", required=True)
    csub.add_parser("list")
    ce = csub.add_parser("export")
    ce.add_argument("name")
    ce.add_argument("path")
    return ap


def _dims(args, d):
    if args.dims is None:
        return d, d
    return args.dims[0], args.dims[1]


def cmd_validate(args) -> int:
    f = fileio.load_functional(args.file)
    violations = validate(f)
    if not violations:
        print("valid")
        return EXIT_OK
    for v in violations:
        print(str(v))
    return EXIT_INVALID_INPUT


def cmd_classical(args) -> int:
    f = _load(args.file)
    B, strat = bell_bound(f, cap=args.cap_bell)
    print(f"bell bound        {_fmt(B)}")
    print(f"  a(x) = {list(strat.aOf)}   b(y) = {list(strat.bOf)}")
    game = build_game(f)
    value, messaging = ccp_bound_general(game, cap=args.cap_ccp)
    print(f"ccp general bound {_fmt(value)}")
    print(f"  m(x0, x) = {messaging.m.tolist()}")
    return EXIT_OK


def cmd_seesaw(args) -> int:
    f = _load(args.file)
    DA, DB = _dims(args, f.scenario.d)
    res = seesaw_bell(f, DA, DB, restarts=args.restarts, tol=args.tol,
                      seed=args.seed, max_iters=args.max_iters, threads=args.threads)
    aii = check_uniform_marginals(res.rho, res.A, args.aii_tol)
    print(f"best value   {_fmt(res.value)}   (dims {DA}x{DB}, restarts {args.restarts})")
    print(f"converged    {res.converged}")
    print(f"aii check    {'pass' if aii.passed else 'fail'} (worst deviation {_fmt(aii.worst_deviation)})")
    if args.dump:
        Path(args.dump + ".state.txt").write_text(fileio.dump_state(res.rho), encoding="utf-8")
        Path(args.dump + ".alice.txt").write_text(fileio.dump_measurements(res.A), encoding="utf-8")
        Path(args.dump + ".bob.txt").write_text(fileio.dump_measurements(res.B), encoding="utf-8")
        print(f"wrote {args.dump}.state.txt / .alice.txt / .bob.txt")
    return EXIT_OK


def _optimize_bob_for_preparations(game, prep, tol, max_iters):
    """Exact per-setting measurement optimization for fixed preparations."""
    povms = []
    value = 0.0
    for Rs in _bob_ptm_operators(game, prep):
        resp = measurement_best_response(Rs, tol=min(tol, 1e-12), max_iters=max_iters)
        povms.append(resp.povm)
        value += resp.value
    return value, MeasurementSet(povms)


def cmd_ptm(args) -> int:
    f = _load(args.file)
    game = build_game(f)
    prep_out = None
    if args.prep:
        try:
            text = Path(args.prep).read_text(encoding="utf-8")
        except OSError as exc:
            raise SchemaError(f"cannot read {args.prep}: {exc}") from exc
        prep = fileio.load_preparations(text)
        if prep.d != game.d or prep.mA != f.scenario.mA:
            raise DimensionMismatchError("preparation dump does not match the functional")
        value, _bob = _optimize_bob_for_preparations(game, prep, args.tol, args.max_iters)
        print(f"value with loaded preparations (Bob optimized)  {_fmt(value)}")
        prep_out = prep
    elif args.from_seesaw:
        DA, DB = _dims(args, f.scenario.d)
        res = seesaw_bell(f, DA, DB, restarts=args.restarts, tol=args.tol,
                          seed=args.seed, max_iters=args.max_iters, threads=args.threads)
        aii = check_uniform_marginals(res.rho, res.A, args.aii_tol)
        print(f"entangled see-saw value  {_fmt(res.value)}")
        print(f"aii check                {'pass' if aii.passed else 'fail'} "
              f"(worst deviation {_fmt(aii.worst_deviation)})")
        prep = ptm_from_bell(game, res.rho, res.A, args.aii_tol, force=args.force_aii)
        value = ptm_value(game, prep, res.B)
        label = "theorem-grade" if aii.passed else "advisory (marginals forced)"
        print(f"replayed transmission value  {_fmt(value)}   [{label}]")
        prep_out = prep
    else:
        res = seesaw_ptm(game, restarts=args.restarts, tol=args.tol,
                         max_iters=args.max_iters, seed=args.seed, threads=args.threads)
        print(f"ptm see-saw value  {_fmt(res.value)}   (restarts {args.restarts})")
        print(f"converged          {res.converged}")
        prep_out = res.prep
    if args.dump_prep and prep_out is not None:
        Path(args.dump_prep).write_text(fileio.dump_preparations(prep_out), encoding="utf-8")
        print(f"wrote {args.dump_prep}")
    return EXIT_OK


def run_report(f, *, file_label, DA, DB, restarts, tol, max_iters, seed, threads,
               aii_tol, force_aii, cap_bell, cap_ccp, with_timings) -> dict:
    """Run every solver and assemble the report dictionary.

    The comparisons block is always recomputed from the stored values.
    """
    notes = []
    timings = {}

    def timed(name, fn):
        t0 = time.perf_counter()
        out = fn()
        timings[name] = time.perf_counter() - t0
        return out

    s = f.scenario
    report: dict = {
        "version": "1",
        "instance": {
            "file": file_label,
            "d": s.d,
            "mA": s.mA,
            "mB": s.mB,
            "termCount": len(f.terms),
        },
        "seed": seed,
    }

    try:
        B, _ = timed("classicalBellBound", lambda: bell_bound(f, cap=cap_bell))
    except EnumerationCapError as exc:
        B = None
        notes.append(f"classical Bell bound skipped: {exc}")
    report["classicalBellBound"] = B

    game = build_game(f)
    try:
        ccp_value, _ = timed("ccpGeneralBound", lambda: ccp_bound_general(game, cap=cap_ccp))
    except EnumerationCapError as exc:
        ccp_value = None
        notes.append(f"ccp general bound skipped: {exc}")
    report["ccpGeneralBound"] = ccp_value

    res = timed("entangledSeesaw", lambda: seesaw_bell(
        f, DA, DB, restarts=restarts, tol=tol, seed=seed,
        max_iters=max_iters, threads=threads))
    report["entangledBestFound"] = {
        "value": res.value,
        "dims": [DA, DB],
        "restarts": restarts,
        "converged": res.converged,
    }

    aii = check_uniform_marginals(res.rho, res.A, aii_tol)
    report["aiiCheck"] = {"pass": aii.passed, "deviation": aii.worst_deviation, "tol": aii_tol}

    theorem3 = "AII violated"
    if DB == s.d:
        try:
            prep = timed("theorem3", lambda: ptm_from_bell(game, res.rho, res.A, aii_tol,
                                                           force=force_aii))
            theorem3 = ptm_value(game, prep, res.B)
            if not aii.passed:
                notes.append("theorem3Value computed with forced renormalization; "
                             "equality not guaranteed")
        except MarginalUniformityError:
            theorem3 = "AII violated"
    else:
        notes.append(f"theorem3Value needs DB = d = {s.d}, got DB = {DB}")
    report["theorem3Value"] = theorem3

    ptm_res = timed("ptmSeesaw", lambda: seesaw_ptm(
        game, restarts=restarts, tol=tol, max_iters=max_iters, seed=seed, threads=threads))
    report["ptmBestFound"] = {
        "value": ptm_res.value,
        "restarts": restarts,
        "converged": ptm_res.converged,
    }

    report["comparisons"] = {
        "ccpMinusBell": None if (B is None or ccp_value is None) else ccp_value - B,
        "ptmMinusEntangled": ptm_res.value - res.value,
    }
    report["timings"] = {k: round(v, 6) for k, v in timings.items()} if with_timings else None
    report["notes"] = notes
    return report


def report_to_text(report: dict) -> str:
    inst = report["instance"]
    lines = [
        f"instance      {inst['file']}  (d={inst['d']}, mA={inst['mA']}, mB={inst['mB']}, "
        f"{inst['termCount']} terms)",
        f"seed          {report['seed']}",
    ]

    def num(v):
        return "n/a" if v is None else _fmt(v)

    lines.append(f"bell bound    {num(report['classicalBellBound'])}")
    lines.append(f"ccp bound     {num(report['ccpGeneralBound'])}")
    ent = report["entangledBestFound"]
    lines.append(
        f"entangled     {_fmt(ent['value'])}   (dims {ent['dims'][0]}x{ent['dims'][1]}, "
        f"restarts {ent['restarts']}, converged {ent['converged']})"
    )
    aii = report["aiiCheck"]
    lines.append(
        f"aii check     {'pass' if aii['pass'] else 'fail'}   "
        f"(deviation {_fmt(aii['deviation'])}, tol {_fmt(aii['tol'])})"
    )
    t3 = report["theorem3Value"]
    lines.append(f"theorem3      {t3 if isinstance(t3, str) else _fmt(t3)}")
    ptm = report["ptmBestFound"]
    lines.append(f"ptm           {_fmt(ptm['value'])}   (restarts {ptm['restarts']}, "
                 f"converged {ptm['converged']})")
    cmp_ = report["comparisons"]
    lines.append(f"ccp - bell    {num(cmp_['ccpMinusBell'])}")
    lines.append(f"ptm - ent     {num(cmp_['ptmMinusEntangled'])}")
    if report["timings"]:
        for k, v in report["timings"].items():
            lines.append(f"time {k:<22} {v:.3f}s")
    for note in report["notes"]:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    f = _load(args.file)
    DA, DB = _dims(args, f.scenario.d)
    report = run_report(
        f,
        file_label=args.file,
        DA=DA,
        DB=DB,
        restarts=args.restarts,
        tol=args.tol,
        max_iters=args.max_iters,
        seed=args.seed,
        threads=args.threads,
        aii_tol=args.aii_tol,
        force_aii=args.force_aii,
        cap_bell=args.cap_bell,
        cap_ccp=args.cap_ccp,
        with_timings=args.timings,
    )
    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        text = report_to_text(report)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.catalog_command == "list":
        for name in catalog.catalog_names():
            print(name)
        return EXIT_OK
    try:
        f = catalog.by_name(args.name)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    fileio.save_functional(f, args.path)
    print(f"wrote {args.path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "validate": cmd_validate,
        "classical": cmd_classical,
        "seesaw": cmd_seesaw,
        "ptm": cmd_ptm,
        "report": cmd_report,
        "catalog": cmd_catalog,
    }
    try:
        return handlers[args.command](args)
    except (SchemaError, InvalidFunctionalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (EnumerationCapError, DimensionMismatchError, MarginalUniformityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except NumericalBreakdownError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())
