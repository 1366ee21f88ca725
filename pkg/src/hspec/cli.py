"""Command-line entry point: ``hspec <subcommand> ...``.

Exit codes: 0 success, 1 counterexample found, 2 usage or input error,
3 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

from . import io as hio
from .constructions import PROFILE_FUNCTIONALS, alpha_profile, refinement_sequence
from .errors import DepthOverflow, HspecError, NotConverged, UnknownLaw
from .harness import ENTRY_MODELS, GenConfig, run_campaign
from .laws import ENTRYWISE, Tolerances, catalog, evaluate_law, get_law
from .spectral import Functional, certified

EXIT_OK = 0
EXIT_COUNTEREXAMPLE = 1
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3


@dataclass(frozen=True)
class RunConfig:
    """Everything a ``check`` run depends on besides the catalog itself."""

    gen: GenConfig = field(default_factory=GenConfig)
    tolerances: Tolerances = field(default_factory=Tolerances)
    laws: tuple[str, ...] | None = None  # None selects the whole catalog
    functionals: tuple[str, ...] | None = None
    trials: int = 100
    workers: int = 1
    output: str | None = None
    shrink: bool = True
    include_volatile: bool = False

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("worker count must be >= 1")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


def resolve_workers(flag: int | None, env: dict | None = None) -> int:
    """Flag beats the HSPEC_WORKERS environment variable, which beats 1."""
    if flag is not None:
        return flag
    env = os.environ if env is None else env
    raw = env.get("HSPEC_WORKERS")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"HSPEC_WORKERS must be an integer, got {raw!r}") from None
    return 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: error: {message}")


class _Usage(Exception):
    pass


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="hspec", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="store_true", help="print the version and exit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    sub.add_parser("laws", help="list the law catalog")

    c = sub.add_parser("check", help="run a seeded counterexample campaign")
    c.add_argument("--law", default="all", help="law id, comma-separated ids, or 'all'")
    c.add_argument("--trials", type=_positive_int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--max-dim", type=_positive_int, default=8)
    c.add_argument("--min-dim", type=_positive_int, default=1)
    c.add_argument("--entry-model", choices=ENTRY_MODELS, default="loguniform")
    c.add_argument("--zero-density", type=float, default=0.2)
    c.add_argument("--injection-rate", type=float, default=0.1)
    c.add_argument("--functional", action="append", help="restrict to these functionals (repeatable)")
    c.add_argument("--rtol", type=float, default=None)
    c.add_argument("--atol", type=float, default=None)
    c.add_argument("--spectral-rtol", type=float, default=None)
    c.add_argument("--spectral-atol", type=float, default=None)
    c.add_argument("--workers", type=_positive_int, default=None)
    c.add_argument("--json", metavar="PATH", help="write the campaign report here")
    c.add_argument("--volatile", action="store_true", help="include wall time in the JSON")
    c.add_argument("--no-shrink", action="store_true")
    c.add_argument("--quiet", action="store_true", help="print only the summary line")

    e = sub.add_parser("eval", help="evaluate one law on user-supplied inputs")
    e.add_argument("--law", required=True)
    e.add_argument("--input", required=True, metavar="SPEC_JSON")
    e.add_argument("--functional", default=None)
    e.add_argument("--rtol", type=float, default=None)
    e.add_argument("--atol", type=float, default=None)
    e.add_argument("--json", metavar="PATH")

    r = sub.add_parser("rho", help="certified value of one functional")
    r.add_argument("--functional", default="r", help="r, op1, op2, opinf, w or maxentry")
    r.add_argument("--matrix", required=True)
    r.add_argument("--spectral-rtol", type=float, default=None)

    f = sub.add_parser("refine", help="dyadic refinement sequence of a symmetrization")
    f.add_argument("--matrix", required=True)
    f.add_argument("--alpha", type=float, required=True)
    f.add_argument("--beta", type=float, default=None)
    f.add_argument("--depth", type=int, default=3)

    a = sub.add_parser("profile", help="sample alpha -> f(S_alpha(K)) on a grid")
    a.add_argument("--matrix", required=True)
    a.add_argument("--functional", default="r")
    a.add_argument("--grid", type=int, default=21)
    a.add_argument("--json", metavar="PATH")
    return p


def _tolerances(args) -> Tolerances:
    base = Tolerances()
    kw = {}
    for name in ("rtol", "atol", "spectral_rtol", "spectral_atol"):
        v = getattr(args, name, None)
        if v is not None:
            kw[name] = v
    return Tolerances(**{**base.__dict__, **kw})


def run_config(args) -> RunConfig:
    laws = None if args.law == "all" else tuple(x.strip() for x in args.law.split(","))
    if laws:
        for law_id in laws:
            get_law(law_id)
    return RunConfig(
        gen=GenConfig(
            seed=args.seed,
            min_dim=min(args.min_dim, args.max_dim),
            max_dim=args.max_dim,
            entry_model=args.entry_model,
            zero_density=args.zero_density,
            structured_injection_rate=args.injection_rate,
        ),
        tolerances=_tolerances(args),
        laws=laws,
        functionals=tuple(Functional.parse(x).value for x in args.functional) if args.functional else None,
        trials=args.trials,
        workers=resolve_workers(args.workers),
        output=args.json,
        shrink=not args.no_shrink,
        include_volatile=args.volatile,
    )


def cmd_laws(args, out) -> int:
    for law in catalog():
        topic, statement = law.anchor
        funcs = ",".join(f.short for f in law.functionals) or ENTRYWISE
        print(f"{law.id}  [{funcs}]  {topic}", file=out)
        print(f"      {statement}", file=out)
        print(f"      input: {law.input_shape.describe()}", file=out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    cfg = run_config(args)
    rep = run_campaign(
        cfg.laws,
        cfg.trials,
        cfg.gen,
        cfg.tolerances,
        workers=cfg.workers,
        functionals=cfg.functionals,
        do_shrink=cfg.shrink,
    )
    if not args.quiet:
        for row in rep.rows:
            fshort = row.functional if row.functional == ENTRYWISE else Functional.parse(row.functional).short
            status = "FAIL" if row.failed else "ok"
            print(
                f"{row.law_id:4s} {fshort:9s} {status:4s} passed={row.passed} failed={row.failed} "
                f"skipped={row.skipped} rechecked={row.rechecked} max_slack={row.max_slack_consumed:.3g}",
                file=out,
            )
        for c in rep.counterexamples:
            link = c.report.links[c.report.failing_link]
            labels = c.report.labels
            print(
                f"counterexample {c.law_id}/{c.report.functional} trial {c.trial_index} dim {c.dim}: "
                f"{labels[link[0]]} > {labels[link[1]]} by {c.report.worst_gap:.6g}",
                file=out,
            )
    skipped = sum(r.skipped for r in rep.rows)
    print(
        f"{len(rep.rows)} law/functional pairs, {cfg.trials} trials each, seed {cfg.gen.seed}: "
        f"{len(rep.counterexamples)} counterexamples, {skipped} skipped, {rep.wall_time:.1f}s",
        file=out,
    )
    if cfg.output:
        hio.save_report(rep, cfg.output, include_volatile=cfg.include_volatile)
    return EXIT_OK if rep.passed else EXIT_COUNTEREXAMPLE


def cmd_eval(args, out) -> int:
    inp = hio.load_input(args.input)
    if args.functional is not None:
        from dataclasses import replace

        inp = replace(inp, functional=Functional.parse(args.functional))
    tol = _tolerances(args)
    rep = evaluate_law(args.law, inp, tol)
    for label, value, width in zip(rep.labels, rep.values, rep.widths):
        print(f"{label:>24s} = {value!r}  (+/- {width:.3g})", file=out)
    for k, (i, j) in enumerate(rep.links):
        mark = "FAIL" if k == rep.failing_link else "ok"
        print(f"  {rep.labels[i]} <= {rep.labels[j]}: gap {rep.gaps[k]:.6g} {mark}", file=out)
    print(f"verdict: {rep.verdict}  slack_used={rep.slack_used:.3g}", file=out)
    if args.json:
        hio.save_report(rep, args.json, inp=inp)
    if not rep.converged and not rep.passed:
        print("spectral brackets did not converge; verdict is inconclusive", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK if rep.passed else EXIT_COUNTEREXAMPLE


def cmd_rho(args, out) -> int:
    A = hio.load_matrix(args.matrix)
    f = Functional.parse(args.functional)
    kw = {} if args.spectral_rtol is None else {"rtol": args.spectral_rtol}
    cv = certified(f, A, **kw)
    print(f"{f.short} = {cv.value!r}", file=out)
    print(f"interval [{cv.lo!r}, {cv.hi!r}]  width {cv.width:.3g}", file=out)
    if not cv.converged:
        print("bracket did not reach the requested tolerance", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_refine(args, out) -> int:
    K = hio.load_matrix(args.matrix)
    seq = refinement_sequence(K, args.alpha, args.beta, args.depth)
    for n, (v, t) in enumerate(zip(seq.values, seq.terms)):
        print(f"rho_{n} = {v!r}  [{t.lo!r}, {t.hi!r}]", file=out)
    print(f"cap = {seq.cap!r}", file=out)
    if not all(t.converged for t in seq.terms) or not seq.cap_term.converged:
        print("some brackets did not reach the requested tolerance", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    return EXIT_OK


def cmd_profile(args, out) -> int:
    K = hio.load_matrix(args.matrix)
    f = Functional.parse(args.functional)
    if f not in PROFILE_FUNCTIONALS:
        raise _Usage(f"profile supports r, op2 and w, not {args.functional}")
    prof = alpha_profile(K, f, args.grid)
    doc = {
        "schema_version": hio.SCHEMA_VERSION,
        "kind": "alpha_profile",
        "functional": f.value,
        "matrix": K.tolist(),
        "samples": [
            {"alpha": a, "value": t.value, "lo": t.lo, "hi": t.hi}
            for a, t in zip(prof.grid, prof.terms)
        ],
    }
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(hio.dumps(doc))
    else:
        out.write(hio.dumps(doc))
    if not all(t.converged for t in prof.terms):
        return EXIT_NONCONVERGENCE
    return EXIT_OK


COMMANDS = {
    "laws": cmd_laws,
    "check": cmd_check,
    "eval": cmd_eval,
    "rho": cmd_rho,
    "refine": cmd_refine,
    "profile": cmd_profile,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.version:
            from . import __version__

            print(__version__, file=out)
            return EXIT_OK
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return COMMANDS[args.command](args, out)
    except _Usage as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (NotConverged, DepthOverflow) as exc:
        print(f"hspec: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except UnknownLaw as exc:
        print(f"hspec: unknown law {exc.args[0] if exc.args else ''}", file=sys.stderr)
        return EXIT_USAGE
    except (HspecError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"hspec: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code if isinstance(exc.code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
