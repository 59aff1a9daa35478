"""Command-line entry point.

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 budget exceeded.
Every report carries the run configuration and a sha256 of the inputs, and
contains no timestamps, so re-running the header reproduces the body.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .entropy import CHECKS, PAIR_BUDGET, TOL, verify_all
from .errors import BudgetExceeded, FranklForgeError, NotClosed
from .families import (
    ClosureOp,
    SetFamily,
    WeightSpec,
    dualize,
    enumerate_closed_families,
    enumeration_size,
    is_intersection_closed,
    is_union_closed,
    random_closed_family,
    union_abundance,
    verify_frankl,
)
from .fileformat import family_to_json, load_family
from .functional import FunctionalParams
from .lifting import lift, mu_exact
from .optimizer import OptimizerConfig, reports_to_csv, scan_km, threshold_phi

EXIT_PASS, EXIT_FAIL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3


@dataclass
class RunConfig:
    subcommand: str
    source: str | None = None
    kvec: list[int] | None = None
    mvec: list[int] | None = None
    t: str | None = None
    tol: float | None = None
    grid: int | None = None
    seed: int = 0
    format: str = "text"
    jobs: int = 1
    budget: int | None = None
    extra: dict = field(default_factory=dict)


class Report:
    """Header (config + input hash) plus a body of named fields and an optional row table."""

    def __init__(self, cfg: RunConfig, inputs: Any):
        self.cfg = cfg
        blob = json.dumps({"config": asdict(cfg), "inputs": inputs}, sort_keys=True, default=str)
        self.input_hash = hashlib.sha256(blob.encode()).hexdigest()
        self.fields: dict[str, Any] = {}
        self.rows: list[dict] = []
        self.notices: list[str] = []

    def render(self) -> str:
        fmt = self.cfg.format
        if fmt == "json":
            return json.dumps(
                {
                    "config": asdict(self.cfg),
                    "input_hash": self.input_hash,
                    "notices": self.notices,
                    "result": _jsonable(self.fields),
                    "rows": _jsonable(self.rows),
                },
                indent=2,
            ) + "\n"
        header = [f"# config: {json.dumps(asdict(self.cfg), sort_keys=True)}", f"# input_hash: {self.input_hash}"]
        header += [f"# notice: {n}" for n in self.notices]
        if fmt == "csv":
            rows = self.rows or [self.fields]
            buf = io.StringIO()
            names = list(dict.fromkeys(k for r in rows for k in r))
            writer = csv.DictWriter(buf, fieldnames=names, lineterminator="\n")
            writer.writeheader()
            for r in rows:
                writer.writerow({k: _text(v) for k, v in r.items()})
            return "\n".join(header) + "\n" + buf.getvalue()
        lines = header + [f"{k}: {_text(v)}" for k, v in self.fields.items()]
        for r in self.rows:
            lines.append("  " + "  ".join(f"{k}={_text(v)}" for k, v in r.items()))
        return "\n".join(lines) + "\n"


def _text(v: Any) -> str:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, bool) or v is None:
        return str(v)
    if isinstance(v, float):
        return f"{v:.9g}"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_text(k)}: {_text(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_text(x) for x in v) + "]"
    return str(v)


def _jsonable(v: Any) -> Any:
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, dict):
        return {str(_jsonable(k)): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


# -- argument helpers --------------------------------------------------------


def _int_list(text: str | None) -> list[int] | None:
    """Parse "5", "5,4,3" or an inclusive range "5..12"."""
    if text is None:
        return None
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, a comma list or a range a..b, got {text!r}") from None


def _weights(args, n: int) -> WeightSpec:
    if args.t is not None:
        if args.k is not None or args.m is not None:
            raise ValueError("give either --t or --k/--m, not both")
        return WeightSpec.boltzmann(n, Fraction(args.t))
    kvec = _int_list(args.k) or [1]
    mvec = _int_list(args.m) or [1]
    kvec = kvec * n if len(kvec) == 1 else kvec
    mvec = mvec * n if len(mvec) == 1 else mvec
    if len(kvec) != n or len(mvec) != n:
        raise ValueError(f"--k/--m need 1 or {n} entries")
    return WeightSpec.product(kvec, mvec)


def _config(args, **extra) -> RunConfig:
    w_k = _int_list(args.k) if getattr(args, "k", None) else None
    w_m = _int_list(args.m) if getattr(args, "m", None) else None
    return RunConfig(
        subcommand=args.command,
        source=getattr(args, "family", None),
        kvec=w_k,
        mvec=w_m,
        t=getattr(args, "t", None),
        tol=args.tol,
        grid=args.grid,
        seed=args.seed,
        format=args.format,
        jobs=args.jobs,
        budget=args.budget,
        extra=extra,
    )


def _opt_config(args) -> OptimizerConfig:
    kw = {}
    if args.grid is not None:
        kw["grid"] = args.grid
    if args.tol is not None:
        kw["bisection_tol"] = args.tol
    return OptimizerConfig(**kw)


# -- subcommands -------------------------------------------------------------


def cmd_check(args) -> tuple[Report, int]:
    f = load_family(args.family)
    cfg = _config(args)
    rep = Report(cfg, family_to_json(f))
    w = _weights(args, f.n)
    if is_intersection_closed(f):
        rec = verify_frankl(f, w)
        rep.fields.update(form="intersection", best_element=rec.best_element, best_value=rec.best_value,
                          passed=rec.passed, abundances=rec.abundances)
        return rep, EXIT_PASS if rec.passed else EXIT_FAIL
    if not is_union_closed(f):
        raise NotClosed("family is neither intersection-closed nor union-closed")
    rep.notices.append("input is union-closed; checked through its complement family")
    dual = dualize(f)
    direct = {i: union_abundance(f, w, i) for i in f.elements()}
    best = max(direct.values())
    best_i = min(i for i, v in direct.items() if v == best)
    passed = best >= Fraction(1, 2)
    fields = dict(form="union", best_element=best_i, best_value=best, passed=passed, abundances=direct)
    if len(dual.elements()) > 0:
        rec = verify_frankl(dual, w)
        # the complement family has the same abundances on its support
        fields["dual_abundances"] = rec.abundances
        fields["dual_consistent"] = all(direct.get(i, Fraction(0)) == v for i, v in rec.abundances.items())
    rep.fields.update(fields)
    return rep, EXIT_PASS if passed else EXIT_FAIL


def _exhaustive_range(n: int, w: WeightSpec, allow_n5: bool, start: int, stop: int):
    count, fails, worst = 0, [], None
    for f in enumerate_closed_families(n, ClosureOp.INTERSECTION, 2, allow_n5=allow_n5, start=start, stop=stop):
        rec = verify_frankl(f, w)
        count += 1
        if worst is None or rec.best_value < worst[0]:
            worst = (rec.best_value, f.to_lists())
        if not rec.passed:
            fails.append(f.to_lists())
    return count, fails, worst


def _exhaustive_task(a):
    return _exhaustive_range(*a)


def cmd_exhaustive(args) -> tuple[Report, int]:
    n = args.n
    w = _weights(args, n)
    cfg = _config(args, n=n, allow_n5=args.allow_n5)
    rep = Report(cfg, {"n": n})
    total = enumeration_size(n)
    jobs = max(1, args.jobs)
    bounds = [total * j // jobs for j in range(jobs + 1)]
    tasks = [(n, w, args.allow_n5, bounds[j], bounds[j + 1]) for j in range(jobs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_exhaustive_task, tasks))
    else:
        parts = [_exhaustive_range(*t) for t in tasks]
    count = sum(p[0] for p in parts)
    fails = [f for p in parts for f in p[1]]
    worsts = [p[2] for p in parts if p[2] is not None]
    worst = min(worsts, key=lambda x: x[0]) if worsts else None
    rep.fields.update(n=n, families=count, counterexamples=len(fails),
                      min_best_value=worst[0] if worst else None,
                      min_witness=worst[1] if worst else None)
    rep.rows = [{"counterexample": f} for f in fails]
    return rep, EXIT_FAIL if fails else EXIT_PASS


def _entropy_family(args) -> SetFamily:
    if args.family:
        f = load_family(args.family)
    else:
        f = random_closed_family(args.n, ClosureOp.INTERSECTION, args.density, args.seed)
    if not is_intersection_closed(f):
        if is_union_closed(f):
            raise NotClosed("lifted families need an intersection-closed base; dualize union-closed input first")
        raise NotClosed("family is not intersection-closed")
    return f


def cmd_entropy_verify(args) -> tuple[Report, int]:
    f = _entropy_family(args)
    w = _weights(args, f.n)
    which = CHECKS if args.which == "all" else tuple(args.which.split(","))
    cfg = _config(args, which=list(which), n=args.n, density=args.density)
    rep = Report(cfg, family_to_json(f))
    lf = lift(f, w, args.budget)
    tol = TOL if args.tol is None else args.tol
    pair_budget = PAIR_BUDGET if args.budget is None else args.budget
    reports = verify_all(lf, which, tol, pair_budget)
    rep.rows = [{"check": r.check, **r.to_dict()} for r in reports]
    for r in rep.rows:
        del r["instance"]
    identities = [r.residual for r in reports if r.check in ("hf", "hfmin", "diff", "chain")]
    ok = all(r.passed for r in reports)
    rep.fields.update(instance=reports[0].instance if reports else "", lifted_size=lf.size,
                      max_residual=max(identities, default=0.0), passed=ok)
    rep.fields["measures"] = {i: [(x, p) for x, p in mu_exact(lf, i).items()] for i in range(1, f.n + 1)}
    return rep, EXIT_PASS if ok else EXIT_FAIL


def cmd_threshold(args) -> tuple[Report, int]:
    ks, ms = _int_list(args.k) or [], _int_list(args.m) or [1]
    if len(ks) != 1 or len(ms) != 1:
        raise ValueError("threshold needs a single --k and --m")
    opt = _opt_config(args)
    cfg = _config(args, optimizer=asdict(opt))
    rep = Report(cfg, {"k": ks[0], "m": ms[0]})
    r = threshold_phi(FunctionalParams(ks[0], ms[0]), opt)
    rep.fields.update(r.to_dict())
    return rep, EXIT_PASS


def cmd_scan(args) -> tuple[Report, int]:
    ks = _int_list(args.k)
    if not ks:
        raise ValueError("scan needs --k")
    ms = _int_list(args.m)
    opt = _opt_config(args)
    cfg = _config(args, optimizer=asdict(opt))
    rep = Report(cfg, {"k": ks, "m": ms})
    reports = scan_km(ks, ms, opt, args.jobs)
    if args.format == "csv":
        rep.rows = list(csv.DictReader(io.StringIO(reports_to_csv(reports))))
    else:
        rep.rows = [r.to_dict() for r in reports]
    rep.fields["cells"] = len(reports)
    rep.fields["all_capped"] = all(r.capped for r in reports)
    return rep, EXIT_PASS


def cmd_sample(args) -> tuple[Report, int]:
    op = ClosureOp(args.op)
    cfg = _config(args, n=args.n, density=args.density, count=args.count, op=op.value)
    rep = Report(cfg, {"n": args.n})
    weighted = args.k is not None or args.t is not None
    failed = False
    for s in range(args.count):
        f = random_closed_family(args.n, op, args.density, args.seed + s)
        row: dict[str, Any] = {"seed": args.seed + s, "sets": f.to_lists()}
        if weighted and len(f) >= 2:
            w = _weights(args, f.n)
            g = f if op is ClosureOp.INTERSECTION else dualize(f)
            if len(g.elements()) > 0:
                rec = verify_frankl(g, w)
                row.update(best_element=rec.best_element, best_value=rec.best_value, passed=rec.passed)
                failed |= not rec.passed
        rep.rows.append(row)
    return rep, EXIT_FAIL if failed else EXIT_PASS


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", help="k value(s): scalar, comma list or range a..b")
    common.add_argument("--m", help="m value(s): scalar or comma list")
    common.add_argument("--t", help="Boltzmann parameter as a rational p/q in (0, 1]")
    common.add_argument("--tol", type=float, help="residual tolerance (entropy) or bisection tolerance (thresholds)")
    common.add_argument("--grid", type=int, help="x-grid size per measure class")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, default=1, help="worker processes for exhaustive and scan")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text")
    common.add_argument("--budget", type=int, help="size budget for lifted families and pair distributions")
    common.add_argument("--allow-n5", action="store_true", help="permit the 2^32-candidate n=5 enumeration")

    p = argparse.ArgumentParser(prog="frankl-forge", description="Weighted Frankl checks and entropy functional tools.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[common], help="verify one family file")
    c.add_argument("family")

    e = sub.add_parser("exhaustive", parents=[common], help="verify every intersection-closed family on [n]")
    e.add_argument("--n", type=int, required=True)

    v = sub.add_parser("entropy-verify", parents=[common], help="brute-force entropy identities on a lifted family")
    v.add_argument("family", nargs="?")
    v.add_argument("--n", type=int, default=2, help="ground set size for a random family")
    v.add_argument("--density", type=float, default=0.5)
    v.add_argument("--which", default="all", help=f"comma list from {','.join(CHECKS)} or 'all'")

    sub.add_parser("threshold", parents=[common], help="positivity threshold phi* for one (k, m)")
    sub.add_parser("scan", parents=[common], help="threshold table over k (and m <= isqrt(k) by default)")

    s = sub.add_parser("sample", parents=[common], help="draw random closed families, verify if weights given")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--density", type=float, default=0.5)
    s.add_argument("--count", type=int, default=1)
    s.add_argument("--op", choices=[o.value for o in ClosureOp], default="intersection")
    return p


COMMANDS = {
    "check": cmd_check,
    "exhaustive": cmd_exhaustive,
    "entropy-verify": cmd_entropy_verify,
    "threshold": cmd_threshold,
    "scan": cmd_scan,
    "sample": cmd_sample,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_PASS
    try:
        rep, code = COMMANDS[args.command](args)
    except BudgetExceeded as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (FranklForgeError, ValueError, argparse.ArgumentTypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    for note in rep.notices:
        print(f"notice: {note}", file=sys.stderr)
    sys.stdout.write(rep.render())
    return code


if __name__ == "__main__":
    sys.exit(main())
