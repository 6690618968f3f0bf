"""Command-line front end.

Subcommands::

    gen      write a coloring file
    run      run an algorithm; writes a JSON-lines trace, a witness and a report
    certify  certify numeric claims (or the maximum of any field)
    contour  write a field on a uniform grid as CSV
    oracle   exact small Ramsey / book-Ramsey numbers
    check    re-validate a witness file against a coloring

Exit status: 0 on success, 1 when a claim or check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .book import BookVariant, run_book, trace_report
from .certify import CLAIMS, certify_max, check_certificate, emit_contour, run_claims
from .classic import es_books_hold, es_bound_violations, ramsey_book_induction, run_es, run_es_offdiag
from .coloring import DomainError, EdgeColoring, generate, load
from .oracle import book_ramsey_number, count_avoiding, ramsey_number
from .search import BookWitness, CliqueWitness, witness_from_dict
from .symmetric import run_symmetric, symmetric_trace_report
from .trace import dumps_line, encode, write_trace

ALGORITHMS = ("es", "es-offdiag", "book-v1", "book-mu", "book-offdiag", "symmetric", "ramsey-induction")


@dataclass
class RunConfig:
    """Everything needed to reproduce a run (output paths excluded)."""

    algorithm: str
    source: dict
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


class UsageError(Exception):
    pass


# coloring sources -------------------------------------------------------------


def _add_source(p: argparse.ArgumentParser, required_n: bool = False) -> None:
    g = p.add_argument_group("coloring source")
    g.add_argument("--coloring", type=Path, help="read the coloring from a file")
    g.add_argument("--n", type=int, help="number of vertices for a generated coloring")
    g.add_argument("--kind", default="random", choices=["random", "all_red", "all_blue", "paley"])
    g.add_argument("--p-red", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)


def _source(args) -> tuple[EdgeColoring, dict]:
    if args.coloring is not None:
        col = load(args.coloring)
        src = {"file": args.coloring.name}
    else:
        if args.n is None:
            raise UsageError("give --coloring FILE or --n N")
        col = generate(args.n, args.kind, p_red=args.p_red, seed=args.seed)
        src = {"generator": args.kind, "n": args.n, "p_red": args.p_red, "seed": args.seed}
    src["sha256"] = hashlib.sha256(col.to_bytes()).hexdigest()
    return col, src


# subcommands --------------------------------------------------------------------


def cmd_gen(args) -> int:
    col = generate(args.n, args.kind, p_red=args.p_red, seed=args.seed)
    col.save(args.out, binary=args.binary)
    print(f"wrote {args.out} (n={col.n})")
    return 0


def _require(args, *names: str) -> None:
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        raise UsageError(f"{args.algorithm} needs " + ", ".join("--" + m for m in missing))


def cmd_run(args) -> int:
    col, src = _source(args)
    algo = args.algorithm
    params: dict = {}
    records: list[dict] = []
    witness = None
    report: dict = {}
    if algo in ("es", "es-offdiag"):
        _require(args, "k")
        if algo == "es":
            res = run_es(col, args.k)
        else:
            _require(args, "ell")
            res = run_es_offdiag(col, args.k, args.ell)
        params = {"k": res.k, "ell": res.ell, "gamma": f"{res.gamma.numerator}/{res.gamma.denominator}"}
        records = [s.to_dict() for s in res.state.steps]
        witness = res.witness
        report = {"bound_violations": es_bound_violations(res), "books_hold": es_books_hold(col, res)}
        outcome = res.outcome
    elif algo.startswith("book-"):
        _require(args, "k")
        kw = {"eps": args.eps, "choice": args.choice}
        if args.no_swap:
            kw["allow_swap"] = False
        if algo == "book-v1":
            variant = BookVariant.v1(args.k, **kw)
        elif algo == "book-mu":
            _require(args, "mu")
            variant = BookVariant.cutoff(args.k, Fraction(args.mu).limit_denominator(10 ** 6), **kw)
        else:
            _require(args, "ell")
            variant = BookVariant.offdiag(args.k, args.ell, **kw)
        res = run_book(col, variant, check_invariants=args.check_invariants)
        params = variant.params()
        records = [r.to_dict() for r in res.records]
        witness = res.witness
        report = trace_report(res.records, variant, res.x0, res.y0).to_dict()
        outcome = res.outcome
    elif algo == "symmetric":
        _require(args, "k")
        res = run_symmetric(
            col, args.k, eta=Fraction(args.eta), kappa_cutoff=Fraction(args.kappa_cutoff),
            eps=args.eps, check_invariants=args.check_invariants,
        )
        params = res.params.to_dict()
        records = [r.to_dict() for r in res.records]
        witness = res.witness
        report = symmetric_trace_report(res.records, res.params, res.sizes0).to_dict()
        if res.failure is not None:
            report["failure"] = asdict(res.failure)
        outcome = res.outcome
    else:  # ramsey-induction
        _require(args, "t", "m")
        log: list = []
        witness = ramsey_book_induction(col, args.t, args.m, log)
        params = {"t": args.t, "m": args.m}
        records = log
        outcome = f"{witness.color.value}_book"
        report = {"valid": witness.validate(col)}

    config = RunConfig(algo, src, params)
    header = {"config": config.to_dict(), "outcome": outcome}
    if args.trace:
        write_trace(args.trace, header, records)
    if args.witness:
        if witness is None:
            print(f"no witness for outcome {outcome}; {args.witness} not written", file=sys.stderr)
        else:
            Path(args.witness).write_text(dumps_line(witness.to_dict()) + "\n")
    summary = {"outcome": outcome, "steps": len(records), "report": report}
    if witness is not None:
        summary["witness"] = witness.to_dict()
    if args.report:
        Path(args.report).write_text(json.dumps(encode(summary), indent=2, sort_keys=True) + "\n")
    if args.figure:
        from .plotting import trace_figure

        trace_figure([encode(r) for r in records], args.figure, title=f"{algo}: {outcome}")
    print(f"outcome={outcome} steps={len(records)}")
    print(dumps_line(summary))
    return 0


def cmd_certify(args) -> int:
    if args.field:
        region = tuple(args.region) if args.region else (0.0, 1.0, 0.0, 1.0)
        cb = certify_max(args.field, region=region, tol=args.tol, budget=args.budget)
        print(
            f"{cb.label}: max in [{cb.lower:.9f}, {cb.upper:.9f}] "
            f"at ({cb.argmax[0]:.6f}, {cb.argmax[1]:.6f}); cells={cb.cells} status={cb.status}"
        )
        if args.certificate:
            cb.write_certificate(args.certificate)
            rep = check_certificate(args.certificate)
            print(f"certificate {args.certificate}: replay {'ok' if rep.ok else 'FAILED'}")
            if not rep.ok:
                return 1
        if args.figure:
            from .plotting import contour_figure

            contour_figure([cb.field], args.figure, mark=cb.argmax)
        return 0 if cb.ok else 1
    names = args.claims or ["all"]
    try:
        results = run_claims(names, tol=args.tol)
    except KeyError as exc:
        raise UsageError(f"{exc.args[0]}; known claims: {', '.join(CLAIMS)}, all")
    for r in results:
        print(r.line())
    if args.certificate_dir:
        out = Path(args.certificate_dir)
        out.mkdir(parents=True, exist_ok=True)
        for r in results:
            for name, cb in r.bounds.items():
                cb.write_certificate(out / f"{name}.json")
    if args.json:
        Path(args.json).write_text(
            json.dumps([encode({"name": r.name, "passed": r.passed, "detail": r.detail, "value": r.value})
                        for r in results], indent=2) + "\n"
        )
    return 0 if all(r.passed for r in results) else 1


def cmd_contour(args) -> int:
    if args.resolution < 2:
        raise UsageError("--resolution must be >= 2")
    text = emit_contour(args.field, args.resolution, args.threshold)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.figure:
        from .plotting import contour_figure

        fields = [args.field] + list(args.overlay or [])
        contour_figure(fields, args.figure, resolution=min(args.resolution, 400), threshold=args.threshold)
    return 0


def cmd_oracle(args) -> int:
    start = time.perf_counter()
    if args.what == "r":
        res = ramsey_number(args.a, args.b)
    elif args.what == "rb":
        res = book_ramsey_number(args.a, args.b)
    else:
        if args.c is None:
            raise UsageError("oracle count needs N K L")
        print(count_avoiding(args.a, args.b, args.c))
        return 0
    print(res.value)
    if args.verbose:
        print(f"# nodes={res.nodes} seconds={time.perf_counter() - start:.3f}", file=sys.stderr)
    return 0


def cmd_check(args) -> int:
    col = load(args.coloring)
    data = json.loads(Path(args.witness).read_text())
    if data is None:
        print("no witness in file")
        return 1
    w = witness_from_dict(data)
    ok = w.validate(col)
    if ok and args.k is not None and isinstance(w, CliqueWitness):
        ok = w.k >= args.k
    if ok and isinstance(w, BookWitness):
        ok = (args.t is None or w.t >= args.t) and (args.m is None or w.m >= args.m)
    print("valid" if ok else "invalid")
    return 0 if ok else 1


# parser -------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ramsey-books", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a coloring file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--kind", default="random", choices=["random", "all_red", "all_blue", "paley"])
    g.add_argument("--p-red", type=float, default=0.5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", type=Path, required=True)
    g.add_argument("--binary", action="store_true", help="packed binary format instead of text")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("run", help="run an algorithm and emit trace, witness and report")
    r.add_argument("algorithm", choices=ALGORITHMS)
    _add_source(r)
    r.add_argument("--k", type=int)
    r.add_argument("--ell", type=int)
    r.add_argument("--mu", type=float)
    r.add_argument("--eps", type=float, help="override the loss parameter epsilon")
    r.add_argument("--choice", default="least", choices=["least", "max_gain"])
    r.add_argument("--no-swap", action="store_true", help="never swap colors at the start")
    r.add_argument("--eta", type=str, default="1/8000")
    r.add_argument("--kappa-cutoff", type=str, default="400")
    r.add_argument("--t", type=int)
    r.add_argument("--m", type=int)
    r.add_argument("--check-invariants", action="store_true")
    r.add_argument("--trace", type=Path)
    r.add_argument("--witness", type=Path)
    r.add_argument("--report", type=Path)
    r.add_argument("--figure", type=Path, help="also render the trace as an image")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("certify", help="certify numeric claims or a field maximum")
    c.add_argument("claims", nargs="*", help=f"claim names ({', '.join(CLAIMS)}) or 'all'")
    c.add_argument("--field", help="certify the maximum of this field instead, e.g. 'min:F,G_mu:2/5'")
    c.add_argument("--region", type=float, nargs=4, metavar=("X0", "X1", "Y0", "Y1"))
    c.add_argument("--tol", type=float, help="gap tolerance (default: $RAMSEY_TOL or 1e-4)")
    c.add_argument("--budget", type=int, help="cell budget (default: $RAMSEY_CELL_BUDGET)")
    c.add_argument("--certificate", type=Path, help="write the certificate (with --field)")
    c.add_argument("--certificate-dir", type=Path, help="write claim certificates here")
    c.add_argument("--json", type=Path, help="write claim results as JSON")
    c.add_argument("--figure", type=Path, help="contour image with the argmax (with --field)")
    c.set_defaults(func=cmd_certify)

    k = sub.add_parser("contour", help="field values on a uniform grid as CSV")
    k.add_argument("--field", required=True, help="e.g. G, F_hat, 'G_mu:2/5', 'min:F,G'")
    k.add_argument("--overlay", action="append", help="extra field drawn on --figure (repeatable)")
    k.add_argument("--resolution", type=int, default=101)
    k.add_argument("--threshold", type=float, help="emit 1{field > threshold} instead of values")
    k.add_argument("--out", type=Path)
    k.add_argument("--figure", type=Path)
    k.set_defaults(func=cmd_contour)

    o = sub.add_parser("oracle", help="exact small Ramsey numbers by exhaustive search")
    o.add_argument("what", choices=["r", "rb", "count"], help="r K L | rb T M | count N K L")
    o.add_argument("a", type=int)
    o.add_argument("b", type=int)
    o.add_argument("c", type=int, nargs="?")
    o.add_argument("-v", "--verbose", action="store_true")
    o.set_defaults(func=cmd_oracle)

    h = sub.add_parser("check", help="validate a witness file against a coloring")
    h.add_argument("--coloring", type=Path, required=True)
    h.add_argument("--witness", type=Path, required=True)
    h.add_argument("--k", type=int, help="require a clique on at least k vertices")
    h.add_argument("--t", type=int, help="require a spine of at least t vertices")
    h.add_argument("--m", type=int, help="require at least m pages")
    h.set_defaults(func=cmd_check)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
