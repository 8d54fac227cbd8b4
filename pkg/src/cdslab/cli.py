"""Command line: build protocol chains, verify them, sweep pipe counts.

Three subcommands:

* ``build``  compiles a chain such as ``gh,cds`` or ``dre,psm,psqm,cdqs`` for a
  chosen function and writes a self-contained descriptor (a construction
  recipe with every searched artifact embedded).
* ``verify`` rebuilds a descriptor and runs the matching exhaustive verifier,
  writing a pass/fail report. Tampered descriptors fail with a witness.
* ``sweep``  runs the pipe-count search over every function of a given shape.

Exit codes: 0 pass, 1 verification failure, 2 usage error, 3 budget exceeded.
Outputs are deterministic: same inputs and seed give identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .algebra import (SpanProgram, span_and1, span_eq1, span_or1, span_dnf,
                      sp_eval)
from .boolfn import BoolFn, literal_input, named_fn, all_functions
from .errors import BudgetError, DomainError, ValidationError
from .gardenhose import GhStrategy, RIGHT, gh_eval, gh_generic, gh_search
from .nlqc import (cdqs_from_cds, cdqs_from_frouting, cdqs_from_psqm,
                   frouting_from_cdqs, frouting_from_gh, psqm_from_psm,
                   verify_cdqs, verify_frouting, verify_psqm)
from .protocols import (DEFAULT_BUDGET, cds_from_gh, cds_from_psm,
                        cds_from_span, dre_qr, psm_from_dre,
                        psm_generic_table, verify_cds, verify_dre, verify_psm)

BASES = ("gh", "span", "dre", "psm")
EDGES = {
    ("gh", "cds"), ("gh", "frouting"),
    ("span", "cds"),
    ("dre", "psm"),
    ("psm", "cds"), ("psm", "psqm"),
    ("cds", "cdqs"),
    ("cdqs", "frouting"),
    ("frouting", "cdqs"),
    ("psqm", "cdqs"),
}

DESCRIPTOR_FORMAT = "cdslab-descriptor"
REPORT_FORMAT = "cdslab-report"


class VerifyFailure(Exception):
    """Verification failed; carries a jsonable witness."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


# -- argument handling ---------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdslab",
        description="build, verify, and sweep disclosure/routing protocol chains",
    )
    parser.add_argument("--version", action="version", version=f"cdslab {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="compile a chain and write its descriptor")
    b.add_argument("--chain", required=True,
                   help="comma list, e.g. gh,cds or dre,psm,psqm,cdqs")
    b.add_argument("--fn", default=None,
                   help="named function family: and or xor eq ip index qr")
    b.add_argument("--table", default=None,
                   help="explicit truth table as nx:ny:hex (bit (x<<ny)|y is "
                        "hex bit i, least significant first)")
    b.add_argument("--nx", type=int, default=1, help="bits per side / Alice bits")
    b.add_argument("--p", type=int, default=2, help="prime field / qr modulus")
    b.add_argument("--variant", choices=("comm", "rand"), default="comm",
                   help="span-based disclosure flavour")
    b.add_argument("--max-pipes", type=int, default=4)
    b.add_argument("--max-qubits", type=int, default=14)
    b.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    b.add_argument("--seed", type=int, default=0,
                   help="recorded in the descriptor; all searches are "
                        "deterministic, so this only tags the output")
    b.add_argument("--out", default=None, help="descriptor path (default stdout)")
    b.add_argument("--format", choices=("json",), default="json")

    v = sub.add_parser("verify", help="rebuild a descriptor and verify it")
    v.add_argument("descriptor", help="path to a descriptor JSON file")
    v.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    v.add_argument("--tol", type=float, default=1e-9,
                   help="tolerance for quantum figures of merit")
    v.add_argument("--out", default=None, help="report path (default stdout)")
    v.add_argument("--format", choices=("json", "csv"), default="json")

    s = sub.add_parser("sweep", help="pipe-count search over all functions")
    s.add_argument("--nx", type=int, required=True)
    s.add_argument("--ny", type=int, required=True)
    s.add_argument("--max-pipes", type=int, default=4)
    s.add_argument("--budget", type=int, default=10 ** 8)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def _parse_fn(args) -> BoolFn:
    if args.table:
        parts = args.table.split(":")
        if len(parts) != 3:
            raise ValidationError("--table wants nx:ny:hex")
        n_x, n_y = int(parts[0]), int(parts[1])
        packed = int(parts[2], 16)
        size = 1 << (n_x + n_y)
        if packed >= (1 << size):
            raise ValidationError("table value wider than 2^(nx+ny) bits")
        table = tuple((packed >> i) & 1 for i in range(size))
        return BoolFn(n_x, n_y, table, name=f"t{parts[2]}")
    if not args.fn:
        raise ValidationError("need --fn or --table")
    name = args.fn.lower()
    if name == "qr":
        return named_fn("qr", p=args.p)
    if name == "index":
        return named_fn("index", n_x=args.nx)
    return named_fn(name, n=args.nx)


def _span_for(f: BoolFn, p: int) -> SpanProgram:
    if f.name == "and1":
        return span_and1(p)
    if f.name == "or1":
        return span_or1(p)
    if f.name == "eq1":
        return span_eq1(p)
    ones = f.ones()
    if not ones:
        raise ValidationError("constant-0 function has no satisfying terms")
    n = f.n_x + f.n_y
    terms = []
    for (x, y) in ones:
        z = literal_input(f, x, y)
        terms.append([(k + 1, z[k]) for k in range(n)])
    return span_dnf(terms, n, p)


# -- chain compilation -----------------------------------------------------------


def _check_chain(tokens) -> None:
    if not tokens:
        raise ValidationError("empty chain")
    if tokens[0] not in BASES:
        raise ValidationError(f"chain must start at one of {BASES}")
    for a, b in zip(tokens, tokens[1:]):
        if (a, b) not in EDGES:
            raise ValidationError(f"no rule builds {b!r} from {a!r}")


def _base_artifact(token: str, f: BoolFn, opts: dict, embedded: dict):
    """Build (or reload) the chain's base object; returns (obj, artifacts)."""
    if token == "gh":
        if "gh_strategy" in embedded:
            strategy = GhStrategy.from_json(json.dumps(embedded["gh_strategy"]))
        else:
            strategy = gh_search(f, opts["max_pipes"], budget=opts["budget"])
            if strategy is None:
                strategy = gh_generic(f)
        bad = [(x, y) for (x, y) in f.inputs()
               if (gh_eval(strategy, x, y).side == RIGHT) != (f.eval(x, y) == 1)]
        if bad:
            raise VerifyFailure("strategy routes some input to the wrong side",
                                witness={"inputs": [list(b) for b in bad]})
        return strategy, {"gh_strategy": json.loads(strategy.to_json())}
    if token == "span":
        if "span_program" in embedded:
            program = SpanProgram.from_json(json.dumps(embedded["span_program"]))
        else:
            program = _span_for(f, opts["p"])
        bad = [(x, y) for (x, y) in f.inputs()
               if sp_eval(program, literal_input(f, x, y)) != f.eval(x, y)]
        if bad:
            raise VerifyFailure("span program disagrees with the function",
                                witness={"inputs": [list(b) for b in bad]})
        return program, {"span_program": json.loads(program.to_json())}
    if token == "dre":
        params = f.params
        if "p" not in params:
            raise ValidationError("the dre base needs --fn qr")
        dre = dre_qr(params["p"], alice_positions=tuple(params["alice_positions"]),
                     n_bits=params["n_bits"])
        return dre, {}
    if token == "psm":
        return psm_generic_table(f, budget=opts["budget"]), {}
    raise ValidationError(f"unknown base {token!r}")


def _compile_chain(tokens, f: BoolFn, opts: dict, embedded: dict):
    obj, artifacts = _base_artifact(tokens[0], f, opts, embedded)
    kind = tokens[0]
    for tok in tokens[1:]:
        if kind == "gh" and tok == "cds":
            obj = cds_from_gh(obj, f)
        elif kind == "gh" and tok == "frouting":
            obj = frouting_from_gh(obj, f)
        elif kind == "span" and tok == "cds":
            obj = cds_from_span(obj, f, variant=opts["variant"])
        elif kind == "dre" and tok == "psm":
            obj = psm_from_dre(obj)
        elif kind == "psm" and tok == "cds":
            obj = cds_from_psm(obj)
        elif kind == "psm" and tok == "psqm":
            obj = psqm_from_psm(obj)
        elif kind == "cds" and tok == "cdqs":
            obj = cdqs_from_cds(obj)
        elif kind == "cdqs" and tok == "frouting":
            obj = frouting_from_cdqs(obj)
        elif kind == "frouting" and tok == "cdqs":
            obj = cdqs_from_frouting(obj)
        elif kind == "psqm" and tok == "cdqs":
            obj = cdqs_from_psqm(obj)
        else:
            raise ValidationError(f"no rule builds {tok!r} from {kind!r}")
        kind = tok
    return kind, obj, artifacts


# -- verification dispatch --------------------------------------------------------


def _verify_object(kind, obj, f: BoolFn, budget: int, tol: float) -> dict:
    if kind == "gh":
        return {"status": "pass", "kind": kind,
                "report": {"pipes": obj.pipes}}
    if kind == "span":
        return {"status": "pass", "kind": kind,
                "report": {"rows": obj.size, "width": obj.width, "p": obj.p}}
    if kind == "cds":
        rep = verify_cds(obj, budget=budget)
        ok = rep.perfect
    elif kind == "psm":
        rep = verify_psm(obj, budget=budget)
        ok = rep.perfect
    elif kind == "dre":
        rep = verify_dre(obj, budget=budget)
        ok = rep.perfect
    elif kind == "cdqs":
        rep = verify_cdqs(obj, budget=budget)
        ok = rep.perfect(tol)
    elif kind == "frouting":
        rep = verify_frouting(obj, budget=budget)
        ok = rep.perfect(tol)
    elif kind == "psqm":
        rep = verify_psqm(obj, budget=budget)
        ok = rep.perfect(tol)
    else:
        raise ValidationError(f"cannot verify kind {kind!r}")
    out = {"status": "pass" if ok else "fail", "kind": kind,
           "report": rep.to_jsonable()}
    if not ok:
        out["witness"] = out["report"].get("witnesses", {})
    return out


# -- io helpers --------------------------------------------------------------------


def _emit(obj, path, fmt="json") -> None:
    if fmt == "json":
        text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    else:
        rows = []
        _flatten(obj, "", rows)
        text = "key,value\n" + "".join(f"{k},{v}\n" for k, v in rows)
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _flatten(obj, prefix, rows) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj, key=str):
            _flatten(obj[k], f"{prefix}{k}." if prefix == "" else f"{prefix}{k}.", rows)
    elif isinstance(obj, (list, tuple)):
        rows.append((prefix.rstrip("."), ";".join(str(v) for v in obj)))
    else:
        rows.append((prefix.rstrip("."), obj))


# -- subcommands --------------------------------------------------------------------


def _cmd_build(args) -> int:
    try:
        f = _parse_fn(args)
        tokens = [t.strip() for t in args.chain.split(",") if t.strip()]
        _check_chain(tokens)
        opts = {"p": args.p, "variant": args.variant,
                "max_pipes": args.max_pipes, "budget": args.budget}
        kind, _, artifacts = _compile_chain(tokens, f, opts, {})
    except (ValidationError, DomainError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except VerifyFailure as exc:
        print(f"build produced an invalid artifact: {exc}", file=sys.stderr)
        return 1
    descriptor = {
        "format": DESCRIPTOR_FORMAT,
        "version": 1,
        "chain": tokens,
        "kind": kind,
        "fn": json.loads(f.to_json()),
        "options": {"p": args.p, "variant": args.variant,
                    "max_pipes": args.max_pipes, "seed": args.seed},
        "artifacts": artifacts,
    }
    _emit(descriptor, args.out, "json")
    return 0


def _cmd_verify(args) -> int:
    try:
        with open(args.descriptor) as fh:
            desc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _emit({"format": REPORT_FORMAT, "version": 1, "status": "fail",
               "error": f"unreadable descriptor: {exc}"}, args.out, args.format)
        return 1
    result = {"format": REPORT_FORMAT, "version": 1}
    try:
        if desc.get("format") != DESCRIPTOR_FORMAT:
            raise VerifyFailure("not a descriptor file")
        f = BoolFn.from_json(json.dumps(desc["fn"]))
        tokens = list(desc["chain"])
        _check_chain(tokens)
        opts = dict(desc.get("options", {}))
        opts.setdefault("p", 2)
        opts.setdefault("variant", "comm")
        opts.setdefault("max_pipes", 4)
        opts["budget"] = args.budget
        kind, obj, _ = _compile_chain(tokens, f, opts, desc.get("artifacts", {}))
        result.update(_verify_object(kind, obj, f, args.budget, args.tol))
        result["chain"] = tokens
        result["fn"] = desc["fn"]
    except VerifyFailure as exc:
        result.update({"status": "fail", "error": str(exc),
                       "witness": exc.witness})
    except (ValidationError, DomainError, KeyError, TypeError, ValueError) as exc:
        result.update({"status": "fail",
                       "error": f"descriptor rejected: {exc}",
                       "witness": str(exc)})
    _emit(result, args.out, args.format)
    return 0 if result.get("status") == "pass" else 1


def _cmd_sweep(args) -> int:
    if args.nx < 0 or args.ny < 0 or args.nx + args.ny > 4:
        print("usage error: sweep supports nx+ny <= 4", file=sys.stderr)
        return 2
    rows = []
    for index, f in enumerate(all_functions(args.nx, args.ny)):
        found = gh_search(f, args.max_pipes, budget=args.budget)
        if found is not None:
            rows.append((index, f.name, found.pipes, "search"))
        else:
            rows.append((index, f.name, gh_generic(f).pipes, "generic"))
    if args.format == "json":
        obj = [{"index": i, "table": name, "pipes": p, "method": m}
               for (i, name, p, m) in rows]
        _emit({"format": "cdslab-sweep", "version": 1, "n_x": args.nx,
               "n_y": args.ny, "results": obj}, args.out, "json")
    else:
        text = "index,table,pipes,method\n" + "".join(
            f"{i},{name},{p},{m}\n" for (i, name, p, m) in rows)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        if args.cmd == "build":
            return _cmd_build(args)
        if args.cmd == "verify":
            return _cmd_verify(args)
        if args.cmd == "sweep":
            return _cmd_sweep(args)
        parser.print_usage(sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
