"""Command-line front end: ``fhs <command> ...``.

Exit codes: 0 success, 1 certification or verification failure,
2 malformed input, 3 violated construction precondition.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field as dc_field
from math import gcd
from pathlib import Path
from typing import Sequence

from .analyze import DEFAULT_BUDGET, certify
from .construct import (FhsFormatError, FhsSet, check_property_Au, check_property_Av,
                        construct_class1, construct_class2, construct_class3,
                        default_sigma, inner_set, class3_strict_condition)
from .errors import (BudgetError, FhsError, FieldError, HypothesisError, NotPrimitiveError,
                     VerificationError)
from .fmaps import LinearizedMap, PowerMap, dbf_create, frobenius_map, verify_balanced
from .galois import GF, Tower, coset_representatives, format_polynomial, prime_power

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_PRECONDITION = 0, 1, 2, 3

# argparse destinations that steer the invocation rather than describe the job
_META = {"command", "save_job", "func"}


@dataclass
class JobSpec:
    """A CLI invocation as data: the command plus its argument values."""

    command: str
    args: dict = dc_field(default_factory=dict)

    def to_json(self) -> dict:
        return {"command": self.command, "args": dict(sorted(self.args.items()))}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "JobSpec":
        if not isinstance(data, dict) or "command" not in data:
            raise FhsFormatError("job file needs a 'command' entry")
        return cls(str(data["command"]), dict(data.get("args", {})))

    @classmethod
    def load(cls, path: str | Path) -> "JobSpec":
        try:
            return cls.from_json(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise FhsFormatError(f"{path}: invalid JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _ints(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        return [int(c) for c in text.replace(" ", "").split(",") if c]
    except ValueError as exc:
        raise FhsFormatError(f"expected comma-separated integers, got {text!r}") from exc


def _elements(field: GF, text: str | None) -> list[int] | None:
    """Comma-separated elements; bracketed groups are coefficient tuples."""
    if text is None:
        return None
    items, depth, cur = [], 0, ""
    for ch in text:
        if ch in "[(":
            depth += 1
        elif ch in "])":
            depth -= 1
        if ch == "," and depth == 0:
            items.append(cur)
            cur = ""
        else:
            cur += ch
    items.append(cur)
    return [field.parse(s) for s in items if s.strip()]


def _field(args, prefix: str = "") -> GF:
    p = getattr(args, prefix + "p")
    m = getattr(args, prefix + "m")
    modulus = _ints(getattr(args, prefix + "modulus"))
    if p is None:
        raise FhsFormatError(f"--{prefix.replace('_', '-')}p is required")
    return GF(p, m or 1, modulus, require_primitive=not args.allow_nonprimitive)


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_set(fhs: FhsSet, args) -> None:
    text = fhs.to_csv() if args.format == "csv" else fhs.dumps() + "\n"
    _write(text, args.output)


def _load_set(path: str) -> FhsSet:
    text = Path(path).read_text()
    if path.endswith(".csv"):
        return FhsSet.from_csv(text)
    return FhsSet.loads(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    cls = args.construction
    if cls == 3:
        base = _field(args)
        top_mod = _ints(args.top_modulus)
        top = GF(base.p, 2 * base.m, top_mod, require_primitive=not args.allow_nonprimitive)
        tower = Tower(top, base.m, base if args.modulus else None)
        w = _elements(tower.base, args.w) or [1]
        f = _dbf_spec(args)
        theta = top.parse(args.theta) if args.theta else None
        fhs = construct_class3(tower, w, args.r, f, theta=theta, unsafe=args.unsafe)
    else:
        field = _field(args)
        if cls == 1:
            sigma = _elements(field, args.sigma)
            reps = _elements(field, args.reps)
            fhs = construct_class1(field, args.k, _ints(args.P) or [1], args.d, sigma, reps,
                                   enforce=not args.unsafe)
        else:
            psi = (LinearizedMap(field, _ints(args.psi_P)) if args.psi_P
                   else frobenius_map(field, args.psi_j))
            w = _elements(field, args.w)
            if not w:
                raise FhsFormatError("--w is required for class 2")
            alpha = field.parse(args.alpha) if args.alpha else None
            fhs = construct_class2(field, w, args.r, args.d, psi, alpha=alpha, unsafe=args.unsafe)
    _emit_set(fhs, args)
    return EXIT_OK


def cmd_certify(args) -> int:
    fhs = _load_set(args.input)
    report = certify(fhs, args.mode, budget=args.budget, threads=args.threads)
    text = report.to_csv() if args.format == "csv" else report.dumps() + "\n"
    _write(text, args.output)
    s = report.to_json()["summary"]
    print(f"strict_corr_optimal={s['strict_corr_optimal']} size_optimal={s['size_optimal']}"
          f" failing_L={report.failing_L()[:10]}", file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_FAIL


def _dbf_spec(args) -> dict:
    kind = args.kind
    spec: dict = {"kind": kind}
    if kind == "trace_power":
        if args.f_d is None:
            raise FhsFormatError("--d is required for trace_power")
        spec["d"] = args.f_d
    elif kind == "lin_type" and args.l is not None:
        spec["l"] = args.l
    elif kind == "linear_surjective":
        spec["c"] = args.c or 1
    elif kind == "composite":
        if not args.spec:
            raise FhsFormatError("--spec JSON is required for composite functions")
        spec = json.loads(args.spec)
    return spec


def cmd_check_dbf(args) -> int:
    p, k = prime_power(args.q)
    top = GF(p, k * args.n, _ints(args.top_modulus), require_primitive=not args.allow_nonprimitive)
    tower = Tower(top, k)
    spec = _dbf_spec(args)
    try:
        f = dbf_create(spec, tower, cap=args.cap, check_params=not args.unsafe)
    except VerificationError as exc:
        delta = getattr(exc, "delta", None)
        print(json.dumps({"ok": False, "spec": spec, "message": str(exc),
                          "delta": delta, "histogram": getattr(exc, "histogram", None)}))
        return EXIT_FAIL
    _, hist = verify_balanced(f, top, tower.base)
    print(json.dumps({"ok": True, "spec": spec, "domain": top.to_json(),
                      "codomain": tower.base.to_json(), "balanced_histogram": hist,
                      "difference_balanced": True, "verified": f.verified,
                      "checked_deltas": f.checked_deltas, "d_form_degree": f.d_form_degree,
                      "notes": f.notes}, sort_keys=True))
    return EXIT_OK


def cmd_check_props(args) -> int:
    field = _field(args)
    out: dict = {}
    ok = True
    if args.k is not None:
        sigma = _elements(field, args.sigma) or default_sigma(field, args.k)
        reps = coset_representatives(field, args.k, _elements(field, args.reps))
        U = inner_set(field, args.k, sigma, reps)
        phi = LinearizedMap(field, _ints(args.P) or [1], strict=False)
        good, wit = check_property_Au(U, phi)
        out["A_u"] = {"ok": good, "witness": wit}
        ok &= good
    if args.d is not None:
        v = [field.alpha_pow(t * args.r) for t in range((field.q - 1) // args.r)]
        psi = PowerMap(field, args.d, strict=False)
        good, wit = check_property_Av(v, psi)
        out["A_v"] = {"ok": good, "witness": wit}
        ok &= good
    if not out:
        raise FhsFormatError("give --k (inner set) and/or --d (outer vector)")
    print(json.dumps(out, sort_keys=True))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_export(args) -> int:
    fhs = _load_set(args.input)
    fmt = args.format or ("json" if args.input.endswith(".csv") else "csv")
    args.format = fmt
    _emit_set(fhs, args)
    return EXIT_OK


def cmd_info(args) -> int:
    field = _field(args)
    p, m, q = field.p, field.m, field.q
    info: dict = {"p": p, "m": m, "q": q, "modulus": format_polynomial(field.modulus),
                  "modulus_coeffs": list(field.modulus), "root_order": field.root_order,
                  "root_is_primitive": field.is_primitive_root,
                  "alpha": list(field.coeffs(field.alpha.code)),
                  "T": (q - 1) // (p - 1)}
    if args.k is not None:
        info["class1"] = {"N": p ** args.k * (q - 1), "M": p ** (m - args.k), "d_prime": q,
                          "n_prime": q - 1, "k_divides_m": m % args.k == 0 and args.k < m}
    if args.r is not None:
        r = args.r
        info["class2"] = {"n_prime": (q - 1) // r if (q - 1) % r == 0 else None,
                          "M": r, "d_prime": p ** (m - 1), "r_divides_p_minus_1": (p - 1) % r == 0,
                          "gcd_r_m": gcd(r, m)}
        info["class3"] = {"n_prime": (q * q - 1) // r if (q - 1) % r == 0 else None, "M": r,
                          "d_prime": q, "r_odd_divides_q_minus_1": r % 2 == 1 and (q - 1) % r == 0,
                          "table_condition": class3_strict_condition(p, m, r)}
    if args.d is not None:
        info["gcd_d_q_minus_1"] = gcd(args.d, q - 1)
    print(json.dumps(info, sort_keys=True))
    return EXIT_OK


def cmd_run(args) -> int:
    job = JobSpec.load(args.job)
    return run(job)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_field_args(sp, required: bool = True) -> None:
    sp.add_argument("--p", type=int, required=required, help="odd prime characteristic")
    sp.add_argument("--m", type=int, default=1, help="extension degree")
    sp.add_argument("--modulus", help="ascending coefficients c0,...,c_{m-1},1")
    sp.add_argument("--allow-nonprimitive", action="store_true",
                    help="accept an irreducible modulus whose root is not primitive")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fhs", description="Optimal FHS set toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--save-job", help="write this invocation as a job file")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (default: $FHS_THREAD_BUDGET or 1)")

    g = sub.add_parser("gen", help="construct an FHS set")
    g.add_argument("--class", dest="construction", type=int, choices=(1, 2, 3), required=True)
    _add_field_args(g)
    g.add_argument("--k", type=int, help="subfield degree (class 1)")
    g.add_argument("--d", type=int, default=1, help="power exponent")
    g.add_argument("--P", help="linearized polynomial coefficients (class 1)")
    g.add_argument("--sigma", help="sigma(0),...,sigma(p^k-1) (class 1)")
    g.add_argument("--reps", help="coset representatives (class 1)")
    g.add_argument("--w", help="trace-vector weights (classes 2, 3)")
    g.add_argument("--r", type=int, default=1, help="decimation / family size (classes 2, 3)")
    g.add_argument("--psi-j", type=int, default=0, help="psi = Frobenius power j (class 2)")
    g.add_argument("--psi-P", help="psi as linearized polynomial coefficients (class 2)")
    g.add_argument("--alpha", help="generator override (class 2)")
    g.add_argument("--top-modulus", help="modulus of GF(q^2) over GF(p) (class 3)")
    g.add_argument("--kind", default="trace_power", help="DBF kind (class 3)")
    g.add_argument("--f-d", type=int, default=1, help="DBF exponent (class 3)")
    g.add_argument("--l", type=int, help="lin_type parameter (class 3)")
    g.add_argument("--c", help="linear_surjective multiplier (class 3)")
    g.add_argument("--spec", help="composite DBF spec as JSON (class 3)")
    g.add_argument("--theta", help="generator override (class 3)")
    g.add_argument("--unsafe", action="store_true",
                   help="skip property and primitivity hypotheses")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.add_argument("-o", "--output")
    common(g)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("certify", help="certify correlation and size optimality")
    c.add_argument("input")
    c.add_argument("--mode", choices=("full", "spot"), default="full")
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.add_argument("--format", choices=("json", "csv"), default="json")
    c.add_argument("-o", "--output")
    common(c)
    c.set_defaults(func=cmd_certify)

    d = sub.add_parser("check-dbf", help="verify a difference-balanced function")
    d.add_argument("--kind", required=True)
    d.add_argument("--q", type=int, required=True, help="codomain size")
    d.add_argument("--n", type=int, default=2, help="extension degree of the domain")
    d.add_argument("--d", dest="f_d", type=int)
    d.add_argument("--l", type=int)
    d.add_argument("--c")
    d.add_argument("--spec", help="composite spec as JSON")
    d.add_argument("--top-modulus")
    d.add_argument("--allow-nonprimitive", action="store_true")
    d.add_argument("--cap", type=int, default=65536)
    d.add_argument("--unsafe", action="store_true", help="skip parameter checks, verify anyway")
    common(d)
    d.set_defaults(func=cmd_check_dbf)

    pr = sub.add_parser("check-props", help="check properties A_u and A_v")
    _add_field_args(pr)
    pr.add_argument("--k", type=int)
    pr.add_argument("--P")
    pr.add_argument("--sigma")
    pr.add_argument("--reps")
    pr.add_argument("--d", type=int)
    pr.add_argument("--r", type=int, default=1)
    common(pr)
    pr.set_defaults(func=cmd_check_props)

    e = sub.add_parser("export", help="convert between JSON and CSV")
    e.add_argument("input")
    e.add_argument("--format", choices=("json", "csv"))
    e.add_argument("-o", "--output")
    common(e)
    e.set_defaults(func=cmd_export)

    i = sub.add_parser("info", help="field and parameter diagnostics")
    _add_field_args(i)
    i.add_argument("--k", type=int)
    i.add_argument("--r", type=int)
    i.add_argument("--d", type=int)
    common(i)
    i.set_defaults(func=cmd_info)

    r = sub.add_parser("run", help="execute a job file")
    r.add_argument("job")
    r.set_defaults(func=cmd_run)
    parser.subcommands = sub.choices
    return parser


_COMMANDS = {"gen": cmd_gen, "certify": cmd_certify, "check-dbf": cmd_check_dbf,
             "check-props": cmd_check_props, "export": cmd_export, "info": cmd_info}


def job_from_namespace(ns: argparse.Namespace) -> JobSpec:
    """Job holding the arguments that differ from the command defaults."""
    defaults = _defaults(ns.command)
    return JobSpec(ns.command, {k: v for k, v in vars(ns).items()
                                if k not in _META and v != defaults.get(k)})


def _defaults(command: str) -> dict:
    sp = build_parser().subcommands[command]
    return {a.dest: a.default for a in sp._actions if a.dest != "help"}


def run(job: JobSpec) -> int:
    """Execute a job and map library errors onto exit codes."""
    if job.command not in _COMMANDS:
        print(f"error: unknown command {job.command!r}", file=sys.stderr)
        return EXIT_INPUT
    values = _defaults(job.command)
    unknown = set(job.args) - set(values)
    if unknown:
        print(f"error: unknown job arguments {sorted(unknown)}", file=sys.stderr)
        return EXIT_INPUT
    values.update(job.args)
    return _dispatch(_COMMANDS[job.command], argparse.Namespace(**values, command=job.command))


def _dispatch(func, args) -> int:
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return func(args)
    except (HypothesisError, NotPrimitiveError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (FieldError, FhsFormatError, BudgetError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FhsError as exc:  # pragma: no cover - remaining library errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if ns.command == "run":
        try:
            return cmd_run(ns)
        except (FhsFormatError, OSError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    job = job_from_namespace(ns)
    if ns.save_job:
        Path(ns.save_job).write_text(job.dumps())
    return _dispatch(ns.func, ns)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
