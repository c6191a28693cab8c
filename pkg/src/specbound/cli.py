"""Command-line front end.

Exit-code contract shared by all subcommands that evaluate chains:
0 = everything Confirmed, 1 = some result Inconclusive (or an example's
expectations unmet), 2 = a certified violation, 3 = input/configuration
error.  Reports are JSON with ``"schema": 1``; timing fields inside report
artifacts are null so identical invocations produce byte-identical files,
while measured wall time goes to standard output only.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import replace

from . import catalog
from .kerngen import KernelKind, KernelSpec, nystrom_matrix
from .numat import MatrixValidationError, matrix_to_json
from .radius import JsrConfig, jsr_detail
from .verify import (
    FuzzGen,
    InstanceSpec,
    NotApplicableError,
    check_instance,
    example_ids,
    fuzz_campaign,
    instance_digest,
    paper_example,
)

EXIT_CONFIRMED = 0
EXIT_INCONCLUSIVE = 1
EXIT_VIOLATION = 2
EXIT_INPUT_ERROR = 3

DEFAULT_TOL = 1e-9

_STATUS_EXIT = {
    "Confirmed": EXIT_CONFIRMED,
    "Inconclusive": EXIT_INCONCLUSIVE,
    "ViolationCertified": EXIT_VIOLATION,
}


class _Parser(argparse.ArgumentParser):
    """Argument parser honouring the exit-code contract (3 on bad flags)."""

    def error(self, message):
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def _defaults() -> dict:
    cfg = JsrConfig()
    return {
        "tol": DEFAULT_TOL,
        "depth": cfg.max_depth,
        "budget_products": cfg.budget_products,
        "target_width": cfg.target_width,
    }


def _config(args) -> JsrConfig:
    cfg = JsrConfig()
    if getattr(args, "depth", None) is not None:
        cfg = replace(cfg, max_depth=args.depth)
    if getattr(args, "budget", None) is not None:
        cfg = replace(cfg, budget_products=args.budget)
    if getattr(args, "target_width", None) is not None:
        cfg = replace(cfg, target_width=args.target_width)
    return cfg


def _load_instance(path: str) -> InstanceSpec:
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read instance file {path!r}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"instance file {path!r} is not valid JSON: {exc}") from None
    return InstanceSpec.from_json(payload)


def _write_report(path: str | None, payload: dict) -> None:
    if path is None:
        return
    blob = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    with open(path, "w") as fh:
        fh.write(blob)


def _run_check(args) -> int:
    inst = _load_instance(args.instance)
    cfg = _config(args)
    t0 = time.perf_counter()
    verdict = check_instance(
        args.entry,
        inst,
        cfg,
        tol=args.tol,
        allow_out_of_regime=args.allow_out_of_regime,
    )
    elapsed = time.perf_counter() - t0
    report = {
        "schema": 1,
        "command": "check",
        "entry": args.entry,
        "defaults": _defaults(),
        "tol": args.tol,
        "depth": cfg.max_depth,
        "instance_digest": instance_digest(inst),
        "verdict": verdict.to_json(),
        "runtime_ms": None,
    }
    _write_report(args.out, report)
    worst = min((m["gap"] for m in verdict.margins), default=None)
    gap = "" if worst is None else f", smallest link gap {worst:.3g}"
    print(f"entry {args.entry}: {verdict.status}{gap}  ({elapsed:.2f}s)")
    if args.out:
        print(f"report written to {args.out}")
    return _STATUS_EXIT[verdict.status]


def _parse_span(text: str, name: str) -> tuple[int, int]:
    parts = text.split("..")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise ValueError(
            f"invalid {name} range {text!r}: expected N or LO..HI"
        ) from None
    return lo, hi


def _run_fuzz(args) -> int:
    if args.count < 1:
        raise ValueError("count must be a positive integer")
    if args.entries.strip() == "all":
        ids = list(catalog.entry_ids())
    else:
        ids = [tok.strip() for tok in args.entries.split(",") if tok.strip()]
        if not ids:
            raise ValueError("no entry ids given")
        for entry_id in ids:
            catalog.get_entry(entry_id)  # unknown id -> ValueError
    dim_lo, dim_hi = _parse_span(args.dim, "dim")
    size_lo, size_hi = _parse_span(args.set_size, "set-size")
    gen = FuzzGen(
        dim_lo=dim_lo,
        dim_hi=dim_hi,
        size_lo=size_lo,
        size_hi=size_hi,
        sparsity=args.sparsity,
        out_of_regime=args.out_of_regime,
    )
    cfg = _config(args)
    t0 = time.perf_counter()
    report = fuzz_campaign(ids, args.count, args.seed, gen, cfg, tol=args.tol)
    elapsed = time.perf_counter() - t0
    report = {"command": "fuzz", "defaults": _defaults(), **report}
    _write_report(args.out, report)
    violations = inconclusive = 0
    for rec in report["reports"]:
        violations += len(rec["violations"])
        inconclusive += rec["inconclusive"]
        print(
            f"{rec['entry']:9s} confirmed {rec['confirmed']:4d}  "
            f"inconclusive {rec['inconclusive']:3d}  "
            f"violations {len(rec['violations']):3d}"
        )
    print(
        f"total: {len(ids)} entries x {args.count} instances, "
        f"{violations} violations, {inconclusive} inconclusive  ({elapsed:.2f}s)"
    )
    if args.out:
        print(f"report written to {args.out}")
    if violations and not args.out_of_regime:
        return EXIT_VIOLATION
    if inconclusive:
        return EXIT_INCONCLUSIVE
    return EXIT_CONFIRMED


def _print_example(rep: dict) -> None:
    print(f"example {rep['example']} (entry {rep['entry']}): {rep['description']}")
    for fact in rep["facts"]:
        mark = "ok" if fact["ok"] else "MISMATCH"
        print(
            f"  {fact['label']} = [{fact['lo']:.9f}, {fact['hi']:.9f}]"
            f"  expected {fact['expected']:.9f} ({fact['provenance']})  {mark}"
        )
    for demo in rep["demos"]:
        mark = "ok" if demo["ok"] else "MISMATCH"
        print(
            f"  {demo['label']}: {demo['status']}"
            f" (expected {demo['expected_status']})  {mark}"
        )
    for key, note in rep.get("notes", {}).items():
        print(f"  note [{key}]: {note}")


def _run_examples(args) -> int:
    ids = example_ids() if args.id is None else (args.id,)
    for example_id in ids:
        if example_id not in example_ids():
            raise ValueError(f"unknown example id {example_id!r}")
    cfg = _config(args)
    t0 = time.perf_counter()
    reports = [paper_example(example_id, cfg, tol=args.tol) for example_id in ids]
    elapsed = time.perf_counter() - t0
    payload = {
        "schema": 1,
        "command": "examples",
        "defaults": _defaults(),
        "examples": reports,
        "runtime_ms": None,
    }
    _write_report(args.out, payload)
    for rep in reports:
        _print_example(rep)
    ok = all(rep["ok"] for rep in reports)
    print(f"{'all expectations met' if ok else 'EXPECTATIONS NOT MET'}  ({elapsed:.2f}s)")
    if args.out:
        print(f"report written to {args.out}")
    return EXIT_CONFIRMED if ok else EXIT_INCONCLUSIVE


def _run_jsr(args) -> int:
    inst = _load_instance(args.instance)
    cfg = _config(args)
    t0 = time.perf_counter()
    results = []
    for i, opset in enumerate(inst.sets):
        detail = jsr_detail(opset, cfg)
        results.append(
            {
                "name": opset.name or f"S{i + 1}",
                "lo": detail.bracket.lo,
                "hi": detail.bracket.hi,
                "partial": detail.partial,
                "depth_used": detail.depth_used,
            }
        )
    elapsed = time.perf_counter() - t0
    payload = {
        "schema": 1,
        "command": "jsr",
        "defaults": _defaults(),
        "depth": cfg.max_depth,
        "sets": results,
        "runtime_ms": None,
    }
    _write_report(args.out, payload)
    for rec in results:
        print(
            f"{rec['name']}: [{rec['lo']:.12g}, {rec['hi']:.12g}]"
            f"  depth_used={rec['depth_used']}"
            + ("  (budget exhausted)" if rec["partial"] else "")
        )
    print(f"({elapsed:.2f}s)")
    if args.out:
        print(f"report written to {args.out}")
    return EXIT_CONFIRMED


def _run_catalog(args) -> int:
    for entry_id in catalog.entry_ids():
        print(catalog.format_entry_line(catalog.get_entry(entry_id)))
    return EXIT_CONFIRMED


def _run_gen_kernel(args) -> int:
    spec = KernelSpec(kind=args.kind, c=args.c, grid_n=args.n)
    mat = nystrom_matrix(spec)
    payload = matrix_to_json(mat)
    if args.out:
        blob = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        with open(args.out, "w") as fh:
            fh.write(blob)
        print(f"wrote {args.out} ({spec.grid_n}x{spec.grid_n} {spec.kind.value}, c={spec.c})")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_CONFIRMED


def _add_engine_flags(sub, *, tol: bool = True) -> None:
    sub.add_argument("--depth", type=int, default=None, help="level enumeration depth")
    sub.add_argument("--budget", type=int, default=None, help="matrix-product budget")
    if tol:
        sub.add_argument("--tol", type=float, default=DEFAULT_TOL, help="comparison tolerance")
    sub.add_argument("--out", default=None, help="write the JSON report here")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="specbound", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_check = subs.add_parser("check", help="verify one instance against one catalog entry")
    p_check.add_argument("--entry", required=True, help="catalog entry id")
    p_check.add_argument("--instance", required=True, help="instance JSON file")
    p_check.add_argument(
        "--allow-out-of-regime",
        action="store_true",
        help="evaluate even when hypotheses fail (counterexample demos)",
    )
    _add_engine_flags(p_check)
    p_check.set_defaults(run=_run_check)

    p_fuzz = subs.add_parser("fuzz", help="randomized in-regime campaign over catalog entries")
    p_fuzz.add_argument("--entries", required=True, help="'all' or comma-separated entry ids")
    p_fuzz.add_argument("--count", type=int, required=True, help="instances per entry")
    p_fuzz.add_argument("--seed", type=int, required=True, help="campaign seed")
    p_fuzz.add_argument("--dim", default="2..4", help="dimension range LO..HI")
    p_fuzz.add_argument("--set-size", default="1..3", help="set-size range LO..HI")
    p_fuzz.add_argument("--sparsity", type=float, default=0.3, help="probability an entry is zeroed")
    p_fuzz.add_argument(
        "--out-of-regime",
        action="store_true",
        help="generate instances violating the hypotheses instead",
    )
    _add_engine_flags(p_fuzz)
    p_fuzz.set_defaults(run=_run_fuzz)

    p_ex = subs.add_parser("examples", help="reproduce the worked instances")
    p_ex.add_argument("--id", default=None, help="single example id (default: all)")
    _add_engine_flags(p_ex)
    p_ex.set_defaults(run=_run_examples)

    p_jsr = subs.add_parser("jsr", help="certified radius bracket for each set in an instance")
    p_jsr.add_argument("--instance", required=True, help="instance JSON file")
    p_jsr.add_argument("--target-width", type=float, default=None, help="relative bracket width goal")
    _add_engine_flags(p_jsr, tol=False)
    p_jsr.set_defaults(run=_run_jsr)

    p_cat = subs.add_parser("catalog", help="inspect the inequality catalog")
    p_cat.add_argument("action", choices=["list"], help="what to show")
    p_cat.set_defaults(run=_run_catalog)

    p_gen = subs.add_parser("gen-kernel", help="kernel discretization matrix as JSON")
    p_gen.add_argument("--kind", required=True, choices=[k.value for k in KernelKind])
    p_gen.add_argument("--c", type=float, default=1.0, help="kernel shape parameter")
    p_gen.add_argument("--n", type=int, required=True, help="grid size")
    p_gen.add_argument("--out", default=None, help="write the matrix JSON here")
    p_gen.set_defaults(run=_run_gen_kernel)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.run(args)
    except NotApplicableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (ValueError, MatrixValidationError, KeyError) as exc:
        msg = exc.args[0] if exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
