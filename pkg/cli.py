from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import config
import formatter
from bookkeeping import bookkeeping_report, chain_b3_description, parse_cells, parse_fraction
from checks import SUITES, run_checks
from errors import EXIT_OK, EXIT_PARAMETER, EXIT_PROPERTY_FAILURE, EXIT_RESOURCE, ParameterError, ResourceLimitError
from exact_linalg import choose_primes
from group_ring import even_moments, projector_from_moments, projector_sequence
from lamplighter import (
    HElement,
    abelian_image,
    alpha,
    format_g,
    g_eval_word,
    g_order,
    in_H,
    parse_g,
    parse_word,
)
from representations import KINDS, markov_matrix
from spectra import (
    atom_table,
    convergence_report,
    counting_measure,
    tail_mass_bound,
    theoretical_moment,
    theoretical_projector,
    total_atom_mass,
    unlocalized_eigenvalues,
)

FORMATS = ("json", "csv")
UNLOCALIZED_MAX_LEVEL = 6


@dataclass
class RunConfig:
    command: str
    levels: List[int] = field(default_factory=list)
    max_k: int = 0
    q_max: int = 40
    seed: int = config.PRIME_SEED
    out: Optional[str] = None
    fmt: str = "json"
    workers: int = config.WORKERS


def parse_levels(text: str) -> List[int]:
    """'1,2,5-8' -> [1, 2, 5, 6, 7, 8]"""
    levels: set = set()
    try:
        for part in (p.strip() for p in str(text).split(",")):
            if not part:
                continue
            if "-" in part[1:]:
                lo, hi = part.split("-", 1)
                levels.update(range(int(lo), int(hi) + 1))
            else:
                levels.add(int(part))
    except ValueError:
        raise ParameterError(f"cannot parse levels {text!r}") from None
    if not levels:
        raise ParameterError(f"no levels in {text!r}")
    return sorted(levels)


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(f"[OK] {cfg.command} written to {cfg.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)


def _status(ok: bool) -> str:
    return "PASS" if ok else "FAIL"


def _table_csv(header: List[str], rows: List[Dict[str, Any]]) -> str:
    return formatter.csv_table(header, ([formatter.to_jsonable(row.get(h, "")) for h in header] for row in rows))


# --- commands ------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig, args: argparse.Namespace) -> int:
    level = cfg.levels[0]
    m = markov_matrix(args.rep, level)
    measure = counting_measure(m, level=level)
    if cfg.fmt == "csv":
        _emit(cfg, formatter.measure_csv(measure))
        return EXIT_OK
    extra: Dict[str, Any] = {"rep": args.rep, "total": sum((a.fraction for a in measure.pairs), Fraction(0))}
    if args.rep == "tree" and level <= UNLOCALIZED_MAX_LEVEL:
        extra["unlocalized"] = unlocalized_eigenvalues(measure, level)
    _emit(cfg, formatter.measure_json(measure, extra))
    return EXIT_OK


def cmd_kernel(cfg: RunConfig, args: argparse.Namespace) -> int:
    primes = choose_primes(cfg.seed, config.PRIME_COUNT)
    report = convergence_report(cfg.levels, args.lam, args.rep, primes, args.crosscheck, cfg.workers)
    failed = [row for row in report["rows"] if not row["ok"]]
    report["partial"] = bool(failed)
    _emit(cfg, formatter.kernel_csv(report) if cfg.fmt == "csv" else formatter.dumps(report))
    if any(row["error_kind"] == "resource" for row in failed):
        return EXIT_RESOURCE
    if failed:
        return EXIT_PARAMETER
    return EXIT_OK


def _moments_upto(max_k: int) -> Tuple[List[int], bool]:
    try:
        return even_moments(max_k), False
    except ResourceLimitError as exc:
        reached = (exc.k or 1) - 1
        print(f"[WARN] moments stopped at k={reached}: {exc}", file=sys.stderr)
        return even_moments(reached), True


def cmd_moments(cfg: RunConfig, args: argparse.Namespace) -> int:
    moments, partial = _moments_upto(cfg.max_k)
    rows = []
    for k in range(1, len(moments)):
        value, tail = theoretical_moment(k, cfg.q_max)
        ok = abs(moments[k] - value) <= tail + config.CHECK_TOL
        rows.append({"k": k, "exact": moments[k], "theoretical": value, "tail_bound": tail, "status": _status(ok)})
    return _finish_series(cfg, rows, partial, ["k", "exact", "theoretical", "tail_bound", "status"])


def cmd_projector(cfg: RunConfig, args: argparse.Namespace) -> int:
    moments, partial = _moments_upto(cfg.max_k)
    rows = []
    for k in range(1, len(moments)):
        exact = projector_from_moments(k, moments)
        value, tail = theoretical_projector(k, cfg.q_max)
        ok = abs(float(exact) - value) <= tail + config.CHECK_TOL and exact > Fraction(1, 3)
        rows.append({"k": k, "exact": exact, "theoretical": value, "tail_bound": tail, "status": _status(ok)})
    return _finish_series(cfg, rows, partial, ["k", "exact", "theoretical", "tail_bound", "status"])


def _finish_series(cfg: RunConfig, rows: List[Dict[str, Any]], partial: bool, header: List[str]) -> int:
    if cfg.fmt == "csv":
        _emit(cfg, _table_csv(header, rows))
    else:
        _emit(cfg, formatter.dumps({"command": cfg.command, "q_max": cfg.q_max, "partial": partial, "rows": rows}))
    if partial:
        return EXIT_RESOURCE
    return EXIT_OK if all(row["status"] == "PASS" for row in rows) else EXIT_PROPERTY_FAILURE


def cmd_check(cfg: RunConfig, args: argparse.Namespace, alpha_fn: Callable[[HElement], HElement] = alpha) -> int:
    report = run_checks(args.suite, cfg.seed, args.samples, alpha_fn=alpha_fn)
    if cfg.fmt == "csv":
        rows = [{"suite": r["suite"], "name": r["name"], "status": _status(r["ok"])} for r in report["rows"]]
        _emit(cfg, _table_csv(["suite", "name", "status"], rows))
    else:
        _emit(cfg, formatter.dumps(report))
    print(f"[check] passed={report['passed']} failed={report['failed']}", file=sys.stderr)
    return EXIT_OK if report["ok"] else EXIT_PROPERTY_FAILURE


def cmd_bookkeeping(cfg: RunConfig, args: argparse.Namespace) -> int:
    cells = parse_cells(args.cells)
    b3 = parse_fraction(args.b3)
    report = bookkeeping_report(cells, b3)
    report["cells"] = cells
    report["b3_chain"] = chain_b3_description(projector_sequence(cfg.max_k))
    _emit(cfg, formatter.dumps(report))
    return EXIT_OK


def cmd_element(cfg: RunConfig, args: argparse.Namespace) -> int:
    x = parse_g(args.element) if args.element else g_eval_word(parse_word(args.expr))
    image = abelian_image(x)
    payload = {
        "canonical": format_g(x),
        "order": g_order(x),
        "abelian_image": {"t": image.t_exp, "s": image.s_exp},
        "in_H": in_H(x),
    }
    _emit(cfg, formatter.dumps(payload))
    return EXIT_OK


def cmd_matrix(cfg: RunConfig, args: argparse.Namespace) -> int:
    _emit(cfg, formatter.export_matrix(markov_matrix(args.rep, cfg.levels[0])))
    return EXIT_OK


def cmd_atoms(cfg: RunConfig, args: argparse.Namespace) -> int:
    table = atom_table(cfg.q_max)
    if cfg.fmt == "csv":
        _emit(cfg, formatter.atoms_csv(table.entries))
        return EXIT_OK
    payload = {
        "q_max": cfg.q_max,
        "atoms": list(table.entries),
        "total_mass": total_atom_mass(cfg.q_max),
        "tail_bound": tail_mass_bound(cfg.q_max),
    }
    _emit(cfg, formatter.dumps(payload))
    return EXIT_OK


# --- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lamp", description="Spectral experiments on the lamplighter HNN extension.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, fmt: bool = True) -> None:
        p.add_argument("--out", default=None, help="output path (stdout if omitted)")
        if fmt:
            p.add_argument("--format", dest="fmt", choices=FORMATS, default="json")

    p = sub.add_parser("spectrum", help="counting measure of A at one level")
    p.add_argument("--level", type=int, required=True)
    p.add_argument("--rep", choices=KINDS, default="tree")
    common(p)

    p = sub.add_parser("kernel", help="exact kernel fractions across levels")
    p.add_argument("--rep", choices=KINDS, default="tree")
    p.add_argument("--levels", required=True, help="e.g. 1,2,3 or 1-12")
    p.add_argument("--lambda", dest="lam", type=int, default=0)
    p.add_argument("--seed", type=int, default=config.PRIME_SEED)
    p.add_argument("--crosscheck", action="store_true", help="compare with dense eigenvalues where possible")
    p.add_argument("--workers", type=int, default=config.WORKERS)
    common(p)

    for name in ("moments", "projector"):
        p = sub.add_parser(name, help=f"exact {name} against the atomic measure")
        p.add_argument("--max-k", dest="max_k", type=int, required=True)
        p.add_argument("--q-max", dest="q_max", type=int, default=40)
        common(p)

    p = sub.add_parser("check", help="property suites")
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=config.SAMPLES)
    common(p)

    p = sub.add_parser("bookkeeping", help="Euler characteristic bookkeeping and verdict")
    p.add_argument("--cells", default="1,3,5,1")
    p.add_argument("--b3", default="1/3")
    p.add_argument("--max-k", dest="max_k", type=int, default=3, help="projector terms behind the upper bound on b3")
    common(p, fmt=False)

    p = sub.add_parser("element", help="canonical form of an element of G")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--expr", help="word over a, t, s and inverses")
    group.add_argument("--element", help="canonical text form")
    common(p, fmt=False)

    p = sub.add_parser("matrix", help="coordinate export of A")
    p.add_argument("--rep", choices=KINDS, default="tree")
    p.add_argument("--level", type=int, required=True)
    common(p, fmt=False)

    p = sub.add_parser("atoms", help="atom table of the limit measure")
    p.add_argument("--q-max", dest="q_max", type=int, default=12)
    common(p)
    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    if getattr(args, "workers", config.WORKERS) < 1:
        raise ParameterError("workers must be positive")
    if getattr(args, "max_k", 1) < 1:
        raise ParameterError("max-k must be at least 1")
    if getattr(args, "q_max", 2) < 2:
        raise ParameterError("q-max must be at least 2")
    if hasattr(args, "levels"):
        levels = parse_levels(args.levels)
    elif hasattr(args, "level"):
        levels = [args.level]
    else:
        levels = []
    return RunConfig(
        command=args.command,
        levels=levels,
        max_k=getattr(args, "max_k", 0),
        q_max=getattr(args, "q_max", 40),
        seed=getattr(args, "seed", config.PRIME_SEED),
        out=args.out,
        fmt=getattr(args, "fmt", "json"),
        workers=getattr(args, "workers", config.WORKERS),
    )


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace], int]] = {
    "spectrum": cmd_spectrum,
    "kernel": cmd_kernel,
    "moments": cmd_moments,
    "projector": cmd_projector,
    "check": cmd_check,
    "bookkeeping": cmd_bookkeeping,
    "element": cmd_element,
    "matrix": cmd_matrix,
    "atoms": cmd_atoms,
}


def main(argv: Optional[Sequence[str]] = None, *, alpha_fn: Callable[[HElement], HElement] = alpha) -> int:
    """
    Exit codes: 0 success, 1 property failure, 2 parameter error, 3 resource limit.

    alpha_fn is a test hook for cmd_check; every other command ignores it.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARAMETER

    try:
        cfg = _run_config(args)
        if args.command == "check":
            return cmd_check(cfg, args, alpha_fn=alpha_fn)
        return COMMANDS[args.command](cfg, args)
    except ParameterError as exc:
        print(f"[ERR] {args.command}: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except ResourceLimitError as exc:
        print(f"[ERR] {args.command}: {exc}", file=sys.stderr)
        sys.stdout.write(formatter.dumps({"command": args.command, "partial": True, "error": str(exc), "k": exc.k, "dim": exc.dim}))
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
