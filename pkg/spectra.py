from __future__ import annotations

import asyncio
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import mpmath
from sympy import totient

import config
from errors import ParameterError, ResourceLimitError
from exact_linalg import CountingMeasure, SparseIntMatrix, cluster_eigenvalues, max_rank, sym_eigenvalues
from representations import markov_matrix


@dataclass(frozen=True)
class Atom:
    p: int
    q: int
    lam: float
    weight: Fraction


@dataclass(frozen=True)
class AtomTable:
    q_max: int
    entries: Tuple[Atom, ...]


def _lam(p: int, q: int):
    return 4 * mpmath.cos(p * mpmath.pi / q)


def atom_table(q_max: int) -> AtomTable:
    """Atoms 4cos(p pi/q), gcd(p, q) = 1, 1 <= p < q <= q_max, each of mass 1/(2^q - 1)."""
    if q_max < 2:
        raise ParameterError(f"q_max must be at least 2, got {q_max}")
    entries: List[Atom] = []
    with mpmath.workdps(config.EXTENDED_DPS):
        for q in range(2, q_max + 1):
            weight = Fraction(1, 2**q - 1)
            for p in range(1, q):
                if gcd(p, q) == 1:
                    entries.append(Atom(p=p, q=q, lam=float(_lam(p, q)), weight=weight))
    return AtomTable(q_max=q_max, entries=tuple(entries))


def total_atom_mass(q_max: int) -> Fraction:
    if q_max < 2:
        raise ParameterError(f"q_max must be at least 2, got {q_max}")
    return sum((Fraction(int(totient(q)), 2**q - 1) for q in range(2, q_max + 1)), Fraction(0))


def tail_mass_bound(q_max: int) -> Fraction:
    """
    Bound on the mass of atoms with q > q_max.

    phi(q) <= q and 1/(2^q - 1) <= 2^(1-q), and
    sum_{q > Q} q * 2^(1-q) = (Q + 2) / 2^(Q-1).
    """
    return Fraction(q_max + 2, 2 ** (q_max - 1))


def target_fraction(lam: float, q_max: int = 40) -> Fraction:
    """Mass of the limit measure at lam; 0 when lam is not an atom (e.g. +-4)."""
    return sum((a.weight for a in atom_table(q_max).entries if abs(a.lam - lam) < 1e-12), Fraction(0))


def theoretical_moment(k: int, q_max: int) -> Tuple[float, float]:
    """(sum of weight * lam^(2k) over the table, bound on the discarded part)."""
    if k < 0:
        raise ParameterError(f"k must be non-negative, got {k}")
    table = atom_table(q_max)
    with mpmath.workdps(config.EXTENDED_DPS):
        value = mpmath.fsum(
            mpmath.mpf(a.weight.numerator) / a.weight.denominator * _lam(a.p, a.q) ** (2 * k) for a in table.entries
        )
        tail = tail_mass_bound(q_max) * 16**k
        return float(value), float(tail)


def theoretical_projector(k: int, q_max: int) -> Tuple[float, float]:
    """tau((1 - A^2/16)^k) from the atoms; the atom at 0 gives 1/3 for every k."""
    if k < 1:
        raise ParameterError(f"k must be at least 1, got {k}")
    table = atom_table(q_max)
    with mpmath.workdps(config.EXTENDED_DPS):
        value = mpmath.fsum(
            mpmath.mpf(a.weight.numerator) / a.weight.denominator * (1 - _lam(a.p, a.q) ** 2 / 16) ** k
            for a in table.entries
        )
        return float(value), float(tail_mass_bound(q_max))


# --- finite approximations ---------------------------------------------------


def counting_measure(m: SparseIntMatrix, tol: float = config.CLUSTER_TOL, level: Optional[int] = None) -> CountingMeasure:
    if m.dim > config.DENSE_MAX_DIM:
        raise ResourceLimitError(
            f"dim {m.dim} exceeds the dense cap {config.DENSE_MAX_DIM}; use exact_multiplicity", dim=m.dim
        )
    return cluster_eigenvalues(sym_eigenvalues(m), tol, level=level)


def _check_integer(lam: Any) -> int:
    if isinstance(lam, bool) or Fraction(lam).denominator != 1:
        raise ParameterError(f"lambda must be an integer, got {lam}")
    return int(lam)


def kernel_rank(m: SparseIntMatrix, lam: int, primes: Optional[Sequence[int]] = None) -> Dict[str, Any]:
    return max_rank(m.shifted(_check_integer(lam)), primes)


def exact_multiplicity(m: SparseIntMatrix, lam: int, primes: Optional[Sequence[int]] = None) -> Tuple[int, Fraction]:
    info = kernel_rank(m, lam, primes)
    mult = m.dim - info["rank"]
    return mult, Fraction(mult, m.dim)


def numerical_multiplicity(m: SparseIntMatrix, lam: float, tol: float = config.CLUSTER_TOL) -> int:
    return counting_measure(m, tol).multiplicity_at(lam, tol)


def unlocalized_eigenvalues(measure: CountingMeasure, n: int, tol: float = config.CLUSTER_TOL) -> List[float]:
    """Eigenvalues not within tol of any 4cos(p pi/q), q <= 2^n. Diagnostic only."""
    q_max = 1 << n
    points = [4.0, -4.0] + ([a.lam for a in atom_table(q_max).entries] if q_max >= 2 else [])
    return [float(atom.value) for atom in measure.pairs if not any(abs(atom.value - pt) <= tol for pt in points)]


def kernel_row(kind: str, level: int, lam: int, primes: Optional[Sequence[int]], crosscheck: bool, target: Fraction) -> Dict[str, Any]:
    m = markov_matrix(kind, level)
    info = kernel_rank(m, lam, primes)
    mult = m.dim - info["rank"]
    fraction = Fraction(mult, m.dim)
    row: Dict[str, Any] = {
        "level": level,
        "dim": m.dim,
        "multiplicity": mult,
        "fraction": fraction,
        "distance": abs(fraction - target),
        "ranks": info["ranks"],
        "spread": info["spread"],
        "ok": True,
    }
    if "exact_rank" in info:
        row["exact_rank"] = info["exact_rank"]
    if crosscheck and m.dim <= config.DENSE_MAX_DIM:
        numerical = numerical_multiplicity(m, lam)
        row["numerical_multiplicity"] = numerical
        row["agree"] = numerical == mult
    return row


def _failed_row(level: int, exc: BaseException) -> Dict[str, Any]:
    kind = "resource" if isinstance(exc, ResourceLimitError) else "parameter" if isinstance(exc, ParameterError) else "error"
    print(f"[ERR] level={level} failed: {exc}", file=sys.stderr)
    return {"level": level, "ok": False, "error": str(exc), "error_kind": kind}


async def _gather_levels(fn: Callable[..., Dict[str, Any]], levels: Sequence[int], args: tuple, workers: int) -> List[Any]:
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return await asyncio.gather(
            *(loop.run_in_executor(pool, fn, args[0], level, *args[1:]) for level in levels),
            return_exceptions=True,
        )


def convergence_report(
    levels: Sequence[int],
    lam: int,
    rep_kind: str = "tree",
    primes: Optional[Sequence[int]] = None,
    crosscheck: bool = False,
    workers: int = config.WORKERS,
) -> Dict[str, Any]:
    """Exact kernel fractions of A - lam per level, against the limit measure's atom."""
    lam = _check_integer(lam)
    if lam not in config.INTEGER_EIGENVALUES:
        raise ParameterError(f"lambda must be one of {config.INTEGER_EIGENVALUES}, got {lam}")
    target = target_fraction(lam)
    levels = sorted(set(int(n) for n in levels))
    args = (rep_kind, lam, primes, crosscheck, target)

    if workers > 1 and len(levels) > 1:
        results = asyncio.run(_gather_levels(kernel_row, levels, args, workers))
    else:
        results = []
        for level in levels:
            try:
                results.append(kernel_row(rep_kind, level, lam, primes, crosscheck, target))
            except Exception as exc:
                results.append(exc)

    rows = []
    for level, result in zip(levels, results):
        if isinstance(result, BaseException):
            rows.append(_failed_row(level, result))
        else:
            print(f"[spectra] {rep_kind} level={level} lambda={lam} fraction={result['fraction']}", file=sys.stderr)
            rows.append(result)
    return {"rep": rep_kind, "lambda": lam, "target": target, "rows": sorted(rows, key=lambda r: r["level"])}
