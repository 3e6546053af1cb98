from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Union

from sympy import isprime

from errors import ParameterError

Rational = Union[int, Fraction]

CONSISTENT = "consistent"
COUNTEREXAMPLE = "counterexample"


@dataclass
class BettiLedger:
    cell_counts: List[int]
    known_bettis: Dict[int, Optional[Fraction]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if any(c < 0 for c in self.cell_counts):
            raise ParameterError(f"cell counts must be non-negative: {self.cell_counts}")
        self.known_bettis = {int(p): (None if b is None else Fraction(b)) for p, b in self.known_bettis.items()}


def parse_fraction(text: str) -> Fraction:
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise ParameterError(f"cannot parse fraction {text!r}") from None


def parse_cells(text: str) -> List[int]:
    try:
        cells = [int(part) for part in str(text).split(",") if part.strip()]
    except ValueError:
        raise ParameterError(f"cannot parse cell counts {text!r}") from None
    if not cells or any(c < 0 for c in cells):
        raise ParameterError(f"cell counts must be non-negative integers: {text!r}")
    return cells


def fin_membership(r: Rational, prime: int = 2) -> bool:
    """
    Is r in fin(G)?

    For G every finite subgroup has order a power of 2, so fin(G) is the
    dyadic rationals. Other groups whose finite subgroups are p-groups plug in
    through `prime`.
    """
    if not isprime(prime):
        raise ParameterError(f"prime must be a prime number, got {prime}")
    den = Fraction(r).denominator
    while den % prime == 0:
        den //= prime
    return den == 1


def euler_characteristic(cell_counts: Sequence[int]) -> int:
    return sum((-1) ** p * c for p, c in enumerate(cell_counts))


def solve_missing_betti(chi: int, ledger: BettiLedger, missing_dim: int) -> Fraction:
    unknown = [p for p in range(len(ledger.cell_counts)) if ledger.known_bettis.get(p) is None]
    if unknown != [missing_dim]:
        raise ParameterError(f"exactly one unknown Betti number is required at {missing_dim}, found {unknown}")
    rest = sum(
        ((-1) ** p * b for p, b in ledger.known_bettis.items() if p != missing_dim and b is not None),
        Fraction(0),
    )
    return (Fraction(chi) - rest) * (-1) ** missing_dim


def presentation_cell_counts(generators: int, relators: int, wedge_spheres: int = 1, three_cells: int = 1) -> List[int]:
    """One 0-cell, a 1-cell per generator, a 2-cell per relator and wedge sphere, then the 3-cells."""
    return [1, generators, relators + wedge_spheres, three_cells]


def finite_group_betti(cover_betti: Rational, order: int) -> Fraction:
    """L2-Betti number for a finite fundamental group: ordinary Betti of the cover over |pi|."""
    if order < 1:
        raise ParameterError(f"group order must be positive, got {order}")
    return Fraction(cover_betti) / order


def atiyah_verdict(betti: Rational, prime: int = 2) -> str:
    return CONSISTENT if fin_membership(betti, prime) else COUNTEREXAMPLE


def chain_b3_description(upper_bounds: Sequence[Fraction] = (), lower_bound: Optional[Fraction] = None) -> Dict[str, Any]:
    """
    b3 of the complex whose d3 is the column (A, 0, ..., 0)^t and whose d4 is 0.

    ker d3 = ker A, so b3 = dim_G ker A = dim_H ker A. The bracket comes from
    the projector sequence (upper) and, when known, a finite-level estimate.
    """
    upper = min(upper_bounds) if upper_bounds else None
    return {
        "statement": "b3 = dim_G ker d3 = dim_G ker A = dim_H ker A, d3 = (A,0,...,0)^t, d4 = 0",
        "d3": "(A,0,...,0)^t",
        "d4": 0,
        "target": Fraction(1, 3),
        "upper_bound": upper,
        "lower_bound": lower_bound,
    }


def bookkeeping_report(cells: Sequence[int], b3: Rational, known: Optional[Dict[int, Rational]] = None) -> Dict[str, Any]:
    """
    chi, the solved b2 and the verdicts.

    b0 = b1 = 0 by default (the groups involved have vanishing L2-Betti numbers
    in degrees 0 and 1); b2 is solved from chi.
    """
    if len(cells) < 4:
        raise ParameterError(f"cells must cover dimensions 0..3, got {len(cells)} entries")
    bettis: Dict[int, Optional[Fraction]] = {0: Fraction(0), 1: Fraction(0), 2: None, 3: Fraction(b3)}
    for p, b in (known or {}).items():
        bettis[int(p)] = Fraction(b)
    for p in range(len(cells)):
        bettis.setdefault(p, Fraction(0))
    ledger = BettiLedger(cell_counts=list(cells), known_bettis={p: b for p, b in bettis.items() if p < len(cells)})
    chi = euler_characteristic(cells)
    b2 = solve_missing_betti(chi, ledger, 2)
    ledger.known_bettis[2] = b2
    return {
        "chi": chi,
        "bettis": {p: b for p, b in sorted(ledger.known_bettis.items())},
        "verdict": atiyah_verdict(b3),
        "b2_verdict": atiyah_verdict(b2),
    }
