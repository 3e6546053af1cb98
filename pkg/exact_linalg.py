from __future__ import annotations

import heapq
import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.sparse
from sympy import isprime, prevprime
from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors

import config
from errors import ParameterError


Number = Union[int, float]


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        data = tuple(tuple(int(v) for v in row) for row in rows)
        width = cols if cols is not None else (len(data[0]) if data else 0)
        if width <= 0:
            raise ParameterError("IntMatrix needs a positive column count")
        if any(len(row) != width for row in data):
            raise ParameterError("IntMatrix rows must all have the same length")
        return cls(rows=len(data), cols=width, entries=data)


@dataclass(frozen=True)
class SparseIntMatrix:
    dim: int
    entries: Tuple[Tuple[int, int, int], ...]
    symmetric: bool = False

    @classmethod
    def from_triplets(cls, dim: int, triplets: Iterable[Tuple[int, int, int]]) -> "SparseIntMatrix":
        """Coalesce (row, col, value) triplets; duplicates are summed and zeros dropped."""
        if dim <= 0:
            raise ParameterError(f"matrix dimension must be positive, got {dim}")
        rows: List[int] = []
        cols: List[int] = []
        vals: List[int] = []
        for r, c, v in triplets:
            rows.append(int(r))
            cols.append(int(c))
            vals.append(int(v))
        coo = scipy.sparse.coo_matrix(
            (np.array(vals, dtype=np.int64), (np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64))),
            shape=(dim, dim),
        )
        csr = coo.tocsr()
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        out: List[Tuple[int, int, int]] = []
        for r in range(dim):
            start, end = csr.indptr[r], csr.indptr[r + 1]
            for c, v in zip(csr.indices[start:end], csr.data[start:end]):
                out.append((r, int(c), int(v)))
        entries = tuple(out)
        lookup = {(r, c): v for r, c, v in entries}
        symmetric = all(lookup.get((c, r)) == v for r, c, v in entries)
        return cls(dim=dim, entries=entries, symmetric=symmetric)

    @classmethod
    def identity(cls, dim: int) -> "SparseIntMatrix":
        return cls.from_triplets(dim, ((i, i, 1) for i in range(dim)))

    @classmethod
    def from_dense(cls, rows: Sequence[Sequence[int]]) -> "SparseIntMatrix":
        dim = len(rows)
        if any(len(row) != dim for row in rows):
            raise ParameterError("SparseIntMatrix is square")
        return cls.from_triplets(dim, ((r, c, v) for r, row in enumerate(rows) for c, v in enumerate(row) if v))

    def shifted(self, lam: int) -> "SparseIntMatrix":
        """self - lam*I"""
        if int(lam) != lam:
            raise ParameterError(f"shift must be an integer, got {lam}")
        diag = ((i, i, -int(lam)) for i in range(self.dim))
        return SparseIntMatrix.from_triplets(self.dim, list(self.entries) + list(diag))

    def to_csr(self) -> scipy.sparse.csr_matrix:
        if not self.entries:
            return scipy.sparse.csr_matrix((self.dim, self.dim), dtype=np.int64)
        r, c, v = zip(*self.entries)
        return scipy.sparse.csr_matrix((np.array(v, dtype=np.int64), (np.array(r), np.array(c))), shape=(self.dim, self.dim))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=np.float64)
        for r, c, v in self.entries:
            out[r, c] = v
        return out

    def to_lists(self) -> List[List[int]]:
        out = [[0] * self.dim for _ in range(self.dim)]
        for r, c, v in self.entries:
            out[r][c] = v
        return out

    def row_sums(self) -> List[int]:
        sums = [0] * self.dim
        for r, _, v in self.entries:
            sums[r] += v
        return sums

    def col_sums(self) -> List[int]:
        sums = [0] * self.dim
        for _, c, v in self.entries:
            sums[c] += v
        return sums

    def trace(self) -> int:
        return sum(v for r, c, v in self.entries if r == c)


@dataclass(frozen=True)
class MeasureAtom:
    value: Number
    multiplicity: int
    fraction: Fraction


@dataclass(frozen=True)
class CountingMeasure:
    level: Optional[int]
    dim: int
    pairs: Tuple[MeasureAtom, ...]

    def fraction_at(self, value: Number, tol: float = config.CLUSTER_TOL) -> Fraction:
        for atom in self.pairs:
            if abs(atom.value - value) <= tol:
                return atom.fraction
        return Fraction(0)

    def multiplicity_at(self, value: Number, tol: float = config.CLUSTER_TOL) -> int:
        for atom in self.pairs:
            if abs(atom.value - value) <= tol:
                return atom.multiplicity
        return 0


# --- Smith normal form -------------------------------------------------------


def smith_normal_form(m: IntMatrix) -> List[int]:
    """
    Nonzero invariant factors d1 | d2 | ... | dr of the row lattice of m.

    The cokernel Z^cols / rows is Z^(cols - r) plus the sum of Z/di; unit
    factors are kept so that len(result) is the rank.
    """
    if m.rows == 0 or not any(any(row) for row in m.entries):
        return []
    dm = DomainMatrix([[ZZ(v) for v in row] for row in m.entries], (m.rows, m.cols), ZZ)
    factors = [abs(int(d)) for d in invariant_factors(dm)]
    return sorted(d for d in factors if d != 0)


def cokernel(m: IntMatrix) -> Tuple[List[int], int]:
    """(torsion factors > 1, free rank) of Z^cols modulo the row lattice."""
    factors = smith_normal_form(m)
    return [d for d in factors if d > 1], m.cols - len(factors)


# --- rank over prime fields and over Q ---------------------------------------


def _sparse_rank(rows: List[Dict[int, int]], p: Optional[int]) -> int:
    """
    Gaussian elimination on dict rows with Markowitz-style pivoting.

    The sparsest active row is taken first and its pivot column is the one
    touched by the fewest active rows. With p=None the arithmetic is over the
    integers, every updated row divided by its content.
    """
    col_rows: Dict[int, set] = {}
    for idx, row in enumerate(rows):
        for c in row:
            col_rows.setdefault(c, set()).add(idx)
    active = set(idx for idx, row in enumerate(rows) if row)
    heap = [(len(row), idx) for idx, row in enumerate(rows) if row]
    heapq.heapify(heap)

    rank = 0
    while heap:
        length, r = heapq.heappop(heap)
        if r not in active or length != len(rows[r]):
            continue
        pivot_row = rows[r]
        active.discard(r)
        if not pivot_row:
            continue
        col = min(pivot_row, key=lambda c: (len(col_rows[c]), c))
        for c in pivot_row:
            col_rows[c].discard(r)
        pivot = pivot_row[col]
        inv = pow(pivot, -1, p) if p is not None else None

        for other in sorted(col_rows[col]):
            target = rows[other]
            coeff = target[col]
            if p is not None:
                factor = coeff * inv % p
                for c, v in pivot_row.items():
                    nv = (target.get(c, 0) - factor * v) % p
                    _store(target, col_rows, other, c, nv)
            else:
                touched = set(target) | set(pivot_row)
                for c in touched:
                    nv = pivot * target.get(c, 0) - coeff * pivot_row.get(c, 0)
                    _store(target, col_rows, other, c, nv)
                content = reduce(math.gcd, target.values(), 0)
                if content > 1:
                    for c in target:
                        target[c] //= content
            if target:
                heapq.heappush(heap, (len(target), other))
            else:
                active.discard(other)
        rank += 1
    return rank


def _store(row: Dict[int, int], col_rows: Dict[int, set], idx: int, c: int, value: int) -> None:
    if value:
        if c not in row:
            col_rows.setdefault(c, set()).add(idx)
        row[c] = value
    elif c in row:
        del row[c]
        col_rows[c].discard(idx)


def _dict_rows(m: SparseIntMatrix, p: Optional[int]) -> List[Dict[int, int]]:
    rows: List[Dict[int, int]] = [dict() for _ in range(m.dim)]
    for r, c, v in m.entries:
        value = v % p if p is not None else v
        if value:
            rows[r][c] = value
    return rows


def rank_mod_p(m: SparseIntMatrix, p: int) -> int:
    if not isprime(p):
        raise ParameterError(f"modulus {p} is not prime")
    return _sparse_rank(_dict_rows(m, p), p)


def integer_rank(m: SparseIntMatrix) -> int:
    """Rank over Q by fraction-free elimination over Z (no modular shortcut)."""
    return _sparse_rank(_dict_rows(m, None), None)


def choose_primes(seed: int = config.PRIME_SEED, count: int = config.PRIME_COUNT) -> List[int]:
    """Distinct primes just below 2**31, reproducible from the seed."""
    rng = random.Random(seed)
    primes: List[int] = []
    while len(primes) < count:
        p = int(prevprime(2**31 - rng.randrange(1, 2**20)))
        if p not in primes:
            primes.append(p)
    return primes


def max_rank(m: SparseIntMatrix, primes: Optional[Sequence[int]] = None) -> Dict[str, Any]:
    """
    Rank as the maximum over several primes.

    A mod-p rank can only undercount the rational rank, so the maximum
    minimises spurious kernel. Disagreement between primes is reported in
    "spread". Up to config.EXACT_RANK_MAX_DIM the integer rank is computed too
    and wins if it differs.
    """
    primes = list(primes) if primes else choose_primes()
    if len(primes) < 3:
        raise ParameterError("at least 3 primes are required")
    ranks = [rank_mod_p(m, p) for p in primes]
    best = max(ranks)
    spread = best - min(ranks)
    if spread:
        print(f"[rank] primes disagree dim={m.dim} ranks={ranks}", file=sys.stderr)
    out: Dict[str, Any] = {"primes": primes, "ranks": ranks, "rank": best, "spread": spread}
    if m.dim <= config.EXACT_RANK_MAX_DIM:
        exact = integer_rank(m)
        out["exact_rank"] = exact
        if exact != best:
            print(f"[WARN] mod-p rank {best} differs from exact rank {exact} dim={m.dim}", file=sys.stderr)
            out["rank"] = exact
    return out


# --- eigenvalues -------------------------------------------------------------


def sym_eigenvalues(m: Any) -> List[float]:
    arr = m.to_dense() if isinstance(m, SparseIntMatrix) else np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ParameterError(f"expected a square matrix, got shape {arr.shape}")
    if not np.array_equal(arr, arr.T):
        raise ParameterError("matrix is not symmetric")
    values = scipy.linalg.eigvalsh(arr)
    return sorted(float(v) for v in values)


def _snap(value: float, tol: float) -> Number:
    nearest = round(value)
    if abs(value - nearest) <= tol:
        return int(nearest)
    return value


def cluster_eigenvalues(values: Sequence[float], tol: float = config.CLUSTER_TOL, level: Optional[int] = None) -> CountingMeasure:
    if tol <= 0:
        raise ParameterError(f"tolerance must be positive, got {tol}")
    dim = len(values)
    groups: List[List[float]] = []
    for v in values:
        if groups and abs(v - groups[-1][-1]) <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    pairs = tuple(
        MeasureAtom(value=_snap(sum(g) / len(g), tol), multiplicity=len(g), fraction=Fraction(len(g), dim))
        for g in groups
    )
    return CountingMeasure(level=level, dim=dim, pairs=pairs)
