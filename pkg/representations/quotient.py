from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np

import config
from errors import ParameterError
from lamplighter import A, T, HElement

# H_n = F2[u]/(u^n + 1) x| Z/n. An element (f, m) has index m * 2^n + f with
# f the n-bit lamp mask.

QuotientElement = Tuple[int, int]


@dataclass(frozen=True)
class QuotientRep:
    n: int
    order: int
    a_perm: Tuple[int, ...]
    t_perm: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.order


def _rotate(mask: int, m: int, n: int) -> int:
    m %= n
    full = (1 << n) - 1
    return ((mask << m) | (mask >> (n - m))) & full if m else mask


def quotient_image(x: HElement, n: int) -> QuotientElement:
    mask = 0
    for k in x.lamps:
        mask ^= 1 << (k % n)
    return mask, x.shift % n


def quotient_mul(x: QuotientElement, y: QuotientElement, n: int) -> QuotientElement:
    return x[0] ^ _rotate(y[0], x[1], n), (x[1] + y[1]) % n


def index_of(element: QuotientElement, n: int) -> int:
    return element[1] * (1 << n) + element[0]


def elements(n: int) -> Iterator[QuotientElement]:
    for m in range(n):
        for f in range(1 << n):
            yield f, m


def permutation(rep: QuotientRep, x: HElement) -> np.ndarray:
    """Left-regular action: index of x*y for every y."""
    n = rep.n
    gf, gm = quotient_image(x, n)
    idx = np.arange(rep.order, dtype=np.int64)
    masks = idx & ((1 << n) - 1)
    shifts = idx >> n
    rotated = masks if gm == 0 else ((masks << gm) | (masks >> (n - gm))) & ((1 << n) - 1)
    return ((shifts + gm) % n) * (1 << n) + (rotated ^ gf)


def build_quotient_rep(n: int) -> QuotientRep:
    if not config.QUOTIENT_MIN <= n <= config.QUOTIENT_MAX:
        raise ParameterError(f"cycle length must be in {config.QUOTIENT_MIN}..{config.QUOTIENT_MAX}, got {n}")
    a_img, t_img = quotient_image(A, n), quotient_image(T, n)
    a_perm = tuple(index_of(quotient_mul(a_img, y, n), n) for y in elements(n))
    t_perm = tuple(index_of(quotient_mul(t_img, y, n), n) for y in elements(n))
    return QuotientRep(n=n, order=n * (1 << n), a_perm=a_perm, t_perm=t_perm)
