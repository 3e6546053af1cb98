from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

import config
from errors import ParameterError
from lamplighter import A, T, HElement

# States at level n are F2-polynomials mod u^n stored as bitmasks, bit i being
# the coefficient of u^i; the bit-word "b0 b1 ... b(n-1)" lists them in order.


@dataclass(frozen=True)
class LevelRep:
    n: int
    a_perm: Tuple[int, ...]
    t_perm: Tuple[int, ...]

    @property
    def dim(self) -> int:
        return 1 << self.n


def _mask(n: int) -> int:
    return (1 << n) - 1


def _clmul(x: int, y: int, n: int) -> int:
    out = 0
    i = 0
    while y >> i:
        if (y >> i) & 1:
            out ^= x << i
        i += 1
    return out & _mask(n)


def one_plus_u_power(m: int, n: int) -> int:
    """(1 + u)^m mod u^n; (1 + u)^-1 = 1 + u + ... + u^(n-1)."""
    base = 0b11 & _mask(n) if m >= 0 else _mask(n)
    out = 1
    e = abs(m)
    while e:
        if e & 1:
            out = _clmul(out, base, n)
        base = _clmul(base, base, n)
        e >>= 1
    return out


def affine_params(x: HElement, n: int) -> Tuple[int, int]:
    """(f, m) acts as p -> (1+u)^m p + sum over k in f of (1+u)^k."""
    offset = 0
    for k in x.lamps:
        offset ^= one_plus_u_power(k, n)
    return one_plus_u_power(x.shift, n), offset


def word_to_mask(word: str, n: int) -> int:
    if len(word) != n or any(ch not in "01" for ch in word):
        raise ParameterError(f"expected a bit-word of length {n}, got {word!r}")
    return sum(1 << i for i, ch in enumerate(word) if ch == "1")


def mask_to_word(mask: int, n: int) -> str:
    return "".join("1" if (mask >> i) & 1 else "0" for i in range(n))


def act(x: HElement, state: int, n: int) -> int:
    mult, offset = affine_params(x, n)
    return _clmul(state, mult, n) ^ offset


def tree_action(x: HElement, state: Union[str, int], n: int) -> Union[str, int]:
    if isinstance(state, str):
        return mask_to_word(act(x, word_to_mask(state, n), n), n)
    if not 0 <= state < (1 << n):
        raise ParameterError(f"state {state} does not fit level {n}")
    return act(x, state, n)


def permutation(rep: LevelRep, x: HElement) -> np.ndarray:
    """Images of all 2^n states under x, vectorised over states."""
    n = rep.n
    mult, offset = affine_params(x, n)
    states = np.arange(1 << n, dtype=np.int64)
    out = np.zeros_like(states)
    for i in range(n):
        if (mult >> i) & 1:
            out ^= states << i
    return (out & _mask(n)) ^ offset


def build_level_rep(n: int) -> LevelRep:
    if not 1 <= n <= config.TREE_MAX_LEVEL:
        raise ParameterError(f"tree level must be in 1..{config.TREE_MAX_LEVEL}, got {n}")
    states = range(1 << n)
    return LevelRep(
        n=n,
        a_perm=tuple(act(A, s, n) for s in states),
        t_perm=tuple(act(T, s, n) for s in states),
    )


def truncate(state: int, n: int) -> int:
    """Parent of a level-(n+1) vertex at level n: forget the last bit."""
    return state & _mask(n)
