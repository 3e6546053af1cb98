from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Tuple, Union

import config
from errors import ParameterError, ResourceLimitError
from lamplighter import A, E, HElement, T, h_inv, h_mul

Coefficient = Union[int, Fraction]

# |A| <= 4 since A is a sum of four unitaries, so 1 - A^2/16 is a contraction.
NORM_SQUARED = 16


@dataclass(frozen=True)
class RingElement:
    terms: Mapping[HElement, Coefficient] = field(default_factory=dict)

    @classmethod
    def from_terms(cls, items: Iterable[Tuple[HElement, Coefficient]]) -> "RingElement":
        acc: Dict[HElement, Coefficient] = {}
        for g, c in items:
            acc[g] = acc.get(g, 0) + c
        return cls({g: _normalize(c) for g, c in acc.items() if c != 0})

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RingElement) and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    @property
    def support(self) -> List[HElement]:
        return sorted(self.terms)

    def coefficient(self, g: HElement) -> Coefficient:
        return self.terms.get(g, 0)


def _normalize(c: Coefficient) -> Coefficient:
    c = Fraction(c)
    return int(c) if c.denominator == 1 else c


def delta(g: HElement, c: Coefficient = 1) -> RingElement:
    return RingElement.from_terms([(g, c)])


def ring_add(x: RingElement, y: RingElement) -> RingElement:
    return RingElement.from_terms(list(x.terms.items()) + list(y.terms.items()))


def ring_scale(x: RingElement, c: Coefficient) -> RingElement:
    return RingElement.from_terms((g, c * v) for g, v in x.terms.items())


def ring_mul(x: RingElement, y: RingElement) -> RingElement:
    acc: Dict[HElement, Coefficient] = {}
    for g, c in x.terms.items():
        for h, d in y.terms.items():
            gh = h_mul(g, h)
            acc[gh] = acc.get(gh, 0) + c * d
    return RingElement({g: _normalize(c) for g, c in acc.items() if c != 0})


def involution(x: RingElement) -> RingElement:
    return RingElement({h_inv(g): c for g, c in x.terms.items()})


def trace(x: RingElement) -> Fraction:
    return Fraction(x.coefficient(E))


def markov_A() -> RingElement:
    """t + at + t^-1 + (at)^-1"""
    at = h_mul(A, T)
    return RingElement.from_terms([(T, 1), (at, 1), (h_inv(T), 1), (h_inv(at), 1)])


def _apply(x: RingElement, v: Dict[HElement, int], k: int) -> Dict[HElement, int]:
    out: Dict[HElement, int] = {}
    for g, c in x.terms.items():
        for h, d in v.items():
            gh = h_mul(g, h)
            out[gh] = out.get(gh, 0) + c * d
        if len(out) > config.SUPPORT_CEILING:
            raise ResourceLimitError(f"support exceeds {config.SUPPORT_CEILING} terms at k={k}", k=k)
    return {g: c for g, c in out.items() if c}


def even_moments(max_k: int) -> List[int]:
    """
    [tau(A^0), tau(A^2), ..., tau(A^(2*max_k))].

    A is self-adjoint, so tau(A^(2k)) = <A^k e, A^k e> is the sum of squared
    coefficients of A^k applied to the identity; only A^k e is ever stored.
    """
    if max_k < 0:
        raise ParameterError(f"max_k must be non-negative, got {max_k}")
    op = markov_A()
    v: Dict[HElement, int] = {E: 1}
    out = [1]
    for k in range(1, max_k + 1):
        v = _apply(op, v, k)
        out.append(sum(c * c for c in v.values()))
        print(f"[ring] k={k} support={len(v)} moment={out[-1]}", file=sys.stderr)
    return out


def brute_force_moment(k: int) -> int:
    """Closed words of length 2k over {t, at, t^-1, (at)^-1}; independent of the convolution path."""
    letters = list(markov_A().terms)
    count = 0
    for word in product(letters, repeat=2 * k):
        g = E
        for letter in word:
            g = h_mul(g, letter)
        if g == E:
            count += 1
    return count


def projector_sequence(max_k: int, moments: Optional[List[int]] = None) -> List[Fraction]:
    """s_k = tau((1 - A^2/16)^k) for k = 1..max_k, upper bounds for dim ker A."""
    if max_k < 1:
        raise ParameterError(f"max_k must be at least 1, got {max_k}")
    moments = moments if moments is not None else even_moments(max_k)
    return [projector_from_moments(k, moments) for k in range(1, max_k + 1)]


def projector_from_moments(k: int, moments: List[int]) -> Fraction:
    if len(moments) <= k:
        raise ParameterError(f"need moments up to tau(A^{2 * k})")
    return sum(
        (comb(k, i) * Fraction(-1, NORM_SQUARED) ** i * moments[i] for i in range(k + 1)),
        Fraction(0),
    )
