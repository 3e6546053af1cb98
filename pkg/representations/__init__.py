from __future__ import annotations

from fractions import Fraction
from typing import Dict, Sequence, Union

import numpy as np

from errors import ParameterError
from exact_linalg import SparseIntMatrix
from group_ring import RingElement, markov_A
from lamplighter import HElement
from representations import quotient, tree
from representations.quotient import QuotientRep, build_quotient_rep
from representations.tree import LevelRep, build_level_rep, tree_action

Rep = Union[LevelRep, QuotientRep]

KINDS = ("tree", "quotient")


def _module(rep: Rep):
    if isinstance(rep, LevelRep):
        return tree
    if isinstance(rep, QuotientRep):
        return quotient
    raise ParameterError(f"unknown representation {type(rep).__name__}")


def build(kind: str, n: int) -> Rep:
    if kind == "tree":
        return build_level_rep(n)
    if kind == "quotient":
        return build_quotient_rep(n)
    raise ParameterError(f"unknown representation kind {kind!r}, expected one of {KINDS}")


def permutation(rep: Rep, x: HElement) -> np.ndarray:
    return _module(rep).permutation(rep, x)


def assemble_operator(rep: Rep, x: RingElement) -> SparseIntMatrix:
    """Sum of c_g * P_g, where P_g sends basis vector e_v to e_(g.v)."""
    triplets = []
    for g, c in sorted(x.terms.items()):
        if Fraction(c).denominator != 1:
            raise ParameterError(f"coefficient {c} at {g} is not an integer")
        images = permutation(rep, g)
        triplets.extend((int(images[v]), v, int(c)) for v in range(rep.dim))
    return SparseIntMatrix.from_triplets(rep.dim, triplets)


def markov_matrix(kind: str, n: int) -> SparseIntMatrix:
    """A_n for the tree levels, or A on the regular representation of H_n."""
    return assemble_operator(build(kind, n), markov_A())


def word_permutation(rep: Rep, word: Sequence[str]) -> np.ndarray:
    """Compose the tabulated generator permutations; the last letter acts first."""
    a = np.array(rep.a_perm, dtype=np.int64)
    t = np.array(rep.t_perm, dtype=np.int64)
    t_inv = np.empty_like(t)
    t_inv[t] = np.arange(len(t))
    a_inv = np.empty_like(a)
    a_inv[a] = np.arange(len(a))
    tables: Dict[str, np.ndarray] = {"a": a, "a^-1": a_inv, "t": t, "t^-1": t_inv}
    out = np.arange(rep.dim, dtype=np.int64)
    for letter in reversed(word):
        try:
            out = tables[letter][out]
        except KeyError:
            raise ParameterError(f"unknown letter {letter!r} for H") from None
    return out


__all__ = [
    "KINDS",
    "LevelRep",
    "QuotientRep",
    "Rep",
    "assemble_operator",
    "build",
    "build_level_rep",
    "build_quotient_rep",
    "markov_matrix",
    "permutation",
    "tree_action",
    "word_permutation",
]
