from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import config
from errors import InvariantViolation, ParameterError
from exact_linalg import IntMatrix, cokernel, smith_normal_form

LampConfig = Tuple[int, ...]

INFINITE = "infinite"


def lamps(positions: Iterable[int]) -> LampConfig:
    """Canonical config: adding a position twice switches the lamp off again."""
    lit: set = set()
    for k in positions:
        lit ^= {int(k)}
    return tuple(sorted(lit))


def lamp_xor(f: LampConfig, g: LampConfig) -> LampConfig:
    return tuple(sorted(set(f) ^ set(g)))


def lamp_shift(f: LampConfig, m: int) -> LampConfig:
    return tuple(k + m for k in f)


@dataclass(frozen=True, order=True)
class HElement:
    lamps: LampConfig = ()
    shift: int = 0


E = HElement()
A = HElement((0,), 0)
T = HElement((), 1)


def h_mul(x: HElement, y: HElement) -> HElement:
    """(f, m)(g, n) = (f + shift_m(g), m + n)"""
    return HElement(lamp_xor(x.lamps, lamp_shift(y.lamps, x.shift)), x.shift + y.shift)


def h_inv(x: HElement) -> HElement:
    return HElement(lamp_shift(x.lamps, -x.shift), -x.shift)


def h_pow(x: HElement, n: int) -> HElement:
    base = x if n >= 0 else h_inv(x)
    out = E
    for _ in range(abs(n)):
        out = h_mul(out, base)
    return out


H_LETTERS: Dict[str, HElement] = {
    "a": A,
    "a^-1": A,
    "t": T,
    "t^-1": h_inv(T),
}


def h_eval_word(word: Sequence[str]) -> HElement:
    out = E
    for letter in word:
        try:
            out = h_mul(out, H_LETTERS[letter])
        except KeyError:
            raise ParameterError(f"unknown letter {letter!r} for H") from None
    return out


# --- the endomorphism alpha: multiplication by (1 + u^-1) -------------------


def alpha(x: HElement) -> HElement:
    out: set = set()
    for k in x.lamps:
        out ^= {k - 1, k}
    return HElement(tuple(sorted(out)), x.shift)


def in_image_alpha(x: HElement) -> bool:
    # f is divisible by 1 + u^-1 iff f(1) = 0 over F2
    return len(x.lamps) % 2 == 0


def alpha_preimage(x: HElement) -> HElement:
    if not in_image_alpha(x):
        raise ParameterError(f"{format_h(x)} is not in the image of alpha")
    rest = set(x.lamps)
    out: List[int] = []
    while rest:
        top = max(rest)
        out.append(top)
        rest ^= {top, top - 1}
    return HElement(tuple(sorted(out)), x.shift)


def alpha_power(x: HElement, n: int, alpha_fn: Callable[[HElement], HElement] = alpha) -> HElement:
    for _ in range(n):
        x = alpha_fn(x)
    return x


# --- the ascending HNN extension G ------------------------------------------


@dataclass(frozen=True, order=True)
class GElement:
    """s^i * h * s^-j with i, j >= 0."""

    i: int = 0
    h: HElement = E
    j: int = 0


G_E = GElement()
G_A = GElement(0, A, 0)
G_T = GElement(0, T, 0)
G_S = GElement(1, E, 0)


def reduce_g(x: GElement) -> GElement:
    i, h, j = x.i, x.h, x.j
    if i < 0 or j < 0:
        raise ParameterError(f"negative s-exponent in {x}")
    while i > 0 and j > 0 and in_image_alpha(h):
        i, h, j = i - 1, alpha_preimage(h), j - 1
    return GElement(i, h, j)


def g_mul(x: GElement, y: GElement) -> GElement:
    i, h, j = x.i, x.h, x.j
    k, g, l = y.i, y.h, y.j
    if k >= j:
        out = GElement(i + k - j, h_mul(alpha_power(h, k - j), g), l)
    else:
        out = GElement(i, h_mul(h, alpha_power(g, j - k)), l + j - k)
    return reduce_g(out)


def g_inv(x: GElement) -> GElement:
    return GElement(x.j, h_inv(x.h), x.i)


def from_h(h: HElement) -> GElement:
    return GElement(0, h, 0)


G_LETTERS: Dict[str, GElement] = {
    "a": G_A,
    "a^-1": G_A,
    "t": G_T,
    "t^-1": g_inv(G_T),
    "s": G_S,
    "s^-1": g_inv(G_S),
}


def g_eval_word(word: Sequence[str]) -> GElement:
    out = G_E
    for letter in word:
        try:
            out = g_mul(out, G_LETTERS[letter])
        except KeyError:
            raise ParameterError(f"unknown letter {letter!r} for G") from None
    return out


def in_H(x: GElement) -> bool:
    return x.i == 0 and x.j == 0


@dataclass(frozen=True)
class AbelianImage:
    t_exp: int
    s_exp: int


def abelian_image(x: GElement) -> AbelianImage:
    return AbelianImage(t_exp=x.h.shift, s_exp=x.i - x.j)


def g_order(x: GElement) -> Union[int, str]:
    """1, 2 or "infinite"; every element of G' is an involution."""
    if x == G_E:
        return 1
    image = abelian_image(x)
    if image.t_exp or image.s_exp:
        return INFINITE
    if g_mul(x, x) != G_E:
        raise InvariantViolation(f"{format_g(x)} lies in G' but does not square to the identity")
    return 2


def derived_generator(k: int, l: int) -> GElement:
    """s^l t^-k a t^k s^-l, a generator of G'."""
    if l < 0:
        raise ParameterError("l must be non-negative")
    conj = h_mul(h_mul(h_inv(h_pow(T, k)), A), h_pow(T, k))
    return reduce_g(GElement(l, conj, l))


# --- presentations ---------------------------------------------------------


def _inverse_word(word: Sequence[str]) -> List[str]:
    out = []
    for letter in reversed(word):
        out.append(letter[:-3] if letter.endswith("^-1") else letter + "^-1")
    return out


def commutator_word(g: Sequence[str], h: Sequence[str]) -> List[str]:
    """[g, h] = g^-1 h^-1 g h"""
    return _inverse_word(g) + _inverse_word(h) + list(g) + list(h)


def _t_conj(k: int) -> List[str]:
    # t^-k a t^k, for any integer k
    if k >= 0:
        return ["t^-1"] * k + ["a"] + ["t"] * k
    return ["t"] * (-k) + ["a"] + ["t^-1"] * (-k)


def relator_words() -> Dict[str, List[str]]:
    """Relators of G; each word evaluates to the identity."""
    return {
        "a^2": ["a", "a"],
        "[t,s]": commutator_word(["t"], ["s"]),
        "[t^-1at,a]": commutator_word(_t_conj(1), ["a"]),
        "s^-1as=at^-1at": ["s^-1", "a", "s"] + _inverse_word(["a", "t^-1", "a", "t"]),
    }


def hnn_relator_words() -> Dict[str, List[str]]:
    """Relators of the HNN presentation V that are not literally relators of G."""
    return {
        "[s,t]": commutator_word(["s"], ["t"]),
        "s^-1as=[a,t]": ["s^-1", "a", "s"] + _inverse_word(commutator_word(["a"], ["t"])),
    }


def h_relator_words(bound: int = config.RELATION_K) -> Dict[str, List[str]]:
    out = {"a^2": ["a", "a"]}
    for k, n in product(range(bound + 1), repeat=2):
        out[f"[t^-{k}at^{k},t^-{n}at^{n}]"] = commutator_word(_t_conj(k), _t_conj(n))
    return out


def exponent_sums(word: Sequence[str], generators: Sequence[str]) -> List[int]:
    row = [0] * len(generators)
    for letter in word:
        name, sign = (letter[:-3], -1) if letter.endswith("^-1") else (letter, 1)
        if name not in generators:
            raise ParameterError(f"letter {letter!r} is not over generators {list(generators)}")
        row[generators.index(name)] += sign
    return row


def abelianization_of_presentation(
    relators: Optional[Dict[str, List[str]]] = None,
    generators: Sequence[str] = ("a", "t", "s"),
) -> Dict[str, Any]:
    relators = relator_words() if relators is None else relators
    rows = [exponent_sums(word, generators) for word in relators.values()]
    if not rows:
        return {"generators": list(generators), "torsion": [], "free_rank": len(generators), "invariant_factors": []}
    m = IntMatrix.from_rows(rows, cols=len(generators))
    factors = smith_normal_form(m)
    torsion, free_rank = cokernel(m)
    return {
        "generators": list(generators),
        "exponent_matrix": rows,
        "invariant_factors": factors,
        "torsion": torsion,
        "free_rank": free_rank,
    }


def check_presentation(bound: int = config.RELATION_K, alpha_fn: Callable[[HElement], HElement] = alpha) -> List[Dict[str, Any]]:
    """
    Evaluate every relator; one row per relation (the H family is one row).

    alpha_fn is checked against the defining equation alpha(a) = a t^-1 a t,
    so a wrong endomorphism shows up as a failed row.
    """
    rows: List[Dict[str, Any]] = []
    for name, word in {**relator_words(), **hnn_relator_words()}.items():
        value = g_eval_word(word)
        rows.append({"relation": name, "ok": value == G_E, "value": format_g(value)})

    family = h_relator_words(bound)
    failures = [name for name, word in family.items() if h_eval_word(word) != E]
    rows.append({"relation": f"H family k,n<={bound}", "ok": not failures, "checked": len(family), "failures": failures[:5]})

    defining = h_eval_word(["a", "t^-1", "a", "t"])
    rows.append({"relation": "alpha(a)=at^-1at", "ok": alpha_fn(A) == defining, "value": format_h(alpha_fn(A))})

    gens = [derived_generator(k, l) for k in range(3) for l in range(3)]
    involutions = all(g_mul(g, g) == G_E for g in gens)
    commute = all(g_mul(x, y) == g_mul(y, x) for x in gens for y in gens)
    rows.append({"relation": "G' generators: involutions, commuting", "ok": involutions and commute, "checked": len(gens)})
    return rows


# --- canonical text forms ----------------------------------------------------

_H_RE = re.compile(r"^\s*lamps\{([^}]*)\};shift=(-?\d+)\s*$")
_G_RE = re.compile(r"^\s*s\^(\d+)\s*\*\s*(.+?)\s*\*\s*s\^-(\d+)\s*$")
_LETTER_RE = re.compile(r"^[ats](\^-1)?$")


def format_h(x: HElement) -> str:
    return "lamps{" + ",".join(str(k) for k in x.lamps) + "};shift=" + str(x.shift)


def format_g(x: GElement) -> str:
    return f"s^{x.i} * {format_h(x.h)} * s^-{x.j}"


def parse_h(text: str) -> HElement:
    match = _H_RE.match(text or "")
    if not match:
        raise ParameterError(f"cannot parse H element {text!r}")
    body = match.group(1).strip()
    try:
        positions = [int(v) for v in body.split(",")] if body else []
    except ValueError:
        raise ParameterError(f"bad lamp list in {text!r}") from None
    return HElement(lamps(positions), int(match.group(2)))


def parse_g(text: str) -> GElement:
    match = _G_RE.match(text or "")
    if not match:
        return from_h(parse_h(text))
    return reduce_g(GElement(int(match.group(1)), parse_h(match.group(2)), int(match.group(3))))


def parse_word(text: str) -> List[str]:
    """'t^-1 a t * s' -> ['t^-1', 'a', 't', 's']; the empty string is the empty word."""
    tokens = [tok for tok in re.split(r"[\s*]+", (text or "").strip()) if tok]
    for tok in tokens:
        if not _LETTER_RE.match(tok):
            raise ParameterError(f"unknown letter {tok!r}")
    return tokens
