from __future__ import annotations

import random
import sys
from functools import reduce
from typing import Any, Callable, Dict, List, Tuple

import numpy as np

import config
from errors import InvariantViolation, ParameterError
from group_ring import (
    NORM_SQUARED,
    RingElement,
    brute_force_moment,
    even_moments,
    involution,
    projector_sequence,
    ring_mul,
    trace,
)
from lamplighter import (
    G_E,
    G_S,
    GElement,
    HElement,
    abelianization_of_presentation,
    alpha,
    alpha_preimage,
    check_presentation,
    from_h,
    g_inv,
    g_mul,
    g_order,
    h_mul,
    h_relator_words,
    reduce_g,
)
from representations import build, markov_matrix, word_permutation
from representations.quotient import quotient_image, quotient_mul
from representations.tree import act, truncate
from spectra import exact_multiplicity, tail_mass_bound, theoretical_moment, theoretical_projector

SUITES = ("core", "rep", "ring", "all")

Row = Dict[str, Any]
AlphaFn = Callable[[HElement], HElement]


def _row(suite: str, name: str, ok: bool, **detail: Any) -> Row:
    return {"suite": suite, "name": name, "ok": bool(ok), **detail}


def _random_h(rng: random.Random, spread: int = 8) -> HElement:
    positions = rng.sample(range(-spread, spread + 1), rng.randint(0, 4))
    return HElement(tuple(sorted(positions)), rng.randint(-spread, spread))


def _random_g(rng: random.Random) -> GElement:
    return reduce_g(GElement(rng.randint(0, 3), _random_h(rng), rng.randint(0, 3)))


def _commutator(x: GElement, y: GElement) -> GElement:
    return g_mul(g_mul(g_inv(x), g_inv(y)), g_mul(x, y))


def _random_ring(rng: random.Random) -> RingElement:
    terms = [(_random_h(rng, 3), rng.choice([-3, -2, -1, 1, 2, 3])) for _ in range(rng.randint(1, 4))]
    return RingElement.from_terms(terms)


# --- core: presentation, arithmetic of H and G --------------------------------


def _core(rng: random.Random, samples: int, alpha_fn: AlphaFn) -> List[Row]:
    rows = [
        _row("core", f"presentation: {r['relation']}", r["ok"], **{k: v for k, v in r.items() if k not in ("relation", "ok")})
        for r in check_presentation(config.RELATION_K, alpha_fn=alpha_fn)
    ]

    ab = abelianization_of_presentation()
    rows.append(_row("core", "abelianization of G is Z^2", ab["free_rank"] == 2 and not ab["torsion"], torsion=ab["torsion"], free_rank=ab["free_rank"]))
    ab_h = abelianization_of_presentation(h_relator_words(2), generators=("a", "t"))
    rows.append(_row("core", "abelianization of H is Z/2 x Z", ab_h["torsion"] == [2] and ab_h["free_rank"] == 1, torsion=ab_h["torsion"], free_rank=ab_h["free_rank"]))

    bad = 0
    for _ in range(samples):
        x, y, z = _random_h(rng), _random_h(rng), _random_h(rng)
        bad += h_mul(h_mul(x, y), z) != h_mul(x, h_mul(y, z))
    rows.append(_row("core", "H associativity", bad == 0, samples=samples, failures=bad))

    bad = 0
    for _ in range(samples):
        x, y, z = _random_g(rng), _random_g(rng), _random_g(rng)
        bad += g_mul(g_mul(x, y), z) != g_mul(x, g_mul(y, z))
    rows.append(_row("core", "G associativity", bad == 0, samples=samples, failures=bad))

    hom = inj = 0
    for _ in range(samples):
        x, y = _random_h(rng), _random_h(rng)
        hom += alpha_fn(h_mul(x, y)) != h_mul(alpha_fn(x), alpha_fn(y))
        inj += x != y and alpha_fn(x) == alpha_fn(y)
    rows.append(_row("core", "alpha is a homomorphism", hom == 0, samples=samples, failures=hom))
    rows.append(_row("core", "alpha is injective", inj == 0, samples=samples, failures=inj))

    bad = 0
    for _ in range(samples):
        x = _random_h(rng)
        try:
            bad += alpha_preimage(alpha_fn(x)) != x
        except ParameterError:
            bad += 1
    rows.append(_row("core", "alpha preimage inverts alpha", bad == 0, samples=samples, failures=bad))

    bad = 0
    for _ in range(samples):
        i, h, j = rng.randint(0, 3), _random_h(rng), rng.randint(0, 3)
        factors = [G_S] * i + [from_h(h)] + [g_inv(G_S)] * j
        left = reduce(g_mul, factors, G_E)
        right = reduce(lambda acc, f: g_mul(f, acc), reversed(factors), G_E)
        bad += not (reduce_g(GElement(i, h, j)) == left == right)
    rows.append(_row("core", "Britton reduction is confluent", bad == 0, samples=samples, failures=bad))

    bad = 0
    for _ in range(samples):
        x, y, z = _random_g(rng), _random_g(rng), _random_g(rng)
        c = _commutator(x, y)
        d = _commutator(y, z)
        try:
            torsion = g_order(c) in (1, 2)
        except InvariantViolation:
            torsion = False
        bad += not torsion
        bad += g_mul(c, d) != g_mul(d, c)
    rows.append(_row("core", "commutator subgroup is elementary abelian 2-group", bad == 0, samples=samples, failures=bad))
    return rows


# --- rep: finite approximations ----------------------------------------------

_REP_LEVELS = 10
_REP_RELATION_K = 6


def _identity(perm: np.ndarray) -> bool:
    return bool(np.array_equal(perm, np.arange(len(perm))))


def _rep(rng: random.Random, samples: int, alpha_fn: AlphaFn) -> List[Row]:
    rows: List[Row] = []

    bad = 0
    for _ in range(samples):
        n = rng.randint(1, 8)
        x, y, s = _random_h(rng), _random_h(rng), rng.randrange(1 << n)
        bad += act(h_mul(x, y), s, n) != act(x, act(y, s, n), n)
    rows.append(_row("rep", "tree action is a homomorphism", bad == 0, samples=samples, failures=bad))

    family = h_relator_words(_REP_RELATION_K)
    failures: List[str] = []
    for n in range(1, _REP_LEVELS + 1):
        rep = build("tree", n)
        failures.extend(f"n={n} {name}" for name, word in family.items() if not _identity(word_permutation(rep, word)))
    rows.append(_row("rep", f"tree relations k,n<={_REP_RELATION_K} at levels<={_REP_LEVELS}", not failures, failures=failures[:5]))

    bad = 0
    for _ in range(samples):
        n = rng.randint(1, 9)
        x, s = _random_h(rng), rng.randrange(1 << (n + 1))
        bad += truncate(act(x, s, n + 1), n) != act(x, truncate(s, n), n)
    rows.append(_row("rep", "tree levels are compatible", bad == 0, samples=samples, failures=bad))

    broken = []
    for n in range(1, _REP_LEVELS + 1):
        m = markov_matrix("tree", n)
        if not (m.symmetric and set(m.row_sums()) == {4} and set(m.col_sums()) == {4}):
            broken.append(n)
    rows.append(_row("rep", "A_n symmetric with row and column sums 4", not broken, levels=broken))

    bad = 0
    for _ in range(samples):
        n = rng.randint(2, 6)
        x, y = _random_h(rng), _random_h(rng)
        bad += quotient_mul(quotient_image(x, n), quotient_image(y, n), n) != quotient_image(h_mul(x, y), n)
    rows.append(_row("rep", "quotient map is a homomorphism", bad == 0, samples=samples, failures=bad))

    failures = []
    for n in range(2, 7):
        rep = build("quotient", n)
        failures.extend(f"n={n} {name}" for name, word in h_relator_words(3).items() if not _identity(word_permutation(rep, word)))
    rows.append(_row("rep", "quotient relations", not failures, failures=failures[:5]))

    broken = []
    for n in range(2, 6):
        m = markov_matrix("quotient", n)
        top, _ = exact_multiplicity(m, 4)
        if not (m.symmetric and set(m.row_sums()) == {4} and top >= 1):
            broken.append(n)
    rows.append(_row("rep", "quotient A symmetric, row sums 4, eigenvalue 4", not broken, levels=broken))
    return rows


# --- ring: trace, moments, projectors ----------------------------------------

_RING_MAX_K = 5
_BRUTE_MAX_K = 3
_Q_MAX = 40


def _ring(rng: random.Random, samples: int, alpha_fn: AlphaFn) -> List[Row]:
    rows: List[Row] = []
    pairs = max(1, samples // 10)

    tracial = positive = 0
    for _ in range(pairs):
        x, y = _random_ring(rng), _random_ring(rng)
        tracial += trace(ring_mul(x, y)) != trace(ring_mul(y, x))
        norm = trace(ring_mul(x, involution(x)))
        positive += norm != sum(c * c for c in x.terms.values()) or norm <= 0
    rows.append(_row("ring", "trace is tracial", tracial == 0, samples=pairs, failures=tracial))
    rows.append(_row("ring", "trace is positive", positive == 0, samples=pairs, failures=positive))

    moments = even_moments(_RING_MAX_K)
    brute = [brute_force_moment(k) for k in range(_BRUTE_MAX_K + 1)]
    rows.append(_row("ring", f"moments match brute force k<={_BRUTE_MAX_K}", moments[: _BRUTE_MAX_K + 1] == brute, moments=moments[: _BRUTE_MAX_K + 1], brute=brute))
    rows.append(_row("ring", "moments within norm bound", all(0 <= m <= NORM_SQUARED**k for k, m in enumerate(moments)), moments=moments))

    tail = float(tail_mass_bound(_Q_MAX))
    gaps: List[Tuple[int, float]] = []
    for k in range(1, _RING_MAX_K + 1):
        value, bound = theoretical_moment(k, _Q_MAX)
        if abs(moments[k] - value) > bound + config.CHECK_TOL:
            gaps.append((k, value))
    rows.append(_row("ring", "moments match the atomic measure", not gaps, mismatches=gaps))

    s = projector_sequence(_RING_MAX_K, moments)
    decreasing = all(a > b for a, b in zip(s, s[1:]))
    above = all(v * 3 > 1 for v in s)
    rows.append(_row("ring", "s_1 = 3/4, decreasing, above 1/3", s[0] * 4 == 3 and decreasing and above, values=s))

    gaps = []
    for k, exact in enumerate(s, start=1):
        value, _ = theoretical_projector(k, _Q_MAX)
        if abs(float(exact) - value) > tail + config.CHECK_TOL:
            gaps.append((k, value))
    rows.append(_row("ring", "projector values match the atomic measure", not gaps, mismatches=gaps))
    return rows


_RUNNERS = {"core": _core, "rep": _rep, "ring": _ring}


def run_checks(suite: str = "all", seed: int = 0, samples: int = config.SAMPLES, alpha_fn: AlphaFn = alpha) -> Dict[str, Any]:
    """
    Run one property suite (or all of them) and collect per-property rows.

    alpha_fn replaces the endomorphism in the checks that exercise it, so a
    deliberately wrong one must make the run fail.
    """
    if suite not in SUITES:
        raise ParameterError(f"unknown suite {suite!r}, expected one of {SUITES}")
    if samples < 1:
        raise ParameterError(f"samples must be positive, got {samples}")
    names = list(_RUNNERS) if suite == "all" else [suite]

    rows: List[Row] = []
    for name in names:
        rng = random.Random(f"{seed}:{name}")
        try:
            rows.extend(_RUNNERS[name](rng, samples, alpha_fn))
        except (InvariantViolation, ParameterError) as exc:
            rows.append(_row(name, "suite aborted", False, error=str(exc)))

    for row in rows:
        tag = "[OK]" if row["ok"] else "[ERR]"
        print(f"{tag} {row['suite']}: {row['name']}", file=sys.stderr)
    failed = sum(not row["ok"] for row in rows)
    return {"suite": suite, "seed": seed, "samples": samples, "rows": rows, "passed": len(rows) - failed, "failed": failed, "ok": failed == 0}
