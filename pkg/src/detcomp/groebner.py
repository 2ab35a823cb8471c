"""Buchberger engine, normal forms, and Krull dimension via staircases.

Monomial order is degrevlex throughout (see poly.mono_key). The engine keeps
an internal keyed representation: a polynomial is a list of (exps, coeff)
pairs in strictly descending order, basis elements are monic with cached
leading-monomial data, and reduction runs over a dict accumulator driven by a
lazy max-heap. Pair selection is the normal strategy (minimal lcm degree,
deterministic tie-break); the Gebauer-Moeller product and chain criteria prune
pairs and can be switched off to cross-check that the reduced basis does not
change. Resource caps raise, they never truncate silently.

Verification is independent of the engine: naive_normal_form scans a plain
dict for its maximal monomial and divides textbook-style, and
is_groebner_basis re-reduces every S-polynomial that way. Tests flip
VERIFY_BASES so every basis computed through buchberger() is re-verified.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field
from heapq import heappush, heappop
from itertools import combinations

from .fields import Field, FieldMismatchError, QQ
from .poly import (
    ArityError,
    Polynomial,
    VarSet,
    mono_div,
    mono_divides,
    mono_key,
    mono_lcm,
    mono_mul,
)

VERIFY_BASES = False  # tests enable this; every computed basis is re-verified


class ResourceCapError(RuntimeError):
    """A configured engine limit was hit; partial results are never returned."""

    def __init__(self, stage: str, detail: str):
        super().__init__(f"resource cap exceeded during {stage}: {detail}")
        self.stage = stage
        self.detail = detail


@dataclass(frozen=True)
class EngineLimits:
    max_pairs: int = 500_000       # S-pairs processed
    max_basis: int = 10_000        # intermediate basis size
    max_degree: int | None = None  # lcm degree of any processed pair
    time_limit: float | None = None  # wall seconds


DEFAULT_LIMITS = EngineLimits()


@dataclass(frozen=True)
class Ideal:
    vars: VarSet
    field: Field
    generators: tuple

    def __post_init__(self):
        for g in self.generators:
            if g.vars != self.vars or g.field != self.field:
                raise FieldMismatchError("generators must live in the declared ring")

    @classmethod
    def of(cls, *gens: Polynomial) -> "Ideal":
        if not gens:
            raise ValueError("need at least one generator")
        return cls(gens[0].vars, gens[0].field, tuple(gens))


@dataclass(frozen=True)
class GroebnerStats:
    pairs_processed: int
    zero_reductions: int
    basis_size: int
    max_degree_processed: int
    wall_time: float


@dataclass(frozen=True)
class GroebnerBasis:
    vars: VarSet
    field: Field
    polys: tuple  # reduced basis, monic, ascending leading monomials
    stats: GroebnerStats
    order: str = "degrevlex"

    def leading_monomials(self) -> list:
        return [p.leading_monomial() for p in self.polys]

    def is_trivial(self) -> bool:
        """True when 1 is in the ideal (the variety is empty over the closure)."""
        return len(self.polys) == 1 and self.polys[0].degree() == 0


def _nkey(e):
    """Heap key: smaller nkey = larger monomial in degrevlex."""
    return (-sum(e), tuple(reversed(e)))


def _mask(e) -> int:
    m = 0
    for i, x in enumerate(e):
        if x:
            m |= 1 << i
    return m


class _Elem:
    __slots__ = ("lm", "lm_deg", "mask", "tail", "index")

    def __init__(self, terms, index):
        # terms descending, monic
        self.lm = terms[0][0]
        self.lm_deg = sum(self.lm)
        self.mask = _mask(self.lm)
        self.tail = terms[1:]
        self.index = index


def _poly_terms(p: Polynomial) -> list:
    return list(p.terms)


def _monic_terms(terms, field):
    inv = field.inv(terms[0][1])
    if inv == field.one:
        return list(terms)
    mul = field.mul
    return [(e, mul(c, inv)) for e, c in terms]


def _reduce_terms(terms, reducers, field):
    """Full normal form of a term list modulo monic reducers.

    Returns the remainder as a descending term list. reducers must be sorted
    in the order divisor search should try them (ascending lm degree).
    """
    prime = field.char if field.char else None
    acc: dict = {}
    heap: list = []
    if prime:
        for e, c in terms:
            prev = acc.get(e)
            if prev is None:
                acc[e] = c % prime
                heappush(heap, (_nkey(e), e))
            else:
                acc[e] = (prev + c) % prime
    else:
        for e, c in terms:
            prev = acc.get(e)
            if prev is None:
                acc[e] = c
                heappush(heap, (_nkey(e), e))
            else:
                acc[e] = prev + c
    out = []
    while heap:
        _, e = heappop(heap)
        c = acc.pop(e, None)
        if not c:
            continue
        emask = _mask(e)
        red = None
        for g in reducers:
            if g.mask & ~emask:
                continue
            lm = g.lm
            ok = True
            for a, b in zip(lm, e):
                if a > b:
                    ok = False
                    break
            if ok:
                red = g
                break
        if red is None:
            out.append((e, c))
            continue
        shift = tuple(x - y for x, y in zip(e, red.lm))
        if prime:
            for te, tc in red.tail:
                ne = tuple(x + y for x, y in zip(te, shift))
                prev = acc.get(ne)
                if prev is None:
                    acc[ne] = -c * tc % prime
                    heappush(heap, (_nkey(ne), ne))
                else:
                    acc[ne] = (prev - c * tc) % prime
        else:
            for te, tc in red.tail:
                ne = tuple(x + y for x, y in zip(te, shift))
                prev = acc.get(ne)
                if prev is None:
                    acc[ne] = -c * tc
                    heappush(heap, (_nkey(ne), ne))
                else:
                    nc = prev - c * tc
                    if nc:
                        acc[ne] = nc
                    else:
                        del acc[ne]
    return out


def _spoly_terms(f: _Elem, g: _Elem, field):
    lcm = mono_lcm(f.lm, g.lm)
    sf = mono_div(lcm, f.lm)
    sg = mono_div(lcm, g.lm)
    neg = field.neg
    terms = [(mono_mul(f.lm, sf), field.one)]
    terms += [(mono_mul(e, sf), c) for e, c in f.tail]
    terms.append((mono_mul(g.lm, sg), neg(field.one)))
    terms += [(mono_mul(e, sg), neg(c)) for e, c in g.tail]
    return terms


def _insert_reducer(reducers, elem):
    key = (elem.lm_deg, _nkey(elem.lm))
    lo, hi = 0, len(reducers)
    while lo < hi:
        mid = (lo + hi) // 2
        if (reducers[mid].lm_deg, _nkey(reducers[mid].lm)) <= key:
            lo = mid + 1
        else:
            hi = mid
    reducers.insert(lo, elem)


def buchberger(
    ideal: Ideal,
    limits: EngineLimits | None = None,
    use_criteria: bool = True,
) -> GroebnerBasis:
    """Reduced degrevlex Groebner basis of the ideal."""
    limits = limits or DEFAULT_LIMITS
    field = ideal.field
    start = time.monotonic()

    basis: list[_Elem] = []
    reducers: list[_Elem] = []
    heap: list = []  # (lcm_deg, lcm, i, j)
    live: set = set()
    pairs_processed = 0
    zero_reductions = 0
    max_degree_processed = 0

    def check_caps(stage: str):
        if pairs_processed > limits.max_pairs:
            raise ResourceCapError(stage, f"pair limit {limits.max_pairs} hit")
        if len(basis) > limits.max_basis:
            raise ResourceCapError(stage, f"basis size limit {limits.max_basis} hit")
        if limits.time_limit is not None and time.monotonic() - start > limits.time_limit:
            raise ResourceCapError(stage, f"time limit {limits.time_limit}s hit")

    def add_element(terms):
        """Gebauer-Moeller update with the new monic element."""
        elem = _Elem(terms, len(basis))
        t = elem.index
        if use_criteria:
            cand = []
            for g in basis:
                lcm = mono_lcm(elem.lm, g.lm)
                cand.append((sum(lcm), lcm, g.index))
            cand.sort()
            kept: list = []
            dropped = [False] * len(cand)
            for a, (deg_a, lcm_a, ia) in enumerate(cand):
                drop = False
                for b, (deg_b, lcm_b, ib) in enumerate(cand):
                    if a == b or dropped[b]:
                        continue
                    if deg_b > deg_a:
                        break  # sorted; no divisor beyond this point
                    if mono_divides(lcm_b, lcm_a):
                        if lcm_b == lcm_a and b > a:
                            continue  # equal lcm: the earlier entry yields
                        drop = True
                        break
                dropped[a] = drop
                if not drop:
                    kept.append((deg_a, lcm_a, ia))
            for deg_l, lcm, i in kept:
                g = basis[i]
                if mono_mul(elem.lm, g.lm) == lcm:
                    continue  # product criterion: coprime leading monomials
                live.add((i, t))
                heappush(heap, (deg_l, lcm, i, t))
            # chain criterion against pending old pairs
            for (i, j) in list(live):
                if j == t:
                    continue
                gi, gj = basis[i], basis[j]
                lcm_ij = mono_lcm(gi.lm, gj.lm)
                if (
                    mono_divides(elem.lm, lcm_ij)
                    and mono_lcm(gi.lm, elem.lm) != lcm_ij
                    and mono_lcm(gj.lm, elem.lm) != lcm_ij
                ):
                    live.discard((i, j))
        else:
            for g in basis:
                lcm = mono_lcm(elem.lm, g.lm)
                live.add((g.index, t))
                heappush(heap, (sum(lcm), lcm, g.index, t))
        basis.append(elem)
        _insert_reducer(reducers, elem)

    # seed with the reduced nonzero generators
    for g in ideal.generators:
        if g.is_zero():
            continue
        red = _reduce_terms(_poly_terms(g), reducers, field)
        if red:
            add_element(_monic_terms(red, field))

    while heap:
        deg_l, lcm, i, j = heappop(heap)
        if (i, j) not in live:
            continue
        live.discard((i, j))
        pairs_processed += 1
        if deg_l > max_degree_processed:
            max_degree_processed = deg_l
        if limits.max_degree is not None and deg_l > limits.max_degree:
            raise ResourceCapError("pair processing", f"degree limit {limits.max_degree} hit at {deg_l}")
        check_caps("pair processing")
        spoly = _spoly_terms(basis[i], basis[j], field)
        red = _reduce_terms(spoly, reducers, field)
        if red:
            add_element(_monic_terms(red, field))
        else:
            zero_reductions += 1

    # minimalize: keep only elements whose lm no other kept lm divides
    order = sorted(basis, key=lambda g: (g.lm_deg, _nkey(g.lm)))
    kept: list[_Elem] = []
    for g in order:
        if any(mono_divides(k.lm, g.lm) for k in kept):
            continue
        kept.append(g)
    # inter-reduce tails
    final_terms = []
    for g in kept:
        others = [k for k in kept if k is not g]
        terms = [(g.lm, field.one)] + list(g.tail)
        red = _reduce_terms(terms, sorted(others, key=lambda k: (k.lm_deg, _nkey(k.lm))), field)
        final_terms.append(_monic_terms(red, field))
    final_terms.sort(key=lambda ts: mono_key(ts[0][0]))
    polys = tuple(Polynomial(ideal.vars, field, tuple(ts)) for ts in final_terms)
    stats = GroebnerStats(
        pairs_processed=pairs_processed,
        zero_reductions=zero_reductions,
        basis_size=len(polys),
        max_degree_processed=max_degree_processed,
        wall_time=time.monotonic() - start,
    )
    result = GroebnerBasis(ideal.vars, field, polys, stats)
    if VERIFY_BASES and polys:
        failure = groebner_failure_witness(result)
        if failure is not None:
            raise AssertionError(f"S-pair re-verification failed: {failure}")
    return result


def normal_form(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    """Unique remainder of p modulo the reduced basis."""
    if p.vars != gb.vars or p.field != gb.field:
        raise FieldMismatchError("polynomial and basis must share one ring")
    if p.is_zero() or not gb.polys:
        return p
    elems = [_Elem(list(g.terms), i) for i, g in enumerate(gb.polys)]
    elems.sort(key=lambda g: (g.lm_deg, _nkey(g.lm)))
    red = _reduce_terms(list(p.terms), elems, gb.field)
    return Polynomial(p.vars, p.field, tuple(red))


def contains(p: Polynomial, gb: GroebnerBasis) -> bool:
    return normal_form(p, gb).is_zero()


# -- independent verification ------------------------------------------------


def naive_normal_form(p: Polynomial, basis) -> Polynomial:
    """Textbook division: scan a dict for its max monomial, divide, repeat.

    Shares no code with the engine reducer; used to re-verify bases.
    """
    field = p.field
    zero = field.zero
    work = dict(p.terms)
    remainder: dict = {}
    heads = [(g.leading_monomial(), g.leading_coefficient(), list(g.terms)[1:]) for g in basis if not g.is_zero()]
    while work:
        e = max(work, key=mono_key)
        c = work.pop(e)
        if c == zero:
            continue
        hit = None
        for lm, lc, tail in heads:
            if mono_divides(lm, e):
                hit = (lm, lc, tail)
                break
        if hit is None:
            remainder[e] = c
            continue
        lm, lc, tail = hit
        factor = field.div(c, lc)
        shift = mono_div(e, lm)
        for te, tc in tail:
            ne = mono_mul(te, shift)
            val = field.sub(work.get(ne, zero), field.mul(factor, tc))
            if val == zero:
                work.pop(ne, None)
            else:
                work[ne] = val
    return Polynomial.from_dict(p.vars, p.field, remainder)


def groebner_failure_witness(gb: GroebnerBasis):
    """None if every S-polynomial reduces to zero; else a witness pair."""
    polys = gb.polys
    field = gb.field
    for a, b in combinations(range(len(polys)), 2):
        f, g = polys[a], polys[b]
        lf, lg = f.leading_monomial(), g.leading_monomial()
        lcm = mono_lcm(lf, lg)
        mf = Polynomial.from_dict(gb.vars, field, {mono_div(lcm, lf): field.div(field.one, f.leading_coefficient())})
        mg = Polynomial.from_dict(gb.vars, field, {mono_div(lcm, lg): field.div(field.one, g.leading_coefficient())})
        s = mf * f - mg * g
        if not naive_normal_form(s, polys).is_zero():
            return (a, b)
    return None


def is_groebner_basis(gb: GroebnerBasis) -> bool:
    return groebner_failure_witness(gb) is None


# -- dimension ----------------------------------------------------------------


def staircase_dimension(lead_monomials, n: int) -> int:
    """Affine Krull dimension from the leading-monomial staircase.

    dim = size of the largest variable subset S such that no leading monomial
    is supported entirely inside S; -1 when 1 is among the leading monomials.
    """
    masks = set()
    for e in lead_monomials:
        if sum(e) == 0:
            return -1
        masks.add(_mask(e))
    if not masks:
        return n
    # a subset-minimal mask makes any superset mask redundant
    minimal = [m for m in masks if not any(o != m and o & m == o for o in masks)]
    for size in range(n, -1, -1):
        for subset in combinations(range(n), size):
            smask = 0
            for i in subset:
                smask |= 1 << i
            if all(m & ~smask for m in minimal):
                return size
    return 0


def dimension(ideal_or_basis, limits: EngineLimits | None = None) -> int:
    """Dimension of the affine variety; -1 for the empty variety."""
    gb = ideal_or_basis
    if isinstance(gb, Ideal):
        gb = buchberger(gb, limits=limits)
    return staircase_dimension(gb.leading_monomials(), len(gb.vars))
