"""Exhaustive search for determinantal expressions over small prime fields.

Canonical family: every size-m expression of f can be written, after the
left/right action of constant invertible matrices, as J_r + Z with J_r the
canonical rank-r constant part (ones on the trailing diagonal), Z a matrix of
homogeneous linear forms, and det(J_r + Z) = c * f for a nonzero scalar c
absorbed by rescaling the first row. Enumerating (r, Z) over all coefficient
tuples therefore covers the whole space, so an exhausted run is a proof of
nonexistence over that field, and every hit is rescaled into an exact
witness. Ranks below m - mindeg(f) are skipped outright: the graded parts of
det(J_r + Z) live in degrees [m - r, m], so such ranks cannot reach f.

The inner loop runs on raw coefficient dicts, not Polynomial objects; the
upper-left all-linear block is enumerated first and its determinant (the
lowest graded part of the full determinant) is checked against f before the
remaining entries are touched.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from itertools import product

from .fields import Field, PrimeField
from .matmap import AffineMatrixMap, verify_expression
from .poly import Polynomial

DEFAULT_CANDIDATE_CAP = 1 << 30


class EnumerationCapError(ValueError):
    """The projected candidate count exceeds the configured cap."""

    def __init__(self, estimate: int, cap: int, detail: str = ""):
        msg = f"estimated {estimate} candidates exceeds cap {cap}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.estimate = estimate
        self.cap = cap


def rank_order(m: int) -> list:
    """Constant-part ranks, r = m-1 first (the only viable rank for
    high-codimension homogeneous targets), then m, then downward."""
    order = [m - 1, m] if m >= 1 else []
    order += list(range(m - 2, -1, -1))
    return order


@dataclass(frozen=True)
class SearchSpec:
    target: Polynomial
    size: int
    max_candidates: int = DEFAULT_CANDIDATE_CAP

    def __post_init__(self):
        if not isinstance(self.target.field, PrimeField):
            raise ValueError("search runs over prime fields only")
        if self.size < 1:
            raise ValueError("size must be at least 1")
        est = self.estimate()
        if est > self.max_candidates:
            raise EnumerationCapError(
                est, self.max_candidates,
                f"size {self.size}, {len(self.target.vars)} variables over F_{self.target.field.char}",
            )

    def viable_ranks(self) -> list:
        m = self.size
        if self.target.is_zero():
            return rank_order(m)
        min_deg = min(sum(e) for e, _ in self.target.terms)
        return [r for r in rank_order(m) if r >= m - min_deg]

    def estimate(self) -> int:
        p = self.target.field.char
        n = len(self.target.vars)
        per_rank = p ** (self.size * self.size * n)
        return per_rank * max(1, len(self.viable_ranks()))


@dataclass
class SearchReport:
    spec: SearchSpec
    found: list = dc_field(default_factory=list)
    blocks_pruned: int = 0
    full_evaluations: int = 0
    ranks_searched: tuple = ()
    exhausted: bool = False

    def to_json(self) -> dict:
        return {
            "size": self.spec.size,
            "field": {"Fp": self.spec.target.field.char},
            "target": str(self.spec.target),
            "found_count": len(self.found),
            "blocks_pruned": self.blocks_pruned,
            "full_evaluations": self.full_evaluations,
            "ranks_searched": list(self.ranks_searched),
            "exhausted": self.exhausted,
        }


# -- raw-dict polynomial arithmetic (exponent tuple -> int coefficient) ---------


def _dict_mul(a: dict, b: dict, p: int) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            key = tuple(x + y for x, y in zip(ea, eb))
            val = (out.get(key, 0) + ca * cb) % p
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    return out


def _dict_det(grid, p: int) -> dict:
    """First-row Laplace expansion over dict entries; grid is small."""
    m = len(grid)
    if m == 1:
        return dict(grid[0][0])
    out: dict = {}
    for j in range(m):
        entry = grid[0][j]
        if not entry:
            continue
        minor = [[row[k] for k in range(m) if k != j] for row in grid[1:]]
        sub = _dict_det(minor, p)
        sign = -1 if j % 2 else 1
        for e, c in _dict_mul(entry, sub, p).items():
            val = (out.get(e, 0) + sign * c) % p
            if val:
                out[e] = val
            else:
                out.pop(e, None)
    return out


def _proportional(det: dict, target: dict, pin, lead_key, p: int):
    """Scalar c with det == c*target (c != 0), honoring a pinned value.

    Returns the scalar, or None when no nonzero scalar works. A pin of None
    means the scalar is still free.
    """
    if not target:
        return None  # caller handles the zero target separately
    if pin is None:
        c = det.get(lead_key)
        if not c:
            return None
    else:
        c = pin
    if len(det) != len(target):
        return None
    for e, coeff in target.items():
        if det.get(e, 0) != coeff * c % p:
            return None
    return c


def _poly_to_dict(f: Polynomial) -> dict:
    return {e: c for e, c in f.terms}


def _tuple_to_dict(coeffs, n: int) -> dict:
    out = {}
    for i, c in enumerate(coeffs):
        if c:
            e = tuple(1 if k == i else 0 for k in range(n))
            out[e] = c
    return out


def _search_rank(spec: SearchSpec, r: int, report: SearchReport):
    """Yield (grid_of_dicts, scalar) hits for one constant-part rank."""
    f = spec.target
    p = f.field.char
    n = len(f.vars)
    m = spec.size
    zero_e = (0,) * n

    target = _poly_to_dict(f)
    lead_key = f.terms[0][0] if f.terms else None
    block = m - r  # side of the all-linear upper-left block
    low_part = {e: c for e, c in target.items() if sum(e) == block} if target else {}

    # coefficient tuples in odometer order, their dict forms precomputed
    tuples = list(product(range(p), repeat=n))
    dicts = [_tuple_to_dict(t, n) for t in tuples]
    P = len(tuples)

    ul_positions = [(i, j) for i in range(block) for j in range(block)]
    rest_positions = [
        (i, j) for i in range(m) for j in range(m) if not (i < block and j < block)
    ]

    base = [[None] * m for _ in range(m)]
    for i in range(block, m):
        base[i][i] = {zero_e: 1}  # the canonical ones of J_r

    for ul_choice in product(range(P), repeat=len(ul_positions)):
        grid = [row[:] for row in base]
        for (i, j), ix in zip(ul_positions, ul_choice):
            grid[i][j] = dicts[ix]
        pin = None
        if block > 0:
            det_ul = _dict_det([[grid[i][j] for j in range(block)] for i in range(block)], p)
            if not low_part:
                if det_ul:
                    report.blocks_pruned += 1
                    continue
            else:
                pin = _proportional(det_ul, low_part, None, min(low_part), p)
                if pin is None:
                    report.blocks_pruned += 1
                    continue
        else:
            # rank m: the degree-0 part of the determinant is det(J_m) = 1
            const = target.get(zero_e, 0)
            if not const:
                return  # 1 = c*0 has no solution; the whole rank dies
            pin = pow(const, p - 2, p)

        for rest_choice in product(range(P), repeat=len(rest_positions)):
            for (i, j), ix in zip(rest_positions, rest_choice):
                d = dicts[ix]
                if i == j and j >= block:
                    d = dict(d)
                    d[zero_e] = 1
                grid[i][j] = d
            report.full_evaluations += 1
            det = _dict_det(grid, p)
            if not target:
                if not det:
                    yield [row[:] for row in grid], 1
                continue
            c = _proportional(det, target, pin, lead_key, p)
            if c is not None:
                yield [row[:] for row in grid], c


def _grid_to_map(grid, scalar, f: Polynomial) -> AffineMatrixMap:
    """Materialize a hit as an exact witness: row 0 is rescaled by 1/scalar."""
    field = f.field
    p = field.char
    inv = pow(scalar, p - 2, p)
    rows = []
    for i, row in enumerate(grid):
        out = []
        for d in row:
            if i == 0 and inv != 1:
                d = {e: c * inv % p for e, c in d.items()}
            out.append(Polynomial.from_dict(f.vars, field, d))
        rows.append(tuple(out))
    return AffineMatrixMap(f.vars, field, tuple(rows))


def search_expressions(spec: SearchSpec, report: SearchReport | None = None):
    """Stream exact witnesses in deterministic order; exhaustion proves
    nonexistence at this size over this field.

    Every yielded map re-verifies through the exact mode of
    verify_expression before it is surfaced.
    """
    f = spec.target
    own_report = report if report is not None else SearchReport(spec)
    if f.degree() > spec.size:
        # an m x m determinant of affine entries has degree at most m
        own_report.exhausted = True
        own_report.ranks_searched = ()
        return
    ranks = spec.viable_ranks()
    for r in ranks:
        for grid, scalar in _search_rank(spec, r, own_report):
            witness = _grid_to_map(grid, scalar, f)
            check = verify_expression(witness, f, mode="exact")
            if not check.ok:
                raise AssertionError("streamed candidate failed exact re-verification")
            own_report.found.append(witness)
            yield witness
    own_report.ranks_searched = tuple(ranks)
    own_report.exhausted = True


def search_report(spec: SearchSpec, max_found: int | None = None) -> SearchReport:
    """Run the search to completion (or until max_found hits) and summarize."""
    report = SearchReport(spec)
    for _ in search_expressions(spec, report):
        if max_found is not None and len(report.found) >= max_found:
            break
    return report


@dataclass(frozen=True)
class DcResult:
    poly: Polynomial
    value: int | None          # the exact determinantal complexity, if found
    m_max: int
    capped_at: int | None      # size at which the candidate cap refused to run
    evaluations: tuple         # (size, full_evaluations) pairs actually searched

    def render(self) -> str:
        if self.value is not None:
            return str(self.value)
        if self.capped_at is not None:
            return f"cap at m = {self.capped_at}"
        return f"> {self.m_max}"

    def to_json(self) -> dict:
        return {
            "target": str(self.poly),
            "field": {"Fp": self.poly.field.char},
            "value": self.value,
            "m_max": self.m_max,
            "capped_at": self.capped_at,
            "evaluations": [list(pair) for pair in self.evaluations],
        }


def dc_exact(f: Polynomial, m_max: int, max_candidates: int = DEFAULT_CANDIDATE_CAP) -> DcResult:
    """Smallest size admitting an expression of f, searching m = 1, 2, ..."""
    evaluations = []
    for m in range(1, m_max + 1):
        if f.degree() > m:
            evaluations.append((m, 0))  # degree bound: no enumeration needed
            continue
        try:
            spec = SearchSpec(f, m, max_candidates=max_candidates)
        except EnumerationCapError:
            return DcResult(f, None, m_max, m, tuple(evaluations))
        report = SearchReport(spec)
        for _ in search_expressions(spec, report):
            evaluations.append((m, report.full_evaluations))
            return DcResult(f, m, m_max, None, tuple(evaluations))
        evaluations.append((m, report.full_evaluations))
    return DcResult(f, None, m_max, None, tuple(evaluations))


def enumerate_all_expressions(f: Polynomial, m: int, cap: int = 1 << 22) -> int:
    """Count of ALL affine maps (unrestricted) whose determinant is exactly f.

    Exponential in m^2 (n+1); exists to validate that the canonical search
    loses nothing on tiny instances.
    """
    field = f.field
    p = field.char
    n = len(f.vars)
    total = p ** (m * m * (n + 1))
    if total > cap:
        raise EnumerationCapError(total, cap, "unrestricted enumeration")
    target = _poly_to_dict(f)
    zero_e = (0,) * n
    affine = []
    for coeffs in product(range(p), repeat=n + 1):
        d = _tuple_to_dict(coeffs[:n], n)
        if coeffs[n]:
            d[zero_e] = coeffs[n]
        affine.append(d)
    count = 0
    for choice in product(range(len(affine)), repeat=m * m):
        grid = [[affine[choice[i * m + j]] for j in range(m)] for i in range(m)]
        if _dict_det(grid, p) == target:
            count += 1
    return count
