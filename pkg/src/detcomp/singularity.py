"""Singular loci, codimension certificates, and expression analysis.

The pipeline: the Jacobian ideal of f cuts out Sing(f); its staircase
dimension gives codim(Sing(f)); when f is homogeneous of degree > 2 and that
codimension exceeds 4, every determinantal expression of f must have size at
least codim + 1, which certify_lower_bound packages as a checkable
certificate. analyze_expression walks the same argument on a concrete
expression: normalize the constant part, read off the forced vanishing of the
low graded parts, build the linear ideal from the first row and column, and
bound the singular locus through the isotropy of the associated linear map.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass

from .fields import Field, FieldMismatchError, field_tag
from .groebner import (
    EngineLimits,
    GroebnerStats,
    Ideal,
    buchberger,
    staircase_dimension,
)
from .linalg import mat_rank, rref
from .matmap import (
    AffineMatrixMap,
    NormalizedExpression,
    rank_and_normalize,
    symbolic_det,
    verify_expression,
)
from .poly import Polynomial

MIN_USEFUL_CODIM = 4  # the certificate only bites past this


def jacobian_ideal(f: Polynomial) -> Ideal:
    """Ideal of f together with all first-order partials.

    f is included unconditionally: when the characteristic divides deg f the
    Euler relation fails and the partials alone can cut out a larger locus.
    """
    gens = [f] + [f.partial_derivative(i) for i in range(len(f.vars))]
    return Ideal(f.vars, f.field, tuple(gens))


def codim_sing(f: Polynomial, limits: EngineLimits | None = None) -> int:
    """Codimension of Sing(f) in affine n-space; n + 1 when Sing(f) is empty."""
    n = len(f.vars)
    gb = buchberger(jacobian_ideal(f), limits=limits)
    dim = staircase_dimension(gb.leading_monomials(), n)
    return n + 1 if dim < 0 else n - dim


@dataclass(frozen=True)
class Certificate:
    """Lower-bound verdict for the determinantal complexity of f."""

    poly: Polynomial
    degree: int
    codim: int
    singular_locus_empty: bool
    bound: int | None           # dc(f) >= bound, when applicable
    reason: str | None          # populated exactly when bound is None
    field_name: str
    stats: GroebnerStats
    wall_time: float

    @property
    def applicable(self) -> bool:
        return self.bound is not None

    def input_hash(self) -> str:
        payload = f"{self.field_name}|{','.join(self.poly.vars.names)}|{self.poly}"
        return hashlib.sha256(payload.encode()).hexdigest()

    def to_json(self, deterministic: bool = False) -> dict:
        data = {
            "input_hash": self.input_hash(),
            "field": field_tag(self.poly.field),
            "vars": list(self.poly.vars.names),
            "poly": str(self.poly),
            "degree": self.degree,
            "codim": self.codim,
            "singular_locus_empty": self.singular_locus_empty,
            "basis_stats": {
                "pairs_processed": self.stats.pairs_processed,
                "zero_reductions": self.stats.zero_reductions,
                "basis_size": self.stats.basis_size,
                "max_degree_processed": self.stats.max_degree_processed,
            },
        }
        if self.bound is not None:
            data["bound"] = self.bound
            data["statement"] = f"dc(f) >= {self.bound}"
        else:
            data["verdict"] = "NotApplicable"
            data["reason"] = self.reason
        if not deterministic:
            data["wall_time"] = self.wall_time
        return data

    def render_text(self) -> str:
        lines = [
            f"input: {self.poly}",
            f"field: {self.field_name}",
            f"degree: {self.degree}",
            f"codim(Sing(f)): {'empty, reported as ' + str(self.codim) if self.singular_locus_empty else self.codim}",
        ]
        if self.bound is not None:
            lines.append(f"verdict: dc(f) >= {self.bound}")
            lines.append("basis: the singular-locus codimension exceeds 4, so every")
            lines.append("       determinantal expression has size >= codim + 1")
        else:
            lines.append(f"verdict: NotApplicable ({self.reason})")
        return "\n".join(lines)


def certify_lower_bound(f: Polynomial, limits: EngineLimits | None = None) -> Certificate:
    """dc(f) >= codim + 1 when f is homogeneous, deg f > 2, and codim > 4."""
    start = time.monotonic()
    n = len(f.vars)
    gb = buchberger(jacobian_ideal(f), limits=limits)
    dim = staircase_dimension(gb.leading_monomials(), n)
    empty = dim < 0
    codim = n + 1 if empty else n - dim
    degree = f.degree()
    deg_int = int(degree) if degree != float("-inf") else 0

    bound: int | None = None
    reason: str | None = None
    if not f.is_homogeneous():
        reason = "not homogeneous"
    elif f.is_zero() or deg_int <= 2:
        reason = f"degree {deg_int} <= 2"
    elif codim <= MIN_USEFUL_CODIM:
        reason = f"codim {codim} <= {MIN_USEFUL_CODIM}"
    else:
        bound = codim + 1

    return Certificate(
        poly=f,
        degree=deg_int,
        codim=codim,
        singular_locus_empty=empty,
        bound=bound,
        reason=reason,
        field_name=f.field.name,
        stats=gb.stats,
        wall_time=time.monotonic() - start,
    )


# -- linear-ideal membership ---------------------------------------------------


def linear_span_images(forms, vars, field):
    """Substitution images that rewrite each variable modulo the span of the
    given homogeneous linear forms: pivot variables are eliminated, free
    variables map to themselves. Reduction to zero is membership in the ideal
    the forms generate."""
    n = len(vars)
    rows = []
    for form in forms:
        if form.degree() > 1 or form.constant_term() != field.zero:
            raise ValueError("expected homogeneous linear forms")
        rows.append([form.coefficient(tuple(1 if j == i else 0 for j in range(n))) for i in range(n)])
    images = [Polynomial.variable(vars, field, i) for i in range(n)]
    if not rows:
        return images
    reduced, pivots = rref(field, rows)
    for row, piv in zip(reduced, pivots):
        # x_piv = -sum of the free-column tail of the row
        tail = {}
        for j in range(piv + 1, n):
            if row[j] != field.zero:
                tail[tuple(1 if k == j else 0 for k in range(n))] = field.neg(row[j])
        images[piv] = Polynomial.from_dict(vars, field, tail)
    return images


def in_linear_ideal(p: Polynomial, forms) -> bool:
    """Membership of p in the ideal generated by homogeneous linear forms."""
    images = linear_span_images(forms, p.vars, p.field)
    return p.substitute_affine(images).is_zero()


def in_linear_ideal_square(p: Polynomial, forms) -> bool:
    """Membership of p in the square of a linear-form ideal I.

    p lies in I^2 iff p and every partial derivative of p lie in I; this is
    characteristic-free.
    """
    images = linear_span_images(forms, p.vars, p.field)
    if not p.substitute_affine(images).is_zero():
        return False
    for i in range(len(p.vars)):
        if not p.partial_derivative(i).substitute_affine(images).is_zero():
            return False
    return True


# -- isotropy ------------------------------------------------------------------


def isotropic_dimension(vectors, field: Field):
    """(is_isotropic, dim) for the span of vectors under the hyperbolic form
    Q(w) = sum w_j * w_{h+j} on 2h coordinates.

    Isotropy of the span is checked through Q on a basis together with the
    bilinear form Q0(v, w) = Q(v + w) - Q(v) - Q(w), which stays valid in
    characteristic 2 where Q itself does not polarize.
    """
    vecs = [list(map(field.of, v)) for v in vectors]
    if not vecs:
        return True, 0
    width = len(vecs[0])
    if width % 2 != 0:
        raise ValueError(f"vector arity {width} is odd; expected 2(m-1) coordinates")
    for v in vecs:
        if len(v) != width:
            raise ValueError("inconsistent vector arities")
    half = width // 2

    def q(v):
        acc = field.zero
        for j in range(half):
            acc = field.add(acc, field.mul(v[j], v[half + j]))
        return acc

    def q0(v, w):
        s = [field.add(a, b) for a, b in zip(v, w)]
        return field.sub(field.sub(q(s), q(v)), q(w))

    reduced, pivots = rref(field, [list(v) for v in vecs])
    basis = reduced[: len(pivots)]
    dim = len(pivots)
    iso = all(q(b) == field.zero for b in basis) and all(
        q0(basis[i], basis[j]) == field.zero for i in range(dim) for j in range(i + 1, dim)
    )
    if iso and dim > half:
        raise RuntimeError("isotropic subspace larger than half the ambient dimension")
    return iso, dim


# -- Prop-style avoidance check -------------------------------------------------


@dataclass(frozen=True)
class AvoidanceReport:
    size: int
    rank_constant: int
    rank_constant_ok: bool       # rank L(0) == m - 1
    mode: str
    avoids: bool | None          # None when the probabilistic run found nothing but proves nothing
    witness_point: tuple | None  # point where rank L(x) <= m - 2
    trials: int
    codim: int | None            # codim Sing(f), for the precondition note
    precondition_holds: bool | None
    notes: tuple

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "rank_constant": self.rank_constant,
            "rank_constant_ok": self.rank_constant_ok,
            "mode": self.mode,
            "avoids": self.avoids,
            "witness_point": list(self.witness_point) if self.witness_point is not None else None,
            "trials": self.trials,
            "codim": self.codim,
            "precondition_holds": self.precondition_holds,
            "notes": list(self.notes),
        }


def _minor_map(mapping: AffineMatrixMap, skip_row: int, skip_col: int) -> AffineMatrixMap:
    rows = []
    for i, row in enumerate(mapping.entries):
        if i == skip_row:
            continue
        rows.append(tuple(p for j, p in enumerate(row) if j != skip_col))
    return AffineMatrixMap(mapping.vars, mapping.field, tuple(rows))


def check_avoids_singular_locus(
    mapping: AffineMatrixMap,
    f: Polynomial,
    mode: str = "exact",
    trials: int = 1000,
    seed: int = 0,
    limits: EngineLimits | None = None,
    compute_codim: bool = True,
) -> AvoidanceReport:
    """Does the image of the map avoid the rank <= m-2 locus?

    Exact mode decides emptiness of the variety of all (m-1)-minors of L(x)
    through basis triviality. Probabilistic mode samples points; a sampled
    point of rank <= m-2 is a definite negative, while a clean run is only
    evidence. A rank-(m-1) constant part is necessary whenever the avoidance
    holds and f has singular-locus codimension above 4; the report records
    both facts and lets the caller see when the precondition fails, because a
    small codimension makes a rank defect informational, not contradictory.
    """
    if mode not in ("exact", "probabilistic"):
        raise ValueError(f"unknown mode {mode!r}")
    report = verify_expression(mapping, f, mode=mode, trials=max(trials, 64), seed=seed + 1)
    if not report.ok:
        raise ValueError("the map is not a determinantal expression of f (verification failed)")

    m = mapping.size
    field = mapping.field
    rank0 = mat_rank(field, mapping.constant_part())
    notes = []
    codim = None
    precondition = None
    if compute_codim:
        codim = codim_sing(f, limits=limits)
        precondition = codim > MIN_USEFUL_CODIM
        if not precondition:
            notes.append(
                f"codim Sing(f) = {codim} <= {MIN_USEFUL_CODIM}: avoidance is not forced for this target,"
                " so any rank defect below is informational"
            )
    if rank0 != m - 1:
        notes.append(f"rank of the constant part is {rank0}, not m - 1 = {m - 1}")

    if mode == "exact":
        minors = []
        for i in range(m):
            for j in range(m):
                minors.append(symbolic_det(_minor_map(mapping, i, j), algorithm="auto"))
        minors = [p for p in minors if not p.is_zero()]
        if not minors:
            # every (m-1)-minor vanishes identically: rank <= m-2 everywhere
            return AvoidanceReport(m, rank0, rank0 == m - 1, mode, False, None, 0,
                                   codim, precondition, tuple(notes))
        gb = buchberger(Ideal(mapping.vars, field, tuple(minors)), limits=limits)
        avoids = gb.is_trivial()
        return AvoidanceReport(m, rank0, rank0 == m - 1, mode, avoids, None, 0,
                               codim, precondition, tuple(notes))

    rng = random.Random(seed)
    n = len(mapping.vars)
    sample_width = max(128, 4 * m)
    for _ in range(trials):
        point = [field.sample(rng, sample_width) for _ in range(n)]
        if mat_rank(field, mapping.evaluate(point)) <= m - 2:
            return AvoidanceReport(m, rank0, rank0 == m - 1, mode, False, tuple(point), trials,
                                   codim, precondition, tuple(notes))
    notes.append(f"no rank defect in {trials} samples; not a proof of avoidance")
    return AvoidanceReport(m, rank0, rank0 == m - 1, mode, None, None, trials,
                           codim, precondition, tuple(notes))


# -- the proof trace on a concrete expression -----------------------------------


@dataclass(frozen=True)
class AnalysisReport:
    size: int
    degree: int
    rank: int
    scalar: object
    normalization: NormalizedExpression
    branch: str  # "corank_one" (r = m-1) or "lower_rank"
    # corank-one fields
    z11_zero: bool | None = None
    quadric_relation_zero: bool | None = None
    ideal_generators: tuple = ()
    jacobian_in_ideal: bool | None = None
    f_in_ideal_square: bool | None = None
    dim_image: int | None = None
    image_isotropic: bool | None = None
    dim_bound_ok: bool | None = None
    codim_upper_bound: int | None = None
    # lower-rank fields
    graded_parts: tuple = ()          # ((degree, polynomial), ...) of det(J+Z)
    possible_degree_window: tuple | None = None  # (m - r, m)
    forced_vanishing_degrees: tuple = ()
    window_consistent: bool | None = None

    def all_proof_checks_pass(self) -> bool:
        if self.branch != "corank_one":
            return False
        return bool(
            self.z11_zero
            and self.quadric_relation_zero
            and self.jacobian_in_ideal
            and self.f_in_ideal_square
            and self.image_isotropic
            and self.dim_bound_ok
        )

    def to_json(self) -> dict:
        data = {
            "size": self.size,
            "degree": self.degree,
            "rank": self.rank,
            "scalar": str(self.scalar),
            "branch": self.branch,
        }
        if self.branch == "corank_one":
            data.update(
                {
                    "z11_zero": self.z11_zero,
                    "quadric_relation_zero": self.quadric_relation_zero,
                    "ideal_generators": [str(p) for p in self.ideal_generators],
                    "jacobian_in_ideal": self.jacobian_in_ideal,
                    "f_in_ideal_square": self.f_in_ideal_square,
                    "dim_image": self.dim_image,
                    "image_isotropic": self.image_isotropic,
                    "dim_bound_ok": self.dim_bound_ok,
                    "codim_upper_bound": self.codim_upper_bound,
                    "all_proof_checks_pass": self.all_proof_checks_pass(),
                }
            )
        else:
            data.update(
                {
                    "graded_parts": {str(d): str(p) for d, p in self.graded_parts},
                    "possible_degree_window": list(self.possible_degree_window),
                    "forced_vanishing_degrees": list(self.forced_vanishing_degrees),
                    "window_consistent": self.window_consistent,
                }
            )
        return data

    def render_text(self) -> str:
        lines = [
            f"size {self.size} expression of a degree-{self.degree} form,"
            f" constant part rank {self.rank} (scalar {self.scalar})",
        ]
        if self.branch == "corank_one":
            lines += [
                "corank-one branch:",
                f"  Z(1,1) vanishes: {self.z11_zero}",
                f"  sum Z(1,j)Z(j,1) vanishes: {self.quadric_relation_zero}",
                f"  first row/column span {len(self.ideal_generators)} linear form(s)",
                f"  Jacobian contained in that linear ideal: {self.jacobian_in_ideal}",
                f"  f contained in the ideal squared: {self.f_in_ideal_square}",
                f"  image dimension {self.dim_image}, isotropic: {self.image_isotropic},"
                f" within m-1: {self.dim_bound_ok}",
                f"  resulting codim upper bound: {self.codim_upper_bound}",
                f"  all proof checks pass: {self.all_proof_checks_pass()}",
            ]
        else:
            window = self.possible_degree_window
            lines += [
                "lower-rank branch:",
                f"  graded parts of det at degrees {[d for d, _ in self.graded_parts]}",
                f"  admissible degree window [{window[0]}, {window[1]}]",
                f"  degrees forced to vanish: {list(self.forced_vanishing_degrees)}",
                f"  window consistent with the target: {self.window_consistent}",
            ]
        return "\n".join(lines)


def analyze_expression(mapping: AffineMatrixMap, f: Polynomial) -> AnalysisReport:
    """Trace the corank-one argument on an exact expression of homogeneous f.

    After normalizing the constant part to the canonical rank-r matrix, the
    corank-one case (r = m-1) checks each step: the (1,1) entry of Z
    vanishes, the first row and column satisfy the quadric relation, the
    Jacobian of f lies in the linear ideal I they generate, f lies in I^2,
    and the image of x -> (Z_12..Z_1m, Z_21..Z_m1) is an isotropic subspace of
    dimension at most m-1, which caps codim Sing(f). Lower ranks get the
    graded-part report instead: which degrees of det(J+Z) may be nonzero and
    which homogeneity forces to vanish.
    """
    report = verify_expression(mapping, f, mode="exact")
    if not report.ok:
        raise ValueError("not an exact determinantal expression of f")
    if not f.is_homogeneous() or f.is_zero() or f.degree() <= 2:
        raise ValueError("analysis requires a homogeneous target of degree > 2")

    m = mapping.size
    d = int(f.degree())
    norm = rank_and_normalize(mapping)
    r = norm.rank
    field = mapping.field

    if r == m - 1:
        z = [[norm.linear_entry(i, j) for j in range(m)] for i in range(m)]
        z11_zero = z[0][0].is_zero()
        quad = Polynomial.zero(mapping.vars, field)
        for j in range(1, m):
            quad = quad + z[0][j] * z[j][0]
        forms = [z[0][j] for j in range(m)] + [z[i][0] for i in range(1, m)]
        forms = [p for p in forms if not p.is_zero()]
        jac_in = all(in_linear_ideal(f.partial_derivative(i), forms) for i in range(len(f.vars)))
        f_in_sq = in_linear_ideal_square(f, forms)
        n = len(mapping.vars)
        cols = []
        for k in range(n):
            e = tuple(1 if t == k else 0 for t in range(n))
            col = [z[0][j].coefficient(e) for j in range(1, m)]
            col += [z[i][0].coefficient(e) for i in range(1, m)]
            cols.append(col)
        iso, dim_im = isotropic_dimension(cols, field)
        return AnalysisReport(
            size=m,
            degree=d,
            rank=r,
            scalar=norm.scalar,
            normalization=norm,
            branch="corank_one",
            z11_zero=z11_zero,
            quadric_relation_zero=quad.is_zero(),
            ideal_generators=tuple(forms),
            jacobian_in_ideal=jac_in,
            f_in_ideal_square=f_in_sq,
            dim_image=dim_im,
            image_isotropic=iso,
            dim_bound_ok=dim_im <= m - 1,
            codim_upper_bound=dim_im,
        )

    det = symbolic_det(norm.normalized, algorithm="auto")
    parts = tuple(sorted((deg, p) for deg, p in det.graded_parts().items()))
    window = (max(0, m - r), m)
    forced = tuple(k for k in range(window[0], window[1] + 1) if k != d)
    return AnalysisReport(
        size=m,
        degree=d,
        rank=r,
        scalar=norm.scalar,
        normalization=norm,
        branch="lower_rank",
        graded_parts=parts,
        possible_degree_window=window,
        forced_vanishing_degrees=forced,
        window_consistent=window[0] <= d <= window[1],
    )
