"""The coefficient constraint system for multiaffine maps that send the
standard direction family (all axes plus the main diagonal) onto lines.

For a map on n variables the conditions are, per output coordinate:

  * u_delta = 0 whenever 2|delta| >= n+2, and
  * sum over {|delta| = k, delta >= S} of u_delta = 0 for every degree k with
    2 <= k and 2k < n+2 and every index set S with |S| <= k-2.

This module builds the system exactly over the rationals, checks maps against
it, explores its nullspace (including the maximal-degree injective "sharp"
constructions in even dimension), and ships the small canonical examples in
dimension 3 together with the fifth-direction refutation showing four
directions are not enough to force affinity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from random import Random
from typing import Dict, List, Optional, Sequence, Tuple

from .exact import (
    Field, InputError, InternalInconsistencyError, Matrix, QQ, Scalar,
    Vector, nullspace, rref, vector, zero_vector,
)
from .multiaffine import (
    MultiAffineMap, UnivariateCurve, curve_lies_in_line, grid_points,
    mask_to_delta, restrict_to_line,
)

RowLabel = Tuple  # ("vanish", mask) or ("sum", k, sorted index tuple)


# ===========================================================================
# system construction
# ===========================================================================

def _ordered_masks(n: int) -> Tuple[int, ...]:
    """All 2^n masks, descending-lexicographic in the (d_1,...,d_n) tuples,
    so the high-degree unknowns that must vanish come first."""
    return tuple(sorted(range(1 << n), key=lambda m: mask_to_delta(m, n), reverse=True))


@dataclass(frozen=True)
class ConstraintSystem:
    n: int
    unknowns: Tuple[int, ...]        # masks, in column order
    rows: Matrix                     # over QQ, one row per condition
    labels: Tuple[RowLabel, ...]     # what each row encodes

    def column_of(self, mask: int) -> int:
        return self.unknowns.index(mask)

    def solution_dimension(self) -> int:
        return len(self.unknowns) - rref(self.rows).rank

    def to_json(self) -> dict:
        return {
            "unknowns": [list(mask_to_delta(m, self.n)) for m in self.unknowns],
            "rows": [[QQ.to_json(c) for c in row] for row in self.rows.rows],
        }


@lru_cache(maxsize=None)
def build_constraints(n: int) -> ConstraintSystem:
    if n < 2:
        raise InputError("constraint system needs n >= 2")
    unknowns = _ordered_masks(n)
    col = {m: i for i, m in enumerate(unknowns)}
    rows: List[Vector] = []
    labels: List[RowLabel] = []

    def blank() -> List[Scalar]:
        return [Fraction(0)] * len(unknowns)

    # vanishing conditions: u_delta = 0 for 2|delta| >= n+2
    for mask in unknowns:
        if 2 * mask.bit_count() >= n + 2:
            row = blank()
            row[col[mask]] = Fraction(1)
            rows.append(tuple(row))
            labels.append(("vanish", mask))

    # zero-sum conditions: for 2 <= k < (n+2)/2 and |S| <= k-2
    for k in range(2, n + 1):
        if 2 * k >= n + 2:
            break
        for l in range(0, k - 1):
            for subset in itertools.combinations(range(n), l):
                row = blank()
                s_mask = 0
                for i in subset:
                    s_mask |= 1 << i
                for mask in unknowns:
                    if mask.bit_count() == k and (mask & s_mask) == s_mask:
                        row[col[mask]] = Fraction(1)
                rows.append(tuple(row))
                labels.append(("sum", k, subset))

    return ConstraintSystem(n, unknowns, Matrix(QQ, tuple(rows)), tuple(labels))


# ===========================================================================
# checking maps against the system
# ===========================================================================

@dataclass(frozen=True)
class ConstraintCheck:
    ok: bool
    row_index: Optional[int] = None
    label: Optional[RowLabel] = None
    coordinate: Optional[int] = None

    def __bool__(self) -> bool:
        return self.ok


def satisfies_constraints(map_: MultiAffineMap) -> ConstraintCheck:
    """Does every output coordinate of the map satisfy every condition row?
    Reports the first violated row (and the coordinate it fails in)."""
    system = build_constraints(map_.n)
    F = map_.field
    for ri, row in enumerate(system.rows.rows):
        tally = list(zero_vector(F, map_.m))
        for ci, coeff in enumerate(row):
            if coeff == 0:
                continue
            u = map_.coeffs.get(system.unknowns[ci])
            if u is None:
                continue
            c = F.convert(coeff)
            for j in range(map_.m):
                tally[j] = F.add(tally[j], F.mul(c, u[j]))
        for j in range(map_.m):
            if not F.is_zero(tally[j]):
                return ConstraintCheck(False, ri, system.labels[ri], j)
    return ConstraintCheck(True)


# ===========================================================================
# the standard family check (converse direction)
# ===========================================================================

@dataclass(frozen=True)
class LineDegreeViolation:
    direction: Tuple
    base: Optional[Tuple]      # grid point over Z_p; None for a symbolic base
    degree: int


@dataclass(frozen=True)
class StandardFamilyReport:
    ok: bool
    directions_checked: int
    violations: Tuple[LineDegreeViolation, ...]

    def to_json(self) -> dict:
        return {"ok": self.ok,
                "directions_checked": self.directions_checked,
                "violations": [{"direction": [str(c) for c in v.direction],
                                "base": None if v.base is None else list(v.base),
                                "degree": v.degree} for v in self.violations]}


def _standard_directions(field: Field, n: int) -> List[Vector]:
    one, zero = field.one(), field.zero()
    dirs = [tuple(one if j == i else zero for j in range(n)) for i in range(n)]
    dirs.append(tuple(one for _ in range(n)))
    return dirs


def _symbolic_excess_degree(map_: MultiAffineMap, b: Vector) -> int:
    """Largest k >= 2 for which the t^k coefficient of F(w + t b) is a nonzero
    polynomial in the (symbolic) base point w; 0 if none.

    The t^k coefficient at the w-monomial T is
        sum over {delta >= T, |delta| = |T| + k} of u_delta * prod_{i in
        delta minus T} b_i,
    and a multiaffine polynomial vanishes identically over an infinite field
    iff all these coefficients vanish.
    """
    F = map_.field
    totals: Dict[Tuple[int, int], List[Scalar]] = {}
    for mask, u in map_.coeffs.items():
        size = mask.bit_count()
        if size < 2:
            continue
        # distribute mask's variables between the base monomial T and t-powers
        bits = [i for i in range(map_.n) if mask >> i & 1]
        for r in range(2, size + 1):         # r = number of t factors
            for chosen in itertools.combinations(bits, r):
                coeff = F.one()
                for i in chosen:
                    coeff = F.mul(coeff, b[i])
                if F.is_zero(coeff):
                    continue
                t_mask = 0
                for i in chosen:
                    t_mask |= 1 << i
                acc = totals.setdefault((mask ^ t_mask, r),
                                        list(zero_vector(F, map_.m)))
                for j in range(map_.m):
                    acc[j] = F.add(acc[j], F.mul(coeff, u[j]))
    worst = 0
    for (_t_mono, r), acc in totals.items():
        if any(not F.is_zero(c) for c in acc):
            worst = max(worst, r)
    return worst


def check_standard_family(map_: MultiAffineMap) -> StandardFamilyReport:
    """For a map satisfying the constraint system, confirm that every line
    parallel to an axis or to the main diagonal is carried with degree <= 1.

    Over Z_p every line is expanded from every base point of a transversal
    (exhaustive); over the rationals the base point is left symbolic, so the
    conclusion has no sampling gap.
    """
    if not satisfies_constraints(map_).ok:
        raise InputError("map does not satisfy the constraint system")
    F = map_.field
    violations: List[LineDegreeViolation] = []
    dirs = _standard_directions(F, map_.n)
    if F.kind == "rational":
        for b in dirs:
            excess = _symbolic_excess_degree(map_, b)
            if excess >= 2:
                violations.append(LineDegreeViolation(b, None, excess))
    else:
        from .collineations import enumerate_lines
        p = F.p
        for b in dirs:
            for line in enumerate_lines(p, map_.n, b):
                curve = restrict_to_line(map_, line[0], b)
                if curve.degree > 1:
                    violations.append(
                        LineDegreeViolation(b, line[0], curve.degree))
    return StandardFamilyReport(not violations, len(dirs), tuple(violations))


# ===========================================================================
# sharpness: maximal-degree injective examples in even dimension
# ===========================================================================

@dataclass(frozen=True)
class SharpMapSpec:
    dim: int
    alphas: Dict[int, Scalar]     # mask -> coefficient of the top perturbation
    map: MultiAffineMap


def construct_sharp_map(dim: int) -> SharpMapSpec:
    """An injective map of (Q)^dim with degree dim/2 passing all conditions.

    The perturbation lives on degree-(dim/2) monomials avoiding the last
    variable, so the map is triangular (the last output is x_dim plus terms
    free of x_dim) and hence injective over every field.  The coefficients
    solve the zero-sum conditions for every (dim/2 - 2)-subset; the first
    canonical nullspace vector is chosen, deterministically.
    """
    if dim < 4 or dim % 2:
        raise InputError("sharp construction needs an even dimension >= 4")
    k = dim // 2
    last_bit = 1 << (dim - 1)
    unknowns = [m for m in _ordered_masks(dim)
                if m.bit_count() == k and not m & last_bit]
    col = {m: i for i, m in enumerate(unknowns)}
    rows: List[Vector] = []
    for subset in itertools.combinations(range(dim), k - 2):
        row = [Fraction(0)] * len(unknowns)
        s_mask = 0
        for i in subset:
            s_mask |= 1 << i
        for m in unknowns:
            if (m & s_mask) == s_mask:
                row[col[m]] = Fraction(1)
        rows.append(tuple(row))
    basis = nullspace(Matrix(QQ, tuple(rows)))
    if not basis:
        raise InternalInconsistencyError(
            "restricted zero-sum system unexpectedly has a trivial kernel")
    alpha_vec = basis[0]
    alphas = {m: alpha_vec[col[m]] for m in unknowns if alpha_vec[col[m]] != 0}

    one, zero = QQ.one(), QQ.zero()
    coeffs: Dict[int, Vector] = {}
    for i in range(dim):
        coeffs[1 << i] = tuple(one if j == i else zero for j in range(dim))
    for m, a in alphas.items():
        coeffs[m] = tuple(a if j == dim - 1 else zero for j in range(dim))
    map_ = MultiAffineMap(dim, dim, QQ, coeffs)

    if not satisfies_constraints(map_).ok:
        raise InternalInconsistencyError("sharp map violates the constraint system")
    if map_.degree() != k:
        raise InternalInconsistencyError("sharp map has the wrong degree")
    return SharpMapSpec(dim, alphas, map_)


def sharp_r4_map(field: Field = QQ) -> MultiAffineMap:
    """(x1, x2, x3, x4 + x1 x2 - x1 x3): the corrected dimension-4 sharp map."""
    one, zero = field.one(), field.zero()
    coeffs: Dict[int, Vector] = {}
    for i in range(4):
        coeffs[1 << i] = tuple(one if j == i else zero for j in range(4))
    coeffs[0b0011] = (zero, zero, zero, one)               # +x1 x2
    coeffs[0b0101] = (zero, zero, zero, field.neg(one))    # -x1 x3
    return MultiAffineMap(4, 4, field, coeffs)


def noninjective_r4_variant(field: Field = QQ) -> MultiAffineMap:
    """(x1, x2, x3, x4 - x2 x3 + x2 x4): a superficially similar degree-2
    perturbation whose last coordinate is x4(1 + x2) - x2 x3 — constant in x4
    when x2 = -1, so the map is NOT injective.  Shipped as a cautionary
    executable example; see the collision exhibited in the test suite."""
    one, zero = field.one(), field.zero()
    coeffs: Dict[int, Vector] = {}
    for i in range(4):
        coeffs[1 << i] = tuple(one if j == i else zero for j in range(4))
    coeffs[0b0110] = (zero, zero, zero, field.neg(one))    # -x2 x3
    coeffs[0b1010] = (zero, zero, zero, one)               # +x2 x4
    return MultiAffineMap(4, 4, field, coeffs)


# ===========================================================================
# the canonical dimension-3 examples and the fifth-direction refutation
# ===========================================================================

def example_r3_map(field: Field = QQ) -> MultiAffineMap:
    """P(x) = (x1 + x3(x1-x2), x2 + x3(x1-x2), x3)."""
    return four_direction_form(field.one(), 1, field)


def four_direction_form(alpha: Scalar, variant: int, field: Field = QQ) -> MultiAffineMap:
    """The two canonical non-affine maps adapted to the four directions
    e1, e2, e3, e1+e2+e3 (every line in those directions goes onto a line):

      variant 1: (x1 + a*x3(x1-x2), x2 + a*x3(x1-x2), x3)
      variant 2: (x1 - x3, x2, a*x3 + x2(x1-x3))
    """
    a = field.convert(alpha)
    if field.is_zero(a):
        raise InputError("alpha must be nonzero")
    one, zero = field.one(), field.zero()
    if variant == 1:
        coeffs = {
            0b001: (one, zero, zero),
            0b010: (zero, one, zero),
            0b100: (zero, zero, one),
            0b101: (a, a, zero),                          # +a x1 x3
            0b110: (field.neg(a), field.neg(a), zero),    # -a x2 x3
        }
    elif variant == 2:
        coeffs = {
            0b001: (one, zero, zero),
            0b010: (zero, one, zero),
            0b100: (field.neg(one), zero, a),             # x3 enters 1st and 3rd
            0b011: (zero, zero, one),                     # +x1 x2
            0b110: (zero, zero, field.neg(one)),          # -x2 x3
        }
    else:
        raise InputError("variant must be 1 or 2")
    return MultiAffineMap(3, 3, field, coeffs)


def fifth_direction_refutation(map_: MultiAffineMap, u: Vector) -> bool:
    """True iff the single line {t*u} through the origin is NOT carried into
    a line — witnessing that a fifth direction in general position cannot be
    added to the four-direction family.

    u must be normalized to (a, b, 1) with a, b outside {0, 1} and a != b,
    which makes {e1, e2, e3, e1+e2+e3, u} 3-independent.
    """
    F = map_.field
    if map_.n != 3:
        raise InputError("fifth-direction refutation lives in dimension 3")
    u = vector(F, u)
    a, b, c = u
    one = F.one()
    if c != one:
        raise InputError("direction must be normalized to (a, b, 1)")
    if a in (F.zero(), one) or b in (F.zero(), one) or a == b:
        raise InputError("need a, b outside {0,1} with a != b for 3-independence")
    curve = restrict_to_line(map_, zero_vector(F, 3), u)
    return not curve_lies_in_line(curve)


# ===========================================================================
# random elements of the solution space (for sampling-based verification)
# ===========================================================================

@lru_cache(maxsize=None)
def _solution_basis(n: int) -> Tuple[Vector, ...]:
    return tuple(nullspace(build_constraints(n).rows))


def sample_constrained_map(n: int, m: int, rng: Random,
                           coeff_bound: int = 3) -> MultiAffineMap:
    """A random rational map whose every coordinate satisfies the constraint
    system: each output coordinate is an independent small-integer combination
    of the nullspace basis of the system."""
    system = build_constraints(n)
    basis = _solution_basis(n)
    coeffs: Dict[int, List[Scalar]] = {}
    for j in range(m):
        weights = [Fraction(rng.randint(-coeff_bound, coeff_bound))
                   for _ in basis]
        for vec, w in zip(basis, weights):
            if w == 0:
                continue
            for ci, val in enumerate(vec):
                if val == 0:
                    continue
                mask = system.unknowns[ci]
                row = coeffs.setdefault(mask, [Fraction(0)] * m)
                row[j] += w * val
    return MultiAffineMap(n, m, QQ, {k: tuple(v) for k, v in coeffs.items()})
