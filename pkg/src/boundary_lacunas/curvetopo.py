"""Topology of the real zero level of f_lam and its position relative to S = {x = 0}.

All decisions are exact: root isolation by Sturm sequences on rational
polynomials, signs at isolated roots by refining intervals.

B:  y^2 = -+p(x).  Components live over maximal x-intervals where -+p > 0.
C:  x = -g(y)/y away from y = 0, so there is one component over y > 0 and
    one over y < 0; each meets S at the roots of g on its side.
F4: f = s x^2 + b(y) x + g(y) is quadratic in x.  Over y there are two real
    points iff D(y) = b^2 - 4 s g > 0, so components correspond to the
    intervals where D > 0, and crossings with S are the roots of g.  A root
    shared by D and g is a turning point on S, crossed once where the two
    branches join.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    INF,
    RationalPoly,
    RootCount,
    isolate_roots,
    poly_gcd,
    refine_root,
    root_signs,
    squarefree_part,
    sturm_count,
)
from .families import (
    Deformation,
    Family,
    SingularityClass,
    f4_linear_coefficient,
    f4_x_discriminant,
    reduced_polynomial,
    require_off_walls,
)


class ProjectionDegeneracy(ValueError):
    """A y-extremal point of the F4 curve lies on S; perturb lam."""


@dataclass(frozen=True)
class CurveComponent:
    """One connected component of the real curve.

    ``side`` is the half-plane in y for C components, and the sign of x for
    S-avoiding components of B and F4.  ``crossings`` lists the ranks of the
    S-crossings (ordered by y) along a canonical traversal, for F4 only.
    """

    compact: bool
    meets_S: bool
    boundary_points: int
    side: int | None = None
    crossings: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {
            "compact": self.compact,
            "meets_S": self.meets_S,
            "boundary_points": self.boundary_points,
            "side": self.side,
            "crossings": list(self.crossings),
        }


@dataclass(frozen=True)
class LevelCurveTopology:
    components: tuple[CurveComponent, ...]
    pq: RootCount
    boundary_roots: int = 0

    @property
    def empty(self) -> bool:
        return not self.components

    @property
    def all_meet_S(self) -> bool:
        return all(c.meets_S for c in self.components)

    def to_json(self) -> dict:
        return {
            "empty": self.empty,
            "components": [c.to_json() for c in self.components],
            "pq": [self.pq.pos, self.pq.neg, self.pq.at_zero],
            "boundary_roots": self.boundary_roots,
        }


@dataclass(frozen=True)
class StabilizedSummary:
    empty: bool
    all_components_meet_S: bool
    component_count: int

    def to_json(self) -> dict:
        return {
            "empty": self.empty,
            "all_components_meet_S": self.all_components_meet_S,
            "component_count": self.component_count,
        }


@dataclass(frozen=True)
class _Gap:
    """Maximal open interval between consecutive real roots where a poly is positive."""

    lo_index: int  # index of the left root, -1 for -infinity
    hi_index: int  # index of the right root, len(roots) for +infinity
    bounded: bool
    two_sided: bool


def _positive_gaps(h: RationalPoly) -> tuple[list[_Gap], list[tuple[Fraction, Fraction]]]:
    """Gaps where h > 0; h is assumed square-free."""
    roots = isolate_roots(h, None) if h.degree > 0 else []
    m = len(roots)
    sign = (1 if h.lead > 0 else -1) * (-1) ** h.degree
    gaps = []
    for i in range(m + 1):
        if sign > 0:
            gaps.append(_Gap(i - 1, i, 1 <= i <= m - 1, m == 0))
        sign = -sign
    return gaps, roots


def _sphere_components(gap: _Gap, fiber_dim: int) -> int:
    """Components of a sphere bundle S^{fiber_dim} over the gap, collapsed at finite ends."""
    if gap.two_sided and fiber_dim == 0:
        return 2
    return 1


def _gap_contains_zero(gap: _Gap, neg_roots: int) -> bool:
    # roots are sorted; the first neg_roots are negative, none is zero off the walls
    return gap.lo_index < neg_roots <= gap.hi_index


def topology_B(cls: SingularityClass, lam: Deformation) -> LevelCurveTopology:
    require_off_walls(cls.planar(), lam)
    p = reduced_polynomial(cls, lam)
    pq = root_signs(p)
    h = -cls.sign * p
    gaps, _ = _positive_gaps(h)
    comps: list[CurveComponent] = []
    for gap in gaps:
        meets = _gap_contains_zero(gap, pq.neg)
        side = None if meets else (-1 if gap.hi_index <= pq.neg - 1 else 1)
        if gap.two_sided:
            for _ in range(2):
                comps.append(CurveComponent(False, True, 1))
            continue
        comps.append(CurveComponent(gap.bounded, meets, 2 if meets else 0, side))
    return LevelCurveTopology(tuple(comps), pq, boundary_roots=2 * int(p(0) * -cls.sign > 0))


def topology_C(cls: SingularityClass, lam: Deformation) -> LevelCurveTopology:
    require_off_walls(cls.planar(), lam)
    g = reduced_polynomial(cls, lam)
    pq = root_signs(g)
    comps = (
        CurveComponent(False, pq.pos >= 1, pq.pos, side=1),
        CurveComponent(False, pq.neg >= 1, pq.neg, side=-1),
    )
    return LevelCurveTopology(comps, pq, boundary_roots=pq.pos + pq.neg)


def _sign(v) -> int:
    return (v > 0) - (v < 0)


def _separate(a: list[tuple[Fraction, Fraction]], b: list[tuple[Fraction, Fraction]], pa: RationalPoly, pb: RationalPoly):
    """Refine isolating intervals of two root sets until no a-interval meets a b-interval."""
    a, b = list(a), list(b)
    while True:
        clash = False
        for i, (alo, ahi) in enumerate(a):
            for j, (blo, bhi) in enumerate(b):
                if alo < bhi and blo < ahi:
                    clash = True
                    a[i] = refine_root(pa, a[i], (ahi - alo) / 4)
                    b[j] = refine_root(pb, b[j], (bhi - blo) / 4)
                    break
            if clash:
                break
        if not clash:
            return a, b


def _dihedral_min(seq: tuple[int, ...]) -> tuple[int, ...]:
    if not seq:
        return seq
    n = len(seq)
    cands = []
    for s in (seq, tuple(reversed(seq))):
        for r in range(n):
            cands.append(s[r:] + s[:r])
    return min(cands)


def topology_F4(cls: SingularityClass, lam: Deformation) -> LevelCurveTopology:
    require_off_walls(cls.planar(), lam)
    sgn = cls.sign
    g = reduced_polynomial(cls, lam)
    D = f4_x_discriminant(sgn, lam)
    b = f4_linear_coefficient(lam)
    Dsf = squarefree_part(D)
    gsf = squarefree_part(g)
    # a common root of D and g is a turning point of the curve sitting on S
    shared = poly_gcd(Dsf, gsf)
    g_free = gsf // shared if shared.degree > 0 else gsf
    d_roots = isolate_roots(Dsf, None)
    g_roots = isolate_roots(g_free, None)
    d_roots, g_roots = _separate(d_roots, g_roots, Dsf, g_free)
    turning = [j for j, iv in enumerate(d_roots) if shared.degree > 0 and sturm_count(shared, iv) > 0]
    # b must have a definite sign at the remaining roots of g (b = g = 0 forces D = 0)
    if b.degree == 1:
        b_root = -b.coeffs[0] / b.coeffs[1]
        for j, (lo, hi) in enumerate(g_roots):
            while lo <= b_root <= hi:
                lo, hi = refine_root(g_free, (lo, hi), (hi - lo) / 4)
            g_roots[j] = (lo, hi)

    m = len(d_roots)
    gaps = []
    sign_left = _sign(D.lead) * (-1) ** D.degree
    s = sign_left
    for i in range(m + 1):
        if s > 0:
            gaps.append((i - 1, i))
        s = -s

    def gap_of(interval) -> int | None:
        below = sum(1 for _, dhi in d_roots if dhi <= interval[0])
        try:
            return gaps.index((below - 1, below))
        except ValueError:
            return None

    # rank all crossings by height; tagged ("g", index) or ("t", d-root index)
    tagged = [(iv[0], "g", j) for j, iv in enumerate(g_roots)]
    tagged += [(d_roots[j][0], "t", j) for j in turning]
    tagged.sort()
    per_gap: dict[int, tuple[list[int], list[int]]] = {gi: ([], []) for gi in range(len(gaps))}
    bottom: dict[int, int] = {}
    top: dict[int, int] = {}
    for rank, (_, kind, j) in enumerate(tagged):
        if kind == "t":
            for gi, (left, right) in enumerate(gaps):
                if left == j:
                    bottom[gi] = rank
                elif right == j:
                    top[gi] = rank
            continue
        iv = g_roots[j]
        gi = gap_of(iv)
        if gi is None:
            raise ProjectionDegeneracy("crossing with S outside the real curve")
        lo, hi = iv
        bsign = _sign(b(lo)) or _sign(b(hi))
        # roots in x are 0 and -b/sgn; x = 0 is the smaller one iff -b/sgn > 0
        on_lower = (-bsign * sgn) > 0
        per_gap[gi][0 if on_lower else 1].append(rank)

    comps = []
    for gi, (left, right) in enumerate(gaps):
        lower, upper = per_gap[gi]
        lo_turn = (bottom[gi],) if gi in bottom else ()
        hi_turn = (top[gi],) if gi in top else ()
        bounded = left >= 0 and right < m
        if bounded:
            seq = _dihedral_min(lo_turn + tuple(lower) + hi_turn + tuple(reversed(upper)))
        elif left < 0:
            # arc over (-inf, r]: up the lower branch, back down the upper one
            seq = tuple(lower) + hi_turn + tuple(reversed(upper))
        else:
            # arc over [r, +inf): down the lower branch, back up the upper one
            seq = tuple(reversed(lower)) + lo_turn + tuple(upper)
        meets = bool(seq)
        side = None
        if not meets:
            y_mid = _interior_point(d_roots, left, right)
            xsum = -b(y_mid) / sgn
            side = _sign(xsum)
        comps.append(CurveComponent(bounded, meets, len(seq), side, seq))
    comps.sort(key=lambda c: (c.compact, c.crossings, c.side or 0))
    return LevelCurveTopology(tuple(comps), root_signs(g), boundary_roots=len(tagged))


def _interior_point(roots, left: int, right: int) -> Fraction:
    if left < 0 and right >= len(roots):
        return Fraction(0)
    if left < 0:
        return roots[right][0] - 1
    if right >= len(roots):
        return roots[left][1] + 1
    return (roots[left][1] + roots[right][0]) / 2


def topology(cls: SingularityClass, lam: Deformation) -> LevelCurveTopology:
    if cls.family is Family.B:
        return topology_B(cls, lam)
    if cls.family is Family.C:
        return topology_C(cls, lam)
    return topology_F4(cls, lam)


def _inertia_with_square(cls: SingularityClass) -> tuple[int, int]:
    """Inertia of the quadratic part in the fibre variables (the family's square plus Q)."""
    r, s = cls.stab
    return (r + (cls.sign > 0), s + (cls.sign < 0))


def stabilized_summary(cls: SingularityClass, lam: Deformation) -> StabilizedSummary:
    """Topology of f + Q = 0 with Q of inertia (r, s), by projection onto one variable."""
    if not cls.is_stabilized:
        raise ValueError("no stabilization: use the planar topology")
    require_off_walls(cls.planar(), lam)
    r, s = cls.stab
    if cls.family is Family.B:
        return _stabilized_B(cls, lam)
    if cls.family is Family.C:
        return _stabilized_C(cls, lam, r, s)
    pos, neg = _inertia_with_square(cls)
    if pos >= 1 and neg >= 1:
        # every y-slice is a nonempty quadric, D has a real root (odd degree)
        # so all slices join through a cone; g is onto so the set meets S
        return StabilizedSummary(False, True, 1)
    topo = topology_F4(cls.planar(), lam)
    return StabilizedSummary(topo.empty, topo.all_meet_S, len(topo.components))


def _stabilized_B(cls: SingularityClass, lam: Deformation) -> StabilizedSummary:
    # slices over x: {sign y^2 + Q = -p(x)}
    p = reduced_polynomial(cls, lam)
    pos, neg = _inertia_with_square(cls)
    if pos >= 1 and neg >= 1:
        if sturm_count(p, (-INF, INF)) > 0:
            return StabilizedSummary(False, True, 1)
        # -p < 0 everywhere: two sheets iff the negative part is one-dimensional
        return StabilizedSummary(False, True, 2 if neg == 1 else 1)
    h = -p if neg == 0 else p
    fiber_dim = (pos if neg == 0 else neg) - 1
    gaps, _ = _positive_gaps(h)
    negatives = root_signs(p).neg
    count = 0
    all_meet = True
    for gap in gaps:
        count += _sphere_components(gap, fiber_dim)
        all_meet &= _gap_contains_zero(gap, negatives)
    return StabilizedSummary(count == 0, all_meet, count)


def _stabilized_C(cls: SingularityClass, lam: Deformation, r: int, s: int) -> StabilizedSummary:
    # for y != 0 the set is a graph x = -(g(y) + Q(z)) / y; at y = 0 it is
    # {Q(z) = -lam_0} times the x-line, which glues the two halves when nonempty
    g = reduced_polynomial(cls, lam)
    pq = root_signs(g)
    lam0 = lam[0]

    def q_attains(value_sign: int) -> bool:
        # can Q take a value of the given strict sign (0 always attained)
        return (value_sign > 0 and r >= 1) or (value_sign < 0 and s >= 1)

    if q_attains(-_sign(lam0)):
        return StabilizedSummary(False, True, 1)

    # otherwise -g(y) must be a value of Q of the sign Q cannot reach,
    # except at the roots of g: each half meets S iff g has a root there
    meets_pos = pq.pos >= 1
    meets_neg = pq.neg >= 1
    return StabilizedSummary(False, meets_pos and meets_neg, 2)
