"""Exact univariate polynomial arithmetic over the rationals.

Everything here works on ``fractions.Fraction`` so wall tests and real-root
counts are free of rounding.  Floats never enter this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Number = int | Fraction

INF = float("inf")


class IndeterminateError(ValueError):
    """Raised when an operation needs a nonzero polynomial."""


def _frac(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        return Fraction(c).limit_denominator(10**12)
    return Fraction(c)


@dataclass(frozen=True)
class RationalPoly:
    """Polynomial with exact rational coefficients, ascending order."""

    coeffs: tuple[Fraction, ...]
    var_name: str = "x"

    def __init__(self, coeffs: Iterable, var_name: str = "x"):
        cs = [_frac(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))
        object.__setattr__(self, "var_name", var_name)

    @classmethod
    def monomial(cls, degree: int, coeff: Number = 1, var_name: str = "x") -> "RationalPoly":
        return cls([0] * degree + [coeff], var_name)

    @classmethod
    def from_roots(cls, roots: Iterable[Number], lead: Number = 1, var_name: str = "x") -> "RationalPoly":
        p = cls([lead], var_name)
        for r in roots:
            p = p * cls([-_frac(r), 1], var_name)
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __call__(self, x):
        acc = Fraction(0) if isinstance(x, (int, Fraction)) else 0.0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, (int, Fraction)) else float(c))
        return acc

    def derivative(self) -> "RationalPoly":
        return RationalPoly([i * c for i, c in enumerate(self.coeffs)][1:], self.var_name)

    def __add__(self, other: "RationalPoly | Number") -> "RationalPoly":
        other = _lift(other, self.var_name)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return RationalPoly([x + y for x, y in zip(a, b)], self.var_name)

    __radd__ = __add__

    def __neg__(self) -> "RationalPoly":
        return RationalPoly([-c for c in self.coeffs], self.var_name)

    def __sub__(self, other) -> "RationalPoly":
        return self + (-_lift(other, self.var_name))

    def __rsub__(self, other) -> "RationalPoly":
        return _lift(other, self.var_name) - self

    def __mul__(self, other) -> "RationalPoly":
        other = _lift(other, self.var_name)
        if self.is_zero or other.is_zero:
            return RationalPoly([], self.var_name)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RationalPoly(out, self.var_name)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "RationalPoly":
        out = RationalPoly([1], self.var_name)
        for _ in range(n):
            out = out * self
        return out

    def __divmod__(self, other: "RationalPoly") -> tuple["RationalPoly", "RationalPoly"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dq = other.degree
        quot = [Fraction(0)] * max(len(rem) - dq, 1)
        inv_lead = 1 / other.lead
        while len(rem) - 1 >= dq and rem:
            shift = len(rem) - 1 - dq
            q = rem[-1] * inv_lead
            quot[shift] = q
            for j, b in enumerate(other.coeffs):
                rem[shift + j] -= q * b
            rem.pop()
            while rem and rem[-1] == 0:
                rem.pop()
        return RationalPoly(quot, self.var_name), RationalPoly(rem, self.var_name)

    def __floordiv__(self, other: "RationalPoly") -> "RationalPoly":
        return divmod(self, other)[0]

    def __mod__(self, other: "RationalPoly") -> "RationalPoly":
        return divmod(self, other)[1]

    def monic(self) -> "RationalPoly":
        if self.is_zero:
            return self
        return RationalPoly([c / self.lead for c in self.coeffs], self.var_name)

    def compose_affine(self, a: Number, b: Number) -> "RationalPoly":
        """Return p(a*t + b) as a polynomial in t."""
        lin = RationalPoly([b, a], self.var_name)
        out = RationalPoly([], self.var_name)
        for c in reversed(self.coeffs):
            out = out * lin + c
        return out

    def to_floats(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else (self.var_name if i == 1 else f"{self.var_name}^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}" + (f"*{mono}" if mono else "")
            terms.append(("-" if c < 0 else "+") + body)
        s = "".join(terms)
        return s[1:] if s.startswith("+") else s


def _lift(v, var_name: str) -> RationalPoly:
    if isinstance(v, RationalPoly):
        return v
    return RationalPoly([v], var_name)


@dataclass(frozen=True)
class RootCount:
    """Distinct real roots split by sign, plus the multiplicity at zero."""

    pos: int
    neg: int
    at_zero: int

    @property
    def pq(self) -> tuple[int, int]:
        return (self.pos, self.neg)


def poly_gcd(f: RationalPoly, g: RationalPoly) -> RationalPoly:
    a, b = f, g
    while not b.is_zero:
        a, b = b, a % b
    return a.monic()


def squarefree_part(p: RationalPoly) -> RationalPoly:
    g = poly_gcd(p, p.derivative())
    return (p // g).monic() if g.degree > 0 else p.monic()


def sturm_sequence(p: RationalPoly) -> list[RationalPoly]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero:
        r = seq[-2] % seq[-1]
        seq.append(-r)
    seq.pop()
    return seq


def _sign(v: Fraction) -> int:
    return (v > 0) - (v < 0)


def _one_sided_sign(p: RationalPoly, a, side: int) -> int:
    """Sign of p just to the right (side=+1) or left (side=-1) of a."""
    if p.is_zero:
        return 0
    if a == INF:
        return _sign(p.lead)
    if a == -INF:
        return _sign(p.lead) * (-1) ** p.degree
    q = p
    order = 0
    while True:
        v = q(a)
        if v != 0:
            return _sign(v) * (side**order)
        q = q.derivative()
        order += 1


def _variations(signs: Sequence[int]) -> int:
    nz = [s for s in signs if s != 0]
    return sum(1 for u, v in zip(nz, nz[1:]) if u != v)


def _sturm_open(seq: list[RationalPoly], lo, hi) -> int:
    left = _variations([_one_sided_sign(q, lo, +1) for q in seq])
    right = _variations([_one_sided_sign(q, hi, -1) for q in seq])
    return left - right


def sturm_count(poly: RationalPoly, interval: tuple = (-INF, INF)) -> int:
    """Number of distinct real roots in the open interval (lo, hi)."""
    if poly.is_zero:
        raise IndeterminateError("indeterminate: zero polynomial")
    lo, hi = interval
    lo = lo if lo in (INF, -INF) else _frac(lo)
    hi = hi if hi in (INF, -INF) else _frac(hi)
    if not lo < hi:
        return 0
    if poly.degree == 0:
        return 0
    return _sturm_open(sturm_sequence(poly), lo, hi)


def root_signs(poly: RationalPoly) -> RootCount:
    if poly.is_zero:
        raise IndeterminateError("indeterminate: zero polynomial")
    mult = 0
    q = poly
    while q.coeffs and q.coeffs[0] == 0:
        q = RationalPoly(q.coeffs[1:], q.var_name)
        mult += 1
    if q.degree == 0:
        return RootCount(0, 0, mult)
    seq = sturm_sequence(q)
    return RootCount(_sturm_open(seq, Fraction(0), INF), _sturm_open(seq, -INF, Fraction(0)), mult)


def _det(rows: list[list[Fraction]]) -> Fraction:
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        pv = m[col][col]
        det *= pv
        for r in range(col + 1, n):
            f = m[r][col]
            if f:
                f /= pv
                row_r, row_c = m[r], m[col]
                for c in range(col, n):
                    row_r[c] -= f * row_c[c]
    return det


def sylvester_matrix(f: RationalPoly, g: RationalPoly) -> list[list[Fraction]]:
    m, n = f.degree, g.degree
    size = m + n
    fd = list(reversed(f.coeffs))
    gd = list(reversed(g.coeffs))
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + fd + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + gd + [Fraction(0)] * (size - n - 1 - i))
    return rows


def resultant(f: RationalPoly, g: RationalPoly) -> Fraction:
    if f.is_zero or g.is_zero:
        raise IndeterminateError("indeterminate: zero polynomial")
    if f.degree == 0 and g.degree == 0:
        return Fraction(1)
    return _det(sylvester_matrix(f, g))


def discriminant(poly: RationalPoly) -> Fraction:
    n = poly.degree
    if n < 2:
        raise ValueError("discriminant needs degree >= 2")
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(poly, poly.derivative()) / poly.lead


def cauchy_bound(poly: RationalPoly) -> Fraction:
    lead = abs(poly.lead)
    return 1 + max((abs(c) / lead for c in poly.coeffs[:-1]), default=Fraction(0))


def isolate_roots(
    poly: RationalPoly, width: Fraction | None | str = "default"
) -> list[tuple[Fraction, Fraction]]:
    """Disjoint open intervals (lo, hi), one per distinct real root, sorted.

    ``width`` bounds hi - lo; the default is 2**-30 times the Cauchy bound.
    ``None`` stops as soon as the roots are separated.
    """
    if poly.is_zero:
        raise IndeterminateError("indeterminate: zero polynomial")
    if poly.degree == 0:
        return []
    p = squarefree_part(poly)
    bound = cauchy_bound(p)
    if width == "default":
        width = bound / 2**30
    seq = sturm_sequence(p)
    out: list[tuple[Fraction, Fraction]] = []
    stack = [(-bound, bound, _sturm_open(seq, -bound, bound))]
    while stack:
        lo, hi, n = stack.pop()
        if n == 0:
            continue
        if n == 1:
            out.append((lo, hi))
            continue
        mid = (lo + hi) / 2
        if p(mid) == 0:
            # an exact rational root: give it its own small interval
            a = mid - (hi - lo) / 2**19
            b = mid + (hi - lo) / 2**19
            while p(a) == 0 or p(b) == 0 or _sturm_open(seq, a, b) != 1:
                a = (a + mid) / 2
                b = (b + mid) / 2
            out.append((a, b))
            stack.append((lo, a, _sturm_open(seq, lo, a)))
            stack.append((b, hi, _sturm_open(seq, b, hi)))
            continue
        stack.append((lo, mid, _sturm_open(seq, lo, mid)))
        stack.append((mid, hi, _sturm_open(seq, mid, hi)))
    out.sort()
    if width is not None:
        out = [refine_root(p, iv, _frac(width)) for iv in out]
    return out


def refine_root(p: RationalPoly, interval: tuple[Fraction, Fraction], width: Fraction) -> tuple[Fraction, Fraction]:
    """Bisect an isolating interval of a simple root of square-free ``p``."""
    lo, hi = interval
    if p(lo) == 0 or p(hi) == 0:
        # endpoints may be roots only for exact-root intervals; shrink first
        seq = sturm_sequence(p)
        while hi - lo > width:
            mid = (lo + hi) / 2
            if p(mid) == 0:
                return (mid - width / 4, mid + width / 4)
            if _sturm_open(seq, lo, mid) == 1:
                hi = mid
            else:
                lo = mid
        return (lo, hi)
    s_lo = _sign(p(lo))
    while hi - lo > width:
        mid = (lo + hi) / 2
        v = p(mid)
        if v == 0:
            return (mid - width / 4, mid + width / 4)
        if _sign(v) == s_lo:
            lo = mid
        else:
            hi = mid
    return (lo, hi)


def real_root_approximations(poly: RationalPoly, width: Fraction | None = None) -> list[float]:
    """Midpoints of isolating intervals, as floats, sorted."""
    if width is None:
        width = Fraction(1, 2**50) * cauchy_bound(poly)
    return [float((a + b) / 2) for a, b in isolate_roots(poly, width)]
