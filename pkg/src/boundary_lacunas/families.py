"""Normal forms, miniversal deformations and the two walls of the real discriminant.

Boundary is the line S = {x = 0}.  The three families at n = 2:

    B_k^+-   x^k +- y^2 + lam_{k-1} x^{k-1} + ... + lam_0
    C_k^+-   x y +- y^k + lam_{k-1} y^{k-1} + ... + lam_0
    F4^+-    +-x^2 + y^3 + lam_3 x + lam_2 y + lam_1 x y + lam_0

A stabilization adds Q = z_1^2 + ... + z_r^2 - w_1^2 - ... - w_s^2.  The
walls do not depend on it, since f and f + Q have the same critical values.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import RationalPoly, discriminant, resultant


class Family(str, enum.Enum):
    B = "B"
    C = "C"
    F4 = "F4"


class SamplingError(RuntimeError):
    """No off-wall sample found within the retry budget."""


class WallError(ValueError):
    """Input lies on the real discriminant."""


@dataclass(frozen=True)
class SingularityClass:
    family: Family
    k: int = 4
    sign: int = 1
    stab: tuple[int, int] = (0, 0)

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.F4:
            object.__setattr__(self, "k", 4)
        elif self.k < 2:
            raise ValueError(f"{self.family.value}_k needs k >= 2, got {self.k}")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        r, s = self.stab
        if r < 0 or s < 0:
            raise ValueError("inertia indices must be nonnegative")
        object.__setattr__(self, "stab", (int(r), int(s)))

    @property
    def dim(self) -> int:
        """Number of deformation parameters (the Milnor number)."""
        return 4 if self.family is Family.F4 else self.k

    @property
    def is_stabilized(self) -> bool:
        return self.stab != (0, 0)

    def planar(self) -> "SingularityClass":
        return SingularityClass(self.family, self.k, self.sign)

    def with_stab(self, r: int, s: int) -> "SingularityClass":
        return SingularityClass(self.family, self.k, self.sign, (r, s))

    @property
    def label(self) -> str:
        base = "F4" if self.family is Family.F4 else f"{self.family.value}{self.k}"
        out = base + ("+" if self.sign > 0 else "-")
        if self.is_stabilized:
            out += f"[{self.stab[0]},{self.stab[1]}]"
        return out

    def __str__(self) -> str:
        return self.label

    @property
    def weights(self) -> tuple[Fraction, ...]:
        """Quasi-homogeneous weights of lam_0..lam_{dim-1}, normalized so f has weight 1."""
        if self.family is Family.B:
            return tuple(Fraction(self.k - i, self.k) for i in range(self.k))
        if self.family is Family.C:
            # y has weight 1/k, x has weight 1 - 1/k
            return tuple(Fraction(self.k - i, self.k) for i in range(self.k))
        # x ~ 1/2, y ~ 1/3: lam_0 ~ 1, lam_1 (xy) ~ 1/6, lam_2 (y) ~ 2/3, lam_3 (x) ~ 1/2
        return (Fraction(1), Fraction(1, 6), Fraction(2, 3), Fraction(1, 2))


def weight_denominator(cls: SingularityClass) -> int:
    return 6 if cls.family is Family.F4 else cls.k


def rescale(cls: SingularityClass, lam: Deformation, tau) -> Deformation:
    """Quasi-homogeneous action lam_i -> tau^(D w_i) lam_i, D = weight_denominator.

    It comes from substituting tau-powers into x and y and dividing f by
    tau^D, so the discriminant and every chamber are invariant.
    """
    tau = Fraction(tau)
    if tau <= 0:
        raise ValueError("tau must be positive")
    d = weight_denominator(cls)
    return Deformation([v * tau ** int(w * d) for v, w in zip(lam.lam, cls.planar().weights)])


def weighted_norm(cls: SingularityClass, lam: Deformation) -> float:
    """max |lam_i|^(1/w_i); rescale by tau multiplies it by tau^D."""
    return max((abs(float(v)) ** (1 / float(w)) for v, w in zip(lam.lam, cls.planar().weights) if v), default=0.0)


def parse_class(family: str, k: int | None = None, sign: str | int = "+", stab=(0, 0)) -> SingularityClass:
    fam = Family(family.upper())
    if isinstance(sign, str):
        if sign not in ("+", "-"):
            raise ValueError(f"sign must be '+' or '-', got {sign!r}")
        sign = 1 if sign == "+" else -1
    if fam is not Family.F4 and k is None:
        raise ValueError(f"family {fam.value} needs k")
    return SingularityClass(fam, k if k is not None else 4, sign, tuple(stab))


@dataclass(frozen=True)
class Deformation:
    """Exact parameter vector lam_0, ..., lam_{dim-1}."""

    lam: tuple[Fraction, ...]

    def __init__(self, lam: Sequence):
        object.__setattr__(self, "lam", tuple(_to_fraction(v) for v in lam))

    def __len__(self) -> int:
        return len(self.lam)

    def __getitem__(self, i: int) -> Fraction:
        return self.lam[i]

    def to_json(self) -> list[str]:
        return [f"{v.numerator}/{v.denominator}" for v in self.lam]

    @classmethod
    def from_json(cls, items: Sequence[str]) -> "Deformation":
        return cls([Fraction(s) for s in items])

    @classmethod
    def parse(cls, text: str) -> "Deformation":
        return cls([Fraction(t.strip()) for t in text.split(",") if t.strip()])

    def as_floats(self) -> np.ndarray:
        return np.array([float(v) for v in self.lam])


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        return Fraction(v)
    return Fraction(v)


@dataclass(frozen=True)
class WallValues:
    ordinary: Fraction
    boundary: Fraction

    @property
    def off_walls(self) -> bool:
        return self.ordinary != 0 and self.boundary != 0


def _check(cls: SingularityClass, lam: Deformation) -> None:
    if len(lam) != cls.dim:
        raise ValueError(f"{cls.label} needs {cls.dim} parameters, got {len(lam)}")


def reduced_polynomial(cls: SingularityClass, lam: Deformation) -> RationalPoly:
    """B: p(x) with V = {y^2 = -+p}.  C: g(y) = f(0, y).  F4: f(0, y)."""
    _check(cls, lam)
    if cls.family is Family.B:
        return RationalPoly(list(lam.lam) + [1], "x")
    if cls.family is Family.C:
        return RationalPoly(list(lam.lam) + [cls.sign], "y")
    return RationalPoly([lam[0], lam[2], 0, 1], "y")


def f4_linear_coefficient(lam: Deformation) -> RationalPoly:
    """b(y) = lam_3 + lam_1 y, the coefficient of x in the F4 deformation."""
    return RationalPoly([lam[3], lam[1]], "y")


def f4_x_discriminant(sign: int, lam: Deformation) -> RationalPoly:
    """D(y) = b^2 - 4 sign g: the curve has two real x over y iff D(y) > 0."""
    b = f4_linear_coefficient(lam)
    g = RationalPoly([lam[0], lam[2], 0, 1], "y")
    return b * b - 4 * sign * g


def f4_ordinary_eliminants(sign: int, lam: Deformation) -> tuple[RationalPoly, RationalPoly]:
    """f and f_y restricted to the polar curve f_x = 0, as polynomials in y."""
    b = f4_linear_coefficient(lam)
    x_of_y = b * Fraction(-1, 2 * sign)
    g = RationalPoly([lam[0], lam[2], 0, 1], "y")
    h = sign * x_of_y * x_of_y + b * x_of_y + g
    hy = RationalPoly([lam[2], 0, 3], "y") + lam[1] * x_of_y
    return h, hy


def _f4_ordinary_direct(sign: int, lam: Deformation) -> Fraction:
    h, hy = f4_ordinary_eliminants(sign, lam)
    return f4_ordinary_wall_scale(sign) * resultant(h, hy)


def f4_ordinary_wall_scale(sign: int) -> int:
    """Positive integer clearing the denominators of the raw resultant."""
    return _f4_ordinary_symbolic(sign)[1]


def f4_ordinary_wall_expression(sign: int) -> dict[tuple[int, int, int, int], int]:
    """Integer-coefficient polynomial in (lam_0..lam_3) for the F4 ordinary wall.

    Built once by symbolic elimination and cached; keys are exponent tuples.
    It equals f4_ordinary_wall_scale(sign) times Res_y(h, h_y).
    """
    return _f4_ordinary_symbolic(sign)[0]


@functools.lru_cache(maxsize=2)
def _f4_ordinary_symbolic(sign: int) -> tuple[dict, int]:
    import sympy as sp

    l0, l1, l2, l3, y = sp.symbols("l0 l1 l2 l3 y")
    b = l3 + l1 * y
    x = -b / (2 * sign)
    h = sp.expand(sign * x**2 + b * x + y**3 + l2 * y + l0)
    hy = sp.expand(3 * y**2 + l2 + l1 * x)
    res = sp.Poly(sp.resultant(h, hy, y), l0, l1, l2, l3)
    scale = int(sp.ilcm(*[sp.denom(c) for c in res.coeffs()]))
    expr = {tuple(int(e) for e in mon): int(c * scale) for mon, c in res.terms()}
    return expr, scale


def _eval_monomials(expr: dict, lam: Sequence[Fraction]) -> Fraction:
    acc = Fraction(0)
    for mon, c in expr.items():
        term = Fraction(c)
        for v, e in zip(lam, mon):
            if e:
                term *= v**e
        acc += term
    return acc


def wall_values(cls: SingularityClass, lam: Deformation, route: str = "expression") -> WallValues:
    """Exact values of the ordinary and the boundary wall polynomials at lam.

    For F4, ``route="expression"`` evaluates the cached eliminant and
    ``route="direct"`` recomputes the resultant at this lam.
    """
    _check(cls, lam)
    if cls.family is Family.B:
        p = reduced_polynomial(cls, lam)
        return WallValues(discriminant(p), lam[0])
    if cls.family is Family.C:
        g = reduced_polynomial(cls, lam)
        return WallValues(lam[0], discriminant(g))
    boundary = -4 * lam[2] ** 3 - 27 * lam[0] ** 2
    if route == "direct":
        ordinary = _f4_ordinary_direct(cls.sign, lam)
    else:
        ordinary = _eval_monomials(f4_ordinary_wall_expression(cls.sign), lam.lam)
    return WallValues(ordinary, boundary)


def require_off_walls(cls: SingularityClass, lam: Deformation) -> WallValues:
    w = wall_values(cls, lam)
    if not w.off_walls:
        which = "ordinary" if w.ordinary == 0 else "boundary"
        raise WallError(f"degenerate level set: lam lies on the {which} wall of {cls.label}")
    return w


@dataclass(frozen=True)
class Box:
    """Axis-aligned rational box, one (lo, hi) pair per parameter."""

    bounds: tuple[tuple[Fraction, Fraction], ...]

    def __init__(self, bounds: Sequence[tuple]):
        object.__setattr__(
            self, "bounds", tuple((_to_fraction(a), _to_fraction(b)) for a, b in bounds)
        )

    @classmethod
    def cube(cls, dim: int, radius=1) -> "Box":
        r = _to_fraction(radius)
        return cls([(-r, r)] * dim)

    @classmethod
    def radii(cls, radii: Sequence) -> "Box":
        return cls([(-_to_fraction(r), _to_fraction(r)) for r in radii])


def default_box(cls: SingularityClass) -> Box:
    return Box.cube(cls.dim)


def f4_axis_box(scale=Fraction(1, 6)) -> Box:
    """Box hugging the lam_1 axis: radius scale**(6 w_i - 1) in lam_i.

    Several F4 chambers are thin wedges around that axis; the uniform cube
    reaches them with probability of order 1e-4.
    """
    w6 = (6, 1, 4, 3)
    scale = _to_fraction(scale)
    return Box.radii([scale ** (w - 1) for w in w6])


GRID_BITS = 12


def sample_box(box: Box, rng: np.random.Generator) -> Deformation:
    """Uniform rational point on the 2^GRID_BITS grid of the box."""
    n = 1 << GRID_BITS
    out = []
    for lo, hi in box.bounds:
        t = int(rng.integers(0, n + 1))
        out.append(lo + (hi - lo) * Fraction(t, n))
    return Deformation(out)


def off_wall_sample(
    cls: SingularityClass,
    box: Box | None = None,
    seed: int = 0,
    count: int = 1,
    max_tries: int | None = None,
) -> list[Deformation]:
    """Deterministic seeded samples with both wall values nonzero."""
    box = box or default_box(cls)
    if len(box.bounds) != cls.dim:
        raise ValueError("box dimension does not match the class")
    if any(lo > hi for lo, hi in box.bounds):
        raise ValueError("empty box")
    rng = np.random.default_rng(seed)
    budget = max_tries if max_tries is not None else 20 * count + 100
    out: list[Deformation] = []
    tries = 0
    while len(out) < count:
        if tries >= budget:
            raise SamplingError(
                f"{cls.label}: only {len(out)} of {count} off-wall samples after {tries} draws; "
                "the box may lie inside the discriminant"
            )
        tries += 1
        lam = sample_box(box, rng)
        if wall_values(cls, lam).off_walls:
            out.append(lam)
    return out


@dataclass(frozen=True)
class PlanePoly:
    """Real polynomial in (x, y) as {(i, j): coeff} meaning coeff * x^i * y^j."""

    terms: dict = field(hash=False)

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float) if not np.iscomplexobj(x) else np.asarray(x)
        y = np.asarray(y, dtype=float) if not np.iscomplexobj(y) else np.asarray(y)
        acc = np.zeros(np.broadcast(x, y).shape, dtype=np.result_type(x, y, float))
        for (i, j), c in self.terms.items():
            acc = acc + float(c) * x**i * y**j
        return acc

    def diff(self, var: str) -> "PlanePoly":
        out: dict = {}
        for (i, j), c in self.terms.items():
            if var == "x" and i:
                out[(i - 1, j)] = out.get((i - 1, j), 0) + c * i
            elif var == "y" and j:
                out[(i, j - 1)] = out.get((i, j - 1), 0) + c * j
        return PlanePoly({m: c for m, c in out.items() if c != 0})

    def shift(self, c) -> "PlanePoly":
        out = dict(self.terms)
        out[(0, 0)] = out.get((0, 0), 0) - c
        return PlanePoly(out)

    def restrict_x0(self) -> RationalPoly:
        deg = max((j for (i, j) in self.terms if i == 0), default=0)
        cs = [Fraction(0)] * (deg + 1)
        for (i, j), c in self.terms.items():
            if i == 0:
                cs[j] += _to_fraction(c)
        return RationalPoly(cs, "y")

    @property
    def degree(self) -> int:
        return max(i + j for (i, j) in self.terms)


def plane_polynomial(cls: SingularityClass, lam: Deformation) -> PlanePoly:
    """f_lam(x, y) at n = 2 with exact coefficients."""
    _check(cls, lam)
    s = cls.sign
    t: dict = {}
    if cls.family is Family.B:
        t[(cls.k, 0)] = Fraction(1)
        t[(0, 2)] = Fraction(s)
        for i, v in enumerate(lam.lam):
            if v:
                t[(i, 0)] = t.get((i, 0), 0) + v
    elif cls.family is Family.C:
        t[(1, 1)] = Fraction(1)
        t[(0, cls.k)] = Fraction(s)
        for i, v in enumerate(lam.lam):
            if v:
                t[(0, i)] = t.get((0, i), 0) + v
    else:
        t = {(2, 0): Fraction(s), (0, 3): Fraction(1)}
        for mon, v in zip([(0, 0), (1, 1), (0, 1), (1, 0)], lam.lam):
            if v:
                t[mon] = v
    return PlanePoly({m: c for m, c in t.items() if c != 0})
