"""Volume functions V(c) = integral of dx dy / x over S-avoiding regions cut by f_lam = c.

Regions are components of {side * (f_lam - c) <= 0} inside a rectangular
working box.  Integration is by Fubini: each horizontal slice of the region is a
union of x-intervals found from the roots of the slice polynomial, and the
inner integral of dx/x over [a, b] is log(|b| / |a|).  The outer integral in y
runs through scipy's adaptive quadrature with the slice-structure changes
(horizontal tangencies, box crossings) passed as break points.

Component identity comes from a pixel labelling of the same region; an
exact slice interval belongs to the component of the labelled pixel nearest
to its midpoint.  Real critical points below the level seed the labelling,
so ovals thinner than a pixel are still found.

The Gelfand-Leray derivative is an independent route: a line integral of
dl / (x |grad f|) along the level curve, traced by marching squares and
projected back onto the curve by Newton steps.
"""

from __future__ import annotations

import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import sympy
from scipy import integrate, ndimage
from skimage.measure import find_contours

from .atlas import signature_of
from .families import (
    Deformation,
    Family,
    SingularityClass,
    WallError,
    plane_polynomial,
    reduced_polynomial,
    rescale,
    wall_values,
    weight_denominator,
    weighted_norm,
)
from .monodromy import CycleVector, eta_matrix, obstruction


class LevelError(ValueError):
    """c sits at (or too near) a critical value of f or of f restricted to S."""


class PoleError(ValueError):
    """The integration domain meets S = {x = 0}, where 1/x has its pole."""


NON_ALGEBRAIC = "NON-ALGEBRAIC-EVIDENCE"
NO_OBSTRUCTION = "NO-OBSTRUCTION-FOUND"


def _planar_only(cls: SingularityClass) -> None:
    if cls.is_stabilized:
        raise ValueError("volume functions are computed at n = 2 only")


# ---------------------------------------------------------------- polynomial views


@dataclass(frozen=True)
class _Surface:
    """Float coefficient array coef[i, j] of x^i y^j plus exact sympy form."""

    coef: np.ndarray = field(compare=False)
    expr: sympy.Expr = field(compare=False)

    def __call__(self, x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        out = np.zeros(np.broadcast(x, y).shape, dtype=np.result_type(x, y, float))
        for (i, j), v in np.ndenumerate(self.coef):
            if v:
                out = out + v * x**i * y**j
        return out

    def grad(self, x, y):
        fx = np.zeros(np.broadcast(x, y).shape, dtype=np.result_type(x, y, float))
        fy = np.zeros_like(fx)
        for (i, j), v in np.ndenumerate(self.coef):
            if v and i:
                fx = fx + v * i * x ** (i - 1) * y**j
            if v and j:
                fy = fy + v * j * x**i * y ** (j - 1)
        return fx, fy

    def hessian(self, x, y) -> np.ndarray:
        h = np.zeros((2, 2), dtype=complex)
        for (i, j), v in np.ndenumerate(self.coef):
            if not v:
                continue
            if i >= 2:
                h[0, 0] += v * i * (i - 1) * x ** (i - 2) * y**j
            if j >= 2:
                h[1, 1] += v * j * (j - 1) * x**i * y ** (j - 2)
            if i and j:
                h[0, 1] += v * i * j * x ** (i - 1) * y ** (j - 1)
        h[1, 0] = h[0, 1]
        return h

    def x_coeffs(self, y0: float, c: float) -> np.ndarray:
        """Coefficients (highest first) of x -> f(x, y0) - c."""
        powers = y0 ** np.arange(self.coef.shape[1])
        a = self.coef @ powers
        a[0] -= c
        return a[::-1]


X, Y = sympy.symbols("x y")


@lru_cache(maxsize=256)
def _surface(cls: SingularityClass, lam: Deformation) -> _Surface:
    poly = plane_polynomial(cls, lam)
    di = max(i for i, _ in poly.terms) + 1
    dj = max(j for _, j in poly.terms) + 1
    coef = np.zeros((di, dj))
    expr = sympy.Integer(0)
    for (i, j), v in poly.terms.items():
        coef[i, j] = float(v)
        v = Fraction(v)
        expr += sympy.Rational(v.numerator, v.denominator) * X**i * Y**j
    return _Surface(coef, expr)


def _rational(c) -> sympy.Rational:
    q = Fraction(c)
    return sympy.Rational(q.numerator, q.denominator)


def _real_roots(coeffs_high_first, tol: float = 1e-9) -> list[float]:
    a = np.trim_zeros(np.asarray(coeffs_high_first, dtype=float), "f")
    if a.size <= 1:
        return []
    r = np.roots(a)
    return sorted(float(z.real) for z in r if abs(z.imag) <= tol * (1 + abs(z)))


def _sym_real_roots(expr, var) -> list[float]:
    expr = sympy.expand(expr)
    if expr == 0:
        raise LevelError("wall in c: the level curve is singular (resultant vanishes identically)")
    if not expr.has(var):
        return []
    coeffs = [float(v) for v in sympy.Poly(expr, var).all_coeffs()]
    return _real_roots(coeffs)


@lru_cache(maxsize=1024)
def _tangency_values(cls: SingularityClass, lam: Deformation, c: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """y-values of horizontal tangencies and x-values of vertical tangencies of f = c."""
    F = _surface(cls, lam).expr - _rational(c)
    ys = _sym_real_roots(sympy.resultant(F, sympy.diff(F, X), X), Y)
    xs = _sym_real_roots(sympy.resultant(F, sympy.diff(F, Y), Y), X)
    return tuple(ys), tuple(xs)


@lru_cache(maxsize=1024)
def _tangency_cross_values(cls: SingularityClass, lam: Deformation, c: float) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """x-values of horizontal tangencies and y-values of vertical tangencies of f = c."""
    F = _surface(cls, lam).expr - _rational(c)
    fx, fy = sympy.diff(F, X), sympy.diff(F, Y)
    xs = _sym_real_roots(sympy.resultant(F, fx, Y), X) if fx.has(Y) else []
    ys = _sym_real_roots(sympy.resultant(F, fy, X), Y) if fy.has(X) else []
    return tuple(xs), tuple(ys)


# ---------------------------------------------------------------- critical points


@dataclass(frozen=True)
class CriticalPoint:
    x: complex
    y: complex
    value: complex
    kind: str  # "min", "max", "saddle" or "complex"
    hessian: tuple = field(compare=False, repr=False)

    @property
    def is_real(self) -> bool:
        return self.kind != "complex"

    def to_json(self) -> dict:
        return {
            "x": [self.x.real, self.x.imag],
            "y": [self.y.real, self.y.imag],
            "value": [self.value.real, self.value.imag],
            "kind": self.kind,
        }


def _classify_point(surf: _Surface, x: complex, y: complex) -> CriticalPoint:
    h = surf.hessian(x, y)
    value = complex(surf(np.complex128(x), np.complex128(y)))
    real = abs(x.imag) < 1e-12 and abs(y.imag) < 1e-12
    if real:
        x, y, value = complex(x.real), complex(y.real), complex(value.real)
        ev = np.linalg.eigvalsh(h.real)
        kind = "min" if ev.min() > 0 else "max" if ev.max() < 0 else "saddle"
    else:
        kind = "complex"
    return CriticalPoint(complex(x), complex(y), value, kind, tuple(map(tuple, h)))


def _polish(surf: _Surface, x: complex, y: complex) -> tuple[complex, complex]:
    z = np.array([x, y], dtype=complex)
    for _ in range(30):
        g = np.array(surf.grad(z[0], z[1]), dtype=complex)
        if np.abs(g).max() < 1e-15:
            break
        z = z - np.linalg.solve(surf.hessian(z[0], z[1]), g)
    return complex(z[0]), complex(z[1])


@lru_cache(maxsize=256)
def critical_points(cls: SingularityClass, lam: Deformation) -> tuple[CriticalPoint, ...]:
    """Critical points of f_lam in C^2, sorted by (Re x, Im x, Re y, Im y)."""
    _planar_only(cls)
    surf = _surface(cls, lam)
    lf = [float(v) for v in lam.lam]
    s = cls.sign
    if cls.family is Family.B:
        dp = reduced_polynomial(cls, lam).derivative()
        seeds = [(complex(r), 0j) for r in np.roots([float(c) for c in reversed(dp.coeffs)])]
    elif cls.family is Family.C:
        seeds = [(complex(-lf[1]), 0j)]
    else:
        l0, l1, l2, l3 = lf
        ys = np.roots([3.0, -l1 * l1 / (2 * s), l2 - l1 * l3 / (2 * s)])
        seeds = [(-(l3 + l1 * y) / (2 * s), complex(y)) for y in ys]
    pts = [_classify_point(surf, *_polish(surf, x, y)) for x, y in seeds]
    return tuple(sorted(pts, key=lambda p: (p.x.real, p.x.imag, p.y.real, p.y.imag)))


@lru_cache(maxsize=256)
def boundary_critical_values(cls: SingularityClass, lam: Deformation) -> tuple[complex, ...]:
    """Critical values of f_lam restricted to S."""
    g = plane_polynomial(cls, lam).restrict_x0()
    dg = g.derivative()
    if dg.degree < 1:
        return ()
    roots = np.roots([float(c) for c in reversed(dg.coeffs)])
    return tuple(sorted((complex(g(complex(r))) for r in roots), key=lambda v: (v.real, v.imag)))


def real_critical_values(cls: SingularityClass, lam: Deformation) -> list[float]:
    vals = [p.value.real for p in critical_points(cls, lam) if p.is_real]
    vals += [v.real for v in boundary_critical_values(cls, lam) if abs(v.imag) < 1e-12]
    return sorted(vals)


def distance_to_critical(cls: SingularityClass, lam: Deformation, c: float) -> float:
    vals = real_critical_values(cls, lam)
    return min((abs(c - v) for v in vals), default=float("inf"))


def check_level(cls: SingularityClass, lam: Deformation, c: float, rel: float = 1e-9) -> None:
    d = distance_to_critical(cls, lam, c)
    if d <= rel * (1 + abs(c)):
        raise LevelError(f"wall in c: c={c} is within {d:.3g} of a critical value")


def working_box(cls: SingularityClass, lam: Deformation, levels) -> tuple[float, float]:
    """Half-widths (Rx, Ry) of the working box.

    Each is 1.5 times the farthest coordinate of a point where some level
    curve f = c (c in levels) turns in x or y or crosses S, or where f is
    critical.  The two directions are sized separately because the
    quasi-homogeneous weights of x and y can differ a lot.
    """
    ex, ey = [1.0], [1.0]
    for c in levels:
        ys, xs = _tangency_values(cls, lam, float(c))
        xs2, ys2 = _tangency_cross_values(cls, lam, float(c))
        ey += [abs(v) for v in ys + ys2]
        ex += [abs(v) for v in xs + xs2]
        F = _surface(cls, lam).expr.subs(X, 0) - _rational(float(c))
        ey += [abs(v) for v in _sym_real_roots(F, Y)]
    for p in critical_points(cls, lam):
        ex.append(abs(p.x.real))
        ey.append(abs(p.y.real))
    return 1.5 * max(ex), 1.5 * max(ey)


# ---------------------------------------------------------------- regions


@dataclass(frozen=True)
class _Grid:
    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray  # indexed [iy, ix]
    nearest: tuple
    values: np.ndarray

    @property
    def hx(self) -> float:
        return float(self.xs[1] - self.xs[0])

    @property
    def hy(self) -> float:
        return float(self.ys[1] - self.ys[0])

    @staticmethod
    def _index(axis: np.ndarray, v: float) -> int:
        h = axis[1] - axis[0]
        return int(np.clip(np.rint((v - axis[0]) / h), 0, axis.size - 1))

    def label_at(self, x: float, y: float) -> int:
        iy, ix = self._index(self.ys, y), self._index(self.xs, x)
        return int(self.labels[self.nearest[0][iy, ix], self.nearest[1][iy, ix]])


def _grid(surf: _Surface, c: float, side: int, box: tuple[float, float], resolution: int,
          seeds: Sequence[tuple[float, float]] = ()) -> _Grid:
    """Labelled sample grid of {side * (f - c) <= 0}.

    ``seeds`` are points known to lie inside the set (real critical points
    below the level); their pixels are forced inside so that components
    thinner than a pixel still get a label.
    """
    n = resolution | 1  # odd, so x = 0 is a grid column
    xs = np.linspace(-box[0], box[0], n)
    ys = np.linspace(-box[1], box[1], n)
    gx, gy = np.meshgrid(xs, ys)
    values = surf(gx, gy) - c
    mask = side * values <= 0
    for x, y in seeds:
        if abs(x) <= box[0] and abs(y) <= box[1]:
            mask[_Grid._index(ys, y), _Grid._index(xs, x)] = True
    labels, _ = ndimage.label(mask)
    if labels.max() == 0:
        nearest = (np.zeros_like(labels), np.zeros_like(labels))
    else:
        nearest = tuple(ndimage.distance_transform_edt(labels == 0, return_distances=False, return_indices=True))
    return _Grid(xs, ys, labels, nearest, values)


@dataclass(frozen=True)
class RegionSpec:
    """One component of {side * (f_lam - c) <= 0} in the working box [-Rx, Rx] x [-Ry, Ry]."""

    cls: SingularityClass
    lam: Deformation
    c: float
    component: int
    side: int
    label: int
    anchor: tuple[float, float]
    touches_S: bool
    bounded: bool
    box: tuple[float, float]
    resolution: int
    grid: _Grid = field(compare=False, repr=False)

    @property
    def x_sign(self) -> int:
        return 1 if self.anchor[0] > 0 else -1

    def to_json(self) -> dict:
        return {
            "class": self.cls.label,
            "lambda": self.lam.to_json(),
            "c": self.c,
            "component": self.component,
            "side": self.side,
            "anchor": list(self.anchor),
            "touches_S": self.touches_S,
            "bounded": self.bounded,
            "box": list(self.box),
        }


def _slice_intervals(surf: _Surface, y0: float, c: float, side: int, Rx: float) -> list[tuple[float, float]]:
    roots = [r for r in _real_roots(surf.x_coeffs(y0, c)) if -Rx < r < Rx]
    cuts = [-Rx] + roots + [Rx]
    out: list[list[float]] = []
    for a, b in zip(cuts, cuts[1:]):
        if b <= a:
            continue
        m = 0.5 * (a + b)
        if side * (surf(m, y0) - c) <= 0:
            if out and out[-1][1] == a:
                out[-1][1] = b
            else:
                out.append([a, b])
    return [(a, b) for a, b in out]


def _s_touching_labels(surf: _Surface, grid: _Grid, c: float, side: int, Ry: float) -> set[int]:
    touching = set(int(v) for v in np.unique(grid.labels[:, grid.xs.size // 2]) if v)
    F = surf.expr.subs(X, 0) - _rational(c)
    cuts = [-Ry] + [r for r in _sym_real_roots(F, Y) if -Ry < r < Ry] + [Ry]
    for a, b in zip(cuts, cuts[1:]):
        m = 0.5 * (a + b)
        if side * (surf(0.0, m) - c) <= 0:
            touching.add(grid.label_at(0.0, m))
    touching.discard(0)
    return touching


def region_components(
    cls: SingularityClass,
    lam: Deformation,
    c: float,
    side: int = 1,
    box: tuple[float, float] | None = None,
    resolution: int = 401,
) -> list[RegionSpec]:
    """Components of {side * (f - c) <= 0} in the working box, S-avoiding ones first, larger first."""
    _planar_only(cls)
    c = float(c)
    check_level(cls, lam, c)
    box = tuple(box) if box is not None else working_box(cls, lam, [c])
    surf = _surface(cls, lam)
    inner = [(p.x.real, p.y.real) for p in critical_points(cls, lam)
             if p.is_real and side * (p.value.real - c) < 0]
    grid = _grid(surf, c, side, box, resolution, inner)
    touching = _s_touching_labels(surf, grid, c, side, box[1])
    depth = ndimage.distance_transform_edt(grid.labels > 0)
    specs = []
    for lab in range(1, grid.labels.max() + 1):
        where = grid.labels == lab
        iy, ix = np.unravel_index(np.argmax(np.where(where, depth, -1)), where.shape)
        anchor = (float(grid.xs[ix]), float(grid.ys[iy]))
        if side * (float(surf(*anchor)) - c) > 0:
            # a seeded sub-pixel component: anchor at its critical point
            anchor = next((pt for pt in inner if grid.label_at(*pt) == lab), anchor)
        edge = where[0, :].any() or where[-1, :].any() or where[:, 0].any() or where[:, -1].any()
        xs_used = grid.xs[np.flatnonzero(where.any(axis=0))]
        touches = lab in touching or bool(xs_used.min() < 0 < xs_used.max())
        specs.append((touches, -int(where.sum()), lab, anchor, not edge))
    specs.sort()
    return [
        RegionSpec(cls, lam, c, idx, side, lab, anchor, touches, bounded, box, resolution, grid)
        for idx, (touches, _, lab, anchor, bounded) in enumerate(specs)
    ]


def s_avoiding_regions(cls, lam, c=0.0, sides=(1, -1), box=None, resolution=401) -> list[RegionSpec]:
    out = []
    for side in sides:
        out += [r for r in region_components(cls, lam, c, side, box, resolution) if not r.touches_S]
    return out


def region_at(region: RegionSpec, c: float, resolution: int | None = None) -> RegionSpec:
    """The component at a new level (or resolution) containing the same anchor point."""
    regions = region_components(region.cls, region.lam, c, region.side, region.box,
                                resolution or region.resolution)
    lab = regions[0].grid.label_at(*region.anchor) if regions else 0
    for r in regions:
        if r.label == lab and side_value(r, *region.anchor) <= 0:
            return r
    raise LevelError(f"anchor {region.anchor} left the region between c={region.c} and c={c}")


def side_value(region: RegionSpec, x: float, y: float) -> float:
    return region.side * (float(_surface(region.cls, region.lam)(x, y)) - region.c)


def _y_breakpoints(region: RegionSpec, lo: float, hi: float) -> list[float]:
    surf = _surface(region.cls, region.lam)
    Rx, c = region.box[0], region.c
    ys, _ = _tangency_values(region.cls, region.lam, c)
    pts = list(ys)
    for edge in (-Rx, Rx):
        F = surf.expr.subs(X, _rational(edge)) - _rational(c)
        pts += _sym_real_roots(F, Y) if F.has(Y) else []
    pts += _real_roots(surf.coef[-1, ::-1])
    return sorted(p for p in set(pts) if lo < p < hi)


def _membership_integrand(region: RegionSpec, labels: set[int]):
    surf = _surface(region.cls, region.lam)

    def inner(y0: float) -> float:
        acc = 0.0
        for a, b in _slice_intervals(surf, y0, region.c, region.side, region.box[0]):
            if region.grid.label_at(0.5 * (a + b), y0) not in labels:
                continue
            if a * b <= 0:
                raise PoleError("pole on domain: a slice of the region crosses x = 0")
            acc += np.log(abs(b) / abs(a))
        return acc

    return inner


def _integrate_labels(region: RegionSpec, labels: set[int], tol: float) -> float:
    rows = np.flatnonzero(np.isin(region.grid.labels, list(labels)).any(axis=1))
    if rows.size == 0:
        return 0.0
    h, Ry = region.grid.hy, region.box[1]
    lo = max(-Ry, region.grid.ys[rows[0]] - 2 * h)
    hi = min(Ry, region.grid.ys[rows[-1]] + 2 * h)
    points = _y_breakpoints(region, lo, hi)
    with warnings.catch_warnings():
        # epsrel sits near machine precision; quad flags roundoff there
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(
            _membership_integrand(region, labels), lo, hi, points=points or None,
            epsabs=tol, epsrel=1e-12, limit=400,
        )
    return float(val)


def volume_integral(region: RegionSpec, tol: float = 1e-10) -> float:
    """Integral of dx dy / x over the region."""
    if region.touches_S:
        raise PoleError("pole on domain: the region meets S = {x = 0}")
    return _integrate_labels(region, {region.label}, tol)


def total_volume(regions: list[RegionSpec], tol: float = 1e-10) -> float:
    """Sum over the S-avoiding members of ``regions`` (all from one labelling); 0 for none."""
    keep = [r for r in regions if not r.touches_S]
    if not keep:
        return 0.0
    return _integrate_labels(keep[0], {r.label for r in keep}, tol)


# ---------------------------------------------------------------- Gelfand-Leray


def gelfand_leray_derivative(region: RegionSpec, resolution: int = 801) -> float:
    """dV/dc as the line integral of dl / (x |grad f|) over the region's level boundary."""
    if region.touches_S:
        raise PoleError("pole on domain: the region meets S = {x = 0}")
    cls, lam, c = region.cls, region.lam, region.c
    d = distance_to_critical(cls, lam, c)
    if d < 1e-6 * (1 + abs(c)):
        raise LevelError(f"near-critical level: distance {d:.3g} to a critical value")
    surf = _surface(cls, lam)
    fine = region if resolution == region.resolution else region_at(region, c, resolution)
    grid = fine.grid
    total = 0.0
    hx, hy = grid.hx, grid.hy
    for contour in find_contours(grid.values, 0.0):
        pts = np.column_stack([np.interp(contour[:, 1], np.arange(grid.xs.size), grid.xs),
                               np.interp(contour[:, 0], np.arange(grid.ys.size), grid.ys)])
        fx, fy = surf.grad(pts[:, 0], pts[:, 1])
        # one pixel into the region along the normal, measured in pixel units
        gx, gy = fx * hx, fy * hy
        g = np.hypot(gx, gy)
        probe = pts - region.side * np.column_stack([hx * gx / g, hy * gy / g])
        votes = [grid.label_at(px, py) == fine.label for px, py in probe]
        if np.mean(votes) < 0.5:
            continue
        total += _line_integral(surf, _project(surf, pts, c, region.box), c, region.box)
    return region.side * total


def _line_integral(surf: _Surface, pts: np.ndarray, c: float, box, rtol: float = 1e-9) -> float:
    """Trapezoid sum of dl / (x |grad f|), refined by inserting projected midpoints."""

    def trapezoid(p):
        fx, fy = surf.grad(p[:, 0], p[:, 1])
        w = 1.0 / (p[:, 0] * np.hypot(fx, fy))
        dl = np.hypot(*np.diff(p, axis=0).T)
        return float(np.sum(0.5 * (w[1:] + w[:-1]) * dl))

    val = trapezoid(pts)
    for _ in range(8):
        mids = _project(surf, 0.5 * (pts[1:] + pts[:-1]), c, box, edges=False)
        merged = np.empty((2 * len(pts) - 1, 2))
        merged[0::2], merged[1::2] = pts, mids
        pts = merged
        new = trapezoid(pts)
        done = abs(new - val) <= rtol * abs(new)
        val = new
        if done:
            break
    return val


def _project(surf: _Surface, pts: np.ndarray, c: float, box: tuple[float, float], edges: bool = True) -> np.ndarray:
    """Newton steps back onto f = c; points on the box edge move along the edge."""
    pts = pts.copy()
    on_x_edge = np.isclose(np.abs(pts[:, 0]), box[0]) & edges
    on_y_edge = np.isclose(np.abs(pts[:, 1]), box[1]) & ~on_x_edge & edges
    free = ~(on_x_edge | on_y_edge)
    for _ in range(4):
        f = surf(pts[:, 0], pts[:, 1]) - c
        fx, fy = surf.grad(pts[:, 0], pts[:, 1])
        g2 = fx**2 + fy**2
        pts[free, 0] -= (f * fx / g2)[free]
        pts[free, 1] -= (f * fy / g2)[free]
        pts[on_x_edge, 1] -= f[on_x_edge] / fy[on_x_edge]
        pts[on_y_edge, 0] -= f[on_y_edge] / fx[on_y_edge]
    return pts


# ---------------------------------------------------------------- cap periods


def _morse_frame(h: np.ndarray, sigma: int) -> np.ndarray:
    """L with L^T (sigma h / 2) L = I, by completing the square."""
    A = sigma * h / 2
    swap = abs(A[0, 0]) < 1e-12 * (1 + np.abs(A).max())
    if swap:
        A = A[::-1, ::-1]
    a, b, d = A[0, 0], A[0, 1], A[1, 1]
    delta = d - b * b / a
    if abs(delta) < 1e-14:
        raise ValueError("degenerate critical point")
    ra, rd = np.sqrt(complex(a)), np.sqrt(complex(delta))
    L = np.array([[1 / ra, -b / (a * rd)], [0, 1 / rd]], dtype=complex)
    if swap:
        L = L[::-1, :]
    return L


def _thimble_sum(surf, z0, nu, L, sigma, eps, ns, nt):
    s_nodes, s_w = np.polynomial.legendre.leggauss(ns)
    top = np.sqrt(eps)
    s_nodes = 0.5 * top * (s_nodes + 1)
    s_w = 0.5 * top * s_w
    th = 2 * np.pi * np.arange(nt) / nt
    w = L @ np.vstack([np.cos(th), np.sin(th)])  # directions, 2 x nt
    rho = np.full(nt, s_nodes[0], dtype=complex)
    detL = np.linalg.det(L)
    total = 0j
    min_abs_x = np.inf
    prev = s_nodes[0]
    for s, ws in zip(s_nodes, s_w):
        rho = rho * (s / prev)
        prev = s
        for _ in range(40):
            x = z0[0] + rho * w[0]
            y = z0[1] + rho * w[1]
            g = sigma * (surf(x, y) - nu) - s * s
            fx, fy = surf.grad(x, y)
            dg = sigma * (fx * w[0] + fy * w[1])
            step = g / dg
            rho = rho - step
            if np.abs(step).max() <= 1e-12 * np.abs(rho).max():
                break
        # evaluating f next to its critical point cancels; accept rounding-level residuals
        if np.abs(g).max() > 1e-10 * (1 + abs(nu)):
            raise ValueError("thimble continuation failed; reduce eps")
        x = z0[0] + rho * w[0]
        y = z0[1] + rho * w[1]
        fx, fy = surf.grad(x, y)
        dg = sigma * (fx * w[0] + fy * w[1])
        integrand = detL * rho * 2 * s / (dg * x)
        total += ws * integrand.mean() * 2 * np.pi
        min_abs_x = min(min_abs_x, np.abs(x).min())
    return total, min_abs_x


def default_eps(cls: SingularityClass, lam: Deformation, point: CriticalPoint) -> float:
    others = [abs(v - point.value) for v in
              [p.value for p in critical_points(cls, lam) if p != point] + list(boundary_critical_values(cls, lam))]
    gap = min(others, default=1.0)
    scale = abs(point.x) ** 2 * min(np.abs(np.linalg.eigvals(np.array(point.hessian)))) / 2
    return 0.05 * min(gap, scale)


def cap_period(
    cls: SingularityClass,
    lam: Deformation,
    point: CriticalPoint | int,
    eps: float | None = None,
    tol: float = 1e-9,
) -> complex:
    """Integral of dx dy / x over the Lefschetz thimble of ``point`` up to level nu + sigma eps.

    For a real extremum sigma is the sign of the Hessian and the thimble is
    the real lens {sigma (f - nu) <= eps}; the value is then real.  For saddles
    and complex critical points the thimble leaves R^2 and the value is complex.
    """
    _planar_only(cls)
    if isinstance(point, int):
        point = critical_points(cls, lam)[point]
    if abs(point.x) < 1e-9:
        raise PoleError("lens at x = 0: the critical point lies on S")
    h = np.array(point.hessian, dtype=complex)
    if abs(np.linalg.det(h)) < 1e-12:
        raise ValueError("degenerate critical point")
    sigma = -1 if point.kind == "max" else 1
    L = _morse_frame(h, sigma)
    if point.kind in ("min", "max"):
        L = L.real.astype(complex)
        if np.linalg.det(L).real < 0:
            L = L[:, ::-1]
    eps = default_eps(cls, lam, point) if eps is None else float(eps)
    surf = _surface(cls, lam)
    z0 = (point.x, point.y)
    ns, nt = 24, 48
    prev, min_x = _thimble_sum(surf, z0, point.value, L, sigma, eps, ns, nt)
    for _ in range(5):
        ns, nt = 2 * ns, 2 * nt
        cur, min_x = _thimble_sum(surf, z0, point.value, L, sigma, eps, ns, nt)
        if abs(cur - prev) <= tol:
            break
        prev = cur
    if min_x < 0.25 * abs(point.x):
        raise PoleError("lens touching S: reduce eps")
    if abs(cur) <= 10 * tol:
        raise ValueError(f"cap period {cur} is not distinguishable from zero at tol {tol}")
    return complex(cur)


# ---------------------------------------------------------------- series and continuity


@dataclass(frozen=True)
class VolumeSeries:
    c: tuple[float, ...]
    values: tuple[float, ...]
    derivatives: tuple[float, ...]
    crossed: tuple[float, ...]
    jumps: tuple[float, ...]
    side: int = 1

    def monotone(self) -> bool:
        d = np.diff(self.values)
        return bool((d >= -1e-9).all() or (d <= 1e-9).all())

    def to_json(self) -> dict:
        return {
            "c": list(self.c),
            "V": list(self.values),
            "dV_dc": list(self.derivatives),
            "critical_values_crossed": list(self.crossed),
            "continuity_gaps": list(self.jumps),
            "side": self.side,
        }


def total_volume_at(cls, lam, c, side=1, box=None, tol=1e-10) -> float:
    return total_volume(region_components(cls, lam, c, side, box), tol)


def continuity_gap(cls, lam, nu: float, side: int = 1, delta: float | None = None, box=None,
                   extrapolate: bool = True) -> float:
    """Size of the jump of the total S-avoiding volume at nu.

    With d(h) = V(nu + h) - V(nu - h), returns |2 d(delta/2) - d(delta)|, the
    linear extrapolation of d to h = 0; a finite one-sided slope of V then
    drops out.  ``extrapolate=False`` returns |d(delta)| itself.
    Only meaningful when no S-avoiding component merges into an S-touching
    one at nu (extrema, or saddles joining two S-avoiding pieces).
    """
    delta = 1e-7 * (1 + abs(nu)) if delta is None else delta
    box = box or working_box(cls, lam, [nu - delta, nu + delta])

    def diff(h):
        return total_volume_at(cls, lam, nu + h, side, box) - total_volume_at(cls, lam, nu - h, side, box)

    d = diff(delta)
    return abs(2 * diff(delta / 2) - d) if extrapolate else abs(d)


def volume_series(cls: SingularityClass, lam: Deformation, cs, side: int = 1, tol: float = 1e-10) -> VolumeSeries:
    cs = [float(c) for c in cs]
    box = working_box(cls, lam, [min(cs), max(cs)])
    crit = real_critical_values(cls, lam)
    vals, ders = [], []
    for c in cs:
        if distance_to_critical(cls, lam, c) <= 1e-9 * (1 + abs(c)):
            c += 1e-7
        regions = region_components(cls, lam, c, side, box)
        vals.append(total_volume(regions, tol))
        ders.append(float(sum(gelfand_leray_derivative(r) for r in regions if not r.touches_S)))
    crossed = [v for v in crit if min(cs) < v < max(cs)]
    jumps = [continuity_gap(cls, lam, v, side, box=box) for v in crossed]
    return VolumeSeries(tuple(cs), tuple(vals), tuple(ders), tuple(crossed), tuple(jumps), side)


# ---------------------------------------------------------------- ramification probe


@dataclass(frozen=True)
class ProbeReport:
    cls: SingularityClass
    lam: Deformation
    verdict: str
    reason: str
    nudged: bool = False
    region: RegionSpec | None = None
    pi: CycleVector | None = None
    obstruction: object = None
    critical: CriticalPoint | None = None
    period: complex | None = None
    increment: complex | None = None
    volume_at_zero: float = 0.0

    def to_json(self) -> dict:
        return {
            "class": self.cls.label,
            "lambda": self.lam.to_json(),
            "verdict": self.verdict,
            "reason": self.reason,
            "nudged": self.nudged,
            "region": self.region.to_json() if self.region else None,
            "pi": None if self.pi is None else {"coeffs": list(self.pi.coeffs),
                                                 "coupling": None if self.pi.coupling is None else list(self.pi.coupling)},
            "obstruction": self.obstruction.to_json() if self.obstruction else None,
            "critical_point": self.critical.to_json() if self.critical else None,
            "cap_period": None if self.period is None else [self.period.real, self.period.imag],
            "increment_per_loop": None if self.increment is None else [self.increment.real, self.increment.imag],
            "volume_at_zero": self.volume_at_zero,
        }


def _generator_points(cls: SingularityClass, lam: Deformation, region: RegionSpec) -> dict[int, CriticalPoint]:
    """Critical point attached to each cap generator (1-based)."""
    pts = critical_points(cls, lam)
    if cls.family is Family.B:
        return {i + 2: p for i, p in enumerate(pts)}
    if cls.family is Family.C:
        return {1: pts[0]}
    inside = _enclosed(region, pts)
    if inside is None:
        return {}
    other = [p for p in pts if p != inside]
    return {1: inside, 2: other[0]}


def _enclosed(region: RegionSpec, pts) -> CriticalPoint | None:
    found = [p for p in pts if p.kind in ("min", "max")
             and side_value(region, p.x.real, p.y.real) < 0
             and region.grid.label_at(p.x.real, p.y.real) == region.label]
    if not found:
        return None
    return max(found, key=lambda p: abs(p.value.real - region.c))


def petrovsky_vector(cls: SingularityClass, lam: Deformation, region: RegionSpec) -> CycleVector:
    """Class of the real level boundary of an S-avoiding region in the cap/tube basis.

    An oval is the vanishing cycle of the extremum it encloses.  A region
    reaching the box edge is bounded by non-compact level pieces that lie
    outside the span; they are represented by their coupling to one cap.
    """
    model = eta_matrix(cls)
    pts = critical_points(cls, lam)
    gens = _generator_points(cls, lam, region)
    if cls.family is Family.C:
        return CycleVector.outside_span(model.dim, [1] + [0] * (model.dim - 1))
    inside = _enclosed(region, pts) if region.bounded else None
    if inside is not None:
        g = next(i for i, p in gens.items() if p == inside)
        return CycleVector.basis(model.dim, g)
    if cls.family is Family.F4:
        raise ValueError("F4 S-avoiding regions are expected to be compact")
    # nearest cap to the finite end of the region along x
    cols = np.flatnonzero((region.grid.labels == region.label).any(axis=0))
    xs = region.grid.xs[cols]
    end = xs.min() if xs.max() >= region.box[0] - region.grid.hx else xs.max()
    g = min(gens, key=lambda i: abs(gens[i].x.real - end))
    cpl = [0] * model.dim
    cpl[g - 1] = 1
    return CycleVector.outside_span(model.dim, cpl)


def is_generic(cls: SingularityClass, lam: Deformation) -> bool:
    """Morse with distinct critical values, and no critical point near S."""
    pts = critical_points(cls, lam)
    spread = max([abs(p.x) for p in pts] + [abs(p.y) for p in pts] + [1e-300])
    vals = [p.value for p in pts] + list(boundary_critical_values(cls, lam))
    vscale = max([abs(v) for v in vals] + [1e-300])
    for p in pts:
        if abs(np.linalg.det(np.array(p.hessian))) < 1e-10 or abs(p.x) < 1e-2 * spread:
            return False
    return all(abs(a - b) > 1e-6 * vscale for i, a in enumerate(vals) for b in vals[i + 1:])


def critical_gap(cls: SingularityClass, lam: Deformation) -> float:
    """Smallest distance between critical values (interior and boundary) and the level 0."""
    vals = [0j] + [p.value for p in critical_points(cls, lam)] + list(boundary_critical_values(cls, lam))
    return min(abs(a - b) for i, a in enumerate(vals) for b in vals[i + 1:])


def generic_representative(cls: SingularityClass, lam: Deformation, seed: int = 0) -> tuple[Deformation, bool]:
    """A point of the same chamber where cap periods are computable.

    Perturbs lam inside its chamber until ``is_generic`` holds, then applies
    the quasi-homogeneous rescaling that brings the smallest critical-value
    gap to about 1.  Returns (representative, moved).
    """
    sig = signature_of(cls, lam)
    rep, moved = lam, False
    if not is_generic(cls, lam):
        rng = np.random.default_rng(seed)
        norm = weighted_norm(cls, lam) or 1.0
        ws = [float(w) for w in cls.weights]
        found = None
        for j in range(3, 41):
            for _ in range(4):
                step = [norm**w * 2.0**-j * rng.choice([-1, 1]) * rng.uniform(0.5, 1) for w in ws]
                cand = Deformation([v + Fraction(d) for v, d in zip(lam.lam, step)])
                if (wall_values(cls, cand).off_walls and signature_of(cls, cand) == sig
                        and is_generic(cls, cand)):
                    found = cand
                    break
            if found:
                break
        if found is None:
            raise ValueError(f"no generic point found near {lam.to_json()} in its chamber")
        rep, moved = found, True
    gap = critical_gap(cls, rep)
    tau = Fraction((1 / gap) ** (1 / weight_denominator(cls))).limit_denominator(16)
    if tau != 1 and tau > 0:
        scaled = rescale(cls, rep, tau)
        if signature_of(cls, scaled) == sig:
            rep, moved = scaled, True
    return rep, moved


def ramification_probe(cls: SingularityClass, lam: Deformation, component: int = 0, tol: float = 1e-9) -> ProbeReport:
    """Does each loop around a critical value add a fixed nonzero period to V?

    Moves lam to a generic representative of its chamber, picks the
    ``component``-th S-avoiding region at c = 0, expresses its boundary in the
    cap/tube basis, searches for a transvection that grows it, and evaluates
    the cap period at the matching critical point.
    """
    _planar_only(cls)
    if not wall_values(cls, lam).off_walls:
        raise WallError("degenerate level set: lam lies on the discriminant")
    rep, moved = generic_representative(cls, lam)
    regions = s_avoiding_regions(cls, rep)
    if not regions:
        box = working_box(cls, rep, [0.0])
        v = total_volume_at(cls, rep, 0.0, 1, box) + total_volume_at(cls, rep, 0.0, -1, box)
        return ProbeReport(cls, rep, NO_OBSTRUCTION, "every real level component meets S or the level is empty",
                           moved, volume_at_zero=v)
    region = regions[component]
    model = eta_matrix(cls)
    pi = petrovsky_vector(cls, rep, region)
    vol = volume_integral(region)
    gens = _generator_points(cls, rep, region)
    allowed = set(range(1, model.dim + 1))
    while True:
        verdict = obstruction(model, pi, allowed=allowed)
        if not verdict.obstructed:
            return ProbeReport(cls, rep, NO_OBSTRUCTION, "no transvection couples to the real cycle",
                               moved, region, pi, verdict, volume_at_zero=vol)
        point = gens[verdict.generator]
        try:
            period = cap_period(cls, rep, point, tol=tol)
        except PoleError:
            allowed.discard(verdict.generator)
            continue
        inc = verdict.coupling * period
        ok = abs(period) > 10 * tol
        return ProbeReport(cls, rep, NON_ALGEBRAIC if ok else NO_OBSTRUCTION,
                           "each loop adds coupling times the cap period" if ok else "zero period",
                           moved, region, pi, verdict, point, period, inc, vol)
