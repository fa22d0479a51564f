from fractions import Fraction

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st
from skimage import measure

from boundary_lacunas.algebra import sturm_count
from boundary_lacunas.atlas import is_lacuna
from boundary_lacunas.curvetopo import stabilized_summary, topology
from boundary_lacunas.families import (
    WallError,
    Deformation,
    Family,
    off_wall_sample,
    parse_class,
    plane_polynomial,
    rescale,
    weighted_norm,
)

CLASSES = [parse_class(f, k, s) for f, k in [("B", 2), ("B", 3), ("B", 4), ("B", 5), ("C", 2), ("C", 3),
                                              ("C", 4), ("C", 5), ("F4", None)] for s in "+-"]


def _normalized(cls, lam):
    d = 6 if cls.family is Family.F4 else cls.k
    tau = Fraction(1 / weighted_norm(cls, lam) ** (1 / d)).limit_denominator(1000)
    return rescale(cls, lam, tau)


def grid_oracle(cls, lam, radius=6.0, n=1201):
    """(compact, meets_S) per zero-level contour traced on a fine grid."""
    f = plane_polynomial(cls, lam)
    xs = np.linspace(-radius, radius, n)
    X, Y = np.meshgrid(xs, xs)
    out = []
    for c in measure.find_contours(f(X, Y), 0.0):
        x = np.interp(c[:, 1], np.arange(n), xs)
        out.append((bool(np.allclose(c[0], c[-1])), bool(np.any(np.diff(np.sign(x)) != 0))))
    return sorted(out)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(CLASSES), st.integers(0, 10**6))
def test_topology_matches_grid_oracle(cls, seed):
    lam = _normalized(cls, off_wall_sample(cls, seed=seed)[0])
    topo = topology(cls, lam)
    assert sorted((c.compact, c.meets_S) for c in topo.components) == grid_oracle(cls, lam)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(CLASSES), st.integers(0, 10**6))
def test_boundary_points_count_real_roots_on_S(cls, seed):
    lam = off_wall_sample(cls, seed=seed)[0]
    topo = topology(cls, lam)
    on_s = plane_polynomial(cls, lam).restrict_x0()
    expected = sturm_count(on_s) if on_s.degree > 0 else 0
    assert sum(c.boundary_points for c in topo.components) == expected


def test_empty_level_is_lacuna():
    cls = parse_class("B", 2, "+")
    topo = topology(cls, Deformation([1, 0]))  # x^2 + y^2 + 1
    assert topo.empty and is_lacuna(topo)


def test_disk_crossing_S_is_lacuna_and_offset_disk_is_not():
    cls = parse_class("B", 2, "+")
    crossing = topology(cls, Deformation([-1, 0]))
    offset = topology(cls, Deformation([Fraction(3, 4), -2]))  # (x-1)^2 + y^2 - 1/4
    assert crossing.all_meet_S and is_lacuna(crossing)
    assert len(offset.components) == 1 and offset.components[0].compact
    assert not offset.components[0].meets_S and not is_lacuna(offset)


def test_c_curve_components_are_graphs_over_y():
    # xy + (y - 1)(y - 2): x = -(y-1)(y-2)/y, two arcs, one per half-plane
    cls = parse_class("C", 2, "+")
    topo = topology(cls, Deformation([2, -3]))
    assert len(topo.components) == 2
    assert sorted(c.side for c in topo.components) == [-1, 1]


def test_stabilization_keeps_planar_answer_on_matching_side():
    cls = parse_class("B", 4, "+")
    lam = Deformation([Fraction(1, 2500), 0, Fraction(1, 20), 0])
    planar = topology(cls, lam)
    summ = stabilized_summary(cls.with_stab(2, 0), lam)
    assert is_lacuna(summ) == is_lacuna(planar)


def test_topology_json_shape():
    cls = parse_class("F4", None, "-")
    lam = off_wall_sample(cls, seed=2)[0]
    data = topology(cls, lam).to_json()
    assert set(data) == {"empty", "components", "pq", "boundary_roots"}


def test_b2_oval_through_S_and_b2_minus_branches():
    oval = topology(parse_class("B", 2, "+"), Deformation([-1, 0]))  # y^2 = 1 - x^2
    assert [(c.compact, c.meets_S, c.boundary_points) for c in oval.components] == [(True, True, 2)]
    hyper = topology(parse_class("B", 2, "-"), Deformation([1, 0]))  # y^2 = x^2 + 1
    assert [(c.compact, c.meets_S) for c in hyper.components] == [(False, True), (False, True)]


def test_f4_cubic_branch_meets_S_once():
    # x^2 + y^3 + 5 = 0 crosses S at its turning point y = -5^(1/3)
    topo = topology(parse_class("F4", None, "+"), Deformation([5, 0, 0, 0]))
    assert [(c.compact, c.meets_S, c.boundary_points) for c in topo.components] == [(False, True, 1)]


@settings(max_examples=30, deadline=None)
@given(st.sampled_from("+-"), st.integers(-4, 4), st.integers(-4, 4))
def test_f4_turning_points_on_S_match_grid(sign, l0, l2):
    # with l1 = l3 = 0 every crossing with S is a turning point of the curve
    cls = parse_class("F4", None, sign)
    lam = Deformation([l0, 0, l2, 0])
    try:
        topo = topology(cls, lam)
    except WallError:
        assume(False)
    assert sorted((c.compact, c.meets_S) for c in topo.components) == grid_oracle(cls, lam)


def test_f4_mixed_turning_and_transversal_crossings():
    # b = y - 1 vanishes at the root y = 1 of g = y^3 - 4y + 3
    cls = parse_class("F4", None, "+")
    lam = Deformation([3, 1, -4, -1])
    topo = topology(cls, lam)
    assert sorted((c.compact, c.meets_S) for c in topo.components) == grid_oracle(cls, lam)
    assert sum(c.boundary_points for c in topo.components) == 3


def test_c4_stabilized_keeps_avoiding_branch():
    # g = (y - 1)(y - 2)(y^2 + 1): both roots positive, the y < 0 branch avoids S
    cls = parse_class("C", 4, "+")
    lam = Deformation([2, -3, 3, -3])
    assert topology(cls, lam).pq.pos == 2
    for r in (1, 2):
        summ = stabilized_summary(cls.with_stab(r, 0), lam)
        assert summ.component_count == 2 and not summ.all_components_meet_S
