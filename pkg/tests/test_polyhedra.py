import dataclasses
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from superquant_toolkit.cones import service as cones_service
from superquant_toolkit.cones.service import ConeRegion, Constraint, NotSimplicial, Relation
from superquant_utils import polyhedra
from superquant_utils.polyhedra import strict, weak

F = Fraction


def _vec(*values):
    return tuple(F(v) for v in values)


# needs y <= -2 and y >= 1/4 once x is eliminated
NARROW_INFEASIBLE = [
    strict((3, -3)),
    weak((3, 2), -3),
    weak((-3, -3), 1),
    weak((-3, 2), 2),
    weak((1, -1), 3),
    weak((0, -3), -1),
]


@pytest.mark.parametrize("system,dim", [
    (NARROW_INFEASIBLE, 2),
    ([strict((1,)), weak((-1,))], 1),
    ([strict((1, 0)), strict((-1, 0))], 2),
    ([weak((1, 1), -1), weak((-1, -1), -1)], 2),
    ([weak((0, 0), -1)], 2),
    ([strict((0, 0, 0))], 3),
])
def test_contradictory_systems_have_no_point(system, dim):
    assert polyhedra.find_point(system, dim) is None
    assert not polyhedra.is_feasible(system, dim)


def test_touching_half_planes_meet_only_on_the_line():
    system = [weak((1, 0)), weak((-1, 0))]
    point = polyhedra.find_point(system, 2)
    assert point is not None and point[0] == 0
    assert polyhedra.find_point(system + [strict((1, 0))], 2) is None


def test_open_orthant_witness_is_strictly_inside():
    point = polyhedra.find_point([strict((1, 0, 0)), strict((0, 1, 0)), strict((0, 0, 1))], 3)
    assert all(a > 0 for a in point)


def test_equalities_pin_the_witness():
    system = polyhedra.equality((1, -1), 0) + polyhedra.equality((0, 1), F(-3, 2))
    assert polyhedra.find_point(system, 2) == _vec(F(3, 2), F(3, 2))


def test_row_length_is_checked():
    with pytest.raises(ValueError):
        polyhedra.find_point([weak((1, 0))], 3)
    with pytest.raises(ValueError):
        polyhedra.cone_generators([(1, 0)], 3)


_coefficient = st.integers(-3, 3)
_row = st.tuples(st.tuples(_coefficient, _coefficient, _coefficient), _coefficient, st.booleans())


@given(st.lists(_row, min_size=1, max_size=7))
@settings(max_examples=300, deadline=None)
def test_witness_satisfies_every_row(rows):
    system = [polyhedra.Inequality(_vec(*c), F(b), s) for c, b, s in rows]
    point = polyhedra.find_point(system, 3)
    assert (point is not None) == polyhedra.is_feasible(system, 3)
    if point is not None:
        assert all(row.holds(point) for row in system)


@given(st.tuples(_coefficient, _coefficient), st.lists(_row.map(lambda r: (r[0][:2], r[1], r[2])), max_size=7))
@settings(max_examples=300, deadline=None)
def test_systems_built_around_a_point_are_feasible(center, rows):
    center = _vec(*center)
    system = []
    for c, b, s in rows:
        row = polyhedra.Inequality(_vec(*c), F(b), s)
        value = row.value(center)
        if value < 0:
            row = polyhedra.Inequality(tuple(-a for a in row.coeffs), -row.constant, s)
        elif value == 0:
            row = polyhedra.Inequality(row.coeffs, row.constant, False)
        system.append(row)
    point = polyhedra.find_point(system, 2)
    assert point is not None
    assert all(row.holds(point) for row in system)


def test_orthant_generators():
    lines, rays = polyhedra.cone_generators([(1, 0, 0), (0, 1, 0), (0, 0, 1)], 3)
    assert lines == []
    assert rays == [_vec(0, 0, 1), _vec(0, 1, 0), _vec(1, 0, 0)]


def test_square_pyramid_has_four_rays():
    lines, rays = polyhedra.cone_generators([(1, 0, 1), (-1, 0, 1), (0, 1, 1), (0, -1, 1)], 3)
    assert lines == []
    assert rays == [_vec(-1, -1, 1), _vec(-1, 1, 1), _vec(1, -1, 1), _vec(1, 1, 1)]


def test_half_plane_has_a_line():
    lines, rays = polyhedra.cone_generators([(F(1, 2), 0), (0, 0)], 2)
    assert [tuple(abs(a) for a in line) for line in lines] == [_vec(0, 1)]
    assert len(rays) == 1 and rays[0][0] > 0


def test_non_simplicial_cell_is_rejected(su211_cells):
    generic = su211_cells[0]
    pyramid = ConeRegion("pyramid", tuple(
        Constraint(f"h{i}", _vec(*row), Relation.GE) for i, row in
        enumerate([(1, 0, 1, 0), (-1, 0, 1, 0), (0, 1, 1, 0), (0, -1, 1, 0)])), 4)
    frame = (_vec(1, 0, 0, 0), _vec(0, 1, 0, 0), _vec(0, 0, 1, 0))
    with pytest.raises(NotSimplicial):
        cones_service.extreme_rays(dataclasses.replace(generic, region=pyramid, subspace=frame))


def test_cells_are_not_empty(su211_ctx, su211_cells):
    assert not any(cell.region.is_empty() for cell in su211_cells)
    ctx = su211_ctx
    assert not cones_service.parameter_set_C(ctx.ps, ctx.rs, ctx.rf).is_empty()


def test_contradictory_region_is_empty():
    squeezed = ConeRegion("squeezed", (Constraint("a", _vec(1, 0), Relation.GT),
                                       Constraint("b", _vec(1, 0), Relation.LT)), 2)
    assert squeezed.is_empty()
    shifted = ConeRegion("shifted", (Constraint("a", _vec(1, 1), Relation.GE, offset=F(-1)),
                                     Constraint("b", _vec(1, 1), Relation.LT)), 2)
    assert shifted.is_empty()
