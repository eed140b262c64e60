from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exsys.cubical import Chain, boundary, cell_boundary, cells_in_box, cube, dump_chain, edge, load_chain, norms, square, vertex

coords = st.tuples(*[st.integers(-3, 3)] * 3)


def test_edge_boundary_is_head_minus_tail():
    e = edge((0, 0, 0), 0)
    assert cell_boundary(e) == {vertex((1, 0, 0)): 1, vertex((0, 0, 0)): -1}


def test_square_boundary_is_counterclockwise():
    q = square((0, 0, 0), (0, 1))
    b = boundary(Chain.of(q))
    assert b[edge((0, 0, 0), 0)] == 1
    assert b[edge((1, 0, 0), 1)] == 1
    assert b[edge((0, 1, 0), 0)] == -1
    assert b[edge((0, 0, 0), 1)] == -1


@pytest.mark.parametrize("dim", [2, 3])
def test_boundary_squared_exhaustive_small_box(dim):
    for c in cells_in_box((0, 0, 0), (2, 2, 2), dim):
        assert not boundary(boundary(Chain.of(c)))


@given(st.lists(st.tuples(coords, st.integers(-4, 4)), max_size=8))
@settings(max_examples=60, deadline=None)
def test_boundary_squared_random_cubes(terms):
    c = Chain(3, [(cube(p), k) for p, k in terms])
    assert not boundary(boundary(c))


def test_chain_arithmetic_and_norms():
    a = Chain(1, {edge((0, 0, 0), 0): 2, edge((0, 0, 0), 1): -3})
    b = Chain.of(edge((0, 0, 0), 0), -2)
    assert norms(a) == (5, 3)
    assert a + b == Chain.of(edge((0, 0, 0), 1), -3)
    assert (a - a) == Chain.zero(1)
    with pytest.raises(ValueError):
        Chain(2, {edge((0, 0, 0), 0): 1})


def test_chain_text_round_trip():
    h = Fraction(1, 3)
    c = Chain(2, {square((1, -2, 0), (0, 2), h): 4, square((0, 0, 5), (1, 2), h): -1})
    assert load_chain(dump_chain(c), h) == c
