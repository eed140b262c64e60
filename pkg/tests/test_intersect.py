from fractions import Fraction as F

import numpy as np
import pytest

from exsys.generators import gen_flat_rectangular, gen_standard_torus, gen_twisted_cylinder
from exsys.surface import HomologyLabeling
from exsys.surface.intersect import GeneralPositionError, brute_force_totals, intersect_lattice, intersection_report, point_side
from exsys.surface.translation import section_stats, spacing_for, translation_search


OFF = (F(1, 7), F(2, 9), F(3, 11))


@pytest.fixture(scope="module")
def torus_cut():
    m = gen_standard_torus(res=24)
    return m, intersect_lattice(m, F(3, 4), OFF)


@pytest.fixture(scope="module")
def frame():
    return gen_flat_rectangular(2)


def test_surface_inside_one_cube_gives_empty_J(frame):
    d = intersect_lattice(frame, 8, (F(-1, 3), F(-1, 7), F(-1, 11)))
    assert d.curves == [] and d.n_hits == 0 and d.total_length == 0


def test_single_plane_cuts_frame_into_two_meridians(frame):
    d = intersect_lattice(frame, 4, (F(37, 25), F(-1, 2), F(-3, 2)))
    assert len(d.curves) == 2 and d.n_hits == 0
    lab = HomologyLabeling.build(frame)
    classes = sorted(abs(x) for c in d.curves for x in d.path_class(c.points, lab))
    assert classes == [0, 0, 1, 1]
    # each arm of the frame has a unit-square cross-section
    assert [c.length for c in d.curves] == pytest.approx([4, 4])


def test_vertex_on_plane_is_rejected(frame):
    with pytest.raises(GeneralPositionError):
        intersect_lattice(frame, 1, (0, F(1, 3), F(1, 3)))


def test_matches_float_brute_force(torus_cut):
    m, d = torus_cut
    length, count = brute_force_totals(m, F(3, 4), OFF)
    assert d.n_hits == count
    assert d.total_length == pytest.approx(length, rel=1e-9)
    lab = HomologyLabeling.build(m)
    assert "curves" in intersection_report(d, lab).lower()


def test_refined_squares_satisfy_euler():
    m = gen_twisted_cylinder(3)
    d = intersect_lattice(m, F(1, 4), OFF)
    cx = d.refined
    assert d.n_hits > 0
    assert cx.squares
    assert all(sub.euler_ok() for sub in cx.squares.values())


def test_classes_independent_of_snapping():
    m = gen_twisted_cylinder(2)
    lab = HomologyLabeling.build(m)
    d = intersect_lattice(m, F(1, 3), OFF)
    for c in d.curves:
        assert d.path_class(c.points, lab) == d.path_class(c.points, lab, alt=True)


def test_point_side_of_torus():
    m = gen_standard_torus(res=16)
    assert point_side(m, (F(2), F(1, 10), F(1, 10))) == "interior"
    assert point_side(m, (F(1, 10), F(1, 10), F(1, 10))) == "exterior"


def test_section_stats_agree_with_exact(torus_cut):
    m, exact = torus_cut
    h = F(3, 4)
    P = (m.float_vertices() - np.array([float(x) for x in OFF])) / float(h)
    length, count = section_stats(P, np.array(m.triangles), (0.0, 0.0, 0.0))
    assert count == exact.n_hits
    assert length * float(h) == pytest.approx(exact.total_length, rel=1e-6)


def test_translation_search_small():
    m = gen_twisted_cylinder(2)
    off, stats, _ = translation_search(m, 2.0, samples=200, rng_seed=1)
    assert stats.samples == 200 and stats.qualifying > 0
    assert len(off) == 3
    assert spacing_for(m.area(), 2.0) > 0
