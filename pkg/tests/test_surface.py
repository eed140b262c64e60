import math
from fractions import Fraction

import numpy as np
import pytest

from exsys.generators import GeneratorSpec, gen_flat_rectangular, gen_knot_tube, gen_standard_torus, gen_twisted_cylinder, generate, torus_knot, zeta_curves
from exsys.surface import HomologyLabeling, MeshError, TorusMesh, gauss_linking, linking_number, loop_class, read_mesh, systole_in_class, write_mesh


@pytest.fixture(scope="module")
def torus():
    return gen_standard_torus(res=16)


def test_torus_is_valid_torus(torus):
    torus.validate()
    assert torus.euler_characteristic() == 0
    assert torus.side_u == "interior"


def test_area_close_to_smooth_torus():
    m = gen_standard_torus(res=48)
    assert m.area() == pytest.approx(4 * math.pi**2 * 2, rel=0.02)


def test_text_round_trip(torus, tmp_path):
    p = tmp_path / "t.msh"
    write_mesh(torus, p)
    back = read_mesh(p)
    assert back.vertices == torus.vertices and back.triangles == torus.triangles
    assert back.dumps() == torus.dumps()


def test_bad_mesh_rejected(torus):
    bad = TorusMesh(torus.vertices, torus.triangles[:-1], torus.basis)
    with pytest.raises(MeshError):
        bad.validate()
    with pytest.raises(MeshError):
        TorusMesh.loads("vertices 1\n0 0\n")


def test_basis_classes(torus):
    lab = HomologyLabeling.build(torus)
    cu, cv = (loop_class(b, lab) for b in torus.basis)
    assert abs(cu[0] * cv[1] - cu[1] * cv[0]) == 1


def test_meridian_systole(torus):
    # res=16 gives res_t=8: the meridian is a regular octagon of radius 1
    length, loop = systole_in_class(torus, (1, 0))
    assert length == pytest.approx(8 * 2 * math.sin(math.pi / 8), rel=1e-9)
    assert loop_class(loop, HomologyLabeling.build(torus)) in [(1, 0), (-1, 0)]


def test_twisted_cylinder_modulus():
    m = gen_twisted_cylinder(3)
    lab = HomologyLabeling.build(m)
    su, _ = systole_in_class(m, (1, 0), lab)
    sv, _ = systole_in_class(m, (0, 1), lab)
    assert 3 <= su / sv <= 6


def test_hopf_link():
    t = np.linspace(0, 2 * np.pi, 40, endpoint=False)
    a = np.c_[np.cos(t), np.sin(t), 0 * t]
    b = np.c_[1 + np.cos(t), 0 * t, np.sin(t)]
    assert abs(linking_number(a, b)) == 1
    assert gauss_linking(a, b) == pytest.approx(linking_number(a, b), abs=0.05)
    assert linking_number(a, b + [10, 0, 0]) == 0


def test_knot_tube_linking():
    m = gen_knot_tube(3)
    z1, z2 = zeta_curves(m)
    assert linking_number(z1, z2) == 6


def test_torus_knot_lies_on_torus():
    K, N, _ = torus_knot(3, -2)
    rho = np.hypot(K[:, 0], K[:, 1])
    assert np.allclose(np.hypot(rho - 2, K[:, 2]), 1)
    assert np.allclose(np.linalg.norm(N, axis=1), 1)


def test_flat_rectangular_area():
    m = gen_flat_rectangular(k=2)
    assert m.area() == pytest.approx(32)
    assert m.granularity() > 0


def test_generate_dispatch():
    m = generate(GeneratorSpec("twisted-cylinder", {"n": 2}, seed=4))
    assert m.meta["seed"] == 4
    with pytest.raises(ValueError):
        generate(GeneratorSpec("sphere"))


def test_scaled_and_translated(torus):
    s = torus.scaled(Fraction(1, 2))
    assert s.area() == pytest.approx(torus.area() / 4)
    t = torus.translated((1, 0, 0))
    assert t.area() == pytest.approx(torus.area())
