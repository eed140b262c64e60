from fractions import Fraction as F

import pytest

from exsys.generators import gen_twisted_cylinder
from exsys.suites import SUITES, enumerate_loops, run_suite


@pytest.fixture(scope="module")
def small():
    return {"twisted-2": (gen_twisted_cylinder(2), F(1, 3))}


def test_enumeration_counts_small_box():
    # embedded closed lattice loops up to orientation and base point
    loops = list(enumerate_loops(n=2, max_len=4))
    assert len(loops) == 6


@pytest.mark.parametrize(
    "name, kw",
    [
        ("boundary", {"grid": 2, "random_cases": 50}),
        ("additivity", {"cases": 50}),
        ("decomposition", {"cases": 50}),
        ("lattice-filling", {"max_len": 6, "random_cases": 20, "oracle": True}),
    ],
)
def test_lattice_suites_pass(name, kw):
    r = run_suite(name, **kw)
    assert r.passed, r.repro
    assert r.line().split("\t")[1] == "PASS"


@pytest.mark.parametrize("name", ["incidence", "homology", "averaging"])
def test_mesh_suites_pass(name, small):
    kw = {"meshes": small}
    if name == "averaging":
        kw["samples"] = 300
    if name == "incidence":
        kw["cases"] = 100
    r = run_suite(name, **kw)
    assert r.passed, r.repro


def test_refined_filling_suite(small):
    r = run_suite("refined-filling", cases=small)
    assert r.passed, r.repro
    assert r.cases > 0


def test_suite_names():
    assert set(SUITES) == {"boundary", "additivity", "decomposition", "homology", "incidence", "lattice-filling", "refined-filling", "averaging"}
