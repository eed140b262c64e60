import pytest

from exsys.cli import instance_seeds, main


@pytest.fixture(scope="module")
def mesh_file(tmp_path_factory):
    p = tmp_path_factory.mktemp("cli") / "tw.msh"
    assert main(["gen", "--family", "twisted-cylinder", "--n", "2", "--out", str(p)]) == 0
    return p


def test_gen_writes_mesh(mesh_file):
    assert mesh_file.read_text().startswith("torus-mesh v1")


def test_pipeline_and_verify(mesh_file, tmp_path):
    out = tmp_path / "run"
    assert main(["pipeline", "--mesh", str(mesh_file), "--spacing", "1/4", "--out", str(out)]) == 0
    cert = tmp_path / "run.cert"
    assert cert.exists() and (tmp_path / "run.report").exists()
    assert main(["verify-certificate", str(cert), str(mesh_file)]) == 0

    bad = tmp_path / "bad.cert"
    text = cert.read_text()
    assert "kind = short-u" in text
    lines = [("n_hits = 999" if l.startswith("n_hits") else l) for l in text.splitlines()]
    bad.write_text("\n".join(lines) + "\n")
    assert main(["verify-certificate", str(bad), str(mesh_file)]) == 4


def test_intersect_report(mesh_file, tmp_path):
    out = tmp_path / "cut.txt"
    assert main(["intersect", "--mesh", str(mesh_file), "--spacing", "1/3", "--out", str(out)]) == 0
    assert "hits" in out.read_text()


def test_exit_codes(tmp_path):
    assert main(["pipeline", "--mesh", str(tmp_path / "missing.msh")]) == 5
    junk = tmp_path / "junk.msh"
    junk.write_text("not a mesh\n")
    assert main(["pipeline", "--mesh", str(junk)]) == 2
    assert main(["bounds", "--fstar", "1,1,1,1"]) == 2
    assert main(["frobnicate"]) == 2


def test_bounds_fstar(tmp_path):
    out = tmp_path / "a3.txt"
    assert main(["bounds", "--fstar", "1,0,8,1", "--out", str(out)]) == 0
    text = out.read_text()
    assert "sys_u = 1\n" in text and "winner" in text


def test_empty_sweep_has_header_only(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--family", "twisted-cylinder", "--range", "", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# exsys") and lines[1].startswith("n,seed")
    assert len(lines) == 2


def test_instance_seeds_stable():
    assert instance_seeds(7, 3) == instance_seeds(7, 3)
    assert instance_seeds(7, 4)[:3] == instance_seeds(7, 3)


def test_verify_lemmas_single_suite(tmp_path):
    out = tmp_path / "lemmas.txt"
    assert main(["verify-lemmas", "--lemma", "additivity", "--out", str(out)]) == 0
    assert "PASS" in out.read_text()
