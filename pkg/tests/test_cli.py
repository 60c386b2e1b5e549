from conftest import FIXTURE_FILES
from mvdfv.cli import main
from mvdfv.meshio import format_msh, make_mesh


def write_configs(tmp_path, tensor="K2", n=3):
    paths = []
    for k, f in enumerate(FIXTURE_FILES[:n], start=1):
        p = tmp_path / f"level{k}.cfg"
        p.write_text(f"mesh = {f}\ntensor = {tensor}\nreaction = 1\n")
        paths.append(p)
    return paths


def test_mesh_info(capsys):
    assert main(["mesh-info", str(FIXTURE_FILES[0])]) == 0
    out = capsys.readouterr().out
    assert "M_D 16  M_V 30  M 35" in out
    assert "min angle 42.70  max angle 81.20" in out


def test_validate(tmp_path, capsys):
    assert main(["validate", str(FIXTURE_FILES[1])]) == 0
    right = make_mesh([(0, 0), (1, 0), (1, 1), (0, 1)], [(0, 1, 2), (0, 2, 3)])
    bad = tmp_path / "right.msh"
    bad.write_text(format_msh(right))
    assert main(["validate", str(bad)]) == 1
    broken = tmp_path / "broken.msh"
    broken.write_text(FIXTURE_FILES[0].read_text()[:300])
    assert main(["validate", str(broken)]) == 1
    assert "line" in capsys.readouterr().err


def test_solve_writes_csv(tmp_path, capsys):
    cfg = write_configs(tmp_path)[0]
    out = tmp_path / "r.csv"
    assert main(["solve", str(cfg), "--out", str(out), "--no-timing"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("level,M_D")
    assert lines[1].startswith("1,16,30,35,")
    assert "eps2_D" in capsys.readouterr().out


def test_solver_failure_exit_code(tmp_path):
    cfg = write_configs(tmp_path)[0]
    assert main(["solve", str(cfg), "--tol", "1e-40"]) == 2


def test_bad_config_exit_code(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("tensor = K1\n")
    assert main(["solve", str(p)]) == 1
    assert main(["solve", str(tmp_path / "missing.cfg")]) == 1
    cfg = write_configs(tmp_path)[0]
    assert main(["solve", str(cfg), "--reaction", "-2"]) == 1
    assert main(["solve", str(cfg), "--threads", "0"]) == 1


def test_convergence_deterministic(tmp_path, capsys):
    write_configs(tmp_path)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["convergence", str(tmp_path), "--out", str(a), "--no-timing", "--threads", "2"]) == 0
    assert main(["convergence", str(tmp_path), "--out", str(b), "--no-timing"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(a.read_text().splitlines()) == 4
    assert "slope eps2_D vs M_D" in capsys.readouterr().out


def test_convergence_needs_three_levels(tmp_path):
    paths = write_configs(tmp_path, n=2)
    assert main(["convergence"] + [str(p) for p in paths]) == 1
