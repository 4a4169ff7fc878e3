import json

from flatland.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, main


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_rosen_expand(capsys):
    code, out, _ = _run(capsys, "rosen", "expand", "--lambda", "5/2", "--x", "2/5", "--json")
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["digits"] == [[1, 1]]
    assert data["provenance"]["command"] == "rosen"
    assert data["provenance"]["mode"] == "rational"


def test_exit_codes(capsys):
    assert _run(capsys, "build", "nope")[0] == EXIT_USAGE
    code, _, err = _run(capsys, "rosen", "gap", "--lambda", "2")
    assert code == EXIT_DOMAIN
    assert "DomainError" in err
    assert _run(capsys, "rosen", "gap", "--lambda", "5/2", "--bogus")[0] == EXIT_USAGE
    assert _run(capsys, "rosen", "expand", "--lambda", "5/2")[0] == EXIT_USAGE


def test_build_l_shape(capsys, tmp_path):
    surface_file = tmp_path / "l.json"
    code, out, _ = _run(capsys, "build", "l_shape", "--out", str(surface_file))
    assert code == EXIT_OK
    assert json.loads(out)["genus"] == 2
    saved = json.loads(surface_file.read_text(encoding="utf-8"))
    assert saved["provenance"]["tool"] == "flatland"
    assert len(saved["polygons"]) == 3


def test_trace_reads_a_surface_file(capsys, tmp_path):
    surface_file = tmp_path / "torus.json"
    _run(capsys, "build", "torus", "--out", str(surface_file))
    code, out, _ = _run(capsys, "trace", "--surface", str(surface_file), "--dir", "2,1", "--from", "1/3,1/7")
    assert code == EXIT_OK
    assert json.loads(out)["trajectory"]["status"] == "Closed"


def test_htv_modified_n(capsys):
    code, out, _ = _run(capsys, "htv", "--family", "modifiedN", "--lambda", "3", "--k", "3", "--window", "6")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["moduli"]["all_equal"]
    assert report["moduli"]["target"] == "1/3"


def test_cutstack_writes_dot(capsys, tmp_path):
    dot = tmp_path / "odometer.dot"
    code, out, _ = _run(capsys, "cutstack", "--named", "odometer:3", "--dot", str(dot))
    assert code == EXIT_OK
    assert dot.read_text(encoding="utf-8").startswith("// flatland")
    data = json.loads(out)
    assert data["cutstack"]["undefined_measure"] == "1/8"
    assert data["bratteli"]["levels"] == [1, 1, 1, 1]


def test_entropy_of_baker_map(capsys, tmp_path):
    table = tmp_path / "entropy.csv"
    code, out, _ = _run(
        capsys, "entropy", "--generator", "baker_vertical", "--param", "n=60", "--m-max", "45", "--csv", str(table)
    )
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["m"][-1] == 45
    assert data["last"] < 1e-9
    lines = table.read_text(encoding="utf-8").splitlines()
    assert lines[0].startswith("# ")
    assert "m,value,running_inf" in lines


def test_windtree_csv(capsys, tmp_path):
    table = tmp_path / "windtree.csv"
    argv = ["windtree", "--a", "1/2", "--b", "1/2", "--theta", "0.7", "--orbits", "4", "--T", "100", "--seed", "1"]
    code, out, _ = _run(capsys, *argv, "--csv", str(table))
    assert code == EXIT_OK
    assert json.loads(out)["seed"] == 1
    lines = table.read_text(encoding="utf-8").splitlines()
    header = [i for i, line in enumerate(lines) if not line.startswith("#")][0]
    assert header > 0
    assert lines[header] == "orbit,slope"
    assert len(lines) - header - 1 == 4


def test_output_file_is_deterministic(capsys, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for path in (first, second):
        _run(capsys, "iet", "periodic", "--generator", "rotation", "--param", "a=1/3", "--out", str(path))
    assert first.read_bytes() == second.read_bytes()
