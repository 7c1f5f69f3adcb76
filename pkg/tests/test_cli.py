import json

import pytest

from aspl3 import read_edge_list, write_edge_list
from aspl3.cli import OUTPUT_DIR_ENV, main
from graphs import complete, cycle, petersen


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_writes_regular_graph(tmp_path, capsys):
    out = tmp_path / "g.edges"
    code, text, _ = run(["gen", "--n", "40", "--d", "4", "--seed", "3", "--out", str(out)], capsys)
    assert code == 0
    data = json.loads(text)
    g = read_edge_list(out)
    assert g.degree == 4 and g.n == 40
    assert data["d"] == 4 and data["edges"] == 80 and data["seed"] == 3


def test_gen_infeasible_exit_2(tmp_path, capsys):
    code, _, err = run(["gen", "--n", "5", "--d", "3", "--out", str(tmp_path / "x")], capsys)
    assert code == 2 and "aspl3:" in err


def test_gen_needs_size(capsys):
    code, _, _ = run(["gen"], capsys)
    assert code == 2


def test_eval_c7(tmp_path, capsys):
    p = tmp_path / "c7.edges"
    write_edge_list(cycle(7), p)
    code, text, _ = run(["eval", "--in", str(p)], capsys)
    data = json.loads(text)
    assert code == 0
    assert data["aspl"] == 2.0 and data["aspl_exact"] == "2"
    assert data["diameter"] == 3 and data["g"] == 0
    assert (data["n1"], data["n2"], data["n3"]) == (7, 7, 7)


def test_eval_k4(tmp_path, capsys):
    p = tmp_path / "k4.edges"
    write_edge_list(complete(4), p)
    data = json.loads(run(["eval", "--in", str(p)], capsys)[1])
    assert data["aspl"] == 1.0 and data["diameter"] == 1
    assert data["triangles"] == 4 and data["squares"] == 3 and data["g"] == 18


def test_eval_irregular_has_note(tmp_path, capsys):
    p = tmp_path / "path.edges"
    p.write_text("0 1\n1 2\n")
    data = json.loads(run(["eval", "--in", str(p)], capsys)[1])
    assert data["regular"] is False and data["aspl_gap"] is None and "note" in data


def test_duplicate_edge_names_line(tmp_path, capsys):
    p = tmp_path / "dup.edges"
    p.write_text("0 1\n1 2\n2 0\n1 0\n")
    code, _, err = run(["eval", "--in", str(p)], capsys)
    assert code == 3
    assert f"{p}:4:" in err and "line 1" in err


def test_missing_file_exit_3(tmp_path, capsys):
    code, _, _ = run(["eval", "--in", str(tmp_path / "nope.edges")], capsys)
    assert code == 3


def test_bounds_c7(tmp_path, capsys):
    p = tmp_path / "c7.edges"
    write_edge_list(cycle(7), p)
    data = json.loads(run(["bounds", "--in", str(p), "--t-max", "3"], capsys)[1])
    assert data["diameter_verified"] is True
    assert data["equality_aspl"] == 2.0
    assert [data["bounds"][t]["value"] for t in ("1", "2", "3")] == [2.0, 2.0, 2.0]


def test_bounds_flags_petersen(tmp_path, capsys):
    p = tmp_path / "pet.edges"
    write_edge_list(petersen(), p)
    code, text, _ = run(["bounds", "--in", str(p)], capsys)
    data = json.loads(text)
    assert code == 0 and data["diameter_verified"] is False and "note" in data


def test_bounds_report_file(tmp_path, capsys):
    p = tmp_path / "c7.edges"
    write_edge_list(cycle(7), p)
    rep = tmp_path / "r.json"
    code, text, _ = run(["bounds", "--in", str(p), "--report", str(rep)], capsys)
    assert code == 0 and text == ""
    assert json.loads(rep.read_text())["n"] == 7


def test_sa_zero_steps_output_equals_input(tmp_path, capsys):
    src = tmp_path / "in.edges"
    run(["gen", "--n", "30", "--d", "4", "--seed", "1", "--out", str(src)], capsys)
    dst = tmp_path / "out.edges"
    code, text, _ = run(["sa", "--in", str(src), "--max-steps", "0", "--out", str(dst)], capsys)
    assert code == 0
    assert read_edge_list(dst) == read_edge_list(src)
    data = json.loads(text)
    assert data["evaluations"] == 0 and data["final"]["g"] == data["initial"]["g"]


def test_ifi_report_fields(tmp_path, capsys):
    dst = tmp_path / "o.edges"
    code, text, _ = run(["ifi", "--n", "40", "--d", "4", "--seed", "2", "--out", str(dst),
                         "--check-every", "5"], capsys)
    assert code == 0
    data = json.loads(text)
    for key in ("seed", "config", "initial", "final", "replacements", "evaluations",
                "wall_time_s", "trajectory", "status"):
        assert key in data
    assert data["status"] == "local_optimum"
    assert data["final"]["g"] <= data["initial"]["g"]
    assert read_edge_list(dst).degree == 4


def test_pipeline_runs(tmp_path, capsys):
    dst = tmp_path / "p.edges"
    code, text, _ = run(["pipeline", "--n", "40", "--d", "4", "--seed", "5", "--max-steps", "2000",
                         "--out", str(dst), "--runs", "3"], capsys)
    data = json.loads(text)
    assert code == 0
    assert [p["algorithm"] for p in data["phases"]] == ["sa", "ifi"]
    assert [r["seed"] for r in data["runs"]] == [5, 6, 7]
    best = min(data["runs"], key=lambda r: (r["final_aspl"], r["final_g"], r["seed"]))
    assert data["seed"] == best["seed"]


def test_output_dir_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv(OUTPUT_DIR_ENV, str(tmp_path))
    code, text, _ = run(["gen", "--n", "20", "--d", "3", "--seed", "4"], capsys)
    assert code == 0
    path = json.loads(text)["path"]
    assert path.startswith(str(tmp_path)) and read_edge_list(path).degree == 3


def test_bad_option_values(capsys):
    assert run(["sa", "--n", "20", "--d", "3", "--max-steps", "-1"], capsys)[0] == 2
    assert run(["ifi", "--n", "20", "--d", "3", "--sort-interval", "0"], capsys)[0] == 2


def test_argparse_rejects_unknown_command():
    with pytest.raises(SystemExit):
        main(["frobnicate"])


@pytest.mark.parametrize("cmd", ["sa", "ifi", "pipeline"])
def test_byte_identical_reruns(tmp_path, capsys, cmd):
    outs = []
    for r in range(2):
        g = tmp_path / f"{r}.edges"
        rep = tmp_path / f"{r}.json"
        code, _, _ = run([cmd, "--n", "60", "--d", "6", "--seed", "9", "--max-steps", "20000",
                          "--out", str(g), "--report", str(rep), "--no-timing"], capsys)
        assert code == 0
        outs.append((g.read_bytes(), rep.read_text().replace(str(g), "OUT")))
    assert outs[0] == outs[1]
