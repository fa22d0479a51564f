import csv
import json
import xml.etree.ElementTree as ET

import pytest

from boundary_lacunas.cli import RunConfig, build_parser, config_from_args, main, run

F4_ETA = [[0, 1, 0, 0], [-1, 0, 0, 0], [1, 0, -2, 1], [-1, 1, 1, -2]]


def _json(capsys):
    return json.loads(capsys.readouterr().out)


def test_census_b4_plus(capsys):
    assert main(["census", "--family", "B", "--k", "4", "--sign", "+", "--seed", "1"]) == 0
    out = _json(capsys)
    res = out["result"]
    assert (res["components"], res["components_expected"]) == (9, 9)
    assert (res["lacunas"], res["lacunas_expected"]) == (2, 2)
    assert out["matches_expected"] is True
    assert out["config"]["seed"] == 1 and out["schema"] >= 1 and out["build"]


def test_census_csv_columns(tmp_path, capsys):
    path = tmp_path / "c.csv"
    assert main(["census", "--family", "C", "--k", "3", "--sign", "-", "--seed", "1", "--csv", str(path)]) == 0
    capsys.readouterr()
    raw = path.read_bytes()
    assert b"\r\n" in raw
    rows = list(csv.reader(raw.decode("utf-8").splitlines()))
    assert rows[0] == ["family", "k", "sign", "r", "s", "signature", "is_lacuna", "witness"]
    assert len(rows) == 1 + 6
    assert sum(int(r[6]) for r in rows[1:]) == 2


def test_stabilized_census_through_cli(capsys):
    assert main(["census", "--family", "C", "--k", "5", "--sign", "+", "--stab", "0,1", "--seed", "1"]) == 0
    res = _json(capsys)["result"]
    assert res["lacunas"] == res["lacunas_expected"] == 9


def test_lacunas_lists_lacuna_chambers(capsys):
    assert main(["lacunas", "--family", "F4", "--sign", "-", "--seed", "2"]) == 0
    res = _json(capsys)["result"]
    assert res["lacunas"] == res["lacunas_expected"] == 4
    assert len(res["lacuna_chambers"]) == 4


def test_monodromy_f4(tmp_path, capsys):
    dot = tmp_path / "g.dot"
    assert main(["monodromy", "--family", "F4", "--dot", str(dot)]) == 0
    res = _json(capsys)["result"]
    assert res["model"]["eta"] == F4_ETA
    assert res["indecomposable"] is True
    assert res["rank_report"] == {"absolute": 5, "relative": 4, "model_dim": 4}
    assert dot.read_text().startswith('graph "F4+"')


def test_monodromy_with_cycle(capsys):
    assert main(["monodromy", "--family", "B", "--k", "3", "--pi", "0,1,0", "--coupling", "0,0,0"]) == 0
    assert "obstruction" in _json(capsys)["result"]


def test_volume_example(tmp_path, capsys):
    csv_path, json_path = tmp_path / "v.csv", tmp_path / "v.json"
    code = main(["volume", "--family", "B", "--k", "2", "--sign", "+", "--lambda", "-1,0",
                 "--c-range", "0:0.5", "--csv", str(csv_path), "--out", str(json_path)])
    assert code == 0
    rows = list(csv.reader(csv_path.read_text(encoding="utf-8").splitlines()))
    assert rows[0] == ["c", "V", "dV_dc"]
    values = [float(r[1]) for r in rows[1:]]
    assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))
    report = json.loads(json_path.read_text())
    assert report["monotone"] is True
    assert report["ramification"]["verdict"] == "NO-OBSTRUCTION-FOUND"


def test_volume_offset_disk_is_increasing(tmp_path):
    csv_path = tmp_path / "v.csv"
    assert main(["volume", "--family", "B", "--k", "2", "--lambda", "3,-4", "--c-range", "-0.5:0.5:5",
                 "--csv", str(csv_path), "--out", str(tmp_path / "v.json")]) == 0
    values = [float(r[1]) for r in list(csv.reader(csv_path.read_text().splitlines()))[1:]]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_outputs_are_byte_identical(tmp_path):
    outs = []
    for _ in range(2):
        c, j = tmp_path / "c.csv", tmp_path / "c.json"
        main(["census", "--family", "B", "--k", "5", "--sign", "-", "--seed", "3", "--csv", str(c), "--out", str(j)])
        v, w = tmp_path / "v.csv", tmp_path / "v.json"
        main(["volume", "--family", "B", "--k", "2", "--lambda", "3,-4", "--c-range", "0:0.2:3",
              "--csv", str(v), "--out", str(w)])
        outs.append([p.read_bytes() for p in (c, j, v, w)])
    assert outs[0] == outs[1]


def test_svg_is_structurally_stable(tmp_path):
    trees = []
    for i in range(2):
        path = tmp_path / f"p{i}.svg"
        assert main(["plot", "--family", "C", "--k", "3", "--lambda", "1/10,-1/2,0", "--svg", str(path)]) == 0
        trees.append([el.tag for el in ET.parse(path).getroot().iter()])
    assert trees[0] == trees[1] and len(trees[0]) > 10


@pytest.mark.parametrize(
    "argv",
    [
        ["census", "--family", "B", "--k", "1", "--seed", "1"],
        ["census", "--family", "B", "--seed", "1"],
        ["monodromy", "--family", "F4", "--k", "5"],
        ["volume", "--family", "B", "--k", "2", "--lambda", "1,2,3"],
        ["volume", "--family", "B", "--k", "2", "--lambda", "1,0", "--c-range", "1:0"],
        ["monodromy", "--family", "C", "--k", "3", "--pi", "0,0,0"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2


def test_missing_seed_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["census", "--family", "B", "--k", "3"])
    assert exc.value.code == 2


def test_wall_input_exits_3(capsys):
    assert main(["volume", "--family", "B", "--k", "2", "--lambda", "0,0", "--c-range", "0:1"]) == 3
    assert "degenerate" in capsys.readouterr().err


def test_census_mismatch_exits_4(capsys):
    assert main(["census", "--family", "F4", "--seed", "1", "--budget", "5"]) == 4
    assert _json(capsys)["matches_expected"] is False


def test_config_records_defaults():
    ns = build_parser().parse_args(["monodromy", "--family", "C", "--k", "4"])
    cfg = config_from_args(ns)
    assert isinstance(cfg, RunConfig)
    header = cfg.header()
    assert header["config"]["max_length"] == 6 and header["config"]["stab"] == [0, 0]


def test_run_with_config_object(capsys):
    assert run(RunConfig("monodromy", family="C", k=3)) == 0
    assert _json(capsys)["result"]["indecomposable"] is True
