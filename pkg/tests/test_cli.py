import csv
import json
import math
import os

import numpy as np
import pytest

from imprecise_witness import __version__, cli, linalg
from imprecise_witness.fileio import atomic_write


def _run(args, tmp_path, name="out.csv"):
    out = tmp_path / name
    code = cli.main(args + ["--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def _rows(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


@pytest.mark.parametrize("args,expect", [
    (["--witness", "pauli2", "--eps", "0.005"], 1.27931),
    (["--witness", "chsh", "--eps", "0"], math.sqrt(2)),
    (["--witness", "bloch", "--d", "3", "--n", "8", "--eps", "0.01"], 4.5390716),
    (["--witness", "pauli2", "--eps", "0"], 1.0),
    (["--witness", "pauli2", "--eps", "0.2"], 2.0),
])
def test_analytic_values(tmp_path, args, expect):
    code, text = _run(["analytic"] + args, tmp_path)
    assert code == 0
    (row,) = _rows(text)
    assert float(row["bound"]) == pytest.approx(expect, abs=1e-5)


def test_analytic_grid_and_regimes(tmp_path):
    code, text = _run(["analytic", "--witness", "pauli2", "--eps", "0:0.2:0.05"], tmp_path)
    assert code == 0
    rows = _rows(text)
    assert [float(r["eps"]) for r in rows] == [0.0, 0.05, 0.1, 0.15, 0.2]
    assert rows[0]["regime"] != rows[-1]["regime"]
    assert rows[-1]["bound"] == "2.0"


def test_header_comment(tmp_path):
    _, text = _run(["analytic", "--witness", "chsh", "--eps", "0.01", "--seed", "5"], tmp_path)
    head = text.splitlines()[0]
    assert head.startswith("#")
    assert __version__ in head and "seed=5" in head
    h = head.split("config=")[1]
    assert len(h) == 16 and all(c in "0123456789abcdef" for c in h)
    _, other = _run(["analytic", "--witness", "chsh", "--eps", "0.02", "--seed", "5"], tmp_path, "b.csv")
    assert other.splitlines()[0] != head


def test_conjectured_flag(tmp_path):
    _, text = _run(["analytic", "--witness", "chsh", "--eps", "0.01"], tmp_path)
    assert _rows(text)[0]["conjectured"] == "true"
    _, text = _run(["analytic", "--witness", "pauli2", "--eps", "0.01"], tmp_path)
    assert _rows(text)[0]["conjectured"] == "false"


@pytest.mark.parametrize("args", [
    ["analytic", "--witness", "nosuch", "--eps", "0.1"],
    ["analytic", "--witness", "bloch", "--eps", "0.1"],
    ["analytic", "--witness", "pauli2", "--eps", "abc"],
    ["analytic", "--witness", "pauli2", "--eps", "0.2:0.1:0.01"],
    ["seesaw", "--witness", "nosuch", "--eps", "0.1"],
    ["seesaw", "--witness", "pauli2", "--eps", "0.1", "--restarts", "0"],
    ["fig1", "--d", "1..3"],
    ["fig1", "--d", "x"],
    ["sdp", "--witness", "pauli2", "--eps", "0.1", "--level", "0"],
    ["nosuchcommand"],
    ["analytic", "--eps", "0.1"],
])
def test_config_errors_exit_2(tmp_path, args, capsys):
    code, text = _run(args, tmp_path)
    assert code == 2
    assert text == ""


def test_config_file_merge_and_unknown_keys(tmp_path):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"witness": "pauli2", "eps": "0.005"}))
    code, text = _run(["analytic", "--config", str(good), "--witness", "x", "--eps", "0"], tmp_path)
    # explicit command-line values win
    assert code == 2
    code, text = _run(["analytic", "--config", str(good), "--witness", "pauli2", "--eps", "0"], tmp_path)
    assert code == 0 and float(_rows(text)[0]["eps"]) == 0.0
    cfg = tmp_path / "seed.json"
    cfg.write_text(json.dumps({"seed": 9}))
    code, text = _run(["analytic", "--config", str(cfg), "--witness", "pauli2", "--eps", "0"], tmp_path)
    assert code == 0 and "seed=9" in text.splitlines()[0]
    for bad in ({"witness": "pauli2", "eps": "0", "colour": 1}, ["not", "an", "object"], {"restarts": 3}):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps(bad))
        assert cli.main(["analytic", "--config", str(p), "--witness", "pauli2", "--eps", "0"]) == 2
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    assert cli.main(["analytic", "--config", str(p), "--witness", "pauli2", "--eps", "0"]) == 2


def test_parse_grid():
    assert cli.parse_grid("0:0.1:0.05") == [0.0, 0.05, 0.1]
    assert cli.parse_grid("0:0.10:0.01") == [round(0.01 * i, 12) for i in range(11)]
    assert cli.parse_grid("0.005, 0.01,0.1") == [0.005, 0.01, 0.1]
    assert cli.parse_grid("0,0.5:0.7:0.1") == [0.0, 0.5, 0.6, 0.7]
    for bad in ("", "a", "0:1", "0:1:0", "1:0:0.1"):
        with pytest.raises(cli.ConfigError):
            cli.parse_grid(bad)


def test_parse_grid_ranges_are_exact(rng):
    for _ in range(200):
        k = int(rng.integers(1, 40))
        step = float(rng.choice([0.001, 0.005, 0.01, 0.02, 0.05, 0.1]))
        grid = cli.parse_grid(f"0:{round(k * step, 12)}:{step}")
        assert len(grid) == k + 1
        assert grid[-1] == pytest.approx(k * step, abs=1e-12)


def test_parse_ints():
    assert cli.parse_ints("2..6") == [2, 3, 4, 5, 6]
    assert cli.parse_ints("2,4,8") == [2, 4, 8]
    assert cli.parse_ints("2..3,7") == [2, 3, 7]
    for bad in ("", "6..2", "a..b", "x"):
        with pytest.raises(cli.ConfigError):
            cli.parse_ints(bad)


def test_fidelity_identical_files(tmp_path, rng):
    m = linalg.random_projective_measurement(3, 3, rng)
    lab, target = tmp_path / "lab.json", tmp_path / "target.json"
    lab.write_text(cli.dump_measurement(m))
    target.write_text(cli.dump_measurement(m))
    code, text = _run(["fidelity", "--lab", str(lab), "--target", str(target)], tmp_path)
    assert code == 0
    row = _rows(text)[0]
    assert float(row["fidelity"]) == pytest.approx(1, abs=1e-12)
    assert float(row["eps"]) == pytest.approx(0, abs=1e-12)


def test_fidelity_file_round_trip_and_errors(tmp_path, rng):
    m = linalg.random_povm(2, 3, rng)
    p = tmp_path / "m.json"
    p.write_text(cli.dump_measurement(m))
    back = cli.load_measurement(str(p))
    assert np.allclose(back.effects, m.effects, atol=1e-15)
    bad = {"d": 2, "o": 2, "effects": [[[[1, 0], [0, 0]], [[0, 0], [0, 0]]]] * 2}
    cases = [bad, {"d": 2, "o": 3, "effects": json.loads(cli.dump_measurement(m))["effects"][:2]},
             {"d": 2, "effects": []}, "not a dict"]
    for case in cases:
        p.write_text(json.dumps(case))
        assert cli.main(["fidelity", "--lab", str(p), "--target", str(p)]) == 2
    assert cli.main(["fidelity", "--lab", str(tmp_path / "missing.json"), "--target", str(p)]) == 2
    other = tmp_path / "o.json"
    other.write_text(cli.dump_measurement(linalg.random_povm(3, 3, rng)))
    q = tmp_path / "q.json"
    q.write_text(cli.dump_measurement(m))
    assert cli.main(["fidelity", "--lab", str(q), "--target", str(other)]) == 2


def test_seesaw_byte_identical(tmp_path):
    args = ["seesaw", "--witness", "pauli2", "--eps", "0.05", "--restarts", "2", "--seed", "3"]
    code_a, a = _run(args, tmp_path, "a.csv")
    code_b, b = _run(args, tmp_path, "b.csv")
    assert code_a == code_b == 0
    assert a == b
    row = _rows(a)[0]
    assert row["status"] == "ok" and row["wall_time_ms"] == ""
    assert float(row["bound"]) == pytest.approx(1.7846018, abs=1e-3)
    _, timed = _run(args + ["--timing"], tmp_path, "c.csv")
    assert int(_rows(timed)[0]["wall_time_ms"]) >= 0


def test_fig1_csv_and_svg(tmp_path):
    svg = tmp_path / "fig" / "delta.svg"
    args = ["fig1", "--d", "2..3", "--eps", "0.05,0.02", "--restarts", "1", "--seed", "3", "--svg", str(svg)]
    code, text = _run(args, tmp_path)
    assert code == 0
    rows = _rows(text)
    assert [(float(r["eps"]), int(r["d"])) for r in rows] == [(0.02, 2), (0.02, 3), (0.05, 2), (0.05, 3)]
    for r in rows:
        d, b = int(r["d"]), float(r["bound"])
        assert float(r["delta"]) == pytest.approx(d / (d - 1) * (2 - b), rel=1e-9)
        assert 0 < float(r["delta"]) < 1
    first = svg.read_text()
    assert first.lstrip().startswith("<?xml") and "</svg>" in first
    _run(args, tmp_path, "again.csv")
    assert svg.read_text() == first
    assert (tmp_path / "again.csv").read_text() == text


def test_sdp_and_fig2(tmp_path):
    code, text = _run(["sdp", "--witness", "pauli2", "--eps", "0,0.05", "--max-samples", "2000"], tmp_path)
    assert code == 0
    rows = _rows(text)
    assert float(rows[0]["upper_bound"]) == pytest.approx(1, abs=1e-4)
    assert float(rows[1]["upper_bound"]) >= float(rows[1]["analytic"]) - 1e-6
    assert rows[0]["basis_size_m"] == "47" and rows[0]["monomials_n"] == "18"
    svg = tmp_path / "fig2.svg"
    code, text2 = _run(["fig2", "--witness", "pauli2", "--eps", "0,0.05", "--max-samples", "2000",
                        "--svg", str(svg)], tmp_path, "fig2.csv")
    assert code == 0
    assert [r["upper_bound"] for r in _rows(text2)] == [r["upper_bound"] for r in rows]
    assert "</svg>" in svg.read_text()


def test_sdp_entangled(tmp_path):
    code, text = _run(["sdp", "--witness", "chsh", "--eps", "0", "--mode", "entangled"], tmp_path)
    assert code == 0
    row = _rows(text)[0]
    assert float(row["upper_bound"]) == pytest.approx(2 * math.sqrt(2), abs=1e-5)
    assert row["analytic"] == ""


def test_solver_failure_exit_3_with_partial_rows(tmp_path, monkeypatch):
    from imprecise_witness import moment

    real = moment.upper_bound

    def flaky(spec, rel, mode="entangled", **kw):
        if max(spec.budget.eps_A) > 0.03:
            raise RuntimeError("solver breakdown")
        return real(spec, rel, mode, **kw)

    monkeypatch.setattr(moment, "upper_bound", flaky)
    code, text = _run(["sdp", "--witness", "pauli2", "--eps", "0,0.05", "--max-samples", "2000"], tmp_path)
    assert code == 3
    lines = text.splitlines()
    assert lines[1].startswith("# partial:")
    rows = _rows(text)
    assert rows[0]["status"] == "optimal" and rows[1]["status"] == "failed"


def test_atomic_write(tmp_path):
    p = tmp_path / "sub" / "x.txt"
    atomic_write(str(p), "one\n")
    atomic_write(str(p), "two\n")
    assert p.read_text() == "two\n"
    assert sorted(os.listdir(p.parent)) == ["x.txt"]


def test_version_flag(capsys):
    assert cli.main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_stdout_output(capsys):
    assert cli.main(["analytic", "--witness", "pauli2", "--eps", "0.005"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# imprecise-witness") and "1.2793" in out
