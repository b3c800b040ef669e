import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from rmeasure import cli, measures
from rmeasure.geometric import eg_closed_w


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def table(text):
    return list(csv.DictReader(io.StringIO(text)))


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def test_measure_g3_padded(capsys):
    code, out, _ = run(capsys, "measure", "--builtin", "ghz:3*zero:5", "--m", "2..8",
                       "--workers", "1")
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == cli.MEASURE_HEADER
    assert [int(r["m"]) for r in rows] == list(range(2, 9))
    for r in rows[:5]:
        assert r["R_m"] == "0" and r["zero_flag"] == "1"
    assert rows[-1]["R_m"] == "0.375" and rows[-1]["zero_flag"] == "0"
    assert rows[0]["state_tag"] == "ghz:3*zero:5"


def test_measure_ghz4(capsys):
    code, out, _ = run(capsys, "measure", "--builtin", "ghz:4", "--m", "2")
    assert code == 0
    (row,) = table(out)
    assert f"{float(row['R_m']):.3f}" == "0.732"


def test_measure_custom_tag_and_out_file(capsys, tmp_path):
    dest = tmp_path / "r.csv"
    code, out, _ = run(capsys, "measure", "--builtin", "w:4", "--tag", "W4",
                       "--out", str(dest))
    assert code == 0 and out == ""
    rows = table(dest.read_text())
    assert {r["state_tag"] for r in rows} == {"W4"}
    assert float(rows[0]["R_m"]) == pytest.approx(0.621, abs=5e-4)


def test_measure_state_file_amplitudes(capsys, tmp_path):
    h = 1 / math.sqrt(2)
    path = write_json(tmp_path / "bell.json",
                      {"n": 2, "amps": [[h, 0], [0, 0], [0, 0], [h, 0]], "tag": "bell"})
    code, out, _ = run(capsys, "measure", "--state", path)
    assert code == 0
    (row,) = table(out)
    assert row["state_tag"] == "bell" and float(row["R_m"]) == pytest.approx(1.0)


def test_measure_state_file_builtin(capsys, tmp_path):
    path = write_json(tmp_path / "d.json", {"builtin": "dicke", "n": 6, "k": 3})
    code, out, _ = run(capsys, "measure", "--state", path, "--m", "6")
    assert code == 0
    assert float(table(out)[0]["R_m"]) == pytest.approx(1.0, abs=1e-12)


def test_measure_json_output(capsys):
    code, out, _ = run(capsys, "measure", "--builtin", "ghz:4", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["path"] == "generic" and payload["n"] == 4
    assert payload["values"]["2"] == pytest.approx(0.7322907457, abs=1e-9)
    shapes_m2 = {tuple(e["shape"]): e["count"] for e in payload["per_shape"] if e["m"] == 2}
    assert shapes_m2 == {(1, 3): 4, (2, 2): 3}


def test_malformed_state_file_exits_2(capsys, tmp_path):
    path = write_json(tmp_path / "bad.json", {"n": 3, "amps": [[1, 0]] * 7})
    code, _, err = run(capsys, "measure", "--state", path)
    assert code == 2 and "error" in err


@pytest.mark.parametrize("argv", [
    ["measure", "--builtin", "bell:2"],
    ["measure", "--builtin", "ghz:4", "--m", "7"],
    ["measure", "--builtin", "ghz:4", "--m", "x..y"],
    ["measure"],
    ["sweep", "--family", "dicke", "--n", "5"],
])
def test_bad_arguments_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_unreadable_file_exits_2(capsys, tmp_path):
    (tmp_path / "x.json").write_text("{not json")
    assert run(capsys, "measure", "--state", str(tmp_path / "x.json"))[0] == 2


def test_cap_exceeded_exits_3(capsys):
    # two GHZ_7 factors: 14 qubits, not permutation symmetric
    code, _, err = run(capsys, "measure", "--builtin", "ghz:7*ghz:7", "--m", "2")
    assert code == 3
    assert "symmetric" in err


def test_nan_exits_4(capsys, monkeypatch):
    monkeypatch.setattr(measures, "purity_from_mask", lambda psi, mask: float("nan"))
    code, _, err = run(capsys, "measure", "--builtin", "ghz:4", "--workers", "1")
    assert code == 4 and "numeric" in err


def test_large_symmetric_state_uses_fast_path(capsys):
    code, out, _ = run(capsys, "measure", "--builtin", "w:30", "--m", "30",
                       "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["path"] == "symmetric"
    assert payload["values"]["30"] == pytest.approx(4 * 29 / 900, abs=1e-15)


def test_force_symmetric_on_amplitude_file(capsys, tmp_path):
    from rmeasure.state import dicke

    amps = dicke(5, 2).amps
    path = write_json(tmp_path / "d.json",
                      {"n": 5, "amps": [[float(a.real), float(a.imag)] for a in amps]})
    _, generic, _ = run(capsys, "measure", "--state", path)
    _, fast, _ = run(capsys, "measure", "--state", path, "--force-path", "symmetric")
    for g, f in zip(table(generic), table(fast)):
        assert float(g["R_m"]) == pytest.approx(float(f["R_m"]), abs=1e-9)


def test_sweep_ghz_full_grid(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "ghz", "--n", "3..50")
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == cli.SWEEP_HEADER
    assert len(rows) == sum(n - 1 for n in range(3, 51)) == 1224
    assert all(float(r["R_m"]) > 0.5 for r in rows)


def test_sweep_dicke_half_filling(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "dicke", "--k", "10", "--n", "11..50")
    assert code == 0
    (hit,) = [r for r in table(out) if r["n"] == "20" and r["m"] == "20"]
    assert hit["R_m"] == "1" and hit["k"] == "10"


def test_sweep_w50(capsys):
    code, out, _ = run(capsys, "sweep", "--family", "w", "--n", "50", "--m", "50")
    assert code == 0
    assert float(table(out)[0]["R_m"]) == pytest.approx(0.0784, abs=1e-12)


def test_path_equivalence_ghz8(capsys):
    _, generic, _ = run(capsys, "measure", "--builtin", "ghz:8", "--workers", "1")
    _, fast, _ = run(capsys, "sweep", "--family", "ghz", "--n", "8")
    g = {r["m"]: float(r["R_m"]) for r in table(generic)}
    f = {r["m"]: float(r["R_m"]) for r in table(fast)}
    assert g.keys() == f.keys()
    for m in g:
        assert g[m] == pytest.approx(f[m], abs=1e-9)


def test_stirling_table(capsys):
    code, out, _ = run(capsys, "stirling", "--n", "4..8", "--m", "2")
    assert code == 0
    rows = table(out)
    assert list(rows[0]) == cli.STIRLING_HEADER
    assert [int(r["S"]) for r in rows] == [7, 15, 31, 63, 127]


def test_stirling_large_n_ratio_column(capsys):
    _, out, _ = run(capsys, "stirling", "--n", "50", "--m", "3")
    (row,) = table(out)
    assert int(row["S"]) == 119649664052358811373730
    # the large-n column carries the sqrt(2 pi) offset of the approximation
    assert float(row["ratio_large_n"]) == pytest.approx(math.sqrt(2 * math.pi), rel=1e-3)


def test_shapes_4_2(capsys):
    code, out, _ = run(capsys, "shapes", "--n", "4", "--m", "2")
    assert code == 0
    assert {r["shape"]: int(r["h"]) for r in table(out)} == {"{1,3}": 4, "{2,2}": 3}


def test_partitions_list(capsys):
    code, out, _ = run(capsys, "partitions", "--n", "3", "--m", "2", "--list")
    assert code == 0
    assert [r["partition"] for r in table(out)] == ["{1,2}{3}", "{1,3}{2}", "{1}{2,3}"]


def test_opcount(capsys):
    _, out, _ = run(capsys, "opcount", "--n", "4", "--m", "2")
    assert table(out)[0]["op_count"] == "14"


def test_geom_w10(capsys):
    code, out, _ = run(capsys, "geom", "--builtin", "w:10")
    assert code == 0
    (row,) = table(out)
    assert list(row) == cli.GEOM_HEADER
    assert float(row["E_G"]) == pytest.approx(eg_closed_w(10), abs=1e-6)
    assert row["restarts_used"] == "32"


def test_geom_ghz_and_product(capsys):
    _, out, _ = run(capsys, "geom", "--builtin", "ghz:4", "--restarts", "8")
    assert float(table(out)[0]["E_G"]) == pytest.approx(0.5, abs=1e-6)
    _, out, _ = run(capsys, "geom", "--builtin", "zero:4", "--restarts", "4")
    assert float(table(out)[0]["E_G"]) < 1e-8


def test_geom_symmetric_json_and_angles(capsys, tmp_path):
    dest = tmp_path / "angles.json"
    code, out, _ = run(capsys, "geom", "--builtin", "w:20", "--symmetric",
                       "--format", "json", "--angles-out", str(dest))
    assert code == 0
    (entry,) = json.loads(out)
    assert entry["E_G"] == pytest.approx(eg_closed_w(20), abs=1e-6)
    angles = json.loads(dest.read_text())
    assert angles["symmetric"] and len(angles["theta"]) == 20
    assert math.sin(angles["theta"][0]) ** 2 == pytest.approx(1 / 20, abs=1e-4)


def test_geom_cap_exits_3(capsys):
    assert run(capsys, "geom", "--builtin", "ghz:13")[0] == 3


def test_determinism_byte_identical(capsys):
    argv = ["measure", "--builtin", "ghz:2*w:3*dicke:4,2", "--workers", "1"]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    _, geom1, _ = run(capsys, "geom", "--builtin", "dicke:5,2", "--seed", "7")
    _, geom2, _ = run(capsys, "geom", "--builtin", "dicke:5,2", "--seed", "7")
    assert geom1 == geom2


def test_worker_count_does_not_change_output(capsys):
    argv = ["measure", "--builtin", "ghz:3*w:6"]
    _, serial, _ = run(capsys, *argv, "--workers", "1")
    _, parallel, _ = run(capsys, *argv, "--workers", "4")
    assert serial == parallel


def test_module_entry_point_subprocess():
    proc = subprocess.run([sys.executable, "-m", "rmeasure", "measure", "--builtin", "ghz:4",
                           "--m", "2"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[1].startswith("ghz:4,4,2,0.7322907457")
    proc = subprocess.run([sys.executable, "-m", "rmeasure", "sweep", "--family", "ghz",
                           "--n", "99"], capture_output=True, text=True, check=False)
    assert proc.returncode == 3


def test_fmt():
    assert cli.fmt(True) == "1" and cli.fmt(False) == "0"
    assert cli.fmt(0.1 + 0.2) == "0.3"
    assert cli.fmt(None) == ""
    assert float(cli.fmt(math.pi)) == pytest.approx(math.pi, rel=1e-12)
    assert np.isclose(float(cli.fmt(1 / 3)), 1 / 3, rtol=1e-12)
