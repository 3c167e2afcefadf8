import json
import subprocess
import sys
from itertools import product

import pytest

from latcover import io as wire
from latcover.cli import main, run

CUBE = {"points": [list(p) for p in product((0, 1), repeat=3)]}
REEVE = {"points": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 2]]}
BALL = {"A": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "center": [0, 0, 0]}


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj), encoding="utf-8")
    return str(p)


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_is_normal_cube(tmp_path, capsys):
    code, res = _run(["is-normal", _write(tmp_path, "cube.json", CUBE)], capsys)
    assert code == 0 and res["status"] == "ok" and res["payload"]["is_normal"] is True


def test_is_very_ample_reeve(tmp_path, capsys):
    code, res = _run(["is-very-ample", _write(tmp_path, "reeve.json", REEVE)], capsys)
    assert code == 1 and res["status"] == "fail"
    assert res["payload"]["witness"] == {"vertex": ["0", "0", "0"], "hilbert_element": ["1", "1", "1"]}


def test_is_normal_reeve_witness(tmp_path, capsys):
    code, res = _run(["is-normal", _write(tmp_path, "reeve.json", REEVE)], capsys)
    assert code == 1 and res["payload"]["witness"] == {"c": 2, "point": ["1", "1", "1"]}


def test_verify_counterexample(capsys):
    code, res = _run(["verify-counterexample", "--d", "6"], capsys)
    assert code == 0
    assert res["payload"]["target"] == ["5/2"] * 6
    assert res["payload"]["representable"] is False


def test_usage_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{nope", encoding="utf-8")
    code, res = _run(["is-normal", str(bad)], capsys)
    assert code == 2 and "malformed JSON" in res["diagnostics"][0]
    code, res = _run(["is-normal", _write(tmp_path, "f.json", {"points": [[0.5, 0]]})], capsys)
    assert code == 2 and res["payload"]["error"] == "FormatError"
    code, res = _run(["is-normal", _write(tmp_path, "m.json", {"pts": []})], capsys)
    assert code == 2
    code, res = _run(["build-qd", "--d", "4"], capsys)
    assert code == 2 and res["payload"]["error"] == "DimensionTooSmall"
    assert main(["no-such-command"]) == 2
    capsys.readouterr()


def test_cover_round_trip(tmp_path, capsys):
    code, res = _run(["cover-ellipsoid3", _write(tmp_path, "ball.json", BALL)], capsys)
    assert code == 0 and res["payload"]["verified"] is True
    path = _write(tmp_path, "cover.json", res)
    for method in ("arrangement", "subdivision"):
        code, v = _run(["verify-cover", "--method", method, path], capsys)
        assert code == 0 and v["payload"]["covered"] is True
    broken = dict(res["payload"], simplices=res["payload"]["simplices"][1:])
    code, v = _run(["verify-cover", _write(tmp_path, "broken.json", broken)], capsys)
    assert code == 1 and "witness" in v["payload"]


def test_emitted_json_reparses(tmp_path, capsys):
    _, res = _run(["hull", "--points", _write(tmp_path, "ball.json", BALL)], capsys)
    P = wire.parse_polytope({"points": res["payload"]["vertices"], "lattice": res["payload"]["lattice"]})
    assert wire.dump_polytope(P, with_points=True) == res["payload"]
    _, res = _run(["stack", "--b", "1", _write(tmp_path, "disk.json", {"A": [[1, 0], [0, 1]], "center": [0, 0]})],
                  capsys)
    S = wire.parse_ellipsoidal_set(res["payload"])
    assert len(S) == 10 and res["payload"]["a_squared"] == "4/3"
    again = wire.dump_ellipsoidal_set(S)
    assert all(again[k] == res["payload"][k] for k in again)


@pytest.mark.parametrize("argv", [
    ["hilbert-basis", "random:cone3", "--seed", "4"],
    ["sebo-triangulate", "random:cone3", "--seed", "4"],
    ["ellipsoid-points", "random:ellipsoid3", "--seed", "9"],
    ["peel-chain", "random:ellipsoid3", "--seed", "2"],
    ["gp", "random:polytope3", "--seed", "1"],
])
def test_deterministic_output(argv):
    outs = [subprocess.run([sys.executable, "-m", "latcover", *argv], capture_output=True, text=True)
            for _ in range(2)]
    assert outs[0].returncode == 0
    assert outs[0].stdout == outs[1].stdout


def test_global_options_either_side(tmp_path, capsys):
    path = _write(tmp_path, "cube.json", CUBE)
    res1, _ = run(["--format", "summary", "is-normal", path])
    out1 = capsys.readouterr().out
    res2, _ = run(["is-normal", path, "--format", "summary"])
    out2 = capsys.readouterr().out
    assert out1 == out2 and out1.startswith("is-normal: ok")


def test_stdin_input(monkeypatch, capsys):
    import io
    monkeypatch.setattr(sys, "stdin", io.StringIO(json.dumps(CUBE)))
    code, res = _run(["is-very-ample"], capsys)
    assert code == 0 and res["payload"]["is_very_ample"] is True
