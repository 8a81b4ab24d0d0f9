import csv
import io
import json
import math

import numpy as np
import pytest

from tomoprob.cli import build_config, canonical_float, csv_text, dumps, main

from conftest import FIXTURES


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def fx(name):
    return FIXTURES / name


def test_decode_identity(capsys):
    code, out, _ = run(capsys, "qudit", "decode", fx("mixed_qubit.json"))
    assert code == 0
    table = json.loads(out)
    assert table["offdiag"] == [{"j": 2, "k": 1, "p1": 0.5, "p2": 0.5}]
    assert table["diag"] == [{"j": 2, "p3": 0.5}]


def test_encode_decode_round_trip(tmp_path, capsys):
    first = tmp_path / "a.json"
    rho = tmp_path / "rho.json"
    second = tmp_path / "b.json"
    assert run(capsys, "qudit", "decode", fx("ququart.json"), "--out", first)[0] == 0
    assert run(capsys, "qudit", "encode", first, "--out", rho)[0] == 0
    assert run(capsys, "qudit", "decode", rho, "--out", second)[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_encode_table_fixture(capsys):
    code, out, _ = run(capsys, "qudit", "encode", fx("qutrit_table.json"))
    assert code == 0
    m = json.loads(out)
    assert m["re"][1][0] == pytest.approx(0.1) and m["im"][1][0] == pytest.approx(-0.05)
    assert m["re"][0][0] == pytest.approx(0.3)


def test_check_not_psd(capsys):
    code, out, err = run(capsys, "qudit", "check", fx("not_psd.json"))
    assert code == 2
    assert "psd" in err.lower()
    assert json.loads(out)["density"]["valid"] is False


def test_check_passes(capsys):
    code, out, _ = run(capsys, "qudit", "check", fx("mixed_qutrit.json"))
    report = json.loads(out)
    assert code == 0 and report["pass"] and report["failed"] == 0


def test_check_table_input(capsys):
    assert run(capsys, "qudit", "check", fx("qutrit_table.json"))[0] == 0


def test_schema_error_pointer(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"dim": 2, "re": [[1, 0], [0, 0]], "im": [[0, 0], [0, "x"]]}))
    code, _, err = run(capsys, "qudit", "decode", bad)
    assert code == 1
    assert "/im/1/1" in err


def test_schema_unknown_key(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"kind": "constant", "colour": 1}))
    assert run(capsys, "oscillator", "evolve", bad, "--t-end", 1)[0] == 1


def test_missing_file(capsys):
    code, _, err = run(capsys, "qudit", "decode", "/nonexistent/rho.json")
    assert code == 1 and "cannot read" in err


def test_invalid_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "qudit", "decode", bad)[0] == 1


def test_usage_errors(capsys):
    assert run(capsys, "frobnicate")[0] == 1
    assert run(capsys)[0] == 1
    assert run(capsys, "qudit", "random")[0] == 1


def test_help(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0 and "--tol-override" in out


def test_tol_override(capsys):
    assert run(capsys, "--tol-override", "bogus=1", "qudit", "decode", fx("mixed_qubit.json"))[0] == 1
    assert run(capsys, "--tol-override", "tol_psd=abc", "qudit", "decode", fx("mixed_qubit.json"))[0] == 1
    # a loose PSD tolerance admits the fixture's -0.108 eigenvalue; the ball check still fails
    code, out, err = run(capsys, "qudit", "check", fx("not_psd.json"), "--tol-override", "tol_psd=0.11")
    report = json.loads(out)
    assert code == 2 and report["density"]["valid"] is True
    assert report["qubit_ball"] == {"admissible": False, "margin": pytest.approx(0.37)}


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"style": {"unit_px": 10}, "seed": 3}))
    c = build_config(str(cfg), None, None)
    assert c.style["unit_px"] == 10.0 and c.seed == 3
    assert build_config(str(cfg), 5, None).seed == 5
    cfg.write_text(json.dumps({"sneaky": 1}))
    assert run(capsys, "--config", cfg, "qudit", "decode", fx("mixed_qubit.json"))[0] == 1


def test_global_flags_after_command(tmp_path, capsys):
    out = tmp_path / "o.json"
    assert run(capsys, "qudit", "random", "--dim", 3, "--seed", 4, "--out", out)[0] == 0
    first = out.read_bytes()
    assert run(capsys, "--seed", 4, "qudit", "random", "--dim", 3, "--out", out)[0] == 0
    assert out.read_bytes() == first


def test_triad_qubit(tmp_path, capsys):
    svg = tmp_path / "q.svg"
    assert run(capsys, "triad", "render", fx("mixed_qubit.json"), "--out", svg)[0] == 0
    text = svg.read_text()
    assert text.count("<rect") == 4
    meta = json.loads((tmp_path / "q.json").read_text())
    assert len(meta["triads"]) == 1


def test_triad_ququart_disjoint(tmp_path, capsys):
    svg = tmp_path / "q.svg"
    meta = tmp_path / "m.json"
    assert run(capsys, "triad", "render", fx("ququart.json"), "--mode", "disjoint", "--out", svg, "--meta", meta)[0] == 0
    assert svg.read_text().count("<rect") == 16
    assert len(json.loads(meta.read_text())["triads"]) == 5


def test_triad_disjoint_qutrit_fails(capsys):
    assert run(capsys, "triad", "render", fx("mixed_qutrit.json"), "--mode", "disjoint")[0] == 1


def test_triad_stats(capsys):
    code, out, _ = run(capsys, "triad", "stats", fx("mixed_qubit.json"))
    stats = json.loads(out)
    assert code == 0
    assert stats["triads"][0]["areas"] == [0.5, 0.5, 0.5]
    assert stats["area_entropy"] == pytest.approx(math.log(3), abs=1e-14)
    assert set(stats) >= {"triads", "total_area", "area_entropy", "style"}


def test_triad_rejects_bad_state(capsys):
    assert run(capsys, "triad", "stats", fx("not_psd.json"))[0] == 2


def test_spin_mixed_qutrit(capsys):
    code, out, _ = run(capsys, "tomogram", "spin", fx("mixed_qutrit.json"), "--random-directions", 5)
    r = rows(out)
    assert code == 0
    assert r[0] == ["j", "theta", "phi", "w(1)", "w(0)", "w(-1)"]
    assert len(r) == 6
    for row in r[1:]:
        assert [float(v) for v in row[3:]] == pytest.approx([1 / 3] * 3, abs=1e-15)


def test_spin_angle_mismatch(capsys):
    assert run(capsys, "tomogram", "spin", fx("mixed_qubit.json"), "--theta", 0.1, 0.2, "--phi", 0.3)[0] == 1


def test_optical_ground(tmp_path, capsys):
    out = tmp_path / "t.csv"
    thetas = np.linspace(0, np.pi, 7)
    assert run(capsys, "tomogram", "optical", fx("ground.json"), "--theta", *thetas, "--out", out)[0] == 0
    meta = json.loads((tmp_path / "t.json").read_text())
    assert len(meta["tomograms"]) == 7
    for entry in meta["tomograms"]:
        assert entry["variance"] == pytest.approx(0.5, abs=1e-6)
    assert len(rows(out.read_text())) == 1 + 7 * 321


def test_symplectic_position_density(capsys):
    code, out, _ = run(capsys, "tomogram", "symplectic", fx("ground.json"), "--mu", 1, "--nu", 0)
    assert code == 0
    r = np.array(rows(out)[1:], dtype=float)
    np.testing.assert_allclose(r[:, 3], np.exp(-r[:, 2] ** 2) / np.sqrt(np.pi), atol=1e-10)


def test_symplectic_mixture(tmp_path, capsys):
    state = tmp_path / "mix.json"
    state.write_text(json.dumps({"kind": "mixture", "weights": [0.5, 0.5],
                                 "states": [{"kind": "hermite", "n": 0}, {"kind": "hermite", "n": 1}]}))
    out = tmp_path / "t.csv"
    assert run(capsys, "tomogram", "symplectic", state, "--mu", 1, "--nu", 0, "--out", out)[0] == 0
    meta = json.loads((tmp_path / "t.json").read_text())
    assert meta["tomograms"][0]["variance"] == pytest.approx(1.0, abs=1e-6)


def test_oscillator_evolve_constant(capsys):
    code, out, _ = run(capsys, "oscillator", "evolve", fx("constant.json"), "--t-end", 10, "--dt", 0.1)
    r = np.array(rows(out)[1:], dtype=float)
    assert code == 0 and r.shape == (101, 6)
    np.testing.assert_allclose(r[:, 1], np.cos(r[:, 0]), atol=1e-12)
    np.testing.assert_allclose(r[:, 2], np.sin(r[:, 0]), atol=1e-12)


def test_oscillator_fc_constant(capsys):
    code, out, _ = run(capsys, "oscillator", "fc", fx("constant.json"), "--m", 0, "--t", 2.0)
    r = rows(out)
    assert code == 0 and r[0] == ["m", "n", "t", "P"]
    probs = np.array([row[3] for row in r[1:-1]], dtype=float)
    assert probs[0] == pytest.approx(1.0, abs=1e-10) and np.abs(probs[1:]).max() <= 1e-10
    assert r[-1][1] == "information" and abs(float(r[-1][3])) <= 1e-12


def test_oscillator_fc_jump(capsys):
    code, out, _ = run(capsys, "oscillator", "fc", fx("jump.json"), "--m", 0, "--t", 1.0)
    r = rows(out)
    assert code == 0 and len(r) == 1 + 65 + 1
    assert float(r[1][3]) == pytest.approx(2 / abs(math.cos(2) + 0.5j * math.sin(2) - 1j * (-2 * math.sin(2) + 1j * math.cos(2))), abs=1e-6)
    assert float(r[-1][3]) >= -1e-9


def test_oscillator_tomogram(capsys):
    code, out, _ = run(capsys, "oscillator", "tomogram", fx("jump.json"), "--t", 0.5, "--mu", 1, 0, "--nu", 0, 1)
    r = np.array(rows(out)[1:], dtype=float)
    assert code == 0
    eps = math.cos(1) + 0.5j * math.sin(1)
    assert r[0, 4] == pytest.approx(abs(eps) ** 2 / 2, abs=1e-12)


def test_entropy_commands(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text("[0.25, 0.25, 0.25, 0.25]")
    code, out, _ = run(capsys, "entropy", "shannon", p)
    assert code == 0 and json.loads(out)["entropy"] == pytest.approx(math.log(4))
    code, out, _ = run(capsys, "entropy", "mutual", p, "--factors", 2, 2)
    assert json.loads(out)["mutual_information"] == pytest.approx(0, abs=1e-15)
    code, out, _ = run(capsys, "entropy", "qubit", "--p", 0.5, 0.5, 1.0)
    assert code == 0 and json.loads(out)["von_neumann"] == 0
    code, _, _ = run(capsys, "entropy", "qubit", "--p", 1, 1, 1)
    assert code == 2
    code, out, _ = run(capsys, "entropy", "fc", fx("jump.json"), "--t", 0.7)
    assert code == 0 and json.loads(out)["pass"] is True


def test_entropy_bad_distribution(tmp_path, capsys):
    p = tmp_path / "p.json"
    p.write_text("[0.5, 0.6]")
    assert run(capsys, "entropy", "shannon", p)[0] == 1


COMMANDS = [
    ("out.json", ["qudit", "decode", "ququart.json"]),
    ("out.json", ["qudit", "random", "--dim", "5", "--seed", "9"]),
    ("out.svg", ["triad", "render", "ququart.json", "--mode", "disjoint"]),
    ("out.json", ["triad", "stats", "mixed_qutrit.json"]),
    ("out.csv", ["tomogram", "spin", "ququart.json", "--random-directions", "4", "--seed", "2"]),
    ("out.csv", ["tomogram", "optical", "ground.json", "--theta", "0", "0.5"]),
    ("out.csv", ["oscillator", "evolve", "jump.json", "--t-end", "3"]),
    ("out.csv", ["oscillator", "fc", "jump.json", "--t", "1.5", "--m", "2"]),
]


@pytest.mark.parametrize("name, argv", COMMANDS)
def test_deterministic_output(tmp_path, capsys, name, argv):
    argv = [str(fx(a)) if a.endswith(".json") else a for a in argv]
    outputs = []
    for i in range(2):
        out = tmp_path / f"{i}_{name}"
        assert main(argv + ["--out", str(out)]) == 0
        outputs.append(out.read_bytes())
        side = out.with_suffix(".json") if out.suffix != ".json" else None
        if side is not None and side.exists():
            outputs.append(side.read_bytes())
    half = len(outputs) // 2
    assert outputs[:half] == outputs[half:]


def test_canonical_float():
    assert canonical_float(0.1 + 0.2) == 0.3
    assert canonical_float(-0.0) == 0.0 and str(canonical_float(-0.0)) == "0.0"
    assert canonical_float(float("inf")) == "inf"
    assert dumps({"b": 1.0, "a": [0.1 + 0.2]}) == '{\n  "a": [\n    0.3\n  ],\n  "b": 1.0\n}\n'
    assert csv_text([["x", 1, 1 / 3, True]]) == "x,1,0.333333333333333,true\n"
