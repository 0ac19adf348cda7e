"""End-to-end command tests: output shapes, exit codes, determinism."""

import io
import json
from contextlib import redirect_stderr, redirect_stdout

import pytest

from modlyap.cli import RunConfig, main


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def test_periodic_text_digits():
    code, out, _ = run_cli("lyap", "periodic", "--word", "1,1")
    assert code == 0
    assert out == "679.78370522\n"
    code, out, _ = run_cli("lyap", "periodic", "--word", "2,2")
    assert out == "625.68084367\n"


def test_periodic_json_fields():
    code, out, _ = run_cli("lyap", "periodic", "--word", "1,1", "--out", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["format_version"] == 1
    assert payload["word"] == "1,1"
    assert payload["f"] == "j"
    assert payload["value"] == pytest.approx(679.7837052177172, abs=1e-5)


def test_tilde_csv_shape():
    code, out, _ = run_cli("lyap", "tilde", "--level", "3")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "# format_version 1"
    assert lines[1] == "p,q,x,value"
    data = lines[2:]
    assert len(data) == 9
    first = data[0].split(",")
    assert first[:3] == ["0", "1", "0.0"]
    assert float(first[3]) == pytest.approx(679.7837052177172, abs=1e-5)
    last = data[-1].split(",")
    assert last[:2] == ["1", "2"]
    # value column uses shortest round-trip floats
    for row in data:
        x, v = row.split(",")[2:]
        assert repr(float(x)) == x and repr(float(v)) == v


def test_tilde_csv_deterministic(monkeypatch):
    monkeypatch.setenv("MODLYAP_THREADS", "1")
    _, serial, _ = run_cli("lyap", "tilde", "--level", "3")
    monkeypatch.setenv("MODLYAP_THREADS", "4")
    _, threaded, _ = run_cli("lyap", "tilde", "--level", "3")
    assert serial == threaded
    _, again, _ = run_cli("lyap", "tilde", "--level", "3")
    assert again == threaded


def test_estimate_modes():
    code, out, _ = run_cli("lyap", "estimate", "--period", "1,2")
    assert code == 0
    status, value = out.split()
    assert status == "Exact"
    code, out, _ = run_cli(
        "lyap", "estimate", "--x", "2/3", "--f", "one", "--n-max", "400"
    )
    assert code == 0
    assert out.startswith("Estimated ")
    assert float(out.split()[1]) < 0.2


def test_attain_text():
    code, out, _ = run_cli("lyap", "attain", "--target", "300", "--steps", "3")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "a 12"
    assert lines[1].startswith("switches ")
    assert lines[2].startswith("estimate ")
    assert lines[3].startswith("word ")


def test_val_text():
    _, out, _ = run_cli("lyap", "val", "--word", "1,1")
    assert out == "706.32481354\n"
    _, out, _ = run_cli("lyap", "val", "--frac", "1/3")
    assert out == "708.90991972\n"


def test_cycint_json():
    code, out, _ = run_cli("cycint", "--word", "1,1")
    assert code == 0
    payload = json.loads(out)
    assert payload["format_version"] == 1
    assert payload["method"] == "s"
    assert payload["quad_order"] == 64
    assert payload["re"] == pytest.approx(1359.5674104354344, rel=1e-11)
    assert abs(payload["im"]) < 1e-9
    assert payload["est_error"] < 1e-6
    code, direct, _ = run_cli("cycint", "--word", "1,1", "--method", "direct")
    assert json.loads(direct)["re"] == pytest.approx(payload["re"], rel=1e-9)


def test_cycint_tau0_guard():
    code, out, _ = run_cli(
        "cycint", "--word", "1,1", "--method", "direct", "--tau0", "1+2i"
    )
    assert code == 0
    assert json.loads(out)["re"] == pytest.approx(1359.5674104354344, rel=1e-8)
    with pytest.raises(SystemExit) as exc:
        run_cli("cycint", "--word", "1,1", "--tau0", "1-1i")
    assert exc.value.code == 2


def test_farey_level_dump():
    code, out, _ = run_cli("farey", "--tree", "half", "--level", "2")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[1] == "level,p,q,word"
    assert len(lines) == 2 + 5
    assert '1,1,3,"2,2,1,1"' in lines
    # the word column is quoted so each row still has exactly 4 fields
    for row in lines[2:]:
        head, word = row.split(',"')
        assert len(head.split(",")) == 3 and word.endswith('"')


def test_farey_path_dump():
    code, out, _ = run_cli("farey", "--x", "2/3", "--n-max", "6")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[2] == "# turns VTTVVV"
    assert lines[3] == "0,1,1"
    assert lines[-1] == "6,9,13"


def test_markov_outputs():
    _, out, _ = run_cli("markov", "--frac", "1/3")
    assert out == "2,2,1,1\n"
    _, out, _ = run_cli("markov", "--frac", "1/3", "--out", "json")
    payload = json.loads(out)
    assert payload["p"] == 1 and payload["q"] == 3
    assert payload["level"] == 1
    assert payload["word"] == "2,2,1,1"
    assert payload["s"] == 6
    assert payload["cf"].startswith("[2;")


def test_verify_exit_codes():
    code, out, _ = run_cli("verify", "--suite", "poly")
    assert code == 0 and out == "poly: pass\n"
    code, _, err = run_cli("verify", "--suite", "control")
    assert code == 3
    assert "verification failed" in err
    code, out, _ = run_cli("verify", "--suite", "triangle")
    assert code == 0 and out == "triangle: pass\n"
    # deeper than the default hits a float tie and reports failure
    code, _, err = run_cli("verify", "--suite", "triangle", "--level", "4")
    assert code == 3 and "tie below the floor" in err


def test_verify_all_json():
    code, out, _ = run_cli("verify", "--suite", "all", "--out", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    assert payload["format_version"] == 1
    assert [s["name"] for s in payload["suites"]] == [
        "poly", "flemmas", "bounds", "triangle", "convexity",
    ]


def test_usage_errors_exit_2():
    code, _, err = run_cli("lyap", "periodic")
    assert code == 2 and "usage error" in err
    code, _, err = run_cli("farey", "--x", "nonsense")
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        run_cli("lyap", "periodic", "--word", "1,0,1,1")
    assert exc.value.code == 2


def test_computation_errors_exit_1():
    # relaxed outer zeros parse fine but have no closed-form exponent
    code, _, err = run_cli("lyap", "periodic", "--word", "0,1,1,0")
    assert code == 1 and "error" in err
    code, _, err = run_cli("markov", "--frac", "2/3")
    assert code == 1


def test_plot_svg(tmp_path):
    csv = tmp_path / "pts.csv"
    csv.write_text("0.5,650\n0.25,640\n0.0,660\n")
    code, out, _ = run_cli("plot", "--csv", str(csv))
    assert code == 0
    assert out.count("<circle") == 3
    assert out.count("<polyline") == 1
    assert "<!-- format_version 1 -->" in out

    sorted_csv = tmp_path / "sorted.csv"
    sorted_csv.write_text("0.0,660\n0.25,640\n0.5,650\n")
    _, out2, _ = run_cli("plot", "--csv", str(sorted_csv))
    assert out2 == out

    single = tmp_path / "one.csv"
    single.write_text("0.25,650\n")
    _, out3, _ = run_cli("plot", "--csv", str(single))
    assert out3.count("<circle") == 1 and "<polyline" not in out3

    empty = tmp_path / "none.csv"
    empty.write_text("# nothing here\n")
    code, _, err = run_cli("plot", "--csv", str(empty))
    assert code == 1

    code, _, err = run_cli(
        "plot", "--csv", str(csv), "--x-min", "1", "--x-max", "0"
    )
    assert code == 2


def test_plot_reads_level_csv(tmp_path):
    data = tmp_path / "tilde.csv"
    code, _, _ = run_cli(
        "lyap", "tilde", "--level", "2", "--out-file", str(data)
    )
    assert code == 0
    code, out, _ = run_cli("plot", "--csv", str(data))
    assert code == 0
    assert out.count("<circle") == 5


def test_out_file_writes(tmp_path):
    target = tmp_path / "value.txt"
    code, out, _ = run_cli(
        "lyap", "periodic", "--word", "1,1", "--out-file", str(target)
    )
    assert code == 0 and out == ""
    assert target.read_text() == "679.78370522\n"


def test_config_file(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"order": 32, "out": "json"}))
    code, out, _ = run_cli(
        "lyap", "periodic", "--word", "1,1", "--config", str(cfg)
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["value"] == pytest.approx(679.7837052177172, abs=1e-5)

    bad_key = tmp_path / "bad.json"
    bad_key.write_text(json.dumps({"ordre": 32}))
    code, _, err = run_cli("lyap", "periodic", "--word", "1,1", "--config", str(bad_key))
    assert code == 2 and "config error" in err

    bounds = tmp_path / "bounds.json"
    bounds.write_text(json.dumps({"order": 1}))
    code, _, err = run_cli("lyap", "periodic", "--word", "1,1", "--config", str(bounds))
    assert code == 2

    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, _, err = run_cli("lyap", "periodic", "--word", "1,1", "--config", str(broken))
    assert code == 2


def test_runconfig_roundtrip():
    cfg = RunConfig(order=48, level=6)
    again = RunConfig.from_json(cfg.to_json())
    assert again == cfg
    with pytest.raises(ValueError):
        RunConfig.from_dict({"nope": 1})
    with pytest.raises(ValueError):
        RunConfig(order=600)
    with pytest.raises(ValueError):
        RunConfig(out="yaml")


def test_byte_identical_reruns():
    _, a, _ = run_cli("lyap", "tilde", "--level", "4")
    _, b, _ = run_cli("lyap", "tilde", "--level", "4")
    assert a == b
    _, ja, _ = run_cli("verify", "--suite", "flemmas", "--out", "json")
    _, jb, _ = run_cli("verify", "--suite", "flemmas", "--out", "json")
    assert ja == jb
