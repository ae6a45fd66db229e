import csv
import json

import pytest

from diaghyp import cli, config, io

DEMOS = config.demo_names()


def _write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def _small_burgers():
    doc = config.load_demo("burgers-riemann").to_dict()
    doc["grid"]["n"] = 120
    doc["outputs"] = {}
    return doc


def test_demo_set_is_complete():
    for name in ("burgers-riemann", "crossing", "linear-case-i", "linear-case-ii",
                 "h2-violating", "dislocation-single-slip", "dislocation-rescale"):
        assert name in DEMOS


@pytest.mark.parametrize("name", DEMOS)
def test_round_trip(name):
    cfg = config.load_demo(name)
    assert config.parse(config.serialize(cfg)) == cfg


@pytest.mark.parametrize("name", DEMOS)
def test_demos_build(name):
    config.load_demo(name).build()


def test_run_writes_declared_columns(tmp_path):
    path = _write(tmp_path, _small_burgers())
    assert cli.main(["run", str(path), "--out-dir", str(tmp_path)]) == 0
    with open(tmp_path / "cfg_monitors.csv", newline="") as fh:
        header = next(csv.reader(fh))
    assert header == ["t", "linf_1", "l1grad_1", "entropy_n", "dissipation_d", "cum_dissipation",
                      "gradsum_sup", "mono_min", "box_excursion"]
    with open(tmp_path / "cfg_fields.csv", newline="") as fh:
        assert next(csv.reader(fh)) == ["t", "x", "u_1"]


def test_csv_outputs_are_byte_identical(tmp_path):
    path = _write(tmp_path, _small_burgers())
    out = []
    for sub in ("a", "b"):
        d = tmp_path / sub
        cli.main(["run", str(path), "--out-dir", str(d)])
        out.append(((d / "cfg_fields.csv").read_bytes(), (d / "cfg_monitors.csv").read_bytes()))
    assert out[0] == out[1]
    assert b"\r\n" not in out[0][0]


def test_schema_error_for_single_cell(tmp_path, capsys):
    doc = _small_burgers()
    doc["grid"]["n"] = 1
    assert cli.main(["run", str(_write(tmp_path, doc))]) == 2
    assert "grid/n" in capsys.readouterr().err


def test_unknown_key_rejected(tmp_path, capsys):
    doc = _small_burgers()
    doc["grid"]["spacing"] = 0.1
    assert cli.main(["verify", str(_write(tmp_path, doc))]) == 2
    assert "spacing" in capsys.readouterr().err


def test_json_syntax_error_reports_position(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{"system": {"kind": "burgers"},\n "grid": }')
    assert cli.main(["run", str(path)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert cli.main(["run", str(tmp_path / "nope.json")]) == 2


def test_strict_crossing_passes(tmp_path):
    path = config.demo_dir() / "crossing.json"
    assert cli.main(["run", str(path), "--strict", "--out-dir", str(tmp_path)]) == 0


def test_verify_burgers_passes(capsys):
    assert cli.main(["verify", str(config.demo_dir() / "burgers-riemann.json")]) == 0
    assert "all checks passed" in capsys.readouterr().out


def test_verify_h2_violating_fails_h2_only(capsys):
    assert cli.main(["verify", str(config.demo_dir() / "h2-violating.json")]) == 1
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith(("PASS", "FAIL"))]
    failed = [ln.split()[1] for ln in lines if ln.startswith("FAIL")]
    assert failed == ["h2_sampling"]
    assert len(lines) > 1


def test_verify_case_ii_reports_gradsum(capsys):
    assert cli.main(["verify", str(config.demo_dir() / "linear-case-ii.json")]) == 0
    out = capsys.readouterr().out
    assert "PASS  gradsum_bound" in out


def test_converge_constant_data_is_exact(tmp_path, capsys):
    doc = _small_burgers()
    doc["profile"] = [{"kind": "smoothstep", "lo": 0.5, "hi": 0.5, "center": 0, "width": 0}]
    path = _write(tmp_path, doc)
    assert cli.main(["converge", str(path), "--refine", "1,2", "--out-dir", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "cfg_converge.csv", newline="")))
    assert [float(r["l1_error"]) for r in rows] == [0.0, 0.0]
    assert rows[1]["observed_order"] == "exact"


def test_converge_burgers_errors_decrease(tmp_path):
    path = _write(tmp_path, _small_burgers())
    cli.main(["converge", str(path), "--refine", "1,2,4", "--out-dir", str(tmp_path)])
    rows = list(csv.DictReader(open(tmp_path / "cfg_converge.csv", newline="")))
    errs = [float(r["l1_error"]) for r in rows]
    assert errs[0] > errs[1] > errs[2]


def test_converge_transport_order(tmp_path):
    path = config.demo_dir() / "transport.json"
    assert cli.main(["converge", str(path), "--out-dir", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "transport_converge.csv", newline="")))
    assert float(rows[-1]["observed_order"]) >= 0.75


def test_bad_refine_list():
    with pytest.raises(SystemExit):
        cli.main(["converge", "x.json", "--refine", "a,b"])


def test_plot_scripts(tmp_path):
    path = _write(tmp_path, _small_burgers())
    cli.main(["run", str(path), "--out-dir", str(tmp_path)])
    assert cli.main(["plot", str(tmp_path / "cfg_fields.csv")]) == 0
    fields_script = (tmp_path / "cfg_fields_plot.py").read_text()
    assert '"cfg_fields.csv"' in fields_script and "u_" in fields_script
    compile(fields_script, "fields", "exec")
    script = io.write_plot_script(tmp_path / "cfg_monitors.csv")
    text = script.read_text()
    assert '"cfg_monitors.csv"' in text and "DictReader" in text
    compile(text, "monitors", "exec")
    assert cli.main(["plot", str(tmp_path / "missing.csv")]) == 2


def test_dislocation_run_strict(tmp_path, capsys):
    path = config.demo_dir() / "dislocation-single-slip.json"
    assert cli.main(["dislocation", "run", str(path), "--strict", "--out-dir", str(tmp_path)]) == 0
    assert "drift" in capsys.readouterr().out


def test_dislocation_run_needs_periodic_grid(tmp_path):
    path = config.demo_dir() / "dislocation-rescale.json"
    assert cli.main(["dislocation", "run", str(path), "--out-dir", str(tmp_path)]) == 2


def test_dislocation_rescale_strict(tmp_path):
    path = config.demo_dir() / "dislocation-rescale.json"
    assert cli.main(["dislocation", "rescale", str(path), "--strict",
                     "--out-dir", str(tmp_path)]) == 0
    rows = list(csv.DictReader(open(tmp_path / "dislocation-rescale_rescale.csv", newline="")))
    assert len(rows) == 3
