import csv
import json

import numpy as np
import pytest

from qutrit_lindblad import cli, validation
from qutrit_lindblad import evolution as ev
from qutrit_lindblad.evolution import negativity_psimax_closed_form
from qutrit_lindblad.experiments import figure_curves, run_all, thread_count
from qutrit_lindblad.lindblad import SystemIIParams


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.DictReader(fh))
    return [{k: float(v) for k, v in r.items()} for r in rows]


def test_evolve_psimax(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    code = cli.main(["evolve", "--model", "sysII:ge=1,gu=0.25", "--atoms", "2", "--state", "psimax",
                     "--t-end", "10", "--out", str(out)])
    assert code == 0
    rows = read_csv(out)
    assert rows[0]["negativity"] == pytest.approx(1.0)
    for r in rows:
        expected = negativity_psimax_closed_form(SystemIIParams(1, 0.25), r["t"])
        assert abs(r["negativity"] - expected) <= 1e-6
        assert 0 <= r["negativity"] <= 1 and abs(r["trace_defect"]) <= 1e-9
    text = capsys.readouterr().out
    assert "final negativity" in text and "steady state" in text


def test_evolve_cp_violation(tmp_path, capsys):
    code = cli.main(["evolve", "--model", "sysI:g1=1,g2=0.9,beta=1.2", "--state", "psimax", "--out", str(tmp_path / "x.csv")])
    assert code == 2
    assert "completely positive" in capsys.readouterr().err


def test_evolve_parse_errors(tmp_path):
    assert cli.main(["evolve", "--model", "sysII:ge=1", "--state", "psimax"]) == 2
    assert cli.main(["evolve", "--model", "sysII:ge=1,gu=0", "--state", "bogus"]) == 2
    assert cli.main(["evolve", "--state", "psimax"]) == 2
    assert cli.main(["evolve", "--model", "sysII:ge=1,gu=0", "--state", "psimax", "--dt", "0.3", "--t-end", "1"]) == 2
    with pytest.raises(SystemExit) as err:
        cli.main(["evolve", "--dt", "abc"])
    assert err.value.code == 2


def test_evolve_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code = cli.main(["evolve", "--model", "sysII:ge=1,gu=0", "--state", "psimax", "--t-end", "1",
                     "--out", str(blocker / "sub" / "x.csv")])
    assert code == 4


def test_evolve_physics_error(tmp_path, monkeypatch):
    def boom(*a, **k):
        raise ev.PhysicsError(1.5, ["min eigenvalue -1e-3"])

    monkeypatch.setattr(cli, "evolve_rk4", boom)
    code = cli.main(["evolve", "--model", "sysII:ge=1,gu=0", "--state", "psimax", "--out", str(tmp_path / "x.csv")])
    assert code == 3


def test_evolve_json_and_elements(tmp_path):
    out = tmp_path / "traj.json"
    code = cli.main(["evolve", "--model", "sysII:ge=1,gu=0.5", "--state", "isotropic:p=0.75", "--t-end", "2",
                     "--format", "json", "--elements", "5,9", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["elem_5_9_re"][-1] == pytest.approx(0.25 * np.exp(-1.0), abs=1e-9)


def test_evolve_normalizes_rates(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert cli.main(["evolve", "--model", "sysII:ge=2,gu=0.5", "--state", "psimax", "--t-end", "1", "--out", str(out)]) == 0
    assert "normalized by 2" in capsys.readouterr().out
    rows = read_csv(out)
    assert rows[-1]["negativity"] == pytest.approx(negativity_psimax_closed_form(SystemIIParams(1, 0.25), 1.0), abs=1e-9)


def test_config_file(tmp_path):
    cfg = {"command": "evolve", "model": "sysII:ge=1,gu=0.1", "state": "psimax",
           "integrator": {"dt": 0.001, "t_end": 2.0, "sample_every": 50}, "output": str(tmp_path / "c.csv"), "seed": 3}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert cli.main(["evolve", "--config", str(path)]) == 0
    rows = read_csv(tmp_path / "c.csv")
    assert len(rows) == 41
    # flags override the file
    assert cli.main(["evolve", "--config", str(path), "--t-end", "1"]) == 0
    assert len(read_csv(tmp_path / "c.csv")) == 21
    path.write_text(json.dumps({**cfg, "bogus": 1}))
    assert cli.main(["evolve", "--config", str(path)]) == 2
    path.write_text("{not json")
    assert cli.main(["evolve", "--config", str(path)]) == 2
    assert cli.main(["evolve", "--config", str(tmp_path / "missing.json")]) == 4


def test_determinism(tmp_path):
    args = ["evolve", "--model", "sysI:g1=1,g2=0.9,beta=0.6", "--state", "pure:theta=0.39,phi=0.52", "--t-end", "3",
            "--elements", "1,5"]
    assert cli.main(args + ["--out", str(tmp_path / "a.csv")]) == 0
    assert cli.main(args + ["--out", str(tmp_path / "b.csv")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_file_state(tmp_path):
    from qutrit_lindblad.specs import write_state_file
    from qutrit_lindblad.states import IsotropicParams, isotropic_state

    write_state_file(tmp_path / "w.csv", isotropic_state(IsotropicParams(0.75)))
    assert cli.main(["negativity", "--state", f"file:{tmp_path / 'w.csv'}", "--format", "json",
                     "--out", str(tmp_path / "n.json")]) == 0
    assert json.loads((tmp_path / "n.json").read_text())["negativity"] == pytest.approx(2 / 3)


@pytest.mark.parametrize(
    "state,expected,verdict",
    [("psimax", 1 / 3, "entangled"), ("isotropic:p=0.75", 7 / 36, "entangled"), ("pure:theta=0,phi=0.5", 0.0, "separable")],
)
def test_asymptote(tmp_path, state, expected, verdict):
    out = tmp_path / "a.json"
    assert cli.main(["asymptote", "--state", state, "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["negativity"] == pytest.approx(expected, abs=1e-12)
    assert report["verdict"] == verdict


def test_asymptote_check_numeric(capsys):
    assert cli.main(["asymptote", "--state", "isotropic:p=0.75", "--check-numeric", "--format", "json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["max_elementwise_deviation"] <= 1e-6
    assert report["numeric_negativity"] == pytest.approx(7 / 36, abs=1e-6)


def test_figure_3_alpha_zero(tmp_path):
    assert cli.main(["figure", "3", "--out-dir", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert len(manifest["curves"]) == 5
    for entry in manifest["curves"]:
        assert (tmp_path / entry["file"]).exists()
    zero = next(e for e in manifest["curves"] if e["params"]["alpha"] == 0)
    for r in read_csv(tmp_path / zero["file"]):
        t = r["t"]
        assert abs(r["negativity"] - (np.exp(-2 * t) + np.exp(-t) + 1) / 3) <= 1e-6


def test_figure_5_initial_value(tmp_path):
    assert cli.main(["figure", "5", "--out-dir", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    for entry in manifest["curves"]:
        rows = read_csv(tmp_path / entry["file"])
        assert rows[0]["negativity"] == pytest.approx(2 / 3, abs=1e-12)


def test_figure_8_plateau(tmp_path):
    assert cli.main(["figure", "8", "--out-dir", str(tmp_path)]) == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert [e["params"]["g2"] for e in manifest["curves"]] == [0.25, 0.5, 0.75, 1.0]
    for entry in manifest["curves"]:
        rows = read_csv(tmp_path / entry["file"])
        late = [r["negativity"] for r in rows if r["t"] >= 40]
        assert max(late) - min(late) <= 1e-6 and min(late) > 0
        assert all(0 <= r["negativity"] <= 1 and r["trace_defect"] <= 1e-9 for r in rows)


def test_figure_write_failure(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert cli.main(["figure", "4", "--out-dir", str(blocker)]) == 4


def test_figure_bad_number():
    with pytest.raises(SystemExit):
        cli.main(["figure", "9"])
    with pytest.raises(ValueError):
        figure_curves(2)


def test_figure_output_independent_of_threads(tmp_path, monkeypatch):
    monkeypatch.setenv("QUTRIT_LINDBLAD_THREADS", "1")
    assert cli.main(["figure", "6", "--out-dir", str(tmp_path / "serial")]) == 0
    monkeypatch.setenv("QUTRIT_LINDBLAD_THREADS", "4")
    assert cli.main(["figure", "6", "--out-dir", str(tmp_path / "parallel")]) == 0
    for f in (tmp_path / "serial").iterdir():
        assert f.read_bytes() == (tmp_path / "parallel" / f.name).read_bytes()


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("QUTRIT_LINDBLAD_THREADS", "3")
    assert thread_count() == 3
    monkeypatch.setenv("QUTRIT_LINDBLAD_THREADS", "junk")
    assert thread_count(2) == 2
    assert run_all({"b": 2, "a": 1}, lambda x: x * 10) == {"b": 20, "a": 10}


def test_sweep(tmp_path):
    code = cli.main(["sweep", "--model", "sysII:ge=1,gu={}", "--values", "0,0.5", "--state", "psimax",
                     "--t-end", "2", "--out-dir", str(tmp_path)])
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert [e["params"]["value"] for e in manifest["curves"]] == [0.0, 0.5]
    for entry in manifest["curves"]:
        rows = read_csv(tmp_path / entry["file"])
        gu = entry["params"]["value"]
        assert rows[-1]["negativity"] == pytest.approx(negativity_psimax_closed_form(SystemIIParams(1, gu), 2.0), abs=1e-9)
    assert cli.main(["sweep", "--model", "sysII:ge=1,gu=0", "--values", "0", "--state", "psimax"]) == 2


def test_validate_default(capsys):
    assert cli.main(["validate"]) == 0
    assert "checks passed" in capsys.readouterr().out


def test_validate_suite_filter(capsys):
    assert cli.main(["validate", "--suite", "negativity"]) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.startswith("[")]
    assert lines and all("negativity:" in l for l in lines)


def test_validate_detects_printed_rho55_typo(monkeypatch, capsys):
    original = ev.analytic_II_general

    def printed(rho0, params, t):
        out = original(rho0, params, t)
        out[4, 4] = np.exp(-2 * params.gammaE * t) * rho0[4, 4].real
        return out

    monkeypatch.setattr(validation.ev, "analytic_II_general", printed)
    assert cli.main(["validate", "--suite", "evolution"]) == 1
    text = capsys.readouterr().out
    assert "[FAIL] evolution: exact propagators preserve trace" in text
