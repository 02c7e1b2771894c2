import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from kerrcoupler import __version__, cli, selfcheck
from kerrcoupler.selfcheck import Check

CONFIG_DIR = Path(__file__).resolve().parents[1] / "configs"


def _write(path, text):
    path.write_text(text)
    return path


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["--version"])
    assert info.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_console_script_module_entry():
    out = subprocess.run([sys.executable, "-m", "kerrcoupler.cli", "--version"], capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout


def test_run_writes_csv(tmp_path, capsys):
    cfg = _write(tmp_path / "t.cfg", "scenario = truncation\nn_steps = 20\n")
    assert cli.main(["run", str(cfg)]) == cli.EXIT_OK
    out = tmp_path / "t.csv"
    assert capsys.readouterr().out.strip() == str(out)
    lines = out.read_text().splitlines()
    assert lines[0] == "#@ scenario = truncation"
    assert "t,one_minus_F" in lines
    assert len(lines) - lines.index("t,one_minus_F") - 1 == 21


def test_run_is_byte_identical(tmp_path):
    cfg = _write(tmp_path / "p.cfg", "scenario = chsh\nn_steps = 40\n")
    cli.main(["run", str(cfg), "--out", str(tmp_path / "a.csv")])
    cli.main(["run", str(cfg), "--out", str(tmp_path / "b.csv")])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_rerun_from_csv_reproduces_it(tmp_path):
    cfg = _write(tmp_path / "e.cfg", "scenario = entropy\nn_steps = 30\nepsilon = pi/5\n")
    cli.main(["run", str(cfg)])
    first = tmp_path / "e.csv"
    cli.main(["run", str(first), "--out", str(tmp_path / "again.csv")])
    assert first.read_bytes() == (tmp_path / "again.csv").read_bytes()
    # without --out the source CSV is left alone
    cli.main(["run", str(first)])
    assert (tmp_path / "e.rerun.csv").read_bytes() == first.read_bytes()


def test_method_override(tmp_path):
    cfg = _write(tmp_path / "d.cfg", "scenario = damped\ndims = 3,3\nn_steps = 4\nt_end = 1e-7\n")
    assert cli.main(["run", str(cfg), "--method", "spectral"]) == 0
    assert "#@ method = spectral" in (tmp_path / "d.csv").read_text()


@pytest.mark.parametrize(
    "text",
    ["scenario = truncation\nbogus = 1\n", "scenario = damped\nkappa_a = -1\n", "scenario = truncation\nalpha = (\n"],
)
def test_validation_errors_exit_1(tmp_path, capsys, text):
    cfg = _write(tmp_path / "bad.cfg", text)
    assert cli.main(["run", str(cfg)]) == cli.EXIT_VALIDATION
    assert "line" in capsys.readouterr().err
    assert not (tmp_path / "bad.csv").exists()


def test_missing_config_exit_1(tmp_path):
    assert cli.main(["run", str(tmp_path / "absent.cfg")]) == cli.EXIT_VALIDATION


def test_numeric_error_exit_2(tmp_path, monkeypatch, capsys):
    import kerrcoupler.scenarios as sc
    from kerrcoupler.errors import StepSizeTooLarge

    def fail(*a, **k):
        raise StepSizeTooLarge("step underflow")

    monkeypatch.setattr(sc, "evolve_master", fail)
    cfg = _write(tmp_path / "d.cfg", "scenario = damped\ndims = 3,3\nn_steps = 2\n")
    assert cli.main(["run", str(cfg)]) == cli.EXIT_NUMERIC
    assert "StepSizeTooLarge" in capsys.readouterr().err


def _sweep_dir(tmp_path, names):
    d = tmp_path / "cfgs"
    d.mkdir(parents=True, exist_ok=True)
    bodies = {
        "a": "scenario = probabilities\nn_steps = 15\n",
        "b": "scenario = entropy\nn_steps = 15\nepsilon = pi/5\n",
        "c": "scenario = damped\ndims = 3,3\nn_steps = 5\nt_end = 1e-7\n",
    }
    for name in names:
        _write(d / f"{name}.cfg", bodies[name])
    return d


def test_sweep_outputs_independent_of_order_and_jobs(tmp_path):
    d = _sweep_dir(tmp_path, "abc")
    assert cli.main(["sweep", str(d), "--out-dir", str(tmp_path / "serial")]) == 0
    assert cli.main(["sweep", str(d), "--jobs", "2", "--out-dir", str(tmp_path / "parallel")]) == 0
    # each config alone
    for name in "cba":
        solo = tmp_path / f"solo_{name}"
        d2 = _sweep_dir(solo, name)
        cli.main(["sweep", str(d2), "--out-dir", str(solo / "out")])
        ref = (solo / "out" / f"{name}.csv").read_bytes()
        assert (tmp_path / "serial" / f"{name}.csv").read_bytes() == ref
        assert (tmp_path / "parallel" / f"{name}.csv").read_bytes() == ref


def test_sweep_validates_everything_first(tmp_path):
    d = _sweep_dir(tmp_path, "a")
    _write(d / "z_bad.cfg", "scenario = nope\n")
    assert cli.main(["sweep", str(d), "--out-dir", str(tmp_path / "out")]) == cli.EXIT_VALIDATION
    assert not (tmp_path / "out").exists()


def test_sweep_empty_or_missing_dir(tmp_path):
    assert cli.main(["sweep", str(tmp_path)]) == cli.EXIT_VALIDATION
    assert cli.main(["sweep", str(tmp_path / "missing")]) == cli.EXIT_VALIDATION


def test_shipped_config_dir_validates(tmp_path):
    from kerrcoupler.config import load_config

    copied = tmp_path / "configs"
    shutil.copytree(CONFIG_DIR, copied)
    for p in sorted(copied.glob("*.cfg")):
        load_config(p)


def _fake(name, passed):
    def fn(**kwargs):
        return Check(name, "x", "y", passed, runtime=0.01)

    return fn


def test_self_check_exit_codes(monkeypatch, capsys):
    monkeypatch.setattr(selfcheck, "CRITERIA", (_fake("one", True), _fake("two", True)))
    assert cli.main(["self-check"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "[PASS] one" in out and "2/2 criteria passed" in out and "0.01s" in out

    monkeypatch.setattr(selfcheck, "CRITERIA", (_fake("one", True), _fake("two", False)))
    assert cli.main(["self-check"]) == cli.EXIT_SELFCHECK
    assert "[FAIL] two" in capsys.readouterr().out


def test_perturbed_hamiltonian_fails_truncation():
    honest = selfcheck.criterion_truncation()
    broken = selfcheck.criterion_truncation(perturb_hamiltonian=True)
    assert honest.passed
    assert not broken.passed
    assert broken.runtime > 0


def test_perturb_flag_reaches_truncation(monkeypatch, capsys):
    seen = {}

    def fake_truncation(perturb_hamiltonian=False):
        seen["flag"] = perturb_hamiltonian
        return Check("C1", "x", "y", not perturb_hamiltonian)

    monkeypatch.setattr(selfcheck, "criterion_truncation", fake_truncation)
    monkeypatch.setattr(selfcheck, "CRITERIA", (fake_truncation,))
    assert cli.main(["self-check", "--perturb-hamiltonian"]) == cli.EXIT_SELFCHECK
    assert seen["flag"] is True
