"""Test the coadj-utils command-line interface."""

import json

import pytest

from coadj_utils import __version__
from coadj_utils.cli import build_parser, main


def _payload(capsys):
    return json.loads(capsys.readouterr().out)


@pytest.fixture
def field_file(tmp_path):
    """A small displacement record, 0.1 sin θ."""
    path = tmp_path / "field.json"
    path.write_text(json.dumps({"type": "field", "modes": [0.0, [0.0, -0.05]]}))
    return path


def test_version(capsys):
    """Test --version prints the package version."""
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert __version__ in capsys.readouterr().out


def test_parser_requires_command():
    """Test that a subcommand is required."""
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_orbit(capsys):
    """Test the orbit label and config header of a generic element."""
    assert main(["orbit", "--constant-D", "0.245", "--q", "1"]) == 0
    payload = _payload(capsys)
    assert payload["command"] == "orbit"
    assert payload["version"] == __version__
    assert payload["config"]["bandlimit"] == 64
    assert payload["result"]["label"]["omega"] == pytest.approx(0.7)
    assert "closed_form_monodromy" in payload["result"]


def test_orbit_zero_charge(capsys):
    """Test that q = 0 is a computation error."""
    assert main(["orbit", "--constant-D", "1", "--q", "0"]) == 1
    assert "DomainError" in capsys.readouterr().err


def test_monodromy_integer_omega(capsys):
    """Test that ω = 2 gives the identity monodromy."""
    assert main(["monodromy", "--constant-D", "2", "--q", "1"]) == 0
    result = _payload(capsys)["result"]
    assert result["is_identity"] is True
    assert result["omega"] == pytest.approx(2.0)
    assert result["closed_form_distance"] < 1e-7


def test_monodromy_from_file(field_file, capsys):
    """Test the Hill monodromy of a field record."""
    args = ["monodromy", "--operator", "hill", "--input", str(field_file), "--q", "1",
            "--bandlimit", "8"]
    assert main(args) == 0
    assert _payload(capsys)["result"]["determinant"] == pytest.approx(1.0, abs=1e-8)


def test_monodromy_needs_potential(capsys):
    """Test that the potential must be given exactly once."""
    assert main(["monodromy", "--q", "1"]) == 2
    assert "exactly one" in capsys.readouterr().err


def test_constraints_text(capsys):
    """Test the text report of the Maxwell chain."""
    assert main(["constraints", "--case", "maxwell", "--format", "text"]) == 0
    out = capsys.readouterr().out
    assert out.startswith(f"# coadj-utils {__version__} constraints")
    assert "case maxwell" in out


def test_constraints_case_file(tmp_path, capsys):
    """Test a custom theory from a JSON case file."""
    case_file = tmp_path / "case.json"
    case_file.write_text(json.dumps({
        "name": "maxwell-copy",
        "hamiltonian": "1/2*B1^2 - A0*B1'",
        "primaries": ["B0"],
        "multipliers": ["lambda"],
        "pairs": [["A0", "B0"], ["A1", "B1"]],
    }))
    assert main(["constraints", "--case-file", str(case_file)]) == 0
    assert _payload(capsys)["result"]["case"] == "maxwell-copy"


def test_constraints_bad_case_file(tmp_path, capsys):
    """Test that unreadable case files are input errors."""
    case_file = tmp_path / "case.json"
    case_file.write_text("{not json")
    assert main(["constraints", "--case-file", str(case_file)]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_transverse_momentum_csv(tmp_path):
    """Test writing the chiral momentum table to CSV."""
    pd = pytest.importorskip("pandas")
    out = tmp_path / "momentum.csv"
    assert main(["transverse", "--emit", "momentum", "--gauge", "chiral", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["key", "expression"]
    assert "111" in set(frame["key"].astype(str))


def test_transverse_checks(capsys):
    """Test that the transverse identity checks pass."""
    assert main(["transverse", "--emit", "checks"]) == 0
    checks = _payload(capsys)["result"]["checks"]
    assert checks
    assert all(check["holds"] for check in checks)


def test_verify(capsys):
    """Test a passing closed-form case."""
    assert main(["verify", "--case", "dxn"]) == 0
    assert _payload(capsys)["result"]["reports"][0]["passed"] is True


def test_verify_failure(capsys):
    """Test that a failing closed form exits with status 1."""
    assert main(["verify", "--case", "chiral-alpha0", "--param", "beta=0.5"]) == 1
    assert "failed" in capsys.readouterr().err


@pytest.mark.parametrize("param", ["beta", "beta=large"])
def test_verify_bad_parameter(param, capsys):
    """Test that malformed --param values are configuration errors."""
    assert main(["verify", "--case", "dxn", "--param", param]) == 2


def test_check_all_text(capsys):
    """Test the default text summary of selected suites."""
    assert main(["check-all", "--only", "frozen", "7"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert out.rstrip().endswith("passed, 0 failed")


def test_check_all_crashing_suite(monkeypatch, capsys):
    """Test that a crashing suite prints a FAIL row and exits with status 1."""
    from coadj_utils.checks import SUITES

    def crashing(cfg, rng):
        raise ZeroDivisionError("division by zero")

    monkeypatch.setitem(SUITES, 6, ("frozen", crashing))
    assert main(["check-all", "--only", "frozen"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out
    assert out.rstrip().endswith("0 passed, 1 failed")


def test_check_all_unknown_suite(capsys):
    """Test that unknown suites are configuration errors."""
    assert main(["check-all", "--only", "bogus"]) == 2
    assert "Unknown check suite" in capsys.readouterr().err


def test_reduce_csv(tmp_path):
    """Test the reduced trajectory written as CSV."""
    pd = pytest.importorskip("pandas")
    out = tmp_path / "reduced.csv"
    assert main(["reduce", "--t-end", "0.2", "--dt", "0.05", "--out", str(out)]) == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ["t", "Q", "P", "H"]


def test_reduce_singular_start(capsys):
    """Test that Q0 = 1 is rejected."""
    assert main(["reduce", "--Q0", "1.0"]) == 1


def test_reduce_wavefunction(capsys):
    """Test the E = 0 wavefunction output."""
    assert main(["reduce", "--wavefunction", "--points", "5"]) == 0
    result = _payload(capsys)["result"]
    assert len(result["samples"]) == 5
    assert result["residual"] < 1e-5


def test_kdv_from_file(field_file, capsys):
    """Test a linear KdV run from a field record."""
    args = ["kdv", "--input", str(field_file), "--b", "0", "--q", "0.1", "--t-end", "0.05",
            "--bandlimit", "8", "--snapshots", "3"]
    assert main(args) == 0
    result = _payload(capsys)["result"]
    assert len(result["times"]) == len(result["means"])
    assert result["means"][-1] == pytest.approx(0.0, abs=1e-12)


def test_kdv_needs_initial_data(capsys):
    """Test that kdv needs --soliton or --input."""
    assert main(["kdv"]) == 2


def test_schwarzian_expr(capsys):
    """Test S(tan) = 2 at a few interval points."""
    assert main(["schwarzian", "--expr", "tan(x)", "--points", "5"]) == 0
    values = _payload(capsys)["result"]["values"]
    assert len(values) == 5
    assert values == pytest.approx([2.0] * 5, abs=1e-9)


def test_schwarzian_field(field_file, capsys):
    """Test the identity residuals of a circle map from a record."""
    assert main(["schwarzian", "--input", str(field_file), "--bandlimit", "16"]) == 0
    residuals = _payload(capsys)["result"]["residuals"]
    assert set(residuals) == {"inverse", "kernel"}
    assert residuals["kernel"] < 1e-9


def test_parquet_needs_out(capsys):
    """Test that parquet output cannot go to stdout."""
    assert main(["orbit", "--constant-D", "0.245", "--q", "1", "--format", "parquet"]) == 2


def test_bad_log_level(monkeypatch, capsys):
    """Test that an invalid COADJ_LOG value is a configuration error."""
    monkeypatch.setenv("COADJ_LOG", "LOUD")
    assert main(["orbit", "--constant-D", "0.245", "--q", "1"]) == 2
    assert "COADJ_LOG" in capsys.readouterr().err


def test_config_file(tmp_path, capsys):
    """Test that --config overrides are recorded in the header."""
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"seed": 11}))
    assert main(["orbit", "--constant-D", "0.245", "--q", "1", "--config", str(config)]) == 0
    assert _payload(capsys)["config"]["seed"] == 11
