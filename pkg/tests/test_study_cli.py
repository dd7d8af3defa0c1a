import warnings

import pytest

from duranfem.analysis import ConvergenceRow, ConvergenceTable
from duranfem.benchmark import STANDARD
from duranfem.cli import main
from duranfem.study import CoarseAssumptionWarning, StudyConfig, emit, read_config, run_study


def test_config_validation():
    with pytest.raises(ValueError):
        StudyConfig(H_list=(0.2, 0.4))
    with pytest.raises(ValueError):
        StudyConfig(H_list=(1.2, 0.4))
    with pytest.raises(ValueError):
        StudyConfig(H_list=(0.4, 0.2), reference_H=0.3)
    with pytest.raises(ValueError):
        StudyConfig(variant="graded")


def test_study_standard_k2_matches_benchmark():
    table = run_study(StudyConfig(degree=2, H_list=(0.9, 0.5, 0.1)))
    for row in table.rows:
        cells, err, _ = STANDARD[2][row.H]
        assert row.cells == cells
        assert row.energy_error == pytest.approx(err, rel=0.05)
    assert table.rows[-1].rate is None


def test_study_coarse_cell_count():
    table = run_study(StudyConfig(variant="coarse", H_list=(0.1,), reference_H=0.05, reference_degree=2))
    assert table.rows[0].cells == 165


def test_study_manufactured_order():
    warnings.simplefilter("ignore", CoarseAssumptionWarning)
    for variant in ("standard", "coarse"):
        table = run_study(StudyConfig(problem="manufactured", variant=variant, degree=3,
                                      epsilon=1e-2, H_list=(0.2, 0.1, 0.05)))
        assert table.meta["reference"] == "exact"
        assert table.rows[-2].rate >= 2.8


def test_coarse_assumption_warning():
    cfg = StudyConfig(problem="manufactured", variant="coarse", degree=3, epsilon=1e-2, H_list=(0.1, 0.05))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        run_study(cfg)
    assert any(issubclass(w.category, CoarseAssumptionWarning) for w in caught)


def test_emit_empty_csv_is_header_only():
    assert emit(ConvergenceTable(), "csv") == "H,cells,dofs,energy_error,rate\n"


def test_emit_text_snapshot():
    rows = [ConvergenceRow(H, n, n - 1, e, r) for H, (n, e, r) in STANDARD[1].items()]
    text = emit(ConvergenceTable(rows[-2:], {"k": 1}), "text")
    assert text == (
        "# k=1\n"
        "     H  cells   dofs      error   rate\n"
        "  0.20    162    161   7.59e-02   1.06\n"
        "  0.10    310    309   3.81e-02       \n"
    )


def test_emit_unknown_format_and_file(tmp_path):
    with pytest.raises(ValueError):
        emit(ConvergenceTable(), "json")
    path = tmp_path / "t.csv"
    emit(ConvergenceTable(), "csv", path)
    assert path.read_text().startswith("H,cells")
    with pytest.raises(OSError):
        emit(ConvergenceTable(), "csv", tmp_path / "missing" / "t.csv")


def test_read_config(tmp_path):
    path = tmp_path / "study.cfg"
    path.write_text("# sweep\nvariant = coarse\ndegree=2\nH = 0.4, 0.2\nepsilon = 1e-4  # small\n")
    assert read_config(path) == {"variant": "coarse", "degree": 2, "H_list": (0.4, 0.2), "epsilon": 1e-4}
    path.write_text("colour = red\n")
    with pytest.raises(ValueError, match="unknown key"):
        read_config(path)


FAST = ["--problem", "manufactured", "--epsilon", "1e-2", "--H", "0.4,0.2"]


def test_cli_study_csv(capsys):
    assert main(["study", *FAST, "--degree", "2", "--format", "csv"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "H,cells,dofs,energy_error,rate"
    assert len(out) == 3


def test_cli_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["study", *FAST, "--format", "csv", "--output", str(a)]) == 0
    assert main(["study", *FAST, "--format", "csv", "--output", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


def test_cli_flags_override_config(tmp_path, capsys):
    cfg = tmp_path / "s.cfg"
    cfg.write_text("problem = manufactured\nepsilon = 1e-2\ndegree = 3\nH = 0.4, 0.2\n")
    assert main(["study", "--config", str(cfg), "--degree", "1", "--format", "csv"]) == 0
    from_config = capsys.readouterr().out
    assert main(["study", *FAST, "--degree", "1", "--format", "csv"]) == 0
    assert from_config == capsys.readouterr().out
    assert main(["study", *FAST, "--degree", "3", "--format", "csv"]) == 0
    assert from_config != capsys.readouterr().out


def test_cli_errors_exit_nonzero(capsys):
    assert main(["study", "--problem", "nope", "--H", "0.4,0.2"]) == 2
    assert "ProblemError" in capsys.readouterr().err
    assert main(["study", *FAST[:-1], "0.2,0.4"]) == 2
    assert main(["verify", "nonsense"]) == 2
    assert "unknown suite" in capsys.readouterr().err


def test_cli_verify_quadrature(capsys):
    assert main(["verify", "quadrature"]) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 10 and "10/10 checks passed" in out


def test_cli_verify_mesh(capsys):
    assert main(["verify", "mesh"]) == 0
    assert "[FAIL]" not in capsys.readouterr().out


def test_cli_verify_interpolation_reports_failures(capsys):
    code = main(["verify", "interpolation"])
    out = capsys.readouterr().out
    assert code == (1 if "[FAIL]" in out else 0)
