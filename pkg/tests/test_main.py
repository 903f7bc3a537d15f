"""Test cases for the command line client in __main__ module."""
import os
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner
from pytest_mock.plugin import MockerFixture  # type: ignore

from facet_lp import __main__
from facet_lp.errors import RankDeficient
from facet_lp.formats import load_instance
from facet_lp.formats.native import decode_native


INSTANCES = "tests/data/instances"


def test_main_succeeds(runner: CliRunner) -> None:
    """It exits with a status code of zero."""
    result = runner.invoke(__main__.main, ["--help"])
    assert result.exit_code == 0
    for command in ("reduce", "analyze", "enumerate", "generate", "solve", "experiment"):
        assert command in result.output


def test_reduce(runner: CliRunner) -> None:
    """It prints the reduction summary of the exposed instance and writes the reduced LP."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(
            __main__.main, ["reduce", f"{workdir}/{INSTANCES}/exposed.json", "-o", "reduced.json"]
        )
        assert result.exit_code == 0
        assert "Output is logged to logs/" in result.output
        assert "Exposing support: {1,3,4}" in result.output
        assert "Kept columns: {2,5}" in result.output
        assert "Kept rows: {1}" in result.output
        assert "Reduced size: 1x2" in result.output
        assert "Rank of AV: 1" in result.output
        assert "Minimum degree of degeneracy: 1" in result.output
        assert "Reduction passes: 1" in result.output
        assert "Slater point verified: yes" in result.output
        assert "Witness: (" in result.output
        assert "Encountered 0 non-breaking error(s)." in result.output
        assert "Finished successfully!" in result.output
        reduced = load_instance("reduced.json")
        assert (reduced.m, reduced.n) == (1, 2)
        assert len(list(Path("logs").glob("*-reduce.log"))) == 1


def test_reduce_mps(runner: CliRunner) -> None:
    """MPS files give the same reduction."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(__main__.main, ["reduce", f"{workdir}/{INSTANCES}/exposed.mps"])
        assert result.exit_code == 0
        assert "Kept columns: {2,5}" in result.output


def test_reduce_slater(runner: CliRunner) -> None:
    """Nothing is exposed on a strictly feasible instance."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(__main__.main, ["reduce", f"{workdir}/{INSTANCES}/slater.json"])
        assert result.exit_code == 0
        assert "Exposing support: {}" in result.output
        assert "Kept columns: {1,2,3,4,5}" in result.output
        assert "Reduction passes: 0" in result.output


def test_analyze(runner: CliRunner) -> None:
    """It reports the certificate of the exposed instance."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(__main__.main, ["analyze", f"{workdir}/{INSTANCES}/exposed.json"])
        assert result.exit_code == 0
        assert "Primal: not strictly feasible" in result.output
        assert "Exposing vector: (" in result.output
        assert "Multiplier: (" in result.output
        assert "Exposed variables: {1,3,4}" in result.output
        assert "Dual:" not in result.output


def test_analyze_dual(runner: CliRunner) -> None:
    """With --dual the strictly feasible dual keeps [A^T U] at full rank."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(
            __main__.main, ["analyze", "--dual", f"{workdir}/{INSTANCES}/slater.json"]
        )
        assert result.exit_code == 0
        assert "Primal: strictly feasible" in result.output
        assert "Witness: (" in result.output
        assert "Dual: strictly feasible" in result.output
        assert "Rank of [A^T U]: 5 of 5" in result.output


def test_enumerate(runner: CliRunner) -> None:
    """It lists the six degenerate bases of the exposed instance."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(__main__.main, ["enumerate", f"{workdir}/{INSTANCES}/exposed.json"])
        assert result.exit_code == 0
        assert "{1,2}" in result.output
        assert "{4,5}" in result.output
        assert "Feasible bases: 6" in result.output
        assert "Distinct points: 2" in result.output
        assert "All degenerate: yes" in result.output


def test_enumerate_cap(runner: CliRunner) -> None:
    """A cap below the number of column subsets stops the command."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(
            __main__.main, ["enumerate", "--cap", "9", f"{workdir}/{INSTANCES}/slater.json"]
        )
        assert result.exit_code == 1
        assert "Stopped on EnumerationTooLarge" in result.output


@pytest.mark.parametrize("variant", ["primal", "dual"])
def test_solve_simplex(runner: CliRunner, variant: str) -> None:
    """Both simplex variants reach the objective 0.5 on the exposed instance."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(
            __main__.main,
            [
                "solve",
                "--method",
                "simplex",
                "--variant",
                variant,
                f"{workdir}/{INSTANCES}/exposed.json",
            ],
        )
        assert result.exit_code == 0
        assert "Status: optimal" in result.output
        assert "Objective: 0.5" in result.output
        assert "Pivots: " in result.output
        assert "DEGITER: " in result.output
        assert "x: (" in result.output


def test_solve_ipm(runner: CliRunner) -> None:
    """The interior-point method reports its residuals and conditioning."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(__main__.main, ["solve", f"{workdir}/{INSTANCES}/slater.json"])
        assert result.exit_code == 0
        assert "Status: optimal" in result.output
        assert "Iterations: " in result.output
        assert "KKT residuals: (" in result.output
        assert "Normal matrix condition: " in result.output


def test_generate(runner: CliRunner) -> None:
    """It writes the planted instance and its strictly feasible counterpart."""
    with runner.isolated_filesystem():
        result = runner.invoke(
            __main__.main,
            ["generate", "-m", "3", "-n", "7", "-r", "2", "-s", "4", "-o", "inst.json", "--slater"],
        )
        assert result.exit_code == 0
        lp = load_instance("inst.json")
        counterpart = load_instance("inst-slater.json")
        assert (lp.m, lp.n) == (3, 7)
        assert lp.digest != counterpart.digest
        document = decode_native(Path("inst.json").read_text(encoding="utf-8"))
        assert document.plant is not None
        assert document.plant["kind"] == "primal_no_slater"
        assert len(document.plant["support"]) == 5


def test_generate_bad_dimension(runner: CliRunner) -> None:
    """A planted dimension outside of [1, n] is a usage error."""
    with runner.isolated_filesystem():
        result = runner.invoke(
            __main__.main, ["generate", "-m", "3", "-n", "7", "-r", "0", "-o", "inst.json"]
        )
        assert result.exit_code == 2
        assert "Invalid value" in result.output
        assert not Path("inst.json").exists()


def test_generate_seed_from_environment(runner: CliRunner) -> None:
    """FACET_SEED fills in the seed."""
    with runner.isolated_filesystem():
        args = ["generate", "-m", "2", "-n", "5", "-r", "2"]
        runner.invoke(__main__.main, args + ["-o", "env.json"], env={"FACET_SEED": "6"})
        runner.invoke(__main__.main, args + ["-o", "flag.json", "-s", "6"])
        assert load_instance("env.json").digest == load_instance("flag.json").digest


def test_experiment_to_stdout(runner: CliRunner) -> None:
    """A recipe without OUTPUT prints its report as CSV."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(
            __main__.main, ["experiment", f"{workdir}/tests/data/simple_recipe.py"]
        )
        assert result.exit_code == 0
        assert "protocol,seed,m,n,r,family" in result.output
        assert result.output.count("theorems,0,3,7,") == 2
        assert result.output.count("theorems,1,3,7,") == 2
        assert "Running protocol theorems over 2 seed(s)." in result.output
        assert "Finished successfully!" in result.output


def test_experiment_to_file(runner: CliRunner) -> None:
    """With -o the report goes to a file and the seed option replaces the first seed."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(
            __main__.main,
            ["experiment", f"{workdir}/tests/data/simple_recipe.py", "-o", "report.csv", "-s", "5"],
        )
        assert result.exit_code == 0
        report = Path("report.csv").read_text(encoding="utf-8").splitlines()
        assert len(report) == 5
        assert report[1].startswith("theorems,5,3,7,")
        assert "wall_time" not in report[0]
        assert "Report written to report.csv." in result.output


def test_experiment_with_faulty_recipe(runner: CliRunner) -> None:
    """An unknown protocol is reported as an invalid recipe."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(
            __main__.main, ["experiment", f"{workdir}/tests/data/faulty_recipe.py"]
        )
        assert result.exit_code == 1
        assert "Invalid recipe" in result.output
        assert "Unknown protocol 'convergence'" in result.output


def test_experiment_with_bad_recipe_file(runner: CliRunner) -> None:
    """It exits if recipe file is not a python file."""
    with runner.isolated_filesystem():
        Path("recipe.txt").write_text("PROTOCOL = 'theorems'\n", encoding="utf-8")
        result = runner.invoke(__main__.main, ["experiment", "recipe.txt"])
        assert result.exit_code == 1
        assert "Failed to import recipe 'recipe.txt', is it a python file?" in result.output


def test_computation_errors_reach_the_log(runner: CliRunner) -> None:
    """An error stops the command after the final report."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        result = runner.invoke(
            __main__.main, ["reduce", f"{workdir}/{INSTANCES}/rank_deficient.json"]
        )
        assert isinstance(result.exception, RankDeficient)
        assert "Stopped on RankDeficient" in result.output
        assert "Encountered 0 non-breaking error(s)." in result.output
        assert "Finished successfully!" not in result.output


@pytest.mark.parametrize(
    "instance, code, message",
    [
        ("exposed.json", 0, ""),
        ("rank_deficient.json", 2, "Error: RankDeficient: rank(A) = 1 < m = 2"),
        ("future_schema.json", 2, "Error: SchemaVersionUnknown: "),
    ],
)
def test_cli_dispatch_exit_codes(
    runner: CliRunner, capsys: pytest.CaptureFixture[str], instance: str, code: int, message: str
) -> None:
    """Computation errors exit with 2 and a one-line message."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        assert __main__.cli_dispatch(["analyze", f"{workdir}/{INSTANCES}/{instance}"]) == code
        assert message in capsys.readouterr().err


def test_cli_dispatch_usage_error(runner: CliRunner) -> None:
    """Unknown options and missing files exit with 1."""
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        assert __main__.cli_dispatch(["solve", "--method", "barrier", "x.json"]) == 1
        assert __main__.cli_dispatch(["reduce", "missing.json"]) == 1
        assert __main__.cli_dispatch(["reduce", f"{workdir}/{INSTANCES}/slater.json"]) == 0


def test_cli_dispatch_theorem_failure(runner: CliRunner, mocker: MockerFixture) -> None:
    """Failed theorem checks exit with 3 after the report is written."""
    mocker.patch("facet_lp.experiments.check_theorems", side_effect=RuntimeError("boom"))
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        args = ["experiment", f"{workdir}/tests/data/simple_recipe.py", "-o", "report.csv"]
        assert __main__.cli_dispatch(args) == 3
        assert Path("report.csv").exists()


def test_cli_dispatch_unexpected_error(
    runner: CliRunner, capsys: pytest.CaptureFixture[str], mocker: MockerFixture
) -> None:
    """Exceptions outside of the package hierarchy also exit with 2 and a one-line message."""
    mocker.patch("facet_lp.__main__.facially_reduce", side_effect=np.linalg.LinAlgError("boom"))
    workdir = os.getcwd()
    with runner.isolated_filesystem():
        assert __main__.cli_dispatch(["reduce", f"{workdir}/{INSTANCES}/slater.json"]) == 2
        assert "Error: LinAlgError: boom" in capsys.readouterr().err
