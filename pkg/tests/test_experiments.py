"""Test experiment configurations, protocols and reports."""
import logging
from dataclasses import replace
from pathlib import Path
from typing import Any
from typing import Callable
from unittest.mock import MagicMock

import numpy as np
import pytest
from pytest_mock.plugin import MockerFixture  # type: ignore

from facet_lp.errors import NumericalBreakdown
from facet_lp.experiments import REPORT_COLUMNS
from facet_lp.experiments import ExperimentConfig
from facet_lp.experiments import ExperimentPipeline
from facet_lp.experiments import ReportRow
from facet_lp.experiments import check_theorems
from facet_lp.experiments import perturbation_trend
from facet_lp.experiments import report_csv
from facet_lp.experiments import report_frame
from facet_lp.experiments import run_condition_experiment
from facet_lp.experiments import run_degeneracy_experiment
from facet_lp.experiments import run_perturbation_experiment
from facet_lp.experiments import save_report
from facet_lp.experiments import verify_theorem_suite
from facet_lp.generators import GeneratorSpec
from facet_lp.generators import generate_primal_no_slater
from facet_lp.lp.data_structures import StandardFormLP
from facet_lp.reduction.facial import facially_reduce
from facet_lp.solvers.ipm import solve_ipm


@pytest.mark.parametrize(
    "values",
    [
        {"protocol": "convergence", "m": 2, "n": 5},
        {"protocol": "condition", "m": 5, "n": 5},
        {"protocol": "condition", "m": 2, "n": 5, "seeds": ()},
        {"protocol": "condition", "m": 2, "n": 5, "rule": "steepest"},
        {"protocol": "condition", "m": 2, "n": 5, "r_range": (3, 5)},
        {"protocol": "degiter", "m": 2, "n": 5, "ratios": (0.0, 50.0)},
        {"protocol": "degiter", "m": 2, "n": 5},
        {"protocol": "perturbation", "m": 2, "n": 5},
    ],
)
def test_config_validation(values: Any) -> None:
    """Unknown protocols, bad sizes and empty grids are refused."""
    with pytest.raises(ValueError):
        ExperimentConfig(**values)


def test_config_from_recipe(load_recipe: Callable[[str], Any]) -> None:
    """Recipe constants fill the configuration and the seed override replaces the first seed."""
    recipe = load_recipe("tests/data/simple_recipe.py")
    cfg = ExperimentConfig.from_recipe(recipe, seed_override=9)
    assert cfg.protocol == "theorems"
    assert (cfg.m, cfg.n) == (3, 7)
    assert cfg.r_range == (1, 4)
    assert cfg.seeds == (9, 1)
    assert cfg.output is None
    assert cfg.cell_count == 2
    assert 1 <= cfg.planted_dimension(0) <= 4
    assert cfg.planted_dimension(0) == cfg.planted_dimension(0)


def test_faulty_recipe(load_recipe: Callable[[str], Any]) -> None:
    """An unknown protocol surfaces as a ValueError."""
    with pytest.raises(ValueError):
        ExperimentConfig.from_recipe(load_recipe("tests/data/faulty_recipe.py"))


def test_recipe_without_sizes() -> None:
    """PROTOCOL, M and N are required."""
    with pytest.raises(ValueError, match="missing a required constant"):
        ExperimentConfig.from_recipe(object())


@pytest.mark.parametrize(
    "recipe_file", ["condition.py", "perturbation.py", "degiter.py", "theorems.py"]
)
def test_shipped_recipes(load_recipe: Callable[[str], Any], recipe_file: str) -> None:
    """Every shipped recipe is a valid configuration."""
    cfg = ExperimentConfig.from_recipe(load_recipe(f"recipes/{recipe_file}"))
    assert cfg.protocol == recipe_file[:-3]


def test_shipped_recipe_grids(load_recipe: Callable[[str], Any]) -> None:
    """Shipped grids: degiter ratios up to the Slater cell, 500 theorem seeds."""
    degiter = ExperimentConfig.from_recipe(load_recipe("recipes/degiter.py"))
    theorems = ExperimentConfig.from_recipe(load_recipe("recipes/theorems.py"))
    assert degiter.ratios == (60, 70, 80, 90, 100)
    assert (theorems.m, theorems.n, theorems.r_range) == (4, 10, (1, 9))
    assert len(theorems.seeds) == 500


def test_condition_experiment(logger: logging.Logger) -> None:
    """Three families per seed, the reduction beating the unreduced problem on conditioning."""
    cfg = ExperimentConfig("condition", 4, 12, r_range=(3, 6), seeds=(0, 1))
    rows = run_condition_experiment(cfg, logger)
    assert [row.family for row in rows] == ["no_slater", "slater", "reduced"] * 2
    assert [row.seed for row in rows] == [0, 0, 0, 1, 1, 1]
    for row in rows:
        assert row.kappa is not None
        assert row.iterations is not None
        assert row.rank_av is not None and row.rank_av < 4
    reduced = [row for row in rows if row.family == "reduced"]
    assert all(row.status == "optimal" for row in reduced)


def test_condition_experiment_records_breakdown(
    logger: logging.Logger, mocker: MockerFixture
) -> None:
    """A numerical breakdown becomes a row status and a non-breaking error."""
    cfg = ExperimentConfig("condition", 3, 8, r_range=(2, 2), seeds=(5,))
    last = solve_ipm(StandardFormLP(np.eye(1), np.ones(1), np.ones(1)))
    pipeline = ExperimentPipeline(logger, cfg)
    mocker.patch(
        "facet_lp.experiments.solve_ipm", side_effect=NumericalBreakdown("not pd", last)
    )
    rows = pipeline.run()
    assert [row.status for row in rows] == ["breakdown"] * 3
    assert rows[0].detail == "not pd"
    assert rows[0].iterations == last.iterations
    assert len(pipeline.errors) == 3


def test_perturbation_experiment(logger: logging.Logger) -> None:
    """Both directions for every epsilon; only the certificate direction is Farkas infeasible."""
    cfg = ExperimentConfig("perturbation", 3, 9, r_range=(5, 5), epsilons=(1e-4, 1e-2), seeds=(0,))
    inst = generate_primal_no_slater(GeneratorSpec(3, 9, 5, 0))
    red = facially_reduce(inst.lp)
    rows = run_perturbation_experiment(inst.lp, red, cfg, logger)
    assert [(row.direction, row.epsilon) for row in rows] == [
        ("certificate", 1e-4),
        ("certificate", 1e-2),
        ("range", 1e-4),
        ("range", 1e-2),
    ]
    assert [row.farkas for row in rows] == [True, True, None, None]
    assert rows[0].perturbation is not None
    assert rows[1].perturbation == pytest.approx(100 * rows[0].perturbation)
    for row in rows[:2]:
        assert row.primal_res == pytest.approx(row.perturbation, rel=1e-6)
    assert rows[2].status == "optimal"
    assert rows[2].primal_res is not None and rows[2].primal_res <= 1e-6


def test_perturbation_needs_certificate(slater_lp: StandardFormLP, logger: logging.Logger) -> None:
    """A strictly feasible LP has no certificate direction."""
    cfg = ExperimentConfig("perturbation", 2, 5, r_range=(1, 1), epsilons=(1e-3,))
    with pytest.raises(ValueError):
        run_perturbation_experiment(slater_lp, facially_reduce(slater_lp), cfg, logger)


def test_perturbation_protocol_adds_trend_rows(logger: logging.Logger) -> None:
    """The full protocol appends one trend row per direction."""
    cfg = ExperimentConfig(
        "perturbation", 3, 9, r_range=(5, 5), epsilons=(1e-5, 1e-3, 1e-1), seeds=(2,)
    )
    rows = ExperimentPipeline(logger, cfg).run()
    assert len(rows) == 8
    assert [row.family for row in rows[-2:]] == ["trend", "trend"]
    assert [row.direction for row in rows[-2:]] == ["certificate", "range"]
    assert rows[-2].detail == "3 points"


def test_perturbation_trend() -> None:
    """Residuals growing with the perturbation give a rank correlation of one."""
    rows = [
        ReportRow("perturbation", 0, 2, 5, 1, "perturbed", "certificate", perturbation=p)
        for p in (1e-3, 1e-2, 1e-1)
    ]
    for row, residual in zip(rows, (0.2, 0.4, 3.0)):
        row.primal_res = residual
    rows.append(ReportRow("perturbation", 0, 2, 5, 1, "perturbed", "range", primal_res=1e-9))
    trends = perturbation_trend(rows)
    assert [trend.direction for trend in trends] == ["certificate", "range"]
    assert trends[0].spearman == pytest.approx(1.0)
    assert trends[1].spearman is None
    assert trends[1].detail == "1 points"


def test_degeneracy_experiment(logger: logging.Logger) -> None:
    """Raw rows per ratio and seed are followed by one average row per ratio."""
    cfg = ExperimentConfig("degiter", 3, 8, ratios=(50.0, 100.0), seeds=(0, 1))
    rows = run_degeneracy_experiment(cfg, logger)
    assert len(rows) == 6
    assert [row.seed for row in rows] == [0, 1, 0, 1, -1, -1]
    assert [row.r for row in rows[-2:]] == [4, 8]
    for row in rows[:4]:
        assert row.status == "optimal"
        assert row.degiter_percent is not None and 0.0 <= row.degiter_percent <= 100.0
    first = [row.degiter_percent for row in rows[:2]]
    assert rows[4].degiter_percent == pytest.approx(np.mean(first))
    assert rows[4].detail == "2 runs"


def test_theorem_suite(logger: logging.Logger) -> None:
    """Planted instances and their counterparts pass every check."""
    cfg = ExperimentConfig("theorems", 3, 7, r_range=(1, 4), seeds=(0, 1, 2))
    rows = verify_theorem_suite(cfg, logger)
    assert len(rows) == 6
    assert all(row.passed for row in rows)
    assert [row.family.split(":")[0] for row in rows] == ["no_slater", "slater"] * 3
    for row in rows[::2]:
        assert row.family == "no_slater:certificate"
        assert row.recovered
        assert row.all_degenerate
    for row in rows[1::2]:
        assert row.family == "slater:nondegenerate"
        assert row.recovered is None


def test_check_theorems_on_fixtures(
    exposed_lp: StandardFormLP, slater_lp: StandardFormLP, converse_gap_lp: StandardFormLP
) -> None:
    """Each hand-checked LP lands in its own family."""
    exposed = check_theorems(exposed_lp, ReportRow("theorems", 0, 2, 5, 1, "exposed"), (0, 2, 3))
    assert exposed.family == "exposed:certificate"
    assert exposed.passed and exposed.recovered
    assert (exposed.max_positive, exposed.min_degree, exposed.rank_av) == (1, 1, 1)
    slater = check_theorems(slater_lp, ReportRow("theorems", 0, 2, 5, 2, "slater"))
    assert slater.family == "slater:nondegenerate"
    assert slater.passed
    assert slater.recovered is None
    gap = check_theorems(converse_gap_lp, ReportRow("theorems", 0, 2, 5, 2, "gap"))
    assert gap.family == "gap:converse-gap"
    assert gap.passed
    assert gap.detail == ""


def test_check_theorems_reports_missed_plant(exposed_lp: StandardFormLP) -> None:
    """A planted support that was not recovered fails the row."""
    row = check_theorems(exposed_lp, ReportRow("theorems", 0, 2, 5, 1, "exposed"), (0, 3))
    assert not row.passed
    assert row.detail == "recovered"


def test_theorem_check_errors_are_rows(logger: logging.Logger, mocker: MockerFixture) -> None:
    """An exception inside a check fails that row and is kept as a non-breaking error."""
    mocker.patch("facet_lp.experiments.check_theorems", side_effect=RuntimeError("boom"))
    pipeline = ExperimentPipeline(logger, ExperimentConfig("theorems", 3, 7, (1, 2), seeds=(0,)))
    rows = pipeline.run()
    assert [row.status for row in rows] == ["error", "error"]
    assert not any(row.passed for row in rows)
    assert pipeline.errors[0].endswith("Caught RuntimeError: boom")


def test_wrong_protocol_for_runner(logger: logging.Logger) -> None:
    """Runners refuse a configuration of another protocol."""
    cfg = ExperimentConfig("theorems", 3, 7, (1, 2))
    with pytest.raises(ValueError):
        run_condition_experiment(cfg, logger)


def test_report_frame_and_csv(tmpfile: Path) -> None:
    """Integer columns stay integers and wall time is only kept on request."""
    rows = [
        ReportRow("degiter", 0, 3, 8, 4, "dual_no_slater", iterations=17, wall_time=0.5),
        ReportRow("degiter", -1, 3, 8, 4, "average", degiter_percent=12.5),
    ]
    frame = report_frame(rows)
    assert list(frame.columns) == [c for c in REPORT_COLUMNS if c != "wall_time"]
    assert "wall_time" in report_frame(rows, record_time=True).columns
    text = report_csv(frame)
    header, first, second = text.splitlines()
    assert header.startswith("protocol,seed,m,n,r,family,direction,epsilon")
    assert first.startswith("degiter,0,3,8,4,dual_no_slater,")
    assert ",17," in first
    assert "12.5" in second
    save_report(frame, tmpfile)
    assert tmpfile.read_text(encoding="utf-8") == text


def test_log_summary() -> None:
    """The summary counts statuses and lists failed seeds."""
    log = MagicMock()
    pipeline = ExperimentPipeline(log, ExperimentConfig("theorems", 3, 7, (1, 2)))
    pipeline.rows = [
        ReportRow("theorems", 4, 3, 7, 1, "no_slater", passed=False),
        ReportRow("theorems", 4, 3, 7, 1, "slater", passed=True),
    ]
    pipeline.log_summary()
    log.info.assert_any_call("Protocol theorems produced 2 rows.")
    log.info.assert_any_call("Status ok: 2 row(s).")
    log.warning.assert_called_once_with("1 theorem check(s) failed: seeds [4].")


def test_perturbation_residual_trends(logger: logging.Logger) -> None:
    """Distance to feasibility grows along the certificate; range perturbations stay solvable."""
    epsilons = tuple(float(eps) for eps in np.logspace(-6, -1, 11))
    cfg = ExperimentConfig("perturbation", 20, 60, (45, 45), epsilons=epsilons, seeds=(0, 1, 2))
    rows = ExperimentPipeline(logger, cfg).run()
    for seed in cfg.seeds:
        inst = generate_primal_no_slater(GeneratorSpec(20, 60, 45, seed))
        b_norm = float(np.linalg.norm(inst.lp.b))
        perturbed = [row for row in rows if row.seed == seed and row.family == "perturbed"]
        certificate = [row for row in perturbed if row.direction == "certificate"]
        assert len(certificate) == 11
        for row in certificate:
            assert row.farkas
            assert row.primal_res == pytest.approx(row.perturbation, rel=1e-4)
        trends = [row for row in rows if row.seed == seed and row.family == "trend"]
        assert trends[0].direction == "certificate"
        assert trends[0].spearman is not None and trends[0].spearman > 0.95
        small = [
            row
            for row in perturbed
            if row.direction == "range" and (row.perturbation or 0.0) <= 1e-2 * b_norm
        ]
        assert small
        for row in small:
            assert row.primal_res is not None and row.primal_res <= 1e-6


def test_condition_protocol_on_shipped_recipe(
    load_recipe: Callable[[str], Any], logger: logging.Logger
) -> None:
    """Reduction lowers the normal-matrix condition number by orders of magnitude."""
    cfg = ExperimentConfig.from_recipe(load_recipe("recipes/condition.py"))
    rows = run_condition_experiment(cfg, logger)
    assert all(row.status != "error" for row in rows)
    kappa = {
        family: [row.kappa for row in rows if row.family == family and row.kappa is not None]
        for family in ("no_slater", "reduced")
    }
    assert np.median(kappa["no_slater"]) >= 10 * np.median(kappa["reduced"])
    iterations = {(row.seed, row.family): row.iterations or 0 for row in rows}
    fewer = [iterations[seed, "reduced"] <= iterations[seed, "no_slater"] for seed in cfg.seeds]
    assert sum(fewer) >= 0.8 * len(cfg.seeds)


def test_degiter_protocol_on_shipped_recipe(
    load_recipe: Callable[[str], Any], logger: logging.Logger
) -> None:
    """Degenerate pivots are common without a dual Slater point and vanish at r = n."""
    recipe = load_recipe("recipes/degiter.py")
    cfg = replace(ExperimentConfig.from_recipe(recipe), ratios=(60.0, 100.0))
    rows = run_degeneracy_experiment(cfg, logger)
    raw = [row for row in rows if row.family == "dual_no_slater"]
    assert all(row.status == "optimal" for row in raw)
    planted, strict = [row.degiter_percent for row in rows if row.family == "average"]
    assert planted is not None and strict is not None
    assert planted > strict
    assert strict <= 1.0


@pytest.mark.parametrize("m, n", [(3, 8), (4, 10), (5, 12)])
def test_theorem_suite_over_many_seeds(logger: logging.Logger, m: int, n: int) -> None:
    """Every planted instance and every counterpart passes, whatever the planted dimension."""
    cfg = ExperimentConfig("theorems", m, n, (1, n - 1), seeds=tuple(range(170)))
    rows = verify_theorem_suite(cfg, logger)
    assert len(rows) == 340
    assert [(row.seed, row.family, row.detail) for row in rows if not row.passed] == []
    assert all(row.recovered for row in rows[::2])
