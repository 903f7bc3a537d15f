"""Experiment protocols on generated instances and their CSV reports.

Four protocols are available:
    1. condition: normal-matrix condition numbers and KKT residuals of the interior-point method on
       instances without a Slater point, their strictly feasible counterparts and their reductions.
    2. perturbation: b is perturbed along the exposing multiplier, which is infeasible for every
       epsilon and reports the distance to feasibility, or along a direction in range(AV), which
       solves the reduced LP and reports the residual of the lifted solution.
    3. degiter: share of degenerate pivots of the dual simplex on instances without a dual Slater
       point, over a grid of planted dimensions.
    4. theorems: degeneracy facts checked on small instances against exhaustive enumeration.

A failure in one cell is logged, kept as a non-breaking error and still reported as a row.
"""
import sys
import time
from dataclasses import asdict
from dataclasses import dataclass
from dataclasses import fields
from logging import Logger
from logging import getLogger
from pathlib import Path
from typing import Any
from typing import Callable
from typing import List
from typing import Optional
from typing import Tuple
from typing import Union

import numpy as np
import pandas as pd
from alive_progress import alive_bar
from atomicwrites import atomic_write
from scipy.stats import spearmanr

from facet_lp import DEFAULT_TOLERANCES
from facet_lp.errors import NumericalBreakdown
from facet_lp.generators import GeneratorSpec
from facet_lp.generators import PlantedInstance
from facet_lp.generators import generate_dual_no_slater
from facet_lp.generators import generate_primal_no_slater
from facet_lp.generators import to_slater_counterpart
from facet_lp.lp.bases import enumerate_bfs
from facet_lp.lp.bases import is_strictly_feasible_point
from facet_lp.lp.bases import validate
from facet_lp.lp.data_structures import StandardFormLP
from facet_lp.pipeline import Pipeline
from facet_lp.reduction.facial import FacialReduction
from facet_lp.reduction.facial import facially_reduce
from facet_lp.reduction.facial import farkas_infeasible
from facet_lp.reduction.facial import feasibility_distance
from facet_lp.reduction.facial import lift
from facet_lp.reduction.facial import minimum_degeneracy_degree
from facet_lp.solvers.ipm import IpmOptions
from facet_lp.solvers.ipm import IpmResult
from facet_lp.solvers.ipm import solve_ipm
from facet_lp.solvers.simplex import RULES
from facet_lp.solvers.simplex import solve_simplex


PROTOCOLS = ("condition", "perturbation", "degiter", "theorems")
CELL_STREAM = 200
DIRECTION_STREAM = 201


@dataclass(frozen=True)
class ExperimentConfig:
    """Protocol, instance sizes, grids and seeds of an experiment run.

    `r_range` is an inclusive range from which each seed draws its planted dimension; the degiter
    protocol uses `ratios` (percentages of n) instead.
    """

    protocol: str
    m: int
    n: int
    r_range: Tuple[int, int] = (1, 1)
    ratios: Tuple[float, ...] = ()
    seeds: Tuple[int, ...] = (0,)
    epsilons: Tuple[float, ...] = ()
    rule: str = "bland"
    record_time: bool = False
    output: Optional[str] = None

    def __post_init__(self) -> None:
        """Check that the protocol is known and that its grids are nonempty."""
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"Unknown protocol {self.protocol!r}, expected one of {PROTOCOLS}.")
        if not 1 <= self.m < self.n:
            raise ValueError(f"Experiment needs 1 <= M < N, got M={self.m}, N={self.n}.")
        if not self.seeds:
            raise ValueError("SEEDS must hold at least one seed.")
        if self.rule not in RULES:
            raise ValueError(f"Unknown RULE {self.rule!r}, expected one of {RULES}.")
        low, high = self.r_range
        if self.protocol == "degiter":
            if not self.ratios or not all(0 < ratio <= 100 for ratio in self.ratios):
                raise ValueError("RATIOS must hold percentages in (0, 100].")
        elif not 1 <= low <= high < self.n:
            raise ValueError(f"R_RANGE must satisfy 1 <= low <= high < N, got {self.r_range}.")
        if self.protocol == "perturbation" and not self.epsilons:
            raise ValueError("EPSILONS must hold at least one perturbation size.")

    @classmethod
    def from_recipe(cls, recipe: Any, seed_override: Optional[int] = None) -> "ExperimentConfig":
        """Build a configuration from the module-level constants of a recipe file.

        Args:
            recipe (Any): the recipe file loaded as a module
            seed_override (int, optional): replaces the first seed of the recipe

        Returns:
            ExperimentConfig: the configuration

        Raises:
            ValueError: a required constant is missing or the values are inconsistent
        """
        try:
            protocol, m, n = recipe.PROTOCOL, int(recipe.M), int(recipe.N)
        except AttributeError as err:
            raise ValueError(f"Recipe is missing a required constant: {err}") from err
        seeds = [int(seed) for seed in getattr(recipe, "SEEDS", (0,))]
        if seed_override is not None and seeds:
            seeds[0] = seed_override
        low, high = getattr(recipe, "R_RANGE", (1, 1))
        return cls(
            protocol=protocol,
            m=m,
            n=n,
            r_range=(int(low), int(high)),
            ratios=tuple(float(ratio) for ratio in getattr(recipe, "RATIOS", ())),
            seeds=tuple(seeds),
            epsilons=tuple(float(eps) for eps in getattr(recipe, "EPSILONS", ())),
            rule=getattr(recipe, "RULE", "bland"),
            record_time=bool(getattr(recipe, "RECORD_TIME", False)),
            output=getattr(recipe, "OUTPUT", None),
        )

    def planted_dimension(self, seed: int) -> int:
        """Planted dimension r of a seed, drawn uniformly from `r_range`."""
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(CELL_STREAM,)))
        return int(rng.integers(self.r_range[0], self.r_range[1], endpoint=True))

    @property
    def cell_count(self) -> int:
        """Number of progress-bar cells of the protocol."""
        if self.protocol == "degiter":
            return len(self.ratios) * len(self.seeds)
        return len(self.seeds)


@dataclass
class ReportRow:
    """One line of an experiment report; fields that do not apply to a protocol stay empty.

    Average rows of the degiter protocol carry seed -1.
    """

    protocol: str
    seed: int
    m: int
    n: int
    r: int
    family: str
    direction: Optional[str] = None
    epsilon: Optional[float] = None
    perturbation: Optional[float] = None
    kappa: Optional[float] = None
    primal_res: Optional[float] = None
    dual_res: Optional[float] = None
    complementarity: Optional[float] = None
    iterations: Optional[int] = None
    objective: Optional[float] = None
    degiter_percent: Optional[float] = None
    farkas: Optional[bool] = None
    spearman: Optional[float] = None
    all_degenerate: Optional[bool] = None
    max_positive: Optional[int] = None
    min_degree: Optional[int] = None
    rank_av: Optional[int] = None
    recovered: Optional[bool] = None
    passed: Optional[bool] = None
    status: str = "ok"
    detail: str = ""
    wall_time: Optional[float] = None

    def fill_ipm(self, result: IpmResult) -> "ReportRow":
        """Copy condition number, KKT residuals, iterations and status from an IPM result."""
        self.kappa = result.normal_condition
        self.primal_res, self.dual_res, self.complementarity = result.kkt
        self.iterations = result.iterations
        self.objective = result.objective
        self.status = result.status
        return self


REPORT_COLUMNS = [f.name for f in fields(ReportRow)]
INTEGER_COLUMNS = ["iterations", "max_positive", "min_degree", "rank_av"]


class ExperimentPipeline(Pipeline):
    """Run one experiment protocol over its grid and collect report rows."""

    def __init__(
        self, log: Logger, cfg: ExperimentConfig, opts: Optional[IpmOptions] = None
    ) -> None:
        """Initialize common parameters and the protocol configuration.

        Args:
            log (Logger): logger object
            cfg (ExperimentConfig): protocol, sizes, grids and seeds
            opts (IpmOptions, optional): interior-point options for every solve
        """
        super().__init__(log)
        self.cfg = cfg
        self.opts = opts or IpmOptions()
        self.rows: List[ReportRow] = []

    def run(self) -> List[ReportRow]:
        """Run the configured protocol with a progress bar on standard error.

        Returns:
            List[ReportRow]: rows in seed order, summary rows last
        """
        protocol: Callable[[Callable[[], None]], None] = getattr(self, self.cfg.protocol)
        with alive_bar(self.cfg.cell_count, file=sys.stderr, title=self.cfg.protocol) as bar:
            protocol(bar)
        return self.rows

    def _row(self, seed: int, r: int, family: str, **values: Any) -> ReportRow:
        return ReportRow(self.cfg.protocol, seed, self.cfg.m, self.cfg.n, r, family, **values)

    def _timed(self, row: ReportRow, started: float) -> ReportRow:
        if self.cfg.record_time:
            row.wall_time = time.perf_counter() - started
        return row

    def _solve(self, lp: StandardFormLP, row: ReportRow) -> Optional[IpmResult]:
        try:
            result = solve_ipm(lp, self.opts)
        except NumericalBreakdown as err:
            self.record_error(f"Seed {row.seed} {row.family} {row.direction or ''}".strip(), err)
            if err.result is not None:
                row.fill_ipm(err.result)
            row.status, row.detail = "breakdown", str(err)
            return err.result
        row.fill_ipm(result)
        return result

    def solve_row(self, lp: StandardFormLP, row: ReportRow) -> ReportRow:
        """Solve an LP with the interior-point method and fill a row with the outcome.

        A numerical breakdown is recorded as a row status, with the last iterate's metrics.

        Args:
            lp (StandardFormLP): the LP to solve
            row (ReportRow): row to fill

        Returns:
            ReportRow: the filled row
        """
        started = time.perf_counter()
        self._solve(lp, row)
        return self._timed(row, started)

    def solve_reduced_row(
        self, lp: StandardFormLP, red: FacialReduction, row: ReportRow
    ) -> ReportRow:
        """Solve the reduced system and report the lifted point's residual on the full system.

        The right-hand side of `lp` must lie in range(AV); the reduced system keeps its rows
        `red.kept_rows` and the objective restricted to the kept columns.

        Args:
            lp (StandardFormLP): the full LP, usually with a perturbed right-hand side
            red (FacialReduction): reduction of the unperturbed LP
            row (ReportRow): row to fill

        Returns:
            ReportRow: the filled row, primal_res measured as ||A x - b|| / (1 + ||b||) for the
            lifted x
        """
        started = time.perf_counter()
        reduced = red.reduced_lp(lp.objective).with_rhs(lp.b[list(red.kept_rows)])
        result = self._solve(reduced, row)
        if result is not None:
            x = lift(red, result.x_star)
            residual = float(np.linalg.norm(lp.A @ x - lp.b))
            row.primal_res = residual / (1.0 + float(np.linalg.norm(lp.b)))
        return self._timed(row, started)

    def condition(self, bar: Callable[[], None]) -> None:
        """Condition-number protocol: three families per seed."""
        for seed in self.cfg.seeds:
            r = self.cfg.planted_dimension(seed)
            families = ("no_slater", "slater", "reduced")
            try:
                inst = generate_primal_no_slater(GeneratorSpec(self.cfg.m, self.cfg.n, r, seed))
                slater = to_slater_counterpart(inst, seed)
                red = facially_reduce(inst.lp, DEFAULT_TOLERANCES, self.opts)
                lps = (inst.lp, slater.lp, red.reduced_lp(inst.lp.objective))
            except Exception as err:
                self.record_error(f"Seed {seed} instance construction", err)
                self.rows += [
                    self._row(seed, r, family, status="error", detail=str(err))
                    for family in families
                ]
                bar()
                continue
            for family, lp in zip(families, lps):
                row = self._row(seed, r, family, rank_av=red.rank_av)
                self.rows.append(self.solve_row(lp, row))
            bar()

    def perturbation(self, bar: Callable[[], None]) -> None:
        """Perturbation protocol: both directions over the epsilon grid, then trend rows."""
        r = self.cfg.r_range[0]
        for seed in self.cfg.seeds:
            try:
                inst = generate_primal_no_slater(GeneratorSpec(self.cfg.m, self.cfg.n, r, seed))
                red = facially_reduce(inst.lp, DEFAULT_TOLERANCES, self.opts)
            except Exception as err:
                self.record_error(f"Seed {seed} instance construction", err)
                row = self._row(seed, r, "perturbation", status="error", detail=str(err))
                self.rows.append(row)
                bar()
                continue
            rows = self.perturb(inst.lp, red, seed)
            self.rows += rows + perturbation_trend(rows)
            bar()

    def perturb(self, lp: StandardFormLP, red: FacialReduction, seed: int) -> List[ReportRow]:
        """Solve the perturbed systems of one instance.

        Along the certificate every perturbed system is infeasible and primal_res holds its
        distance to feasibility, min ||Ax - rhs|| over x >= 0. Along the range direction the
        reduced system is solved and primal_res is the residual of the lifted point.

        Args:
            lp (StandardFormLP): an LP without a Slater point
            red (FacialReduction): its reduction, carrying the exposing certificate
            seed (int): seed of the random range direction

        Returns:
            List[ReportRow]: one row per direction and epsilon
        """
        if red.certificate is None:
            raise ValueError("Perturbation protocol needs an LP without a Slater point.")
        y = red.certificate.y
        AV = lp.A[:, list(red.kept_columns)]
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(DIRECTION_STREAM,)))
        directions = {"certificate": y, "range": AV @ rng.standard_normal(AV.shape[1])}
        r = len(red.kept_columns)

        rows: List[ReportRow] = []
        for direction, delta in directions.items():
            for eps in self.cfg.epsilons:
                rhs = lp.b - eps * delta
                row = self._row(seed, r, "perturbed", direction=direction, epsilon=eps)
                row.perturbation = eps * float(np.linalg.norm(delta))
                if direction == "certificate":
                    row.farkas = farkas_infeasible(lp.A, rhs, y)
                    self.solve_row(lp.with_rhs(rhs), row)
                    row.primal_res = feasibility_distance(lp.A, rhs)
                else:
                    self.solve_reduced_row(lp.with_rhs(rhs), red, row)
                rows.append(row)
        return rows

    def degiter(self, bar: Callable[[], None]) -> None:
        """Degenerate-iteration protocol: raw rows per ratio and seed, then averages per ratio."""
        averages: List[ReportRow] = []
        for ratio in self.cfg.ratios:
            r = int(round(ratio * self.cfg.n / 100))
            raw: List[ReportRow] = []
            for seed in self.cfg.seeds:
                row = self._row(seed, r, "dual_no_slater", direction="dual")
                started = time.perf_counter()
                try:
                    spec = GeneratorSpec(self.cfg.m, self.cfg.n, r, seed, "dual_no_slater")
                    result = solve_simplex(generate_dual_no_slater(spec).lp, self.cfg.rule, "dual")
                    row.degiter_percent = result.degiter_percent
                    row.iterations, row.objective = result.total_pivots, result.objective
                    row.status = result.status
                except Exception as err:
                    self.record_error(f"Seed {seed} ratio {ratio}", err)
                    row.status, row.detail = "error", str(err)
                raw.append(self._timed(row, started))
                bar()
            solved = [row.degiter_percent for row in raw if row.degiter_percent is not None]
            average = self._row(-1, r, "average", direction="dual", detail=f"{len(solved)} runs")
            average.degiter_percent = float(np.mean(solved)) if solved else None
            self.rows += raw
            averages.append(average)
        self.rows += averages

    def theorems(self, bar: Callable[[], None]) -> None:
        """Theorem suite: a planted instance and its Slater counterpart per seed."""
        for seed in self.cfg.seeds:
            r = self.cfg.planted_dimension(seed)
            try:
                inst = generate_primal_no_slater(GeneratorSpec(self.cfg.m, self.cfg.n, r, seed))
                cases: List[Tuple[str, PlantedInstance]] = [
                    ("no_slater", inst),
                    ("slater", to_slater_counterpart(inst, seed)),
                ]
            except Exception as err:
                self.record_error(f"Seed {seed} instance construction", err)
                row = self._row(seed, r, "error", status="error", detail=str(err), passed=False)
                self.rows.append(row)
                bar()
                continue
            for label, case in cases:
                planted = case.planted_support
                row = self._row(seed, r, label)
                try:
                    check_theorems(case.lp, row, planted, self.opts)
                except Exception as err:
                    self.record_error(f"Seed {seed} {label} theorem check", err)
                    row.status, row.detail, row.passed = "error", str(err), False
                self.rows.append(row)
            bar()

    def log_summary(self) -> None:
        """Write a short summary of the collected rows to the log."""
        statuses = pd.Series([row.status for row in self.rows], dtype="object").value_counts()
        self.log.info(f"Protocol {self.cfg.protocol} produced {len(self.rows)} rows.")
        for status, count in statuses.items():
            self.log.info(f"Status {status}: {count} row(s).")
        failed = [row for row in self.rows if row.passed is False]
        if failed:
            seeds = [row.seed for row in failed]
            self.log.warning(f"{len(failed)} theorem check(s) failed: seeds {seeds}.")


def check_theorems(
    lp: StandardFormLP,
    row: ReportRow,
    planted_support: Optional[Tuple[int, ...]] = None,
    opts: Optional[IpmOptions] = None,
) -> ReportRow:
    """Check the degeneracy facts of one small LP against exhaustive enumeration.

    With an exposing certificate every BFS must be degenerate, every extreme point must have at most
    m - 1 positives and every degree must reach m - rank(AV). With a nondegenerate BFS there must be
    no certificate and the lifted witness must be strictly feasible. Without either, the row is a
    converse-gap row and nothing is asserted.

    Args:
        lp (StandardFormLP): the LP
        row (ReportRow): row to fill with the metrics and the verdict
        planted_support (Tuple[int, ...], optional): planted exposed columns to compare against
        opts (IpmOptions, optional): interior-point options for the reduction

    Returns:
        ReportRow: the filled row
    """
    tol = DEFAULT_TOLERANCES
    lp = validate(lp, tol)
    red = facially_reduce(lp, tol, opts)
    enumeration = enumerate_bfs(lp, tol)
    certificate = red.certificate
    row.all_degenerate = enumeration.all_degenerate
    row.max_positive = enumeration.max_positive_entries(tol.zero)
    row.min_degree = enumeration.min_degree()
    row.rank_av = red.rank_av

    checks = {}
    if certificate is not None:
        row.family = f"{row.family}:certificate"
        checks["all_degenerate"] = enumeration.all_degenerate
        checks["max_positive"] = row.max_positive <= lp.m - 1
        checks["min_degree"] = row.min_degree >= minimum_degeneracy_degree(red)
    if not enumeration.all_degenerate:
        row.family = f"{row.family}:nondegenerate"
        checks["no_certificate"] = certificate is None
        witness = red.witness
        checks["witness"] = witness is not None and is_strictly_feasible_point(
            lp, lift(red, witness), tol
        )
    if certificate is None and enumeration.all_degenerate:
        row.family = f"{row.family}:converse-gap"
    if planted_support is not None:
        found = tuple(certificate.support) if certificate is not None else None
        row.recovered = found == tuple(planted_support)
        checks["recovered"] = row.recovered

    failed = [name for name, ok in checks.items() if not ok]
    row.passed = not failed
    row.detail = ",".join(failed)
    return row


def perturbation_trend(rows: List[ReportRow]) -> List[ReportRow]:
    """Spearman correlation between perturbation size and primal residual, one row per direction.

    Args:
        rows (List[ReportRow]): perturbed rows of one instance

    Returns:
        List[ReportRow]: trend rows
    """
    trends = []
    for direction in ("certificate", "range"):
        selected = [
            row for row in rows if row.direction == direction and row.primal_res is not None
        ]
        if not selected:
            continue
        first = selected[0]
        trend = ReportRow(first.protocol, first.seed, first.m, first.n, first.r, "trend", direction)
        if len(selected) > 1:
            sizes = [row.perturbation for row in selected]
            rho = float(spearmanr(sizes, [row.primal_res for row in selected])[0])
            trend.spearman = rho if np.isfinite(rho) else None
        trend.detail = f"{len(selected)} points"
        trends.append(trend)
    return trends


def _run(
    cfg: ExperimentConfig, log: Optional[Logger], opts: Optional[IpmOptions]
) -> List[ReportRow]:
    return ExperimentPipeline(log or getLogger(__name__), cfg, opts).run()


def run_condition_experiment(
    cfg: ExperimentConfig, log: Optional[Logger] = None, opts: Optional[IpmOptions] = None
) -> List[ReportRow]:
    """Condition numbers and KKT residuals for the three instance families of every seed.

    Args:
        cfg (ExperimentConfig): configuration with protocol 'condition'
        log (Logger, optional): logger for non-breaking errors
        opts (IpmOptions, optional): interior-point options

    Returns:
        List[ReportRow]: three rows per seed
    """
    return _run(_require_protocol(cfg, "condition"), log, opts)


def run_perturbation_experiment(
    lp: StandardFormLP,
    red: FacialReduction,
    cfg: ExperimentConfig,
    log: Optional[Logger] = None,
    opts: Optional[IpmOptions] = None,
    seed: int = 0,
) -> List[ReportRow]:
    """KKT residuals of one LP without a Slater point under both right-hand-side perturbations.

    Args:
        lp (StandardFormLP): the LP
        red (FacialReduction): its reduction
        cfg (ExperimentConfig): configuration holding the epsilon grid
        log (Logger, optional): logger for non-breaking errors
        opts (IpmOptions, optional): interior-point options
        seed (int): seed of the random range direction

    Returns:
        List[ReportRow]: two rows per epsilon, certificate direction first
    """
    pipeline = ExperimentPipeline(log or getLogger(__name__), cfg, opts)
    return pipeline.perturb(lp, red, seed)


def run_degeneracy_experiment(
    cfg: ExperimentConfig, log: Optional[Logger] = None, opts: Optional[IpmOptions] = None
) -> List[ReportRow]:
    """Degenerate-pivot percentages of the dual simplex over the ratio grid.

    Args:
        cfg (ExperimentConfig): configuration with protocol 'degiter'
        log (Logger, optional): logger for non-breaking errors
        opts (IpmOptions, optional): interior-point options

    Returns:
        List[ReportRow]: raw rows per ratio and seed followed by one average row per ratio
    """
    return _run(_require_protocol(cfg, "degiter"), log, opts)


def verify_theorem_suite(
    cfg: ExperimentConfig, log: Optional[Logger] = None, opts: Optional[IpmOptions] = None
) -> List[ReportRow]:
    """Check the degeneracy facts on every seeded small instance and its Slater counterpart.

    Args:
        cfg (ExperimentConfig): configuration with protocol 'theorems'
        log (Logger, optional): logger for non-breaking errors
        opts (IpmOptions, optional): interior-point options

    Returns:
        List[ReportRow]: two rows per seed with a pass flag each
    """
    return _run(_require_protocol(cfg, "theorems"), log, opts)


def _require_protocol(cfg: ExperimentConfig, protocol: str) -> ExperimentConfig:
    if cfg.protocol != protocol:
        raise ValueError(f"Configuration is for protocol {cfg.protocol!r}, not {protocol!r}.")
    return cfg


def report_frame(rows: List[ReportRow], record_time: bool = False) -> pd.DataFrame:
    """Tabulate report rows; wall time is only kept when it was recorded.

    Args:
        rows (List[ReportRow]): the rows
        record_time (bool): keep the wall_time column

    Returns:
        pd.DataFrame: one column per ReportRow field, in field order
    """
    frame = pd.DataFrame([asdict(row) for row in rows], columns=REPORT_COLUMNS)
    frame = frame.astype({column: "Int64" for column in INTEGER_COLUMNS})
    if not record_time:
        frame = frame.drop(columns="wall_time")
    return frame


def report_csv(frame: pd.DataFrame) -> str:
    """CSV text of a report frame with a header row and newline line ends."""
    return str(frame.to_csv(index=False, lineterminator="\n"))


def save_report(frame: pd.DataFrame, path: Union[str, Path]) -> None:
    """Save a report frame as CSV.

    Args:
        frame (pd.DataFrame): the report
        path (Union[str, Path]): output path
    """
    with atomic_write(path, mode="w", overwrite=True, encoding="utf-8", newline="") as outfile:
        outfile.write(report_csv(frame))
