"""Command-line interface."""
import importlib.util
import logging
import sys
from contextlib import contextmanager
from dataclasses import replace
from datetime import date
from pathlib import Path
from typing import Any
from typing import Iterable
from typing import Iterator
from typing import List
from typing import Optional

import click

from facet_lp import DEFAULT_TOLERANCES
from facet_lp.errors import FacetError
from facet_lp.errors import TheoremSuiteFailure
from facet_lp.experiments import ExperimentConfig
from facet_lp.experiments import ExperimentPipeline
from facet_lp.experiments import report_csv
from facet_lp.experiments import report_frame
from facet_lp.experiments import save_report
from facet_lp.formats import load_instance
from facet_lp.formats.native import from_lp
from facet_lp.generators import KINDS
from facet_lp.generators import GeneratorSpec
from facet_lp.generators import generate
from facet_lp.generators import to_slater_counterpart
from facet_lp.lp.bases import enumerate_bfs
from facet_lp.lp.bases import validate
from facet_lp.lp.data_structures import StandardFormLP
from facet_lp.reduction.facial import dual_facially_reduce
from facet_lp.reduction.facial import facially_reduce
from facet_lp.reduction.facial import minimum_degeneracy_degree
from facet_lp.solvers.ipm import solve_ipm
from facet_lp.solvers.simplex import RULES
from facet_lp.solvers.simplex import VARIANTS
from facet_lp.solvers.simplex import solve_simplex


def setup_logger(logfile: str) -> logging.Logger:
    """Initialize a logger that outputs to stderr and given logfile name.

    Args:
        logfile (str): name of the logfile

    Returns:
        logging.Logger: the initialized logger
    """
    log = logging.getLogger(__name__)
    log.setLevel(logging.DEBUG)
    for handler in list(log.handlers):
        log.removeHandler(handler)
        handler.close()
    formatter = logging.Formatter("%(asctime)s - %(levelname)s - %(message)s")

    log_path = f"logs/{logfile}"
    Path(log_path).parent.mkdir(parents=True, exist_ok=True)

    file_handler = logging.FileHandler(log_path, encoding="utf-8")
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(formatter)
    log.addHandler(file_handler)

    stream_handler = logging.StreamHandler(sys.stderr)
    stream_handler.setLevel(logging.INFO)
    stream_handler.setFormatter(formatter)
    log.addHandler(stream_handler)

    log.info(f"Output is logged to {log_path}.")
    return log


def final_report(log: logging.Logger, errors: List[str], finished: bool = True) -> None:
    """List all encountered errors at the end of log for easy browsing.

    Args:
        log (logging.Logger): logger object
        errors (List[str]): descriptions of all encountered errors
        finished (bool): whether the command ran to completion
    """
    log.warning(f"Encountered {len(errors)} non-breaking error(s).")
    for error_text in errors:
        log.error(error_text)
    if finished:
        log.info("Finished successfully!")


@contextmanager
def reporting(log: logging.Logger, errors: List[str]) -> Iterator[None]:
    """Close a command with the final report, also when it stops on an error."""
    try:
        yield
    except Exception as err:
        log.error(f"Stopped on {type(err).__name__}: {err}")
        final_report(log, errors, finished=False)
        raise
    final_report(log, errors)


def format_indices(indices: Iterable[int]) -> str:
    """Format zero-based indices as a one-based set, e.g. '{1,3,4}'."""
    return "{" + ",".join(str(int(i) + 1) for i in indices) + "}"


def format_vector(values: Iterable[float]) -> str:
    """Format a vector with ten significant digits, e.g. '(0.4, 0.1)'."""
    return "(" + ", ".join(f"{float(v):.10g}" for v in values) + ")"


def load_lp(path: str) -> StandardFormLP:
    """Read and validate an instance file."""
    return validate(load_instance(path))


def load_recipe(recipe_file: str) -> Any:
    """Load a recipe file as a module.

    Args:
        recipe_file (str): path to a python recipe file

    Returns:
        Any: the recipe module

    Raises:
        ClickException: the file is not importable as a python module
    """
    if spec := importlib.util.spec_from_file_location("recipe", recipe_file):
        recipe = importlib.util.module_from_spec(spec)
        spec.loader.exec_module(recipe)  # type: ignore
        return recipe
    raise click.ClickException(f"Failed to import recipe {recipe_file!r}, is it a python file?")


@click.group()
@click.version_option()
def main() -> None:
    """Facial reduction and degeneracy tools for standard-form linear programs."""
    pass


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "-o",
    "--output",
    type=click.Path(dir_okay=False),
    help="Write the reduced instance (with the reduced objective) to this native JSON file.",
)
def reduce(instance: str, output: Optional[str]) -> None:
    """Facially reduce INSTANCE and print the reduction summary."""
    log = setup_logger(f"{date.today()}-reduce.log")
    with reporting(log, []):
        lp = load_lp(instance)
        log.info(f"Loaded {instance} with m={lp.m}, n={lp.n}.")
        red = facially_reduce(lp)
        support = red.certificate.support if red.certificate is not None else ()
        click.echo(f"Exposing support: {format_indices(support)}")
        click.echo(f"Kept columns: {format_indices(red.kept_columns)}")
        click.echo(f"Kept rows: {format_indices(red.kept_rows)}")
        click.echo(f"Reduced size: {len(red.kept_rows)}x{len(red.kept_columns)}")
        click.echo(f"Rank of AV: {red.rank_av}")
        click.echo(f"Minimum degree of degeneracy: {minimum_degeneracy_degree(red)}")
        click.echo(f"Reduction passes: {red.iterations}")
        click.echo(f"Slater point verified: {'yes' if red.slater_verified else 'no'}")
        if red.witness is not None:
            click.echo(f"Witness: {format_vector(red.witness)}")
        if output:
            from_lp(red.reduced_lp(lp.objective)).save_to_json(output)
            log.info(f"Reduced instance written to {output}.")


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--dual", is_flag=True, help="Also check strict feasibility of the dual.")
def analyze(instance: str, dual: bool) -> None:
    """Print the strict feasibility verdict of INSTANCE with its certificate or witness."""
    log = setup_logger(f"{date.today()}-analyze.log")
    with reporting(log, []):
        lp = load_lp(instance)
        red = facially_reduce(lp)
        if red.certificate is None:
            click.echo("Primal: strictly feasible")
            if red.witness is not None:
                click.echo(f"Witness: {format_vector(red.witness)}")
        else:
            click.echo("Primal: not strictly feasible")
            click.echo(f"Exposing vector: {format_vector(red.certificate.z)}")
            click.echo(f"Multiplier: {format_vector(red.certificate.y)}")
            click.echo(f"Exposed variables: {format_indices(red.certificate.support)}")
        if dual:
            dual_red = dual_facially_reduce(lp)
            if dual_red.certificate is None:
                click.echo("Dual: strictly feasible")
            else:
                click.echo("Dual: not strictly feasible")
                click.echo(f"Dual exposing vector: {format_vector(dual_red.certificate.w)}")
                click.echo(f"Zero slacks: {format_indices(dual_red.certificate.support)}")
            click.echo(f"Rank of [A^T U]: {dual_red.stacked_rank} of {lp.n}")


@main.command(name="enumerate")
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--cap", default=10**6, show_default=True, help="Largest number of column subsets to visit."
)
def enumerate_command(instance: str, cap: int) -> None:
    """Print every basic feasible solution of INSTANCE with its degree of degeneracy."""
    log = setup_logger(f"{date.today()}-enumerate.log")
    with reporting(log, []):
        lp = load_lp(instance)
        enumeration = enumerate_bfs(lp, DEFAULT_TOLERANCES, cap)
        table = enumeration.to_frame([lp.variable_name(j) for j in range(lp.n)])
        click.echo(table.to_string(index=False, float_format=lambda v: f"{v:.10g}"))
        click.echo(f"Feasible bases: {len(enumeration.entries)}")
        click.echo(f"Distinct points: {len(enumeration.distinct_points)}")
        click.echo(f"All degenerate: {'yes' if enumeration.all_degenerate else 'no'}")


@main.command(name="generate")
@click.option("-k", "--kind", type=click.Choice(KINDS), default=KINDS[0], show_default=True)
@click.option("-m", "--rows", "m", type=int, required=True, help="Number of constraints.")
@click.option("-n", "--cols", "n", type=int, required=True, help="Number of variables.")
@click.option("-r", "--dim", "r", type=int, required=True, help="Planted dimension r.")
@click.option("-s", "--seed", type=int, default=0, show_default=True, envvar="FACET_SEED")
@click.option("-o", "--output", type=click.Path(dir_okay=False), required=True)
@click.option(
    "--slater",
    is_flag=True,
    help="Also write the strictly feasible counterpart next to OUTPUT with a '-slater' suffix.",
)
def generate_command(
    kind: str, m: int, n: int, r: int, seed: int, output: str, slater: bool
) -> None:
    """Generate a seeded instance with planted certificates and write it as native JSON."""
    log = setup_logger(f"{date.today()}-generate.log")
    with reporting(log, []):
        try:
            spec = GeneratorSpec(m, n, r, seed, kind)
        except ValueError as err:
            raise click.BadParameter(str(err)) from err
        inst = generate(spec)
        from_lp(inst.lp, inst.sidecar()).save_to_json(output)
        log.info(f"Wrote {kind} instance m={m}, n={n}, r={r}, seed={seed} to {output}.")
        if slater:
            path = Path(output)
            counterpart_path = path.with_name(f"{path.stem}-slater{path.suffix}")
            counterpart = to_slater_counterpart(inst, seed)
            from_lp(counterpart.lp, counterpart.sidecar()).save_to_json(counterpart_path)
            log.info(f"Wrote the strictly feasible counterpart to {counterpart_path}.")


@main.command()
@click.argument("instance", type=click.Path(exists=True, dir_okay=False))
@click.option("--method", type=click.Choice(["ipm", "simplex"]), default="ipm", show_default=True)
@click.option("--rule", type=click.Choice(RULES), default="bland", show_default=True)
@click.option("--variant", type=click.Choice(VARIANTS), default="primal", show_default=True)
def solve(instance: str, method: str, rule: str, variant: str) -> None:
    """Solve INSTANCE with the interior-point method or the revised simplex method."""
    log = setup_logger(f"{date.today()}-solve.log")
    with reporting(log, []):
        lp = load_lp(instance)
        if method == "ipm":
            result = solve_ipm(lp)
            click.echo(f"Status: {result.status}")
            click.echo(f"Objective: {result.objective:.10g}")
            click.echo(f"Iterations: {result.iterations}")
            click.echo(f"KKT residuals: {format_vector(result.kkt)}")
            click.echo(f"Normal matrix condition: {result.normal_condition:.6g}")
            click.echo(f"x: {format_vector(result.x_star)}")
            return
        outcome = solve_simplex(lp, rule, variant)
        click.echo(f"Status: {outcome.status}")
        click.echo(f"Objective: {outcome.objective:.10g}")
        click.echo(f"Pivots: {outcome.total_pivots} ({outcome.degenerate_pivots} degenerate)")
        click.echo(f"DEGITER: {outcome.degiter_percent:.2f}%")
        if outcome.optimal_basis is not None:
            click.echo(f"Basis: {outcome.optimal_basis.one_based()}")
        if outcome.x is not None:
            click.echo(f"x: {format_vector(outcome.x)}")


@main.command()
@click.argument("recipe-file", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "-o",
    "--output",
    type=str,
    help="CSV report path, '-' for standard output. Defaults to the recipe's OUTPUT or '-'.",
)
@click.option("-s", "--seed", type=int, envvar="FACET_SEED", help="Replace the first recipe seed.")
def experiment(recipe_file: str, output: Optional[str], seed: Optional[int]) -> None:
    """Run the experiment protocol described by RECIPE_FILE and write its CSV report."""
    log = setup_logger(f"{date.today()}-experiment.log")
    recipe = load_recipe(recipe_file)
    try:
        cfg = ExperimentConfig.from_recipe(recipe, seed)
    except ValueError as err:
        raise click.ClickException(f"Invalid recipe {recipe_file!r}: {err}") from err
    cfg = replace(cfg, output=output or cfg.output or "-")
    pipeline = ExperimentPipeline(log, cfg)
    with reporting(log, pipeline.errors):
        log.info(f"Running protocol {cfg.protocol} over {len(cfg.seeds)} seed(s).")
        rows = pipeline.run()
        pipeline.log_summary()
        frame = report_frame(rows, cfg.record_time)
        if cfg.output == "-":
            click.echo(report_csv(frame), nl=False)
        else:
            save_report(frame, cfg.output)
            log.info(f"Report written to {cfg.output}.")
        failed = [row.seed for row in rows if row.passed is False]
        if failed:
            raise TheoremSuiteFailure(f"Theorem checks failed for seeds {sorted(set(failed))}.")


def cli_dispatch(argv: Optional[List[str]] = None) -> int:
    """Run the command line and map the outcome to an exit code.

    Exit codes are 0 for success, 1 for usage errors, 3 for failed theorem checks and 2 for
    computation errors and any other exception.

    Args:
        argv (List[str], optional): command-line arguments without the program name

    Returns:
        int: the exit code
    """
    try:
        main.main(args=argv, prog_name="facet-lp", standalone_mode=False)
    except TheoremSuiteFailure as err:
        click.echo(f"Error: {err}", err=True)
        return 3
    except FacetError as err:
        click.echo(f"Error: {type(err).__name__}: {err}", err=True)
        return 2
    except click.ClickException as err:
        err.show()
        return 1
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except Exception as err:
        click.echo(f"Error: {type(err).__name__}: {err}", err=True)
        return 2
    return 0


def run() -> None:
    """Console script entry point."""
    sys.exit(cli_dispatch(sys.argv[1:]))  # pragma: no cover


if __name__ == "__main__":
    run()  # pragma: no cover
