# -*- coding: utf-8 -*-
"""
Command line interface.

Exit codes: 0 pass, 1 semantic failure (verdict, infeasible design or
convergence order), 2 input error, 3 numerical failure.
"""
import functools
import json
import os

import click
import numpy as np

from astropy import log

from .coefficients import Constant, Sinusoid
from .gates import design_one_parameter_gate, verify_gate_design
from .helpers import (
    InfeasibleDesignError,
    NumericalError,
    PreconditionError,
    TrackingError,
    ValidationError,
)
from .holonomy import GAUGE_SCHEDULES, HOLONOMY_METHODS
from .report import (
    convergence_study,
    report_to_dict,
    report_to_json,
    run_separation,
    simulate as run_simulation,
    trace_table,
    trajectory_summary,
)
from .scenario import load_scenario, matrix_to_dict, scenario_to_dict, serialize_scenario

__all__ = ["cli"]

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

PROFILES = ("constant", "sinusoid")


def _exit_codes(command):
    """
    Map package exceptions onto the exit-code contract.
    """

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            code = command(*args, **kwargs)
        except InfeasibleDesignError as err:
            click.echo("infeasible design: %s" % err, err=True)
            ctx.exit(EXIT_FAILURE)
        except (ValidationError, PreconditionError, OSError) as err:
            click.echo("input error: %s" % err, err=True)
            ctx.exit(EXIT_INPUT)
        except (NumericalError, TrackingError, np.linalg.LinAlgError) as err:
            click.echo("numerical failure: %s" % err, err=True)
            ctx.exit(EXIT_NUMERICAL)
        ctx.exit(code or EXIT_OK)

    return wrapper


def _write(text, output):
    if output is None:
        click.echo(text)
    else:
        with open(output, "w") as outfile:
            outfile.write(text + "\n")
        log.info("wrote %s" % output)


def _load(path, steps, tol):
    scenario = load_scenario(path)
    if steps is not None:
        scenario = scenario.with_steps(steps)
    if tol is not None:
        scenario = scenario.with_tolerances(residual=tol, holonomic=tol)
    return scenario


def _scenario_options(command):
    command = click.option(
        "--tol", type=float, default=None, help="Pass threshold of the residuals."
    )(command)
    command = click.option(
        "--steps", type=click.IntRange(min=16), default=None, help="Grid steps N."
    )(command)
    return command


def _method_options(command):
    command = click.option(
        "--gauge-schedule",
        "schedule",
        type=click.Choice(sorted(GAUGE_SCHEDULES)),
        default="linear",
        show_default=True,
    )(command)
    command = click.option(
        "--method",
        type=click.Choice(HOLONOMY_METHODS),
        default="projector-product",
        show_default=True,
    )(command)
    return command


@click.group()
@click.option("--verbose", is_flag=True, help="Log the numerical stages.")
def cli(verbose):
    """
    Separate quantum evolutions into holonomy and dynamic parts.
    """
    log.setLevel("DEBUG" if verbose else "WARNING")


@cli.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@_scenario_options
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Summary JSON file (default: standard output).")
@click.option("--trace", type=click.Path(dir_okay=False), default=None,
              help="Per-node CSV trace (default: next to --output).")
@_exit_codes
def simulate(scenario_path, steps, tol, output, trace):
    """
    Propagate a scenario and write a summary and a CSV trace.
    """
    scenario = _load(scenario_path, steps, tol)
    traj = run_simulation(scenario)
    summary = trajectory_summary(scenario, traj)
    if trace is None and output is not None:
        trace = os.path.splitext(output)[0] + ".csv"
    if trace is not None:
        trace_table(traj).write(trace, format="ascii.csv", overwrite=True)
        summary["trace"] = trace
    _write(json.dumps(summary, indent=2), output)
    return EXIT_OK


@cli.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@_scenario_options
@_method_options
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Report JSON file (default: standard output).")
@_exit_codes
def separate(scenario_path, steps, tol, method, schedule, output):
    """
    Separation report of a scenario; exit 0 iff all residuals pass.
    """
    scenario = _load(scenario_path, steps, tol)
    report = run_separation(scenario, method=method, schedule=schedule)
    _write(report_to_json(report), output)
    if not report.passed:
        click.echo("failed checks: %s" % ", ".join(report.failures()), err=True)
        return EXIT_FAILURE
    return EXIT_OK


@cli.command("check-holonomic")
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@_scenario_options
@_method_options
@_exit_codes
def check_holonomic(scenario_path, steps, tol, method, schedule):
    """
    Whether a cyclic evolution is purely holonomic.
    """
    scenario = _load(scenario_path, steps, tol)
    report = run_separation(scenario, method=method, schedule=schedule)
    if not report.cyclic:
        raise PreconditionError(
            "evolution is not cyclic, ||P(T) - P(0)||_F = %.3e" % report.cyclicity_defect
        )
    verdict = report.verdict
    alpha = "undefined" if not verdict.alpha_defined else repr(verdict.alpha)
    click.echo("purely holonomic: %s" % ("yes" if verdict.is_purely_holonomic else "no"))
    click.echo("alpha: %s" % alpha)
    click.echo("residual: %r" % verdict.residual)
    return EXIT_OK if verdict.is_purely_holonomic else EXIT_FAILURE


def _floats(text, count, what):
    try:
        values = [float(part) for part in text.split(",")]
    except ValueError:
        raise ValidationError("%s must be %d comma-separated numbers" % (what, count))
    if len(values) != count:
        raise ValidationError("%s must be %d comma-separated numbers" % (what, count))
    return values


@cli.command("design-gate")
@click.option("--energies", required=True, help="Three energies, e.g. 0,1,3.")
@click.option("--N", "winding", type=int, required=True, help="Winding number N != 0.")
@click.option("--m", "branch", type=int, required=True, help="Dynamic-phase branch m.")
@click.option("--phases", default="0,0", show_default=True,
              help="Phases of a1 and a2 [rad].")
@click.option("--profile", type=click.Choice(PROFILES), default="constant",
              show_default=True, help="Pulse shape omega(t).")
@click.option("--duration", type=float, default=1.0, show_default=True)
@click.option("--reference-level", type=click.IntRange(0, 2), default=0, show_default=True)
@click.option("--steps", type=click.IntRange(min=16), default=None)
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="Scenario file to write.")
@click.option("--verify", is_flag=True, help="Run the separation pipeline on the design.")
@_method_options
@_exit_codes
def design_gate(energies, winding, branch, phases, profile, duration, reference_level,
                steps, output, verify, method, schedule):
    """
    Design a purely holonomic gate H(t) = omega(t) diag(energies).
    """
    hamiltonian = np.diag(_floats(energies, 3, "--energies"))
    phase_a1, phase_a2 = _floats(phases, 2, "--phases")
    if profile == "sinusoid":
        shape = Sinusoid(amplitude=1.0, frequency=np.pi / duration)
    else:
        shape = Constant(value=1.0)
    design = design_one_parameter_gate(
        hamiltonian,
        winding,
        branch,
        phase_a1=phase_a1,
        phase_a2=phase_a2,
        profile=shape,
        duration=duration,
        reference_level=reference_level,
        steps=steps,
    )
    summary = {
        "design": design.to_dict(),
        "predicted_U": matrix_to_dict(design.predicted_U),
    }
    if output is not None:
        _write(serialize_scenario(design.scenario), output)
        summary["scenario_file"] = output
    else:
        summary["scenario"] = scenario_to_dict(design.scenario)
    code = EXIT_OK
    if verify:
        report = verify_gate_design(design, method=method, schedule=schedule)
        summary["report"] = report_to_dict(report)
        if not (report.verdict.is_purely_holonomic and report.gate["matches"]):
            code = EXIT_FAILURE
    click.echo(json.dumps(summary, indent=2))
    return code


@cli.command()
@click.argument("scenario_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--levels", type=click.IntRange(min=2), default=3, show_default=True,
              help="Number of grids N, 2N, ...")
@_scenario_options
@_method_options
@click.option("--output", type=click.Path(dir_okay=False), default=None,
              help="CSV file of the convergence table.")
@_exit_codes
def convergence(scenario_path, levels, steps, tol, method, schedule, output):
    """
    Convergence order of the separation under grid refinement.
    """
    scenario = _load(scenario_path, steps, tol)
    table, result = convergence_study(scenario, levels, method=method, schedule=schedule)
    click.echo("\n".join(table.pformat(max_lines=-1, max_width=-1)))
    click.echo(result.note)
    if output is not None:
        table.write(output, format="ascii.csv", overwrite=True)
    return EXIT_OK if result.passed else EXIT_FAILURE


if __name__ == "__main__":
    cli()
