# -*- coding: utf-8 -*-
"""
Separation pipeline and its machine-readable outputs.

`run_separation` propagates a scenario, separates the evolution into
holonomy and dynamic parts and collects the residuals of the separation
identities in a `SeparationReport`.  Reports are JSON documents wrapped in
an envelope ``{"created": <ISO time>, "report": {...}}``; only the body is
deterministic.
"""
import json
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from astropy import log
from astropy.table import Table
from astropy.time import Time

from .helpers import ValidationError, _check_finite
from .holonomic import HolonomicVerdict, purely_holonomic_check
from .holonomy import (
    GAUGE_SCHEDULES,
    build_gauge_frame,
    dynamic_operator,
    evolution_operator,
    holonomy_operator,
    inseparable_form_diagnostic,
    matrix_forms,
    parallel_transport_residual,
    projector_derivative,
    route_equivalence_residual,
    separation_residual,
    theorem2_check,
    OperatorTrajectory,
)
from .linalg import dagger, frobenius
from .propagation import check_cyclic, propagate_frame
from .scenario import matrix_to_dict, scenario_digest

__all__ = [
    "SeparationReport",
    "ConvergenceResult",
    "run_separation",
    "simulate",
    "trajectory_summary",
    "trace_table",
    "report_to_dict",
    "report_from_dict",
    "report_to_json",
    "report_from_json",
    "convergence_study",
]

SKIPPED_NONCYCLIC = "skipped: noncyclic"

# successive differences below this are rounding noise
_ORDER_FLOOR = 1e-11


def _matrix_from_dict(doc):
    if doc is None:
        return None
    return np.array(doc["re"], dtype=float) + 1j * np.array(doc["im"], dtype=float)


@dataclass(frozen=True, eq=False)
class SeparationReport:
    """
    Residuals of the holonomy/dynamic separation of one scenario.

    Attributes
    ----------
    scenario_digest : str
        SHA-256 of the canonical scenario document

    name : str or None

    grid : dict
        duration, steps and step

    method, schedule : str
        holonomy method and gauge schedule

    cyclicity_defect : float

    cyclic : bool

    separation_residual : float
        max_k ||U(t_k) - Gamma(t_k) D(t_k)||_F

    parallel_transport_residual : float

    verdict : HolonomicVerdict
        purely holonomic check of D(T)

    tolerances : dict

    theorem2_residual, route_residual, gauge_invariance_delta,
    purity_residual, inseparable_residual, split_residual : float or None
        cycle checks; None for a non-cyclic evolution

    evolution_T, holonomy_T : complex arrays (l, l) or None
        U(T) and Gamma(T) in the basis psi(0); None for a non-cyclic
        evolution

    dynamic_T : complex array (l, l)
        D(T)

    flags : tuple of str

    gate : dict or None
        gate comparison of designed scenarios
    """

    scenario_digest: str
    name: Optional[str]
    grid: dict
    method: str
    schedule: str
    cyclicity_defect: float
    cyclic: bool
    separation_residual: float
    parallel_transport_residual: float
    verdict: HolonomicVerdict
    tolerances: dict
    dynamic_T: np.ndarray
    theorem2_residual: Optional[float] = None
    route_residual: Optional[float] = None
    gauge_invariance_delta: Optional[float] = None
    purity_residual: Optional[float] = None
    inseparable_residual: Optional[float] = None
    split_residual: Optional[float] = None
    evolution_T: Optional[np.ndarray] = None
    holonomy_T: Optional[np.ndarray] = None
    frame_adjustment: float = 0.0
    flags: tuple = ()
    gate: Optional[dict] = None

    def failures(self):
        """
        Names of the checks above their tolerance.
        """
        residual_tol = self.tolerances["residual"]
        checks = [
            ("separation_residual", self.separation_residual, residual_tol),
            (
                "parallel_transport_residual",
                self.parallel_transport_residual,
                self.tolerances["parallel_transport"],
            ),
            ("theorem2_residual", self.theorem2_residual, residual_tol),
            ("route_residual", self.route_residual, residual_tol),
            ("gauge_invariance_delta", self.gauge_invariance_delta, residual_tol),
        ]
        return [name for name, value, tol in checks if value is not None and value > tol]

    @property
    def passed(self):
        return not self.failures()


def simulate(scenario):
    """
    Frame trajectory of a scenario.
    """
    return propagate_frame(scenario.hamiltonian, scenario.frame0, scenario.grid)


def trajectory_summary(scenario, traj):
    """
    Summary of a trajectory for the ``simulate`` command.
    """
    unitarity = frobenius(
        dagger(traj.frames) @ traj.frames - np.identity(traj.rank)
    )
    return {
        "scenario_digest": scenario_digest(scenario),
        "name": scenario.name,
        "dim": traj.dim,
        "rank": traj.rank,
        "grid": traj.grid.summary(),
        "cyclicity_defect": traj.cyclicity_defect,
        "cyclic": check_cyclic(traj, scenario.tolerances.cyclic),
        "max_orthonormality_defect": float(np.max(unitarity)),
        "frame_adjustment": scenario.adjustment,
        "final_frame": matrix_to_dict(traj.final_frame),
    }


def trace_table(traj):
    """
    Per-node trace for plotting.

    Columns: ``t``, ``pdot_norm`` (||dP/dt||_F), ``F_ij_real`` and
    ``F_ij_imag`` (1-based indices) and ``overlap`` = tr(P(0) P(t)) / l.

    Returns
    -------
    table : astropy.table.Table
        one row per grid node
    """
    derivative = projector_derivative(traj)
    F = dynamic_operator(traj).F
    table = Table()
    table["t"] = traj.grid.nodes
    table["pdot_norm"] = frobenius(derivative)
    for i in range(traj.rank):
        for j in range(traj.rank):
            table["F_%d%d_real" % (i + 1, j + 1)] = F[:, i, j].real
            table["F_%d%d_imag" % (i + 1, j + 1)] = F[:, i, j].imag
    overlap = np.einsum("ij,kji->k", traj.projectors[0], traj.projectors).real
    table["overlap"] = overlap / traj.rank
    return table


class _Separation(NamedTuple):
    report: SeparationReport
    evolution_T: np.ndarray
    holonomy_T: np.ndarray
    dynamic_T: np.ndarray


def _separate(scenario, method, schedule):
    if schedule not in GAUGE_SCHEDULES:
        raise ValidationError(
            "unknown gauge schedule %r, expected one of %s"
            % (schedule, ", ".join(GAUGE_SCHEDULES))
        )
    tolerances = scenario.tolerances
    traj = simulate(scenario)
    dynamic = dynamic_operator(traj)
    ops = OperatorTrajectory(
        grid=traj.grid,
        evolution=evolution_operator(traj),
        holonomy=holonomy_operator(traj, method),
        dynamic=dynamic.operator,
        initial_projector=traj.projectors[0],
        method=method,
    )
    frame0 = scenario.frame0.columns
    evolution_T = dagger(frame0) @ traj.final_frame
    holonomy_T = dagger(frame0) @ ops.holonomy[-1] @ frame0
    dynamic_T = dynamic.matrices[-1]
    for matrix, what in ((evolution_T, "U(T)"), (holonomy_T, "Gamma(T)"), (dynamic_T, "D(T)")):
        _check_finite(matrix, what)

    flags = []
    if scenario.adjustment > 0.0:
        flags.append("frame-adjusted")
    if "trivial-gate" in (scenario.design or {}).get("flags", []):
        flags.append("trivial-gate")
    verdict = purely_holonomic_check(dynamic_T, tolerances.holonomic)
    fields = dict(
        scenario_digest=scenario_digest(scenario),
        name=scenario.name,
        grid=traj.grid.summary(),
        method=method,
        schedule=schedule,
        cyclicity_defect=traj.cyclicity_defect,
        cyclic=check_cyclic(traj, tolerances.cyclic),
        separation_residual=separation_residual(ops),
        parallel_transport_residual=parallel_transport_residual(ops.holonomy, traj.grid),
        verdict=verdict,
        tolerances=tolerances.to_dict(),
        dynamic_T=dynamic_T,
        frame_adjustment=scenario.adjustment,
    )

    if fields["cyclic"]:
        gauge = build_gauge_frame(traj, schedule, tolerances.cyclic)
        if gauge.branch_shifted:
            flags.append("branch-cut-shift")
        forms = matrix_forms(traj, gauge=gauge, dynamic=dynamic)
        other = "smoothstep" if schedule == "linear" else "linear"
        other_forms = matrix_forms(
            traj, gauge=build_gauge_frame(traj, other, tolerances.cyclic), dynamic=dynamic
        )
        inseparable = inseparable_form_diagnostic(gauge, forms)
        purity = None
        if verdict.alpha_defined:
            purity = float(
                frobenius(evolution_T - np.exp(-1j * verdict.alpha) * forms.gamma_T)
            )
        fields.update(
            theorem2_residual=theorem2_check(forms, tolerances.cyclic),
            route_residual=route_equivalence_residual(forms, ops.holonomy, frame0),
            gauge_invariance_delta=float(frobenius(forms.gamma_T - other_forms.gamma_T)),
            purity_residual=purity,
            inseparable_residual=inseparable.residual,
            split_residual=inseparable.split_residual,
            evolution_T=evolution_T,
            holonomy_T=holonomy_T,
        )
    else:
        flags.append("noncyclic")
    report = SeparationReport(flags=tuple(flags), **fields)
    log.debug(
        "separation of %s: U - Gamma D residual %.3e, cyclic %s"
        % (scenario.name or report.scenario_digest[:12], report.separation_residual, report.cyclic)
    )
    return _Separation(report, evolution_T, holonomy_T, dynamic_T)


def run_separation(scenario, method="projector-product", schedule="linear"):
    """
    Separate the evolution of a scenario into holonomy and dynamic parts.

    The factorization U(t) = Gamma(t) D(t) is checked at every node of every
    scenario.  The cycle checks (U(T) = Gamma(T) D(T) through the gauge
    frame, agreement of the two Gamma(T) routes, gauge independence) run
    only for cyclic evolutions.

    Parameters
    ----------
    scenario : Scenario

    method : {"projector-product", "midpoint-ode"}
        holonomy-operator method

    schedule : {"linear", "smoothstep"}
        gauge schedule of the connection-matrix route

    Returns
    -------
    report : SeparationReport
    """
    return _separate(scenario, method, schedule).report


def _float_or_none(value):
    return None if value is None else float(value)


def report_to_dict(report):
    """
    Document form of a report; NaN-free and JSON serializable.
    """
    def matrix(value):
        return None if value is None else matrix_to_dict(value)

    def cyclic_value(value):
        return value if report.cyclic else SKIPPED_NONCYCLIC

    return {
        "scenario_digest": report.scenario_digest,
        "name": report.name,
        "grid": dict(report.grid),
        "method": report.method,
        "schedule": report.schedule,
        "cyclicity_defect": report.cyclicity_defect,
        "cyclic": report.cyclic,
        "frame_adjustment": report.frame_adjustment,
        "separation_residual": report.separation_residual,
        "parallel_transport_residual": report.parallel_transport_residual,
        "theorem2_residual": cyclic_value(report.theorem2_residual),
        "route_residual": cyclic_value(report.route_residual),
        "gauge_invariance_delta": cyclic_value(report.gauge_invariance_delta),
        "purity_residual": cyclic_value(report.purity_residual),
        "inseparable_residual": cyclic_value(report.inseparable_residual),
        "split_residual": cyclic_value(report.split_residual),
        "verdict": report.verdict.to_dict(),
        "matrices": {
            "U_T": matrix(report.evolution_T),
            "Gamma_T": matrix(report.holonomy_T),
            "D_T": matrix(report.dynamic_T),
        },
        "tolerances": dict(report.tolerances),
        "passed": report.passed,
        "flags": list(report.flags),
        "gate": report.gate,
    }


def report_from_dict(doc):
    """
    Rebuild a report from `report_to_dict` output.
    """
    def cyclic_value(key):
        value = doc[key]
        return None if value == SKIPPED_NONCYCLIC else _float_or_none(value)

    verdict = dict(doc["verdict"])
    if verdict["alpha"] is None:
        verdict["alpha"] = float("nan")
    matrices = doc["matrices"]
    return SeparationReport(
        scenario_digest=doc["scenario_digest"],
        name=doc["name"],
        grid=dict(doc["grid"]),
        method=doc["method"],
        schedule=doc["schedule"],
        cyclicity_defect=doc["cyclicity_defect"],
        cyclic=doc["cyclic"],
        frame_adjustment=doc["frame_adjustment"],
        separation_residual=doc["separation_residual"],
        parallel_transport_residual=doc["parallel_transport_residual"],
        theorem2_residual=cyclic_value("theorem2_residual"),
        route_residual=cyclic_value("route_residual"),
        gauge_invariance_delta=cyclic_value("gauge_invariance_delta"),
        purity_residual=cyclic_value("purity_residual"),
        inseparable_residual=cyclic_value("inseparable_residual"),
        split_residual=cyclic_value("split_residual"),
        verdict=HolonomicVerdict(**verdict),
        evolution_T=_matrix_from_dict(matrices["U_T"]),
        holonomy_T=_matrix_from_dict(matrices["Gamma_T"]),
        dynamic_T=_matrix_from_dict(matrices["D_T"]),
        tolerances=dict(doc["tolerances"]),
        flags=tuple(doc["flags"]),
        gate=doc["gate"],
    )


def report_to_json(report, created=None):
    """
    JSON envelope ``{"created": ..., "report": ...}`` of a report.

    Parameters
    ----------
    report : SeparationReport or dict
        dicts are written as they are

    created : str, optional
        ISO timestamp; the current UTC time by default
    """
    if created is None:
        created = Time.now().isot
    body = report_to_dict(report) if isinstance(report, SeparationReport) else report
    return json.dumps({"created": created, "report": body}, indent=2, allow_nan=False)


def report_from_json(text):
    """
    Report body of a JSON envelope written by `report_to_json`.
    """
    envelope = json.loads(text)
    if not isinstance(envelope, dict) or "report" not in envelope:
        raise ValidationError("not a report envelope")
    return report_from_dict(envelope["report"])


@dataclass(frozen=True)
class ConvergenceResult:
    """
    Outcome of `convergence_study`.

    Attributes
    ----------
    order : float or None
        fitted convergence order; None when skipped

    passed : bool
        order in [1.7, 2.3], or the fit was skipped

    note : str
    """

    order: Optional[float]
    passed: bool
    note: str = ""
    orders: tuple = field(default_factory=tuple)


def _fit_order(steps, errors):
    steps = np.asarray(steps, dtype=float)
    errors = np.asarray(errors, dtype=float)
    slope, _ = np.polyfit(np.log2(steps), np.log2(errors), 1)
    return float(-slope)


def convergence_study(scenario, levels=3, method="projector-product", schedule="linear"):
    """
    Self-convergence of the separation under grid refinement.

    The scenario runs at N, 2N, ..., 2^(levels-1) N steps.  The error of
    level k is the largest change of U(T), Gamma(T) and D(T) from level
    k-1; the order is fitted to log2 of these errors.  With only two levels
    the node-wise separation residuals are used instead.  The fit is skipped when the
    errors are at the rounding floor.

    Parameters
    ----------
    scenario : Scenario

    levels : int
        >= 2

    Returns
    -------
    table : astropy.table.Table
        steps, residuals and successive differences per level

    result : ConvergenceResult
    """
    if int(levels) != levels or levels < 2:
        raise ValidationError("convergence study needs at least 2 levels")
    base = scenario.grid.steps
    rows = []
    previous = None
    for level in range(int(levels)):
        steps = base * 2**level
        separation = _separate(scenario.with_steps(steps), method, schedule)
        report = separation.report
        if previous is None:
            deltas = (np.nan, np.nan, np.nan)
        else:
            deltas = tuple(
                float(frobenius(current - before))
                for current, before in zip(separation[1:], previous[1:])
            )
        rows.append(
            (
                steps,
                report.separation_residual,
                np.nan if report.theorem2_residual is None else report.theorem2_residual,
                np.nan if report.route_residual is None else report.route_residual,
                report.parallel_transport_residual,
            )
            + deltas
        )
        previous = separation
        log.info("convergence level %d: N = %d" % (level, steps))
    table = Table(
        rows=rows,
        names=(
            "steps",
            "separation_residual",
            "theorem2_residual",
            "route_residual",
            "parallel_transport_residual",
            "delta_U",
            "delta_Gamma",
            "delta_D",
        ),
    )

    differences = np.nanmax(
        np.array([table["delta_U"], table["delta_Gamma"], table["delta_D"]])[:, 1:], axis=0
    )
    if len(differences) >= 2:
        steps, errors = table["steps"][1:], differences
    else:
        steps, errors = table["steps"], np.asarray(table["separation_residual"])
    if np.any(errors <= _ORDER_FLOOR):
        note = "errors at the rounding floor, order fit skipped"
        return table, ConvergenceResult(None, True, note)
    order = _fit_order(steps, errors)
    orders = tuple(float(o) for o in np.log2(np.asarray(errors[:-1]) / np.asarray(errors[1:])))
    passed = bool(1.7 <= order <= 2.3)
    note = "fitted order %.3f" % order
    return table, ConvergenceResult(order, passed, note, orders)
