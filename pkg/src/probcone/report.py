"""JSON and CSV serialization of results.

Reports are canonical: keys sorted, fixed separators, numpy scalars
converted to Python floats, so identical computations produce identical
bytes regardless of worker count.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .dist import to_summary
from .solver import BoundCheck, FixedPointCheck, IterationTrace, UniquenessResult
from .space import AxiomCheck, AxiomReport
from .contract import ContractionCertificate
from .stochastic import RandomKannanResult, SIEConditions, SIESolution


def _plain(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def axiom_check_to_dict(check: AxiomCheck) -> dict:
    out = {"name": check.name, "passed": check.passed, "worst_margin": _plain(check.worst_margin)}
    if check.witness is not None:
        out["witness"] = _plain(check.witness)
    return out


def axiom_report_to_dict(report: AxiomReport) -> dict:
    return {
        "n_points": report.n_points,
        "seed": report.seed,
        "tol": report.tol,
        "grid": _plain(report.grid.points),
        "checks": {
            "identity": axiom_check_to_dict(report.identity),
            "symmetry": axiom_check_to_dict(report.symmetry),
            "triangle": axiom_check_to_dict(report.triangle),
            "feasibility": axiom_check_to_dict(report.feasibility),
        },
        "all_passed": report.all_passed,
        "sub_distribution_pairs": _plain(report.sub_distribution_pairs),
        "identity_ambiguous_pairs": _plain(report.identity_ambiguous_pairs),
        "points": _plain(report.points),
        "notes": list(report.notes),
    }


def certificate_to_dict(cert: ContractionCertificate) -> dict:
    out = {
        "kind": cert.kind,
        "params": _plain(cert.params),
        "n_pairs": cert.n_pairs,
        "worst_margin": _plain(cert.worst_margin),
        "passed": cert.passed,
        "tol": _plain(cert.tol),
        "notes": list(cert.notes),
    }
    if cert.witness is not None:
        out["witness"] = _plain(cert.witness)
    return out


def trace_to_dict(trace: IterationTrace) -> dict:
    steps = np.linalg.norm(np.diff(trace.points, axis=0), axis=1)
    nonzero = steps[:-1] > 0.0
    ratio = float(np.mean(steps[1:][nonzero] / steps[:-1][nonzero])) if np.any(nonzero) else None
    return {
        "n_iters": trace.n_iters,
        "stopped_reason": trace.stopped_reason,
        "eps": trace.eps,
        "limit": _plain(trace.limit),
        "mean_step_ratio": ratio,
        "first_step": to_summary(trace.step_dists[0]) if trace.step_dists else None,
        "last_step": to_summary(trace.step_dists[-1]) if trace.step_dists else None,
    }


def bound_check_to_dict(check: BoundCheck) -> dict:
    return {
        "alpha": check.alpha,
        "tol": check.tol,
        "holds": check.holds,
        "n_violations": check.n_violations,
        "worst_margin": _plain(check.worst_margin),
        "n_steps_checked": int(check.step_margins.shape[0]),
        "n_chain_pairs": len(check.chain_pairs),
    }


def fixed_point_to_dict(check: FixedPointCheck) -> dict:
    return {"is_fixed": check.is_fixed, "worst": _plain(check.worst)}


def uniqueness_to_dict(result: UniquenessResult) -> dict:
    return {
        "unique": result.unique,
        "limits": _plain(result.limits),
        "stopped_reasons": list(result.stopped_reasons),
    }


def sie_conditions_to_dict(cond: SIEConditions) -> dict:
    return {
        "lipschitz": _plain(cond.lipschitz),
        "sup_kernel": _plain(cond.sup_kernel),
        "m_hat": _plain(cond.m_hat),
        "m_hat_stderr": _plain(cond.m_hat_stderr),
        "max_path_lm": _plain(cond.max_path_lm),
        "contraction_rate": _plain(cond.contraction_rate),
        "satisfied": cond.satisfied,
    }


def sie_solution_to_dict(sol: SIESolution) -> dict:
    return {
        "contraction_rate": _plain(sol.contraction_rate),
        "converged": sol.converged,
        "iterations": sol.iterations,
        "final_residual": _plain(sol.step_norms[-1]) if sol.step_norms else None,
        "step_norms": _plain(list(sol.step_norms)),
        "conditions": sie_conditions_to_dict(sol.conditions),
    }


def random_kannan_to_dict(result: RandomKannanResult) -> dict:
    return {
        "certificate": certificate_to_dict(result.certificate),
        "n_samples": result.n_samples,
        "samplewise_violations": result.samplewise_violations,
        "samplewise_fraction": _plain(result.samplewise_fraction),
        "samplewise_holds": result.samplewise_holds,
        "passed": result.passed,
    }


def canonical_json(payload: dict) -> str:
    return json.dumps(_plain(payload), sort_keys=True, indent=2) + "\n"


def write_trace_csv(trace: IterationTrace, path) -> None:
    """One row per iterate: index, coordinates, then the step distribution
    (leaving that iterate) evaluated on the grid; final row has no step."""
    dim = trace.points.shape[1]
    header = ["iter"] + [f"x{i}" for i in range(dim)] + [f"F@t{i}" for i in range(len(trace.grid))]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for n, point in enumerate(trace.points):
            row = [n] + [repr(float(c)) for c in point]
            if n < trace.step_values.shape[0]:
                row += [repr(float(v)) for v in trace.step_values[n]]
            else:
                row += [""] * len(trace.grid)
            writer.writerow(row)


def write_sie_csv(problem_time_grid: np.ndarray, sol: SIESolution, mean_path, residuals_path) -> None:
    mean = np.mean(sol.field, axis=0)
    with open(mean_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["t", "mean_x"])
        for t, x in zip(problem_time_grid, mean):
            writer.writerow([repr(float(t)), repr(float(x))])
    with open(residuals_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["iteration", "l2_step"])
        for i, v in enumerate(sol.step_norms, start=1):
            writer.writerow([i, repr(float(v))])
