"""Batch driver: every experiment as a subcommand over a JSON config.

Subcommands::

    probcone axioms   --config cfg.json [--seed N] [--workers N] [--out DIR]
    probcone classify --config cfg.json ...
    probcone solve    --config cfg.json ...
    probcone sie      --config cfg.json ...
    probcone demo     [--seed N] [--workers N] [--out DIR]

Exit codes: 0 success, 1 computation failure (divergence), 2 config error.
Reports are deterministic given (config, seed): the wall-time field is the
only part allowed to differ between repeated runs.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
import warnings
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .contract import check_banach, check_chatterjea, check_kannan, check_zamfirescu
from .dist import TimeGrid
from .errors import ConfigError, DivergenceError, InvalidParameterError, ProbconeError
from .registry import make_kernel, make_mapping, make_nonlinearity, make_forcing, make_space
from .report import (
    axiom_report_to_dict,
    bound_check_to_dict,
    canonical_json,
    certificate_to_dict,
    fixed_point_to_dict,
    sie_conditions_to_dict,
    sie_solution_to_dict,
    trace_to_dict,
    uniqueness_to_dict,
    write_sie_csv,
    write_trace_csv,
)
from .solver import check_bounds, picard, uniqueness_probe, verify_fixed_point
from .space import check_axioms, sample_points
from .stochastic import SIEProblem, sie_conditions, sie_solve

_NUMBER = {"type": "number"}
_POSITIVE_INT = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "space": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dim": _POSITIVE_INT,
                "distance": {
                    "anyOf": [
                        {"const": "dirac"},
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "properties": {
                                "kind": {"const": "cone-gaussian"},
                                "delta": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                            },
                            "required": ["kind"],
                        },
                    ]
                },
                "tnorm": {"enum": ["min", "product", "lukasiewicz"]},
                "cone": {
                    "anyOf": [
                        {"type": "null"},
                        {
                            "type": "object",
                            "additionalProperties": False,
                            "properties": {
                                "type": {"enum": ["orthant", "halfspaces"]},
                                "dim": _POSITIVE_INT,
                                "normals": {"type": "array", "items": {"type": "array", "items": _NUMBER}},
                            },
                            "required": ["type"],
                        },
                    ]
                },
                "sampling_box": {
                    "type": "array",
                    "items": {"type": "array", "items": _NUMBER, "minItems": 2, "maxItems": 2},
                },
            },
        },
        "mapping": {
            "anyOf": [
                {"type": "string"},
                {"type": "object", "required": ["name"]},
            ]
        },
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "start": {"type": "number", "exclusiveMinimum": 0},
                "stop": {"type": "number", "exclusiveMinimum": 0},
                "num": {"type": "integer", "minimum": 2},
                "points": {"type": "array", "items": _NUMBER, "minItems": 1},
            },
        },
        "axioms": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_points": {"type": "integer", "minimum": 3},
                "tol": _NUMBER,
            },
        },
        "classify": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kinds": {
                    "type": "array",
                    "items": {"enum": ["banach", "kannan", "chatterjea", "zamfirescu"]},
                    "minItems": 1,
                },
                "alpha": _NUMBER,
                "beta": _NUMBER,
                "gamma": _NUMBER,
                "n_pairs": _POSITIVE_INT,
                "tol": {"anyOf": [{"type": "null"}, _NUMBER]},
                "alpha_sweep": {"type": "array", "items": _NUMBER},
            },
        },
        "solve": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "x0": {"type": "array", "items": _NUMBER, "minItems": 1},
                "eps": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": _POSITIVE_INT,
                "bound_alpha": {"anyOf": [{"type": "null"}, _NUMBER]},
                "uniqueness_starts": {"type": "integer", "minimum": 0},
                "agree_tol": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["x0"],
        },
        "sie": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "n_time": {"type": "integer", "minimum": 2},
                "n_paths": _POSITIVE_INT,
                "kernel": {},
                "forcing": {},
                "nonlinearity": {},
                "lipschitz": {"anyOf": [{"type": "null"}, {"type": "number", "minimum": 0}]},
                "eps": {"type": "number", "exclusiveMinimum": 0},
                "max_iter": _POSITIVE_INT,
            },
        },
    },
}


def load_config(path: str) -> dict:
    try:
        with open(path) as handle:
            config = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    validate_config(config)
    return config


def validate_config(config: dict) -> None:
    try:
        jsonschema.validate(config, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        location = "/".join(str(p) for p in exc.absolute_path) or "<top level>"
        raise ConfigError(f"config field {location!r}: {exc.message}") from exc


def _grid_from_config(config: dict) -> TimeGrid:
    spec = config.get("grid")
    if spec is None:
        return TimeGrid.default()
    if "points" in spec:
        return TimeGrid(np.asarray(spec["points"], dtype=float))
    start = spec.get("start", 1e-3)
    stop = spec.get("stop", 1e2)
    num = spec.get("num", 50)
    return TimeGrid(np.geomspace(start, stop, num))


def _require_section(config: dict, name: str) -> dict:
    if name not in config:
        raise ConfigError(f"config field {name!r}: section is required for this subcommand")
    return config[name]


def run_axioms(config: dict, seed: int, workers: int) -> dict:
    space = make_space(config.get("space", {}))
    section = config.get("axioms", {})
    grid = _grid_from_config(config)
    report = check_axioms(
        space,
        n_points=section.get("n_points", 8),
        grid=grid,
        tol=section.get("tol", 0.0),
        seed=seed,
        workers=workers,
    )
    return {"axioms": axiom_report_to_dict(report)}


def run_classify(config: dict, seed: int, workers: int) -> dict:
    space = make_space(config.get("space", {}))
    mapping = make_mapping(_require_section(config, "mapping"), space.dim)
    section = config.get("classify", {})
    grid = _grid_from_config(config)
    kinds = section.get("kinds", ["banach", "kannan", "chatterjea", "zamfirescu"])
    n_pairs = section.get("n_pairs", 64)
    tol = section.get("tol")
    alpha = section.get("alpha", 0.3)
    beta = section.get("beta", 0.25)
    gamma = section.get("gamma", 0.2)

    certificates = {}
    for kind in kinds:
        if kind == "banach":
            cert = check_banach(space, mapping, alpha, pairs=n_pairs, grid=grid, tol=tol, seed=seed)
        elif kind == "kannan":
            cert = check_kannan(space, mapping, alpha, pairs=n_pairs, grid=grid, tol=tol, seed=seed)
        elif kind == "chatterjea":
            cert = check_chatterjea(space, mapping, alpha, pairs=n_pairs, grid=grid, tol=tol, seed=seed)
        else:
            cert = check_zamfirescu(
                space, mapping, alpha, beta, gamma, pairs=n_pairs, grid=grid, tol=tol, seed=seed
            )
        certificates[kind] = certificate_to_dict(cert)

    sweep = {}
    for a in section.get("alpha_sweep", []):
        cert = check_kannan(space, mapping, a, pairs=n_pairs, grid=grid, tol=tol, seed=seed)
        sweep[repr(float(a))] = certificate_to_dict(cert)

    out = {"mapping": mapping.name, "certificates": certificates}
    if mapping.note:
        out["mapping_note"] = mapping.note
    if sweep:
        out["kannan_sweep"] = sweep
    return {"classify": out}


def run_solve(config: dict, seed: int, workers: int, out_dir: Path | None = None) -> dict:
    space = make_space(config.get("space", {}))
    mapping = make_mapping(_require_section(config, "mapping"), space.dim)
    section = _require_section(config, "solve")
    grid = _grid_from_config(config)
    eps = section.get("eps", 1e-6)
    max_iter = section.get("max_iter", 10_000)

    trace = picard(space, mapping, np.asarray(section["x0"], dtype=float), eps=eps, max_iter=max_iter, grid=grid)
    result = {
        "mapping": mapping.name,
        "trace": trace_to_dict(trace),
        "fixed_point": fixed_point_to_dict(
            verify_fixed_point(space, mapping, trace.limit, grid=grid, tol=eps)
        ),
    }
    if mapping.note:
        result["mapping_note"] = mapping.note

    bound_alpha = section.get("bound_alpha")
    if bound_alpha is not None:
        result["bounds"] = bound_check_to_dict(
            check_bounds(trace, bound_alpha, grid=grid, tnorm=space.tnorm, seed=seed)
        )

    n_starts = section.get("uniqueness_starts", 0)
    if n_starts >= 2:
        rng = np.random.default_rng(seed)
        starts = sample_points(space, n_starts, rng)
        result["uniqueness"] = uniqueness_to_dict(
            uniqueness_probe(
                space,
                mapping,
                starts,
                eps=eps,
                max_iter=max_iter,
                agree_tol=section.get("agree_tol", 1e-6),
                workers=workers,
            )
        )

    if out_dir is not None:
        write_trace_csv(trace, out_dir / "trace.csv")
    return {"solve": result}


def build_sie_problem(config: dict, seed: int) -> SIEProblem:
    section = _require_section(config, "sie")
    n_time = section.get("n_time", 200)
    kernel = make_kernel(section.get("kernel", "constant"))
    forcing = make_forcing(section.get("forcing", "constant"))
    nonlinearity, lipschitz = make_nonlinearity(section.get("nonlinearity", {"name": "linear", "coefficient": 0.4}))
    if section.get("lipschitz") is not None:
        lipschitz = float(section["lipschitz"])
    return SIEProblem(
        time_grid=np.linspace(0.0, 1.0, n_time + 1),
        kernel=kernel,
        forcing=forcing,
        nonlinearity=nonlinearity,
        lipschitz=lipschitz,
        n_paths=section.get("n_paths", 1),
        seed=seed,
    )


def run_sie(config: dict, seed: int, workers: int, out_dir: Path | None = None) -> dict:
    section = _require_section(config, "sie")
    problem = build_sie_problem(config, seed)
    conditions = sie_conditions(problem)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        solution = sie_solve(problem, eps=section.get("eps", 1e-8), max_iter=section.get("max_iter", 500))
    result = {
        "conditions": sie_conditions_to_dict(conditions),
        "solution": sie_solution_to_dict(solution),
    }
    if not conditions.satisfied:
        result["warning"] = "contraction conditions not satisfied; solver ran anyway"
    if out_dir is not None:
        write_sie_csv(problem.time_grid, solution, out_dir / "sie_mean_path.csv", out_dir / "sie_residuals.csv")
    return {"sie": result}


DEMO_CONFIG = {
    "axioms": {
        "space": {"dim": 2, "distance": {"kind": "cone-gaussian", "delta": 0.5}, "tnorm": "min"},
        "axioms": {"n_points": 8, "tol": 0.0},
    },
    "classify": {
        "space": {"dim": 2, "distance": {"kind": "cone-gaussian", "delta": 0.5}, "tnorm": "min"},
        "mapping": "rotation-half",
        "classify": {
            "kinds": ["kannan"],
            "alpha": 0.25,
            "n_pairs": 64,
            "alpha_sweep": [0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45],
        },
    },
    "solve": {
        "space": {"dim": 2, "distance": "dirac", "tnorm": "min"},
        "mapping": "rotation-half",
        "solve": {
            "x0": [1.0, 0.0],
            "eps": 1e-10,
            "max_iter": 1000,
            "uniqueness_starts": 10,
            "agree_tol": 1e-6,
        },
    },
    "sie": {
        "sie": {
            "n_time": 1000,
            "n_paths": 1,
            "kernel": "constant",
            "forcing": {"name": "constant", "value": 1.0},
            "nonlinearity": {"name": "linear", "coefficient": 0.4},
            "eps": 1e-10,
            "max_iter": 200,
        }
    },
}


def run_demo(seed: int, workers: int, out_dir: Path | None = None) -> dict:
    return {
        "demo": {
            "axioms": run_axioms(DEMO_CONFIG["axioms"], seed, workers)["axioms"],
            "classify": run_classify(DEMO_CONFIG["classify"], seed, workers)["classify"],
            "solve": run_solve(DEMO_CONFIG["solve"], seed, workers, out_dir)["solve"],
            "sie": run_sie(DEMO_CONFIG["sie"], seed, workers, out_dir)["sie"],
        }
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="probcone", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"probcone {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, needs_config in [
        ("axioms", True),
        ("classify", True),
        ("solve", True),
        ("sie", True),
        ("demo", False),
    ]:
        cmd = sub.add_parser(name)
        if needs_config:
            cmd.add_argument("--config", required=True, help="path to a JSON experiment config")
        cmd.add_argument("--seed", type=int, default=0, help="root seed for every sampled quantity")
        cmd.add_argument("--workers", type=int, default=1, help="parallelism of inner loops")
        cmd.add_argument("--out", default=".", help="directory for report.json and CSV outputs")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out)
    started = time.perf_counter()
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "demo":
            config = DEMO_CONFIG
            results = run_demo(args.seed, args.workers, out_dir)
        else:
            config = load_config(args.config)
            runner = {
                "axioms": lambda: run_axioms(config, args.seed, args.workers),
                "classify": lambda: run_classify(config, args.seed, args.workers),
                "solve": lambda: run_solve(config, args.seed, args.workers, out_dir),
                "sie": lambda: run_sie(config, args.seed, args.workers, out_dir),
            }[args.command]
            results = runner()
    except (ConfigError, InvalidParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DivergenceError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except ProbconeError as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1

    report = {
        "tool": "probcone",
        "version": __version__,
        "command": args.command,
        "seed": args.seed,
        "config": config,
        "results": results,
        "wall_time_s": time.perf_counter() - started,
    }
    report_path = out_dir / "report.json"
    report_path.write_text(canonical_json(report))
    print(f"wrote {report_path}")
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
