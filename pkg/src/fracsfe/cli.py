"""Command line front end.

    fracsfe solve <config>
    fracsfe verify <config> <field.frf>
    fracsfe sweep-eps <config>
    fracsfe multistart <config> --k <int>

Exit status: 0 success, 1 not converged, 2 configuration error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path

import numpy as np

from .config import RunConfig, load_config
from .errors import (
    BoxTooSmall,
    FormatError,
    FracSFEError,
    GridMismatch,
    NotConverged,
    ParseError,
    ValidationError,
)
from .functionals import potential
from .io import load_field, save_field
from .nonlinearity import MassCase
from .solver import (
    certify,
    default_zeta1,
    multi_start_search,
    solve_ground_state,
    solve_with_continuation,
)
from .spectral import Field
from .symmetry import choose_tent_radius

EXIT_OK, EXIT_NOT_CONVERGED, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3
CSV_HEADER = "run,iter,J,du_norm,P,theta,step"

log = logging.getLogger(__name__)


def fmt(x) -> str:
    """Floats with 17 significant digits, everything else via ``str``."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if x is None:
        return "none"
    return str(x)


def certification_block(rep, header: str) -> list:
    lines = [f"[{header}]"]
    lines += [f"{k} = {fmt(v)}" for k, v in rep.certification().items()]
    return lines


def _solution_block(rep, index: int) -> list:
    lines = certification_block(rep, f"solution {index}")
    lines += [
        f"converged = {fmt(rep.converged)}",
        f"iterations = {rep.iterations}",
        f"eps = {fmt(rep.eps)}",
        f"nodes = {rep.nodes}",
        f"least_energy = {fmt(rep.least_energy)}",
        f"side = {fmt(rep.u.grid.side)}",
    ]
    return lines


# -- initial fields ----------------------------------------------------------------
def initial_field(cfg: RunConfig) -> Field:
    grid, spec, fp = cfg.grid, cfg.spec(), cfg.frac
    if cfg.init == "file":
        return load_field(cfg.init_file, grid)
    if cfg.init == "tent":
        height = cfg.plateau * default_zeta1(spec, fp)

        def pot(u):
            val = potential(u, spec)
            if spec.mass_case is MassCase.POSITIVE:
                val -= 0.5 * fp.a**fp.s * u.l2_norm_sq()
            return val

        return choose_tent_radius(grid, cfg.symmetry, height, pot)[2]
    width = cfg.init_width if cfg.init_width is not None else grid.side / 16.0
    return Field(grid, cfg.init_amplitude * np.exp(-(grid.radius() / width) ** 2))


# -- pipeline --------------------------------------------------------------------------
def _run_pipeline(cfg: RunConfig, mode: str, k: int):
    spec, fp, sc, scfg = cfg.spec(), cfg.frac, cfg.symmetry, cfg.solver
    if mode == "multistart":
        return multi_start_search(k, cfg.grid, spec, fp, sc, scfg, width=cfg.init_width)
    init = initial_field(cfg)
    if mode == "continuation":
        return solve_with_continuation(init, spec, fp, sc, scfg)
    return [solve_ground_state(init, spec, fp, sc, scfg)]


def _write_outputs(out: Path, cfg: RunConfig, reports: list, failure: list):
    out.mkdir(parents=True, exist_ok=True)
    ok = bool(reports) and not failure and all(r.converged for r in reports)
    lines = [
        "[run]",
        f"mode = {cfg.mode}",
        f"status = {'converged' if ok else 'not_converged'}",
        f"converged = {fmt(ok)}",
        f"solutions = {len(reports)}",
        f"N = {cfg.dim}",
        f"s = {fmt(cfg.s)}",
        f"a = {fmt(cfg.a)}",
        f"L = {fmt(cfg.side)}",
        f"n = {cfg.pts}",
        f"symmetry = {cfg.symmetry}",
    ]
    for i, rep in enumerate(reports):
        lines.append("")
        lines += _solution_block(rep, i)
    if failure:
        lines.append("")
        lines += failure
    (out / "report.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    summary = [f"status = {'converged' if ok else 'not_converged'}", f"solutions = {len(reports)}"]
    for i, rep in enumerate(reports):
        summary.append(f"energy_{i} = {fmt(rep.energy.total)}")
    (out / "summary.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")
    if cfg.csv:
        rows = [CSV_HEADER]
        for i, rep in enumerate(reports):
            rows += [",".join([str(i), str(it)] + [fmt(float(v)) for v in rest]) for it, *rest in rep.history]
        (out / "iterations.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    if cfg.dump_fields and reports:
        (out / "fields").mkdir(exist_ok=True)
        for i, rep in enumerate(reports):
            save_field(out / "fields" / f"solution_{i}.frf", rep.u)
    return ok


def run(cfg: RunConfig, mode: str | None = None, k: int | None = None) -> int:
    """Execute the configured pipeline and write its outputs; returns the exit status."""
    mode = mode or cfg.mode
    k = k if k is not None else cfg.k
    cfg = dataclasses.replace(cfg, mode=mode, k=k)
    out = Path(cfg.directory)
    failure = []
    reports = []
    try:
        reports = _run_pipeline(cfg, mode, k)
    except NotConverged as exc:
        if exc.report is not None:
            reports = [exc.report]
        failure = ["[failure]", "error = NotConverged", f"message = {exc}"]
    except BoxTooSmall as exc:
        failure = ["[failure]", "error = BoxTooSmall", f"message = {exc}"]
    except (FormatError, GridMismatch) as exc:
        log.error("%s", exc)
        return EXIT_IO
    except FracSFEError as exc:
        failure = ["[failure]", f"error = {type(exc).__name__}", f"message = {exc}"]
    if mode == "multistart" and not reports and not failure:
        failure = ["[failure]", "error = NotConverged", "message = no start produced a certified solution"]
    try:
        ok = _write_outputs(out, cfg, reports, failure)
    except OSError as exc:
        log.error("cannot write outputs: %s", exc)
        return EXIT_IO
    return EXIT_OK if ok else EXIT_NOT_CONVERGED


def verify(field_path, cfg: RunConfig) -> str:
    """Certification block of a dumped field under the configured problem."""
    u = load_field(field_path, cfg.grid)
    rep = certify(u, cfg.spec(), cfg.frac, cfg.symmetry, cfg.solver)
    lines = certification_block(rep, "verify") + [f"converged = {fmt(rep.converged)}"]
    return "\n".join(lines) + "\n"


# -- entry point ---------------------------------------------------------------------
def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracsfe", description="Ground states of fractional scalar field equations.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="verb", required=True)
    sub.add_parser("solve", help="run the pipeline named in the config").add_argument("config")
    v = sub.add_parser("verify", help="recompute the certificates of a field dump")
    v.add_argument("config")
    v.add_argument("field")
    sub.add_parser("sweep-eps", help="epsilon continuation down to the unmodified problem").add_argument("config")
    m = sub.add_parser("multistart", help="solve from several radial seeds")
    m.add_argument("config")
    m.add_argument("--k", type=int, required=True)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValidationError as exc:
        print("config error:", file=sys.stderr)
        for v in exc.violations:
            print(f"  {v}", file=sys.stderr)
        return EXIT_CONFIG
    if args.verb == "verify":
        try:
            sys.stdout.write(verify(args.field, cfg))
        except (OSError, FormatError, GridMismatch) as exc:
            print(f"cannot verify: {exc}", file=sys.stderr)
            return EXIT_IO
        return EXIT_OK
    if args.verb == "multistart":
        if args.k < 1:
            print("config error: --k must be >= 1", file=sys.stderr)
            return EXIT_CONFIG
        return run(cfg, "multistart", args.k)
    if args.verb == "sweep-eps":
        return run(cfg, "continuation")
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
