#!/usr/bin/env python3
"""
nonlocal-evolve: CLI entry point

Sinc-quadrature solver for u' + Au = f with u(0) + sum alpha_k u(t_k) = u0.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
from colorama import Fore, Style, init as colorama_init

from src.config import config
from src.contour import integration_hyperbola, strip_height
from src.exceptions import ContourUnsafeError, NonlocalEvolveError, SolvabilityError
from src.harness import evaluate_acceptance, residual_check, run_study, write_report
from src.models import StepRule, StudyConfig, Verdict
from src.node_pool import NodePool
from src.presets import Problem, build_problem, example_problem, example_study
from src.solver_hom import ensure_solvable, make_plan
from src.solver_inhom import solve_full
from src.symbol import check_solvability, q_bound
from src.utils import ensure_output_dir, load_config_file, setup_logging

setup_logging(config.log_level)
logger = logging.getLogger(__name__)
colorama_init()

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNKNOWN = 2


def _load(config_path: Optional[str], example: Optional[int]) -> Tuple[Dict[str, Any], Problem]:
    document: Dict[str, Any] = load_config_file(config_path) if config_path else {}
    if example is not None:
        document["example"] = example
    if "example" not in document and "operator" not in document:
        raise click.UsageError("provide --config or --example")
    return document, build_problem(document)


def _apply_rho1(problem: Problem, rho1: Optional[float]) -> None:
    if rho1 is not None:
        problem.model.spec = problem.model.spec.replace(rho1=rho1)


def _mark(passed: bool) -> str:
    if passed:
        return f"{Fore.GREEN}PASS{Style.RESET_ALL}"
    return f"{Fore.RED}FAIL{Style.RESET_ALL}"


class NonlocalEvolveGroup(click.Group):
    """Usage errors exit with EXIT_ERROR; EXIT_UNKNOWN is reserved for the Unknown verdict"""

    def make_context(self, info_name, args, parent=None, **extra):
        try:
            return super().make_context(info_name, args, parent=parent, **extra)
        except click.UsageError as e:
            e.exit_code = EXIT_ERROR
            raise

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.UsageError as e:
            e.exit_code = EXIT_ERROR
            raise


@click.group(cls=NonlocalEvolveGroup)
def main():
    """
    nonlocal-evolve

    Exponentially convergent contour quadrature for parabolic problems with
    a nonlocal m-point initial condition.
    """
    try:
        config.validate()
    except ValueError as e:
        click.echo(f"Configuration error: {e}")
        raise SystemExit(EXIT_ERROR)


@main.command()
@click.option('--config', 'config_path', default=None, type=click.Path(exists=True), help='JSON config file')
@click.option('--example', default=None, type=click.IntRange(1, 3), help='Reference example 1, 2 or 3')
@click.option('--rho1', default=None, type=float, help='Override the contour shift rho1')
@click.pass_context
def check(ctx, config_path, example, rho1):
    """Solvability pre-flight: verdict, Q, d1 and the hyperbola axes"""
    try:
        _, problem = _load(config_path, example)
        _apply_rho1(problem, rho1)
        spec = problem.model.spec
        verdict = check_solvability(problem.nl, spec)
        click.echo(f"Verdict: {verdict.value}")
        d1 = strip_height(spec)
        hyperbola = integration_hyperbola(spec)
        click.echo(f"d1:  {d1:.12g}")
        click.echo(f"a_I: {hyperbola.a:.12g}")
        click.echo(f"b_I: {hyperbola.b:.12g}")
        try:
            click.echo(f"Q:   {q_bound(problem.nl, spec):.12g}")
        except ContourUnsafeError as e:
            click.echo(f"Q:   unavailable ({e})")
            click.echo(f"Dominant nonlocal point: t_{e.dominant_index + 1} = {e.dominant_time:g}")
            if verdict != Verdict.UNKNOWN:
                click.echo(f"{Fore.YELLOW}Contour unsafe for rho1 = {spec.rho1:g}; raise --rho1 towards rho0 "
                           f"before solving{Style.RESET_ALL}")
    except NonlocalEvolveError as e:
        click.echo(f"Error: {e}")
        ctx.exit(EXIT_ERROR)
    ctx.exit(EXIT_UNKNOWN if verdict == Verdict.UNKNOWN else EXIT_OK)


@main.command()
@click.option('--config', 'config_path', default=None, type=click.Path(exists=True), help='JSON config file')
@click.option('--example', default=None, type=click.IntRange(1, 3), help='Reference example 1, 2 or 3')
@click.option('--t', 't_values', multiple=True, type=float, help='Evaluation time (repeatable)')
@click.option('--x', 'x_values', multiple=True, type=float, help='Evaluation point in (0, 1) (repeatable)')
@click.option('--N', 'N', default=64, type=click.IntRange(min=1), help='Truncation N (2N+1 nodes)')
@click.option('--mode', default=None, type=click.Choice(['uniform', 'fixed-t', 'inverse-sqrt']), help='Step rule')
@click.option('--c1', default=None, type=float, help='Step constant for fixed-t mode')
@click.option('--h-exact-paper', '--h-inverse-sqrt', 'h_inverse_sqrt', is_flag=True, default=False,
              help='Use h = N^(-1/2), the step of the reference tables')
@click.option('--rho1', default=None, type=float, help='Override the contour shift rho1')
@click.option('--alpha', default=None, type=float, help='Smoothness exponent of u0 in (0, 1]')
@click.option('--force', is_flag=True, default=False, help='Run even when solvability is Unknown')
@click.option('--json', 'as_json', is_flag=True, default=False, help='Machine-readable output')
@click.option('--threads', default=None, type=click.IntRange(min=1), help='Worker threads')
@click.pass_context
def solve(ctx, config_path, example, t_values, x_values, N, mode, c1, h_inverse_sqrt, rho1, alpha,
          force, as_json, threads):
    """Evaluate the solution at the given times and points"""
    try:
        document, problem = _load(config_path, example)
        _apply_rho1(problem, rho1)
        study = document.get("study", {})
        if h_inverse_sqrt:
            rule = StepRule.INVERSE_SQRT
        else:
            rule = StepRule.parse(mode or study.get("mode", config.default_mode))
        c1 = c1 if c1 is not None else study.get("c1", config.default_c1)
        alpha = alpha if alpha is not None else study.get("alpha", problem.alpha)
        times = list(t_values) or [study.get("t", 0.3)]
        points = list(x_values) or [study.get("x", 0.5)]
        pool = NodePool(threads if threads is not None else config.threads)

        ensure_solvable(problem.nl, problem.model.spec, force)
        plan = make_plan(problem.model.spec, alpha, N, rule, c1, problem.nl)
        results = []
        for t in times:
            vector = solve_full(plan, problem.model, problem.nl, problem.u0, problem.source, t,
                                pool=pool, force=force)
            values = [float(problem.model.evaluate(vector, x).real) for x in points]
            results.append({"t": t, "x": points, "values": values})
    except SolvabilityError as e:
        click.echo(f"Error: {e}")
        ctx.exit(EXIT_UNKNOWN)
    except NonlocalEvolveError as e:
        click.echo(f"Error: {e}")
        ctx.exit(EXIT_ERROR)

    if as_json:
        click.echo(json.dumps({"N": N, "h": plan.h, "mode": rule.value, "results": results}))
    else:
        click.echo(f"N={N}  h={plan.h:.6g}  mode={rule.value}")
        for entry in results:
            for x, value in zip(entry["x"], entry["values"]):
                click.echo(f"u({x:g}, {entry['t']:g}) = {value:.16e}")
    ctx.exit(EXIT_OK)


def _echo_report(report) -> None:
    click.echo(f"{'N':>5}  {'value':>24}  {'error':>12}  {'rate c':>8}")
    for row in report.rows:
        value = f"{row.value:.16e}" if row.value is not None else "failed"
        error = f"{row.error:.4e}" if row.error is not None else "-"
        rate = f"{row.rate_c:.4f}" if row.rate_c is not None else "-"
        click.echo(f"{row.N:>5}  {value:>24}  {error:>12}  {rate:>8}")


@main.command()
@click.option('--config', 'config_path', required=True, type=click.Path(exists=True), help='JSON config file')
@click.option('--N-list', 'N_list', default=None, type=str, help='Comma-separated N values')
@click.option('--mode', default=None, type=click.Choice(['uniform', 'fixed-t', 'inverse-sqrt']), help='Step rule')
@click.option('--c1', default=None, type=float, help='Step constant for fixed-t mode')
@click.option('--h-exact-paper', '--h-inverse-sqrt', 'h_inverse_sqrt', is_flag=True, default=False,
              help='Use h = N^(-1/2), the step of the reference tables')
@click.option('--rho1', default=None, type=float, help='Override the contour shift rho1')
@click.option('--alpha', default=None, type=float, help='Smoothness exponent of u0 in (0, 1]')
@click.option('--force', is_flag=True, default=False, help='Run even when solvability is Unknown')
@click.option('--threads', default=None, type=click.IntRange(min=1), help='Worker threads')
@click.option('--output', 'output_path', default=None, type=click.Path(), help='Report path')
@click.option('--format', 'fmt', default=None, type=click.Choice(['csv', 'jsonl']), help='Report format')
@click.pass_context
def study(ctx, config_path, N_list, mode, c1, h_inverse_sqrt, rho1, alpha, force, threads, output_path, fmt):
    """Run a convergence study from a config file and write the report"""
    try:
        document, problem = _load(config_path, None)
        _apply_rho1(problem, rho1)
        settings = dict(document.get("study", {}))
        if N_list:
            settings["N_list"] = [int(n) for n in N_list.split(",") if n.strip()]
        if h_inverse_sqrt:
            settings["mode"] = StepRule.INVERSE_SQRT
        elif mode:
            settings["mode"] = mode
        settings.setdefault("mode", config.default_mode)
        settings.setdefault("c1", config.default_c1)
        for key, value in (("c1", c1), ("alpha", alpha), ("output_path", output_path), ("format", fmt)):
            if value is not None:
                settings[key] = value
        settings.setdefault("output_path", str(Path(config.default_out_dir) / f"{problem.name}.csv"))
        example = document.get("example", "custom")
        cfg = StudyConfig(example_id=example, threads=threads or config.threads, force=force,
                          problem=document, **settings)
        ensure_output_dir(str(Path(cfg.output_path).parent))
        report = run_study(cfg, problem)
    except NonlocalEvolveError as e:
        click.echo(f"Error: {e}")
        ctx.exit(EXIT_ERROR)

    _echo_report(report)
    click.echo(f"\nReport written to {cfg.output_path}")
    failed = [row.N for row in report.rows if row.value is None]
    ctx.exit(EXIT_ERROR if failed else EXIT_OK)


@main.command()
@click.option('--example', required=True, type=click.IntRange(1, 3), help='Reference example 1, 2 or 3')
@click.option('--threads', default=None, type=click.IntRange(min=1), help='Worker threads')
@click.option('--out-dir', default=None, type=click.Path(), help='Output directory for the report')
@click.option('--format', 'fmt', default='csv', type=click.Choice(['csv', 'jsonl']), help='Report format')
@click.pass_context
def reproduce(ctx, example, threads, out_dir, fmt):
    """Rerun a reference table and judge it against the acceptance tolerances"""
    out_dir = out_dir or config.default_out_dir
    ensure_output_dir(out_dir)
    output_path = str(Path(out_dir) / f"example-{example}.{fmt}")
    try:
        cfg = example_study(example, threads=threads or config.threads)
        report = run_study(cfg, example_problem(example))
        write_report(report, output_path, fmt)
        result = evaluate_acceptance(example, report)
        if example == 3:
            result.checks.append(residual_check(example, pool=NodePool(cfg.threads)))
    except NonlocalEvolveError as e:
        click.echo(f"Error: {e}")
        ctx.exit(EXIT_ERROR)

    _echo_report(report)
    click.echo("")
    for item in result.checks:
        click.echo(f"{_mark(item.passed)}  {item.name}  {item.detail}")
    click.echo(f"\nExample {example}: {_mark(result.passed)}  (report: {output_path})")
    ctx.exit(EXIT_OK if result.passed else EXIT_ERROR)


if __name__ == '__main__':
    main()
