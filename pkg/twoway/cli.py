"""twoway 명령행 진입점

설정을 병합·검증한 뒤 명령별 계산을 실행하고 그림/표용 CSV·JSON을 기록합니다.
"""

import argparse
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar

import numpy as np

from .config import RunConfig, load_run_config
from .exceptions import ConfigurationError, ConvergenceError
from .models import Command, DirectMethod, Framework, ProblemSpec
from .monitoring import get_performance_monitor
from .norms import (
    identity_check,
    norm_equivalence,
    p_norm_analytic_periodic,
    p_norm_numeric,
    pw_norm,
    wln_norm,
    wln_norm_sweep,
    wlp_lower_bound,
)
from .operators import OperatorSet, build_operators
from .periodic import (
    ballistic_ratio,
    diffusivity_estimate,
    lambda_R,
    large_L_approx,
    leading_symmetric_eigenvalue,
    regenerated_constants,
    series_coefficients,
    transport_polynomials,
)
from .problems import ProblemFactory, ProblemRegistry, cos_minus_r_spec
from .quad import build_grid
from .solver import (
    SolutionCoefficients,
    boundary_residual,
    density_profile,
    direct_solve,
    evaluate,
    exit_distribution,
    flux,
    neumann_solve,
    quadrature_flux,
)
from .spectral import Spectrum, half_range_moments, solve_spectrum
from .utils import ErrorHandler, OutputWriter
from .version import __version__

logger = logging.getLogger(__name__)

JOBS_ENV = "TWOWAY_JOBS"
NODES_PER_MODE = 32

T = TypeVar("T")
R = TypeVar("R")


class TwoWayArgumentParser(argparse.ArgumentParser):
    """잘못된 인자는 설정 오류와 같은 종료 코드 3으로 처리"""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


@dataclass
class RunContext:
    """명령 실행에 필요한 설정과 기록기"""

    config: RunConfig
    writer: OutputWriter

    @property
    def n_modes(self) -> int:
        return self.config.numerics.n_modes

    def problem(self) -> ProblemSpec:
        problem = self.config.problem
        return ProblemFactory.create(problem.preset, problem.overrides())

    def spectrum(self, spec: ProblemSpec, N: Optional[int] = None) -> Spectrum:
        N = N or self.n_modes
        numerics = self.config.numerics
        grid = build_grid(spec, max(numerics.n_nodes, NODES_PER_MODE * N))
        return solve_spectrum(
            spec,
            N,
            grid=grid,
            basis_size=numerics.basis_size,
            residual_tol=numerics.residual_tol,
        )

    def operators(self, spectrum: Spectrum, L: Optional[float] = None) -> OperatorSet:
        threshold = self.config.solver.lambda_threshold
        if threshold is None:
            return build_operators(spectrum, L)
        if threshold == "auto":
            return build_operators(spectrum, L, Framework.THRESHOLDED)
        return build_operators(spectrum, L, Framework.THRESHOLDED, float(threshold))

    def solve(
        self, spec: ProblemSpec, spectrum: Spectrum, ops: OperatorSet
    ) -> SolutionCoefficients:
        solver = self.config.solver
        return neumann_solve(spec, spectrum, ops, tol=solver.tol, max_iter=solver.max_iter)

    def parallel_map(self, func: Callable[[T], R], items: Sequence[T]) -> List[R]:
        """--jobs 개 스레드로 실행하되 결과는 입력 순서대로 반환"""
        jobs = self.config.run.jobs
        if jobs <= 1 or len(items) <= 1:
            return [func(item) for item in items]
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items))


def _not_converged(sol: SolutionCoefficients, label: str) -> ConvergenceError:
    return ConvergenceError(
        f"{label}: Neumann 급수가 {sol.iterations}차 안에 수렴하지 않았습니다",
        iterations=sol.iterations,
        final_increment=float(sol.increment_norms[-1]) if sol.order_history else float("nan"),
    )


def run_spectrum(ctx: RunContext) -> None:
    spec = ctx.problem()
    spectrum = ctx.spectrum(spec)
    X = half_range_moments(spectrum)
    ctx.writer.write_csv(
        "spectrum.csv",
        [("j", ""), ("lambda", "1/length"), ("X_j", ""), ("residual", "")],
        zip(spectrum.indices, spectrum.eigenvalues, X, spectrum.residuals),
    )
    grid = spectrum.grid
    columns = [("theta", "rad")] + [(f"v_{j}", "") for j in spectrum.indices]
    ctx.writer.write_csv(
        "eigenfunctions.csv",
        columns,
        (np.concatenate([[theta], row]) for theta, row in zip(grid.nodes, spectrum.values)),
    )
    if spectrum.g is not None:
        ctx.writer.write_csv("g.csv", [("theta", "rad"), ("g", "")], zip(grid.nodes, spectrum.g))
    if spec.name == "periodic-cos":
        symmetric, overall = leading_symmetric_eigenvalue(spectrum)
        logger.info(
            f"Leading symmetric λ₁={symmetric:.6f} (1/λ₁={1 / symmetric:.5f}), "
            f"min λ={overall:.6f}"
        )


def run_solve(ctx: RunContext) -> None:
    spec = ctx.problem()
    spectrum = ctx.spectrum(spec)
    ops = ctx.operators(spectrum, spec.L)
    sol = ctx.solve(spec, spectrum, ops)
    sweep = ctx.config.sweep

    payload: Dict[str, Any] = {"problem": spec.name, "solution": sol.to_dict()}
    residual_in, residual_out = boundary_residual(sol, spec)
    payload["boundary_residual"] = {"entrance": residual_in, "exit": residual_out}
    if spectrum.has_zero_mode:
        payload["flux"] = flux(sol)
    if spec.name == "periodic-cos" and spectrum.N >= 16:
        series = series_coefficients(
            spec.L,
            spectrum,
            rho_plus=spec.w.rho_plus,
            rho_minus=spec.w.rho_minus,
            n_terms=sweep.sum_terms,
        )
        payload["series"] = series.to_dict()
    ctx.writer.write_json("solution.json", payload)

    x = np.linspace(0.0, spec.L, sweep.x_points)
    theta = np.linspace(spec.a, spec.b, sweep.theta_points)
    f = evaluate(sol, x, theta)
    ctx.writer.write_csv(
        "profile.csv",
        [("x", "length"), ("theta", "rad"), ("f", "density")],
        ((xi, tj, f[i, j]) for i, xi in enumerate(x) for j, tj in enumerate(theta)),
    )
    ctx.writer.write_csv(
        "orders.csv",
        [("order", ""), ("c_n", "density"), ("d_n", "density/length"), ("increment_norm", "")],
        ((inc.order, inc.c, inc.d, inc.norm) for inc in sol.order_history),
    )
    density = density_profile(sol, x)
    ctx.writer.write_csv(
        "density.csv",
        [("x", "length"), ("density", "density*rad"), ("flux", "density*rad")],
        ((xi, rho, quadrature_flux(sol, float(xi))) for xi, rho in zip(x, density)),
    )
    exits = exit_distribution(sol)
    ctx.writer.write_csv(
        "exit_distribution.csv",
        [("theta", "rad"), ("f_entrance", "1/rad"), ("f_exit", "1/rad")],
        zip(exits.theta, exits.at_entrance, exits.at_exit),
    )
    if not sol.converged:
        raise _not_converged(sol, spec.name)


def _norm_diagnostics(ctx: RunContext, fit: bool) -> None:
    spec = ctx.problem()
    norms = ctx.config.norms
    spectrum = ctx.spectrum(spec, max(norms.N_values))
    estimate = wln_norm_sweep(spectrum, norms.N_values, norms.L_mode, norms.L, fit=fit)
    ctx.writer.write_csv(
        "norms.csv",
        [("N", ""), ("norm_squared", ""), ("norm", "")],
        ((N, s, np.sqrt(s)) for N, s in zip(estimate.N_values, estimate.norms_squared)),
    )
    if fit:
        assert estimate.fit is not None
        ctx.writer.write_json("fit.json", {"problem": spec.name, **estimate.to_dict()})
        return

    ops = ctx.operators(spectrum.truncate(min(ctx.n_modes, spectrum.N)), spec.L)
    seed = ctx.config.run.seed
    rng = np.random.default_rng(seed)
    errors = []
    for u in rng.standard_normal((norms.n_samples, 2 * ops.N)):
        lhs, rhs = identity_check(u, ops)
        errors.append(abs(lhs - rhs) / abs(rhs))
    ctx.writer.write_json(
        "norms.json",
        {
            "problem": spec.name,
            **estimate.to_dict(),
            "framework": ops.framework.value,
            "pw_norm": pw_norm(ops),
            "p_norm_numeric": p_norm_numeric(ops),
            "norm_equivalence": norm_equivalence(ops, norms.n_samples, seed),
            "identity_max_relative_error": float(max(errors)),
        },
    )


def run_norms(ctx: RunContext) -> None:
    _norm_diagnostics(ctx, fit=False)


def run_fit(ctx: RunContext) -> None:
    _norm_diagnostics(ctx, fit=True)


def run_pnorm(ctx: RunContext) -> None:
    spec = ctx.problem()
    analytic = p_norm_analytic_periodic(spec.L)
    spectrum = ctx.spectrum(spec)
    numeric = p_norm_numeric(ctx.operators(spectrum, spec.L))
    ctx.writer.write_json(
        "pnorm.json",
        {
            "L": spec.L,
            "p_norm": analytic.value,
            "p_norm_numeric": numeric,
            "sigma1": analytic.sigma1,
            "sigma2": analytic.sigma2,
            "r1": analytic.r1,
            "r2": analytic.r2,
            "rho_sup": analytic.rho_sup,
            **analytic.extras,
        },
    )
    logger.info(f"‖P‖ analytic={analytic.value:.6f}, numeric={numeric:.6f}")


def run_sweep_L(ctx: RunContext) -> None:
    spec = ctx.problem()
    spectrum = ctx.spectrum(spec)
    n_terms = ctx.config.sweep.sum_terms

    def point(L: float) -> Dict[str, Any]:
        local = spec.with_L(L)
        series = series_coefficients(
            L, spectrum, rho_plus=spec.w.rho_plus, rho_minus=spec.w.rho_minus, n_terms=n_terms
        )
        sol = ctx.solve(local, spectrum, ctx.operators(spectrum, L))
        return {"series": series, "sol": sol, "flux": flux(sol)}

    results = ctx.parallel_map(point, list(ctx.config.sweep.L_values))
    ctx.writer.write_csv(
        "sweep_L.csv",
        [
            ("L", "length"),
            ("A_L", ""),
            ("B_L", ""),
            ("c", "density"),
            ("d", "density/length"),
            ("flux", "density*rad"),
            ("c_series", "density"),
            ("d_series", "density/length"),
            ("iterations", ""),
            ("converged", ""),
        ],
        (
            (
                r["series"].L,
                r["series"].A_L,
                r["series"].B_L,
                r["sol"].c,
                r["sol"].d,
                r["flux"],
                r["series"].c,
                r["series"].d,
                r["sol"].iterations,
                r["sol"].converged,
            )
            for r in results
        ),
    )
    for r in results:
        if not r["sol"].converged:
            raise _not_converged(r["sol"], f"sweep-L at L={r['series'].L}")


def run_sweep_r(ctx: RunContext) -> None:
    L = ctx.config.problem.L or 1.0
    N = ctx.n_modes
    solver = ctx.config.solver
    norms = ctx.config.norms

    def point(r: float) -> Dict[str, Any]:
        spec = cos_minus_r_spec(r, L)
        spectrum = ctx.spectrum(spec, N)
        lam, _, _ = lambda_R(r, spectrum)
        plain = neumann_solve(
            spec, spectrum, build_operators(spectrum, L), solver.tol, solver.max_iter
        )
        thresholded = neumann_solve(
            spec,
            spectrum,
            build_operators(spectrum, L, Framework.THRESHOLDED),
            solver.tol,
            solver.max_iter,
        )
        return {
            "r": r,
            "lambda_R": lam,
            "bound": wlp_lower_bound(r, L, spectrum),
            "W_N": wln_norm(spectrum, N=N, L_mode=norms.L_mode, L=norms.L),
            "plain": plain.converged,
            "thresholded": thresholded.converged,
        }

    results = ctx.parallel_map(point, list(ctx.config.sweep.r_values))
    ctx.writer.write_csv(
        "sweep_r.csv",
        [
            ("r", ""),
            ("lambda_R", "1/length"),
            ("bound", ""),
            ("W_N", ""),
            ("plain_converged", ""),
            ("thresholded_converged", ""),
        ],
        (
            (r["r"], r["lambda_R"], r["bound"], r["W_N"], r["plain"], r["thresholded"])
            for r in results
        ),
    )


def run_oracle_compare(ctx: RunContext) -> None:
    spec = ctx.problem()
    spectrum = ctx.spectrum(spec)
    ops = ctx.operators(spectrum, spec.L)
    solver = ctx.config.solver
    neumann = ctx.solve(spec, spectrum, ops)
    projected = direct_solve(spec, spectrum, method=DirectMethod.PROJECTED)
    least_squares = direct_solve(
        spec, spectrum, oversample=solver.oversample, method=DirectMethod.LEAST_SQUARES
    )

    def difference(other: SolutionCoefficients) -> float:
        return float(
            max(
                abs(neumann.c - other.c),
                abs(neumann.d - other.d),
                np.max(np.abs(neumann.a - other.a)),
            )
        )

    ctx.writer.write_json(
        "oracle.json",
        {
            "problem": spec.name,
            "pw_norm": pw_norm(ops),
            "neumann": neumann.to_dict(),
            "projected": projected.to_dict(),
            "least_squares": least_squares.to_dict(),
            "max_difference_projected": difference(projected),
            "max_difference_least_squares": difference(least_squares),
        },
    )
    if not neumann.converged:
        raise _not_converged(neumann, spec.name)


def run_lambda_r(ctx: RunContext) -> None:
    problem_r = ctx.config.problem.r
    r_values = [problem_r] if problem_r is not None else list(ctx.config.sweep.r_values)

    def point(r: float) -> Dict[str, float]:
        lam, v_R, spectrum = lambda_R(r, N=ctx.n_modes)
        grid = spectrum.grid
        deviation = v_R - 1.0 - 2.0 * r * np.cos(grid.nodes)
        return {
            "r": r,
            "lambda_R": lam,
            "cubic_ratio": (lam - 2.0 * r) / r**3,
            "v_R_deviation": float(np.sqrt(grid.integrate(deviation**2))),
        }

    results = ctx.parallel_map(point, r_values)
    ctx.writer.write_csv(
        "lambda_r.csv",
        [
            ("r", ""),
            ("lambda_R", "1/length"),
            ("two_r", "1/length"),
            ("cubic_ratio", ""),
            ("v_R_deviation", ""),
        ],
        (
            (p["r"], p["lambda_R"], 2.0 * p["r"], p["cubic_ratio"], p["v_R_deviation"])
            for p in results
        ),
    )


def run_diffusivity(ctx: RunContext) -> None:
    spec = ctx.problem()
    spectrum = ctx.spectrum(spec)
    sweep = ctx.config.sweep
    estimate = diffusivity_estimate(
        sweep.diffusivity_L_values, spec.w.delta_rho, spectrum=spectrum
    )
    symmetric, overall = leading_symmetric_eigenvalue(spectrum)
    ctx.writer.write_json(
        "diffusivity.json",
        {
            **estimate.to_dict(),
            "transport": transport_polynomials(spectrum, sweep.sum_terms).to_dict(),
            "constants": regenerated_constants(spectrum, sweep.sum_terms),
            "large_L": [large_L_approx(L, spectrum, sweep.sum_terms) for L in estimate.L_values],
            "ballistic": ballistic_ratio(min(sweep.L_values), spectrum, spec.w.delta_rho),
            "lambda_1_symmetric": symmetric,
            "lambda_1_overall": overall,
        },
    )
    ctx.writer.write_csv(
        "diffusivity.csv",
        [("L", "length"), ("flux", "density*rad"), ("minus_delta_rho_over_flux", "length")],
        (
            (L, q, -spec.w.delta_rho / q)
            for L, q in zip(estimate.L_values, estimate.fluxes)
        ),
    )


def run_presets(ctx: RunContext) -> None:
    presets = ProblemRegistry.get_all()
    for preset in presets:
        print(f"{preset.name:16s} {preset.display_name}: {preset.description}")
    ctx.writer.write_json(
        "presets.json",
        {
            "presets": [
                {
                    "name": preset.name,
                    "display_name": preset.display_name,
                    "description": preset.description,
                    "defaults": preset.defaults,
                }
                for preset in presets
            ]
        },
    )


COMMANDS: Dict[Command, Callable[[RunContext], None]] = {
    Command.SPECTRUM: run_spectrum,
    Command.SOLVE: run_solve,
    Command.NORMS: run_norms,
    Command.PNORM: run_pnorm,
    Command.FIT: run_fit,
    Command.SWEEP_L: run_sweep_L,
    Command.SWEEP_R: run_sweep_r,
    Command.ORACLE_COMPARE: run_oracle_compare,
    Command.LAMBDA_R: run_lambda_r,
    Command.DIFFUSIVITY: run_diffusivity,
    Command.PRESETS: run_presets,
}


def run(config: RunConfig) -> int:
    """
    검증된 설정으로 명령을 실행합니다.

    Returns:
        종료 코드 (0 성공, 1 기타 오류, 2 미수렴, 3 설정 오류)
    """
    writer = OutputWriter(Path(config.output.path), config.command.value, config.config_hash())
    ctx = RunContext(config=config, writer=writer)
    monitor = get_performance_monitor()
    context = {"command": config.command.value, "preset": config.problem.preset}
    try:
        with monitor.timer(f"cli.{config.command.value}"):
            COMMANDS[config.command](ctx)
    except Exception as e:
        print(ErrorHandler.create_user_friendly_message(e), file=sys.stderr)
        return ErrorHandler.handle_cli_error(e, context)
    finally:
        logger.info(
            f"Performance summary: {json.dumps(monitor.get_performance_summary(), default=str)}"
        )
    logger.info(f"Wrote {len(writer.written)} file(s) to {writer.out_dir}")
    return 0


def _parse_threshold(value: str) -> Any:
    if value == "auto":
        return value
    try:
        return float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {value!r}")


def _default_jobs() -> Optional[int]:
    raw = os.getenv(JOBS_ENV)
    if raw is None:
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{JOBS_ENV} 값이 정수가 아닙니다: {raw!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = TwoWayArgumentParser(
        prog="twoway", description="양방향 확산 방정식 반구간 경계값 문제 풀이기"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("command", choices=[c.value for c in Command])
    parser.add_argument("--config", type=Path, help="YAML 실행 설정 파일")
    parser.add_argument("--preset", help="문제 프리셋 이름")
    parser.add_argument("--L", type=float, dest="L", help="슬랩 길이")
    parser.add_argument("--r", type=float, help="cos θ − r 의 r")
    parser.add_argument("--N", type=int, dest="N", help="부호별 고유모드 수")
    parser.add_argument("--nodes", type=int, help="구적 노드 수")
    parser.add_argument("--tol", type=float, help="Neumann 급수 수렴 기준")
    parser.add_argument("--out", help="출력 디렉토리")
    parser.add_argument("--jobs", type=int, help=f"동시 작업 수 (기본값 {JOBS_ENV})")
    parser.add_argument("--seed", type=int, help="난수 시드")
    parser.add_argument(
        "--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]
    )
    parser.add_argument("--threshold", type=_parse_threshold, help="Λ 임계값 또는 auto")
    return parser


def overrides_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """명령행 플래그를 설정 트리 형태로 변환"""
    jobs = args.jobs if args.jobs is not None else _default_jobs()
    return {
        "command": args.command,
        "problem": {"preset": args.preset, "L": args.L, "r": args.r},
        "numerics": {"n_modes": args.N, "n_nodes": args.nodes},
        "solver": {"tol": args.tol, "lambda_threshold": args.threshold},
        "output": {"path": args.out},
        "logging": {"level": args.log_level},
        "run": {"jobs": jobs, "seed": args.seed},
    }


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    ErrorHandler.setup_logging(args.log_level or "INFO")
    try:
        config = load_run_config(args.config, overrides_from_args(args))
    except ConfigurationError as e:
        print(e.message, file=sys.stderr)
        return ErrorHandler.handle_cli_error(e, {"command": args.command})
    ErrorHandler.setup_logging(config.logging.level, config.logging.file, config.logging.format)
    logger.info(f"twoway {__version__} {config.command.value} (config_hash={config.config_hash()})")
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
