"""Benchmark command line: generate problems, solve, sweep, and check conditions.

Subcommands:
  solve   run one method on one problem and print a result row
  bench   run method/size sweeps and emit a CSV of result rows
  check   evaluate the convergence conditions (optionally over a size sweep)
  gen     write generated problems to text files

Problems come either from the built-in generators (``--example 5.1|5.2|5.3``)
or from a directory of text files (``--input``, expecting A.txt/B.txt/b.txt
for an absolute value system or M.txt/q.txt for a complementarity problem).
A flat ``key = value`` config file can pre-set any flag; explicit flags win.

Exit codes: 0 converged / condition holds, 1 usage or input error,
2 max-iterations, 3 numerical breakdown, 4 condition fails.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.linalg import LinAlgError

from . import __version__
from .comparators import GAVE_SOLVERS, TAU_METHODS, sweep_optimal_tau
from .io import read_matrix, read_vector, write_matrix, write_vector
from .lcp import (
    LcpProblem,
    ModulusConfig,
    lcp_to_gave,
    solve_amgs,
    solve_ggs_lcp,
    sweep_optimal_theta,
)
from .problems import BlockTridiagonalSpec, RandomGaveSpec, gen_lcp_example, gen_random_gave
from .solvers import (
    GaveProblem,
    SolverConfig,
    Termination,
    check_theorem31,
    check_theorem32,
)

EXPERIMENTS = {"5.1": "example51", "5.2": "example52", "5.3": "example53"}
LCP_METHODS = ("amgs", "ggs-lcp")
ALL_METHODS = tuple(GAVE_SOLVERS) + LCP_METHODS
PRNG_NAME = "numpy-pcg64"

CSV_HEADER = [
    "experiment", "method", "m", "n", "parameter",
    "IT", "RES", "CPU_seconds", "CPU_opt_seconds", "termination",
]

_EXIT_BY_TERMINATION = {
    Termination.CONVERGED: 0,
    Termination.MAX_ITERATIONS: 2,
    Termination.NUMERICAL_BREAKDOWN: 3,
}


class CliError(ValueError):
    """Usage-level error: reported with exit code 1."""


@dataclass
class BenchSpec:
    """Echo of one bench invocation (drives the runs and the CSV provenance)."""

    experiment: str
    m_values: list
    methods: list
    repeats: int
    tol: float
    max_iter: int
    theta_grid: list | None
    tau_grid: list | None
    seed: int
    output_path: str | None

    def __post_init__(self):
        if not self.m_values:
            raise CliError("at least one m value is required")
        if not self.methods:
            raise CliError("at least one method is required")
        if self.repeats < 1:
            raise CliError("repeats must be at least 1")


@dataclass
class ResultRow:
    experiment: str
    method: str
    m: object
    n: int
    parameter: object
    it: int
    res: float
    cpu_seconds: float
    cpu_opt_seconds: object
    termination: str

    def __post_init__(self):
        if self.res < 0:
            raise ValueError("RES must be nonnegative")

    def as_csv(self) -> list:
        return [
            self.experiment, self.method, self.m, self.n,
            "" if self.parameter == "" else float(self.parameter),
            self.it, float(self.res), float(self.cpu_seconds),
            "" if self.cpu_opt_seconds == "" else float(self.cpu_opt_seconds),
            self.termination,
        ]


def _console_row(row: ResultRow) -> str:
    param = row.parameter if row.parameter != "" else "-"
    m = row.m if row.m != "" else "-"
    return (
        f"{row.experiment} {row.method} m={m} n={row.n} param={param} "
        f"IT={row.it} RES={row.res:.4g} CPU={row.cpu_seconds:.4g}s {row.termination}"
    )


def _parse_float_grid(text: str) -> list[float]:
    """Grid spec 'start:step:stop' (both ends included) or a comma list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise CliError(f"bad grid {text!r}, expected start:step:stop")
        a, step, b = (float(p) for p in parts)
        if step <= 0:
            raise CliError("grid step must be positive")
        count = int(np.floor((b - a) / step + 1e-9)) + 1
        if count < 1:
            raise CliError(f"empty grid {text!r}")
        return [float(v) for v in np.round(a + step * np.arange(count), 12)]
    vals = [float(p) for p in text.split(",") if p.strip()]
    if not vals:
        raise CliError(f"empty grid {text!r}")
    return vals


def _parse_int_list(text: str) -> list[int]:
    try:
        vals = [int(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise CliError(f"bad integer list {text!r}") from exc
    if not vals:
        raise CliError(f"empty integer list {text!r}")
    return vals


def _parse_int_sweep(text: str) -> list[int]:
    if ":" in text:
        return [int(round(v)) for v in _parse_float_grid(text)]
    return _parse_int_list(text)


def _make_lcp(example: str, m: int, mu: float):
    pattern = (1.0, 2.0) if example == "5.1" else (1.0, 10.0)
    return gen_lcp_example(BlockTridiagonalSpec(m=m, mu=mu, z_star_pattern=pattern))


def _build_problem(args, m_override=None):
    """Return (kind, problem, experiment_label, m_label)."""
    if getattr(args, "input", None):
        d = Path(args.input)
        if (d / "A.txt").is_file():
            prob = GaveProblem(
                read_matrix(d / "A.txt"), read_matrix(d / "B.txt"), read_vector(d / "b.txt")
            )
            return "gave", prob, "custom-file", ""
        if (d / "M.txt").is_file():
            prob = LcpProblem(read_matrix(d / "M.txt"), read_vector(d / "q.txt"))
            return "lcp", prob, "custom-file", ""
        raise CliError(f"{d}: expected A.txt/B.txt/b.txt or M.txt/q.txt")
    example = getattr(args, "example", None)
    if not example:
        raise CliError("a problem source is required: --example or --input")
    if example not in EXPERIMENTS:
        raise CliError(f"unknown example {example!r}; choose from 5.1, 5.2, 5.3")
    m = m_override if m_override is not None else getattr(args, "m", None)
    if m is None:
        raise CliError("--m is required with --example")
    m = int(m)
    if example in ("5.1", "5.2"):
        lcp_prob, _ = _make_lcp(example, m, args.mu)
        return "lcp", lcp_prob, EXPERIMENTS[example], m
    prob = gen_random_gave(
        RandomGaveSpec(m=m, seed=args.seed, make_b_singular=args.singular_b)
    )
    return "gave", prob, "example53", m


def _default_tol(experiment: str) -> float:
    return 1e-5 if experiment in ("example51", "example52") else 1e-8


def _default_x0(experiment: str) -> str:
    return "alt10" if experiment in ("example51", "example52") else "zeros"


def _solver_config(args, experiment: str) -> SolverConfig:
    tol = args.tol if args.tol is not None else _default_tol(experiment)
    x0 = args.x0 if args.x0 is not None else _default_x0(experiment)
    return SolverConfig(
        tol=tol,
        max_iter=args.max_iter,
        x0=x0,
        tau=args.tau,
        omega_scale=args.omega_scale,
        y0_rule=args.y0,
    )


def _run_single(kind, problem, method, config, mcfg):
    if method in LCP_METHODS:
        if kind != "lcp":
            raise CliError(f"method {method!r} needs a complementarity problem (M, q)")
        if method == "amgs":
            return solve_amgs(problem, mcfg, config)
        return solve_ggs_lcp(problem, mcfg, config)
    if method in GAVE_SOLVERS:
        if kind == "lcp":
            raise CliError(
                f"method {method!r} solves Ax - B|x| = b directly; "
                "use amgs or ggs-lcp for complementarity problems"
            )
        return GAVE_SOLVERS[method](problem, config)
    raise CliError(f"unknown method {method!r}; choose from {', '.join(ALL_METHODS)}")


def _open_output(path):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline=""), True


def _write_csv(path, header, rows, provenance):
    fh, close = _open_output(path)
    try:
        for line in provenance:
            fh.write(f"# {line}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)
    finally:
        if close:
            fh.close()


def cmd_solve(args) -> int:
    if not args.method:
        raise CliError("--method is required")
    kind, problem, experiment, m_label = _build_problem(args)
    config = _solver_config(args, experiment)
    mcfg = ModulusConfig(gamma=args.gamma, theta=args.theta)
    report = _run_single(kind, problem, args.method, config, mcfg)
    if args.method == "amgs":
        param = args.theta
    elif args.method in TAU_METHODS:
        param = args.tau
    else:
        param = ""
    row = ResultRow(
        experiment, args.method, m_label, problem.n, param,
        report.iterations, report.final_residual, report.wall_time_seconds,
        "", report.termination.value,
    )
    print(_console_row(row))
    if args.history:
        hist = [[k, float(r)] for k, r in enumerate(report.residual_history)]
        _write_csv(
            args.history, ["iteration", "residual"], hist,
            [f"gavesolve {__version__} solve history", f"method={args.method}"],
        )
    return _EXIT_BY_TERMINATION[report.termination]


def cmd_bench(args) -> int:
    methods = [s.strip() for s in args.methods.split(",") if s.strip()] if args.methods else []
    if args.input:
        m_values = [""]
    else:
        if args.m is None:
            raise CliError("--m is required with --example")
        m_values = _parse_int_list(args.m)
    theta_grid = _parse_float_grid(args.theta_grid) if args.theta_grid else None
    tau_grid = _parse_float_grid(args.tau_grid) if args.tau_grid else None
    for method in methods:
        if method not in ALL_METHODS:
            raise CliError(f"unknown method {method!r}; choose from {', '.join(ALL_METHODS)}")
    spec = BenchSpec(
        experiment=EXPERIMENTS.get(args.example, "custom-file"),
        m_values=m_values,
        methods=methods,
        repeats=args.repeats,
        tol=args.tol if args.tol is not None else 0.0,
        max_iter=args.max_iter,
        theta_grid=theta_grid,
        tau_grid=tau_grid,
        seed=args.seed,
        output_path=args.output,
    )

    rows: list[ResultRow] = []
    skipped_params: list[str] = []
    for m in m_values:
        kind, problem, experiment, m_label = _build_problem(
            args, m_override=m if m != "" else None
        )
        config = _solver_config(args, experiment)
        for method in methods:
            param: object = ""
            cpu_opt: object = ""
            try:
                if method == "amgs":
                    if kind != "lcp":
                        raise CliError("method 'amgs' needs a complementarity problem")
                    grid = theta_grid if theta_grid is not None else _parse_float_grid("0:0.01:2")
                    bad = [t for t in grid if t <= 0]
                    if bad:
                        skipped_params.append(
                            f"m={m_label} amgs: skipped theta values needing a positive shift: "
                            + ",".join(f"{t:g}" for t in bad)
                        )
                    theta_opt, _, sweep_secs = sweep_optimal_theta(
                        problem, ModulusConfig(gamma=args.gamma), config, grid
                    )
                    param, cpu_opt = float(theta_opt), float(sweep_secs)
                    mcfg = ModulusConfig(gamma=args.gamma, theta=theta_opt)
                    runner = lambda: solve_amgs(problem, mcfg, config)
                elif method in TAU_METHODS:
                    if kind == "lcp":
                        raise CliError(f"method {method!r} needs an absolute value system")
                    grid = tau_grid if tau_grid is not None else _parse_float_grid("0:0.01:2")
                    bad = [t for t in grid if not 0.0 < t <= 2.0]
                    if bad:
                        skipped_params.append(
                            f"m={m_label} {method}: skipped tau values outside (0, 2]: "
                            + ",".join(f"{t:g}" for t in bad)
                        )
                    tau_opt, _, sweep_secs = sweep_optimal_tau(problem, config, grid, method)
                    param, cpu_opt = float(tau_opt), float(sweep_secs)
                    cfg_opt = dataclasses.replace(config, tau=tau_opt)
                    solver = GAVE_SOLVERS[method]
                    runner = lambda: solver(problem, cfg_opt)
                else:
                    mcfg = ModulusConfig(gamma=args.gamma, theta=args.theta)
                    runner = lambda: _run_single(kind, problem, method, config, mcfg)
                times = []
                report = None
                for _ in range(args.repeats):
                    report = runner()
                    times.append(report.wall_time_seconds)
                rows.append(ResultRow(
                    experiment, method, m_label, problem.n, param,
                    report.iterations, report.final_residual,
                    float(np.mean(times)), cpu_opt, report.termination.value,
                ))
            except CliError:
                raise
            except (ValueError, LinAlgError) as exc:
                print(f"bench: {method} m={m_label}: {exc}", file=sys.stderr)
                rows.append(ResultRow(
                    experiment, method, m_label, problem.n, param,
                    0, 0.0, 0.0, cpu_opt, "error",
                ))

    rows.sort(key=lambda r: (r.method, str(r.m), str(r.parameter)))
    provenance = [
        f"gavesolve {__version__} bench",
        f"experiment={spec.experiment} m={','.join(str(v) for v in m_values)} "
        f"methods={','.join(methods)} tol={args.tol if args.tol is not None else 'auto'} "
        f"max_iter={args.max_iter} repeats={args.repeats} seed={args.seed} "
        f"mu={args.mu:g} gamma={args.gamma:g} "
        f"theta_grid={args.theta_grid or 'default(0:0.01:2)'} "
        f"tau_grid={args.tau_grid or 'default(0:0.01:2)'}",
        f"prng={PRNG_NAME}",
    ]
    provenance.extend(skipped_params)
    _write_csv(args.output, CSV_HEADER, [r.as_csv() for r in rows], provenance)
    return 0


def cmd_check(args) -> int:
    mcfg = ModulusConfig(gamma=args.gamma, theta=args.theta)
    if args.sweep_m:
        if not args.example:
            raise CliError("--sweep-m requires --example")
        series = []
        all_hold = True
        for m in _parse_int_sweep(args.sweep_m):
            kind, problem, experiment, _ = _build_problem(args, m_override=m)
            gave = problem if kind == "gave" else lcp_to_gave(problem, mcfg)
            r31 = check_theorem31(gave)
            series.append([m, float(r31.inf_norm_value)])
            all_hold = all_hold and r31.holds
        provenance = [
            f"gavesolve {__version__} check sweep",
            f"experiment={EXPERIMENTS.get(args.example, 'custom-file')} "
            f"sweep_m={args.sweep_m} seed={args.seed} theta={args.theta:g} gamma={args.gamma:g}",
            f"prng={PRNG_NAME}",
        ]
        _write_csv(args.output, ["m", "inf_norm"], series, provenance)
        return 0 if all_hold else 4
    kind, problem, experiment, _ = _build_problem(args)
    gave = problem if kind == "gave" else lcp_to_gave(problem, mcfg)
    r31 = check_theorem31(gave)
    t32 = check_theorem32(gave)
    print(f"diagonal_ok: {r31.diagonal_ok}")
    print(f"dominance: {r31.dominance_holds}")
    print(f"inf_norm: {r31.inf_norm_value:.6g}")
    print(f"theorem31: {r31.holds}")
    print(f"theorem32: {t32}")
    ok = {"t31": r31.holds, "t32": t32, "either": r31.holds or t32}[args.require]
    return 0 if ok else 4


def cmd_gen(args) -> int:
    if not args.example:
        raise CliError("gen requires --example")
    if args.m is None:
        raise CliError("--m is required with --example")
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    if args.example in ("5.1", "5.2"):
        lcp_prob, z_star = _make_lcp(args.example, args.m, args.mu)
        comments = (
            f"gavesolve {__version__} gen",
            f"experiment={EXPERIMENTS[args.example]} m={args.m} mu={args.mu:g}",
            "deterministic generator (no prng)",
        )
        write_matrix(out / "M.txt", lcp_prob.m_mat, comments=comments)
        write_vector(out / "q.txt", lcp_prob.q, comments=comments)
        write_vector(out / "z_star.txt", z_star, comments=comments)
        print(f"wrote M.txt q.txt z_star.txt to {out}")
    elif args.example == "5.3":
        prob = gen_random_gave(
            RandomGaveSpec(m=args.m, seed=args.seed, make_b_singular=args.singular_b)
        )
        comments = (
            f"gavesolve {__version__} gen",
            f"experiment=example53 m={args.m} seed={args.seed} "
            f"singular_b={args.singular_b}",
            f"prng={PRNG_NAME} (draw order: A row-major, then B row-major)",
        )
        write_matrix(out / "A.txt", prob.a, comments=comments)
        write_matrix(out / "B.txt", prob.b_mat, comments=comments)
        write_vector(out / "b.txt", prob.rhs, comments=comments)
        print(f"wrote A.txt B.txt b.txt to {out}")
    else:
        raise CliError(f"unknown example {args.example!r}; choose from 5.1, 5.2, 5.3")
    return 0


def _add_problem_flags(p, with_m: str = "int"):
    p.add_argument("--example", help="built-in problem family: 5.1, 5.2, or 5.3")
    if with_m == "int":
        p.add_argument("--m", type=int, help="grid side; the problem has n = m^2 unknowns")
    else:
        p.add_argument("--m", help="comma-separated grid sides, e.g. 60,80,100")
    p.add_argument("--mu", type=float, default=4.0, help="diagonal shift of the LCP families")
    p.add_argument("--seed", type=int, default=42, help="random seed for example 5.3")
    p.add_argument(
        "--singular-b", action=argparse.BooleanOptionalAction, default=True,
        help="make B rank-deficient in example 5.3 (duplicate last row)",
    )


def _add_solver_flags(p):
    p.add_argument("--tol", type=float, default=None,
                   help="stopping residual (default 1e-5 for 5.1/5.2, else 1e-8)")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--x0", choices=["zeros", "alt10"], default=None,
                   help="starting vector rule (default alt10 for 5.1/5.2, else zeros)")
    p.add_argument("--y0", choices=["rhs", "zeros"], default="rhs",
                   help="auxiliary start for the two-sequence methods")
    p.add_argument("--theta", type=float, default=1.0,
                   help="modulus shift scale (amgs, ggs-lcp, lcp condition checks)")
    p.add_argument("--gamma", type=float, default=1.0, help="modulus scaling parameter")
    p.add_argument("--tau", type=float, default=1.0, help="relaxation weight (gnms/rms/fpi)")
    p.add_argument("--omega-scale", type=float, default=0.5,
                   help="diagonal shift scale for mn/ssmn/mnms")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="gavesolve",
        description="Solvers and benchmarks for absolute value systems Ax - B|x| = b.",
    )
    parser.add_argument("--version", action="version", version=f"gavesolve {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subparsers = {}

    p_solve = sub.add_parser("solve", help="run one method on one problem")
    _add_problem_flags(p_solve)
    _add_solver_flags(p_solve)
    p_solve.add_argument("--input", help="directory with problem text files")
    p_solve.add_argument("--method", help=f"one of: {', '.join(ALL_METHODS)}")
    p_solve.add_argument("--history", help="write per-iteration residuals to this CSV")
    p_solve.add_argument("--config", help="flat key=value file mirroring the flags")
    p_solve.set_defaults(func=cmd_solve)
    subparsers["solve"] = p_solve

    p_bench = sub.add_parser("bench", help="run method/size sweeps, write CSV")
    _add_problem_flags(p_bench, with_m="list")
    _add_solver_flags(p_bench)
    p_bench.add_argument("--input", help="directory with problem text files")
    p_bench.add_argument("--methods", help="comma-separated method names")
    p_bench.add_argument("--repeats", type=int, default=10,
                         help="timed repetitions per row for CPU averaging")
    p_bench.add_argument("--theta-grid", help="amgs sweep grid, e.g. 0:0.01:2")
    p_bench.add_argument("--tau-grid", help="gnms/rms/fpi sweep grid, e.g. 0:0.01:2")
    p_bench.add_argument("-o", "--output", help="CSV path (default stdout)")
    p_bench.add_argument("--config", help="flat key=value file mirroring the flags")
    p_bench.set_defaults(func=cmd_bench)
    subparsers["bench"] = p_bench

    p_check = sub.add_parser("check", help="evaluate the convergence conditions")
    _add_problem_flags(p_check)
    p_check.add_argument("--input", help="directory with problem text files")
    p_check.add_argument("--theta", type=float, default=1.0,
                         help="modulus shift scale when checking an LCP family")
    p_check.add_argument("--gamma", type=float, default=1.0)
    p_check.add_argument("--sweep-m", help="emit (m, inf_norm) rows, e.g. 60:10:100")
    p_check.add_argument("--require", choices=["t31", "t32", "either"], default="either",
                         help="which condition decides the exit code")
    p_check.add_argument("-o", "--output", help="CSV path for --sweep-m (default stdout)")
    p_check.add_argument("--config", help="flat key=value file mirroring the flags")
    p_check.set_defaults(func=cmd_check)
    subparsers["check"] = p_check

    p_gen = sub.add_parser("gen", help="write generated problems to text files")
    _add_problem_flags(p_gen)
    p_gen.add_argument("-o", "--output", required=True, help="output directory")
    p_gen.add_argument("--config", help="flat key=value file mirroring the flags")
    p_gen.set_defaults(func=cmd_gen)
    subparsers["gen"] = p_gen

    return parser, subparsers


def _load_config_file(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, _, val = line.partition("=")
            else:
                key, _, val = line.partition(" ")
            key = key.strip().replace("-", "_")
            if not key or not val.strip():
                raise CliError(f"{path}: bad config line {raw.strip()!r}")
            values[key] = val.strip()
    return values


def _apply_file_defaults(subparser, values: dict[str, str]) -> None:
    converted = {}
    for action in subparser._actions:
        if action.dest in values:
            raw = values[action.dest]
            if isinstance(action, argparse.BooleanOptionalAction) or isinstance(
                action, (argparse._StoreTrueAction, argparse._StoreFalseAction)
            ):
                converted[action.dest] = raw.lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                converted[action.dest] = action.type(raw)
            else:
                converted[action.dest] = raw
    unknown = set(values) - set(converted)
    if unknown:
        raise CliError(f"config file sets unknown keys: {', '.join(sorted(unknown))}")
    subparser.set_defaults(**converted)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subparsers = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if getattr(args, "config", None):
        try:
            values = _load_config_file(args.config)
            _apply_file_defaults(subparsers[args.command], values)
        except (OSError, CliError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(f"run 'gavesolve {args.command} --help' for usage", file=sys.stderr)
        return 1
    except (ValueError, LinAlgError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
