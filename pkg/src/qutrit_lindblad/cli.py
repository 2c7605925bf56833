"""Command-line front end.

Exit codes: 0 ok, 1 validation failure, 2 parse/usage error, 3 physics
invariant breach, 4 I/O failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import experiments
from .evolution import (
    IntegratorSettings,
    PhysicsError,
    asymptotic_state_max_interference,
    detect_steady_state,
    evolve_rk4,
)
from .lindblad import SystemIIParams, SystemIParams, generator_system_II
from .specs import (
    ModelSpec,
    SpecError,
    parse_elements,
    parse_model,
    parse_state,
    trajectory_csv,
    trajectory_json,
)
from .states import negativity, negativity_isotropic_closed_form, negativity_pure_closed_form
from .validation import SUITES, run_suites

EXIT_OK, EXIT_VALIDATION, EXIT_PARSE, EXIT_PHYSICS, EXIT_IO = 0, 1, 2, 3, 4
COMMANDS = ("evolve", "negativity", "asymptote", "figure", "validate", "sweep")


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


@dataclass
class RunConfig:
    command: str = "evolve"
    model: str | None = None
    atoms: int = 2
    state: str | None = None
    integrator: IntegratorSettings = field(default_factory=IntegratorSettings)
    output: str | None = None
    format: str = "csv"
    seed: int = 0

    @classmethod
    def from_json(cls, data: dict) -> "RunConfig":
        data = dict(data)
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise SpecError(f"unknown config keys: {', '.join(sorted(unknown))}")
        integ = data.pop("integrator", None) or {}
        try:
            settings = IntegratorSettings(**integ)
        except TypeError as exc:
            raise SpecError(f"bad integrator settings: {exc}") from None
        cfg = cls(integrator=settings, **data)
        if cfg.command not in COMMANDS:
            raise SpecError(f"unknown command {cfg.command!r}")
        if cfg.format not in ("csv", "json"):
            raise SpecError(f"format must be csv or json, got {cfg.format!r}")
        return cfg


def normalize_rates(model: ModelSpec) -> tuple[ModelSpec, float]:
    """Rescale decay rates so the largest equals 1; returns the scale used."""
    scale = model.max_rate
    if scale in (0.0, 1.0):
        return model, 1.0
    p = model.params
    if isinstance(p, SystemIParams):
        params = SystemIParams(p.gamma1 / scale, p.gamma2 / scale, p.betaI)
    else:
        params = SystemIIParams(p.gammaE / scale, p.gammaU / scale)
    omegas = None if model.omegas is None else tuple(w / scale for w in model.omegas)
    return replace(model, params=params, omegas=omegas), scale


def _write(path: str | Path, text: str) -> None:
    try:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise CLIError(f"cannot write {path}: {exc}", EXIT_IO) from exc


def _dump_trajectory(traj, fmt: str, elements=()) -> str:
    if fmt == "json":
        return json.dumps(trajectory_json(traj, elements), indent=1) + "\n"
    return trajectory_csv(traj, elements)


def _steady_verdict(traj, max_rate: float = 1.0) -> str:
    window = experiments.STEADY_WINDOW / max_rate
    if traj.times[-1] < window:
        return "steady state: not assessed (horizon shorter than window)"
    found = detect_steady_state(traj, window, experiments.STEADY_TOL)
    if found is None:
        return f"steady state: not reached by t={traj.times[-1]:g}"
    t, rho = found
    return f"steady state: reached at t={t:g}, N={negativity(rho, check=False):.10g}"


def cmd_evolve(cfg: RunConfig, elements=()) -> int:
    if not cfg.model or not cfg.state:
        raise CLIError("evolve needs --model and --state", EXIT_PARSE)
    model, scale = normalize_rates(parse_model(cfg.model, cfg.atoms))
    if scale != 1.0:
        print(f"rates normalized by {scale:g}; time is in units of 1/{scale:g}")
    rho0 = parse_state(cfg.state).density_matrix()
    traj = evolve_rk4(model.generator(), rho0, cfg.integrator)
    out = cfg.output or f"trajectory.{cfg.format}"
    _write(out, _dump_trajectory(traj, cfg.format, elements))
    print(f"wrote {len(traj)} samples to {out}")
    print(f"final negativity: {traj.negativities[-1]:.10g}")
    print(_steady_verdict(traj))
    return EXIT_OK


def _closed_form_negativity(spec) -> float | None:
    if spec.kind == "pure":
        return negativity_pure_closed_form(spec.params)
    if spec.kind == "psimax":
        return 1.0
    if spec.kind == "isotropic":
        return negativity_isotropic_closed_form(spec.params)
    return None


def cmd_negativity(cfg: RunConfig) -> int:
    if not cfg.state:
        raise CLIError("negativity needs --state", EXIT_PARSE)
    spec = parse_state(cfg.state)
    rho = spec.density_matrix()
    if rho.shape != (9, 9):
        raise CLIError("negativity needs a two-atom (9x9) state", EXIT_PARSE)
    report = {"state": cfg.state, "negativity": negativity(rho), "closed_form": _closed_form_negativity(spec)}
    _emit_report(cfg, report)
    return EXIT_OK


def _emit_report(cfg: RunConfig, report: dict) -> None:
    if cfg.format == "json" or cfg.output:
        text = json.dumps(report, indent=1, sort_keys=True) + "\n"
        if cfg.output:
            _write(cfg.output, text)
        if cfg.format == "json":
            sys.stdout.write(text)
            return
    for key, val in report.items():
        if isinstance(val, float):
            val = f"{val:.12g}"
        print(f"{key}: {val}")


def _is_product(rho) -> bool:
    r = rho.reshape(3, 3, 3, 3)
    rho_a = np.einsum("ijkj->ik", r)
    rho_b = np.einsum("ijil->jl", r)
    return np.max(np.abs(np.kron(rho_a, rho_b) - rho)) <= 1e-12


def cmd_asymptote(cfg: RunConfig, check_numeric: bool = False, t_end: float | None = None) -> int:
    if not cfg.state:
        raise CLIError("asymptote needs --state", EXIT_PARSE)
    rho0 = parse_state(cfg.state).density_matrix()
    if rho0.shape != (9, 9):
        raise CLIError("asymptote needs a two-atom (9x9) state", EXIT_PARSE)
    rho_as = asymptotic_state_max_interference(rho0)
    n_as = negativity(rho_as)
    if n_as > 0:
        verdict = "entangled"
    elif _is_product(rho_as):
        verdict = "separable"
    else:
        verdict = "PPT (negativity 0)"
    nonzero = {
        f"{i + 1},{j + 1}": [float(rho_as[i, j].real), float(rho_as[i, j].imag)]
        for i in range(9)
        for j in range(i, 9)
        if abs(rho_as[i, j]) > 1e-15
    }
    report = {"state": cfg.state, "negativity": n_as, "verdict": verdict, "elements": nonzero}
    if check_numeric:
        horizon = t_end or experiments.ASYMPTOTE_T_END
        settings = replace(cfg.integrator, t_end=horizon)
        gen = generator_system_II(SystemIIParams(1.0, 0.0), 2)
        traj = evolve_rk4(gen, rho0, settings)
        report["numeric_t_end"] = float(traj.times[-1])
        report["numeric_negativity"] = float(traj.negativities[-1])
        report["max_elementwise_deviation"] = float(np.max(np.abs(traj.final_state - rho_as)))
    if cfg.format != "json" and not cfg.output:
        print(f"state: {cfg.state}")
        print(f"asymptotic negativity: {n_as:.12g}")
        print(f"verdict: {verdict}")
        for key, (re, im) in nonzero.items():
            print(f"  rho_as[{key}] = {re:.12g}{im:+.3g}j")
        for key in ("numeric_t_end", "numeric_negativity", "max_elementwise_deviation"):
            if key in report:
                print(f"{key}: {report[key]:.6g}")
    else:
        _emit_report(cfg, report)
    return EXIT_OK


def _run_curves(curves, out_dir: Path, settings: IntegratorSettings, manifest_extra: dict) -> dict:
    jobs = {c.key: c for c in curves}
    trajs = experiments.run_all(jobs, lambda c: c.run(settings.dt, settings.sample_every))
    entries = []
    for c in curves:
        name = f"{manifest_extra.get('prefix', 'curve')}_{c.key}.csv"
        _write(out_dir / name, trajectory_csv(trajs[c.key]))
        entries.append({"key": c.key, "file": name, "model": c.model, "state": c.state, "t_end": c.t_end, "params": c.params})
    manifest = {k: v for k, v in manifest_extra.items() if k != "prefix"}
    manifest.update({"dt": settings.dt, "sample_every": settings.sample_every, "curves": entries})
    _write(out_dir / "manifest.json", json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return trajs


def cmd_figure(n: int, output_dir: str, settings: IntegratorSettings | None = None) -> int:
    settings = settings or IntegratorSettings()
    try:
        curves = experiments.figure_curves(n)
    except ValueError as exc:
        raise CLIError(str(exc), EXIT_PARSE) from exc
    trajs = _run_curves(curves, Path(output_dir), settings, {"figure": n, "prefix": f"fig{n}"})
    for c in curves:
        tr = trajs[c.key]
        print(f"fig{n} {c.key}: N(0)={tr.negativities[0]:.6g} N({tr.times[-1]:g})={tr.negativities[-1]:.6g}")
    print(f"manifest: {Path(output_dir) / 'manifest.json'}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, values: list[float], output_dir: str) -> int:
    if not cfg.model or "{}" not in cfg.model or not cfg.state:
        raise CLIError("sweep needs --state and a --model containing a {} placeholder", EXIT_PARSE)
    curves = []
    for v in values:
        model_text = cfg.model.replace("{}", repr(float(v)))
        model = parse_model(model_text, cfg.atoms)
        if model.atoms != 2:
            raise CLIError("sweep runs two-atom models only", EXIT_PARSE)
        atoms_suffix = "" if "atoms=" in model_text else ",atoms=2"
        curves.append(experiments.Curve(f"value_{v:g}", model_text + atoms_suffix, cfg.state, cfg.integrator.t_end, {"value": v}))
    parse_state(cfg.state).density_matrix()
    trajs = _run_curves(curves, Path(output_dir), cfg.integrator, {"model_template": cfg.model, "prefix": "sweep"})
    for c in curves:
        print(f"{c.key}: final N={trajs[c.key].negativities[-1]:.10g}")
    return EXIT_OK


def cmd_validate(seed: int, suites=None) -> int:
    try:
        checks = run_suites(seed, suites)
    except ValueError as exc:
        raise CLIError(str(exc), EXIT_PARSE) from exc
    failed = [c for c in checks if not c.passed]
    for c in checks:
        print(f"[{'PASS' if c.passed else 'FAIL'}] {c.suite}: {c.name} (worst {c.worst:.3e})")
    print(f"{len(checks) - len(failed)}/{len(checks)} checks passed")
    if failed:
        first = failed[0]
        print(json.dumps({"suite": first.suite, "check": first.name, "worst": first.worst,
                          "counterexample": first.counterexample}, default=float, sort_keys=True))
        return EXIT_VALIDATION
    return EXIT_OK


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qutrit-lindblad", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model=True, state=True, integ=True):
        p.add_argument("--config", help="JSON file mirroring RunConfig; flags override it")
        if model:
            p.add_argument("--model", help="sysI:g1=..,g2=..,beta=.. or sysII:ge=..,gu=..")
            p.add_argument("--atoms", type=int, choices=(1, 2))
        if state:
            p.add_argument("--state", help="pure:theta=..,phi=.. | psimax | isotropic:p=.. | file:<path>")
        if integ:
            p.add_argument("--dt", type=float)
            p.add_argument("--t-end", type=float)
            p.add_argument("--sample-every", type=int)
            p.add_argument("--adapt", action="store_true", default=None)
            p.add_argument("--adapt-tol", type=float)
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--seed", type=int)

    p = sub.add_parser("evolve", help="integrate a model and export the trajectory")
    common(p)
    p.add_argument("--elements", help="matrix elements to export, e.g. '1,5;5,9'")

    p = sub.add_parser("negativity", help="negativity of a state")
    common(p, model=False, integ=False)

    p = sub.add_parser("asymptote", help="maximal-interference asymptotic state")
    common(p, model=False)
    p.add_argument("--check-numeric", action="store_true")

    p = sub.add_parser("figure", help="negativity curves for figures 3-8")
    p.add_argument("n", type=int, choices=range(3, 9))
    p.add_argument("--out-dir", default=".")
    p.add_argument("--dt", type=float)
    p.add_argument("--sample-every", type=int)

    p = sub.add_parser("validate", help="run the built-in invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--suite", action="append", choices=SUITES)

    p = sub.add_parser("sweep", help="evolve one state over a parameter grid")
    common(p)
    p.add_argument("--values", type=_float_list, required=True)
    p.add_argument("--out-dir", default=".")
    return parser


def _config_from_args(args) -> RunConfig:
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise CLIError(f"cannot read config {args.config}: {exc}", EXIT_IO) from exc
        except json.JSONDecodeError as exc:
            raise CLIError(f"config {args.config} is not valid JSON: {exc}", EXIT_PARSE) from exc
        cfg = RunConfig.from_json(data)
    else:
        cfg = RunConfig()
    cfg.command = args.command
    for name in ("model", "atoms", "state", "format", "seed"):
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    if getattr(args, "out", None) is not None:
        cfg.output = args.out
    overrides = {
        key: getattr(args, attr)
        for key, attr in (("dt", "dt"), ("t_end", "t_end"), ("sample_every", "sample_every"),
                          ("adapt", "adapt"), ("adapt_tol", "adapt_tol"))
        if getattr(args, attr, None) is not None
    }
    if overrides:
        cfg.integrator = replace(cfg.integrator, **overrides)
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(args.seed, args.suite)
        if args.command == "figure":
            settings = IntegratorSettings()
            kw = {k: v for k, v in (("dt", args.dt), ("sample_every", args.sample_every)) if v is not None}
            return cmd_figure(args.n, args.out_dir, replace(settings, **kw))
        cfg = _config_from_args(args)
        if args.command == "evolve":
            return cmd_evolve(cfg, parse_elements(args.elements))
        if args.command == "negativity":
            return cmd_negativity(cfg)
        if args.command == "asymptote":
            return cmd_asymptote(cfg, args.check_numeric, args.t_end)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.values, args.out_dir)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except PhysicsError as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS
    except (SpecError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    parser.error(f"unknown command {args.command}")


if __name__ == "__main__":
    sys.exit(main())
