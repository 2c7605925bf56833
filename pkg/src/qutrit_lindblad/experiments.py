"""Parameter grids for the negativity-decay figures and a deterministic sweep runner."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .evolution import IntegratorSettings, Trajectory, evolve_rk4
from .specs import parse_model, parse_state

ALPHAS = (0.0, 0.1, 0.25, 0.5, 1.0)
BETAS = (0.0, 0.3, 0.6, 0.9, 1.0)
KAPPAS = (0.25, 0.5, 0.75, 1.0)
DECAY_T_END = 10.0
ASYMPTOTE_T_END = 50.0
STEADY_WINDOW = 5.0
STEADY_TOL = 1e-6
THREADS_ENV = "QUTRIT_LINDBLAD_THREADS"

PURE_FIG_STATE = f"pure:theta={np.pi / 8!r},phi={np.pi / 6!r}"
ISOTROPIC_FIG_STATE = "isotropic:p=0.75"


@dataclass(frozen=True)
class Curve:
    key: str
    model: str
    state: str
    t_end: float
    params: dict

    def run(self, dt: float = 1e-3, sample_every: int = 100) -> Trajectory:
        model = parse_model(self.model)
        rho0 = parse_state(self.state).density_matrix()
        settings = IntegratorSettings(dt=dt, t_end=self.t_end, sample_every=sample_every)
        return evolve_rk4(model.generator(), rho0, settings)


def _fmt(x: float) -> str:
    return repr(float(x))


def figure_curves(n: int) -> list[Curve]:
    """Curves for figure ``n`` (3-8). Rates are normalized so the largest is 1."""
    if n in (3, 4, 5):
        state = {3: "psimax", 4: PURE_FIG_STATE, 5: ISOTROPIC_FIG_STATE}[n]
        return [
            Curve(f"alpha_{a:g}", f"sysII:ge=1,gu={_fmt(a)}", state, DECAY_T_END, {"alpha": a, "ge": 1.0, "gu": a})
            for a in ALPHAS
        ]
    if n in (6, 7):
        state = PURE_FIG_STATE if n == 6 else ISOTROPIC_FIG_STATE
        return [
            Curve(f"beta_{b:g}", f"sysI:g1=1,g2=0.9,beta={_fmt(b)}", state, DECAY_T_END, {"g1": 1.0, "g2": 0.9, "beta": b})
            for b in BETAS
        ]
    if n == 8:
        return [
            Curve(f"kappa_{k:g}", f"sysI:g1=1,g2={_fmt(k)},beta=1", "psimax", ASYMPTOTE_T_END, {"g1": 1.0, "g2": k, "beta": 1.0})
            for k in KAPPAS
        ]
    raise ValueError(f"no figure {n}; expected 3-8")


def thread_count(default: int | None = None) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return default or min(4, os.cpu_count() or 1)


def run_all(jobs: dict, fn, threads: int | None = None) -> dict:
    """Run ``fn(job)`` for each job concurrently; results keep the key order of ``jobs``."""
    threads = thread_count(threads)
    keys = list(jobs)
    if threads == 1 or len(keys) <= 1:
        return {k: fn(jobs[k]) for k in keys}
    with ThreadPoolExecutor(max_workers=threads) as pool:
        futures = {k: pool.submit(fn, jobs[k]) for k in keys}
        return {k: futures[k].result() for k in keys}
