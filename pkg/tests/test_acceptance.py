"""Exit criteria. Each test records one PASS/FAIL line, shown in the pytest
terminal summary (or printed directly when run as a script)."""
import time
from functools import lru_cache

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, random_density
from qutrit_lindblad.evolution import (
    IntegratorSettings,
    analytic_II_general,
    analytic_II_isotropic,
    asymptotic_isotropic,
    asymptotic_negativity_pure,
    asymptotic_state_max_interference,
    detect_steady_state,
    evolve_rk4,
    negativity_psimax_closed_form,
)
from qutrit_lindblad.lindblad import (
    SystemIIParams,
    SystemIParams,
    generator_system_I,
    generator_system_II,
    null_space_dimension,
)
from qutrit_lindblad.states import (
    IsotropicParams,
    PureStateParams,
    ground_state,
    isotropic_state,
    negativity,
    negativity_isotropic_closed_form,
    negativity_pure_closed_form,
    projector,
    psi_max,
    pure_state,
)

pytestmark = pytest.mark.acceptance

DT = 1e-3
GAMMA_US = (0.0, 0.1, 0.25, 0.5, 1.0)
BETAS = (0.0, 0.3, 0.6, 0.9, 0.99)
KAPPAS = (0.25, 0.5, 0.75, 1.0)
PSIMAX = projector(psi_max())
PURE_FIG = projector(pure_state(PureStateParams(np.pi / 8, np.pi / 6)))
W34 = isotropic_state(IsotropicParams(0.75))
INITIAL = {"psimax": PSIMAX, "pure_pi8_pi6": PURE_FIG, "W_0.75": W34}
RANDOM_STATES = 20
RANDOM_SEED = 7


def record(criterion: str, passed: bool, detail: str) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


# trajectory builders, cached so criterion 8 can inspect every sample


@lru_cache(maxsize=None)
def traj_system_II(gu: float, state: str, t_end: float = 10.0):
    return evolve_rk4(generator_system_II(SystemIIParams(1.0, gu), 2), INITIAL[state],
                      IntegratorSettings(dt=DT, t_end=t_end, sample_every=100))


@lru_cache(maxsize=None)
def random_initial_states():
    rng = np.random.default_rng(RANDOM_SEED)
    return tuple(random_density(rng, 9, rank=int(rng.integers(1, 10))) for _ in range(RANDOM_STATES))


@lru_cache(maxsize=None)
def traj_random(gu: float, k: int):
    return evolve_rk4(generator_system_II(SystemIIParams(1.0, gu), 2), random_initial_states()[k],
                      IntegratorSettings(dt=DT, t_end=50.0, sample_every=500))


@lru_cache(maxsize=None)
def traj_system_I(beta: float, g2: float, state: str, t_end: float):
    return evolve_rk4(generator_system_I(SystemIParams(1.0, g2, beta), 2), INITIAL[state],
                      IntegratorSettings(dt=DT, t_end=t_end, sample_every=100))


def all_trajectories():
    out = []
    for gu in GAMMA_US:
        for state in INITIAL:
            out.append(traj_system_II(gu, state))
    out.append(traj_system_II(0.0, "psimax", 30.0))
    for gu in (0.0, 0.5, 1.0):
        out += [traj_random(gu, k) for k in range(RANDOM_STATES)]
    for beta in BETAS:
        for state in ("pure_pi8_pi6", "W_0.75"):
            out.append(traj_system_I(beta, 0.9, state, 20.0))
    for kappa in KAPPAS:
        out.append(traj_system_I(1.0, kappa, "psimax", 50.0))
    return out


def test_criterion_1_negativity_functional():
    start = time.perf_counter()
    errs = [abs(negativity(PSIMAX) - 1.0)]
    for p in np.round(np.linspace(0, 1, 11), 12):
        ip = IsotropicParams(p)
        closed = negativity_isotropic_closed_form(ip)
        assert closed == pytest.approx(max(0.0, (4 * p - 1) / 3), abs=1e-15)
        errs.append(abs(negativity(isotropic_state(ip)) - closed))
    elapsed = time.perf_counter() - start
    worst = max(errs)
    ok = worst <= 1e-10 and elapsed < 1.0
    record("1", ok, f"max |N_eig - N_closed| = {worst:.2e} (tol 1e-10), runtime {elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_2_exact_solution_oracle():
    start = time.perf_counter()
    worst = 0.0
    for gu in GAMMA_US:
        params = SystemIIParams(1.0, gu)
        for name, rho0 in INITIAL.items():
            traj = traj_system_II(gu, name)
            assert traj.times[-1] == pytest.approx(10.0)
            for t, rho in zip(traj.times, traj.states):
                exact = analytic_II_isotropic(0.75, params, t) if name == "W_0.75" else analytic_II_general(rho0, params, t)
                worst = max(worst, float(np.max(np.abs(rho - exact))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 30.0
    record("2", ok, f"max elementwise |RK4 - exact| = {worst:.2e} (tol 1e-6) over 15 runs, runtime {elapsed:.2f}s (< 30s)")
    assert ok


def test_criterion_3_psimax_negativity_curve():
    worst = 0.0
    for gu in GAMMA_US:
        params = SystemIIParams(1.0, gu)
        traj = traj_system_II(gu, "psimax")
        expected = np.array([negativity_psimax_closed_form(params, t) for t in traj.times])
        worst = max(worst, float(np.max(np.abs(traj.negativities - expected))))
    long = traj_system_II(0.0, "psimax", 30.0)
    tail = long.negativities[long.times >= 20.0 - 1e-9]
    plateau_dev = float(np.max(np.abs(tail - 1 / 3)))
    ok = worst <= 1e-6 and plateau_dev <= 1e-4
    record("3", ok, f"max |N_RK4 - closed form| = {worst:.2e} (tol 1e-6); gu=0 plateau |N - 1/3| for t>=20: {plateau_dev:.2e} (tol 1e-4)")
    assert ok


def test_criterion_4_asymptotic_map():
    # plateau = state at t=50; the detector (tol = criterion tolerance) confirms it has settled
    start = time.perf_counter()
    worst_map, worst_gnd, missing = 0.0, 0.0, 0
    states = random_initial_states()
    for k, rho0 in enumerate(states):
        runs = [(traj_random(0.0, k), asymptotic_state_max_interference(rho0))]
        runs += [(traj_random(gu, k), ground_state()) for gu in (0.5, 1.0)]
        for i, (traj, target) in enumerate(runs):
            if detect_steady_state(traj, window=5.0, tol=1e-4) is None:
                missing += 1
            dev = float(np.max(np.abs(traj.final_state - target)))
            if i == 0:
                worst_map = max(worst_map, dev)
            else:
                worst_gnd = max(worst_gnd, dev)
    elapsed = time.perf_counter() - start
    ok = missing == 0 and worst_map <= 1e-4 and worst_gnd <= 1e-4 and elapsed < 60.0
    record("4", ok, f"{len(states)} random states to t=50: gu=0 plateau vs map {worst_map:.2e}, gu in {{0.5,1}} plateau "
                    f"vs |gg><gg| {worst_gnd:.2e} (tol 1e-4), unsettled runs {missing}, runtime {elapsed:.2f}s (< 60s)")
    assert ok


def test_criterion_5_asymptotic_negativities():
    grid = np.linspace(0, np.pi / 2, 50)
    worst_pure, worst_dom = 0.0, 0.0
    for theta in grid:
        for phi in grid:
            p = PureStateParams(theta, phi)
            closed = asymptotic_negativity_pure(p)
            assert closed == pytest.approx(np.sin(phi) * np.cos(phi) * np.sin(theta), abs=1e-15)
            rho_as = asymptotic_state_max_interference(projector(pure_state(p)))
            worst_pure = max(worst_pure, abs(negativity(rho_as) - closed))
            worst_dom = max(worst_dom, closed - negativity_pure_closed_form(p))
    worst_iso = 0.0
    for p in np.round(np.linspace(0, 1, 21), 12):
        W_as, closed = asymptotic_isotropic(p)
        assert closed == pytest.approx(max(0.0, (5 * p - 2) / 9), abs=1e-15)
        mapped = asymptotic_state_max_interference(isotropic_state(IsotropicParams(p)))
        worst_iso = max(worst_iso, abs(negativity(mapped) - closed), abs(negativity(W_as) - closed))
    at_threshold = negativity(asymptotic_state_max_interference(isotropic_state(IsotropicParams(0.4))))
    above = negativity(asymptotic_state_max_interference(isotropic_state(IsotropicParams(0.4 + 1e-6))))
    ok = worst_pure <= 1e-10 and worst_dom <= 0.0 and worst_iso <= 1e-10 and at_threshold == 0.0 and above > 0
    record("5", ok, f"pure grid |N - sin(phi)cos(phi)sin(theta)| = {worst_pure:.2e}, dominance violation "
                    f"{max(worst_dom, 0.0):.2e}, isotropic |N - max(0,(5p-2)/9)| = {worst_iso:.2e}, "
                    f"N(p=2/5) = {at_threshold:g}, N(p=2/5+1e-6) = {above:.2e}")
    assert ok


def test_criterion_6_system_I_interference_ordering():
    start = time.perf_counter()
    worst = 0.0
    for state in ("pure_pi8_pi6", "W_0.75"):
        curves = np.array([traj_system_I(b, 0.9, state, 20.0).negativities for b in BETAS])
        # N(t) must not drop as beta grows, at every sampled t
        worst = max(worst, float(np.max(curves[:-1] - curves[1:])))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 60.0
    record("6a", ok, f"max decrease of N(t) with increasing beta = {max(worst, 0.0):.2e} (slack 1e-6), runtime {elapsed:.2f}s")
    assert ok


def test_criterion_6_system_I_convergence_at_beta_0_9():
    # currently fails: the slow damping mode (rate ~0.095) leaves ~15% excited population at t=20
    target = ground_state()
    results = []
    for state in ("pure_pi8_pi6", "W_0.75"):
        traj = traj_system_I(0.9, 0.9, state, 20.0)
        rho = traj.state_at(20.0)
        results.append((state, negativity(rho), float(np.max(np.abs(rho - target)))))
    ok = all(n <= 1e-3 and d <= 1e-3 for _, n, d in results)
    detail = "; ".join(f"{s}: N(20)={n:.3e}, dist to |33><33|={d:.3e}" for s, n, d in results)
    record("6b", ok, f"beta=0.9 at t=20/g1 (tol 1e-3 each): {detail}")
    assert ok


def test_criterion_7_system_I_maximal_interference():
    rows = []
    for kappa in KAPPAS:
        traj = traj_system_I(1.0, kappa, "psimax", 50.0)
        n30, n50 = negativity(traj.state_at(30.0)), negativity(traj.state_at(50.0))
        rows.append((kappa, n30, n50))
    ok = all(abs(a - b) <= 1e-4 and b > 0.05 for _, a, b in rows)
    detail = ", ".join(f"kappa={k}: N30={a:.6f} N50={b:.6f}" for k, a, b in rows)
    record("7", ok, f"|N(30)-N(50)| <= 1e-4 and plateau > 0.05: {detail}")
    assert ok


def test_criterion_8_physicality():
    trajs = all_trajectories()
    trace = max(float(np.max(t.trace_defects)) for t in trajs)
    herm = max(float(np.max(t.hermiticity_defects)) for t in trajs)
    herm_out = max(float(np.max(np.abs(t.states - np.conj(np.swapaxes(t.states, 1, 2))))) for t in trajs)
    min_eig = min(float(np.min(t.min_eigenvalues)) for t in trajs)
    samples = sum(len(t) for t in trajs)
    ok = trace <= 1e-9 and max(herm, herm_out) <= 1e-9 and min_eig >= -1e-9
    record("8", ok, f"{len(trajs)} trajectories / {samples} samples: max trace defect {trace:.2e}, "
                    f"max hermiticity defect {max(herm, herm_out):.2e}, min eigenvalue {min_eig:.2e} (tol 1e-9)")
    assert ok


def test_criterion_9_null_space_ergodicity():
    start = time.perf_counter()
    dims = {gu: null_space_dimension(generator_system_II(SystemIIParams(1.0, gu), 2), tol=1e-8) for gu in GAMMA_US}
    elapsed = time.perf_counter() - start
    ok = dims[0.0] > 1 and all(d == 1 for gu, d in dims.items() if gu > 0) and elapsed < 10.0
    record("9", ok, f"null-space dimension by gu: {dims} (rank tol 1e-8), runtime {elapsed:.2f}s (< 10s)")
    assert ok


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
