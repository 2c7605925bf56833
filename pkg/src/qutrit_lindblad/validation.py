"""Self-check suites run by ``qutrit-lindblad validate``.

Every check compares an implementation against an independent route
(closed form, brute-force eigensolve, explicit operator algebra).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import evolution as ev
from . import linalg, lindblad, states

SUITES = ("linalg", "negativity", "lindblad", "evolution", "asymptote")


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    worst: float = 0.0
    counterexample: dict = field(default_factory=dict)


def random_hermitian(rng, n=9):
    X = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return X + X.conj().T


def random_density(rng, n=9, rank=None):
    rank = rank or n
    X = rng.normal(size=(n, rank)) + 1j * rng.normal(size=(n, rank))
    rho = X @ X.conj().T
    return rho / np.trace(rho).real


def random_unitary(rng, n=3):
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def _max_check(suite, name, values, tol, example=None) -> Check:
    worst = float(np.max(values)) if len(values) else 0.0
    return Check(suite, name, worst <= tol, worst, {} if worst <= tol else (example or {}))


def suite_linalg(rng) -> list[Check]:
    out = []
    mats = [rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9)) for _ in range(20)]
    out.append(_max_check("linalg", "partial transpose is an involution",
                          [np.max(np.abs(linalg.partial_transpose_A(linalg.partial_transpose_A(M)) - M)) for M in mats], 0.0))
    out.append(_max_check("linalg", "partial transpose preserves trace",
                          [abs(np.trace(linalg.partial_transpose_A(M)) - np.trace(M)) for M in mats], 1e-12))
    herms = [random_hermitian(rng) for _ in range(20)]
    out.append(_max_check("linalg", "partial transpose preserves hermiticity",
                          [linalg.hermiticity_defect(linalg.partial_transpose_A(H)) for H in herms], 0.0))
    sums, resid = [], []
    for H in herms:
        w, V = linalg.jacobi_eigh(H)
        sums.append(abs(np.sum(w) - np.trace(H).real))
        resid.append(np.max(np.abs(H @ V - V * w)) / np.max(np.abs(H)))
    out.append(_max_check("linalg", "jacobi eigenvalue sum equals trace", sums, 1e-12))
    out.append(_max_check("linalg", "jacobi eigenpair residual", resid, 1e-10))
    kr = []
    for _ in range(20):
        A, B, C, D = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3)) for _ in range(4))
        kr.append(np.max(np.abs(linalg.kron(A, B) @ linalg.kron(C, D) - linalg.kron(A @ C, B @ D))))
    out.append(_max_check("linalg", "kron mixed-product rule", kr, 1e-12))
    return out


def suite_negativity(rng) -> list[Check]:
    out = []
    out.append(_max_check("negativity", "N(psi_max) = 1",
                          [abs(states.negativity(states.projector(states.psi_max())) - 1)], 1e-10))
    errs, worst_ex = [], {}
    for th, ph in rng.uniform(0, np.pi / 2, size=(200, 2)):
        p = states.PureStateParams(th, ph)
        e = abs(states.negativity(states.projector(states.pure_state(p))) - states.negativity_pure_closed_form(p))
        if e > 1e-10 and not worst_ex:
            worst_ex = {"theta": th, "phi": ph, "error": e}
        errs.append(e)
    out.append(_max_check("negativity", "pure-state closed form", errs, 1e-10, worst_ex))
    errs = []
    for p in np.linspace(0, 1, 11):
        ip = states.IsotropicParams(p)
        errs.append(abs(states.negativity(states.isotropic_state(ip)) - states.negativity_isotropic_closed_form(ip)))
    out.append(_max_check("negativity", "isotropic closed form", errs, 1e-10))
    errs = []
    for _ in range(20):
        rho = random_density(rng)
        U = np.kron(random_unitary(rng), random_unitary(rng))
        errs.append(abs(states.negativity(U @ rho @ U.conj().T) - states.negativity(rho)))
    out.append(_max_check("negativity", "local-unitary invariance", errs, 1e-10))
    prods = [states.negativity(np.kron(random_density(rng, 3), random_density(rng, 3))) for _ in range(20)]
    out.append(_max_check("negativity", "product states are unentangled", prods, 0.0))
    return out


def _sample_generators():
    return [
        lindblad.generator_system_I(lindblad.SystemIParams(1.0, 0.9, 0.6), 2),
        lindblad.generator_system_I(lindblad.SystemIParams(1.0, 0.5, 1.0), 2),
        lindblad.generator_system_II(lindblad.SystemIIParams(1.0, 0.25), 2),
        lindblad.generator_system_II(lindblad.SystemIIParams(1.0, 0.0), 2),
    ]


def suite_lindblad(rng) -> list[Check]:
    out = []
    gens = _sample_generators()
    tr = []
    for gen in gens:
        for i in range(9):
            for j in range(9):
                E = np.zeros((9, 9), dtype=complex)
                E[i, j] = 1
                tr.append(abs(np.trace(gen.apply(E))))
    out.append(_max_check("lindblad", "trace annihilation on matrix units", tr, 1e-13))
    herm, sup, ind = [], [], []
    for gen in gens:
        single = (lindblad.generator_system_I if gen.system == "I" else lindblad.generator_system_II)(gen.params, 1)
        for _ in range(5):
            H = random_hermitian(rng)
            herm.append(np.max(np.abs(gen.apply(H).conj().T - gen.apply(H.conj().T))))
            X = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
            sup.append(np.max(np.abs(gen.superoperator @ lindblad.vec(X) - lindblad.vec(gen.apply(X)))))
            ra, rb = random_density(rng, 3), random_density(rng, 3)
            lhs = gen.apply(np.kron(ra, rb))
            rhs = np.kron(single.apply(ra), rb) + np.kron(ra, single.apply(rb))
            ind.append(np.max(np.abs(lhs - rhs)))
    out.append(_max_check("lindblad", "hermiticity preservation", herm, 0.0))
    out.append(_max_check("lindblad", "superoperator matches apply", sup, 1e-12))
    out.append(_max_check("lindblad", "independent atoms", ind, 1e-12))
    d_erg = lindblad.null_space_dimension(gens[2])
    d_non = lindblad.null_space_dimension(gens[3])
    out.append(Check("lindblad", "null space is 1-dimensional for gu > 0", d_erg == 1, float(d_erg)))
    out.append(Check("lindblad", "null space is degenerate for gu = 0", d_non > 1, float(d_non)))
    return out


def suite_evolution(rng) -> list[Check]:
    out = []
    settings = ev.IntegratorSettings(dt=1e-3, t_end=5.0, sample_every=250)
    psim = states.projector(states.psi_max())
    pure = states.projector(states.pure_state(states.PureStateParams(np.pi / 8, np.pi / 6)))
    errs, neg_errs = [], []
    for gu in (0.0, 0.25, 1.0):
        params = lindblad.SystemIIParams(1.0, gu)
        gen = lindblad.generator_system_II(params, 2)
        for rho0 in (psim, pure):
            traj = ev.evolve_rk4(gen, rho0, settings)
            for t, rho in zip(traj.times, traj.states):
                errs.append(np.max(np.abs(rho - ev.analytic_II_general(rho0, params, t))))
        traj = ev.evolve_rk4(gen, psim, settings)
        neg_errs += [abs(n - ev.negativity_psimax_closed_form(params, t)) for t, n in zip(traj.times, traj.negativities)]
    out.append(_max_check("evolution", "RK4 matches exact propagator", errs, 1e-6))
    out.append(_max_check("evolution", "RK4 negativity matches closed form", neg_errs, 1e-6))
    tr = []
    for _ in range(10):
        ge, gu = rng.uniform(0.1, 1.0, size=2)
        p = states.PureStateParams(*rng.uniform(0, np.pi / 2, size=2))
        rho0 = states.projector(states.pure_state(p))
        for t in (0.5, 2.0, 7.0):
            tr.append(abs(np.trace(ev.analytic_II_general(rho0, lindblad.SystemIIParams(ge, gu), t)) - 1))
            tr.append(abs(np.trace(ev.analytic_II_isotropic(rng.uniform(), lindblad.SystemIIParams(ge, gu), t)) - 1))
    out.append(_max_check("evolution", "exact propagators preserve trace", tr, 1e-12))
    mono = []
    for t in (0.5, 1.0, 3.0, 10.0):
        vals = [ev.negativity_psimax_closed_form(lindblad.SystemIIParams(1.0, gu), t) for gu in (0.0, 0.1, 0.25, 0.5, 1.0)]
        mono.append(max(0.0, float(np.max(np.diff(vals)))))
    out.append(_max_check("evolution", "slower disentanglement with more interference", mono, 0.0))
    return out


def suite_asymptote(rng) -> list[Check]:
    out = []
    errs, dom = [], []
    grid = np.linspace(0, np.pi / 2, 50)
    for th in grid:
        for ph in grid:
            p = states.PureStateParams(th, ph)
            rho_as = ev.asymptotic_state_max_interference(states.projector(states.pure_state(p)))
            n_as = ev.asymptotic_negativity_pure(p)
            errs.append(abs(states.negativity(rho_as) - n_as))
            dom.append(max(0.0, n_as - states.negativity_pure_closed_form(p)))
    out.append(_max_check("asymptote", "pure-state asymptotic negativity", errs, 1e-10))
    out.append(_max_check("asymptote", "asymptotic negativity never exceeds initial", dom, 1e-12))
    errs = []
    for p in np.linspace(0, 1, 21):
        W_as, n_as = ev.asymptotic_isotropic(p)
        mapped = ev.asymptotic_state_max_interference(states.isotropic_state(states.IsotropicParams(p)))
        errs.append(max(abs(states.negativity(W_as) - n_as), abs(states.negativity(mapped) - n_as),
                        float(np.max(np.abs(mapped - W_as)))))
    out.append(_max_check("asymptote", "isotropic asymptotic state and negativity", errs, 1e-10))
    tr = [abs(np.trace(ev.asymptotic_state_max_interference(random_density(rng))) - 1) for _ in range(20)]
    out.append(_max_check("asymptote", "asymptotic map preserves trace", tr, 1e-12))
    return out


_RUNNERS = {
    "linalg": suite_linalg,
    "negativity": suite_negativity,
    "lindblad": suite_lindblad,
    "evolution": suite_evolution,
    "asymptote": suite_asymptote,
}


def run_suites(seed: int = 0, suites=None) -> list[Check]:
    suites = list(suites or SUITES)
    unknown = [s for s in suites if s not in _RUNNERS]
    if unknown:
        raise ValueError(f"unknown suite(s) {unknown}; choose from {list(SUITES)}")
    checks = []
    for name in suites:
        checks += _RUNNERS[name](np.random.default_rng(seed))
    return checks
