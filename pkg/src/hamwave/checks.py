"""Fast invariant suite behind `hamwave check`.

Each item returns (ok, detail); details surface only on failure.  The list is
a desk-speed digest of the full test suite: spectral identities, the exactly
known ground states and spectra, conservation on a short run, and the
point-vortex structural identities (Cauchy-Riemann, Dirichlet-Neumann
self-adjointness, Poisson-map algebra, Hamiltonian-form equivalence).
"""

from __future__ import annotations

import numpy as np

from . import fkdv, pv
from .spectral import (
    Grid,
    RealField,
    MultiplierSymbol,
    apply_multiplier,
    dealias,
    inverse_transform,
    l2_inner,
    sobolev_norm,
    transform,
    translate,
)


def _random_smooth(grid: Grid, rng, n_modes: int = 24) -> RealField:
    coeff = rng.standard_normal(n_modes) / np.arange(1, n_modes + 1) ** 2
    phase = rng.uniform(0, 2 * np.pi, n_modes)
    x = grid.x
    vals = np.zeros_like(x)
    for m, (a, ph) in enumerate(zip(coeff, phase), start=1):
        vals += a * np.cos(np.pi * m * x / grid.half_length + ph)
    return RealField(grid, vals)


def check_transform_roundtrip():
    grid = Grid(20.0, 256)
    f = _random_smooth(grid, np.random.default_rng(1))
    back = inverse_transform(transform(f))
    err = np.max(np.abs(back.samples - f.samples))
    return err < 1e-12, f"roundtrip error {err:.3e}"


def check_parseval():
    grid = Grid(30.0, 512)
    f = RealField(grid, 1.0 / np.cosh(grid.x))
    lhs = grid.dx * np.sum(f.samples**2)
    coeff = transform(f).coefficients
    rhs = (2 * grid.half_length / grid.num_points**2) * np.sum(np.abs(coeff) ** 2)
    err = abs(lhs - rhs) / abs(lhs)
    return err < 1e-12, f"Parseval defect {err:.3e}"


def check_multiplier_composition():
    grid = Grid(20.0, 256)
    f = dealias(_random_smooth(grid, np.random.default_rng(2)))
    m1 = MultiplierSymbol(lambda k: np.abs(k), name="|k|")
    m2 = MultiplierSymbol(lambda k: 1j * k, name="ik")
    m12 = MultiplierSymbol(lambda k: 1j * k * np.abs(k), name="ik|k|")
    once = apply_multiplier(apply_multiplier(f, m2), m1)
    joint = apply_multiplier(f, m12)
    scale = np.max(np.abs(joint.samples)) + 1e-300
    err = np.max(np.abs(once.samples - joint.samples)) / scale
    return err < 1e-12, f"composition defect {err:.3e}"


def check_translation_unitarity():
    grid = Grid(20.0, 256)
    f = dealias(_random_smooth(grid, np.random.default_rng(3)))
    shifted = translate(f, 1.2345)
    err = abs(sobolev_norm(shifted, 0.75) - sobolev_norm(f, 0.75))
    return err < 1e-12, f"norm change {err:.3e}"


def check_kdv_ground_state():
    params = fkdv.ModelParams(2.0, 2)
    grid = Grid(50.0, 1024)
    gs = fkdv.solve_ground_state(params, grid)
    exact = 1.5 / np.cosh(grid.x / 2.0) ** 2
    err = np.max(np.abs(gs.Q.samples - exact))
    return err < 1e-8, f"max error {err:.3e}"


def check_kdv_dprime():
    params = fkdv.ModelParams(2.0, 2)
    grid = Grid(50.0, 1024)
    family = fkdv.SolitonFamily(fkdv.solve_ground_state(params, grid))
    err = abs(fkdv.d_prime(family, 1.0) - 3.0)
    return err < 1e-6, f"|d'(1) - 3| = {err:.3e}"


def check_kdv_d2_closed_form():
    params = fkdv.ModelParams(2.0, 2)
    grid = Grid(50.0, 1024)
    family = fkdv.SolitonFamily(fkdv.solve_ground_state(params, grid))
    d2 = fkdv.d_second(family, 1.0)
    closed = fkdv.closed_form_d_second(family, 1.0)
    err = abs(d2 - closed) / abs(closed)
    return err < 1e-6, f"relative mismatch {err:.3e}"


def check_verdict_table():
    cases = {(2.0, 2): "stable", (2.0, 4): "stable", (2.0, 6): "unstable",
             (1.0, 2): "stable", (1.0, 3): "critical", (0.6, 2): "stable",
             (0.4, 2): "unstable"}
    for (alpha, p), expected in cases.items():
        got = fkdv.classify_stability(fkdv.ModelParams(alpha, p)).value
        if got != expected:
            return False, f"(alpha={alpha}, p={p}) -> {got}, expected {expected}"
    return True, ""


def check_kdv_spectrum():
    params = fkdv.ModelParams(2.0, 2)
    grid = Grid(50.0, 512)
    family = fkdv.SolitonFamily(fkdv.solve_ground_state(params, grid))
    op = fkdv.assemble_linearized(family, 1.0)
    report = fkdv.spectral_report(op, family, 1.0)
    err = abs(report.eigenvalues[0] + 1.25)
    ok = err < 1e-4 and report.zero_alignment > 0.999 and report.gap > 0.749
    return ok, (f"lowest {report.eigenvalues[0]:.6f}, "
                f"alignment {report.zero_alignment:.4f}, gap {report.gap:.4f}")


def check_kdv_conservation():
    params = fkdv.ModelParams(2.0, 2)
    grid = Grid(50.0, 512)
    family = fkdv.SolitonFamily(fkdv.solve_ground_state(params, grid))
    config = fkdv.EvolutionConfig(dt=fkdv.default_time_step(grid, 2.0),
                                  t_final=2.0, stride=100)
    samples = fkdv.evolve(family.Q, params, config)
    e0, p0 = samples[0].energy, samples[0].momentum
    de = max(abs(s.energy - e0) for s in samples) / abs(e0)
    dp = max(abs(s.momentum - p0) for s in samples) / abs(p0)
    ok = de < 1e-6 and dp < 1e-6
    return ok, f"drifts {de:.3e}, {dp:.3e}"


def check_cauchy_riemann():
    vf = pv.VortexFields((0.0, -1.0))
    rng = np.random.default_rng(4)
    x1 = rng.uniform(-3, 3, 100)
    x2 = rng.uniform(-0.4, 0.4, 100)
    tx1, tx2 = vf.grad_theta(x1, x2)
    gx1 = vf.gamma_x1(x1, x2)
    gx2 = vf.gamma_x2(x1, x2)
    err = max(np.max(np.abs(tx1 + gx2)), np.max(np.abs(tx2 - gx1)))
    return err < 1e-10, f"CR defect {err:.3e}"


def check_mirror_identity():
    vf = pv.VortexFields((0.0, -1.0))
    x1 = np.linspace(-8, 8, 101)
    err = np.max(np.abs(vf.gamma(x1, np.zeros_like(x1))))
    return err < 1e-12, f"Gamma on the axis {err:.3e}"


def check_dn_flat():
    grid = Grid(np.pi, 128)
    dn = pv.DNOperator(RealField(grid, np.zeros(grid.num_points)), order=4)
    phi = np.cos(3.0 * grid.x)
    out = dn.apply(phi)
    err = np.max(np.abs(out - 3.0 * phi))
    return err < 1e-12, f"G(0) error {err:.3e}"


def check_dn_self_adjoint():
    grid = Grid(np.pi, 128)
    rng = np.random.default_rng(5)
    eta = 0.01 * np.cos(grid.x) + 0.005 * np.cos(2 * grid.x)
    dn = pv.DNOperator(RealField(grid, eta), order=4)
    f = _random_smooth(grid, rng)
    g = _random_smooth(grid, rng)
    fs = RealField(grid, f.samples - np.mean(f.samples))
    gs = RealField(grid, g.samples - np.mean(g.samples))
    lhs = l2_inner(RealField(grid, dn.apply(fs)), gs)
    rhs = l2_inner(fs, RealField(grid, dn.apply(gs)))
    err = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    return err < 1e-8, f"self-adjointness defect {err:.3e}"


def check_pv_momentum_translation():
    params = pv.PVParams(1e-2, 1.0)
    grid = Grid(25.6, 256)
    wave = pv.asymptotic_guess(params, grid)
    state = pv.PVState(eta=wave.eta, phi=wave.phi, center=wave.center)
    grad_e, grad_p = pv.pv_gradients(wave.eta.samples, wave.phi.samples,
                                     np.asarray(wave.center), params, grid)
    j_eta, j_phi, j_center = pv.apply_poisson(state, grad_p, params)
    ops = pv.PVStateOps(grid, wave.eta.samples, wave.phi.samples,
                        np.asarray(wave.center), params)
    err = max(
        np.max(np.abs(j_eta + ops.eta_p)),
        np.max(np.abs(j_phi + ops.phi_p)),
        np.max(np.abs(j_center - np.array([1.0, 0.0]))),
    )
    return err < 1e-8, f"J grad P - T'(0)u defect {err:.3e}"


def check_pv_newton():
    params = pv.PVParams(1e-2, 1.0)
    grid = Grid(25.6, 256)
    wave = pv.solve_traveling_wave(params, grid)
    res = sum(wave.residuals)
    ok = res < 1e-10 and wave.iterations <= 8
    return ok, f"residual {res:.3e} in {wave.iterations} iterations"


def all_checks():
    return [
        ("spectral: transform roundtrip", "convergence", check_transform_roundtrip),
        ("spectral: Parseval identity", "convergence", check_parseval),
        ("spectral: multiplier composition", "convergence", check_multiplier_composition),
        ("spectral: translation unitarity", "convergence", check_translation_unitarity),
        ("fkdv: KdV ground state vs sech^2", "convergence", check_kdv_ground_state),
        ("fkdv: d'(1) = 3 for KdV", "convergence", check_kdv_dprime),
        ("fkdv: d'' matches the scaling law", "convergence", check_kdv_d2_closed_form),
        ("fkdv: verdict table p vs 2 alpha + 1", "convergence", check_verdict_table),
        ("fkdv: KdV spectrum (-5/4, 0, gap 3/4)", "spectral-config", check_kdv_spectrum),
        ("fkdv: short-run conservation", "convergence", check_kdv_conservation),
        ("pv: Cauchy-Riemann pairs", "convergence", check_cauchy_riemann),
        ("pv: mirror identity Gamma = 0", "convergence", check_mirror_identity),
        ("pv: G(0) = |dx| exactly", "convergence", check_dn_flat),
        ("pv: G(eta) self-adjoint", "convergence", check_dn_self_adjoint),
        ("pv: J grad P = T'(0)u", "convergence", check_pv_momentum_translation),
        ("pv: Newton branch residual", "convergence", check_pv_newton),
    ]
