"""Traveling capillary-gravity waves with a submerged point vortex.

State u = (eta, phi, xbar): surface elevation, surface trace of the harmonic
potential, vortex center.  The energy splits as E = K0 + eps K1 + eps^2 K2 + V
with the vortex-wave interaction entering through closed-form traces of the
vortex potential, and the momentum is P = eps xbar_2 - int eta'(phi + eps
Theta|_S).  Traveling waves of speed c are zeros of the residual

    F1 = E'_eta - c P'_eta,
    F2 = c eta' + G(eta) phi + eps grad_perp Theta,
    F3 = c - (H(eta)phi)_x1(xbar) + eps/(4 pi a),

solved by a damped Newton iteration in the symmetry-reduced space (eta even,
phi odd) from the small-strength asymptotic state eta = eps^2 eta2,
c = -eps/(4 pi a).  The linearized augmented Hamiltonian H_c is assembled
from the closed-form second variations as a dense quadratic form over
(eta, phi, xbar), together with the Schur-form blocks (A, L, G) used for
cross-checks and the constrained coercivity test.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.special

from ..errors import AdmissibilityLost, JacobianSingular, NoConvergence
from ..fkdv.waves import OperatorMatrix, SpectralReport, constrained_rayleigh_core, _classify_eigenvalues
from ..errors import SpectralConfigViolation
from ..spectral import Grid, RealField, meanzero_basis, multiplier_gram, multiplier_matrix, MultiplierSymbol
from .dno import DNOperator
from .vortex import VortexFields

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class PVParams:
    """Gravity g, surface tension b, vortex strength eps, vortex depth a."""

    strength: float
    depth: float
    gravity: float = 1.0
    surface_tension: float = 1.0
    strength_ceiling: float = 0.1

    def __post_init__(self):
        for name in ("gravity", "surface_tension", "depth"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if abs(self.strength) > self.strength_ceiling:
            raise ValueError(
                f"|eps| = {abs(self.strength)} above the branch-validity ceiling "
                f"{self.strength_ceiling}"
            )

    @property
    def eps(self) -> float:
        return self.strength

    @property
    def a(self) -> float:
        return self.depth

    @property
    def g(self) -> float:
        return self.gravity

    @property
    def b(self) -> float:
        return self.surface_tension


class GradientTriple(NamedTuple):
    eta: np.ndarray
    phi: np.ndarray
    center: np.ndarray


@dataclass(frozen=True)
class PVWave:
    """Converged traveling wave (eta, phi, c) at vortex center (0, -a)."""

    params: PVParams
    grid: Grid
    eta: RealField
    phi: RealField
    c: float
    center: Tuple[float, float]
    residuals: Tuple[float, float, float]
    order: int
    iterations: int

    def __post_init__(self):
        eta0 = float(self.eta.evaluate(np.array([self.center[0]]))[0])
        if not (self.center[1] < eta0 < -self.center[1]):
            raise AdmissibilityLost(
                f"surface height {eta0:.3e} at the vortex abscissa is outside "
                f"({self.center[1]}, {-self.center[1]})"
            )

    @property
    def state(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.eta.samples, self.phi.samples, np.asarray(self.center, dtype=float)


def check_admissible(eta: RealField, center, margin: float = 0.0) -> float:
    """Gap between the vortex and the surface; raises AdmissibilityLost if <= margin."""
    x1, x2 = float(center[0]), float(center[1])
    eta_at = float(eta.evaluate(np.array([x1]))[0])
    gap_vertical = min(eta_at - x2, -x2 - eta_at)
    dist = np.hypot(eta.grid.x - x1, eta.samples - x2)
    gap = min(gap_vertical, float(np.min(dist)))
    if gap <= margin:
        raise AdmissibilityLost(
            f"vortex-surface separation {gap:.3e} at or below margin {margin:.3e}"
        )
    return gap


# ---------------------------------------------------------------------------
# state operators: vortex traces and Dirichlet-Neumann data at a state

class PVStateOps:
    """Lazy bundle of surface traces and DN data at a state (eta, phi, xbar)."""

    def __init__(self, grid: Grid, eta: np.ndarray, phi: np.ndarray,
                 center, params: PVParams, order: int = 4):
        self.grid = grid
        self.eta = np.asarray(eta, dtype=float)
        self.phi = np.asarray(phi, dtype=float)
        self.center = np.asarray(center, dtype=float)
        self.params = params
        self.order = order
        self.vf = VortexFields((float(self.center[0]), float(self.center[1])))
        self.dn = DNOperator(RealField(grid, self.eta), order)
        ik = 1j * grid.k
        ik[grid.nyquist_index] = 0.0
        self._ik = ik

    def dx(self, v: np.ndarray) -> np.ndarray:
        return np.real(np.fft.ifft(self._ik * np.fft.fft(v)))

    # surface points
    @cached_property
    def s2(self) -> np.ndarray:
        return self.eta

    @cached_property
    def eta_p(self) -> np.ndarray:
        return self.dn.eta_prime

    @cached_property
    def phi_p(self) -> np.ndarray:
        return self.dx(self.phi)

    # vortex traces on the surface -------------------------------------------
    @cached_property
    def th(self):
        return self.vf.theta(self.grid.x, self.s2)

    @cached_property
    def th1(self):
        return self.vf.theta_x1(self.grid.x, self.s2)

    @cached_property
    def th2(self):
        return self.vf.theta_x2(self.grid.x, self.s2)

    @cached_property
    def xi2(self):
        return self.vf.xi_big_x2(self.grid.x, self.s2)

    @cached_property
    def t11(self):
        return self.vf.theta_x1x1(self.grid.x, self.s2)

    @cached_property
    def t12(self):
        return self.vf.theta_x1x2(self.grid.x, self.s2)

    @cached_property
    def t22(self):
        return self.vf.theta_x2x2(self.grid.x, self.s2)

    @cached_property
    def x12(self):
        return self.vf.xi_big_x1x2(self.grid.x, self.s2)

    @cached_property
    def x22(self):
        return self.vf.xi_big_x2x2(self.grid.x, self.s2)

    @cached_property
    def g11(self):
        return self.vf.gamma_x1x1(self.grid.x, self.s2)

    @cached_property
    def l12(self):
        return self.vf.lambda_x1x2(self.grid.x, self.s2)

    @cached_property
    def g22(self):
        return self.vf.gamma_x2x2(self.grid.x, self.s2)

    @cached_property
    def t111(self):
        return self.vf.theta_x1x1x1(self.grid.x, self.s2)

    @cached_property
    def t112(self):
        return self.vf.theta_x1x1x2(self.grid.x, self.s2)

    @cached_property
    def t122(self):
        return self.vf.theta_x1x2x2(self.grid.x, self.s2)

    @cached_property
    def t222(self):
        return self.vf.theta_x2x2x2(self.grid.x, self.s2)

    @cached_property
    def X112(self):
        return self.vf.xi_big_x1x1x2(self.grid.x, self.s2)

    @cached_property
    def X122(self):
        return self.vf.xi_big_x1x2x2(self.grid.x, self.s2)

    @cached_property
    def X222(self):
        return self.vf.xi_big_x2x2x2(self.grid.x, self.s2)

    # DN data ------------------------------------------------------------------
    @cached_property
    def g_phi(self) -> np.ndarray:
        return self.dn.apply(self.phi)

    @cached_property
    def traces(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.dn.trace_gradient(self.phi)

    # assembled surface fields ---------------------------------------------------
    def grad_perp(self, fx1: np.ndarray, fx2: np.ndarray) -> np.ndarray:
        return -self.eta_p * fx1 + fx2

    def grad_top(self, fx1: np.ndarray, fx2: np.ndarray) -> np.ndarray:
        return fx1 + self.eta_p * fx2

    @cached_property
    def grad_perp_theta(self) -> np.ndarray:
        return self.grad_perp(self.th1, self.th2)

    @cached_property
    def grad_perp_xi(self) -> Tuple[np.ndarray, np.ndarray]:
        return (self.grad_perp(self.t11, self.t12), self.grad_perp(self.x12, self.x22))

    # center quantities ------------------------------------------------------------
    @cached_property
    def theta2_x1_at_center(self) -> float:
        return float(self.vf.theta2_x1(self.center[0], self.center[1]))

    @cached_property
    def gamma2_at_center(self) -> float:
        return float(self.vf.gamma2(self.center[0], self.center[1]))

    def interior_velocity(self) -> np.ndarray:
        """grad H(eta)phi at the vortex center."""
        gx1, gx2 = self.dn.interior_gradient(self.phi, tuple(self.center))
        return np.array([gx1, gx2])


# ---------------------------------------------------------------------------
# functionals

def pv_energy_parts(ops: PVStateOps) -> Tuple[float, float, float, float]:
    """(K0, K1, K2, V) evaluated with order-M traces."""
    grid, params = ops.grid, ops.params
    dxw = grid.dx
    k0 = 0.5 * dxw * np.sum(ops.phi * ops.g_phi)
    k1 = dxw * np.sum(ops.phi * ops.grad_perp_theta)
    k2 = 0.5 * (dxw * np.sum(ops.th * ops.grad_perp_theta) + ops.gamma2_at_center)
    v = dxw * np.sum(
        0.5 * params.g * ops.eta**2
        + params.b * (np.sqrt(1.0 + ops.eta_p**2) - 1.0)
    )
    return float(k0), float(k1), float(k2), float(v)


def pv_energy(eta, phi, center, params: PVParams, grid: Grid, order: int = 4) -> float:
    ops = PVStateOps(grid, eta, phi, center, params, order)
    k0, k1, k2, v = pv_energy_parts(ops)
    eps = params.eps
    return k0 + eps * k1 + eps**2 * k2 + v


def pv_momentum(eta, phi, center, params: PVParams, grid: Grid, order: int = 4) -> float:
    ops = PVStateOps(grid, eta, phi, center, params, order)
    eps = params.eps
    return float(
        eps * ops.center[1]
        - grid.dx * np.sum(ops.eta_p * (ops.phi + eps * ops.th))
    )


def pv_gradients(eta, phi, center, params: PVParams, grid: Grid,
                 order: int = 4, ops: Optional[PVStateOps] = None
                 ) -> Tuple[GradientTriple, GradientTriple]:
    """(grad E, grad P) with the explicit closed-form components."""
    if ops is None:
        ops = PVStateOps(grid, eta, phi, center, params, order)
    eps = params.eps
    dxw = grid.dx
    eta_p, phi_p, g_phi = ops.eta_p, ops.phi_p, ops.g_phi
    jap_sq = 1.0 + eta_p**2

    e_eta = (
        (phi_p**2 - 2.0 * eta_p * phi_p * g_phi - g_phi**2) / (2.0 * jap_sq)
        + params.g * ops.eta
        - params.b * ops.dx(eta_p / np.sqrt(jap_sq))
        + eps * phi_p * ops.th1
        + 0.5 * eps**2 * (ops.th1**2 + ops.th2**2)
    )
    e_phi = g_phi + eps * ops.grad_perp_theta

    # center gradient: -(eps^2/2) int grad_perp(Theta xi) - eps int phi grad_perp xi
    #                  - eps^2 dx1 Theta2(xbar) e2
    d1_tx1 = ops.th1 * ops.th1 + ops.th * ops.t11
    d2_tx1 = ops.th2 * ops.th1 + ops.th * ops.t12
    d1_tx2 = ops.th1 * ops.xi2 + ops.th * ops.x12
    d2_tx2 = ops.th2 * ops.xi2 + ops.th * ops.x22
    gp_theta_xi = (ops.grad_perp(d1_tx1, d2_tx1), ops.grad_perp(d1_tx2, d2_tx2))
    gp_xi = ops.grad_perp_xi
    e_center = np.array([
        -0.5 * eps**2 * dxw * np.sum(gp_theta_xi[0]) - eps * dxw * np.sum(ops.phi * gp_xi[0]),
        -0.5 * eps**2 * dxw * np.sum(gp_theta_xi[1]) - eps * dxw * np.sum(ops.phi * gp_xi[1])
        - eps**2 * ops.theta2_x1_at_center,
    ])

    p_eta = phi_p + eps * ops.th1
    p_phi = -eta_p
    p_center = np.array([
        eps * dxw * np.sum(eta_p * ops.th1),
        eps + eps * dxw * np.sum(eta_p * ops.xi2),
    ])
    return (GradientTriple(e_eta, e_phi, e_center),
            GradientTriple(p_eta, p_phi, p_center))


# ---------------------------------------------------------------------------
# small-amplitude branch

def eta2_spectral(params: PVParams, grid: Grid) -> np.ndarray:
    """eta2 = (1/4pi^2) (g - b dx^2)^{-1} (x^2 - a^2)/(x^2 + a^2)^2."""
    a = params.a
    rhs_vals = (grid.x**2 - a**2) / (grid.x**2 + a**2) ** 2 / (4.0 * np.pi**2)
    sym = params.g + params.b * grid.k**2
    return np.real(np.fft.ifft(np.fft.fft(rhs_vals) / sym))


def _scaled_exp1(z: np.ndarray, cf_terms: int = 60) -> np.ndarray:
    """f(z) = -e^z E1(z), by scipy exp1 for |z| <= 20 and a continued fraction beyond.

    The continued fraction evaluates e^z E1(z) = 1/(z+1- 1/(z+3- 4/(z+5- ...)))
    directly, which avoids the overflow of e^z at large |z|.
    """
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    small = np.abs(z) <= 20.0
    if np.any(small):
        zs = z[small]
        out[small] = -np.exp(zs) * scipy.special.exp1(zs)
    if np.any(~small):
        zl = z[~small]
        t = np.zeros_like(zl)
        for i in range(cf_terms, 0, -1):
            t = (i * i) / (zl + (2 * i + 1) - t)
        out[~small] = -1.0 / (zl + 1.0 - t)
    return out


def eta2_closed_form(x, a: float, g: float = 1.0, b: float = 1.0) -> np.ndarray:
    """Leading-order surface profile via the exponential integral.

    With w = sqrt(g/b)(x + i a):  eta2(x) = Re[(f(w) + f(-w))/2] / (4 pi^2 b),
    f(z) = -e^z E1(z), analytic off (-inf, 0]; Im(w) = sqrt(g/b) a > 0 keeps
    both w and -w away from the cut.
    """
    x = np.asarray(x, dtype=float)
    w = np.sqrt(g / b) * (x + 1j * a)
    vals = 0.5 * (_scaled_exp1(w) + _scaled_exp1(-w))
    return np.real(vals) / (4.0 * np.pi**2 * b)


def asymptotic_guess(params: PVParams, grid: Grid, order: int = 4) -> PVWave:
    """eta = eps^2 eta2, phi = 0, c = eps c1(a) with c1(a) = -1/(4 pi a)."""
    eps, a = params.eps, params.a
    eta = RealField(grid, eps**2 * eta2_spectral(params, grid), parity="even")
    phi = RealField(grid, np.zeros(grid.num_points), parity="odd")
    c = -eps / (FOUR_PI * a)
    r1, r2, r3 = residual_F(eta.samples, phi.samples, c, params, grid, order)
    return PVWave(
        params=params,
        grid=grid,
        eta=eta,
        phi=phi,
        c=c,
        center=(0.0, -a),
        residuals=(
            float(np.sqrt(grid.dx) * np.linalg.norm(r1)),
            float(np.sqrt(grid.dx) * np.linalg.norm(r2)),
            abs(r3),
        ),
        order=order,
        iterations=0,
    )


def residual_F(eta, phi, c: float, params: PVParams, grid: Grid, order: int = 4
               ) -> Tuple[np.ndarray, np.ndarray, float]:
    """The traveling-wave residual (F1, F2, F3) at vortex center (0, -a)."""
    center = np.array([0.0, -params.a])
    ops = PVStateOps(grid, eta, phi, center, params, order)
    grad_e, grad_p = pv_gradients(eta, phi, center, params, grid, order, ops=ops)
    f1 = grad_e.eta - c * grad_p.eta
    f2 = c * ops.eta_p + ops.g_phi + params.eps * ops.grad_perp_theta
    f3 = c - ops.interior_velocity()[0] + params.eps / (FOUR_PI * params.a)
    return f1, f2, float(f3)


class _SymmetricPacking:
    """Coefficient packing for the symmetry-reduced Newton space."""

    def __init__(self, grid: Grid):
        self.grid = grid
        n = grid.num_points
        half = n // 2
        modes_c = np.arange(half)            # cosine modes 0..N/2-1 (Nyquist skipped)
        modes_s = np.arange(1, half)         # sine modes 1..N/2-1
        karr_c = np.pi * modes_c / grid.half_length
        karr_s = np.pi * modes_s / grid.half_length
        self.cos = np.cos(np.outer(karr_c, grid.x))
        self.sin = np.sin(np.outer(karr_s, grid.x))
        self.n_cos = half
        self.n_sin = half - 1
        self.dim = self.n_cos + self.n_sin + 1

    def pack(self, eta: np.ndarray, phi: np.ndarray, c: float) -> np.ndarray:
        a = self.cos @ eta * (2.0 / self.grid.num_points)
        a[0] *= 0.5
        b = self.sin @ phi * (2.0 / self.grid.num_points)
        return np.concatenate([a, b, [c]])

    def unpack(self, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
        a = z[: self.n_cos]
        b = z[self.n_cos: self.n_cos + self.n_sin]
        return a @ self.cos, b @ self.sin, float(z[-1])

    def project_residual(self, f1: np.ndarray, f2: np.ndarray, f3: float) -> np.ndarray:
        r1 = self.cos @ f1 * (2.0 / self.grid.num_points)
        r1[0] *= 0.5
        r2 = self.sin @ f2 * (2.0 / self.grid.num_points)
        return np.concatenate([r1, r2, [f3]])


def solve_traveling_wave(
    params: PVParams,
    grid: Grid,
    order: int = 4,
    tol: float = 1e-11,
    max_iter: int = 40,
    initial: Optional[PVWave] = None,
    fd_step: float = 1e-6,
) -> PVWave:
    """Damped Newton iteration on (eta even, phi odd, c) from the asymptotic guess.

    The Jacobian is a dense central finite-difference matrix in the reduced
    coefficient space; it is refreshed whenever a step fails to contract the
    residual.  Raises NoConvergence / JacobianSingular on failure.
    """
    packing = _SymmetricPacking(grid)
    guess = initial if initial is not None else asymptotic_guess(params, grid, order)
    z = packing.pack(guess.eta.samples, guess.phi.samples, guess.c)

    def residual_vec(zv: np.ndarray) -> np.ndarray:
        eta, phi, c = packing.unpack(zv)
        return packing.project_residual(*residual_F(eta, phi, c, params, grid, order))

    def jacobian(zv: np.ndarray) -> np.ndarray:
        jac = np.empty((packing.dim, packing.dim))
        for i in range(packing.dim):
            e = np.zeros(packing.dim)
            e[i] = fd_step
            jac[:, i] = (residual_vec(zv + e) - residual_vec(zv - e)) / (2.0 * fd_step)
        return jac

    r = residual_vec(z)
    rnorm = np.linalg.norm(r)
    jac = None
    fresh = False
    iterations = 0
    while rnorm > tol:
        iterations += 1
        if iterations > max_iter:
            raise NoConvergence(
                f"residual {rnorm:.3e} after {max_iter} Newton iterations"
            )
        if jac is None:
            jac = jacobian(z)
            fresh = True
        try:
            step = np.linalg.solve(jac, -r)
        except np.linalg.LinAlgError as exc:
            raise JacobianSingular(str(exc)) from exc
        t = 1.0
        accepted = False
        while t >= 1e-3:
            z_new = z + t * step
            r_new = residual_vec(z_new)
            rnorm_new = np.linalg.norm(r_new)
            if rnorm_new < rnorm:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if fresh:
                raise NoConvergence(
                    f"damped Newton stalled at residual {rnorm:.3e} (target {tol:.1e})"
                )
            jac = None        # stale Jacobian; rebuild and retry
            continue
        slow = rnorm_new > 0.25 * rnorm
        z, r, rnorm = z_new, r_new, rnorm_new
        if slow and not fresh:
            jac = None        # reused Jacobian is contracting too slowly
        fresh = False

    eta, phi, c = packing.unpack(z)
    f1, f2, f3 = residual_F(eta, phi, c, params, grid, order)
    return PVWave(
        params=params,
        grid=grid,
        eta=RealField(grid, eta, parity="even"),
        phi=RealField(grid, phi, parity="odd"),
        c=c,
        center=(0.0, -params.a),
        residuals=(
            float(np.sqrt(grid.dx) * np.linalg.norm(f1)),
            float(np.sqrt(grid.dx) * np.linalg.norm(f2)),
            abs(f3),
        ),
        order=order,
        iterations=iterations,
    )


# ---------------------------------------------------------------------------
# moment of instability along the branch

def pv_d_second(
    params: PVParams,
    grid: Grid,
    order: int = 4,
    h_a: Optional[float] = None,
    tol: float = 1e-11,
) -> float:
    """d''(c) = -<DP(U_c), da U_c> / da c with central differences in the depth a.

    The three solves share warm starts along the branch; eps is held fixed.
    """
    if h_a is None:
        h_a = 0.05 * params.a
    if not (params.a - h_a > 0):
        raise ValueError("a - h_a must stay positive")
    base = solve_traveling_wave(params, grid, order, tol)

    def at_depth(a_val: float) -> PVWave:
        p = PVParams(params.strength, a_val, params.gravity, params.surface_tension,
                     params.strength_ceiling)
        return solve_traveling_wave(p, grid, order, tol, initial=None)

    plus = at_depth(params.a + h_a)
    minus = at_depth(params.a - h_a)
    da_eta = (plus.eta.samples - minus.eta.samples) / (2.0 * h_a)
    da_phi = (plus.phi.samples - minus.phi.samples) / (2.0 * h_a)
    da_center = np.array([0.0, -1.0])
    da_c = (plus.c - minus.c) / (2.0 * h_a)
    _, grad_p = pv_gradients(
        base.eta.samples, base.phi.samples, np.asarray(base.center), params, grid, order
    )
    pairing = (
        grid.dx * np.sum(grad_p.eta * da_eta)
        + grid.dx * np.sum(grad_p.phi * da_phi)
        + grad_p.center @ da_center
    )
    return float(-pairing / da_c)


def wave_c_derivative(wave: PVWave, h_a: Optional[float] = None, tol: float = 1e-11
                      ) -> Tuple[np.ndarray, float]:
    """(dU/dc as a stacked (2N+2,) vector, dc/da) by branch finite differences."""
    params, grid = wave.params, wave.grid
    if h_a is None:
        h_a = 0.05 * params.a

    def at_depth(a_val: float) -> PVWave:
        p = PVParams(params.strength, a_val, params.gravity, params.surface_tension,
                     params.strength_ceiling)
        return solve_traveling_wave(p, grid, wave.order, tol)

    plus = at_depth(params.a + h_a)
    minus = at_depth(params.a - h_a)
    da_c = (plus.c - minus.c) / (2.0 * h_a)
    du_da = np.concatenate([
        (plus.eta.samples - minus.eta.samples) / (2.0 * h_a),
        (plus.phi.samples - minus.phi.samples) / (2.0 * h_a),
        [0.0, -1.0],
    ])
    return du_da / da_c, float(da_c)


# ---------------------------------------------------------------------------
# linearized augmented Hamiltonian

def _hc_ingredients(wave: PVWave):
    params, grid = wave.params, wave.grid
    eps, c = params.eps, wave.c
    ops = PVStateOps(grid, wave.eta.samples, wave.phi.samples,
                     np.asarray(wave.center), params, wave.order)
    a1, a2 = ops.traces
    b1 = a1 + eps * ops.th1 - c
    b2 = a2 + eps * ops.th2
    return ops, a1, a2, b1, b2


def _center_blocks(ops: PVStateOps, c: float) -> np.ndarray:
    """x-bar/x-bar block of D^2 E_c from the closed-form second variations."""
    params, grid = ops.params, ops.grid
    eps = params.eps
    dxw = grid.dx
    th, th1, th2, xi2 = ops.th, ops.th1, ops.th2, ops.xi2
    t11, t12, t22, x12, x22 = ops.t11, ops.t12, ops.t22, ops.x12, ops.x22

    def gp(f1, f2):
        return ops.grad_perp(f1, f2)

    # K1 part: int phi grad_perp(D^2_center Theta)
    m_k1 = np.array([
        [np.sum(ops.phi * gp(ops.t111, ops.t112)), np.sum(ops.phi * gp(ops.X112, ops.X122))],
        [np.sum(ops.phi * gp(ops.X112, ops.X122)), np.sum(ops.phi * gp(ops.t122, ops.t222))],
    ]) * dxw

    # K2 part: 2 D_x^2 Gamma2(xbar) + (1/2) int grad_perp(Theta D^2 Theta + xi xi^T)
    f11_1 = th1 * t11 + th * ops.t111 + 2.0 * th1 * t11
    f11_2 = th2 * t11 + th * ops.t112 + 2.0 * th1 * t12
    f12_1 = th1 * x12 + th * ops.X112 + t11 * xi2 + th1 * x12
    f12_2 = th2 * x12 + th * ops.X122 + t12 * xi2 + th1 * x22
    f22_1 = th1 * t22 + th * ops.t122 + 2.0 * xi2 * x12
    f22_2 = th2 * t22 + th * ops.t222 + 2.0 * xi2 * x22
    quad = np.array([
        [np.sum(gp(f11_1, f11_2)), np.sum(gp(f12_1, f12_2))],
        [np.sum(gp(f12_1, f12_2)), np.sum(gp(f22_1, f22_2))],
    ]) * dxw
    m_k2 = 2.0 * ops.vf.gamma2_hessian(ops.center[0], ops.center[1]) + 0.5 * quad

    # -c * D^2_center P = +c eps int eta' D^2 Theta
    m_p = np.array([
        [np.sum(ops.eta_p * t11), np.sum(ops.eta_p * x12)],
        [np.sum(ops.eta_p * x12), np.sum(ops.eta_p * t22)],
    ]) * dxw

    return eps * m_k1 + eps**2 * m_k2 + c * eps * m_p


def assemble_pv_Hc(wave: PVWave) -> OperatorMatrix:
    """Dense symmetric quadratic form of H_c over raw samples [eta; phi; xbar].

    <H_c udot, udot> = udot^T Q udot with the L2 pairing carrying a dx weight
    on the field slots.  Blocks come from the closed-form second variations
    of E - cP (kinetic, vortex, potential, and momentum pieces).
    """
    params, grid = wave.params, wave.grid
    eps, c = params.eps, wave.c
    n = grid.num_points
    dxw = grid.dx
    ops, a1, a2, b1, b2 = _hc_ingredients(wave)

    dmat = multiplier_matrix(grid, MultiplierSymbol(lambda k: 1j * k, name="dx"))
    gmat = ops.dn.matrix()
    jap = np.sqrt(1.0 + ops.eta_p**2)

    coef_etaeta = (
        params.g
        + ops.dx(a1) * a2
        + eps * (ops.phi_p - c) * ops.t12
        + eps**2 * (ops.th1 * ops.t12 + ops.th2 * ops.t22)
    )
    # capillary block is -Dx diag(b/<eta'>^3) Dx; kinetic block a2 G(eta) a2
    h_etaeta = (
        np.diag(coef_etaeta)
        + (a2[:, None] * gmat) * a2[None, :]
        - dmat @ np.diag(params.b / jap**3) @ dmat
    )

    h_etaphi = b1[:, None] * dmat - a2[:, None] * gmat

    gpxi = ops.grad_perp_xi
    dxi_grad_theta = np.array([
        ops.t11 * ops.th1 + ops.t12 * ops.th2,
        ops.x12 * ops.th1 + ops.x22 * ops.th2,
    ])
    etax = np.column_stack([
        -eps * (ops.phi_p - c) * ops.t11 - eps**2 * dxi_grad_theta[0],
        -eps * (ops.phi_p - c) * ops.x12 - eps**2 * dxi_grad_theta[1],
    ])
    phix = np.column_stack([-eps * gpxi[0], -eps * gpxi[1]])
    xx = _center_blocks(ops, c)

    q = np.zeros((2 * n + 2, 2 * n + 2))
    q[:n, :n] = dxw * h_etaeta
    q[:n, n:2 * n] = dxw * h_etaphi
    q[n:2 * n, :n] = dxw * h_etaphi.T
    q[n:2 * n, n:2 * n] = dxw * gmat
    q[:n, 2 * n:] = dxw * etax
    q[2 * n:, :n] = dxw * etax.T
    q[n:2 * n, 2 * n:] = dxw * phix
    q[2 * n:, n:2 * n] = dxw * phix.T
    q[2 * n:, 2 * n:] = xx
    return OperatorMatrix(
        q,
        metadata={
            "kind": "pv_hc",
            "grid": grid,
            "params": params,
            "c": c,
            "order": wave.order,
            "wave": wave,
        },
    )


def hc_blocks(wave: PVWave) -> dict:
    """Schur-form ingredients of the quadratic form: A blocks, L, G, and both
    evaluations of the center block (general formula and the symmetric-case
    diagonal simplification)."""
    params, grid = wave.params, wave.grid
    eps, c = params.eps, wave.c
    n = grid.num_points
    dxw = grid.dx
    ops, a1, a2, b1, b2 = _hc_ingredients(wave)

    dmat = multiplier_matrix(grid, MultiplierSymbol(lambda k: 1j * k, name="dx"))
    gmat = ops.dn.matrix()
    basis = meanzero_basis(n)
    g_red = basis.T @ gmat @ basis
    ginv = basis @ np.linalg.solve(g_red, basis.T)

    l_eta = gmat @ np.diag(a2) + dmat @ np.diag(b1)
    gpxi = ops.grad_perp_xi
    l_x = eps * np.column_stack(gpxi)

    jap = np.sqrt(1.0 + ops.eta_p**2)
    mw = -np.diag(b1) @ dmat @ ginv @ dmat @ np.diag(b1)
    a11 = (
        np.diag(params.g + ops.dx(b2) * b1)
        - dmat @ np.diag(params.b / jap**3) @ dmat
        - mw
    )
    grad_top_xi = (ops.grad_top(ops.t11, ops.t12), ops.grad_top(ops.x12, ops.x22))
    a13 = np.column_stack([
        eps * b1 * (dmat @ (ginv @ gpxi[i]) - grad_top_xi[i]) for i in range(2)
    ])

    xx_general = _center_blocks(ops, c) - eps**2 * dxw * np.column_stack(gpxi).T @ ginv @ np.column_stack(gpxi)

    # Remark form (eta even, xbar_1 = 0): all three terms diagonal-dominant
    d2theta = (ops.t11, ops.x12, ops.t22)
    d2gamma = (ops.g11, ops.l12, ops.g22)
    trace_term = np.array([
        [np.sum(ops.g_phi * d2theta[0] + ops.phi_p * d2gamma[0]),
         np.sum(ops.g_phi * d2theta[1] + ops.phi_p * d2gamma[1])],
        [np.sum(ops.g_phi * d2theta[1] + ops.phi_p * d2gamma[1]),
         np.sum(ops.g_phi * d2theta[2] + ops.phi_p * d2gamma[2])],
    ]) * dxw
    xi_vec = np.column_stack([ops.th1, ops.xi2])
    gpxi_mat = np.column_stack(gpxi)
    outer = dxw * gpxi_mat.T @ (xi_vec - ginv @ gpxi_mat)
    xx_remark = (
        2.0 * eps**2 * ops.vf.gamma2_hessian(ops.center[0], ops.center[1])
        - eps * trace_term
        + eps**2 * 0.5 * (outer + outer.T)
    )

    return {
        "a11": a11,
        "a13": a13,
        "a33_general": xx_general,
        "a33_remark": xx_remark,
        "l_eta": l_eta,
        "l_x": l_x,
        "gmat": gmat,
        "ginv": ginv,
        "b1": b1,
        "b2": b2,
        "a2": a2,
    }


# ---------------------------------------------------------------------------
# spectral configuration

def pv_gram(grid: Grid) -> np.ndarray:
    """Discrete X = H^1 x Hdot^{1/2} x R^2 Gram over raw samples."""
    n = grid.num_points
    g = np.zeros((2 * n + 2, 2 * n + 2))
    g[:n, :n] = multiplier_gram(grid, 1.0 + grid.k**2)
    w = np.abs(grid.k)
    g[n:2 * n, n:2 * n] = multiplier_gram(grid, w)
    g[2 * n:, 2 * n:] = np.eye(2)
    return g


def pv_restriction(grid: Grid) -> np.ndarray:
    """Restriction dropping the constant phi mode (null in both form and gram)."""
    n = grid.num_points
    r = np.zeros((2 * n + 2, 2 * n + 1))
    r[:n, :n] = np.eye(n)
    r[n:2 * n, n:2 * n - 1] = meanzero_basis(n)
    r[2 * n:, 2 * n - 1:] = np.eye(2)
    return r


def translation_generator(wave: PVWave) -> np.ndarray:
    """T'(0) U_c = (-eta', -phi', e1) as a stacked vector."""
    ops = PVStateOps(wave.grid, wave.eta.samples, wave.phi.samples,
                     np.asarray(wave.center), wave.params, wave.order)
    return np.concatenate([-ops.eta_p, -ops.phi_p, [1.0, 0.0]])


def apply_pv_hc(op: OperatorMatrix, vec: np.ndarray) -> np.ndarray:
    """Dual pairing representative <H_c vec, .> as a covector against samples."""
    return op.matrix @ vec


def pv_spectral_report(
    op: OperatorMatrix,
    wave: PVWave,
    zero_tol: float = 1e-7,
    n_report: int = 12,
) -> SpectralReport:
    """Generalized eigenproblem of the H_c form against the X Gram, classified."""
    grid = wave.grid
    r = pv_restriction(grid)
    gram = pv_gram(grid)
    a = r.T @ op.matrix @ r
    b = r.T @ gram @ r
    eigenvalues, eigenvectors = scipy.linalg.eigh(a, b)
    n_negative, n_zero, gap = _classify_eigenvalues(eigenvalues, zero_tol)
    if n_negative != 1 or n_zero != 1:
        raise SpectralConfigViolation(
            f"expected (1 negative, 1 zero) within tol {zero_tol:.1e}, found "
            f"({n_negative}, {n_zero}); lowest eigenvalues {eigenvalues[:4]}"
        )
    gen = r.T @ translation_generator(wave)
    zero_idx = int(np.argmin(np.abs(eigenvalues)))
    v0 = eigenvectors[:, zero_idx]
    align = abs(v0 @ b @ gen) / np.sqrt((v0 @ b @ v0) * (gen @ b @ gen))
    cols = []
    for j in range(n_report):
        v = eigenvectors[:, j]
        cols.append(r @ (v / np.sqrt(v @ b @ v)))
    return SpectralReport(
        eigenvalues=eigenvalues[:n_report].copy(),
        eigenvectors=np.column_stack(cols),
        mu_sq=float(-eigenvalues[0]),
        chi=cols[0],
        zero_eigenvalue=float(eigenvalues[zero_idx]),
        zero_alignment=float(align),
        gap=gap,
        n_negative=n_negative,
        n_zero=n_zero,
        metadata={"zero_tol": zero_tol, "N": grid.num_points,
                  "zero_abs": float(abs(eigenvalues[zero_idx]))},
    )


def pv_natural_constraints(wave: PVWave) -> list[np.ndarray]:
    """I^{-1} grad P(U_c) and T'(0) U_c as stacked sample vectors."""
    params, grid = wave.params, wave.grid
    _, grad_p = pv_gradients(wave.eta.samples, wave.phi.samples,
                             np.asarray(wave.center), params, grid, wave.order)
    k = grid.k
    inv_h1 = 1.0 / (1.0 + k**2)
    n_eta = np.real(np.fft.ifft(inv_h1 * np.fft.fft(grad_p.eta)))
    inv_half = np.zeros_like(k)
    inv_half[k != 0] = 1.0 / np.abs(k[k != 0])
    n_phi = np.real(np.fft.ifft(inv_half * np.fft.fft(grad_p.phi)))
    n_vec = np.concatenate([n_eta, n_phi, grad_p.center])
    return [n_vec, translation_generator(wave)]


def pv_constrained_rayleigh(op: OperatorMatrix, wave: PVWave) -> float:
    """Corollary coercivity constant: min <H_c v, v>/||v||_X^2 over the
    X-orthogonal complement of {I^{-1} grad P(U_c), T'(0) U_c}."""
    grid = wave.grid
    r = pv_restriction(grid)
    gram = pv_gram(grid)
    a = r.T @ op.matrix @ r
    b = r.T @ gram @ r
    constraints = [r.T @ v for v in pv_natural_constraints(wave)]
    return constrained_rayleigh_core(a, b, b, constraints)
