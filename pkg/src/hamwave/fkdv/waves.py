"""Solitary waves of dt u = dx(Lambda^alpha u - u^p) and their stability data.

Ground states solve Q + Lambda^alpha Q = Q^p; the wave of speed c > 0 is the
rescaling U_c = c^{1/(p-1)} Q(c^{1/alpha} x).  The module provides the ground
state solver, the energy/momentum functionals, the moment-of-instability
derivatives d'(c) and d''(c), the linearized operator

    H_c = Lambda^alpha - p U_c^{p-1} + c,

and the spectral checks (one negative eigenvalue, translation zero mode,
positive gap) that the stability classification rests on.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ..errors import (
    CollapseToZero,
    DegenerateConstraints,
    NoConvergence,
    SpectralConfigViolation,
    SymmetryDefect,
    UnderResolved,
    ZeroField,
)
from ..spectral import (
    Grid,
    RealField,
    derivative,
    evaluate_affine,
    even_part,
    l2_inner,
    l2_norm,
    multiplier_gram,
    multiplier_matrix,
    fractional_laplacian_symbol,
    apply_multiplier,
    sobolev_inner,
    sobolev_norm,
)

CRITICAL_EXPONENT_TOL = 1e-12
DUAL_ROUTE_TOL = 1e-8


class Verdict(enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    CRITICAL = "critical"


@dataclass(frozen=True)
class ModelParams:
    """Dispersion strength alpha in (1/3, 2] and integer nonlinearity p."""

    alpha: float
    p: int

    def __post_init__(self):
        if not (1.0 / 3.0 < self.alpha <= 2.0):
            raise ValueError(f"alpha must lie in (1/3, 2], got {self.alpha}")
        if int(self.p) != self.p or self.p < 2:
            raise ValueError(f"p must be an integer > 1, got {self.p}")
        object.__setattr__(self, "p", int(self.p))
        if self.alpha < 1.0:
            p_max = (1.0 + self.alpha) / (1.0 - self.alpha)
            if not self.p < p_max:
                raise ValueError(
                    f"p={self.p} outside admissible range (1, {p_max:.4g}) for alpha={self.alpha}"
                )

    @property
    def scaling_exponent(self) -> float:
        """beta with d'(c) = d'(1) c^beta; its sign decides stability."""
        return 2.0 / (self.p - 1) - 1.0 / self.alpha


@dataclass(frozen=True)
class GroundState:
    params: ModelParams
    grid: Grid
    Q: RealField
    residual_norm: float
    iterations: int


@dataclass(frozen=True)
class SolitonFamily:
    """Ground state plus the scaling law generating U_c for every c > 0."""

    ground_state: GroundState

    @property
    def params(self) -> ModelParams:
        return self.ground_state.params

    @property
    def grid(self) -> Grid:
        return self.ground_state.grid

    @property
    def Q(self) -> RealField:
        return self.ground_state.Q


@dataclass
class OperatorMatrix:
    """Dense symmetric discretization of a linearized operator."""

    matrix: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        scale = max(np.max(np.abs(m)), 1e-300)
        defect = np.max(np.abs(m - m.T))
        if defect > 1e-8 * scale:
            raise SymmetryDefect(
                f"asymmetry {defect:.3e} exceeds 1e-8 * max|M| = {1e-8 * scale:.3e}"
            )
        self.matrix = 0.5 * (m + m.T)
        self.metadata.setdefault("symmetry_defect", float(defect / scale))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


@dataclass
class SpectralReport:
    """Low-lying spectrum of a linearized operator, classified."""

    eigenvalues: np.ndarray          # n_report lowest, ascending
    eigenvectors: np.ndarray         # columns matching `eigenvalues`, X-normalized
    mu_sq: float                     # magnitude of the single negative eigenvalue
    chi: np.ndarray                  # its eigenvector
    zero_eigenvalue: float
    zero_alignment: float            # |cos| with the translation generator, X inner product
    gap: float                       # smallest eigenvalue above the zero tolerance
    n_negative: int
    n_zero: int
    metadata: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# ground states

def default_grid(alpha: float) -> Grid:
    """Grid sized for the tail decay |x|^{-(1+alpha)} of the ground state.

    Exponential tails (alpha = 2) fit in a short box; the slowly decaying
    fractional profiles need boxes long enough that the quadrature and
    scaling-law routes for d'(c) agree (the box tail mass scales like
    L^{-(1+2*alpha)}).
    """
    if alpha >= 2.0:
        return Grid(50.0, 1024)
    if alpha >= 1.0:
        return Grid(1000.0, 16384)
    if alpha >= 0.6:
        return Grid(400.0, 65536)
    return Grid(400.0, 65536)


def profile_residual(params: ModelParams, Q: RealField) -> float:
    """L2 norm of Q + Lambda^alpha Q - Q^p."""
    lam = apply_multiplier(Q, fractional_laplacian_symbol(params.alpha))
    res = Q.samples + lam.samples - Q.samples**params.p
    return float(np.sqrt(Q.grid.dx) * np.linalg.norm(res))


def petviashvili_step(params: ModelParams, Q: RealField) -> RealField:
    """One stabilized fixed-point update toward the ground state."""
    grid = Q.grid
    p = params.p
    gamma = p / (p - 1.0)
    sym = 1.0 + np.abs(grid.k) ** params.alpha
    q_hat = np.fft.fft(Q.samples)
    qp = Q.samples**p
    qp_hat = np.fft.fft(qp)
    num = np.real(np.sum(sym * q_hat * np.conj(q_hat)))
    den = np.real(np.sum(qp_hat * np.conj(q_hat)))
    if abs(den) < 1e-300:
        raise CollapseToZero("nonlinear pairing vanished")
    weight = num / den
    new = np.real(np.fft.ifft(qp_hat / sym)) * weight**gamma
    return even_part(RealField(grid, new))


def solve_ground_state(
    params: ModelParams,
    grid: Grid,
    tol: float = 1e-11,
    max_iter: int = 2000,
    initial: Optional[RealField] = None,
) -> GroundState:
    """Petviashvili iteration for Q + Lambda^alpha Q = Q^p.

    The iterate is re-symmetrized every step, which enforces evenness of the
    ground state and suppresses translation drift.
    """
    if initial is None:
        q = RealField(grid, 1.5 * np.exp(-(grid.x**2) / 4.0))
    else:
        q = initial
    best = np.inf
    stall = 0
    for iteration in range(1, max_iter + 1):
        q = petviashvili_step(params, q)
        if np.max(np.abs(q.samples)) < 1e-10:
            raise CollapseToZero(f"iterates vanished after {iteration} steps")
        res = profile_residual(params, q)
        if res <= tol:
            return GroundState(params, grid, even_part(q), res, iteration)
        if res < 0.9 * best:
            best = res
            stall = 0
        else:
            stall += 1
            if stall >= 80:
                raise NoConvergence(
                    f"stagnated at residual {res:.3e} after {iteration} iterations "
                    f"(target {tol:.1e}); refine the grid or check (alpha, p)"
                )
    raise NoConvergence(
        f"residual {res:.3e} after {max_iter} iterations (target {tol:.1e})"
    )


def scale_to_speed(
    family: SolitonFamily,
    c: float,
    grid: Optional[Grid] = None,
    resolution_bound: float = 0.5,
) -> RealField:
    """U_c(x) = c^{1/(p-1)} Q(c^{1/alpha} x), resampled spectrally."""
    if not c > 0:
        raise ValueError(f"wave speed must be positive, got {c}")
    params = family.params
    grid = grid or family.grid
    stretch = c ** (1.0 / params.alpha)
    if stretch * grid.dx > resolution_bound:
        raise UnderResolved(
            f"c^(1/alpha)*dx = {stretch * grid.dx:.3g} exceeds {resolution_bound}; "
            "the rescaled profile is too narrow for this grid"
        )
    if c == 1.0 and grid is family.grid:
        return family.Q
    # evaluate the decaying profile, not its periodic images: points falling
    # outside the ground-state box take the (tail-sized) value zero
    y = stretch * grid.x
    samples = evaluate_affine(
        family.grid, family.Q.samples, float(y[0]), stretch * grid.dx, grid.num_points
    )
    samples[np.abs(y) > family.grid.half_length] = 0.0
    samples *= c ** (1.0 / (params.p - 1))
    return RealField(grid, samples)


# ---------------------------------------------------------------------------
# functionals

def energy(u: RealField, params: ModelParams) -> float:
    """E(u) = (1/2)||Lambda^{alpha/2} u||_{L2}^2 - 1/(p+1) int u^{p+1}."""
    quad = 0.5 * sobolev_norm(u, params.alpha / 2.0, homogeneous=True) ** 2
    nl = u.grid.dx * np.sum(u.samples ** (params.p + 1)) / (params.p + 1)
    return float(quad - nl)


def energy_gradient(u: RealField, params: ModelParams) -> RealField:
    """DE(u) = Lambda^alpha u - u^p."""
    lam = apply_multiplier(u, fractional_laplacian_symbol(params.alpha))
    return RealField(u.grid, lam.samples - u.samples**params.p)


def momentum(u: RealField) -> float:
    """P(u) = -(1/2) int u^2 dx."""
    return float(-0.5 * u.grid.dx * np.sum(u.samples**2))


def d_prime(family: SolitonFamily, c: float, check_tol: float = DUAL_ROUTE_TOL) -> float:
    """d'(c) = -P(U_c) = (1/2) c^{2/(p-1)-1/alpha} ||Q||_{L2}^2.

    Computed from the scaling law and, independently, by quadrature on the
    resampled U_c; the two must agree to `check_tol` relative or the profile
    is declared under-resolved.  The scaling-route value is returned: it is
    smooth in c, so finite differences of d' stay clean.
    """
    params = family.params
    closed = 0.5 * c**params.scaling_exponent * l2_norm(family.Q) ** 2
    quad = -momentum(scale_to_speed(family, c))
    if abs(quad - closed) > check_tol * abs(closed):
        raise UnderResolved(
            f"d'(c) routes disagree at c={c}: quadrature {quad!r} vs "
            f"closed form {closed!r} (tol {check_tol:.1e})"
        )
    return closed


def d_second(family: SolitonFamily, c: float, h: Optional[float] = None) -> float:
    """Central difference of d' in c; h defaults to 1e-3 c."""
    if h is None:
        h = 1e-3 * c
    if not 0 < h < c / 2:
        raise ValueError(f"require 0 < h < c/2, got h={h}, c={c}")
    return (d_prime(family, c + h) - d_prime(family, c - h)) / (2.0 * h)


def closed_form_d_second(family: SolitonFamily, c: float) -> float:
    """(2/(p-1) - 1/alpha) d'(c) / c, from differentiating the scaling law."""
    return family.params.scaling_exponent * d_prime(family, c) / c


def classify_stability(params: ModelParams) -> Verdict:
    """Stable iff p < 2 alpha + 1, i.e. the scaling exponent of d' is positive."""
    beta = params.scaling_exponent
    if abs(beta) < CRITICAL_EXPONENT_TOL:
        return Verdict.CRITICAL
    return Verdict.STABLE if beta > 0 else Verdict.UNSTABLE


# ---------------------------------------------------------------------------
# linearized operator

def assemble_linearized(
    family: SolitonFamily, c: float, grid: Optional[Grid] = None
) -> OperatorMatrix:
    """Dense symmetric matrix of H_c = Lambda^alpha - p U_c^{p-1} + c."""
    params = family.params
    grid = grid or family.grid
    u_c = scale_to_speed(family, c, grid=grid)
    mat = multiplier_matrix(grid, fractional_laplacian_symbol(params.alpha))
    mat = mat + np.diag(c - params.p * u_c.samples ** (params.p - 1))
    return OperatorMatrix(
        mat,
        metadata={
            "kind": "fkdv_hc",
            "alpha": params.alpha,
            "p": params.p,
            "c": c,
            "grid": grid,
            "wave": u_c,
        },
    )


def apply_linearized(family: SolitonFamily, c: float, v: RealField) -> RealField:
    """Direct multiplier/pointwise application of H_c (oracle for the matrix)."""
    params = family.params
    u_c = scale_to_speed(family, c, grid=v.grid)
    lam = apply_multiplier(v, fractional_laplacian_symbol(params.alpha))
    out = lam.samples + (c - params.p * u_c.samples ** (params.p - 1)) * v.samples
    return RealField(v.grid, out)


def family_derivative(family: SolitonFamily, c: float, h: Optional[float] = None) -> RealField:
    """dU_c/dc by central differences along the family (h = 1e-3 c by default)."""
    if h is None:
        h = 1e-3 * c
    up = scale_to_speed(family, c + h)
    dn = scale_to_speed(family, c - h)
    return RealField(family.grid, (up.samples - dn.samples) / (2.0 * h))


def _classify_eigenvalues(eigenvalues: np.ndarray, zero_tol: float):
    n_negative = int(np.sum(eigenvalues < -zero_tol))
    n_zero = int(np.sum(np.abs(eigenvalues) <= zero_tol))
    positives = eigenvalues[eigenvalues > zero_tol]
    gap = float(positives[0]) if positives.size else np.inf
    return n_negative, n_zero, gap


def _x_normalize(grid: Grid, vec: np.ndarray, x_weights: np.ndarray) -> np.ndarray:
    fh = np.fft.fft(vec)
    norm_sq = np.real(np.sum(x_weights * np.abs(fh) ** 2)) * grid.dx / grid.num_points
    return vec / np.sqrt(max(norm_sq, 1e-300))


def spectral_report(
    op: OperatorMatrix,
    family: SolitonFamily,
    c: float,
    zero_tol: float = 1e-6,
    n_report: int = 8,
) -> SpectralReport:
    """Eigendecomposition of H_c with the saddle-configuration check.

    Eigenvalues are those of the dense symmetric matrix (the L2 pairing, in
    which the closed-form Poschl-Teller values live); eigenvectors are
    returned with unit norm in the discrete X = H^{alpha/2} inner product.
    """
    grid = op.metadata.get("grid") or family.grid
    alpha = family.params.alpha
    eigenvalues, eigenvectors = scipy.linalg.eigh(op.matrix)
    n_negative, n_zero, gap = _classify_eigenvalues(eigenvalues, zero_tol)
    if n_negative != 1 or n_zero != 1:
        raise SpectralConfigViolation(
            f"expected (1 negative, 1 zero) within tol {zero_tol:.1e}, found "
            f"({n_negative}, {n_zero}); lowest eigenvalues {eigenvalues[:4]}"
        )
    x_weights = (1.0 + grid.k**2) ** (alpha / 2.0)
    u_c = scale_to_speed(family, c, grid=grid)
    generator = derivative(u_c)
    gen_field = RealField(grid, generator.samples)
    zero_idx = int(np.argmin(np.abs(eigenvalues)))
    zero_vec = RealField(grid, eigenvectors[:, zero_idx])
    align = abs(sobolev_inner(zero_vec, gen_field, alpha / 2.0)) / (
        sobolev_norm(zero_vec, alpha / 2.0) * sobolev_norm(gen_field, alpha / 2.0)
    )
    cols = [
        _x_normalize(grid, eigenvectors[:, j], x_weights) for j in range(n_report)
    ]
    chi = _x_normalize(grid, eigenvectors[:, 0], x_weights)
    return SpectralReport(
        eigenvalues=eigenvalues[:n_report].copy(),
        eigenvectors=np.column_stack(cols),
        mu_sq=float(-eigenvalues[0]),
        chi=chi,
        zero_eigenvalue=float(eigenvalues[zero_idx]),
        zero_alignment=float(align),
        gap=gap,
        n_negative=n_negative,
        n_zero=n_zero,
        metadata={"zero_tol": zero_tol, "c": c, "N": grid.num_points},
    )


# ---------------------------------------------------------------------------
# variational quantities

def weinstein(u: RealField, params: ModelParams) -> float:
    """Scale- and dilation-invariant functional minimized by the ground state."""
    l2 = l2_norm(u)
    if l2 == 0.0:
        raise ZeroField("Weinstein functional undefined at u = 0")
    p, alpha = params.p, params.alpha
    hdot = sobolev_norm(u, alpha / 2.0, homogeneous=True)
    lp = u.grid.dx * np.sum(np.abs(u.samples) ** (p + 1))
    return float(hdot ** ((p - 1) / alpha) * l2 ** (p + 1 - (p - 1) / alpha) / lp)


def constrained_rayleigh_core(
    form: np.ndarray,
    denominator_gram: np.ndarray,
    constraint_gram: np.ndarray,
    constraints: Sequence[np.ndarray],
) -> float:
    """Minimum of v^T form v / v^T D v over {v : c_i^T G v = 0}."""
    n = form.shape[0]
    if constraints:
        rows = np.stack([constraint_gram @ np.asarray(ci, dtype=float) for ci in constraints])
        u, s, vt = np.linalg.svd(rows, full_matrices=True)
        rank = int(np.sum(s > max(s[0], 1e-300) * 1e-10)) if s.size else 0
        if rank < len(constraints):
            raise DegenerateConstraints(
                f"{len(constraints)} constraints have rank {rank}"
            )
        basis = vt[rank:].T
    else:
        basis = np.eye(n)
    a = basis.T @ form @ basis
    b = basis.T @ denominator_gram @ basis
    vals = scipy.linalg.eigh(a, b, eigvals_only=True, subset_by_index=[0, 0])
    return float(vals[0])


def constrained_rayleigh_min(
    op: OperatorMatrix,
    constraints: Sequence[RealField],
    denominator: str = "X",
) -> float:
    """Minimize <H_c v, v> / ||v||^2 over v X-orthogonal to the constraints.

    `denominator` selects the norm in the quotient: "X" (H^{alpha/2}, the
    coercivity constant of the constrained lower bound) or "L2" (in which the
    unconstrained minimum is exactly the lowest matrix eigenvalue).
    Constraint orthogonality is always taken in the X inner product.
    """
    grid: Grid = op.metadata["grid"]
    alpha: float = op.metadata["alpha"]
    form = grid.dx * op.matrix
    gram_x = multiplier_gram(grid, (1.0 + grid.k**2) ** (alpha / 2.0))
    if denominator == "X":
        den = gram_x
    elif denominator == "L2":
        den = grid.dx * np.eye(grid.num_points)
    else:
        raise ValueError(f"unknown denominator {denominator!r}")
    vecs = [f.samples for f in constraints]
    return constrained_rayleigh_core(form, den, gram_x, vecs)


def natural_constraints(family: SolitonFamily, c: float) -> list[RealField]:
    """The Corollary constraints: N = I^{-1} grad P(U_c) and T'(0) U_c."""
    grid = family.grid
    alpha = family.params.alpha
    u_c = scale_to_speed(family, c)
    inv_bessel = apply_multiplier(
        RealField(grid, -u_c.samples),
        _inverse_bessel_symbol(alpha),
    )
    generator = RealField(grid, -derivative(u_c).samples)
    return [inv_bessel, generator]


def _inverse_bessel_symbol(alpha: float):
    from ..spectral import MultiplierSymbol

    return MultiplierSymbol(
        lambda k, a=alpha: (1.0 + k * k) ** (-a / 2.0), name=f"<dx>^-{alpha}"
    )
