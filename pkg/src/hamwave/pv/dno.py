"""Dirichlet-Neumann operator of the surface graph, by small-amplitude expansion.

For the harmonic extension H(eta)phi of a mean-zero trace phi to the fluid
region {x2 < eta(x1)} (decaying downward), the operator

    G(eta) phi = (-eta' dx1 + dx2) H(eta)phi |_surface

is evaluated through the flattening recursion: write psi for the boundary
data of the extension at the undisturbed level {x2 = 0}, so that

    phi = sum_m (eta^m / m!) |D|^m psi,        psi = sum_j psi_j,

with psi_0 = phi and psi_j = -sum_{m=1..j} (eta^m/m!) |D|^m psi_{j-m}.  The
expansion term of total order j in eta is then

    G_j(eta) phi = sum_{m=0..j}   (eta^m/m!) |D|^{m+1} psi_{j-m}
                 - eta' sum_{m=0..j-1} (eta^m/m!) dx |D|^m psi_{j-1-m},

so G_0 = |D| and G_1 = -dx(eta dx phi) - |D|(eta |D| phi).  The same psi sum
gives interior evaluations H(eta)phi(x) = sum_k psi_hat_k e^{|k| x2 + i k x1}
for x2 < 0, which is how the velocity at the vortex center is computed.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np
import scipy.linalg

from ..errors import ExpansionDiverging, NonZeroMean
from ..spectral import Grid, RealField, meanzero_basis

MEAN_TOL = 1e-12


class DNOperator:
    """Order-M Dirichlet-Neumann operator for a fixed surface profile."""

    def __init__(self, eta: RealField, order: int = 4, guard_floor: float = 1e-13):
        if order < 0:
            raise ValueError("expansion order must be nonnegative")
        self.grid = eta.grid
        self.eta = np.asarray(eta.samples, dtype=float)
        self.order = order
        self.guard_floor = guard_floor
        grid = self.grid
        self._absk = np.abs(grid.k)
        ik = 1j * grid.k
        ik[grid.nyquist_index] = 0.0
        self._ik = ik
        eta_hat = np.fft.fft(self.eta)
        self.eta_prime = np.real(np.fft.ifft(ik * eta_hat))
        # eta^m / m! for m = 0..order
        powers = [np.ones_like(self.eta)]
        for m in range(1, order + 1):
            powers.append(powers[-1] * self.eta / m)
        self._eta_pow = powers
        self._matrix: Optional[np.ndarray] = None
        self._solver = None

    # -- expansion ------------------------------------------------------------

    def _absk_power(self, v: np.ndarray, m: int) -> np.ndarray:
        if m == 0:
            return v
        return np.real(np.fft.ifft(self._absk**m * np.fft.fft(v)))

    def _dx_absk_power(self, v: np.ndarray, m: int) -> np.ndarray:
        return np.real(np.fft.ifft(self._ik * self._absk**m * np.fft.fft(v)))

    def _check_mean(self, phi: np.ndarray) -> None:
        scale = max(np.max(np.abs(phi)), 1.0)
        if abs(np.mean(phi)) > MEAN_TOL * scale:
            raise NonZeroMean("Dirichlet data must have zero mean")

    def psi_terms(self, phi: np.ndarray) -> list[np.ndarray]:
        """Flattened boundary data, one term per order in eta."""
        psi = [np.asarray(phi, dtype=float)]
        for j in range(1, self.order + 1):
            term = np.zeros_like(psi[0])
            for m in range(1, j + 1):
                term -= self._eta_pow[m] * self._absk_power(psi[j - m], m)
            psi.append(term)
        return psi

    def terms(self, phi: np.ndarray) -> list[np.ndarray]:
        """The expansion terms G_j(eta) phi for j = 0..order."""
        psi = self.psi_terms(phi)
        out = []
        for j in range(self.order + 1):
            g = np.zeros_like(psi[0])
            for m in range(0, j + 1):
                g += self._eta_pow[m] * self._absk_power(psi[j - m], m + 1)
            if j >= 1:
                tang = np.zeros_like(psi[0])
                for m in range(0, j):
                    tang += self._eta_pow[m] * self._dx_absk_power(psi[j - 1 - m], m)
                g -= self.eta_prime * tang
            out.append(g)
        return out

    def apply(self, phi, check_mean: bool = True) -> np.ndarray:
        """G(eta) phi truncated at the configured order, with a divergence guard.

        The operator annihilates constants identically, so internal callers
        may pass data with nonzero mean (check_mean=False); the public
        contract keeps the mean-zero precondition of the continuous operator.
        """
        phi = phi.samples if isinstance(phi, RealField) else np.asarray(phi, dtype=float)
        if check_mean:
            self._check_mean(phi)
        terms = self.terms(phi)
        norms = [np.linalg.norm(t) for t in terms]
        floor = self.guard_floor * max(norms[0], 1e-300)
        for j in range(1, len(terms)):
            if norms[j] > floor and norms[j] >= norms[j - 1]:
                raise ExpansionDiverging(
                    f"term ratio |G_{j}|/|G_{j - 1}| = "
                    f"{norms[j] / max(norms[j - 1], 1e-300):.3g} >= 1"
                )
        return np.sum(terms, axis=0)

    def apply_field(self, phi: RealField) -> RealField:
        return RealField(self.grid, self.apply(phi))

    # -- traces of the interior gradient ---------------------------------------

    def trace_gradient(self, phi) -> Tuple[np.ndarray, np.ndarray]:
        """(dx1 H(eta)phi, dx2 H(eta)phi) on the surface, total order <= M."""
        phi = phi.samples if isinstance(phi, RealField) else np.asarray(phi, dtype=float)
        self._check_mean(phi)
        psi = self.psi_terms(phi)
        a1 = np.zeros_like(psi[0])
        a2 = np.zeros_like(psi[0])
        for j in range(self.order + 1):
            for m in range(0, self.order + 1 - j):
                a1 += self._eta_pow[m] * self._dx_absk_power(psi[j], m)
                a2 += self._eta_pow[m] * self._absk_power(psi[j], m + 1)
        return a1, a2

    def flattened_boundary(self, phi) -> np.ndarray:
        phi = phi.samples if isinstance(phi, RealField) else np.asarray(phi, dtype=float)
        self._check_mean(phi)
        return np.sum(self.psi_terms(phi), axis=0)

    def interior_gradient(self, phi, point: Tuple[float, float]) -> Tuple[float, float]:
        """grad H(eta)phi at an interior point with x2 < 0 (decaying modes only)."""
        x1, x2 = point
        if not x2 < 0:
            raise ValueError("interior evaluation requires x2 < 0")
        psi_hat = np.fft.fft(self.flattened_boundary(phi))
        grid = self.grid
        e = np.exp(self._absk * x2 + 1j * grid.k * (x1 + grid.half_length))
        gx1 = np.real(np.sum(self._ik * psi_hat * e)) / grid.num_points
        gx2 = np.real(np.sum(self._absk * psi_hat * e)) / grid.num_points
        return float(gx1), float(gx2)

    # -- dense form and inverse -------------------------------------------------

    def matrix(self) -> np.ndarray:
        """Dense matrix of G(eta) on sample vectors (built column by column)."""
        if self._matrix is None:
            n = self.grid.num_points
            cols = np.empty((n, n))
            for j in range(n):
                e = np.zeros(n)
                e[j] = 1.0
                cols[:, j] = np.sum(self.terms(e), axis=0)
            self._matrix = cols
            self._meanzero_basis = meanzero_basis(n)
        return self._matrix

    def solve(self, f) -> np.ndarray:
        """G(eta)^{-1} f on the mean-zero subspace."""
        f = f.samples if isinstance(f, RealField) else np.asarray(f, dtype=float)
        scale = max(np.max(np.abs(f)), 1.0)
        if abs(np.mean(f)) > 1e-10 * scale:
            raise NonZeroMean("G(eta)^-1 is defined on mean-zero data only")
        if self._solver is None:
            mat = self.matrix()
            basis = self._meanzero_basis
            reduced = basis.T @ mat @ basis
            self._solver = (scipy.linalg.lu_factor(reduced), basis)
        lu, basis = self._solver
        coeffs = scipy.linalg.lu_solve(lu, basis.T @ (f - np.mean(f)))
        return basis @ coeffs
