"""Closed-form velocity potential / stream function of a submerged point vortex.

A unit-strength vortex sits at the center zv = (c1, c2) with c2 < 0; a mirror
vortex at zm = (c1, -c2) makes the combined field decay.  With

    F = (Gamma1 - Gamma2) + i (Theta1 - Theta2),   (difference pair)
    H = (Gamma1 + Gamma2) + i (Theta1 + Theta2),   (sum pair)

both F and H are holomorphic in z = x1 + i x2 away from the centers, and all
spatial derivatives reduce to powers of 1/(z - zv) and 1/(z - zm).  The pair
conventions give grad Theta = perp grad Gamma (Cauchy-Riemann), and the
center derivatives reduce to spatial ones:

    d/d(center_1) = -d/dx1 on both parts,
    d/d(center_2) = -d/dx2 on part 1, +d/dx2 on part 2,

which is why the combinations Xi = Theta1 + Theta2 and xi = (Theta_x1, Xi_x2)
appear: grad_center Theta = -xi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import SingularEvaluation

_TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class VortexFields:
    """Evaluators for Theta, Gamma, Xi, xi and their derivatives at one center."""

    center: Tuple[float, float]
    exclusion_radius: float = 1e-6

    @property
    def zv(self) -> complex:
        return complex(self.center[0], self.center[1])

    @property
    def zm(self) -> complex:
        return complex(self.center[0], -self.center[1])

    # -- internal helpers ---------------------------------------------------

    def _z(self, x1, x2) -> np.ndarray:
        z = np.asarray(x1, dtype=float) + 1j * np.asarray(x2, dtype=float)
        r1 = np.abs(z - self.zv)
        r2 = np.abs(z - self.zm)
        if np.any(r1 < self.exclusion_radius) or np.any(r2 < self.exclusion_radius):
            raise SingularEvaluation(
                f"evaluation within {self.exclusion_radius} of a vortex center"
            )
        return z

    def _pair_derivative(self, x1, x2, order: int, combine: int):
        """(1/2pi) [ (z-zv)^{-order} * (-1)^{order-1} (order-1)! +/- same at zm ].

        Returns the holomorphic derivative d^order/dz^order of F (combine=-1)
        or H (combine=+1).
        """
        z = self._z(x1, x2)
        fact = math.factorial(order - 1) * (-1.0) ** (order - 1)
        d1 = fact / (z - self.zv) ** order
        d2 = fact / (z - self.zm) ** order
        return (d1 + combine * d2) / _TWO_PI

    # -- values --------------------------------------------------------------

    def theta1(self, x1, x2) -> np.ndarray:
        z = self._z(x1, x2)
        dx1 = np.real(z) - self.center[0]
        dx2 = np.imag(z) - self.center[1]
        r = np.abs(z - self.zv)
        return -np.arctan2(dx1, r + dx2) * 2.0 / _TWO_PI

    def theta2(self, x1, x2) -> np.ndarray:
        z = self._z(x1, x2)
        dx1 = np.real(z) - self.center[0]
        dx2 = np.imag(z) + self.center[1]
        r = np.abs(z - self.zm)
        return np.arctan2(dx1, r - dx2) * 2.0 / _TWO_PI

    def theta(self, x1, x2) -> np.ndarray:
        return self.theta1(x1, x2) - self.theta2(x1, x2)

    def xi_big(self, x1, x2) -> np.ndarray:
        """Xi = Theta1 + Theta2."""
        return self.theta1(x1, x2) + self.theta2(x1, x2)

    def gamma1(self, x1, x2) -> np.ndarray:
        z = self._z(x1, x2)
        return np.log(np.abs(z - self.zv)) / _TWO_PI

    def gamma2(self, x1, x2) -> np.ndarray:
        z = self._z(x1, x2)
        return np.log(np.abs(z - self.zm)) / _TWO_PI

    def gamma(self, x1, x2) -> np.ndarray:
        return self.gamma1(x1, x2) - self.gamma2(x1, x2)

    def lambda_big(self, x1, x2) -> np.ndarray:
        """Lambda = Gamma1 + Gamma2 (conjugate of Xi)."""
        return self.gamma1(x1, x2) + self.gamma2(x1, x2)

    # -- first derivatives ----------------------------------------------------
    # F' = Gamma_x1 + i Theta_x1 and Cauchy-Riemann give the x2 derivatives.

    def theta_x1(self, x1, x2) -> np.ndarray:
        return np.imag(self._pair_derivative(x1, x2, 1, -1))

    def theta_x2(self, x1, x2) -> np.ndarray:
        return np.real(self._pair_derivative(x1, x2, 1, -1))

    def gamma_x1(self, x1, x2) -> np.ndarray:
        return np.real(self._pair_derivative(x1, x2, 1, -1))

    def gamma_x2(self, x1, x2) -> np.ndarray:
        return -np.imag(self._pair_derivative(x1, x2, 1, -1))

    def xi_big_x1(self, x1, x2) -> np.ndarray:
        return np.imag(self._pair_derivative(x1, x2, 1, +1))

    def xi_big_x2(self, x1, x2) -> np.ndarray:
        return np.real(self._pair_derivative(x1, x2, 1, +1))

    def lambda_x1(self, x1, x2) -> np.ndarray:
        return np.real(self._pair_derivative(x1, x2, 1, +1))

    def lambda_x2(self, x1, x2) -> np.ndarray:
        return -np.imag(self._pair_derivative(x1, x2, 1, +1))

    def grad_theta(self, x1, x2) -> Tuple[np.ndarray, np.ndarray]:
        d = self._pair_derivative(x1, x2, 1, -1)
        return np.imag(d), np.real(d)

    def xi(self, x1, x2) -> Tuple[np.ndarray, np.ndarray]:
        """xi = (Theta_x1, Xi_x2) = -grad_center Theta."""
        return self.theta_x1(x1, x2), self.xi_big_x2(x1, x2)

    # -- second derivatives ---------------------------------------------------

    def theta_x1x1(self, x1, x2) -> np.ndarray:
        return np.imag(self._pair_derivative(x1, x2, 2, -1))

    def theta_x1x2(self, x1, x2) -> np.ndarray:
        return np.real(self._pair_derivative(x1, x2, 2, -1))

    def theta_x2x2(self, x1, x2) -> np.ndarray:
        return -np.imag(self._pair_derivative(x1, x2, 2, -1))

    def gamma_x1x1(self, x1, x2) -> np.ndarray:
        return np.real(self._pair_derivative(x1, x2, 2, -1))

    def gamma_x1x2(self, x1, x2) -> np.ndarray:
        return -np.imag(self._pair_derivative(x1, x2, 2, -1))

    def gamma_x2x2(self, x1, x2) -> np.ndarray:
        return -np.real(self._pair_derivative(x1, x2, 2, -1))

    def xi_big_x1x1(self, x1, x2) -> np.ndarray:
        return np.imag(self._pair_derivative(x1, x2, 2, +1))

    def xi_big_x1x2(self, x1, x2) -> np.ndarray:
        return np.real(self._pair_derivative(x1, x2, 2, +1))

    def xi_big_x2x2(self, x1, x2) -> np.ndarray:
        return -np.imag(self._pair_derivative(x1, x2, 2, +1))

    def lambda_x1x2(self, x1, x2) -> np.ndarray:
        return -np.imag(self._pair_derivative(x1, x2, 2, +1))

    # -- third derivatives (needed by center Hessians of the energy) ----------

    def theta_x1x1x1(self, x1, x2) -> np.ndarray:
        return np.imag(self._pair_derivative(x1, x2, 3, -1))

    def theta_x1x1x2(self, x1, x2) -> np.ndarray:
        return np.real(self._pair_derivative(x1, x2, 3, -1))

    def theta_x1x2x2(self, x1, x2) -> np.ndarray:
        return -np.imag(self._pair_derivative(x1, x2, 3, -1))

    def theta_x2x2x2(self, x1, x2) -> np.ndarray:
        return -np.real(self._pair_derivative(x1, x2, 3, -1))

    def xi_big_x1x1x1(self, x1, x2) -> np.ndarray:
        return np.imag(self._pair_derivative(x1, x2, 3, +1))

    def xi_big_x1x1x2(self, x1, x2) -> np.ndarray:
        return np.real(self._pair_derivative(x1, x2, 3, +1))

    def xi_big_x1x2x2(self, x1, x2) -> np.ndarray:
        return -np.imag(self._pair_derivative(x1, x2, 3, +1))

    def xi_big_x2x2x2(self, x1, x2) -> np.ndarray:
        return -np.real(self._pair_derivative(x1, x2, 3, +1))

    # -- part-2 fields at the center (mirror advection terms) -----------------

    def theta2_x1(self, x1, x2) -> np.ndarray:
        z = self._z(x1, x2)
        return np.imag(1.0 / (z - self.zm)) / _TWO_PI

    def gamma2_x2(self, x1, x2) -> np.ndarray:
        z = self._z(x1, x2)
        return -np.imag(1.0 / (z - self.zm)) / _TWO_PI

    def gamma2_hessian(self, x1, x2) -> np.ndarray:
        """Spatial Hessian D_x^2 Gamma2 as a 2x2 matrix (scalar points only)."""
        z = self._z(x1, x2)
        d2 = -1.0 / (z - self.zm) ** 2 / _TWO_PI
        g11 = np.real(d2)
        g12 = -np.imag(d2)
        return np.array([[g11, g12], [g12, -g11]])

    # -- assembled matrix fields ----------------------------------------------

    def center_hessian_theta(self, x1, x2):
        """D^2_center Theta = [[Theta_x1x1, Xi_x1x2], [Xi_x1x2, Theta_x2x2]]."""
        t11 = self.theta_x1x1(x1, x2)
        x12 = self.xi_big_x1x2(x1, x2)
        t22 = self.theta_x2x2(x1, x2)
        return t11, x12, t22

    def center_hessian_gamma(self, x1, x2):
        """D^2_center Gamma = [[Gamma_x1x1, Lambda_x1x2], [Lambda_x1x2, Gamma_x2x2]]."""
        g11 = self.gamma_x1x1(x1, x2)
        l12 = self.lambda_x1x2(x1, x2)
        g22 = self.gamma_x2x2(x1, x2)
        return g11, l12, g22


_EVALUATORS = {
    "theta1": "theta1",
    "theta2": "theta2",
    "theta": "theta",
    "Xi": "xi_big",
    "xi_big": "xi_big",
    "gamma1": "gamma1",
    "gamma2": "gamma2",
    "gamma": "gamma",
    "theta_x1": "theta_x1",
    "theta_x2": "theta_x2",
    "gamma_x1": "gamma_x1",
    "gamma_x2": "gamma_x2",
    "Xi_x1": "xi_big_x1",
    "Xi_x2": "xi_big_x2",
    "theta_x1x1": "theta_x1x1",
    "theta_x1x2": "theta_x1x2",
    "theta_x2x2": "theta_x2x2",
}


def vortex_eval(fields: VortexFields, which: str, x1, x2):
    """Name-based dispatch over the closed-form evaluators.

    `which` may be any key of the scalar table above, or "xi" / "grad_theta"
    for the 2-vector fields.
    """
    if which == "xi":
        return fields.xi(x1, x2)
    if which == "grad_theta":
        return fields.grad_theta(x1, x2)
    try:
        return getattr(fields, _EVALUATORS[which])(x1, x2)
    except KeyError:
        raise ValueError(f"unknown vortex field {which!r}") from None
