"""Pseudospectral time evolution of dt u = dx(Lambda^alpha u - u^p).

The stiff dispersive linear part ik|k|^alpha is integrated exactly with an
exponential RK4 scheme (contour-integral phi coefficients); the nonlinear
flux -dx(u^p) is evaluated pseudospectrally with 2/3-rule dealiasing.
Trajectories carry conservation monitors and the orbital distance to a
reference solitary wave.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional

import numpy as np

from ..errors import BlowupDetected, ResolutionLoss
from ..spectral import (
    Grid,
    RealField,
    mass,
    sobolev_norm,
    spectral_tail_fraction,
    translate,
)
from .waves import (
    ModelParams,
    SolitonFamily,
    SpectralReport,
    energy,
    momentum,
    scale_to_speed,
)


def default_time_step(grid: Grid, alpha: float) -> float:
    """Empirically stable step for the exponential integrator: 0.2 dx^alpha."""
    return 0.2 * grid.dx**alpha


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float
    t_final: float
    stride: int = 50
    dealias: bool = True
    integrator: str = "etdrk4"
    blowup_factor: float = 1e3
    tail_threshold: float = 1e-6
    initial_tail_threshold: float = 1e-8

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.t_final < self.dt:
            raise ValueError("t_final must be at least dt")
        if self.stride < 1:
            raise ValueError("stride must be >= 1")


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    u: RealField
    energy: float
    momentum: float
    mass: float
    rho: float
    shift: float


@dataclass(frozen=True)
class StabilityReport:
    verdict: str                   # "bounded" | "escaped" | "indeterminate"
    sup_rho: float
    escape_time: Optional[float]
    delta: float
    direction: str
    k_stable: float
    k_escape: float
    c: float
    seed: int
    t_final: float
    samples: tuple = ()
    metadata: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# right-hand side and stepping

def rhs(u: RealField, params: ModelParams, dealias_power: bool = True) -> RealField:
    """dx(Lambda^alpha u - u^p); the power is dealiased by the 2/3 rule."""
    grid = u.grid
    k = grid.k
    lin = 1j * k * np.abs(k) ** params.alpha
    lin[grid.nyquist_index] = 0.0
    u_hat = np.fft.fft(u.samples)
    p_hat = np.fft.fft(u.samples**params.p)
    if dealias_power:
        n = np.rint(k * grid.half_length / np.pi).astype(int)
        p_hat[np.abs(n) > grid.num_points // 3] = 0.0
    ik = 1j * k
    ik[grid.nyquist_index] = 0.0
    out = lin * u_hat - ik * p_hat
    return RealField(grid, np.real(np.fft.ifft(out)))


class Etdrk4Stepper:
    """Exponential-integrator RK4 with contour-evaluated phi coefficients.

    The linear symbol ik|k|^alpha is treated exactly; the coefficients are
    computed as means over a unit circle around each dt*L(k), which avoids
    cancellation for small arguments.
    """

    def __init__(self, grid: Grid, params: ModelParams, dt: float,
                 dealias: bool = True, n_contour: int = 32):
        self.grid = grid
        self.params = params
        self.dt = dt
        self.dealias = dealias
        k = grid.k
        lin = 1j * k * np.abs(k) ** params.alpha
        lin[grid.nyquist_index] = 0.0
        z = dt * lin
        self.exp_full = np.exp(z)
        self.exp_half = np.exp(z / 2.0)
        roots = np.exp(2j * np.pi * (np.arange(n_contour) + 0.5) / n_contour)
        zr = z[:, None] + roots[None, :]
        self.f0 = dt * np.mean((np.exp(zr / 2.0) - 1.0) / zr, axis=1)
        self.f1 = dt * np.mean(
            (-4.0 - zr + np.exp(zr) * (4.0 - 3.0 * zr + zr**2)) / zr**3, axis=1
        )
        self.f2 = dt * np.mean((2.0 + zr + np.exp(zr) * (zr - 2.0)) / zr**3, axis=1)
        self.f3 = dt * np.mean(
            (-4.0 - 3.0 * zr - zr**2 + np.exp(zr) * (4.0 - zr)) / zr**3, axis=1
        )
        ik = 1j * k
        ik[grid.nyquist_index] = 0.0
        self._ik = ik
        n = np.rint(k * grid.half_length / np.pi).astype(int)
        self._keep = np.abs(n) <= grid.num_points // 3

    def _nonlinear(self, u_hat: np.ndarray) -> np.ndarray:
        u = np.real(np.fft.ifft(u_hat))
        p_hat = np.fft.fft(u**self.params.p)
        if self.dealias:
            p_hat = p_hat * self._keep
        return -self._ik * p_hat

    def step(self, u_hat: np.ndarray) -> np.ndarray:
        n0 = self._nonlinear(u_hat)
        a = self.exp_half * u_hat + self.f0 * n0
        n1 = self._nonlinear(a)
        b = self.exp_half * u_hat + self.f0 * n1
        n2 = self._nonlinear(b)
        cc = self.exp_half * a + self.f0 * (2.0 * n2 - n0)
        n3 = self._nonlinear(cc)
        return (
            self.exp_full * u_hat
            + self.f1 * n0
            + 2.0 * self.f2 * (n1 + n2)
            + self.f3 * n3
        )


def evolve_iter(
    u0: RealField,
    params: ModelParams,
    config: EvolutionConfig,
    reference: Optional[RealField] = None,
) -> Iterator[TrajectorySample]:
    """Yield monitor samples every `stride` steps (and at t=0 and t_final).

    When `reference` (a solitary wave U_c) is given, each sample carries the
    orbital distance to its translate orbit in the H^{alpha/2} norm.
    """
    tail0 = spectral_tail_fraction(u0)
    if tail0 > config.initial_tail_threshold:
        raise ResolutionLoss(
            f"initial spectral tail fraction {tail0:.3e} exceeds "
            f"{config.initial_tail_threshold:.1e}"
        )
    stepper = Etdrk4Stepper(u0.grid, params, config.dt, dealias=config.dealias)
    ceiling = config.blowup_factor * max(np.max(np.abs(u0.samples)), 1e-300)
    n_steps = int(round(config.t_final / config.dt))

    def make_sample(step_index: int, u_hat: np.ndarray) -> TrajectorySample:
        t = step_index * config.dt
        u = RealField(u0.grid, np.real(np.fft.ifft(u_hat)))
        if np.max(np.abs(u.samples)) > ceiling:
            raise BlowupDetected(f"max-norm ceiling {ceiling:.3e} exceeded at t={t:.4g}")
        if spectral_tail_fraction(u) > config.tail_threshold:
            raise ResolutionLoss(f"spectral tail grew past threshold at t={t:.4g}")
        if reference is not None:
            dist = orbital_distance(u, reference, params.alpha / 2.0)
            rho, shift = dist.distance, dist.shift
        else:
            rho, shift = np.nan, np.nan
        return TrajectorySample(
            t=t,
            u=u,
            energy=energy(u, params),
            momentum=momentum(u),
            mass=mass(u),
            rho=rho,
            shift=shift,
        )

    u_hat = np.fft.fft(u0.samples)
    yield make_sample(0, u_hat)
    for step_index in range(1, n_steps + 1):
        u_hat = stepper.step(u_hat)
        if not np.all(np.isfinite(u_hat)):
            raise BlowupDetected(f"non-finite state at t={step_index * config.dt:.4g}")
        if step_index % config.stride == 0 or step_index == n_steps:
            yield make_sample(step_index, u_hat)


def evolve(
    u0: RealField,
    params: ModelParams,
    config: EvolutionConfig,
    reference: Optional[RealField] = None,
) -> list[TrajectorySample]:
    return list(evolve_iter(u0, params, config, reference))


# ---------------------------------------------------------------------------
# orbital distance

class OrbitalDistance(NamedTuple):
    distance: float
    shift: float
    refined: bool


def orbital_distance(
    u: RealField,
    u_c: RealField,
    norm_index: float,
    max_newton: int = 40,
) -> OrbitalDistance:
    """Distance from u to the translate orbit of u_c in H^s, s = norm_index.

    The shift is found by a coarse FFT cross-correlation argmax refined by
    Newton on the orthogonality condition

        (translate(u, -shift) - U_c, U_c')_{H^s} = 0,

    so `shift` is the displacement of u relative to U_c: u is closest to
    translate(u_c, shift), and distance = ||translate(u, -shift) - U_c||_{H^s}.
    If Newton stalls, the coarse optimum is returned with refined=False.
    """
    grid = u.grid
    s = norm_index
    w = (1.0 + grid.k**2) ** s
    u_hat = np.fft.fft(u.samples)
    c_hat = np.fft.fft(u_c.samples)
    # (translate(u, -sigma_j), U_c)_X over all grid shifts sigma_j = j dx
    corr = np.real(np.fft.ifft(w * u_hat * np.conj(c_hat)))
    coarse = float(np.argmax(corr)) * grid.dx
    if coarse > grid.half_length:
        coarse -= 2.0 * grid.half_length
    dc_hat = 1j * grid.k * c_hat
    dc_hat[grid.nyquist_index] = 0.0

    def pairing(sigma: float, target_hat: np.ndarray) -> float:
        phase = np.exp(1j * grid.k * sigma)
        phase[grid.nyquist_index] = np.cos(grid.k[grid.nyquist_index] * sigma)
        val = np.sum(w * (u_hat * phase) * np.conj(target_hat))
        return float(np.real(val)) * grid.dx / grid.num_points

    norm_scale = sobolev_norm(u_c, s) * max(sobolev_norm(u, s), 1e-300)
    sigma = coarse
    refined = False
    for _ in range(max_newton):
        psi = pairing(sigma, dc_hat)  # (U_c, U_c')_X = 0, so no constant term
        dpsi = pairing(sigma, -1j * grid.k * dc_hat)
        if abs(psi) <= 1e-13 * max(norm_scale, 1e-300):
            refined = True
            break
        if abs(dpsi) < 1e-300:
            break
        step = -psi / dpsi
        if abs(step) > grid.half_length:  # left the correlation window
            break
        sigma += step
    best = sigma if refined else coarse
    diff = translate(u, -best).samples - u_c.samples
    distance = sobolev_norm(RealField(grid, diff), s)
    return OrbitalDistance(distance=distance, shift=float(best), refined=refined)


# ---------------------------------------------------------------------------
# stability experiments

def _perturbation_direction(
    family: SolitonFamily,
    direction: str,
    rng: np.random.Generator,
    spectral: Optional[SpectralReport],
    sign: float,
) -> RealField:
    grid = family.grid
    if direction == "negative_mode":
        if spectral is None:
            raise ValueError("negative_mode direction requires a SpectralReport")
        vec = spectral.chi.copy()
    elif direction == "random_even":
        coeff = rng.standard_normal(12)
        profile = np.zeros(grid.num_points)
        for m, a in enumerate(coeff, start=1):
            profile += a * np.cos(np.pi * m * grid.x / grid.half_length)
        vec = profile * np.exp(-((grid.x / (grid.half_length / 3.0)) ** 2))
    else:
        raise ValueError(f"unknown direction {direction!r}")
    norm = sobolev_norm(RealField(grid, vec), family.params.alpha / 2.0)
    return RealField(grid, sign * vec / norm)


def stability_experiment(
    family: SolitonFamily,
    c: float,
    delta: float,
    direction: str,
    config: EvolutionConfig,
    seed: int = 0,
    spectral: Optional[SpectralReport] = None,
    k_stable: float = 10.0,
    k_escape: float = 100.0,
    direction_sign: float = 1.0,
) -> StabilityReport:
    """Evolve U_c + delta * direction and watch the orbital distance.

    Bounded: sup rho < k_stable * delta through t_final.
    Escaped: rho exceeds k_escape * delta before t_final; blowup counts as
    escaped. The run stops as soon as the escape threshold is crossed.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    rng = np.random.default_rng(seed)
    u_c = scale_to_speed(family, c)
    if delta > 0:
        pert = _perturbation_direction(family, direction, rng, spectral, direction_sign)
        u0 = RealField(family.grid, u_c.samples + delta * pert.samples)
    else:
        u0 = u_c
    sup_rho = 0.0
    escape_time = None
    kept: list[TrajectorySample] = []
    try:
        for sample in evolve_iter(u0, family.params, config, reference=u_c):
            sup_rho = max(sup_rho, sample.rho)
            kept.append(sample)
            if delta > 0 and sample.rho > k_escape * delta:
                escape_time = sample.t
                break
    except BlowupDetected:
        escape_time = kept[-1].t if kept else 0.0
        sup_rho = np.inf
    if escape_time is not None:
        verdict = "escaped"
    elif delta == 0 or sup_rho < k_stable * delta:
        verdict = "bounded"
    else:
        verdict = "indeterminate"
    return StabilityReport(
        verdict=verdict,
        sup_rho=float(sup_rho),
        escape_time=escape_time,
        delta=delta,
        direction=direction,
        k_stable=k_stable,
        k_escape=k_escape,
        c=c,
        seed=seed,
        t_final=config.t_final,
        samples=tuple(kept),
        metadata={"direction_sign": direction_sign},
    )
