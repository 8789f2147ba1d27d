"""Periodic spectral discretization on [-L, L).

The whole line is approximated by a periodic box; every operator in the
package is built from the pieces here: uniform grids, FFT transforms,
Fourier multipliers, Sobolev norms, translations, and 2/3-rule dealiasing.

Conventions
-----------
* grid points  x_j = -L + j*dx,  dx = 2L/N  (N even),
* wavenumbers  k_n = pi*n/L  for n in {-N/2, ..., N/2-1} in FFT order,
* quadrature   integral(f) ~ dx * sum(f),
* Parseval     dx * sum(|f|^2) = (2L/N^2) * sum(|fft(f)|^2).

The unpaired -N/2 (Nyquist) mode is zeroed whenever a multiplier symbol is
not real there, which covers all derivative-type operators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .errors import ZeroModeRejected

# Centralized tolerances.
TRANSFORM_TOL = 1e-12      # roundtrip / Hermitian symmetry
PARITY_TOL = 1e-12         # even/odd flag enforcement, relative to max norm
TAIL_TOL_EXPONENTIAL = 1e-10
TAIL_TOL_ALGEBRAIC = 1e-6


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on [-L, L) with N points."""

    half_length: float
    num_points: int

    def __post_init__(self):
        if not self.half_length > 0:
            raise ValueError(f"half_length must be positive, got {self.half_length}")
        n = self.num_points
        if n % 2 != 0 or n < 8:
            raise ValueError(f"num_points must be even and >= 8, got {n}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.num_points

    @cached_property
    def x(self) -> np.ndarray:
        return -self.half_length + self.dx * np.arange(self.num_points)

    @cached_property
    def k(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.num_points, d=self.dx)

    @property
    def nyquist_index(self) -> int:
        return self.num_points // 2


@dataclass(frozen=True)
class RealField:
    """Real samples of a function on a Grid, with optional parity flag."""

    grid: Grid
    samples: np.ndarray
    parity: Optional[str] = None   # None | "even" | "odd"

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", samples)
        if samples.shape != (self.grid.num_points,):
            raise ValueError("sample count does not match grid")
        if not np.all(np.isfinite(samples)):
            raise ValueError("field contains non-finite values")
        if self.parity is not None:
            defect = parity_defect(self.grid, samples, self.parity)
            scale = max(np.max(np.abs(samples)), 1e-300)
            if defect > PARITY_TOL * scale:
                raise ValueError(
                    f"{self.parity} flag violated: defect {defect:.3e} "
                    f"exceeds {PARITY_TOL:.0e} * max|f|"
                )

    def with_samples(self, samples: np.ndarray, parity: Optional[str] = None) -> "RealField":
        return RealField(self.grid, samples, parity)

    def evaluate(self, points: np.ndarray) -> np.ndarray:
        """Evaluate the trig-polynomial interpolant at arbitrary points."""
        return evaluate_interpolant(self.grid, self.samples, points)


@dataclass(frozen=True)
class SpectralField:
    """FFT coefficients (numpy convention) of a RealField."""

    grid: Grid
    coefficients: np.ndarray

    def __post_init__(self):
        coeff = np.asarray(self.coefficients, dtype=complex)
        object.__setattr__(self, "coefficients", coeff)
        if coeff.shape != (self.grid.num_points,):
            raise ValueError("coefficient count does not match grid")
        defect = hermitian_defect(coeff)
        scale = max(np.max(np.abs(coeff)), 1e-300)
        if defect > TRANSFORM_TOL * scale:
            raise ValueError(
                f"Hermitian symmetry defect {defect:.3e} exceeds tolerance; "
                "inverse transform would not be real"
            )


def parity_defect(grid: Grid, samples: np.ndarray, parity: str) -> float:
    mirrored = samples[(-np.arange(grid.num_points)) % grid.num_points]
    if parity == "even":
        return float(np.max(np.abs(samples - mirrored)))
    if parity == "odd":
        return float(np.max(np.abs(samples + mirrored)))
    raise ValueError(f"unknown parity {parity!r}")


def hermitian_defect(coefficients: np.ndarray) -> float:
    n = coefficients.shape[0]
    idx = (-np.arange(n)) % n
    return float(np.max(np.abs(coefficients - np.conj(coefficients[idx]))))


def even_part(f: RealField) -> RealField:
    mirrored = f.samples[(-np.arange(f.grid.num_points)) % f.grid.num_points]
    return RealField(f.grid, 0.5 * (f.samples + mirrored), parity="even")


def odd_part(f: RealField) -> RealField:
    mirrored = f.samples[(-np.arange(f.grid.num_points)) % f.grid.num_points]
    return RealField(f.grid, 0.5 * (f.samples - mirrored), parity="odd")


# ---------------------------------------------------------------------------
# transforms

def transform(f: RealField) -> SpectralField:
    return SpectralField(f.grid, np.fft.fft(f.samples))


def inverse_transform(s: SpectralField) -> RealField:
    return RealField(s.grid, np.real(np.fft.ifft(s.coefficients)))


def evaluate_interpolant(grid: Grid, samples: np.ndarray, points: np.ndarray) -> np.ndarray:
    """Evaluate sum_n c_n e^{i k_n (x+L)} / N at arbitrary (possibly off-grid) x."""
    points = np.atleast_1d(np.asarray(points, dtype=float))
    coeff = np.fft.fft(samples)
    out = np.empty(points.shape[0])
    # chunked to bound the phase-matrix memory
    chunk = max(1, 2**22 // grid.num_points)
    for start in range(0, points.shape[0], chunk):
        pts = points[start:start + chunk]
        phase = np.exp(1j * np.outer(pts + grid.half_length, grid.k))
        out[start:start + chunk] = np.real(phase @ coeff) / grid.num_points
    return out


def evaluate_affine(grid: Grid, samples: np.ndarray, start: float, step: float,
                    count: int) -> np.ndarray:
    """Interpolant values at the uniform points start + step*j, j = 0..count-1.

    Chirp-z evaluation, O(N log N); exact (to rounding) for any real step, so
    dilating a profile onto its own grid costs one Bluestein transform instead
    of an N^2 phase sum.
    """
    import scipy.signal

    n = grid.num_points
    coeff = np.fft.fft(samples)
    two_l = 2.0 * grid.half_length
    t0 = (start + grid.half_length) / two_l
    dt = step / two_l
    w = np.exp(2j * np.pi * dt)
    a = np.exp(-2j * np.pi * t0)
    lo = coeff.copy()
    lo[n // 2:] = 0.0
    hi = coeff - lo
    s_lo = scipy.signal.czt(lo, m=count, w=w, a=a)
    s_hi = scipy.signal.czt(hi, m=count, w=w, a=a)
    t = t0 + dt * np.arange(count)
    return np.real(s_lo + np.exp(-2j * np.pi * n * t) * s_hi) / n


# ---------------------------------------------------------------------------
# multipliers

@dataclass(frozen=True)
class MultiplierSymbol:
    """Fourier multiplier m(k) with an explicit zero-mode policy.

    zero_mode_policy: "evaluate" uses m(0) as given, "zero" forces the output
    mean to vanish, "reject" raises ZeroModeRejected when the input has a
    nonzero mean (homogeneous operators like |dx|^{-1} outside their domain).
    """

    symbol: Callable[[np.ndarray], np.ndarray]
    zero_mode_policy: str = "evaluate"
    name: str = ""
    zero_nyquist: Optional[bool] = None   # None = auto (zero when non-real there)

    def values(self, grid: Grid) -> np.ndarray:
        k = grid.k.copy()
        if self.zero_mode_policy != "evaluate":
            k[0] = 1.0  # dodge singular symbols at k=0; mode is overwritten below
        m = np.asarray(self.symbol(k), dtype=complex)
        if self.zero_mode_policy != "evaluate":
            m[0] = 0.0
        zero_nyq = self.zero_nyquist
        if zero_nyq is None:
            zero_nyq = bool(abs(m[grid.nyquist_index].imag) > 0)
        if zero_nyq:
            m[grid.nyquist_index] = 0.0
        return m


def apply_multiplier(f: RealField, m: MultiplierSymbol) -> RealField:
    if m.zero_mode_policy == "reject":
        mean_coeff = abs(np.sum(f.samples)) / f.grid.num_points
        scale = max(np.max(np.abs(f.samples)), 1e-300)
        if mean_coeff > 1e-12 * scale:
            raise ZeroModeRejected(
                f"multiplier {m.name or m.symbol!r} requires a mean-zero field "
                f"(mean {mean_coeff:.3e})"
            )
    coeff = np.fft.fft(f.samples) * m.values(f.grid)
    return RealField(f.grid, np.real(np.fft.ifft(coeff)))


def derivative(f: RealField, order: int = 1) -> RealField:
    sym = MultiplierSymbol(lambda k, n=order: (1j * k) ** n, name=f"d/dx^{order}")
    return apply_multiplier(f, sym)


def fractional_laplacian_symbol(alpha: float) -> MultiplierSymbol:
    return MultiplierSymbol(lambda k, a=alpha: np.abs(k) ** a, name=f"|dx|^{alpha}")


def hilbert_symbol() -> MultiplierSymbol:
    return MultiplierSymbol(lambda k: -1j * np.sign(k), name="H")


def bessel_symbol(s: float) -> MultiplierSymbol:
    return MultiplierSymbol(lambda k, ss=s: (1.0 + k * k) ** (ss / 2.0), name=f"<dx>^{s}")


# ---------------------------------------------------------------------------
# norms and inner products

def l2_inner(f: RealField, g: RealField) -> float:
    return float(f.grid.dx * np.dot(f.samples, g.samples))


def l2_norm(f: RealField) -> float:
    return float(np.sqrt(f.grid.dx) * np.linalg.norm(f.samples))


def mass(f: RealField) -> float:
    return float(f.grid.dx * np.sum(f.samples))


def _sobolev_weights(grid: Grid, s: float, homogeneous: bool) -> np.ndarray:
    k = grid.k
    if homogeneous:
        w = np.zeros_like(k)
        nz = k != 0
        w[nz] = np.abs(k[nz]) ** (2.0 * s)
        return w
    return (1.0 + k * k) ** s


def sobolev_inner(f: RealField, g: RealField, s: float, homogeneous: bool = False) -> float:
    grid = f.grid
    for h in (f, g):
        if homogeneous and s < 0:
            mean_coeff = abs(np.sum(h.samples)) / grid.num_points
            scale = max(np.max(np.abs(h.samples)), 1e-300)
            if mean_coeff > 1e-12 * scale:
                raise ZeroModeRejected(
                    f"homogeneous H^{s} norm requires mean-zero fields"
                )
    w = _sobolev_weights(grid, s, homogeneous)
    fh = np.fft.fft(f.samples)
    gh = np.fft.fft(g.samples)
    val = np.real(np.sum(w * fh * np.conj(gh))) * grid.dx / grid.num_points
    return float(val)


def sobolev_norm(f: RealField, s: float, homogeneous: bool = False) -> float:
    return float(np.sqrt(max(sobolev_inner(f, f, s, homogeneous), 0.0)))


def multiplier_gram(grid: Grid, weights: np.ndarray) -> np.ndarray:
    """Dense Gram matrix of the inner product (f,g) = (dx/N) sum w |fft|^2.

    `weights` are per-mode values w(k_n) >= 0 in FFT order.  The matrix is the
    real circulant dx * F^H diag(w) F / N.
    """
    kernel = np.real(np.fft.ifft(weights))
    n = grid.num_points
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return grid.dx * kernel[idx]


def multiplier_matrix(grid: Grid, m: MultiplierSymbol) -> np.ndarray:
    """Dense matrix of a Fourier multiplier acting on sample vectors."""
    values = m.values(grid)
    kernel = np.real(np.fft.ifft(values))
    n = grid.num_points
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return kernel[idx]


def meanzero_basis(n: int) -> np.ndarray:
    """Euclidean-orthonormal basis (columns) of the mean-zero subspace of R^n."""
    cols = []
    j = np.arange(n)
    for m in range(1, n // 2):
        cols.append(np.cos(2 * np.pi * m * j / n) / np.sqrt(n / 2))
        cols.append(np.sin(2 * np.pi * m * j / n) / np.sqrt(n / 2))
    cols.append(np.cos(np.pi * j) / np.sqrt(n))  # unpaired Nyquist cosine
    return np.column_stack(cols)


# ---------------------------------------------------------------------------
# translations and dealiasing

def translate(f: RealField, shift: float) -> RealField:
    """Spectral translation f(. - shift); exact for band-limited fields."""
    grid = f.grid
    phase = np.exp(-1j * grid.k * shift)
    # symmetric treatment of the unpaired mode keeps the output real
    phase[grid.nyquist_index] = np.cos(grid.k[grid.nyquist_index] * shift)
    coeff = np.fft.fft(f.samples) * phase
    return RealField(grid, np.real(np.fft.ifft(coeff)))


def dealias(f: RealField) -> RealField:
    """2/3-rule: zero all modes with |n| > N/3."""
    grid = f.grid
    n = np.rint(grid.k * grid.half_length / np.pi).astype(int)
    keep = np.abs(n) <= grid.num_points // 3
    coeff = np.fft.fft(f.samples) * keep
    return RealField(grid, np.real(np.fft.ifft(coeff)))


def spectral_tail_fraction(f: RealField) -> float:
    """Fraction of spectral energy carried by modes with |n| > N/3."""
    grid = f.grid
    coeff = np.fft.fft(f.samples)
    n = np.rint(grid.k * grid.half_length / np.pi).astype(int)
    tail = np.abs(n) > grid.num_points // 3
    total = np.sum(np.abs(coeff) ** 2)
    if total == 0.0:
        return 0.0
    return float(np.sum(np.abs(coeff[tail]) ** 2) / total)


def boundary_tail(f: RealField) -> float:
    """Max |f| over the outer 2% of the box, relative to max |f| (reported, not asserted)."""
    n = max(1, f.grid.num_points // 50)
    edge = max(np.max(np.abs(f.samples[:n])), np.max(np.abs(f.samples[-n:])))
    scale = max(np.max(np.abs(f.samples)), 1e-300)
    return float(edge / scale)


# ---------------------------------------------------------------------------
# serialization

def write_field_csv(path, f: RealField) -> None:
    """Two-column CSV `x,value` with 17 significant digits."""
    with open(path, "w") as fh:
        fh.write("x,value\n")
        for x, v in zip(f.grid.x, f.samples):
            fh.write(f"{x:.17g},{v:.17g}\n")


def read_field_csv(path, grid: Optional[Grid] = None) -> RealField:
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    x, v = data[:, 0], data[:, 1]
    if grid is None:
        n = x.shape[0]
        dx = x[1] - x[0]
        grid = Grid(half_length=0.5 * n * dx, num_points=n)
    if not np.allclose(grid.x, x, atol=1e-10 * grid.dx):
        raise ValueError("CSV abscissas do not match the grid")
    return RealField(grid, v)


def write_spectral_csv(path, s: SpectralField) -> None:
    """Three-column CSV `n,re,im` in FFT order."""
    n_index = np.rint(s.grid.k * s.grid.half_length / np.pi).astype(int)
    with open(path, "w") as fh:
        fh.write("n,re,im\n")
        for n, c in zip(n_index, s.coefficients):
            fh.write(f"{n},{c.real:.17g},{c.imag:.17g}\n")
