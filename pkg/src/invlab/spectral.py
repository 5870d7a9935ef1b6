"""Periodic spectral toolbox: grids, transforms, derivatives, inversions.

Fields live on a uniform doubly periodic grid; spectra hold normalized
Fourier coefficients (coefficient of the constant mode equals the mean).
All operations are pure functions and safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable

import numpy as np

__all__ = [
    "Grid2D",
    "Field",
    "Spectrum",
    "NonFiniteFieldError",
    "forward",
    "inverse",
    "ddx1",
    "ddx2",
    "laplacian",
    "poisson_solve",
    "antideriv_x2",
    "dealias",
    "hermitian_defect",
]

TWO_PI = 2.0 * math.pi


class NonFiniteFieldError(ValueError):
    """A nodal array contains NaN or infinity (blowup/overflow, not valid data)."""


@dataclass(frozen=True)
class Grid2D:
    """Uniform grid on the periodic box [0, lx) x [0, ly).

    Node (j, k) sits at (j*lx/nx, k*ly/ny).  Nodal arrays are indexed
    [j, k] in C order, so x2 is the fastest-varying direction.

    nx, ny must be even and at least 8; powers of two transform fastest.
    """

    nx: int
    ny: int
    lx: float = TWO_PI
    ly: float = TWO_PI

    def __post_init__(self) -> None:
        for name, n in (("nx", self.nx), ("ny", self.ny)):
            if n < 8 or n % 2 != 0:
                raise ValueError(f"{name} must be even and >= 8, got {n}")
        if self.lx <= 0 or self.ly <= 0:
            raise ValueError(f"domain periods must be positive, got lx={self.lx}, ly={self.ly}")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def dy(self) -> float:
        return self.ly / self.ny

    @cached_property
    def x1(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    @cached_property
    def x2(self) -> np.ndarray:
        return np.arange(self.ny) * self.dy

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodal coordinate arrays of shape (nx, ny)."""
        return np.meshgrid(self.x1, self.x2, indexing="ij")

    @cached_property
    def k1int(self) -> np.ndarray:
        """Integer mode numbers along x1 in FFT order (Nyquist stored negative)."""
        return np.fft.fftfreq(self.nx, d=1.0 / self.nx)

    @cached_property
    def k2int(self) -> np.ndarray:
        return np.fft.fftfreq(self.ny, d=1.0 / self.ny)

    @cached_property
    def kx(self) -> np.ndarray:
        """Angular wavenumbers along x1."""
        return (TWO_PI / self.lx) * self.k1int

    @cached_property
    def ky(self) -> np.ndarray:
        return (TWO_PI / self.ly) * self.k2int

    @cached_property
    def kx_deriv(self) -> np.ndarray:
        # Nyquist zeroed: the odd derivative of the unpaired mode is
        # sign-ambiguous and zeroing keeps real fields real.
        k = self.kx.copy()
        k[self.nx // 2] = 0.0
        return k

    @cached_property
    def ky_deriv(self) -> np.ndarray:
        k = self.ky.copy()
        k[self.ny // 2] = 0.0
        return k

    @cached_property
    def k_squared(self) -> np.ndarray:
        """|k|^2 on the full coefficient grid (Nyquist included; even power)."""
        return self.kx[:, None] ** 2 + self.ky[None, :] ** 2

    @cached_property
    def dealias_keep(self) -> np.ndarray:
        """Boolean mask of modes kept by the two-thirds rule."""
        keep1 = np.abs(self.k1int) <= self.nx / 3.0
        keep2 = np.abs(self.k2int) <= self.ny / 3.0
        return keep1[:, None] & keep2[None, :]


@dataclass
class Field:
    """Real nodal values on a Grid2D, shape (nx, ny)."""

    grid: Grid2D
    values: np.ndarray

    def __post_init__(self) -> None:
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}"
            )

    @classmethod
    def zeros(cls, grid: Grid2D) -> "Field":
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def from_function(cls, grid: Grid2D, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> "Field":
        """Sample fn(x1, x2) on the grid nodes."""
        x1, x2 = grid.mesh()
        return cls(grid, np.broadcast_to(np.asarray(fn(x1, x2), dtype=np.float64), grid.shape).copy())

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


@dataclass
class Spectrum:
    """Complex Fourier coefficients over (k1, k2) in standard FFT ordering.

    For spectra of real fields the coefficients are Hermitian-symmetric:
    coeff(-k) = conj(coeff(k)).
    """

    grid: Grid2D
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        self.coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if self.coeffs.shape != self.grid.shape:
            raise ValueError(
                f"coeffs shape {self.coeffs.shape} does not match grid {self.grid.shape}"
            )

    def copy(self) -> "Spectrum":
        return Spectrum(self.grid, self.coeffs.copy())


def _first_nonfinite_node(values: np.ndarray) -> tuple[int, int]:
    bad = np.argwhere(~np.isfinite(values))
    j, k = bad[0]
    return int(j), int(k)


def forward(f: Field) -> Spectrum:
    """Discrete Fourier transform, normalized so coeff(0,0) is the mean.

    Rejects non-finite input, naming the first offending node.
    """
    if not np.all(np.isfinite(f.values)):
        j, k = _first_nonfinite_node(f.values)
        g = f.grid
        raise NonFiniteFieldError(
            f"non-finite field value {f.values[j, k]!r} at node ({j}, {k}), "
            f"x = ({j * g.dx:.6g}, {k * g.dy:.6g})"
        )
    n = f.grid.nx * f.grid.ny
    return Spectrum(f.grid, np.fft.fft2(f.values) / n)


def _mirror_conj(coeffs: np.ndarray) -> np.ndarray:
    # conj of the coefficient at -k, aligned back onto index k
    return np.conj(np.roll(coeffs[::-1, ::-1], (1, 1), axis=(0, 1)))


def hermitian_defect(s: Spectrum) -> float:
    """Max |coeff(k) - conj(coeff(-k))| over all modes."""
    return float(np.max(np.abs(s.coeffs - _mirror_conj(s.coeffs))))


def inverse(s: Spectrum) -> Field:
    """Inverse transform back to real nodal values.

    Rejects spectra that are not Hermitian-symmetric (those would
    produce complex nodal values).
    """
    scale = float(np.max(np.abs(s.coeffs))) if s.coeffs.size else 0.0
    defect = hermitian_defect(s)
    if defect > 1e-10 * max(1.0, scale):
        raise ValueError(
            f"spectrum is not Hermitian-symmetric (defect {defect:.3e}); "
            "cannot represent a real field"
        )
    n = s.grid.nx * s.grid.ny
    return Field(s.grid, np.fft.ifft2(s.coeffs * n).real)


def ddx1(s: Spectrum) -> Spectrum:
    """Spectral d/dx1 (Nyquist mode of the x1 direction zeroed)."""
    return Spectrum(s.grid, s.coeffs * (1j * s.grid.kx_deriv)[:, None])


def ddx2(s: Spectrum) -> Spectrum:
    """Spectral d/dx2 (Nyquist mode of the x2 direction zeroed)."""
    return Spectrum(s.grid, s.coeffs * (1j * s.grid.ky_deriv)[None, :])


def laplacian(s: Spectrum) -> Spectrum:
    """Spectral Laplacian, -|k|^2 multiplication on the full mode set."""
    return Spectrum(s.grid, -s.grid.k_squared * s.coeffs)


def poisson_solve(omega: Spectrum) -> Spectrum:
    """Invert the Laplacian: returns psi with laplacian(psi) = omega.

    Requires zero-mean omega (solvability on the torus); the result is
    gauged to zero mean.
    """
    mean = abs(omega.coeffs[0, 0])
    if mean > 1e-10:
        raise ValueError(
            f"vorticity has nonzero mean {omega.coeffs[0, 0]:.3e}; "
            "the periodic Poisson problem is not solvable"
        )
    k2 = omega.grid.k_squared.copy()
    k2[0, 0] = 1.0
    psi = -omega.coeffs / k2
    psi[0, 0] = 0.0
    return Spectrum(omega.grid, psi)


def antideriv_x2(theta: Spectrum) -> Spectrum:
    """Invert -d/dx2: returns psi with -ddx2(psi) = theta.

    Every k1 row of theta must have zero x2-mean (the k2 = 0 column),
    otherwise no periodic primitive exists.  The k2 = 0 column of the
    result is gauged to zero; the k2 Nyquist row is zeroed to match the
    derivative convention, so theta should carry no Nyquist content
    (dealiased data never does).
    """
    grid = theta.grid
    mean_col = np.abs(theta.coeffs[:, 0])
    if np.max(mean_col) > 1e-10:
        k1_bad = int(np.argmax(mean_col))
        raise ValueError(
            f"x2-mean mode at k1 index {k1_bad} is {theta.coeffs[k1_bad, 0]:.3e}; "
            "no periodic x2-antiderivative exists for this data"
        )
    ky = grid.ky.copy()
    ky[0] = 1.0
    psi = -theta.coeffs / (1j * ky)[None, :]
    psi[:, 0] = 0.0
    psi[:, grid.ny // 2] = 0.0
    return Spectrum(grid, psi)


def dealias(s: Spectrum) -> Spectrum:
    """Two-thirds rule: zero every mode with |k1| > nx/3 or |k2| > ny/3."""
    return Spectrum(s.grid, s.coeffs * s.grid.dealias_keep)
