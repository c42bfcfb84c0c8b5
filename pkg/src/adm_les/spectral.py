"""Fourier representation of periodic fields on the 3-torus.

Coefficients follow the mean-value convention

    w_hat(k) = (1/|T|) * integral of w(x) exp(-i k.x) dx,

so Parseval reads ``mean(|w|^2) = sum |w_hat(k)|^2`` and every norm in the
package is the plain coefficient sum ``||w||_s^2 = sum_{k != 0} |k|^{2s} |w_hat(k)|^2``.

Storage is the full (Hermitian-redundant) cube in numpy FFT ordering on an even
grid of ``M = 2m + 2`` points per axis. Modes with ``|n_i| <= m`` are retained;
the extra plane ``n_i = -(m+1)`` is always zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import fft as sfft


@dataclass(frozen=True)
class TorusSpec:
    """Periodic box ``[0, L]^3`` with retained lattice indices ``|n_i| <= m``."""

    L: float
    m: int

    def __post_init__(self):
        if not self.L > 0:
            raise ValueError("L must be positive")
        if int(self.m) != self.m or self.m < 2:
            raise ValueError("m must be an integer >= 2")

    @property
    def n_points(self) -> int:
        """Collocation points per axis of the storage grid."""
        return 2 * self.m + 2

    @property
    def cutoff(self) -> int:
        """Largest index kept by the 2/3 rule."""
        return (2 * self.m) // 3

    @property
    def product_size(self) -> int:
        """Smallest even grid on which products of dealiased fields do not alias."""
        size = 3 * self.cutoff + 1
        return size + (size % 2)

    @property
    def volume(self) -> float:
        return self.L**3

    @cached_property
    def n1d(self) -> np.ndarray:
        M = self.n_points
        return np.rint(np.fft.fftfreq(M, 1.0 / M)).astype(np.int64)

    @cached_property
    def n(self) -> np.ndarray:
        """Integer lattice indices, shape (3, M, M, M)."""
        return np.stack(np.meshgrid(self.n1d, self.n1d, self.n1d, indexing="ij"))

    @cached_property
    def k(self) -> np.ndarray:
        """Physical wavevectors 2*pi*n/L, shape (3, M, M, M)."""
        return (2.0 * np.pi / self.L) * self.n

    @cached_property
    def k2(self) -> np.ndarray:
        return np.sum(self.k**2, axis=0)

    @cached_property
    def k2_safe(self) -> np.ndarray:
        """``|k|^2`` with the zero mode replaced by 1 (for divisions)."""
        out = self.k2.copy()
        out[0, 0, 0] = 1.0
        return out

    @cached_property
    def k_unit(self) -> np.ndarray:
        """``k / |k|`` (zero at k = 0)."""
        out = self.k / np.sqrt(self.k2_safe)
        out[:, 0, 0, 0] = 0.0
        return out

    @cached_property
    def retained_mask(self) -> np.ndarray:
        return np.all(np.abs(self.n) <= self.m, axis=0)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        return np.all(np.abs(self.n) <= self.cutoff, axis=0)

    @property
    def k_max(self) -> float:
        """Largest retained |k|, at n = (m, m, m)."""
        return float(2.0 * np.pi / self.L * self.m * np.sqrt(3.0))

    def index(self, n) -> tuple:
        """Array index of lattice point ``n`` (a triple of ints)."""
        M = self.n_points
        n = tuple(int(v) for v in n)
        if any(abs(v) > self.m for v in n):
            raise IndexError(f"mode {n} outside |n_i| <= {self.m}")
        return tuple(v % M for v in n)

    def coordinates(self, size: int | None = None) -> np.ndarray:
        """Collocation points, shape (3, size, size, size)."""
        size = self.n_points if size is None else size
        x = np.arange(size) * (self.L / size)
        return np.stack(np.meshgrid(x, x, x, indexing="ij"))


@dataclass(frozen=True)
class WaveVector:
    n: tuple
    k: tuple
    k2: float

    @classmethod
    def from_index(cls, grid: TorusSpec, n) -> WaveVector:
        n = tuple(int(v) for v in n)
        k = tuple(2.0 * np.pi * v / grid.L for v in n)
        return cls(n=n, k=k, k2=float(sum(c * c for c in k)))


class _Field:
    ncomp: int = 0

    def __init__(self, grid: TorusSpec, coeffs):
        coeffs = np.asarray(coeffs, dtype=np.complex128)
        M = grid.n_points
        shape = (M, M, M) if self.ncomp == 1 else (self.ncomp, M, M, M)
        if coeffs.shape != shape:
            raise ValueError(f"coefficient shape {coeffs.shape} != {shape}")
        coeffs.setflags(write=False)
        self.grid = grid
        self.coeffs = coeffs

    def _new(self, coeffs):
        return type(self)(self.grid, coeffs)

    def __add__(self, other):
        _check_grid(self, other)
        return self._new(self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_grid(self, other)
        return self._new(self.coeffs - other.coeffs)

    def __neg__(self):
        return self._new(-self.coeffs)

    def __mul__(self, scalar):
        return self._new(self.coeffs * scalar)

    __rmul__ = __mul__

    def __repr__(self):
        return f"{type(self).__name__}(L={self.grid.L}, m={self.grid.m})"

    @classmethod
    def zeros(cls, grid: TorusSpec):
        M = grid.n_points
        shape = (M, M, M) if cls.ncomp == 1 else (cls.ncomp, M, M, M)
        return cls(grid, np.zeros(shape, dtype=np.complex128))

    def hermitian_defect(self) -> float:
        """max |c(n) - conj(c(-n))| over the stored cube."""
        return float(np.max(np.abs(self.coeffs - np.conj(_reflect(self.coeffs))), initial=0.0))

    def symmetrized(self):
        """Hermitian part, with mean and out-of-range modes zeroed."""
        c = 0.5 * (self.coeffs + np.conj(_reflect(self.coeffs)))
        c = c * self.grid.retained_mask
        c[..., 0, 0, 0] = 0.0
        return self._new(c)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs), initial=0.0))


class SpectralScalarField(_Field):
    ncomp = 1


class SpectralVectorField(_Field):
    ncomp = 3

    def divergence_max(self) -> float:
        """max_k |k . w_hat(k)|."""
        return float(np.max(np.abs(np.einsum("i...,i...->...", self.grid.k, self.coeffs))))


def _check_grid(f, g):
    if f.grid != g.grid:
        raise ValueError(f"grid mismatch: {f.grid} vs {g.grid}")


def _reflect(c: np.ndarray) -> np.ndarray:
    """Array whose entry at n is c(-n), over the last three axes."""
    axes = (-3, -2, -1)
    return np.roll(np.flip(c, axis=axes), 1, axis=axes)


def _blocks(h: int, size: int) -> tuple:
    """Slices covering indices 0..h and -h..-1 of an FFT-ordered axis."""
    return (slice(0, h + 1), slice(size - h, size))


def _transfer(c: np.ndarray, size_from: int, size_to: int, half: bool = False) -> np.ndarray:
    """Copy modes between FFT-ordered cubes of different size.

    Only indices ``|n| <= min(size_from, size_to)//2 - 1`` (or the full odd
    range) are carried; anything else is dropped. With ``half=True`` the last
    axis holds an rfft half-spectrum (nonnegative indices only).
    """
    if size_from == size_to:
        return c
    h = min((size_from - 1) // 2, (size_to - 1) // 2)
    last = size_to // 2 + 1 if half else size_to
    out = np.zeros(c.shape[:-3] + (size_to, size_to, last), dtype=c.dtype)
    src = _blocks(h, size_from)
    dst = _blocks(h, size_to)
    pairs = list(zip(dst, src))
    last_pairs = [(slice(0, h + 1), slice(0, h + 1))] if half else pairs
    for d0, s0 in pairs:
        for d1, s1 in pairs:
            for d2, s2 in last_pairs:
                out[..., d0, d1, d2] = c[..., s0, s1, s2]
    return out


def _hermitian_full(half: np.ndarray, size: int) -> np.ndarray:
    """Rebuild the full FFT cube from an rfftn half-spectrum."""
    nh = half.shape[-1]
    full = np.empty(half.shape[:-1] + (size,), dtype=half.dtype)
    full[..., :nh] = half
    # c(a, b, -l) = conj c(-a, -b, l); index -a is 0 for a = 0, else size - a
    src = np.conj(half[..., size - nh : 0 : -1])
    out = full[..., nh:]
    out[..., 0, 0, :] = src[..., 0, 0, :]
    out[..., 0, 1:, :] = src[..., 0, :0:-1, :]
    out[..., 1:, 0, :] = src[..., :0:-1, 0, :]
    out[..., 1:, 1:, :] = src[..., :0:-1, :0:-1, :]
    return full


def physical_values(coeffs: np.ndarray, size: int) -> np.ndarray:
    """Grid values of Hermitian coefficients stored on a cube of edge ``size``."""
    nh = size // 2 + 1
    return sfft.irfftn(coeffs[..., :nh], s=(size,) * 3, axes=(-3, -2, -1), norm="forward")


def spectral_values(values: np.ndarray) -> np.ndarray:
    """Mean-value Fourier coefficients of real grid values (full cube)."""
    size = values.shape[-1]
    half = sfft.rfftn(values, axes=(-3, -2, -1), norm="forward")
    return _hermitian_full(half, size)


def to_physical(f: _Field, size: int | None = None) -> np.ndarray:
    """Collocation values on a ``size``-point grid (default: the storage grid)."""
    M = f.grid.n_points
    size = M if size is None else int(size)
    return physical_values(_transfer(f.coeffs, M, size), size)


def to_spectral(values, grid: TorusSpec) -> _Field:
    """Inverse of :func:`to_physical`; the grid size is read from ``values``."""
    values = np.asarray(values, dtype=np.float64)
    size = values.shape[-1]
    c = spectral_values(values)
    c = _transfer(c, size, grid.n_points) * grid.retained_mask
    cls = SpectralVectorField if values.ndim == 4 else SpectralScalarField
    return cls(grid, c)


def leray_project(f: SpectralVectorField) -> SpectralVectorField:
    """Orthogonal projection onto divergence-free, zero-mean fields."""
    g = f.grid
    c = f.coeffs
    kdotc = np.einsum("i...,i...->...", g.k, c) / g.k2_safe
    out = c - g.k * kdotc
    out[:, 0, 0, 0] = 0.0
    return SpectralVectorField(g, out)


def dealias(f: _Field) -> _Field:
    """Zero every mode with ``max_i |n_i| > floor(2m/3)``."""
    return f._new(f.coeffs * f.grid.dealias_mask)


def _weights(grid: TorusSpec, s: float) -> np.ndarray:
    w = np.zeros_like(grid.k2)
    nz = grid.k2 > 0
    w[nz] = grid.k2[nz] ** s
    return w


def _power(c: np.ndarray) -> np.ndarray:
    a2 = c.real**2 + c.imag**2
    return a2.sum(axis=0) if a2.ndim == 4 else a2


def hs_inner(f: _Field, g: _Field, s: float = 0.0) -> float:
    """Real H_s inner product; raises if the imaginary part is not roundoff."""
    _check_grid(f, g)
    w = _weights(f.grid, s)
    prod = f.coeffs * np.conj(g.coeffs)
    if prod.ndim == 4:
        prod = prod.sum(axis=0)
    total = np.sum(w * prod)
    scale = np.sqrt(np.sum(w * _power(f.coeffs)) * np.sum(w * _power(g.coeffs)))
    if abs(total.imag) > 1e-12 * max(scale, np.finfo(float).tiny):
        raise ValueError(f"inner product has imaginary part {total.imag:.3e}; inputs not Hermitian")
    return float(total.real)


def sobolev_norm(f: _Field, s: float = 0.0) -> float:
    """``sqrt(sum_{k != 0} |k|^{2s} |f_hat(k)|^2)``."""
    return float(np.sqrt(np.sum(_weights(f.grid, s) * _power(f.coeffs))))


def gradient(f: SpectralScalarField) -> SpectralVectorField:
    return SpectralVectorField(f.grid, 1j * f.grid.k * f.coeffs)


def divergence(f: SpectralVectorField) -> SpectralScalarField:
    return SpectralScalarField(f.grid, np.einsum("i...,i...->...", 1j * f.grid.k, f.coeffs))


def laplacian(f: _Field) -> _Field:
    return f._new(-f.grid.k2 * f.coeffs)


def partial(f: _Field, axis: int) -> _Field:
    """Derivative along one coordinate axis."""
    return f._new(1j * f.grid.k[axis] * f.coeffs)


def random_field(
    grid: TorusSpec,
    rng: np.random.Generator,
    band: int | None = None,
    solenoidal: bool = True,
    vector: bool = True,
):
    """Random real field supported on ``|n_i| <= band``."""
    band = grid.cutoff if band is None else band
    M = grid.n_points
    shape = (3, M, M, M) if vector else (M, M, M)
    c = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    mask = np.all(np.abs(grid.n) <= band, axis=0)
    cls = SpectralVectorField if vector else SpectralScalarField
    f = cls(grid, c * mask).symmetrized()
    if vector and solenoidal:
        f = leray_project(f)
    return f
