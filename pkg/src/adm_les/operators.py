"""Helmholtz filter, Van Cittert deconvolution and related Fourier multipliers.

Every operator here is diagonal in Fourier space with a strictly positive
symbol that depends on the wavevector only through ``|k|^2``. Symbols are
evaluated lazily from ``k2``; :func:`symbol_table` caches them per grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .spectral import TorusSpec, WaveVector, _Field, sobolev_norm


def _k2(k) -> np.ndarray | float:
    if isinstance(k, WaveVector):
        return k.k2
    return np.asarray(k, dtype=np.float64)


def helmholtz_symbol(alpha: float, k2):
    """``1 / (1 + alpha^2 |k|^2)``; ``k2`` may be an array or a WaveVector."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return 1.0 / (1.0 + alpha**2 * _k2(k2))


def deconv_ratio(alpha: float, k2):
    """``r = alpha^2 |k|^2 / (1 + alpha^2 |k|^2)``, the Van Cittert series ratio."""
    a = alpha**2 * _k2(k2)
    return a / (1.0 + a)


def _tail(N: int, alpha: float, k2):
    """``r^(N+1)`` and ``1 - r^(N+1)``, both accurate when r is close to 1."""
    a = np.asarray(alpha**2 * _k2(k2), dtype=np.float64)
    with np.errstate(divide="ignore", over="ignore"):
        log_r = -np.log1p(1.0 / a)  # -inf at k = 0
    x = (N + 1) * log_r
    return np.exp(x), -np.expm1(x)


def deconv_symbol(N: int, alpha: float, k2):
    """Closed form ``(1 + alpha^2|k|^2) * rho_{N,k}`` of the order-N Van Cittert symbol."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if N < 0:
        raise ValueError("N must be nonnegative")
    k2 = _k2(k2)
    if N == 0:
        # exactly the identity, not (1 + a) / (1 + a) up to rounding
        out = np.ones_like(np.asarray(k2, dtype=np.float64))
        return out if np.ndim(out) else float(out)
    _, rho = _tail(N, alpha, k2)
    out = (1.0 + alpha**2 * np.asarray(k2)) * rho
    return out if np.ndim(out) else float(out)


def deconv_rho(N: int, alpha: float, k2):
    """``rho_{N,k} = 1 - r^(N+1)``, the recovered fraction of A at each mode."""
    _, rho = _tail(N, alpha, _k2(k2))
    return rho if np.ndim(rho) else float(rho)


def deconv_symbol_series(N: int, alpha: float, k2):
    """Term-by-term ``sum_{n=0}^{N} r^n``. Reference for :func:`deconv_symbol`."""
    r = deconv_ratio(alpha, k2)
    total = np.ones_like(np.asarray(r, dtype=np.float64))
    term = np.ones_like(total)
    for _ in range(N):
        term = term * r
        total = total + term
    return total if np.ndim(total) else float(total)


def yosida_symbol(N: int, alpha: float, k2):
    """Symbol of the Yosida approximation ``A_{1/N}``: ``(1+a) N / (N + 1 + a)``."""
    if N < 1:
        raise ValueError("Yosida approximation needs N >= 1")
    a = alpha**2 * _k2(k2)
    return (1.0 + a) * N / (N + 1.0 + a)


class Kind(str, enum.Enum):
    IDENTITY = "identity"
    HELMHOLTZ = "helmholtz"
    HELMHOLTZ_INVERSE = "helmholtz_inverse"
    VAN_CITTERT = "van_cittert"
    YOSIDA = "yosida"
    POWER = "power"
    COMPOSITE = "composite"


@dataclass(frozen=True)
class FourierMultiplier:
    """Positive isotropic Fourier multiplier.

    Build instances with the module-level constructors (:func:`helmholtz`,
    :func:`van_cittert`, ...) rather than directly.
    """

    kind: Kind
    alpha: float = 1.0
    N: int = 0
    exponent: float = 1.0
    base: FourierMultiplier | None = None
    factors: tuple = ()

    def symbol(self, k2):
        """Symbol values at ``k2`` (array of ``|k|^2`` or a WaveVector)."""
        k2 = _k2(k2)
        kind = self.kind
        if kind is Kind.IDENTITY:
            return np.ones_like(np.asarray(k2, dtype=np.float64))
        if kind is Kind.HELMHOLTZ:
            return helmholtz_symbol(self.alpha, k2)
        if kind is Kind.HELMHOLTZ_INVERSE:
            return 1.0 + self.alpha**2 * np.asarray(k2, dtype=np.float64)
        if kind is Kind.VAN_CITTERT:
            return np.asarray(deconv_symbol(self.N, self.alpha, k2))
        if kind is Kind.YOSIDA:
            return yosida_symbol(self.N, self.alpha, k2)
        if kind is Kind.POWER:
            return self.base.symbol(k2) ** self.exponent
        if kind is Kind.COMPOSITE:
            out = np.ones_like(np.asarray(k2, dtype=np.float64))
            for f in self.factors:
                out = out * f.symbol(k2)
            return out
        raise ValueError(f"unknown multiplier kind {kind!r}")

    def __matmul__(self, other: FourierMultiplier) -> FourierMultiplier:
        return compose(self, other)

    def __call__(self, f: _Field) -> _Field:
        return apply(self, f)


def identity() -> FourierMultiplier:
    return FourierMultiplier(Kind.IDENTITY)


def helmholtz(alpha: float) -> FourierMultiplier:
    """The filter G = (I - alpha^2 Laplacian)^{-1}."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return FourierMultiplier(Kind.HELMHOLTZ, alpha=float(alpha))


def helmholtz_inverse(alpha: float) -> FourierMultiplier:
    """A = I - alpha^2 Laplacian."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    return FourierMultiplier(Kind.HELMHOLTZ_INVERSE, alpha=float(alpha))


def van_cittert(N: int, alpha: float) -> FourierMultiplier:
    """D_N = sum_{n=0}^{N} (I - G)^n."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if int(N) != N or N < 0:
        raise ValueError("N must be a nonnegative integer")
    return FourierMultiplier(Kind.VAN_CITTERT, alpha=float(alpha), N=int(N))


def yosida(N: int, alpha: float) -> FourierMultiplier:
    if int(N) != N or N < 1:
        raise ValueError("Yosida approximation needs N >= 1")
    return FourierMultiplier(Kind.YOSIDA, alpha=float(alpha), N=int(N))


def power_symbol(base: FourierMultiplier, p: float) -> FourierMultiplier:
    """Real power of a positive multiplier, evaluated pointwise on the symbol."""
    if p == 1:
        return base
    if p == 0:
        return identity()
    return FourierMultiplier(Kind.POWER, alpha=base.alpha, N=base.N, exponent=float(p), base=base)


def compose(*mults: FourierMultiplier) -> FourierMultiplier:
    """Product of commuting multipliers."""
    flat = []
    for m in mults:
        flat.extend(m.factors if m.kind is Kind.COMPOSITE else (m,))
    flat = [m for m in flat if m.kind is not Kind.IDENTITY]
    if not flat:
        return identity()
    if len(flat) == 1:
        return flat[0]
    return FourierMultiplier(Kind.COMPOSITE, factors=tuple(flat))


_TABLES: dict = {}


def symbol_table(mult: FourierMultiplier, grid: TorusSpec) -> np.ndarray:
    """Read-only cached symbol array on ``grid``."""
    key = (mult, grid)
    table = _TABLES.get(key)
    if table is None:
        table = np.array(mult.symbol(grid.k2), dtype=np.float64)
        table.setflags(write=False)
        if len(_TABLES) > 256:
            _TABLES.clear()
        _TABLES[key] = table
    return table


def apply(mult: FourierMultiplier, f: _Field, cached: bool = True) -> _Field:
    """Scale every coefficient by the symbol at its wavevector."""
    sym = symbol_table(mult, f.grid) if cached else mult.symbol(f.grid.k2)
    return f._new(f.coeffs * sym)


def operator_gap(N: int, alpha: float, f: _Field, s: float = 0.0) -> float:
    """``||(A - D_N) f||_s`` via the symbol ``(1 + alpha^2|k|^2) r^(N+1)``."""
    grid = f.grid
    r_pow, _ = _tail(N, alpha, grid.k2)
    sym = (1.0 + alpha**2 * grid.k2) * r_pow
    return sobolev_norm(f._new(f.coeffs * sym), s)


def check_symbol_bounds(k2: np.ndarray, alphas, n_max: int, slack: float = 1e-12) -> list:
    """Exhaustive checks of the deconvolution symbol over the values ``k2``.

    For every alpha and ``0 <= N <= n_max``: ``1 <= D_N <= N+1``,
    ``D_N <= 1 + alpha^2|k|^2``, monotonicity in N, and closed form against
    the series sum. Violations are measured relative to ``max(1, D_N)`` and
    pass when at most ``slack``. Returns ``(name, passed, worst)`` triples.
    """
    k2 = np.asarray(k2, dtype=np.float64).ravel()
    names = ("1 <= D_N", "D_N <= N+1", "D_N <= 1+a^2|k|^2", "D_N monotone in N", "closed form = series")
    worst = dict.fromkeys(names, 0.0)

    def note(name, excess, D):
        worst[name] = max(worst[name], float(np.max(excess / np.maximum(1.0, D))))

    for alpha in alphas:
        a = alpha**2 * k2
        r = a / (1.0 + a)
        series = np.ones_like(k2)
        term = np.ones_like(k2)
        prev = None
        for N in range(n_max + 1):
            if N:
                term = term * r
                series = series + term
            D = np.asarray(deconv_symbol(N, alpha, k2))
            note("1 <= D_N", 1.0 - D, D)
            note("D_N <= N+1", D - (N + 1), D)
            note("D_N <= 1+a^2|k|^2", D - (1.0 + a), D)
            if prev is not None:
                note("D_N monotone in N", prev - D, D)
            note("closed form = series", np.abs(D - series), series)
            prev = D
    return [(name, worst[name] <= slack, worst[name]) for name in names]
