"""ADMF binary snapshots of spectral fields.

Layout (all little-endian)::

    b"ADMF"  u32 version (=1)  f64 L  u32 m  u32 ncomp (1 or 3)
    ncomp * (2m+1)^3 pairs of f64 (re, im)

Coefficients are component-major; within a component n1 runs slowest and n3
fastest, each over ``-m..m``. The Hermitian redundancy is stored and checked
on read.
"""

from __future__ import annotations

import os
import struct

import numpy as np

from .spectral import SpectralScalarField, SpectralVectorField, TorusSpec

MAGIC = b"ADMF"
VERSION = 1
_HEADER = struct.Struct("<4sIdII")
SYMMETRY_TOL = 1e-12


class SnapshotError(ValueError):
    pass


def _axis_index(grid: TorusSpec) -> np.ndarray:
    m = grid.m
    return np.arange(-m, m + 1) % grid.n_points


def encode(field) -> bytes:
    grid = field.grid
    c = field.coeffs if field.ncomp == 3 else field.coeffs[None]
    idx = _axis_index(grid)
    block = c[:, idx][:, :, idx][:, :, :, idx]
    body = np.empty(block.shape + (2,), dtype="<f8")
    body[..., 0] = block.real
    body[..., 1] = block.imag
    return _HEADER.pack(MAGIC, VERSION, float(grid.L), grid.m, c.shape[0]) + body.tobytes()


def decode(data: bytes, name: str = "<bytes>"):
    if len(data) < 4 or data[:4] != MAGIC:
        raise SnapshotError(f"{name}: bad magic {data[:4]!r}, expected {MAGIC!r}")
    if len(data) < _HEADER.size:
        raise SnapshotError(f"{name}: truncated header ({len(data)} bytes)")
    _, version, L, m, ncomp = _HEADER.unpack_from(data)
    if version != VERSION:
        raise SnapshotError(f"{name}: unsupported version {version}")
    if ncomp not in (1, 3):
        raise SnapshotError(f"{name}: component count must be 1 or 3, got {ncomp}")
    try:
        grid = TorusSpec(L, m)
    except ValueError as e:
        raise SnapshotError(f"{name}: invalid grid header ({e})") from None
    side = 2 * m + 1
    expected = _HEADER.size + ncomp * side**3 * 16
    if len(data) < expected:
        raise SnapshotError(f"{name}: truncated file ({len(data)} of {expected} bytes)")
    if len(data) > expected:
        raise SnapshotError(f"{name}: {len(data) - expected} trailing bytes")
    body = np.frombuffer(data, dtype="<f8", offset=_HEADER.size).reshape(ncomp, side, side, side, 2)
    block = body[..., 0] + 1j * body[..., 1]

    # block[:, i, j, l] is mode (i-m, j-m, l-m); its conjugate partner is the flipped entry
    defect = np.abs(block - np.conj(block[:, ::-1, ::-1, ::-1]))
    scale = max(1.0, float(np.max(np.abs(block), initial=0.0)))
    worst = np.unravel_index(int(np.argmax(defect)), defect.shape)
    if defect[worst] > SYMMETRY_TOL * scale:
        comp, i, j, l = (int(v) for v in worst)
        mode = (i - m, j - m, l - m)
        raise SnapshotError(
            f"{name}: Hermitian symmetry violated at component {comp}, mode n={mode} "
            f"(|c(n) - conj(c(-n))| = {defect[worst]:.3e})"
        )

    M = grid.n_points
    full = np.zeros((ncomp, M, M, M), dtype=np.complex128)
    idx = _axis_index(grid)
    full[np.ix_(range(ncomp), idx, idx, idx)] = block
    if ncomp == 3:
        return SpectralVectorField(grid, full)
    return SpectralScalarField(grid, full[0])


def write_snapshot(field, path: str) -> None:
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "wb") as fh:
        fh.write(encode(field))
    os.replace(tmp, path)


def read_snapshot(path: str):
    with open(path, "rb") as fh:
        data = fh.read()
    return decode(data, os.fspath(path))
