"""Uniform complex-plane grids, sampled fields, and quadrature.

Node (i, j) of a grid maps to eta = (x_min + i dx) + 1j (y_min + j dy);
field arrays are indexed ``values[i, j]`` and stored row-major in files.
All 2D integrals use the trapezoid rule; scale integrals int dmu/mu^p are
done by the trapezoid rule in log(mu).
"""

from __future__ import annotations

import os
import struct
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .errors import FileFormatError

_MEASURES = {"d2_over_pi": 1.0 / np.pi, "d2_over_2pi": 0.5 / np.pi, "plain": 1.0}

EWG1_MAGIC = b"EWG1"
_EWG1_HEADER = struct.Struct("<4sII4d")


@dataclass(frozen=True)
class ComplexPlaneGrid:
    """Uniform rectangular sampling of the complex plane."""

    nx: int
    ny: int
    x_min: float
    y_min: float
    dx: float
    dy: float

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 nodes per axis")
        if self.dx <= 0 or self.dy <= 0:
            raise ValueError("grid spacing must be positive")

    @classmethod
    def centered(cls, n: int = 256, extent: float = 8.0) -> "ComplexPlaneGrid":
        """Square grid symmetric about the origin covering [-extent, extent]^2."""
        d = 2.0 * extent / (n - 1)
        return cls(nx=n, ny=n, x_min=-extent, y_min=-extent, dx=d, dy=d)

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.nx)

    @property
    def y(self) -> np.ndarray:
        return self.y_min + self.dy * np.arange(self.ny)

    def nodes(self) -> np.ndarray:
        """Complex node coordinates, shape (nx, ny)."""
        return self.x[:, None] + 1j * self.y[None, :]

    def trapezoid_mask(self) -> np.ndarray:
        """Trapezoid quadrature weights (1/2 on edges, 1/4 at corners)."""
        wx = np.ones(self.nx)
        wx[0] = wx[-1] = 0.5
        wy = np.ones(self.ny)
        wy[0] = wy[-1] = 0.5
        return wx[:, None] * wy[None, :]

    def cell_area(self) -> float:
        return self.dx * self.dy

    def same_layout(self, other: "ComplexPlaneGrid") -> bool:
        return (
            self.nx == other.nx
            and self.ny == other.ny
            and np.isclose(self.x_min, other.x_min, rtol=0, atol=1e-12)
            and np.isclose(self.y_min, other.y_min, rtol=0, atol=1e-12)
            and np.isclose(self.dx, other.dx, rtol=1e-12, atol=0)
            and np.isclose(self.dy, other.dy, rtol=1e-12, atol=0)
        )


@dataclass(frozen=True)
class Field:
    """Complex-valued samples on a :class:`ComplexPlaneGrid`."""

    grid: ComplexPlaneGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.nx, self.grid.ny):
            raise ValueError(
                f"values shape {vals.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.ny})"
            )
        if not np.all(np.isfinite(vals.view(float))):
            raise ValueError("field contains non-finite values")
        object.__setattr__(self, "values", vals)

    def boundary_max(self) -> float:
        """Largest magnitude on the outermost node ring."""
        v = self.values
        return float(
            max(
                np.abs(v[0, :]).max(),
                np.abs(v[-1, :]).max(),
                np.abs(v[:, 0]).max(),
                np.abs(v[:, -1]).max(),
            )
        )


@dataclass(frozen=True)
class ScaleGrid:
    """Strictly increasing, log-spaced dilation values."""

    mu_values: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu_values, dtype=float)
        if mu.size == 0:
            raise ValueError("scale grid is empty")
        if np.any(mu <= 0):
            raise ValueError("scales must be positive")
        if mu.size > 1:
            if np.any(np.diff(mu) <= 0):
                raise ValueError("scales must be strictly increasing")
            ratios = mu[1:] / mu[:-1]
            if np.max(ratios) - np.min(ratios) > 1e-12 * np.max(ratios):
                raise ValueError("scales must be log-spaced (constant ratio)")
        object.__setattr__(self, "mu_values", mu)

    @classmethod
    def log_spaced(cls, count: int, mu_min: float, mu_max: float) -> "ScaleGrid":
        if count < 2:
            raise ValueError("scale grid needs at least 2 nodes")
        if mu_min <= 0 or mu_max <= mu_min:
            raise ValueError("require 0 < mu_min < mu_max")
        return cls(np.geomspace(mu_min, mu_max, count))

    @property
    def mu_min(self) -> float:
        return float(self.mu_values[0])

    @property
    def mu_max(self) -> float:
        return float(self.mu_values[-1])

    def __len__(self) -> int:
        return len(self.mu_values)


def default_grid() -> ComplexPlaneGrid:
    """256 x 256 nodes covering |eta_1|, |eta_2| <= 8."""
    return ComplexPlaneGrid.centered(256, 8.0)


def default_scale_grid() -> ScaleGrid:
    """64 log-spaced scales on [0.25, 4]."""
    return ScaleGrid.log_spaced(64, 0.25, 4.0)


def sample(f, grid: ComplexPlaneGrid) -> Field:
    """Sample a function of a complex variable on every grid node."""
    vals = np.asarray(f(grid.nodes()), dtype=complex)
    if not np.all(np.isfinite(vals.view(float))):
        raise ValueError("sampled function produced non-finite values")
    return Field(grid, vals)


def integrate(f: Field, measure: str = "d2_over_pi") -> complex:
    """Trapezoid quadrature of a field under the chosen plane measure."""
    try:
        scale = _MEASURES[measure]
    except KeyError:
        raise ValueError(f"unknown measure {measure!r}; choose from {sorted(_MEASURES)}")
    total = np.sum(f.grid.trapezoid_mask() * f.values)
    return complex(total * f.grid.cell_area() * scale)


def log_trapezoid_weights(mu: np.ndarray, power: float) -> np.ndarray:
    """Trapezoid weights in log(mu) for int dmu mu^(-power) f(mu)."""
    mu = np.asarray(mu, dtype=float)
    if mu.size < 2:
        raise ValueError("need at least 2 scale nodes")
    w = np.empty_like(mu)
    lm = np.log(mu)
    w[1:-1] = 0.5 * (lm[2:] - lm[:-2])
    w[0] = 0.5 * (lm[1] - lm[0])
    w[-1] = 0.5 * (lm[-1] - lm[-2])
    return w * mu ** (1.0 - power)


def scale_weights(scales: ScaleGrid, power: int) -> np.ndarray:
    """Quadrature weights for int_{mu_min}^{mu_max} dmu/mu^power f(mu).

    Returns w such that sum_i w_i f(mu_i) approximates the integral.  The
    supported powers are the ones appearing in the transform formulas
    (Parseval dmu/mu^3, inversion dmu/mu^4, parameter-space kernel
    dmu/mu^5, and the scale form of the normalization constant dmu/mu).
    """
    if power not in (1, 3, 4, 5):
        raise ValueError(f"unsupported power {power}; expected one of 1, 3, 4, 5")
    return log_trapezoid_weights(scales.mu_values, power)


def _atomic_write(path: str, data: bytes) -> None:
    # Write-temp-then-rename keeps interrupted runs from leaving partial files.
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".entwave-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_field_ewg1(f: Field, path: str) -> None:
    """Write a field in the EWG1 binary format."""
    g = f.grid
    header = _EWG1_HEADER.pack(EWG1_MAGIC, g.nx, g.ny, g.x_min, g.y_min, g.dx, g.dy)
    payload = np.ascontiguousarray(f.values, dtype="<c16").tobytes()
    _atomic_write(path, header + payload)


def _parse_ewg1_header(buf: bytes, offset: int, path: str):
    end = offset + _EWG1_HEADER.size
    if len(buf) < end:
        raise FileFormatError(f"{path}: truncated EWG1 header")
    magic, nx, ny, x_min, y_min, dx, dy = _EWG1_HEADER.unpack(buf[offset:end])
    if magic != EWG1_MAGIC:
        raise FileFormatError(f"{path}: bad magic {magic!r}, expected {EWG1_MAGIC!r}")
    try:
        grid = ComplexPlaneGrid(nx, ny, x_min, y_min, dx, dy)
    except ValueError as exc:
        raise FileFormatError(f"{path}: invalid grid header ({exc})")
    return grid, end


def read_field_ewg1(path: str) -> Field:
    """Read a field from the EWG1 binary format."""
    with open(path, "rb") as fh:
        buf = fh.read()
    grid, offset = _parse_ewg1_header(buf, 0, path)
    expected = grid.nx * grid.ny * 16
    if len(buf) - offset < expected:
        raise FileFormatError(
            f"{path}: truncated payload ({len(buf) - offset} of {expected} bytes)"
        )
    vals = np.frombuffer(buf, dtype="<c16", count=grid.nx * grid.ny, offset=offset)
    try:
        return Field(grid, vals.reshape(grid.nx, grid.ny).astype(complex))
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}")


def write_field_csv(f: Field, path: str) -> None:
    """Write a field as CSV rows ``x,y,re,im``, one node per row."""
    g = f.grid
    lines = ["x,y,re,im"]
    xs = g.x
    ys = g.y
    for i in range(g.nx):
        for j in range(g.ny):
            v = f.values[i, j]
            lines.append(
                f"{float(xs[i])!r},{float(ys[j])!r},{float(v.real)!r},{float(v.imag)!r}"
            )
    _atomic_write(path, ("\n".join(lines) + "\n").encode())


def read_field_csv(path: str) -> Field:
    """Read a field from the ``x,y,re,im`` CSV layout."""
    with open(path, "r") as fh:
        header = fh.readline().strip()
        if header != "x,y,re,im":
            raise FileFormatError(f"{path}: expected header 'x,y,re,im', got {header!r}")
        try:
            rows = np.loadtxt(fh, delimiter=",", ndmin=2)
        except ValueError as exc:
            raise FileFormatError(f"{path}: malformed CSV ({exc})")
    if rows.size == 0 or rows.shape[1] != 4:
        raise FileFormatError(f"{path}: expected 4 columns")
    xs = np.unique(rows[:, 0])
    ys = np.unique(rows[:, 1])
    nx, ny = len(xs), len(ys)
    if nx * ny != rows.shape[0]:
        raise FileFormatError(f"{path}: nodes do not form a full rectangular grid")
    for axis in (xs, ys):
        if len(axis) < 2:
            raise FileFormatError(f"{path}: need at least 2 nodes per axis")
        steps = np.diff(axis)
        if np.max(steps) - np.min(steps) > 1e-9 * np.max(steps):
            raise FileFormatError(f"{path}: grid spacing is not uniform")
    grid = ComplexPlaneGrid(nx, ny, float(xs[0]), float(ys[0]),
                            float(xs[1] - xs[0]), float(ys[1] - ys[0]))
    ix = np.searchsorted(xs, rows[:, 0])
    iy = np.searchsorted(ys, rows[:, 1])
    vals = np.zeros((nx, ny), dtype=complex)
    vals[ix, iy] = rows[:, 2] + 1j * rows[:, 3]
    try:
        return Field(grid, vals)
    except ValueError as exc:
        raise FileFormatError(f"{path}: {exc}")
