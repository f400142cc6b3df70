"""The ax+b group G = R^n x| R: product, inverse, distance, modular function,
involution and convolution of sampled functions.

Measure convention: Lebesgue dx du, which is right Haar measure on G.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.ndimage import map_coordinates

from .quadrature import uniform_nodes


@dataclass(frozen=True)
class GroupPoint:
    x: np.ndarray
    u: float

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        if x.ndim != 1 or x.size < 1:
            raise ValueError("x must be a nonempty vector")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", float(self.u))

    @property
    def n(self) -> int:
        return self.x.size

    @classmethod
    def identity(cls, n: int) -> "GroupPoint":
        return cls(np.zeros(n), 0.0)


def multiply(p: GroupPoint, q: GroupPoint) -> GroupPoint:
    if p.n != q.n:
        raise ValueError(f"dimension mismatch: {p.n} vs {q.n}")
    return GroupPoint(p.x + np.exp(p.u) * q.x, p.u + q.u)


def invert(p: GroupPoint) -> GroupPoint:
    return GroupPoint(-np.exp(-p.u) * p.x, -p.u)


def cosh_distance_m1(x, u):
    """cosh d(x,u) - 1, computed without cancellation near the identity.

    ``x`` has the coordinate axis last; ``u`` broadcasts against ``x[..., 0]``.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    return 2.0 * np.sinh(0.5 * u) ** 2 + 0.5 * np.exp(-u) * r2


def distance_xu(x, u):
    t = cosh_distance_m1(x, u)
    return np.log1p(t + np.sqrt(t * (t + 2.0)))


def distance(p: GroupPoint) -> float:
    """d(p, identity)."""
    return float(distance_xu(p.x, p.u))


def modular(p: GroupPoint) -> float:
    return float(np.exp(-p.n * p.u))


# ---------------------------------------------------------------------------
# sampled functions

@dataclass(frozen=True)
class GridSpec:
    x_min: tuple
    x_max: tuple
    nx: tuple
    u_min: float
    u_max: float
    nu: int

    def __post_init__(self):
        for name in ("x_min", "x_max", "nx"):
            object.__setattr__(self, name, tuple(np.atleast_1d(getattr(self, name)).tolist()))
        if not len(self.x_min) == len(self.x_max) == len(self.nx):
            raise ValueError("per-axis fields must have equal length")
        if any(c < 2 for c in self.nx) or self.nu < 2:
            raise ValueError("grid counts must be >= 2")
        if any(b <= a for a, b in zip(self.x_min, self.x_max)) or self.u_max <= self.u_min:
            raise ValueError("grid extents must be strictly positive")

    @property
    def n(self) -> int:
        return len(self.nx)

    @property
    def shape(self) -> tuple:
        return tuple(int(c) for c in self.nx) + (int(self.nu),)

    def x_axes(self):
        return [np.linspace(a, b, int(c)) for a, b, c in zip(self.x_min, self.x_max, self.nx)]

    def u_axis(self):
        return np.linspace(self.u_min, self.u_max, int(self.nu))

    @property
    def dx(self):
        return tuple((b - a) / (c - 1) for a, b, c in zip(self.x_min, self.x_max, self.nx))

    @property
    def du(self):
        return (self.u_max - self.u_min) / (self.nu - 1)

    def mesh(self):
        """Coordinate arrays (x of shape shape+(n,), u of shape shape)."""
        axes = self.x_axes() + [self.u_axis()]
        grids = np.meshgrid(*axes, indexing="ij")
        return np.stack(grids[:-1], axis=-1), grids[-1]

    def trapezoid_weights(self):
        w = np.ones(self.shape)
        for axis, (h, c) in enumerate(zip(self.dx + (self.du,), self.shape)):
            wa = np.full(c, h)
            wa[0] = wa[-1] = 0.5 * h
            shape = [1] * len(self.shape)
            shape[axis] = c
            w = w * wa.reshape(shape)
        return w

    def to_json(self) -> str:
        return json.dumps({"x_min": list(self.x_min), "x_max": list(self.x_max),
                           "nx": list(self.nx), "u_min": self.u_min,
                           "u_max": self.u_max, "nu": self.nu}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GridSpec":
        d = json.loads(text)
        return cls(tuple(d["x_min"]), tuple(d["x_max"]), tuple(d["nx"]),
                   d["u_min"], d["u_max"], d["nu"])


@dataclass(frozen=True)
class SampledFunction:
    grid: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.grid.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: GridSpec, f) -> "SampledFunction":
        x, u = grid.mesh()
        return cls(grid, f(x, u))

    def integral(self):
        return np.sum(self.values * self.grid.trapezoid_weights())

    def l1(self) -> float:
        return float(np.sum(np.abs(self.values) * self.grid.trapezoid_weights()))

    def evaluate(self, x, u):
        """Multilinear interpolation with zero extension; x has the axis last."""
        x = np.asarray(x, dtype=float)
        u = np.asarray(u, dtype=float)
        g = self.grid
        coords = [(x[..., i] - g.x_min[i]) / g.dx[i] for i in range(g.n)]
        coords.append((u - g.u_min) / g.du)
        coords = np.stack([np.broadcast_to(c, np.broadcast(*coords).shape) for c in coords])
        flat = coords.reshape(coords.shape[0], -1)
        if np.iscomplexobj(self.values):
            re = map_coordinates(self.values.real, flat, order=1, mode="constant", cval=0.0)
            im = map_coordinates(self.values.imag, flat, order=1, mode="constant", cval=0.0)
            out = re + 1j * im
        else:
            out = map_coordinates(self.values, flat, order=1, mode="constant", cval=0.0)
        return out.reshape(coords.shape[1:])

    def to_csv(self, path) -> None:
        x, u = self.grid.mesh()
        cols = [x[..., i].ravel() for i in range(self.grid.n)] + [u.ravel()]
        vals = self.values.ravel()
        names = [f"x{i + 1}" for i in range(self.grid.n)] + ["u", "value"]
        with open(path, "w", newline="\n") as fh:
            fh.write(self.grid.to_json() + "\n")
            fh.write(",".join(names) + "\n")
            for row in zip(*cols, vals):
                fh.write(",".join(repr(float(v)) for v in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "SampledFunction":
        with open(path) as fh:
            grid = GridSpec.from_json(fh.readline())
            fh.readline()
            data = np.loadtxt(fh, delimiter=",", ndmin=2)
        return cls(grid, data[:, -1].reshape(grid.shape))


def involute(f: SampledFunction) -> SampledFunction:
    """f*(x,u) = e^{-nu} conj f(-e^{-u} x, -u), sampled on the same grid."""
    x, u = f.grid.mesh()
    y = -np.exp(-u)[..., None] * x
    vals = np.exp(-f.grid.n * u) * np.conj(f.evaluate(y, -u))
    return SampledFunction(f.grid, vals)


def convolve(f: SampledFunction, g: SampledFunction) -> SampledFunction:
    """(f*g)(x,u) = int f(x - e^{u-u'} x', u-u') g(x',u') dx' du' on a shared grid.

    The inner integral is trapezoidal in (x', u') with f interpolated at the
    scaled translates.  Cost grows like (points)^2, so keep grids small.
    """
    if f.grid != g.grid:
        raise ValueError("convolution needs both factors on the same grid")
    grid = f.grid
    edge = _boundary_max(f.values)
    if edge > 1e-12 * max(np.max(np.abs(f.values)), 1e-300):
        warnings.warn("f does not decay at the grid boundary; convolution truncates it",
                      RuntimeWarning, stacklevel=2)
    x, u = grid.mesh()
    w = grid.trapezoid_weights() * g.values
    keep = w != 0
    xq, uq, wq = x[keep], u[keep], w[keep]          # source nodes
    xo = x.reshape(-1, grid.n)
    uo = u.reshape(-1)
    out = np.zeros(uo.shape, dtype=np.result_type(f.values, g.values))
    block = max(1, 2_000_000 // max(1, xq.shape[0]))
    for start in range(0, uo.size, block):
        sl = slice(start, start + block)
        scale = np.exp(uo[sl, None] - uq[None, :])
        y = xo[sl, None, :] - scale[..., None] * xq[None, :, :]
        vals = f.evaluate(y, uo[sl, None] - uq[None, :])
        out[sl] = vals @ wq
    return SampledFunction(grid, out.reshape(grid.shape))


def _boundary_max(v):
    m = 0.0
    for axis in range(v.ndim):
        m = max(m, float(np.max(np.abs(np.take(v, [0, -1], axis=axis)))))
    return m


# ---------------------------------------------------------------------------
# radial kernels m^{1/2} F(R) in adapted coordinates

class RadialProfile:
    """Cubic-spline table of a radial profile F(R) on [0, R_max], zero beyond."""

    def __init__(self, F, R_max: float = 25.0, step: float = 0.005):
        R = np.arange(0.0, R_max + step / 2, step)
        R[0] = 1e-9
        vals = np.asarray(F(R), dtype=float)
        self.R_max = R_max
        self._spline = CubicSpline(R, vals, bc_type=((1, 0.0), "not-a-knot"))

    def __call__(self, R):
        R = np.asarray(R, dtype=float)
        out = self._spline(np.minimum(R, self.R_max))
        return np.where(R > self.R_max, 0.0, out)


def convolve_radial(Fa, Fb, x, u, n: int = 1, u_extent: float = 10.0,
                    eta_extent: float = 6.0, panels_per_unit: int = 4, order: int = 16):
    """(f*g)(x,u) for f = m^{1/2}Fa(R), g = m^{1/2}Fb(R), n = 1.

    The source point is written q = (e^{u'/2} y', u'), in which
    m^{1/2}(q) dx' = dy' and R(q) depends on (y', u') only; y' = 2 sinh(eta)
    spreads the slowly decaying direction.  Tensor Gauss-Legendre in (eta, u').
    """
    if n != 1:
        raise NotImplementedError("convolve_radial is implemented for n = 1")
    up, wu = uniform_nodes(-u_extent, u_extent, int(2 * u_extent * panels_per_unit), order)
    eta, we = uniform_nodes(-eta_extent, eta_extent, int(2 * eta_extent * panels_per_unit), order)
    yp = 2.0 * np.sinh(eta)
    wy = we * 2.0 * np.cosh(eta)
    Up, Yp = np.meshgrid(up, yp, indexing="ij")
    W = np.outer(wu, wy)
    tq = 2.0 * np.sinh(0.5 * Up) ** 2 + 0.5 * Yp ** 2
    Rq = np.log1p(tq + np.sqrt(tq * (tq + 2.0)))
    base = W * Fb(Rq)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.empty(np.broadcast(x, u).shape)
    for idx, (xi, ui) in enumerate(np.broadcast(x, u)):
        v = ui - Up
        y = xi - np.exp(ui - 0.5 * Up) * Yp
        t = 2.0 * np.sinh(0.5 * v) ** 2 + 0.5 * np.exp(-v) * y * y
        d = np.log1p(t + np.sqrt(t * (t + 2.0)))
        out.flat[idx] = np.sum(base * np.exp(-0.5 * v) * Fa(d))
    return out


def radial_mass(F, n: int, r_max: float = 30.0, order: int = 24):
    """int_G m^{1/2}(x,u) F(d(x,u)) dx du via the (u, y) substitution x = e^{u/2} y.

    After the substitution the integrand is F(arccosh(cosh u + |y|^2/2)); the
    |y| integral is done in polar form.
    """
    from math import gamma, pi
    up, wu = uniform_nodes(-r_max, r_max, int(8 * r_max), order)
    rho_max = np.sqrt(2.0 * (np.cosh(r_max) - 1.0))
    eta, we = uniform_nodes(0.0, np.arcsinh(rho_max / 2.0), int(8 * r_max), order)
    rho = 2.0 * np.sinh(eta)
    wr = we * 2.0 * np.cosh(eta) * rho ** (n - 1) * 2 * pi ** (n / 2) / gamma(n / 2)
    U, P = np.meshgrid(up, rho, indexing="ij")
    t = 2.0 * np.sinh(0.5 * U) ** 2 + 0.5 * P ** 2
    R = np.log1p(t + np.sqrt(t * (t + 2.0)))
    return float(np.sum(np.outer(wu, wr) * F(R)))
