"""
Centered uniform grids, sampled functions on R^d and R^2d, and the
elementary operators acting on them.

Conventions
-----------
An axis with ``N`` points and spacing ``dx`` carries the coordinates
``(j - N/2) * dx`` for ``j = 0..N-1``; the origin sits at index ``N/2``.
The Fourier transform is ``F f(xi) = int f(x) exp(-2 pi i x xi) dx``,
discretized as a centered DFT scaled by ``dx`` so that it is unitary with
respect to the Riemann-sum inner product. The dual spacing is
``dxi = 1 / (N dx)``. Grids with ``dx == dxi`` (``dx = N**-0.5``) are
self-dual: Fourier maps the grid onto itself, which is required by every
operation that mixes position and frequency axes of a phase-space field.

Functions are assumed to vanish outside the box; translations and
resampling fill with zeros instead of wrapping around.
"""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    AliasWarning,
    GridMismatch,
    InterpolationResidualExceeded,
    OffGridTranslation,
)

_ON_GRID_TOL = 1e-9


@dataclass(frozen=True)
class GridSpec:
    d: int = 1
    N: int = 256
    dx: float | None = None

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"d must be 1 or 2, got {self.d}")
        if self.N < 2 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two, got {self.N}")
        if self.dx is None:
            object.__setattr__(self, "dx", 1.0 / math.sqrt(self.N))
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        object.__setattr__(self, "dx", float(self.dx))

    @property
    def dxi(self) -> float:
        return 1.0 / (self.N * self.dx)

    @property
    def length(self) -> float:
        return self.N * self.dx

    @property
    def self_dual(self) -> bool:
        return abs(self.dx - self.dxi) <= 1e-12 * self.dx

    def axis(self) -> np.ndarray:
        return (np.arange(self.N) - self.N // 2) * self.dx

    def dual(self) -> "GridSpec":
        return GridSpec(self.d, self.N, self.dxi)

    def coords(self, ndim: int) -> list[np.ndarray]:
        """Open mesh of coordinates for an ``ndim``-dimensional array."""
        ax = self.axis()
        out = []
        for k in range(ndim):
            shape = [1] * ndim
            shape[k] = self.N
            out.append(ax.reshape(shape))
        return out

    def require_self_dual(self):
        if not self.self_dual:
            raise GridMismatch(
                f"operation needs a self-dual grid (dx = N**-0.5), got N={self.N}, dx={self.dx}"
            )


@dataclass(frozen=True, eq=False)
class _Sampled:
    grid: GridSpec
    values: np.ndarray = field(repr=False)

    _rank = 1  # number of copies of R^d

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        expected = (self.grid.N,) * (self._rank * self.grid.d)
        if v.shape != expected:
            if v.size == math.prod(expected):
                v = v.reshape(expected)
            else:
                raise GridMismatch(f"values of shape {v.shape} do not fit grid {expected}")
        if not np.all(np.isfinite(v)):
            raise ValueError("sampled values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def weight(self) -> float:
        return self.grid.dx ** self.ndim

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.values) ** 2) * self.weight))

    def with_values(self, values):
        return type(self)(self.grid, values)

    def __mul__(self, c):
        return self.with_values(self.values * c)

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _check_same(self, other)
        return self.with_values(self.values - other.values)

    def conj(self):
        return self.with_values(np.conj(self.values))


class SampledFunction(_Sampled):
    """Samples of a function on R^d."""

    _rank = 1

    @classmethod
    def from_callable(cls, grid: GridSpec, fn):
        return cls(grid, fn(*np.meshgrid(*([grid.axis()] * grid.d), indexing="ij")))


class SampledField(_Sampled):
    """Samples of a function on R^2d, axes ordered (x, xi) or (x, y)."""

    _rank = 2

    @classmethod
    def from_callable(cls, grid: GridSpec, fn):
        return cls(grid, fn(*np.meshgrid(*([grid.axis()] * (2 * grid.d)), indexing="ij")))


def _check_same(a, b):
    if a.grid != b.grid or a.values.shape != b.values.shape:
        raise GridMismatch(f"grids differ: {a.grid} vs {b.grid}")


def gaussian(grid: GridSpec, x0=0.0, xi0=0.0, scale=1.0) -> SampledFunction:
    """``exp(2 pi i xi0.t) exp(-pi |t - x0|^2 / scale^2)`` (unnormalized)."""
    x0 = np.broadcast_to(np.asarray(x0, float), (grid.d,))
    xi0 = np.broadcast_to(np.asarray(xi0, float), (grid.d,))
    cs = grid.coords(grid.d)
    r2 = sum((c - a) ** 2 for c, a in zip(cs, x0))
    ph = sum(c * b for c, b in zip(cs, xi0))
    return SampledFunction(grid, np.exp(-np.pi * r2 / scale**2) * np.exp(2j * np.pi * ph))


def field_gaussian(grid: GridSpec, center=0.0, scale=1.0) -> SampledField:
    """``exp(-pi |w - center|^2 / scale^2)`` on R^2d."""
    n = 2 * grid.d
    c0 = np.broadcast_to(np.asarray(center, float), (n,))
    cs = grid.coords(n)
    r2 = sum((c - a) ** 2 for c, a in zip(cs, c0))
    return SampledField(grid, np.exp(-np.pi * r2 / scale**2))


def delta_proxy(grid: GridSpec, z0=0.0, snap=False) -> SampledField:
    """One-hot field at the grid point ``z0`` scaled by ``1/dx^2d``."""
    n = 2 * grid.d
    z0 = np.broadcast_to(np.asarray(z0, float), (n,))
    idx = grid_offsets(grid, z0, snap=snap) + grid.N // 2
    if np.any(idx < 0) or np.any(idx >= grid.N):
        raise OffGridTranslation(f"point {z0} lies outside the box")
    v = np.zeros((grid.N,) * n, complex)
    v[tuple(idx)] = 1.0 / grid.dx**n
    return SampledField(grid, v)


def grid_offsets(grid: GridSpec, x, snap=False) -> np.ndarray:
    """Integer sample offsets of the coordinates ``x``; raises if off-grid."""
    u = np.atleast_1d(np.asarray(x, float)) / grid.dx
    k = np.rint(u)
    if not snap and np.any(np.abs(u - k) > _ON_GRID_TOL * max(1.0, np.max(np.abs(u)))):
        raise OffGridTranslation(f"{x} is not a multiple of dx={grid.dx}")
    return k.astype(int)


# ---------------------------------------------------------------- quadrature


def inner_product(f, g) -> complex:
    """Riemann-sum inner product, conjugate-linear in ``g``."""
    _check_same(f, g)
    return complex(np.vdot(g.values, f.values) * f.weight)


# ------------------------------------------------------------------- fourier


def _cfft(v, axes, inverse=False):
    v = np.fft.ifftshift(v, axes=axes)
    v = np.fft.ifftn(v, axes=axes, norm="forward") if inverse else np.fft.fftn(v, axes=axes)
    return np.fft.fftshift(v, axes=axes)


def centered_fft(values, axes, dx, inverse=False):
    """Continuous Fourier transform along ``axes`` of samples with spacing ``dx``."""
    axes = tuple(axes)
    return _cfft(values, axes, inverse) * dx ** len(axes)


def fourier(f: SampledFunction) -> SampledFunction:
    """Unitary Fourier transform; the result lives on the dual grid."""
    g = f.grid
    return SampledFunction(g.dual(), centered_fft(f.values, range(f.ndim), g.dx))


def inverse_fourier(f: SampledFunction) -> SampledFunction:
    g = f.grid
    return SampledFunction(g.dual(), centered_fft(f.values, range(f.ndim), g.dx, inverse=True))


def fourier_axes(F, axes, inverse=False):
    """Fourier transform of a field along a subset of its axes (self-dual grids only)."""
    F.grid.require_self_dual()
    return F.with_values(centered_fft(F.values, axes, F.grid.dx, inverse=inverse))


# ----------------------------------------------------- translations & shifts


def _int_shift(values, axis, k):
    """out[j] = values[j + k] along ``axis`` with zero fill; ``k`` may broadcast."""
    N = values.shape[axis]
    k = np.asarray(k)
    if k.ndim == 0:
        k = int(k)
        out = np.zeros_like(values)
        if abs(k) >= N:
            return out
        src = [slice(None)] * values.ndim
        dst = [slice(None)] * values.ndim
        if k >= 0:
            src[axis], dst[axis] = slice(k, N), slice(0, N - k)
        else:
            src[axis], dst[axis] = slice(0, N + k), slice(-k, N)
        out[tuple(dst)] = values[tuple(src)]
        return out
    shape = [1] * values.ndim
    shape[axis] = N
    j = np.arange(N).reshape(shape)
    idx = j + k.astype(int)
    valid = (idx >= 0) & (idx < N)
    idx = np.broadcast_to(np.clip(idx, 0, N - 1), np.broadcast_shapes(idx.shape, values.shape))
    out = np.take_along_axis(np.broadcast_to(values, idx.shape), idx, axis=axis)
    return np.where(valid, out, 0)


def translate(values, offsets):
    """Shift by integer sample offsets per axis: out(w) = values(w - offsets)."""
    out = values
    for ax, k in enumerate(offsets):
        if k:
            out = _int_shift(out, ax, -int(k))
    return out


def tf_shift(z, f: SampledFunction) -> SampledFunction:
    """Time-frequency shift ``pi(z) f(t) = exp(2 pi i xi.t) f(t - x)``; x must be on-grid."""
    g = f.grid
    z = np.asarray(z, float).ravel()
    if z.size != 2 * g.d:
        raise ValueError(f"z must have {2 * g.d} components")
    x, xi = z[: g.d], z[g.d :]
    v = translate(f.values, grid_offsets(g, x))
    cs = g.coords(g.d)
    ph = sum(c * b for c, b in zip(cs, xi))
    return SampledFunction(g, v * np.exp(2j * np.pi * ph))


def translate_field(F: SampledField, z) -> SampledField:
    """``T_z F(w) = F(w - z)`` for an on-grid phase-space point ``z``."""
    return F.with_values(translate(F.values, grid_offsets(F.grid, z)))


def tensor_conj(f: SampledFunction, g: SampledFunction) -> SampledField:
    """``f (x) conj(g)``: values[(x, y)] = f(x) conj(g(y))."""
    _check_same(f, g)
    return SampledField(f.grid, np.multiply.outer(f.values, np.conj(g.values)))


def involution_star(F):
    """``F*(w) = conj(F(-w))``; index reversal about the grid center."""
    axes = tuple(range(F.ndim))
    v = np.roll(np.flip(F.values, axis=axes), 1, axis=axes)
    return F.with_values(np.conj(v))


def tail_fraction(values) -> float:
    """Fraction of the squared mass outside the central half box."""
    N = values.shape[0]
    tot = np.sum(np.abs(values) ** 2)
    if tot == 0:
        return 0.0
    inner = tuple(slice(N // 4, N - N // 4) for _ in range(values.ndim))
    return float(1.0 - np.sum(np.abs(values[inner]) ** 2) / tot)


def convolve(F, G, alias_tol=1e-9):
    """Linear convolution on R^n via zero-padded FFT, cropped to the grid."""
    _check_same(F, G)
    for name, H in (("first", F), ("second", G)):
        t = tail_fraction(H.values)
        if t > alias_tol:
            warnings.warn(
                f"{name} operand has tail mass fraction {t:.2e} outside the half box",
                AliasWarning,
                stacklevel=2,
            )
    N = F.grid.N
    n = F.ndim
    shape = (2 * N,) * n
    axes = tuple(range(n))
    full = np.fft.ifftn(np.fft.fftn(F.values, shape, axes) * np.fft.fftn(G.values, shape, axes), axes=axes)
    crop = tuple(slice(N // 2, N // 2 + N) for _ in range(n))
    return F.with_values(full[crop] * F.weight)


# --------------------------------------------------------------- resampling


def _nyquist_free_k(N):
    k = np.fft.fftfreq(N, 1.0 / N)
    return k, np.argmin(k)  # index of -N/2


def _resample_axis(values, axis, scale, shift, check=None):
    """
    Evaluate the band-limited interpolant along ``axis`` at index positions
    ``scale * (j - N/2) + N/2 + shift``; ``shift`` broadcasts over the other
    axes. Positions outside the sampled range give zero.
    """
    N = values.shape[axis]
    v = np.moveaxis(values, axis, -1)
    shift = np.asarray(shift, float)
    if shift.ndim:
        shift = np.moveaxis(shift, axis, -1)
    if scale == -1:
        # reflection about the center index is exact on the grid
        v = np.roll(np.flip(v, axis=-1), 1, axis=-1).copy()
        v[..., 0] = 0
        scale, shift = 1.0, -shift
    if check is not None:
        check(v)
    j = np.arange(N)
    pos = scale * (j - N // 2) + N // 2 + shift
    k, nyq = _nyquist_free_k(N)
    C = np.fft.fft(v, axis=-1)
    cn = C[..., nyq : nyq + 1].copy()
    C = C * np.exp(2j * np.pi * k * shift / N)
    if scale == 1:
        C[..., nyq] = 0
        out = np.fft.ifft(C, axis=-1) + (cn / N) * np.cos(np.pi * pos)
    else:
        C[..., nyq] = 0
        base = scale * (j - N // 2) + N // 2
        Emat = np.exp(2j * np.pi * np.outer(base, k) / N)
        out = (C @ Emat.T) / N + (cn / N) * np.cos(np.pi * pos)
    out = np.where((pos >= -0.5) & (pos <= N - 0.5), out, 0)
    return np.moveaxis(out, -1, axis)


def _row_ops(M):
    """Factor ``M = R_1 ... R_n`` with ``R_i`` replacing row i of the identity."""
    n = M.shape[0]
    P = np.eye(n)
    rows = [None] * n
    for i in range(n - 1, -1, -1):
        r = M[i] @ np.linalg.inv(P)
        if abs(r[i]) < 1e-8:
            return None
        R = np.eye(n)
        R[i] = r
        rows[i] = r
        P = R @ P
    return rows


def _is_int(x, tol=1e-12):
    return np.all(np.abs(x - np.rint(x)) <= tol)


def _plan_linear(M):
    """Pick an axis permutation and row factorization favouring exact index maps."""
    n = M.shape[0]
    best = None
    for perm in itertools.permutations(range(n)):
        Pm = np.eye(n)[list(perm)]  # (Pm w)_i = w_perm[i]
        Mp = M @ Pm.T  # M = Mp Pm, Pm orthogonal
        rows = _row_ops(Mp)
        if rows is None:
            continue
        piv = np.array([abs(r[i]) for i, r in enumerate(rows)])
        if np.min(piv) < 1e-8:
            continue
        exact = sum(
            1 for i, r in enumerate(rows) if _is_int(r) and abs(abs(r[i]) - 1) < 1e-12
        )
        unit = sum(1 for i, r in enumerate(rows) if abs(abs(r[i]) - 1) < 1e-12)
        ident = sum(1 for i, r in enumerate(rows) if np.allclose(r, np.eye(n)[i], atol=1e-14))
        score = (exact, unit, ident, float(np.min(np.minimum(piv, 1 / piv))), perm == tuple(range(n)))
        if best is None or score > best[0]:
            best = (score, perm, rows)
    if best is None:
        raise np.linalg.LinAlgError("linear map is singular")
    return best[1], best[2]


def resample_linear(values, M, interp_tol=None):
    """
    Return samples of ``w -> F(M w)`` for an invertible real matrix ``M``
    acting on all axes of ``values`` (every axis shares the same spacing).

    Maps that send the grid to itself use exact index gathers; everything
    else goes through 1-D band-limited resampling. With ``interp_tol`` set,
    raise when the energy the interpolation cannot represent (spectral
    content in the outer eighth of the band) exceeds that fraction of the
    input norm.
    """
    M = np.asarray(M, float)
    n = values.ndim
    N = values.shape[0]
    if np.allclose(M, np.eye(n), atol=1e-15):
        return values.copy()
    perm, rows = _plan_linear(M)
    total = np.sqrt(np.sum(np.abs(values) ** 2))

    def check(v):
        if interp_tol is None or total == 0:
            return
        k = np.abs(np.fft.fftfreq(N, 1.0 / N))
        hi = np.sum(np.abs(np.fft.fft(v, axis=-1)[..., k >= 3 * N // 8]) ** 2) / N
        res = np.sqrt(hi) / total
        if res > interp_tol:
            raise InterpolationResidualExceeded(res, interp_tol)

    out = values
    for i, r in enumerate(rows):
        if np.allclose(r, np.eye(n)[i], atol=1e-15):
            continue
        shift = 0.0
        for k2 in range(n):
            if k2 != i and r[k2] != 0:
                shape = [1] * n
                shape[k2] = N
                shift = shift + r[k2] * (np.arange(N) - N // 2).reshape(shape)
        scale = r[i]
        if _is_int(r) and abs(abs(scale) - 1) < 1e-12:
            shift = np.rint(shift).astype(int) if np.ndim(shift) else int(round(shift))
            out = _exact_axis(out, i, int(round(scale)), shift)
        else:
            out = _resample_axis(out, i, scale, shift, check=check)
    inv = np.argsort(perm)
    return np.transpose(out, axes=inv)


def _exact_axis(values, axis, sign, shift):
    """out[j] = values[sign*(j - N/2) + N/2 + shift] along ``axis``, zero outside."""
    if sign == -1:
        values = np.moveaxis(values, axis, -1)
        values = np.roll(np.flip(values, axis=-1), 1, axis=-1)
        values[..., 0] = 0
        values = np.moveaxis(values, -1, axis)
        shift = -shift
    return _int_shift(values, axis, shift)


def linear_change(F, E, interp_tol=None):
    """``|det E|^(1/2) F(E .)`` on a field."""
    E = np.asarray(E, float)
    det = np.linalg.det(E)
    return F.with_values(abs(det) ** 0.5 * resample_linear(F.values, E, interp_tol))


def chirp(F, C):
    """Pointwise multiplication by ``exp(pi i w.Cw)``."""
    C = np.asarray(C, float)
    cs = F.grid.coords(F.ndim)
    q = 0.0
    for a in range(F.ndim):
        for b in range(F.ndim):
            if C[a, b] != 0:
                q = q + C[a, b] * cs[a] * cs[b]
    return F.with_values(F.values * np.exp(1j * np.pi * q))


def interpolate_function(f: SampledFunction, points) -> np.ndarray:
    """Band-limited interpolant of a 1-D sampled function at arbitrary coordinates."""
    g = f.grid
    if g.d != 1:
        raise NotImplementedError("point interpolation is implemented for d = 1")
    pts = np.asarray(points, float)
    N = g.N
    k, nyq = _nyquist_free_k(N)
    C = np.fft.fft(f.values)
    pos = pts / g.dx + N // 2
    flat = pos.ravel()
    out = np.empty(flat.shape, complex)
    kk = k.copy()
    kk[nyq] = 0
    cn = C[nyq]
    Cz = C.copy()
    Cz[nyq] = 0
    step = max(1, 2**22 // N)
    for s in range(0, flat.size, step):
        p = flat[s : s + step]
        out[s : s + step] = (np.exp(2j * np.pi * np.outer(p, kk) / N) @ Cz + cn * np.cos(np.pi * p)) / N
    out = np.where((flat >= -0.5) & (flat <= N - 0.5), out, 0)
    return out.reshape(pos.shape)
