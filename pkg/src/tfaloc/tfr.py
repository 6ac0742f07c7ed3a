"""
Time-frequency representations on the sampled grid.

All distributions are fields on R^2d with axes ``(x, xi)``. The STFT,
Wigner and tau-Wigner distributions are computed by direct quadrature of
their defining integrals; :func:`wa` goes through a metaplectic operator.
"""
from __future__ import annotations

import numpy as np

from . import grid as _g
from .errors import DegenerateWindowPair
from .grid import SampledField, SampledFunction
from .metaplectic import MetaplecticOperator
from .sympmat import SymplecticMatrix


def _operator(A, op):
    if op is not None:
        if op.A is not A and not np.array_equal(op.A.entries, A.entries):
            raise ValueError("operator does not belong to the given matrix")
        return op
    return MetaplecticOperator(A)


def _offset_mesh(N: int, d: int):
    """Centered integer offsets for x (first d axes) and t (last d axes)."""
    k = np.arange(N) - N // 2
    j = np.arange(N)
    xs, ts = [], []
    for a in range(d):
        shp = [1] * (2 * d)
        shp[a] = N
        xs.append(k.reshape(shp))
        shp = [1] * (2 * d)
        shp[d + a] = N
        ts.append(j.reshape(shp))
    return xs, ts


def _gather(values: np.ndarray, idx: list) -> np.ndarray:
    """values[idx_0, ..., idx_{d-1}] with zero outside the box."""
    N = values.shape[0]
    valid = np.ones((), bool)
    clipped = []
    for ix in idx:
        valid = valid & (ix >= 0) & (ix < N)
        clipped.append(np.clip(ix, 0, N - 1))
    shape = np.broadcast_shapes(*[ix.shape for ix in idx])
    out = values[tuple(np.broadcast_to(c, shape) for c in clipped)]
    return np.where(valid, out, 0)


def translated_stack(g: SampledFunction) -> np.ndarray:
    """Array ``S[x, t] = g(t - x)`` over all on-grid ``x``, zero outside the box."""
    N, d = g.grid.N, g.grid.d
    xs, ts = _offset_mesh(N, d)
    return _gather(g.values, [t - x for x, t in zip(xs, ts)])


def stft(f: SampledFunction, g: SampledFunction) -> SampledField:
    """``V_g f(x, xi) = int f(t) conj(g(t - x)) exp(-2 pi i t xi) dt``."""
    _g._check_same(f, g)
    grid = f.grid
    grid.require_self_dual()
    d = grid.d
    prod = np.conj(translated_stack(g)) * f.values.reshape((1,) * d + f.values.shape)
    axes = tuple(range(d, 2 * d))
    return SampledField(grid, _g.centered_fft(prod, axes, grid.dx))


def _half_grid(values: np.ndarray) -> np.ndarray:
    """Band-limited samples on the grid refined by two: ``out[2p + a] = h(p + a/2)``."""
    d = values.ndim
    N = values.shape[0]
    out = np.zeros((2 * N,) * d, complex)
    for offs in np.ndindex(*(2,) * d):
        v = values
        for a, o in enumerate(offs):
            if o:
                v = _g._resample_axis(v, a, 1.0, 0.5)
        out[tuple(slice(o, None, 2) for o in offs)] = v
    return out


def wigner(f: SampledFunction, g: SampledFunction) -> SampledField:
    """
    Cross-Wigner distribution ``int f(x + t/2) conj(g(x - t/2)) exp(-2 pi i t xi) dt``.

    ``f`` and ``g`` are first interpolated onto the half-step grid, so every
    ``x +- t/2`` with on-grid ``x`` and ``t`` is a stored sample.
    """
    _g._check_same(f, g)
    grid = f.grid
    grid.require_self_dual()
    N, d = grid.N, grid.d
    fh, gh = _half_grid(f.values), _half_grid(g.values)
    j = np.arange(N)
    m = np.arange(N) - N // 2
    ip, im = [], []
    for a in range(d):
        shp = [1] * (2 * d)
        shp[a] = N
        x = 2 * j.reshape(shp)
        shp = [1] * (2 * d)
        shp[d + a] = N
        t = m.reshape(shp)
        ip.append(x + t)
        im.append(x - t)
    prod = _gather(fh, ip) * np.conj(_gather(gh, im))
    axes = tuple(range(d, 2 * d))
    return SampledField(grid, _g.centered_fft(prod, axes, grid.dx))


def _shifted_copies(values: np.ndarray, factor: float, d: int) -> np.ndarray:
    """``P[x, t] = h(x + factor * t)`` by band-limited shifts along each x axis."""
    N = values.shape[0]
    m = np.arange(N) - N // 2
    P = np.broadcast_to(values.reshape(values.shape + (1,) * d), (N,) * (2 * d)).astype(complex)
    for a in range(d):
        if factor == 0:
            break
        shp = [1] * (2 * d)
        shp[d + a] = N
        shift = factor * m.reshape(shp)
        if float(factor).is_integer():
            P = _g._exact_axis(P, a, 1, np.rint(shift).astype(int))
        else:
            P = _g._resample_axis(P, a, 1.0, shift)
    return P


def tau_wigner(f: SampledFunction, g: SampledFunction, tau: float) -> SampledField:
    """``int exp(-2 pi i t xi) f(x + tau t) conj(g(x - (1 - tau) t)) dt``."""
    _g._check_same(f, g)
    grid = f.grid
    grid.require_self_dual()
    d = grid.d
    tau = float(tau)
    prod = _shifted_copies(f.values, tau, d) * np.conj(_shifted_copies(g.values, -(1 - tau), d))
    axes = tuple(range(d, 2 * d))
    return SampledField(grid, _g.centered_fft(prod, axes, grid.dx))


def wa(A: SymplecticMatrix, f: SampledFunction, g: SampledFunction, op: MetaplecticOperator | None = None) -> SampledField:
    """Metaplectic Wigner distribution ``A^(f (x) conj g)``."""
    return _operator(A, op).apply(_g.tensor_conj(f, g))


def moyal_defect(A, f1, f2, g1, g2, op=None) -> float:
    """Normalized residual of ``<W_A(f1,f2), W_A(g1,g2)> = <f1,g1> conj<f2,g2>``."""
    op = _operator(A, op)
    lhs = _g.inner_product(wa(A, f1, f2, op), wa(A, g1, g2, op))
    rhs = _g.inner_product(f1, g1) * np.conj(_g.inner_product(f2, g2))
    scale = f1.norm() * f2.norm() * g1.norm() * g2.norm()
    return float(abs(lhs - rhs) / scale)


def covariance_defect(A, f, g, z, op=None, magnitude: bool = False) -> float:
    """
    ``||W_A(pi(z) f, pi(z) g) - T_z W_A(f, g)|| / ||W_A(f, g)||``.

    Both distributions come from one operator. With ``magnitude=True`` the
    moduli are compared instead (a diagnostic that ignores phase factors).
    """
    op = _operator(A, op)
    z = np.asarray(z, float).ravel()
    W = wa(A, f, g, op)
    lhs = wa(A, _g.tf_shift(z, f), _g.tf_shift(z, g), op).values
    rhs = _g.translate_field(W, z).values
    if magnitude:
        lhs, rhs = np.abs(lhs), np.abs(rhs)
    nrm = np.linalg.norm(W.values)
    return float(np.linalg.norm(lhs - rhs) / nrm)


def reproduce_wa(A, f, g, gamma, op=None, tol: float = 1e-6) -> SampledField:
    """
    Evaluate ``(1/<gamma, g>) int V_g f(w) W_A(pi(w) gamma, g) dw`` on the grid.

    ``W_A(., g)`` is linear in its first slot, so the phase-space sum is
    carried out on the function side first and ``A^`` is applied once.
    """
    op = _operator(A, op)
    ip = _g.inner_product(gamma, g)
    if abs(ip) < tol:
        raise DegenerateWindowPair(f"|<gamma, g>| = {abs(ip):.2e} is below {tol}")
    grid = f.grid
    d = grid.d
    V = stft(f, g).values
    axes = tuple(range(d, 2 * d))
    # int V(x, xi) exp(2 pi i xi t) dxi on the grid, then sum over x
    K = _g.centered_fft(V, axes, grid.dx, inverse=True)
    synth = np.sum(K * translated_stack(gamma), axis=tuple(range(d))) * grid.dx**d
    h = SampledFunction(grid, synth / ip)
    return wa(A, h, g, op)


def star_convolution_gap(A, f1, g1, f2, g2, op=None) -> float:
    """``||W_A(f1,g1) * W_A(f2,g2)^* - W(f1,g1) * W(f2,g2)^*||_inf``."""
    op = _operator(A, op)
    lhs = _g.convolve(wa(A, f1, g1, op), _g.involution_star(wa(A, f2, g2, op)))
    rhs = _g.convolve(wigner(f1, g1), _g.involution_star(wigner(f2, g2)))
    return float(np.max(np.abs(lhs.values - rhs.values)))


__all__ = [
    "stft",
    "wigner",
    "tau_wigner",
    "wa",
    "moyal_defect",
    "covariance_defect",
    "reproduce_wa",
    "star_convolution_gap",
    "translated_stack",
]
