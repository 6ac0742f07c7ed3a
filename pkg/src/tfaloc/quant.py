"""
Dense operator matrices from sampled symbols.

An :class:`OperatorMatrix` stores kernel samples ``K[i, j] = k(x_i, y_j)``
with multi-indices flattened row-major. The operator acts by the Riemann
sum ``(Op f)(x_i) = sum_j K[i, j] f(y_j) dx^d``, so the pairing is
``<Op f, g> = g^H K f dx^(2d)`` and the identity has ``K = I / dx^d``.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from . import grid as _g
from .grid import GridSpec, SampledField, SampledFunction
from .metaplectic import MetaplecticOperator
from .sympmat import SymplecticMatrix, A_half


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    grid: GridSpec
    entries: np.ndarray = field(repr=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.grid.N**self.grid.d
        K = np.asarray(self.entries, dtype=complex)
        if K.shape != (n, n):
            K = K.reshape(n, n)
        object.__setattr__(self, "entries", K)

    @property
    def weight(self) -> float:
        return self.grid.dx**self.grid.d

    @property
    def matrix(self) -> np.ndarray:
        """Matrix of the operator on L^2 coordinates: ``K dx^d``."""
        return self.entries * self.weight

    @classmethod
    def from_kernel(cls, k: SampledField, **meta) -> "OperatorMatrix":
        n = k.grid.N**k.grid.d
        return cls(k.grid, k.values.reshape(n, n), dict(meta))

    def kernel(self) -> SampledField:
        return SampledField(self.grid, self.entries)

    def apply(self, f: SampledFunction) -> SampledFunction:
        if f.grid != self.grid:
            raise _g.GridMismatch("function and operator live on different grids")
        out = self.entries @ f.values.ravel() * self.weight
        return SampledFunction(self.grid, out)

    def pairing(self, f: SampledFunction, g: SampledFunction) -> complex:
        """``<Op f, g>``."""
        return _g.inner_product(self.apply(f), g)

    def adjoint(self) -> "OperatorMatrix":
        return OperatorMatrix(self.grid, self.entries.conj().T, {**self.meta, "adjoint": True})

    def op_norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))

    def __sub__(self, other: "OperatorMatrix") -> "OperatorMatrix":
        if other.grid != self.grid:
            raise _g.GridMismatch("operators live on different grids")
        return OperatorMatrix(self.grid, self.entries - other.entries, {"difference": True})

    def distance(self, other: "OperatorMatrix") -> float:
        """Operator-norm distance."""
        return (self - other).op_norm()


def symbol_hash(a: SampledField) -> str:
    return hashlib.sha1(np.ascontiguousarray(a.values).tobytes()).hexdigest()[:12]


def _shear(values: np.ndarray, d: int, factor: float) -> np.ndarray:
    """``out[u, v] = values(u + factor * v, v)`` with v the last d axes, in sample units."""
    N = values.shape[0]
    m = np.arange(N) - N // 2
    out = values
    if factor == 0:
        return out.copy()
    for a in range(d):
        shp = [1] * (2 * d)
        shp[d + a] = N
        shift = factor * m.reshape(shp)
        if float(factor).is_integer():
            out = _g._exact_axis(out, a, 1, np.rint(shift).astype(int))
        else:
            out = _g._resample_axis(out, a, 1.0, shift)
    return out


def _diagonal_to_kernel(C: np.ndarray, d: int) -> np.ndarray:
    """Scatter ``C[x, m]`` into ``K[x, x - m]`` (offsets ``m`` centered)."""
    N = C.shape[0]
    j = np.arange(N)
    m = np.arange(N) - N // 2
    K = np.zeros((N,) * (2 * d), complex)
    xi, yi, valid = [], [], np.ones((), bool)
    for a in range(d):
        shp = [1] * (2 * d)
        shp[a] = N
        x = j.reshape(shp)
        shp = [1] * (2 * d)
        shp[d + a] = N
        y = x - m.reshape(shp)
        valid = valid & (y >= 0) & (y < N)
        xi.append(x)
        yi.append(y)
    shape = C.shape
    idx = tuple(np.broadcast_to(v, shape)[np.broadcast_to(valid, shape)] for v in xi + yi)
    K[idx] = C[np.broadcast_to(valid, shape)]
    return K


def op_tau(a: SampledField, tau: float) -> OperatorMatrix:
    """
    tau-quantization: ``k(x, y) = int a((1 - tau) x + tau y, xi) exp(2 pi i (x - y) xi) dxi``.

    With ``b`` the inverse Fourier transform of ``a`` in ``xi``, the kernel
    along the diagonal offset ``m = x - y`` is ``b(x - tau m, m)``; the shift
    in the first variable is done by band-limited resampling.
    """
    grid = a.grid
    grid.require_self_dual()
    d = grid.d
    axes = tuple(range(d, 2 * d))
    b = _g.centered_fft(a.values, axes, grid.dx, inverse=True)
    C = _shear(b, d, -float(tau))
    K = _diagonal_to_kernel(C, d)
    n = grid.N**d
    return OperatorMatrix(grid, K.reshape(n, n), {"quant": "tau", "tau": float(tau), "symbol": symbol_hash(a)})


def op_weyl(sigma: SampledField) -> OperatorMatrix:
    out = op_tau(sigma, 0.5)
    return OperatorMatrix(out.grid, out.entries, {**out.meta, "quant": "weyl"})


def _operator(A, op):
    return op if op is not None else MetaplecticOperator(A)


def op_a(A: SymplecticMatrix, a: SampledField, op: MetaplecticOperator | None = None) -> OperatorMatrix:
    """``Op_A(a)`` with kernel ``A^-1 a``; pass ``op`` to share a phase with ``wa``."""
    k = _operator(A, op).apply_inverse(a)
    return OperatorMatrix.from_kernel(k, quant="A", matrix=A.name, symbol=symbol_hash(a))


def change_symbol(A: SymplecticMatrix, B: SymplecticMatrix, a: SampledField,
                  op_A: MetaplecticOperator | None = None,
                  op_B: MetaplecticOperator | None = None) -> SampledField:
    """``b = B^ A^-1 a`` so that ``Op_B(b) = Op_A(a)``."""
    return _operator(B, op_B).apply(_operator(A, op_A).apply_inverse(a))


def weyl_symbol_of_aloc(A: SymplecticMatrix, a: SampledField, phi1: SampledFunction,
                        phi2: SampledFunction, op: MetaplecticOperator | None = None) -> SampledField:
    """Weyl symbol ``A_half^ A^-1 (a * W_A(phi2, phi1))`` of the A-localization operator."""
    from .tfr import wa

    op = _operator(A, op)
    conv = _g.convolve(a, wa(A, phi2, phi1, op))
    return change_symbol(A, A_half(A.d), conv, op_A=op)


def rank_one(grid: GridSpec, u: SampledFunction, v: SampledFunction) -> OperatorMatrix:
    """``f -> <f, v> u``."""
    K = np.outer(u.values.ravel(), np.conj(v.values.ravel()))
    return OperatorMatrix(grid, K, {"quant": "rank_one"})


__all__ = [
    "OperatorMatrix",
    "op_tau",
    "op_weyl",
    "op_a",
    "change_symbol",
    "weyl_symbol_of_aloc",
    "rank_one",
    "symbol_hash",
]
