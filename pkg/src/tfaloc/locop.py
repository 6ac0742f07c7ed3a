"""
Classical and metaplectic localization operators, their kernels and
adjoints, and the harness comparing the two families.
"""
from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass

import numpy as np

from . import grid as _g
from .errors import AliasWarning, DegenerateOperator, GridResolutionExceeded, SingularE
from .grid import GridSpec, SampledField, SampledFunction
from .metaplectic import MetaplecticOperator
from .quant import OperatorMatrix, op_a, symbol_hash
from .sympmat import (
    A_ST,
    D_S,
    J,
    SymplecticMatrix,
    A_tau,
    conjugate_matrix,
    identity,
    is_covariant,
    random_covariant,
)
from .tfr import translated_stack, wa


def classical_loc(a: SampledField, phi1: SampledFunction, phi2: SampledFunction) -> OperatorMatrix:
    """
    Localization operator ``f -> int a(z) V_phi1 f(z) pi(z) phi2 dz``.

    Assembled from the weak form: with ``B(x', v) = int a(x', xi) exp(2 pi i xi v) dxi``
    the kernel is ``k(x, y) = int phi2(x - x') conj(phi1(y - x')) B(x', x - y) dx'``.
    """
    _g._check_same(phi1, phi2)
    grid = a.grid
    if phi1.grid != grid:
        raise _g.GridMismatch("symbol and windows live on different grids")
    grid.require_self_dual()
    N, d = grid.N, grid.d
    n = N**d
    axes = tuple(range(d, 2 * d))
    B = _g.centered_fft(a.values, axes, grid.dx, inverse=True).reshape(n, n)
    P2 = translated_stack(phi2).reshape(n, n)  # [x', t] = phi2(t - x')
    P1 = np.conj(translated_stack(phi1)).reshape(n, n)
    # index of (x - y) in the centered offset axis, periodic in the box
    j = np.indices((N,) * d).reshape(d, -1)
    diff = (j[:, :, None] - j[:, None, :] + N // 2) % N
    flat = np.ravel_multi_index(tuple(diff), (N,) * d)
    K = np.zeros((n, n), complex)
    for xp in range(n):
        row2, row1 = P2[xp], P1[xp]
        if not row2.any() or not row1.any():
            continue
        K += np.multiply.outer(row2, row1) * B[xp][flat]
    K *= grid.dx**d
    return OperatorMatrix(grid, K, {"loc": "classical", "symbol": symbol_hash(a)})


def _op(A, op):
    return op if op is not None else MetaplecticOperator(A)


def kernel_a_loc(A: SymplecticMatrix, a: SampledField, phi1, phi2, op=None) -> SampledField:
    """Kernel ``A^-1 (a * W_A(phi2, phi1))``."""
    op = _op(A, op)
    return op.apply_inverse(_g.convolve(a, wa(A, phi2, phi1, op)))


def a_loc(A: SymplecticMatrix, a: SampledField, phi1, phi2, op=None) -> OperatorMatrix:
    """``Op_A(a * W_A(phi2, phi1))`` with one operator object for both factors."""
    op = _op(A, op)
    k = kernel_a_loc(A, a, phi1, phi2, op)
    return OperatorMatrix.from_kernel(k, loc="A", matrix=A.name, symbol=symbol_hash(a))


def a_loc_via_op_a(A: SymplecticMatrix, a: SampledField, phi1, phi2, op=None) -> OperatorMatrix:
    """Same operator assembled through :func:`tfaloc.quant.op_a`."""
    op = _op(A, op)
    return op_a(A, _g.convolve(a, wa(A, phi2, phi1, op)), op)


def theorem_gap(A, a, phi1, phi2, op=None, classical: OperatorMatrix | None = None) -> float:
    """Relative operator-norm distance between the A-localization and the classical one."""
    cl = classical if classical is not None else classical_loc(a, phi1, phi2)
    nrm = cl.op_norm()
    if nrm < 1e-12:
        raise DegenerateOperator(f"classical operator norm {nrm:.2e} is too small")
    return a_loc(A, a, phi1, phi2, op).distance(cl) / nrm


def adjoint_a_loc(A: SymplecticMatrix, a: SampledField, phi1, phi2, literal: bool = False) -> OperatorMatrix:
    """
    Adjoint of ``A_{a, A}^{phi1, phi2}`` as another A-localization operator.

    Returns ``A_{conj a, A' D_S}^{phi2, phi1}`` with ``A' = R A R`` and
    ``R = diag(I, -I)``, the matrix whose lift is ``F -> conj(A^ conj F)``.
    With ``literal=True`` the matrix ``A D_S`` is used instead; the two agree
    whenever ``A^`` commutes with complex conjugation (``A' = A``).
    """
    base = A if literal else conjugate_matrix(A)
    return a_loc(base @ D_S(A.d), a.conj(), phi2, phi1)


def kernel_twd(E, a: SampledField, phi1: SampledFunction, phi2: SampledFunction) -> SampledField:
    """
    Kernel of the A-localization operator for ``A = A_FT2 D_E`` by the explicit
    formula ``k(x, y) = int b(u - t, v) phi2(P t + Q v) conj(phi1(R t + S v)) dt``,
    where ``(u, v) = E^-1 (x, y)``, ``b`` is the inverse Fourier transform of
    ``a`` in its second variable and ``[[P, Q], [R, S]]`` are the blocks of ``E``.
    """
    E = np.atleast_2d(np.asarray(E, float))
    if abs(np.linalg.det(E)) <= 1e-12:
        raise SingularE("E must be invertible")
    grid = a.grid
    grid.require_self_dual()
    if grid.d != 1:
        raise NotImplementedError("kernel_twd evaluates off-grid windows for d = 1 only")
    N, dx = grid.N, grid.dx
    b = _g.centered_fft(a.values, (1,), dx, inverse=True)
    t = grid.axis()[:, None]
    v = grid.axis()[None, :]
    p2 = _g.interpolate_function(phi2, E[0, 0] * t + E[0, 1] * v)
    p1 = _g.interpolate_function(phi1, E[1, 0] * t + E[1, 1] * v)
    P = p2 * np.conj(p1)  # [t, v]
    # linear convolution in the first variable, cropped to the grid
    L = 2 * N
    G = np.fft.ifft(np.fft.fft(b, L, axis=0) * np.fft.fft(P, L, axis=0), axis=0)
    G = G[N // 2 : N // 2 + N] * dx
    k = _g.resample_linear(G, np.linalg.inv(E))
    return SampledField(grid, k)


def unboundedness_probe(eps_list, grid: GridSpec | None = None, f: SampledFunction | None = None,
                        g: SampledFunction | None = None, phi1=None, phi2=None) -> list[float]:
    """
    ``|<A f, g_eps>|`` for ``A`` the A-localization with ``A = J`` and ``a = 1``,
    where ``g_eps(t) = eps^(-d/2) g(t / eps)``.

    The symbol is constant, so ``a * W_J(phi2, phi1)`` is the constant
    ``int W_J(phi2, phi1)``; it is evaluated by quadrature rather than by a
    convolution that the finite box would truncate.
    """
    grid = grid or GridSpec()
    d = grid.d
    phi = _g.gaussian(grid)
    phi1 = phi1 or phi
    phi2 = phi2 or phi
    f = f or _g.gaussian(grid, x0=0.25)
    g = g or phi
    A = J(d)
    op = MetaplecticOperator(A)
    W = wa(A, phi2, phi1, op)
    c = np.sum(W.values) * W.weight
    const = SampledField(grid, np.full(W.values.shape, c))
    K = OperatorMatrix.from_kernel(op.apply_inverse(const), loc="A", matrix="J")
    out = []
    for eps in eps_list:
        eps = float(eps)
        if eps < 4 * grid.dx:
            raise GridResolutionExceeded(f"eps={eps} is below 4 dx = {4 * grid.dx}")
        ge = SampledFunction(grid, eps ** (-d / 2) * _g.interpolate_function(g, grid.axis() / eps))
        out.append(abs(K.pairing(f, ge)))
    return out


# -------------------------------------------------------------- panel harness


@dataclass(frozen=True)
class PanelEntry:
    matrix: str
    symbol: str
    windows: str
    gap: float
    covariant: bool


def default_symbols(grid: GridSpec) -> dict:
    d = grid.d
    n = 2 * d
    cs = grid.coords(n)
    omega = np.array([0.5, 0.25] * d)
    phase = sum(w * c for w, c in zip(omega, cs))
    r2 = sum(c**2 for c in cs)
    delta_at = [11 / 16] + [0.0] * (n - 1)
    return {
        "gaussian": _g.field_gaussian(grid, center=[0.25, -0.5] * d),
        "delta": _g.delta_proxy(grid, delta_at, snap=True),
        "oscillatory": SampledField(grid, np.cos(2 * np.pi * phase) * np.exp(-np.pi * r2 / 4)),
    }


def default_windows(grid: GridSpec) -> dict:
    phi = _g.gaussian(grid)
    return {
        "phi,phi": (phi, phi),
        "phi,psi": (phi, _g.gaussian(grid, x0=0.25, xi0=0.5, scale=1.2)),
    }


def default_matrices(d: int = 1, seed: int = 20240601, n_random: int = 3) -> dict:
    """Covariant panel matrices and the two non-covariant witnesses."""
    rng = np.random.default_rng(seed)
    mats = {f"A_tau({t})": A_tau(d, t) for t in (0.0, 0.25, 0.5, 0.75, 1.0)}
    for i in range(n_random):
        M = random_covariant(d, rng)
        mats[f"covariant_{i}"] = SymplecticMatrix(M.entries, d, f"covariant_{i}", tol=1e-9)
    mats["I"] = identity(d)
    mats["A_ST"] = A_ST(d)
    return mats


def run_panel(grid: GridSpec | None = None, matrices: dict | None = None, symbols: dict | None = None,
              windows: dict | None = None, seed: int = 20240601) -> list[PanelEntry]:
    grid = grid or GridSpec()
    matrices = matrices if matrices is not None else default_matrices(grid.d, seed)
    symbols = symbols if symbols is not None else default_symbols(grid)
    windows = windows if windows is not None else default_windows(grid)
    classical = {
        (sn, wn): classical_loc(a, *w) for sn, a in symbols.items() for wn, w in windows.items()
    }
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasWarning)
        for mn, A in matrices.items():
            op = MetaplecticOperator(A)
            cov = bool(is_covariant(A))
            for sn, a in symbols.items():
                for wn, (p1, p2) in windows.items():
                    gap = theorem_gap(A, a, p1, p2, op, classical[(sn, wn)])
                    rows.append(PanelEntry(mn, sn, wn, gap, cov))
    rows.sort(key=lambda r: (r.matrix, r.symbol, r.windows))
    return rows


def panel_verdict(rows, fwd_tol: float = 1e-4, sep_tol: float = 0.05, witnesses=("I", "A_ST")):
    """``(ok, messages)``: covariant gaps small and every witness separated."""
    msgs = []
    ok = True
    bad = [r for r in rows if r.covariant and not r.gap < fwd_tol]
    for r in bad:
        msgs.append(f"covariant gap too large: {r.matrix} {r.symbol} {r.windows} {r.gap:.3e}")
    ok &= not bad
    for w in witnesses:
        sel = [r.gap for r in rows if r.matrix == w]
        if not sel:
            continue
        if max(sel) > sep_tol:
            msgs.append(f"{w}: separated (max gap {max(sel):.3e})")
        else:
            ok = False
            msgs.append(f"{w}: not separated by panel (max gap {max(sel):.3e})")
    return ok, msgs


def panel_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["matrix", "symbol", "windows", "covariant", "gap"])
    for r in rows:
        w.writerow([r.matrix, r.symbol, r.windows, int(r.covariant), f"{r.gap:.6e}"])
    return buf.getvalue()


__all__ = [
    "classical_loc",
    "a_loc",
    "a_loc_via_op_a",
    "kernel_a_loc",
    "kernel_twd",
    "theorem_gap",
    "adjoint_a_loc",
    "unboundedness_probe",
    "default_symbols",
    "default_windows",
    "default_matrices",
    "run_panel",
    "panel_verdict",
    "panel_csv",
    "PanelEntry",
]
