"""
Metaplectic operators on sampled fields over R^2d.

A :class:`MetaplecticOperator` turns a symplectic matrix into a fixed list
of elementary actions (full or partial Fourier transforms, linear changes
of variables, chirp multiplications) together with a unimodular constant
``phase``. The list is chosen once per matrix:

``identity``      no action
``fourier``       ``A = J``
``linear``        ``A = V_C D_E`` (upper-right block zero)
``decomposable``  ``A = A_FT2 D_E``: change of variables, then Fourier in
                  the last d variables
``half_upper``    ``A = U B`` with ``U`` upper block triangular and ``B`` one
                  of ``A_half``, ``A_half D_S``: the decomposable action of
                  ``B`` followed by a Fourier multiplier and a linear change
``generic``       the generator factorization of :mod:`tfaloc.sympmat`

The inverse applies the same actions backwards, each inverted, and
multiplies by ``conj(phase)``. Pairs built from a single operator object
(a distribution and a kernel, for instance) therefore share one phase.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import grid as _g
from .grid import SampledField
from .sympmat import (
    GeneratorStep,
    SymplecticMatrix,
    A_half,
    D_S,
    factor_into_generators,
    standard_j,
    totally_wigner_decomposable,
)

INTERP_TOL = 1e-6
_PATTERN = 1e-12


@dataclass(frozen=True)
class Action:
    """Elementary action on a field. ``axes`` only matters for Fourier kinds."""

    kind: str  # fourier | inverse_fourier | linear | chirp | multiplier
    matrix: np.ndarray | None = None
    axes: tuple | None = None

    def inverse(self) -> "Action":
        if self.kind == "fourier":
            return Action("inverse_fourier", axes=self.axes)
        if self.kind == "inverse_fourier":
            return Action("fourier", axes=self.axes)
        if self.kind == "linear":
            return Action("linear", np.linalg.inv(self.matrix))
        return Action(self.kind, -self.matrix)


def _from_step(step: GeneratorStep) -> Action:
    return Action(step.kind, step.matrix)


def _run(action: Action, F: SampledField, interp_tol) -> SampledField:
    n = F.ndim
    if action.kind in ("fourier", "inverse_fourier"):
        axes = tuple(range(n)) if action.axes is None else action.axes
        return _g.fourier_axes(F, axes, inverse=action.kind == "inverse_fourier")
    if action.kind == "linear":
        E = action.matrix
        if np.allclose(E, np.eye(n), atol=0, rtol=0):
            return F
        return _g.linear_change(F, E, interp_tol)
    if action.kind == "chirp":
        return _g.chirp(F, action.matrix)
    if action.kind == "multiplier":
        # exp(pi i zeta.C zeta) on the Fourier side
        F.grid.require_self_dual()
        axes = tuple(range(n))
        H = _g.fourier_axes(F, axes)
        H = _g.chirp(H, action.matrix)
        return _g.fourier_axes(H, axes, inverse=True)
    raise ValueError(f"unknown action {action.kind!r}")


def apply_generator(step: GeneratorStep, F: SampledField, interp_tol=INTERP_TOL) -> SampledField:
    """Apply a single generator: Fourier, ``|det E|^(1/2) F(E .)`` or a chirp."""
    return _run(_from_step(step), F, interp_tol)


def _zero(X, tol=_PATTERN):
    return float(np.max(np.abs(X), initial=0.0)) <= tol


def _plan(A: SymplecticMatrix, path: str):
    n = 2 * A.d
    M = A.entries
    a, b, c, dd = A.half_blocks()
    if path == "generic":
        fac = factor_into_generators(A)
        return "generic", [_from_step(s) for s in fac.steps]
    if path != "auto":
        raise ValueError(f"unknown path {path!r}")
    if _zero(M - np.eye(2 * n)):
        return "identity", []
    if _zero(M - standard_j(n)):
        return "fourier", [Action("fourier")]
    if _zero(M + standard_j(n)):
        return "fourier", [Action("inverse_fourier")]
    if _zero(b) and abs(np.linalg.det(a)) > 1e-12:
        ai = np.linalg.inv(a)
        acts = [Action("linear", ai)]
        if not _zero(c):
            C = c @ ai
            acts.append(Action("chirp", (C + C.T) / 2))
        return "linear", acts
    E = totally_wigner_decomposable(A, tol=_PATTERN)
    if E is not None:
        return "decomposable", _decomposable(E, A.d)
    for base in (A_half(A.d), A_half(A.d) @ D_S(A.d)):
        U = M @ np.linalg.inv(base.entries)
        if not _zero(U[n:, :n], 1e-12):
            continue
        X = U[:n, :n]
        Z = np.linalg.solve(X, U[:n, n:])
        Z = (Z + Z.T) / 2
        acts = _decomposable(totally_wigner_decomposable(base), A.d)
        if not _zero(Z):
            acts.append(Action("multiplier", -Z))
        if not _zero(X - np.eye(n)):
            acts.append(Action("linear", np.linalg.inv(X)))
        return "half_upper", acts
    fac = factor_into_generators(A)
    return "generic", [_from_step(s) for s in fac.steps]


def _decomposable(E, d):
    return [Action("linear", E), Action("fourier", axes=tuple(range(d, 2 * d)))]


def _recompose(actions, d) -> np.ndarray:
    n = 2 * d
    M = np.eye(2 * n)
    Jn = standard_j(n)
    for act in actions:
        if act.kind == "fourier" and act.axes is None:
            G = Jn
        elif act.kind == "inverse_fourier" and act.axes is None:
            G = -Jn
        elif act.kind in ("fourier", "inverse_fourier"):
            G = np.eye(2 * n)
            sgn = 1 if act.kind == "fourier" else -1
            for k in act.axes:
                G[k, k] = 0
                G[n + k, n + k] = 0
                G[k, n + k] = sgn
                G[n + k, k] = -sgn
        else:
            G = GeneratorStep(act.kind, act.matrix).symplectic(n) if act.kind != "multiplier" else (
                -Jn @ GeneratorStep("chirp", act.matrix).symplectic(n) @ Jn
            )
        M = G @ M
    return M


class MetaplecticOperator:
    """
    Unitary operator on L^2(R^2d) lifting a symplectic matrix.

    Parameters
    ----------
    A : SymplecticMatrix
    path : {"auto", "generic"}
        ``"generic"`` forces the generator factorization.
    phase : complex
        Unimodular constant multiplying every application.
    interp_tol : float or None
        Residual bound for band-limited resampling; ``None`` disables it.
    """

    def __init__(self, A: SymplecticMatrix, path: str = "auto", phase: complex = 1.0,
                 interp_tol: float | None = INTERP_TOL):
        if abs(abs(phase) - 1) > 1e-12:
            raise ValueError("phase must be unimodular")
        self.A = A
        self.phase = complex(phase)
        self.interp_tol = interp_tol
        self.path, self.actions = _plan(A, path)

    def with_phase(self, c: complex) -> "MetaplecticOperator":
        """Copy with the phase multiplied by ``c``."""
        if abs(abs(c) - 1) > 1e-12:
            raise ValueError("phase must be unimodular")
        out = object.__new__(MetaplecticOperator)
        out.__dict__.update(self.__dict__)
        out.phase = self.phase * complex(c)
        return out

    def recompose(self) -> np.ndarray:
        """Symplectic matrix realized by the action list."""
        return _recompose(self.actions, self.A.d)

    def _check(self, F: SampledField):
        if F.grid.d != self.A.d or F.ndim != 2 * self.A.d:
            raise _g.GridMismatch(f"field of dimension {F.ndim} for a d={self.A.d} matrix")

    def apply(self, F: SampledField) -> SampledField:
        self._check(F)
        for act in self.actions:
            F = _run(act, F, self.interp_tol)
        return F * self.phase if self.phase != 1 else F

    def apply_inverse(self, F: SampledField) -> SampledField:
        self._check(F)
        for act in reversed(self.actions):
            F = _run(act.inverse(), F, self.interp_tol)
        return F * np.conj(self.phase) if self.phase != 1 else F

    __call__ = apply

    def __repr__(self):
        return f"MetaplecticOperator({self.A!r}, path={self.path!r}, steps={len(self.actions)})"


def metaplectic_operator(A: SymplecticMatrix, path: str = "auto", **kw) -> MetaplecticOperator:
    return MetaplecticOperator(A, path=path, **kw)


def apply_metaplectic(A: SymplecticMatrix, F: SampledField, path: str = "auto") -> SampledField:
    return MetaplecticOperator(A, path).apply(F)


def apply_metaplectic_inverse(A: SymplecticMatrix, F: SampledField, path: str = "auto") -> SampledField:
    """Inverse of :func:`apply_metaplectic` for the same ``A`` and path, phase included."""
    return MetaplecticOperator(A, path).apply_inverse(F)


def phase_aligned_residual(F: SampledField, G: SampledField) -> float:
    """``min_theta ||exp(i theta) F - G|| / ||G||``."""
    g = G.values.ravel()
    f = F.values.ravel()
    ng = np.linalg.norm(g)
    if ng == 0:
        return float(np.linalg.norm(f))
    ip = np.vdot(f, g)
    c = ip / abs(ip) if abs(ip) > 0 else 1.0
    return float(np.linalg.norm(c * f - g) / ng)


__all__ = [
    "Action",
    "MetaplecticOperator",
    "metaplectic_operator",
    "apply_generator",
    "apply_metaplectic",
    "apply_metaplectic_inverse",
    "phase_aligned_residual",
]
