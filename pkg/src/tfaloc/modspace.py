"""
Mixed norms, discrete modulation-space norms, Schatten norms and the
boundedness reports built on them.

Modulation norms always use the standard Gaussian window ``exp(-pi |t|^2)``
(unnormalized), on R^d for functions and on R^2d for symbols.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import grid as _g
from .errors import AliasWarning, HypothesisViolated, SvdFailure
from .grid import SampledField, SampledFunction
from .locop import a_loc
from .quant import OperatorMatrix
from .sympmat import satisfies_block_conditions
from .tfr import stft

INF = math.inf


@dataclass(frozen=True)
class MixedNormSpec:
    p: float = 2.0
    q: float = 2.0

    def __post_init__(self):
        for v in (self.p, self.q):
            if not (v >= 1):
                raise ValueError("mixed-norm exponents must be >= 1")


def _lp(values: np.ndarray, p: float, w: float, axes) -> np.ndarray:
    a = np.abs(values)
    if p == INF:
        return np.max(a, axis=axes)
    return (np.sum(a**p, axis=axes) * w) ** (1.0 / p)


def mixed_norm(F: SampledField, spec: MixedNormSpec | tuple) -> float:
    """Inner ``p``-norm over the first d axes, outer ``q``-norm over the last d."""
    if not isinstance(spec, MixedNormSpec):
        spec = MixedNormSpec(*spec)
    d = F.ndim // 2
    w = F.grid.dx**d
    inner = _lp(F.values, spec.p, w, tuple(range(d)))
    return float(_lp(inner, spec.q, F.grid.dxi**d, tuple(range(d))))


def mod_norm(f: SampledFunction, p: float, q: float | None = None) -> float:
    """``||V_phi f||_{L^{p,q}}`` with the Gaussian window."""
    q = p if q is None else q
    return mixed_norm(stft(f, _g.gaussian(f.grid)), MixedNormSpec(p, q))


def symbol_mod_norm(a: SampledField, p: float, q: float = INF, stride: int = 8, batch: int = 64) -> float:
    """
    ``||a||_{M^{p,q}(R^2d)}`` from the STFT with window ``phi (x) phi``.

    Window positions run over the sublattice ``stride * dx * Z^2d`` (with the
    matching weight); every frequency of the grid is kept.
    """
    grid = a.grid
    grid.require_self_dual()
    n = a.ndim
    N, dx = grid.N, grid.dx
    if N % stride:
        raise ValueError("stride must divide N")
    r2 = sum(c**2 for c in grid.coords(n))
    win = np.exp(-np.pi * r2)
    # local energy sum |a|^2 |win(. - z)|^2 at every z; positions carrying
    # less than 1e-28 of the peak contribute below rounding and are skipped
    energy = np.real(_g.convolve(SampledField(grid, np.abs(a.values) ** 2),
                                 SampledField(grid, np.abs(win) ** 2), alias_tol=np.inf).values)
    peak = float(np.max(energy))
    offs = [
        o for o in np.ndindex(*(N // stride,) * n)
        if energy[tuple(stride * k for k in o)] > 1e-28 * peak
    ]
    axes = tuple(range(1, n + 1))
    w_pos = (stride * dx) ** n
    acc = None
    for s in range(0, len(offs), batch):
        chunk = offs[s : s + batch]
        stack = np.empty((len(chunk),) + a.values.shape, complex)
        for i, o in enumerate(chunk):
            shift = [stride * k - N // 2 for k in o]
            stack[i] = a.values * np.conj(_g.translate(win, shift))
        V = _g.centered_fft(stack, axes, dx)
        aV = np.abs(V)
        if p == INF:
            part = np.max(aV, axis=0)
            acc = part if acc is None else np.maximum(acc, part)
        else:
            part = np.sum(aV**p, axis=0)
            acc = part if acc is None else acc + part
    if acc is None:
        return 0.0
    inner = acc if p == INF else (acc * w_pos) ** (1.0 / p)
    if q == INF:
        return float(np.max(inner))
    return float((np.sum(inner**q) * dx**n) ** (1.0 / q))


def singular_values(M: OperatorMatrix) -> np.ndarray:
    try:
        return np.linalg.svd(M.matrix, compute_uv=False)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise SvdFailure(str(exc)) from exc


def schatten_norm(M: OperatorMatrix, p: float) -> float:
    s = singular_values(M)
    if p == INF:
        return float(s[0])
    if p < 1:
        raise ValueError("Schatten exponent must be >= 1")
    return float(np.sum(s**p) ** (1.0 / p))


# ------------------------------------------------------------------ reports


@dataclass(frozen=True)
class ReportRow:
    label: str
    p: float
    ratio: float
    status: str  # "ok" or "hypothesis_violated"


@dataclass(frozen=True)
class RatioReport:
    rows: tuple

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r.ratio for r in self.rows if r.status == "ok"])

    @property
    def max_ratio(self) -> float:
        r = self.ratios
        return float(np.max(r)) if r.size else math.nan

    @property
    def median_ratio(self) -> float:
        r = self.ratios
        return float(np.median(r)) if r.size else math.nan

    @property
    def stable(self) -> bool:
        r = self.ratios
        return bool(r.size and np.all(np.isfinite(r)) and self.max_ratio < 10 * self.median_ratio)

    def violations(self) -> list:
        return [r for r in self.rows if r.status != "ok"]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "p", "ratio", "status"])
        for r in self.rows:
            ratio = "" if math.isnan(r.ratio) else f"{r.ratio:.6e}"
            w.writerow([r.label, "inf" if r.p == INF else f"{r.p:g}", ratio, r.status])
        return buf.getvalue()


@dataclass(frozen=True)
class SchattenCase:
    label: str
    A: object
    a: SampledField
    phi1: SampledFunction
    phi2: SampledFunction
    p: float


def check_hypothesis(A, p: float):
    """Raise when ``p > 2`` and the block conditions fail."""
    if p > 2:
        rep = satisfies_block_conditions(A)
        if not rep:
            raise HypothesisViolated(
                f"p={p:g} > 2 needs the block conditions; failing: {', '.join(rep.failing())}"
            )


def schatten_bound_report(panel, stride: int = 8) -> RatioReport:
    """
    Ratios ``||A_{a,A}||_{S_p} / (||a||_{M^{p,inf}} ||phi1||_{M^1} ||phi2||_{M^1})``.

    Cases whose matrix violates the hypotheses are reported with status
    ``hypothesis_violated`` and no ratio.
    """
    rows = []
    cache = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasWarning)
        for c in panel:
            try:
                check_hypothesis(c.A, c.p)
            except HypothesisViolated:
                rows.append(ReportRow(c.label, c.p, math.nan, "hypothesis_violated"))
                continue
            key = (id(c.a), c.p)
            if key not in cache:
                cache[key] = symbol_mod_norm(c.a, c.p, INF, stride=stride)
            rhs = cache[key] * mod_norm(c.phi1, 1, 1) * mod_norm(c.phi2, 1, 1)
            lhs = schatten_norm(a_loc(c.A, c.a, c.phi1, c.phi2), c.p)
            rows.append(ReportRow(c.label, c.p, lhs / rhs, "ok"))
    return RatioReport(tuple(rows))


def mp_continuity_report(op: OperatorMatrix, functions: dict, p: float) -> RatioReport:
    """Ratios ``||Op f||_{M^p} / ||f||_{M^p}`` over a panel of functions."""
    if not p > 1:
        raise ValueError("the M^p continuity statement needs 1 < p <= inf")
    rows = []
    for label, f in functions.items():
        num = mod_norm(op.apply(f), p, p)
        den = mod_norm(f, p, p)
        rows.append(ReportRow(label, p, num / den, "ok"))
    return RatioReport(tuple(rows))


def top_singular_vector(op: OperatorMatrix) -> SampledFunction:
    _, _, vh = np.linalg.svd(op.matrix)
    v = np.conj(vh[0]) / math.sqrt(op.weight)
    return SampledFunction(op.grid, v)


__all__ = [
    "MixedNormSpec",
    "mixed_norm",
    "mod_norm",
    "symbol_mod_norm",
    "singular_values",
    "schatten_norm",
    "schatten_bound_report",
    "mp_continuity_report",
    "top_singular_vector",
    "default_schatten_panel",
    "default_mp_panel",
    "check_hypothesis",
    "SchattenCase",
    "RatioReport",
    "ReportRow",
]


def default_schatten_panel(grid, p_values=(1, 2, 4)) -> list:
    """Gaussian-class panel over named matrices; p > 2 rows exercise the hypothesis check."""
    from .locop import default_symbols, default_windows
    from .sympmat import A_ST, A_half, A_tau, J, identity

    d = grid.d
    syms = default_symbols(grid)
    phi1, phi2 = default_windows(grid)["phi,psi"]
    mats = {
        "A_half": A_half(d),
        "A_tau(0.3)": A_tau(d, 0.3),
        "A_ST": A_ST(d),
        "I": identity(d),
        "J": J(d),
    }
    out = []
    for mn, A in mats.items():
        for sn in ("gaussian", "oscillatory"):
            for p in p_values:
                out.append(SchattenCase(f"{mn}/{sn}/p={p:g}", A, syms[sn], phi1, phi2, p))
    return out


def default_mp_panel(grid) -> tuple:
    """Operator and test functions for the M^p report."""
    from .locop import default_symbols, default_windows
    from .sympmat import A_half

    syms = default_symbols(grid)
    phi1, phi2 = default_windows(grid)["phi,psi"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasWarning)
        op = a_loc(A_half(grid.d), syms["oscillatory"], phi1, phi2)
    fs = {
        "gaussian": _g.gaussian(grid),
        "shifted": _g.gaussian(grid, x0=1.0, xi0=-0.5),
        "wide": _g.gaussian(grid, scale=1.5),
        "narrow": _g.gaussian(grid, scale=0.6, xi0=0.75),
        "top_singular": top_singular_vector(op),
    }
    return op, fs
