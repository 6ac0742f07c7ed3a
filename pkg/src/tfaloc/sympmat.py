"""
Symplectic 4d x 4d matrices acting on phase space R^4d = R^2d x R^2d.

A matrix is stored densely and viewed as a 4 x 4 grid of d x d blocks
``A_ij`` (1-based, as in ``A.block(1, 3)``). The same matrix also has a
coarser 2 x 2 view in 2d x 2d blocks ``[[A, B], [C, D]]`` which is the one
used by the generator factorization.

Generators and the operators they lift to on L^2(R^2d):

* ``J``                  -> Fourier transform on R^2d
* ``D_E = diag(E^-1, E^T)`` -> ``|det E|^(1/2) F(E w)``
* ``V_C = [[I, 0], [C, I]]`` -> multiplication by ``exp(pi i w.Cw)``
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FactorizationFailed, NonSymmetricC, NotSymplectic, SingularE

SYMP_TOL = 1e-10
PATTERN_TOL = 1e-8
DET_TOL = 1e-12


def standard_j(n: int) -> np.ndarray:
    """Standard symplectic matrix of size 2n x 2n."""
    I = np.eye(n)
    Z = np.zeros((n, n))
    return np.block([[Z, I], [-I, Z]])


def symplectic_residual(M: np.ndarray) -> float:
    M = np.asarray(M, float)
    J = standard_j(M.shape[0] // 2)
    return float(np.max(np.abs(M.T @ J @ M - J)))


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    """Real symplectic matrix of size 4d x 4d."""

    entries: np.ndarray = field(repr=False)
    d: int = 1
    name: str | None = None
    tol: float = field(default=SYMP_TOL, repr=False)

    def __post_init__(self):
        M = np.array(self.entries, dtype=float)
        n = 4 * self.d
        if M.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {M.shape}")
        if not np.all(np.isfinite(M)):
            raise ValueError("matrix entries must be finite")
        res = symplectic_residual(M)
        if res > self.tol:
            raise NotSymplectic(res, self.tol)
        M.setflags(write=False)
        object.__setattr__(self, "entries", M)

    def block(self, i: int, j: int) -> np.ndarray:
        """d x d block ``A_ij`` with 1-based indices."""
        d = self.d
        return self.entries[(i - 1) * d : i * d, (j - 1) * d : j * d]

    @property
    def blocks(self) -> list[list[np.ndarray]]:
        return [[self.block(i, j) for j in range(1, 5)] for i in range(1, 5)]

    def half_blocks(self):
        """The 2d x 2d blocks ``(A, B, C, D)``."""
        n = 2 * self.d
        M = self.entries
        return M[:n, :n], M[:n, n:], M[n:, :n], M[n:, n:]

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        _same_d(self, other)
        name = f"{self.name}*{other.name}" if self.name and other.name else None
        return SymplecticMatrix(self.entries @ other.entries, self.d, name, tol=1e-8)

    def inverse(self) -> "SymplecticMatrix":
        return symplectic_inverse(self)

    def allclose(self, other, tol=1e-8) -> bool:
        return bool(np.max(np.abs(self.entries - np.asarray(getattr(other, "entries", other)))) <= tol)

    def __repr__(self):
        label = self.name or "A"
        return f"SymplecticMatrix({label}, d={self.d})"


def _same_d(a, b):
    if a.d != b.d:
        raise ValueError(f"dimension mismatch: d={a.d} vs d={b.d}")


def from_blocks(d: int, blocks, name=None, tol=SYMP_TOL) -> SymplecticMatrix:
    """Assemble from a 4 x 4 nested list (or flat list of 16) of d x d blocks."""
    blocks = list(blocks)
    if len(blocks) == 16:
        blocks = [blocks[4 * i : 4 * i + 4] for i in range(4)]
    if len(blocks) != 4 or any(len(row) != 4 for row in blocks):
        raise ValueError("need a 4 x 4 arrangement of blocks")
    rows = []
    for row in blocks:
        bs = [np.atleast_2d(np.asarray(b, float)) for b in row]
        for b in bs:
            if b.shape != (d, d):
                raise ValueError(f"block of shape {b.shape}, expected {(d, d)}")
        rows.append(bs)
    return SymplecticMatrix(np.block(rows), d, name, tol)


def identity(d: int) -> SymplecticMatrix:
    return SymplecticMatrix(np.eye(4 * d), d, "I")


def J(d: int) -> SymplecticMatrix:
    return SymplecticMatrix(standard_j(2 * d), d, "J")


def A_ST(d: int) -> SymplecticMatrix:
    I, Z = np.eye(d), np.zeros((d, d))
    return from_blocks(d, [[I, -I, Z, Z], [Z, Z, I, I], [Z, Z, Z, -I], [-I, Z, Z, Z]], "A_ST")


def A_FT2(d: int) -> SymplecticMatrix:
    """Lift of the partial Fourier transform in the last d variables."""
    I, Z = np.eye(d), np.zeros((d, d))
    return from_blocks(d, [[I, Z, Z, Z], [Z, Z, Z, I], [Z, Z, I, Z], [Z, -I, Z, Z]], "A_FT2")


def A_tau(d: int, tau: float) -> SymplecticMatrix:
    I, Z = np.eye(d), np.zeros((d, d))
    t = float(tau)
    return from_blocks(
        d,
        [
            [(1 - t) * I, t * I, Z, Z],
            [Z, Z, t * I, -(1 - t) * I],
            [Z, Z, I, I],
            [-I, I, Z, Z],
        ],
        f"A_tau({t:g})",
    )


def A_half(d: int) -> SymplecticMatrix:
    return SymplecticMatrix(A_tau(d, 0.5).entries, d, "A_half")


def D_E(E, name=None) -> SymplecticMatrix:
    E = np.atleast_2d(np.asarray(E, float))
    n = E.shape[0]
    if E.shape != (n, n) or n % 2:
        raise ValueError("E must be a square 2d x 2d matrix")
    det = np.linalg.det(E)
    if abs(det) <= DET_TOL:
        raise SingularE(f"|det E| = {abs(det):.3e} is below {DET_TOL}")
    Z = np.zeros((n, n))
    M = np.block([[np.linalg.inv(E), Z], [Z, E.T]])
    return SymplecticMatrix(M, n // 2, name or "D_E", tol=1e-8)


def V_C(C, name=None) -> SymplecticMatrix:
    C = np.atleast_2d(np.asarray(C, float))
    n = C.shape[0]
    if np.max(np.abs(C - C.T), initial=0.0) > 1e-12:
        raise NonSymmetricC("chirp matrix C must be symmetric")
    I, Z = np.eye(n), np.zeros((n, n))
    return SymplecticMatrix(np.block([[I, Z], [C, I]]), n // 2, name or "V_C")


def S_swap(d: int) -> np.ndarray:
    """``S = [[0, I], [I, 0]]`` swapping the two R^d variables."""
    I, Z = np.eye(d), np.zeros((d, d))
    return np.block([[Z, I], [I, Z]])


def D_S(d: int) -> SymplecticMatrix:
    return D_E(S_swap(d), name="D_S")


def std_matrices(d: int = 1) -> dict:
    """Named library matrices; parameterized ones are returned as callables."""
    return {
        "I": identity(d),
        "J": J(d),
        "A_ST": A_ST(d),
        "A_FT2": A_FT2(d),
        "A_half": A_half(d),
        "D_S": D_S(d),
        "A_tau": lambda tau: A_tau(d, tau),
        "D_E": D_E,
        "V_C": V_C,
    }


def symplectic_inverse(A: SymplecticMatrix) -> SymplecticMatrix:
    """Inverse via ``[[A, B], [C, D]]^-1 = [[D^T, -B^T], [-C^T, A^T]]``."""
    a, b, c, dd = A.half_blocks()
    M = np.block([[dd.T, -b.T], [-c.T, a.T]])
    name = f"{A.name}^-1" if A.name else None
    return SymplecticMatrix(M, A.d, name, tol=max(A.tol, 1e-8))


def conjugate_matrix(A: SymplecticMatrix) -> SymplecticMatrix:
    """
    ``R A R`` with ``R = diag(I, -I)``: the matrix lifted by ``F -> conj(A^ conj F)``.

    Complex conjugation intertwines ``pi(x, xi)`` with ``pi(x, -xi)``, so
    conjugating a metaplectic operator flips the sign of the blocks that mix
    position and frequency.
    """
    n = 2 * A.d
    r = np.concatenate([np.ones(n), -np.ones(n)])
    name = f"conj({A.name})" if A.name else None
    return SymplecticMatrix(r[:, None] * A.entries * r[None, :], A.d, name, tol=max(A.tol, 1e-9))


# ------------------------------------------------------------ block reports


@dataclass(frozen=True)
class BlockReport:
    """Named block residuals with a pass flag."""

    ok: bool
    residuals: dict
    tol: float

    def __bool__(self):
        return self.ok

    def failing(self) -> list[str]:
        return [k for k, v in self.residuals.items() if v > self.tol]

    def lines(self) -> list[str]:
        return [
            f"{k:<16s} {v:.3e} {'ok' if v <= self.tol else 'FAIL'}"
            for k, v in self.residuals.items()
        ]


def _mx(x) -> float:
    return float(np.max(np.abs(x), initial=0.0))


def is_covariant(A: SymplecticMatrix, tol: float = PATTERN_TOL) -> BlockReport:
    """Check the block pattern characterizing covariant metaplectic Wigner distributions."""
    d = A.d
    I = np.eye(d)
    b = A.block
    res = {
        "row3=(0,0,I,I)": _mx(np.hstack([b(3, 1), b(3, 2), b(3, 3) - I, b(3, 4) - I])),
        "row4=(-I,I,0,0)": _mx(np.hstack([b(4, 1) + I, b(4, 2) - I, b(4, 3), b(4, 4)])),
        "A12=I-A11": _mx(b(1, 2) - (I - b(1, 1))),
        "A22=-A21": _mx(b(2, 2) + b(2, 1)),
        "A14=A13": _mx(b(1, 4) - b(1, 3)),
        "A23=I-A11^T": _mx(b(2, 3) - (I - b(1, 1).T)),
        "A24=-A11^T": _mx(b(2, 4) + b(1, 1).T),
        "A13 symmetric": _mx(b(1, 3) - b(1, 3).T),
        "A21 symmetric": _mx(b(2, 1) - b(2, 1).T),
    }
    return BlockReport(all(v <= tol for v in res.values()), res, tol)


def satisfies_block_conditions(A: SymplecticMatrix, tol: float = PATTERN_TOL) -> BlockReport:
    b = A.block
    res = {
        "A31+A32": _mx(b(3, 1) + b(3, 2)),
        "A41+A42": _mx(b(4, 1) + b(4, 2)),
        "A34-A33": _mx(b(3, 4) - b(3, 3)),
        "A43+A44": _mx(b(4, 3) + b(4, 4)),
    }
    return BlockReport(all(v <= tol for v in res.values()), res, tol)


def half_times_inverse_lower_left(A: SymplecticMatrix) -> float:
    """Size of the lower-left 2d x 2d block of ``A_half A^-1``."""
    M = A_half(A.d).entries @ symplectic_inverse(A).entries
    n = 2 * A.d
    return _mx(M[n:, :n])


def totally_wigner_decomposable(A: SymplecticMatrix, tol: float = PATTERN_TOL):
    """Return ``E`` with ``A = A_FT2 D_E`` or ``None``."""
    n = 2 * A.d
    M = A_FT2(A.d).entries.T @ A.entries  # A_FT2 is orthogonal
    if _mx(M[:n, n:]) > tol or _mx(M[n:, :n]) > tol:
        return None
    M11, M22 = M[:n, :n], M[n:, n:]
    if abs(np.linalg.det(M11)) <= DET_TOL:
        return None
    E = np.linalg.inv(M11)
    if _mx(M22 - E.T) > tol * max(1.0, _mx(E)):
        return None
    return E


def random_covariant(d: int, rng, scale: float = 0.5) -> SymplecticMatrix:
    """Covariant matrix with random ``A11`` and random symmetric ``A13``, ``A21``."""
    rng = np.random.default_rng(rng)
    I, Z = np.eye(d), np.zeros((d, d))
    A11 = rng.uniform(-0.25, 1.25, (d, d))
    S1 = rng.uniform(-scale, scale, (d, d))
    S2 = rng.uniform(-scale, scale, (d, d))
    A13 = (S1 + S1.T) / 2
    A21 = (S2 + S2.T) / 2
    return from_blocks(
        d,
        [
            [A11, I - A11, A13, A13],
            [A21, -A21, I - A11.T, -A11.T],
            [Z, Z, I, I],
            [-I, I, Z, Z],
        ],
        "covariant",
        tol=1e-9,
    )


# ------------------------------------------------------------ factorization


@dataclass(frozen=True, eq=False)
class GeneratorStep:
    """One generator: ``kind`` in {'fourier', 'linear', 'chirp'} with its 2d x 2d matrix."""

    kind: str
    matrix: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("fourier", "inverse_fourier", "linear", "chirp"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "linear":
            E = np.atleast_2d(np.asarray(self.matrix, float))
            if abs(np.linalg.det(E)) <= DET_TOL:
                raise SingularE("linear change needs |det E| > 1e-12")
            object.__setattr__(self, "matrix", E)
        elif self.kind == "chirp":
            C = np.atleast_2d(np.asarray(self.matrix, float))
            if np.max(np.abs(C - C.T)) > 1e-12:
                raise NonSymmetricC("chirp matrix C must be symmetric")
            object.__setattr__(self, "matrix", C)

    def symplectic(self, n: int) -> np.ndarray:
        """The 2n x 2n symplectic matrix this step lifts."""
        if self.kind == "fourier":
            return standard_j(n)
        if self.kind == "inverse_fourier":
            return -standard_j(n)
        if self.kind == "linear":
            Z = np.zeros((n, n))
            return np.block([[np.linalg.inv(self.matrix), Z], [Z, self.matrix.T]])
        I, Z = np.eye(n), np.zeros((n, n))
        return np.block([[I, Z], [self.matrix, I]])

    def inverse(self) -> "GeneratorStep":
        if self.kind == "fourier":
            return GeneratorStep("inverse_fourier")
        if self.kind == "inverse_fourier":
            return GeneratorStep("fourier")
        if self.kind == "linear":
            return GeneratorStep("linear", np.linalg.inv(self.matrix))
        return GeneratorStep("chirp", -self.matrix)

    def __repr__(self):
        if self.matrix is None:
            return f"{self.kind.capitalize()}()"
        return f"{self.kind.capitalize()}({np.round(self.matrix, 6).tolist()})"


@dataclass(frozen=True, eq=False)
class MetaplecticFactorization:
    """Steps in application order: the first step acts first."""

    steps: tuple
    source: SymplecticMatrix

    def recompose(self) -> np.ndarray:
        n = 2 * self.source.d
        M = np.eye(2 * n)
        for s in self.steps:
            M = s.symplectic(n) @ M
        return M

    def residual(self) -> float:
        return _mx(self.recompose() - self.source.entries)


def _sym(C):
    return (C + C.T) / 2


def _is_zero(X, tol=1e-13):
    return _mx(X) <= tol


def _steps_b_invertible(a, b, dd):
    """``A = V_{D B^-1} D_{B^-1} J V_{B^-1 A}`` in application order."""
    bi = np.linalg.inv(b)
    steps = [
        GeneratorStep("chirp", _sym(bi @ a)),
        GeneratorStep("fourier"),
        GeneratorStep("linear", bi),
        GeneratorStep("chirp", _sym(dd @ bi)),
    ]
    return [s for s in steps if not _trivial(s)]


def _trivial(s: GeneratorStep) -> bool:
    if s.kind == "chirp":
        return _is_zero(s.matrix)
    if s.kind == "linear":
        return _is_zero(s.matrix - np.eye(s.matrix.shape[0]))
    return False


def _spread(steps, n) -> float:
    M = np.eye(2 * n)
    worst = 1.0
    for s in steps:
        M = s.symplectic(n) @ M
        worst = max(worst, np.linalg.norm(M, 2))
        if s.matrix is not None:
            worst = max(worst, np.linalg.norm(s.matrix, 2))
    return worst


def _candidate_shifts(n, rng):
    I = np.eye(n)
    out = [np.zeros((n, n))]
    for c in (0.25, 0.5, 1.0, 2.0):
        out += [c * I, -c * I]
    for _ in range(6):
        X = rng.uniform(-1, 1, (n, n))
        out.append(_sym(X))
    return out


def factor_into_generators(A: SymplecticMatrix, tol: float = PATTERN_TOL) -> MetaplecticFactorization:
    """Write ``A`` as a product of Fourier, linear-change and chirp generators."""
    n = 2 * A.d
    a, b, c, dd = A.half_blocks()
    if _is_zero(A.entries - np.eye(2 * n)):
        steps = []
    elif _is_zero(b) and abs(np.linalg.det(a)) > DET_TOL:
        ai = np.linalg.inv(a)
        steps = [GeneratorStep("linear", ai)]
        if not _is_zero(c):
            steps.append(GeneratorStep("chirp", _sym(c @ ai)))
        steps = [s for s in steps if not _trivial(s)]
    elif abs(np.linalg.det(b)) > 1e-8 and np.linalg.cond(b) < 1e8:
        steps = _steps_b_invertible(a, b, dd)
    else:
        rng = np.random.default_rng(0)
        Jn = standard_j(n)
        best = None
        for S in _candidate_shifts(n, rng):
            Ap = A.entries @ np.block([[np.eye(n), np.zeros((n, n))], [S, np.eye(n)]]) @ Jn.T
            bp = Ap[:n, n:]
            if abs(np.linalg.det(bp)) <= 1e-8 or np.linalg.cond(bp) > 1e8:
                continue
            steps = [GeneratorStep("chirp", -S), GeneratorStep("fourier")]
            steps += _steps_b_invertible(Ap[:n, :n], bp, Ap[n:, n:])
            steps = [s for s in steps if not _trivial(s)]
            sp = _spread(steps, n)
            if best is None or sp < best[0] - 1e-12:
                best = (sp, steps)
        if best is None:
            raise FactorizationFailed("no candidate produced an invertible upper-right block")
        steps = best[1]
    fac = MetaplecticFactorization(tuple(steps), A)
    res = fac.residual()
    if res > tol:
        raise FactorizationFailed(f"recomposition residual {res:.3e} exceeds {tol}")
    return fac


# ------------------------------------------------------------ text format


def format_matrix(A: SymplecticMatrix) -> str:
    lines = [f"d={A.d}"]
    for row in A.entries:
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str, name=None) -> SymplecticMatrix:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("d="):
        raise ValueError("matrix text must start with 'd=<int>'")
    d = int(lines[0][2:])
    rows = [[float(x) for x in ln.split()] for ln in lines[1:]]
    if len(rows) != 4 * d or any(len(r) != 4 * d for r in rows):
        raise ValueError(f"expected {4 * d} rows of {4 * d} numbers")
    return SymplecticMatrix(np.array(rows), d, name, tol=1e-9)


def products_of_generators(d: int, k: int, rng) -> SymplecticMatrix:
    """Random product of ``k`` generators with moderate entries."""
    rng = np.random.default_rng(rng)
    n = 2 * d
    M = np.eye(2 * n)
    for _ in range(k):
        kind = rng.integers(3)
        if kind == 0:
            G = standard_j(n)
        elif kind == 1:
            E = np.eye(n) + 0.4 * rng.uniform(-1, 1, (n, n))
            G = D_E(E).entries
        else:
            G = V_C(_sym(rng.uniform(-1, 1, (n, n)))).entries
        M = G @ M
    return SymplecticMatrix(M, d, "product", tol=1e-9)


__all__ = [
    "SymplecticMatrix",
    "GeneratorStep",
    "MetaplecticFactorization",
    "BlockReport",
    "from_blocks",
    "std_matrices",
    "identity",
    "J",
    "A_ST",
    "A_FT2",
    "A_tau",
    "A_half",
    "D_E",
    "V_C",
    "D_S",
    "S_swap",
    "symplectic_inverse",
    "conjugate_matrix",
    "is_covariant",
    "satisfies_block_conditions",
    "half_times_inverse_lower_left",
    "totally_wigner_decomposable",
    "random_covariant",
    "factor_into_generators",
    "format_matrix",
    "parse_matrix",
    "products_of_generators",
    "standard_j",
    "symplectic_residual",
]
