import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfaloc import grid as g
from tfaloc import sympmat as sm
from tfaloc.errors import GridMismatch
from tfaloc.metaplectic import (
    MetaplecticOperator,
    apply_metaplectic,
    apply_metaplectic_inverse,
    phase_aligned_residual,
)
from tfaloc.sympmat import SymplecticMatrix


def panel(d=1):
    return {
        "I": sm.identity(d),
        "J": sm.J(d),
        "A_ST": sm.A_ST(d),
        "A_FT2": sm.A_FT2(d),
        "A_half": sm.A_half(d),
        "D_S": sm.D_S(d),
        "A_tau(0.3)": sm.A_tau(d, 0.3),
        "A_tau(0.7)": sm.A_tau(d, 0.7),
        "covariant": sm.random_covariant(d, 7),
    }


@pytest.fixture(scope="module")
def field(grid):
    x, xi = grid.coords(2)
    return g.SampledField(grid, np.exp(-np.pi * ((x - 0.25) ** 2 + 1.3 * (xi + 0.5) ** 2)) * np.exp(2j * np.pi * 0.4 * x))


@pytest.mark.parametrize("name", list(panel()))
def test_action_list_recomposes_to_matrix(name):
    A = panel()[name]
    op = MetaplecticOperator(A)
    assert np.max(np.abs(op.recompose() - A.entries)) < 1e-10


@pytest.mark.parametrize("name", list(panel()))
def test_unitary(field, name):
    out = apply_metaplectic(panel()[name], field)
    assert out.norm() == pytest.approx(field.norm(), rel=1e-9)


@pytest.mark.parametrize("name", list(panel()))
def test_round_trip(field, name):
    op = MetaplecticOperator(panel()[name])
    back = op.apply_inverse(op.apply(field))
    assert np.max(np.abs(back.values - field.values)) < 1e-10
    assert np.max(np.abs(apply_metaplectic_inverse(op.A, op.apply(field)).values - field.values)) < 1e-10


@pytest.mark.parametrize("name", ["J", "A_ST", "A_FT2", "A_half", "A_tau(0.3)", "D_S"])
def test_generic_path_agrees_up_to_phase(field, name):
    A = panel()[name]
    auto = apply_metaplectic(A, field)
    generic = apply_metaplectic(A, field, path="generic")
    assert phase_aligned_residual(generic, auto) < 1e-8


def test_fourier_lift_fixes_the_gaussian(grid):
    F = g.field_gaussian(grid)
    assert np.max(np.abs(apply_metaplectic(sm.J(1), F).values - F.values)) < 1e-12


def test_linear_lift_matches_closed_form(grid):
    E = np.array([[1.0, 0.5], [0.0, 1.0]])
    F = g.field_gaussian(grid, center=[0.2, 0.1])
    out = apply_metaplectic(sm.D_E(E), F)
    x, xi = grid.coords(2)
    u, v = x + 0.5 * xi, xi
    expected = np.exp(-np.pi * ((u - 0.2) ** 2 + (v - 0.1) ** 2))
    assert phase_aligned_residual(out, g.SampledField(grid, expected)) < 1e-9


def test_chirp_lift_matches_closed_form(grid):
    C = np.array([[0.5, 0.0], [0.0, -0.25]])
    F = g.field_gaussian(grid)
    out = apply_metaplectic(sm.V_C(C), F)
    x, xi = grid.coords(2)
    expected = F.values * np.exp(1j * np.pi * (0.5 * x**2 - 0.25 * xi**2))
    assert phase_aligned_residual(out, g.SampledField(grid, expected)) < 1e-12


def test_half_matrix_gives_wigner_of_gaussian(grid, phi):
    out = apply_metaplectic(sm.A_half(1), g.tensor_conj(phi, phi))
    x, xi = grid.coords(2)
    assert np.max(np.abs(out.values - 2**0.5 * np.exp(-2 * np.pi * (x**2 + xi**2)))) < 1e-12


def test_composition_up_to_phase(field):
    A, B = sm.A_tau(1, 0.3), sm.J(1)
    two = apply_metaplectic(A, apply_metaplectic(B, field))
    one = apply_metaplectic(SymplecticMatrix(A.entries @ B.entries, 1), field)
    assert phase_aligned_residual(one, two) < 1e-8


def test_phase_is_applied_and_inverted(field):
    op = MetaplecticOperator(sm.A_ST(1))
    c = np.exp(0.7j)
    op2 = op.with_phase(c)
    assert np.allclose(op2.apply(field).values, c * op.apply(field).values)
    assert np.allclose(op2.apply_inverse(op2.apply(field)).values, field.values, atol=1e-12)
    with pytest.raises(ValueError):
        op.with_phase(2.0)


def test_dimension_mismatch(grid):
    with pytest.raises(GridMismatch):
        MetaplecticOperator(sm.J(1)).apply(g.gaussian(grid))


@settings(max_examples=10, deadline=None, derandomize=True)
@given(st.integers(0, 2**31 - 1))
def test_random_products_round_trip(seed):
    G = g.GridSpec()
    A = sm.products_of_generators(1, 3, seed)
    F = g.field_gaussian(G, scale=0.7)
    op = MetaplecticOperator(A, interp_tol=None)
    assert np.max(np.abs(op.recompose() - A.entries)) < 1e-8
    back = op.apply_inverse(op.apply(F))
    assert np.max(np.abs(back.values - F.values)) < 1e-8
