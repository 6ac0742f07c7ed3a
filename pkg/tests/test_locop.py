import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from tfaloc import grid as g
from tfaloc import locop as lo
from tfaloc import sympmat as sm
from tfaloc import tfr
from tfaloc.errors import AliasWarning, GridResolutionExceeded
from tfaloc.metaplectic import MetaplecticOperator
from tfaloc.quant import op_weyl, rank_one, weyl_symbol_of_aloc


@pytest.fixture(scope="module", autouse=True)
def _quiet():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AliasWarning)
        yield


@pytest.fixture(scope="module")
def classical(symbols, phi, psi):
    return {name: lo.classical_loc(a, phi, psi) for name, a in symbols.items()}


def test_classical_weak_form(grid, symbols, phi, psi):
    # <A f, h> = <a V_phi1 f, V_phi2 h>
    a = symbols["gaussian"]
    f = g.gaussian(grid, x0=0.5, xi0=-0.25)
    h = g.gaussian(grid, x0=-0.25, scale=1.2)
    M = lo.classical_loc(a, phi, psi)
    rhs = g.inner_product(a * tfr.stft(f, phi).values, tfr.stft(h, psi))
    assert M.pairing(f, h) == pytest.approx(rhs, abs=1e-12)


def test_classical_with_unit_symbol_is_scaled_identity(grid, phi):
    # a = 1 gives <phi2, phi1> times the identity
    one = g.SampledField(grid, np.ones((grid.N, grid.N)))
    M = lo.classical_loc(one, phi, phi)
    f = g.gaussian(grid, x0=0.5, scale=0.8)
    assert np.max(np.abs(M.apply(f).values - phi.norm() ** 2 * f.values)) < 1e-9


@pytest.mark.parametrize("tau", [0.0, 0.25, 0.5, 0.75, 1.0])
@pytest.mark.parametrize("sym", ["gaussian", "delta", "oscillatory"])
def test_tau_localization_is_classical(symbols, phi, psi, classical, tau, sym):
    assert lo.theorem_gap(sm.A_tau(1, tau), symbols[sym], phi, psi, classical=classical[sym]) < 1e-10


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_covariant_localization_is_classical(symbols, phi, psi, classical, seed):
    A = sm.random_covariant(1, seed)
    assert lo.theorem_gap(A, symbols["oscillatory"], phi, psi, classical=classical["oscillatory"]) < 1e-10


@pytest.mark.parametrize("name", ["I", "A_ST"])
def test_non_covariant_witnesses_separate(symbols, phi, psi, classical, name):
    A = sm.identity(1) if name == "I" else sm.A_ST(1)
    gaps = [lo.theorem_gap(A, symbols[s], phi, psi, classical=classical[s]) for s in ("gaussian", "oscillatory")]
    assert max(gaps) > 0.05


@pytest.mark.parametrize("A", [sm.identity(1), sm.A_ST(1), sm.A_tau(1, 0.7)], ids=["I", "A_ST", "tau"])
def test_delta_at_origin_is_universal(grid, phi, psi, A):
    delta = g.delta_proxy(grid, [0.0, 0.0])
    assert lo.theorem_gap(A, delta, phi, psi) < 1e-10
    # the operator is the rank-one map <., phi1> phi2
    M = lo.a_loc(A, delta, phi, psi)
    assert M.distance(rank_one(grid, psi, phi)) < 1e-10


def test_shifted_delta_separates_identity(symbols, phi):
    gap = lo.theorem_gap(sm.identity(1), symbols["delta"], phi, phi)
    assert gap > 0.05


@pytest.mark.parametrize("A", [sm.identity(1), sm.J(1), sm.A_ST(1), sm.A_half(1), sm.A_tau(1, 0.3)],
                         ids=["I", "J", "A_ST", "A_half", "tau"])
def test_kernel_and_op_a_routes_agree(symbols, phi, psi, A):
    a = symbols["gaussian"]
    op = MetaplecticOperator(A)
    assert lo.a_loc(A, a, phi, psi, op).distance(lo.a_loc_via_op_a(A, a, phi, psi, op)) < 1e-10


@pytest.mark.parametrize("E", [np.eye(2), [[1.0, 0.5], [0.0, 1.0]], [[0.5, 0.5], [-0.5, 0.5]], [[1.0, 0.0], [0.3, 1.0]]])
def test_kernel_twd_matches_general_path(grid, symbols, phi, psi, E):
    E = np.asarray(E, float)
    A = sm.SymplecticMatrix(sm.A_FT2(1).entries @ sm.D_E(E).entries, 1)
    a = symbols["gaussian"]
    k1 = lo.kernel_twd(E, a, phi, psi).values
    k2 = lo.kernel_a_loc(A, a, phi, psi).values
    assert np.max(np.abs(k1 - k2)) < 1e-8


@pytest.mark.parametrize("A", [sm.A_ST(1), sm.A_tau(1, 0.2), sm.identity(1), sm.random_covariant(1, 5)],
                         ids=["A_ST", "tau", "I", "cov"])
def test_weyl_symbol_reconstructs_operator(symbols, phi, psi, A):
    a = symbols["gaussian"]
    op = MetaplecticOperator(A)
    sigma = weyl_symbol_of_aloc(A, a, phi, psi, op)
    assert op_weyl(sigma).distance(lo.a_loc(A, a, phi, psi, op)) < 1e-7


@pytest.mark.parametrize("A", [sm.identity(1), sm.A_half(1), sm.A_ST(1), sm.A_tau(1, 0.3), sm.random_covariant(1, 9)],
                         ids=["I", "A_half", "A_ST", "tau", "cov"])
def test_adjoint(symbols, phi, psi, A):
    a = symbols["oscillatory"] * np.exp(0.4j)
    M = lo.a_loc(A, a, phi, psi)
    assert lo.adjoint_a_loc(A, a, phi, psi).distance(M.adjoint()) < 1e-10


def test_literal_adjoint_agrees_for_identity(symbols, phi, psi):
    a = symbols["oscillatory"]
    A = sm.identity(1)
    M = lo.a_loc(A, a, phi, psi)
    assert lo.adjoint_a_loc(A, a, phi, psi, literal=True).distance(M.adjoint()) < 1e-10


def test_literal_adjoint_fails_for_half_matrix(symbols, phi, psi):
    a = symbols["oscillatory"]
    A = sm.A_half(1)
    M = lo.a_loc(A, a, phi, psi)
    assert lo.adjoint_a_loc(A, a, phi, psi, literal=True).distance(M.adjoint()) > 0.1


def test_unboundedness_probe_closed_form(grid):
    vals = lo.unboundedness_probe([1.0, 0.5, 0.25], grid)
    for eps, v in zip([1.0, 0.5, 0.25], vals):
        assert v == pytest.approx(oracles.probe_value(eps), rel=1e-9)


def test_unboundedness_probe_odd_control(grid):
    odd = g.SampledFunction(grid, grid.axis() * np.exp(-np.pi * grid.axis() ** 2))
    assert max(lo.unboundedness_probe([1.0, 0.25], grid, f=odd)) < 1e-12


def test_unboundedness_probe_resolution_guard(grid):
    with pytest.raises(GridResolutionExceeded):
        lo.unboundedness_probe([0.2], grid)


def test_panel_verdict_and_csv(grid):
    mats = {"A_tau(0.5)": sm.A_tau(1, 0.5), "I": sm.identity(1)}
    rows = lo.run_panel(grid, mats)
    ok, msgs = lo.panel_verdict(rows)
    assert ok, msgs
    text = lo.panel_csv(rows)
    assert text.splitlines()[0] == "matrix,symbol,windows,covariant,gap"
    assert len(text.splitlines()) == 1 + 2 * 3 * 2


def test_panel_verdict_flags_unseparated_witness():
    rows = [lo.PanelEntry("I", "s", "w", 0.01, False)]
    ok, msgs = lo.panel_verdict(rows)
    assert not ok and "not separated" in msgs[0]


@settings(max_examples=8, deadline=None, derandomize=True)
@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_localization_linear_in_symbol(x0, xi0):
    G = g.GridSpec()
    phi = g.gaussian(G)
    a = g.field_gaussian(G, center=[x0, xi0])
    A = sm.A_tau(1, 0.3)
    M1 = lo.a_loc(A, a * 3.0, phi, phi)
    M2 = lo.a_loc(A, a, phi, phi)
    assert np.max(np.abs(M1.entries - 3 * M2.entries)) < 1e-9
