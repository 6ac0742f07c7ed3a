import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tfaloc import sympmat as sm
from tfaloc.errors import FactorizationFailed, NonSymmetricC, NotSymplectic, SingularE
from tfaloc.sympmat import SymplecticMatrix

seeds = st.integers(0, 2**31 - 1)


def named(d=1):
    m = sm.std_matrices(d)
    return {
        "I": m["I"], "J": m["J"], "A_ST": m["A_ST"], "A_FT2": m["A_FT2"],
        "A_half": m["A_half"], "D_S": m["D_S"], "A_tau(0.3)": m["A_tau"](0.3),
    }


@pytest.mark.parametrize("d", [1, 2])
def test_named_matrices_are_symplectic(d):
    for A in named(d).values():
        assert sm.symplectic_residual(A.entries) < 1e-12


def test_non_symplectic_rejected():
    with pytest.raises(NotSymplectic) as exc:
        SymplecticMatrix(2 * np.eye(4))
    assert exc.value.residual > 1


def test_entries_are_read_only():
    A = sm.J(1)
    with pytest.raises(ValueError):
        A.entries[0, 0] = 1.0


def test_block_indexing_is_one_based():
    A = sm.A_ST(1)
    assert A.block(1, 2)[0, 0] == -1
    assert A.block(4, 1)[0, 0] == -1


def test_generator_constructors_validate():
    with pytest.raises(SingularE):
        sm.D_E(np.zeros((2, 2)))
    with pytest.raises(NonSymmetricC):
        sm.V_C(np.array([[0.0, 1.0], [0.0, 0.0]]))


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 6))
def test_symplectic_inverse(seed, k):
    A = sm.products_of_generators(1, k, seed)
    assert np.allclose((A @ A.inverse()).entries, np.eye(4), atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(1, 6), st.sampled_from([1, 2]))
def test_factorization_recomposes(seed, k, d):
    A = sm.products_of_generators(d, k, seed)
    fac = sm.factor_into_generators(A)
    assert fac.residual() < 1e-8


@pytest.mark.parametrize("name", list(named(1)))
def test_named_factorizations(name):
    A = named(1)[name]
    assert sm.factor_into_generators(A).residual() < 1e-12


def test_factorization_of_identity_is_empty():
    assert sm.factor_into_generators(sm.identity(1)).steps == ()


def test_generator_step_inverse():
    for step in (sm.GeneratorStep("fourier"), sm.GeneratorStep("linear", [[2.0, 1.0], [0.0, 1.0]]),
                 sm.GeneratorStep("chirp", [[1.0, 0.5], [0.5, 0.0]])):
        assert np.allclose(step.symplectic(2) @ step.inverse().symplectic(2), np.eye(4))


def test_factorization_failure_is_reported(monkeypatch):
    # A_FT2 has a singular upper-right block, so it needs a chirp pre-shift
    monkeypatch.setattr(sm, "_candidate_shifts", lambda n, rng: [])
    with pytest.raises(FactorizationFailed):
        sm.factor_into_generators(sm.A_FT2(1))


@pytest.mark.parametrize("tau", [0.0, 0.25, 0.3, 0.5, 0.75, 1.0, -0.4, 2.0])
def test_tau_matrices_are_covariant(tau):
    assert sm.is_covariant(sm.A_tau(1, tau))
    assert sm.satisfies_block_conditions(sm.A_tau(1, tau))


@settings(max_examples=25, deadline=None)
@given(seeds, st.sampled_from([1, 2]))
def test_random_covariant_is_covariant(seed, d):
    A = sm.random_covariant(d, seed)
    assert sm.is_covariant(A)
    assert sm.satisfies_block_conditions(A)
    assert sm.half_times_inverse_lower_left(A) < 1e-9


@pytest.mark.parametrize("name", ["J", "A_ST", "I", "A_FT2"])
def test_non_covariant_named(name):
    rep = sm.is_covariant(named(1)[name])
    assert not rep
    assert rep.failing()


def test_block_conditions_fail_for_j_with_named_residual():
    rep = sm.satisfies_block_conditions(sm.J(1))
    assert not rep
    assert "A31+A32" in rep.failing()
    assert not sm.satisfies_block_conditions(sm.A_ST(1))


@pytest.mark.parametrize("name", list(named(1)))
def test_block_conditions_match_upper_triangularity(name):
    A = named(1)[name]
    assert bool(sm.satisfies_block_conditions(A)) == (sm.half_times_inverse_lower_left(A) < 1e-9)


def test_totally_wigner_decomposable():
    E = np.array([[1.0, 0.5], [0.0, 2.0]])
    A = SymplecticMatrix(sm.A_FT2(1).entries @ sm.D_E(E).entries, 1)
    assert np.allclose(sm.totally_wigner_decomposable(A), E)
    assert sm.totally_wigner_decomposable(sm.J(1)) is None


def test_conjugate_matrix_is_involution():
    A = sm.A_tau(1, 0.3)
    assert sm.conjugate_matrix(sm.conjugate_matrix(A)).allclose(A)
    assert sm.conjugate_matrix(sm.identity(1)).allclose(sm.identity(1))


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_text_format_round_trip(seed):
    A = sm.products_of_generators(1, 4, seed)
    B = sm.parse_matrix(sm.format_matrix(A))
    assert np.array_equal(A.entries, B.entries)


def test_parse_matrix_rejects_malformed():
    with pytest.raises(ValueError):
        sm.parse_matrix("1 2 3")
    with pytest.raises(ValueError):
        sm.parse_matrix("d=1\n1 0 0 0\n")
