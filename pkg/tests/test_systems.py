"""Tests for system builders, jump operators and bath rate models."""

import numpy as np
import pytest

from ebloch.linalg import commutator, dag
from ebloch.systems import (
    BathModel,
    LadderSystem,
    TransitionSpec,
    TwoLevelSystem,
    build_oscillator,
    build_two_level_hamiltonian,
    fermi,
    jump_operators,
    rates_from_bath,
    transition_projector,
    verify_jump_algebra,
)


def random_direction(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------- Hamiltonian


def test_hamiltonian_pure_sigma_z():
    np.testing.assert_allclose(
        build_two_level_hamiltonian(2.0, (0, 0, 1)), np.diag([1.0, -1.0]), atol=1e-15
    )


def test_hamiltonian_sigma_x_eigenvalues():
    H = build_two_level_hamiltonian(1.0, (1, 0, 0))
    np.testing.assert_allclose(H, 0.5 * np.array([[0, 1], [1, 0]]), atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(H), [-0.5, 0.5], atol=1e-15)


def test_hamiltonian_trace_and_gap():
    rng = np.random.default_rng(10)
    for _ in range(50):
        E = rng.uniform(0.1, 8.0)
        H = build_two_level_hamiltonian(E, random_direction(rng))
        assert abs(np.trace(H)) <= 1e-12 * E
        w = np.linalg.eigvalsh(H)
        assert w[1] - w[0] == pytest.approx(E, abs=1e-12 * E)


def test_hamiltonian_rejects_bad_input():
    with pytest.raises(ValueError, match="positive"):
        build_two_level_hamiltonian(0.0, (0, 0, 1))
    with pytest.raises(ValueError, match="nonzero"):
        build_two_level_hamiltonian(1.0, (0, 0, 0))
    with pytest.raises(ValueError, match="unit length"):
        build_two_level_hamiltonian(1.0, (0, 0, 1.001))


def test_two_level_system_normalizes_eps():
    sys2 = TwoLevelSystem(1.0, (0.6, 0.0, 0.8 + 1e-10))
    assert np.linalg.norm(sys2.eps) == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(ValueError):
        TwoLevelSystem(1.0, (0, 0, 1), gamma_p=-0.1)


# ------------------------------------------------------------- jump operators


def test_jump_operators_sigma_z_basis():
    H = build_two_level_hamiltonian(1.7, (0, 0, 1))
    pair = jump_operators(H)
    np.testing.assert_allclose(pair.sigma_p, [[0, 1], [0, 0]], atol=1e-14)
    np.testing.assert_allclose(pair.sigma_m, [[0, 0], [1, 0]], atol=1e-14)


def test_jump_operators_sigma_x_basis():
    H = build_two_level_hamiltonian(1.0, (1, 0, 0))
    pair = jump_operators(H)
    np.testing.assert_allclose(pair.sigma_p, 0.5 * np.array([[1, -1], [1, -1]]), atol=1e-14)
    np.testing.assert_allclose(pair.sigma_p @ pair.sigma_p, np.zeros((2, 2)), atol=1e-14)


def test_jump_operators_commutator_scaling():
    rng = np.random.default_rng(11)
    for _ in range(100):
        E = rng.uniform(0.2, 5.0)
        H = build_two_level_hamiltonian(E, random_direction(rng))
        pair = jump_operators(H)
        np.testing.assert_allclose(
            commutator(pair.sigma_p, pair.sigma_m), 2 * H / E, atol=1e-12
        )
        assert np.abs(pair.sigma_m - dag(pair.sigma_p)).max() <= 1e-15


def test_jump_operators_reject_bad_hamiltonians():
    with pytest.raises(ValueError, match="traceless"):
        jump_operators(np.diag([1.0, 0.0]))
    with pytest.raises(ValueError, match="degenerate"):
        jump_operators(np.zeros((2, 2)))
    with pytest.raises(ValueError, match="2x2"):
        jump_operators(np.diag([1.0, 0.0, -1.0]))


def test_verify_jump_algebra_canonical_pair():
    H = build_two_level_hamiltonian(1.0, (0, 0, 1))
    report = verify_jump_algebra(jump_operators(H), H, 1.0)
    assert report.passed
    assert report.max_residual <= 1e-14


def test_verify_jump_algebra_detects_rescaled_pair():
    # doubling the pair: [2sp, 2sm] = 8H/E, residual ||8H/E - 2H/E|| = 3 ||2H/E||
    E = 1.4
    H = build_two_level_hamiltonian(E, (0.6, 0, 0.8))
    pair = jump_operators(H)
    from ebloch.systems import JumpOperatorPair

    bad = JumpOperatorPair(2 * pair.sigma_p, 2 * pair.sigma_m)
    report = verify_jump_algebra(bad, H, E)
    assert not report.passed
    expected_comm = np.linalg.norm(
        (2 * pair.sigma_p) @ (2 * pair.sigma_m)
        - (2 * pair.sigma_m) @ (2 * pair.sigma_p)
        - 2 * H / E
    )
    assert report.comm == pytest.approx(expected_comm, rel=1e-12)
    assert report.comm == pytest.approx(3 * np.linalg.norm(2 * H / E), rel=1e-12)
    assert report.sq_p == pytest.approx(0.0, abs=1e-13)
    assert report.eigenop == pytest.approx(0.0, abs=1e-13)


def test_jump_algebra_randomized_property():
    rng = np.random.default_rng(12)
    for _ in range(200):
        E = rng.uniform(0.2, 5.0)
        H = build_two_level_hamiltonian(E, random_direction(rng))
        assert verify_jump_algebra(jump_operators(H), H, E).passed


# ------------------------------------------------------------------ bath model


def test_fermi_values():
    assert fermi(0.0, 2.3) == pytest.approx(0.5, abs=1e-15)
    assert fermi(1.0, 1.0) == pytest.approx(1 / (np.e + 1), rel=1e-14)
    assert fermi(800.0, 1.0) == 0.0
    assert fermi(-800.0, 1.0) == 1.0
    with pytest.raises(ValueError, match="positive temperature"):
        fermi(1.0, 0.0)


def test_rates_from_bath_values():
    gp, gm = rates_from_bath(BathModel(2.0, 1.0), 1.0)
    assert gp == pytest.approx(2 / (np.e + 1), rel=1e-14)
    assert gm == pytest.approx(2 * np.e / (np.e + 1), rel=1e-14)


def test_rates_from_bath_infinite_temperature_limit():
    gp, gm = rates_from_bath(BathModel(1.0, 1e12), 1.0)
    assert gp == pytest.approx(0.5, abs=1e-12)
    assert gm == pytest.approx(0.5, abs=1e-12)


def test_rates_sum_is_exactly_gamma():
    # gamma_m is constructed as gamma - gamma_p; the recomposed sum is exact
    # on these grids and never off by more than one ulp for arbitrary input
    for gamma in (1.0, 2.0, 0.7, 3.25):
        for E, T in ((1.0, 1.0), (0.5, 2.0), (4.0, 0.5)):
            gp, gm = rates_from_bath(BathModel(gamma, T), E)
            assert gp + gm == gamma
    rng = np.random.default_rng(13)
    for _ in range(200):
        gamma = float(rng.uniform(0.1, 5.0))
        gp, gm = rates_from_bath(BathModel(gamma, float(rng.uniform(0.1, 5.0))),
                                 float(rng.uniform(0.1, 5.0)))
        assert abs(gp + gm - gamma) <= np.finfo(float).eps * gamma


def test_rates_detailed_balance():
    rng = np.random.default_rng(14)
    for _ in range(100):
        E = float(rng.uniform(0.1, 5.0))
        T = float(rng.uniform(0.1, 5.0))
        gp, gm = rates_from_bath(BathModel(1.7, T), E)
        assert gp / gm == pytest.approx(np.exp(-E / T), rel=1e-13)


# -------------------------------------------------------------------- ladders


def test_build_oscillator_harmonic_table():
    lad = build_oscillator(4, 1.0, "harmonic", BathModel(1.0, 1.0), gamma=0.7)
    gs = [t.gamma_sum for t in lad.transitions]
    np.testing.assert_allclose(gs, [0.7, 1.4, 2.1], rtol=1e-14)
    np.testing.assert_allclose(lad.energies, [0, 1, 2, 3])


def test_build_oscillator_constant_table():
    lad = build_oscillator(4, 1.0, "constant", BathModel(1.0, 1.0), gamma=0.7)
    np.testing.assert_allclose([t.gamma_sum for t in lad.transitions], [0.7] * 3, rtol=1e-14)


def test_build_oscillator_two_levels_matches_two_level_rates():
    bath = BathModel(1.3, 0.9)
    lad = build_oscillator(2, 1.1, "harmonic", bath, gamma=1.3)
    gp, gm = rates_from_bath(bath, 1.1)
    t = lad.transitions[0]
    assert (t.gamma_p, t.gamma_m) == (gp, gm)


def test_build_oscillator_explicit_table_and_errors():
    lad = build_oscillator(4, 1.0, [0.5, 1.5, 2.5], BathModel(1.0, 1.0))
    np.testing.assert_allclose([t.gamma_sum for t in lad.transitions], [0.5, 1.5, 2.5])
    with pytest.raises(ValueError, match="3 entries"):
        build_oscillator(4, 1.0, [1.0], BathModel(1.0, 1.0))
    with pytest.raises(ValueError, match="non-negative"):
        build_oscillator(3, 1.0, [1.0, -0.5], BathModel(1.0, 1.0))
    with pytest.raises(ValueError, match="unknown coupling rule"):
        build_oscillator(3, 1.0, "quadratic", BathModel(1.0, 1.0))


def test_ladder_validation():
    t01 = TransitionSpec(0, 1, 0.1, 0.9, 1.0)
    with pytest.raises(ValueError, match="out of range"):
        LadderSystem(2, (0.0, 1.0), (TransitionSpec(0, 5, 0.1, 0.9, 1.0),))
    with pytest.raises(ValueError, match="duplicate"):
        LadderSystem(2, (0.0, 1.0), (t01, TransitionSpec(1, 0, 0.1, 0.9, 1.0)))
    with pytest.raises(ValueError, match="does not match"):
        LadderSystem(2, (0.0, 2.0), (t01,))
    with pytest.raises(ValueError, match="E_t must be positive"):
        TransitionSpec(0, 1, 0.1, 0.9, -1.0)


# ----------------------------------------------------------------- projectors


def test_transition_projector_basics():
    t = TransitionSpec(0, 1, 0.1, 0.9, 1.0)
    I_t, H_t, project = transition_projector(t, 3)
    np.testing.assert_allclose(I_t, np.diag([1.0, 1.0, 0.0]), atol=1e-15)
    assert np.trace(I_t) == pytest.approx(2.0)
    np.testing.assert_allclose(I_t @ I_t, I_t, atol=1e-15)
    np.testing.assert_allclose(I_t @ H_t @ I_t, H_t, atol=1e-15)

    rho_t = project(np.eye(3) / 3)
    np.testing.assert_allclose(rho_t, np.diag([1 / 3, 1 / 3, 0.0]), atol=1e-15)
    assert np.trace(rho_t) == pytest.approx(2 / 3)


def test_transition_projector_keeps_exactly_the_block():
    rng = np.random.default_rng(15)
    rho = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    t = TransitionSpec(1, 3, 0.2, 0.8, 2.0)
    _, _, project = transition_projector(t, 4)
    out = project(rho)
    for a in range(4):
        for b in range(4):
            if a in (1, 3) and b in (1, 3):
                assert out[a, b] == rho[a, b]
            else:
                assert out[a, b] == 0.0


def test_transition_projector_with_energies():
    t = TransitionSpec(0, 2, 0.1, 0.9, 2.5)
    _, H_t, _ = transition_projector(t, 3, energies=(0.0, 1.0, 2.5))
    np.testing.assert_allclose(H_t, np.diag([0.0, 0.0, 2.5]), atol=1e-15)
    _, H_c, _ = transition_projector(t, 3)
    np.testing.assert_allclose(H_c, np.diag([-1.25, 0.0, 1.25]), atol=1e-15)
    with pytest.raises(ValueError, match="out of range"):
        transition_projector(t, 2)
