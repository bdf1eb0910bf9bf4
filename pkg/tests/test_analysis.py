import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from floquet_ssh import (
    Method,
    ModelParams,
    N0Rule,
    ParameterError,
    Phase,
    check_pt_symmetry,
    classify_pt,
    edge_weight,
    find_zero_modes,
    gamma_pt_threshold,
    quasi_energies_extended,
    quasi_energies_propagator,
    static_spectrum,
)

FIG1_STATIC = dict(n_sites=40, tunneling=1.0, lam=0.4, gamma=0.2, impurity_site=2)


class TestClassifyPt:
    def test_hermitian_chain_is_unbroken(self):
        p = ModelParams(n_sites=20, lam=0.4, phi_dim=0.5, gamma=0.0)
        point = classify_pt(static_spectrum(p))
        assert point.phase is Phase.UNBROKEN
        assert point.max_im < 1e-9

    def test_low_frequency_drive_breaks(self):
        omega = 0.2 * math.pi
        for phi in (0.0, 0.3):
            p = ModelParams(**FIG1_STATIC, phi_dim=phi, kappa=0.05 / omega,
                            omega=omega)
            point = classify_pt(quasi_energies_propagator(p, 2048))
            assert point.phase is Phase.BROKEN

    def test_odd_chain_edge_impurities_break(self):
        # odd N leaves an unpaired zero mode on the odd sublattice; impurities
        # on that sublattice (odd j) make the spectrum complex at any gamma
        p = ModelParams(n_sites=39, tunneling=1.0, lam=0.4, phi_dim=0.3,
                        gamma=0.2, impurity_site=1)
        point = classify_pt(static_spectrum(p))
        assert point.phase is Phase.BROKEN
        p3 = ModelParams(n_sites=39, tunneling=1.0, lam=0.4, phi_dim=0.3,
                         gamma=0.2, impurity_site=3)
        assert classify_pt(static_spectrum(p3)).phase is Phase.BROKEN

    def test_params_echo(self):
        p = ModelParams(n_sites=8, lam=0.4)
        assert classify_pt(static_spectrum(p)).params_echo == p


class TestFindZeroModes:
    def test_topological_window_hosts_two_edge_modes(self):
        p = ModelParams(n_sites=40, lam=0.4, phi_dim=0.3, gamma=0.0)
        modes = find_zero_modes(static_spectrum(p))
        assert len(modes) == 2
        for zm in modes:
            assert zm.edge_weight > 0.8
            assert abs(zm.re_eps) < 1e-3

    def test_trivial_window_has_none(self):
        p = ModelParams(n_sites=40, lam=0.4, phi_dim=math.pi, gamma=0.0)
        assert find_zero_modes(static_spectrum(p)) == []

    def test_uniform_chain_has_none(self):
        p = ModelParams(n_sites=40, lam=0.0, phi_dim=0.8, gamma=0.0)
        assert find_zero_modes(static_spectrum(p)) == []

    def test_zero_mode_count_is_even_for_hermitian_even_chain(self):
        for phi in np.linspace(0, 2 * math.pi, 17):
            p = ModelParams(n_sites=20, lam=0.4, phi_dim=float(phi), gamma=0.0)
            assert len(find_zero_modes(static_spectrum(p))) % 2 == 0

    def test_edge_weight_bounds_and_monotonicity(self):
        p = ModelParams(n_sites=30, lam=0.4, phi_dim=0.3, gamma=0.0)
        fs = static_spectrum(p)
        for row in fs.mode_weights:
            previous = 0.0
            for fraction in (0.05, 0.1, 0.2, 0.35, 0.5):
                w = edge_weight(row, fraction)
                assert 0.0 <= w <= 1.0 + 1e-12
                assert w >= previous - 1e-12
                previous = w

    def test_edge_fraction_validation(self):
        p = ModelParams(n_sites=10, lam=0.4)
        fs = static_spectrum(p)
        with pytest.raises(ParameterError):
            find_zero_modes(fs, edge_fraction=0.6)


class TestGammaPtThreshold:
    def test_edge_impurities_break_at_zero(self):
        p = ModelParams(n_sites=40, lam=0.4, phi_dim=0.3, gamma=0.0,
                        impurity_site=1)
        result = gamma_pt_threshold(p, gamma_max=1.0)
        assert result.status == "broken_at_zero"
        assert result.value == 0.0

    def test_neighbor_impurities_have_positive_threshold(self):
        p = ModelParams(n_sites=40, lam=0.4, phi_dim=0.3, gamma=0.0,
                        impurity_site=2)
        result = gamma_pt_threshold(p, gamma_max=1.0)
        assert result.status == "ok"
        assert result.value > 0.01

    def test_threshold_decreases_with_size(self):
        thresholds = {}
        for n in (20, 40):
            p = ModelParams(n_sites=n, lam=0.4, phi_dim=0.3, gamma=0.0,
                            impurity_site=2)
            thresholds[n] = gamma_pt_threshold(p, gamma_max=1.0).value
        assert thresholds[40] <= thresholds[20]

    def test_unbroken_at_gamma_max_flag(self):
        p = ModelParams(n_sites=20, lam=0.4, phi_dim=0.3, gamma=0.0,
                        impurity_site=2)
        result = gamma_pt_threshold(p, gamma_max=0.05)
        assert result.status == "unbroken_at_gamma_max"
        assert result.value == 0.05

    def test_threshold_sanity_margins(self):
        p = ModelParams(n_sites=20, lam=0.4, phi_dim=0.3, gamma=0.0,
                        impurity_site=2)
        tol_gamma = 1e-4
        result = gamma_pt_threshold(p, gamma_max=1.0, tol_gamma=tol_gamma)
        assert result.monotone
        gamma_star = result.value
        below = static_spectrum(
            ModelParams(n_sites=20, lam=0.4, phi_dim=0.3,
                        gamma=gamma_star - 10 * tol_gamma, impurity_site=2))
        above = static_spectrum(
            ModelParams(n_sites=20, lam=0.4, phi_dim=0.3,
                        gamma=gamma_star + 10 * tol_gamma, impurity_site=2))
        assert classify_pt(below).phase is Phase.UNBROKEN
        assert classify_pt(above).phase is Phase.BROKEN

    def test_argument_guards(self):
        p = ModelParams(n_sites=20, lam=0.4, phi_dim=0.3, gamma=0.0,
                        impurity_site=2)
        with pytest.raises(ParameterError):
            gamma_pt_threshold(p, gamma_max=0.0)
        with pytest.raises(ParameterError):
            gamma_pt_threshold(p, gamma_max=0.5, tol_gamma=0.0)


class TestCheckPtSymmetry:
    def test_even_chain_centered_rule_exact(self):
        p = ModelParams(n_sites=8, lam=0.4, phi_dim=0.7, gamma=0.3,
                        impurity_site=2, kappa=0.5, omega=2.0,
                        n0_rule=N0Rule.CENTERED)
        assert check_pt_symmetry(p) < 1e-12

    def test_even_chain_integer_rule_gauged(self):
        p = ModelParams(n_sites=8, lam=0.4, phi_dim=0.7, gamma=0.3,
                        impurity_site=2, kappa=0.5, omega=2.0)
        assert check_pt_symmetry(p) < 1e-12

    def test_nonzero_drive_phase_shifts_reflection_point(self):
        p = ModelParams(n_sites=6, lam=0.4, phi_dim=0.4, gamma=0.2,
                        impurity_site=2, kappa=0.7, omega=1.5, phase0=0.8)
        assert check_pt_symmetry(p) < 1e-12

    def test_odd_chain_breaks_relation(self):
        p = ModelParams(n_sites=9, lam=0.4, phi_dim=0.7, gamma=0.2,
                        impurity_site=2, kappa=0.5, omega=2.0)
        assert check_pt_symmetry(p) > 1e-3

    def test_sample_count_validation(self):
        p = ModelParams(n_sites=6, lam=0.4)
        with pytest.raises(ParameterError):
            check_pt_symmetry(p, z_samples=4)


class TestClassificationConsistency:
    def test_methods_agree_away_from_threshold(self):
        p = ModelParams(n_sites=8, lam=0.4, phi_dim=1.0, gamma=0.1,
                        impurity_site=2, kappa=0.3, omega=2 * math.pi)
        ext = classify_pt(quasi_energies_extended(p, 8))
        prop = classify_pt(quasi_energies_propagator(p, 2048))
        margin = 10 * 1e-8
        if (ext.max_im > margin) == (prop.max_im > margin):
            assert ext.phase == prop.phase
