"""Dense exact-diagonalisation oracle."""

import numpy as np
import pytest

from lanczos_plateau.ed import (
    autocorrelation_ed,
    degeneracy_groups,
    dense_spectrum,
    plateau_ed,
)
from lanczos_plateau.models import (
    ObservableSpec,
    SpinChainModel,
    build_ising,
    observable,
)
from lanczos_plateau.pauli import OperatorVector, PauliString


def single_site_model(h):
    return SpinChainModel(1, "open", [(PauliString.single("z", 0, 1), h)])


def sigma_x_obs():
    return ObservableSpec(seed=OperatorVector(1, {PauliString.single("x", 0, 1): 1.0}),
                          label="sigma_x_1")


class TestDenseSpectrum:
    def test_unitary_eigenvectors(self):
        spec = dense_spectrum(build_ising(1, 1, 1.5, 4, "periodic"),
                              observable("sigma_z_1", 4))
        v = spec.eigenvectors
        np.testing.assert_allclose(v.conj().T @ v, np.eye(16), atol=1e-10)
        assert np.all(np.diff(spec.eigenvalues) >= -1e-12)

    def test_cap_enforced(self):
        with pytest.raises(ValueError):
            dense_spectrum(build_ising(1, 1, 1.5, 13, "open"),
                           observable("sigma_z_1", 13))


class TestAutocorrelation:
    def test_single_site_cosine(self):
        h = 0.9
        ts = np.linspace(0, 10, 101)
        c = autocorrelation_ed(single_site_model(h), sigma_x_obs(), ts)
        np.testing.assert_allclose(c.real, np.cos(2 * h * ts), atol=1e-12)

    def test_t0_is_one(self):
        c = autocorrelation_ed(build_ising(1, 1, 1.5, 3, "periodic"),
                               observable("sigma_z_1", 3), [0.0])
        assert c[0].real == pytest.approx(1.0, abs=1e-10)

    def test_hermitian_symmetry_in_t(self):
        model = build_ising(1, 1, 1.5, 3, "periodic")
        obs = observable("sigma_z_1", 3)
        ts = np.linspace(0.5, 5, 10)
        fwd = autocorrelation_ed(model, obs, ts)
        bwd = autocorrelation_ed(model, obs, -ts)
        np.testing.assert_allclose(bwd, fwd.conj(), atol=1e-12)


class TestPlateau:
    def test_single_site_vanishes(self):
        assert plateau_ed(single_site_model(0.9), sigma_x_obs()) == pytest.approx(0.0, abs=1e-14)

    def test_sigma_y_vanishes(self):
        model = build_ising(1, 1, 1.5, 6, "periodic")
        assert plateau_ed(model, observable("sigma_y_1", 6)) < 1e-10

    def test_window_average_consistency(self):
        model = build_ising(1, 1, 1.5, 4, "periodic")
        obs = observable("sigma_z_1", 4)
        plateau = plateau_ed(model, obs)
        for T in (100.0, 1000.0):
            ts = np.linspace(T, 2 * T, 20001)
            avg = np.trapezoid(autocorrelation_ed(model, obs, ts).real, ts) / T
            assert abs(avg - plateau) < 20.0 / T

    def test_site_relabelling_invariance(self):
        # translating every site of the periodic model must leave the plateau alone
        L = 4
        model = build_ising(1, 1, 1.5, L, "periodic")
        obs = observable("sigma_z_1", L)
        base = plateau_ed(model, obs)

        def shift_mask(m, k):
            return ((m << k) | (m >> (L - k))) & ((1 << L) - 1)

        for k in (1, 2):
            terms = [(PauliString(shift_mask(p.x_mask, k), shift_mask(p.z_mask, k), L), c)
                     for p, c in model.terms]
            shifted = SpinChainModel(L, "periodic", terms)
            seed = OperatorVector(L, {PauliString.single("z", k, L): 1.0})
            val = plateau_ed(shifted, ObservableSpec(seed=seed))
            assert val == pytest.approx(base, abs=1e-10)

    def test_decreasing_with_size(self):
        vals = [plateau_ed(build_ising(1, 1, 1.5, L, "periodic"),
                           observable("sigma_z_1", L)) for L in (4, 6, 8)]
        assert vals[0] > vals[1] > vals[2] > 0


class TestDegeneracyGroups:
    def test_grouping(self):
        e = np.array([0.0, 0.0, 1.0, 1.0 + 1e-12, 2.0])
        gs = degeneracy_groups(e, 1e-9)
        assert [(s.start, s.stop) for s in gs] == [(0, 2), (2, 4), (4, 5)]
