import math

import numpy as np
import pytest

import properties
from qfiw.errors import CapExceededError, DimensionError
from qfiw.observables import SIGMA_Z, CollectiveObservable
from qfiw.oracle import dicke_noise_dense, ghz_mixture_dense, qfi_bruteforce, sigma_x_collective, sigma_z_collective
from qfiw.qfi import qfi, qfi_dense, qfi_structured, variance
from qfiw.states import (
    DensityMatrix,
    DickeNoiseParams,
    GhzMixtureParams,
    StructuredState,
    basis_state,
    chi_state,
    dicke,
    dicke_noise,
    ghz,
    ghz_mixture,
)

PLUS = np.array([1, 1]) / math.sqrt(2)
MINUS = np.array([1, -1]) / math.sqrt(2)


def ghz_closed_form(n, p, q):
    return n**2 * ((1 - p) ** 2 + q**2) / ((1 - p + q) + (p - q) / 2 ** (n - 1))


def dicke_closed_form(n, p, v):
    return p**2 * v / (p + 2 * (1 - p) / 2**n)


class TestVariance:
    def test_ghz8(self):
        assert abs(variance(ghz(8), CollectiveObservable.uniform_pauli(8, "z")) - 64) < 1e-12

    @pytest.mark.parametrize("n", [1, 4, 9])
    def test_eigenstate(self, n):
        assert abs(variance(basis_state([0] * n), CollectiveObservable.uniform_pauli(n, "z"))) < 1e-12

    def test_dicke_15_7(self):
        assert abs(variance(dicke(15, 7), CollectiveObservable.uniform_pauli(15, "x")) - 127) < 1e-9

    def test_structured_matches_dense(self):
        s = ghz_mixture(GhzMixtureParams(4, 0.3, 0.1))
        dense = DensityMatrix(s.dims, ghz_mixture_dense(4, 0.3, 0.1))
        obs = CollectiveObservable.uniform_pauli(4, "x")
        assert abs(variance(s, obs) - variance(dense, obs.realize())) < 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            variance(ghz(3), CollectiveObservable.uniform_pauli(4, "z"))


class TestQfiDense:
    def test_maximally_mixed(self):
        rho = DensityMatrix((4,), np.eye(4) / 4)
        rng = np.random.default_rng(0)
        x = rng.normal(size=(4, 4))
        assert abs(qfi_dense(rho, x + x.T).value) < 1e-14

    def test_plus(self):
        rho = DensityMatrix((2,), np.outer(PLUS, PLUS))
        assert abs(qfi_dense(rho, SIGMA_Z).value - 1) < 1e-12

    def test_two_term(self):
        rho = DensityMatrix((2,), 0.75 * np.outer(PLUS, PLUS) + 0.25 * np.outer(MINUS, MINUS))
        res = qfi_dense(rho, SIGMA_Z)
        assert abs(res.value - 0.25) < 1e-12
        assert res.method == "dense"

    def test_skips_null_pairs(self):
        rho = DensityMatrix((4,), np.diag([1.0, 0, 0, 0]))
        assert qfi_dense(rho, np.eye(4)).term_count == 3 * 2 + 1

    def test_cap(self, monkeypatch):
        monkeypatch.setenv("QFIW_DENSE_CAP", "4")
        with pytest.raises(CapExceededError):
            qfi_dense(DensityMatrix((8,), np.eye(8) / 8), np.eye(8))


class TestStructured:
    @pytest.mark.parametrize("n", range(2, 7))
    def test_ghz_closed_form_and_dense(self, n):
        obs = CollectiveObservable.uniform_pauli(n, "z")
        az = sigma_z_collective(n)
        for p in np.linspace(0, 1, 5):
            for q in np.linspace(0, p, 5):
                fast = qfi_structured(ghz_mixture(GhzMixtureParams(n, p, q)), obs).value
                assert abs(fast - ghz_closed_form(n, p, q)) <= 1e-9
                assert abs(fast - qfi_dense(DensityMatrix((2,) * n, ghz_mixture_dense(n, p, q)), az).value) <= 1e-9

    @pytest.mark.parametrize("n", range(2, 7))
    def test_dicke_closed_form_and_dense(self, n):
        obs = CollectiveObservable.uniform_pauli(n, "x")
        v = variance(chi_state(n), obs)
        for p in np.linspace(0, 1, 10):
            fast = qfi_structured(dicke_noise(DickeNoiseParams(n, p)), obs).value
            assert abs(fast - dicke_closed_form(n, p, v)) <= 1e-9
            oracle = qfi_bruteforce(dicke_noise_dense(n, p), sigma_x_collective(n))
            assert abs(fast - oracle) <= 1e-9

    @pytest.mark.parametrize("n", [2, 5, 8, 12])
    def test_pure_ghz(self, n):
        s = ghz_mixture(GhzMixtureParams(n, 0, 0))
        assert abs(qfi(s, CollectiveObservable.uniform_pauli(n, "z")).value - n**2) < 1e-9

    def test_rank_cap(self):
        vecs = np.eye(32)[:17]
        s = StructuredState((2,) * 5, vecs, np.full(17, 1 / 17), 0.0)
        with pytest.raises(CapExceededError):
            qfi_structured(s, CollectiveObservable.uniform_pauli(5, "z"))

    def test_generic_observable_matrix(self):
        rng = np.random.default_rng(11)
        s = dicke_noise(DickeNoiseParams(4, 0.6))
        x = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
        a = x + x.conj().T
        assert abs(qfi_structured(s, a).value - qfi_bruteforce(dicke_noise_dense(4, 0.6), a)) < 1e-9


class TestDispatcher:
    def test_ghz8_half(self):
        res = qfi(ghz_mixture(GhzMixtureParams(8, 0.5, 0.5)), CollectiveObservable.uniform_pauli(8, "z"))
        assert res.method == "structured"
        assert abs(res.value - 32) < 1e-9

    def test_chi_pure(self):
        res = qfi(dicke_noise(DickeNoiseParams(16, 1.0)), CollectiveObservable.uniform_pauli(16, "x"))
        assert abs(res.value - 128) < 1e-9

    def test_chi_mixed_out(self):
        res = qfi(dicke_noise(DickeNoiseParams(16, 0.0)), CollectiveObservable.uniform_pauli(16, "x"))
        assert abs(res.value) < 1e-12

    def test_chi_sigma_z_vanishes(self):
        # every branch of chi has Hamming weight 8, so it is an eigenvector of sum sigma_z
        res = qfi(chi_state(), CollectiveObservable.uniform_pauli(16, "z"))
        assert abs(res.value) < 1e-9

    def test_pure_goes_structured(self):
        assert qfi(ghz(3), CollectiveObservable.uniform_pauli(3, "z")).method == "structured"

    def test_dense(self):
        assert qfi(ghz(3).to_density(), CollectiveObservable.uniform_pauli(3, "z")).method == "dense"

    def test_unsupported(self):
        with pytest.raises(TypeError):
            qfi(np.eye(2), SIGMA_Z)


def test_pure_equals_variance():
    assert properties.pure_equals_variance() <= 1e-9


def test_convexity():
    assert properties.convexity() <= 1e-9


def test_additivity():
    assert properties.additivity() <= 1e-9


def test_dominance():
    assert properties.dominance() <= 1e-9


def test_basis_invariance():
    assert properties.basis_invariance() <= 1e-9


@pytest.mark.parametrize("seed", range(20))
def test_dense_matches_bruteforce(seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(2, 40))
    x = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = x @ x.conj().T
    rho = DensityMatrix((d,), rho / np.trace(rho).real)
    a = rng.normal(size=(d, d))
    a = a + a.T
    res = qfi_dense(rho, a)
    assert res.value >= -1e-10
    assert abs(res.value - qfi_bruteforce(rho, a)) <= 1e-9
