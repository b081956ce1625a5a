import math

import numpy as np
import pytest

from qfiw.errors import CapExceededError, DimensionError, InvalidStateError, PositivityError
from qfiw.linalg import eig_hermitian
from qfiw.states import (
    DensityMatrix,
    DickeNoiseParams,
    GhzMixtureParams,
    PureState,
    StructuredState,
    chi_state,
    densify,
    dicke,
    dicke_noise,
    ghz,
    ghz_mixture,
    ghz_tilde,
    load_state,
    save_state,
    state_from_json,
)


def literal_ghz_mixture(n, p, q):
    d = 2**n
    g = np.zeros(d, complex)
    gt = np.zeros(d, complex)
    g[0] = g[-1] = 1 / math.sqrt(2)
    gt[0], gt[-1] = 1 / math.sqrt(2), -1j / math.sqrt(2)
    return (1 - p) * np.outer(g, g.conj()) + q * np.outer(gt, gt.conj()) + (p - q) / d * np.eye(d)


def test_ghz2():
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(ghz(2).amplitudes, [s, 0, 0, s])


def test_ghz_tilde2():
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(ghz_tilde(2).amplitudes, [s, 0, 0, -1j * s])


def test_ghz_overlap():
    # <G~|G> = (1 + i)/2; the conjugate order gives (1 - i)/2. Magnitude 1/sqrt(2) either way.
    ov = np.vdot(ghz_tilde(8).amplitudes, ghz(8).amplitudes)
    assert abs(ov - (1 + 1j) / 2) < 1e-15
    assert abs(abs(ov) - 1 / math.sqrt(2)) < 1e-15


def test_dicke_2_1():
    s = 1 / math.sqrt(2)
    np.testing.assert_allclose(dicke(2, 1).amplitudes, [0, s, s, 0])


def test_dicke_15_7():
    amps = dicke(15, 7).amplitudes
    nz = amps[amps != 0]
    assert nz.size == 6435 == math.comb(15, 7)
    np.testing.assert_allclose(nz, 1 / (3 * math.sqrt(715)), rtol=1e-14)


@pytest.mark.parametrize("n", [1, 3, 6])
def test_dicke_ground(n):
    amps = dicke(n, 0).amplitudes
    assert amps[0] == 1 and np.count_nonzero(amps) == 1


@pytest.mark.parametrize("n,m", [(n, m) for n in range(1, 9) for m in range(n + 1)])
def test_dicke_support(n, m):
    amps = dicke(n, m).amplitudes
    nz = np.flatnonzero(amps)
    assert nz.size == math.comb(n, m)
    assert np.all(amps[nz] == amps[nz[0]])
    assert all(bin(j).count("1") == m for j in nz)


def test_dicke_bad_m():
    with pytest.raises(InvalidStateError):
        dicke(3, 4)


class TestChi:
    def test_amplitude(self):
        amps = chi_state().amplitudes
        # |1>|0^8 1^7>
        assert abs(amps[2**15 + 2**7 - 1] - 1 / (3 * math.sqrt(715))) < 1e-15

    def test_hamming_weight(self):
        nz = np.flatnonzero(chi_state().amplitudes)
        assert {bin(j).count("1") for j in nz} == {8}
        assert all(j >> 15 == 1 for j in nz)

    def test_norm(self):
        a = chi_state().amplitudes
        assert abs(np.vdot(a, a) - 1) < 1e-12


class TestGhzMixture:
    def test_pure_limit(self):
        s = ghz_mixture(GhzMixtureParams(8, 0, 0))
        assert s.noise == 0
        np.testing.assert_allclose(s.weights, [1, 0], atol=1e-15)

    def test_maximally_mixed(self):
        s = ghz_mixture(GhzMixtureParams(8, 1, 0))
        np.testing.assert_allclose(s.weights, [2**-8, 2**-8], atol=1e-16)
        assert s.noise == 2**-8

    def test_block_eigenvalues_n8(self):
        p, q, n = 0.5, 0.25, 8
        s = ghz_mixture(GhzMixtureParams(n, p, q))
        centre = (1 - p + q) / 2 + (p - q) / 2**n
        half = 0.5 * math.hypot(1 - p, q)
        np.testing.assert_allclose(s.weights, [centre + half, centre - half], atol=1e-15)

    def test_block_formula_against_dense_n3(self):
        p, q, n = 0.5, 0.25, 3
        dense = np.sort(np.linalg.eigvalsh(literal_ghz_mixture(n, p, q)))[::-1]
        centre = (1 - p + q) / 2 + (p - q) / 2**n
        half = 0.5 * math.hypot(1 - p, q)
        np.testing.assert_allclose(dense[:2], [centre + half, centre - half], atol=1e-14)
        np.testing.assert_allclose(dense[2:], (p - q) / 2**n, atol=1e-14)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_densify_matches_literal(self, n):
        for p in np.linspace(0, 1, 5):
            for q in np.linspace(0, p, 5):
                got = densify(ghz_mixture(GhzMixtureParams(n, p, q))).matrix
                assert np.max(np.abs(got - literal_ghz_mixture(n, p, q))) <= 1e-12

    def test_rejects_q_above_p(self):
        with pytest.raises(PositivityError):
            GhzMixtureParams(8, 0.2, 0.3)


class TestDickeNoise:
    def test_pure(self):
        s = dicke_noise(DickeNoiseParams(16, 1.0))
        assert s.noise == 0 and s.weights[0] == 1
        np.testing.assert_array_equal(s.support[0], chi_state().amplitudes)

    def test_maximally_mixed(self):
        s = dicke_noise(DickeNoiseParams(16, 0.0))
        assert s.weights[0] == s.noise == 2**-16

    def test_n4_dense(self):
        # |1> ⊗ dicke(3, 1), mixed with white noise
        rest = np.zeros(8)
        rest[[1, 2, 4]] = 1 / math.sqrt(3)
        chi = np.concatenate([np.zeros(8), rest])
        oracle = 0.5 * np.outer(chi, chi) + 0.5 / 16 * np.eye(16)
        got = densify(dicke_noise(DickeNoiseParams(4, 0.5))).matrix
        assert np.max(np.abs(got - oracle)) <= 1e-12

    def test_n4_psd(self):
        rho = densify(dicke_noise(DickeNoiseParams(4, 0.3)))
        assert eig_hermitian(rho.matrix).eigenvalues[-1] >= -1e-10

    def test_bad_p(self):
        with pytest.raises(InvalidStateError):
            DickeNoiseParams(16, 1.5)


@pytest.mark.parametrize(
    "state",
    [ghz_mixture(GhzMixtureParams(n, p, q)) for n in (2, 5, 8) for p, q in ((0.3, 0.1), (1, 1), (0.9, 0))]
    + [dicke_noise(DickeNoiseParams(n, p)) for n in (4, 10, 16) for p in (0, 0.37, 1)],
)
def test_weight_sum_invariant(state):
    assert abs(state.weights.sum() + state.noise * (state.dim - state.rank) - 1) <= 1e-12


def test_densify_ghz3():
    rho = densify(ghz_mixture(GhzMixtureParams(3, 0, 0))).matrix
    g = ghz(3).amplitudes
    np.testing.assert_allclose(rho, np.outer(g, g.conj()), atol=1e-15)


@pytest.mark.parametrize("n", [2, 5, 9])
def test_densify_trace(n):
    assert abs(np.trace(densify(ghz_mixture(GhzMixtureParams(n, 0.4, 0.2))).matrix) - 1) < 1e-12


def test_densify_cap(monkeypatch):
    monkeypatch.setenv("QFIW_DENSE_CAP", "64")
    with pytest.raises(CapExceededError):
        densify(ghz_mixture(GhzMixtureParams(8, 0.1, 0.0)))


def test_default_cap_blocks_16_qubits():
    with pytest.raises(CapExceededError):
        densify(dicke_noise(DickeNoiseParams(16, 0.5)))


class TestValidation:
    def test_pure_norm(self):
        with pytest.raises(InvalidStateError):
            PureState((2,), [1, 1])

    def test_pure_dims(self):
        with pytest.raises(DimensionError):
            PureState((2, 2), [1, 0])

    def test_density_trace(self):
        with pytest.raises(InvalidStateError):
            DensityMatrix((2,), np.eye(2))

    def test_density_psd(self):
        with pytest.raises(PositivityError):
            DensityMatrix((2,), np.diag([1.5, -0.5]))

    def test_structured_orthonormal(self):
        with pytest.raises(InvalidStateError):
            StructuredState((2,), [[1, 0], [1, 0]], [0.5, 0.5], 0.0)


class TestJson:
    def test_pure_roundtrip(self, tmp_path):
        path = tmp_path / "s.json"
        save_state(ghz_tilde(3), path)
        back = load_state(path)
        np.testing.assert_array_equal(back.amplitudes, ghz_tilde(3).amplitudes)
        assert back.dims == (2, 2, 2)

    def test_dense_roundtrip(self, tmp_path):
        path = tmp_path / "s.json"
        rho = densify(ghz_mixture(GhzMixtureParams(3, 0.4, 0.1)))
        save_state(rho, path)
        np.testing.assert_array_equal(load_state(path).matrix, rho.matrix)

    def test_structured_roundtrip(self, tmp_path):
        path = tmp_path / "s.json"
        s = dicke_noise(DickeNoiseParams(6, 0.3))
        save_state(s, path)
        back = load_state(path)
        np.testing.assert_array_equal(back.support, s.support)
        assert back.noise == s.noise

    def test_family_spec(self):
        s = state_from_json({"family": "ghz-mix", "n": 4, "p": 0.5, "q": 0.25})
        assert isinstance(s, StructuredState) and s.dims == (2,) * 4

    def test_format_layout(self):
        s = state_from_json({"dims": [2], "kind": "pure", "amplitudes": [[0, 0], [0, 1]]})
        np.testing.assert_array_equal(s.amplitudes, [0, 1j])
