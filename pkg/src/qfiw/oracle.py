"""Independent brute-force checks and seeded random instances.

Nothing here goes through :mod:`qfiw.qfi` or the structured families: the QFI
sum is a literal double loop over a LAPACK eigenbasis, and states are built
from dense matrices. Randomness comes from ``numpy.random.default_rng`` (PCG64),
so a seed reproduces the same instance on any platform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .criteria import BoundSpec, generic_bound, prod_bound, sep_bound
from .errors import CapExceededError
from .linalg import embed_site
from .observables import SIGMA_X, SIGMA_Z, CollectiveObservable
from .qfi import qfi_dense, qfi_structured
from .states import (
    DensityMatrix,
    DickeNoiseParams,
    GhzMixtureParams,
    PureState,
    densify,
    dicke_noise,
    ghz_mixture,
)

BRUTEFORCE_MAX_DIM = 1024
DICKE_ORACLE_MAX_N = 12


@dataclass(frozen=True)
class RandomSpec:
    dimension: int
    rank: int = 1
    seed: int = 0


def qfi_bruteforce(rho, a) -> float:
    rho = np.asarray(getattr(rho, "matrix", rho), dtype=complex)
    a = np.asarray(a, dtype=complex)
    d = rho.shape[0]
    if d > BRUTEFORCE_MAX_DIM:
        raise CapExceededError(f"brute-force QFI limited to dimension {BRUTEFORCE_MAX_DIM}")
    lam, vecs = np.linalg.eigh(rho)
    elems = vecs.conj().T @ a @ vecs
    total = 0.0
    for l in range(d):
        for lp in range(d):
            s = lam[l] + lam[lp]
            if s <= 1e-12:
                continue
            total += (lam[l] - lam[lp]) ** 2 / (2 * s) * abs(elems[l, lp]) ** 2
    return float(total)


def _haar_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return z / np.linalg.norm(z)


def random_pure(spec: RandomSpec, dims=None) -> PureState:
    rng = np.random.default_rng(spec.seed)
    return PureState(dims or (spec.dimension,), _haar_vector(rng, spec.dimension))


def random_density(spec: RandomSpec, dims=None) -> DensityMatrix:
    """Mixture of ``rank`` Haar-random pure states with Dirichlet weights."""
    rng = np.random.default_rng(spec.seed)
    weights = rng.dirichlet(np.ones(spec.rank)) if spec.rank > 1 else np.ones(1)
    rho = np.zeros((spec.dimension, spec.dimension), dtype=complex)
    for w in weights:
        v = _haar_vector(rng, spec.dimension)
        rho += w * np.outer(v, v.conj())
    rho = 0.5 * (rho + rho.conj().T)
    rho /= np.trace(rho).real
    return DensityMatrix(dims or (spec.dimension,), rho)


def random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (x + x.conj().T) / 2


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    x = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(x)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_partition(rng: np.random.Generator, n: int, max_part: int) -> list[list[int]]:
    """Random set partition of sites ``1..n`` with blocks of at most ``max_part`` sites."""
    sites = list(rng.permutation(np.arange(1, n + 1)))
    blocks = []
    while sites:
        size = int(rng.integers(1, min(max_part, len(sites)) + 1))
        blocks.append(sorted(int(s) for s in sites[:size]))
        sites = sites[size:]
    return blocks


def product_over_blocks(blocks, block_states, n: int) -> np.ndarray:
    """Place qubit block states on arbitrary site subsets and return the full amplitude vector."""
    psi = np.ones(1, dtype=complex)
    order = []
    for block, vec in zip(blocks, block_states):
        psi = np.kron(psi, vec)
        order.extend(block)
    # axis j of the tensor currently holds site order[j]
    t = psi.reshape((2,) * n)
    t = np.transpose(t, np.argsort(order))
    return t.reshape(-1)


def random_kproducible(n: int, k: int, seed: int) -> tuple[PureState, list[list[int]]]:
    """Pure qubit state factorizing over a random partition with blocks of at most ``k`` sites."""
    rng = np.random.default_rng(seed)
    blocks = random_partition(rng, n, k)
    vecs = [_haar_vector(rng, 2 ** len(b)) for b in blocks]
    amps = product_over_blocks(blocks, vecs, n)
    return PureState((2,) * n, amps), blocks


def collective_dense(local_ops, dims) -> np.ndarray:
    return sum(embed_site(op, i, dims) for i, op in enumerate(local_ops, 1))


def dicke_bruteforce(n: int, m: int) -> PureState:
    amps = np.zeros(2**n, dtype=complex)
    hits = [j for j in range(2**n) if bin(j).count("1") == m]
    amps[hits] = 1 / math.sqrt(len(hits))
    return PureState((2,) * n, amps)


def dicke_variance_bruteforce(n: int, m: int) -> float:
    """Dense ``<S_x^2> - <S_x>^2`` of the Dicke state, with ``S_x = sum_i sigma_x``."""
    if n > DICKE_ORACLE_MAX_N:
        raise CapExceededError(f"dense Dicke oracle limited to n <= {DICKE_ORACLE_MAX_N}")
    psi = dicke_bruteforce(n, m).amplitudes
    sx = sum(
        sparse.kron(sparse.kron(sparse.identity(2 ** (i - 1)), SIGMA_X), sparse.identity(2 ** (n - i)))
        for i in range(1, n + 1)
    )
    w = sx @ psi
    return float(np.vdot(w, w).real - np.vdot(psi, w).real ** 2)


def ghz_mixture_dense(n: int, p: float, q: float) -> np.ndarray:
    """The three-term GHZ mixture written out literally."""
    d = 2**n
    g = np.zeros(d, dtype=complex)
    gt = np.zeros(d, dtype=complex)
    g[0] = g[-1] = 1 / math.sqrt(2)
    gt[0] = 1 / math.sqrt(2)
    gt[-1] = -1j / math.sqrt(2)
    return (1 - p) * np.outer(g, g.conj()) + q * np.outer(gt, gt.conj()) + (p - q) / d * np.eye(d)


def dicke_noise_dense(n: int, p: float) -> np.ndarray:
    rest = dicke_bruteforce(n - 1, n // 2 - 1).amplitudes
    chi = np.kron(np.array([0, 1], dtype=complex), rest)
    return p * np.outer(chi, chi.conj()) + (1 - p) / 2**n * np.eye(2**n)


def sigma_z_collective(n: int) -> np.ndarray:
    return collective_dense([SIGMA_Z] * n, (2,) * n)


def sigma_x_collective(n: int) -> np.ndarray:
    return collective_dense([SIGMA_X] * n, (2,) * n)


# -- self test -------------------------------------------------------------------


@dataclass
class CheckReport:
    name: str
    failures: list[str]
    count: int
    worst: float

    @property
    def ok(self) -> bool:
        return not self.failures


ORACLE_TOL = 1e-9


def selftest(count: int = 50, seed: int = 2024) -> list[CheckReport]:
    """Compare every fast path against its oracle; one report per comparison family."""
    reports = []

    fails, worst = [], 0.0
    for i in range(count):
        s = seed + i
        rng = np.random.default_rng(s)
        d = int(rng.integers(2, 65))
        rank = int(rng.integers(1, d + 1))
        rho = random_density(RandomSpec(d, rank, s))
        a = random_hermitian(rng, d)
        diff = abs(qfi_dense(rho, a).value - qfi_bruteforce(rho, a))
        worst = max(worst, diff)
        if diff > ORACLE_TOL:
            fails.append(f"seed={s} d={d} rank={rank} |diff|={diff:.3e}")
    reports.append(CheckReport("qfi_dense vs brute force", fails, count, worst))

    fails, worst, checked = [], 0.0, 0
    for n in range(2, 7):
        obs = CollectiveObservable.uniform_pauli(n, "z")
        az = sigma_z_collective(n)
        for p in np.linspace(0, 1, 5):
            for q in np.linspace(0, p, 5):
                fast = qfi_structured(ghz_mixture(GhzMixtureParams(n, float(p), float(q))), obs).value
                slow = qfi_bruteforce(ghz_mixture_dense(n, p, q), az)
                diff = abs(fast - slow)
                worst = max(worst, diff)
                checked += 1
                if diff > ORACLE_TOL:
                    fails.append(f"ghz-mix n={n} p={p:.3f} q={q:.3f} |diff|={diff:.3e}")
    reports.append(CheckReport("structured vs dense: ghz-mix", fails, checked, worst))

    fails, worst, checked = [], 0.0, 0
    for n in range(2, 7):
        obs = CollectiveObservable.uniform_pauli(n, "x")
        ax = sigma_x_collective(n)
        for p in np.linspace(0, 1, 10):
            fast = qfi_structured(dicke_noise(DickeNoiseParams(n, float(p))), obs).value
            slow = qfi_bruteforce(dicke_noise_dense(n, p), ax)
            diff = abs(fast - slow)
            worst = max(worst, diff)
            checked += 1
            if diff > ORACLE_TOL:
                fails.append(f"dicke-noise n={n} p={p:.3f} |diff|={diff:.3e}")
            dens = densify(dicke_noise(DickeNoiseParams(n, float(p)))).matrix
            if np.max(np.abs(dens - dicke_noise_dense(n, p))) > 1e-12:
                fails.append(f"dicke-noise n={n} p={p:.3f} densify mismatch")
    reports.append(CheckReport("structured vs dense: dicke-noise", fails, checked, worst))

    fails, checked = [], 0
    for n in range(1, DICKE_ORACLE_MAX_N + 1):
        for m in range(n + 1):
            got = dicke_variance_bruteforce(n, m)
            checked += 1
            if abs(got - (n + 2 * m * (n - m))) > 1e-8:
                fails.append(f"dicke variance n={n} m={m}: {got} vs {n + 2 * m * (n - m)}")
    reports.append(CheckReport("Dicke variance n + 2m(n-m)", fails, checked, 0.0))

    fails, checked = [], 0
    for n in range(2, 13):
        for k in range(1, n + 1):
            for mode in ("paper", "conservative"):
                if k >= 2:
                    checked += 1
                    if generic_bound(BoundSpec(n, k, "sep", mode)) != sep_bound(n, k, mode):
                        fails.append(f"sep_bound n={n} k={k} mode={mode}")
                if k <= n - 1:
                    checked += 1
                    if generic_bound(BoundSpec(n, k, "prod", mode)) != prod_bound(n, k, mode):
                        fails.append(f"prod_bound n={n} k={k} mode={mode}")
    reports.append(CheckReport("closed-form bounds vs enumeration", fails, checked, 0.0))
    return reports
