"""Pure states, density matrices and the two noisy families used as worked examples.

The noisy families are carried as :class:`StructuredState`: a few orthonormal
support vectors with their eigenvalues plus one isotropic noise eigenvalue on
the orthogonal complement. That is exact and never needs a ``2**N`` square
matrix, which is what makes the 16-qubit Dicke family tractable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import DimensionError, FormatError, InvalidStateError, PositivityError
from .linalg import (
    ORTHONORMAL_TOL,
    PSD_TOL,
    TRACE_TOL,
    as_hermitian,
    check_dense,
    eig_hermitian,
)

NORM_TOL = 1e-12
WEIGHT_SUM_TOL = 1e-12


def _dims(dims) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"site dimensions must be positive, got {dims}")
    return dims


@dataclass(frozen=True)
class PureState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = _dims(self.dims)
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != math.prod(dims):
            raise DimensionError(f"{amps.size} amplitudes for dims {dims}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state has squared norm {norm2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def projector(self) -> np.ndarray:
        check_dense(self.dim, "pure-state projector")
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def to_density(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, self.projector(), validate=False)


class DensityMatrix:
    """Trace-one positive semidefinite Hermitian matrix on ``prod(dims)``."""

    def __init__(self, dims, matrix, *, validate: bool = True):
        self.dims = _dims(dims)
        m = as_hermitian(matrix)
        if m.shape[0] != math.prod(self.dims):
            raise DimensionError(f"matrix of size {m.shape[0]} for dims {self.dims}")
        if validate:
            tr = np.trace(m).real
            if abs(tr - 1.0) > TRACE_TOL:
                raise InvalidStateError(f"trace is {tr!r}, expected 1")
            lam_min = eig_hermitian(m).eigenvalues[-1]
            if lam_min < -PSD_TOL:
                raise PositivityError(f"minimum eigenvalue {lam_min:.3e} is negative")
        m.setflags(write=False)
        self.matrix = m

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def __repr__(self):
        return f"DensityMatrix(dims={self.dims})"


@dataclass(frozen=True)
class StructuredState:
    """``sum_r weights[r] |support[r]><support[r]| + noise * (I - P_support)``.

    ``support`` holds the orthonormal vectors as rows.
    """

    dims: tuple[int, ...]
    support: np.ndarray
    weights: np.ndarray
    noise: float

    def __post_init__(self):
        dims = _dims(self.dims)
        total = math.prod(dims)
        sup = np.atleast_2d(np.asarray(self.support, dtype=complex))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if sup.shape[1] != total or sup.shape[0] != w.size:
            raise DimensionError(f"support shape {sup.shape} / weights {w.size} do not match dims {dims}")
        gram = sup.conj() @ sup.T
        if np.max(np.abs(gram - np.eye(w.size))) > ORTHONORMAL_TOL:
            raise InvalidStateError("support vectors are not orthonormal")
        c = float(self.noise)
        if np.any(w < 0) or c < 0:
            raise PositivityError("weights and noise level must be nonnegative")
        s = w.sum() + c * (total - w.size)
        if abs(s - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidStateError(f"weights sum to {s!r}, expected 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "noise", c)

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    @property
    def rank(self) -> int:
        return self.weights.size

    @classmethod
    def from_pure(cls, psi: PureState) -> "StructuredState":
        return cls(psi.dims, psi.amplitudes[None, :], np.array([1.0]), 0.0)


# -- basic states ----------------------------------------------------------


def basis_state(bits, dims=None) -> PureState:
    bits = [int(b) for b in bits]
    dims = _dims(dims) if dims is not None else (2,) * len(bits)
    amps = np.zeros(math.prod(dims), dtype=complex)
    amps[np.ravel_multi_index(bits, dims)] = 1.0
    return PureState(dims, amps)


def ghz(n: int) -> PureState:
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1 / math.sqrt(2)
    return PureState((2,) * n, amps)


def ghz_tilde(n: int) -> PureState:
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = 1 / math.sqrt(2)
    amps[-1] = -1j / math.sqrt(2)
    return PureState((2,) * n, amps)


@lru_cache(maxsize=64)
def dicke(n: int, m: int) -> PureState:
    """Equal superposition of the ``C(n, m)`` bit strings with ``m`` ones."""
    if not 0 <= m <= n:
        raise InvalidStateError(f"need 0 <= m <= n, got n={n}, m={m}")
    amps = np.zeros(2**n, dtype=complex)
    weight = 1 / math.sqrt(math.comb(n, m))
    for ones in combinations(range(n), m):
        # site 1 is the most significant bit
        amps[sum(1 << (n - 1 - i) for i in ones)] = weight
    return PureState((2,) * n, amps)


@lru_cache(maxsize=16)
def chi_state(n: int = 16) -> PureState:
    """``|1> ⊗ dicke(n-1, n//2 - 1)``; for n=16 this is |1>|D_15^7>."""
    if n < 2:
        raise InvalidStateError("chi_state needs at least 2 qubits")
    rest = dicke(n - 1, n // 2 - 1).amplitudes
    return PureState((2,) * n, np.concatenate([np.zeros_like(rest), rest]))


# -- families --------------------------------------------------------------


@dataclass(frozen=True)
class GhzMixtureParams:
    n: int = 8
    p: float = 0.0
    q: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise InvalidStateError("n must be positive")
        if not 0.0 <= self.p <= 1.0 or self.q < 0.0:
            raise InvalidStateError(f"need 0 <= q <= p <= 1, got p={self.p}, q={self.q}")
        if self.q > self.p:
            raise PositivityError(f"q={self.q} > p={self.p} makes the state non-positive")


@dataclass(frozen=True)
class DickeNoiseParams:
    n: int = 16
    p: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise InvalidStateError("n must be at least 2")
        if not 0.0 <= self.p <= 1.0:
            raise InvalidStateError(f"need 0 <= p <= 1, got p={self.p}")


def ghz_mixture(params: GhzMixtureParams) -> StructuredState:
    """``(1-p)|G><G| + q|G~><G~| + (p-q)/2**N * I`` on N qubits."""
    n, p, q = params.n, params.p, params.q
    c = (p - q) / 2**n
    # both pure terms live in span{|0..0>, |1..1>}; the noise share inside it joins the block
    g = np.array([1, 1], dtype=complex) / math.sqrt(2)
    gt = np.array([1, -1j], dtype=complex) / math.sqrt(2)
    block = (1 - p) * np.outer(g, g.conj()) + q * np.outer(gt, gt.conj()) + c * np.eye(2)
    spec = eig_hermitian(block)
    support = np.zeros((2, 2**n), dtype=complex)
    support[:, 0] = spec.eigenvectors[0, :]
    support[:, -1] = spec.eigenvectors[1, :]
    weights = np.clip(spec.eigenvalues, 0.0, None)
    return StructuredState((2,) * n, support, weights, c)


def dicke_noise(params: DickeNoiseParams) -> StructuredState:
    """``p|chi><chi| + (1-p)/2**n * I``."""
    n, p = params.n, params.p
    c = (1 - p) / 2**n
    chi = chi_state(n)
    return StructuredState(chi.dims, chi.amplitudes[None, :], np.array([p + c]), c)


FAMILIES = {
    "ghz-mix": lambda n, p, q=0.0: ghz_mixture(GhzMixtureParams(n, p, q)),
    "dicke-noise": lambda n, p, q=None: dicke_noise(DickeNoiseParams(n, p)),
}


def family_state(name: str, n: int, p: float, q: float = 0.0) -> StructuredState:
    try:
        build = FAMILIES[name]
    except KeyError:
        raise FormatError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return build(n, p, q)


def densify(s: StructuredState | PureState) -> DensityMatrix:
    """Materialize the full matrix, subject to the dense cap."""
    if isinstance(s, PureState):
        s = StructuredState.from_pure(s)
    check_dense(s.dim, "densify")
    sup = s.support
    proj = sup.T @ sup.conj()
    rho = (sup.T * s.weights) @ sup.conj() + s.noise * (np.eye(s.dim) - proj)
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(s.dims, rho)


# -- JSON state files --------------------------------------------------------


def encode_complex(arr) -> list:
    arr = np.asarray(arr, dtype=complex)
    return np.stack([arr.real, arr.imag], axis=-1).tolist()


def decode_complex(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape[-1] != 2:
        raise FormatError("complex entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def state_to_json(state) -> dict:
    if isinstance(state, PureState):
        return {"dims": list(state.dims), "kind": "pure", "amplitudes": encode_complex(state.amplitudes)}
    if isinstance(state, DensityMatrix):
        return {"dims": list(state.dims), "kind": "dense", "matrix": encode_complex(state.matrix)}
    if isinstance(state, StructuredState):
        return {
            "dims": list(state.dims),
            "kind": "structured",
            "support": encode_complex(state.support),
            "weights": state.weights.tolist(),
            "noise": state.noise,
        }
    raise FormatError(f"cannot serialize {type(state).__name__}")


def state_from_json(data: dict):
    """Parse a state file: a ``pure``/``dense``/``structured`` state or a family spec."""
    if "family" in data:
        try:
            return family_state(data["family"], int(data["n"]), float(data["p"]), float(data.get("q", 0.0)))
        except KeyError as exc:
            raise FormatError(f"family spec missing field {exc}") from None
    try:
        dims = data["dims"]
        kind = data["kind"]
        if kind == "pure":
            return PureState(dims, decode_complex(data["amplitudes"]))
        if kind == "dense":
            return DensityMatrix(dims, decode_complex(data["matrix"]))
        if kind == "structured":
            return StructuredState(dims, decode_complex(data["support"]), data["weights"], data["noise"])
    except KeyError as exc:
        raise FormatError(f"state file missing field {exc}") from None
    raise FormatError(f"unknown state kind {kind!r}")


def load_state(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: {exc}") from None
    return state_from_json(data)


def save_state(state, path) -> None:
    Path(path).write_text(json.dumps(state_to_json(state)))
