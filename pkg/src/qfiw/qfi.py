"""Variance and quantum Fisher information.

Normalization: ``F(rho, A) = sum_{l,l'} (lam_l - lam_l')**2 / (2 (lam_l + lam_l')) |<l|A|l'>|**2``,
so ``F`` equals the variance on pure states (a quarter of the other common
convention). Pairs with ``lam_l + lam_l' <= 1e-12`` are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapExceededError, DimensionError
from .linalg import EIGENVALUE_ZERO, as_hermitian, check_dense, eig_hermitian
from .observables import CollectiveObservable
from .states import DensityMatrix, PureState, StructuredState

STRUCTURED_RANK_CAP = 16


@dataclass(frozen=True)
class QfiResult:
    value: float
    method: str
    term_count: int

    def __float__(self):
        return self.value


def _dense_operator(a, dim: int) -> np.ndarray:
    if isinstance(a, CollectiveObservable):
        check_dense(dim, "dense observable")
        a = a.realize()
    a = as_hermitian(a)
    if a.shape[0] != dim:
        raise DimensionError(f"observable of size {a.shape[0]} for state of size {dim}")
    return a


def _apply(a, vec) -> np.ndarray:
    if isinstance(a, CollectiveObservable):
        return a.apply(vec)
    return a @ vec


def variance(state, a) -> float:
    """``tr(rho A^2) - tr(rho A)^2``.

    Pure and structured states only ever need ``A|v>`` on a few vectors.
    """
    if isinstance(state, PureState):
        if not isinstance(a, CollectiveObservable):
            a = _dense_operator(a, state.dim)
        elif a.dims != state.dims:
            raise DimensionError(f"observable dims {a.dims} vs state dims {state.dims}")
        psi = state.amplitudes
        w = _apply(a, psi)
        return float(np.vdot(w, w).real - np.vdot(psi, w).real ** 2)
    if isinstance(state, StructuredState):
        return _structured_variance(state, a)
    rho = state.matrix
    m = _dense_operator(a, rho.shape[0])
    mean = np.trace(rho @ m).real
    return float(np.trace(rho @ m @ m).real - mean**2)


def _structured_variance(s: StructuredState, a) -> float:
    # tr(rho X) = sum_r mu_r <v_r|X|v_r> + c (tr X - sum_r <v_r|X|v_r>)
    if isinstance(a, CollectiveObservable):
        if a.dims != s.dims:
            raise DimensionError(f"observable dims {a.dims} vs state dims {s.dims}")
        tr_a, tr_a2 = a.trace_moments()
    else:
        a = _dense_operator(a, s.dim)
        tr_a, tr_a2 = np.trace(a).real, np.trace(a @ a).real
    images = np.array([_apply(a, v) for v in s.support])
    first = np.einsum("ri,ri->r", s.support.conj(), images).real
    second = np.sum(np.abs(images) ** 2, axis=1)
    mean = float(s.weights @ first + s.noise * (tr_a - first.sum()))
    mean_sq = float(s.weights @ second + s.noise * (tr_a2 - second.sum()))
    return mean_sq - mean**2


def qfi_dense(rho: DensityMatrix, a) -> QfiResult:
    """Spectral-sum QFI from a full eigendecomposition of ``rho``."""
    check_dense(rho.dim, "qfi_dense")
    m = _dense_operator(a, rho.dim)
    spec = eig_hermitian(rho.matrix)
    lam = spec.eigenvalues
    v = spec.eigenvectors
    elems = v.conj().T @ m @ v
    total = lam[:, None] + lam[None, :]
    keep = total > EIGENVALUE_ZERO
    weight = np.zeros_like(total)
    diff = lam[:, None] - lam[None, :]
    weight[keep] = diff[keep] ** 2 / (2 * total[keep])
    value = float(np.sum(weight * np.abs(elems) ** 2))
    return QfiResult(value, "dense", int(np.count_nonzero(keep)))


def qfi_structured(s: StructuredState, a) -> QfiResult:
    """Exact QFI of a low-rank-plus-isotropic state.

    Support/support pairs are summed directly. Each support vector also pairs
    with the whole noise eigenspace; that block collapses to
    ``(mu - c)**2 / (mu + c) * (<v|A^2|v> - sum_r' |<v_r'|A|v>|**2)``. Pairs
    inside the degenerate noise eigenspace contribute nothing.
    """
    if s.rank > STRUCTURED_RANK_CAP:
        raise CapExceededError(f"support rank {s.rank} exceeds {STRUCTURED_RANK_CAP}")
    if isinstance(a, CollectiveObservable) and a.dims != s.dims:
        raise DimensionError(f"observable dims {a.dims} vs state dims {s.dims}")
    if not isinstance(a, CollectiveObservable):
        a = _dense_operator(a, s.dim)
    mu = s.weights
    c = s.noise
    images = np.array([_apply(a, v) for v in s.support])  # rows: A|v_r>
    elems = s.support.conj() @ images.T  # elems[r', r] = <v_r'|A|v_r>
    sq_norms = np.sum(np.abs(images) ** 2, axis=1)  # <v_r|A^2|v_r>

    value = 0.0
    terms = 0
    for r in range(s.rank):
        for rp in range(s.rank):
            tot = mu[r] + mu[rp]
            if r == rp or tot <= EIGENVALUE_ZERO:
                continue
            value += (mu[r] - mu[rp]) ** 2 / (2 * tot) * abs(elems[rp, r]) ** 2
            terms += 1
    leak = sq_norms - np.sum(np.abs(elems) ** 2, axis=0)
    for r in range(s.rank):
        tot = mu[r] + c
        if tot <= EIGENVALUE_ZERO:
            continue
        value += (mu[r] - c) ** 2 / tot * max(leak[r], 0.0)
        terms += 2 * (s.dim - s.rank)
    return QfiResult(float(value), "structured", terms)


def qfi(state, a) -> QfiResult:
    """Pick the structured path for pure and structured states, dense otherwise."""
    if isinstance(state, PureState):
        return qfi_structured(StructuredState.from_pure(state), a)
    if isinstance(state, StructuredState):
        return qfi_structured(state, a)
    if isinstance(state, DensityMatrix):
        return qfi_dense(state, a)
    raise TypeError(f"unsupported state type {type(state).__name__}")
