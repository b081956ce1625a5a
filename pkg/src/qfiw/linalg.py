"""Dense complex linear algebra on tensor-product spaces.

Matrices are plain ``numpy`` complex arrays. Sites are numbered from 1 and
site 1 is the slowest-varying tensor index, i.e. ``kron(h1, h2, ..., hN)``
puts ``h1`` on site 1.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import reduce

import numba
import numpy as np

from .errors import (
    CapExceededError,
    ConvergenceError,
    DimensionError,
    EmptySubsetError,
    NotHermitianError,
)

# Tolerances shared by every module.
HERMITIAN_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-9
ORTHONORMAL_TOL = 1e-10
EIGENVALUE_ZERO = 1e-12
PSD_TOL = 1e-10
TRACE_TOL = 1e-12
BOUND_TOL = 1e-9

JACOBI_MAX_SWEEPS = 100
JACOBI_OFFDIAG_TOL = 1e-13
# Above this size cyclic Jacobi is too slow to be useful; "auto" hands off to LAPACK.
JACOBI_AUTO_MAX_DIM = 256

DEFAULT_DENSE_CAP = 2**12


def dense_cap() -> int:
    """Largest Hilbert-space dimension any operation will materialize densely.

    Overridable through the ``QFIW_DENSE_CAP`` environment variable.
    """
    raw = os.environ.get("QFIW_DENSE_CAP")
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        return int(raw)
    except ValueError:
        raise CapExceededError(f"QFIW_DENSE_CAP must be an integer, got {raw!r}") from None


def check_dense(dim: int, what: str = "operation") -> None:
    cap = dense_cap()
    if dim > cap:
        raise CapExceededError(f"{what} needs dimension {dim}, dense cap is {cap}")


def as_hermitian(matrix, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return ``matrix`` as a complex square array, checking Hermiticity."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise NotHermitianError(f"matrix deviates from its adjoint by {dev:.3e}")
    return m


def allclose(a, b, atol: float) -> bool:
    a = np.asarray(a)
    b = np.asarray(b)
    return a.shape == b.shape and bool(np.all(np.abs(a - b) <= atol))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in descending order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


@numba.njit(cache=True)
def _jacobi_kernel(a, max_sweeps, tol):
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            scale += abs(a[i, j]) ** 2
    scale = math.sqrt(scale)
    if scale == 0.0:
        return np.zeros(n), v, 0
    target = tol * scale
    skip = target / n
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += abs(a[i, j]) ** 2
        if math.sqrt(2.0 * off) <= target:
            d = np.empty(n)
            for i in range(n):
                d[i] = a[i, i].real
            return d, v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= skip:
                    continue
                # Phase-rotate column q so the pivot is real, then do a real rotation.
                ph = apq / mag
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * mag)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                phc = ph.conjugate()
                # A <- A U with U[p,p]=c, U[p,q]=s, U[q,p]=-s*conj(ph), U[q,q]=c*conj(ph)
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * phc * akq
                    a[k, q] = s * akp + c * phc * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * ph * aqk
                    a[q, k] = s * apk + c * ph * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * phc * vkq
                    v[k, q] = s * vkp + c * phc * vkq
    return np.zeros(n), v, -1


def eig_hermitian(
    h,
    *,
    method: str = "auto",
    max_sweeps: int = JACOBI_MAX_SWEEPS,
    tol: float = JACOBI_OFFDIAG_TOL,
) -> SpectralDecomposition:
    """Eigendecomposition of a Hermitian matrix.

    The default solver is cyclic complex Jacobi: the off-diagonal Frobenius
    norm must fall below ``tol`` times the matrix norm within ``max_sweeps``
    sweeps or :class:`ConvergenceError` is raised. ``method="auto"`` uses
    Jacobi up to dimension 256 and LAPACK (``numpy.linalg.eigh``) beyond.
    """
    m = as_hermitian(h)
    n = m.shape[0]
    if method == "auto":
        method = "jacobi" if n <= JACOBI_AUTO_MAX_DIM else "lapack"
    if method == "jacobi":
        work = np.ascontiguousarray(m, dtype=np.complex128).copy()
        # symmetrize exactly so the kernel only sees real diagonals
        work = 0.5 * (work + work.conj().T)
        vals, vecs, sweeps = _jacobi_kernel(work, max_sweeps, tol)
        if sweeps < 0:
            raise ConvergenceError(f"Jacobi did not converge within {max_sweeps} sweeps (n={n})")
    elif method == "lapack":
        vals, vecs = np.linalg.eigh(m)
        sweeps = 0
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    order = np.argsort(-vals, kind="stable")
    return SpectralDecomposition(vals[order], vecs[:, order], sweeps)


def kron(*ops) -> np.ndarray:
    """Tensor product, first argument on the slowest-varying index."""
    if not ops:
        raise DimensionError("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def embed_site(h, site: int, dims) -> np.ndarray:
    """``I ⊗ ... ⊗ h ⊗ ... ⊗ I`` with ``h`` on 1-based ``site``."""
    dims = list(dims)
    h = np.asarray(h, dtype=complex)
    if not 1 <= site <= len(dims):
        raise DimensionError(f"site {site} outside 1..{len(dims)}")
    if h.shape != (dims[site - 1], dims[site - 1]):
        raise DimensionError(f"operator shape {h.shape} does not fit site dimension {dims[site - 1]}")
    check_dense(int(np.prod(dims)), "embed_site")
    left = int(np.prod(dims[: site - 1]))
    right = int(np.prod(dims[site:]))
    return np.kron(np.kron(np.eye(left), h), np.eye(right))


def apply_local(op, vec, axis: int, dims) -> np.ndarray:
    """Apply a single-site operator to a state vector without forming the full matrix.

    ``axis`` is 0-based here.
    """
    dims = list(dims)
    left = math.prod(dims[:axis])
    right = math.prod(dims[axis + 1 :])
    d = dims[axis]
    psi = np.asarray(vec).reshape(left, d, right)
    out = np.zeros((left, d, right), dtype=np.result_type(op, psi))
    for a in range(d):
        for b in range(d):
            if op[a, b] != 0:
                out[:, a, :] += op[a, b] * psi[:, b, :]
    return out.reshape(-1)


def partial_trace(rho, keep, dims) -> np.ndarray:
    """Reduced matrix on the 1-based sites in ``keep`` (kept in ascending order)."""
    dims = [int(d) for d in dims]
    keep = sorted(set(keep))
    if not keep:
        raise EmptySubsetError("partial trace needs a nonempty subset to keep")
    n = len(dims)
    if keep[0] < 1 or keep[-1] > n:
        raise DimensionError(f"subset {keep} outside sites 1..{n}")
    rho = np.asarray(rho, dtype=complex)
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise DimensionError(f"matrix shape {rho.shape} does not match dims {dims}")
    if len(keep) == n:
        return rho.copy()
    kept_axes = [i - 1 for i in keep]
    traced = [i for i in range(n) if i not in kept_axes]
    t = rho.reshape(dims + dims)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise DimensionError("too many sites for partial_trace")
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in traced:
        col[i] = row[i]
    out = "".join(row[i] for i in kept_axes) + "".join(col[i] for i in kept_axes)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    dk = int(np.prod([dims[i] for i in kept_axes]))
    return red.reshape(dk, dk)
