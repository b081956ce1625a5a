"""Collective observables ``A = sum_i A_i`` built from anticommuting local operators.

Each site operator is ``A_i = sum_j a_ij A_i^(j)`` where the ``A_i^(j)`` pairwise
anticommute and square to at most the identity, and ``sum_j a_ij**2 = 1``.
Under those conditions ``A_alpha**2 <= n_alpha**2`` on any block of
``n_alpha`` sites, which is where the default bound caps come from.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import DimensionError, FormatError, InvalidOperatorSetError, ZeroVectorError
from .linalg import BOUND_TOL, PSD_TOL, apply_local, as_hermitian, check_dense, eig_hermitian, embed_site
from .states import PureState, decode_complex, encode_complex

COEFF_NORM_TOL = 1e-12

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
PAULI_AXES = {"x": (1.0, 0.0, 0.0), "y": (0.0, 1.0, 0.0), "z": (0.0, 0.0, 1.0)}


class CoefficientRenormalizedWarning(UserWarning):
    pass


def validate_anticommuting(ops, tol: float = PSD_TOL) -> tuple[bool, list[str]]:
    """Check pairwise anticommutation and ``op**2 <= I``.

    Returns ``(ok, problems)`` where ``problems`` lists every failed check.
    """
    mats = [as_hermitian(o) for o in ops]
    if len({m.shape for m in mats}) > 1:
        raise DimensionError("operators have different dimensions")
    problems = []
    for j, a in enumerate(mats):
        for jj in range(j + 1, len(mats)):
            b = mats[jj]
            dev = np.max(np.abs(a @ b + b @ a))
            if dev > tol:
                problems.append(f"ops {j} and {jj} do not anticommute (max |{{A,B}}| = {dev:.3g})")
        top = eig_hermitian(a @ a).eigenvalues[0]
        if top > 1 + tol:
            problems.append(f"op {j} squared has eigenvalue {top:.6g} > 1")
    return not problems, problems


def _unit(coeffs) -> np.ndarray:
    a = np.asarray(coeffs, dtype=float).reshape(-1)
    norm = float(np.sqrt(np.sum(a**2)))
    if norm == 0.0:
        raise ZeroVectorError("coefficient vector is zero")
    if abs(norm**2 - 1.0) > COEFF_NORM_TOL:
        warnings.warn(
            f"coefficients {a.tolist()} renormalized to unit length",
            CoefficientRenormalizedWarning,
            stacklevel=3,
        )
        a = a / norm
    return a


@dataclass(frozen=True)
class LocalOperatorSite:
    basis_ops: tuple
    coeffs: np.ndarray

    def __post_init__(self):
        ops = tuple(as_hermitian(o) for o in self.basis_ops)
        coeffs = np.asarray(self.coeffs, dtype=float).reshape(-1)
        if len(ops) != coeffs.size or not ops:
            raise DimensionError(f"{len(ops)} operators but {coeffs.size} coefficients")
        if abs(float(np.sum(coeffs**2)) - 1.0) > COEFF_NORM_TOL:
            raise InvalidOperatorSetError("coefficients must have unit sum of squares")
        ok, problems = validate_anticommuting(ops)
        if not ok:
            raise InvalidOperatorSetError("; ".join(problems))
        object.__setattr__(self, "basis_ops", ops)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def site_dim(self) -> int:
        return self.basis_ops[0].shape[0]

    @property
    def operator(self) -> np.ndarray:
        return sum(a * o for a, o in zip(self.coeffs, self.basis_ops))


def _is_pauli_site(site: LocalOperatorSite) -> bool:
    return len(site.basis_ops) == 3 and all(np.array_equal(a, b) for a, b in zip(site.basis_ops, PAULIS))


def pauli_site(coeffs) -> LocalOperatorSite:
    """Qubit site ``a_x X + a_y Y + a_z Z``; the direction is normalized (with a warning)."""
    return LocalOperatorSite(PAULIS, _unit(coeffs))


def custom_site(ops, coeffs) -> LocalOperatorSite:
    return LocalOperatorSite(tuple(ops), _unit(coeffs))


class CollectiveObservable:
    def __init__(self, sites):
        self.sites = tuple(sites)
        if not self.sites:
            raise DimensionError("an observable needs at least one site")
        self.local_ops = tuple(s.operator for s in self.sites)
        self.dims = tuple(s.site_dim for s in self.sites)
        self._all_pauli = all(_is_pauli_site(s) for s in self.sites)
        self._tables = None

    @classmethod
    def uniform_pauli(cls, n: int, axis="z") -> "CollectiveObservable":
        coeffs = PAULI_AXES[axis] if isinstance(axis, str) else axis
        site = pauli_site(coeffs)
        return cls([site] * n)

    @property
    def n_sites(self) -> int:
        return len(self.sites)

    def _subset(self, subset) -> list[int]:
        if subset is None:
            return list(range(1, self.n_sites + 1))
        subset = sorted(set(subset))
        if not subset or subset[0] < 1 or subset[-1] > self.n_sites:
            raise DimensionError(f"subset {subset} outside sites 1..{self.n_sites}")
        return subset

    def realize(self, subset=None) -> np.ndarray:
        """Dense ``A_alpha = sum_{i in alpha} A_i`` acting on the sites of ``alpha`` only."""
        subset = self._subset(subset)
        dims = [self.dims[i - 1] for i in subset]
        check_dense(math.prod(dims), "realize")
        return sum(embed_site(self.local_ops[i - 1], pos, dims) for pos, i in enumerate(subset, 1))

    def _pauli_tables(self):
        # Per Pauli site: flip partner index j ^ bit and the coefficient of psi[j ^ bit];
        # the sigma_z parts of all sites fold into one diagonal.
        if self._tables is None:
            n = self.n_sites
            idx = np.arange(2**n)
            diag = np.zeros(2**n)
            flips = []
            for i, site in enumerate(self.sites):
                ax, ay, az = site.coeffs
                bit = 1 << (n - 1 - i)
                z = 1.0 - 2.0 * ((idx & bit) != 0)
                diag += az * z
                if ax != 0 or ay != 0:
                    flips.append((idx ^ bit, ax - 1j * ay * z))
            self._tables = (diag, flips)
        return self._tables

    def apply(self, vec) -> np.ndarray:
        """Matrix-free ``A @ vec`` on the full space."""
        vec = np.asarray(vec, dtype=complex)
        if vec.size != math.prod(self.dims):
            raise DimensionError(f"vector of length {vec.size} for dims {self.dims}")
        if self._all_pauli:
            diag, flips = self._pauli_tables()
            out = diag * vec
            for partner, coeff in flips:
                out += coeff * vec[partner]
            return out
        out = np.zeros(vec.size, dtype=complex)
        for axis, op in enumerate(self.local_ops):
            out += apply_local(op, vec, axis, self.dims)
        return out

    def trace_moments(self) -> tuple[float, float]:
        """``(tr A, tr A^2)`` on the full space, from the local traces alone."""
        total = math.prod(self.dims)
        t1 = [np.trace(op).real for op in self.local_ops]
        t2 = [np.trace(op @ op).real for op in self.local_ops]
        tr_a = sum(t * total / d for t, d in zip(t1, self.dims))
        tr_a2 = sum(t * total / d for t, d in zip(t2, self.dims))
        for i, (ti, di) in enumerate(zip(t1, self.dims)):
            for j, (tj, dj) in enumerate(zip(t1, self.dims)):
                if i != j:
                    tr_a2 += ti * tj * total / (di * dj)
        return float(tr_a), float(tr_a2)

    def cap_violations(self, max_sites: int = 6) -> list[tuple[tuple[int, ...], float]]:
        """Subsets whose ``A_alpha**2`` has an eigenvalue above ``n_alpha**2``.

        Exhaustive over all nonempty subsets, so only run it for small N.
        """
        if self.n_sites > max_sites:
            raise DimensionError(f"cap check is exhaustive; limited to {max_sites} sites")
        bad = []
        for size in range(1, self.n_sites + 1):
            for subset in combinations(range(1, self.n_sites + 1), size):
                a = self.realize(subset)
                top = eig_hermitian(a @ a).eigenvalues[0]
                if top > size**2 + BOUND_TOL:
                    bad.append((subset, float(top)))
        return bad


def apply_collective(obs: CollectiveObservable, psi: PureState) -> np.ndarray:
    if tuple(psi.dims) != obs.dims:
        raise DimensionError(f"state dims {psi.dims} vs observable dims {obs.dims}")
    return obs.apply(psi.amplitudes)


# -- JSON observable files -----------------------------------------------------


def observable_from_json(data: dict) -> CollectiveObservable:
    try:
        entries = data["sites"]
    except (KeyError, TypeError):
        raise FormatError("observable file needs a 'sites' list") from None
    sites = []
    for entry in entries:
        if "ops" in entry:
            ops = [decode_complex(m) for m in entry["ops"]]
            sites.append(custom_site(ops, entry["coeffs"]))
        else:
            c = entry.get("coeffs", {})
            if not isinstance(c, dict):
                raise FormatError("Pauli site coeffs must be an object with x/y/z keys")
            sites.append(pauli_site([c.get("x", 0.0), c.get("y", 0.0), c.get("z", 0.0)]))
    return CollectiveObservable(sites)


def observable_to_json(obs: CollectiveObservable) -> dict:
    out = []
    for s in obs.sites:
        if _is_pauli_site(s):
            out.append({"coeffs": dict(zip("xyz", s.coeffs.tolist()))})
        else:
            out.append({"ops": [encode_complex(o) for o in s.basis_ops], "coeffs": s.coeffs.tolist()})
    return {"sites": out}
