"""Detection thresholds along one-parameter families and (p, q) grid scans."""

from __future__ import annotations

import csv
import io
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .criteria import PRODUCIBILITY, BoundSpec, verdict
from .errors import NoSignChangeError
from .observables import CollectiveObservable
from .qfi import qfi
from .states import DickeNoiseParams, GhzMixtureParams, dicke_noise, ghz_mixture

BISECT_TOL = 1e-8
PRESAMPLES = 16

# Published Dicke-noise thresholds p_k, k = 1..10.
PAPER_P_K = (0.1245, 0.1401, 0.1712, 0.2179, 0.2802, 0.3580, 0.4513, 0.5603, 0.7003, 0.8560)


def fmt(x) -> str:
    return f"{x:.10g}"


class NonMonotoneWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ThresholdResult:
    k: int
    criterion: str
    bound: float
    p_star: float
    iterations: int
    residual: float


def threshold_bisect(
    family,
    observable,
    spec: BoundSpec,
    interval=(0.0, 1.0),
    *,
    bound: float | None = None,
    tol: float = BISECT_TOL,
) -> ThresholdResult:
    """Bisect for the parameter where ``F(family(p))`` crosses the bound.

    ``family`` maps a parameter value to a state. The endpoints must bracket
    the crossing; an endpoint sitting on the bound is returned as is.
    """
    if bound is None:
        bound = float(spec.closed_form())

    def g(p: float) -> float:
        return qfi(family(p), observable).value - bound

    lo, hi = map(float, interval)
    samples = [g(p) for p in np.linspace(lo, hi, PRESAMPLES)]
    diffs = np.diff(samples)
    if np.any(diffs > 1e-12) and np.any(diffs < -1e-12):
        warnings.warn("F - bound is not monotone on the interval", NonMonotoneWarning, stacklevel=2)
    g_lo, g_hi = samples[0], samples[-1]
    res_tol = 1e-6 * max(1.0, abs(bound))
    if abs(g_lo) <= res_tol:
        return ThresholdResult(spec.k, spec.criterion, bound, lo, 0, abs(g_lo))
    if abs(g_hi) <= res_tol:
        return ThresholdResult(spec.k, spec.criterion, bound, hi, 0, abs(g_hi))
    if (g_lo > 0) == (g_hi > 0):
        raise NoSignChangeError(
            f"F - bound has the same sign at both ends of [{lo}, {hi}] ({g_lo:.6g}, {g_hi:.6g})"
        )
    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = g(mid)
        iterations += 1
        if (g_mid > 0) == (g_lo > 0):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    p_star = 0.5 * (lo + hi)
    return ThresholdResult(spec.k, spec.criterion, bound, p_star, iterations, abs(g(p_star)))


def dicke_threshold(n: int = 16, k: int = 1, mode: str = "paper", axis="x") -> ThresholdResult:
    obs = CollectiveObservable.uniform_pauli(n, axis)
    spec = BoundSpec(n, k, PRODUCIBILITY, mode)
    return threshold_bisect(lambda p: dicke_noise(DickeNoiseParams(n, p)), obs, spec)


def ghz_threshold(n: int = 8, k: int = 3, q: float = 0.0, criterion="sep", mode="paper", axis="z"):
    """Crossing along the line of fixed ``q`` (``p`` runs from ``q`` to 1)."""
    obs = CollectiveObservable.uniform_pauli(n, axis)
    spec = BoundSpec(n, k, criterion, mode)
    return threshold_bisect(lambda p: ghz_mixture(GhzMixtureParams(n, p, q)), obs, spec, (q, 1.0))


@dataclass(frozen=True)
class TableRow:
    result: ThresholdResult
    paper_p_k: float | None

    @property
    def rel_diff(self) -> float | None:
        if self.paper_p_k is None:
            return None
        return (self.result.p_star - self.paper_p_k) / self.paper_p_k


def table_one(k_max: int = 10, n: int = 16, mode: str = "paper") -> list[TableRow]:
    rows = []
    for k in range(1, k_max + 1):
        paper = PAPER_P_K[k - 1] if n == 16 and k <= len(PAPER_P_K) else None
        rows.append(TableRow(dicke_threshold(n, k, mode), paper))
    return rows


def table_csv(rows: list[TableRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "bound", "p_star", "paper_p_k", "rel_diff"])
    for row in rows:
        r = row.result
        w.writerow([
            r.k,
            fmt(r.bound),
            fmt(r.p_star),
            "" if row.paper_p_k is None else fmt(row.paper_p_k),
            "" if row.rel_diff is None else fmt(row.rel_diff),
        ])
    return buf.getvalue()


@dataclass(frozen=True)
class GridRow:
    p: float
    q: float
    f: float | None
    detected: bool | None  # None marks a point outside q <= p


@dataclass
class SweepGrid:
    spec: BoundSpec
    bound: float
    p_values: np.ndarray
    q_values: np.ndarray
    rows: list[GridRow] = field(default_factory=list)

    def detected_mask(self) -> np.ndarray:
        """``mask[iq, ip]`` is True where the point is valid and detected."""
        mask = np.zeros((self.q_values.size, self.p_values.size), dtype=bool)
        for idx, row in enumerate(self.rows):
            iq, ip = divmod(idx, self.p_values.size)
            mask[iq, ip] = bool(row.detected)
        return mask

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["p", "q", "F", "bound", "k", "criterion", "mode", "detected"])
        for row in self.rows:
            if row.detected is None:
                w.writerow([fmt(row.p), fmt(row.q), "", fmt(self.bound), self.spec.k,
                            self.spec.criterion, self.spec.mode, "invalid"])
            else:
                w.writerow([fmt(row.p), fmt(row.q), fmt(row.f), fmt(self.bound), self.spec.k,
                            self.spec.criterion, self.spec.mode, str(row.detected).lower()])
        return buf.getvalue()


def scan_grid(
    n: int,
    spec: BoundSpec,
    resolution: int = 200,
    *,
    observable: CollectiveObservable | None = None,
    p_range=(0.0, 1.0),
    q_range=(0.0, 1.0),
    workers: int = 1,
) -> SweepGrid:
    """Evaluate the GHZ mixture on a ``resolution x resolution`` grid.

    Rows are ordered q-major then p, independent of ``workers``.
    """
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    obs = observable or CollectiveObservable.uniform_pauli(n, "z")
    bound = float(spec.closed_form())
    ps = np.linspace(*p_range, resolution)
    qs = np.linspace(*q_range, resolution)

    def point(pq) -> GridRow:
        p, q = pq
        if q > p:
            return GridRow(float(p), float(q), None, None)
        f = qfi(ghz_mixture(GhzMixtureParams(n, float(p), float(q))), obs).value
        return GridRow(float(p), float(q), f, verdict(f, spec, bound).detected)

    points = [(p, q) for q in qs for p in ps]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(point, points))
    else:
        rows = [point(pq) for pq in points]
    return SweepGrid(spec, bound, ps, qs, rows)
