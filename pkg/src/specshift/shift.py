"""The spectral shift function, the trace formula that pairs it with f', and
the path machinery connecting it to eigenvalue flow along A + tK.

The shift function of a matrix pair is the difference of eigenvalue counting
functions xi(s) = #{a_j > s} - #{b_j > s}: piecewise constant, integer-valued,
compactly supported, and satisfying trace(f(A) - f(B)) = int f'(s) xi(s) ds.
The measures nu_t put weight <phi_j, K phi_j> at each eigenvalue of A + tK;
their average over t in [0, 1] has density -xi.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .doi_engine import delta_f
from .funcat import ScalarFunction
from .linalg import DomainError, as_hermitian, eigh, trace

__all__ = [
    "StepFunction",
    "AtomicSignedMeasure",
    "DensityEstimate",
    "xi_from_eigs",
    "trace_formula_rhs",
    "TraceFormulaReport",
    "trace_formula_check",
    "nu_t",
    "HellmannFeynmanReport",
    "hellmann_feynman_check",
    "nu_integrated",
    "NuXiReport",
    "nu_vs_xi_check",
    "translation_scan",
]


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function: values[i] holds on (breakpoints[i-1], breakpoints[i]).

    values has one entry per open interval plus the two unbounded tails, so
    len(values) == len(breakpoints) + 1. Compact support means both tails are 0.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.asarray(self.breakpoints, dtype=float)
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)
        if vals.size != bp.size + 1:
            raise ValueError("need one value per interval plus two tails")
        if bp.size >= 2 and not np.all(np.diff(bp) > 0):
            raise ValueError("breakpoints must be strictly increasing")

    def __call__(self, s: float) -> float:
        return float(self.values[np.searchsorted(self.breakpoints, s, side="left")])

    def integral(self) -> float:
        """Integral over the line (the tails are zero by construction)."""
        widths = np.diff(self.breakpoints)
        return float(np.dot(self.values[1:-1], widths)) if widths.size else 0.0

    def integral_on(self, lo: float, hi: float) -> float:
        """Exact integral over [lo, hi]."""
        if hi <= lo:
            return 0.0
        cuts = np.concatenate([[lo], self.breakpoints[(self.breakpoints > lo) & (self.breakpoints < hi)], [hi]])
        mids = (cuts[:-1] + cuts[1:]) / 2
        return float(sum(self(m) * (b - a) for a, b, m in zip(cuts[:-1], cuts[1:], mids)))

    def mean_on(self, lo: float, hi: float) -> float:
        return self.integral_on(lo, hi) / (hi - lo)


@dataclass(frozen=True)
class AtomicSignedMeasure:
    """Finitely many atoms (location, real weight)."""

    locations: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        loc = np.asarray(self.locations, dtype=float)
        wts = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "weights", wts)
        if loc.shape != wts.shape:
            raise ValueError("locations and weights must align")
        if not (np.all(np.isfinite(loc)) and np.all(np.isfinite(wts))):
            raise ValueError("atoms must be finite")

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    @property
    def total_variation(self) -> float:
        return float(np.abs(self.weights).sum())


@dataclass(frozen=True)
class DensityEstimate:
    """Histogram density on uniform bins."""

    bin_edges: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.bin_edges, dtype=float)
        dens = np.asarray(self.densities, dtype=float)
        object.__setattr__(self, "bin_edges", edges)
        object.__setattr__(self, "densities", dens)
        if dens.size != edges.size - 1:
            raise ValueError("need one density per bin")

    def mass(self) -> float:
        return float(np.dot(self.densities, np.diff(self.bin_edges)))


def xi_from_eigs(eigs_a, eigs_b) -> StepFunction:
    """Spectral shift function of a pair from their eigenvalue lists:
    xi(s) = #{a_j > s} - #{b_j > s}."""
    a = np.sort(np.asarray(eigs_a, dtype=float))
    b = np.sort(np.asarray(eigs_b, dtype=float))
    if a.shape != b.shape:
        raise ValueError(f"eigenvalue lists must match in length: {a.size} vs {b.size}")
    bp = np.unique(np.concatenate([a, b]))
    probes = np.concatenate([bp[:1] - 1.0, (bp[:-1] + bp[1:]) / 2, bp[-1:] + 1.0])
    counts_a = a.size - np.searchsorted(a, probes, side="right")
    counts_b = b.size - np.searchsorted(b, probes, side="right")
    return StepFunction(bp, (counts_a - counts_b).astype(float))


@lru_cache(maxsize=64)
def _gauss_legendre(nodes: int):
    x, w = np.polynomial.legendre.leggauss(nodes)
    return x, w


def trace_formula_rhs(f: ScalarFunction, xi: StepFunction, nodes_per_interval: int) -> float:
    """int f'(s) xi(s) ds by Gauss-Legendre quadrature on each breakpoint
    interval, where xi is constant. Uses only f' evaluations, never
    f-differences, so comparisons with the trace side are non-circular."""
    if nodes_per_interval < 1:
        raise ValueError("need at least one quadrature node")
    x, w = _gauss_legendre(nodes_per_interval)
    bp = xi.breakpoints
    total = 0.0
    for i in range(bp.size - 1):
        v = xi.values[i + 1]
        if v == 0.0:
            continue
        lo, hi = bp[i], bp[i + 1]
        if hi <= lo:
            continue
        half = (hi - lo) / 2
        pts = (x + 1.0) * half + lo
        for p in pts:
            f.check_domain(float(p))
        total += v * half * float(np.dot(w, [f.deriv(float(p)) for p in pts]))
    return total


@dataclass
class TraceFormulaReport:
    lhs: float
    rhs: float
    abs_error: float
    lhs_imag: float


def trace_formula_check(f: ScalarFunction, A, B, nodes: int = 32) -> TraceFormulaReport:
    """Both sides of the trace formula, computed independently: the trace of
    f(A)-f(B) against the quadrature of f' times the shift function."""
    A = as_hermitian(A)
    B = as_hermitian(B)
    lhs_c = trace(delta_f(f, A, B))
    xi = xi_from_eigs(eigh(A).eigenvalues, eigh(B).eigenvalues)
    rhs = trace_formula_rhs(f, xi, nodes)
    return TraceFormulaReport(lhs_c.real, rhs, abs(lhs_c.real - rhs), abs(lhs_c.imag))


def nu_t(A, K, t: float) -> AtomicSignedMeasure:
    """Signed measure with atoms at the eigenvalues of A + tK weighted by the
    diagonal of K in that eigenbasis. Total weight is trace(K)."""
    A = as_hermitian(A)
    K = as_hermitian(K)
    w, V = eigh(A + t * K)
    weights = np.real(np.einsum("ji,jk,ki->i", V.conj(), K, V))
    return AtomicSignedMeasure(w, weights)


@dataclass
class HellmannFeynmanReport:
    max_error: float
    min_gap: float
    skipped: bool


def hellmann_feynman_check(A, K, t: float, h: float) -> HellmannFeynmanReport:
    """Central-difference eigenvalue velocities against the nu_t weights.

    Requires a simple spectrum at t: the check is skipped (flagged) when the
    minimum eigenvalue gap is below 10*h*||K||.
    """
    A = as_hermitian(A)
    K = as_hermitian(K)
    wk, _ = eigh(K)
    knorm = float(np.abs(wk).max())
    mu = nu_t(A, K, t)
    gaps = np.diff(mu.locations)
    min_gap = float(gaps.min()) if gaps.size else np.inf
    if min_gap <= 10.0 * h * knorm:
        return HellmannFeynmanReport(np.nan, min_gap, True)
    wp, _ = eigh(A + (t + h) * K)
    wm, _ = eigh(A + (t - h) * K)
    fd = (wp - wm) / (2.0 * h)
    return HellmannFeynmanReport(float(np.abs(fd - mu.weights).max()), min_gap, False)


def _bin_hull(A: np.ndarray, K: np.ndarray) -> tuple[float, float]:
    wa, _ = eigh(A)
    wb, _ = eigh(A + K)
    wk, _ = eigh(K)
    pad = float(np.abs(wk).max())
    return float(min(wa.min(), wb.min()) - pad), float(max(wa.max(), wb.max()) + pad)


def nu_integrated(A, K, depth: int, bins: int) -> DensityEstimate:
    """Midpoint time-average of nu_t over [0, 1] with 2**depth samples,
    accumulated into uniform bins over the padded spectral hull."""
    if bins < 8:
        raise ValueError("bins must be >= 8")
    A = as_hermitian(A)
    K = as_hermitian(K)
    lo, hi = _bin_hull(A, K)
    if hi <= lo:
        lo, hi = lo - 0.5, hi + 0.5
    edges = np.linspace(lo, hi, bins + 1)
    nsamples = 2 ** depth
    ts = (np.arange(nsamples) + 0.5) / nsamples
    acc = np.zeros(bins)
    for t in ts:
        mu = nu_t(A, K, float(t))
        idx = np.clip(np.searchsorted(edges, mu.locations, side="right") - 1, 0, bins - 1)
        np.add.at(acc, idx, mu.weights)
    width = (hi - lo) / bins
    return DensityEstimate(edges, acc / (nsamples * width))


@dataclass
class NuXiReport:
    l1_error: float
    density: DensityEstimate
    xi: StepFunction


def nu_vs_xi_check(A, B, depth: int, bins: int) -> NuXiReport:
    """L1 distance between the binned time-averaged nu density and -xi."""
    A = as_hermitian(A)
    B = as_hermitian(B)
    K = B - A
    dens = nu_integrated(A, K, depth, bins)
    xi = xi_from_eigs(eigh(A).eigenvalues, eigh(B).eigenvalues)
    edges = dens.bin_edges
    width = float(edges[1] - edges[0])
    err = 0.0
    for i in range(dens.densities.size):
        err += abs(dens.densities[i] + xi.mean_on(float(edges[i]), float(edges[i + 1]))) * width
    return NuXiReport(err, dens, xi)


def translation_scan(f: ScalarFunction, A, B, t_grid) -> np.ndarray:
    """trace(f(A - tI) - f(B - tI)) over the given shifts.

    Shifting commutes with the eigenbases, so the scan needs the two spectra
    only. Any shift that pushes a spectrum outside the domain of f raises a
    DomainError naming the offending t.
    """
    A = as_hermitian(A)
    B = as_hermitian(B)
    wa = eigh(A).eigenvalues
    wb = eigh(B).eigenvalues
    t_grid = np.asarray(t_grid, dtype=float)
    lo, hi = f.domain
    out = np.empty(t_grid.size)
    for k, t in enumerate(t_grid):
        shifted_min = min(wa.min(), wb.min()) - t
        shifted_max = max(wa.max(), wb.max()) - t
        if shifted_min < lo - 1e-12 or shifted_max > hi + 1e-12:
            raise DomainError(
                f"shift t={float(t)!r} moves the spectra outside the domain of {f.name!r}"
            )
        out[k] = sum(f.eval(float(x - t)) for x in wa) - sum(f.eval(float(x - t)) for x in wb)
    return out
