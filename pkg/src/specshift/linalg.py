"""Dense Hermitian linear algebra: eigendecomposition, functional calculus,
Schatten norms, traces, and seeded random operator generation.

All matrices are plain ``numpy`` arrays of ``complex128``. Hermitian inputs
are validated and exactly symmetrized by :func:`as_hermitian`; everything
downstream assumes that contract.
"""

from __future__ import annotations

import json
from typing import NamedTuple

import numpy as np

__all__ = [
    "DomainError",
    "ConvergenceError",
    "EigenDecomposition",
    "as_hermitian",
    "eigh",
    "apply_function",
    "schatten_norm",
    "singular_values",
    "trace",
    "random_hermitian",
    "random_general",
    "save_matrix",
    "load_matrix",
    "matrix_to_json",
    "matrix_from_json",
]

HERMITICITY_TOL = 1e-12
JACOBI_SWEEP_CAP = 100
JACOBI_THRESHOLD = 1e-14


class DomainError(ValueError):
    """An evaluation point (eigenvalue, shift, grid node) left a function's domain."""


class ConvergenceError(RuntimeError):
    """An iterative routine hit its cap without meeting its stopping criterion."""


class EigenDecomposition(NamedTuple):
    """Spectral data of a Hermitian matrix: ascending eigenvalues and unitary eigenvectors.

    ``vectors[:, i]`` is the eigenvector for ``eigenvalues[i]``; spectral
    projections onto Borel sets are sums of the corresponding rank-one
    projectors.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]


def as_hermitian(entries, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate Hermiticity within ``tol`` (relative to the largest entry) and
    return the exactly symmetrized matrix (H + H*)/2.

    Grossly non-Hermitian input is rejected rather than silently symmetrized.
    """
    H = np.asarray(entries, dtype=np.complex128)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {H.shape}")
    scale = np.abs(H).max()
    dev = np.abs(H - H.conj().T).max()
    if scale > 0 and dev > tol * scale:
        raise ValueError(
            f"matrix is not Hermitian: max |H - H*| = {dev:.3e} exceeds {tol:.1e} * max|entry|"
        )
    return (H + H.conj().T) / 2


def _jacobi_python(A: np.ndarray, V: np.ndarray, thresh: float, sweep_cap: int) -> int:
    """Pure-numpy cyclic Jacobi; same rotation schedule as the jitted kernel."""
    n = A.shape[0]
    for sweep in range(sweep_cap):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = A[p, q]
                ah = abs(h)
                off = max(off, ah)
                if ah <= thresh:
                    continue
                a = A[p, p].real
                b = A[q, q].real
                u = h / ah
                tau = (b - a) / (2.0 * ah)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                zpq = s * u
                zqp = -s * np.conj(u)
                colp = A[:, p].copy()
                colq = A[:, q].copy()
                A[:, p] = colp * c + colq * zqp
                A[:, q] = colp * zpq + colq * c
                rowp = A[p, :].copy()
                rowq = A[q, :].copy()
                A[p, :] = c * rowp + np.conj(zqp) * rowq
                A[q, :] = np.conj(zpq) * rowp + c * rowq
                A[p, q] = 0.0
                A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = vp * c + vq * zqp
                V[:, q] = vp * zpq + vq * c
        if off <= thresh:
            return sweep + 1
    return -1


try:
    from numba import njit

    @njit(cache=True)
    def _jacobi_numba(A, V, thresh, sweep_cap):  # pragma: no cover - exercised via eigh
        n = A.shape[0]
        for sweep in range(sweep_cap):
            off = 0.0
            for p in range(n - 1):
                for q in range(p + 1, n):
                    h = A[p, q]
                    ah = abs(h)
                    if ah > off:
                        off = ah
                    if ah <= thresh:
                        continue
                    a = A[p, p].real
                    b = A[q, q].real
                    u = h / ah
                    tau = (b - a) / (2.0 * ah)
                    if tau >= 0.0:
                        t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                    c = 1.0 / np.sqrt(1.0 + t * t)
                    s = t * c
                    zpq = s * u
                    zqp = -s * np.conj(u)
                    for i in range(n):
                        cp = A[i, p]
                        cq = A[i, q]
                        A[i, p] = cp * c + cq * zqp
                        A[i, q] = cp * zpq + cq * c
                    for i in range(n):
                        rp = A[p, i]
                        rq = A[q, i]
                        A[p, i] = c * rp + np.conj(zqp) * rq
                        A[q, i] = np.conj(zpq) * rp + c * rq
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    A[p, p] = complex(A[p, p].real, 0.0)
                    A[q, q] = complex(A[q, q].real, 0.0)
                    for i in range(n):
                        vp = V[i, p]
                        vq = V[i, q]
                        V[i, p] = vp * c + vq * zqp
                        V[i, q] = vp * zpq + vq * c
            if off <= thresh:
                return sweep + 1
        return -1

    _jacobi_kernel = _jacobi_numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    _jacobi_kernel = _jacobi_python


def eigh(H) -> EigenDecomposition:
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues are returned ascending, ties broken by original index (stable
    sort), which pins eigenvector ordering and phases for a given input.
    Off-diagonal entries below ``1e-14 * ||H||_F`` are left unannihilated.

    Raises :class:`ConvergenceError` if the sweep cap (100) is hit; never
    returns an unconverged decomposition.
    """
    A = as_hermitian(H)
    n = A.shape[0]
    V = np.eye(n, dtype=np.complex128)
    thresh = JACOBI_THRESHOLD * np.linalg.norm(A)
    if n == 1 or thresh == 0.0:
        return EigenDecomposition(np.real(np.diag(A)).copy(), V)
    sweeps = _jacobi_kernel(A, V, thresh, JACOBI_SWEEP_CAP)
    if sweeps < 0:
        raise ConvergenceError(
            f"Jacobi eigensolver did not converge within {JACOBI_SWEEP_CAP} sweeps (n={n})"
        )
    w = np.real(np.diag(A))
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], V[:, order])


def _eval_on(f, values: np.ndarray) -> np.ndarray:
    return np.array([f(float(x)) for x in values], dtype=float)


def _check_domain(f, values: np.ndarray) -> None:
    lo, hi = f.domain
    slack = 1e-12 * (1.0 + abs(lo) + abs(hi))
    for x in values:
        if x < lo - slack or x > hi + slack:
            raise DomainError(
                f"eigenvalue {x!r} outside domain [{lo}, {hi}] of function {f.name!r}"
            )


def apply_function(f, H, decomposition: EigenDecomposition | None = None) -> np.ndarray:
    """Functional calculus V f(L) V* for a Hermitian matrix.

    ``f`` is a scalar function object with ``eval``, ``domain`` and ``name``
    attributes (see :mod:`specshift.funcat`). Every eigenvalue must lie in
    ``f.domain``; violations raise :class:`DomainError` naming the offender.
    A precomputed decomposition may be passed to avoid re-diagonalizing.
    """
    dec = eigh(H) if decomposition is None else decomposition
    _check_domain(f, dec.eigenvalues)
    fw = _eval_on(f.eval, dec.eigenvalues)
    V = dec.vectors
    return (V * fw) @ V.conj().T


def singular_values(T) -> np.ndarray:
    """Singular values (descending) via the Hermitian dilation [[0, T], [T*, 0]],
    whose spectrum is {+-sigma_i} plus |n-m| zeros. The dilation keeps full
    absolute accuracy for small singular values, unlike the T*T route."""
    T = np.asarray(T, dtype=np.complex128)
    if T.ndim != 2:
        raise ValueError("expected a matrix")
    n, m = T.shape
    D = np.zeros((n + m, n + m), dtype=np.complex128)
    D[:n, n:] = T
    D[n:, :n] = T.conj().T
    w, _ = eigh(D)
    k = min(n, m)
    if k == 0:
        return np.zeros(0)
    return np.clip(w[n + m - k:], 0.0, None)[::-1]


def schatten_norm(T, p) -> float:
    """Schatten norm for p in {1, 2, inf}.

    p=2 is the Frobenius sum; p=1 and p=inf go through singular values.
    """
    T = np.asarray(T, dtype=np.complex128)
    if p == 2:
        return float(np.sqrt(np.sum(np.abs(T) ** 2)))
    if p == 1:
        return float(np.sum(singular_values(T)))
    if p == np.inf or p == "inf":
        s = singular_values(T)
        return float(s[0]) if s.size else 0.0
    raise ValueError(f"unsupported Schatten index {p!r}; use 1, 2 or inf")


def trace(T) -> complex:
    """Sum of diagonal entries of a square matrix."""
    T = np.asarray(T)
    if T.ndim != 2 or T.shape[0] != T.shape[1]:
        raise ValueError(f"trace requires a square matrix, got shape {T.shape}")
    return complex(np.trace(T))


def random_hermitian(seed: int, n: int, scale: float = 1.0) -> np.ndarray:
    """GUE-style Hermitian matrix: iid complex Gaussian entries, symmetrized.

    Deterministic per (seed, n, scale).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    G = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return scale * (G + G.conj().T) / 2


def random_general(seed: int, n: int, m: int | None = None, scale: float = 1.0) -> np.ndarray:
    """Dense complex Gaussian matrix, deterministic per arguments."""
    m = n if m is None else m
    rng = np.random.default_rng(seed)
    return scale * (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m)))


# --- matrix file format -----------------------------------------------------
#
# {"n": int, "re": [[...]], "im": [[...]]}, full double precision.


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def matrix_to_json(M) -> str:
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix JSON format covers square matrices only")
    n = M.shape[0]
    re_part = ",\n    ".join(
        "[" + ", ".join(_fmt(float(x)) for x in row) + "]" for row in M.real
    )
    im_part = ",\n    ".join(
        "[" + ", ".join(_fmt(float(x)) for x in row) + "]" for row in M.imag
    )
    return (
        "{\n"
        f'  "n": {n},\n'
        f'  "re": [\n    {re_part}\n  ],\n'
        f'  "im": [\n    {im_part}\n  ]\n'
        "}\n"
    )


def matrix_from_json(text: str) -> np.ndarray:
    obj = json.loads(text)
    n = int(obj["n"])
    re = np.array(obj["re"], dtype=float)
    im = np.array(obj["im"], dtype=float)
    if re.shape != (n, n) or im.shape != (n, n):
        raise ValueError(f"matrix file inconsistent: n={n}, re{re.shape}, im{im.shape}")
    return re + 1j * im


def save_matrix(path, M) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(matrix_to_json(M))


def load_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return matrix_from_json(fh.read())
