"""Catalog of scalar test functions with derivatives and metadata; divided
differences and Loewner kernel matrices sampled on spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .linalg import DomainError

__all__ = [
    "ScalarFunction",
    "KernelMatrix",
    "divided_difference",
    "loewner_matrix",
    "lipschitz_seminorm_estimate",
    "lipschitz_seminorm_refined",
    "catalog",
    "get_function",
    "polynomial",
    "restrict",
]


@dataclass(frozen=True)
class ScalarFunction:
    """A scalar function f with pointwise derivative and metadata.

    ``nondifferentiable`` lists points where f' does not exist; the divided
    difference on the diagonal there takes the fixed ``diagonal_convention``
    value instead of ``deriv``. ``ol_status`` is one of "known-OL",
    "known-not-OL", "unknown"; ``smoothness`` one of "analytic", "C2",
    "differentiable", "lipschitz". ``lipschitz_seminorm`` is the known sup of
    |f(x)-f(y)|/|x-y| on the domain, when available in closed form.
    """

    name: str
    eval: Callable[[float], float]
    deriv: Callable[[float], float]
    domain: tuple[float, float] = (-2.0, 2.0)
    ol_status: str = "unknown"
    smoothness: str = "analytic"
    lipschitz_seminorm: float | None = None
    nondifferentiable: tuple[float, ...] = ()
    diagonal_convention: float = 0.0

    def __post_init__(self):
        if self.domain[0] >= self.domain[1]:
            raise ValueError(f"empty domain {self.domain} for {self.name!r}")

    @property
    def differentiable_everywhere(self) -> bool:
        return not self.nondifferentiable

    def check_domain(self, x: float) -> None:
        lo, hi = self.domain
        slack = 1e-12 * (1.0 + abs(lo) + abs(hi))
        if x < lo - slack or x > hi + slack:
            raise DomainError(f"point {x!r} outside domain [{lo}, {hi}] of {self.name!r}")


@dataclass(frozen=True)
class KernelMatrix:
    """A bivariate kernel sampled at points xs (rows) and ys (columns)."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        vals = np.asarray(self.values)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "values", vals)
        if vals.shape != (xs.size, ys.size):
            raise ValueError(
                f"kernel values {vals.shape} inconsistent with {xs.size} x-points, {ys.size} y-points"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("kernel contains non-finite values")

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def _diagonal_value(f: ScalarFunction, x: float) -> float:
    if x in f.nondifferentiable:
        return f.diagonal_convention
    return f.deriv(x)


def divided_difference(f: ScalarFunction, x: float, y: float) -> float:
    """(f(x)-f(y))/(x-y) off the diagonal; f'(x) on it, or the function's
    diagonal convention where f' does not exist."""
    f.check_domain(x)
    f.check_domain(y)
    if x == y:
        return float(_diagonal_value(f, x))
    return (f.eval(x) - f.eval(y)) / (x - y)


def loewner_matrix(f: ScalarFunction, xs, ys) -> KernelMatrix:
    """Divided-difference kernel of f sampled at xs (rows) and ys (columns).

    Symmetric when xs == ys and f is real-valued.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    for x in xs:
        f.check_domain(float(x))
    for y in ys:
        f.check_domain(float(y))
    fx = np.array([f.eval(float(x)) for x in xs])
    fy = np.array([f.eval(float(y)) for y in ys])
    dx = xs[:, None] - ys[None, :]
    df = fx[:, None] - fy[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = df / dx
    eq_i, eq_j = np.nonzero(dx == 0.0)
    for i, j in zip(eq_i, eq_j):
        vals[i, j] = _diagonal_value(f, float(xs[i]))
    return KernelMatrix(xs, ys, vals)


def lipschitz_seminorm_estimate(f: ScalarFunction, grid_size: int) -> float:
    """Max |divided difference| over all pairs of a uniform grid on the domain,
    diagonal included. A lower bound on the true Lipschitz seminorm."""
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    grid = np.linspace(f.domain[0], f.domain[1], grid_size)
    return float(np.abs(loewner_matrix(f, grid, grid).values).max())


def lipschitz_seminorm_refined(f: ScalarFunction, grid_size: int = 1001) -> float:
    """Grid seminorm estimate plus a refinement margin.

    Uses two nested uniform grids (g and 2g-1 points); the margin is the
    Richardson-style excess fine + (fine - coarse), which covers the residual
    grid error for the catalog functions.
    """
    coarse = lipschitz_seminorm_estimate(f, grid_size)
    fine = lipschitz_seminorm_estimate(f, 2 * grid_size - 1)
    return fine + (fine - coarse)


# --- catalog ----------------------------------------------------------------


def _bump(x: float) -> float:
    return (1.0 - x * x) ** 3 if abs(x) < 1.0 else 0.0


def _bump_deriv(x: float) -> float:
    return -6.0 * x * (1.0 - x * x) ** 2 if abs(x) < 1.0 else 0.0


def _x2sin1x(x: float) -> float:
    return x * x * math.sin(1.0 / x) if x != 0.0 else 0.0


def _x2sin1x_deriv(x: float) -> float:
    # classical pointwise derivative; equals 0 at the origin
    return 2.0 * x * math.sin(1.0 / x) - math.cos(1.0 / x) if x != 0.0 else 0.0


_CATALOG: dict[str, ScalarFunction] = {}


def _register(fn: ScalarFunction) -> ScalarFunction:
    _CATALOG[fn.name] = fn
    return fn


_register(ScalarFunction("identity", lambda x: x, lambda x: 1.0,
                         ol_status="known-OL", lipschitz_seminorm=1.0))
_register(ScalarFunction("x2", lambda x: x * x, lambda x: 2.0 * x,
                         ol_status="known-OL", lipschitz_seminorm=4.0))
_register(ScalarFunction("x3", lambda x: x ** 3, lambda x: 3.0 * x * x,
                         ol_status="known-OL", lipschitz_seminorm=12.0))
_register(ScalarFunction("x4", lambda x: x ** 4, lambda x: 4.0 * x ** 3,
                         ol_status="known-OL", lipschitz_seminorm=32.0))
_register(ScalarFunction("sin", math.sin, math.cos,
                         ol_status="known-OL", lipschitz_seminorm=1.0))
_register(ScalarFunction("bump", _bump, _bump_deriv,
                         ol_status="known-OL", smoothness="C2",
                         lipschitz_seminorm=96.0 / (25.0 * math.sqrt(5.0))))
_register(ScalarFunction("abs", abs, lambda x: math.copysign(1.0, x) if x != 0 else 0.0,
                         ol_status="known-not-OL", smoothness="lipschitz",
                         lipschitz_seminorm=1.0,
                         nondifferentiable=(0.0,), diagonal_convention=0.0))
_register(ScalarFunction("x2sin1x", _x2sin1x, _x2sin1x_deriv,
                         ol_status="known-OL", smoothness="differentiable"))


def catalog() -> list[ScalarFunction]:
    """All registered test functions."""
    return list(_CATALOG.values())


def get_function(name: str) -> ScalarFunction:
    try:
        return _CATALOG[name]
    except KeyError:
        raise ValueError(
            f"unknown function {name!r}; available: {', '.join(sorted(_CATALOG))}"
        ) from None


def polynomial(coeffs, domain: tuple[float, float] = (-2.0, 2.0)) -> ScalarFunction:
    """Polynomial sum(c_k x^k) from its coefficient list, with exact derivative."""
    c = [float(v) for v in coeffs]
    if not c:
        raise ValueError("empty coefficient list")
    dc = [k * c[k] for k in range(1, len(c))]

    def ev(x: float, _c=tuple(c)) -> float:
        acc = 0.0
        for v in reversed(_c):
            acc = acc * x + v
        return acc

    def dv(x: float, _c=tuple(dc)) -> float:
        acc = 0.0
        for v in reversed(_c):
            acc = acc * x + v
        return acc

    name = "poly:[" + ",".join(f"{v:g}" for v in c) + "]"
    return ScalarFunction(name, ev, dv, domain=domain, ol_status="known-OL")


def restrict(f: ScalarFunction, lo: float, hi: float) -> ScalarFunction:
    """Copy of f with the domain narrowed to [lo, hi]."""
    if lo < f.domain[0] or hi > f.domain[1]:
        raise ValueError(f"[{lo}, {hi}] is not inside the domain of {f.name!r}")
    return replace(f, name=f"{f.name}@[{lo:g},{hi:g}]", domain=(lo, hi))
