"""Shipped targets and the analysis built on them.

Integration
    When every axis measure has constant density, each corner block holds a
    fixed share of its parent box at every depth, and the integral is the
    map into the scalars whose combining rule is the weighted mean with
    those shares (:func:`mean_target`).

    For a polynomial distribution function of degree ``q > 1`` the shares
    change from cell to cell, so a single weighted mean cannot reproduce
    the integral. :func:`integration_target` then uses a finite moment
    carrier. Writing ``s`` for the normalized coordinate on an axis, an
    element stores ``mu(box) * integral of f d(s**i)`` for ``i = 1..q`` on
    each axis (tensor product across axes). Pulling a corner block back to
    the whole box is affine in ``s``, so the combining rule is a fixed
    linear map, and the integral is a fixed linear reading of the moments.
    With ``q = 1`` on every axis this is exactly the weighted-mean target.

Antiderivative
    On ``[0, 1]`` with the midpoint split, the carrier is the continuous
    piecewise-linear functions vanishing at 0, ``v`` is the identity and
    the combining rule squeezes the two halves side by side.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .algebra import Algebra, TauMap
from .engine import ConvergenceReport, TargetObject, theta, theta_limit
from .errors import DimensionMismatch, InvalidP, UnsupportedConfiguration
from .measure import BoxMeasure
from .scalars import Backend, from_mpq, to_mpq
from .stepfn import StepFunction, refine_to, sample


def _converter(backend: Backend):
    if backend is Backend.RATIONAL:
        return lambda x: Backend.RATIONAL.coerce(x)
    return lambda x: backend.coerce(float(x) if isinstance(x, Fraction) else x)


def _tensor(values, backend: Backend) -> np.ndarray:
    conv = _converter(backend)
    arr = np.asarray(values, dtype=object)
    out = np.empty(arr.shape, dtype=object if backend is Backend.RATIONAL else backend.dtype)
    for idx in np.ndindex(arr.shape):
        out[idx] = conv(arr[idx])
    return out


def _max_abs(x):
    x = np.asarray(x)
    return max(abs(e) for e in x.reshape(-1)) if x.dtype == object else float(np.max(np.abs(x)))


# -- integration ------------------------------------------------------------------------


def mean_target(bm: BoxMeasure, A: Optional[Algebra] = None, tau: Optional[TauMap] = None,
                backend: Optional[Backend] = None) -> TargetObject:
    """Scalars with ``v = mu(box)`` and ``delta`` the block-weighted mean.

    The weights are the shares ``mu(block_j) / mu(box)`` of the corner
    blocks. The induced map is the integral only for measures with constant
    density on every axis.
    """
    backend = backend or bm.backend
    conv = _converter(backend)
    total = conv(bm.total)
    weights = _tensor(bm.block_weights(), backend)
    zero = backend.zero()

    def delta(xs):
        return sum((w * x for w, x in zip(weights, xs)), start=zero)

    if backend is Backend.RATIONAL:
        fast_w, fast_total = to_mpq(weights), to_mpq(np.array(total, dtype=object))[()]

        def lift_batch(c):
            return to_mpq(c) * fast_total

        def delta_batch(X):
            return X @ fast_w

        unpack = from_mpq
    else:
        def lift_batch(c):
            return c * total

        def delta_batch(X):
            return X @ weights

        def unpack(x):
            return x

    def closed(f: StepFunction):
        return (f.coeffs * _tensor(bm.cell_measures(f.u).reshape(-1), backend)).sum()

    return TargetObject(
        name="mean", n=bm.n, backend=backend, v=total, delta=delta,
        zero=lambda: zero, add=lambda x, y: x + y, scale=lambda c, x: c * x, norm=abs,
        algebra=A, tau=tau, box_total=total, closed_form=closed if bm.self_similar else None,
        lift_batch=lift_batch, delta_batch=delta_batch, unpack=unpack,
        meta={"weights": list(weights)},
    )


def _corner_matrices(rho, q: int, backend: Backend) -> np.ndarray:
    """Stack ``[low, high]`` of shape ``(2, q, q)`` acting on moments of order 1..q."""
    one = Fraction(1)
    low = [[rho ** (i + 1) if i == j else 0 for j in range(q)] for i in range(q)]
    high = [[math.comb(i + 1, j + 1) * rho ** (i - j) * (one - rho) ** (j + 1) if j <= i else 0
             for j in range(q)] for i in range(q)]
    return _tensor([low, high], backend)


def moment_target(bm: BoxMeasure, A: Optional[Algebra] = None, tau: Optional[TauMap] = None,
                  backend: Optional[Backend] = None) -> TargetObject:
    """Exact integration target for polynomial distribution functions (see module notes)."""
    backend = backend or bm.backend
    conv = _converter(backend)
    n = bm.n
    degrees = tuple(m.degree for m in bm.measures)
    shape = degrees
    total = conv(bm.total)
    mats = [_corner_matrices(s.rho, q, backend) for s, q in zip(bm.schemes, degrees)]
    v = _tensor(np.full(shape, bm.total, dtype=object), backend)
    readout_w = np.array(1, dtype=object)
    for m in bm.measures:
        readout_w = np.multiply.outer(readout_w, np.array(m.normalized_coeffs(), dtype=object))
    readout_w = _tensor(readout_w / bm.total, backend)

    exact = backend is Backend.RATIONAL
    kernel_mats = [to_mpq(m) for m in mats] if exact else mats
    kernel_v = to_mpq(v) if exact else v

    def contract(X, ms):
        # X: (G, 2**n) + shape -> (G,) + shape
        X = X.reshape((X.shape[0],) + (2,) * n + shape)
        for d in range(n):
            r = n - d
            X = np.tensordot(X, ms[d], axes=([1, 1 + r], [0, 2]))
        return X

    def delta_batch(X):
        return contract(X, kernel_mats)

    def delta(xs):
        return contract(np.stack([np.asarray(x) for x in xs])[None], mats)[0]

    def lift_batch(c):
        return np.multiply.outer(to_mpq(c) if exact else c, kernel_v)

    def readout(y):
        return (np.asarray(y) * readout_w).sum()

    def closed(f: StepFunction):
        # direct sum over cells of k * prod_d (s_hi**i - s_lo**i)
        per_axis = []
        for s, q in zip(bm.schemes, degrees):
            pts = s.points(f.u)
            norm_pts = (pts - s.a) / (s.b - s.a)
            powers = np.stack([norm_pts ** (i + 1) for i in range(q)], axis=1)
            per_axis.append(_tensor(powers[1:] - powers[:-1], backend))
        k = f.tensor
        out = k
        for d in range(n):
            # contract the current leading cell axis against (cells, q_d)
            out = np.tensordot(out, per_axis[d], axes=([0], [0]))
        return out * total

    return TargetObject(
        name="moment", n=n, backend=backend, v=v, delta=delta,
        zero=lambda: _tensor(np.zeros(shape, dtype=object), backend),
        add=lambda x, y: x + y, scale=lambda c, x: c * x, norm=_max_abs,
        algebra=A, tau=tau, box_total=total, closed_form=closed, readout=readout,
        lift_batch=lift_batch, delta_batch=delta_batch, unpack=from_mpq if exact else (lambda x: x),
        meta={"degrees": degrees},
    )


def integration_target(bm: BoxMeasure, A: Optional[Algebra] = None, tau: Optional[TauMap] = None,
                       backend: Optional[Backend] = None) -> TargetObject:
    """Target whose induced map is the integral against ``bm``.

    Constant-density measures get the scalar weighted-mean target; other
    polynomial distribution functions get the moment target.
    """
    if bm.self_similar:
        return mean_target(bm, A, tau, backend)
    return moment_target(bm, A, tau, backend)


def direct_sum(f: StepFunction, bm: BoxMeasure):
    """``sum over cells of k * mu(cell)`` on the stored level."""
    if f.n != bm.n:
        raise DimensionMismatch("measure and function disagree on the dimension")
    return (f.coeffs * _tensor(bm.cell_measures(f.u).reshape(-1), f.backend)).sum()


def zero_target(n: int = 1, backend: Backend = Backend.RATIONAL) -> TargetObject:
    """Scalars with ``v = 0``; the induced map vanishes identically."""
    zero = backend.zero()
    w = backend.coerce(Fraction(1, 2 ** n)) if backend.exact else 1.0 / 2 ** n
    return TargetObject(
        name="zero", n=n, backend=backend, v=zero,
        delta=lambda xs: sum(xs, start=zero) * w, zero=lambda: zero,
        add=lambda x, y: x + y, scale=lambda c, x: c * x, norm=abs,
        closed_form=lambda f: zero,
        lift_batch=lambda c: c * zero, delta_batch=lambda X: X.sum(axis=1) * w, unpack=lambda x: x,
    )


def integrate_report(f, bm: BoxMeasure, A: Optional[Algebra] = None, tau: Optional[TauMap] = None,
                     *, backend: Optional[Backend] = None, tol=None, u_min: int = 4,
                     u_max: Optional[int] = None, convention: str = "midpoint",
                     vectorized: bool = False):
    """Integral of a step function or a sampler, with a convergence report.

    Step functions are integrated exactly at their own level; the report
    then lists that single level. Samplers go through :func:`theta_limit`
    and default to the float backend.
    """
    if isinstance(f, StepFunction):
        t = integration_target(bm, A, tau, f.backend)
        value = t.value(theta(f, t))
        report = ConvergenceReport([f.u], [value], [], True, f.backend.zero(), f.u)
        return value, report
    t = integration_target(bm, A, tau, backend or Backend.FLOAT)
    x, report = theta_limit(f, t, bm, tol, u_min, u_max, convention, vectorized)
    return t.value(x), report


def integrate(f, bm: BoxMeasure, A: Optional[Algebra] = None, tau: Optional[TauMap] = None, **opts):
    return integrate_report(f, bm, A, tau, **opts)[0]


# -- antiderivatives ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PiecewiseLinear:
    """Continuous piecewise-linear function on ``[0, 1]`` with breakpoints ``j / 2**u``.

    ``values[j]`` is the value at ``j / 2**u``; ``values[0]`` is always 0.
    """

    u: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values)
        if vals.shape != (2 ** self.u + 1,):
            raise DimensionMismatch(f"level {self.u} needs {2 ** self.u + 1} breakpoint values")
        if vals[0] != 0:
            raise ValueError("piecewise-linear antiderivatives vanish at 0")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def refine(self, levels: int = 1) -> "PiecewiseLinear":
        vals = self.values
        for _ in range(levels):
            out = np.empty(2 * (vals.size - 1) + 1, dtype=vals.dtype)
            out[0::2] = vals
            out[1::2] = (vals[:-1] + vals[1:]) / 2
            vals = out
        return PiecewiseLinear(self.u + levels, vals)

    def refine_to(self, u: int) -> "PiecewiseLinear":
        if u < self.u:
            raise ValueError(f"cannot coarsen level {self.u} to {u}")
        return self.refine(u - self.u)

    def at_end(self):
        return self.values[-1]

    def __call__(self, x):
        """Linear interpolation between breakpoints."""
        m = 2 ** self.u
        pos = x * m
        j = min(int(pos), m - 1)
        frac = pos - j
        return self.values[j] + (self.values[j + 1] - self.values[j]) * frac

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        u = max(self.u, other.u)
        return bool(np.all(self.refine_to(u).values == other.refine_to(u).values))

    __hash__ = None

    def __repr__(self):
        shown = ", ".join(str(v) for v in self.values[:9])
        return f"PiecewiseLinear(u={self.u}, [{shown}{', ...' if self.values.size > 9 else ''}])"


def _pl_align(F: PiecewiseLinear, G: PiecewiseLinear):
    u = max(F.u, G.u)
    return F.refine_to(u), G.refine_to(u)


def kappa(F1: PiecewiseLinear, F2: PiecewiseLinear) -> PiecewiseLinear:
    """``F1`` squeezed onto ``[0, 1/2]`` and ``F2`` onto ``[1/2, 1]``, each scaled by 1/2."""
    F1, F2 = _pl_align(F1, F2)
    first = F1.values / 2
    second = (F1.values[-1] + F2.values[1:]) / 2
    return PiecewiseLinear(F1.u + 1, np.concatenate([first, second]))


def check_antiderivative_setting(bm: Optional[BoxMeasure], A: Optional[Algebra],
                                 tau: Optional[TauMap]) -> None:
    """Raise unless the setting is one axis, Lebesgue on [0, 1], midpoint split, tau = id."""
    if bm is not None:
        if bm.n != 1:
            raise UnsupportedConfiguration("antiderivatives need a single axis")
        m, s = bm.measures[0], bm.schemes[0]
        if m.a != 0 or m.b != 1 or s.xi != Fraction(1, 2) or m.degree != 1 or m.coeffs[1] != 1:
            raise UnsupportedConfiguration("antiderivatives need Lebesgue measure on [0, 1] split at 1/2")
        if m.coeffs[0] != 0:
            raise UnsupportedConfiguration("antiderivatives need F(x) = x")
    if A is not None and A.dim != 1:
        raise UnsupportedConfiguration("antiderivatives need the ground field as algebra")
    if tau is not None and tau(tau.algebra.unit) != 1:
        raise UnsupportedConfiguration("antiderivatives need tau = id")


def antiderivative_target(backend: Backend = Backend.RATIONAL, bm: Optional[BoxMeasure] = None,
                          A: Optional[Algebra] = None, tau: Optional[TauMap] = None) -> TargetObject:
    check_antiderivative_setting(bm, A, tau)
    dtype = object if backend is Backend.RATIONAL else backend.dtype
    one = backend.one()
    zero = backend.zero()
    ident = PiecewiseLinear(0, np.array([zero, one], dtype=dtype))

    def lift_batch(c):
        out = np.empty((c.size, 2), dtype=dtype)
        out[:, 0] = zero
        out[:, 1] = c
        return out

    def delta_batch(X):
        first = X[:, 0, :] / 2
        second = (X[:, 0, -1:] + X[:, 1, 1:]) / 2
        return np.concatenate([first, second], axis=1)

    def unpack(vals):
        return PiecewiseLinear((vals.size - 1).bit_length() - 1, vals)

    def add(F, G):
        F, G = _pl_align(F, G)
        return PiecewiseLinear(F.u, F.values + G.values)

    def closed(f: StepFunction):
        vals = np.concatenate([np.array([zero], dtype=dtype), np.cumsum(f.coeffs)]) / 2 ** f.u
        return PiecewiseLinear(f.u, vals.astype(dtype))

    if tau is None and A is not None:
        tau = TauMap.identity(A)
    return TargetObject(
        name="antiderivative", n=1, backend=backend, v=ident,
        delta=lambda xs: kappa(*xs), zero=lambda: PiecewiseLinear(0, np.array([zero, zero], dtype=dtype)),
        add=add, scale=lambda c, F: PiecewiseLinear(F.u, F.values * c),
        norm=lambda F: _max_abs(F.values), algebra=A, tau=tau, box_total=one, closed_form=closed,
        lift_batch=lift_batch, delta_batch=delta_batch, unpack=unpack,
    )


def antiderive(f: StepFunction, u_out: Optional[int] = None) -> PiecewiseLinear:
    """Running integral ``x -> integral_0^x f`` as breakpoint values."""
    if f.n != 1:
        raise UnsupportedConfiguration("antiderivatives need a single axis")
    F = theta(f, antiderivative_target(f.backend))
    return F if u_out is None else F.refine_to(u_out)


def weak_derivative(F: PiecewiseLinear) -> StepFunction:
    """Cellwise slopes of ``F`` at its own level."""
    vals = F.values
    slopes = (vals[1:] - vals[:-1]) * 2 ** F.u
    backend = Backend.RATIONAL if vals.dtype == object else (
        Backend.COMPLEX if np.iscomplexobj(vals) else Backend.FLOAT)
    return StepFunction(1, F.u, slopes, backend)


# -- Fourier coefficients ----------------------------------------------------------------


def fourier_coefficient(f, k: int, u: int = 12, vectorized: bool = False) -> complex:
    """``c_k = integral_0^1 f(x) exp(-2 pi i k x) dx`` as two real integrals.

    ``f`` is a step function on ``[0, 1]`` or a real sampler. Cosine and
    sine are sampled at cell midpoints at level ``max(u, f.u)``.
    """
    bm = BoxMeasure.lebesgue(1, 0.0, 1.0)
    if isinstance(f, StepFunction):
        if f.n != 1:
            raise UnsupportedConfiguration("Fourier coefficients need a single axis")
        coeffs = f.coeffs.astype(float) if f.backend is Backend.RATIONAL else f.coeffs
        u = max(u, f.u)
        fs = refine_to(StepFunction(1, f.u, coeffs, Backend.FLOAT), u)
    else:
        fs = sample(f, bm, u, "midpoint", vectorized, Backend.FLOAT)
    w = 2 * np.pi * k
    cos = sample(lambda x: np.cos(w * x), bm, u, "midpoint", True, Backend.FLOAT)
    sin = sample(lambda x: np.sin(w * x), bm, u, "midpoint", True, Backend.FLOAT)
    t = integration_target(bm, backend=Backend.FLOAT)
    re = theta(fs * cos, t)
    im = -theta(fs * sin, t)
    return complex(re, im)


# -- polynomials ------------------------------------------------------------------------


def poly_eval(coeffs: Sequence, x):
    return np.polynomial.polynomial.polyval(x, np.asarray(coeffs, dtype=float))


def poly_norm(coeffs: Sequence, p=1, bm: Optional[BoxMeasure] = None, **opts):
    """``(integral of |P|**p) ** (1/p)`` against ``bm`` (Lebesgue on [0, 1] by default)."""
    if p < 1:
        raise InvalidP(f"p must be >= 1, got {p}")
    bm = bm or BoxMeasure.lebesgue(1, 0.0, 1.0)
    if bm.n != 1:
        raise UnsupportedConfiguration("poly_norm works on a single axis")
    opts.setdefault("vectorized", True)
    value, report = integrate_report(lambda x: np.abs(poly_eval(coeffs, x)) ** p, bm, **opts)
    return float(value) ** (1.0 / p), report


def sampling_l1_error(coeffs: Sequence, u: int, convention: str = "midpoint") -> float:
    """Exact ``L1`` distance on ``[0, 1]`` between ``P`` and its level-``u`` sample.

    On each cell the difference ``P - c`` is integrated piecewise between
    its real roots, so the result is exact up to float rounding.
    """
    P = np.polynomial.Polynomial(np.asarray(coeffs, dtype=float))
    bm = BoxMeasure.lebesgue(1, 0.0, 1.0)
    pts = bm.schemes[0].points(u)
    lo, hi = pts[:-1], pts[1:]
    c = P(bm.schemes[0].representatives(u, convention))
    Q = P.integ()
    deg = P.degree()
    if deg <= 0:
        return 0.0
    # real roots of P - c per cell via batched companion matrices
    top = P.coef[-1]
    base = P.coef[:-1] / top
    comp = np.zeros((lo.size, deg, deg))
    if deg > 1:
        comp[:, 1:, :-1] = np.eye(deg - 1)
    comp[:, :, -1] = -np.broadcast_to(base, (lo.size, deg))
    comp[:, 0, -1] = -(P.coef[0] - c) / top
    roots = np.linalg.eigvals(comp)
    real = np.where(np.abs(roots.imag) < 1e-12, roots.real, np.nan)
    inside = np.where((real > lo[:, None]) & (real < hi[:, None]), real, np.nan)
    knots = np.sort(np.concatenate([lo[:, None], inside, hi[:, None]], axis=1), axis=1)
    knots = np.where(np.isnan(knots), hi[:, None], knots)
    vals = Q(knots) - c[:, None] * knots
    pieces = np.abs(np.diff(vals, axis=1))
    return float(pieces.sum())


__all__ = [
    "PiecewiseLinear", "antiderivative_target", "check_antiderivative_setting", "antiderive", "direct_sum", "fourier_coefficient",
    "integrate", "integrate_report", "integration_target", "kappa", "mean_target", "moment_target",
    "poly_eval", "poly_norm", "sampling_l1_error", "weak_derivative", "zero_target",
]
