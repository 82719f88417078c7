"""Step functions on the dyadic tower of a box.

A level-``u`` step function on an ``n``-dimensional box stores one
coefficient per dyadic cell, ``2**(u*n)`` in all. Cells are addressed by a
per-axis index whose binary digits, most significant first, record the
left/right choice at each successive split. The flat index puts axis 1 first
(C order on a tensor of shape ``(2**u,)*n``); this order is part of the
literal format and must not change.
"""
from __future__ import annotations

import itertools
import numbers
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .algebra import Algebra, TauMap, exact_root
from .errors import (BackendMismatch, CatIntError, DimensionMismatch, EvaluationFailure,
                     InvalidP, InvalidWeight, LevelOverflow, LevelZero, MixedBackends,
                     MixedLevels, OrderUnavailable, ParseError)
from .measure import BoxMeasure
from .scalars import Backend, backend_of, backend_of_dtype, format_scalar, parse_scalar

MAX_LEVELS = {1: 24, 2: 12, 3: 8}


def max_level(n: int) -> int:
    """Deepest level allowed for ``n`` axes (about ``2**24`` coefficients)."""
    return MAX_LEVELS.get(n, max(0, 24 // n))


def _check_level(n: int, u: int) -> None:
    if u < 0:
        raise ValueError(f"level must be nonnegative, got {u}")
    if u > max_level(n):
        raise LevelOverflow(f"level {u} exceeds the maximum {max_level(n)} for n={n}")


def _as_backend_array(values, backend: Backend) -> np.ndarray:
    if backend is Backend.RATIONAL:
        arr = np.asarray(values, dtype=object).reshape(-1)
        out = np.empty(arr.shape, dtype=object)
        for i, x in enumerate(arr):
            out[i] = backend.coerce(x)
        return out
    arr = np.asarray(values)
    if backend is Backend.FLOAT and np.iscomplexobj(arr):
        raise BackendMismatch("complex coefficients on the float backend")
    return arr.astype(backend.dtype).reshape(-1)


class StepFunction:
    """Immutable coefficient vector over the level-``u`` cells of an ``n``-box."""

    __slots__ = ("n", "u", "coeffs", "backend")

    def __init__(self, n: int, u: int, coeffs, backend: Backend | None = None, *, _trusted=False):
        if n < 1:
            raise DimensionMismatch(f"dimension must be positive, got {n}")
        _check_level(n, u)
        if _trusted:
            arr = coeffs
        else:
            if backend is None:
                backend = _infer_backend(coeffs)
            arr = _as_backend_array(coeffs, backend)
        if arr.size != 2 ** (u * n):
            raise DimensionMismatch(f"level {u} in dimension {n} needs {2 ** (u * n)} coefficients, got {arr.size}")
        arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "backend", backend if backend is not None else backend_of_dtype(arr.dtype))

    def __setattr__(self, name, value):
        raise AttributeError("StepFunction is immutable")

    @classmethod
    def _make(cls, n, u, arr, backend):
        return cls(n, u, arr, backend, _trusted=True)

    @classmethod
    def constant(cls, c, n: int = 1, u: int = 0, backend: Backend | None = None) -> "StepFunction":
        backend = backend or backend_of(c)
        c = backend.coerce(c)
        _check_level(n, u)
        return cls._make(n, u, np.full(2 ** (u * n), c, dtype=backend.dtype), backend)

    @classmethod
    def from_coeffs(cls, coeffs, n: int = 1, backend: Backend | None = None) -> "StepFunction":
        """Infer the level from the number of coefficients."""
        size = len(coeffs)
        u = (size.bit_length() - 1) // n
        if 2 ** (u * n) != size:
            raise DimensionMismatch(f"{size} coefficients is not 2**(u*{n}) for any u")
        return cls(n, u, coeffs, backend)

    @property
    def tensor(self) -> np.ndarray:
        return self.coeffs.reshape((2 ** self.u,) * self.n)

    @property
    def size(self) -> int:
        return self.coeffs.size

    def __repr__(self) -> str:
        shown = ", ".join(str(c) for c in self.coeffs[:8])
        more = ", ..." if self.size > 8 else ""
        return f"StepFunction(n={self.n}, u={self.u}, [{shown}{more}])"

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return ae_equal(self, other)

    __hash__ = None

    def __add__(self, other):
        return add(self, other)

    def __sub__(self, other):
        return add(self, other, -1)

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, StepFunction):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __abs__(self):
        return abs_(self)

    def refine(self, levels: int = 1) -> "StepFunction":
        return refine(self, levels)

    def to_literal(self) -> dict:
        return {"n": self.n, "u": self.u, "coeffs": [format_scalar(c) for c in self.coeffs]}


def _infer_backend(coeffs) -> Backend:
    arr = np.asarray(coeffs, dtype=object).reshape(-1)
    if arr.size == 0:
        return Backend.RATIONAL
    ranks = {backend_of(x) for x in arr}
    if Backend.COMPLEX in ranks:
        return Backend.COMPLEX
    if Backend.FLOAT in ranks:
        return Backend.FLOAT
    return Backend.RATIONAL


def from_literal(lit: dict, backend: Backend | None = None) -> StepFunction:
    """Parse ``{"n": 1, "u": 2, "coeffs": ["3", "3", "5", "5"]}``."""
    try:
        n, u, raw = int(lit["n"]), int(lit["u"]), list(lit["coeffs"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed step-function literal: {exc}") from exc
    if backend is None:
        if any(isinstance(c, dict) for c in raw):
            backend = Backend.COMPLEX
        elif any(isinstance(c, float) for c in raw):
            backend = Backend.FLOAT
        else:
            backend = Backend.RATIONAL
    return StepFunction(n, u, [parse_scalar(c, backend) for c in raw], backend)


# -- tower maps ----------------------------------------------------------------


def refine(f: StepFunction, levels: int = 1) -> StepFunction:
    """Embed ``f`` ``levels`` steps down the tower by copying each coefficient to its children."""
    if levels < 0:
        raise ValueError("cannot refine by a negative number of levels")
    if levels == 0:
        return f
    _check_level(f.n, f.u + levels)
    t = f.tensor
    rep = 2 ** levels
    for axis in range(f.n):
        t = np.repeat(t, rep, axis=axis)
    return StepFunction._make(f.n, f.u + levels, t.reshape(-1), f.backend)


def refine_to(f: StepFunction, u: int) -> StepFunction:
    if u < f.u:
        raise MixedLevels(f"cannot coarsen level {f.u} to {u}")
    return refine(f, u - f.u)


def align(*fs: StepFunction) -> list[StepFunction]:
    """Refine every operand to the deepest level among them."""
    if len({f.n for f in fs}) > 1:
        raise DimensionMismatch("operands live in different dimensions")
    if len({f.backend for f in fs}) > 1:
        raise MixedBackends("operands use different scalar backends")
    u = max(f.u for f in fs)
    return [refine_to(f, u) for f in fs]


def _interleave(n: int) -> tuple:
    # (2, m, 2, m, ...) -> (2, 2, ..., m, m, ...)
    return tuple(range(0, 2 * n, 2)) + tuple(range(1, 2 * n, 2))


def split(f: StepFunction) -> list[StepFunction]:
    """Break ``f`` into its ``2**n`` corner restrictions, each rescaled to the whole box.

    Corner ``j`` has binary digits (axis 1 first) telling whether the block
    sits at the low (0) or high (1) end of that axis.
    """
    if f.u == 0:
        raise LevelZero("a level-0 function has no finer corner blocks")
    n, m = f.n, 2 ** (f.u - 1)
    blocks = f.coeffs.reshape((2, m) * n).transpose(_interleave(n)).reshape(2 ** n, m ** n)
    return [StepFunction._make(n, f.u - 1, np.ascontiguousarray(b), f.backend) for b in blocks]


def juxtapose(parts: Sequence[StepFunction]) -> StepFunction:
    """Place ``parts[j]`` on corner block ``j`` of the box; inverse of :func:`split`."""
    parts = list(parts)
    if not parts:
        raise DimensionMismatch("juxtapose needs 2**n parts")
    n, u = parts[0].n, parts[0].u
    if len(parts) != 2 ** n:
        raise DimensionMismatch(f"juxtapose in dimension {n} needs {2 ** n} parts, got {len(parts)}")
    if any(p.n != n for p in parts):
        raise DimensionMismatch("parts live in different dimensions")
    if any(p.u != u for p in parts):
        raise MixedLevels("parts must share a level")
    if len({p.backend for p in parts}) > 1:
        raise MixedBackends("parts must share a scalar backend")
    _check_level(n, u + 1)
    m = 2 ** u
    stacked = np.stack([p.coeffs for p in parts]).reshape((2,) * n + (m,) * n)
    inverse = np.argsort(_interleave(n))
    out = stacked.transpose(inverse).reshape(-1)
    return StepFunction._make(n, u + 1, np.ascontiguousarray(out), parts[0].backend)


def ae_equal(f: StepFunction, g: StepFunction) -> bool:
    """Equality up to null sets: compare after refining both to a common level."""
    if f.n != g.n:
        return False
    f, g = refine_to(f, max(f.u, g.u)), refine_to(g, max(f.u, g.u))
    return bool(np.all(f.coeffs == g.coeffs))


# -- pointwise algebra -----------------------------------------------------------


def _coerce_scalar(c, backend: Backend):
    try:
        return backend.coerce(c)
    except BackendMismatch:
        raise
    except (TypeError, ValueError) as exc:
        raise BackendMismatch(f"cannot use {c!r} as a {backend.value} scalar") from exc


def add(f: StepFunction, g: StepFunction, b=1) -> StepFunction:
    """``f + b*g`` cellwise."""
    f, g = align(f, g)
    b = _coerce_scalar(b, f.backend)
    return StepFunction._make(f.n, f.u, f.coeffs + b * g.coeffs, f.backend)


def scale(f: StepFunction, c) -> StepFunction:
    c = _coerce_scalar(c, f.backend)
    return StepFunction._make(f.n, f.u, f.coeffs * c, f.backend)


def multiply(f: StepFunction, g: StepFunction) -> StepFunction:
    f, g = align(f, g)
    return StepFunction._make(f.n, f.u, f.coeffs * g.coeffs, f.backend)


def abs_(f: StepFunction) -> StepFunction:
    if not f.backend.ordered:
        raise OrderUnavailable("abs needs an ordered backend")
    return StepFunction._make(f.n, f.u, np.abs(f.coeffs), f.backend)


def pointwise(op: str, *args):
    """Dispatch by name: ``add``, ``scale``, ``multiply`` or ``abs``."""
    table = {"add": add, "scale": scale, "multiply": multiply, "abs": abs_}
    try:
        fn = table[op]
    except KeyError:
        raise ValueError(f"unknown pointwise operation {op!r}") from None
    return fn(*args)


def module_action(A: Algebra, tau: TauMap, a, f: StepFunction) -> StepFunction:
    """Let the algebra element ``a`` act on ``f`` through ``tau``."""
    if tau.algebra is not A:
        raise DimensionMismatch("tau belongs to a different algebra")
    t = tau(a)
    if backend_of(t) is not f.backend:
        try:
            t = f.backend.coerce(t)
        except BackendMismatch as exc:
            raise BackendMismatch(f"tau(a) = {t!r} does not fit the {f.backend.value} backend") from exc
    return scale(f, t)


# -- norms ------------------------------------------------------------------------


def _p_root(total, p):
    if isinstance(total, Fraction) and float(p).is_integer():
        root = exact_root(total, int(p))
        if root is not None:
            return root
    return float(total) ** (1.0 / p)


def step_norm_p(f: StepFunction, bm: BoxMeasure, p=1):
    """``(sum over cells of (|k| * mu(cell))**p) ** (1/p)`` on the stored level.

    For ``p > 1`` the value depends on the level the function is stored at.
    """
    if p < 1:
        raise InvalidP(f"p must be >= 1, got {p}")
    if bm.n != f.n:
        raise DimensionMismatch("measure and function disagree on the dimension")
    terms = np.abs(f.coeffs) * bm.cell_measures(f.u).reshape(-1)
    if p == 1:
        return terms.sum()
    if terms.dtype == object and float(p).is_integer():
        return _p_root(sum(t ** int(p) for t in terms), p)
    terms = terms.astype(float)
    return float(np.sum(terms ** p) ** (1.0 / p))


def averaging_weight(n: int) -> Fraction:
    """Averaging weight ``2**-n`` for the direct-sum norm."""
    return Fraction(1, 2 ** n)


def ratio_weight(bm: BoxMeasure):
    """Weight ``(mu(I) / mu(box))**n`` with ``I`` the common one-axis interval.

    Only defined when every axis carries the same measure.
    """
    first = bm.measures[0]
    if any(m.coeffs != first.coeffs or m.a != first.a or m.b != first.b for m in bm.measures[1:]):
        raise InvalidWeight("the interval-ratio weight needs identical axes; use the averaging weight")
    return (first.total / bm.total) ** bm.n


def direct_sum_norm(norms: Sequence, p=1, weight=1):
    """``(weight * sum ||x_i||**p) ** (1/p)``."""
    if p < 1:
        raise InvalidP(f"p must be >= 1, got {p}")
    if not weight > 0:
        raise InvalidWeight(f"weight must be positive, got {weight}")
    if any(x < 0 for x in norms):
        raise ValueError("norms must be nonnegative")
    exact = all(isinstance(x, (int, Fraction)) for x in (*norms, weight)) and float(p).is_integer()
    if exact:
        total = Fraction(weight) * sum(Fraction(x) ** int(p) for x in norms)
        return total if p == 1 else _p_root(total, p)
    total = float(weight) * sum(float(x) ** p for x in norms)
    return total ** (1.0 / p)


# -- sampling ------------------------------------------------------------------------


def _domain(domain) -> BoxMeasure:
    if isinstance(domain, BoxMeasure):
        return domain
    if isinstance(domain, numbers.Integral):
        return BoxMeasure.lebesgue(int(domain))
    raise TypeError(f"expected a BoxMeasure or a dimension, got {domain!r}")


def sample(g: Callable, domain, u: int, convention: str = "midpoint",
           vectorized: bool = False, backend: Backend | None = None) -> StepFunction:
    """Step function whose cell values are ``g`` at one representative point per cell.

    ``domain`` is a :class:`BoxMeasure` (its split schemes give the cells) or
    a dimension, meaning the unit cube cut at midpoints. ``g`` takes one
    argument per axis. With ``vectorized=True`` it is called once with
    arrays of coordinates.
    """
    bm = _domain(domain)
    n = bm.n
    _check_level(n, u)
    backend = backend or bm.schemes[0].backend
    reps = [s.representatives(u, convention) for s in bm.schemes]
    if backend is not Backend.RATIONAL:
        reps = [r.astype(float) for r in reps]
    size = 2 ** (u * n)
    try:
        if vectorized:
            grids = np.meshgrid(*reps, indexing="ij")
            vals = g(*(x.reshape(-1) for x in grids))
            vals = np.broadcast_to(np.asarray(vals, dtype=object if backend is Backend.RATIONAL else None), (size,))
        else:
            vals = [g(*pt) for pt in itertools.product(*reps)]
    except CatIntError:
        raise
    except Exception as exc:
        raise EvaluationFailure(f"sampler failed: {exc}") from exc
    return StepFunction(n, u, vals, backend)


def value_at(f: StepFunction, point: Sequence, domain=None):
    """Value of ``f`` at ``point``; points on a split take the cell to their right."""
    bm = _domain(domain if domain is not None else f.n)
    if len(point) != f.n:
        raise DimensionMismatch(f"expected {f.n} coordinates")
    idx = []
    for x, s in zip(point, bm.schemes):
        pts = s.points(f.u)
        if not pts[0] <= x <= pts[-1]:
            raise ValueError(f"{x} lies outside [{pts[0]}, {pts[-1]}]")
        i = int(np.searchsorted(pts, x, side="right")) - 1
        idx.append(min(i, 2 ** f.u - 1))
    return f.tensor[tuple(idx)]


__all__ = [
    "StepFunction", "abs_", "add", "ae_equal", "align", "direct_sum_norm", "from_literal",
    "juxtapose", "averaging_weight", "max_level", "module_action", "multiply", "ratio_weight",
    "pointwise", "refine", "refine_to", "sample", "scale", "split", "step_norm_p", "value_at",
]
