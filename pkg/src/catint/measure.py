"""Atomless measures on boxes, built from per-axis distribution functions.

Every distribution function here is a polynomial ``F`` that is
nondecreasing on its interval ``[a, b]``; the measure of ``[x, y]`` is
``F(y) - F(x)``. Points carry no mass, so open and closed intervals agree.

Each axis is cut by a :class:`SplitScheme`: the split point ``xi`` and the
two affine order-preserving maps ``kappa_a: [a,b] -> [a,xi]`` and
``kappa_b: [a,b] -> [xi,b]``. Level ``u`` endpoints are obtained by
composing these maps, so cell ``s`` at level ``u`` is the image of the whole
interval under the word of maps spelled by the binary digits of ``s``
(most significant digit applied outermost).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Mapping, Sequence

import numpy as np

from .errors import (IndexOutOfRange, InvalidMeasure, OutOfDomain, ParseError,
                     UnsupportedConfiguration, ZeroTotalMeasure)
from .scalars import Backend, backend_of, join, parse_scalar


def _horner(coeffs, x):
    acc = coeffs[-1] * 0 + x * 0 + coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _derivative(coeffs):
    return tuple(i * c for i, c in enumerate(coeffs))[1:] or (coeffs[0] * 0,)


@dataclass(frozen=True, eq=False)
class DistributionMeasure:
    """Measure on ``[a, b]`` with polynomial distribution function.

    ``coeffs`` lists the coefficients of ``F`` in ascending degree.
    """

    coeffs: tuple
    a: object = 0
    b: object = 1
    kind: str = "poly"

    def __post_init__(self):
        if not self.coeffs:
            raise InvalidMeasure("empty distribution polynomial")
        backend = join(*(backend_of(c) for c in (*self.coeffs, self.a, self.b)))
        if backend is Backend.COMPLEX:
            raise InvalidMeasure("distribution functions must be real")
        coeffs = tuple(backend.coerce(c) for c in self.coeffs)
        a, b = backend.coerce(self.a), backend.coerce(self.b)
        if not a < b:
            raise InvalidMeasure(f"interval needs a < b, got [{a}, {b}]")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        self._check_monotone()
        if self.total == 0:
            raise ZeroTotalMeasure(f"F({b}) - F({a}) = 0")

    @classmethod
    def lebesgue(cls, a=0, b=1) -> "DistributionMeasure":
        return cls((0, 1), a, b, "lebesgue")

    @classmethod
    def power(cls, q, a=0, b=1) -> "DistributionMeasure":
        """``F(x) = x**q``; ``q`` must be a positive integer."""
        if isinstance(q, float) and q.is_integer():
            q = int(q)
        if isinstance(q, Fraction) and q.denominator == 1:
            q = int(q)
        if not isinstance(q, int) or q < 1:
            raise UnsupportedConfiguration(
                f"power measures need a positive integer exponent, got {q!r}")
        return cls((0,) * q + (1,), a, b, "power")

    @property
    def backend(self) -> Backend:
        return backend_of(self.a)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def F(self, x):
        return _horner(self.coeffs, x)

    @property
    def total(self):
        return self.F(self.b) - self.F(self.a)

    def _check_monotone(self):
        d1 = _derivative(self.coeffs)
        candidates = [self.a, self.b]
        d2 = _derivative(d1)
        if len(d2) > 1 or d2[0] != 0:
            roots = np.roots([float(c) for c in reversed(d2)]) if len(d2) > 1 else []
            candidates += [r.real for r in roots
                           if abs(r.imag) < 1e-12 and float(self.a) < r.real < float(self.b)]
        scale = max(1.0, max(abs(float(c)) for c in self.coeffs))
        for x in candidates:
            slope = _horner(d1, x)
            exact = isinstance(slope, Fraction)
            if (exact and slope < 0) or (not exact and slope < -1e-12 * scale):
                raise InvalidMeasure(f"distribution function decreases near x={float(x):g}")

    def interval_measure(self, x, y):
        return interval_measure(self, x, y)

    def normalized_coeffs(self) -> tuple:
        """Coefficients ``c_1..c_q`` of ``F(a + (b-a)s) - F(a)`` in ``s``.

        The constant term vanishes by construction and is dropped.
        """
        width = self.b - self.a
        out = [self.a * 0] * (self.degree + 1)
        for i, c in enumerate(self.coeffs):
            # c * (a + width*s)^i
            for j in range(i + 1):
                out[j] += c * math.comb(i, j) * self.a ** (i - j) * width ** j
        return tuple(out[1:])

    def to_json(self) -> dict:
        out = {"interval": {"a": str(self.a), "b": str(self.b)}}
        if self.kind == "lebesgue":
            out["measure"] = {"kind": "lebesgue"}
        elif self.kind == "power":
            out["measure"] = {"kind": "power", "q": self.degree}
        else:
            out["measure"] = {"kind": "poly", "coeffs": [str(c) for c in self.coeffs]}
        return out


def interval_measure(m: DistributionMeasure, x, y):
    """``mu([x, y]) = F(y) - F(x)`` for ``a <= x <= y <= b``."""
    if not (m.a <= x <= y <= m.b):
        raise OutOfDomain(f"[{x}, {y}] is not inside [{m.a}, {m.b}]")
    return m.F(y) - m.F(x)


@dataclass(frozen=True, eq=False)
class SplitScheme:
    a: object = 0
    b: object = 1
    xi: object = None

    def __post_init__(self):
        backend = join(*(backend_of(c) for c in (self.a, self.b) + ((self.xi,) if self.xi is not None else ())))
        a, b = backend.coerce(self.a), backend.coerce(self.b)
        xi = (a + b) / 2 if self.xi is None else backend.coerce(self.xi)
        if not a < xi < b:
            raise InvalidMeasure(f"split point {xi} must lie strictly inside ({a}, {b})")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "_cache", {})

    @property
    def backend(self) -> Backend:
        return backend_of(self.a)

    @property
    def rho(self):
        """Relative position of the split point inside ``[a, b]``."""
        return (self.xi - self.a) / (self.b - self.a)

    def kappa_a(self, x):
        return self.a + (x - self.a) * self.rho

    def kappa_b(self, x):
        return self.xi + (x - self.a) * (1 - self.rho)

    def points(self, u: int) -> np.ndarray:
        """The ``2**u + 1`` level-``u`` endpoints, increasing from ``a`` to ``b``."""
        cache = self._cache
        if u in cache:
            return cache[u]
        if u == 0:
            pts = self.backend.array([self.a, self.b])
        else:
            prev = self.points(u - 1)
            pts = np.concatenate([self.kappa_a(prev), self.kappa_b(prev)[1:]])
        pts.setflags(write=False)
        cache[u] = pts
        return pts

    def representatives(self, u: int, convention: str = "midpoint") -> np.ndarray:
        pts = self.points(u)
        if convention == "midpoint":
            return (pts[:-1] + pts[1:]) / 2
        if convention == "left":
            return pts[:-1]
        if convention == "right":
            return pts[1:]
        raise ValueError(f"unknown sampling convention {convention!r}")


@dataclass(frozen=True, eq=False)
class BoxMeasure:
    """Product of per-axis measures on the box ``prod_d [a_d, b_d]``."""

    measures: tuple
    schemes: tuple = ()
    _cache: dict = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        measures = tuple(self.measures)
        if not measures:
            raise InvalidMeasure("a box measure needs at least one axis")
        schemes = tuple(self.schemes) if self.schemes else tuple(SplitScheme(m.a, m.b) for m in measures)
        if len(schemes) != len(measures):
            raise InvalidMeasure("one split scheme per axis is required")
        for m, s in zip(measures, schemes):
            if m.a != s.a or m.b != s.b:
                raise InvalidMeasure("split scheme and measure disagree on the interval")
        object.__setattr__(self, "measures", measures)
        object.__setattr__(self, "schemes", schemes)

    @classmethod
    def lebesgue(cls, n: int = 1, a=0, b=1, xi=None) -> "BoxMeasure":
        return cls(tuple(DistributionMeasure.lebesgue(a, b) for _ in range(n)),
                   tuple(SplitScheme(a, b, xi) for _ in range(n)))

    @classmethod
    def uniform(cls, measure: DistributionMeasure, n: int = 1, xi=None) -> "BoxMeasure":
        return cls((measure,) * n, tuple(SplitScheme(measure.a, measure.b, xi) for _ in range(n)))

    @property
    def n(self) -> int:
        return len(self.measures)

    @property
    def backend(self) -> Backend:
        return join(*(m.backend for m in self.measures), *(s.backend for s in self.schemes))

    @property
    def total(self):
        """``mu(I_Lambda)``, the product of the axis totals."""
        return reduce(lambda x, y: x * y, (m.total for m in self.measures))

    @property
    def self_similar(self) -> bool:
        """True when every axis measure is affine (constant density).

        Only then does every dyadic cell carry the same share of its parent
        on every branch, which is what a fixed weighted average needs.
        """
        return all(m.degree <= 1 for m in self.measures)

    def axis_measures(self, d: int, u: int) -> np.ndarray:
        key = ("axis", d, u)
        if key not in self._cache:
            F = self.measures[d].F
            pts = self.schemes[d].points(u)
            vals = np.array([F(x) for x in pts], dtype=pts.dtype) if pts.dtype == object else F(pts)
            out = vals[1:] - vals[:-1]
            out.setflags(write=False)
            self._cache[key] = out
        return self._cache[key]

    def cell_measures(self, u: int) -> np.ndarray:
        """Tensor of shape ``(2**u,)*n`` with the measure of every level-``u`` cell."""
        key = ("cells", u)
        if key not in self._cache:
            out = self.axis_measures(0, u)
            for d in range(1, self.n):
                out = np.multiply.outer(out, self.axis_measures(d, u))
            out = np.asarray(out)
            out.setflags(write=False)
            self._cache[key] = out
        return self._cache[key]

    def cell_measure(self, u: int, index: Sequence[int]):
        return cell_measure(self, u, index)

    def block_weights(self) -> list:
        """Share of the total carried by each corner block, in corner order."""
        total = self.total
        return [w / total for w in self.cell_measures(1).reshape(-1)]

    def to_json(self) -> list:
        out = []
        for m, s in zip(self.measures, self.schemes):
            entry = m.to_json()
            entry["xi"] = str(s.xi)
            out.append(entry)
        return out


def cell_measure(bm: BoxMeasure, u: int, index: Sequence[int]):
    """Measure of the level-``u`` cell with the given per-axis indices."""
    index = tuple(index)
    if len(index) != bm.n:
        raise IndexOutOfRange(f"expected {bm.n} indices, got {len(index)}")
    if any(not 0 <= i < 2 ** u for i in index):
        raise IndexOutOfRange(f"cell {index} is outside level {u}")
    out = None
    for d, i in enumerate(index):
        m = bm.axis_measures(d, u)[i]
        out = m if out is None else out * m
    return out


# -- JSON ---------------------------------------------------------------------


def measure_from_json(spec: Mapping, backend: Backend = Backend.RATIONAL) -> tuple[DistributionMeasure, SplitScheme]:
    """Parse one axis: ``{"measure": {...}, "interval": {"a", "b"}, "xi"}``."""
    interval = spec.get("interval", {"a": "0", "b": "1"})
    num = Backend.FLOAT if backend is Backend.COMPLEX else backend
    a, b = parse_scalar(interval.get("a", "0"), num), parse_scalar(interval.get("b", "1"), num)
    mspec = spec.get("measure", {"kind": "lebesgue"})
    if isinstance(mspec, str):
        mspec = {"kind": mspec}
    kind = mspec.get("kind", "lebesgue")
    if kind == "lebesgue":
        m = DistributionMeasure.lebesgue(a, b)
    elif kind == "power":
        if "q" not in mspec:
            raise ParseError("power measure needs 'q'")
        q = parse_scalar(mspec["q"], Backend.RATIONAL)
        m = DistributionMeasure.power(q, a, b)
    elif kind == "poly":
        coeffs = tuple(parse_scalar(c, num) for c in mspec.get("coeffs", []))
        m = DistributionMeasure(coeffs, a, b, "poly")
    else:
        raise ParseError(f"unknown measure kind {kind!r}")
    xi = spec.get("xi")
    scheme = SplitScheme(a, b, None if xi is None else parse_scalar(xi, num))
    return m, scheme


def box_from_json(spec, n: int, backend: Backend = Backend.RATIONAL) -> BoxMeasure:
    """A single axis spec is replicated across ``n`` axes; a list gives one per axis."""
    if isinstance(spec, Mapping):
        spec = [spec] * n
    if len(spec) != n:
        raise ParseError(f"expected {n} axis measure specs, got {len(spec)}")
    pairs = [measure_from_json(s, backend) for s in spec]
    return BoxMeasure(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))
