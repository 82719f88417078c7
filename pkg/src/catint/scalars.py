"""Scalar field backends.

Scalars are plain Python numbers: :class:`fractions.Fraction` for the exact
rational backend, ``float`` for binary64 and ``complex`` for the complex
backend (a pair of binary64 reals). Only the rational and float backends
carry a total order.
"""
from __future__ import annotations

import enum
import math
import numbers
from fractions import Fraction

import gmpy2
import numpy as np

from .errors import BackendMismatch, OrderUnavailable, ParseError


class Backend(enum.Enum):
    RATIONAL = "rational"
    FLOAT = "float"
    COMPLEX = "complex"

    @property
    def ordered(self) -> bool:
        return self is not Backend.COMPLEX

    @property
    def dtype(self):
        return {Backend.RATIONAL: object, Backend.FLOAT: np.float64,
                Backend.COMPLEX: np.complex128}[self]

    @property
    def exact(self) -> bool:
        return self is Backend.RATIONAL

    def zero(self):
        return self.coerce(0)

    def one(self):
        return self.coerce(1)

    def coerce(self, x):
        """Convert ``x`` into this backend, refusing lossy conversions."""
        if self is Backend.RATIONAL:
            if isinstance(x, Fraction):
                return x
            if isinstance(x, numbers.Integral):
                return Fraction(int(x))
            if isinstance(x, str):
                return Fraction(x)
            raise BackendMismatch(f"cannot represent {x!r} exactly as a rational")
        if self is Backend.FLOAT:
            if isinstance(x, numbers.Complex) and not isinstance(x, numbers.Real):
                raise BackendMismatch(f"cannot represent complex {x!r} as a float")
            return float(x)
        return complex(x)

    def array(self, values) -> np.ndarray:
        """Build a numpy array holding ``values`` converted into this backend."""
        values = list(values) if not isinstance(values, np.ndarray) else values
        if self is Backend.RATIONAL:
            out = np.empty(len(values), dtype=object)
            for i, x in enumerate(values):
                out[i] = self.coerce(x)
            return out
        return np.asarray(values, dtype=self.dtype)


class Ordering(enum.Enum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


_RANK = {Backend.RATIONAL: 0, Backend.FLOAT: 1, Backend.COMPLEX: 2}


def backend_of(s) -> Backend:
    if isinstance(s, (Fraction, numbers.Integral)):
        return Backend.RATIONAL
    if isinstance(s, numbers.Real):
        return Backend.FLOAT
    if isinstance(s, numbers.Complex):
        return Backend.COMPLEX
    raise TypeError(f"not a scalar: {s!r}")


def backend_of_dtype(dtype) -> Backend:
    dtype = np.dtype(dtype)
    if dtype == object:
        return Backend.RATIONAL
    if np.issubdtype(dtype, np.complexfloating):
        return Backend.COMPLEX
    return Backend.FLOAT


def join(*backends: Backend) -> Backend:
    """Smallest backend able to hold values from every argument."""
    return max(backends, key=_RANK.__getitem__)


def scalar_norm(s):
    """Absolute value (complex modulus on the complex backend).

    Exact on rationals: the result is again a ``Fraction``.
    """
    if isinstance(s, numbers.Integral):
        return Fraction(abs(int(s)))
    if isinstance(s, Fraction):
        return abs(s)
    if isinstance(s, numbers.Real):
        return abs(float(s))
    return abs(complex(s))


def scalar_compare(a, b) -> Ordering:
    if not (backend_of(a).ordered and backend_of(b).ordered):
        raise OrderUnavailable("complex scalars carry no total order")
    if a < b:
        return Ordering.LESS
    if a > b:
        return Ordering.GREATER
    return Ordering.EQUAL


def ulp_close(x: float, y: float, ulps: int = 4) -> bool:
    """True when ``x`` and ``y`` differ by at most ``ulps`` units in the last place."""
    if x == y:
        return True
    scale = max(abs(x), abs(y))
    return abs(x - y) <= ulps * math.ulp(scale)


def parse_scalar(literal, backend: Backend = Backend.RATIONAL):
    """Parse a config/CLI scalar literal.

    Rationals are ``"p/q"`` strings, floats decimal strings, complex values
    ``{"re": x, "im": y}`` mappings. Decimal strings are read exactly on the
    rational backend.
    """
    if isinstance(literal, dict):
        try:
            re_, im = literal["re"], literal["im"]
        except KeyError as exc:
            raise ParseError(f"complex literal needs 're' and 'im': {literal!r}") from exc
        value = complex(float(re_), float(im))
        return backend.coerce(value) if backend is Backend.COMPLEX else _real_from_complex(value, backend)
    if isinstance(literal, bool):
        raise ParseError(f"not a scalar literal: {literal!r}")
    if isinstance(literal, (int, Fraction)):
        return backend.coerce(literal)
    if isinstance(literal, float):
        if backend is Backend.RATIONAL:
            return Fraction(repr(literal))
        return backend.coerce(literal)
    if isinstance(literal, str):
        text = literal.strip()
        try:
            if backend is Backend.RATIONAL:
                return Fraction(text)
            if "/" in text:
                return backend.coerce(float(Fraction(text)))
            return backend.coerce(float(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"bad scalar literal {literal!r}") from exc
    raise ParseError(f"not a scalar literal: {literal!r}")


def _real_from_complex(value: complex, backend: Backend):
    if value.imag != 0:
        raise BackendMismatch(f"complex literal {value} on a real backend")
    return parse_scalar(repr(value.real), backend)


def format_scalar(s):
    """JSON-friendly rendering: rationals as ``"p/q"`` strings, complex as a pair."""
    if isinstance(s, (Fraction, numbers.Integral)):
        return str(Fraction(s))
    if isinstance(s, numbers.Real):
        return float(s)
    c = complex(s)
    return {"re": c.real, "im": c.imag}


_to_mpq = np.vectorize(gmpy2.mpq, otypes=[object])


def to_mpq(arr) -> np.ndarray:
    """Copy of an object array of rationals as ``gmpy2.mpq`` (much faster arithmetic)."""
    arr = np.asarray(arr, dtype=object)
    return _to_mpq(arr) if arr.size else arr.copy()


def _mpq_to_fraction(x):
    return Fraction(int(x.numerator), int(x.denominator))


_from_mpq = np.vectorize(_mpq_to_fraction, otypes=[object])


def from_mpq(x):
    """Inverse of :func:`to_mpq`; scalars and arrays come back as ``Fraction``."""
    if isinstance(x, np.ndarray):
        return _from_mpq(x) if x.size else x.copy()
    return _mpq_to_fraction(x)
