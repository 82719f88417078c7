"""Finite-dimensional algebras given by structure constants.

An algebra of dimension ``n`` stores ``structure[i, j, k]`` with
``b_i * b_j = sum_k structure[i, j, k] * b_k``, unit coordinates and a
positive weight ``nu`` per basis element used by the p-norm. Elements are
coordinate vectors (numpy arrays in the algebra's backend).

Path algebras of quivers with monomial relations are built by
:func:`path_algebra_from_quiver`. Products follow composition order: the
written product ``beta*alpha`` traverses ``alpha`` first, so
``alpha * e_1 == alpha`` for an arrow ``alpha: 1 -> 2``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .errors import (DimensionMismatch, InfiniteDimensional, InvalidAlgebra,
                     InvalidP, MalformedQuiver, MalformedRelation)
from .report import ValidationReport
from .scalars import Backend, parse_scalar, scalar_norm


@dataclass(frozen=True, eq=False)
class Algebra:
    basis: tuple[str, ...]
    structure: np.ndarray
    unit: np.ndarray
    nu: tuple = ()
    backend: Backend = Backend.RATIONAL

    def __post_init__(self):
        n = len(self.basis)
        if n == 0:
            raise InvalidAlgebra("an algebra needs at least one basis element")
        if len(set(self.basis)) != n:
            raise InvalidAlgebra("duplicate basis labels")
        structure = np.asarray(self.structure, dtype=self.backend.dtype)
        if structure.shape != (n, n, n):
            raise InvalidAlgebra(f"structure constants must have shape {(n, n, n)}, got {structure.shape}")
        if self.backend is Backend.RATIONAL:
            structure = _to_fractions(structure)
        unit = self._coords(self.unit, n)
        nu = tuple(self.nu) if self.nu else (1,) * n
        if len(nu) != n:
            raise InvalidAlgebra("nu must give one weight per basis element")
        if any(w <= 0 for w in nu):
            raise InvalidAlgebra("nu must be positive on every basis element")
        structure.setflags(write=False)
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "unit", unit)
        object.__setattr__(self, "nu", nu)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _coords(self, coords, n=None) -> np.ndarray:
        n = self.dim if n is None else n
        if len(coords) != n:
            raise DimensionMismatch(f"expected {n} coordinates, got {len(coords)}")
        out = self.backend.array(list(coords))
        out.setflags(write=False)
        return out

    def element(self, coords=None, **named) -> np.ndarray:
        """Element from a coordinate sequence or from ``label=coefficient`` pairs."""
        if coords is not None:
            if isinstance(coords, Mapping):
                named = {**coords, **named}
            else:
                return self._coords(coords)
        values = [0] * self.dim
        for label, c in named.items():
            values[self.index(label)] = c
        return self._coords(values)

    def basis_element(self, label) -> np.ndarray:
        i = label if isinstance(label, int) else self.index(label)
        values = [0] * self.dim
        values[i] = 1
        return self._coords(values)

    def index(self, label: str) -> int:
        try:
            return self.basis.index(label)
        except ValueError:
            raise KeyError(f"unknown basis element {label!r}") from None

    def one(self) -> np.ndarray:
        return self.unit

    def zero(self) -> np.ndarray:
        return self._coords([0] * self.dim)

    def multiply(self, a, b) -> np.ndarray:
        a, b = self._coords(a), self._coords(b)
        out = np.einsum("i,j,ijk->k", a, b, self.structure)
        out.setflags(write=False)
        return out

    def norm_p(self, a, p=1):
        return algebra_norm_p(self, a, p)

    def describe(self, a) -> str:
        terms = [f"{c}*{label}" for c, label in zip(a, self.basis) if c != 0]
        return " + ".join(terms) if terms else "0"

    @classmethod
    def from_table(cls, basis: Sequence[str], table: Mapping, unit: Mapping | Sequence,
                   nu=(), backend: Backend = Backend.RATIONAL) -> "Algebra":
        """Build from a sparse multiplication table.

        ``table[(x, y)]`` is a mapping ``{label: coefficient}`` giving the
        product ``x * y``; missing pairs multiply to zero.
        """
        basis = tuple(basis)
        n = len(basis)
        structure = np.empty((n, n, n), dtype=backend.dtype)
        structure[...] = backend.zero()
        for (x, y), result in table.items():
            i, j = basis.index(x), basis.index(y)
            for label, c in result.items():
                structure[i, j, basis.index(label)] = backend.coerce(c)
        if isinstance(unit, Mapping):
            unit = [unit.get(label, 0) for label in basis]
        return cls(basis, structure, tuple(unit), tuple(nu), backend)


def _to_fractions(arr: np.ndarray) -> np.ndarray:
    out = np.empty(arr.shape, dtype=object)
    for idx in np.ndindex(arr.shape):
        out[idx] = Backend.RATIONAL.coerce(arr[idx])
    return out


def field_algebra(backend: Backend = Backend.RATIONAL, nu=1) -> Algebra:
    """The ground field as a one-dimensional algebra."""
    return Algebra(("1",), np.array([[[1]]]), (1,), (nu,), backend)


def multiply(A: Algebra, a, b) -> np.ndarray:
    return A.multiply(a, b)


def algebra_norm_p(A: Algebra, a, p=1):
    """Weighted p-norm ``(sum_i (|k_i| nu_i)^p)^(1/p)`` of the coordinates.

    Exact (a ``Fraction``) on the rational backend whenever ``p`` is an
    integer and the p-th root is rational; a float otherwise.
    """
    if p < 1:
        raise InvalidP(f"p must be >= 1, got {p}")
    a = A._coords(a)
    terms = [scalar_norm(k) * w for k, w in zip(a, A.nu)]
    return p_norm(terms, p)


def p_norm(terms, p):
    """``(sum t^p)^(1/p)`` for nonnegative terms, exact when possible."""
    if p == 1:
        return sum(terms, start=type(terms[0])(0) if terms else 0)
    if all(isinstance(t, (Fraction, int)) for t in terms) and float(p).is_integer():
        p = int(p)
        total = sum(Fraction(t) ** p for t in terms)
        root = exact_root(total, p)
        if root is not None:
            return root
        return float(total) ** (1.0 / p)
    return float(sum(float(t) ** p for t in terms)) ** (1.0 / p)


def exact_root(x: Fraction, p: int):
    """Rational p-th root of a nonnegative rational, or None if irrational."""
    x = Fraction(x)
    num, den = _int_root(x.numerator, p), _int_root(x.denominator, p)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _int_root(m: int, p: int):
    if m < 0:
        return None
    if p == 2:
        r = math.isqrt(m)
    else:
        r = round(m ** (1.0 / p)) if m < 2 ** 1000 else _newton_root(m, p)
        while r ** p > m:
            r -= 1
        while (r + 1) ** p <= m:
            r += 1
    return r if r ** p == m else None


def _newton_root(m: int, p: int) -> int:
    x = 1 << (m.bit_length() // p + 1)
    while True:
        y = ((p - 1) * x + m // x ** (p - 1)) // p
        if y >= x:
            return x
        x = y


def validate_algebra(A: Algebra) -> ValidationReport:
    """Check associativity on all basis triples and the two unit laws."""
    report = ValidationReport(f"algebra {list(A.basis)}")
    basis = [A.basis_element(i) for i in range(A.dim)]
    products = [[A.multiply(x, y) for y in basis] for x in basis]
    for i, j, l in itertools.product(range(A.dim), repeat=3):
        left = A.multiply(products[i][j], basis[l])
        right = A.multiply(basis[i], products[j][l])
        if not _coords_equal(left, right):
            names = tuple(A.basis[t] for t in (i, j, l))
            report.fail(f"associativity fails on {names}: "
                        f"({A.describe(left)}) != ({A.describe(right)})")
    for i, b in enumerate(basis):
        if not _coords_equal(A.multiply(A.unit, b), b):
            report.fail(f"left unit law fails on {A.basis[i]}")
        if not _coords_equal(A.multiply(b, A.unit), b):
            report.fail(f"right unit law fails on {A.basis[i]}")
    return report


def _coords_equal(x, y, tol=0) -> bool:
    return all(scalar_norm(p - q) <= tol for p, q in zip(x, y))


@dataclass(frozen=True, eq=False)
class TauMap:
    """A k-linear map from the algebra to the ground field, given on the basis."""

    algebra: Algebra
    images: tuple

    def __post_init__(self):
        if len(self.images) != self.algebra.dim:
            raise DimensionMismatch("tau needs one image per basis element")
        object.__setattr__(self, "images",
                           tuple(self.algebra.backend.coerce(x) for x in self.images))

    def __call__(self, a):
        a = self.algebra._coords(a)
        return sum((k * t for k, t in zip(a, self.images)), start=self.algebra.backend.zero())

    @classmethod
    def identity(cls, A: Algebra) -> "TauMap":
        if A.dim != 1:
            raise DimensionMismatch("the identity tau needs a one-dimensional algebra")
        return cls(A, (A.backend.one() / A.unit[0],))


def validate_tau(A: Algebra, t: TauMap) -> ValidationReport:
    """Check ``tau(1) = 1`` and ``tau(b_i b_j) = tau(b_i) tau(b_j)`` on basis pairs."""
    report = ValidationReport("tau")
    if t(A.unit) != 1:
        report.fail(f"tau(1) = {t(A.unit)} != 1")
    for i, j in itertools.product(range(A.dim), repeat=2):
        lhs = t(A.multiply(A.basis_element(i), A.basis_element(j)))
        rhs = t.images[i] * t.images[j]
        if lhs != rhs:
            report.fail(f"tau({A.basis[i]}*{A.basis[j]}) = {lhs} != {rhs} = "
                        f"tau({A.basis[i]})*tau({A.basis[j]})")
    return report


# -- quivers -----------------------------------------------------------------


@dataclass(frozen=True)
class Arrow:
    name: str
    source: str
    target: str


@dataclass(frozen=True)
class Quiver:
    """Vertices, arrows and monomial relations.

    Each relation is a list of arrow names written like a product, so
    ``["beta", "alpha"]`` is the path that traverses ``alpha`` then ``beta``.
    """

    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...] = ()
    relations: tuple[tuple[str, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "arrows", tuple(
            a if isinstance(a, Arrow) else Arrow(*a) for a in self.arrows))
        object.__setattr__(self, "relations", tuple(tuple(r) for r in self.relations))
        if len(set(self.vertices)) != len(self.vertices):
            raise MalformedQuiver("duplicate vertex names")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise MalformedQuiver("duplicate arrow names")
        for a in self.arrows:
            if a.source not in self.vertices or a.target not in self.vertices:
                raise MalformedQuiver(f"arrow {a.name} references an unknown vertex")
        arrows = self.arrow_map
        for rel in self.relations:
            if len(rel) < 2:
                raise MalformedRelation(f"relation {rel} must have length >= 2")
            if any(name not in arrows for name in rel):
                raise MalformedRelation(f"relation {rel} uses an unknown arrow")
            walk = [arrows[name] for name in reversed(rel)]
            for first, second in zip(walk, walk[1:]):
                if first.target != second.source:
                    raise MalformedRelation(f"relation {rel} is not a composable path")

    @property
    def arrow_map(self) -> dict[str, Arrow]:
        return {a.name: a for a in self.arrows}


@dataclass(frozen=True)
class _Path:
    start: str
    end: str
    walk: tuple[str, ...]  # arrow names in traversal order

    def label(self) -> str:
        if not self.walk:
            return f"e{self.start}"
        sep = "" if all(len(w) == 1 for w in self.walk) else "*"
        return sep.join(reversed(self.walk))


def _contains(walk: tuple[str, ...], sub: tuple[str, ...]) -> bool:
    k = len(sub)
    return any(walk[i:i + k] == sub for i in range(len(walk) - k + 1))


def quiver_paths(q: Quiver, max_paths: int = 4096) -> list[_Path]:
    """All paths avoiding every relation, trivial paths first, by length."""
    banned = [tuple(reversed(r)) for r in q.relations]
    paths = [_Path(v, v, ()) for v in q.vertices]
    frontier = list(paths)
    while frontier:
        nxt = []
        for p in frontier:
            for a in q.arrows:
                if a.source != p.end:
                    continue
                walk = p.walk + (a.name,)
                if any(walk[-len(b):] == b for b in banned if len(b) <= len(walk)):
                    continue
                nxt.append(_Path(p.start, a.target, walk))
                if len(paths) + len(nxt) > max_paths:
                    raise InfiniteDimensional(
                        f"more than {max_paths} paths survive the relations")
        paths.extend(nxt)
        frontier = nxt
    return paths


def path_algebra_from_quiver(q: Quiver, backend: Backend = Backend.RATIONAL,
                             max_paths: int = 4096, nu=None) -> Algebra:
    """Path algebra modulo the monomial ideal generated by the relations."""
    paths = quiver_paths(q, max_paths)
    banned = [tuple(reversed(r)) for r in q.relations]
    index = {(p.start, p.walk): i for i, p in enumerate(paths)}
    n = len(paths)
    structure = np.empty((n, n, n), dtype=backend.dtype)
    structure[...] = backend.zero()
    for i, p in enumerate(paths):
        for j, r in enumerate(paths):
            # p * r: traverse r, then p
            if r.end != p.start:
                continue
            walk = r.walk + p.walk
            if any(_contains(walk, b) for b in banned):
                continue
            structure[i, j, index[(r.start, walk)]] = backend.one()
    unit = [1 if not p.walk else 0 for p in paths]
    labels = tuple(p.label() for p in paths)
    return Algebra(labels, structure, tuple(unit), tuple(nu) if nu else (), backend)


def tau_from_vertex(A: Algebra, vertex) -> TauMap:
    """The tau sending the trivial path at ``vertex`` to 1 and every other path to 0."""
    label = f"e{vertex}"
    images = [1 if b == label else 0 for b in A.basis]
    if sum(images) != 1:
        raise KeyError(f"no trivial path for vertex {vertex!r}")
    return TauMap(A, tuple(images))


def diagonal_algebra(n: int, backend: Backend = Backend.RATIONAL) -> Algebra:
    """Product of ``n`` copies of the field: the path algebra of ``n`` isolated vertices."""
    return path_algebra_from_quiver(Quiver(tuple(str(i + 1) for i in range(n))), backend)


# -- JSON ---------------------------------------------------------------------


def algebra_from_json(spec: Mapping, backend: Backend = Backend.RATIONAL) -> tuple[Algebra, TauMap]:
    """Parse either the explicit structure-constant schema or the quiver schema."""
    if "quiver" in spec:
        qs = spec["quiver"]
        q = Quiver(tuple(qs["vertices"]),
                   tuple(Arrow(a["name"], str(a["from"]), str(a["to"])) for a in qs.get("arrows", [])),
                   tuple(tuple(r) for r in qs.get("relations", [])))
        A = path_algebra_from_quiver(q, backend)
        vertex = qs.get("tau_vertex", q.vertices[0])
        return A, tau_from_vertex(A, vertex)
    try:
        basis = tuple(spec["basis"])
        n = len(basis)
        structure = np.empty((n, n, n), dtype=backend.dtype)
        raw = spec["structure"]
        for i, j, k in itertools.product(range(n), repeat=3):
            structure[i, j, k] = parse_scalar(raw[i][j][k], backend)
        unit = tuple(parse_scalar(x, backend) for x in spec["unit"])
        nu = tuple(parse_scalar(x, Backend.RATIONAL) for x in spec.get("nu", [1] * n))
        A = Algebra(basis, structure, unit, nu, backend)
        tau_raw = spec.get("tau")
        if tau_raw is None:
            raise InvalidAlgebra("explicit algebras must supply 'tau'")
        tau = TauMap(A, tuple(parse_scalar(x, backend) for x in tau_raw))
    except (KeyError, IndexError, TypeError) as exc:
        raise InvalidAlgebra(f"malformed algebra spec: {exc}") from exc
    return A, tau


def checked(A: Algebra, tau: TauMap) -> tuple[Algebra, TauMap]:
    """Validate both and raise on the first problem found."""
    for report in (validate_algebra(A), validate_tau(A, tau)):
        if not report.ok:
            raise InvalidAlgebra(str(report))
    return A, tau


__all__ = [
    "Algebra", "Arrow", "Quiver", "TauMap", "algebra_from_json", "algebra_norm_p",
    "checked", "diagonal_algebra", "field_algebra", "multiply", "path_algebra_from_quiver",
    "quiver_paths", "tau_from_vertex", "validate_algebra", "validate_tau",
]
