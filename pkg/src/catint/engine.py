"""Target objects and the unique structure-preserving map out of the step functions.

A target is a normed module ``V`` with a distinguished element ``v`` and a
map ``delta`` taking one element per corner block to an element, with
``delta(v, ..., v) == v``. The induced map ``theta`` sends the constant
``c`` to ``c * v`` and a level-``u`` function to ``delta`` applied to the
images of its ``2**n`` corner pieces.

Evaluation runs bottom-up: cells are regrouped so that siblings sit next to
each other, each level collapses ``2**n`` siblings with ``delta``, and the
whole tensor is processed in ``u`` passes. :func:`theta_recursive` keeps the
literal top-down recursion as a cross-check.

Targets may supply vectorized kernels (``lift_batch``, ``delta_batch``,
``unpack``) operating on element arrays of a fixed shape; otherwise each
group is handled one at a time through ``delta``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .algebra import Algebra, TauMap
from .errors import BackendMismatch, DimensionMismatch, TargetInvalid
from .measure import BoxMeasure
from .report import ValidationReport
from .scalars import Backend
from .stepfn import StepFunction, juxtapose, max_level, refine, sample, split


@dataclass(frozen=True, eq=False)
class TargetObject:
    name: str
    n: int
    backend: Backend
    v: object
    delta: Callable[[Sequence], object]
    zero: Callable[[], object]
    add: Callable[[object, object], object]
    scale: Callable[[object, object], object]
    norm: Callable[[object], object]
    algebra: Optional[Algebra] = None
    tau: Optional[TauMap] = None
    box_total: object = None
    closed_form: Optional[Callable[[StepFunction], object]] = None
    readout: Optional[Callable[[object], object]] = None
    lift_batch: Optional[Callable] = None
    delta_batch: Optional[Callable] = None
    unpack: Optional[Callable] = None
    meta: dict = field(default_factory=dict)

    def lambda_action(self, a, x):
        """Algebra element ``a`` acting on ``x`` through ``tau``."""
        if self.tau is None:
            raise TargetInvalid(f"target {self.name!r} has no algebra attached")
        return self.scale(self.tau(a), x)

    def distance(self, x, y):
        return self.norm(self.add(x, self.scale(self.backend.coerce(-1), y)))

    def equal(self, x, y, tol=0) -> bool:
        return self.distance(x, y) <= tol

    def value(self, x):
        """Scalar reading of an element, when the target defines one."""
        return x if self.readout is None else self.readout(x)

    @property
    def batched(self) -> bool:
        return self.lift_batch is not None and self.delta_batch is not None and self.unpack is not None


@dataclass
class ConvergenceReport:
    levels: list = field(default_factory=list)
    values: list = field(default_factory=list)
    distances: list = field(default_factory=list)
    converged: bool = False
    residual: object = None
    level_reached: Optional[int] = None


def _check_compatible(f: StepFunction, t: TargetObject) -> None:
    if f.n != t.n:
        raise DimensionMismatch(f"function has n={f.n}, target {t.name!r} has n={t.n}")
    if f.backend is not t.backend:
        raise BackendMismatch(f"function uses {f.backend.value}, target {t.name!r} uses {t.backend.value}")


def sibling_order(n: int, u: int) -> np.ndarray:
    """Permutation putting cells in level-major corner order.

    After permuting, the flat array reshapes to ``(2**n,)*u``: axis ``l`` is
    the corner chosen at split ``l+1``, with axis 1's bit most significant.
    """
    idx = np.arange(2 ** (n * u)).reshape((2,) * (n * u))
    # axes are (axis d, bit l) in d-major order; make them l-major
    order = [d * u + l for l in range(u) for d in range(n)]
    return idx.transpose(order).reshape(-1)


def theta(f: StepFunction, t: TargetObject):
    """Image of ``f`` under the unique map into ``t``."""
    _check_compatible(f, t)
    n, u = f.n, f.u
    coeffs = f.coeffs[sibling_order(n, u)] if u > 0 and n > 1 else f.coeffs
    k = 2 ** n
    if t.batched:
        xs = t.lift_batch(coeffs)
        for _ in range(u):
            xs = t.delta_batch(xs.reshape((-1, k) + xs.shape[1:]))
        return t.unpack(xs[0])
    xs = [t.scale(c, t.v) for c in coeffs]
    for _ in range(u):
        xs = [t.delta(xs[i:i + k]) for i in range(0, len(xs), k)]
    return xs[0]


def theta_recursive(f: StepFunction, t: TargetObject):
    """Literal top-down recursion: split, recurse on every piece, combine."""
    _check_compatible(f, t)
    if f.u == 0:
        return t.scale(f.coeffs[0], t.v)
    return t.delta([theta_recursive(p, t) for p in split(f)])


def theta_limit(sampler: Callable, t: TargetObject, bm: BoxMeasure, tol=None, u_min: int = 4,
                u_max: Optional[int] = None, convention: str = "midpoint",
                vectorized: bool = False):
    """Evaluate ``theta(sample(sampler, u))`` for increasing ``u`` until successive values settle.

    Stops at the first level whose distance to the previous iterate is at
    most ``tol``; the report records every level and distance. If the cap is
    reached first, ``converged`` is false and the last iterate is returned.
    """
    if tol is None:
        tol = 0 if t.backend.exact else 1e-6
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if u_max is None:
        u_max = max_level(t.n)
    if u_min > u_max:
        raise ValueError(f"u_min={u_min} exceeds u_max={u_max}")
    report = ConvergenceReport()
    prev = None
    for u in range(u_min, u_max + 1):
        x = theta(sample(sampler, bm, u, convention, vectorized, t.backend), t)
        report.levels.append(u)
        report.values.append(t.value(x))
        report.level_reached = u
        if prev is not None:
            d = t.distance(x, prev)
            report.distances.append(d)
            report.residual = d
            if d <= tol:
                report.converged = True
                return x, report
        prev = x
    return prev, report


def verify_morphism_square(t: TargetObject, parts: Sequence[StepFunction], tol=0) -> bool:
    """Does ``theta(juxtapose(parts)) == delta(theta(p) for p in parts)``?"""
    lhs = theta(juxtapose(parts), t)
    rhs = t.delta([theta(p, t) for p in parts])
    return t.equal(lhs, rhs, tol)


def verify_uniqueness(f: StepFunction, t: TargetObject, tol=0) -> bool:
    """Compare independent evaluations of ``theta(f)``.

    Bottom-up at the stored level, bottom-up one level finer, and the
    top-down recursion must agree; targets with a closed form are checked
    against it too.
    """
    base = theta(f, t)
    others = [theta_recursive(f, t)]
    if f.u < max_level(f.n):
        others.append(theta(refine(f), t))
    if t.closed_form is not None:
        others.append(t.closed_form(f))
    return all(t.equal(base, x, tol) for x in others)


# -- validation -------------------------------------------------------------------


def random_scalar(rng: random.Random, backend: Backend, bound: int = 9):
    if backend is Backend.RATIONAL:
        return Fraction(rng.randint(-bound, bound), rng.randint(1, bound))
    if backend is Backend.FLOAT:
        return rng.uniform(-bound, bound)
    return complex(rng.uniform(-bound, bound), rng.uniform(-bound, bound))


def random_step(rng: random.Random, n: int, u: int, backend: Backend, bound: int = 9) -> StepFunction:
    return StepFunction(n, u, [random_scalar(rng, backend, bound) for _ in range(2 ** (n * u))], backend)


def _random_element(t: TargetObject, rng: random.Random):
    return theta(random_step(rng, t.n, rng.randint(0, 2), t.backend), t)


def validate_target(t: TargetObject, trials: int = 20, seed: int = 0, tol=None) -> ValidationReport:
    """Check the target axioms and sample linearity and equivariance of ``delta``.

    ``delta(v, ..., v) == v`` is checked exactly (within ``tol`` on float
    backends). Continuity of ``delta`` cannot be checked from finitely many
    samples; it is a promise made by whoever builds the target.
    """
    if tol is None:
        tol = 0 if t.backend.exact else 1e-9
    report = ValidationReport(f"target {t.name!r}")
    k = 2 ** t.n
    try:
        if not t.equal(t.delta([t.v] * k), t.v, tol):
            report.fail("delta(v, ..., v) != v")
    except Exception as exc:
        report.fail(f"delta(v, ..., v) raised {type(exc).__name__}: {exc}")
        return report
    if t.box_total is not None and t.norm(t.v) > t.box_total + tol:
        report.fail(f"||v|| = {t.norm(t.v)} exceeds the box measure {t.box_total}")
    rng = random.Random(seed)
    for trial in range(trials):
        xs = [_random_element(t, rng) for _ in range(k)]
        ys = [_random_element(t, rng) for _ in range(k)]
        c = random_scalar(rng, t.backend)
        summed = t.delta([t.add(x, y) for x, y in zip(xs, ys)])
        if not t.equal(summed, t.add(t.delta(xs), t.delta(ys)), tol):
            report.fail(f"trial {trial}: delta is not additive")
        if not t.equal(t.delta([t.scale(c, x) for x in xs]), t.scale(c, t.delta(xs)), tol):
            report.fail(f"trial {trial}: delta is not homogeneous")
        if t.algebra is not None and t.tau is not None:
            coords = [random_scalar(rng, t.algebra.backend) for _ in range(t.algebra.dim)]
            a = t.algebra.element(coords)
            lhs = t.delta([t.lambda_action(a, x) for x in xs])
            if not t.equal(lhs, t.lambda_action(a, t.delta(xs)), tol):
                report.fail(f"trial {trial}: delta does not commute with the algebra action")
    return report


def require_valid(t: TargetObject, trials: int = 5) -> TargetObject:
    report = validate_target(t, trials)
    if not report.ok:
        raise TargetInvalid(str(report))
    return t


__all__ = [
    "ConvergenceReport", "TargetObject", "random_scalar", "random_step", "require_valid",
    "sibling_order", "theta", "theta_limit", "theta_recursive", "validate_target",
    "verify_morphism_square", "verify_uniqueness",
]
