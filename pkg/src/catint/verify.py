"""Randomized invariant suites.

Each suite draws ``cases`` random instances from a seeded generator and
returns the list of violations; an empty list means every case passed.
Everything runs on exact rationals unless a case says otherwise.
"""
from __future__ import annotations

import random
import zlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import Arrow, Quiver, TauMap, field_algebra, path_algebra_from_quiver, tau_from_vertex
from .engine import (random_scalar, random_step, theta, verify_morphism_square,
                     verify_uniqueness)
from .measure import BoxMeasure, DistributionMeasure
from .scalars import Backend
from .stepfn import (StepFunction, abs_, add, juxtapose, module_action, refine, split,
                     step_norm_p)
from .targets import (antiderivative_target, antiderive, direct_sum, integration_target,
                      kappa, mean_target, weak_derivative, zero_target)

R = Backend.RATIONAL


@dataclass
class SuiteResult:
    name: str
    cases: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        return f"{status} {self.name}: {self.cases - len(self.failures)}/{self.cases} cases, {len(self.failures)} violations"


def _rng(name: str, seed: int) -> random.Random:
    return random.Random(seed * 1_000_003 + zlib.crc32(name.encode()))


def sample_measures() -> dict[str, Callable[[int], BoxMeasure]]:
    """Named measure families used across suites, as functions of the dimension."""
    sq = DistributionMeasure.power(2)
    return {
        "lebesgue": lambda n: BoxMeasure.lebesgue(n),
        "square": lambda n: BoxMeasure.uniform(sq, n),
        "lebesgue-third": lambda n: BoxMeasure.lebesgue(n, xi=Fraction(1, 3)),
        "square-third": lambda n: BoxMeasure.uniform(sq, n, xi=Fraction(1, 3)),
        "cubic-shifted": lambda n: BoxMeasure.uniform(
            DistributionMeasure((0, 1, 0, 1), Fraction(-1), Fraction(2)), n),
    }


_BOXES: dict = {}


def _box(kind: str, n: int) -> BoxMeasure:
    key = (kind, n)
    if key not in _BOXES:
        _BOXES[key] = sample_measures()[kind](n)
    return _BOXES[key]


_TARGETS: dict = {}


def _integration(kind: str, n: int):
    key = (kind, n)
    if key not in _TARGETS:
        _TARGETS[key] = integration_target(_box(kind, n))
    return _TARGETS[key]


def triangular():
    """Path algebra of ``1 -> 2`` with the character picking vertex 2."""
    A = path_algebra_from_quiver(Quiver(("1", "2"), (Arrow("a", "1", "2"),)))
    return A, tau_from_vertex(A, "2")


# -- suites ---------------------------------------------------------------------------


def suite_measure(cases: int, seed: int) -> SuiteResult:
    rng = _rng("measure", seed)
    res = SuiteResult("measure", cases)
    kinds = list(sample_measures())
    for i in range(cases):
        kind, n, u = rng.choice(kinds), rng.randint(1, 2), rng.randint(0, 8)
        bm = _box(kind, n)
        cell = tuple(rng.randrange(2 ** u) for _ in range(n))
        children = [tuple(2 * c + b for c, b in zip(cell, bits)) for bits in _corners(n)]
        if bm.cell_measure(u, cell) != sum(bm.cell_measure(u + 1, ch) for ch in children):
            res.failures.append(f"case {i}: additivity fails for {kind}, n={n}, u={u}, cell={cell}")
        if u <= 6 and bm.cell_measures(u).sum() != bm.total:
            res.failures.append(f"case {i}: cells at level {u} do not sum to the total for {kind}")
    return res


def _corners(n: int):
    return [tuple((j >> (n - 1 - d)) & 1 for d in range(n)) for j in range(2 ** n)]


def _distinct_step(rng: random.Random, n: int, u: int, offset: int = 0) -> StepFunction:
    # pairwise distinct rationals, so any misplaced cell is detected
    size = 2 ** (n * u)
    perm = list(range(offset, offset + size))
    rng.shuffle(perm)
    return StepFunction(n, u, [Fraction(k, 3) for k in perm], R)


def suite_roundtrip(cases: int, seed: int) -> SuiteResult:
    rng = _rng("roundtrip", seed)
    res = SuiteResult("roundtrip", cases)
    for i in range(cases):
        n = rng.randint(1, 2)
        u = rng.randint(1, 8)
        f = _distinct_step(rng, n, u)
        parts = split(f)
        if juxtapose(parts) != f or not all(p.u == u - 1 for p in parts):
            res.failures.append(f"case {i}: juxtapose(split(f)) != f at n={n}, u={u}")
        size = 2 ** (n * (u - 1))
        fresh = [_distinct_step(rng, n, u - 1, j * size) for j in range(2 ** n)]
        back = split(juxtapose(fresh))
        if any(a.u != b.u or not (a.coeffs == b.coeffs).all() for a, b in zip(back, fresh)):
            res.failures.append(f"case {i}: split(juxtapose(parts)) != parts at n={n}, u={u}")
    return res


def suite_module(cases: int, seed: int) -> SuiteResult:
    rng = _rng("module", seed)
    res = SuiteResult("module", cases)
    A, tau = triangular()
    for i in range(cases):
        n, u = rng.randint(1, 2), rng.randint(0, 4)
        a = A.element([random_scalar(rng, R) for _ in range(A.dim)])
        parts = [random_step(rng, n, u, R) for _ in range(2 ** n)]
        lhs = juxtapose([module_action(A, tau, a, p) for p in parts])
        if lhs != module_action(A, tau, a, juxtapose(parts)):
            res.failures.append(f"case {i}: juxtapose does not commute with the algebra action")
        bm = _box(rng.choice(list(sample_measures())), n)
        f = parts[0]
        if step_norm_p(module_action(A, tau, a, f), bm, 1) != abs(tau(a)) * step_norm_p(f, bm, 1):
            res.failures.append(f"case {i}: ||a f||_1 != |tau(a)| ||f||_1")
    return res


def suite_norms(cases: int, seed: int) -> SuiteResult:
    rng = _rng("norms", seed)
    res = SuiteResult("norms", cases)
    for i in range(cases):
        n, u = rng.randint(1, 2), rng.randint(0, 5)
        bm = _box(rng.choice(list(sample_measures())), n)
        f, g = random_step(rng, n, u, R), random_step(rng, n, rng.randint(0, 5), R)
        if step_norm_p(refine(f), bm, 1) != step_norm_p(f, bm, 1):
            res.failures.append(f"case {i}: the 1-norm changes under refinement")
        p = rng.choice((1, 2, 3))
        lhs = step_norm_p(add(f, g), bm, p)
        rhs = step_norm_p(f, bm, p) + step_norm_p(g, bm, p)
        slack = 0 if p == 1 else 1e-12 * float(rhs)
        if lhs > rhs + slack:
            res.failures.append(f"case {i}: triangle inequality fails for p={p}")
    return res


def suite_morphism(cases: int, seed: int) -> SuiteResult:
    """Morphism squares for integration targets (all sample measures) and the antiderivative."""
    rng = _rng("morphism", seed)
    res = SuiteResult("morphism", cases)
    anti = antiderivative_target()
    kinds = list(sample_measures())
    for i in range(cases):
        if i % 2:
            u = rng.randint(0, 6)
            parts = [random_step(rng, 1, u, R) for _ in range(2)]
            if not verify_morphism_square(anti, parts):
                res.failures.append(f"case {i}: antiderivative square fails at u={u}")
            continue
        kind, n = rng.choice(kinds), rng.randint(1, 2)
        u = rng.randint(0, 6)
        parts = [random_step(rng, n, u, R) for _ in range(2 ** n)]
        if not verify_morphism_square(_integration(kind, n), parts):
            res.failures.append(f"case {i}: integration square fails for {kind}, n={n}, u={u}")
    return res


def suite_uniqueness(cases: int, seed: int) -> SuiteResult:
    rng = _rng("uniqueness", seed)
    res = SuiteResult("uniqueness", cases)
    anti = antiderivative_target()
    zeros = {n: zero_target(n) for n in (1, 2)}
    kinds = list(sample_measures())
    for i in range(cases):
        which = i % 3
        n = 1 if which == 1 else rng.randint(1, 2)
        f = random_step(rng, n, rng.randint(0, 6 if n == 1 else 4), R)
        if which == 0:
            kind = rng.choice(kinds)
            t = _integration(kind, n)
            ok = verify_uniqueness(f, t) and t.value(theta(f, t)) == direct_sum(f, _box(kind, n))
        elif which == 1:
            ok = verify_uniqueness(f, anti)
        else:
            ok = verify_uniqueness(f, zeros[n]) and theta(f, zeros[n]) == 0
        if not ok:
            res.failures.append(f"case {i}: evaluations disagree ({['integration', 'antiderivative', 'zero'][which]})")
    return res


def suite_linearity(cases: int, seed: int) -> SuiteResult:
    rng = _rng("linearity", seed)
    res = SuiteResult("linearity", cases)
    A, tau = triangular()
    for i in range(cases):
        kind, n = rng.choice(list(sample_measures())), rng.randint(1, 2)
        t = _integration(kind, n)
        f = random_step(rng, n, rng.randint(0, 4), R)
        g = random_step(rng, n, rng.randint(0, 4), R)
        a = A.element([random_scalar(rng, R) for _ in range(A.dim)])
        b = A.element([random_scalar(rng, R) for _ in range(A.dim)])
        lhs = theta(add(module_action(A, tau, a, f), module_action(A, tau, b, g)), t)
        rhs = t.add(t.scale(tau(a), theta(f, t)), t.scale(tau(b), theta(g, t)))
        if not t.equal(lhs, rhs):
            res.failures.append(f"case {i}: theta is not linear over the algebra ({kind}, n={n})")
        if not t.equal(theta(refine(f), t), theta(f, t)):
            res.failures.append(f"case {i}: theta changes under refinement ({kind}, n={n})")
    return res


def suite_calculus(cases: int, seed: int) -> SuiteResult:
    rng = _rng("calculus", seed)
    res = SuiteResult("calculus", cases)
    leb = _integration("lebesgue", 1)
    for i in range(cases):
        u = rng.randint(1, 10)
        f = random_step(rng, 1, u, R)
        F = antiderive(f)
        if weak_derivative(F) != f:
            res.failures.append(f"case {i}: weak_derivative(antiderive(f)) != f at u={u}")
        if leb.value(theta(f, leb)) != F.at_end():
            res.failures.append(f"case {i}: integral differs from the antiderivative at 1, u={u}")
        if u <= 6:
            g = random_step(rng, 1, u, R)
            G = antiderive(g)
            if weak_derivative(kappa(F, G)) != juxtapose([weak_derivative(F), weak_derivative(G)]):
                res.failures.append(f"case {i}: derivative does not turn kappa into juxtaposition")
    return res


def suite_inequalities(cases: int, seed: int) -> SuiteResult:
    """Triangle, positivity, Cauchy-Schwarz and step-norm triangle, ``cases`` draws each."""
    rng = _rng("inequalities", seed)
    res = SuiteResult("inequalities", cases)
    kinds = list(sample_measures())
    for i in range(cases):
        kind, n = rng.choice(kinds), rng.randint(1, 2)
        bm, t = _box(kind, n), _integration(kind, n)
        u = rng.randint(0, 5 if n == 1 else 3)
        f, g = random_step(rng, n, u, R), random_step(rng, n, u, R)

        def T(h):
            return t.value(theta(h, t))

        if abs(T(f)) > T(abs_(f)):
            res.failures.append(f"case {i}: |T(f)| > T(|f|)")
        if T(abs_(g)) < 0:
            res.failures.append(f"case {i}: integral of a nonnegative function is negative")
        if T(f * g) ** 2 > T(f * f) * T(g * g):
            res.failures.append(f"case {i}: Cauchy-Schwarz fails")
        if step_norm_p(f + g, bm, 1) > step_norm_p(f, bm, 1) + step_norm_p(g, bm, 1):
            res.failures.append(f"case {i}: step 1-norm triangle fails")
    return res


def suite_targets(cases: int, seed: int) -> SuiteResult:
    """Target axioms through :func:`validate_target` for every shipped target."""
    from .engine import validate_target

    res = SuiteResult("targets", cases)
    targets = [antiderivative_target(A=field_algebra(), tau=TauMap.identity(field_algebra()))]
    targets += [zero_target(1), zero_target(2)]
    A, tau = triangular()
    for kind in sample_measures():
        for n in (1, 2):
            targets.append(integration_target(_box(kind, n), A, tau))
            targets.append(mean_target(_box(kind, n), A, tau))
    trials = max(1, cases // len(targets))
    for t in targets:
        report = validate_target(t, trials, seed)
        res.failures += [f"{t.name}: {f}" for f in report.failures]
    return res


SUITES: dict[str, Callable[[int, int], SuiteResult]] = {
    "measure": suite_measure,
    "roundtrip": suite_roundtrip,
    "module": suite_module,
    "norms": suite_norms,
    "morphism": suite_morphism,
    "uniqueness": suite_uniqueness,
    "linearity": suite_linearity,
    "calculus": suite_calculus,
    "inequalities": suite_inequalities,
    "targets": suite_targets,
}


def run_suites(names, cases: int = 100, seed: int = 0) -> list[SuiteResult]:
    if isinstance(names, str):
        names = list(SUITES) if names == "all" else [names]
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise KeyError(f"unknown suite(s): {', '.join(unknown)}")
    return [SUITES[n](cases, seed) for n in names]


__all__ = ["SUITES", "SuiteResult", "run_suites", "sample_measures", "triangular"]

