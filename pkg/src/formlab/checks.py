"""Named invariant checks backing the `check` CLI command.

Each check returns a CheckResult with the measured deviation (lhs), the
reference value (rhs) and the tolerance it was held to, or None when it does
not apply to the scenario (wrong dimension, missing mesh, scalar fiber).
Randomized checks derive their generator from (seed, check index) so that a
report is byte-deterministic for a fixed config.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra as alg
from .calculus import (
    Cochain,
    REAL_SCALAR,
    action,
    apply_fiber_map,
    d,
    eom_residual,
    integrate,
    max_norm,
    star,
)
from .config import Scenario, build_field, representation_for
from .defect import (
    ChargedOperator,
    DefectMove,
    DefectOperator,
    apply_defect,
    charge_eom,
    charge_trivial,
)
from .errors import ConfigError, DegreeError
from .graded import GradedMorphism, compose, inverse, primitive_morphism, represent
from .mesh import Chain, Cobordism, boundary, named_cycle
from .dsl import Diagnostic, parse, typecheck


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    lhs: float
    rhs: float
    tolerance: float


def quaternion_elements() -> list:
    """The quaternion subgroup {+-1, +-i, +-j, +-k} embedded in U(2)."""
    i = np.array([[1j, 0], [0, -1j]])
    j = np.array([[0, 1], [-1, 0]], dtype=np.complex128)
    k = i @ j
    units = [np.eye(2, dtype=np.complex128), i, j, k]
    return [alg.GroupElement("U2", s * u) for u in units for s in (1, -1)]


def groupoid_law_violations(elements, tol: float = 1e-12) -> int:
    """Count groupoid-law failures over the closure of the given elements.

    Checks composability bookkeeping, identity neutrality, two-sided
    inverses, and associativity over all composable triples.
    """
    group = elements[0].group
    e = alg.identity(group)
    morphisms = [
        GradedMorphism(g, s, sh, primitive=(sh == 1) != g.is_identity())
        for g in elements
        for s in (0, 1)
        for sh in (0, 1)
    ]
    violations = 0
    for m in morphisms:
        left = compose(GradedMorphism(e, m.target, 0, primitive=True), m)
        right = compose(m, GradedMorphism(e, m.source, 0, primitive=True))
        if not (left.matches(m, tol) and right.matches(m, tol)):
            violations += 1
        inv = inverse(m)
        idm = compose(inv, m)
        if not idm.matches(GradedMorphism(e, m.source, 0, primitive=True), tol):
            violations += 1
        idm2 = compose(m, inv)
        if not idm2.matches(GradedMorphism(e, m.target, 0, primitive=True), tol):
            violations += 1
    composable = 0
    for a in morphisms:
        for b in morphisms:
            defined = a.target == b.source
            try:
                compose(b, a)
                if not defined:
                    violations += 1
            except DegreeError:
                if defined:
                    violations += 1
                continue
            if not defined:
                continue
            for c in morphisms:
                if b.target != c.source:
                    continue
                composable += 1
                lhs = compose(c, compose(b, a))
                rhs = compose(compose(c, b), a)
                if not lhs.matches(rhs, tol):
                    violations += 1
    assert composable > 0
    return violations


@dataclass
class _Ctx:
    scenario: Scenario
    field: Cochain | None
    tolerances: dict
    seed: int

    def rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, index])

    @property
    def complex(self):
        return self.scenario.complex


def _check_boundary_squared(ctx: _Ctx):
    cx = ctx.complex
    if cx is None:
        return None
    worst = 0.0
    for p in range(2, cx.d + 1):
        prod = cx.boundary_matrix(p - 1) @ cx.boundary_matrix(p)
        if prod.nnz:
            worst = max(worst, float(np.max(np.abs(prod.data))))
    return CheckResult("boundary_squared_zero", worst == 0.0, worst, 0.0, 0.0)


def _check_coboundary_squared(ctx: _Ctx):
    cx = ctx.complex
    if cx is None:
        return None
    rng = ctx.rng(1)
    worst = 0.0
    for p in range(0, cx.d - 1):
        vals = rng.integers(-5, 6, size=(cx.cell_count(p), 1)).astype(np.float64)
        psi = Cochain(cx, p, REAL_SCALAR, vals)
        worst = max(worst, max_norm(d(d(psi))))
    return CheckResult("coboundary_squared_zero", worst == 0.0, worst, 0.0, 0.0)


def _check_star_double(ctx: _Ctx):
    cx = ctx.complex
    if cx is None or cx.topology != "torus":
        return None
    rng = ctx.rng(2)
    tol = ctx.tolerances["star"]
    worst = 0.0
    for p in range(cx.d + 1):
        psi = Cochain.random_gaussian(cx, p, REAL_SCALAR, rng)
        sign = (-1) ** (p * (cx.d - p))
        worst = max(worst, max_norm(star(star(psi)) - sign * psi))
    return CheckResult("star_double_identity", worst <= tol, worst, 0.0, tol)


def _check_stokes(ctx: _Ctx):
    cx = ctx.complex
    if cx is None:
        return None
    rng = ctx.rng(3)
    tol = ctx.tolerances["check"]
    worst = 0.0
    for p in range(cx.d):
        for _ in range(20):
            psi = Cochain.random_gaussian(cx, p, REAL_SCALAR, rng)
            n = cx.cell_count(p + 1)
            cells = rng.choice(n, size=min(8, n), replace=False)
            sigma = Chain(cx, p + 1, {int(c): int(rng.integers(1, 4)) for c in cells})
            lhs = integrate(d(psi), sigma)
            rhs = integrate(psi, boundary(sigma))
            worst = max(worst, abs(lhs - rhs) / (1.0 + abs(lhs)))
    return CheckResult("stokes_adjointness", worst <= tol, worst, 0.0, tol)


def _check_gram(ctx: _Ctx):
    a = ctx.scenario.algebra
    tol = ctx.tolerances["check"]
    gens = a.generators
    gram = np.array(
        [[np.trace(x.conj().T @ y).real for y in gens] for x in gens]
    )
    worst = float(np.max(np.abs(gram - np.eye(a.dim))))
    return CheckResult("generator_gram_identity", worst <= tol, worst, 0.0, tol)


def _check_closure(ctx: _Ctx):
    a = ctx.scenario.algebra
    tol = ctx.tolerances["check"]
    worst = 0.0
    for x in a.generators:
        for y in a.generators:
            m = x @ y - y @ x
            coeffs = [np.trace(g.conj().T @ m).real for g in a.generators]
            recon = np.tensordot(np.array(coeffs), a.generators, axes=1)
            worst = max(worst, float(np.max(np.abs(m - recon))))
    return CheckResult("bracket_closure", worst <= tol, worst, 0.0, tol)


def _check_ad_invariance(ctx: _Ctx):
    a = ctx.scenario.algebra
    tol = ctx.tolerances["check"]
    rng = ctx.rng(6)
    worst = 0.0
    for _ in range(100):
        g = alg.random_group_element(a, rng)
        x = alg.random_element(a, rng)
        y = alg.random_element(a, rng)
        dev = abs(alg.pairing(alg.adjoint(g, x), alg.adjoint(g, y)) - alg.pairing(x, y))
        worst = max(worst, dev)
    return CheckResult("adjoint_invariance", worst <= tol, worst, 0.0, tol)


def _check_action_invariance(ctx: _Ctx):
    if ctx.field is None or ctx.field.degree >= ctx.complex.d:
        return None
    if ctx.scenario.fiber.kind == "real_scalar":
        return None
    tol = ctx.tolerances["check"]
    rng = ctx.rng(7)
    rep = representation_for(ctx.scenario)
    g = alg.random_group_element(ctx.scenario.algebra, rng)
    s0 = action(ctx.field)
    s1 = action(apply_fiber_map(ctx.field, rep.matrix(g)))
    worst = abs(s1 - s0) / (1.0 + abs(s0))
    return CheckResult("action_global_invariance", worst <= tol, worst, 0.0, tol)


def _check_trivial_current(ctx: _Ctx):
    if ctx.field is None or ctx.field.degree + 2 > ctx.complex.d:
        return None
    tol = ctx.tolerances["exact"]
    worst = max_norm(d(d(ctx.field)))
    return CheckResult("trivial_current_closed", worst <= tol, worst, 0.0, tol)


def _applicable_charges(ctx: _Ctx) -> bool:
    cx = ctx.complex
    return (
        cx is not None
        and cx.d == 3
        and cx.topology == "torus"
        and ctx.field is not None
        and ctx.field.degree == 1
    )


def _check_charge_homology(ctx: _Ctx):
    if not _applicable_charges(ctx):
        return None
    cx = ctx.complex
    tol = ctx.tolerances["check"]
    patch = Chain.from_cells(
        cx,
        [(cx.cell(2, cx.cell_index(2, (i, j, 0), (0, 1))), 1) for i in range(2) for j in range(2)],
    )
    bump = Chain(cx, 3, {cx.cell_index(3, (0, 0, 0), (0, 1, 2)): 1})
    moved = patch + boundary(bump)
    q0 = np.atleast_1d(charge_eom(ctx.field, patch))
    q1 = np.atleast_1d(charge_eom(ctx.field, moved))
    worst = float(np.max(np.abs(q1 - q0)) / (1.0 + np.max(np.abs(q0))))
    return CheckResult("charge_homology_invariance", worst <= tol, worst, 0.0, tol)


def _check_flux_identity(ctx: _Ctx):
    if not _applicable_charges(ctx):
        return None
    cx = ctx.complex
    tol = ctx.tolerances["check"]
    loop0 = named_cycle(cx, {"kind": "loop", "axis": 0, "offsets": [0, 0]})
    loop1 = named_cycle(cx, {"kind": "loop", "axis": 0, "offsets": [1, 0]})
    strip = Chain(
        cx, 2, {cx.cell_index(2, (i, 0, 0), (0, 1)): -1 for i in range(cx.shape[0])}
    )
    assert boundary(strip) == loop1 - loop0
    delta = np.atleast_1d(charge_trivial(ctx.field, loop1)) - np.atleast_1d(
        charge_trivial(ctx.field, loop0)
    )
    flux = np.atleast_1d(integrate(eom_residual(ctx.field), strip))
    scale = 1.0 + float(np.max(np.abs(flux)))
    worst = float(np.max(np.abs(delta - flux))) / scale
    return CheckResult("trivial_charge_flux_identity", worst <= tol, worst, 0.0, tol)


def _check_defect_gating(ctx: _Ctx):
    if not _applicable_charges(ctx) or ctx.scenario.fiber.kind == "real_scalar":
        return None
    cx = ctx.complex
    rep = representation_for(ctx.scenario)
    g = alg.exponential(ctx.scenario.algebra.element([0.7] + [0.0] * (ctx.scenario.algebra.dim - 1)))
    gamma = named_cycle(cx, {"kind": "loop", "axis": 0, "offsets": [0, 0]})
    charged = ChargedOperator(gamma, ctx.field, 0)
    z0 = 1 if cx.shape[2] - 1 != 1 else 0  # keep the sweep away from gamma
    support = named_cycle(cx, {"kind": "loop", "axis": 1, "offsets": [0, z0]})
    filling = Chain(
        cx, 2, {cx.cell_index(2, (0, j, z0), (1, 2)): 1 for j in range(cx.shape[1])}
    )
    defect = DefectOperator(g, 0, support)
    move = DefectMove(defect, Cobordism(cx, filling, support))
    result = apply_defect(defect, charged, move, rep)
    passed = result is charged
    return CheckResult("defect_topological_gating", passed, 0.0 if passed else 1.0, 0.0, 0.0)


def _check_groupoid(ctx: _Ctx):
    violations = float(groupoid_law_violations(quaternion_elements()))
    return CheckResult("groupoid_quaternion_laws", violations == 0.0, violations, 0.0, 0.0)


def _check_composition_contract(ctx: _Ctx):
    tol = ctx.tolerances["check"]
    rng = ctx.rng(12)
    a = ctx.scenario.algebra
    rep = representation_for(ctx.scenario)
    violations = 0
    worst = 0.0
    for _ in range(200):
        g = alg.random_group_element(a, rng)
        h = alg.random_group_element(a, rng)
        s = int(rng.integers(0, 2))
        try:
            compose(primitive_morphism(g, s), primitive_morphism(h, s))
            violations += 1  # same-degree non-identity pairs must not compose
        except DegreeError:
            pass
        first = primitive_morphism(h, s)
        second = primitive_morphism(g, first.target)
        total = compose(second, first)
        dev = np.max(
            np.abs(
                represent(total, rep).matrix
                - represent(second, rep).matrix @ represent(first, rep).matrix
            )
        )
        worst = max(worst, float(dev))
    passed = violations == 0 and worst <= tol
    return CheckResult("graded_composition_contract", passed, worst, 0.0, tol)


def _check_dsl(ctx: _Ctx):
    failures = 0
    corpus = ["g[0]", "g[1] . h[0]", "e[0] . g[1] . h[0] . k[1]", "a_1[0] .  b2[1]"]
    for src in corpus:
        expr = parse(src)
        if isinstance(expr, Diagnostic):
            failures += 1
            continue
        again = parse(expr.to_source())
        if isinstance(again, Diagnostic) or again != expr:
            failures += 1
    bad = parse("g[0] . h[0]")
    table = {"g": alg.random_group_element(ctx.scenario.algebra, ctx.rng(13)),
             "h": alg.random_group_element(ctx.scenario.algebra, ctx.rng(14))}
    chain = typecheck(bad, table)
    if not (isinstance(chain, Diagnostic) and chain.kind == "degree_mismatch" and chain.offset == 7):
        failures += 1
    return CheckResult("dsl_roundtrip", failures == 0, float(failures), 0.0, 0.0)


_REGISTRY = [
    ("boundary_squared_zero", _check_boundary_squared),
    ("coboundary_squared_zero", _check_coboundary_squared),
    ("star_double_identity", _check_star_double),
    ("stokes_adjointness", _check_stokes),
    ("generator_gram_identity", _check_gram),
    ("bracket_closure", _check_closure),
    ("adjoint_invariance", _check_ad_invariance),
    ("action_global_invariance", _check_action_invariance),
    ("trivial_current_closed", _check_trivial_current),
    ("charge_homology_invariance", _check_charge_homology),
    ("trivial_charge_flux_identity", _check_flux_identity),
    ("defect_topological_gating", _check_defect_gating),
    ("groupoid_quaternion_laws", _check_groupoid),
    ("graded_composition_contract", _check_composition_contract),
    ("dsl_roundtrip", _check_dsl),
]

CHECK_NAMES = [name for name, _ in _REGISTRY]


def run_checks(scenario: Scenario, names=None) -> list:
    """Run the named checks (all applicable ones by default)."""
    if names is None:
        names = scenario.checks
    explicit = not (names is None or names == "all" or names == ["all"])
    if not explicit:
        selected = CHECK_NAMES
    else:
        unknown = [n for n in names if n not in CHECK_NAMES]
        if unknown:
            raise ConfigError(f"unknown checks: {unknown}")
        selected = [n for n in CHECK_NAMES if n in names]
    field = build_field(scenario) if scenario.complex is not None else None
    ctx = _Ctx(scenario, field, scenario.tolerances, scenario.seed)
    results = []
    table = dict(_REGISTRY)
    for name in selected:
        result = table[name](ctx)
        if result is None:
            if explicit:
                raise ConfigError(f"check {name!r} does not apply to this scenario")
            continue
        results.append(result)
    return results
