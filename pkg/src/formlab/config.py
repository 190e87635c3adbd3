"""Scenario configuration loading and resolution.

A scenario is one JSON document with the keys mesh, algebra, field,
group_elements, charges, defects, compose, checks, tolerances and seed.
Every cross-reference is resolved here; malformed input raises ConfigError
with a message naming the offending key.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import algebra as alg
from .calculus import COMPLEX_PAIR, REAL_SCALAR, Cochain, FiberSpec, algebra_fiber, solve_free
from .errors import ConfigError, DomainError, FormlabError
from .graded import GroupoidRep
from .mesh import Chain, CubicalComplex, named_cycle

DEFAULT_TOLERANCES = {
    "check": 1e-12,
    "exact": 1e-13,
    "star": 1e-14,
    "solver": 1e-10,
}


@dataclass
class Scenario:
    complex: CubicalComplex | None
    algebra: alg.LieAlgebra
    fiber: FiberSpec
    field_degree: int
    field_init: dict
    group_elements: dict
    charges: list
    defects: list
    compose_source: str | None
    checks: list | None
    tolerances: dict
    seed: int
    u2_c2_map: np.ndarray | None = None
    base_dir: Path = field(default_factory=Path)


def load_scenario(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return scenario_from_dict(cfg, base_dir=path.parent)


def scenario_from_dict(cfg: dict, base_dir=Path(".")) -> Scenario:
    if not isinstance(cfg, dict):
        raise ConfigError("the config root must be a JSON object")
    known = {
        "mesh", "algebra", "field", "group_elements", "charges", "defects",
        "compose", "checks", "tolerances", "seed", "u2_c2_map",
    }
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")

    complex_ = _build_mesh(cfg.get("mesh")) if "mesh" in cfg else None
    algebra = alg.algebra_by_name(cfg.get("algebra", "so3"))

    field_cfg = cfg.get("field", {})
    if not isinstance(field_cfg, dict):
        raise ConfigError("'field' must be an object")
    field_degree = int(field_cfg.get("degree", 1))
    fiber = _build_fiber(field_cfg.get("fiber", "algebra"), algebra)
    if fiber.kind == "complex_pair" and algebra.name != "u2":
        raise ConfigError("the complex pair fiber needs the u2 scenario algebra")
    field_init = field_cfg.get("init", {"init": "zero"})
    if not isinstance(field_init, dict) or "init" not in field_init:
        raise ConfigError("'field.init' must be an object with an 'init' key")

    tolerances = dict(DEFAULT_TOLERANCES)
    for key, value in (cfg.get("tolerances") or {}).items():
        if key not in tolerances:
            raise ConfigError(f"unknown tolerance {key!r}")
        value = float(value)
        if value <= 0:
            raise ConfigError(f"tolerance {key!r} must be positive")
        tolerances[key] = value

    u2_map = None
    if cfg.get("u2_c2_map") is not None:
        u2_map = np.asarray(cfg["u2_c2_map"], dtype=np.float64)
        alg.c2_basis_map(u2_map)  # validates shape and invertibility

    group_elements = {}
    for name, spec in (cfg.get("group_elements") or {}).items():
        group_elements[name] = _build_group_element(name, spec, algebra)

    scenario = Scenario(
        complex=complex_,
        algebra=algebra,
        fiber=fiber,
        field_degree=field_degree,
        field_init=field_init,
        group_elements=group_elements,
        charges=list(cfg.get("charges") or []),
        defects=list(cfg.get("defects") or []),
        compose_source=cfg.get("compose"),
        checks=cfg.get("checks"),
        tolerances=tolerances,
        seed=int(cfg.get("seed", 0)),
        u2_c2_map=u2_map,
        base_dir=Path(base_dir),
    )
    _validate_requests(scenario)
    return scenario


def _build_mesh(spec) -> CubicalComplex:
    if not isinstance(spec, dict) or "shape" not in spec:
        raise ConfigError("'mesh' must be an object with a 'shape' key")
    try:
        return CubicalComplex(
            spec["shape"], spec.get("spacing"), spec.get("topology", "torus")
        )
    except FormlabError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad mesh spec: {exc}") from exc


def _build_fiber(name, algebra: alg.LieAlgebra) -> FiberSpec:
    if name == "algebra":
        return algebra_fiber(algebra)
    if name == "complex_pair":
        return COMPLEX_PAIR
    if name == "real_scalar":
        return REAL_SCALAR
    raise ConfigError(f"unknown fiber {name!r}")


def _build_group_element(name, spec, algebra: alg.LieAlgebra) -> alg.GroupElement:
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(f"group element {name!r} must be an object with a 'type'")
    try:
        if spec["type"] == "exp":
            source = alg.algebra_by_name(spec.get("algebra", algebra.name))
            if source is not algebra:
                raise ConfigError(
                    f"group element {name!r} uses algebra {source.name!r} but the "
                    f"scenario algebra is {algebra.name!r}"
                )
            return alg.exponential(source.element(np.asarray(spec["coeffs"], dtype=np.float64)))
        if spec["type"] == "matrix":
            rows = spec["rows"]
            matrix = np.array([[_complex_entry(v) for v in row] for row in rows])
            return alg.GroupElement(algebra.group, matrix)
    except FormlabError as exc:
        raise ConfigError(f"bad group element {name!r}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad group element {name!r}: {exc}") from exc
    raise ConfigError(f"group element {name!r}: unknown type {spec['type']!r}")


def _complex_entry(value):
    if isinstance(value, (int, float)):
        return complex(value, 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ConfigError(f"matrix entries must be numbers or [re, im] pairs, got {value!r}")


def parse_fiber_value(fiber: FiberSpec, raw) -> np.ndarray:
    """Parse one fiber value from its JSON form."""
    if fiber.kind == "real_scalar":
        if isinstance(raw, (list, tuple)):
            (raw,) = raw
        return np.array([float(raw)])
    if fiber.kind == "complex_pair":
        if not isinstance(raw, (list, tuple)) or len(raw) != 2:
            raise ConfigError(f"complex pair values need two entries, got {raw!r}")
        return np.array([_complex_entry(v) for v in raw])
    vals = np.asarray(raw, dtype=np.float64)
    if vals.shape != (fiber.components,):
        raise ConfigError(
            f"algebra values need {fiber.components} coefficients, got {raw!r}"
        )
    return vals


def resolve_chain(scenario: Scenario, spec) -> Chain:
    if scenario.complex is None:
        raise ConfigError("this command needs a 'mesh' entry in the config")
    try:
        return named_cycle(scenario.complex, spec)
    except DomainError as exc:
        raise ConfigError(f"bad chain spec: {exc}") from exc


def _validate_requests(scenario: Scenario) -> None:
    for i, req in enumerate(scenario.charges):
        if not isinstance(req, dict) or req.get("kind") not in ("eom", "trivial"):
            raise ConfigError(f"charge request {i}: 'kind' must be 'eom' or 'trivial'")
        if "support" not in req:
            raise ConfigError(f"charge request {i}: missing 'support'")
    for i, req in enumerate(scenario.defects):
        for key in ("g", "degree", "support", "move", "charged"):
            if not isinstance(req, dict) or key not in req:
                raise ConfigError(f"defect request {i}: missing {key!r}")
        if req["g"] not in scenario.group_elements:
            raise ConfigError(f"defect request {i}: unknown group element {req['g']!r}")
        if not isinstance(req["move"], dict) or "filling" not in req["move"]:
            raise ConfigError(f"defect request {i}: 'move' needs a 'filling'")
        charged = req["charged"]
        if not isinstance(charged, dict) or "support" not in charged:
            raise ConfigError(f"defect request {i}: 'charged' needs a 'support'")


def representation_for(scenario: Scenario) -> GroupoidRep:
    fiber = scenario.fiber
    if fiber.kind == "real_scalar":
        fiber = algebra_fiber(scenario.algebra)
    return GroupoidRep(fiber)


def build_field(scenario: Scenario) -> Cochain:
    """Build the scenario's field cochain from its init spec."""
    if scenario.complex is None:
        raise ConfigError("this command needs a 'mesh' entry in the config")
    cx = scenario.complex
    degree = scenario.field_degree
    fiber = scenario.fiber
    init = scenario.field_init
    kind = init["init"]
    if kind == "zero":
        return Cochain.zeros(cx, degree, fiber)
    if kind == "random_gaussian":
        rng = np.random.default_rng(int(init.get("seed", scenario.seed)))
        return Cochain.random_gaussian(cx, degree, fiber, rng, float(init.get("stddev", 1.0)))
    if kind == "explicit":
        if "csv" in init:
            from .fieldio import load_field_csv

            return load_field_csv(cx, degree, fiber, scenario.base_dir / init["csv"])
        values = np.zeros((cx.cell_count(degree), fiber.components), dtype=fiber.dtype)
        for item in init.get("cells", []):
            idx = _cell_index_from_item(cx, degree, item)
            values[idx] = parse_fiber_value(fiber, item["value"])
        return Cochain(cx, degree, fiber, values)
    if kind == "solve":
        fixed = {}
        for item in init.get("fixed", []):
            idx = _cell_index_from_item(cx, degree, item)
            fixed[idx] = parse_fiber_value(fiber, item["value"])
        source = None
        if init.get("source") is not None:
            src = init["source"]
            if not isinstance(src, dict) or "cells" not in src:
                raise ConfigError("solve source must be an object with a 'cells' list")
            vals = np.zeros((cx.cell_count(degree), fiber.components), dtype=fiber.dtype)
            for item in src["cells"]:
                idx = _cell_index_from_item(cx, degree, item)
                vals[idx] = parse_fiber_value(fiber, item["value"])
            source = Cochain(cx, degree, fiber, vals)
        return solve_free(
            cx, fiber, degree, fixed=fixed, source=source,
            tol=scenario.tolerances["solver"],
        )
    raise ConfigError(f"unknown field init {kind!r}")


def _cell_index_from_item(cx: CubicalComplex, degree: int, item) -> int:
    try:
        base = tuple(int(b) for b in item["base"])
        axes = tuple(int(a) for a in item["axes"])
        return cx.cell_index(degree, base, axes)
    except FormlabError as exc:
        raise ConfigError(f"bad cell reference {item!r}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad cell reference {item!r}: {exc}") from exc
