"""Degree-tagged fibers and degree-alternating group actions.

Fiber values carry a Z/2 degree.  A non-identity group element acts through
degree-shifting maps (even fiber to odd and back); only the identity acts
degree-preservingly.  Two actions compose only when the target degree of the
first matches the source degree of the second, so same-degree non-identity
actions never compose: that constraint is what lets a non-abelian group act
through topological operators.  Violations raise DegreeError.

Morphisms form a two-object groupoid: objects are the two degrees, a
morphism is (group element, source degree, degree shift), composition
multiplies group elements, and the primitive flag marks the generator
patterns (degree-shifting non-identity actions and the two identities).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import GroupElement, adjoint_matrix
from .calculus import FiberSpec
from .errors import DegreeError, DomainError


@dataclass(frozen=True, eq=False)
class GradedValue:
    """A fiber value tagged with a Z/2 degree; the value itself is untouched
    by the tag."""

    degree: int
    value: np.ndarray

    def __post_init__(self):
        if self.degree not in (0, 1):
            raise DegreeError(f"degree must be 0 or 1, got {self.degree}")
        value = np.asarray(self.value)
        value.setflags(write=False)
        object.__setattr__(self, "value", value)


@dataclass(frozen=True, eq=False)
class GradedMorphism:
    """A degree-tagged group action: source degree, parity shift, element."""

    g: GroupElement
    source: int
    shift: int
    primitive: bool = False

    def __post_init__(self):
        if self.source not in (0, 1) or self.shift not in (0, 1):
            raise DegreeError("source and shift must be 0 or 1")
        if self.primitive:
            if self.g.is_identity():
                if self.shift != 0:
                    raise DegreeError("the identity acts degree-preservingly")
            elif self.shift != 1:
                raise DegreeError("a primitive non-identity action must shift degree")

    @property
    def target(self) -> int:
        return (self.source + self.shift) % 2

    def matches(self, other: GradedMorphism, tol: float = 1e-12) -> bool:
        return (
            self.source == other.source
            and self.shift == other.shift
            and self.g.group == other.g.group
            and np.max(np.abs(self.g.matrix - other.g.matrix)) <= tol
        )


def primitive_morphism(g: GroupElement, source: int) -> GradedMorphism:
    """The generator morphism of g at the given source degree."""
    shift = 0 if g.is_identity() else 1
    return GradedMorphism(g, source, shift, primitive=True)


def identity_morphism(e: GroupElement, degree: int) -> GradedMorphism:
    if not e.is_identity():
        raise DomainError("identity_morphism needs the identity group element")
    return GradedMorphism(e, degree, 0, primitive=True)


def _is_primitive_pattern(g: GroupElement, shift: int) -> bool:
    if g.is_identity():
        return shift == 0
    return shift == 1


def compose(second: GradedMorphism, first: GradedMorphism) -> GradedMorphism:
    """second after first; defined only when first.target == second.source."""
    if second.g.group != first.g.group:
        raise DomainError("cannot compose morphisms over different groups")
    if first.target != second.source:
        raise DegreeError(
            f"cannot compose: first maps degree {first.source} to {first.target}, "
            f"second expects source degree {second.source}"
        )
    g = second.g @ first.g
    shift = (first.shift + second.shift) % 2
    return GradedMorphism(g, first.source, shift, primitive=_is_primitive_pattern(g, shift))


def inverse(m: GradedMorphism) -> GradedMorphism:
    """Two-sided inverse: swaps source and target, inverts the element."""
    return GradedMorphism(
        m.g.inverse(), m.target, m.shift, primitive=_is_primitive_pattern(m.g, m.shift)
    )


@dataclass(frozen=True, eq=False)
class GroupoidRep:
    """Representation of the graded morphisms on a pair of identical fibers.

    Algebra fibers use the adjoint action in the generator basis; the
    complex pair fiber uses the defining U(2) matrix.
    """

    fiber: FiberSpec

    def __post_init__(self):
        if self.fiber.kind not in ("algebra", "complex_pair"):
            raise DomainError(f"no group action on fiber kind {self.fiber.kind!r}")

    def matrix(self, g: GroupElement) -> np.ndarray:
        if self.fiber.kind == "algebra":
            return adjoint_matrix(g, self.fiber.algebra)
        if g.matrix.shape != (2, 2):
            raise DomainError("the complex pair fiber needs a 2x2 group element")
        return g.matrix


@dataclass(frozen=True, eq=False)
class RepresentedMorphism:
    """A concrete linear map with its degree bookkeeping."""

    matrix: np.ndarray
    source: int
    target: int


def act(m: GradedMorphism, x: GradedValue, rep: GroupoidRep) -> GradedValue:
    """Apply a morphism to a graded value; the degree tags must line up."""
    if x.degree != m.source:
        raise DegreeError(
            f"a degree-{m.source} action cannot act on a degree-{x.degree} value"
        )
    return GradedValue(m.target, rep.matrix(m.g) @ x.value)


def represent(m: GradedMorphism, rep: GroupoidRep) -> RepresentedMorphism:
    """Functor into linear maps: composition goes to the matrix product."""
    return RepresentedMorphism(rep.matrix(m.g), m.source, m.target)
