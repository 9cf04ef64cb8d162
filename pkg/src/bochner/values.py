"""Value spaces: complex scalars and fixed-dimension complex vectors.

A ``ValueSpace`` fixes the dimension and the norm used everywhere downstream
(one-, two-, or sup-norm for vectors; the modulus for scalars).  Elements are
immutable tuples of complex numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, StructuralError

SCALAR = "scalar"
VECTOR = "vector"

NORM_ONE = "one"
NORM_TWO = "two"
NORM_INF = "inf"

_NORM_TAGS = (NORM_ONE, NORM_TWO, NORM_INF)


@dataclass(frozen=True)
class ValueSpace:
    kind: str
    dim: int = 1
    norm_tag: str = NORM_TWO


@dataclass(frozen=True)
class BanachElement:
    components: tuple[complex, ...]


def scalar_space() -> ValueSpace:
    """The complex scalars under the modulus."""
    return ValueSpace(SCALAR, 1, NORM_TWO)


def vector_space(dim: int, norm_tag: str = NORM_TWO) -> ValueSpace:
    """Complex ``dim``-vectors under the selected norm."""
    if not isinstance(dim, int) or dim < 1:
        raise DomainError(f"vector dimension must be a positive integer, got {dim!r}")
    if norm_tag not in _NORM_TAGS:
        raise DomainError(f"unknown norm tag {norm_tag!r}; expected one of {_NORM_TAGS}")
    return ValueSpace(VECTOR, dim, norm_tag)


def element(space: ValueSpace, components) -> BanachElement:
    """Build an element of ``space``, validating the component count.

    A bare number is accepted as the single component of a scalar space.
    """
    if isinstance(components, (int, float, complex)):
        components = (components,)
    comps = tuple(complex(c) for c in components)
    if len(comps) != space.dim:
        raise StructuralError(
            f"expected {space.dim} components, got {len(comps)}"
        )
    return BanachElement(comps)


def scalar(z) -> BanachElement:
    return BanachElement((complex(z),))


def zero(space: ValueSpace) -> BanachElement:
    return BanachElement((0j,) * space.dim)


def norm(space: ValueSpace, v: BanachElement) -> float:
    """The selected norm of ``v``: homogeneous and subadditive."""
    if len(v.components) != space.dim:
        raise StructuralError(
            f"element has {len(v.components)} components, space has dimension {space.dim}"
        )
    moduli = [abs(c) for c in v.components]
    if space.kind == SCALAR:
        return moduli[0]
    if space.norm_tag == NORM_ONE:
        return math.fsum(moduli)
    if space.norm_tag == NORM_INF:
        return max(moduli)
    return math.hypot(*moduli)


def combine(space: ValueSpace, alpha, v: BanachElement, beta, w: BanachElement) -> BanachElement:
    """Componentwise ``alpha*v + beta*w``."""
    if len(v.components) != space.dim or len(w.components) != space.dim:
        raise StructuralError("dimension mismatch in linear combination")
    a = complex(alpha)
    b = complex(beta)
    return BanachElement(tuple(a * x + b * y for x, y in zip(v.components, w.components)))
