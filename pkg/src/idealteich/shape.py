"""A single ideal tetrahedron: dihedral angles, shift parameters, horospherical triangles.

Angles are stored one per pair of opposite edges: ``alpha`` on {01, 23},
``beta`` on {02, 13}, ``gamma`` on {03, 12}.  In the horospherical triangle
cut off near a vertex the corner on edge {v, w} carries the angle of the pair
containing {v, w}.

Shift convention: for a triangle ABC with angles (alpha, beta, gamma) at
(A, B, C), the shift at a corner is the log of the side entering the corner
over the side leaving it, walking A -> B -> C.  That gives

    kappa1 = log(sin beta / sin gamma)   (corner A)
    kappa2 = log(sin gamma / sin alpha)  (corner B)
    kappa3 = log(sin alpha / sin beta)   (corner C)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

ANGLE_SUM_TOL = 1e-12
DEGENERATE_EPS = 1e-9
LAW_OF_SINES_TOL = 1e-10


class ShapeError(ValueError):
    pass


class ShiftDomainError(ShapeError):
    """The shift pair describes no ideal tetrahedron."""

    def __init__(self, argument: float):
        self.argument = argument
        super().__init__(f"arccos argument {argument!r} outside (-1, 1)")


@dataclass(frozen=True)
class TetShape:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        a, b, g = self.alpha, self.beta, self.gamma
        if not all(math.isfinite(x) for x in (a, b, g)):
            raise ShapeError("angles must be finite")
        if abs(a + b + g - math.pi) > ANGLE_SUM_TOL:
            raise ShapeError(f"angles sum to {a + b + g!r}, not pi")
        if min(a, b, g) <= DEGENERATE_EPS:
            raise ShapeError(f"degenerate shape {(a, b, g)}")
        # float closure: make the sum exactly pi in the last angle
        object.__setattr__(self, "gamma", math.pi - a - b)

    @classmethod
    def from_two(cls, alpha: float, beta: float) -> "TetShape":
        return cls(alpha, beta, math.pi - alpha - beta)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


@dataclass(frozen=True)
class ShiftTriple:
    kappa1: float
    kappa2: float
    kappa3: float

    def __post_init__(self):
        if abs(self.kappa1 + self.kappa2 + self.kappa3) > ANGLE_SUM_TOL:
            raise ShapeError("shift parameters must sum to zero")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.kappa1, self.kappa2, self.kappa3)


@dataclass(frozen=True)
class HoroTriangle:
    """Euclidean triangle with sides a, b, c opposite alpha, beta, gamma."""

    a: float
    b: float
    c: float
    scale: float

    def __post_init__(self):
        a, b, c = self.a, self.b, self.c
        if min(a, b, c) <= 0:
            raise ShapeError("side lengths must be positive")
        if not (a < b + c and b < a + c and c < a + b):
            raise ShapeError(f"sides {(a, b, c)} violate the triangle inequality")

    def angles(self) -> tuple[float, float, float]:
        return triangle_angles(self.a, self.b, self.c)


def triangle_angles(a: float, b: float, c: float) -> tuple[float, float, float]:
    """Angles opposite a, b, c (law of cosines, evaluated through atan2)."""
    twice_area = 2.0 * heron_area(a, b, c)
    return (
        _opposite(a, b, c, twice_area),
        _opposite(b, a, c, twice_area),
        _opposite(c, a, b, twice_area),
    )


def _opposite(a: float, b: float, c: float, twice_area: float) -> float:
    # cos = (b^2 + c^2 - a^2) / 2bc and sin = 2*area / bc share the 1/bc factor
    return math.atan2(2.0 * twice_area, (b - a) * (b + a) + c * c)


def shifts_from_angles(s: TetShape) -> ShiftTriple:
    sa, sb = math.sin(s.alpha), math.sin(s.beta)
    # sin(gamma) = sin(alpha + beta) without rounding the sum first; matters
    # for needle shapes where gamma is tiny or alpha + beta is close to pi
    sg = sa * math.cos(s.beta) + math.cos(s.alpha) * sb
    k1 = math.log(sb / sg)
    k2 = math.log(sg / sa)
    # third component by the identity, so the triple sums to zero exactly
    return ShiftTriple(k1, k2, -(k1 + k2))


def angles_from_shifts(kappa2: float, kappa3: float) -> TetShape:
    """Invert the shift map.

    alpha comes from the arccos formula; beta from
    ``exp(kappa2) = cos(beta) + cos(alpha) * exp(-kappa3)``; gamma closes the sum.
    """
    arg = (
        math.exp(kappa2 + kappa3) + math.exp(-kappa2 - kappa3) - math.exp(kappa3 - kappa2)
    ) / 2.0
    if not -1.0 < arg < 1.0:
        raise ShiftDomainError(arg)
    cos_beta = math.exp(kappa2) - arg * math.exp(-kappa3)
    if not -1.0 < cos_beta < 1.0:
        raise ShiftDomainError(cos_beta)
    # acos is ill-conditioned near 0 and pi; take the sines from the
    # triangle |BC| = 1, |AB| = e^kappa2, |AC| = e^-kappa3 and use atan2.
    ab, ac = math.exp(kappa2), math.exp(-kappa3)
    twice_area = 2.0 * heron_area(1.0, ab, ac)
    if twice_area <= 0.0:
        raise ShiftDomainError(arg)
    alpha = math.atan2(twice_area / (ab * ac), arg)
    beta = math.atan2(twice_area / ab, cos_beta)
    return TetShape(alpha, beta, math.pi - alpha - beta)


def heron_area(a: float, b: float, c: float) -> float:
    """Triangle area, Kahan's cancellation-free arrangement of Heron's formula."""
    a, b, c = sorted((a, b, c), reverse=True)
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * math.sqrt(max(prod, 0.0))


def horo_triangle(s: TetShape, scale: float = 1.0, normalize: bool = False) -> HoroTriangle:
    """Horospherical cross-section with sides proportional to the sines.

    With ``normalize`` the side opposite alpha equals ``scale`` (so the
    other two are ``scale * sin(gamma)/sin(alpha)`` etc.).
    """
    if scale <= 0:
        raise ShapeError("scale must be positive")
    sa, sb, sg = math.sin(s.alpha), math.sin(s.beta), math.sin(s.gamma)
    k = scale / sa if normalize else scale
    return HoroTriangle(k * sa, k * sb, k * sg, scale)
