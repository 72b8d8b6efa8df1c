"""Newton polyhedron invariants of a two-variable polynomial, in exact arithmetic.

The polyhedron is conv(U (j,k) + R_+^2) over the Taylor support.  Its
boundary is a vertical ray above the first vertex, a convex chain of compact
edges, and a horizontal ray to the right of the last vertex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from . import upoly
from .phase_algebra import PolynomialPhase

Point = tuple[int, int]


class UnboundedPrincipalFace(ValueError):
    pass


@dataclass(frozen=True)
class Face:
    """A vertex, a compact edge, or one of the two unbounded rays.

    For rays ``points`` holds the single base vertex and ``direction`` is
    (0, 1) (vertical) or (1, 0) (horizontal).
    """

    kind: str  # "vertex" | "edge" | "ray"
    points: tuple[Point, ...]
    direction: Point | None = None

    @property
    def compact(self) -> bool:
        return self.kind != "ray"

    @property
    def dimension(self) -> int:
        return 0 if self.kind == "vertex" else 1

    def contains(self, p: tuple[Fraction, Fraction]) -> bool:
        t1, t2 = Fraction(p[0]), Fraction(p[1])
        if self.kind == "vertex":
            return (t1, t2) == self.points[0]
        if self.kind == "ray":
            (a, b), (dx, dy) = self.points[0], self.direction
            return (t1 == a and t2 >= b) if dx == 0 else (t2 == b and t1 >= a)
        (a1, a2), (b1, b2) = self.points
        cross = (b1 - a1) * (t2 - a2) - (b2 - a2) * (t1 - a1)
        return cross == 0 and min(a1, b1) <= t1 <= max(a1, b1) and min(a2, b2) <= t2 <= max(a2, b2)

    def __str__(self):
        if self.kind == "vertex":
            return f"vertex{self.points[0]}"
        if self.kind == "edge":
            return f"edge[{self.points[0]},{self.points[1]}]"
        return f"ray{self.points[0]}+t{self.direction}"


@dataclass
class NewtonInvariants:
    hull_vertices: list[Point]
    compact_faces: list[Face]
    distance_d: Fraction
    principal_face: Face
    principal_part: PolynomialPhase | None = None
    nu: int | None = None
    multiplicity_m: int | None = None
    adapted_declared: bool = False
    flags: list[str] = field(default_factory=list)

    @property
    def height_in_coords(self) -> Fraction:
        return self.distance_d


def newton_polyhedron(support) -> list[Point]:
    """Vertices of the Newton polyhedron, sorted by j ascending.

    Pareto-minimal points first (staircase), then the lower-left convex chain.
    """
    pts = sorted({(int(j), int(k)) for j, k in support})
    if not pts:
        raise ValueError("empty support")
    stair = []
    for p in pts:  # j ascending, k ascending within equal j
        if not stair or p[1] < stair[-1][1]:
            stair.append(p)
    chain: list[Point] = []
    for p in stair:
        while len(chain) >= 2:
            o, a = chain[-2], chain[-1]
            cross = (a[0] - o[0]) * (p[1] - o[1]) - (a[1] - o[1]) * (p[0] - o[0])
            if cross <= 0:
                chain.pop()
            else:
                break
        chain.append(p)
    return chain


def newton_diagram(vertices: list[Point]) -> list[Face]:
    """Compact faces: every vertex and every edge between consecutive vertices."""
    faces = [Face("vertex", (v,)) for v in vertices]
    faces += [Face("edge", (a, b)) for a, b in zip(vertices, vertices[1:])]
    return faces


def newton_distance(vertices: list[Point]) -> Fraction:
    """Coordinate d of the point where t1 = t2 meets the polyhedron boundary."""
    first, last = vertices[0], vertices[-1]
    if first[1] <= first[0]:
        # the whole chain lies below the bisectrix: hit the vertical ray
        return Fraction(first[0])
    if last[0] <= last[1]:
        return Fraction(last[1])
    for (a1, a2), (b1, b2) in zip(vertices, vertices[1:]):
        da, db = a1 - a2, b1 - b2
        if da <= 0 <= db:
            if da == db:
                return Fraction(a1)
            # (a + s(b-a)) on t1=t2: s = -da/(db-da)
            s = Fraction(-da, db - da)
            return a1 + s * (b1 - a1)
    raise AssertionError("bisectrix does not meet the boundary")


def principal_face(vertices: list[Point], d: Fraction) -> Face:
    """Face of minimal dimension containing (d, d)."""
    p = (Fraction(d), Fraction(d))
    for v in vertices:
        if (Fraction(v[0]), Fraction(v[1])) == p:
            return Face("vertex", (v,))
    for a, b in zip(vertices, vertices[1:]):
        e = Face("edge", (a, b))
        if e.contains(p):
            return e
    first, last = vertices[0], vertices[-1]
    if d == first[0] and d > first[1]:
        return Face("ray", (first,), (0, 1))
    if d == last[1] and d > last[0]:
        return Face("ray", (last,), (1, 0))
    raise AssertionError("(d,d) is not on the boundary")


def principal_part(f: PolynomialPhase, face: Face) -> PolynomialPhase:
    if not face.compact:
        raise UnboundedPrincipalFace("unbounded principal face: principal part is a formal series")
    return PolynomialPhase({jk: c for jk, c in f.terms.items() if face.contains(jk)})


def _restrict(f_pi: PolynomialPhase, x1: int) -> upoly.Poly:
    deg = max(k for _, k in f_pi.terms)
    coeffs = [Fraction(0)] * (deg + 1)
    for (j, k), c in f_pi.terms.items():
        coeffs[k] += c * (x1**j)
    return upoly.trim(coeffs)


def root_order_on_circle(f_pi: PolynomialPhase) -> int:
    """nu: maximal order of the zeros of the principal part on the unit circle.

    Axis zeros have order min k (x2 = 0) and min j (x1 = 0); the remaining
    zeros are the real roots of f_pi(1, t) and f_pi(-1, t).
    """
    if not f_pi.terms:
        raise ValueError("zero polynomial")
    nu = max(min(k for _, k in f_pi.terms), min(j for j, _ in f_pi.terms))
    for x1 in (1, -1):
        p = _restrict(f_pi, x1)
        if not p:
            raise ValueError("principal part vanishes on the line x1 = ±1")
        nu = max(nu, upoly.max_real_root_multiplicity(p))
    return nu


def newton_multiplicity(nu: int, d: Fraction, adapted_declared: bool = True) -> tuple[int, list[str]]:
    """m = 1 iff nu == d exactly (in the given coordinates)."""
    flags = []
    if not adapted_declared:
        flags.append("m provisional: coordinates not certified adapted")
    return (1 if Fraction(nu) == Fraction(d) else 0), flags


def analyze(f: PolynomialPhase, adapted_declared: bool = True) -> NewtonInvariants:
    """Every invariant at once.

    Raises UnboundedPrincipalFace when (d, d) sits on a ray; the hull,
    diagram and distance are attached to the exception as ``partial``.
    """
    f.require_normalized()
    verts = newton_polyhedron(f.terms)
    d = newton_distance(verts)
    face = principal_face(verts, d)
    inv = NewtonInvariants(
        hull_vertices=verts,
        compact_faces=newton_diagram(verts),
        distance_d=d,
        principal_face=face,
        adapted_declared=adapted_declared,
    )
    if not face.compact:
        exc = UnboundedPrincipalFace(f"unbounded principal face {face}; nu and m unavailable")
        exc.partial = inv
        raise exc
    inv.principal_part = principal_part(f, face)
    inv.nu = root_order_on_circle(inv.principal_part)
    inv.multiplicity_m, inv.flags = newton_multiplicity(inv.nu, d, adapted_declared)
    return inv


def edge_inequalities(vertices: list[Point]) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Supporting half-planes a*t1 + b*t2 >= c of the polyhedron (rays included)."""
    out = [(Fraction(1), Fraction(0), Fraction(vertices[0][0])), (Fraction(0), Fraction(1), Fraction(vertices[-1][1]))]
    for (a1, a2), (b1, b2) in zip(vertices, vertices[1:]):
        # normal (a2-b2, b1-a1) points into the polyhedron
        na, nb = Fraction(a2 - b2), Fraction(b1 - a1)
        out.append((na, nb, na * a1 + nb * a2))
    return out
