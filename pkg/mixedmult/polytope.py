"""
Exact rational convex geometry in dimension at most four.

Polytopes are kept in V-representation with exact ``Fraction`` coordinates.
Facets are computed on demand in the affine hull of the vertices: by a
monotone chain in the plane and by an integer double-description pass in
dimensions three and four.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from mixedmult.exceptions import DimensionMismatchError
from mixedmult.utils import as_fraction, fraction_str, lcm_all

logger = logging.getLogger(__name__)

MAX_DIM = 4


def point(coords):
    """Return a RationalPoint: a tuple of exact rationals."""
    return tuple(as_fraction(c) for c in coords)


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _rank(rows):
    """Rank of a list of rational rows by Gaussian elimination."""
    basis = []
    for row in rows:
        v = [Fraction(x) for x in row]
        for pivot, b in basis:
            if v[pivot]:
                f = v[pivot]
                v = [x - f * y for x, y in zip(v, b)]
        nz = next((i for i, x in enumerate(v) if x), None)
        if nz is not None:
            f = v[nz]
            basis.append((nz, [x / f for x in v]))
    return len(basis)


def _det(m):
    """Bareiss fraction-free determinant of a square integer matrix."""
    m = [list(r) for r in m]
    n = len(m)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if m[i][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _null_vector(rows):
    """Generalized cross product of n-1 integer rows of length n."""
    n = len(rows) + 1
    vec = []
    for j in range(n):
        minor = [[r[c] for c in range(n) if c != j] for r in rows]
        vec.append((-1) ** j * _det(minor))
    return vec


def _normalize(vec):
    g = 0
    for x in vec:
        g = math.gcd(g, x)
    return tuple(x // g for x in vec) if g > 1 else tuple(vec)


@dataclass
class _Frame:
    """Affine hull data and facets of a finite point set."""

    base: tuple
    basis: list
    pivots: tuple
    facets: list
    vertices: list
    cycle: list

    @property
    def rank(self):
        return len(self.pivots)

    def reduce(self, q):
        v = list(_sub(q, self.base))
        for pivot, row in self.basis:
            if v[pivot]:
                f = v[pivot]
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def project(self, q):
        return tuple(q[j] for j in self.pivots)


def _affine_basis(points):
    base = points[0]
    basis = []
    dim = len(base)
    for p in points[1:]:
        v = list(_sub(p, base))
        for pivot, row in basis:
            if v[pivot]:
                f = v[pivot]
                v = [x - f * y for x, y in zip(v, row)]
        nz = next((i for i, x in enumerate(v) if x), None)
        if nz is None:
            continue
        f = v[nz]
        v = [x / f for x in v]
        reduced = []
        for pivot, row in basis:
            if row[nz]:
                g = row[nz]
                row = [x - g * y for x, y in zip(row, v)]
            reduced.append((pivot, row))
        basis = reduced + [(nz, v)]
        if len(basis) == dim:
            break
    basis.sort()
    return base, basis


def _monotone_chain(pts):
    """Counter-clockwise hull of distinct integer points, collinear points dropped."""
    pts = sorted(set(pts))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _seed_order(pts, k):
    directions = []
    for i in range(k):
        e = [0] * k
        e[i] = 1
        directions.append(e)
        for j in range(i + 1, k):
            for s in (1, -1):
                f = [0] * k
                f[i], f[j] = 1, s
                directions.append(f)
    directions.append([1] * k)
    seeds = []
    for d in directions:
        for sgn in (1, -1):
            best = max(pts, key=lambda p: (sgn * _dot(d, p), p))
            if best not in seeds:
                seeds.append(best)
    seen = set(seeds)
    rest = [p for p in pts if p not in seen]
    return seeds + rest


def _double_description(pts, k):
    """
    Facets of the hull of full-dimensional integer points in dimension k.

    Works on the polar cone {(b, -n) : b - n.p >= 0 for all p}; its extreme
    rays are the facets n.x <= b. Degenerate (coplanar) inputs are handled by
    the combinatorial adjacency test.
    """
    ordered = _seed_order(pts, k)
    initial = [ordered[0]]
    for p in ordered[1:]:
        diffs = [_sub(q, initial[0]) for q in initial[1:] + [p]]
        if _rank(diffs) == len(initial):
            initial.append(p)
        if len(initial) == k + 1:
            break
    rows = [(1,) + tuple(p) for p in initial]
    size = k + 1
    rays = []
    for i in range(size):
        others = [rows[j] for j in range(size) if j != i]
        vec = _null_vector(others)
        if _dot(vec, rows[i]) < 0:
            vec = [-x for x in vec]
        mask = 0
        for j in range(size):
            if j != i:
                mask |= 1 << j
        rays.append((_normalize(vec), mask))
    constraints = list(rows)
    chosen = set(initial)
    for p in ordered:
        if p in chosen:
            continue
        a = (1,) + tuple(p)
        vals = [_dot(r, a) for r, _ in rays]
        if all(v >= 0 for v in vals):
            if any(v == 0 for v in vals):
                bit = 1 << len(constraints)
                constraints.append(a)
                rays = [
                    (r, m | bit) if v == 0 else (r, m) for (r, m), v in zip(rays, vals)
                ]
            continue
        bit = 1 << len(constraints)
        constraints.append(a)
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        new_rays = []
        for i in pos:
            ri, mi = rays[i]
            for j in neg:
                rj, mj = rays[j]
                common = mi & mj
                if bin(common).count("1") < size - 2:
                    continue
                if any(
                    t != i and t != j and (mt & common) == common
                    for t, (_, mt) in enumerate(rays)
                ):
                    continue
                w = [vals[i] * y - vals[j] * x for x, y in zip(ri, rj)]
                new_rays.append((_normalize(w), common | bit))
        rays = (
            [rays[i] for i in pos]
            + [(r, m | bit) for (r, m), v in zip(rays, vals) if v == 0]
            + new_rays
        )
    facets = []
    for r, _ in rays:
        normal = tuple(-x for x in r[1:])
        if any(normal):
            facets.append((normal, r[0]))
    return sorted(set(facets))


def _build_frame(points):
    points = sorted(set(points))
    base, basis = _affine_basis(points)
    pivots = tuple(p for p, _ in basis)
    k = len(pivots)
    frame = _Frame(base, basis, pivots, [], [], [])
    if k == 0:
        frame.vertices = [base]
        return frame
    projected = {}
    for p in points:
        projected[frame.project(p)] = p
    scale = lcm_all(x.denominator for q in projected for x in q)
    ints = {tuple(int(x * scale) for x in q): p for q, p in projected.items()}
    if k == 1:
        lo, hi = min(ints), max(ints)
        frame.vertices = [ints[lo], ints[hi]]
        frame.facets = [
            ((-1,), Fraction(-lo[0], scale)),
            ((1,), Fraction(hi[0], scale)),
        ]
        frame.cycle = frame.vertices
        return frame
    if k == 2:
        chain = _monotone_chain(list(ints))
        frame.cycle = [ints[q] for q in chain]
        frame.vertices = list(frame.cycle)
        for a, b in zip(chain, chain[1:] + chain[:1]):
            normal = _normalize((b[1] - a[1], a[0] - b[0]))
            frame.facets.append((normal, Fraction(_dot(normal, a), scale)))
        return frame
    facets = _double_description(list(ints), k)
    frame.facets = [(n, Fraction(b, scale)) for n, b in facets]
    for q, p in ints.items():
        tight = [n for n, b in facets if _dot(n, q) == b]
        if len(tight) >= k and _rank(tight) == k:
            frame.vertices.append(p)
    return frame


@dataclass(frozen=True)
class RationalPolytope:
    """
    Convex polytope as the hull of an irredundant vertex set

    Parameters
    ----------
    dim : int
        ambient dimension d
    vertices : frozenset of tuple of Fraction
        extreme points; empty for the empty body
    """

    dim: int
    vertices: frozenset

    @cached_property
    def frame(self):
        if not self.vertices:
            return None
        return _build_frame(list(self.vertices))

    @property
    def is_empty(self):
        return not self.vertices

    @property
    def affine_dim(self):
        return -1 if self.is_empty else self.frame.rank

    def sorted_vertices(self):
        return sorted(self.vertices)

    def __repr__(self):
        verts = ", ".join(
            "(" + ", ".join(fraction_str(c) for c in v) + ")"
            for v in self.sorted_vertices()
        )
        return f"RationalPolytope(dim={self.dim}, vertices=[{verts}])"


@dataclass(frozen=True)
class Halfspace:
    """The region normal . x <= bound."""

    normal: tuple
    bound: Fraction

    def __post_init__(self):
        object.__setattr__(self, "normal", point(self.normal))
        object.__setattr__(self, "bound", as_fraction(self.bound))
        if not any(self.normal):
            raise ValueError("halfspace normal must be nonzero")

    def value(self, q):
        return _dot(self.normal, q)


def empty_polytope(dim):
    return RationalPolytope(dim, frozenset())


def _check_dims(points, dim):
    for p in points:
        if len(p) != dim:
            raise DimensionMismatchError(dim, len(p))


def hull(points, dim=None):
    """
    Convex hull of a finite point set

    Parameters
    ----------
    points : iterable of sequences
        points with exact rational (or integer) coordinates
    dim : int, optional
        ambient dimension; required when ``points`` is empty

    Returns
    -------
    RationalPolytope
        polytope whose vertices are the extreme points of ``points``
    """
    pts = {point(p) for p in points}
    if not pts:
        if dim is None:
            raise ValueError("dimension required for an empty point set")
        return empty_polytope(dim)
    if dim is None:
        dim = len(next(iter(pts)))
    _check_dims(pts, dim)
    if dim > MAX_DIM:
        raise ValueError(f"dimension {dim} exceeds the supported maximum {MAX_DIM}")
    frame = _build_frame(list(pts))
    poly = RationalPolytope(dim, frozenset(frame.vertices))
    object.__setattr__(poly, "frame", frame)
    return poly


def volume(P):
    """
    Exact d-dimensional volume

    Lower-dimensional and empty bodies have volume 0. In the plane the
    shoelace formula is used on the ordered boundary; in higher dimension the
    body is cut into pyramids from its lexicographically least vertex over the
    facets avoiding it, recursing on facet volumes.
    """
    if P.is_empty or P.affine_dim < P.dim:
        return Fraction(0)
    d = P.dim
    if d == 1:
        xs = [v[0] for v in P.vertices]
        return max(xs) - min(xs)
    if d == 2:
        cyc = P.frame.cycle
        area = sum(
            a[0] * b[1] - a[1] * b[0] for a, b in zip(cyc, cyc[1:] + cyc[:1])
        )
        return abs(area) / 2
    v0 = min(P.vertices)
    total = Fraction(0)
    for normal, bound in P.frame.facets:
        height = bound - _dot(normal, v0)
        if height == 0:
            continue
        on_facet = [v for v in P.vertices if _dot(normal, v) == bound]
        j = next(i for i, c in enumerate(normal) if c)
        face = hull([v[:j] + v[j + 1:] for v in on_facet], d - 1)
        total += height * volume(face) / (d * abs(normal[j]))
    return total


def contains_point(P, q):
    """Exact membership of a point in a polytope."""
    q = point(q)
    if len(q) != P.dim:
        raise DimensionMismatchError(P.dim, len(q))
    if P.is_empty:
        return False
    frame = P.frame
    if any(frame.reduce(q)):
        return False
    if frame.rank == 0:
        return q == frame.base
    pq = frame.project(q)
    return all(_dot(n, pq) <= b for n, b in frame.facets)


def contains_body(A, B):
    """True when every vertex of B lies in A."""
    if A.dim != B.dim:
        raise DimensionMismatchError(A.dim, B.dim)
    return all(contains_point(A, v) for v in B.vertices)


def minkowski_sum(A, B):
    if A.dim != B.dim:
        raise DimensionMismatchError(A.dim, B.dim)
    if A.is_empty or B.is_empty:
        return empty_polytope(A.dim)
    return hull(
        (tuple(x + y for x, y in zip(a, b)) for a in A.vertices for b in B.vertices),
        A.dim,
    )


def clip(P, H):
    """
    Intersection of a polytope with a halfspace

    Vertices on the kept side are retained and every segment between a kept
    and a removed vertex contributes its crossing point; the hull of these is
    exactly P intersected with H.
    """
    if len(H.normal) != P.dim:
        raise DimensionMismatchError(P.dim, len(H.normal))
    inside = [v for v in P.vertices if H.value(v) <= H.bound]
    outside = [v for v in P.vertices if H.value(v) > H.bound]
    if not inside:
        return empty_polytope(P.dim)
    if not outside:
        return P
    cuts = []
    for u in inside:
        hu = H.value(u)
        for w in outside:
            t = (H.bound - hu) / (H.value(w) - hu)
            cuts.append(tuple(a + t * (b - a) for a, b in zip(u, w)))
    return hull(inside + cuts, P.dim)


def scale(P, k):
    k = as_fraction(k)
    return hull((tuple(k * c for c in v) for v in P.vertices), P.dim)


def translate(P, t):
    t = point(t)
    return hull((tuple(a + b for a, b in zip(v, t)) for v in P.vertices), P.dim)


def simplex(dim, size=1):
    """The simplex T_c = {x >= 0, x_1 + ... + x_d <= c}."""
    size = as_fraction(size)
    verts = [tuple(Fraction(0) for _ in range(dim))]
    for i in range(dim):
        verts.append(tuple(size if j == i else Fraction(0) for j in range(dim)))
    return hull(verts, dim)


def degree_halfspace(dim, bound):
    """HF = {a_1 + ... + a_d <= bound}."""
    return Halfspace(tuple(1 for _ in range(dim)), bound)


def linf_vertex_gap(inner, outer):
    """
    Upper bound for the L-infinity Hausdorff distance when inner is inside outer

    The distance of each vertex of ``outer`` to the nearest vertex of
    ``inner``, maximized over the vertices of ``outer``.
    """
    if inner.is_empty:
        return None
    return max(
        min(max(abs(a - b) for a, b in zip(v, w)) for w in inner.vertices)
        for v in outer.vertices
    )


def mixed_volume(bodies):
    """
    Mixed volume of d polytopes in R^d by polarization

    MV(P_1, ..., P_d) = 1/d! sum over nonempty S of (-1)^(d-|S|) vol(sum_S P_i),
    normalized so that MV(P, ..., P) = vol(P).
    """
    d = len(bodies)
    for body in bodies:
        if body.dim != d:
            raise DimensionMismatchError(d, body.dim)
    total = Fraction(0)
    for size in range(1, d + 1):
        for subset in itertools.combinations(range(d), size):
            acc = bodies[subset[0]]
            for idx in subset[1:]:
                acc = minkowski_sum(acc, bodies[idx])
            total += (-1) ** (d - size) * volume(acc)
    return total / math.factorial(d)


@dataclass(frozen=True)
class NewtonPolyhedron:
    """
    conv(V) + positive orthant, stored by its vertices

    Parameters
    ----------
    dim : int
        ambient dimension
    vertices : frozenset of tuple of Fraction
        extreme points of the polyhedron
    """

    dim: int
    vertices: frozenset

    @classmethod
    def from_points(cls, points, dim):
        pts = [point(p) for p in points]
        _check_dims(pts, dim)
        box = [max(p[i] for p in pts) + 1 for i in range(dim)]
        body = _boxed_hull(pts, box, dim)
        verts = frozenset(
            v for v in body.vertices if all(c < b for c, b in zip(v, box))
        )
        return cls(dim, verts)

    def truncated(self, box):
        """NP intersected with the box [0, box_1] x ... x [0, box_d]."""
        return _boxed_hull(list(self.vertices), [as_fraction(b) for b in box], self.dim)

    def minkowski(self, other):
        if self.dim != other.dim:
            raise DimensionMismatchError(self.dim, other.dim)
        sums = [
            tuple(x + y for x, y in zip(a, b))
            for a in self.vertices
            for b in other.vertices
        ]
        return NewtonPolyhedron.from_points(sums, self.dim)


def _boxed_hull(points, box, dim):
    # For p <= box, NP intersected with the box is the hull of the points with
    # any subset of coordinates raised to the box.
    raised = set()
    for p in points:
        for mask in range(1 << dim):
            raised.add(
                tuple(box[i] if mask >> i & 1 else p[i] for i in range(dim))
            )
    return hull(raised, dim)


def polytope_to_json(P):
    return {
        "dim": P.dim,
        "vertices": [[fraction_str(c) for c in v] for v in P.sorted_vertices()],
    }


def polytope_from_json(data):
    dim = int(data["dim"])
    return hull([point(v) for v in data["vertices"]], dim)
