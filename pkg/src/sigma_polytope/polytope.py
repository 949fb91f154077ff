"""Exact lattice-polytope algebra in Z^n for n <= 4.

Polytopes are stored by their irredundant vertex sets (integer vectors).
Everything is computed in exact rational arithmetic: convex hulls via a
rational simplex, face maps as argmin sets, vertex duals as open normal
cones with exact membership tests, Minkowski summand reconstruction by the
candidate-vertex method with a mandatory re-sum verification.
"""

from fractions import Fraction
from itertools import product as _cartesian
from math import gcd

from .errors import (
    CoverageGap,
    DimensionMismatch,
    EmptyOperand,
    EmptyPolytope,
    InconsistentAtlas,
    NotASummandDecomposition,
    UnsupportedDimension,
)
from .linalg import in_convex_hull, strict_cone_point

MAX_DIM = 4


def _dot(phi, v):
    return sum((Fraction(p) * x for p, x in zip(phi, v)), Fraction(0))


def _primitive(v):
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    if g == 0:
        return tuple(v)
    return tuple(x // g for x in v)


class IntegralPolytope:
    """Vertex-represented integral polytope; empty is allowed."""

    __slots__ = ("dim", "vertices")

    def __init__(self, dim, vertices):
        self.dim = dim
        self.vertices = tuple(sorted(tuple(v) for v in vertices))

    @property
    def is_empty(self):
        return not self.vertices

    def is_point(self):
        return len(self.vertices) == 1

    def translate(self, vector):
        return IntegralPolytope(
            self.dim, [tuple(x + d for x, d in zip(v, vector)) for v in self.vertices]
        )

    def normalize_translation(self):
        """Translate the lexicographically minimal vertex to the origin."""
        if self.is_empty:
            return self
        base = min(self.vertices)
        return self.translate(tuple(-x for x in base))

    def __eq__(self, other):
        if not isinstance(other, IntegralPolytope):
            return NotImplemented
        return self.dim == other.dim and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.dim, self.vertices))

    def __repr__(self):
        if self.is_empty:
            return f"IntegralPolytope(empty, dim={self.dim})"
        return f"IntegralPolytope({list(self.vertices)})"

    def to_json(self):
        return {"dim": self.dim, "vertices": [list(v) for v in self.vertices]}

    @classmethod
    def from_json(cls, data):
        return cls(data["dim"], [tuple(v) for v in data["vertices"]])


def hull(points, dim=None):
    """Irredundant vertex set of the convex hull of integer points."""
    pts = [tuple(int(x) for x in p) for p in points]
    if dim is None:
        if not pts:
            raise DimensionMismatch("dimension required for an empty point set")
        dim = len(pts[0])
    if dim > MAX_DIM:
        raise UnsupportedDimension(f"dimension {dim} exceeds the supported {MAX_DIM}")
    for p in pts:
        if len(p) != dim:
            raise DimensionMismatch("points of mixed dimension")
    pts = sorted(set(pts))
    if len(pts) <= 1:
        return IntegralPolytope(dim, pts)
    if dim == 0:
        return IntegralPolytope(0, [()])
    if dim == 1:
        return IntegralPolytope(1, [min(pts), max(pts)])
    if dim == 2:
        return IntegralPolytope(2, _hull_2d(pts))
    verts = [p for p in pts if not in_convex_hull(p, [q for q in pts if q != p])]
    return IntegralPolytope(dim, verts)


def _hull_2d(pts):
    """Andrew's monotone chain; collinear interior points dropped."""

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    if len(pts) == 2:
        return pts
    lower = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    out = lower[:-1] + upper[:-1]
    if len(out) < 2:  # all points collinear
        return [pts[0], pts[-1]]
    return out


def minkowski_sum(p, q):
    """Hull of pairwise vertex sums."""
    if p.is_empty or q.is_empty:
        raise EmptyOperand("Minkowski sum with an empty polytope")
    if p.dim != q.dim:
        raise DimensionMismatch("Minkowski sum across dimensions")
    sums = [tuple(a + b for a, b in zip(u, v)) for u in p.vertices for v in q.vertices]
    return hull(sums, dim=p.dim)


def minkowski_sum_all(polys, dim=None):
    it = iter(polys)
    try:
        acc = next(it)
    except StopIteration:
        return IntegralPolytope(dim, [(0,) * dim]) if dim is not None else None
    for q in it:
        acc = minkowski_sum(acc, q)
    return acc


class FaceHandle:
    """A face of a polytope together with a witnessing character."""

    __slots__ = ("parent", "phi", "vertices")

    def __init__(self, parent, phi, vertices):
        self.parent = parent
        self.phi = tuple(Fraction(x) for x in phi)
        self.vertices = tuple(sorted(tuple(v) for v in vertices))

    def as_polytope(self):
        return IntegralPolytope(self.parent.dim, self.vertices)

    def is_vertex(self):
        return len(self.vertices) == 1

    def __eq__(self, other):
        if not isinstance(other, FaceHandle):
            return NotImplemented
        return self.parent == other.parent and self.vertices == other.vertices

    def __hash__(self):
        return hash((self.parent, self.vertices))

    def __repr__(self):
        return f"FaceHandle({list(self.vertices)}, phi={[str(x) for x in self.phi]})"


def face_min(p, phi):
    """The subpolytope where the character attains its minimum."""
    if p.is_empty:
        raise EmptyPolytope("face of the empty polytope")
    values = {v: _dot(phi, v) for v in p.vertices}
    lo = min(values.values())
    return FaceHandle(p, phi, [v for v in p.vertices if values[v] == lo])


class DualCone:
    """The (relatively open) set of characters selecting a given face.

    Described by homogeneous inequalities (vector, strict) meaning
    vector . phi > 0 (strict) or >= 0. For 1- and 2-dimensional ambient
    spaces the extreme rays of the closure are listed explicitly.
    """

    __slots__ = ("face", "inequalities", "rays", "component_sign")

    def __init__(self, face, inequalities, rays=None, component_sign=None):
        self.face = face
        self.inequalities = tuple((tuple(v), bool(s)) for v, s in inequalities)
        self.rays = tuple(rays) if rays is not None else None
        self.component_sign = component_sign  # only for codimension-1 whole-polytope duals

    def contains(self, phi):
        if all(Fraction(x) == 0 for x in phi):
            return False
        for vec, strict in self.inequalities:
            val = _dot(phi, vec)
            if strict and val <= 0:
                return False
            if not strict and val < 0:
                return False
        return True

    def interior_point(self):
        strict = [vec for vec, s in self.inequalities if s]
        eqs = [vec for vec, s in self.inequalities if not s]
        if not strict:
            return None  # unconstrained cone: no canonical nonzero witness
        # non-strict rows here are used as equalities only by the
        # whole-polytope duals, where that is the intended meaning
        return strict_cone_point(strict, eqs, self.face.parent.dim)

    def __repr__(self):
        return f"DualCone(face={list(self.face.vertices)}, rays={self.rays})"


def vertex_duals(p):
    """One full-dimensional open dual cone per vertex."""
    if p.is_empty:
        raise EmptyPolytope("duals of the empty polytope")
    out = []
    for v in p.vertices:
        ineqs = []
        seen = set()
        for w in p.vertices:
            if w == v:
                continue
            d = tuple(a - b for a, b in zip(w, v))
            key = _primitive(d)
            if key in seen:
                continue
            seen.add(key)
            ineqs.append((d, True))
        rays = None
        if p.dim == 1:
            rays = ((1,),) if v == min(p.vertices) else ((-1,),)
            if len(p.vertices) == 1:
                rays = ((1,), (-1,))
        elif p.dim == 2:
            rays = _cone_rays_2d([vec for vec, _ in ineqs])
        face = FaceHandle(p, _vertex_witness(p, v), [v])
        out.append(DualCone(face, ineqs, rays=rays))
    return out


def _vertex_witness(p, v):
    if len(p.vertices) == 1:
        return (Fraction(0),) * max(p.dim, 1) if p.dim else ()
    phi = strict_cone_point(
        [tuple(a - b for a, b in zip(w, v)) for w in p.vertices if w != v], [], p.dim
    )
    assert phi is not None, "every stored vertex must be extreme"
    return phi


def _cone_rays_2d(normals):
    """Extreme rays of {phi : a . phi >= 0 for all a} in the plane."""
    if not normals:
        return ((1, 0), (-1, 0), (0, 1), (0, -1))
    candidates = set()
    for a in normals:
        for r in ((-a[1], a[0]), (a[1], -a[0])):
            if r == (0, 0):
                continue
            if all(a2[0] * r[0] + a2[1] * r[1] >= 0 for a2 in normals):
                candidates.add(_primitive(r))
    return tuple(sorted(candidates))


def whole_polytope_duals(p):
    """Duals of the face F_0 = P itself.

    Empty when P is full-dimensional; two opposite rays when P has
    codimension 1; a single dual otherwise.
    """
    if p.is_empty:
        raise EmptyPolytope("duals of the empty polytope")
    n = p.dim
    base = p.vertices[0]
    diffs = [tuple(a - b for a, b in zip(v, base)) for v in p.vertices[1:]]
    basis = _integer_row_space_basis(diffs, n)
    codim = n - len(basis)
    if codim == 0:
        return []
    ineqs = [(d, False) for d in basis]  # phi . d = 0 encoded as two-sided below
    eq_ineqs = []
    for d in basis:
        eq_ineqs.append((d, False))
        eq_ineqs.append((tuple(-x for x in d), False))
    face = FaceHandle(p, (Fraction(0),) * n, p.vertices)
    if codim == 1:
        nu = _normal_vector(basis, n)
        plus = DualCone(face, eq_ineqs + [(nu, True)], rays=(nu,), component_sign=1)
        minus = DualCone(
            face,
            eq_ineqs + [(tuple(-x for x in nu), True)],
            rays=(tuple(-x for x in nu),),
            component_sign=-1,
        )
        return [plus, minus]
    return [DualCone(face, eq_ineqs)]


def _integer_row_space_basis(rows, n):
    """Row-reduce integer vectors; returns an independent spanning subset."""
    basis = []
    work = [tuple(Fraction(x) for x in r) for r in rows if any(r)]
    pivots = []
    for r, orig in zip(work, [r for r in rows if any(r)]):
        vec = list(r)
        for pv_col, pv_row in pivots:
            if vec[pv_col] != 0:
                f = vec[pv_col] / pv_row[pv_col]
                vec = [x - f * y for x, y in zip(vec, pv_row)]
        col = next((i for i, x in enumerate(vec) if x != 0), None)
        if col is not None:
            pivots.append((col, vec))
            basis.append(orig)
    return basis


def _normal_vector(basis, n):
    """A primitive integer normal to a rank n-1 sublattice."""
    # solve basis . nu = 0 over Q, clear denominators
    from .linalg import field_solve
    from .fields import QQ as _QQ

    for free in range(n):
        rows = [[Fraction(b[i]) for i in range(n)] for b in basis]
        rows.append([Fraction(1 if i == free else 0) for i in range(n)])
        rhs = [Fraction(0)] * len(basis) + [Fraction(1)]
        sol = field_solve(rows, rhs, _QQ)
        if sol is not None:
            denom = 1
            for x in sol:
                denom = denom * x.denominator // gcd(denom, x.denominator)
            vec = tuple(int(x * denom) for x in sol)
            return _primitive(vec)
    raise AssertionError("no normal vector found")


def dual_key(p, phi):
    """Identify the dual containing phi: the selected face plus, in the
    codimension-1 whole-polytope case, which of the two components."""
    f = face_min(p, phi)
    if len(f.vertices) == len(p.vertices):
        duals = whole_polytope_duals(p)
        if len(duals) == 2:
            sign = 1 if duals[0].contains(phi) else -1
            return (f.vertices, sign)
    return (f.vertices, None)


def decompose_face(face, summands):
    """Unique faces Q_i of the summands P_i with sum(Q_i) = the given face."""
    total = minkowski_sum_all(summands)
    if total != face.parent:
        raise NotASummandDecomposition("summands do not add up to the parent polytope")
    phi = face.phi
    if all(x == 0 for x in phi) and len(face.vertices) != len(face.parent.vertices):
        raise NotASummandDecomposition("face handle lacks a usable witness character")
    parts = [face_min(p, phi).as_polytope() for p in summands]
    recombined = minkowski_sum_all(parts)
    assert recombined == face.as_polytope(), "face decomposition failed to re-sum"
    return parts


def single_polytope_reduce(diff):
    """Reconstruct R with R + minus = plus, or None when no summand exists.

    Candidate vertices are differences v_plus(c) - v_minus(c) over maximal
    cells c of the common refinement of the two normal fans; the hull of the
    candidates is verified by an exact re-sum.
    """
    plus, minus = diff.plus, diff.minus
    if plus.is_empty or minus.is_empty:
        raise EmptyOperand("reduction with an empty side")
    if minus.is_point():
        w = minus.vertices[0]
        return plus.translate(tuple(-x for x in w))
    candidates = set()
    for v in plus.vertices:
        rows_v = [tuple(a - b for a, b in zip(u, v)) for u in plus.vertices if u != v]
        for w in minus.vertices:
            rows_w = [tuple(a - b for a, b in zip(u, w)) for u in minus.vertices if u != w]
            if strict_cone_point(rows_v + rows_w, [], plus.dim) is not None:
                candidates.add(tuple(a - b for a, b in zip(v, w)))
    if not candidates:
        return None
    r = hull(sorted(candidates), dim=plus.dim)
    if minkowski_sum(r, minus) == plus:
        return r
    return None


def seminorm(obj, phi):
    """max spread of the character over a polytope; differences subtract."""
    if isinstance(obj, PolytopeDiff):
        return seminorm(obj.plus, phi) - seminorm(obj.minus, phi)
    if obj.is_empty:
        raise EmptyPolytope("seminorm over the empty polytope")
    values = [_dot(phi, v) for v in obj.vertices]
    return max(values) - min(values)


class PolytopeDiff:
    """Formal difference plus - minus in the Grothendieck group."""

    __slots__ = ("plus", "minus")

    def __init__(self, plus, minus=None):
        if minus is None:
            minus = IntegralPolytope(plus.dim, [(0,) * plus.dim])
        if plus.dim != minus.dim:
            raise DimensionMismatch("difference across dimensions")
        self.plus = plus
        self.minus = minus

    def __add__(self, other):
        return PolytopeDiff(
            minkowski_sum(self.plus, other.plus), minkowski_sum(self.minus, other.minus)
        )

    def __neg__(self):
        return PolytopeDiff(self.minus, self.plus)

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        """Grothendieck equality: plus + minus' = plus' + minus (cancellative)."""
        if not isinstance(other, PolytopeDiff):
            return NotImplemented
        return minkowski_sum(self.plus, other.minus) == minkowski_sum(other.plus, self.minus)

    def __hash__(self):
        raise TypeError("PolytopeDiff is unhashable; equality is Minkowski-cancellation")

    def pt_equal(self, other):
        """Equality in the translation quotient."""
        a = minkowski_sum(self.plus, other.minus).normalize_translation()
        b = minkowski_sum(other.plus, self.minus).normalize_translation()
        return a == b

    def reduce(self):
        return single_polytope_reduce(self)

    def is_single(self):
        return self.reduce() is not None

    def is_singleton_class(self):
        r = self.reduce()
        return r is not None and r.is_point()

    def normalized_single(self):
        """The translation-normalized single polytope, or None."""
        r = self.reduce()
        return r.normalize_translation() if r is not None else None

    def __repr__(self):
        return f"PolytopeDiff(plus={self.plus!r}, minus={self.minus!r})"

    def to_json(self):
        return {"plus": self.plus.to_json(), "minus": self.minus.to_json()}

    @classmethod
    def from_json(cls, data):
        return cls(
            IntegralPolytope.from_json(data["plus"]),
            IntegralPolytope.from_json(data["minus"]),
        )


def lattice_points(p):
    """All integer points of a polytope (bounding box + exact membership)."""
    if p.is_empty:
        return []
    n = p.dim
    if n == 0:
        return [()]
    lows = [min(v[i] for v in p.vertices) for i in range(n)]
    highs = [max(v[i] for v in p.vertices) for i in range(n)]
    out = []
    for cand in _cartesian(*[range(lo, hi + 1) for lo, hi in zip(lows, highs)]):
        if cand in p.vertices or in_convex_hull(cand, p.vertices):
            out.append(cand)
    return out


# ---------------------------------------------------------------------------
# marked polytopes and atlases


class MarkedPolytope:
    """Integral polytope with a 0/1 marking of its duals.

    Vertex duals carry the primary marks. `dual_marks`, keyed by dual_key
    output, records marks of any other duals (positive-dimensional faces, or
    the two components of a codimension-1 polytope's own dual)."""

    __slots__ = ("polytope", "vertex_marks", "evidence", "dual_marks")

    def __init__(self, polytope, vertex_marks, evidence=None, dual_marks=None):
        self.polytope = polytope
        self.vertex_marks = {tuple(v): bool(m) for v, m in vertex_marks.items()}
        for v in self.vertex_marks:
            if v not in polytope.vertices:
                raise DimensionMismatch(f"mark on a non-vertex {v}")
        self.evidence = dict(evidence) if evidence else {}
        self.dual_marks = dict(dual_marks) if dual_marks else {}

    def mark_at(self, phi):
        """Marking function: constant on duals, primary data on vertex duals."""
        key = dual_key(self.polytope, phi)
        if key in self.dual_marks:
            return self.dual_marks[key]
        if len(key[0]) == 1:
            return self.vertex_marks.get(key[0][0], False)
        return False

    def marked_vertices(self):
        return tuple(v for v in self.polytope.vertices if self.vertex_marks.get(v))

    def __eq__(self, other):
        if not isinstance(other, MarkedPolytope):
            return NotImplemented
        return self.polytope == other.polytope and self.vertex_marks == other.vertex_marks

    def __repr__(self):
        marks = {v: self.vertex_marks.get(v, False) for v in self.polytope.vertices}
        return f"MarkedPolytope({marks})"

    def to_json(self):
        return {
            "polytope": self.polytope.to_json(),
            "marks": [
                {"vertex": list(v), "marked": self.vertex_marks.get(v, False)}
                for v in self.polytope.vertices
            ],
        }

    @classmethod
    def from_json(cls, data):
        poly = IntegralPolytope.from_json(data["polytope"])
        marks = {tuple(m["vertex"]): m["marked"] for m in data["marks"]}
        return cls(poly, marks)


class Chart:
    """An open region of nonzero characters paired with a marked polytope."""

    __slots__ = ("region", "marked", "label")

    def __init__(self, region, marked, label=""):
        self.region = region
        self.marked = marked
        self.label = label

    def contains(self, phi):
        return self.region(phi)

    def mark_at(self, phi):
        return self.marked.mark_at(phi)


def nonvanishing_region(functional):
    """The chart region {phi : functional . phi != 0}."""
    functional = tuple(functional)

    def region(phi):
        return _dot(phi, functional) != 0

    return region


def sample_directions(n, bound=5):
    """Deterministic grid: primitive nonzero integer directions with entries
    in [-bound, bound]."""
    seen = set()
    out = []
    for cand in _cartesian(*[range(-bound, bound + 1) for _ in range(n)]):
        if all(x == 0 for x in cand):
            continue
        p = _primitive(cand)
        if p not in seen:
            seen.add(p)
            out.append(p)
    return out


def combine_atlas(charts, mode="sum", anchor=None, offsets=None, segments=None, grid_bound=5):
    """Combine chart-local marked polytopes into one marked polytope.

    charts: list of Chart. mode "sum" produces the Minkowski sum of the chart
    polytopes; mode "anchored" transfers the markings onto the given anchor,
    whose charts must satisfy P_i = anchor + offsets[i] * segments[i] up to
    translation. Coverage of the nonzero characters and agreement of the
    markings on overlaps are checked on a deterministic sample grid, refined
    by an interior witness per dual of the output. Returns (MarkedPolytope,
    diagnostics dict).
    """
    if not charts:
        raise CoverageGap("no charts given")
    if mode == "sum":
        target = minkowski_sum_all([c.marked.polytope for c in charts])
    elif mode == "anchored":
        if anchor is None:
            raise ValueError("anchored mode requires an anchor polytope")
        target = anchor
    else:
        raise ValueError(f"unknown mode {mode!r}")

    n = target.dim
    diagnostics = {"mode": mode, "charts": []}

    if mode == "anchored":
        for i, chart in enumerate(charts):
            expected = anchor
            k = offsets[i] if offsets else 0
            if k and segments:
                seg = segments[i]
                for _ in range(k):
                    expected = minkowski_sum(expected, seg)
            consistent = (
                expected.normalize_translation()
                == chart.marked.polytope.normalize_translation()
            )
            diagnostics["charts"].append(
                {"label": chart.label, "anchor_consistent": consistent}
            )
            if not consistent:
                raise InconsistentAtlas(
                    f"chart {chart.label or i}: polytope is not anchor + {k} * segment"
                )
    else:
        diagnostics["charts"] = [{"label": c.label} for c in charts]

    samples = sample_directions(n, bound=grid_bound)
    witness_samples = []
    for dual in vertex_duals(target):
        phi = dual.interior_point()
        if phi is not None:
            witness_samples.append(tuple(phi))
    all_samples = [tuple(Fraction(x) for x in s) for s in samples] + witness_samples

    # coverage + overlap agreement
    for phi in all_samples:
        covering = [c for c in charts if c.contains(phi)]
        if not covering:
            raise CoverageGap(f"no chart contains the character {tuple(map(str, phi))}")
        marks = {c.mark_at(phi) for c in covering}
        if len(marks) > 1:
            raise InconsistentAtlas(
                f"charts disagree at {tuple(map(str, phi))}: "
                + ", ".join(f"{c.label}={c.mark_at(phi)}" for c in covering)
            )

    # induced marking, constant per dual of the output
    per_dual = {}
    for phi in all_samples:
        key = dual_key(target, phi)
        covering = [c for c in charts if c.contains(phi)]
        mark = covering[0].mark_at(phi)
        if key in per_dual and per_dual[key] != mark:
            raise InconsistentAtlas(f"induced marking not constant on the dual {key}")
        per_dual[key] = mark

    vertex_marks = {}
    dual_marks = {}
    for key, mark in per_dual.items():
        face_verts, comp = key
        if len(face_verts) == 1 and comp is None:
            vertex_marks[face_verts[0]] = mark
        else:
            dual_marks[key] = mark
    for v in target.vertices:
        if v not in vertex_marks:
            comp_keys = [k for k in dual_marks if k[0] == (v,)]
            if comp_keys:
                vertex_marks[v] = all(dual_marks[k] for k in comp_keys)
            else:
                vertex_marks[v] = False
    diagnostics["per_dual"] = {str(k): v for k, v in per_dual.items()}
    return MarkedPolytope(target, vertex_marks, dual_marks=dual_marks), diagnostics
