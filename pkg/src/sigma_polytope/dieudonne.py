"""Dieudonne determinants and Newton polytopes of matrices.

The canonical representative det^c of a square matrix over the tower
skew-field follows the four-rule induction: 1x1 base case, zero last row,
Schur complement on a nonzero corner entry, and a column swap moving the
right-most nonzero entry of the last row into the corner (with a sign).
The determinant is reported as a cleared fraction (p, q) over the twisted
ring together with the formal difference of the two Newton polytopes, which
always reduces to a single polytope.
"""

from .errors import NotSquare, SingularInput, TwistMismatch
from .ore_tower import (
    SkewPoly,
    TowerContext,
    TowerFraction,
    clear_denominators,
    embed,
    frac_add,
    frac_inv,
    frac_mul,
    skew_right_divide,
)
from .polytope import PolytopeDiff
from .twisted import TwistData, TwistedPoly, newton_polytope, tl_mul


class RingMatrix:
    """Rectangular matrix with TwistedPoly entries over one twist."""

    __slots__ = ("twist", "rows", "cols", "entries", "integral")

    def __init__(self, twist, entries, integral=None):
        self.twist = twist
        self.entries = []
        for row in entries:
            out = []
            for x in row:
                if not isinstance(x, TwistedPoly):
                    raise TypeError("matrix entries must be TwistedPoly values")
                if not x.twist.same_as(twist):
                    raise TwistMismatch("entry twist differs from the matrix twist")
                out.append(x)
            self.entries.append(out)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0
        for row in self.entries:
            if len(row) != self.cols:
                raise NotSquare("ragged rows in matrix")
        if integral is None:
            integral = all(x.is_integral() for row in self.entries for x in row)
        self.integral = integral

    @classmethod
    def identity(cls, twist, n):
        one = TwistedPoly.one(twist)
        zero = TwistedPoly.zero(twist)
        return cls(twist, [[one if i == j else zero for j in range(n)] for i in range(n)])

    @classmethod
    def zero(cls, twist, rows, cols):
        z = TwistedPoly.zero(twist)
        return cls(twist, [[z for _ in range(cols)] for _ in range(rows)])

    def is_square(self):
        return self.rows == self.cols

    def entry(self, i, j):
        return self.entries[i][j]

    def mul(self, other):
        if self.cols != other.rows:
            raise NotSquare("inner dimensions do not match")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = TwistedPoly.zero(self.twist)
                for k in range(self.cols):
                    acc = acc + tl_mul(self.entries[i][k], other.entries[k][j])
                row.append(acc)
            out.append(row)
        return RingMatrix(self.twist, out)

    def add(self, other):
        return RingMatrix(
            self.twist,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
        )

    def remove_row(self, i):
        return RingMatrix(self.twist, [r for k, r in enumerate(self.entries) if k != i],
                          integral=self.integral)

    def remove_col(self, j):
        return RingMatrix(self.twist, [[x for k, x in enumerate(r) if k != j] for r in self.entries],
                          integral=self.integral)

    def transpose(self):
        return RingMatrix(self.twist, [[self.entries[i][j] for i in range(self.rows)]
                                       for j in range(self.cols)], integral=self.integral)

    def support_union(self):
        out = set()
        for row in self.entries:
            for x in row:
                out |= x.support()
        return out

    def __eq__(self, other):
        if not isinstance(other, RingMatrix):
            return NotImplemented
        return (self.twist.same_as(other.twist) and self.entries == other.entries)

    def __repr__(self):
        return f"RingMatrix({self.rows}x{self.cols}, twist={self.twist!r})"

    def to_json(self):
        return {
            "twist": self.twist.to_json(),
            "integral": self.integral,
            "rows": [[x.to_json(include_twist=False) for x in row] for row in self.entries],
        }

    @classmethod
    def from_json(cls, data):
        twist = TwistData.from_json(data["twist"])
        entries = [[TwistedPoly.from_json(x, twist=twist) for x in row] for row in data["rows"]]
        return cls(twist, entries, integral=data.get("integral"))


class DetResult:
    """Canonical determinant: tower value, cleared pair, polytope difference."""

    __slots__ = ("value", "cleared", "polytope", "ctx")

    def __init__(self, value, cleared, polytope, ctx):
        self.value = value
        self.cleared = cleared
        self.polytope = polytope
        self.ctx = ctx

    def single_polytope(self):
        return self.polytope.reduce()

    def __repr__(self):
        return f"DetResult(cleared=({self.cleared[0]!r}, {self.cleared[1]!r}))"


def det_canonical(a, ctx=None):
    """Canonical Dieudonne determinant; None when the determinant vanishes."""
    if not a.is_square():
        raise NotSquare(f"determinant of a {a.rows}x{a.cols} matrix")
    if ctx is None:
        ctx = TowerContext(a.twist)
    if a.rows == 0:
        value = TowerFraction.one(ctx, ctx.n)
        one = TwistedPoly.one(a.twist)
        return DetResult(value, (one, one), PolytopeDiff(newton_polytope(one), newton_polytope(one)), ctx)
    frac_entries = [[embed(ctx, x) for x in row] for row in a.entries]
    value = _det_rec(ctx, frac_entries)
    if value is None or value.is_zero():
        return None
    p, q = clear_denominators(value)
    diff = PolytopeDiff(newton_polytope(p), newton_polytope(q))
    return DetResult(value, (p, q), diff, ctx)


def _det_rec(ctx, m):
    n = len(m)
    if n == 1:
        return m[0][0]
    last = m[n - 1]
    if all(x.is_zero() for x in last):
        return None
    if last[n - 1].is_zero():
        j = max(k for k in range(n) if not last[k].is_zero())
        swapped = [[row[n - 1] if k == j else (row[j] if k == n - 1 else row[k])
                    for k in range(n)] for row in m]
        inner = _det_rec(ctx, swapped)
        return inner.negate() if inner is not None else None
    pivot = last[n - 1]
    pivot_inv = frac_inv(pivot)
    reduced = []
    for i in range(n - 1):
        row = []
        for j in range(n - 1):
            correction = frac_mul(frac_mul(m[i][n - 1], pivot_inv), last[j])
            row.append(frac_add(m[i][j], correction.negate()))
        reduced.append(row)
    inner = _det_rec(ctx, reduced)
    if inner is None:
        return None
    return frac_mul(inner, pivot)


def matrix_polytope(a, ctx=None):
    """Newton polytope of the matrix as a polytope difference; None if the
    determinant vanishes. The difference provably reduces to one polytope."""
    det = det_canonical(a, ctx=ctx)
    if det is None:
        return None
    return det.polytope


def matrix_polytope_single(a, ctx=None):
    """The reduced single Newton polytope of the matrix (None when empty)."""
    diff = matrix_polytope(a, ctx=ctx)
    if diff is None:
        return None
    single = diff.reduce()
    assert single is not None, "matrix polytope failed to reduce to one polytope"
    return single


# ---------------------------------------------------------------------------
# triangularization in one chosen variable


def _laurent_right_divmod(a, b):
    """a = q*b + r with the span of r smaller than the span of b (Laurent)."""
    sa = a.valuation()
    sb = b.valuation()
    a0 = a.shift_left(-sa) if sa else a
    b0 = b.shift_left(-sb) if sb else b
    q0, r0 = skew_right_divide(a0, b0)
    # a = z^{sa} a0 = z^{sa} (q0 b0 + r0) = (z^{sa} q0 z^{-sb}) b + z^{sa} r0
    q = q0.shift_left(sa) if sa else q0
    q = q.shift_right(-sb) if sb else q
    r = r0.shift_left(sa) if sa else r0
    return q, r


def triangularize_z(a, k, ctx=None, budget=None):
    """Upper-triangularize over the one-variable Laurent ring in coordinate k
    using only row transvections and swaps; returns (U, ops).

    U's entries are tower polynomials in z_k with coefficients in the
    fraction field of the remaining variables; ops is the list of recorded
    elementary operations, each ("swap", i, j) or ("transvect", i, j, q)
    meaning row_i -= q * row_j.
    """
    if not a.is_square():
        raise NotSquare("triangularization of a non-square matrix")
    twist = a.twist
    order = [c for c in range(twist.rank) if c != k] + [k]
    if ctx is None:
        ctx = TowerContext(twist, order=order)
    elif ctx.order[-1] != k:
        raise ValueError("context order must put the chosen coordinate last")
    n = a.rows
    rows = []
    for row in a.entries:
        out = []
        for x in row:
            fr = embed(ctx, x)
            out.append(fr.num if _den_trivial(fr) else None)
        if any(e is None for e in out):
            raise SingularInput("embedding produced a non-polynomial entry")
        rows.append(out)
    ops = []

    def transvect(i, j, q):
        # row_i -= q * row_j
        rows[i] = [rows[i][c].sub(q.mul(rows[j][c])) for c in range(n)]
        ops.append(("transvect", i, j, q))

    def swap(i, j):
        rows[i], rows[j] = rows[j], rows[i]
        ops.append(("swap", i, j))

    for col in range(n):
        while True:
            support = [i for i in range(col, n) if not rows[i][col].is_zero()]
            if not support:
                raise SingularInput(f"rank deficiency detected at column {col}")
            if len(support) == 1:
                if support[0] != col:
                    swap(col, support[0])
                break
            # reduce the widest entry against the narrowest
            def span(i):
                e = rows[i][col]
                return e.degree() - e.valuation()

            support.sort(key=span)
            tgt, src = support[-1], support[0]
            q, _ = _laurent_right_divmod(rows[tgt][col], rows[src][col])
            transvect(tgt, src, q)
    return rows, ops, ctx


def _den_trivial(fr):
    from .ore_tower import _poly_is_one

    return _poly_is_one(fr.den)


def apply_operations(a_rows, ops, n):
    """Re-apply recorded operations to a matrix of tower polynomials."""
    rows = [list(r) for r in a_rows]
    for op in ops:
        if op[0] == "swap":
            _, i, j = op
            rows[i], rows[j] = rows[j], rows[i]
        else:
            _, i, j, q = op
            rows[i] = [rows[i][c].sub(q.mul(rows[j][c])) for c in range(n)]
    return rows


def diagonal_product_fraction(rows, ctx):
    """Product of the diagonal entries, as a tower fraction."""
    acc = TowerFraction.one(ctx, ctx.n)
    for i in range(len(rows)):
        acc = frac_mul(acc, TowerFraction.from_poly(rows[i][i]))
    return acc


# ---------------------------------------------------------------------------
# classical determinant over commutative twists (exact expansion by minors)


def classical_determinant(a):
    """Determinant of a matrix over an untwisted ring, by expansion along the
    first column with minor memoization. Exact; used as the commutative route
    for markings and as an independent cross-check."""
    if not a.is_square():
        raise NotSquare("determinant of a non-square matrix")
    if a.twist.has_sigma or a.twist.has_mu:
        raise TwistMismatch("classical determinant requires an untwisted ring")
    n = a.rows
    if n == 0:
        return TwistedPoly.one(a.twist)
    cache = {}

    def minor(cols_tuple):
        if cols_tuple in cache:
            return cache[cols_tuple]
        i = a.rows - len(cols_tuple)  # next row index to expand
        if len(cols_tuple) == 1:
            result = a.entries[i][cols_tuple[0]]
        else:
            result = TwistedPoly.zero(a.twist)
            for pos, j in enumerate(cols_tuple):
                entry = a.entries[i][j]
                if entry.is_zero():
                    continue
                sub = minor(cols_tuple[:pos] + cols_tuple[pos + 1:])
                term = tl_mul(entry, sub)
                result = result + (term if pos % 2 == 0 else -term)
        cache[cols_tuple] = result
        return result

    return minor(tuple(range(n)))
