"""Exact linear algebra helpers: integer matrices, Smith normal form,
rational simplex, and Gaussian elimination over arbitrary implemented fields.

Everything here is dimension-small and coefficient-exact; no floats.
"""

from fractions import Fraction
from math import gcd

from .errors import NotUnimodular


# ---------------------------------------------------------------------------
# integer matrices


def identity_matrix(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def mat_mul(a, b):
    if not a:
        return ()
    inner = len(b)
    cols = len(b[0]) if inner else 0
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols))
        for i in range(len(a))
    )


def mat_vec(a, v):
    return tuple(sum(row[k] * v[k] for k in range(len(v))) for row in a)


def mat_det(a):
    """Determinant of a small integer matrix, by fraction-free expansion."""
    n = len(a)
    if n == 0:
        return 1
    if n == 1:
        return a[0][0]
    rows = [list(r) for r in a]
    det = 1
    for col in range(n):
        pivot = next((r for r in range(col, n) if rows[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            rows[col], rows[pivot] = rows[pivot], rows[col]
            det = -det
        # rational elimination kept exact with Fractions
        pv = Fraction(rows[col][col])
        det *= pv
        for r in range(col + 1, n):
            factor = Fraction(rows[r][col]) / pv
            rows[r] = [Fraction(rows[r][j]) - factor * Fraction(rows[col][j]) for j in range(n)]
    assert det.denominator == 1
    return int(det)


def mat_inv_unimodular(a):
    """Inverse of an integer matrix with determinant +-1."""
    n = len(a)
    d = mat_det(a)
    if d not in (1, -1):
        raise NotUnimodular(f"matrix has determinant {d}, expected +-1")
    aug = [[Fraction(a[i][j]) for j in range(n)] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        pv = aug[col][col]
        aug[col] = [x / pv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    inv = tuple(tuple(int(aug[i][n + j]) for j in range(n)) for i in range(n))
    return inv


def mat_pow(a, k):
    n = len(a)
    if k < 0:
        return mat_pow(mat_inv_unimodular(a), -k)
    result = identity_matrix(n)
    base = a
    while k:
        if k & 1:
            result = mat_mul(result, base)
        base = mat_mul(base, base)
        k >>= 1
    return result


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(a):
    """Return (d, u, v) with u*a*v = d diagonal, u, v unimodular, d_i | d_{i+1}."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [list(r) for r in a]
    u = [list(r) for r in identity_matrix(rows)]
    v = [list(r) for r in identity_matrix(cols)]

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(i, j, q):  # row i += q * row j
        m[i] = [x + q * y for x, y in zip(m[i], m[j])]
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]

    def add_col(i, j, q):  # col i += q * col j
        for r in m:
            r[i] += q * r[j]
        for r in v:
            r[i] += q * r[j]

    def negate_row(i):
        m[i] = [-x for x in m[i]]
        u[i] = [-x for x in u[i]]

    t = 0
    while t < min(rows, cols):
        # locate pivot of least absolute value in the remaining block
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if m[i][j] != 0 and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        dirty = False
        for i in range(t + 1, rows):
            if m[i][t] != 0:
                q = -(m[i][t] // m[t][t])
                add_row(i, t, q)
                if m[i][t] != 0:
                    dirty = True
        for j in range(t + 1, cols):
            if m[t][j] != 0:
                q = -(m[t][j] // m[t][t])
                add_col(j, t, q)
                if m[t][j] != 0:
                    dirty = True
        if dirty:
            continue
        if m[t][t] < 0:
            negate_row(t)
        t += 1

    # enforce divisibility chain d_i | d_{i+1}
    changed = True
    while changed:
        changed = False
        for i in range(min(rows, cols) - 1):
            di, dj = m[i][i], m[i + 1][i + 1]
            if di != 0 and dj % di != 0:
                add_col(i, i + 1, 1)
                # re-reduce the 2x2 block by restarting elimination at i
                t = i
                while t < min(rows, cols):
                    best = None
                    for r in range(t, rows):
                        for c in range(t, cols):
                            if m[r][c] != 0 and (best is None or abs(m[r][c]) < abs(m[best[0]][best[1]])):
                                best = (r, c)
                    if best is None:
                        break
                    swap_rows(t, best[0])
                    swap_cols(t, best[1])
                    dirty = False
                    for r in range(t + 1, rows):
                        if m[r][t] != 0:
                            add_row(r, t, -(m[r][t] // m[t][t]))
                            if m[r][t] != 0:
                                dirty = True
                    for c in range(t + 1, cols):
                        if m[t][c] != 0:
                            add_col(c, t, -(m[t][c] // m[t][t]))
                            if m[t][c] != 0:
                                dirty = True
                    if dirty:
                        continue
                    if m[t][t] < 0:
                        negate_row(t)
                    t += 1
                changed = True
                break

    d = tuple(tuple(r) for r in m)
    return d, tuple(tuple(r) for r in u), tuple(tuple(r) for r in v)


# ---------------------------------------------------------------------------
# rational simplex (Bland's rule, two phases)


def _pivot(tableau, basis, row, col):
    pv = tableau[row][col]
    tableau[row] = [x / pv for x in tableau[row]]
    for r in range(len(tableau)):
        if r != row and tableau[r][col] != 0:
            f = tableau[r][col]
            tableau[r] = [x - f * y for x, y in zip(tableau[r], tableau[row])]
    basis[row] = col


def _simplex_phase(tableau, basis, cost, ncols, limit=None):
    """Minimize cost over the current tableau in place. cost is a full row
    (reduced against the basis by the caller). Only columns below `limit`
    are eligible to enter the basis. Returns False on unboundedness."""
    if limit is None:
        limit = ncols
    while True:
        col = next((j for j in range(limit) if cost[j] < 0), None)
        if col is None:
            return True
        ratios = [
            (tableau[r][ncols] / tableau[r][col], basis[r], r)
            for r in range(len(tableau))
            if tableau[r][col] > 0
        ]
        if not ratios:
            return False
        _, _, row = min(ratios, key=lambda t: (t[0], t[1]))  # Bland tie-break
        pv_row = tableau[row]
        f = cost[col]
        for j in range(ncols + 1):
            cost[j] -= f * pv_row[j] / pv_row[col]
        _pivot(tableau, basis, row, col)


def lp_solve(a_rows, b_vals, objective, maximize=False):
    """Solve min/max objective . x  s.t.  a_rows x = b_vals, x >= 0.

    Returns (status, x, value) with status in {"optimal", "infeasible",
    "unbounded"}. All data must be Fraction/int.
    """
    m = len(a_rows)
    n = len(a_rows[0]) if m else len(objective)
    rows = [[Fraction(x) for x in row] for row in a_rows]
    b = [Fraction(x) for x in b_vals]
    for i in range(m):
        if b[i] < 0:
            rows[i] = [-x for x in rows[i]]
            b[i] = -b[i]

    # phase 1
    ncols = n + m
    tableau = [rows[i] + [Fraction(int(i == j)) for j in range(m)] + [b[i]] for i in range(m)]
    basis = [n + i for i in range(m)]
    cost = [Fraction(0)] * (ncols + 1)
    for j in range(n):
        cost[j] = -sum(tableau[i][j] for i in range(m))
    cost[ncols] = -sum(b)
    _simplex_phase(tableau, basis, cost, ncols)
    if -cost[ncols] != 0:
        return "infeasible", None, None
    # drive artificial variables out of the basis where possible
    for r in range(m):
        if basis[r] >= n:
            col = next((j for j in range(n) if tableau[r][j] != 0), None)
            if col is not None:
                _pivot(tableau, basis, r, col)
    # drop rows still basic in an artificial variable (redundant constraints)
    keep = [r for r in range(m) if basis[r] < n]
    tableau = [tableau[r] for r in keep]
    basis = [basis[r] for r in keep]

    # phase 2
    obj = [Fraction(x) for x in objective]
    if maximize:
        obj = [-x for x in obj]
    cost = [obj[j] if j < n else Fraction(0) for j in range(ncols)] + [Fraction(0)]
    for r, bv in enumerate(basis):
        if cost[bv] != 0:
            f = cost[bv]
            for j in range(ncols + 1):
                cost[j] -= f * tableau[r][j]
    ok = _simplex_phase(tableau, basis, cost, ncols, limit=n)
    if not ok:
        return "unbounded", None, None
    x = [Fraction(0)] * n
    for r, bv in enumerate(basis):
        if bv < n:
            x[bv] = tableau[r][ncols]
    value = -cost[ncols]
    if maximize:
        value = -value
    return "optimal", x, value


def in_convex_hull(point, points):
    """Exact test: is `point` a convex combination of `points`?"""
    if not points:
        return False
    n = len(point)
    m = len(points)
    a_rows = [[Fraction(points[j][i]) for j in range(m)] for i in range(n)]
    a_rows.append([Fraction(1)] * m)
    b = [Fraction(point[i]) for i in range(n)] + [Fraction(1)]
    status, _, _ = lp_solve(a_rows, b, [Fraction(0)] * m)
    return status == "optimal"


def strict_cone_point(strict_rows, equality_rows, n):
    """Find a rational phi with r . phi > 0 for every strict row and
    e . phi = 0 for every equality row, or None if impossible.

    Solved as: maximize t subject to r . phi >= t, t <= 1, phi in [-1,1]^n.
    """
    # variables: p_i (phi+), q_i (phi-), t, slack per strict row,
    # slack for t<=1, slacks for box constraints
    ns = len(strict_rows)
    nv = 2 * n + 1
    rows = []
    b = []
    for r in strict_rows:
        row = [Fraction(r[i]) for i in range(n)] + [-Fraction(r[i]) for i in range(n)] + [Fraction(-1)]
        rows.append(row)
        b.append(Fraction(0))
    for e in equality_rows:
        row = [Fraction(e[i]) for i in range(n)] + [-Fraction(e[i]) for i in range(n)] + [Fraction(0)]
        rows.append(row)
        b.append(Fraction(0))
    rows.append([Fraction(0)] * (2 * n) + [Fraction(1)])  # t <= 1
    b.append(Fraction(1))
    for i in range(2 * n):  # box: each split variable <= 1
        row = [Fraction(0)] * nv
        row[i] = Fraction(1)
        rows.append(row)
        b.append(Fraction(1))
    total_slacks = ns + 1 + 2 * n
    ncols = nv + total_slacks
    full = []
    slack_at = 0
    for idx, row in enumerate(rows):
        slack = [Fraction(0)] * total_slacks
        is_equality = ns <= idx < ns + len(equality_rows)
        if not is_equality:
            if idx < ns:
                slack[slack_at] = Fraction(-1)  # r.phi - t - s = 0 -> r.phi >= t
            else:
                slack[slack_at] = Fraction(1)
            slack_at += 1
        full.append(row + slack)
    objective = [Fraction(0)] * ncols
    objective[2 * n] = Fraction(1)  # t
    status, x, value = lp_solve(full, b, objective, maximize=True)
    if status != "optimal" or value is None or value <= 0:
        return None
    phi = tuple(x[i] - x[n + i] for i in range(n))
    return phi


# ---------------------------------------------------------------------------
# Gaussian elimination over an implemented field


def field_solve(rows, rhs, field):
    """Solve rows . x = rhs over `field`. Returns one solution or None.

    `rows` is a list of coefficient lists (field elements), `rhs` a list of
    field elements. Under-determined systems return a solution with free
    variables at zero.
    """
    m = len(rows)
    n = len(rows[0]) if m else 0
    a = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
    zero = field.zero
    piv_cols = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if a[i][c] != zero), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = field.inverse(a[r][c])
        a[r] = [inv * x for x in a[r]]
        for i in range(m):
            if i != r and a[i][c] != zero:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if a[i][n] != zero:
            return None
    x = [zero] * n
    for i, c in enumerate(piv_cols):
        x[c] = a[i][n]
    return x
