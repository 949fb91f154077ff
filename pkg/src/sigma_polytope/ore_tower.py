"""Recursive Ore localization of a twisted Laurent polynomial ring.

The ring is rebuilt as a tower: level k consists of Laurent polynomials in
the single variable z_k = delta_{e_{v_k}} (v = a chosen coordinate order)
with coefficients in the skew-field of fractions of the level below. Level-k
basis elements are the group basis vectors delta_{a e_{v_k}}, so

    (c z^a)(d z^b) = c * Ad_{a e_v}(d) * mu(a e_v, b e_v) * z^{a+b}

where Ad_h is conjugation by delta_h, acting on the field by phi(h) and on
lower basis elements by the monomial unit mu(h,h')/mu(h',h). Both one-sided
Euclidean divisions exist because leading coefficients are invertible in the
skew-field below; they drive the common-multiple computations which realize
the Ore condition constructively.

Fractions are right fractions num * den^{-1}. They are not kept in lowest
terms except at commutative levels, where a gcd reduction bounds growth.
"""

from fractions import Fraction

from .errors import ArityMismatch, BudgetExceeded, DivisionByZero, ZeroInput
from .twisted import TwistData, TwistedPoly, tl_mul

DEFAULT_BUDGET = 100_000


class TowerContext:
    """A twist, a variable order for the tower, and a size budget."""

    def __init__(self, twist, order=None, budget=DEFAULT_BUDGET):
        if twist.rank < 1:
            raise ArityMismatch("the tower needs at least one variable")
        self.twist = twist
        self.order = tuple(order) if order is not None else tuple(range(twist.rank))
        if sorted(self.order) != list(range(twist.rank)):
            raise ArityMismatch("order must be a permutation of the coordinates")
        self.budget = budget
        self.n = twist.rank
        self._commutative = self._commutative_levels()

    def var(self, level):
        """Ambient coordinate handled at `level` (1-based)."""
        return self.order[level - 1]

    def exp_vec(self, level, e):
        h = [0] * self.n
        h[self.var(level)] = e
        return tuple(h)

    def _commutative_levels(self):
        """commutative[k] (1-based): is the level-k polynomial ring commutative?"""
        twist = self.twist
        flags = [False] * (self.n + 1)
        ok = True
        for k in range(1, self.n + 1):
            vk = self.var(k)
            ek = self.exp_vec(k, 1)
            if not twist.sigmas[vk].is_identity():
                ok = False
            if any(twist.mu_exponents(ek, ek)):
                ok = False
            for j in range(1, k):
                ej = self.exp_vec(j, 1)
                if any(twist.conj_unit_exponents(ek, ej)):
                    ok = False
            flags[k] = ok
        return flags

    def level_commutative(self, level):
        return self._commutative[level]

    def check_size(self, size):
        if size > self.budget:
            raise BudgetExceeded(f"intermediate object of size {size} exceeds budget {self.budget}")

    def same_as(self, other):
        return self.twist.same_as(other.twist) and self.order == other.order

    def __repr__(self):
        return f"TowerContext(order={self.order}, twist={self.twist!r})"


# ---------------------------------------------------------------------------
# coefficient arithmetic at a given level (elements of the field below)


def _czero(ctx, level):
    if level == 1:
        return ctx.twist.field.zero
    return TowerFraction.zero(ctx, level - 1)


def _cone(ctx, level):
    if level == 1:
        return ctx.twist.field.one
    return TowerFraction.one(ctx, level - 1)


def _ciszero(ctx, level, c):
    if level == 1:
        return c == ctx.twist.field.zero
    return c.is_zero()


def _cadd(ctx, level, a, b):
    if level == 1:
        return a + b
    return frac_add(a, b)


def _cmul(ctx, level, a, b):
    if level == 1:
        return a * b
    return frac_mul(a, b)


def _cneg(ctx, level, a):
    if level == 1:
        return -a
    return a.negate()


def _cinv(ctx, level, a):
    if level == 1:
        if a == ctx.twist.field.zero:
            raise DivisionByZero("inverting zero coefficient")
        return ctx.twist.field.inverse(a)
    return frac_inv(a)


def _cfrom_field(ctx, level, c):
    if level == 1:
        return c
    return TowerFraction.scalar(ctx, level - 1, c)


def _csize(ctx, level, c):
    if level == 1:
        from .fields import RatFunc

        if isinstance(c, RatFunc):
            return len(c.num) + len(c.den)
        return 1
    return c.size


# ---------------------------------------------------------------------------
# skew polynomials


class SkewPoly:
    """Laurent polynomial at one tower level; coefficients kept on the left."""

    __slots__ = ("ctx", "level", "coeffs", "size")

    def __init__(self, ctx, level, coeffs):
        self.ctx = ctx
        self.level = level
        clean = {}
        size = 0
        for e, c in coeffs.items():
            if not _ciszero(ctx, level, c):
                clean[e] = c
                size += _csize(ctx, level, c)
        self.coeffs = clean
        self.size = size
        ctx.check_size(size)

    # -- constructors ------

    @classmethod
    def zero(cls, ctx, level):
        return cls(ctx, level, {})

    @classmethod
    def one(cls, ctx, level):
        return cls(ctx, level, {0: _cone(ctx, level)})

    @classmethod
    def variable(cls, ctx, level, e=1):
        return cls(ctx, level, {e: _cone(ctx, level)})

    @classmethod
    def from_scalar(cls, ctx, level, c):
        return cls(ctx, level, {0: _cfrom_field(ctx, level, c)})

    # -- structure ------

    def is_zero(self):
        return not self.coeffs

    def degree(self):
        if not self.coeffs:
            raise ZeroInput("degree of zero")
        return max(self.coeffs)

    def valuation(self):
        if not self.coeffs:
            raise ZeroInput("valuation of zero")
        return min(self.coeffs)

    def leading(self):
        return self.coeffs[self.degree()]

    def is_term(self):
        return len(self.coeffs) == 1

    def __eq__(self, other):
        if not isinstance(other, SkewPoly):
            return NotImplemented
        if self.level != other.level or set(self.coeffs) != set(other.coeffs):
            return False
        return self.sub(other).is_zero()

    def __hash__(self):
        raise TypeError("SkewPoly is unhashable")

    def __repr__(self):
        return f"SkewPoly(level={self.level}, exps={sorted(self.coeffs)})"

    # -- arithmetic ------

    def add(self, other):
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = _cadd(self.ctx, self.level, out.get(e, _czero(self.ctx, self.level)), c)
            if _ciszero(self.ctx, self.level, s):
                out.pop(e, None)
            else:
                out[e] = s
        return SkewPoly(self.ctx, self.level, out)

    def negate(self):
        return SkewPoly(self.ctx, self.level, {e: _cneg(self.ctx, self.level, c) for e, c in self.coeffs.items()})

    def sub(self, other):
        return self.add(other.negate())

    def mul(self, other):
        ctx, level = self.ctx, self.level
        out = {}
        zero = _czero(ctx, level)
        for a, ca in self.coeffs.items():
            ha = ctx.exp_vec(level, a)
            for b, cb in other.coeffs.items():
                d = ad_conjugate(ctx, level, ha, cb)
                gamma = ctx.twist.mu_exponents(ha, ctx.exp_vec(level, b))
                term = _cmul(ctx, level, ca, d)
                if any(gamma):
                    unit = _cfrom_field(ctx, level, ctx.twist.field.monomial(gamma))
                    term = _cmul(ctx, level, term, unit)
                e = a + b
                s = _cadd(ctx, level, out.get(e, zero), term)
                if _ciszero(ctx, level, s):
                    out.pop(e, None)
                else:
                    out[e] = s
        return SkewPoly(ctx, level, out)

    def scale_left(self, c):
        """Multiply every coefficient by c on the left."""
        return SkewPoly(
            self.ctx, self.level,
            {e: _cmul(self.ctx, self.level, c, x) for e, x in self.coeffs.items()},
        )

    def mul_term_right(self, c, e):
        """Right-multiply by the single term c * z^e."""
        ctx, level = self.ctx, self.level
        out = {}
        for a, ca in self.coeffs.items():
            ha = ctx.exp_vec(level, a)
            d = ad_conjugate(ctx, level, ha, c)
            gamma = ctx.twist.mu_exponents(ha, ctx.exp_vec(level, e))
            term = _cmul(ctx, level, ca, d)
            if any(gamma):
                term = _cmul(ctx, level, term, _cfrom_field(ctx, level, ctx.twist.field.monomial(gamma)))
            out[a + e] = term
        return SkewPoly(ctx, level, out)

    def shift_right(self, e):
        """Right-multiply by z^e (a unit)."""
        return self.mul_term_right(_cone(self.ctx, self.level), e)

    def shift_left(self, e):
        """Left-multiply by z^e (a unit)."""
        ctx, level = self.ctx, self.level
        he = ctx.exp_vec(level, e)
        out = {}
        for a, ca in self.coeffs.items():
            d = ad_conjugate(ctx, level, he, ca)
            gamma = ctx.twist.mu_exponents(he, ctx.exp_vec(level, a))
            if any(gamma):
                d = _cmul(ctx, level, d, _cfrom_field(ctx, level, ctx.twist.field.monomial(gamma)))
            out[e + a] = d
        return SkewPoly(ctx, level, out)

    def term_inverse(self):
        """Inverse of a single-term poly c * z^e, as a (coefficient, exponent) pair."""
        if len(self.coeffs) != 1:
            raise DivisionByZero("only single-term polynomials are units")
        ctx, level = self.ctx, self.level
        (e, c), = self.coeffs.items()
        hm = ctx.exp_vec(level, -e)
        ad_c = ad_conjugate(ctx, level, hm, c)
        gamma = ctx.twist.mu_exponents(hm, ctx.exp_vec(level, e))
        x = ad_c
        if any(gamma):
            x = _cmul(ctx, level, x, _cfrom_field(ctx, level, ctx.twist.field.monomial(gamma)))
        return _cinv(ctx, level, x), -e

    def to_json(self):
        def enc(c):
            if self.level == 1:
                from .fields import format_coefficient

                return format_coefficient(c)
            return c.to_json()

        return {"level": self.level, "coeffs": {str(e): enc(c) for e, c in sorted(self.coeffs.items())}}


# ---------------------------------------------------------------------------
# conjugation by basis elements and by field monomials


def ad_conjugate(ctx, level, h, x):
    """Ad_{delta_h}(x) for x a coefficient at `level` (element of D_{level-1})."""
    if all(v == 0 for v in h):
        return x
    if level == 1:
        return ctx.twist.phi_action(h)(x)
    return _ad_fraction(ctx, h, x)


def _ad_fraction(ctx, h, fr):
    return TowerFraction(ctx, fr.level, _ad_poly(ctx, h, fr.num), _ad_poly(ctx, h, fr.den))


def _ad_poly(ctx, h, p):
    level = p.level
    out = {}
    for e, c in p.coeffs.items():
        d = ad_conjugate(ctx, level, h, c)
        unit = ctx.twist.conj_unit_exponents(h, ctx.exp_vec(level, e))
        if any(unit):
            d = _cmul(ctx, level, d, _cfrom_field(ctx, level, ctx.twist.field.monomial(unit)))
        out[e] = d
    return SkewPoly(ctx, level, out)


def ad_by_monomial(ctx, level, exps, x):
    """Conjugation by the field monomial with the given exponents."""
    if not any(exps):
        return x
    if level == 1:
        return x  # the coefficient field is commutative
    return TowerFraction(
        ctx, x.level,
        _ad_mono_poly(ctx, exps, x.num),
        _ad_mono_poly(ctx, exps, x.den),
    )


def _ad_mono_poly(ctx, exps, p):
    level = p.level
    out = {}
    for e, c in p.coeffs.items():
        d = ad_by_monomial(ctx, level, exps, c)
        # m * delta_h * m^{-1} = (m / phi(h)(m)) * delta_h
        h = ctx.exp_vec(level, e)
        image = ctx.twist.phi_action(h).exponent_image(exps)
        diff = tuple(a - b for a, b in zip(exps, image))
        if any(diff):
            d = _cmul(ctx, level, d, _cfrom_field(ctx, level, ctx.twist.field.monomial(diff)))
        out[e] = d
    return SkewPoly(ctx, level, out)


def ad_inverse(ctx, level, h, x):
    """The inverse automorphism of Ad_{delta_h}: conjugation by delta_h^{-1}."""
    if all(v == 0 for v in h):
        return x
    neg = tuple(-v for v in h)
    mu = ctx.twist.mu_exponents(neg, h)
    return ad_by_monomial(ctx, level, tuple(-v for v in mu), ad_conjugate(ctx, level, neg, x))


# ---------------------------------------------------------------------------
# one-sided Euclidean division (polynomial supports)


def _require_poly(p):
    if p.is_zero():
        return
    if p.valuation() < 0:
        raise ValueError("division requires supports shifted to non-negative exponents")


def skew_right_divide(a, b):
    """Quotient and remainder with a = quotient * b + remainder,
    deg remainder < deg b. Supports must be non-negative."""
    if b.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    _require_poly(a)
    _require_poly(b)
    ctx, level = a.ctx, a.level
    db = b.degree()
    lb = b.leading()
    q = SkewPoly.zero(ctx, level)
    r = a
    while not r.is_zero() and r.degree() >= db:
        da = r.degree()
        delta = da - db
        hd = ctx.exp_vec(level, delta)
        x = ad_conjugate(ctx, level, hd, lb)
        gamma = ctx.twist.mu_exponents(hd, ctx.exp_vec(level, db))
        if any(gamma):
            x = _cmul(ctx, level, x, _cfrom_field(ctx, level, ctx.twist.field.monomial(gamma)))
        c = _cmul(ctx, level, r.leading(), _cinv(ctx, level, x))
        term = SkewPoly(ctx, level, {delta: c})
        q = q.add(term)
        r = r.sub(term.mul(b))
    return q, r


def skew_left_divide(a, b):
    """Quotient and remainder with a = b * quotient + remainder."""
    if b.is_zero():
        raise DivisionByZero("division by the zero polynomial")
    _require_poly(a)
    _require_poly(b)
    ctx, level = a.ctx, a.level
    db = b.degree()
    lb = b.leading()
    hb = ctx.exp_vec(level, db)
    q = SkewPoly.zero(ctx, level)
    r = a
    while not r.is_zero() and r.degree() >= db:
        da = r.degree()
        delta = da - db
        gamma = ctx.twist.mu_exponents(hb, ctx.exp_vec(level, delta))
        target = _cmul(ctx, level, _cinv(ctx, level, lb), r.leading())
        if any(gamma):
            target = _cmul(ctx, level, target, _cinv(ctx, level, _cfrom_field(ctx, level, ctx.twist.field.monomial(gamma))))
        d = ad_inverse(ctx, level, hb, target)
        term = SkewPoly(ctx, level, {delta: d})
        q = q.add(term)
        r = r.sub(b.mul(term))
    return q, r


def lclm(a, b, verify=True):
    """Least common left multiple: (m, s, t) with m = s*a = t*b.

    Solves the left Ore condition constructively via the extended Euclidean
    scheme over right division; both products are re-verified exactly.
    """
    if a.is_zero() or b.is_zero():
        raise DivisionByZero("common multiple with zero")
    ctx, level = a.ctx, a.level
    sa = a.valuation()
    sb = b.valuation()
    a0 = a.shift_left(-sa) if sa else a
    b0 = b.shift_left(-sb) if sb else b
    # remainder sequence with left cofactors: r_i = u_i * a0 + v_i * b0
    r_prev, r_cur = a0, b0
    u_prev, u_cur = SkewPoly.one(ctx, level), SkewPoly.zero(ctx, level)
    v_prev, v_cur = SkewPoly.zero(ctx, level), SkewPoly.one(ctx, level)
    while not r_cur.is_zero():
        q, r_next = skew_right_divide(r_prev, r_cur)
        u_next = u_prev.sub(q.mul(u_cur))
        v_next = v_prev.sub(q.mul(v_cur))
        r_prev, r_cur = r_cur, r_next
        u_prev, u_cur = u_cur, u_next
        v_prev, v_cur = v_cur, v_next
    # now u_cur * a0 = -v_cur * b0
    s = u_cur.shift_right(-sa) if sa else u_cur
    t = v_cur.negate()
    t = t.shift_right(-sb) if sb else t
    m = s.mul(a)
    if verify:
        check = t.mul(b)
        assert m.sub(check).is_zero(), "left Ore solve-back failed"
    return m, s, t


def lcrm(a, b, verify=True):
    """Common right multiple: (m, x, y) with m = a*x = b*y."""
    if a.is_zero() or b.is_zero():
        raise DivisionByZero("common multiple with zero")
    ctx, level = a.ctx, a.level
    sa = a.valuation()
    sb = b.valuation()
    a0 = a.shift_right(-sa) if sa else a
    b0 = b.shift_right(-sb) if sb else b
    r_prev, r_cur = a0, b0
    u_prev, u_cur = SkewPoly.one(ctx, level), SkewPoly.zero(ctx, level)
    v_prev, v_cur = SkewPoly.zero(ctx, level), SkewPoly.one(ctx, level)
    while not r_cur.is_zero():
        q, r_next = skew_left_divide(r_prev, r_cur)
        u_next = u_prev.sub(u_cur.mul(q))
        v_next = v_prev.sub(v_cur.mul(q))
        r_prev, r_cur = r_cur, r_next
        u_prev, u_cur = u_cur, u_next
        v_prev, v_cur = v_cur, v_next
    x = u_cur.shift_left(-sa) if sa else u_cur
    y = v_cur.negate()
    y = y.shift_left(-sb) if sb else y
    m = a.mul(x)
    if verify:
        check = b.mul(y)
        assert m.sub(check).is_zero(), "right Ore solve-back failed"
    return m, x, y


# ---------------------------------------------------------------------------
# fractions


class TowerFraction:
    """Right fraction num * den^{-1} at a tower level."""

    __slots__ = ("ctx", "level", "num", "den", "size")

    def __init__(self, ctx, level, num, den, simplify=True):
        if den.is_zero():
            raise DivisionByZero("fraction with zero denominator")
        self.ctx = ctx
        self.level = level
        if simplify:
            num, den = _simplify(ctx, level, num, den)
        self.num = num
        self.den = den
        self.size = num.size + den.size
        ctx.check_size(self.size)

    # -- constructors ------

    @classmethod
    def zero(cls, ctx, level):
        return cls(ctx, level, SkewPoly.zero(ctx, level), SkewPoly.one(ctx, level), simplify=False)

    @classmethod
    def one(cls, ctx, level):
        return cls(ctx, level, SkewPoly.one(ctx, level), SkewPoly.one(ctx, level), simplify=False)

    @classmethod
    def scalar(cls, ctx, level, c):
        return cls(ctx, level, SkewPoly.from_scalar(ctx, level, c), SkewPoly.one(ctx, level), simplify=False)

    @classmethod
    def from_poly(cls, p):
        return cls(p.ctx, p.level, p, SkewPoly.one(p.ctx, p.level), simplify=False)

    # -- structure ------

    def is_zero(self):
        return self.num.is_zero()

    def is_poly(self):
        return self.den.is_term()

    def negate(self):
        return TowerFraction(self.ctx, self.level, self.num.negate(), self.den, simplify=False)

    def __eq__(self, other):
        if not isinstance(other, TowerFraction):
            return NotImplemented
        return frac_eq(self, other)

    def __hash__(self):
        raise TypeError("TowerFraction is unhashable; equality is by cross-multiplication")

    def __repr__(self):
        return f"TowerFraction(level={self.level}, num={self.num!r}, den={self.den!r})"

    def to_json(self):
        return {"num": self.num.to_json(), "den": self.den.to_json()}


def _simplify(ctx, level, num, den):
    """Cheap normalizations; full gcd reduction at commutative levels."""
    if num.is_zero():
        return num, SkewPoly.one(ctx, level)
    # strip a common right power of z
    shift = min(num.valuation(), den.valuation())
    if shift:
        num = num.shift_right(-shift)
        den = den.shift_right(-shift)
    # single-term denominator: fold it into the numerator
    if den.is_term():
        e, c = next(iter(den.coeffs.items()))
        if e != 0 or not _is_cone(ctx, level, c):
            ci, ei = den.term_inverse()
            num = num.mul_term_right(ci, ei)
            den = SkewPoly.one(ctx, level)
        return num, den
    if ctx.level_commutative(level):
        g = _commutative_gcd(num, den)
        if not g.is_term() or g.degree() != 0 or not _is_cone(ctx, level, g.coeffs.get(0)):
            qn, rn = skew_right_divide(*_shift_pair(num, g))
            qd, rd = skew_right_divide(*_shift_pair(den, g))
            if rn.is_zero() and rd.is_zero():
                num = qn.shift_right(num.valuation() - g.valuation()) if (num.valuation() - g.valuation()) else qn
                den = qd.shift_right(den.valuation() - g.valuation()) if (den.valuation() - g.valuation()) else qd
                shift = min(num.valuation(), den.valuation())
                if shift:
                    num = num.shift_right(-shift)
                    den = den.shift_right(-shift)
        # normalize the denominator's leading coefficient to 1
        lead = den.leading()
        if not _is_cone(ctx, level, lead):
            inv = _cinv(ctx, level, lead)
            num = num.scale_left(inv)
            den = den.scale_left(inv)
    return num, den


def _shift_pair(p, g):
    sp = p.valuation()
    sg = g.valuation()
    a = p.shift_right(-sp) if sp else p
    b = g.shift_right(-sg) if sg else g
    return a, b


def _is_cone(ctx, level, c):
    """Cheap structural test for the coefficient 1 (conservative: may say
    False on unnormalized representatives of 1, never True wrongly)."""
    if c is None:
        return False
    if level == 1:
        return c == ctx.twist.field.one
    return _poly_syntactic_one(c.num) and _poly_syntactic_one(c.den)


def _poly_syntactic_one(p):
    if len(p.coeffs) != 1 or 0 not in p.coeffs:
        return False
    return _is_cone(p.ctx, p.level, p.coeffs[0])


def _commutative_gcd(a, b):
    """Euclidean gcd at a commutative level (monic-normalized)."""
    ctx, level = a.ctx, a.level
    x = a.shift_right(-a.valuation()) if a.valuation() else a
    y = b.shift_right(-b.valuation()) if b.valuation() else b
    while not y.is_zero():
        _, r = skew_right_divide(x, y)
        x, y = y, r
    lead = x.leading()
    if not _is_cone(ctx, level, lead):
        x = x.scale_left(_cinv(ctx, level, lead))
    return x


def frac_add(u, v):
    _require_same_level(u, v)
    ctx, level = u.ctx, u.level
    if u.is_zero():
        return v
    if v.is_zero():
        return u
    if u.den.sub(v.den).is_zero():
        return TowerFraction(ctx, level, u.num.add(v.num), u.den)
    m, x, y = lcrm(u.den, v.den)
    num = u.num.mul(x).add(v.num.mul(y))
    return TowerFraction(ctx, level, num, m)


def frac_sub(u, v):
    return frac_add(u, v.negate())


def frac_mul(u, v):
    _require_same_level(u, v)
    ctx, level = u.ctx, u.level
    if u.is_zero() or v.is_zero():
        return TowerFraction.zero(ctx, level)
    if u.den.is_term() and u.den.degree() == 0 and _is_cone(ctx, level, u.den.coeffs.get(0)):
        return TowerFraction(ctx, level, u.num.mul(v.num), v.den)
    # den_u^{-1} * num_v = x * y^{-1}  via  den_u * x = num_v * y
    m, x, y = lcrm(u.den, v.num)
    num = u.num.mul(x)
    den = v.den.mul(y)
    return TowerFraction(ctx, level, num, den)


def frac_inv(u):
    if u.is_zero():
        raise DivisionByZero("inverting the zero fraction")
    return TowerFraction(u.ctx, u.level, u.den, u.num)


def frac_eq(u, v):
    _require_same_level(u, v)
    if u.is_zero():
        return v.is_zero()
    if v.is_zero():
        return False
    if u.den.sub(v.den).is_zero():
        return u.num.sub(v.num).is_zero()
    m, x, y = lcrm(u.den, v.den)
    return u.num.mul(x).sub(v.num.mul(y)).is_zero()


def frac_arith(op, u, v=None):
    """Dispatcher matching the documented operation set."""
    if op == "add":
        return frac_add(u, v)
    if op == "mul":
        return frac_mul(u, v)
    if op == "inv":
        return frac_inv(u)
    if op == "eq":
        return frac_eq(u, v)
    raise ValueError(f"unknown fraction operation {op!r}")


def _require_same_level(u, v):
    if u.level != v.level or not u.ctx.same_as(v.ctx):
        raise ArityMismatch("fractions from different tower levels")


# ---------------------------------------------------------------------------
# lifted automorphisms


def lift_automorphism(ctx, h):
    """The automorphism of the tower induced by conjugation with delta_h.

    Satisfies sigma(p q^{-1}) = sigma(p) sigma(q)^{-1}; with h = 0 this is
    the identity."""
    h = tuple(h)

    def apply(x):
        if isinstance(x, TowerFraction):
            return _ad_fraction(ctx, h, x) if any(h) else x
        if isinstance(x, SkewPoly):
            return _ad_poly(ctx, h, x) if any(h) else x
        return ctx.twist.phi_action(h)(x)

    return apply


# ---------------------------------------------------------------------------
# embedding of the twisted ring


def embed(ctx, w):
    """Ring embedding of a TwistedPoly into the top-level fraction field."""
    if not isinstance(w, TwistedPoly):
        raise ArityMismatch("embed expects a TwistedPoly")
    if not w.twist.same_as(ctx.twist):
        raise ArityMismatch("twist data mismatch in embed")
    total = SkewPoly.zero(ctx, ctx.n)
    for h, c in w.terms.items():
        total = total.add(_embed_term(ctx, h, c))
    return TowerFraction.from_poly(total)


def _embed_term(ctx, h, c):
    # delta_h = lambda(h)^{-1} * prod_j delta_{h_{v_j} e_{v_j}}, where
    # lambda(h) collects the cocycle units the ordered product produces
    field = ctx.twist.field
    lam = field.one
    prefix = [0] * ctx.n
    for j in range(1, ctx.n + 1):
        step = ctx.exp_vec(j, h[ctx.var(j)])
        if any(prefix) or any(step):
            exps = ctx.twist.mu_exponents(tuple(prefix), step)
            if any(exps):
                lam = lam * field.monomial(exps)
        for i, x in enumerate(step):
            prefix[i] += x
    scalar = c * field.inverse(lam)
    poly = None
    for j in range(1, ctx.n + 1):
        e = h[ctx.var(j)]
        if j == 1:
            poly = SkewPoly(ctx, 1, {e: scalar})
        else:
            poly = SkewPoly(ctx, j, {e: TowerFraction.from_poly(poly)})
    return poly


def tower_poly_to_twisted(p):
    """Inverse of the embedding on denominator-free nested polynomials."""
    ctx = p.ctx
    return _to_twisted(ctx, p, p.level)


def _to_twisted(ctx, p, level):
    twist = ctx.twist
    out = TwistedPoly.zero(twist)
    for e, c in p.coeffs.items():
        mono = TwistedPoly.monomial(twist, ctx.exp_vec(level, e))
        if level == 1:
            low = TwistedPoly(twist, {(0,) * ctx.n: c})
        else:
            if not _poly_is_one(c.den):
                raise ZeroInput("nested polynomial is not denominator-free")
            low = _to_twisted(ctx, c.num, level - 1)
        out = out + tl_mul(low, mono)
    return out


# ---------------------------------------------------------------------------
# purification: clearing denominators back to the twisted ring


def is_pure_poly(p):
    if p.level == 1:
        return True
    for c in p.coeffs.values():
        if not _poly_is_one(c.den):
            return False
        if not is_pure_poly(c.num):
            return False
    return True


def purify_fraction(fr):
    """Rewrite a fraction as A * B^{-1} with A, B denominator-free."""
    ctx, level = fr.ctx, fr.level
    if fr.is_zero():
        return SkewPoly.zero(ctx, level), SkewPoly.one(ctx, level)
    if level == 1:
        return fr.num, fr.den
    nu_n, n_hat = _left_clear_poly(fr.num)
    nu_d, d_hat = _left_clear_poly(fr.den)
    # fr = emb(nu_n)^{-1} * n_hat * d_hat^{-1} * emb(nu_d)
    if _poly_is_one(nu_d):
        c, den = n_hat, d_hat
    else:
        # d_hat^{-1} * nu_d = t * s^{-1}   from   nu_d * s = d_hat * t
        _, s, t = pure_lcrm(_emb_low(ctx, level, nu_d), d_hat)
        c, den = n_hat.mul(t), s
    if _poly_is_one(nu_n):
        return c, den
    # nu_n^{-1} * c = s2 * t2^{-1}   from   nu_n * s2 = c * t2
    _, s2, t2 = pure_lcrm(_emb_low(ctx, level, nu_n), c)
    return s2, den.mul(t2)


def _poly_is_one(p):
    return p.is_term() and not p.is_zero() and p.degree() == 0 and _is_cone(p.ctx, p.level, p.coeffs.get(0))


def _emb_low(ctx, level, low_poly):
    """Embed a pure level-(level-1) polynomial as a degree-0 term at `level`."""
    return SkewPoly(ctx, level, {0: TowerFraction.from_poly(low_poly)})


def _left_clear_poly(p):
    """p = emb(nu)^{-1} * p_hat with nu pure one level down, p_hat pure."""
    ctx, level = p.ctx, p.level
    items = sorted(p.coeffs.items())
    lefts = []  # (exponent, c_e, d_e): kappa_e = c_e^{-1} d_e
    for e, kappa in items:
        a, b = purify_fraction(kappa)
        if _poly_is_one(b):
            lefts.append((e, SkewPoly.one(ctx, level - 1), a))
            continue
        m, s, t = pure_lclm(a, b)
        lefts.append((e, s, t))
    # fold: maintain nu = cofactors[j] * c_j for every processed j
    nu = SkewPoly.one(ctx, level - 1)
    cofactors = [None] * len(lefts)
    for i, (e, c_e, d_e) in enumerate(lefts):
        if _poly_is_one(c_e):
            cofactors[i] = nu
            continue
        m, w_nu, w_c = pure_lclm(nu, c_e)
        # new nu = m = w_nu * nu = w_c * c_e
        for j in range(i):
            cofactors[j] = w_nu.mul(cofactors[j])
        cofactors[i] = w_c
        nu = m
    out = {}
    for (e, c_e, d_e), u in zip(lefts, cofactors):
        out[e] = TowerFraction.from_poly(u.mul(d_e))
    return nu, SkewPoly(ctx, level, out)


def pure_lclm(a, b):
    """(m, s, t) with m = s*a = t*b and every object denominator-free."""
    ctx, level = a.ctx, a.level
    m0, s0, t0 = lclm(a, b, verify=False)
    if level == 1 or (is_pure_poly(s0) and is_pure_poly(t0)):
        m = s0.mul(a)
        assert m.sub(t0.mul(b)).is_zero(), "pure left common multiple failed"
        return m, s0, t0
    s, t = _left_clear_pair(s0, t0)
    m = s.mul(a)
    assert m.sub(t.mul(b)).is_zero(), "pure left common multiple failed"
    return m, s, t


def _left_clear_pair(p, q):
    """Left-multiply two polynomials by one pure scalar making both pure."""
    ctx, level = p.ctx, p.level
    # collect left fractions of every coefficient of both polynomials
    entries = []
    for which, poly in ((0, p), (1, q)):
        for e, kappa in poly.coeffs.items():
            a, b = purify_fraction(kappa)
            if _poly_is_one(b):
                entries.append((which, e, SkewPoly.one(ctx, level - 1), a))
            else:
                _, s, t = pure_lclm(a, b)
                entries.append((which, e, s, t))
    w = SkewPoly.one(ctx, level - 1)
    cof = [None] * len(entries)
    for i, (_, _, c_e, _) in enumerate(entries):
        if _poly_is_one(c_e):
            cof[i] = w
            continue
        m, w_old, w_new = pure_lclm(w, c_e)
        for j in range(i):
            cof[j] = w_old.mul(cof[j])
        cof[i] = w_new
        w = m
    p_out = {}
    q_out = {}
    for (which, e, c_e, d_e), u in zip(entries, cof):
        target = p_out if which == 0 else q_out
        target[e] = TowerFraction.from_poly(u.mul(d_e))
    return SkewPoly(ctx, level, p_out), SkewPoly(ctx, level, q_out)


def pure_lcrm(a, b):
    """(m, x, y) with m = a*x = b*y and every object denominator-free."""
    ctx, level = a.ctx, a.level
    m0, x0, y0 = lcrm(a, b, verify=False)
    if level == 1 or (is_pure_poly(x0) and is_pure_poly(y0)):
        m = a.mul(x0)
        assert m.sub(b.mul(y0)).is_zero(), "pure right common multiple failed"
        return m, x0, y0
    x, y = _right_clear_pair(x0, y0)
    m = a.mul(x)
    assert m.sub(b.mul(y)).is_zero(), "pure right common multiple failed"
    return m, x, y


def _right_clear_pair(p, q):
    """Right-multiply two polynomials by one pure scalar making both pure."""
    ctx, level = p.ctx, p.level
    entries = []
    for which, poly in ((0, p), (1, q)):
        for e, kappa in poly.coeffs.items():
            alpha, beta = purify_fraction(kappa)
            entries.append((which, e, alpha, beta))
    w = SkewPoly.one(ctx, level - 1)
    cof = [None] * len(entries)
    for i, (_, e, _, beta) in enumerate(entries):
        if _poly_is_one(beta):
            cof[i] = w
            continue
        beta_conj = _ad_inv_poly(ctx, level, e, beta)
        m, w_old, w_new = pure_lcrm(w, beta_conj)
        # m = w * w_old = beta_conj * w_new
        for j in range(i):
            cof[j] = cof[j].mul(w_old)
        cof[i] = w_new
        w = m
    p_out = {}
    q_out = {}
    for (which, e, alpha, beta), r in zip(entries, cof):
        # kappa_e * Ad_e(w) = alpha beta^{-1} Ad_e(beta_conj r) = alpha Ad_e(r)
        value = alpha.mul(_ad_poly_level(ctx, level, e, r))
        target = p_out if which == 0 else q_out
        target[e] = TowerFraction.from_poly(value)
    return SkewPoly(ctx, level, p_out), SkewPoly(ctx, level, q_out)


def _ad_inv_poly(ctx, level, e, poly):
    """Ad_{e z-direction}^{-1} applied to a pure level-(level-1) polynomial."""
    h = ctx.exp_vec(level, e)
    wrapped = ad_inverse(ctx, level, h, TowerFraction.from_poly(poly))
    num, den = purify_fraction(wrapped)
    assert _poly_is_one(den), "conjugation should preserve purity"
    return num


def _ad_poly_level(ctx, level, e, poly):
    h = ctx.exp_vec(level, e)
    wrapped = ad_conjugate(ctx, level, h, TowerFraction.from_poly(poly))
    num, den = purify_fraction(wrapped)
    assert _poly_is_one(den), "conjugation should preserve purity"
    return num


def clear_denominators(x):
    """Write a top-level fraction as p * q^{-1} with p, q in the twisted ring."""
    if x.is_zero():
        raise ZeroInput("clearing denominators of zero")
    if x.level != x.ctx.n:
        raise ArityMismatch("clear_denominators expects a top-level fraction")
    num, den = purify_fraction(x)
    return tower_poly_to_twisted(num), tower_poly_to_twisted(den)
