"""Exact coefficient fields for twisted Laurent polynomial rings.

Three field families are implemented: the rationals (as `fractions.Fraction`),
prime fields F_p, and rational function fields Q(y1..ym) represented as
normalized fractions of integer-coefficient polynomials. Monomial
automorphisms y_i -> prod_j y_j^{M_ji} act on the function fields.
"""

from fractions import Fraction
from math import gcd

from .errors import ArityMismatch, DivisionByZero, NotUnimodular, ParseError
from .linalg import mat_det, mat_inv_unimodular, mat_mul, mat_vec


# ---------------------------------------------------------------------------
# integer polynomials (dict: exponent tuple -> nonzero int)


def _poly_add(a, b):
    out = dict(a)
    for e, c in b.items():
        s = out.get(e, 0) + c
        if s:
            out[e] = s
        else:
            out.pop(e, None)
    return out


def _poly_neg(a):
    return {e: -c for e, c in a.items()}


def _poly_mul(a, b):
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            s = out.get(e, 0) + ca * cb
            if s:
                out[e] = s
            else:
                out.pop(e, None)
    return out


def _poly_content(a):
    g = 0
    for c in a.values():
        g = gcd(g, abs(c))
        if g == 1:
            break
    return g


def _poly_scale_down(a, k):
    return {e: c // k for e, c in a.items()}


def _lead_sign(a):
    if not a:
        return 0
    e = max(a)
    return 1 if a[e] > 0 else -1


def _split_by_last(a, nvars):
    """View `a` as a univariate polynomial in the last variable."""
    out = {}
    for e, c in a.items():
        d = e[nvars - 1]
        out.setdefault(d, {})[e[: nvars - 1]] = c
    return out


def _join_last(coeffs, nvars):
    out = {}
    for d, poly in coeffs.items():
        for e, c in poly.items():
            out[e + (d,)] = c
    return out


def _prem(a, b, nvars):
    """Pseudo-remainder of a by b in the last variable (both nonzero)."""
    ua = _split_by_last(a, nvars)
    ub = _split_by_last(b, nvars)
    db = max(ub)
    lb = ub[db]
    r = ua
    dr = max(r) if r else -1
    while r and dr >= db:
        lr = r[dr]
        # r = lb*r - lr*z^(dr-db)*b
        new = {}
        for d, poly in r.items():
            new[d] = _poly_mul(poly, lb)
        for d, poly in ub.items():
            shifted = d + dr - db
            term = _poly_mul(poly, lr)
            new[shifted] = _poly_add(new.get(shifted, {}), _poly_neg(term))
        r = {d: p for d, p in new.items() if p}
        dr = max(r) if r else -1
    return _join_last(r, nvars)


def _poly_gcd(a, b, nvars):
    """Primitive-PRS gcd of integer polynomials; sign-normalized."""
    if not a:
        return _sign_normalize(dict(b))
    if not b:
        return _sign_normalize(dict(a))
    if nvars == 0:
        return {(): gcd(a[()], b[()])}
    # fast path: one side is a single term
    if len(a) == 1 or len(b) == 1:
        mono_exps = tuple(
            min(min(e[i] for e in a), min(e[i] for e in b)) for i in range(nvars)
        )
        cont = gcd(_poly_content(a), _poly_content(b))
        return {mono_exps: cont}

    def content_lower(p):
        g = {}
        for poly in _split_by_last(p, nvars).values():
            g = _poly_gcd(g, poly, nvars - 1)
            if g == {(0,) * (nvars - 1): 1}:
                break
        return g

    ca = content_lower(a)
    cb = content_lower(b)
    g_cont = _poly_gcd(ca, cb, nvars - 1)
    pa = _exact_div_lower(a, ca, nvars)
    pb = _exact_div_lower(b, cb, nvars)
    da = max(_split_by_last(pa, nvars))
    db = max(_split_by_last(pb, nvars))
    if da < db:
        pa, pb = pb, pa
    while pb:
        r = _prem(pa, pb, nvars)
        pa = pb
        if r:
            cr = content_lower(r)
            pb = _exact_div_lower(r, cr, nvars)
        else:
            pb = {}
    result = _poly_mul(pa, {e + (0,): c for e, c in g_cont.items()})
    return _sign_normalize(result)


def _exact_div_lower(a, g, nvars):
    """Divide each last-variable coefficient of a by g (exact, lower vars)."""
    if g == {(0,) * (nvars - 1): 1}:
        return dict(a)
    ua = _split_by_last(a, nvars)
    out = {}
    for d, poly in ua.items():
        out[d] = _exact_poly_div(poly, g, nvars - 1)
    return _join_last(out, nvars)


def _exact_poly_div(a, b, nvars):
    """Exact division a / b of integer polynomials (raises if not exact)."""
    if not a:
        return {}
    if nvars == 0:
        q, r = divmod(a[()], b[()])
        if r:
            raise ArithmeticError("inexact integer division")
        return {(): q}
    if len(b) == 1:
        (eb, cb), = b.items()
        out = {}
        for e, c in a.items():
            q, r = divmod(c, cb)
            if r:
                raise ArithmeticError("inexact polynomial division")
            out[tuple(x - y for x, y in zip(e, eb))] = q
        if any(x < 0 for e in out for x in e):
            raise ArithmeticError("inexact polynomial division")
        return out
    ua = _split_by_last(a, nvars)
    ub = _split_by_last(b, nvars)
    db = max(ub)
    lb = ub[db]
    quot = {}
    r = {d: dict(p) for d, p in ua.items()}
    while r:
        dr = max(r)
        if dr < db:
            raise ArithmeticError("inexact polynomial division")
        qc = _exact_poly_div(r[dr], lb, nvars - 1)
        quot[dr - db] = qc
        for d, poly in ub.items():
            shifted = d + dr - db
            term = _poly_neg(_poly_mul(poly, qc))
            s = _poly_add(r.get(shifted, {}), term)
            if s:
                r[shifted] = s
            else:
                r.pop(shifted, None)
    return _join_last(quot, nvars)


def _sign_normalize(a):
    if _lead_sign(a) < 0:
        return _poly_neg(a)
    return a


# ---------------------------------------------------------------------------
# rational functions


class RatFunc:
    """Normalized fraction of integer polynomials in `nvars` variables.

    Canonical form: gcd(num, den) = 1 (including integer content and common
    monomial factors) and the denominator's lexicographically leading
    coefficient is positive.
    """

    __slots__ = ("nvars", "num", "den")

    def __init__(self, nvars, num, den=None, _normalized=False):
        self.nvars = nvars
        if den is None:
            den = {(0,) * nvars: 1}
        if _normalized:
            self.num = num
            self.den = den
            return
        if not den:
            raise DivisionByZero("rational function with zero denominator")
        if not num:
            self.num = {}
            self.den = {(0,) * nvars: 1}
            return
        # clear Laurent exponents jointly
        mins = [0] * nvars
        for i in range(nvars):
            lo = min(min(e[i] for e in num), min(e[i] for e in den))
            mins[i] = lo if lo < 0 else 0
        if any(mins):
            shift = tuple(-m for m in mins)
            num = {tuple(x + s for x, s in zip(e, shift)): c for e, c in num.items()}
            den = {tuple(x + s for x, s in zip(e, shift)): c for e, c in den.items()}
        g = _poly_gcd(num, den, nvars)
        if g != {(0,) * nvars: 1}:
            num = _exact_poly_div(num, g, nvars)
            den = _exact_poly_div(den, g, nvars)
        if _lead_sign(den) < 0:
            num = _poly_neg(num)
            den = _poly_neg(den)
        self.num = num
        self.den = den

    # -- ring ops ---------------------------------------------------------

    def _check(self, other):
        if not isinstance(other, RatFunc):
            if isinstance(other, int):
                return RatFunc(self.nvars, {(0,) * self.nvars: other} if other else {})
            if isinstance(other, Fraction):
                return RatFunc(
                    self.nvars,
                    {(0,) * self.nvars: other.numerator} if other.numerator else {},
                    {(0,) * self.nvars: other.denominator},
                )
            return NotImplemented
        if other.nvars != self.nvars:
            raise ArityMismatch("rational functions over different variable counts")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        num = _poly_add(_poly_mul(self.num, other.den), _poly_mul(other.num, self.den))
        return RatFunc(self.nvars, num, _poly_mul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(self.nvars, _poly_neg(self.num), self.den, _normalized=True)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.nvars, _poly_mul(self.num, other.num), _poly_mul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise DivisionByZero("inverting zero rational function")
        return RatFunc(self.nvars, self.den, self.num)

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __eq__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.nvars, tuple(sorted(self.num.items())), tuple(sorted(self.den.items()))))

    def __bool__(self):
        return bool(self.num)

    def cross_equal(self, other):
        """Equality by cross-multiplication of possibly unnormalized forms."""
        return _poly_mul(self.num, other.den) == _poly_mul(other.num, self.den)

    def is_one(self):
        return self.num == self.den

    def __repr__(self):
        return f"RatFunc({format_coefficient(self)})"


# ---------------------------------------------------------------------------
# prime fields


class PrimeFieldElement:
    __slots__ = ("p", "value")

    def __init__(self, p, value):
        self.p = p
        self.value = value % p

    def _check(self, other):
        if isinstance(other, int):
            return PrimeFieldElement(self.p, other)
        if isinstance(other, PrimeFieldElement):
            if other.p != self.p:
                raise ArityMismatch("elements of different prime fields")
            return other
        return NotImplemented

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return PrimeFieldElement(self.p, self.value + other.value)

    __radd__ = __add__

    def __neg__(self):
        return PrimeFieldElement(self.p, -self.value)

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return PrimeFieldElement(self.p, self.value - other.value)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return PrimeFieldElement(self.p, self.value * other.value)

    __rmul__ = __mul__

    def inverse(self):
        if self.value == 0:
            raise DivisionByZero("inverting zero in a prime field")
        return PrimeFieldElement(self.p, pow(self.value, -1, self.p))

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __eq__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self.value == other.value

    def __hash__(self):
        return hash((self.p, self.value))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} mod {self.p}"


# ---------------------------------------------------------------------------
# field descriptors


class RationalField:
    """Q, with Fraction elements."""

    nvars = 0
    kind = "rational"

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def from_int(self, k):
        return Fraction(k)

    def coerce(self, x):
        if isinstance(x, Fraction):
            return x
        if isinstance(x, int):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def inverse(self, a):
        if a == 0:
            raise DivisionByZero("inverting zero")
        return 1 / a

    def is_zero(self, a):
        return a == 0

    def is_integral(self, a):
        return a.denominator == 1

    def is_integral_unit(self, a):
        return a == 1 or a == -1

    def monomial_one(self):
        return Fraction(1)

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("rational")

    def __repr__(self):
        return "Q"


class PrimeField:
    """F_p for a prime p. The whole field is the image of the integers."""

    nvars = 0
    kind = "prime"

    def __init__(self, p):
        if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        self.p = p

    @property
    def zero(self):
        return PrimeFieldElement(self.p, 0)

    @property
    def one(self):
        return PrimeFieldElement(self.p, 1)

    def from_int(self, k):
        return PrimeFieldElement(self.p, k)

    def coerce(self, x):
        if isinstance(x, PrimeFieldElement):
            if x.p != self.p:
                raise ArityMismatch("wrong prime field")
            return x
        if isinstance(x, int):
            return PrimeFieldElement(self.p, x)
        if isinstance(x, Fraction):
            return PrimeFieldElement(self.p, x.numerator) * PrimeFieldElement(self.p, x.denominator).inverse()
        raise TypeError(f"cannot coerce {x!r} into F_{self.p}")

    def inverse(self, a):
        return a.inverse()

    def is_zero(self, a):
        return a.value == 0

    def is_integral(self, a):
        return True

    def is_integral_unit(self, a):
        return a.value != 0

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("prime", self.p))

    def __repr__(self):
        return f"F_{self.p}"


class FunctionField:
    """Q(y1..ym): fractions of integer-coefficient polynomials."""

    kind = "ratfunc"

    def __init__(self, nvars, prefix="y"):
        self.nvars = nvars
        self.prefix = prefix

    @property
    def zero(self):
        return RatFunc(self.nvars, {})

    @property
    def one(self):
        return RatFunc(self.nvars, {(0,) * self.nvars: 1})

    def from_int(self, k):
        return RatFunc(self.nvars, {(0,) * self.nvars: k} if k else {})

    def coerce(self, x):
        if isinstance(x, RatFunc):
            if x.nvars != self.nvars:
                raise ArityMismatch("wrong variable count")
            return x
        if isinstance(x, int):
            return self.from_int(x)
        if isinstance(x, Fraction):
            return RatFunc(
                self.nvars,
                {(0,) * self.nvars: x.numerator} if x.numerator else {},
                {(0,) * self.nvars: x.denominator},
            )
        raise TypeError(f"cannot coerce {x!r} into {self!r}")

    def monomial(self, exps, coeff=1):
        """The monomial coeff * prod y_i^{exps[i]} (exps may be negative)."""
        if len(exps) != self.nvars:
            raise ArityMismatch("wrong exponent vector length")
        if coeff == 0:
            return self.zero
        pos = tuple(max(e, 0) for e in exps)
        neg = tuple(-min(e, 0) for e in exps)
        return RatFunc(self.nvars, {pos: coeff}, {neg: 1})

    def inverse(self, a):
        return a.inverse()

    def is_zero(self, a):
        return not a.num

    def is_integral(self, a):
        # the integral form Z[y1^+-..] inside Q(y): denominator a +-monomial
        return len(a.den) == 1 and abs(next(iter(a.den.values()))) == 1

    def is_integral_unit(self, a):
        return (
            len(a.num) == 1
            and len(a.den) == 1
            and abs(next(iter(a.num.values()))) == 1
            and abs(next(iter(a.den.values()))) == 1
        )

    def variable(self, i):
        e = [0] * self.nvars
        e[i] = 1
        return self.monomial(tuple(e))

    def __eq__(self, other):
        return isinstance(other, FunctionField) and other.nvars == self.nvars

    def __hash__(self):
        return hash(("ratfunc", self.nvars))

    def __repr__(self):
        return f"Q({', '.join(self.prefix + str(i + 1) for i in range(self.nvars))})"


QQ = RationalField()


def field_inverse(a):
    """Multiplicative inverse of a field element (any implemented field)."""
    if isinstance(a, Fraction):
        if a == 0:
            raise DivisionByZero("inverting zero")
        return 1 / a
    if isinstance(a, int):
        if a == 0:
            raise DivisionByZero("inverting zero")
        return Fraction(1, a)
    return a.inverse()


# ---------------------------------------------------------------------------
# monomial automorphisms


class MonomialAutomorphism:
    """The field automorphism y_i -> prod_j y_j^{M_ji} for an integer matrix
    M with determinant +-1. Composition satisfies
    apply(M1, apply(M2, f)) = apply(M1*M2, f)."""

    __slots__ = ("matrix", "nvars")

    def __init__(self, matrix):
        self.matrix = tuple(tuple(int(x) for x in row) for row in matrix)
        self.nvars = len(self.matrix)
        d = mat_det(self.matrix)
        if d not in (1, -1):
            raise NotUnimodular(f"monomial automorphism matrix has determinant {d}")

    @classmethod
    def identity(cls, nvars):
        return cls(tuple(tuple(1 if i == j else 0 for j in range(nvars)) for i in range(nvars)))

    def is_identity(self):
        return all(
            self.matrix[i][j] == (1 if i == j else 0)
            for i in range(self.nvars)
            for j in range(self.nvars)
        )

    def exponent_image(self, exps):
        return mat_vec(self.matrix, exps)

    def __call__(self, a):
        return apply_automorphism(self, a)

    def compose(self, other):
        return MonomialAutomorphism(mat_mul(self.matrix, other.matrix))

    def inverse(self):
        return MonomialAutomorphism(mat_inv_unimodular(self.matrix))

    def power(self, k):
        if k == 0:
            return MonomialAutomorphism.identity(self.nvars)
        base = self if k > 0 else self.inverse()
        result = MonomialAutomorphism.identity(self.nvars)
        for _ in range(abs(k)):
            result = result.compose(base)
        return result

    def __eq__(self, other):
        return isinstance(other, MonomialAutomorphism) and other.matrix == self.matrix

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"MonomialAutomorphism({self.matrix})"


def apply_automorphism(sigma, a):
    """Apply a monomial automorphism to a field element."""
    if isinstance(a, (Fraction, int, PrimeFieldElement)):
        if sigma.nvars != 0:
            raise ArityMismatch("automorphism variable count does not match element")
        return a
    if isinstance(a, RatFunc):
        if sigma.nvars != a.nvars:
            raise ArityMismatch("automorphism variable count does not match element")
        if sigma.is_identity() or not a.num:
            return a
        num = {tuple(sigma.exponent_image(e)): c for e, c in a.num.items()}
        den = {tuple(sigma.exponent_image(e)): c for e, c in a.den.items()}
        return RatFunc(a.nvars, num, den)
    raise TypeError(f"cannot apply automorphism to {a!r}")


# ---------------------------------------------------------------------------
# canonical strings

def format_coefficient(a):
    """Canonical string form: "p/q", "k mod p", or "(num)/(den)"."""
    if isinstance(a, Fraction):
        return str(a)
    if isinstance(a, int):
        return str(a)
    if isinstance(a, PrimeFieldElement):
        return f"{a.value} mod {a.p}"
    if isinstance(a, RatFunc):
        return f"({_format_poly(a.num, a.nvars)})/({_format_poly(a.den, a.nvars)})"
    raise TypeError(f"cannot format {a!r}")


def _format_poly(p, nvars, prefix="y"):
    if not p:
        return "0"
    parts = []
    for e in sorted(p, reverse=True):
        c = p[e]
        factors = []
        for i, k in enumerate(e):
            if k == 1:
                factors.append(f"{prefix}{i + 1}")
            elif k != 0:
                factors.append(f"{prefix}{i + 1}^{k}")
        if factors:
            body = "*".join(factors)
            if c == 1:
                term = body
            elif c == -1:
                term = f"-{body}"
            else:
                term = f"{c}*{body}"
        else:
            term = str(c)
        parts.append(term)
    out = parts[0]
    for term in parts[1:]:
        if term.startswith("-"):
            out += " - " + term[1:]
        else:
            out += " + " + term
    return out


def parse_coefficient(field, s):
    """Parse a canonical coefficient string back into an element of `field`."""
    s = s.strip()
    if isinstance(field, RationalField):
        try:
            return Fraction(s)
        except ValueError as exc:
            raise ParseError(f"bad rational: {s!r}") from exc
    if isinstance(field, PrimeField):
        body = s.split("mod")
        try:
            value = int(body[0].strip())
            if len(body) == 2 and int(body[1].strip()) != field.p:
                raise ParseError(f"wrong modulus in {s!r}")
        except ValueError as exc:
            raise ParseError(f"bad prime field element: {s!r}") from exc
        return field.from_int(value)
    if isinstance(field, FunctionField):
        if "/" in s and s.startswith("("):
            depth = 0
            for i, ch in enumerate(s):
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                    if depth == 0:
                        break
            num_src = s[1:i]
            rest = s[i + 1:].strip()
            if not rest.startswith("/"):
                raise ParseError(f"bad rational function: {s!r}")
            den_src = rest[1:].strip()
            if den_src.startswith("(") and den_src.endswith(")"):
                den_src = den_src[1:-1]
            num = _parse_poly(num_src, field.nvars)
            den = _parse_poly(den_src, field.nvars)
            return RatFunc(field.nvars, num, den)
        num = _parse_poly(s, field.nvars)
        return RatFunc(field.nvars, num)
    raise TypeError(f"unknown field {field!r}")


def _parse_poly(src, nvars, prefix="y"):
    """Parse "3*y1^2*y2 - y1 + 1" into a polynomial dict."""
    tokens = src.replace("-", "+-").split("+")
    poly = {}
    for tok in tokens:
        tok = tok.strip()
        if not tok:
            continue
        sign = 1
        if tok.startswith("-"):
            sign = -1
            tok = tok[1:].strip()
        coeff = 1
        exps = [0] * nvars
        for factor in tok.split("*"):
            factor = factor.strip()
            if not factor:
                continue
            if factor.startswith(prefix):
                body = factor[len(prefix):]
                if "^" in body:
                    var_s, exp_s = body.split("^")
                    exp = int(exp_s)
                else:
                    var_s, exp = body, 1
                idx = int(var_s) - 1
                if idx < 0 or idx >= nvars:
                    raise ParseError(f"unknown variable in {factor!r}")
                exps[idx] += exp
            else:
                try:
                    coeff *= int(factor)
                except ValueError as exc:
                    raise ParseError(f"bad factor {factor!r}") from exc
        e = tuple(exps)
        s = poly.get(e, 0) + sign * coeff
        if s:
            poly[e] = s
        else:
            poly.pop(e, None)
    return poly
