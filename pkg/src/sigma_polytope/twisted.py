"""Twisted Laurent polynomial rings.

A twisted group ring of H = Z^n over a coefficient field is specified by a
pair of structure functions: per-generator field automorphisms (here always
monomial, pairwise commuting) and a 2-cocycle of units given by integer
bilinear forms with monomial values. The product of single terms is

    (c * h) . (c' * h')  =  c * phi(h)(c') * mu(h, h') * (h + h')

extended bilinearly. Supports, minimal parts along a character, Newton
polytopes, units, and the structure-function axioms all live here.
"""

import json
import random
from dataclasses import dataclass, field as dataclass_field
from fractions import Fraction

from . import polytope as _polytope
from .errors import ArityMismatch, TwistMismatch, ZeroInput
from .fields import (
    FunctionField,
    MonomialAutomorphism,
    PrimeField,
    QQ,
    RationalField,
    format_coefficient,
    parse_coefficient,
)
from .linalg import identity_matrix, mat_mul


def phi_value(phi, h):
    """Rational value of a character (sequence of rationals) on an exponent vector."""
    return sum((Fraction(p) * x for p, x in zip(phi, h)), Fraction(0))


class TwistData:
    """Structure functions for a twisted group ring of Z^rank.

    sigmas: one MonomialAutomorphism of the coefficient field per generator,
    pairwise commuting. cocycles: one rank x rank integer matrix Q_i per field
    variable; mu(h, h') = prod_i y_i^(h^T Q_i h').
    """

    def __init__(self, rank, field=None, sigmas=None, cocycles=None):
        self.rank = rank
        self.field = field if field is not None else QQ
        m = self.field.nvars
        if sigmas is None:
            sigmas = [MonomialAutomorphism.identity(m)] * rank
        self.sigmas = tuple(sigmas)
        if len(self.sigmas) != rank:
            raise ArityMismatch("need one automorphism per generator")
        for s in self.sigmas:
            if s.nvars != m:
                raise ArityMismatch("automorphism arity does not match the field")
        if cocycles is None:
            cocycles = [tuple(tuple(0 for _ in range(rank)) for _ in range(rank))] * m
        self.cocycles = tuple(tuple(tuple(int(x) for x in row) for row in q) for q in cocycles)
        if len(self.cocycles) != m:
            raise ArityMismatch("need one bilinear form per field variable")
        self.has_sigma = any(not s.is_identity() for s in self.sigmas)
        self.has_mu = any(any(any(row) for row in q) for q in self.cocycles)
        self._phi_cache = {}

    # -- constructors -------------------------------------------------------

    @classmethod
    def untwisted(cls, rank, field=None):
        return cls(rank, field=field)

    @classmethod
    def quantum_torus(cls):
        """H = Z^2 over Q(x) with v*u = x*(u*v): mu((a,b),(c,d)) = x^(b*c)."""
        return cls(2, field=FunctionField(1, prefix="x"),
                   cocycles=[((0, 0), (1, 0))])

    # -- structure data -----------------------------------------------------

    def phi_action(self, h):
        """The automorphism phi(h) = prod sigma_i^{h_i} (sigmas commute)."""
        h = tuple(h)
        cached = self._phi_cache.get(h)
        if cached is not None:
            return cached
        m = self.field.nvars
        mat = identity_matrix(m)
        for s, k in zip(self.sigmas, h):
            if k:
                mat = mat_mul(mat, s.power(k).matrix)
        result = MonomialAutomorphism(mat)
        self._phi_cache[h] = result
        return result

    def mu_exponents(self, h, hp):
        """Exponent vector of mu(h, h') in the field variables."""
        return tuple(
            sum(h[i] * q[i][j] * hp[j] for i in range(self.rank) for j in range(self.rank))
            for q in self.cocycles
        )

    def mu_value(self, h, hp):
        if not self.has_mu:
            return self.field.one
        return self.field.monomial(self.mu_exponents(h, hp))

    def conj_unit_exponents(self, h, hp):
        """delta_h delta_h' delta_h^{-1} = u * delta_h' with u the monomial
        having these exponents: mu(h,h') - mu(h',h)."""
        a = self.mu_exponents(h, hp)
        b = self.mu_exponents(hp, h)
        return tuple(x - y for x, y in zip(a, b))

    def is_commutative(self):
        return not self.has_sigma and not self.has_mu

    def same_as(self, other):
        return (
            self.rank == other.rank
            and self.field == other.field
            and self.sigmas == other.sigmas
            and self.cocycles == other.cocycles
        )

    def __eq__(self, other):
        return isinstance(other, TwistData) and self.same_as(other)

    def __hash__(self):
        return hash((self.rank, self.field, self.sigmas, self.cocycles))

    def __repr__(self):
        kind = "untwisted" if self.is_commutative() else "twisted"
        return f"TwistData(rank={self.rank}, field={self.field!r}, {kind})"

    # -- serialization ------------------------------------------------------

    def to_json(self):
        if isinstance(self.field, RationalField):
            f = {"kind": "rational"}
        elif isinstance(self.field, PrimeField):
            f = {"kind": "prime", "p": self.field.p}
        else:
            f = {"kind": "ratfunc", "nvars": self.field.nvars, "prefix": self.field.prefix}
        return {
            "rank": self.rank,
            "field": f,
            "sigmas": [list(map(list, s.matrix)) for s in self.sigmas],
            "cocycles": [list(map(list, q)) for q in self.cocycles],
        }

    @classmethod
    def from_json(cls, data):
        f = data.get("field", {"kind": "rational"})
        if f["kind"] == "rational":
            field = QQ
        elif f["kind"] == "prime":
            field = PrimeField(f["p"])
        else:
            field = FunctionField(f["nvars"], prefix=f.get("prefix", "y"))
        return cls(
            data["rank"],
            field=field,
            sigmas=[MonomialAutomorphism(tuple(map(tuple, s))) for s in data["sigmas"]],
            cocycles=[tuple(map(tuple, q)) for q in data["cocycles"]],
        )


class TwistedPoly:
    """Finitely supported map Z^rank -> nonzero field elements."""

    __slots__ = ("twist", "terms")

    def __init__(self, twist, terms=None):
        self.twist = twist
        clean = {}
        if terms:
            for h, c in terms.items():
                c = twist.field.coerce(c) if not _is_field_elem(c) else c
                if c != twist.field.zero:
                    h = tuple(h)
                    if len(h) != twist.rank:
                        raise ArityMismatch("exponent vector length does not match rank")
                    clean[h] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, twist):
        return cls(twist, {})

    @classmethod
    def one(cls, twist):
        return cls(twist, {(0,) * twist.rank: twist.field.one})

    @classmethod
    def monomial(cls, twist, h, coeff=1):
        return cls(twist, {tuple(h): twist.field.coerce(coeff)})

    @classmethod
    def generator(cls, twist, i):
        h = [0] * twist.rank
        h[i] = 1
        return cls.monomial(twist, h)

    # -- structure ----------------------------------------------------------

    def support(self):
        return set(self.terms)

    def is_zero(self):
        return not self.terms

    def coefficient(self, h):
        return self.terms.get(tuple(h), self.twist.field.zero)

    def is_integral(self):
        f = self.twist.field
        return all(f.is_integral(c) for c in self.terms.values())

    def _require_same(self, other):
        if not isinstance(other, TwistedPoly):
            raise TypeError(f"expected TwistedPoly, got {other!r}")
        if not self.twist.same_as(other.twist):
            raise TwistMismatch("operands carry different twist data")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        self._require_same(other)
        out = dict(self.terms)
        zero = self.twist.field.zero
        for h, c in other.terms.items():
            s = out.get(h, zero) + c
            if s == zero:
                out.pop(h, None)
            else:
                out[h] = s
        return TwistedPoly(self.twist, out)

    def __neg__(self):
        return TwistedPoly(self.twist, {h: -c for h, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if _is_field_elem(other) or isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._require_same(other)
        return tl_mul(self, other)

    def __rmul__(self, other):
        if _is_field_elem(other) or isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def scale(self, c):
        c = self.twist.field.coerce(c)
        if c == self.twist.field.zero:
            return TwistedPoly.zero(self.twist)
        return TwistedPoly(self.twist, {h: x * c for h, x in self.terms.items()})

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative powers only exist for units")
        result = TwistedPoly.one(self.twist)
        for _ in range(k):
            result = tl_mul(result, self)
        return result

    def __eq__(self, other):
        if not isinstance(other, TwistedPoly):
            return NotImplemented
        return self.twist.same_as(other.twist) and self.terms == other.terms

    def __hash__(self):
        return hash((self.twist, tuple(sorted((h, format_coefficient(c)) for h, c in self.terms.items()))))

    def __repr__(self):
        if not self.terms:
            return "TwistedPoly(0)"
        parts = [f"{format_coefficient(c)}*{h}" for h, c in sorted(self.terms.items())]
        return "TwistedPoly(" + " + ".join(parts) + ")"

    # -- serialization ------------------------------------------------------

    def to_json(self, include_twist=True):
        data = {
            "terms": [
                {"exp": list(h), "coef": format_coefficient(c)}
                for h, c in sorted(self.terms.items())
            ]
        }
        if include_twist:
            data["twist"] = self.twist.to_json()
        return data

    @classmethod
    def from_json(cls, data, twist=None):
        if twist is None:
            twist = TwistData.from_json(data["twist"])
        terms = {}
        for t in data["terms"]:
            terms[tuple(t["exp"])] = parse_coefficient(twist.field, t["coef"])
        return cls(twist, terms)

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def _is_field_elem(c):
    from .fields import PrimeFieldElement, RatFunc

    return isinstance(c, (Fraction, int, PrimeFieldElement, RatFunc))


# ---------------------------------------------------------------------------
# ring operations


def tl_mul(x, y):
    """Product in the twisted group ring (single-term rule extended bilinearly)."""
    x._require_same(y)
    twist = x.twist
    field = twist.field
    zero = field.zero
    out = {}
    plain = not twist.has_sigma and not twist.has_mu
    for a, ca in x.terms.items():
        pha = None if plain or not twist.has_sigma else twist.phi_action(a)
        for b, cb in y.terms.items():
            if plain:
                c = ca * cb
            else:
                tb = pha(cb) if pha is not None else cb
                c = ca * tb
                if twist.has_mu:
                    c = c * twist.mu_value(a, b)
            g = tuple(p + q for p, q in zip(a, b))
            s = out.get(g, zero) + c
            if s == zero:
                out.pop(g, None)
            else:
                out[g] = s
    return TwistedPoly(twist, out)


def mu_phi(x, phi):
    """Keep exactly the terms on which the character attains its minimum."""
    if x.is_zero():
        raise ZeroInput("minimal part of the zero element")
    values = {h: phi_value(phi, h) for h in x.terms}
    lo = min(values.values())
    return TwistedPoly(x.twist, {h: c for h, c in x.terms.items() if values[h] == lo})


def min_phi_value(x, phi):
    if x.is_zero():
        raise ZeroInput("minimum of the zero element")
    return min(phi_value(phi, h) for h in x.terms)


def newton_polytope(x):
    """Convex hull of the support."""
    if x.is_zero():
        raise ZeroInput("Newton polytope of the zero element")
    return _polytope.hull(list(x.terms), dim=x.twist.rank)


def is_unit(x, respect_integrality=False):
    """Units have singleton support; the lone coefficient must be invertible
    (in the integral form: a unit among integers)."""
    if len(x.terms) != 1:
        return False
    (c,) = x.terms.values()
    if respect_integrality:
        return x.twist.field.is_integral_unit(c)
    return c != x.twist.field.zero


# ---------------------------------------------------------------------------
# structure-function validation


@dataclass
class CheckRecord:
    axiom: str
    instance: tuple
    passed: bool
    detail: str = ""


@dataclass
class ValidationReport:
    checks: list = dataclass_field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.passed]

    def __repr__(self):
        status = "pass" if self.passed else "fail"
        return f"ValidationReport({status}, {len(self.checks)} checks)"


def validate_twist(twist, mu_override=None, seed=0):
    """Check the structure-function axioms on standard generators plus one
    seeded pseudo-random triple. Failures are reported, never raised.

    mu_override, when given, is a callable (h, h') -> field element replacing
    the stored bilinear-form cocycle (used to exercise corrupted tables).
    """
    report = ValidationReport()
    field = twist.field
    n = twist.rank

    def mu(h, hp):
        if mu_override is not None:
            return mu_override(h, hp)
        return twist.mu_value(h, hp)

    def basis(i):
        h = [0] * n
        h[i] = 1
        return tuple(h)

    for i, s in enumerate(twist.sigmas):
        from .linalg import mat_det

        d = mat_det(s.matrix)
        report.checks.append(
            CheckRecord("sigma unimodular", (i,), d in (1, -1), f"det = {d}")
        )

    # axiom 1 with commutative coefficients: phi is a homomorphism, i.e. the
    # generator automorphisms commute pairwise
    for i in range(n):
        for j in range(i + 1, n):
            lhs = twist.sigmas[i].compose(twist.sigmas[j])
            rhs = twist.sigmas[j].compose(twist.sigmas[i])
            report.checks.append(
                CheckRecord(
                    "phi homomorphism",
                    (basis(i), basis(j)),
                    lhs.matrix == rhs.matrix,
                    "generator automorphisms must commute",
                )
            )

    # axiom 2: mu(g,g') mu(gg',g'') = phi(g)(mu(g',g'')) mu(g,g'g'')
    def check_triple(g, gp, gpp):
        s = tuple(a + b for a, b in zip(g, gp))
        t = tuple(a + b for a, b in zip(gp, gpp))
        lhs = mu(g, gp) * mu(s, gpp)
        rhs = twist.phi_action(g)(mu(gp, gpp)) * mu(g, t)
        report.checks.append(
            CheckRecord(
                "cocycle identity",
                (g, gp, gpp),
                lhs == rhs,
                "" if lhs == rhs else
                f"lhs = {format_coefficient(lhs)}, rhs = {format_coefficient(rhs)}",
            )
        )

    gens = [basis(i) for i in range(n)] + [tuple(-x for x in basis(i)) for i in range(n)]
    for g in gens:
        for gp in gens:
            for gpp in gens:
                check_triple(g, gp, gpp)

    rng = random.Random(seed)
    rand_triple = tuple(
        tuple(rng.randint(-3, 3) for _ in range(n)) for _ in range(3)
    )
    check_triple(*rand_triple)

    # unitality: mu(0, h) = mu(h, 0) = 1
    zero_h = (0,) * n
    for g in gens:
        ok = mu(zero_h, g) == field.one and mu(g, zero_h) == field.one
        report.checks.append(CheckRecord("cocycle unital", (g,), ok))

    return report
