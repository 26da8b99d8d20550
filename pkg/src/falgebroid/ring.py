"""Exact multivariate rational function arithmetic.

Polynomials are sparse dictionaries mapping exponent tuples to Fraction
coefficients. Rational functions keep a normalized numerator/denominator
pair: the gcd is cancelled and the denominator is made monic under the
graded lexicographic order, so equal functions have identical
representations and equality never relies on sampling.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd as int_gcd, lcm as int_lcm

from .errors import DivisionByZero, NotDivisible, ShapeError

Rational = Fraction


def _grlex_key(exp: tuple[int, ...]) -> tuple:
    return (sum(exp), exp)


class Poly:
    """Sparse polynomial in ``nvars`` variables over the rationals."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: dict[tuple[int, ...], Fraction]):
        self.nvars = nvars
        self.terms = terms

    # -- constructors ------------------------------------------------

    @staticmethod
    def zero(nvars: int) -> "Poly":
        return Poly(nvars, {})

    @staticmethod
    def const(nvars: int, c) -> "Poly":
        if type(c) is not Fraction:
            c = Fraction(c)
        if c == 0:
            return Poly(nvars, {})
        return Poly(nvars, {(0,) * nvars: c})

    @staticmethod
    def var(nvars: int, i: int) -> "Poly":
        if not 0 <= i < nvars:
            raise ShapeError(f"variable index {i} out of range for {nvars} variables")
        exp = tuple(1 if j == i else 0 for j in range(nvars))
        return Poly(nvars, {exp: Fraction(1)})

    @staticmethod
    def from_terms(nvars: int, terms: dict) -> "Poly":
        clean = {}
        for exp, c in terms.items():
            c = Fraction(c)
            if c != 0:
                clean[tuple(exp)] = c
        return Poly(nvars, clean)

    # -- predicates --------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in exp) for exp in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero():
            return Fraction(0)
        if not self.is_constant():
            raise ShapeError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        if self.is_zero():
            return -1
        return max(sum(exp) for exp in self.terms)

    def degree_in(self, i: int) -> int:
        if self.is_zero():
            return -1
        return max(exp[i] for exp in self.terms)

    def leading(self) -> tuple[tuple[int, ...], Fraction]:
        """Leading term under graded lexicographic order."""
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    # -- arithmetic --------------------------------------------------

    def __add__(self, other: "Poly") -> "Poly":
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            s = terms.get(exp, Fraction(0)) + c
            if s == 0:
                terms.pop(exp, None)
            else:
                terms[exp] = s
        return Poly(self.nvars, terms)

    def __neg__(self) -> "Poly":
        return Poly(self.nvars, {exp: -c for exp, c in self.terms.items()})

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        terms: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(exp, Fraction(0)) + c1 * c2
                if s == 0:
                    terms.pop(exp, None)
                else:
                    terms[exp] = s
        return Poly(self.nvars, terms)

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if c == 0:
            return Poly.zero(self.nvars)
        return Poly(self.nvars, {exp: k * c for exp, k in self.terms.items()})

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise ShapeError("negative polynomial power")
        result = Poly.const(self.nvars, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def derivative(self, i: int) -> "Poly":
        terms: dict[tuple[int, ...], Fraction] = {}
        for exp, c in self.terms.items():
            if exp[i] == 0:
                continue
            new = list(exp)
            new[i] -= 1
            terms[tuple(new)] = c * exp[i]
        return Poly(self.nvars, terms)

    def extend(self, nvars: int, offset: int = 0) -> "Poly":
        """Reinterpret in a larger variable list, original vars shifted by offset."""
        if offset + self.nvars > nvars:
            raise ShapeError("extension does not fit")
        pad_left = (0,) * offset
        pad_right = (0,) * (nvars - offset - self.nvars)
        return Poly(nvars, {pad_left + exp + pad_right: c for exp, c in self.terms.items()})

    # -- division and gcd --------------------------------------------

    def exact_div(self, other: "Poly") -> "Poly":
        """Divide exactly by ``other``, raising NotDivisible on remainder."""
        if other.is_zero():
            raise DivisionByZero("exact division by zero polynomial")
        if other.is_constant():
            return self.scale(1 / other.constant_value())
        lead_exp, lead_c = other.leading()
        rem = self
        quot: dict[tuple[int, ...], Fraction] = {}
        while not rem.is_zero():
            rexp, rc = rem.leading()
            qexp = tuple(a - b for a, b in zip(rexp, lead_exp))
            if any(e < 0 for e in qexp):
                raise NotDivisible("leading term not divisible")
            qc = rc / lead_c
            quot[qexp] = qc
            rem = rem - other * Poly(self.nvars, {qexp: qc})
        return Poly(self.nvars, quot)

    def _to_integer_primitive(self) -> "Poly":
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if self.is_zero():
            return self
        denom = int_lcm(*(c.denominator for c in self.terms.values()))
        ints = {exp: int(c * denom) for exp, c in self.terms.items()}
        content = 0
        for v in ints.values():
            content = int_gcd(content, abs(v))
        _, lead = self.leading()
        sign = -1 if lead < 0 else 1
        return Poly(self.nvars, {exp: Fraction(v * sign, content) for exp, v in ints.items()})

    def _main_var(self) -> int:
        best = -1
        for exp in self.terms:
            for i in range(self.nvars - 1, best, -1):
                if exp[i] > 0 and i > best:
                    best = i
        return best

    def _univariate_view(self, v: int) -> dict[int, "Poly"]:
        """Coefficients of powers of variable ``v``, as polynomials in the rest."""
        coeffs: dict[int, dict] = {}
        for exp, c in self.terms.items():
            d = exp[v]
            rest = list(exp)
            rest[v] = 0
            coeffs.setdefault(d, {})[tuple(rest)] = c
        return {d: Poly(self.nvars, t) for d, t in coeffs.items()}

    @staticmethod
    def _from_univariate(v: int, coeffs: dict[int, "Poly"], nvars: int) -> "Poly":
        terms: dict[tuple[int, ...], Fraction] = {}
        for d, p in coeffs.items():
            for exp, c in p.terms.items():
                new = list(exp)
                new[v] += d
                terms[tuple(new)] = c
        return Poly(nvars, terms)

    @staticmethod
    def gcd(a: "Poly", b: "Poly") -> "Poly":
        """Greatest common divisor, primitive with positive leading coefficient."""
        if a.is_zero():
            return b._to_integer_primitive()
        if b.is_zero():
            return a._to_integer_primitive()
        return Poly._gcd_prim(a._to_integer_primitive(), b._to_integer_primitive())

    @staticmethod
    def _gcd_prim(a: "Poly", b: "Poly") -> "Poly":
        v = max(a._main_var(), b._main_var())
        if v < 0:
            return Poly.const(a.nvars, 1)
        ca, pa = a._content_pp(v)
        cb, pb = b._content_pp(v)
        cont = Poly._gcd_prim(ca, cb)
        if pa.degree_in(v) < pb.degree_in(v):
            pa, pb = pb, pa
        while True:
            if pb.degree_in(v) == 0:
                pp = Poly.const(a.nvars, 1)
                break
            r = Poly._prem(pa, pb, v)
            if r.is_zero():
                pp = pb
                break
            pa, pb = pb, r._content_pp(v)[1]
        return (cont * pp)._to_integer_primitive()

    def _content_pp(self, v: int) -> tuple["Poly", "Poly"]:
        coeffs = self._univariate_view(v)
        content = Poly.zero(self.nvars)
        for p in coeffs.values():
            content = Poly.gcd(content, p)
            if content.is_constant():
                break
        if content.is_constant():
            return Poly.const(self.nvars, 1), self._to_integer_primitive()
        pp = {d: p.exact_div(content) for d, p in coeffs.items()}
        return content, Poly._from_univariate(v, pp, self.nvars)

    @staticmethod
    def _prem(a: "Poly", b: "Poly", v: int) -> "Poly":
        """Pseudo-remainder of a by b with respect to variable v."""
        db = b.degree_in(v)
        bc = b._univariate_view(v)[db]
        r = a
        while not r.is_zero() and r.degree_in(v) >= db:
            dr = r.degree_in(v)
            rc = r._univariate_view(v)[dr]
            shift = Poly(a.nvars, {tuple(dr - db if i == v else 0 for i in range(a.nvars)): Fraction(1)})
            r = bc * r - rc * shift * b
        return r

    def format(self, names: list[str]) -> str:
        """Render as expression text that the parser accepts."""
        if self.is_zero():
            return "0"
        parts = []
        for exp in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[exp]
            factors = []
            for i, e in enumerate(exp):
                if e == 1:
                    factors.append(names[i])
                elif e > 1:
                    factors.append(f"{names[i]}^{e}")
            mono = "*".join(factors)
            coeff = abs(c)
            if coeff == 1 and mono:
                text = mono
            else:
                cs = str(coeff.numerator) if coeff.denominator == 1 else f"{coeff.numerator}/{coeff.denominator}"
                text = f"{cs}*{mono}" if mono else cs
            if not parts:
                parts.append(text if c > 0 else f"-{text}")
            else:
                parts.append(f"+ {text}" if c > 0 else f"- {text}")
        return " ".join(parts)

    def __repr__(self):
        return f"Poly({self.nvars}, {self.terms!r})"


class RatFunc:
    """Quotient of two polynomials in normal form.

    The denominator is monic under graded lexicographic order and shares
    no factor with the numerator, so the representation is unique.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly | None = None, _normal: bool = False):
        if den is None:
            den = Poly.const(num.nvars, 1)
        if not _normal:
            num, den = RatFunc._normalize(num, den)
        self.num = num
        self.den = den

    @staticmethod
    def _normalize(num: Poly, den: Poly) -> tuple[Poly, Poly]:
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            return num, Poly.const(num.nvars, 1)
        if den.is_constant():
            c = den.constant_value()
            if c == 1:
                return num, den
            return num.scale(1 / c), Poly.const(num.nvars, 1)
        g = Poly.gcd(num, den)
        if not g.is_constant():
            num = num.exact_div(g)
            den = den.exact_div(g)
        _, lead = den.leading()
        if lead != 1:
            num = num.scale(1 / lead)
            den = den.scale(1 / lead)
        return num, den

    # -- constructors ------------------------------------------------

    _zero_cache: dict = {}
    _one_cache: dict = {}

    @staticmethod
    def zero(nvars: int) -> "RatFunc":
        cached = RatFunc._zero_cache.get(nvars)
        if cached is None:
            cached = RatFunc(Poly.zero(nvars), _normal=False)
            RatFunc._zero_cache[nvars] = cached
        return cached

    @staticmethod
    def one(nvars: int) -> "RatFunc":
        cached = RatFunc._one_cache.get(nvars)
        if cached is None:
            cached = RatFunc(Poly.const(nvars, 1), _normal=False)
            RatFunc._one_cache[nvars] = cached
        return cached

    @staticmethod
    def const(nvars: int, c) -> "RatFunc":
        return RatFunc(Poly.const(nvars, c), _normal=False)

    @staticmethod
    def var(nvars: int, i: int) -> "RatFunc":
        return RatFunc(Poly.var(nvars, i), _normal=False)

    @property
    def nvars(self) -> int:
        return self.num.nvars

    # -- predicates --------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        t = self.num.terms
        if len(t) != 1:
            return False
        ((exp, c),) = t.items()
        return c == 1 and not any(exp) and self.den.is_constant()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    # -- arithmetic --------------------------------------------------

    def __add__(self, other: "RatFunc") -> "RatFunc":
        if not self.num.terms:
            return other
        if not other.num.terms:
            return self
        if self.den.is_constant() and other.den.is_constant():
            return RatFunc(self.num + other.num, _normal=True)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RatFunc") -> "RatFunc":
        if not other.num.terms:
            return self
        if not self.num.terms:
            return -other
        if self.den.is_constant() and other.den.is_constant():
            return RatFunc(self.num - other.num, _normal=True)
        return RatFunc(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den, _normal=True)

    def __mul__(self, other: "RatFunc") -> "RatFunc":
        if not self.num.terms or not other.num.terms:
            return RatFunc.zero(self.num.nvars)
        if self.is_one():
            return other
        if other.is_one():
            return self
        if self.den.is_constant() and other.den.is_constant():
            return RatFunc(self.num * other.num, _normal=True)
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RatFunc") -> "RatFunc":
        if other.is_zero():
            raise DivisionByZero("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def scale(self, c) -> "RatFunc":
        return RatFunc(self.num.scale(c), self.den, _normal=Fraction(c) != 0)

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            if self.is_zero():
                raise DivisionByZero("zero to a negative power")
            return RatFunc(self.den ** (-n), self.num ** (-n))
        return RatFunc(self.num**n, self.den**n)

    def derivative(self, i: int) -> "RatFunc":
        if self.den.is_constant():
            return RatFunc(self.num.derivative(i), self.den, _normal=True)
        num = self.num.derivative(i) * self.den - self.num * self.den.derivative(i)
        return RatFunc(num, self.den * self.den)

    def extend(self, nvars: int, offset: int = 0) -> "RatFunc":
        return RatFunc(self.num.extend(nvars, offset), self.den.extend(nvars, offset), _normal=True)

    def format(self, names: list[str]) -> str:
        if self.den.is_constant():
            return self.num.format(names)
        num = self.num.format(names)
        return f"({num})/({self.den.format(names)})"

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"


def poly_arith(a: RatFunc, b: RatFunc, op: str) -> RatFunc:
    """Apply a named arithmetic operation, for callers driven by text input."""
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    raise ShapeError(f"unknown operation {op!r}")


def partial_derive(f: RatFunc, i: int) -> RatFunc:
    return f.derivative(i)


class VectorField:
    """Derivation of the coefficient ring, one component per base variable."""

    __slots__ = ("comps",)

    def __init__(self, comps):
        self.comps = tuple(comps)

    @staticmethod
    def zero(nvars: int) -> "VectorField":
        return VectorField(RatFunc.zero(nvars) for _ in range(nvars))

    @property
    def nvars(self) -> int:
        return len(self.comps)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.comps)

    def __eq__(self, other) -> bool:
        return isinstance(other, VectorField) and self.comps == other.comps

    def __hash__(self):
        return hash(self.comps)

    def __add__(self, other: "VectorField") -> "VectorField":
        return VectorField(a + b for a, b in zip(self.comps, other.comps))

    def __sub__(self, other: "VectorField") -> "VectorField":
        return VectorField(a - b for a, b in zip(self.comps, other.comps))

    def __neg__(self) -> "VectorField":
        return VectorField(-a for a in self.comps)

    def scale_fn(self, f: RatFunc) -> "VectorField":
        return VectorField(f * a for a in self.comps)

    def apply(self, f: RatFunc) -> RatFunc:
        """Apply as a derivation to a coefficient function."""
        out = RatFunc.zero(f.nvars)
        for i, v in enumerate(self.comps):
            if not v.is_zero():
                out = out + v * f.derivative(i)
        return out

    def format(self, names: list[str]) -> str:
        return "[" + ", ".join(c.format(names) for c in self.comps) + "]"

    def __repr__(self):
        return f"VectorField({list(self.comps)!r})"


def vf_apply(v: VectorField, f: RatFunc) -> RatFunc:
    return v.apply(f)


def vf_bracket(v: VectorField, w: VectorField) -> VectorField:
    """Commutator of two vector fields."""
    n = v.nvars
    comps = []
    for mu in range(n):
        c = RatFunc.zero(n)
        for i in range(n):
            if not v.comps[i].is_zero():
                c = c + v.comps[i] * w.comps[mu].derivative(i)
            if not w.comps[i].is_zero():
                c = c - w.comps[i] * v.comps[mu].derivative(i)
        comps.append(c)
    return VectorField(comps)


class HSeries:
    """Truncated formal power series in a deformation parameter.

    Coefficients may be any payloads supporting the operations used:
    addition for series addition, multiplication for series products.
    Terms beyond ``order`` are discarded.
    """

    __slots__ = ("order", "coeffs", "zero_payload")

    def __init__(self, order: int, coeffs, zero_payload):
        coeffs = list(coeffs)
        if len(coeffs) > order + 1:
            coeffs = coeffs[: order + 1]
        while len(coeffs) < order + 1:
            coeffs.append(zero_payload)
        self.order = order
        self.coeffs = coeffs
        self.zero_payload = zero_payload

    def __add__(self, other: "HSeries") -> "HSeries":
        order = min(self.order, other.order)
        return HSeries(order, [a + b for a, b in zip(self.coeffs, other.coeffs)], self.zero_payload)

    def __mul__(self, other: "HSeries") -> "HSeries":
        order = min(self.order, other.order)
        out = []
        for k in range(order + 1):
            acc = self.zero_payload
            for i in range(k + 1):
                acc = acc + self.coeffs[i] * other.coeffs[k - i]
            out.append(acc)
        return HSeries(order, out, self.zero_payload)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, HSeries)
            and self.order == other.order
            and self.coeffs == other.coeffs
        )
