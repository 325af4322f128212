r"""
Exact scalars: the base field :math:`k`, univariate polynomials over :math:`k`,
the local ring :math:`A = k[t]_{(t)}` and the truncated quotients
:math:`k_N = k[t]/(t^N)`.

Field elements are elements of a :py:mod:`sympy` domain (``GF(p)`` with
non-negative residues, or ``QQ``); polynomial arithmetic is delegated to the
dense univariate routines of :py:mod:`sympy.polys`.
"""
import re
from fractions import Fraction

from sympy import Integer, Rational, Symbol, fraction, isprime, together
from sympy import Poly as SymPoly
from sympy.parsing.sympy_parser import (convert_xor, parse_expr,
                                        standard_transformations)
from sympy.polys.densearith import (dup_add, dup_div, dup_mul, dup_mul_ground,
                                    dup_neg, dup_quo_ground, dup_sub)
from sympy.polys.densebasic import dup_strip
from sympy.polys.densetools import dup_diff, dup_eval, dup_monic, dup_revert
from sympy.polys.domains import GF, QQ
from sympy.polys.euclidtools import dup_gcd

from milnorcycles.errors import (DivisionByNonUnit, FieldError, NonUnit,
                                 NotInLocalRing, ParseError,
                                 PreconditionError)

T = Symbol('t')
"""the uniformizer :math:`t` of :math:`A`"""

#: names accepted by the textual grammar
GRAMMAR_NAMES = ('t', 'x') + tuple(f'x{i}' for i in range(1, 10)) \
    + tuple(f'y{i}' for i in range(1, 10))

_MAX_PRIME = 2 ** 61
_IDENT = re.compile(r'[A-Za-z_][A-Za-z_0-9]*')
_TRANSFORMS = standard_transformations + (convert_xor,)


class FieldCtx:
    """The base field :math:`k`, either :math:`\\mathbb{F}_p` or :math:`\\mathbb{Q}`"""

    p: int = None
    """characteristic, ``None`` for the rationals"""
    domain = None
    """the sympy domain holding field elements"""
    tag: str = None
    """the tag string, ``Fp:<p>`` or ``Q``"""

    def __init__(self, p=None):
        """Initialize the field

        :param int p: a prime at most :math:`2^{61}`, or ``None`` for :math:`\\mathbb{Q}`
        """
        if p is None:
            self.domain = QQ
            self.tag = 'Q'
        else:
            p = int(p)
            if p < 2 or p > _MAX_PRIME or not isprime(p):
                raise FieldError(f'{p} is not a prime in [2, 2^61]')
            self.p = p
            self.domain = GF(p, symmetric=False)
            self.tag = f'Fp:{p}'
        self._frac = None

    @classmethod
    def from_tag(cls, tag):
        """Build the field named by ``Fp:<p>`` or ``Q``"""
        tag = tag.strip()
        if tag in ('Q', 'QQ'):
            return cls()
        if tag.startswith('Fp:'):
            try:
                return cls(int(tag[3:]))
            except ValueError as exc:
                if isinstance(exc, FieldError):
                    raise
                raise FieldError(f'bad field tag {tag!r}') from None
        raise FieldError(f'bad field tag {tag!r}, expected Fp:<p> or Q')

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and self.tag == other.tag

    def __hash__(self):
        return hash(self.tag)

    def __repr__(self):
        return f'FieldCtx({self.tag})'

    @property
    def zero(self):
        return self.domain.zero

    @property
    def one(self):
        return self.domain.one

    def __call__(self, value):
        """Coerce an int, :py:class:`fractions.Fraction`, sympy rational or
        domain element into the field"""
        if isinstance(value, Fraction):
            return self.from_rational(value.numerator, value.denominator)
        if isinstance(value, Rational):
            return self.from_rational(int(value.p), int(value.q))
        if isinstance(value, int):
            return self.domain(value)
        if hasattr(value, '__index__'):
            # numpy integers
            return self.domain(int(value))
        return self.domain.convert(value)

    def from_rational(self, num, den):
        if den == 0 or (self.p is not None and den % self.p == 0):
            raise ParseError(f'{num}/{den} has no image in {self.tag}')
        if self.p is None:
            return self.domain(num, den)
        return self.domain(num) / self.domain(den)

    def is_zero(self, a):
        return a == self.domain.zero

    def to_int(self, a):
        """Residue in ``0..p-1`` of an element of :math:`\\mathbb{F}_p`"""
        return int(self.domain.to_sympy(a))

    def render(self, a):
        return str(self.domain.to_sympy(a))

    def allows_ghost(self, m):
        """Whether the ghost map of :math:`W_m(k)` is injective"""
        return self.p is None or self.p > m

    def frac_field(self):
        """The sympy domain :math:`k(t)`, built once per field"""
        if self._frac is None:
            self._frac = self.domain.frac_field(T)
        return self._frac


def _strip(rep):
    return dup_strip(list(rep))


class Poly:
    """Dense univariate polynomial over :math:`k` (sympy ``dup`` layout,
    leading coefficient first)"""

    ctx: FieldCtx = None
    """the coefficient field"""
    rep: list = None
    """coefficients, highest degree first, no leading zeros"""

    def __init__(self, ctx, rep):
        self.ctx = ctx
        self.rep = _strip(rep)

    @classmethod
    def from_coeffs(cls, ctx, coeffs):
        """Build from coefficients listed lowest degree first"""
        return cls(ctx, [ctx(c) for c in reversed(list(coeffs))])

    @classmethod
    def constant(cls, ctx, c):
        return cls(ctx, [ctx(c)])

    @property
    def coeffs(self):
        """coefficients lowest degree first"""
        return list(reversed(self.rep))

    def degree(self):
        return len(self.rep) - 1

    def is_zero(self):
        return not self.rep

    def is_one(self):
        return len(self.rep) == 1 and self.rep[0] == self.ctx.one

    def lc(self):
        return self.rep[0] if self.rep else self.ctx.zero

    def tc(self):
        """constant term, the value at 0"""
        return self.rep[-1] if self.rep else self.ctx.zero

    def valuation(self):
        """order of vanishing at 0, ``None`` for the zero polynomial"""
        if not self.rep:
            return None
        v = 0
        for c in reversed(self.rep):
            if c != self.ctx.zero:
                return v
            v += 1
        return v

    def eval(self, a):
        return dup_eval(self.rep, a, self.ctx.domain)

    def coeff(self, i):
        d = self.degree()
        if i < 0 or i > d:
            return self.ctx.zero
        return self.rep[d - i]

    def __add__(self, other):
        return Poly(self.ctx, dup_add(self.rep, other.rep, self.ctx.domain))

    def __sub__(self, other):
        return Poly(self.ctx, dup_sub(self.rep, other.rep, self.ctx.domain))

    def __neg__(self):
        return Poly(self.ctx, dup_neg(self.rep, self.ctx.domain))

    def __mul__(self, other):
        return Poly(self.ctx, dup_mul(self.rep, other.rep, self.ctx.domain))

    def scale(self, c):
        return Poly(self.ctx, dup_mul_ground(self.rep, c, self.ctx.domain))

    def quo_ground(self, c):
        return Poly(self.ctx, dup_quo_ground(self.rep, c, self.ctx.domain))

    def divmod(self, other):
        q, r = dup_div(self.rep, other.rep, self.ctx.domain)
        return Poly(self.ctx, q), Poly(self.ctx, r)

    def gcd(self, other):
        return Poly(self.ctx, dup_gcd(self.rep, other.rep, self.ctx.domain))

    def monic(self):
        if not self.rep:
            return self
        return Poly(self.ctx, dup_monic(self.rep, self.ctx.domain))

    def derivative(self):
        return Poly(self.ctx, dup_diff(self.rep, 1, self.ctx.domain))

    def __eq__(self, other):
        return isinstance(other, Poly) and self.rep == other.rep

    def __hash__(self):
        return hash(self.render())

    def render(self, var='t'):
        return _render_terms(self.ctx, enumerate(self.coeffs), var)

    def __repr__(self):
        return f'Poly({self.render()})'


def _render_terms(ctx, terms, var):
    """Join ``(exponent, coefficient)`` pairs into a grammar string"""
    parts = []
    for e, c in terms:
        if ctx.is_zero(c):
            continue
        cs = ctx.render(c)
        if e == 0:
            parts.append(cs)
            continue
        mono = var if e == 1 else f'{var}^{e}'
        if cs == '1':
            parts.append(mono)
        elif cs == '-1':
            parts.append('-' + mono)
        else:
            parts.append(f'{cs}*{mono}')
    if not parts:
        return '0'
    return '+'.join(parts).replace('+-', '-')


class LocalScalar:
    r"""Element of :math:`A = k[t]_{(t)}` in canonical form: coprime numerator
    and monic denominator with :math:`den(0) \neq 0`"""

    ctx: FieldCtx = None
    """the residue field"""
    num: Poly = None
    """numerator"""
    den: Poly = None
    """monic denominator, nonzero at :math:`t=0`"""

    def __init__(self, num, den=None, canonical=False):
        self.ctx = num.ctx
        if den is None:
            self.num, self.den = num, Poly.constant(self.ctx, 1)
        elif canonical:
            self.num, self.den = num, den
        else:
            self.num, self.den = _canonical(num, den)
        self._key = None

    @classmethod
    def from_coeffs(cls, ctx, coeffs):
        """Polynomial in :math:`t` from coefficients lowest degree first"""
        return cls(Poly.from_coeffs(ctx, coeffs))

    @classmethod
    def constant(cls, ctx, c):
        return cls(Poly.constant(ctx, c))

    @classmethod
    def zero(cls, ctx):
        return cls(Poly(ctx, []))

    @classmethod
    def one(cls, ctx):
        return cls.constant(ctx, 1)

    def _is_poly(self):
        return self.den.is_one()

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self._is_poly() and self.num.is_one()

    def is_unit(self):
        return not self.ctx.is_zero(self.num.tc())

    def is_constant(self):
        return self._is_poly() and self.num.degree() <= 0

    def value_at_zero(self):
        """Residue in :math:`k` of the element"""
        return self.num.tc() / self.den.tc()

    def valuation(self):
        """:math:`t`-adic order, ``None`` for zero"""
        return self.num.valuation()

    def __add__(self, other):
        other = self._coerce(other)
        if self._is_poly() and other._is_poly():
            return LocalScalar(self.num + other.num)
        return LocalScalar(self.num * other.den + other.num * self.den,
                           self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if self._is_poly() and other._is_poly():
            return LocalScalar(self.num - other.num)
        return LocalScalar(self.num * other.den - other.num * self.den,
                           self.den * other.den)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return LocalScalar(-self.num, self.den, canonical=True)

    def __mul__(self, other):
        other = self._coerce(other)
        if self._is_poly() and other._is_poly():
            return LocalScalar(self.num * other.num)
        return LocalScalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if not other.is_unit():
            raise DivisionByNonUnit(f'{other.render()} is not a unit of k[t]_(t)')
        return LocalScalar(self.num * other.den, self.den * other.num)

    def inverse(self):
        if not self.is_unit():
            raise DivisionByNonUnit(f'{self.render()} is not a unit of k[t]_(t)')
        return LocalScalar(self.den, self.num)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = LocalScalar.one(self.ctx), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def _coerce(self, other):
        if isinstance(other, LocalScalar):
            if other.ctx != self.ctx:
                raise FieldError(f'mixed fields {self.ctx.tag} and {other.ctx.tag}')
            return other
        return LocalScalar.constant(self.ctx, other)

    def truncate(self, N):
        """Image in :math:`k[t]/(t^N)`"""
        return truncate(self, N)

    def key(self):
        if self._key is None:
            self._key = self.render()
        return self._key

    def __eq__(self, other):
        if isinstance(other, LocalScalar):
            return self.ctx == other.ctx and self.num == other.num and self.den == other.den
        if isinstance(other, int):
            return self == LocalScalar.constant(self.ctx, other)
        return NotImplemented

    def __hash__(self):
        return hash(self.key())

    def render(self):
        if self._is_poly():
            return self.num.render()
        return f'({self.num.render()})/({self.den.render()})'

    def __repr__(self):
        return f'LocalScalar({self.render()})'


def _canonical(num, den):
    ctx = num.ctx
    if den.is_zero():
        raise NotInLocalRing('zero denominator')
    if num.is_zero():
        return num, Poly.constant(ctx, 1)
    if den.degree() > 0:
        g = num.gcd(den)
        if g.degree() > 0:
            num = num.divmod(g)[0]
            den = den.divmod(g)[0]
    lc = den.lc()
    if lc != ctx.one:
        num = num.quo_ground(lc)
        den = den.quo_ground(lc)
    if ctx.is_zero(den.tc()):
        raise NotInLocalRing(f'denominator {den.render()} vanishes at t = 0')
    return num, den


def local_arith(a, b, op):
    """Arithmetic in :math:`A`

    :param LocalScalar a: left operand
    :param LocalScalar b: right operand
    :param str op: one of ``add``, ``sub``, ``mul``, ``div``
    :return: the canonical result
    :rtype: LocalScalar
    """
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    if op == 'div':
        return a / b
    raise PreconditionError(f'unknown local_arith op {op!r}')


class TruncSeries:
    """Element of :math:`k[t]/(t^N)`, coefficients lowest degree first"""

    ctx: FieldCtx = None
    """the coefficient field"""
    N: int = None
    """precision"""
    coeffs: tuple = None
    """exactly ``N`` coefficients :math:`c_0, \\dots, c_{N-1}`"""

    def __init__(self, ctx, coeffs, N=None):
        dom = ctx.domain
        coeffs = [c if dom.of_type(c) else ctx(c) for c in coeffs]
        if N is None:
            N = len(coeffs)
        if N < 1:
            raise PreconditionError(f'precision must be positive, got {N}')
        coeffs = coeffs[:N] + [ctx.zero] * (N - len(coeffs))
        self.ctx, self.N, self.coeffs = ctx, N, tuple(coeffs)

    @classmethod
    def one(cls, ctx, N):
        return cls(ctx, [1], N)

    @classmethod
    def monomial(cls, ctx, c, e, N):
        coeffs = [0] * N
        if e < N:
            coeffs[e] = c
        return cls(ctx, coeffs, N)

    def _dup(self):
        return _strip(reversed(self.coeffs))

    @classmethod
    def _from_dup(cls, ctx, rep, N):
        return cls(ctx, list(reversed(rep))[:N], N)

    def _check(self, other):
        if not isinstance(other, TruncSeries):
            raise PreconditionError(f'expected a TruncSeries, got {type(other).__name__}')
        if other.N != self.N or other.ctx != self.ctx:
            raise PreconditionError(
                f'precision/field mismatch: {self.N},{self.ctx.tag} vs {other.N},{other.ctx.tag}')

    def is_unit(self):
        return not self.ctx.is_zero(self.coeffs[0])

    def is_one(self):
        return self.coeffs[0] == self.ctx.one and all(self.ctx.is_zero(c) for c in self.coeffs[1:])

    def is_zero(self):
        return all(self.ctx.is_zero(c) for c in self.coeffs)

    def __add__(self, other):
        self._check(other)
        return TruncSeries(self.ctx, [a + b for a, b in zip(self.coeffs, other.coeffs)], self.N)

    def __sub__(self, other):
        self._check(other)
        return TruncSeries(self.ctx, [a - b for a, b in zip(self.coeffs, other.coeffs)], self.N)

    def __neg__(self):
        return TruncSeries(self.ctx, [-a for a in self.coeffs], self.N)

    def __mul__(self, other):
        self._check(other)
        rep = dup_mul(self._dup(), other._dup(), self.ctx.domain)
        return TruncSeries._from_dup(self.ctx, rep, self.N)

    def scale(self, c):
        return TruncSeries(self.ctx, [c * a for a in self.coeffs], self.N)

    def inverse(self):
        if not self.is_unit():
            raise NonUnit(f'{self.render()} is not a unit mod t^{self.N}')
        rep = dup_revert(self._dup(), self.N, self.ctx.domain)
        return TruncSeries._from_dup(self.ctx, rep, self.N)

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = TruncSeries.one(self.ctx, self.N), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def derivative(self):
        """Formal derivative, kept at precision ``N`` (top coefficient zero)"""
        ctx = self.ctx
        return TruncSeries(ctx, [ctx(i) * self.coeffs[i] for i in range(1, self.N)], self.N)

    def shift(self):
        """Multiplication by :math:`t`"""
        return TruncSeries(self.ctx, [0] + list(self.coeffs[:-1]), self.N)

    def retruncate(self, N):
        if N > self.N:
            raise PreconditionError(f'cannot raise precision from {self.N} to {N}')
        return TruncSeries(self.ctx, self.coeffs[:N], N)

    def lift(self):
        """The canonical polynomial representative in :math:`A`"""
        return LocalScalar(Poly(self.ctx, self._dup()))

    def valuation_of_difference(self, other):
        """Largest ``r <= N`` with ``self = other mod t^r``"""
        self._check(other)
        for i, (a, b) in enumerate(zip(self.coeffs, other.coeffs)):
            if a != b:
                return i
        return self.N

    def __eq__(self, other):
        return (isinstance(other, TruncSeries) and self.N == other.N
                and self.ctx == other.ctx and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.N, self.render()))

    def render(self):
        return _render_terms(self.ctx, enumerate(self.coeffs), 't')

    def __repr__(self):
        return f'TruncSeries({self.render()}, N={self.N})'


def truncate(a, N):
    r"""Image of a local scalar in :math:`k[t]/(t^N)`

    The denominator is inverted as a power series.

    :param LocalScalar a: element of :math:`A`
    :param int N: precision, at least 1
    :return: the truncated series
    :rtype: TruncSeries
    """
    if N < 1:
        raise PreconditionError(f'precision must be positive, got {N}')
    num = TruncSeries._from_dup(a.ctx, a.num.rep, N)
    if a.den.is_one():
        return num
    return num * TruncSeries._from_dup(a.ctx, a.den.rep, N).inverse()


def ts_arith(a, b, op):
    """Arithmetic in :math:`k[t]/(t^N)`

    :param TruncSeries a: left operand
    :param TruncSeries b: right operand, ignored by ``inv_of_a``
    :param str op: one of ``add``, ``sub``, ``mul``, ``inv_of_a``
    :rtype: TruncSeries
    """
    if op == 'inv_of_a':
        return a.inverse()
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    raise PreconditionError(f'unknown ts_arith op {op!r}')


# -- textual grammar -----------------------------------------------------------

def parse_sympy(text, names=GRAMMAR_NAMES):
    """Parse a grammar string into a sympy expression

    Identifiers other than ``names`` are rejected before sympy sees the text.

    :param str text: the string to parse
    :param tuple names: allowed variable names
    :rtype: sympy.Expr
    """
    if not isinstance(text, str) or not text.strip():
        raise ParseError('empty polynomial string')
    for ident in _IDENT.findall(text):
        if ident not in names:
            raise ParseError(f'unknown identifier {ident!r} in {text!r}')
    local = {name: Symbol(name) for name in names}
    try:
        expr = parse_expr(text, local_dict=local, global_dict={'Integer': Integer,
                                                               'Rational': Rational,
                                                               'Symbol': Symbol},
                          transformations=_TRANSFORMS)
    except Exception as exc:  # sympy raises a zoo of types here
        raise ParseError(f'cannot parse {text!r}: {exc}') from None
    return expr


def sympy_terms(expr, gens, ctx):
    """Terms of a polynomial expression as ``{exponents: field element}``"""
    try:
        poly = SymPoly(expr, *gens, domain=QQ) if gens else None
    except Exception:
        raise ParseError(f'{expr} is not a polynomial in {gens}') from None
    if poly is None:
        if not expr.is_Rational:
            raise ParseError(f'{expr} is not a constant')
        c = ctx(Rational(expr))
        return {(): c} if not ctx.is_zero(c) else {}
    terms = {}
    for monom, coeff in poly.terms():
        c = ctx(Rational(coeff))
        if not ctx.is_zero(c):
            terms[tuple(monom)] = c
    return terms


def poly_from_sympy(expr, ctx, var=T):
    terms = sympy_terms(expr, (var,), ctx)
    deg = max((m[0] for m in terms), default=-1)
    coeffs = [ctx.zero] * (deg + 1)
    for (e,), c in terms.items():
        coeffs[e] = c
    return Poly.from_coeffs(ctx, coeffs)


def local_from_sympy(expr, ctx):
    num, den = fraction(together(expr))
    num = poly_from_sympy(num.expand(), ctx)
    den = poly_from_sympy(den.expand(), ctx)
    return LocalScalar(num, den)


def parse_local(text, ctx):
    """Parse an element of :math:`A` written in ``t``"""
    return local_from_sympy(parse_sympy(text, ('t',)), ctx)


def parse_series(text, ctx, N):
    """Parse an element of :math:`k[t]/(t^N)` written in ``t``"""
    return truncate(parse_local(text, ctx), N)


def parse_field_element(text, ctx):
    expr = parse_sympy(text, ())
    if not expr.is_Rational:
        raise ParseError(f'{text!r} is not a rational constant')
    return ctx(Rational(expr))
