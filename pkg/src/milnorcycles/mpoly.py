"""
Sparse multivariate polynomials over the local ring :math:`A`.

A polynomial in ``nvars`` variables is a dictionary from exponent tuples to
nonzero :py:class:`~milnorcycles.scalars.LocalScalar` coefficients. Variable
``j`` is printed as ``y{j+1}`` unless other names are given.
"""
from sympy import Symbol, fraction, together

from milnorcycles.errors import ParseError, PreconditionError
from milnorcycles.scalars import (LocalScalar, Poly, T, parse_sympy,
                                  sympy_terms, truncate)


def default_names(nvars):
    return tuple(f'y{j + 1}' for j in range(nvars))


class MPoly:
    """Polynomial in ``nvars`` variables with coefficients in :math:`A`"""

    ctx = None
    """the residue field"""
    nvars: int = None
    """number of variables"""
    terms: dict = None
    """exponent tuple -> nonzero LocalScalar"""

    def __init__(self, ctx, nvars, terms=None):
        self.ctx = ctx
        self.nvars = nvars
        self.terms = {}
        if terms:
            for e, c in terms.items():
                if not c.is_zero():
                    self.terms[tuple(e)] = c
        self._key = {}

    # -- constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, ctx, nvars):
        return cls(ctx, nvars)

    @classmethod
    def constant(cls, ctx, nvars, c):
        if not isinstance(c, LocalScalar):
            c = LocalScalar.constant(ctx, c)
        return cls(ctx, nvars, {(0,) * nvars: c})

    @classmethod
    def one(cls, ctx, nvars):
        return cls.constant(ctx, nvars, 1)

    @classmethod
    def var(cls, ctx, nvars, j, power=1):
        e = [0] * nvars
        e[j] = power
        return cls(ctx, nvars, {tuple(e): LocalScalar.one(ctx)})

    def _raw(self, terms):
        out = MPoly(self.ctx, self.nvars)
        out.terms = terms
        return out

    # -- inspection ---------------------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(not any(e) for e in self.terms)

    def constant_value(self):
        """The coefficient of the empty monomial"""
        return self.terms.get((0,) * self.nvars, LocalScalar.zero(self.ctx))

    def degree(self, j):
        return max((e[j] for e in self.terms), default=-1)

    def main_var(self):
        """Largest variable index occurring, ``-1`` for constants"""
        best = -1
        for e in self.terms:
            for j in range(self.nvars - 1, best, -1):
                if e[j]:
                    best = j
                    break
        return best

    def valuation(self):
        """Smallest :math:`t`-adic order of a coefficient, ``None`` for zero"""
        vals = [c.valuation() for c in self.terms.values()]
        return min(vals) if vals else None

    # -- arithmetic ----------------------------------------------------------------

    def _check(self, other):
        if self.nvars != other.nvars:
            raise PreconditionError(f'variable count mismatch: {self.nvars} vs {other.nvars}')

    def _coerce(self, other):
        if isinstance(other, MPoly):
            self._check(other)
            return other
        return MPoly.constant(self.ctx, self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms[e] + c if e in terms else c
            if s.is_zero():
                terms.pop(e, None)
            else:
                terms[e] = s
        return self._raw(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._raw({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            if not isinstance(other, LocalScalar):
                other = LocalScalar.constant(self.ctx, other)
            return self.scale(other)
        self._check(other)
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms[e] + c1 * c2 if e in terms else c1 * c2
                if s.is_zero():
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return self._raw(terms)

    __rmul__ = __mul__

    def scale(self, c):
        if c.is_zero():
            return MPoly(self.ctx, self.nvars)
        return self._raw({e: v * c for e, v in self.terms.items()})

    def __pow__(self, n):
        if n < 0:
            raise PreconditionError('negative power of a polynomial')
        result, base = MPoly.one(self.ctx, self.nvars), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- one-variable views -------------------------------------------------------

    def coefficients(self, j):
        """``{e: C_e}`` with ``self = sum C_e * y_j^e`` and ``C_e`` free of ``y_j``"""
        out = {}
        for e, c in self.terms.items():
            k = e[j]
            base = e[:j] + (0,) + e[j + 1:]
            out.setdefault(k, {})[base] = c
        return {k: self._raw(v) for k, v in out.items()}

    def coeff(self, j, k):
        return self.coefficients(j).get(k, MPoly(self.ctx, self.nvars))

    def leading_coeff(self, j):
        d = self.degree(j)
        if d < 0:
            return MPoly(self.ctx, self.nvars)
        return self.coeff(j, d)

    def constant_coeff(self, j):
        """The value at ``y_j = 0``"""
        return self.coeff(j, 0)

    def subs(self, j, value):
        """Substitute the polynomial ``value`` for ``y_j``"""
        value = self._coerce(value)
        result = MPoly(self.ctx, self.nvars)
        power = MPoly.one(self.ctx, self.nvars)
        coeffs = self.coefficients(j)
        for k in range(max(coeffs, default=-1) + 1):
            if k in coeffs:
                result = result + coeffs[k] * power
            if k < max(coeffs):
                power = power * value
        return result

    def div_linear(self, j):
        """Synthetic division by ``y_j - 1``

        :return: ``(q, r)`` with ``self = (y_j - 1) q + r`` and ``r`` free of ``y_j``
        :rtype: tuple
        """
        coeffs = self.coefficients(j)
        d = max(coeffs, default=-1)
        zero = MPoly(self.ctx, self.nvars)
        if d <= 0:
            return zero, coeffs.get(0, zero)
        yj = MPoly.var(self.ctx, self.nvars, j)
        q = zero
        carry = zero
        for k in range(d, 0, -1):
            carry = carry + coeffs.get(k, zero)
            q = q + carry * (yj ** (k - 1))
        return q, carry + coeffs.get(0, zero)

    # -- variable bookkeeping ---------------------------------------------------------

    def drop_var(self, j):
        """Remove variable ``j`` (which must not occur)"""
        if self.degree(j) > 0:
            raise PreconditionError(f'y{j + 1} still occurs in {self.render()}')
        out = MPoly(self.ctx, self.nvars - 1)
        out.terms = {e[:j] + e[j + 1:]: c for e, c in self.terms.items()}
        return out

    def insert_var(self, j):
        """New unused variable at position ``j``; later variables shift up"""
        out = MPoly(self.ctx, self.nvars + 1)
        out.terms = {e[:j] + (0,) + e[j:]: c for e, c in self.terms.items()}
        return out

    def pad(self, nvars):
        """Append unused variables up to ``nvars``"""
        if nvars == self.nvars:
            return self
        out = MPoly(self.ctx, nvars)
        extra = (0,) * (nvars - self.nvars)
        out.terms = {e + extra: c for e, c in self.terms.items()}
        return out

    def restrict(self, nvars):
        """Drop trailing unused variables down to ``nvars``"""
        if nvars == self.nvars:
            return self
        if self.main_var() >= nvars:
            raise PreconditionError(f'{self.render()} involves variables beyond y{nvars}')
        out = MPoly(self.ctx, nvars)
        out.terms = {e[:nvars]: c for e, c in self.terms.items()}
        return out

    def map_coefficients(self, fn):
        return MPoly(self.ctx, self.nvars, {e: fn(c) for e, c in self.terms.items()})

    def at_t_zero(self):
        """Set :math:`t = 0` in every coefficient"""
        return self.map_coefficients(lambda c: LocalScalar.constant(self.ctx, c.value_at_zero()))

    def truncated(self, N):
        """Replace every coefficient by its degree ``< N`` polynomial representative"""
        return self.map_coefficients(lambda c: truncate(c, N).lift())

    # -- canonical text ----------------------------------------------------------------

    def key(self, N=None):
        """Canonical string, coefficients exact or truncated to :math:`t^N`"""
        if N not in self._key:
            parts = []
            for e in sorted(self.terms, reverse=True):
                c = self.terms[e]
                cs = c.key() if N is None else truncate(c, N).render()
                if cs != '0':
                    parts.append(f'{",".join(map(str, e))}:{cs}')
            self._key[N] = ';'.join(parts)
        return self._key[N]

    def __eq__(self, other):
        return (isinstance(other, MPoly) and self.nvars == other.nvars
                and self.ctx == other.ctx and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, self.key()))

    def render(self, names=None, N=None):
        """Grammar string; with ``N`` the coefficients are shown truncated"""
        names = names or default_names(self.nvars)
        parts = []
        for e in sorted(self.terms, key=lambda e: tuple(reversed(e)), reverse=True):
            c = self.terms[e]
            cs = c.render() if N is None else truncate(c, N).render()
            if cs == '0':
                continue
            mono = '*'.join(names[j] if k == 1 else f'{names[j]}^{k}'
                            for j, k in enumerate(e) if k)
            if not mono:
                parts.append(cs if _atomic(cs) else f'({cs})')
            elif cs == '1':
                parts.append(mono)
            elif cs == '-1':
                parts.append('-' + mono)
            else:
                parts.append(f'{cs}*{mono}' if _atomic(cs) else f'({cs})*{mono}')
        if not parts:
            return '0'
        return '+'.join(parts).replace('+-', '-')

    def __repr__(self):
        return f'MPoly({self.render()})'


def _atomic(text):
    body = text[1:] if text.startswith('-') else text
    return not any(ch in body for ch in '+-/')


def mpoly_from_sympy(expr, ctx, names):
    """Build an :py:class:`MPoly` from a sympy expression in ``names`` and ``t``

    Denominators may only involve :math:`t` and must not vanish at 0.
    """
    gens = [Symbol(name) for name in names]
    num, den = fraction(together(expr))
    if den.free_symbols - {T}:
        raise ParseError(f'denominator {den} involves more than t')
    den_terms = sympy_terms(den.expand(), (T,), ctx)
    den_poly = _poly_from_terms(ctx, {e[0]: c for e, c in den_terms.items()})
    grouped = {}
    for e, c in sympy_terms(num.expand(), tuple(gens) + (T,), ctx).items():
        grouped.setdefault(e[:-1], {})[e[-1]] = c
    terms = {e: LocalScalar(_poly_from_terms(ctx, coeffs), den_poly)
             for e, coeffs in grouped.items()}
    return MPoly(ctx, len(names), terms)


def _poly_from_terms(ctx, coeffs):
    deg = max(coeffs, default=-1)
    return Poly.from_coeffs(ctx, [coeffs.get(i, ctx.zero) for i in range(deg + 1)])


def parse_mpoly(text, ctx, nvars, names=None):
    """Parse a polynomial in ``y1..y{nvars}`` (or ``names``) over :math:`A`"""
    names = tuple(names or default_names(nvars))
    expr = parse_sympy(text, names + ('t',))
    return mpoly_from_sympy(expr, ctx, names)
