r"""
Big Witt vectors :math:`W_m(k) = (1 + t\,k[t]/(t^{m+1}))^\times`.

The sum is the product of series. The product :math:`\star` is computed from
the canonical factorization :math:`x = \prod_i (1 - \alpha_i t^i)` and the rule

.. math::

   (1 - a t^i) \star (1 - b t^j) = (1 - a^{j/r} b^{i/r} t^{ij/r})^r,
   \qquad r = \gcd(i, j).

The multiplicative identity is :math:`1 - t`.
"""
import logging
from math import gcd

from milnorcycles.errors import (CrossCheckFailed, GhostUndefined,
                                 PreconditionError)
from milnorcycles.scalars import TruncSeries

LOGGER = logging.getLogger(__name__)


class WittVector:
    """Element of :math:`W_m(k)`, stored as its unit series"""

    m: int = None
    """length; the series lives modulo :math:`t^{m+1}`"""
    series: TruncSeries = None
    """the series, constant coefficient 1"""

    def __init__(self, series):
        """Wrap a series with constant coefficient 1

        :param TruncSeries series: precision ``m+1``
        """
        if series.coeffs[0] != series.ctx.one:
            raise PreconditionError(
                f'{series.render()} has constant term {series.ctx.render(series.coeffs[0])}, not 1')
        self.series = series
        self.m = series.N - 1

    @classmethod
    def zero(cls, ctx, m):
        """the additive identity, series 1"""
        return cls(TruncSeries.one(ctx, m + 1))

    @classmethod
    def one(cls, ctx, m):
        """the multiplicative identity :math:`1 - t`"""
        return cls.teichmuller(ctx.one, ctx, m)

    @classmethod
    def teichmuller(cls, a, ctx, m):
        """:math:`1 - a t`"""
        return cls(TruncSeries(ctx, [1, -ctx(a)], m + 1))

    @classmethod
    def from_factors(cls, ctx, alphas):
        r""":math:`\prod_{i=1}^m (1 - \alpha_i t^i)` with ``m = len(alphas)``"""
        m = len(alphas)
        result = TruncSeries.one(ctx, m + 1)
        for i, alpha in enumerate(alphas, start=1):
            if not ctx.is_zero(ctx(alpha)):
                result = result * _one_minus(ctx, ctx(alpha), i, m + 1)
        return cls(result)

    @property
    def ctx(self):
        return self.series.ctx

    def __add__(self, other):
        return witt_add(self, other)

    def __sub__(self, other):
        return witt_sub(self, other)

    def __neg__(self):
        return witt_neg(self)

    def __mul__(self, other):
        return witt_star(self, other)

    def __eq__(self, other):
        return isinstance(other, WittVector) and self.series == other.series

    def __hash__(self):
        return hash(self.series)

    def render(self):
        return self.series.render()

    def __repr__(self):
        return f'WittVector({self.render()}, m={self.m})'


class GhostVector:
    """Ghost components :math:`(w_1, \\dots, w_m)`"""

    ctx = None
    """the field of the components"""
    w: tuple = None
    """the components"""

    def __init__(self, ctx, w):
        self.ctx = ctx
        self.w = tuple(ctx(c) for c in w)

    def __add__(self, other):
        return GhostVector(self.ctx, [a + b for a, b in zip(self.w, other.w)])

    def __mul__(self, other):
        return GhostVector(self.ctx, [a * b for a, b in zip(self.w, other.w)])

    def __eq__(self, other):
        return isinstance(other, GhostVector) and self.w == other.w

    def __hash__(self):
        return hash(self.render())

    def render(self):
        return '(' + ', '.join(self.ctx.render(c) for c in self.w) + ')'

    def __repr__(self):
        return f'GhostVector{self.render()}'


def _one_minus(ctx, a, i, N):
    """the series :math:`1 - a t^i` at precision ``N``"""
    coeffs = [ctx.zero] * N
    coeffs[0] = ctx.one
    if i < N:
        coeffs[i] = -a
    return TruncSeries(ctx, coeffs, N)


def _check_pair(x, y):
    if x.m != y.m or x.ctx != y.ctx:
        raise PreconditionError(f'Witt length/field mismatch: W_{x.m}({x.ctx.tag}) vs W_{y.m}({y.ctx.tag})')


def witt_add(x, y):
    """Sum in :math:`W_m(k)`: the product of the series"""
    _check_pair(x, y)
    return WittVector(x.series * y.series)


def witt_neg(x):
    return WittVector(x.series.inverse())


def witt_sub(x, y):
    _check_pair(x, y)
    return WittVector(x.series * y.series.inverse())


def witt_factor(x):
    r"""Canonical factorization :math:`x = \prod_{i=1}^m (1 - \alpha_i t^i)`

    At step ``i`` the coefficient of :math:`t^i` of the running quotient is
    :math:`-\alpha_i`; the quotient is then divided by :math:`1 - \alpha_i t^i`.

    :param WittVector x: the Witt vector
    :return: :math:`[\alpha_1, \dots, \alpha_m]`
    :rtype: list
    """
    ctx, N = x.ctx, x.m + 1
    running = x.series
    alphas = []
    for i in range(1, N):
        alpha = -running.coeffs[i]
        alphas.append(alpha)
        if not ctx.is_zero(alpha):
            running = running * _one_minus(ctx, alpha, i, N).inverse()
    return alphas


def witt_star(x, y):
    """Product in :math:`W_m(k)`

    Both arguments are factored and the factors are multiplied pairwise;
    pairs with :math:`\\mathrm{lcm}(i, j) > m` contribute 1.

    :param WittVector x: left factor
    :param WittVector y: right factor
    :rtype: WittVector
    """
    _check_pair(x, y)
    ctx, m = x.ctx, x.m
    alphas, betas = witt_factor(x), witt_factor(y)
    result = TruncSeries.one(ctx, m + 1)
    for i, a in enumerate(alphas, start=1):
        if ctx.is_zero(a):
            continue
        for j, b in enumerate(betas, start=1):
            if ctx.is_zero(b):
                continue
            r = gcd(i, j)
            if i * j // r > m:
                continue
            c = a ** (j // r) * b ** (i // r)
            result = result * _one_minus(ctx, c, i * j // r, m + 1) ** r
    return WittVector(result)


def ghost(x):
    r"""Ghost components :math:`w_n = \sum_{d \mid n} d\, a_d^{n/d}`

    The result is checked against :math:`-t\, s'(t)/s(t) = \sum_n w_n t^n`.

    :param WittVector x: the Witt vector
    :rtype: GhostVector
    :raises GhostUndefined: in characteristic :math:`p \le m`
    """
    ctx, m = x.ctx, x.m
    if not ctx.allows_ghost(m):
        raise GhostUndefined(f'ghost map of W_{m} needs characteristic 0 or p > {m}, field is {ctx.tag}')
    a = witt_factor(x)
    w = []
    for n in range(1, m + 1):
        total = ctx.zero
        for d in range(1, n + 1):
            if n % d == 0:
                total += ctx(d) * a[d - 1] ** (n // d)
        w.append(total)
    logderiv = x.series.derivative() * x.series.inverse()
    check = [-logderiv.coeffs[n - 1] for n in range(1, m + 1)]
    if check != w:
        raise CrossCheckFailed(f'ghost components of {x.render()} disagree with -t s\'/s')
    return GhostVector(ctx, w)


def vanishing_level(x):
    r"""Largest :math:`r` in :math:`1..m+1` with :math:`x \equiv 1 \bmod t^r`"""
    ctx = x.ctx
    for i in range(1, x.m + 1):
        if not ctx.is_zero(x.series.coeffs[i]):
            return i
    return x.m + 1


def witt_restrict(x, m):
    """Projection :math:`W_{m'} \\to W_m` for ``m <= m'``"""
    if m > x.m or m < 0:
        raise PreconditionError(f'cannot restrict W_{x.m} to W_{m}')
    return WittVector(x.series.retruncate(m + 1))


def split_unit(u):
    r"""Split a unit of :math:`k_{m+1}` as :math:`(u(0), u/u(0)) \in k^\times \times W_m(k)`

    :param TruncSeries u: a unit series
    :return: the residue and the Witt vector part
    :rtype: tuple
    """
    c0 = u.coeffs[0]
    if u.ctx.is_zero(c0):
        raise PreconditionError(f'{u.render()} is not a unit')
    return c0, WittVector(u.scale(u.ctx.one / c0))
