"""
Seeded random generators for field elements, series, Witt vectors, units,
extensions, symbols and admissible triangular cycles.

Every generator takes a :py:class:`numpy.random.Generator`; the suites derive
one per case from a master :py:class:`numpy.random.SeedSequence`, so a case is
reproduced from ``(master seed, case index)`` alone.

Random cycles take the constant term of every level from the units of the
prefix algebra, so later levels depend on earlier variables, and reject
levels whose value at :math:`y_i = 1` is a zero divisor of the prefix algebra
after inverting :math:`t`; degree-one levels are graphs :math:`y_j - g_j`
with :math:`g_j` a unit of the prefix algebra.
"""
from dataclasses import dataclass, replace

import numpy as np

from milnorcycles.cycles import TriangularCycle
from milnorcycles.errors import ReducibleExtension
from milnorcycles.mpoly import MPoly
from milnorcycles.scalars import LocalScalar, Poly, TruncSeries
from milnorcycles.talgebra import Extension, TriangularSystem
from milnorcycles.witt import WittVector

_ATTEMPTS = 200

TOWERS = {
    2: ['x1^2+x1+1', 'x2^2+x2+x1'],
    3: ['x1^2+1', 'x2^2-(1+x1)'],
    5: ['x1^2-2', 'x2^2-x1'],
    7: ['x1^2+1', 'x2^2-(1+2*x1)'],
    None: ['x1^2-2', 'x2^2-x1'],
}
"""quartic towers :math:`k \\subset k_2 \\subset k_4` by characteristic"""


@dataclass(frozen=True)
class GeneratorCaps:
    """Degree caps of the random generators"""

    n: int = 3
    """number of cycle levels or symbol entries"""
    d: int = 4
    """degree of a cycle level"""
    deg_g: int = 4
    """degree of a random simple extension"""
    m: int = 8
    """truncation level"""
    deg_t: int = 2
    """:math:`t`-degree of random coefficients"""

    def narrowed(self, **changes):
        return replace(self, **changes)


def default_rng(seed):
    """A generator from an int seed or a :py:class:`numpy.random.SeedSequence`"""
    return np.random.default_rng(seed)


# -- field elements and series ----------------------------------------------------------

def field_element(rng, ctx, nonzero=False):
    """Uniform element of :math:`\\mathbb{F}_p`, or a small rational"""
    if ctx.p is not None:
        return ctx(int(rng.integers(1 if nonzero else 0, ctx.p)))
    num = int(rng.integers(-4, 5))
    if nonzero and num == 0:
        num = int(rng.choice([-1, 1]))
    return ctx.from_rational(num, int(rng.integers(1, 4)))


def series(rng, ctx, N, unit=False):
    coeffs = [field_element(rng, ctx) for _ in range(N)]
    if unit:
        coeffs[0] = field_element(rng, ctx, nonzero=True)
    return TruncSeries(ctx, coeffs, N)


def witt_vector(rng, ctx, m):
    """Uniform element of :math:`W_m(k)` (uniform coefficients after the 1)"""
    return WittVector(TruncSeries(ctx, [1] + [field_element(rng, ctx) for _ in range(m)], m + 1))


def local_scalar(rng, ctx, deg=2, unit=False, denominators=True):
    """Random element of :math:`A`, sometimes with a denominator :math:`1 + t\\,r(t)`"""
    coeffs = [field_element(rng, ctx) for _ in range(deg + 1)]
    if unit:
        coeffs[0] = field_element(rng, ctx, nonzero=True)
    num = Poly.from_coeffs(ctx, coeffs)
    if denominators and rng.random() < 0.25:
        den = Poly.from_coeffs(ctx, [1] + [field_element(rng, ctx) for _ in range(deg)])
        return LocalScalar(num, den)
    return LocalScalar(num)


def local_unit(rng, ctx, deg=2, denominators=True):
    return local_scalar(rng, ctx, deg, unit=True, denominators=denominators)


def local_unit_not_one(rng, ctx, deg=2):
    """A unit of :math:`A` different from 1"""
    while True:
        a = local_unit(rng, ctx, deg)
        if not a.is_one():
            return a


def relative_unit(rng, ctx, r, deg=2):
    """:math:`1 + t^r h(t)` with :math:`h(0) \\neq 0`"""
    coeffs = [1] + [0] * (r - 1) + [field_element(rng, ctx, nonzero=True)]
    coeffs += [field_element(rng, ctx) for _ in range(deg)]
    return LocalScalar.from_coeffs(ctx, coeffs)


def steinberg_parameter(rng, ctx, deg=2):
    """A unit :math:`a` with :math:`1 - a` a unit"""
    while True:
        a = local_unit(rng, ctx, deg)
        if (1 - a).is_unit():
            return a


# -- extensions ---------------------------------------------------------------------------

def irreducible_extension(rng, ctx, deg):
    """Random simple extension :math:`k[x]/(g)` with ``g`` irreducible of degree ``deg``"""
    for _ in range(_ATTEMPTS):
        coeffs = [field_element(rng, ctx, nonzero=True)]
        coeffs += [field_element(rng, ctx) for _ in range(deg - 1)] + [ctx.one]
        g = MPoly(ctx, 1, {(k,): LocalScalar.constant(ctx, c) for k, c in enumerate(coeffs)})
        ext = Extension(ctx, [g])
        try:
            ext.check_irreducible()
        except ReducibleExtension:
            continue
        return ext
    raise RuntimeError(f'no irreducible polynomial of degree {deg} found over {ctx.tag}')


def extension(rng, ctx, caps=GeneratorCaps()):
    return irreducible_extension(rng, ctx, int(rng.integers(1, caps.deg_g + 1)))


def tower(ctx, rng=None):
    """A quartic tower of two quadratic steps

    The fixed towers are used for :math:`p \\in \\{2, 3, 5, 7\\}` and
    :math:`\\mathbb{Q}`; other characteristics search ``x2^2 - (a + b*x1)``
    over a random quadratic first step.
    """
    if ctx.p in TOWERS:
        return Extension.parse(ctx, TOWERS[ctx.p])
    rng = rng if rng is not None else default_rng(ctx.p)
    first = irreducible_extension(rng, ctx, 2).steps[0]
    x1 = MPoly.var(ctx, 2, 0)
    x2 = MPoly.var(ctx, 2, 1)
    for _ in range(_ATTEMPTS):
        a, b = field_element(rng, ctx), field_element(rng, ctx, nonzero=True)
        ext = Extension(ctx, [first, x2 * x2 - x1 * b - a], ('x1', 'x2'))
        try:
            ext.check_irreducible()
        except ReducibleExtension:
            continue
        return ext
    raise RuntimeError(f'no quartic tower found over {ctx.tag}')


def ext_unit(rng, ext, deg=2):
    """Random unit of the extension algebra over :math:`A`"""
    algebra = ext.algebra()
    for _ in range(_ATTEMPTS):
        coords = [local_scalar(rng, ext.ctx, deg) for _ in algebra.basis()]
        u = algebra.from_coords(coords)
        if u.is_unit():
            return u
    raise RuntimeError(f'no unit found in {ext.render()}')


def ext_relative_unit(rng, ext, r, deg=1):
    """:math:`1 + t^r v` for a random element :math:`v` of the extension algebra"""
    algebra = ext.algebra()
    shift = LocalScalar.from_coeffs(ext.ctx, [0] * r + [1])
    coords = [local_scalar(rng, ext.ctx, deg, denominators=False) * shift for _ in algebra.basis()]
    return algebra.from_coords(coords) + 1


def norm_symbol_entries(rng, ext, n, m, caps=GeneratorCaps()):
    """Entries of a random symbol for the norm suites

    For ``n = 1`` a random unit of the extension; for ``n = 2`` two random
    units of the extension, both outside :math:`A` when the extension is
    proper.
    """
    if n == 1:
        return [ext_unit(rng, ext, caps.deg_t)]
    entries = []
    for _ in range(_ATTEMPTS):
        u = ext_unit(rng, ext, caps.deg_t)
        if ext.degree() == 1 or not u.value.is_constant():
            entries.append(u)
        if len(entries) == n:
            return entries
    raise RuntimeError(f'no units outside the base found in {ext.render()}')


# -- cycles ---------------------------------------------------------------------------------

def _prefix_unit(rng, ctx, prefix, i, n, deg_t):
    """Random unit of the prefix algebra as a polynomial in ``n`` variables"""
    tail = (0,) * (n - i)
    for _ in range(_ATTEMPTS):
        u = field_element(rng, ctx, nonzero=True)
        terms = {(0,) * n: LocalScalar.from_coeffs(ctx, [u] + [field_element(rng, ctx) for _ in range(deg_t)])}
        for b in prefix.basis():
            if any(b) and rng.random() < 0.5:
                coeff = local_scalar(rng, ctx, deg_t, denominators=False)
                if not coeff.is_zero():
                    terms[b + tail] = coeff
        c = MPoly(ctx, n, terms)
        if prefix.element(c.restrict(i)).is_unit():
            return c
    raise RuntimeError(f'no unit found in the prefix algebra {prefix.render()}')


def _level(rng, ctx, prefix, i, n, d, deg_t):
    """One monic level of degree ``d`` in ``y_{i+1}``, polynomials in ``n`` variables"""
    P = MPoly.var(ctx, n, i, d) + _prefix_unit(rng, ctx, prefix, i, n, deg_t) * (-1) ** d
    tail = (0,) * (n - i - 1)
    for k in range(1, d):
        terms = {}
        for b in prefix.basis():
            if rng.random() < 0.5:
                coeff = local_scalar(rng, ctx, deg_t, denominators=False)
                if not coeff.is_zero():
                    terms[b + (k,) + tail] = coeff
        P = P + MPoly(ctx, n, terms)
    return P


def _value_at_one_ok(prefix, P, i):
    at_one = P.subs(i, 1)
    return prefix.element(at_one.restrict(i)).is_generic_unit()


def cycle(rng, ctx, caps=GeneratorCaps(), n=None, min_d=1):
    """Random admissible triangular cycle

    :param numpy.random.Generator rng: the generator
    :param FieldCtx ctx: the field
    :param GeneratorCaps caps: degree caps
    :param int n: number of levels, random up to ``caps.n`` when omitted
    :param int min_d: lower bound for the degree of the last level
    :rtype: TriangularCycle
    """
    n = n or int(rng.integers(1, caps.n + 1))
    polys = []
    for i in range(n):
        prefix = TriangularSystem(ctx, polys)
        low = min_d if i == n - 1 else 1
        for _ in range(_ATTEMPTS):
            d = int(rng.integers(low, max(low, caps.d) + 1))
            P = _level(rng, ctx, prefix, i, n, d, caps.deg_t)
            if _value_at_one_ok(prefix, P, i):
                break
        else:
            raise RuntimeError(f'no admissible level {i + 1} found over {ctx.tag}')
        polys.append(P)
    return TriangularCycle(TriangularSystem(ctx, polys))


def vanishing_cycle(rng, ctx, r, d=2, deg_t=2):
    """A one-level cycle :math:`(y - 1)^d + t^r q(y, t)` vanishing to order at least ``r``"""
    y = MPoly.var(ctx, 1, 0)
    shift = LocalScalar.from_coeffs(ctx, [0] * r + [1])
    for _ in range(_ATTEMPTS):
        P = (y - 1) ** d
        for k in range(d):
            P = P + y ** k * (local_scalar(rng, ctx, deg_t, denominators=False) * shift)
        if P.constant_value().is_unit() and not P.subs(0, 1).is_zero():
            return TriangularCycle(TriangularSystem(ctx, [P]))
    raise RuntimeError(f'no vanishing cycle found over {ctx.tag}')


def perturb(rng, Z, m):
    """``Z`` with one coefficient moved by :math:`t^{m+1} r`, :math:`r \\in k^\\times`"""
    ctx, n = Z.ctx, Z.n
    shift = LocalScalar.from_coeffs(ctx, [0] * (m + 1) + [1])
    for _ in range(_ATTEMPTS):
        i = int(rng.integers(0, n))
        k = int(rng.integers(0, Z.degrees[i]))
        delta = MPoly.var(ctx, n, i, k) * (shift * LocalScalar.constant(ctx, field_element(rng, ctx, True)))
        polys = list(Z.polys)
        polys[i] = polys[i] + delta
        prefix = TriangularSystem(ctx, polys[:i])
        if _value_at_one_ok(prefix, polys[i], i):
            return TriangularCycle(TriangularSystem(ctx, polys))
    raise RuntimeError(f'no perturbation of {Z.render()} keeps it admissible')
