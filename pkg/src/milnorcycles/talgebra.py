r"""
Finite free :math:`A`-algebras presented by monic triangular systems

.. math::

   R = A[y_1, \dots, y_n] / (P_1, \dots, P_n),

with :math:`P_i` monic in :math:`y_i` of degree :math:`d_i` and coefficients
reduced modulo the earlier :math:`P_j`. The monomials
:math:`\prod_j y_j^{e_j}`, :math:`e_j < d_j`, form an :math:`A`-basis of
:math:`R`.

Linear algebra over the fraction field :math:`k(t)` is done with
:py:class:`sympy.polys.matrices.DomainMatrix`; results are brought back to
:math:`A` and rejected when a denominator vanishes at :math:`t = 0`.
"""
import itertools
import logging

from sympy import Mul, Poly as SymPoly, Symbol, resultant
from sympy.polys.matrices import DomainMatrix

from milnorcycles.errors import (CrossCheckFailed, DenominatorNotUnit,
                                 NonUnit, NonUnitCoordinate, NotInLocalRing,
                                 PreconditionError, ReducibleExtension)
from milnorcycles.mpoly import MPoly, parse_mpoly
from milnorcycles.scalars import LocalScalar, Poly

LOGGER = logging.getLogger(__name__)


# -- bridge to k(t) ------------------------------------------------------------------

def to_frac(F, a):
    """A local scalar as an element of the sympy domain ``F = k(t)``"""
    field = F.field
    ring = field.ring
    num = ring.from_dict({(i,): c for i, c in enumerate(a.num.coeffs) if c != a.ctx.zero})
    den = ring.from_dict({(i,): c for i, c in enumerate(a.den.coeffs) if c != a.ctx.zero})
    return field.new(num, den)


def _poly_from_ring(ctx, elem):
    deg = max((m[0] for m in elem.keys()), default=-1)
    coeffs = [ctx.zero] * (deg + 1)
    for (i,), c in elem.items():
        coeffs[i] = c
    return Poly.from_coeffs(ctx, coeffs)


def from_frac(ctx, f):
    """An element of ``k(t)`` as a local scalar

    :raises NotInLocalRing: when the reduced denominator vanishes at 0
    """
    return LocalScalar(_poly_from_ring(ctx, f.numer), _poly_from_ring(ctx, f.denom))


# -- triangular systems --------------------------------------------------------------

def structural_violation(polys):
    """First violation of the monic / degree-bound conditions

    :param list polys: :math:`P_1, \\dots, P_n` as :py:class:`MPoly`
    :return: ``None`` or ``(level, reason)`` with a 1-based level
    :rtype: tuple
    """
    n = len(polys)
    degrees = []
    for i, P in enumerate(polys):
        if P.nvars > n and P.main_var() >= n:
            return i + 1, f'P_{i + 1} involves variables beyond y{n}'
        P = P.pad(n) if P.nvars < n else P.restrict(n)
        if P.main_var() != i:
            return i + 1, f'P_{i + 1} does not have y{i + 1} as its main variable'
        lc = P.leading_coeff(i)
        if not (lc.is_constant() and lc.constant_value().is_one()):
            return i + 1, f'P_{i + 1} is not monic in y{i + 1}'
        for e in P.terms:
            for j in range(i):
                if e[j] >= degrees[j]:
                    return i + 1, f'P_{i + 1} has y{j + 1}-degree {e[j]} >= d_{j + 1} = {degrees[j]}'
        degrees.append(P.degree(i))
    return None


class TriangularSystem:
    """A monic triangular presentation :math:`P_1, \\dots, P_n` over :math:`A`"""

    ctx = None
    """the residue field"""
    n: int = None
    """number of bound variables"""
    polys: tuple = None
    """:math:`P_1, \\dots, P_n`, each an :py:class:`MPoly` in ``n`` variables"""
    degrees: tuple = None
    """the degree vector :math:`(d_1, \\dots, d_n)`"""

    def __init__(self, ctx, polys):
        """Validate and store a triangular system

        :param FieldCtx ctx: the residue field
        :param list polys: monic triangular polynomials, coefficients already reduced
        :raises PreconditionError: when a structural condition fails
        """
        polys = list(polys)
        bad = structural_violation(polys)
        if bad is not None:
            raise PreconditionError(f'not a triangular system at level {bad[0]}: {bad[1]}')
        n = len(polys)
        self.ctx = ctx
        self.n = n
        self.polys = tuple(P.pad(n) if P.nvars < n else P.restrict(n) for P in polys)
        self.degrees = tuple(P.degree(i) for i, P in enumerate(self.polys))
        self._padded = {}
        self._basis = None

    @classmethod
    def from_polys(cls, ctx, polys):
        """Build a system from monic (or unit-leading) polynomials, reducing
        each coefficient modulo the earlier levels"""
        done = []
        for i, P in enumerate(polys):
            prefix = cls(ctx, done)
            P = P.restrict(i + 1) if P.nvars > i + 1 else P.pad(i + 1)
            P = prefix.normal_form(P)
            lc = P.leading_coeff(i)
            if not (lc.is_constant() and lc.constant_value().is_one()):
                inv = prefix.element(lc.drop_var(i)).inverse()
                P = prefix.normal_form(P * inv.value.pad(i + 1))
            done.append(P)
        return cls(ctx, done)

    @property
    def rank(self):
        """rank :math:`\\prod_i d_i` of the presented algebra over :math:`A`"""
        r = 1
        for d in self.degrees:
            r *= d
        return r

    def basis(self):
        """Monomial basis, exponent tuples with :math:`e_j < d_j`"""
        if self._basis is None:
            self._basis = list(itertools.product(*(range(d) for d in self.degrees)))
        return self._basis

    def prefix(self, i):
        """The system :math:`P_1, \\dots, P_i`"""
        return TriangularSystem(self.ctx, [P.restrict(i) for P in self.polys[:i]])

    def _poly_in(self, j, nvars):
        key = (j, nvars)
        if key not in self._padded:
            self._padded[key] = self.polys[j].pad(nvars)
        return self._padded[key]

    def normal_form(self, F):
        """Reduce ``F`` modulo :math:`P_n, \\dots, P_1`

        ``F`` may carry more variables than the system; those are treated as
        coefficients.

        :param MPoly F: the polynomial
        :rtype: MPoly
        """
        if F.nvars < self.n:
            F = F.pad(self.n)
        for j in range(self.n - 1, -1, -1):
            F = self._reduce_var(F, j)
        return F

    def _reduce_var(self, F, j):
        d = self.degrees[j]
        if F.degree(j) < d:
            return F
        P = self._poly_in(j, F.nvars)
        while True:
            coeffs = F.coefficients(j)
            top = max(coeffs, default=-1)
            if top < d:
                return F
            shift = MPoly.var(self.ctx, F.nvars, j, top - d)
            F = F - coeffs[top] * shift * P

    def element(self, F):
        """The class of ``F`` in the algebra"""
        return AlgebraElem(self, self.normal_form(F.pad(self.n) if F.nvars < self.n else F))

    def one(self):
        return AlgebraElem(self, MPoly.one(self.ctx, self.n))

    def var(self, j):
        return AlgebraElem(self, self.normal_form(MPoly.var(self.ctx, self.n, j)))

    def from_coords(self, coords):
        value = MPoly(self.ctx, self.n, dict(zip(self.basis(), coords)))
        return AlgebraElem(self, value)

    def constant_term(self, i):
        """Constant coefficient of :math:`P_i` in :math:`y_i` (1-based ``i``),
        as an element of the prefix algebra"""
        prefix = self.prefix(i - 1)
        c = self.polys[i - 1].constant_coeff(i - 1).restrict(i - 1)
        return prefix.element(c)

    def key(self, N=None):
        return f'{self.n}|' + '|'.join(P.key(N) for P in self.polys)

    def render(self, N=None, names=None):
        return [P.render(names=names, N=N) for P in self.polys]

    def __eq__(self, other):
        return isinstance(other, TriangularSystem) and self.ctx == other.ctx and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f'TriangularSystem({self.render()})'


class AlgebraElem:
    """Element of a triangular algebra, kept in normal form"""

    owner: TriangularSystem = None
    """the presenting system"""
    value: MPoly = None
    """normal-form representative"""

    def __init__(self, owner, value):
        self.owner = owner
        self.value = value

    @property
    def ctx(self):
        return self.owner.ctx

    def _coerce(self, other):
        if isinstance(other, AlgebraElem):
            if other.owner is not self.owner and other.owner != self.owner:
                raise PreconditionError('elements of different algebras')
            return other
        return AlgebraElem(self.owner, MPoly.constant(self.ctx, self.owner.n, other))

    def __add__(self, other):
        return AlgebraElem(self.owner, self.value + self._coerce(other).value)

    __radd__ = __add__

    def __sub__(self, other):
        return AlgebraElem(self.owner, self.value - self._coerce(other).value)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return AlgebraElem(self.owner, -self.value)

    def __mul__(self, other):
        other = self._coerce(other)
        return AlgebraElem(self.owner, self.owner.normal_form(self.value * other.value))

    __rmul__ = __mul__

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.owner.one(), self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def is_zero(self):
        return self.value.is_zero()

    def is_one(self):
        return self.value.is_constant() and self.value.constant_value().is_one()

    def coords(self):
        """Coordinates in the monomial basis"""
        zero = LocalScalar.zero(self.ctx)
        return [self.value.terms.get(b, zero) for b in self.owner.basis()]

    def multiplication_matrix(self):
        """Columns are the coordinates of ``self * b`` over the basis"""
        owner = self.owner
        cols = []
        for b in owner.basis():
            mono = MPoly(self.ctx, owner.n, {b: LocalScalar.one(self.ctx)})
            cols.append((self * AlgebraElem(owner, mono)).coords())
        return [[cols[c][r] for c in range(len(cols))] for r in range(len(cols))]

    def is_unit(self):
        """Unit test through the multiplication matrix at :math:`t = 0`"""
        if self.value.is_constant():
            return self.value.constant_value().is_unit()
        ctx = self.ctx
        rows = [[c.value_at_zero() for c in row] for row in self.multiplication_matrix()]
        D = len(rows)
        det = DomainMatrix(rows, (D, D), ctx.domain).det()
        return not ctx.is_zero(det)

    def is_generic_unit(self):
        """Whether the element becomes a unit once :math:`t` is inverted"""
        if self.value.is_constant():
            return not self.value.constant_value().is_zero()
        F = self.ctx.frac_field()
        rows = [[to_frac(F, c) for c in row] for row in self.multiplication_matrix()]
        D = len(rows)
        return not F.is_zero(DomainMatrix(rows, (D, D), F).det())

    def inverse(self):
        return alg_inv(self)

    def truncated(self, N):
        return AlgebraElem(self.owner, self.value.truncated(N))

    def at_t_zero(self):
        return AlgebraElem(self.owner, self.value.at_t_zero())

    def key(self, N=None):
        return self.value.key(N)

    def __eq__(self, other):
        if isinstance(other, AlgebraElem):
            return self.owner == other.owner and self.value == other.value
        return NotImplemented

    def __hash__(self):
        return hash(self.key())

    def render(self, names=None, N=None):
        return self.value.render(names=names, N=N)

    def __repr__(self):
        return f'AlgebraElem({self.render()})'


def normal_form(owner, poly):
    """Unique remainder of ``poly`` modulo ``owner``

    :param TriangularSystem owner: the presenting system
    :param MPoly poly: a polynomial in :math:`y_1, \\dots, y_n`
    :rtype: AlgebraElem
    """
    return owner.element(poly)


def _solve_frac(ctx, columns, target):
    """Solve ``sum x_c * columns[c] = target`` over ``k(t)``

    :return: ``None`` when ``target`` is outside the span, else the solution
    :raises DenominatorNotUnit: when ``columns`` are dependent
    """
    F = ctx.frac_field()
    D, ncols = len(target), len(columns)
    rows = [[to_frac(F, col[r]) for col in columns] + [to_frac(F, target[r])] for r in range(D)]
    M = DomainMatrix(rows, (D, ncols + 1), F)
    rref, pivots = M.rref()
    if tuple(pivots[:ncols]) != tuple(range(ncols)):
        raise DenominatorNotUnit('spanning set is dependent over k(t)')
    if ncols in pivots:
        return None
    flat = rref.to_list_flat()
    return [flat[r * (ncols + 1) + ncols] for r in range(ncols)]


def alg_inv(e):
    """Inverse in the algebra

    Solves the multiplication-by-``e`` system over :math:`k(t)` and checks
    that the solution has unit denominators.

    :param AlgebraElem e: the element
    :rtype: AlgebraElem
    :raises NonUnit: when ``e`` is not invertible in the algebra
    """
    owner, ctx = e.owner, e.ctx
    if e.value.is_constant():
        c = e.value.constant_value()
        if not c.is_unit():
            raise NonUnit(f'{c.render()} is not a unit of A')
        return AlgebraElem(owner, MPoly.constant(ctx, owner.n, c.inverse()))
    matrix = e.multiplication_matrix()
    D = len(matrix)
    columns = [[matrix[r][c] for r in range(D)] for c in range(D)]
    target = [LocalScalar.one(ctx)] + [LocalScalar.zero(ctx)] * (D - 1)
    try:
        sol = _solve_frac(ctx, columns, target)
    except DenominatorNotUnit:
        raise NonUnit(f'{e.render()} is a zero divisor') from None
    F = ctx.frac_field()
    try:
        coords = [from_frac(ctx, x) for x in sol]
    except NotInLocalRing:
        raise NonUnit(f'{e.render()} is invertible over k(t) only') from None
    inv = owner.from_coords(coords)
    if not (inv * e).is_one():
        raise CrossCheckFailed(f'inverse check failed for {e.render()} over {F}')
    return inv


# -- points and push-forward -----------------------------------------------------------

class PointRep:
    """A point of :math:`\\square^n` over a finite free :math:`A`-algebra"""

    algebra: TriangularSystem = None
    """the algebra, in auxiliary variables"""
    coords: tuple = None
    """unit coordinates :math:`\\beta_1, \\dots, \\beta_n`"""
    mult: int = None
    """multiplicity"""

    def __init__(self, algebra, coords, mult=1):
        self.algebra = algebra
        self.coords = tuple(coords)
        self.mult = mult
        for i, beta in enumerate(self.coords):
            if beta.owner != algebra:
                raise PreconditionError(f'coordinate {i + 1} lives in another algebra')

    @property
    def n(self):
        return len(self.coords)


def _monomial_value(coords, exps, one):
    value = one
    for beta, k in zip(coords, exps):
        if k:
            value = value * beta ** k
    return value


def min_poly_tower(point, i, prefix):
    """Monic minimal polynomial of :math:`\\beta_i` over the subalgebra
    presented by ``prefix``

    The products :math:`m(\\beta_{<i})\\,\\beta_i^j` over the prefix basis are
    added to a spanning set one power at a time until :math:`\\beta_i^e`
    falls in its :math:`k(t)`-span; the coefficients must lie in :math:`A`.

    :param PointRep point: the point
    :param int i: 1-based coordinate index
    :param TriangularSystem prefix: presentation of the subalgebra generated
      by :math:`\\beta_1, \\dots, \\beta_{i-1}`
    :return: :math:`P_i` as an :py:class:`MPoly` in ``i`` variables
    :rtype: MPoly
    :raises DenominatorNotUnit: when the coefficients are not in :math:`A`
    """
    ctx, amb = point.algebra.ctx, point.algebra
    beta = point.coords[i - 1]
    sub_basis = prefix.basis()
    one = amb.one()
    sub_values = [_monomial_value(point.coords[:i - 1], b, one) for b in sub_basis]
    columns = []
    power = one
    for e in range(1, amb.rank // len(sub_basis) + 1):
        columns.extend((s * power).coords() for s in sub_values)
        power = power * beta
        sol = _solve_frac(ctx, columns, power.coords())
        if sol is None:
            continue
        try:
            lam = [from_frac(ctx, x) for x in sol]
        except NotInLocalRing:
            raise DenominatorNotUnit(
                f'minimal polynomial of coordinate {i} has coefficients outside A') from None
        terms = {(0,) * (i - 1) + (e,): LocalScalar.one(ctx)}
        for idx, c in enumerate(lam):
            j, b = divmod(idx, len(sub_basis))
            exps = sub_basis[b] + (j,)
            terms[exps] = -c
        P = MPoly(ctx, i, terms)
        LOGGER.debug('min poly of coordinate %d: %s', i, P.render())
        return P
    raise DenominatorNotUnit(f'no minimal polynomial found for coordinate {i}')


def triangularize(point):
    """Triangular presentation of the image of a point

    :param PointRep point: the point, all coordinates units
    :return: the system and its multiplicity
      ``point.mult * rank(point.algebra) / prod(d_i)``
    :rtype: tuple
    """
    ctx = point.algebra.ctx
    done = []
    for i in range(1, point.n + 1):
        prefix = TriangularSystem(ctx, done)
        done.append(min_poly_tower(point, i, prefix))
    system = TriangularSystem(ctx, done)
    total = point.mult * point.algebra.rank
    if total % system.rank:
        raise DenominatorNotUnit(
            f'rank {point.algebra.rank} is not a multiple of the image degree {system.rank}')
    return system, total // system.rank


# -- extensions ------------------------------------------------------------------------

class Extension:
    """A finite extension of :math:`k` given by a tower of simple steps

    Step ``j`` is monic in its new variable ``x_{j+1}`` with coefficients in
    :math:`k[x_1, \\dots, x_j]`. A one-step tower is the simple extension
    :math:`k[x]/(g)`.
    """

    ctx = None
    """the base field"""
    steps: tuple = None
    """tower polynomials, step ``j`` as an MPoly in ``j+1`` variables"""
    names: tuple = None
    """variable names used in the grammar"""

    def __init__(self, ctx, steps, names=None):
        self.ctx = ctx
        steps = list(steps)
        if not steps:
            raise PreconditionError('an extension needs at least one step')
        self.names = tuple(names) if names else (('x',) if len(steps) == 1 else
                                                 tuple(f'x{j + 1}' for j in range(len(steps))))
        for j, g in enumerate(steps):
            if any(not c.is_constant() for c in g.terms.values()):
                raise PreconditionError(f'step {j + 1} has coefficients depending on t')
        self._algebra = TriangularSystem.from_polys(ctx, steps)
        self.steps = self._algebra.polys

    @classmethod
    def parse(cls, ctx, texts):
        """Parse ``"x^2-2"`` or a list of tower steps in ``x1, x2, ...``"""
        if isinstance(texts, str):
            texts = [texts]
        texts = list(texts)
        names = ('x',) if len(texts) == 1 else tuple(f'x{j + 1}' for j in range(len(texts)))
        steps = [parse_mpoly(text, ctx, j + 1, names[:j + 1]) for j, text in enumerate(texts)]
        return cls(ctx, steps, names)

    @property
    def height(self):
        return len(self.steps)

    def degree(self):
        return self._algebra.rank

    def algebra(self):
        return self._algebra

    def base(self):
        """The tower without its last step, ``None`` for a simple extension"""
        if self.height == 1:
            return None
        steps = [P.restrict(j + 1) for j, P in enumerate(self.steps[:-1])]
        return Extension(self.ctx, steps, self.names[:-1])

    def element(self, poly):
        return self._algebra.element(poly)

    def parse_element(self, text, N=None):
        elem = self.element(parse_mpoly(text, self.ctx, self.height, self.names))
        return elem.truncated(N) if N is not None else elem

    def _sympy_steps(self):
        gens = [Symbol(name) for name in self.names]
        exprs = []
        for P in self.steps:
            terms = []
            for e, c in P.terms.items():
                mono = Mul(*[g ** k for g, k in zip(gens, e)])
                terms.append(self.ctx.domain.to_sympy(c.value_at_zero()) * mono)
            exprs.append(sum(terms))
        return gens, exprs

    def check_irreducible(self):
        """Raise :py:class:`ReducibleExtension` unless the tower is a field

        A simple step is tested directly. For a tower the iterated resultant
        eliminating ``x_1, ..., x_{L-1}`` must be irreducible of the full degree,
        which makes ``x_L`` a primitive element.
        """
        gens, exprs = self._sympy_steps()
        opts = {'modulus': self.ctx.p} if self.ctx.p is not None else {'domain': 'QQ'}
        res = exprs[-1]
        for j in range(len(exprs) - 2, -1, -1):
            res = resultant(exprs[j], res, gens[j], *[g for g in gens if g != gens[j]], **opts)
        poly = SymPoly(res, gens[-1], **opts)
        if poly.degree() != self.degree() or not poly.is_irreducible:
            raise ReducibleExtension(
                f'{self.render()} does not define a field over {self.ctx.tag}')

    def render(self):
        names = self.names
        rendered = [P.render(names=names[:self.height]) for P in self.steps]
        return rendered[0] if len(rendered) == 1 else rendered

    def __eq__(self, other):
        return isinstance(other, Extension) and self._algebra == other._algebra

    def __hash__(self):
        return hash(self._algebra)

    def __repr__(self):
        return f'Extension({self.render()})'


def base_change_point(coords, ext, lift=None):
    """The point of :math:`\\square^n` over :math:`A \\otimes k'` given by ``coords``

    :param list coords: entries as :py:class:`AlgebraElem` of ``ext.algebra()``
      (or local scalars when ``ext`` is ``None``)
    :param Extension ext: the extension, ``None`` for :math:`k` itself
    :param lift: optional map applied to each coordinate
    :rtype: PointRep
    :raises ReducibleExtension: when ``ext`` is not a field
    :raises NonUnitCoordinate: when a coordinate is not a unit
    """
    if ext is None:
        ctx = coords[0].ctx if coords else None
        algebra = TriangularSystem(ctx, [])
        coords = [c if isinstance(c, AlgebraElem) else
                  AlgebraElem(algebra, MPoly.constant(ctx, 0, c)) for c in coords]
    else:
        ext.check_irreducible()
        algebra = ext.algebra()
    if lift is not None:
        coords = [lift(c) for c in coords]
    for i, beta in enumerate(coords):
        if not beta.is_unit():
            raise NonUnitCoordinate(f'coordinate {i + 1} = {beta.render()} is not a unit')
    return PointRep(algebra, coords, 1)
