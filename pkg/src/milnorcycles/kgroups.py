r"""
Milnor symbols over :math:`k_{m+1}` and its finite extensions, the graph map,
the reduction of triangular cycles to graph cycles, the :math:`n = 1` maps,
and norms along finite extensions by cycle push-forward.

A norm is computed as

1. base change of the symbol to a point over the extension algebra,
2. triangularization of the image (:py:func:`~milnorcycles.talgebra.triangularize`),
3. reduction to graph cycles, one verified ``QStep`` or ``LevelSplit`` witness per step,
4. read-off of the graph coordinates modulo :math:`t^{m+1}`, weighted by the
   push-forward multiplicity.
"""
import logging
from itertools import zip_longest

from sympy.polys.matrices import DomainMatrix

from milnorcycles.cycles import (CycleSum, TriangularCycle, mod_equiv,
                                 normalize_system, vanishing_order)
from milnorcycles.errors import (CrossCheckFailed, NonUnitEntry, NonUnitParameter,
                                 NotRelative, PairDiverged, PreconditionError,
                                 RelativeOrderLost, UnhandledFaceShape,
                                 WitnessMismatch)
from milnorcycles.mpoly import MPoly
from milnorcycles.scalars import (LocalScalar, TruncSeries, parse_series,
                                  truncate)
from milnorcycles.talgebra import (AlgebraElem, base_change_point, from_frac,
                                   to_frac, triangularize)
from milnorcycles.witness import (boundary, boundary_diff, make_witness,
                                  qstep_obstructions, to_record, verify)
from milnorcycles.witt import WittVector, witt_factor, witt_star

LOGGER = logging.getLogger(__name__)


# -- symbols ---------------------------------------------------------------------------

class MilnorSymbol:
    """A symbol :math:`\\{a_1, \\dots, a_n\\}` of units of :math:`k_{m+1}` or :math:`k'_{m+1}`"""

    ctx = None
    """the base field"""
    m: int = None
    """entries live modulo :math:`t^{m+1}`"""
    ext = None
    """the :py:class:`~milnorcycles.talgebra.Extension`, ``None`` for :math:`k`"""
    entries: tuple = None
    """:py:class:`TruncSeries` entries, or truncated algebra elements over ``ext``"""

    def __init__(self, entries, m, ext=None, ctx=None):
        """
        :param list entries: the entries
        :param int m: truncation level
        :param Extension ext: the extension, ``None`` for :math:`k`
        :raises NonUnitEntry: when an entry is not a unit
        """
        entries = list(entries)
        self.m = m
        self.ext = ext
        self.ctx = ctx or (ext.ctx if ext is not None else entries[0].ctx)
        self.entries = tuple(self._coerce(e) for e in entries)
        for i, e in enumerate(self.entries):
            if not e.is_unit():
                raise NonUnitEntry(f'entry {i + 1} = {e.render()} is not a unit')

    def _coerce(self, e):
        N = self.m + 1
        if self.ext is None:
            if isinstance(e, TruncSeries):
                return e if e.N == N else truncate(e.lift(), N)
            if isinstance(e, LocalScalar):
                return truncate(e, N)
            return TruncSeries(self.ctx, [e], N)
        algebra = self.ext.algebra()
        if isinstance(e, AlgebraElem):
            return e.truncated(N)
        if isinstance(e, TruncSeries):
            e = e.lift()
        if not isinstance(e, LocalScalar):
            e = LocalScalar.constant(self.ctx, e)
        return AlgebraElem(algebra, MPoly.constant(self.ctx, algebra.n, e)).truncated(N)

    @classmethod
    def parse(cls, ctx, texts, m, ext=None):
        """Parse entries such as ``["x*(1+t)", "2"]`` or ``"{x*(1+t), 2}"``"""
        if isinstance(texts, str):
            texts = [part for part in texts.strip().strip('{}').split(',') if part.strip()]
        if ext is None:
            entries = [parse_series(text, ctx, m + 1) for text in texts]
        else:
            entries = [ext.parse_element(text, m + 1) for text in texts]
        return cls(entries, m, ext, ctx)

    @property
    def n(self):
        return len(self.entries)

    def lifts(self):
        """Canonical representatives in :math:`A` (or in the extension algebra)"""
        if self.ext is None:
            return [e.lift() for e in self.entries]
        return list(self.entries)

    def is_relative(self, r):
        """Whether some entry is :math:`\\equiv 1 \\bmod t^r`"""
        for e in self.entries:
            if self.ext is None:
                if e.valuation_of_difference(TruncSeries.one(self.ctx, e.N)) >= r:
                    return True
            else:
                val = (e - 1).value.valuation()
                if val is None or val >= r:
                    return True
        return False

    def render_entries(self):
        if self.ext is None:
            return [e.render() for e in self.entries]
        return [e.render(names=self.ext.names, N=self.m + 1) for e in self.entries]

    def key(self):
        return '|'.join(self.render_entries())

    def render(self):
        return '{' + ', '.join(self.render_entries()) + '}'

    def __eq__(self, other):
        return (isinstance(other, MilnorSymbol) and self.m == other.m
                and self.ext == other.ext and self.key() == other.key())

    def __hash__(self):
        return hash((self.m, self.key()))

    def __repr__(self):
        return f'MilnorSymbol({self.render()}, m={self.m})'


class SymbolSum:
    """Formal integer combination of Milnor symbols over one base"""

    ctx = None
    """the base field"""
    m: int = None
    """truncation level"""
    ext = None
    """the extension of the entries, ``None`` for :math:`k`"""

    def __init__(self, ctx, m, ext=None, terms=()):
        self.ctx, self.m, self.ext = ctx, m, ext
        self._terms = {}
        for mult, symbol in terms:
            self.add(symbol, mult)

    def add(self, symbol, mult=1):
        if symbol.m != self.m:
            raise PreconditionError(f'symbol at level {symbol.m} added to a sum at level {self.m}')
        if mult == 0:
            return
        key = symbol.key()
        if key in self._terms:
            total = self._terms[key][0] + mult
            if total:
                self._terms[key][0] = total
            else:
                del self._terms[key]
        else:
            self._terms[key] = [mult, symbol]

    def items(self):
        return [tuple(self._terms[key]) for key in sorted(self._terms)]

    def __iter__(self):
        return iter(self.items())

    def __len__(self):
        return len(self._terms)

    def is_zero(self):
        return not self._terms

    def __add__(self, other):
        return SymbolSum(self.ctx, self.m, self.ext, self.items() + other.items())

    def __neg__(self):
        return SymbolSum(self.ctx, self.m, self.ext, [(-k, s) for k, s in self.items()])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        return SymbolSum(self.ctx, self.m, self.ext, [(k * mult, s) for mult, s in self.items()])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, SymbolSum):
            return NotImplemented
        return self.m == other.m and \
            {key: v[0] for key, v in self._terms.items()} == {key: v[0] for key, v in other._terms.items()}

    def __hash__(self):
        return hash(tuple(sorted((key, v[0]) for key, v in self._terms.items())))

    def fold(self):
        """For :math:`n = 1`: the product of the entries raised to the multiplicities"""
        if any(symbol.n != 1 for _, symbol in self.items()):
            raise PreconditionError('fold needs one-entry symbols')
        return self.fold_at(0)

    def fold_at(self, pos):
        """Product of the entries at ``pos`` raised to the multiplicities"""
        result = TruncSeries.one(self.ctx, self.m + 1)
        for mult, symbol in self.items():
            if symbol.ext is not None:
                raise PreconditionError('fold needs symbols over k')
            result = result * symbol.entries[pos] ** mult
        return result

    def retruncate(self, m):
        """The same sum read modulo :math:`t^{m+1}`"""
        if m > self.m:
            raise PreconditionError(f'cannot raise the level from {self.m} to {m}')
        terms = [(mult, MilnorSymbol(s.entries, m, s.ext, s.ctx)) for mult, s in self.items()]
        return SymbolSum(self.ctx, m, self.ext, terms)

    def to_cycle_sum(self, N=None):
        """:math:`\\sum_s k_s \\Gamma_s` keyed modulo :math:`t^N` (default ``m + 1``)"""
        N = self.m + 1 if N is None else N
        out = CycleSum(self.ctx, N)
        for mult, symbol in self.items():
            out = out + CycleSum.single(graph(symbol), mult, N)
        return out

    def to_records(self):
        return [{'mult': mult, 'entries': s.render_entries()} for mult, s in self.items()]

    def render(self):
        if not self._terms:
            return '0'
        parts = []
        for mult, s in self.items():
            prefix = '' if mult == 1 else '-' if mult == -1 else f'{mult}*'
            parts.append(prefix + s.render())
        return ' + '.join(parts).replace('+ -', '- ')

    def __repr__(self):
        return f'SymbolSum({self.render()}, m={self.m})'


# -- graph map and reduction -----------------------------------------------------------------

def graph(s, lift=None):
    """The graph cycle :math:`\\{y_i - a_i\\}` of a symbol over :math:`k`

    :param MilnorSymbol s: the symbol
    :param lift: representative chooser, default the degree :math:`\\le m` polynomial
    :rtype: TriangularCycle
    :raises NonUnitEntry: when an entry is not a unit
    """
    if s.ext is not None:
        raise PreconditionError('graph cycles are built for symbols over k')
    lift = lift or (lambda e: e.lift())
    entries = [lift(e) for e in s.entries]
    for i, a in enumerate(entries):
        if not a.is_unit():
            raise NonUnitEntry(f'entry {i + 1} = {a.render()} is not a unit')
    return TriangularCycle.graph(s.ctx, entries)


def symbol_of_graph(Z, m):
    """The symbol read off a degree-:math:`(1, \\dots, 1)` cycle"""
    return MilnorSymbol([truncate(a, m + 1) for a in Z.graph_entries()], m, ctx=Z.ctx)


class ReductionResult:
    """Outcome of :py:func:`reduce_to_graphs`"""

    source: TriangularCycle = None
    """the input cycle"""
    start: TriangularCycle = None
    """the normalized input, ``None`` when it is empty in the cube"""
    final: CycleSum = None
    """the graph cycles reached, exact, with multiplicities"""
    graphs: SymbolSum = None
    """the read-off symbols modulo :math:`t^{m+1}`"""
    witnesses: list = None
    """the verified witnesses, in order"""
    weights: list = None
    """multiplicity of each witness boundary in the telescope"""
    schedule: list = None
    """degree vectors of the reduced cycles, in order"""
    m: int = None
    """truncation level"""

    def __init__(self, source, start, final, graphs, witnesses, weights, schedule, m):
        self.source, self.start, self.final = source, start, final
        self.graphs, self.witnesses, self.weights = graphs, witnesses, weights
        self.schedule, self.m = schedule, m

    def boundary_sum(self, recompute=False):
        """:math:`\\sum_W w_W \\partial W` from the claims or recomputed"""
        total = CycleSum(self.graphs.ctx)
        for weight, W in zip(self.weights, self.witnesses):
            total = total + (boundary(W) if recompute else W.claimed) * weight
        return total

    def telescope(self, recompute=False):
        """Check ``start - graphs = sum of weighted witness boundaries``

        The identity is checked exactly against the final graph cycles and
        modulo :math:`t^{m+1}` against the read-off symbols.

        :param bool recompute: recompute boundaries instead of using the claims
        """
        N = self.m + 1
        exact = self.boundary_sum(recompute)
        start = _as_sum(self.graphs.ctx, self.start)
        if start - self.final != exact:
            return False
        return (start.truncated(N) - self.graphs.to_cycle_sum(N)) == exact.truncated(N)

    def to_record(self):
        return {'input': self.source.render(),
                'start': None if self.start is None else self.start.render(),
                'schedule': [list(d) for d in self.schedule],
                'outputs': self.graphs.to_records(),
                'witnesses': [dict(to_record(W, True), weight=weight)
                              for weight, W in zip(self.weights, self.witnesses)]}


def _as_sum(ctx, cycle):
    if cycle is None:
        return CycleSum(ctx)
    return CycleSum.single(cycle)


def _last_reducible(Z):
    return max(i for i, d in enumerate(Z.degrees, start=1) if d > 1)


def _small_constants(ctx):
    if ctx.p is not None:
        return list(range(min(ctx.p, 7)))
    return [0, 1, -1, 2, -2, 3, -3]


def _split_factors(Z, i):
    """Units tried for a level split, polynomials in :math:`y_i`, simplest first"""
    y = MPoly.var(Z.ctx, Z.n, i - 1)
    consts = _small_constants(Z.ctx)
    for a in consts:
        yield y + a
    if Z.degrees[i - 1] > 2:
        for a in consts:
            for b in consts:
                yield y * y + y * a + b


def _next_witness(Z):
    """A QStep at the last reducible level, or a LevelSplit clearing the first
    level that blocks it"""
    i = _last_reducible(Z)
    blocked = qstep_obstructions(Z, i)
    if not blocked:
        return make_witness('QStep', cycle=Z, i=i)
    j = blocked[0]
    allowed = set(blocked) - {j}
    for u in _split_factors(Z, i):
        try:
            W = make_witness('LevelSplit', cycle=Z, j=j, u=u)
        except (NonUnitParameter, UnhandledFaceShape):
            continue
        if W.claimed.coefficient(Z) != 1:
            continue
        pieces = [piece for _, piece in W.claimed.items() if piece.key() != Z.key()]
        if all(set(qstep_obstructions(piece, i)) <= allowed for piece in pieces):
            LOGGER.debug('split level %d of %s with u = %s', j, Z.render(), u.render())
            return W
    raise UnhandledFaceShape(f'no level split clears level {j} of {Z.render()} '
                             f'for a QStep at level {i}')


def _reduction_steps(Z, N=None):
    """Yield ``(weight, cycle, witness)``, starting with the normalized input

    The open term of largest degree vector is reduced first; ties are broken
    by the key modulo :math:`t^N`.
    """
    ctx = Z.ctx
    start = normalize_system(ctx, Z.polys, Z.n)
    yield 1, start, None
    pending = _as_sum(ctx, start)
    while True:
        open_terms = [(mult, cycle) for mult, cycle in pending.items() if not cycle.is_graph()]
        if not open_terms:
            return
        mult, current = max(open_terms, key=lambda term: (term[1].degrees, term[1].key(N)))
        W = _next_witness(current)
        diff = boundary_diff(W)
        if not diff.is_zero():
            raise WitnessMismatch(f'{W.kind} witness for {current.render()} misses {diff.render()}')
        sign = W.claimed.coefficient(current)
        if sign not in (1, -1):
            raise WitnessMismatch(f'{W.kind} witness carries {current.render()} '
                                  f'with multiplicity {sign}')
        if W.kind == 'QStep':
            for _, piece in W.claimed.items():
                if piece.key() != current.key() and not piece.degrees < current.degrees:
                    raise WitnessMismatch(f'degree vector {current.degrees} -> {piece.degrees} '
                                          f'did not decrease')
        weight = mult * sign
        pending = pending - W.claimed * weight
        LOGGER.debug('%s on %s: %d open terms left', W.kind, current.degrees,
                     sum(1 for _, c in pending.items() if not c.is_graph()))
        yield weight, current, W


def _collect(Z, m, steps):
    ctx = Z.ctx
    start = steps[0][1]
    weights = [weight for weight, _, _ in steps[1:]]
    witnesses = [W for _, _, W in steps[1:]]
    schedule = [cycle.degrees for _, cycle, _ in steps[1:]]
    final = _as_sum(ctx, start)
    for weight, W in zip(weights, witnesses):
        final = final - W.claimed * weight
    graphs = SymbolSum(ctx, m)
    for mult, cycle in final.items():
        graphs.add(symbol_of_graph(cycle, m), mult)
    return ReductionResult(Z, start, final, graphs, witnesses, weights, schedule, m)


def reduce_to_graphs(Z, m):
    """Reduce an admissible cycle to graph cycles

    Open terms are reduced largest degree vector first. A ``QStep`` at the
    last level with :math:`d_i > 1` lowers it to :math:`y_i - c^{(i)}` and adds
    the zero sets of the later levels, all of smaller degree. When a later
    level blocks the step, a ``LevelSplit`` rewrites it as a product first.
    Every witness is verified before it is used.

    :param TriangularCycle Z: the cycle
    :param int m: read-off level
    :rtype: ReductionResult
    :raises UnhandledFaceShape: when no supported witness applies
    :raises WitnessMismatch: when a witness or the telescope does not check out
    """
    result = _collect(Z, m, list(_reduction_steps(Z, m + 1)))
    if not result.telescope():
        raise WitnessMismatch(f'witness chain of {Z.render()} does not telescope')
    LOGGER.info('reduced %s in %d steps to %s', Z.degrees, len(result.witnesses),
                result.graphs.render())
    return result


def reduce_pair(Z1, Z2, m):
    """Reduce two cycles congruent modulo :math:`t^{m+1}` in lockstep

    :raises PreconditionError: when the cycles are not congruent
    :raises PairDiverged: when the schedules or the outputs differ
    """
    if not mod_equiv(Z1, Z2, m + 1):
        raise PreconditionError(f'cycles are not congruent modulo t^{m + 1}')
    N = m + 1
    steps1, steps2 = [], []
    missing = object()
    for step1, step2 in zip_longest(_reduction_steps(Z1, N), _reduction_steps(Z2, N), fillvalue=missing):
        if step1 is missing or step2 is missing:
            raise PairDiverged('one reduction stopped before the other')
        d1 = None if step1[1] is None else step1[1].degrees
        d2 = None if step2[1] is None else step2[1].degrees
        if d1 != d2:
            raise PairDiverged(f'degree vectors diverged: {d1} vs {d2}')
        kind1 = None if step1[2] is None else step1[2].kind
        kind2 = None if step2[2] is None else step2[2].kind
        if (step1[0], kind1) != (step2[0], kind2):
            raise PairDiverged(f'steps diverged at {d1}: {kind1} vs {kind2}')
        steps1.append(step1)
        steps2.append(step2)
    r1, r2 = _collect(Z1, m, steps1), _collect(Z2, m, steps2)
    if r1.graphs != r2.graphs:
        raise PairDiverged(f'outputs differ modulo t^{m + 1}: '
                           f'{r1.graphs.render()} vs {r2.graphs.render()}')
    return r1, r2


# -- n = 1 -------------------------------------------------------------------------------

def phi_n1(Z):
    """The constant term :math:`a_0 = (-1)^d P_1(0)` of a one-level cycle

    :rtype: LocalScalar
    """
    if Z.n != 1:
        raise PreconditionError(f'phi_n1 needs n = 1, got n = {Z.n}')
    return Z.polys[0].constant_value() * (-1) ** Z.degrees[0]


def witt_class_n1(Z, m):
    """The Witt vector of :math:`a_0` for a cycle with :math:`a_0 \\equiv 1 \\bmod t`"""
    return WittVector(truncate(phi_n1(Z), m + 1))


def witt_decompose_n1(Z, m):
    """Graph symbols :math:`\\{1 - \\alpha_i t^i\\}` whose sum is congruent to ``Z``"""
    x = witt_class_n1(Z, m)
    ctx = Z.ctx
    out = SymbolSum(ctx, m)
    for i, alpha in enumerate(witt_factor(x), start=1):
        if not ctx.is_zero(alpha):
            factor = TruncSeries.monomial(ctx, -alpha, i, m + 1) + TruncSeries.one(ctx, m + 1)
            out.add(MilnorSymbol([factor], m, ctx=ctx))
    return out


def star_n1(Z1, Z2, m):
    """The graph cycle of :math:`a_0 \\star b_0` for two vanishing one-level cycles"""
    product = witt_star(witt_class_n1(Z1, m), witt_class_n1(Z2, m))
    return TriangularCycle.graph(Z1.ctx, [product.series.lift()])


def certify_steinberg(a, tail=(), pos=0):
    """A verified witness that :math:`\\Gamma_{(a, 1 - a, tail)}` is a boundary"""
    W = make_witness('Steinberg', a=a, pos=pos, tail=list(tail))
    if not verify(W):
        raise WitnessMismatch(f'Steinberg witness for a = {W.params["a"].render()} does not verify')
    return W


def certify_bilinear(f1, f2, tail=()):
    """A verified witness for :math:`\\Gamma_{f_1 f_2} - \\Gamma_{f_1} - \\Gamma_{f_2}`"""
    W = make_witness('Bilinear', f1=f1, f2=f2, tail=list(tail))
    if not verify(W):
        raise WitnessMismatch('bilinearity witness does not verify')
    return W


# -- norms ---------------------------------------------------------------------------------

class NormResult:
    """Outcome of :py:func:`norm`"""

    outputs: SymbolSum = None
    """symbols over :math:`k_{m+1}` with multiplicities"""
    cycle: TriangularCycle = None
    """the triangularized push-forward"""
    multiplicity: int = None
    """push-forward multiplicity"""
    reduction: ReductionResult = None
    """the reduction of ``cycle``"""

    def __init__(self, outputs, cycle, multiplicity, reduction):
        self.outputs = outputs
        self.cycle = cycle
        self.multiplicity = multiplicity
        self.reduction = reduction

    @property
    def witnesses(self):
        return self.reduction.witnesses

    def fold(self):
        return self.outputs.fold()

    def to_record(self):
        record = self.reduction.to_record()
        record['outputs'] = self.outputs.to_records()
        record['multiplicity'] = self.multiplicity
        return record


def norm(s, ext=None, m=None):
    """Norm of a symbol over :math:`k'_{m+1}` to :math:`k_{m+1}`

    :param MilnorSymbol s: the symbol
    :param Extension ext: the extension, defaults to ``s.ext``
    :param int m: level, defaults to ``s.m``
    :rtype: NormResult
    """
    ext = ext if ext is not None else s.ext
    m = s.m if m is None else m
    if s.ext is not None and ext is not None and s.ext != ext:
        raise PreconditionError('symbol and extension disagree')
    if ext is not None and s.ext is None:
        s = MilnorSymbol(s.entries, s.m, ext, s.ctx)
    point = base_change_point(s.lifts(), ext)
    system, mult = triangularize(point)
    Z = TriangularCycle(system)
    reduction = reduce_to_graphs(Z, m)
    outputs = reduction.graphs * mult
    LOGGER.info('norm of %s: %s (multiplicity %d)', s.render(), outputs.render(), mult)
    return NormResult(outputs, Z, mult, reduction)


def trace_relative(s, ext=None, m=None, r=1):
    """Norm of a relative symbol, checking that the outputs vanish to order ``r``

    :raises NotRelative: when no entry is :math:`\\equiv 1 \\bmod t^r`
    :raises RelativeOrderLost: when an output graph vanishes to lower order
    """
    m = s.m if m is None else m
    if not 1 <= r <= m + 1:
        raise PreconditionError(f'relative level {r} outside 1..{m + 1}')
    if not s.is_relative(r):
        raise NotRelative(f'no entry of {s.render()} is 1 modulo t^{r}')
    result = norm(s, ext, m)
    for _, symbol in result.outputs.items():
        order = vanishing_order(graph(symbol), m)
        if order < r:
            raise RelativeOrderLost(f'output {symbol.render()} vanishes to order {order} < {r}')
    return result


def norm_n1_oracle(u, ext, m):
    """Determinant of multiplication by ``u`` on :math:`k'_{m+1}` over :math:`k_{m+1}`

    :rtype: TruncSeries
    """
    if ext is None:
        return truncate(u.lift() if isinstance(u, TruncSeries) else u, m + 1)
    u = MilnorSymbol([u], m, ext).entries[0]
    ctx = ext.ctx
    F = ctx.frac_field()
    rows = [[to_frac(F, c) for c in row] for row in u.multiplication_matrix()]
    D = len(rows)
    det = DomainMatrix(rows, (D, D), F).det()
    return truncate(from_frac(ctx, det), m + 1)


def specialize_symbol(s):
    """The image of ``s`` at :math:`t = 0`, a symbol with ``m = 0``"""
    if s.ext is None:
        entries = [e.retruncate(1) for e in s.entries]
    else:
        entries = [e.truncated(1) for e in s.entries]
    return MilnorSymbol(entries, 0, s.ext, s.ctx)


def field_norm(s, ext=None):
    """The classical norm :math:`K^M_n(k') \\to K^M_n(k)` as the ``m = 0`` pipeline"""
    if s.m != 0:
        s = specialize_symbol(s)
    return norm(s, ext, 0).outputs


def relative_norm_n1(u, ext, m):
    """Norm of ``u`` from the top of a tower to the tower without its last step

    The tower point :math:`(x_1, \\dots, x_{L-1}, u)` is triangularized; the
    last level's :math:`c^{(L)}` raised to the multiplicity is the norm.

    :return: an element of ``ext.base().algebra()``, or a series for a simple extension
    """
    u = MilnorSymbol([u], m, ext).entries[0]
    L = ext.height
    if L == 1:
        return norm(MilnorSymbol([u], m, ext), ext, m).fold()
    algebra = ext.algebra()
    coords = [algebra.var(j) for j in range(L - 1)] + [u]
    system, mult = triangularize(base_change_point(coords, ext))
    base = ext.base()
    if system.prefix(L - 1) != base.algebra():
        raise CrossCheckFailed('tower coordinates do not reproduce the base tower')
    d = system.degrees[L - 1]
    c = system.polys[L - 1].constant_coeff(L - 1) * (-1) ** d
    return (base.algebra().element(c.restrict(L - 1)) ** mult).truncated(m + 1)
