r"""
Boundary witnesses: explicit cycles in :math:`n + 1` cube variables whose
boundary is claimed in closed form and recomputed face by face.

Five families are supported:

``Bilinear(f1, f2, tail)``
    :math:`f_1 y_1 - f_1 f_2 - (y_1 - f_1 f_2) y_2`, boundary
    :math:`-\Gamma_{f_1} - \Gamma_{f_2} + \Gamma_{f_1 f_2}`.
``Steinberg(a, pos, tail)``
    the curve :math:`(x, 1 - x, (a - x)/(1 - x))`, boundary
    :math:`(-1)^{pos} \Gamma_{(a, 1 - a)}` placed among the tail.
``NormReduce(f)``
    :math:`f(y_1) - (y_1 - 1)^{d-1}(y_1 - a_0) y_2`, boundary
    :math:`\Gamma_{a_0} - Z_f`.
``QStep(Z, i)``
    level ``i`` of ``Z`` replaced by
    :math:`P_i - (y_i - 1)^{d_i - 1}(y_i - c) y'`, boundary
    :math:`Z - Z' + \sum_{j > i} (-1)^{i+j} E_j`, where :math:`E_j` is the
    zero set of :math:`g_j(y_i)` on the curve for a later level
    :math:`y_j - g_j`.
``LevelSplit(Z, j, u)``
    the linear level :math:`y_j - g` of ``Z`` replaced by the bilinearity
    curve of :math:`g = (g u) \cdot u^{-1}`, boundary
    :math:`Z - Z_{g u} - Z_{u^{-1}}`.

Faces at :math:`y_j = 0` keep constant coefficients, faces at
:math:`y_j = \infty` keep leading coefficients; both are normalized with
:py:func:`~milnorcycles.cycles.normalize_system`.
"""
import logging

from milnorcycles.cycles import (CycleSum, TriangularCycle, graph_polys,
                                 normalize_system)
from milnorcycles.errors import (NonUnit, NonUnitParameter, PreconditionError,
                                 SteinbergDegenerate, UnhandledFaceShape)
from milnorcycles.mpoly import MPoly, parse_mpoly
from milnorcycles.scalars import (FieldCtx, LocalScalar, TruncSeries,
                                  parse_local)
from milnorcycles.talgebra import alg_inv

LOGGER = logging.getLogger(__name__)

KINDS = ('Bilinear', 'Steinberg', 'NormReduce', 'QStep', 'LevelSplit')


class Witness:
    """A parametric cycle together with its claimed boundary"""

    kind: str = None
    """one of :py:data:`KINDS`"""
    ctx = None
    """the residue field"""
    params: dict = None
    """the family parameters"""
    nvars: int = None
    """number of cube variables, :math:`n + 1`"""
    polys: tuple = None
    """the :math:`n` defining polynomials"""
    sign: int = None
    """orientation applied to the face sum"""
    claimed: CycleSum = None
    """the closed-form boundary"""
    reduced: TriangularCycle = None
    """for ``QStep``: the substituted cycle :math:`Z'` (``None`` when empty)"""

    def __init__(self, kind, ctx, params, nvars, polys, sign, claimed, reduced=None):
        self.kind = kind
        self.ctx = ctx
        self.params = params
        self.nvars = nvars
        self.polys = tuple(polys)
        self.sign = sign
        self.claimed = claimed
        self.reduced = reduced

    def __repr__(self):
        return f'Witness({self.kind}, {record_params(self)})'


def _scalar(x, ctx):
    if isinstance(x, LocalScalar):
        return x
    if isinstance(x, TruncSeries):
        return x.lift()
    return LocalScalar.constant(ctx, x)


def _context(params):
    for value in params.values():
        if hasattr(value, 'ctx'):
            return value.ctx
        if isinstance(value, (list, tuple)):
            for item in value:
                if hasattr(item, 'ctx'):
                    return item.ctx
    raise PreconditionError('cannot infer the field from the witness parameters')


def _require_units(names_values):
    for name, value in names_values:
        if not value.is_unit():
            raise NonUnitParameter(f'{name} = {value.render()} is not a unit of A')


def _graph_sum(ctx, entries, mult=1):
    cycle = normalize_system(ctx, graph_polys(ctx, entries), len(entries))
    if cycle is None:
        return CycleSum(ctx)
    return CycleSum.single(cycle, mult)


def _cycle_sum(ctx, cycle, mult=1):
    if cycle is None:
        return CycleSum(ctx)
    return CycleSum.single(cycle, mult)


def _bilinear(ctx, f1, f2, tail=()):
    f1, f2 = _scalar(f1, ctx), _scalar(f2, ctx)
    tail = [_scalar(b, ctx) for b in tail]
    _require_units([('f1', f1), ('f2', f2)] + [(f'tail[{j}]', b) for j, b in enumerate(tail)])
    nvars = 2 + len(tail)
    y1, y2 = MPoly.var(ctx, nvars, 0), MPoly.var(ctx, nvars, 1)
    prod = f1 * f2
    polys = [y1 * f1 - prod - (y1 - prod) * y2]
    polys += [MPoly.var(ctx, nvars, j + 2) - b for j, b in enumerate(tail)]
    claimed = (_graph_sum(ctx, [prod] + tail) - _graph_sum(ctx, [f1] + tail)
               - _graph_sum(ctx, [f2] + tail))
    params = {'f1': f1, 'f2': f2, 'tail': tail}
    return Witness('Bilinear', ctx, params, nvars, polys, 1, claimed)


def _steinberg(ctx, a, pos=0, tail=()):
    a = _scalar(a, ctx)
    tail = [_scalar(b, ctx) for b in tail]
    _require_units([('a', a)] + [(f'tail[{j}]', b) for j, b in enumerate(tail)])
    if not (1 - a).is_unit():
        raise SteinbergDegenerate(f'1 - a = {(1 - a).render()} is not a unit of A')
    if not 0 <= pos <= len(tail):
        raise PreconditionError(f'Steinberg position {pos} outside 0..{len(tail)}')
    nvars = 3 + len(tail)
    s = pos
    ys = [MPoly.var(ctx, nvars, j) for j in range(nvars)]
    polys = [ys[j] - b for j, b in enumerate(tail[:pos])]
    polys.append(ys[s] + ys[s + 1] - 1)
    polys.append((1 - ys[s]) * ys[s + 2] + (ys[s] - a))
    polys += [ys[s + 3 + j] - b for j, b in enumerate(tail[pos:])]
    entries = tail[:pos] + [a, 1 - a] + tail[pos:]
    claimed = _graph_sum(ctx, entries, (-1) ** pos)
    params = {'a': a, 'pos': pos, 'tail': tail}
    return Witness('Steinberg', ctx, params, nvars, polys, 1, claimed)


def _norm_reduce(ctx, f):
    if not isinstance(f, TriangularCycle) or f.n != 1:
        raise PreconditionError('NormReduce needs a one-variable triangular cycle')
    P = f.polys[0]
    d = f.degrees[0]
    a0 = P.constant_value() * (-1) ** d
    _require_units([('a_0', a0)])
    y1, y2 = MPoly.var(ctx, 2, 0), MPoly.var(ctx, 2, 1)
    W = P.pad(2) - (y1 - 1) ** (d - 1) * (y1 - a0) * y2
    claimed = _graph_sum(ctx, [a0]) - _cycle_sum(ctx, normalize_system(ctx, [P], 1))
    return Witness('NormReduce', ctx, {'f': f}, 2, [W], 1, claimed)


def qstep_constant(Z, i):
    """:math:`c^{(i)} = (-1)^{d_i}` times the constant term of :math:`P_i`,
    a polynomial in :math:`y_1, \\dots, y_{i-1}`"""
    P = Z.polys[i - 1]
    return P.constant_coeff(i - 1) * (-1) ** Z.degrees[i - 1]


def _check_qstep(Z, i):
    if not isinstance(Z, TriangularCycle):
        raise PreconditionError('QStep needs a triangular cycle')
    if not 1 <= i <= Z.n:
        raise PreconditionError(f'QStep level {i} outside 1..{Z.n}')
    d = Z.degrees[i - 1]
    if d < 2:
        raise PreconditionError(f'QStep needs d_{i} > 1, the level has degree {d}')
    if any(e != 1 for e in Z.degrees[i:]):
        raise PreconditionError(f'QStep at level {i} needs every later level linear, '
                                f'degrees are {Z.degrees}')


def _qstep_curve(ctx, Z, i):
    """The ``n`` polynomials of the QStep curve and :math:`c^{(i)}`"""
    i0 = i - 1
    nvars = Z.n + 1
    c = qstep_constant(Z, i)
    lifted = [P.insert_var(i0 + 1) for P in Z.polys]
    yi, yp = MPoly.var(ctx, nvars, i0), MPoly.var(ctx, nvars, i0 + 1)
    Q = lifted[i0] - (yi - 1) ** (Z.degrees[i0] - 1) * (yi - c.insert_var(i0 + 1)) * yp
    return lifted[:i0] + [Q] + lifted[i0 + 1:], c


def _root_face(ctx, curve, n, j):
    """Zero set of :math:`g_j` on the curve, the face :math:`y_j = 0`"""
    return normalize_system(ctx, [F.constant_coeff(j).drop_var(j) for F in curve], n)


def level_value(Z, j):
    """:math:`g_j` of a linear level :math:`y_j - g_j`, in the variables below ``j``"""
    return -Z.polys[j - 1].constant_coeff(j - 1)


def qstep_obstructions(Z, i):
    """Later levels at which the QStep faces leave the supported shapes

    Level ``j > i`` is obstructed when :math:`g_j(c^{(i)})` is not a unit of
    the prefix algebra, or when the zeros of :math:`g_j` on the curve do not
    normalize to an admissible cycle.

    :rtype: list
    """
    _check_qstep(Z, i)
    ctx, n, i0 = Z.ctx, Z.n, i - 1
    curve, c = _qstep_curve(ctx, Z, i)
    prefix = Z.sys.prefix(i0)
    substituted = c != MPoly.one(ctx, n)
    blocked = []
    for j in range(i + 1, n + 1):
        if substituted:
            at_c = level_value(Z, j).subs(i0, c).restrict(i0)
            if not prefix.element(at_c).is_unit():
                blocked.append(j)
                continue
        try:
            _root_face(ctx, curve, n, j)
        except UnhandledFaceShape as exc:
            LOGGER.debug('QStep at level %d of %s: root face of level %d: %s', i, Z.render(), j, exc)
            blocked.append(j)
    return blocked


def _qstep(ctx, Z, i):
    _check_qstep(Z, i)
    n, i0 = Z.n, i - 1
    curve, c = _qstep_curve(ctx, Z, i)
    substituted = list(Z.polys)
    substituted[i0] = MPoly.var(ctx, n, i0) - c
    reduced = normalize_system(ctx, substituted, n)
    start = normalize_system(ctx, Z.polys, n)
    claimed = _cycle_sum(ctx, start) - _cycle_sum(ctx, reduced)
    for j in range(i + 1, n + 1):
        claimed = claimed + _cycle_sum(ctx, _root_face(ctx, curve, n, j), (-1) ** (i + j))
    params = {'cycle': Z, 'i': i}
    return Witness('QStep', ctx, params, n + 1, curve, (-1) ** i, claimed, reduced)


def _with_level(ctx, Z, j, value):
    polys = list(Z.polys)
    polys[j - 1] = MPoly.var(ctx, Z.n, j - 1) - value.pad(Z.n)
    return normalize_system(ctx, polys, Z.n)


def split_values(Z, j, u):
    """``(g u, u^{-1})`` in the algebra below the linear level ``j``

    :raises NonUnitParameter: when ``u`` is not a unit there
    """
    j0 = j - 1
    prefix = Z.sys.prefix(j0)
    if u.nvars > j0 and u.main_var() >= j0:
        raise PreconditionError(f'split factor {u.render()} involves y{j} or a later variable')
    unit = prefix.element(u.restrict(j0) if u.nvars > j0 else u)
    try:
        inverse = alg_inv(unit)
    except NonUnit:
        raise NonUnitParameter(f'u = {u.render()} is not a unit below level {j}') from None
    g = prefix.element(level_value(Z, j).restrict(j0))
    return g * unit, inverse


def _level_split(ctx, Z, j, u):
    if not isinstance(Z, TriangularCycle):
        raise PreconditionError('LevelSplit needs a triangular cycle')
    n = Z.n
    if not 1 <= j <= n or Z.degrees[j - 1] != 1:
        raise PreconditionError(f'LevelSplit needs a linear level, got level {j} of {Z.degrees}')
    j0 = j - 1
    f1, f2 = split_values(Z, j, u)
    nvars = n + 1

    def lift(F):
        return F.pad(n).insert_var(j0 + 1)

    yj, yp = MPoly.var(ctx, nvars, j0), MPoly.var(ctx, nvars, j0 + 1)
    F1, G = lift(f1.value), lift(level_value(Z, j))
    lifted = [P.insert_var(j0 + 1) for P in Z.polys]
    polys = lifted[:j0] + [F1 * yj - G - (yj - G) * yp] + lifted[j:]
    claimed = (_cycle_sum(ctx, normalize_system(ctx, Z.polys, n))
               - _cycle_sum(ctx, _with_level(ctx, Z, j, f1.value))
               - _cycle_sum(ctx, _with_level(ctx, Z, j, f2.value)))
    params = {'cycle': Z, 'j': j, 'u': u.pad(n) if u.nvars < n else u}
    return Witness('LevelSplit', ctx, params, nvars, polys, (-1) ** (j + 1), claimed)


def make_witness(kind, **params):
    """Build a witness of the given family

    :param str kind: one of :py:data:`KINDS`
    :param params: ``f1, f2, tail`` / ``a, pos, tail`` / ``f`` / ``cycle, i`` / ``cycle, j, u``
    :rtype: Witness
    :raises NonUnitParameter: for a non-unit parameter
    :raises SteinbergDegenerate: when :math:`1 - a` is not a unit
    :raises UnhandledFaceShape: when a QStep face is not an admissible cycle
    """
    ctx = params.pop('ctx', None) or _context(params)
    if kind == 'Bilinear':
        return _bilinear(ctx, **params)
    if kind == 'Steinberg':
        return _steinberg(ctx, **params)
    if kind == 'NormReduce':
        return _norm_reduce(ctx, **params)
    if kind == 'QStep':
        return _qstep(ctx, params['cycle'], params['i'])
    if kind == 'LevelSplit':
        return _level_split(ctx, params['cycle'], params['j'], params['u'])
    raise PreconditionError(f'unknown witness kind {kind!r}, expected one of {KINDS}')


def boundary(W):
    """Signed sum of the normalized faces of ``W``

    :param Witness W: the witness
    :rtype: CycleSum
    :raises UnhandledFaceShape: for a face outside the supported shapes
    """
    n = W.nvars - 1
    total = CycleSum(W.ctx)
    for v in range(W.nvars):
        sign = W.sign * (-1) ** (v + 1)
        for at_infinity in (False, True):
            face = [(F.leading_coeff(v) if at_infinity else F.constant_coeff(v)).drop_var(v)
                    for F in W.polys]
            Z = normalize_system(W.ctx, face, n)
            LOGGER.debug('%s face y%d=%s: %s', W.kind, v + 1, 'inf' if at_infinity else '0',
                         'empty' if Z is None else Z.render())
            if Z is not None:
                total = total + CycleSum.single(Z, sign if at_infinity else -sign)
    return total


def boundary_diff(W):
    """``boundary(W) - claimed``, empty when the witness verifies"""
    return boundary(W) - W.claimed


def verify(W, precisions=()):
    """Recompute the boundary and compare it with the claim

    Equality is checked exactly, then after truncation at every precision in
    ``precisions``. An unsupported face counts as a failure.

    :param Witness W: the witness
    :param precisions: truncation precisions to check as well
    :rtype: bool
    """
    try:
        computed = boundary(W)
    except UnhandledFaceShape as exc:
        LOGGER.warning('%s witness has an unsupported face: %s', W.kind, exc)
        return False
    if computed != W.claimed:
        LOGGER.info('%s witness failed: boundary %s, claimed %s',
                    W.kind, computed.render(), W.claimed.render())
        return False
    for N in precisions:
        if computed.truncated(N) != W.claimed.truncated(N):
            LOGGER.info('%s witness failed modulo t^%d', W.kind, N)
            return False
    return True


# -- records -----------------------------------------------------------------------------

def record_params(W):
    """Parameters of ``W`` as grammar strings"""
    p = W.params
    if W.kind == 'Bilinear':
        return {'f1': p['f1'].render(), 'f2': p['f2'].render(),
                'tail': [b.render() for b in p['tail']]}
    if W.kind == 'Steinberg':
        return {'a': p['a'].render(), 'pos': p['pos'], 'tail': [b.render() for b in p['tail']]}
    if W.kind == 'NormReduce':
        return {'f': p['f'].render()}
    if W.kind == 'LevelSplit':
        return {'polys': p['cycle'].render(), 'j': p['j'], 'u': p['u'].render()}
    return {'polys': p['cycle'].render(), 'i': p['i']}


def to_record(W, verified=None):
    """JSON-ready record ``{kind, field, params, claimed, verified}``"""
    return {'kind': W.kind, 'field': W.ctx.tag, 'params': record_params(W),
            'claimed': W.claimed.to_records(), 'verified': verified}


def from_record(record):
    """Rebuild a witness from its parameters, keeping the recorded claim"""
    ctx = FieldCtx.from_tag(record['field'])
    kind = record['kind']
    p = record['params']
    if kind == 'Bilinear':
        W = make_witness(kind, ctx=ctx, f1=parse_local(p['f1'], ctx), f2=parse_local(p['f2'], ctx),
                         tail=[parse_local(b, ctx) for b in p.get('tail', [])])
    elif kind == 'Steinberg':
        W = make_witness(kind, ctx=ctx, a=parse_local(p['a'], ctx), pos=int(p.get('pos', 0)),
                         tail=[parse_local(b, ctx) for b in p.get('tail', [])])
    elif kind == 'NormReduce':
        W = make_witness(kind, ctx=ctx, f=TriangularCycle.parse(ctx, p['f']))
    elif kind == 'QStep':
        W = make_witness(kind, ctx=ctx, cycle=TriangularCycle.parse(ctx, p['polys']), i=int(p['i']))
    elif kind == 'LevelSplit':
        cycle = TriangularCycle.parse(ctx, p['polys'])
        W = make_witness(kind, ctx=ctx, cycle=cycle, j=int(p['j']), u=parse_mpoly(p['u'], ctx, cycle.n))
    else:
        raise PreconditionError(f'unknown witness kind {kind!r}')
    W.claimed = CycleSum.from_records(ctx, record['claimed'])
    return W
