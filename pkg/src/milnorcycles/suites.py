"""
Deterministic randomized property suites behind ``milnorcycles check``.

A suite run draws ``iters`` independent cases. Case ``j`` uses the ``j``-th
child of :py:class:`numpy.random.SeedSequence` ``(seed)``, so every case is
reproducible on its own. The first failing case is minimized to the smallest
truncation level at which the same case seed still fails.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from milnorcycles import randgen
from milnorcycles.cycles import (CycleSum, check_admissible, graph_polys,
                                 normalize_system, specialize, vanishing_order)
from milnorcycles.errors import MilnorCyclesError, PairDiverged, PropertyFailure
from milnorcycles.kgroups import (MilnorSymbol, field_norm, graph, norm,
                                  norm_n1_oracle, phi_n1, reduce_pair,
                                  reduce_to_graphs, relative_norm_n1,
                                  specialize_symbol, star_n1, trace_relative,
                                  witt_class_n1, witt_decompose_n1)
from milnorcycles.scalars import FieldCtx, truncate
from milnorcycles.witness import from_record, make_witness, to_record, verify
from milnorcycles.witt import (WittVector, ghost, vanishing_level, witt_add,
                               witt_factor, witt_neg, witt_restrict,
                               witt_star)

LOGGER = logging.getLogger(__name__)


def expect(condition, prop, message=''):
    """Raise :py:class:`PropertyFailure` unless ``condition`` holds"""
    if not condition:
        raise PropertyFailure(prop, message)


def case_seeds(seed, iters):
    """Per-case child seeds of the master seed"""
    return np.random.SeedSequence(seed).spawn(iters)


def reduced_graph_sum(symbols):
    """Graph cycles of a symbol sum with empty graphs dropped, keyed modulo :math:`t^{m+1}`"""
    ctx, N = symbols.ctx, symbols.m + 1
    out = CycleSum(ctx, N)
    for mult, symbol in symbols.items():
        Z = normalize_system(ctx, graph_polys(ctx, [e.lift() for e in symbol.entries]), symbol.n)
        if Z is not None:
            out = out + CycleSum.single(Z, mult, N)
    return out


# -- witt ----------------------------------------------------------------------------------

def witt_case(rng, ctx, m, caps):
    """Ring axioms, factorization round trip, ghost map, ideal property"""
    x, y, z = (randgen.witt_vector(rng, ctx, m) for _ in range(3))
    zero, one = WittVector.zero(ctx, m), WittVector.one(ctx, m)
    expect(witt_add(x, y) == witt_add(y, x), 'add-commutative')
    expect(witt_add(witt_add(x, y), z) == witt_add(x, witt_add(y, z)), 'add-associative')
    expect(witt_add(x, witt_neg(x)) == zero, 'add-inverse')
    expect(witt_star(x, y) == witt_star(y, x), 'star-commutative', f'{x.render()}, {y.render()}')
    expect(witt_star(witt_star(x, y), z) == witt_star(x, witt_star(y, z)), 'star-associative')
    expect(witt_star(x, witt_add(y, z)) == witt_add(witt_star(x, y), witt_star(x, z)),
           'distributive', f'{x.render()}, {y.render()}, {z.render()}')
    expect(witt_star(x, one) == x, 'star-identity', x.render())
    expect(WittVector.from_factors(ctx, witt_factor(x)) == x, 'factor-round-trip', x.render())
    if m >= 1 and ctx.allows_ghost(m):
        gx, gy = ghost(x), ghost(y)
        expect(ghost(witt_add(x, y)) == gx + gy, 'ghost-additive')
        expect(ghost(witt_star(x, y)) == gx * gy, 'ghost-multiplicative')
    expect(vanishing_level(witt_star(x, y)) >= vanishing_level(y), 'ideal')
    if m >= 1:
        k = int(rng.integers(0, m))
        expect(witt_restrict(witt_star(x, y), k) == witt_star(witt_restrict(x, k), witt_restrict(y, k)),
               'restrict-star')
    a, b = randgen.local_unit(rng, ctx, caps.deg_t), randgen.local_unit(rng, ctx, caps.deg_t)
    expect(truncate(a * b, m + 1) == truncate(a, m + 1) * truncate(b, m + 1), 'truncate-homomorphism')


# -- cycles --------------------------------------------------------------------------------

def cycles_case(rng, ctx, m, caps):
    """Reduction soundness, mod-equivalence preservation, graph and n = 1 invariants"""
    caps = caps.narrowed(d=min(caps.d, 3))
    Z = randgen.cycle(rng, ctx, caps)
    expect(check_admissible(Z.sys).accepted, 'admissible', Z.render())
    result = reduce_to_graphs(Z, m)
    schedule = result.schedule
    expect(all(a >= b for a, b in zip(schedule, schedule[1:])), 'degrees-non-increasing', str(schedule))
    expect(result.telescope(recompute=True), 'telescope', Z.render())

    Z2 = randgen.perturb(rng, Z, m)
    try:
        reduce_pair(Z, Z2, m)
    except PairDiverged as exc:
        raise PropertyFailure('mod-equivalence', str(exc)) from None

    r = int(rng.integers(1, m + 2))
    entries = [randgen.local_unit_not_one(rng, ctx, caps.deg_t)
               for _ in range(int(rng.integers(1, caps.n + 1)))]
    if rng.random() < 0.5:
        entries[int(rng.integers(0, len(entries)))] = randgen.relative_unit(rng, ctx, r, caps.deg_t)
    s = MilnorSymbol(entries, m, ctx=ctx)
    order = vanishing_order(graph(s), m)
    expect((order >= r) == s.is_relative(r), 'vanishing-order', f'{s.render()}, r = {r}')

    u = randgen.local_unit(rng, ctx, caps.deg_t)
    expect(phi_n1(graph(MilnorSymbol([u], m, ctx=ctx), lift=lambda e: u)) == u, 'phi-graph')

    r1, r2 = int(rng.integers(1, m + 2)), int(rng.integers(1, m + 2))
    V1, V2 = randgen.vanishing_cycle(rng, ctx, r1), randgen.vanishing_cycle(rng, ctx, r2)
    expect(vanishing_order(V1, m) >= r1, 'vanishing-cycle-order')
    x1 = witt_class_n1(V1, m)
    expect(vanishing_level(x1) >= r1, 'vanishing-constant-term', V1.render())
    expect(witt_decompose_n1(V1, m).fold() == x1.series, 'witt-decompose')
    star = witt_class_n1(star_n1(V1, V2, m), m)
    expect(vanishing_level(star) >= max(r1, r2), 'star-order', f'{V1.render()}, {V2.render()}')
    expect(reduce_to_graphs(V1, m).graphs.fold() == x1.series, 'reduce-n1')

    if not s.is_relative(1):
        low = CycleSum.single(graph(specialize_symbol(s)), N=1)
        expect(specialize(graph(s)) == low, 'specialize-graph', s.render())


# -- witness -------------------------------------------------------------------------------

def _tail(rng, ctx, caps):
    return [randgen.local_unit_not_one(rng, ctx, caps.deg_t)
            for _ in range(int(rng.integers(0, max(caps.n - 1, 1))))]


def witness_case(rng, ctx, m, caps):
    """One verified witness per family, plus a record round trip"""
    while True:
        f1 = randgen.local_unit_not_one(rng, ctx, caps.deg_t)
        f2 = randgen.local_unit_not_one(rng, ctx, caps.deg_t)
        if not (f1 * f2).is_one():
            break
    tail = _tail(rng, ctx, caps)
    a = randgen.steinberg_parameter(rng, ctx, caps.deg_t)
    pos = int(rng.integers(0, len(tail) + 1))
    f = randgen.cycle(rng, ctx, caps.narrowed(d=min(caps.d, 3)), n=1)
    Z = randgen.cycle(rng, ctx, caps.narrowed(d=min(caps.d, 3)), min_d=2)
    i = max(j for j, d in enumerate(Z.degrees, start=1) if d > 1)
    witnesses = [make_witness('Bilinear', f1=f1, f2=f2, tail=tail),
                 make_witness('Steinberg', a=a, pos=pos, tail=tail),
                 make_witness('NormReduce', f=f),
                 make_witness('QStep', cycle=Z, i=i)]
    V = randgen.cycle(rng, ctx, caps.narrowed(d=min(caps.d, 3)))
    witnesses += reduce_to_graphs(V, m).witnesses
    for W in witnesses:
        expect(verify(W, precisions=(m + 1,)), f'witness-{W.kind}', str(W))
    W = witnesses[int(rng.integers(0, len(witnesses)))]
    again = from_record(to_record(W))
    expect(verify(again) and again.claimed == W.claimed, 'witness-record', str(W))


# -- norms ---------------------------------------------------------------------------------

def norms_case(rng, ctx, m, caps):
    """Oracle equivalence, transitivity, relative traces, specialization"""
    ext = randgen.extension(rng, ctx, caps)
    u = randgen.ext_unit(rng, ext, caps.deg_t)
    s = MilnorSymbol([u], m, ext)
    result = norm(s)
    oracle = norm_n1_oracle(u, ext, m)
    expect(result.fold() == oracle, 'norm-oracle', f'{ext.render()}, u = {u.render()}')
    expect(result.reduction.telescope(), 'norm-telescope')
    low = field_norm(specialize_symbol(s), ext).fold()
    expect(result.fold().retruncate(1) == low, 'specialize-norm-n1', u.render())

    m_tower = min(m, 4)
    tower = randgen.tower(ctx, rng)
    v = randgen.ext_unit(rng, tower, caps.deg_t)
    one_step = norm(MilnorSymbol([v], m_tower, tower)).fold()
    middle = relative_norm_n1(v, tower, m_tower)
    two_step = norm(MilnorSymbol([middle], m_tower, tower.base())).fold()
    expect(one_step == two_step, 'transitivity', f'v = {v.render()}')

    r = int(rng.integers(1, m + 2))
    w = randgen.ext_relative_unit(rng, ext, r)
    trace_relative(MilnorSymbol([w], m, ext), r=r)

    if ext.degree() > 1:
        u, b = randgen.ext_unit(rng, ext, caps.deg_t), randgen.local_unit_not_one(rng, ctx, caps.deg_t)
        pos = int(rng.integers(0, 2))
        projected = MilnorSymbol([u, b] if pos == 0 else [b, u], m, ext)
        expect(norm(projected).outputs.fold_at(pos) == norm_n1_oracle(u, ext, m), 'projection-formula',
               projected.render())

        pair = MilnorSymbol(randgen.norm_symbol_entries(rng, ext, 2, m, caps), m, ext)
        result = norm(pair)
        expect(result.reduction.telescope(recompute=True), 'norm-telescope-n2', pair.render())
        low = norm(specialize_symbol(pair), ext, 0)
        if (low.cycle.degrees, low.multiplicity) == (result.cycle.degrees, result.multiplicity):
            lhs = reduced_graph_sum(result.outputs.retruncate(0))
            rhs = reduced_graph_sum(low.outputs)
            expect(lhs == rhs, 'specialize-norm-n2', f'{lhs.render()} vs {rhs.render()}')


# -- runner --------------------------------------------------------------------------------

CASES = {'witt': witt_case, 'cycles': cycles_case, 'witness': witness_case, 'norms': norms_case}
"""suite name -> case function ``(rng, ctx, m, caps)``"""


@dataclass
class SuiteReport:
    """Outcome of :py:func:`run_suite`"""

    suite: str
    """suite name"""
    field: str
    """field tag"""
    m: int
    """truncation level"""
    iters: int
    """number of cases drawn"""
    seed: int
    """master seed"""
    passed: int = 0
    """cases that passed"""
    reproducer: dict = field(default=None)
    """minimized failing case, ``None`` when every case passed"""

    @property
    def ok(self):
        return self.reproducer is None

    def to_record(self):
        return {'suite': self.suite, 'field': self.field, 'm': self.m, 'iters': self.iters,
                'seed': self.seed, 'passed': self.passed, 'ok': self.ok,
                'reproducer': self.reproducer}


def run_case(suite, ctx, m, child, caps=randgen.GeneratorCaps()):
    """Run one case; return ``None`` or ``(property, message)`` for a failure"""
    rng = randgen.default_rng(child)
    try:
        CASES[suite](rng, ctx, m, caps)
    except PropertyFailure as exc:
        return exc.prop, str(exc)
    except (MilnorCyclesError, ArithmeticError) as exc:
        return type(exc).__name__, str(exc)
    return None


def minimize(suite, ctx, m, child, caps=randgen.GeneratorCaps()):
    """The smallest level at which the case seeded by ``child`` fails"""
    for k in range(m + 1):
        failure = run_case(suite, ctx, k, child, caps)
        if failure is not None:
            return k, failure
    return m, run_case(suite, ctx, m, child, caps)


def run_suite(suite, ctx, m, iters, seed, caps=randgen.GeneratorCaps()):
    """Run ``iters`` cases of a suite, stopping at the first failure

    :param str suite: ``witt``, ``cycles``, ``witness`` or ``norms``
    :param FieldCtx ctx: the field
    :param int m: truncation level
    :param int iters: number of cases, positive
    :param int seed: master seed
    :param GeneratorCaps caps: generator caps
    :rtype: SuiteReport
    """
    if suite not in CASES:
        raise ValueError(f'unknown suite {suite!r}, expected one of {sorted(CASES)}')
    if iters <= 0:
        raise ValueError(f'iters must be positive, got {iters}')
    report = SuiteReport(suite, ctx.tag, m, iters, seed)
    for index, child in enumerate(case_seeds(seed, iters)):
        failure = run_case(suite, ctx, m, child, caps)
        if failure is None:
            report.passed += 1
            continue
        LOGGER.info('%s case %d failed at m = %d: %s', suite, index, m, failure[1])
        k, (prop, message) = minimize(suite, ctx, m, child, caps)
        report.reproducer = {'suite': suite, 'field': ctx.tag, 'm': k, 'seed': seed,
                             'case': index, 'property': prop, 'message': message}
        break
    LOGGER.info('%s suite: %d/%d cases passed', suite, report.passed, iters)
    return report


def reproduce(record, caps=randgen.GeneratorCaps()):
    """Rerun the case described by a reproducer record"""
    ctx = FieldCtx.from_tag(record['field'])
    child = case_seeds(record['seed'], record['case'] + 1)[record['case']]
    return run_case(record['suite'], ctx, record['m'], child, caps)
