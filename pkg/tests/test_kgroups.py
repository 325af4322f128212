import pytest

from milnorcycles import kgroups
from milnorcycles.cycles import TriangularCycle
from milnorcycles.errors import (NonUnitEntry, NotRelative, PairDiverged,
                                 PreconditionError, RelativeOrderLost,
                                 WitnessMismatch)
from milnorcycles.kgroups import (MilnorSymbol, SymbolSum, certify_bilinear,
                                  certify_steinberg, field_norm, graph, norm,
                                  norm_n1_oracle, phi_n1, reduce_pair,
                                  reduce_to_graphs, relative_norm_n1,
                                  specialize_symbol, star_n1, symbol_of_graph,
                                  trace_relative, witt_class_n1,
                                  witt_decompose_n1)
from milnorcycles.scalars import FieldCtx, parse_local, parse_series
from milnorcycles.suites import reduced_graph_sum
from milnorcycles.talgebra import Extension
from milnorcycles.witness import verify


@pytest.fixture
def quadratic(Q):
    return TriangularCycle.parse(Q, ['y1^2-(3+t)*y1+(1+t)'])


@pytest.fixture
def vanishing(Q):
    return TriangularCycle.parse(Q, ['y1^2-2*y1+1-t^2'])


def test_symbols(Q):
    s = MilnorSymbol.parse(Q, '{2+t, 3}', 2)
    assert s.n == 2
    assert s.render() == '{2+t, 3}'
    assert s == MilnorSymbol.parse(Q, ['2+t', '3'], 2)
    assert MilnorSymbol.parse(Q, ['1/(1-t)'], 2).render() == '{1+t+t^2}'
    with pytest.raises(NonUnitEntry):
        MilnorSymbol.parse(Q, ['t'], 2)


def test_relative_symbols(Q):
    s = MilnorSymbol.parse(Q, ['1+t^2', '3'], 2)
    assert s.is_relative(2)
    assert not s.is_relative(3)
    assert MilnorSymbol.parse(Q, ['1', '3'], 2).is_relative(3)


def test_symbol_sums(Q):
    s = MilnorSymbol.parse(Q, ['2+t', '3'], 2)
    total = SymbolSum(Q, 2, terms=[(1, s)])
    assert (total + total).render() == '2*{2+t, 3}'
    assert (total - total).is_zero()
    assert (-total).render() == '-{2+t, 3}'
    assert total.retruncate(0).render() == '{2, 3}'
    ones = SymbolSum(Q, 2, terms=[(1, MilnorSymbol.parse(Q, ['2+t'], 2)),
                                  (2, MilnorSymbol.parse(Q, ['3'], 2))])
    assert ones.fold().render() == '18+9*t'
    with pytest.raises(PreconditionError):
        total.fold()


def test_graph(Q):
    s = MilnorSymbol.parse(Q, ['2+t', '3'], 2)
    assert graph(s) == TriangularCycle.graph(Q, [parse_local('2+t', Q), 3])
    assert symbol_of_graph(graph(s), 2) == s
    with pytest.raises(NonUnitEntry):
        graph(s, lift=lambda e: parse_local('t', Q))


def test_reduce_graph_is_identity(Q):
    Z = TriangularCycle.parse(Q, ['y1-(2+t)', 'y2-3'])
    result = reduce_to_graphs(Z, 2)
    assert result.witnesses == []
    assert result.graphs.render() == '{2+t, 3}'
    assert result.telescope(recompute=True)


def test_reduce_one_step(Q, quadratic):
    result = reduce_to_graphs(quadratic, 2)
    assert result.graphs.render() == '{1+t}'
    assert len(result.witnesses) == 1
    assert result.witnesses[0].kind == 'QStep'
    assert all(verify(W) for W in result.witnesses)
    assert result.schedule == [(2,)]
    assert result.weights == [1]
    assert result.telescope(recompute=True)


def test_reduce_two_levels(Q):
    Z = TriangularCycle.parse(Q, ['y1^2-3*y1+(5+t)', 'y2^2-(2+t)*y2+3'])
    result = reduce_to_graphs(Z, 2)
    assert result.schedule == [(2, 2), (2, 1)]
    assert result.graphs.render() == '{5+t, 3}'
    assert result.telescope(recompute=True)
    record = result.to_record()
    assert len(record['witnesses']) == 2
    assert record['outputs'] == [{'mult': 1, 'entries': ['5+t', '3']}]


def test_reduce_pair(Q, quadratic):
    other = TriangularCycle.parse(Q, ['y1^2-(3+t)*y1+(1+t+t^3)'])
    r1, r2 = reduce_pair(quadratic, other, 2)
    assert r1.graphs == r2.graphs
    with pytest.raises(PreconditionError):
        reduce_pair(quadratic, other, 3)
    assert issubclass(PairDiverged, ArithmeticError)


def test_n1_maps(Q, vanishing):
    assert phi_n1(TriangularCycle.graph(Q, [parse_local('2+t', Q)])) == parse_local('2+t', Q)
    assert phi_n1(TriangularCycle.parse(Q, ['y1^2-(1+t)'])) == parse_local('-1-t', Q)
    assert witt_class_n1(vanishing, 4).render() == '1-t^2'
    decomposed = witt_decompose_n1(vanishing, 4)
    assert decomposed.render() == '{1-t^2}'
    assert decomposed.fold() == parse_series('1-t^2', Q, 5)
    star = star_n1(vanishing, vanishing, 6)
    assert star.graph_entries() == [parse_local('1-2*t^2+t^4', Q)]
    with pytest.raises(PreconditionError):
        phi_n1(TriangularCycle.graph(Q, [2, 3]))


def test_certificates(Q):
    W = certify_steinberg(parse_local('2+t', Q))
    assert W.kind == 'Steinberg'
    W = certify_steinberg(parse_local('3', Q), tail=[parse_local('2+t', Q)], pos=1)
    assert W.params['pos'] == 1
    W = certify_bilinear(parse_local('2+t', Q), parse_local('5', Q))
    assert W.kind == 'Bilinear'


def test_norm_n1(F5):
    ext = Extension.parse(F5, 'x^2-2')
    s = MilnorSymbol.parse(F5, ['x*(1+t)'], 2, ext)
    result = norm(s)
    assert result.multiplicity == 1
    assert result.fold().render() == '3+t+3*t^2'
    assert norm_n1_oracle(s.entries[0], ext, 2) == result.fold()
    assert all(verify(W) for W in result.witnesses)
    record = result.to_record()
    assert record['multiplicity'] == 1


def test_norm_n2(F5):
    ext = Extension.parse(F5, 'x^2-2')
    s = MilnorSymbol.parse(F5, '{x*(1+t), 2}', 2, ext)
    assert norm(s).outputs.render() == '{3+t+3*t^2, 2}'


def test_norm_of_base_symbol(Q):
    ext = Extension.parse(Q, 'x^2-2')
    result = norm(MilnorSymbol.parse(Q, ['2+t'], 2), ext)
    assert result.multiplicity == 2
    assert result.outputs.render() == '2*{2+t}'
    assert result.fold().render() == '4+4*t+t^2'
    assert result.witnesses == []


def test_norm_trivial_extension(Q):
    ext = Extension.parse(Q, 'x-1')
    result = norm(MilnorSymbol.parse(Q, ['2+t', '5'], 2, ext))
    assert result.outputs.render() == '{2+t, 5}'


def test_norm_to_one(F3):
    ext = Extension.parse(F3, 'x^2+1')
    s = MilnorSymbol.parse(F3, ['x'], 2, ext)
    assert norm(s).fold().render() == '1'
    assert norm_n1_oracle(s.entries[0], ext, 2).render() == '1'
    assert field_norm(MilnorSymbol.parse(F3, ['x+t'], 2, ext)).fold().render() == '1'


def test_trace_relative(F5):
    ext = Extension.parse(F5, 'x^2-2')
    s = MilnorSymbol.parse(F5, ['1+t*x'], 2, ext)
    result = trace_relative(s, r=1)
    assert result.fold().render() == '1+3*t^2'
    with pytest.raises(NotRelative):
        trace_relative(MilnorSymbol.parse(F5, ['2+t'], 2), r=1)
    with pytest.raises(PreconditionError):
        trace_relative(s, r=4)


def test_specialize_symbol(Q):
    s = MilnorSymbol.parse(Q, ['2+t', '3-t'], 2)
    assert specialize_symbol(s).render() == '{2, 3}'
    assert specialize_symbol(s).m == 0


def test_tower_norms(F5):
    tower = Extension.parse(F5, ['x1^2-2', 'x2^2-x1'])
    base = tower.base()
    x2 = tower.parse_element('x2')
    middle = relative_norm_n1(x2, tower, 1)
    assert middle == base.parse_element('-x1')
    direct = norm(MilnorSymbol([x2], 1, tower)).fold()
    assert direct.render() == '3'
    assert relative_norm_n1(middle, base, 1) == direct


def test_norm_over_rationals_matches_oracle():
    Q = FieldCtx()
    ext = Extension.parse(Q, 'x^2-2')
    u = ext.parse_element('x+1+t')
    assert norm(MilnorSymbol([u], 3, ext)).fold() == norm_n1_oracle(u, ext, 3)


@pytest.fixture
def sqrt2(F5):
    return Extension.parse(F5, 'x^2-2')


def check_norm(s):
    result = norm(s)
    assert all(verify(W) for W in result.witnesses)
    assert result.reduction.telescope(recompute=True)
    schedule = result.reduction.schedule
    assert all(a >= b for a, b in zip(schedule, schedule[1:]))
    return result


@pytest.mark.parametrize('m', [0, 2])
def test_norm_with_blocked_level(F5, sqrt2, m):
    s = MilnorSymbol.parse(F5, ['x', 'x+2'], m, sqrt2)
    result = check_norm(s)
    assert result.cycle == TriangularCycle.parse(F5, ['y1^2-2', 'y2-(y1+2)'])
    assert 'LevelSplit' in [W.kind for W in result.witnesses]
    assert all(symbol.n == 2 for _, symbol in result.outputs.items())


def test_norm_with_root_face(F5, sqrt2):
    result = check_norm(MilnorSymbol.parse(F5, ['x', 'x+1'], 1, sqrt2))
    assert [W.kind for W in result.witnesses] == ['QStep']
    assert result.reduction.final.coefficient(TriangularCycle.parse(F5, ['y1+1', 'y2+2'])) == 1
    assert result.reduction.final.coefficient(TriangularCycle.parse(F5, ['y1-3', 'y2-4'])) == 1
    assert sorted((mult, symbol.render()) for mult, symbol in result.outputs.items()) == \
        [(1, '{3, 4}'), (1, '{4, 3}')]


def test_norm_with_two_moving_entries(F5, sqrt2):
    s = MilnorSymbol.parse(F5, ['(1+t)*x', 'x+(2+t)'], 2, sqrt2)
    result = check_norm(s)
    assert 'LevelSplit' in [W.kind for W in result.witnesses]
    low = check_norm(specialize_symbol(s))
    assert low.cycle.degrees == result.cycle.degrees
    assert reduced_graph_sum(result.outputs.retruncate(0)) == reduced_graph_sum(low.outputs)


def test_reduce_dependent_levels(Q):
    Z = TriangularCycle.parse(Q, ['y1^2-(3+t)*y1+(1+t)', 'y2-(2*y1+1)'])
    result = reduce_to_graphs(Z, 2)
    assert all(verify(W) for W in result.witnesses)
    assert result.telescope(recompute=True)
    assert all(cycle.is_graph() for _, cycle in result.final.items())


def test_projection_formula_with_moving_entry(F5, sqrt2):
    u = sqrt2.parse_element('x+1+t')
    s = MilnorSymbol([u, parse_local('2+t', F5)], 2, sqrt2)
    assert norm(s).outputs.fold_at(0) == norm_n1_oracle(u, sqrt2, 2)


def test_tampered_witness_is_rejected(monkeypatch, quadratic):
    honest = kgroups._next_witness

    def tampered(Z):
        W = honest(Z)
        W.claimed = W.claimed * 2
        return W

    monkeypatch.setattr(kgroups, '_next_witness', tampered)
    with pytest.raises(WitnessMismatch) as info:
        reduce_to_graphs(quadratic, 2)
    assert isinstance(info.value, ArithmeticError)


def test_tampered_telescope(quadratic):
    result = reduce_to_graphs(quadratic, 2)
    result.weights = [2]
    assert not result.telescope()


def test_certificate_mismatch(monkeypatch, Q):
    monkeypatch.setattr(kgroups, 'verify', lambda W, **kwargs: False)
    with pytest.raises(WitnessMismatch):
        certify_steinberg(parse_local('2+t', Q))
    with pytest.raises(WitnessMismatch):
        certify_bilinear(parse_local('2+t', Q), parse_local('5', Q))


def test_relative_order_lost(monkeypatch, F5, sqrt2):
    monkeypatch.setattr(kgroups, 'vanishing_order', lambda Z, m: 0)
    with pytest.raises(RelativeOrderLost):
        trace_relative(MilnorSymbol.parse(F5, ['1+t*x'], 2, sqrt2), r=1)
