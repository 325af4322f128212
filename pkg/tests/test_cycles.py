import pytest

from milnorcycles.cycles import (CycleSum, TriangularCycle, check_admissible,
                                 compact_project, cycle_sum_ops, graph_polys,
                                 is_pre_vanishing, mod_equiv, normalize_system,
                                 specialize, vanishing_order)
from milnorcycles.errors import PreconditionError, UnhandledFaceShape
from milnorcycles.mpoly import parse_mpoly
from milnorcycles.scalars import parse_local


def L(text, ctx):
    return parse_local(text, ctx)


def polys(ctx, *texts, n=None):
    n = n or len(texts)
    return [parse_mpoly(s, ctx, n) for s in texts]


def test_admissibility(Q):
    report = check_admissible(graph_polys(Q, [L('1+t', Q), L('t', Q), L('2+t', Q)]))
    assert not report.accepted
    assert report.level == 2
    assert check_admissible(polys(Q, 'y1^2-(3+t)*y1+(1+t)')).accepted
    assert check_admissible(graph_polys(Q, [L('1+t', Q), L('2+t', Q)])).accepted
    assert check_admissible(polys(Q, 'y1^2-2', 'y2-y1')).accepted
    assert not check_admissible(polys(Q, 'y1^2-2', 'y2^2-(1-y1^2/2)*y2+t')).accepted


def test_not_admissible_cycle(Q):
    with pytest.raises(PreconditionError):
        TriangularCycle.parse(Q, ['y1^2-t'])
    with pytest.raises(PreconditionError):
        TriangularCycle.graph(Q, [L('t', Q)])


def test_parse_makes_monic(Q):
    assert TriangularCycle.parse(Q, ['2*y1^2-4']) == TriangularCycle.parse(Q, ['y1^2-2'])


def test_graph(Q):
    Z = TriangularCycle.graph(Q, [L('2+t', Q), 3])
    assert Z.is_graph()
    assert Z.graph_entries() == [L('2+t', Q), L('3', Q)]
    assert Z == TriangularCycle.parse(Q, ['y1-(2+t)', 'y2-3'])
    with pytest.raises(PreconditionError):
        TriangularCycle.parse(Q, ['y1^2-2']).graph_entries()


def test_vanishing_order(Q, F2):
    V = TriangularCycle.graph(Q, [L('1-3*t^2', Q), 5])
    assert vanishing_order(V, 4) == 2
    assert vanishing_order(TriangularCycle.graph(Q, [L('2+t', Q), 3]), 4) == 0
    assert vanishing_order(TriangularCycle.parse(Q, ['y1^2-(1+t)']), 4) == 0
    assert vanishing_order(TriangularCycle.parse(F2, ['y1^2-(1+t)']), 4) == 1
    assert vanishing_order(TriangularCycle.graph(Q, [1]), 3) == 4
    assert vanishing_order(TriangularCycle.parse(Q, ['y1^2-2*y1+1-t^2']), 4) == 2


def test_pre_vanishing(Q):
    assert is_pre_vanishing(TriangularCycle.graph(Q, [L('1+t', Q)]))
    assert is_pre_vanishing(TriangularCycle.parse(Q, ['y1^2-2*y1+1-t^2']))
    assert not is_pre_vanishing(TriangularCycle.graph(Q, [2]))


def test_specialize(Q):
    Z = TriangularCycle.graph(Q, [L('2+t', Q), 3])
    assert specialize(Z) == CycleSum.single(TriangularCycle.graph(Q, [2, 3]), N=1)
    assert specialize(TriangularCycle.graph(Q, [L('1+t', Q), 3])).is_zero()
    Z = TriangularCycle.parse(Q, ['y1^2-(2+t)'])
    assert specialize(Z) == CycleSum.single(TriangularCycle.parse(Q, ['y1^2-2']), N=1)


def test_specialize_partial_component(Q):
    Z = TriangularCycle.parse(Q, ['y1^2-(3+t)*y1+2'])
    with pytest.warns(UserWarning):
        special = specialize(Z)
    assert special == CycleSum.single(TriangularCycle.graph(Q, [2]), N=1)


def test_mod_equiv(Q):
    Z1 = TriangularCycle.parse(Q, ['y1^2-(3+t)*y1+(1+t)'])
    Z2 = TriangularCycle.parse(Q, ['y1^2-(3+t)*y1+(1+t+t^3)'])
    assert mod_equiv(Z1, Z2, 3)
    assert not mod_equiv(Z1, Z2, 4)
    with pytest.raises(PreconditionError):
        mod_equiv(Z1, TriangularCycle.graph(Q, [2, 3]), 3)


def test_compact_project(Q):
    Z = TriangularCycle.parse(Q, ['y1^2-2', 'y2-(1+t)*y1'])
    assert compact_project(Z, 1) == TriangularCycle.parse(Q, ['y1^2-2'])
    assert compact_project(Z, 2) is Z
    with pytest.raises(PreconditionError):
        compact_project(Z, 3)


def test_cycle_sums(Q):
    a = TriangularCycle.graph(Q, [L('2+t', Q)])
    b = TriangularCycle.graph(Q, [L('2+t+t^3', Q)])
    s = CycleSum.single(a, 2) - CycleSum.single(b)
    assert len(s) == 2
    assert (s - s).is_zero()
    assert s.truncated(2) == CycleSum.single(a, N=2)
    assert cycle_sum_ops(s, -s, 'add').is_zero()
    assert CycleSum.from_records(Q, s.to_records()) == s
    with pytest.raises(PreconditionError):
        s + CycleSum.single(TriangularCycle.graph(Q, [2, 3]))
    with pytest.raises(PreconditionError):
        cycle_sum_ops(s, s.truncated(2), 'eq')


def test_box(Q):
    s = CycleSum.single(TriangularCycle.graph(Q, [L('2+t', Q)]))
    assert s.box([3]) == CycleSum.single(TriangularCycle.graph(Q, [L('2+t', Q), 3]))


def test_normalize_strips_factors(Q):
    Z = normalize_system(Q, polys(Q, '(y1-1)*(y1-(2+t))'), 1)
    assert Z == TriangularCycle.graph(Q, [L('2+t', Q)])
    assert normalize_system(Q, polys(Q, '(y1-1)^2'), 1) is None


def test_normalize_empty_sets(Q):
    assert normalize_system(Q, polys(Q, 't', n=1), 1) is None
    assert normalize_system(Q, polys(Q, 'y1-2', 'y1-3', n=1), 1) is None
    assert normalize_system(Q, polys(Q, 'y1-2', 'y1-2-t^2', n=1), 1) is None


def test_normalize_side_condition(Q):
    Z = normalize_system(Q, polys(Q, 'y1^2-(3+t)', 'y1^4-(3+t)^2', n=1), 1)
    assert Z == TriangularCycle.parse(Q, ['y1^2-(3+t)'])


def test_normalize_orders_levels(Q):
    Z = normalize_system(Q, polys(Q, 'y2-3', 'y1-(2+t)', n=2), 2)
    assert Z == TriangularCycle.graph(Q, [L('2+t', Q), 3])


def test_normalize_unhandled(Q):
    with pytest.raises(UnhandledFaceShape):
        normalize_system(Q, polys(Q, 'y1^2-4', 'y1-2', n=1), 1)
    with pytest.raises(UnhandledFaceShape):
        normalize_system(Q, polys(Q, 'y1^2-2', 'y2*(y1^2-2)', n=2), 2)
