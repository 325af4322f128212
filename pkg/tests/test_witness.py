import json

import pytest

from milnorcycles.cycles import CycleSum, TriangularCycle
from milnorcycles.errors import (NonUnitParameter, PreconditionError,
                                 SteinbergDegenerate)
from milnorcycles.mpoly import MPoly
from milnorcycles.scalars import parse_local
from milnorcycles.witness import (boundary, boundary_diff, from_record,
                                  level_value, make_witness, qstep_constant,
                                  qstep_obstructions, split_values,
                                  to_record, verify)


def L(text, ctx):
    return parse_local(text, ctx)


@pytest.fixture
def quadratic(Q):
    return TriangularCycle.parse(Q, ['y1^2-(3+t)*y1+(1+t)'])


def test_bilinear(Q):
    f1, f2 = L('2+t', Q), L('3-t^2', Q)
    W = make_witness('Bilinear', f1=f1, f2=f2)
    assert W.claimed == (CycleSum.single(TriangularCycle.graph(Q, [f1 * f2]))
                         - CycleSum.single(TriangularCycle.graph(Q, [f1]))
                         - CycleSum.single(TriangularCycle.graph(Q, [f2])))
    assert verify(W)
    assert boundary_diff(W).is_zero()


def test_bilinear_with_tail(F5):
    W = make_witness('Bilinear', f1=L('2+t', F5), f2=L('2', F5), tail=[L('3+t', F5)])
    assert W.nvars == 3
    assert verify(W, precisions=(1, 3))


def test_bilinear_trivial_factor(Q):
    W = make_witness('Bilinear', f1=L('1', Q), f2=L('2+t', Q))
    assert W.claimed.is_zero()
    assert verify(W)


def test_steinberg(Q):
    a = L('2+t', Q)
    W = make_witness('Steinberg', a=a)
    assert W.claimed == CycleSum.single(TriangularCycle.graph(Q, [a, 1 - a]))
    assert verify(W)


def test_steinberg_inside_tail(F5):
    a = L('3+t^2', F5)
    W = make_witness('Steinberg', a=a, pos=1, tail=[L('2', F5), L('4+t', F5)])
    assert W.claimed == CycleSum.single(
        TriangularCycle.graph(F5, [L('2', F5), a, 1 - a, L('4+t', F5)]), -1)
    assert verify(W)


def test_steinberg_degenerate(Q):
    with pytest.raises(SteinbergDegenerate):
        make_witness('Steinberg', a=L('1+t', Q))
    with pytest.raises(NonUnitParameter):
        make_witness('Steinberg', a=L('t', Q))
    with pytest.raises(PreconditionError):
        make_witness('Steinberg', a=L('2', Q), pos=2, tail=[L('3', Q)])


def test_non_unit_parameters(Q):
    with pytest.raises(NonUnitParameter):
        make_witness('Bilinear', f1=L('t', Q), f2=L('2', Q))
    with pytest.raises(NonUnitParameter):
        make_witness('Bilinear', f1=L('2', Q), f2=L('3', Q), tail=[L('t^2', Q)])


def test_norm_reduce(Q, quadratic):
    W = make_witness('NormReduce', f=quadratic)
    assert W.claimed == (CycleSum.single(TriangularCycle.graph(Q, [L('1+t', Q)]))
                         - CycleSum.single(quadratic))
    assert verify(W)
    with pytest.raises(PreconditionError):
        make_witness('NormReduce', f=TriangularCycle.graph(Q, [2, 3]))


def test_qstep(Q, quadratic):
    assert qstep_constant(quadratic, 1).constant_value() == L('1+t', Q)
    W = make_witness('QStep', cycle=quadratic, i=1)
    assert W.reduced == TriangularCycle.graph(Q, [L('1+t', Q)])
    assert W.claimed == CycleSum.single(quadratic) - CycleSum.single(W.reduced)
    assert verify(W)


def test_qstep_on_upper_level(Q):
    Z = TriangularCycle.parse(Q, ['y1-(2+t)', 'y2^2-3*y2+(5+t)'])
    W = make_witness('QStep', cycle=Z, i=2)
    assert W.reduced == TriangularCycle.graph(Q, [L('2+t', Q), L('5+t', Q)])
    assert verify(W)


def test_qstep_preconditions(Q, quadratic):
    with pytest.raises(PreconditionError):
        make_witness('QStep', cycle=TriangularCycle.graph(Q, [2]), i=1)
    with pytest.raises(PreconditionError):
        make_witness('QStep', cycle=quadratic, i=2)


def test_tampered_claim(Q, quadratic):
    W = make_witness('QStep', cycle=quadratic, i=1)
    W.claimed = W.claimed * 2
    assert not verify(W)
    assert not boundary_diff(W).is_zero()


def test_unknown_kind(Q):
    with pytest.raises(PreconditionError):
        make_witness('Coboundary', a=L('2', Q))
    with pytest.raises(PreconditionError):
        make_witness('Bilinear', f1=2, f2=3)


def test_records(F5, quadratic):
    witnesses = [make_witness('Bilinear', f1=L('2+t', F5), f2=L('3', F5)),
                 make_witness('Steinberg', a=L('2+t', F5), pos=0, tail=[L('3', F5)]),
                 make_witness('QStep', cycle=TriangularCycle.parse(F5, ['y1^2-(3+t)*y1+(1+t)']), i=1)]
    for W in witnesses:
        record = json.loads(json.dumps(to_record(W, verified=True)))
        assert record['field'] == 'Fp:5'
        again = from_record(record)
        assert again.kind == W.kind
        assert again.claimed == W.claimed
        assert verify(again)
        assert boundary(again) == boundary(W)


@pytest.fixture
def sloped(F5):
    return TriangularCycle.parse(F5, ['y1^2-2', 'y2-(y1+1)'])


def test_qstep_root_face(F5, sloped):
    assert qstep_obstructions(sloped, 1) == []
    W = make_witness('QStep', cycle=sloped, i=1)
    assert W.reduced == TriangularCycle.parse(F5, ['y1-3', 'y2-4'])
    assert W.claimed.coefficient(sloped) == 1
    assert W.claimed.coefficient(W.reduced) == -1
    assert W.claimed.coefficient(TriangularCycle.parse(F5, ['y1+1', 'y2+2'])) == -1
    assert verify(W)


def test_qstep_blocked_level(F5):
    Z = TriangularCycle.parse(F5, ['y1^2-2', 'y2-(y1+2)'])
    assert level_value(Z, 2).render() == 'y1+2'
    assert qstep_obstructions(Z, 1) == [2]


def test_level_split(F5):
    Z = TriangularCycle.parse(F5, ['y1^2-2', 'y2-(y1+2)'])
    u = MPoly.var(F5, 2, 0)
    gu, inverse = split_values(Z, 2, u)
    assert gu.value.render() == '2*y1+2'
    assert inverse.value.render() == '3*y1'
    W = make_witness('LevelSplit', cycle=Z, j=2, u=u)
    assert W.claimed == (CycleSum.single(Z)
                         - CycleSum.single(TriangularCycle.parse(F5, ['y1^2-2', 'y2-(2*y1+2)']))
                         - CycleSum.single(TriangularCycle.parse(F5, ['y1^2-2', 'y2-3*y1'])))
    assert verify(W)
    for piece in (TriangularCycle.parse(F5, ['y1^2-2', 'y2-(2*y1+2)']),
                  TriangularCycle.parse(F5, ['y1^2-2', 'y2-3*y1'])):
        assert qstep_obstructions(piece, 1) == []
    again = from_record(json.loads(json.dumps(to_record(W))))
    assert again.params['u'] == W.params['u']
    assert verify(again)


def test_level_split_preconditions(F5, sloped):
    with pytest.raises(PreconditionError):
        make_witness('LevelSplit', cycle=sloped, j=1, u=MPoly.var(F5, 2, 0))
    with pytest.raises(PreconditionError):
        make_witness('LevelSplit', cycle=sloped, j=2, u=MPoly.var(F5, 2, 1))
    with pytest.raises(NonUnitParameter):
        make_witness('LevelSplit', cycle=sloped, j=2, u=MPoly.zero(F5, 2))
